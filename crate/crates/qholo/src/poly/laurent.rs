//! Sparse multivariate Laurent polynomials over arbitrary-precision integers.
//!
//! Representation: term map from exponent vectors `[e_a, e_q, e_M]` to nonzero
//! `BigInt` coefficients, stored in a `BTreeMap` so iteration order is
//! canonical. Exponents may be negative. The zero polynomial is the empty map.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::PolyError;

pub const NVARS: usize = 3;

/// Variable index into exponent vectors; fixed global order a > q > M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    A = 0,
    Q = 1,
    M = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::A, Var::Q, Var::M];

    pub fn symbol(self) -> &'static str {
        match self {
            Var::A => "a",
            Var::Q => "q",
            Var::M => "M",
        }
    }
}

pub type Exps = [i32; NVARS];

/// Substitution target for a single variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstTarget {
    /// Replace the variable by q^k.
    QPow(i32),
    /// Replace the variable by 1.
    One,
}

/// A partial substitution map over the three variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    pub targets: [Option<SubstTarget>; NVARS],
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, v: Var, t: SubstTarget) -> Self {
        self.targets[v as usize] = Some(t);
        self
    }

    /// a -> q^n
    pub fn a_to_qpow(n: i32) -> Self {
        Self::new().set(Var::A, SubstTarget::QPow(n))
    }

    /// a -> 1, q -> 1
    pub fn a_and_q_to_one() -> Self {
        Self::new()
            .set(Var::A, SubstTarget::One)
            .set(Var::Q, SubstTarget::One)
    }

    pub fn q_to_one() -> Self {
        Self::new().set(Var::Q, SubstTarget::One)
    }

    /// M -> q^n
    pub fn m_to_qpow(n: i32) -> Self {
        Self::new().set(Var::M, SubstTarget::QPow(n))
    }

    pub fn m_to_one() -> Self {
        Self::new().set(Var::M, SubstTarget::One)
    }

    fn apply(&self, e: Exps) -> Exps {
        let mut out = [0i32; NVARS];
        for v in 0..NVARS {
            match self.targets[v] {
                None => out[v] += e[v],
                Some(SubstTarget::One) => {}
                Some(SubstTarget::QPow(k)) => out[Var::Q as usize] += k * e[v],
            }
        }
        out
    }
}

#[derive(Clone, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Exps, BigInt>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for LaurentPoly {}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial<T: Into<BigInt>>(c: T, exps: Exps) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    pub fn var_pow(v: Var, k: i32) -> Self {
        let mut e = [0; NVARS];
        e[v as usize] = k;
        Self::monomial(1, e)
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&[0, 0, 0]).map_or(false, |c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigInt)> {
        self.terms.iter()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.terms.is_empty() {
            return Some(BigInt::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&[0, 0, 0]) {
                return Some(c.clone());
            }
        }
        None
    }

    /// The (coefficient, exponents) of the single term, if a monomial.
    pub fn as_monomial(&self) -> Option<(BigInt, Exps)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), *e))
        } else {
            None
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Exps, BigInt)>) -> Self {
        let mut terms: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (e, c) in it {
            if c.is_zero() {
                continue;
            }
            match terms.entry(e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += c;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        Self { terms }
    }

    /// Which variables actually occur (nonzero exponent somewhere).
    pub fn vars_used(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|&v| self.terms.keys().any(|e| e[v as usize] != 0))
            .collect()
    }

    /// Minimum exponent of `v` over all terms (0 for the zero polynomial).
    pub fn min_exp(&self, v: Var) -> i32 {
        self.terms
            .keys()
            .map(|e| e[v as usize])
            .min()
            .unwrap_or(0)
    }

    pub fn max_exp(&self, v: Var) -> i32 {
        self.terms
            .keys()
            .map(|e| e[v as usize])
            .max()
            .unwrap_or(0)
    }

    pub fn min_exps(&self) -> Exps {
        let mut m = [0; NVARS];
        for (i, v) in Var::ALL.into_iter().enumerate() {
            m[i] = self.min_exp(v);
        }
        m
    }

    /// Multiply by the monomial with the given exponent shift.
    pub fn mul_monomial(&self, shift: Exps) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                (
                    [e[0] + shift[0], e[1] + shift[1], e[2] + shift[2]],
                    c.clone(),
                )
            })
            .collect();
        Self { terms }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Leading term under lex order (a, then q, then M), largest exponents first.
    pub fn leading_term(&self) -> Option<(&Exps, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Exact division; errors if `d` is zero or does not divide `self`.
    pub fn divide_exact(&self, d: &Self) -> Result<Self, PolyError> {
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // Reduce to ordinary polynomial division by shifting out the lowest
        // exponents; per-variable low degrees are additive over products.
        let pm = self.min_exps();
        let dm = d.min_exps();
        let shift = [pm[0] - dm[0], pm[1] - dm[1], pm[2] - dm[2]];
        let p = self.mul_monomial([-pm[0], -pm[1], -pm[2]]);
        let d0 = d.mul_monomial([-dm[0], -dm[1], -dm[2]]);

        let mut rem = p;
        let mut quot: BTreeMap<Exps, BigInt> = BTreeMap::new();
        let (dlt_e, dlt_c) = {
            let (e, c) = d0.leading_term().unwrap();
            (*e, c.clone())
        };
        while !rem.is_zero() {
            let (rlt_e, rlt_c) = {
                let (e, c) = rem.leading_term().unwrap();
                (*e, c.clone())
            };
            let qe = [rlt_e[0] - dlt_e[0], rlt_e[1] - dlt_e[1], rlt_e[2] - dlt_e[2]];
            if qe.iter().any(|&x| x < 0) {
                return Err(PolyError::NotDivisible);
            }
            let (qc, r) = rlt_c.div_rem(&dlt_c);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            quot.insert(qe, qc.clone());
            let t = d0.mul_monomial(qe).scale(&qc);
            rem = &rem - &t;
        }
        Ok(Self { terms: quot }.mul_monomial(shift))
    }

    /// Apply a partial substitution from `{a -> q^N | a -> 1 | q -> 1 | M -> q^n | M -> 1}`.
    pub fn substitute(&self, s: &Subst) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (s.apply(*e), c.clone())))
    }

    /// M -> q^i * M, the ring automorphism implementing L^i b(M) = b(q^i M) L^i.
    pub fn shift_m(&self, i: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0], e[1] + i * e[2], e[2]], c.clone()))
                .collect(),
        }
    }

    /// q -> q^{-1}, used by the rank-level duality involution.
    pub fn invert_q(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0], -e[1], e[2]], c.clone()))
                .collect(),
        }
    }

    /// a -> a^{-1}, used by the mirror-image symmetry.
    pub fn invert_a(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([-e[0], e[1], e[2]], c.clone()))
                .collect(),
        }
    }

    /// gcd of the integer coefficients (non-negative; 0 for the zero polynomial).
    pub fn int_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// True if every coefficient is a nonnegative integer.
    pub fn coeffs_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Evaluate modulo a prime at the given points, for gcd pre-checks.
    /// Points must be nonzero mod p (negative exponents use inverses).
    pub fn eval_modp(&self, pts: [u64; NVARS], p: u64) -> Option<u64> {
        fn powmod(mut b: u64, e: u64, p: u64) -> u64 {
            let mut acc: u64 = 1;
            b %= p;
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    acc = ((acc as u128 * b as u128) % p as u128) as u64;
                }
                b = ((b as u128 * b as u128) % p as u128) as u64;
                e >>= 1;
            }
            acc
        }
        let mut total: u64 = 0;
        for (e, c) in &self.terms {
            let mut t = {
                let m = (c % BigInt::from(p)).to_string();
                let v: i64 = m.parse().ok()?;
                v.rem_euclid(p as i64) as u64
            };
            for v in 0..NVARS {
                let exp = e[v];
                if exp == 0 {
                    continue;
                }
                let base = if exp > 0 {
                    pts[v] % p
                } else {
                    // inverse via Fermat
                    powmod(pts[v] % p, p - 2, p)
                };
                if base == 0 {
                    return None;
                }
                let f = powmod(base, exp.unsigned_abs() as u64, p);
                t = ((t as u128 * f as u128) % p as u128) as u64;
            }
            total = ((total as u128 + t as u128) % p as u128) as u64;
        }
        Some(total)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            match terms.entry(*e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += c;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        LaurentPoly { terms }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut terms: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                let c = c1 * c2;
                match terms.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += c;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
        }
        LaurentPoly { terms }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Largest lex term first reads most naturally.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.magnitude();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !abs.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(abs.to_string());
            }
            for v in Var::ALL {
                let exp = e[v as usize];
                if exp == 1 {
                    parts.push(v.symbol().to_string());
                } else if exp != 0 {
                    parts.push(format!("{}^{}", v.symbol(), exp));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
