//! The q-Weyl algebras Wt = Z[a,q,M]<L> and W = Z[q,M]<L> with L M = q M L.
//!
//! Operators are stored in normal order: coefficients a_j(a,q,M) to the left
//! of powers of L, so P = sum_j a_j L^j. The shift rule L^i b(M) = b(q^i M) L^i
//! drives multiplication. Operators act on sequences by
//! (P f)_n = sum_j a_j(a, q, q^n) f_{n+j}.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::gcd::{gcd, gcd_many};
use crate::poly::laurent::{LaurentPoly, Subst, Var};
use crate::poly::rational::RationalFn;
use crate::poly::{PolyError, PolyRepr};
use num_traits::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algebra {
    /// Z[a,q,M]<L>
    Wt,
    /// Z[q,M]<L>
    W,
}

impl Algebra {
    pub fn tag(self) -> &'static str {
        match self {
            Algebra::Wt => "Wt",
            Algebra::W => "W",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "Wt" => Some(Algebra::Wt),
            "W" => Some(Algebra::W),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QweylError {
    #[error("operands live in different algebras")]
    AlgebraMismatch,
    #[error("coefficient uses the variable a, not allowed in W")]
    ForbiddenVariable,
    #[error("sequence range 0..{have} is too short for an order-{order} operator")]
    RangeTooShort { have: usize, order: usize },
    #[error("the zero operator has no content-free form")]
    ZeroOperator,
    #[error("substitution is inconsistent with the algebra tag")]
    BadSpecialization,
    #[error("malformed serialized operator: {0}")]
    Malformed(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An Ore operator sum_{j=0}^{d} coeffs[j] * L^j in normal order.
/// Trailing zero coefficients are trimmed, so the leading coefficient is
/// nonzero; the zero operator is the empty coefficient list.
#[derive(Clone, PartialEq, Eq)]
pub struct OreOperator {
    algebra: Algebra,
    coeffs: Vec<LaurentPoly>,
}

impl OreOperator {
    pub fn new(algebra: Algebra, mut coeffs: Vec<LaurentPoly>) -> Result<Self, QweylError> {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if algebra == Algebra::W
            && coeffs
                .iter()
                .any(|c| c.vars_used().contains(&Var::A))
        {
            return Err(QweylError::ForbiddenVariable);
        }
        Ok(Self { algebra, coeffs })
    }

    pub fn zero(algebra: Algebra) -> Self {
        Self {
            algebra,
            coeffs: Vec::new(),
        }
    }

    pub fn one(algebra: Algebra) -> Self {
        Self {
            algebra,
            coeffs: vec![LaurentPoly::one()],
        }
    }

    /// The shift operator L.
    pub fn shift(algebra: Algebra) -> Self {
        Self {
            algebra,
            coeffs: vec![LaurentPoly::zero(), LaurentPoly::one()],
        }
    }

    /// A degree-0 operator, multiplication by a polynomial in (a, q, M).
    pub fn scalar(algebra: Algebra, p: LaurentPoly) -> Result<Self, QweylError> {
        Self::new(algebra, vec![p])
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order d; None for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> LaurentPoly {
        self.coeffs.get(j).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, QweylError> {
        if self.algebra != rhs.algebra {
            return Err(QweylError::AlgebraMismatch);
        }
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|j| &self.coeff(j) + &rhs.coeff(j)).collect();
        Self::new(self.algebra, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, QweylError> {
        self.add(&rhs.neg())
    }
}

/// Normal-ordered product: (a_i L^i)(b_j L^j) = a_i b_j(q^i M) L^{i+j}.
pub fn op_multiply(p: &OreOperator, q: &OreOperator) -> Result<OreOperator, QweylError> {
    if p.algebra != q.algebra {
        return Err(QweylError::AlgebraMismatch);
    }
    if p.is_zero() || q.is_zero() {
        return Ok(OreOperator::zero(p.algebra));
    }
    let mut coeffs = vec![LaurentPoly::zero(); p.coeffs.len() + q.coeffs.len() - 1];
    for (i, a) in p.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let t = a * &b.shift_m(i as i32);
            coeffs[i + j] = &coeffs[i + j] + &t;
        }
    }
    OreOperator::new(p.algebra, coeffs)
}

/// A sequence f_0, f_1, ..., f_{n_max} of exact rational functions, the data
/// an operator acts on: M multiplies term n by q^n and L shifts n -> n+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceView {
    vals: Vec<RationalFn>,
}

impl SequenceView {
    pub fn new(vals: Vec<RationalFn>) -> Self {
        Self { vals }
    }

    pub fn from_fn(n_max: usize, f: impl Fn(usize) -> RationalFn) -> Self {
        Self {
            vals: (0..=n_max).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&RationalFn> {
        self.vals.get(n)
    }

    pub fn vals(&self) -> &[RationalFn] {
        &self.vals
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|v| v.is_zero())
    }

    /// Apply a substitution (for example a -> q^N) to every term.
    pub fn specialize(&self, s: &Subst) -> Result<Self, PolyError> {
        Ok(Self {
            vals: self
                .vals
                .iter()
                .map(|v| v.specialize(s))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// (P f)_n = sum_j a_j(a, q, q^n) f_{n+j}, defined for 0 <= n <= n_max - d.
pub fn op_apply(p: &OreOperator, f: &SequenceView) -> Result<SequenceView, QweylError> {
    let d = p.order().unwrap_or(0);
    if f.len() <= d {
        return Err(QweylError::RangeTooShort {
            have: f.len(),
            order: d,
        });
    }
    let mut out = Vec::with_capacity(f.len() - d);
    for n in 0..f.len() - d {
        let mut acc = RationalFn::zero();
        for (j, a) in p.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a_at_n = a.substitute(&Subst::m_to_qpow(n as i32));
            let t = &RationalFn::from_poly(a_at_n) * &f.vals[n + j];
            acc = &acc + &t;
        }
        out.push(acc);
    }
    Ok(SequenceView::new(out))
}

/// Divide out the full content in Z[a,q,M]: the polynomial gcd of the
/// coefficients together with their common monomial factor, with the sign
/// fixed so the leading coefficient's lex-largest monomial is positive.
pub fn content_free(p: &OreOperator) -> Result<OreOperator, QweylError> {
    if p.is_zero() {
        return Err(QweylError::ZeroOperator);
    }
    // Common monomial content: the min exponent of each variable over all
    // nonzero coefficients (gcd() normalizes it away, so handle it here).
    let mut shift = [i32::MAX; 3];
    for c in p.coeffs.iter().filter(|c| !c.is_zero()) {
        let m = c.min_exps();
        for v in 0..3 {
            shift[v] = shift[v].min(m[v]);
        }
    }
    let g = gcd_many(p.coeffs.iter().filter(|c| !c.is_zero()));
    let mut coeffs: Vec<LaurentPoly> = p
        .coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                LaurentPoly::zero()
            } else {
                c.mul_monomial([-shift[0], -shift[1], -shift[2]])
                    .divide_exact(&g)
                    .expect("content divides every coefficient")
            }
        })
        .collect();
    let lead_negative = coeffs
        .last()
        .and_then(|c| c.leading_term())
        .map_or(false, |(_, c)| c.is_negative());
    if lead_negative {
        for c in &mut coeffs {
            *c = -&*c;
        }
    }
    OreOperator::new(p.algebra, coeffs)
}

/// Coefficientwise substitution; a -> q^N and a -> 1 land in W.
pub fn op_specialize(p: &OreOperator, s: &Subst) -> Result<OreOperator, QweylError> {
    use crate::poly::laurent::SubstTarget;
    if s.targets[Var::M as usize].is_some() {
        // M is an algebra generator here, not a substitutable scalar.
        return Err(QweylError::BadSpecialization);
    }
    let target = if s.targets[Var::A as usize].is_some() || p.algebra == Algebra::W {
        Algebra::W
    } else {
        Algebra::Wt
    };
    if p.algebra == Algebra::W {
        if let Some(SubstTarget::QPow(_) | SubstTarget::One) = s.targets[Var::A as usize] {
            // harmless: W coefficients contain no a, so accept silently
        }
    }
    OreOperator::new(target, p.coeffs.iter().map(|c| c.substitute(s)).collect())
}

/// Operators with rational-function coefficients: the localized algebra
/// E(a,q,M)<L> where the Euclidean algorithm runs.
#[derive(Clone, Debug, PartialEq, Eq)]
struct LocOp {
    coeffs: Vec<RationalFn>,
}

impl LocOp {
    fn from_op(p: &OreOperator) -> Self {
        Self {
            coeffs: p
                .coeffs
                .iter()
                .map(|c| RationalFn::from_poly(c.clone()))
                .collect(),
        }
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Right remainder of self by b: self = s * b + r with deg r < deg b.
    fn right_rem(&self, b: &LocOp) -> LocOp {
        let mut r = self.clone();
        r.trim();
        let db = b.degree();
        while !r.is_zero() && r.degree() >= db {
            let dr = r.degree();
            let k = (dr - db) as i32;
            // cancel with c * L^k * b, whose leading coefficient is
            // shift_m by k of b's leading coefficient
            let blead = b.coeffs[db].shift_m(k);
            let c = r.coeffs[dr]
                .div(&blead)
                .expect("leading coefficient nonzero");
            for (j, bc) in b.coeffs.iter().enumerate() {
                if bc.is_zero() {
                    continue;
                }
                let t = &c * &bc.shift_m(k);
                let idx = j + dr - db;
                r.coeffs[idx] = &r.coeffs[idx] - &t;
            }
            r.trim();
            if !r.is_zero() && r.degree() == dr {
                // leading term must have cancelled
                unreachable!("right division failed to lower the degree");
            }
        }
        r
    }

    /// Clear denominators to land back in the integral algebra.
    fn integral_lift(&self, algebra: Algebra) -> Result<OreOperator, QweylError> {
        let mut den = LaurentPoly::one();
        for c in &self.coeffs {
            // den := lcm(den, denom(c))
            let g = gcd(&den, c.denom());
            den = &den * &c.denom().divide_exact(&g).expect("gcd divides");
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let extra = den.divide_exact(c.denom()).expect("lcm is a multiple");
                c.numer() * &extra
            })
            .collect();
        OreOperator::new(algebra, coeffs)
    }
}

/// Right gcd in the localized algebra by the Euclidean algorithm, returned as
/// its content-free integral lift. Both inputs are left multiples of the
/// result in E(a,q,M)<L>.
pub fn right_gcd(p: &OreOperator, q: &OreOperator) -> Result<OreOperator, QweylError> {
    if p.algebra != q.algebra {
        return Err(QweylError::AlgebraMismatch);
    }
    if p.is_zero() || q.is_zero() {
        return Err(QweylError::ZeroOperator);
    }
    let mut a = LocOp::from_op(p);
    let mut b = LocOp::from_op(q);
    a.trim();
    b.trim();
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = a.right_rem(&b);
        if r.is_zero() {
            break;
        }
        a = b;
        b = r;
    }
    content_free(&b.integral_lift(p.algebra)?)
}

impl fmt::Display for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "({})", c)?;
            } else if j == 1 {
                write!(f, "({})*L", c)?;
            } else {
                write!(f, "({})*L^{}", c, j)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Serialized operator: algebra tag plus sparse [order, polynomial] terms.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperatorRepr {
    pub algebra: String,
    pub terms: Vec<(usize, PolyRepr)>,
}

impl OperatorRepr {
    pub fn from_op(p: &OreOperator) -> Self {
        OperatorRepr {
            algebra: p.algebra.tag().to_string(),
            terms: p
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j, PolyRepr::from_poly(c)))
                .collect(),
        }
    }

    pub fn to_op(&self) -> Result<OreOperator, QweylError> {
        let algebra = Algebra::from_tag(&self.algebra)
            .ok_or_else(|| QweylError::Malformed(format!("unknown algebra {:?}", self.algebra)))?;
        let top = self.terms.iter().map(|(j, _)| *j).max();
        let mut coeffs = vec![LaurentPoly::zero(); top.map_or(0, |t| t + 1)];
        for (j, p) in &self.terms {
            coeffs[*j] = &coeffs[*j] + &p.to_poly()?;
        }
        OreOperator::new(algebra, coeffs)
    }
}
