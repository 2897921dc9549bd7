//! Multivariate polynomial gcd over Z, via primitive pseudo-remainder
//! sequences with a modular triviality pre-check.
//!
//! Inputs may be Laurent; monomial factors are units and are stripped first.
//! The result is normalized with minimum exponent 0 in every variable and a
//! positive coefficient on its lex-largest term.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Signed;

use super::laurent::{Exps, LaurentPoly, Var};

/// gcd of two Laurent polynomials, defined up to units (signs and monomials)
/// and returned in normalized form. gcd(0, p) = normalized p.
pub fn gcd(p: &LaurentPoly, q: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return normalize(q.clone());
    }
    if q.is_zero() {
        return normalize(p.clone());
    }
    let p = normalize(p.clone());
    let q = normalize(q.clone());
    if p.is_one() || q.is_one() {
        // monomial contents are units; only integer content can survive
        return LaurentPoly::constant(p.int_content().gcd(&q.int_content()));
    }
    // Fast paths: one dividing the other is common after reductions.
    if let Ok(_) = q.divide_exact(&p) {
        return p;
    }
    if let Ok(_) = p.divide_exact(&q) {
        return q;
    }
    if trivial_by_modular_probe(&p, &q) {
        return LaurentPoly::constant(p.int_content().gcd(&q.int_content()));
    }
    let vars: Vec<Var> = Var::ALL
        .into_iter()
        .filter(|&v| p.max_exp(v) > 0 || q.max_exp(v) > 0)
        .collect();
    normalize(gcd_rec(&p, &q, &vars))
}

/// Shift to min-exponent 0 in each variable and make the lex-leading
/// coefficient positive.
pub fn normalize(p: LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return p;
    }
    let m = p.min_exps();
    let p = p.mul_monomial([-m[0], -m[1], -m[2]]);
    match p.leading_term() {
        Some((_, c)) if c.is_negative() => -&p,
        _ => p,
    }
}

/// Probabilistic check that the gcd has no non-constant factor: for each
/// variable, project to a univariate polynomial modulo a prime (evaluating
/// the other variables at random points) and take a univariate gcd. A
/// degree-0 modular gcd certifies that the true gcd is free of that
/// variable; the gcd is trivial only when this holds for every variable.
fn trivial_by_modular_probe(p: &LaurentPoly, q: &LaurentPoly) -> bool {
    const P: u64 = 2147483647; // 2^31 - 1
    let vars: Vec<Var> = Var::ALL
        .into_iter()
        .filter(|&v| p.max_exp(v) > 0 || q.max_exp(v) > 0)
        .collect();
    if vars.is_empty() {
        return false;
    }
    'vars: for &main in &vars {
        // Two independent point choices to reduce false negatives (which
        // only cost us a fallback into the exact path anyway).
        for seed in [12345u64, 987654321u64] {
            let mut pts = [0u64; 3];
            let mut s = seed;
            for i in 0..3 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                pts[i] = 2 + (s >> 33) % (P - 3);
            }
            let pu = project_univar(p, main, pts, P);
            let qu = project_univar(q, main, pts, P);
            if let (Some(pu), Some(qu)) = (pu, qu) {
                if !pu.is_empty() && !qu.is_empty() {
                    if univar_gcd_degree_modp(pu, qu, P) == Some(0) {
                        continue 'vars;
                    }
                }
            }
        }
        return false;
    }
    true
}

/// Evaluate all variables except `main` at the sample point, producing dense
/// univariate coefficients mod p (shifted so the lowest degree is 0).
fn project_univar(p: &LaurentPoly, main: Var, pts: [u64; 3], pr: u64) -> Option<Vec<u64>> {
    let lo = p.min_exp(main);
    let hi = p.max_exp(main);
    let mut coeffs = vec![0u64; (hi - lo + 1) as usize];
    for (e, c) in p.terms() {
        let deg = (e[main as usize] - lo) as usize;
        let mut e2: Exps = *e;
        e2[main as usize] = 0;
        let v = LaurentPoly::monomial(c.clone(), e2).eval_modp(pts, pr)?;
        coeffs[deg] = (coeffs[deg] + v) % pr;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Some(coeffs)
}

fn univar_gcd_degree_modp(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Option<usize> {
    fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = ((acc as u128 * b as u128) % p as u128) as u64;
            }
            b = ((b as u128 * b as u128) % p as u128) as u64;
            e >>= 1;
        }
        acc
    }
    loop {
        if b.is_empty() {
            return Some(a.len().checked_sub(1)?);
        }
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        // a mod b
        let lead_inv = powmod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let c = ((*a.last().unwrap() as u128 * lead_inv as u128) % p as u128) as u64;
            for i in 0..b.len() {
                let sub = (b[i] as u128 * c as u128) % p as u128;
                let idx = i + shift;
                a[idx] = ((a[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn gcd_rec(p: &LaurentPoly, q: &LaurentPoly, vars: &[Var]) -> LaurentPoly {
    if p.is_zero() {
        return q.clone();
    }
    if q.is_zero() {
        return p.clone();
    }
    let Some((&main, rest)) = vars.split_first() else {
        return LaurentPoly::constant(p.int_content().gcd(&q.int_content()));
    };
    if p.max_exp(main) == 0 && q.max_exp(main) == 0 {
        return gcd_rec(p, q, rest);
    }

    let pu = to_univar(p, main);
    let qu = to_univar(q, main);
    let cont_p = content_of(&pu, rest);
    let cont_q = content_of(&qu, rest);
    let cont = gcd_rec(&cont_p, &cont_q, rest);

    let mut a = divide_coeffs(&pu, &cont_p);
    let mut b = divide_coeffs(&qu, &cont_q);
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_empty() {
            let g = from_univar(&a, main);
            return mul(&cont, &primitive_part(&g, main, rest));
        }
        if degree(&b) == 0 {
            // coprime in the main variable
            return cont;
        }
        let r = prem(&a, &b, main, rest);
        a = b;
        b = to_univar(&primitive_part(&from_univar(&r, main), main, rest), main);
    }
}

type Univar = BTreeMap<i32, LaurentPoly>;

fn to_univar(p: &LaurentPoly, main: Var) -> Univar {
    let mut out: Univar = BTreeMap::new();
    for (e, c) in p.terms() {
        let d = e[main as usize];
        let mut e2 = *e;
        e2[main as usize] = 0;
        let entry = out.entry(d).or_insert_with(LaurentPoly::zero);
        *entry = &*entry + &LaurentPoly::monomial(c.clone(), e2);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn from_univar(u: &Univar, main: Var) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for (d, c) in u {
        acc = &acc + &c.mul_monomial(shift_of(main, *d));
    }
    acc
}

fn shift_of(v: Var, k: i32) -> Exps {
    let mut e = [0; 3];
    e[v as usize] = k;
    e
}

fn degree(u: &Univar) -> i32 {
    u.keys().next_back().copied().unwrap_or(-1)
}

fn leading(u: &Univar) -> LaurentPoly {
    u.values().next_back().cloned().unwrap_or_else(LaurentPoly::zero)
}

fn content_of(u: &Univar, rest: &[Var]) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for c in u.values() {
        g = gcd_rec(&super::gcd::normalize(g), &super::gcd::normalize(c.clone()), rest);
        if g.is_one() {
            break;
        }
    }
    normalize(g)
}

fn divide_coeffs(u: &Univar, d: &LaurentPoly) -> Univar {
    if d.is_one() {
        return u.clone();
    }
    u.iter()
        .map(|(k, c)| (*k, c.divide_exact(d).expect("content must divide")))
        .collect()
}

fn primitive_part(p: &LaurentPoly, main: Var, rest: &[Var]) -> LaurentPoly {
    let u = to_univar(p, main);
    let c = content_of(&u, rest);
    if c.is_zero() || c.is_one() {
        return normalize(p.clone());
    }
    normalize(p.divide_exact(&c).expect("content divides"))
}

fn mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a * b
}

/// Pseudo-remainder of a by b in the main variable (deg a >= deg b >= 1).
fn prem(a: &Univar, b: &Univar, _main: Var, _rest: &[Var]) -> Univar {
    let db = degree(b);
    let lb = leading(b);
    let mut r = a.clone();
    while degree(&r) >= db && !r.is_empty() {
        let dr = degree(&r);
        let lr = leading(&r);
        // r := lb * r - lr * x^{dr-db} * b
        let mut nr: Univar = BTreeMap::new();
        for (k, c) in &r {
            nr.insert(*k, &lb * c);
        }
        for (k, c) in b {
            let kk = k + dr - db;
            let t = &lr * c;
            let entry = nr.entry(kk).or_insert_with(LaurentPoly::zero);
            *entry = &*entry - &t;
        }
        nr.retain(|_, c| !c.is_zero());
        debug_assert!(degree(&nr) < dr);
        r = nr;
    }
    r
}

/// gcd of many polynomials.
pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a LaurentPoly>) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for p in polys {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(s: &[(i64, Exps)]) -> LaurentPoly {
        LaurentPoly::from_terms(s.iter().map(|&(c, e)| (e, BigInt::from(c))))
    }

    #[test]
    fn gcd_univariate() {
        // gcd(q^2-1, q^2-2q+1) = q-1
        let a = p(&[(1, [0, 2, 0]), (-1, [0, 0, 0])]);
        let b = p(&[(1, [0, 2, 0]), (-2, [0, 1, 0]), (1, [0, 0, 0])]);
        assert_eq!(gcd(&a, &b), p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]));
    }

    #[test]
    fn gcd_coprime() {
        let a = p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]);
        let b = p(&[(1, [0, 1, 0]), (1, [0, 0, 0])]);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((a-q)*(a+q), (a-q)*q) = a-q
        let f = p(&[(1, [1, 0, 0]), (-1, [0, 1, 0])]);
        let g1 = &f * &p(&[(1, [1, 0, 0]), (1, [0, 1, 0])]);
        let g2 = &f * &p(&[(1, [0, 1, 0])]);
        assert_eq!(gcd(&g1, &g2), f);
    }

    #[test]
    fn gcd_with_laurent_units() {
        // a monomial is a unit: gcd(q^{-3}*(q-1), q-1) should be q-1
        let a = p(&[(1, [0, -2, 0]), (-1, [0, -3, 0])]);
        let b = p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]);
        assert_eq!(gcd(&a, &b), p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]));
    }

    #[test]
    fn gcd_integer_content() {
        let a = p(&[(6, [0, 0, 0])]);
        let b = p(&[(4, [0, 1, 0]), (8, [0, 0, 0])]);
        assert_eq!(gcd(&a, &b), p(&[(2, [0, 0, 0])]));
    }

    #[test]
    fn gcd_three_vars() {
        let f = p(&[(1, [1, 1, 0]), (1, [0, 0, 1])]); // a*q + M
        let a = &f * &p(&[(1, [0, 2, 0]), (3, [0, 0, 0])]);
        let b = &f * &p(&[(1, [1, 0, 0]), (-1, [0, 0, 1])]);
        assert_eq!(gcd(&a, &b), f);
    }
}
