//! Exact rational functions num/den over Laurent polynomials.
//!
//! Canonical form: the fraction is reduced (no common polynomial factor,
//! coprime integer contents), the denominator has minimum exponent 0 in every
//! variable, and the denominator's lex-largest term has a positive
//! coefficient. Zero is 0/1. Equality is then plain syntactic equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;

use super::gcd;
use super::laurent::{LaurentPoly, Subst};
use super::PolyError;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn constant(c: i64) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The polynomial part, if the denominator is a unit (monomial).
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        if self.den.is_one() {
            return Some(self.num.clone());
        }
        if let Some((c, e)) = self.den.as_monomial() {
            // unit denominator with integer coefficient +-1 only
            if c.magnitude() == &1u32.into() {
                let mut p = self.num.mul_monomial([-e[0], -e[1], -e[2]]);
                if c.is_negative() {
                    p = -&p;
                }
                return Some(p);
            }
        }
        None
    }

    fn reduced(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (mut num, mut den) = (num, den);
        if !den.is_one() {
            let g = gcd::gcd(&num, &den);
            if !g.is_one() {
                num = num.divide_exact(&g).expect("gcd divides numerator");
                den = den.divide_exact(&g).expect("gcd divides denominator");
            }
        }
        // Fix the unit: den gets min exponent 0 per variable and a positive
        // lex-leading coefficient; num absorbs the monomial and sign.
        let m = den.min_exps();
        den = den.mul_monomial([-m[0], -m[1], -m[2]]);
        num = num.mul_monomial([-m[0], -m[1], -m[2]]);
        if den
            .leading_term()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            den = -&den;
            num = -&num;
        }
        Self { num, den }
    }

    pub fn inverse(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, PolyError> {
        if rhs.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::reduced(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn pow(&self, k: i32) -> Result<Self, PolyError> {
        if k >= 0 {
            Ok(Self {
                num: self.num.pow(k as u32),
                den: self.den.pow(k as u32),
            })
        } else {
            self.inverse().map(|inv| Self {
                num: inv.num.pow((-k) as u32),
                den: inv.den.pow((-k) as u32),
            })
        }
    }

    /// Apply a partial substitution, erroring if the denominator vanishes.
    pub fn specialize(&self, s: &Subst) -> Result<Self, PolyError> {
        let num = self.num.substitute(s);
        let den = self.den.substitute(s);
        if den.is_zero() {
            return Err(PolyError::VanishingDenominator {
                factor: self.den.to_string(),
            });
        }
        Ok(Self::reduced(num, den))
    }

    /// M -> q^i * M
    pub fn shift_m(&self, i: i32) -> Self {
        Self::reduced(self.num.shift_m(i), self.den.shift_m(i))
    }

    /// q -> q^{-1}
    pub fn invert_q(&self) -> Self {
        Self::reduced(self.num.invert_q(), self.den.invert_q())
    }

    /// a -> a^{-1}
    pub fn invert_a(&self) -> Self {
        Self::reduced(self.num.invert_a(), self.den.invert_a())
    }

    pub fn scale_int(&self, c: i64) -> Self {
        Self::reduced(self.num.scale(&c.into()), self.den.clone())
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFn::reduced(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::reduced(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() || rhs.is_zero() {
            return RationalFn::zero();
        }
        // Cross-cancel before multiplying to keep intermediates small.
        let g1 = gcd::gcd(&self.num, &rhs.den);
        let g2 = gcd::gcd(&rhs.num, &self.den);
        let n1 = self.num.divide_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.divide_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.divide_exact(&g2).expect("gcd divides");
        let d1 = self.den.divide_exact(&g2).expect("gcd divides");
        RationalFn::reduced(&n1 * &n2, &d1 * &d2)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::laurent::{Exps, Var};
    use num_bigint::BigInt;

    fn p(s: &[(i64, Exps)]) -> LaurentPoly {
        LaurentPoly::from_terms(s.iter().map(|&(c, e)| (e, BigInt::from(c))))
    }

    #[test]
    fn cancellation() {
        // (a - a^{-1})/(q - q^{-1}) * (q - q^{-1}) = a - a^{-1}
        let bracket_a = p(&[(1, [1, 0, 0]), (-1, [-1, 0, 0])]);
        let bracket_q = p(&[(1, [0, 1, 0]), (-1, [0, -1, 0])]);
        let f = RationalFn::new(bracket_a.clone(), bracket_q.clone()).unwrap();
        let g = &f * &RationalFn::from_poly(bracket_q);
        assert_eq!(g, RationalFn::from_poly(bracket_a));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalFn::new(LaurentPoly::one(), LaurentPoly::zero()).is_err());
    }

    #[test]
    fn canonical_equality() {
        // q/(q-1) == q^2/(q^2-q) after reduction
        let f = RationalFn::new(
            p(&[(1, [0, 1, 0])]),
            p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]),
        )
        .unwrap();
        let g = RationalFn::new(
            p(&[(1, [0, 2, 0])]),
            p(&[(1, [0, 2, 0]), (-1, [0, 1, 0])]),
        )
        .unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn specialization_reduces_before_failing() {
        // (q^2 - q^{-2})/(q - q^{-1}) at q -> 1 is 2, not 0/0.
        let f = RationalFn::new(
            p(&[(1, [0, 2, 0]), (-1, [0, -2, 0])]),
            p(&[(1, [0, 1, 0]), (-1, [0, -1, 0])]),
        )
        .unwrap();
        let g = f.specialize(&Subst::q_to_one()).unwrap();
        assert_eq!(g, RationalFn::constant(2));
    }

    #[test]
    fn specialization_vanishing_denominator_errors() {
        let f = RationalFn::new(
            p(&[(1, [1, 0, 0]), (-1, [-1, 0, 0])]),
            p(&[(1, [0, 1, 0]), (-1, [0, -1, 0])]),
        )
        .unwrap();
        let err = f.specialize(&Subst::q_to_one()).unwrap_err();
        assert!(matches!(err, PolyError::VanishingDenominator { .. }));
    }

    #[test]
    fn sign_normalization_of_denominator() {
        let f = RationalFn::new(
            p(&[(1, [0, 0, 0])]),
            p(&[(-1, [0, 1, 0]), (1, [0, 0, 0])]),
        )
        .unwrap();
        // denominator stored as q - 1 with numerator -1
        assert_eq!(f.denom(), &p(&[(1, [0, 1, 0]), (-1, [0, 0, 0])]));
        assert_eq!(f.numer(), &p(&[(-1, [0, 0, 0])]));
        let _ = Var::A;
    }
}
