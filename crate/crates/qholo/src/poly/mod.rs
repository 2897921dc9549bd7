//! Exact arithmetic layer: Laurent polynomials, rational functions,
//! quantum numbers, gcd, and a-interpolation.

pub mod gcd;
pub mod interp;
pub mod laurent;
pub mod qnum;
pub mod rational;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use laurent::{Exps, LaurentPoly, Subst, SubstTarget, Var};
pub use rational::RationalFn;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("substitution makes the denominator vanish: {factor}")]
    VanishingDenominator { factor: String },
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("duplicate sample point")]
    DuplicateSample,
    #[error("samples are inconsistent with the degree bound")]
    InconsistentSamples,
    #[error("malformed serialized polynomial: {0}")]
    Malformed(String),
}

/// Serialized term: decimal coefficient plus the full exponent triple.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermRepr {
    pub coef: String,
    pub exps: [i32; 3],
}

/// Serialized polynomial: vars header plus term records in canonical order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyRepr {
    pub vars: Vec<String>,
    pub terms: Vec<TermRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RationalRepr {
    pub num: PolyRepr,
    pub den: PolyRepr,
}

impl PolyRepr {
    pub fn from_poly(p: &LaurentPoly) -> Self {
        PolyRepr {
            vars: p.vars_used().iter().map(|v| v.symbol().to_string()).collect(),
            terms: p
                .terms()
                .map(|(e, c)| TermRepr {
                    coef: c.to_string(),
                    exps: *e,
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<LaurentPoly, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c: num_bigint::BigInt = t
                .coef
                .parse()
                .map_err(|_| PolyError::Malformed(format!("bad coefficient {:?}", t.coef)))?;
            terms.push((t.exps, c));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

impl RationalRepr {
    pub fn from_rational(r: &RationalFn) -> Self {
        RationalRepr {
            num: PolyRepr::from_poly(r.numer()),
            den: PolyRepr::from_poly(r.denom()),
        }
    }

    pub fn to_rational(&self) -> Result<RationalFn, PolyError> {
        RationalFn::new(self.num.to_poly()?, self.den.to_poly()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(
            (
                (-20i64..=20).prop_filter("nonzero", |c| *c != 0),
                -4i32..=4,
                -4i32..=4,
                0i32..=3,
            ),
            0..6,
        )
        .prop_map(|terms| {
            LaurentPoly::from_terms(
                terms
                    .into_iter()
                    .map(|(c, ea, eq, em)| ([ea, eq, em], BigInt::from(c))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            // associativity, commutativity, distributivity -- exact equality
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn specialization_diagram_commutes(p in arb_poly(), n in -3i32..=3) {
            // (a -> q^N then q -> 1) equals (a -> 1, q -> 1)
            let lhs = p.substitute(&Subst::a_to_qpow(n)).substitute(&Subst::q_to_one());
            let rhs = p.substitute(&Subst::a_and_q_to_one());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_then_exact_division_roundtrips(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(prod.divide_exact(&b).unwrap(), a);
        }

        #[test]
        fn serialization_roundtrip(p in arb_poly()) {
            let repr = PolyRepr::from_poly(&p);
            let json = serde_json::to_string(&repr).unwrap();
            let back: PolyRepr = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.to_poly().unwrap(), p);
            // byte-exact re-serialization
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
    }
}
