//! Quantum integers, balanced Gaussian binomials, and the a-deformed
//! brackets that make up every local evaluation coefficient.
//!
//! Balanced conventions throughout: [n] = (q^n - q^{-n})/(q - q^{-1}) and all
//! brackets are symmetric under q <-> q^{-1}.

use super::laurent::{LaurentPoly, Var};
use super::rational::RationalFn;
use super::PolyError;

/// Balanced quantum integer [j] as a Laurent polynomial in q.
pub fn qint(j: i64) -> LaurentPoly {
    if j == 0 {
        return LaurentPoly::zero();
    }
    let s = j.signum();
    let j = j.unsigned_abs() as i32;
    let mut p = LaurentPoly::zero();
    let mut e = j - 1;
    while e >= -(j - 1) {
        p = &p + &LaurentPoly::var_pow(Var::Q, e);
        e -= 2;
    }
    if s < 0 {
        p = -&p;
    }
    p
}

/// q^j - q^{-j}, the unbalanced bracket (qint(j) times q - q^{-1}).
pub fn qbracket(j: i64) -> LaurentPoly {
    &LaurentPoly::var_pow(Var::Q, j as i32) - &LaurentPoly::var_pow(Var::Q, -(j as i32))
}

/// Balanced Gaussian binomial for n >= 0; zero when k < 0 or k > n.
pub fn q_binomial(n: i64, k: i64) -> LaurentPoly {
    assert!(n >= 0, "q_binomial requires n >= 0; use q_binomial_gen");
    if k < 0 || k > n {
        return LaurentPoly::zero();
    }
    let k = k.min(n - k);
    let mut acc = LaurentPoly::one();
    for i in 1..=k {
        acc = &acc * &qint(n - i + 1);
        acc = acc.divide_exact(&qint(i)).expect("q-binomial step divides");
    }
    acc
}

/// Generalized balanced binomial [n choose k] for any integer n:
/// [n][n-1]...[n-k+1]/[k]!. For n < 0 this is (-1)^k [k-n-1 choose k].
pub fn q_binomial_gen(n: i64, k: i64) -> LaurentPoly {
    if k < 0 {
        return LaurentPoly::zero();
    }
    if n >= 0 {
        q_binomial(n, k)
    } else {
        let b = q_binomial(k - n - 1, k);
        if k % 2 == 0 {
            b
        } else {
            -&b
        }
    }
}

/// a*q^s - a^{-1}*q^{-s}, the a-deformed bracket in a linear form.
pub fn a_bracket(s: i64) -> LaurentPoly {
    &LaurentPoly::monomial(1, [1, s as i32, 0]) - &LaurentPoly::monomial(1, [-1, -(s as i32), 0])
}

/// The balanced a-integer (a^j - a^{-j})/(q^j - q^{-j}).
/// Specializing a = q^N gives [Nj]/[j] as a Laurent polynomial.
pub fn a_integer(j: i64) -> Result<RationalFn, PolyError> {
    if j == 0 {
        return Err(PolyError::DivisionByZero);
    }
    let num = &LaurentPoly::var_pow(Var::A, j as i32) - &LaurentPoly::var_pow(Var::A, -(j as i32));
    RationalFn::new(num, qbracket(j))
}

/// The a-deformed binomial coefficient that specializes to [N - m choose n]
/// at a = q^N: the product over i = 1..n of a_bracket(1-m-i)/qbracket(i).
pub fn a_binomial(m: i64, n: u32) -> RationalFn {
    let mut acc = RationalFn::one();
    for i in 1..=n as i64 {
        let factor = RationalFn::new(a_bracket(1 - m - i), qbracket(i)).expect("nonzero bracket");
        acc = &acc * &factor;
    }
    acc
}

/// Evaluation of a disjoint circle colored k: a_binomial(0, k), the
/// a-deformation of [N choose k].
pub fn circle_value(k: u32) -> RationalFn {
    a_binomial(0, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::laurent::Subst;
    use num_bigint::BigInt;

    fn p(s: &[(i64, [i32; 3])]) -> LaurentPoly {
        LaurentPoly::from_terms(s.iter().map(|&(c, e)| (e, BigInt::from(c))))
    }

    /// Independent oracle: balanced q-binomial by the recurrence
    /// qbinom(n,k) = q^k qbinom(n-1,k) + q^{k-n} qbinom(n-1,k-1).
    fn qbinom_by_recurrence(n: i64, k: i64) -> LaurentPoly {
        if k < 0 || k > n {
            return LaurentPoly::zero();
        }
        if n == 0 {
            return LaurentPoly::one();
        }
        let t1 = &LaurentPoly::var_pow(Var::Q, k as i32) * &qbinom_by_recurrence(n - 1, k);
        let t2 = &LaurentPoly::var_pow(Var::Q, (k - n) as i32) * &qbinom_by_recurrence(n - 1, k - 1);
        &t1 + &t2
    }

    #[test]
    fn qbinom_2_1() {
        assert_eq!(q_binomial(2, 1), p(&[(1, [0, 1, 0]), (1, [0, -1, 0])]));
    }

    #[test]
    fn qbinom_4_2() {
        // derived via the product-formula arithmetic: q^4+q^2+2+q^-2+q^-4
        assert_eq!(
            q_binomial(4, 2),
            p(&[
                (1, [0, 4, 0]),
                (1, [0, 2, 0]),
                (2, [0, 0, 0]),
                (1, [0, -2, 0]),
                (1, [0, -4, 0])
            ])
        );
    }

    #[test]
    fn qbinom_out_of_range() {
        assert!(q_binomial(3, 5).is_zero());
        assert!(q_binomial(3, -1).is_zero());
    }

    #[test]
    fn qbinom_matches_recurrence_oracle() {
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(
                    q_binomial(n, k),
                    qbinom_by_recurrence(n, k),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn qbinom_symmetry() {
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(q_binomial(n, k), q_binomial(n, n - k));
                assert!(q_binomial(n, k).coeffs_nonnegative());
            }
        }
    }

    #[test]
    fn qbinom_gen_negative_top() {
        // [-1 choose k] = (-1)^k
        assert_eq!(q_binomial_gen(-1, 0), LaurentPoly::one());
        assert_eq!(q_binomial_gen(-1, 1), -&LaurentPoly::one());
        // [-2 choose 1] = -[2]
        assert_eq!(q_binomial_gen(-2, 1), -&qint(2));
    }

    #[test]
    fn a_integer_unknot_shape() {
        // canonical form clears the denominator to q^2 - 1 (min exponents 0)
        let f = a_integer(1).unwrap();
        assert_eq!(f.numer(), &p(&[(1, [1, 1, 0]), (-1, [-1, 1, 0])]));
        assert_eq!(f.denom(), &p(&[(1, [0, 2, 0]), (-1, [0, 0, 0])]));
    }

    #[test]
    fn a_integer_specializations() {
        // j=1, a=q^3 -> q^2 + 1 + q^{-2} = [3]
        let f = a_integer(1).unwrap();
        let g = f.specialize(&Subst::a_to_qpow(3)).unwrap();
        assert_eq!(g, RationalFn::from_poly(qint(3)));
        // j=2, a=q^2 -> q^2 + q^{-2}
        let f2 = a_integer(2).unwrap();
        let g2 = f2.specialize(&Subst::a_to_qpow(2)).unwrap();
        assert_eq!(
            g2,
            RationalFn::from_poly(p(&[(1, [0, 2, 0]), (1, [0, -2, 0])]))
        );
    }

    #[test]
    fn a_integer_zero_rejected() {
        assert!(a_integer(0).is_err());
    }

    #[test]
    fn a_integer_positive_at_qn() {
        for j in 1..=6 {
            for n in 1..=6 {
                let f = a_integer(j).unwrap();
                let g = f.specialize(&Subst::a_to_qpow(n)).unwrap();
                let poly = g.as_poly().expect("specialization is a Laurent polynomial");
                assert!(poly.coeffs_nonnegative(), "j={j} N={n}");
            }
        }
    }

    #[test]
    fn a_binomial_specializes_to_qbinomial() {
        for m in 0..4i64 {
            for n in 0..4u32 {
                for big_n in (m + n as i64)..=(m + n as i64 + 3) {
                    let f = a_binomial(m, n);
                    let g = f.specialize(&Subst::a_to_qpow(big_n as i32)).unwrap();
                    assert_eq!(
                        g,
                        RationalFn::from_poly(q_binomial(big_n - m, n as i64)),
                        "m={m} n={n} N={big_n}"
                    );
                }
            }
        }
    }

    #[test]
    fn circle_value_color_one_is_unknot() {
        assert_eq!(circle_value(1), a_integer(1).unwrap());
    }
}
