//! Reconstruction of an a-dependence from specializations a = q^N.
//!
//! Given sample evaluations f(q^N, q) for distinct N and a bound b on the
//! a-degree, solves for f = sum_{t=-b..b} c_t(q) a^t exactly over Q(q).
//! Extra samples beyond the 2b+1 needed act as consistency checks.

use super::laurent::{LaurentPoly, Subst, Var};
use super::rational::RationalFn;
use super::PolyError;

pub fn interpolate_in_a(
    samples: &[(i32, LaurentPoly)],
    a_degree_bound: u32,
) -> Result<RationalFn, PolyError> {
    let b = a_degree_bound as i64;
    let need = (2 * b + 1) as usize;
    if samples.len() < need {
        return Err(PolyError::InsufficientSamples {
            got: samples.len(),
            need,
        });
    }
    {
        let mut ns: Vec<i32> = samples.iter().map(|(n, _)| *n).collect();
        ns.sort_unstable();
        ns.dedup();
        if ns.len() != samples.len() {
            return Err(PolyError::DuplicateSample);
        }
    }

    // Vandermonde system in x_N = q^N: sum_t q^{N t} c_t = f_N.
    let mut mat: Vec<Vec<RationalFn>> = Vec::with_capacity(need);
    let mut rhs: Vec<RationalFn> = Vec::with_capacity(need);
    for (n, f) in samples.iter().take(need) {
        let row = (-b..=b)
            .map(|t| RationalFn::from_poly(LaurentPoly::var_pow(Var::Q, *n * t as i32)))
            .collect();
        mat.push(row);
        rhs.push(RationalFn::from_poly(f.clone()));
    }
    let coeffs = solve_dense(&mut mat, &mut rhs)?;

    let mut result = RationalFn::zero();
    for (idx, t) in (-b..=b).enumerate() {
        let at = RationalFn::from_poly(LaurentPoly::var_pow(Var::A, t as i32));
        result = &result + &(&coeffs[idx] * &at);
    }

    // Cross-check all remaining samples.
    for (n, f) in samples.iter().skip(need) {
        let got = result
            .specialize(&Subst::a_to_qpow(*n))
            .map_err(|_| PolyError::InconsistentSamples)?;
        if got != RationalFn::from_poly(f.clone()) {
            return Err(PolyError::InconsistentSamples);
        }
    }
    Ok(result)
}

/// Exact Gaussian elimination over the rational function field.
fn solve_dense(
    mat: &mut Vec<Vec<RationalFn>>,
    rhs: &mut Vec<RationalFn>,
) -> Result<Vec<RationalFn>, PolyError> {
    let n = mat.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !mat[r][col].is_zero())
            .ok_or(PolyError::InconsistentSamples)?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = mat[col][col].inverse().expect("pivot nonzero");
        for c in col..n {
            mat[col][c] = &mat[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let factor = mat[r][col].clone();
            for c in col..n {
                let t = &factor * &mat[col][c];
                mat[r][c] = &mat[r][c] - &t;
            }
            let t = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &t;
        }
    }
    Ok(rhs.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qnum::{a_integer, qint};

    #[test]
    fn recovers_a_integer_from_quantum_integers() {
        // samples (N, [N]) for N = 2,3,4, bound 1 -> (a - a^{-1})/(q - q^{-1})
        let samples: Vec<(i32, LaurentPoly)> = (2..=4).map(|n| (n, qint(n as i64))).collect();
        let f = interpolate_in_a(&samples, 1).unwrap();
        assert_eq!(f, a_integer(1).unwrap());
    }

    #[test]
    fn constant_samples_give_constant() {
        let samples: Vec<(i32, LaurentPoly)> =
            (1..=3).map(|n| (n, LaurentPoly::one())).collect();
        let f = interpolate_in_a(&samples, 1).unwrap();
        assert_eq!(f, RationalFn::one());
    }

    #[test]
    fn too_few_samples_rejected() {
        let samples = vec![(2, LaurentPoly::one())];
        assert!(matches!(
            interpolate_in_a(&samples, 1),
            Err(PolyError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn inconsistent_extra_sample_detected() {
        let mut samples: Vec<(i32, LaurentPoly)> =
            (2..=4).map(|n| (n, qint(n as i64))).collect();
        samples.push((5, LaurentPoly::one())); // wrong value for [5]
        assert!(matches!(
            interpolate_in_a(&samples, 1),
            Err(PolyError::InconsistentSamples)
        ));
    }
}
