use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest side length accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 20;

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step adds or removes a single column from the
/// running row sums.
///
/// The 0x0 permanent is 1.
pub fn permanent(m: &ComplexMatrix) -> Result<C64> {
    let n = m.square_dim()?;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::TooLarge { n, max: MAX_PERMANENT_DIM });
    }
    match n {
        0 => return Ok(C64::new(1.0, 0.0)),
        1 => return Ok(m[(0, 0)]),
        2 => return Ok(m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)]),
        _ => {}
    }

    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let col = k.trailing_zeros() as usize;
        gray ^= 1 << col;
        if gray & (1 << col) != 0 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += m[(r, col)];
            }
        } else {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(r, col)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        // (-1)^(n - |S|)
        if (n as u32 - gray.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// Determinant by LU decomposition with partial pivoting.
///
/// The 0x0 determinant is 1.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.square_dim()?;
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        if a[(pivot, k)].norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if pivot != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(pivot, c)];
                a[(pivot, c)] = tmp;
            }
            det = -det;
        }
        let p = a[(k, k)];
        det *= p;
        for r in (k + 1)..n {
            let factor = a[(r, k)] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in (k + 1)..n {
                let delta = factor * a[(k, c)];
                a[(r, c)] -= delta;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn sign(p: &[usize]) -> f64 {
        let mut inversions = 0;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 { 1.0 } else { -1.0 }
    }

    /// Direct sum over all n! permutations.
    fn permutation_sum(m: &ComplexMatrix, signed: bool) -> C64 {
        let n = m.rows();
        all_permutations(n)
            .iter()
            .map(|p| {
                let prod: C64 = (0..n).map(|i| m[(i, p[i])]).product();
                if signed { prod * sign(p) } else { prod }
            })
            .sum()
    }

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn beamsplitter() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_rows(&[vec![c(h, 0.0), c(0.0, h)], vec![c(0.0, h), c(h, 0.0)]]).unwrap()
    }

    #[test]
    fn beamsplitter_permanent_vanishes_and_determinant_is_one() {
        assert!(permanent(&beamsplitter()).unwrap().norm() < 1e-15);
        assert!((determinant(&beamsplitter()).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn identity_and_empty() {
        for n in 0..7 {
            let id = ComplexMatrix::identity(n);
            assert_eq!(permanent(&id).unwrap(), c(1.0, 0.0));
            assert_eq!(determinant(&id).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn non_square_is_rejected() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(permanent(&m), Err(Error::NotSquare { rows: 2, cols: 3 })));
        assert!(matches!(determinant(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn oversized_permanent_is_rejected() {
        let m = ComplexMatrix::zeros(21, 21);
        assert!(matches!(permanent(&m), Err(Error::TooLarge { n: 21, .. })));
    }

    #[test]
    fn random_five_by_five_matches_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(5, &mut rng);
        let oracle = permutation_sum(&m, false);
        assert!((permanent(&m).unwrap() - oracle).norm() <= 1e-10);
    }

    #[test]
    fn filter_target_submatrix_has_zero_determinant() {
        let s = std::f64::consts::SQRT_2;
        let u = ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(0.0, s), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, s)],
            vec![c(-1.0, 0.0), c(0.0, 1.0), c(s, 0.0)],
        ])
        .unwrap()
        .scale(c(0.5, 0.0));
        let sub = u.submatrix(&[1, 2], &[0, 1]).unwrap();
        assert!(determinant(&sub).unwrap().norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_determinant_zero() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 2.0)], vec![c(0.5, 0.5), c(1.0, 1.0)]]).unwrap();
        assert!(determinant(&m).unwrap().norm() < 1e-15);
    }

    fn tol(oracle: C64) -> f64 {
        (1e-10 * oracle.norm()).max(1e-12)
    }

    proptest! {
        #[test]
        fn permanent_matches_brute_force(n in 1usize..=6, seed in any::<u64>()) {
            let m = random_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let oracle = permutation_sum(&m, false);
            prop_assert!((permanent(&m).unwrap() - oracle).norm() <= tol(oracle));
        }

        #[test]
        fn determinant_matches_signed_sum(n in 1usize..=6, seed in any::<u64>()) {
            let m = random_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let oracle = permutation_sum(&m, true);
            prop_assert!((determinant(&m).unwrap() - oracle).norm() <= tol(oracle));
        }

        #[test]
        fn permanent_is_row_linear(n in 1usize..=6, row in 0usize..6, re in -2.0f64..2.0, im in -2.0f64..2.0, seed in any::<u64>()) {
            let row = row % n;
            let m = random_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let factor = c(re, im);
            let mut scaled = m.clone();
            for col in 0..n {
                scaled[(row, col)] *= factor;
            }
            let expected = permanent(&m).unwrap() * factor;
            prop_assert!((permanent(&scaled).unwrap() - expected).norm() <= tol(expected));
        }
    }
}
