#![allow(dead_code)]

use labelblind::fock::{FockArray, ModeShape, PureState};
use labelblind::kernels::ComplexMatrix;
use labelblind::C64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Permanent as a plain sum over all permutations.
pub fn permanent_by_permutations(m: &ComplexMatrix) -> C64 {
    fn rec(m: &ComplexMatrix, row: usize, used: &mut Vec<bool>) -> C64 {
        let n = m.rows();
        if row == n {
            return c(1.0, 0.0);
        }
        let mut total = c(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                total += m[(row, col)] * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    rec(m, 0, &mut vec![false; m.rows()])
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Normalized superposition of up to `max_terms` random placements of `n`
/// photons on an `S x L` grid.
pub fn random_state(rng: &mut impl Rng, system: usize, label: usize, n: u32, max_terms: usize) -> PureState {
    let shape = ModeShape::new(system, label).unwrap();
    let cells = system * label;
    let count = rng.gen_range(1..=max_terms);
    let terms: Vec<(FockArray, C64)> = (0..count)
        .map(|_| {
            let mut occ = vec![0u32; cells];
            for _ in 0..n {
                occ[rng.gen_range(0..cells)] += 1;
            }
            let amp = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (FockArray::from_flat(shape, occ).unwrap(), amp)
        })
        .collect();
    PureState::unnormalized(shape, n, terms).unwrap().normalize().unwrap()
}

/// Occupations on a 3 x 2 grid given as (system, label) photon positions.
pub fn arr3x2(photons: &[(usize, usize)]) -> FockArray {
    let mut occ = vec![0u32; 6];
    for &(s, l) in photons {
        occ[s * 2 + l] += 1;
    }
    FockArray::from_flat(ModeShape::new(3, 2).unwrap(), occ).unwrap()
}

/// The postselected filter output, unnormalized, written out amplitude by
/// amplitude (modes 1 and 2, labels R = 0 and G = 1).
pub fn filtered_state_by_hand(alpha: f64, beta: f64) -> PureState {
    let r8 = 8f64.sqrt();
    let terms = vec![
        (arr3x2(&[(1, 0), (1, 0)]), c(0.0, alpha / r8)),
        (arr3x2(&[(1, 0), (1, 1)]), c(0.0, beta / 4.0)),
        (arr3x2(&[(1, 0), (2, 0)]), c(-alpha / 2.0, 0.0)),
        (arr3x2(&[(1, 0), (2, 1)]), c(-beta / 4.0, 0.0)),
        (arr3x2(&[(1, 1), (2, 0)]), c(-beta / 4.0, 0.0)),
        (arr3x2(&[(2, 0), (2, 0)]), c(0.0, -alpha / r8)),
        (arr3x2(&[(2, 0), (2, 1)]), c(0.0, -beta / 4.0)),
    ];
    PureState::unnormalized(ModeShape::new(3, 2).unwrap(), 2, terms).unwrap()
}

/// Largest amplitude difference after removing the relative global phase.
pub fn diff_up_to_phase(a: &PureState, b: &PureState) -> f64 {
    let overlap = a.inner(b);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    let rotated = PureState::unnormalized(a.shape(), a.particle_count(), a.terms().map(|(k, v)| (k.clone(), v * phase))).unwrap();
    rotated.max_amplitude_diff(b)
}

/// All patterns of `n` photons over `s` ports.
pub fn patterns(n: u32, s: usize) -> Vec<Vec<u32>> {
    if s == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for k in 0..=n {
        for mut rest in patterns(n - k, s - 1) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}
