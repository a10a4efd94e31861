//! Two-photon first quantization and the System⊗Label irrep decomposition.
//!
//! A two-boson Fock state is a symmetric two-particle wavefunction over
//! single-particle modes `(s, l)`. Regrouping each particle's `(s, l)` into
//! the System pair `(s1, s2)` and Label pair `(l1, l2)`, exchange symmetry
//! forces the state into (sym System ⊗ sym Label) ⊕ (antisym System ⊗
//! antisym Label): the triplet `[2]` and singlet `[1,1]` sectors. Amplitude
//! in the singlet sector is what makes the photons (partially)
//! distinguishable.

use std::collections::BTreeMap;

use nalgebra as na;
use num_complex::Complex64 as C64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockArray, ModeShape, PureState, PRUNE_THRESHOLD};
use crate::kernels::ComplexMatrix;

/// Singular values above this count towards the Schmidt rank.
pub const SCHMIDT_TOLERANCE: f64 = 1e-8;

fn require_two(state: &PureState) -> Result<()> {
    if state.particle_count() != 2 {
        return Err(Error::ParticleCount { expected: 2, got: state.particle_count() });
    }
    Ok(())
}

/// Exchange-symmetric two-particle wavefunction `ψ(p, q)` with
/// single-particle index `p = s·L + l`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstQuantizedState {
    shape: ModeShape,
    psi: ComplexMatrix,
}

impl FirstQuantizedState {
    /// Single-particle dimension `S·L`.
    pub fn dim(&self) -> usize {
        self.shape.cells()
    }

    pub fn shape(&self) -> ModeShape {
        self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.psi
    }

    /// Amplitude of `|(s1, l1), (s2, l2)⟩`.
    pub fn amplitude(&self, first: (usize, usize), second: (usize, usize)) -> C64 {
        let l = self.shape.label;
        self.psi[(first.0 * l + first.1, second.0 * l + second.1)]
    }

    /// Nonzero amplitudes keyed by ordered pairs of `(system, label)` modes.
    pub fn terms(&self) -> BTreeMap<(Cell, Cell), C64> {
        let l = self.shape.label;
        let d = self.dim();
        let mut out = BTreeMap::new();
        for p in 0..d {
            for q in 0..d {
                let a = self.psi[(p, q)];
                if a.norm() >= PRUNE_THRESHOLD {
                    out.insert(((p / l, p % l), (q / l, q % l)), a);
                }
            }
        }
        out
    }

    /// Largest `|ψ(p,q) - ψ(q,p)|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.psi.max_abs_diff(&self.psi.transpose()).expect("square")
    }

    pub fn norm(&self) -> f64 {
        self.psi.as_slice().iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// System-pair × Label-pair coefficient matrix over the given labels:
    /// rows `s1·S + s2`, columns `i1·K + i2` with `labels[i]` the i-th label.
    fn bipartite(&self, labels: &[usize]) -> ComplexMatrix {
        let s = self.shape.system;
        let k = labels.len();
        ComplexMatrix::from_fn(s * s, k * k, |r, c| {
            self.amplitude((r / s, labels[c / k]), (r % s, labels[c % k]))
        })
    }
}

impl FirstQuantizedState {
    /// Product wavefunction `ψ((s1,l1),(s2,l2)) = system[s1,s2] · label[l1,l2]`.
    /// Both factors must be symmetric or both antisymmetric for the result
    /// to be a valid boson state.
    pub fn from_product(system: &ComplexMatrix, label: &ComplexMatrix) -> Result<Self> {
        let s = system.square_dim()?;
        let l = label.square_dim()?;
        let shape = ModeShape::new(s, l)?;
        let psi = ComplexMatrix::from_fn(s * l, s * l, |p, q| system[(p / l, q / l)] * label[(p % l, q % l)]);
        let fq = Self { shape, psi };
        if fq.symmetry_defect() > 1e-12 {
            return Err(Error::InvalidState("product is not exchange-symmetric".into()));
        }
        Ok(fq)
    }

    /// Back to second quantization; the inverse of [`first_quantize`].
    pub fn to_fock(&self) -> Result<PureState> {
        let d = self.dim();
        let mut terms = Vec::new();
        for p in 0..d {
            for q in p..d {
                let mut occ = vec![0u32; d];
                occ[p] += 1;
                occ[q] += 1;
                let amp = if p == q { self.psi[(p, p)] } else { self.psi[(p, q)] * std::f64::consts::SQRT_2 };
                terms.push((FockArray::from_flat(self.shape, occ)?, amp));
            }
        }
        PureState::infer(self.shape, 2, terms)
    }
}

/// Symmetrizes each Fock array of a two-photon state.
pub fn first_quantize(state: &PureState) -> Result<FirstQuantizedState> {
    require_two(state)?;
    let shape = state.shape();
    let d = shape.cells();
    let mut psi = ComplexMatrix::zeros(d, d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (array, amp) in state.terms() {
        let occupied: Vec<(usize, u32)> =
            array.as_flat().iter().enumerate().filter(|(_, &k)| k > 0).map(|(p, &k)| (p, k)).collect();
        match occupied.as_slice() {
            [(p, 2)] => psi[(*p, *p)] += amp,
            [(p, 1), (q, 1)] => {
                psi[(*p, *q)] += amp * h;
                psi[(*q, *p)] += amp * h;
            }
            _ => unreachable!("two-photon array"),
        }
    }
    Ok(FirstQuantizedState { shape, psi })
}

/// Unordered mode pair `(x, y)` with `x ≤ y` (`x < y` in the singlet).
pub type ModePair = (usize, usize);

/// A `(system, label)` single-particle mode.
pub type Cell = (usize, usize);

/// Triplet and singlet blocks of a two-photon state.
#[derive(Clone, Debug)]
pub struct DualityDecomposition {
    shape: ModeShape,
    labels: Vec<usize>,
    triplet: BTreeMap<(ModePair, ModePair), C64>,
    singlet: BTreeMap<(ModePair, ModePair), C64>,
    triplet_schmidt: Vec<f64>,
    singlet_schmidt: Vec<f64>,
}

fn sym_pairs(modes: &[usize]) -> Vec<ModePair> {
    let mut out = Vec::new();
    for (i, &x) in modes.iter().enumerate() {
        for &y in &modes[i..] {
            out.push((x, y));
        }
    }
    out
}

fn antisym_pairs(modes: &[usize]) -> Vec<ModePair> {
    let mut out = Vec::new();
    for (i, &x) in modes.iter().enumerate() {
        for &y in &modes[i + 1..] {
            out.push((x, y));
        }
    }
    out
}

fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = na::SVD::new(m.to_nalgebra(), false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Label columns holding at least one photon in some term.
fn occupied_labels(state: &PureState) -> Vec<usize> {
    let shape = state.shape();
    (0..shape.label)
        .filter(|&l| state.terms().any(|(a, _)| (0..shape.system).any(|s| a.get(s, l) > 0)))
        .collect()
}

/// Expresses a two-photon state in the (System irrep) ⊗ (Label irrep) basis.
///
/// Triplet states are `|xx⟩` and `(|xy⟩ + |yx⟩)/√2`, singlet states
/// `(|xy⟩ - |yx⟩)/√2`, both in ascending mode order. Labels are restricted
/// to those actually occupied.
pub fn decompose(state: &PureState) -> Result<DualityDecomposition> {
    let fq = first_quantize(state)?;
    let shape = state.shape();
    let labels = occupied_labels(state);
    let systems: Vec<usize> = (0..shape.system).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let sys_t = sym_pairs(&systems);
    let lab_t = sym_pairs(&labels);
    let sys_s = antisym_pairs(&systems);
    let lab_s = antisym_pairs(&labels);

    let triplet_coeff = |(x, y): ModePair, (a, b): ModePair| -> C64 {
        match (x == y, a == b) {
            (true, true) => fq.amplitude((x, a), (x, a)),
            (true, false) => (fq.amplitude((x, a), (x, b)) + fq.amplitude((x, b), (x, a))) * h,
            (false, true) => (fq.amplitude((x, a), (y, a)) + fq.amplitude((y, a), (x, a))) * h,
            (false, false) => {
                (fq.amplitude((x, a), (y, b))
                    + fq.amplitude((y, a), (x, b))
                    + fq.amplitude((x, b), (y, a))
                    + fq.amplitude((y, b), (x, a)))
                    * 0.5
            }
        }
    };
    let singlet_coeff = |(x, y): ModePair, (a, b): ModePair| -> C64 {
        (fq.amplitude((x, a), (y, b)) - fq.amplitude((y, a), (x, b)) - fq.amplitude((x, b), (y, a))
            + fq.amplitude((y, b), (x, a)))
            * 0.5
    };

    let t_mat = ComplexMatrix::from_fn(sys_t.len(), lab_t.len(), |r, c| triplet_coeff(sys_t[r], lab_t[c]));
    let s_mat = ComplexMatrix::from_fn(sys_s.len(), lab_s.len(), |r, c| singlet_coeff(sys_s[r], lab_s[c]));

    let to_map = |m: &ComplexMatrix, rows: &[ModePair], cols: &[ModePair]| {
        let mut map = BTreeMap::new();
        for (r, &sp) in rows.iter().enumerate() {
            for (c, &lp) in cols.iter().enumerate() {
                let a = m[(r, c)];
                if a.norm() >= PRUNE_THRESHOLD {
                    map.insert((sp, lp), a);
                }
            }
        }
        map
    };

    Ok(DualityDecomposition {
        shape,
        triplet: to_map(&t_mat, &sys_t, &lab_t),
        singlet: to_map(&s_mat, &sys_s, &lab_s),
        triplet_schmidt: singular_values(&t_mat),
        singlet_schmidt: singular_values(&s_mat),
        labels,
    })
}

impl DualityDecomposition {
    /// `(System pair, Label pair) → coefficient` in the triplet sector.
    pub fn triplet(&self) -> &BTreeMap<(ModePair, ModePair), C64> {
        &self.triplet
    }

    pub fn singlet(&self) -> &BTreeMap<(ModePair, ModePair), C64> {
        &self.singlet
    }

    pub fn triplet_coefficient(&self, system: ModePair, label: ModePair) -> C64 {
        self.triplet.get(&(system, label)).copied().unwrap_or_default()
    }

    pub fn singlet_coefficient(&self, system: ModePair, label: ModePair) -> C64 {
        self.singlet.get(&(system, label)).copied().unwrap_or_default()
    }

    /// Labels retained in the decomposition (original indices).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn triplet_weight(&self) -> f64 {
        self.triplet.values().map(C64::norm_sqr).sum()
    }

    pub fn singlet_weight(&self) -> f64 {
        self.singlet.values().map(C64::norm_sqr).sum()
    }

    pub fn triplet_schmidt_coefficients(&self) -> &[f64] {
        &self.triplet_schmidt
    }

    pub fn singlet_schmidt_coefficients(&self) -> &[f64] {
        &self.singlet_schmidt
    }

    /// All Schmidt coefficients, non-increasing.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.triplet_schmidt.iter().chain(&self.singlet_schmidt).copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }

    /// Inverse change of basis back to the first-quantized wavefunction.
    pub fn reconstruct(&self) -> FirstQuantizedState {
        let l = self.shape.label;
        let d = self.shape.cells();
        let mut psi = ComplexMatrix::zeros(d, d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut add = |(s1, l1): (usize, usize), (s2, l2): (usize, usize), v: C64| {
            psi[(s1 * l + l1, s2 * l + l2)] += v;
        };
        // Each basis vector is a sum of |s1 s2⟩|l1 l2⟩ with the weights used in decompose.
        for (&((x, y), (a, b)), &coeff) in &self.triplet {
            let sys: Vec<((usize, usize), f64)> = if x == y { vec![((x, x), 1.0)] } else { vec![((x, y), h), ((y, x), h)] };
            let lab: Vec<((usize, usize), f64)> = if a == b { vec![((a, a), 1.0)] } else { vec![((a, b), h), ((b, a), h)] };
            for &((s1, s2), ws) in &sys {
                for &((l1, l2), wl) in &lab {
                    add((s1, l1), (s2, l2), coeff * ws * wl);
                }
            }
        }
        for (&((x, y), (a, b)), &coeff) in &self.singlet {
            for &((s1, s2), ws) in &[((x, y), h), ((y, x), -h)] {
                for &((l1, l2), wl) in &[((a, b), h), ((b, a), -h)] {
                    add((s1, l1), (s2, l2), coeff * ws * wl);
                }
            }
        }
        FirstQuantizedState { shape: self.shape, psi }
    }
}

impl Serialize for DualityDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            system: [usize; 2],
            label: [usize; 2],
            re: f64,
            im: f64,
        }
        #[derive(Serialize)]
        struct Schmidt<'a> {
            triplet: &'a [f64],
            singlet: &'a [f64],
            all: Vec<f64>,
        }
        let entries = |m: &BTreeMap<(ModePair, ModePair), C64>| -> Vec<Entry> {
            m.iter()
                .map(|(&((x, y), (a, b)), z)| Entry { system: [x, y], label: [a, b], re: z.re, im: z.im })
                .collect()
        };
        let mut st = serializer.serialize_struct("DualityDecomposition", 6)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("triplet", &entries(&self.triplet))?;
        st.serialize_field("singlet", &entries(&self.singlet))?;
        st.serialize_field("triplet_weight", &self.triplet_weight())?;
        st.serialize_field("singlet_weight", &self.singlet_weight())?;
        st.serialize_field(
            "schmidt_coefficients",
            &Schmidt { triplet: &self.triplet_schmidt, singlet: &self.singlet_schmidt, all: self.schmidt_coefficients() },
        )?;
        st.end()
    }
}

/// Number of System-vs-Label singular values above `tol`, computed on the
/// full (unblocked) coefficient matrix.
pub fn schmidt_rank(state: &PureState, tol: f64) -> Result<usize> {
    let fq = first_quantize(state)?;
    let labels = occupied_labels(state);
    Ok(singular_values(&fq.bipartite(&labels)).into_iter().filter(|&s| s > tol).count())
}

/// Squared norm of the singlet block.
pub fn singlet_weight(state: &PureState) -> Result<f64> {
    Ok(decompose(state)?.singlet_weight())
}
