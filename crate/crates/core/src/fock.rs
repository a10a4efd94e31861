//! Second-quantized states over System × Label modes.
//!
//! A [`FockArray`] is an occupation grid with one row per System mode and
//! one column per Label mode. A [`PureState`] is a sparse superposition of
//! Fock arrays sharing one shape and particle count. Basis states carry the
//! usual `1/√(n!)` per-mode normalization, so `(a†)^2 |vac⟩ = √2 |2⟩`.

use std::collections::BTreeMap;

use nalgebra as na;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::ComplexMatrix;

/// Amplitudes below this modulus are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Allowed deviation of Σ|amplitude|² from 1 for a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeShape {
    /// System (spatial) mode count.
    pub system: usize,
    /// Label (orthonormal label basis) mode count.
    pub label: usize,
}

impl ModeShape {
    pub fn new(system: usize, label: usize) -> Result<Self> {
        if system == 0 || label == 0 {
            return Err(Error::InvalidState(format!("mode shape {system}x{label} must be at least 1x1")));
        }
        Ok(Self { system, label })
    }

    pub fn cells(&self) -> usize {
        self.system * self.label
    }
}

/// Occupation numbers on an S×L grid. Ordered lexicographically by the
/// flattened row-major grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockArray {
    shape: ModeShape,
    occ: Vec<u32>,
}

impl FockArray {
    pub fn from_flat(shape: ModeShape, occ: Vec<u32>) -> Result<Self> {
        if occ.len() != shape.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} occupation numbers for a {}x{} array",
                occ.len(),
                shape.system,
                shape.label
            )));
        }
        Ok(Self { shape, occ })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let system = rows.len();
        let label = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != label) {
            return Err(Error::ShapeMismatch("ragged occupation rows".into()));
        }
        Self::from_flat(ModeShape::new(system, label)?, rows.concat())
    }

    pub fn vacuum(shape: ModeShape) -> Self {
        Self { shape, occ: vec![0; shape.cells()] }
    }

    pub fn shape(&self) -> ModeShape {
        self.shape
    }

    pub fn get(&self, system: usize, label: usize) -> u32 {
        self.occ[system * self.shape.label + label]
    }

    pub fn particle_count(&self) -> u32 {
        self.occ.iter().sum()
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.occ
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.occ.chunks(self.shape.label).map(<[u32]>::to_vec).collect()
    }

    /// Photons in System mode `system`, summed over labels.
    pub fn system_count(&self, system: usize) -> u32 {
        self.occ[system * self.shape.label..(system + 1) * self.shape.label].iter().sum()
    }

    /// Occupations per System mode, summed over labels.
    pub fn system_counts(&self) -> Vec<u32> {
        (0..self.shape.system).map(|s| self.system_count(s)).collect()
    }

    /// The occupations of one Label column, indexed by System mode.
    pub fn label_column(&self, label: usize) -> Vec<u32> {
        (0..self.shape.system).map(|s| self.get(s, label)).collect()
    }

    pub(crate) fn from_columns(shape: ModeShape, columns: &[&[u32]]) -> Self {
        let mut occ = vec![0; shape.cells()];
        for (l, col) in columns.iter().enumerate() {
            for (s, &n) in col.iter().enumerate() {
                occ[s * shape.label + l] = n;
            }
        }
        Self { shape, occ }
    }

    fn with_label_count(&self, label: usize) -> Self {
        let shape = ModeShape { system: self.shape.system, label };
        let mut occ = vec![0; shape.cells()];
        for s in 0..shape.system {
            for l in 0..self.shape.label {
                occ[s * label + l] = self.get(s, l);
            }
        }
        Self { shape, occ }
    }
}

/// Sparse superposition of Fock arrays with fixed shape and particle count.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    shape: ModeShape,
    n: u32,
    terms: BTreeMap<FockArray, C64>,
    normalized: bool,
    norm: f64,
}

impl PureState {
    /// A normalized state. Duplicate arrays are summed.
    pub fn new(shape: ModeShape, n: u32, terms: impl IntoIterator<Item = (FockArray, C64)>) -> Result<Self> {
        let state = Self::build(shape, n, terms, true)?;
        let norm_sqr = state.norm * state.norm;
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(state)
    }

    /// A state flagged as unnormalized; its norm is stored at construction.
    pub fn unnormalized(shape: ModeShape, n: u32, terms: impl IntoIterator<Item = (FockArray, C64)>) -> Result<Self> {
        Self::build(shape, n, terms, false)
    }

    /// Normalized if the amplitudes are, otherwise flagged unnormalized.
    pub fn infer(shape: ModeShape, n: u32, terms: impl IntoIterator<Item = (FockArray, C64)>) -> Result<Self> {
        let mut state = Self::build(shape, n, terms, false)?;
        state.normalized = (state.norm * state.norm - 1.0).abs() <= NORM_TOLERANCE;
        Ok(state)
    }

    fn build(
        shape: ModeShape,
        n: u32,
        terms: impl IntoIterator<Item = (FockArray, C64)>,
        normalized: bool,
    ) -> Result<Self> {
        let mut map: BTreeMap<FockArray, C64> = BTreeMap::new();
        for (array, amp) in terms {
            if array.shape != shape {
                return Err(Error::ShapeMismatch(format!(
                    "array shape {:?} does not match state shape {:?}",
                    array.shape, shape
                )));
            }
            if array.particle_count() != n {
                return Err(Error::ParticleCount { expected: n, got: array.particle_count() });
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite);
            }
            *map.entry(array).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let norm = map.values().map(C64::norm_sqr).sum::<f64>().sqrt();
        Ok(Self { shape, n, terms: map, normalized, norm })
    }

    pub fn shape(&self) -> ModeShape {
        self.shape
    }

    pub fn particle_count(&self) -> u32 {
        self.n
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical key order.
    pub fn terms(&self) -> impl Iterator<Item = (&FockArray, C64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn amplitude(&self, array: &FockArray) -> C64 {
        self.terms.get(array).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Euclidean norm of the amplitudes.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn normalize(&self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v / self.norm));
        let mut out = Self::build(self.shape, self.n, terms, true)?;
        out.norm = 1.0;
        Ok(out)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.terms.iter().map(|(k, a)| a.conj() * other.amplitude(k)).sum()
    }

    /// Largest amplitude difference over the union of both supports.
    pub fn max_amplitude_diff(&self, other: &Self) -> f64 {
        let mine = self.terms.iter().map(|(k, a)| (a - other.amplitude(k)).norm());
        let theirs = other.terms.iter().filter(|(k, _)| !self.terms.contains_key(*k)).map(|(_, a)| a.norm());
        mine.chain(theirs).fold(0.0, f64::max)
    }

    /// Embeds the state in a larger Label space by appending empty columns.
    pub fn with_label_count(&self, label: usize) -> Result<Self> {
        if label < self.shape.label {
            return Err(Error::ShapeMismatch(format!(
                "cannot shrink label count from {} to {label}",
                self.shape.label
            )));
        }
        let shape = ModeShape { system: self.shape.system, label };
        let mut out = Self::build(shape, self.n, self.terms.iter().map(|(k, v)| (k.with_label_count(label), *v)), false)?;
        out.normalized = self.normalized;
        Ok(out)
    }

    pub(crate) fn with_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StateRepr::from(self)).expect("state serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: StateRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    occ: Vec<Vec<u32>>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    shape: [usize; 2],
    n: u32,
    terms: Vec<TermRepr>,
}

impl From<&PureState> for StateRepr {
    fn from(s: &PureState) -> Self {
        Self {
            shape: [s.shape.system, s.shape.label],
            n: s.n,
            terms: s.terms().map(|(k, a)| TermRepr { occ: k.rows(), re: a.re, im: a.im }).collect(),
        }
    }
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let shape = ModeShape::new(r.shape[0], r.shape[1])?;
        let terms = r
            .terms
            .into_iter()
            .map(|t| Ok((FockArray::from_rows(&t.occ)?, C64::new(t.re, t.im))))
            .collect::<Result<Vec<_>>>()?;
        PureState::infer(shape, r.n, terms)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(deserializer)?;
        repr.try_into().map_err(serde::de::Error::custom)
    }
}

fn check_modes(system: usize, modes: &[usize]) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::InvalidState("at least one photon is required".into()));
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= system {
            return Err(Error::IndexOutOfRange { index: m, bound: system });
        }
        if modes[..i].contains(&m) {
            return Err(Error::RepeatedIndex(m));
        }
    }
    Ok(())
}

/// One photon per listed System mode, all in Label 0 (`L = 1`).
pub fn fock_indistinguishable(system: usize, modes: &[usize]) -> Result<PureState> {
    check_modes(system, modes)?;
    let shape = ModeShape::new(system, 1)?;
    let mut occ = vec![0; shape.cells()];
    for &m in modes {
        occ[m] = 1;
    }
    PureState::new(shape, modes.len() as u32, [(FockArray::from_flat(shape, occ)?, C64::new(1.0, 0.0))])
}

/// Photon `i` sits in System mode `modes[i]` with its own Label `i`
/// (`L` = photon count).
pub fn fock_distinguishable(system: usize, modes: &[usize]) -> Result<PureState> {
    check_modes(system, modes)?;
    let shape = ModeShape::new(system, modes.len())?;
    let mut occ = vec![0; shape.cells()];
    for (i, &m) in modes.iter().enumerate() {
        occ[m * shape.label + i] = 1;
    }
    PureState::new(shape, modes.len() as u32, [(FockArray::from_flat(shape, occ)?, C64::new(1.0, 0.0))])
}

/// `α |both photons labelled R⟩ + β |photon in mode 1 labelled G⟩`, photons
/// in System modes 0 and 1, Labels `R = 0`, `G = 1`.
pub fn partially_distinguishable(system: usize, alpha: C64, beta: C64) -> Result<PureState> {
    if system < 2 {
        return Err(Error::InvalidState("two System modes are required".into()));
    }
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm_sqr));
    }
    let shape = ModeShape::new(system, 2)?;
    let mut same = vec![0; shape.cells()];
    same[0] = 1;
    same[2] = 1;
    let mut diff = vec![0; shape.cells()];
    diff[0] = 1;
    diff[3] = 1;
    PureState::new(
        shape,
        2,
        [(FockArray::from_flat(shape, same)?, alpha), (FockArray::from_flat(shape, diff)?, beta)],
    )
}

/// Pairwise overlaps `g[i][j] = ⟨φ_i|φ_j⟩` between photon Label wavefunctions.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelGram(ComplexMatrix);

impl LabelGram {
    const TOL: f64 = 1e-12;

    pub fn new(g: ComplexMatrix) -> Result<Self> {
        let k = g.square_dim().map_err(|_| Error::InvalidGram("not square".into()))?;
        for i in 0..k {
            if (g[(i, i)] - 1.0).norm() > Self::TOL {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is {}", g[(i, i)])));
            }
            for j in 0..k {
                if (g[(i, j)] - g[(j, i)].conj()).norm() > Self::TOL {
                    return Err(Error::InvalidGram("not Hermitian".into()));
                }
            }
        }
        let eig = na::SymmetricEigen::new(g.to_nalgebra());
        if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
            if min < -Self::TOL {
                return Err(Error::InvalidGram(format!("not positive semidefinite (eigenvalue {min:e})")));
            }
        }
        Ok(Self(g))
    }

    /// Two photons whose labels overlap by `c = ⟨φ_1|φ_2⟩`.
    pub fn two_photon(c: C64) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(&[vec![C64::new(1.0, 0.0), c], vec![c.conj(), C64::new(1.0, 0.0)]])?)
    }

    pub fn photons(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Upper-triangular `R` with `g = R† R`; column `j` holds photon `j`'s
    /// label in the orthonormal basis built by Gram-Schmidt in photon order.
    fn cholesky_upper(&self) -> ComplexMatrix {
        let g = &self.0;
        let k = g.rows();
        let mut r = ComplexMatrix::zeros(k, k);
        for i in 0..k {
            let diag = g[(i, i)].re - (0..i).map(|p| r[(p, i)].norm_sqr()).sum::<f64>();
            let d = diag.max(0.0).sqrt();
            r[(i, i)] = C64::new(d, 0.0);
            for j in (i + 1)..k {
                let off = g[(i, j)] - (0..i).map(|p| r[(p, i)].conj() * r[(p, j)]).sum::<C64>();
                r[(i, j)] = if d > Self::TOL { off / d } else { C64::new(0.0, 0.0) };
            }
        }
        r
    }
}

/// Maximum photon count accepted by [`from_label_overlap`].
pub const MAX_GRAM_PHOTONS: usize = 2;

/// Photons in distinct System modes whose Label wavefunctions have the
/// given overlaps, re-expressed in an orthonormal Label basis (`L = k`).
pub fn from_label_overlap(system: usize, modes: &[usize], gram: &LabelGram) -> Result<PureState> {
    check_modes(system, modes)?;
    let k = gram.photons();
    if k != modes.len() {
        return Err(Error::DimensionMismatch { expected: modes.len(), got: k });
    }
    if k > MAX_GRAM_PHOTONS {
        return Err(Error::TooLarge { n: k, max: MAX_GRAM_PHOTONS });
    }
    let r = gram.cholesky_upper();
    let shape = ModeShape::new(system, k)?;

    // Π_j (Σ_b r[b, j] a†_{m_j, b}); the System modes are distinct, so every
    // monomial is a product of distinct creators with unit normalization.
    let mut terms = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let amp: C64 = (0..k).map(|j| r[(choice[j], j)]).product();
        if amp.norm() >= PRUNE_THRESHOLD {
            let mut occ = vec![0; shape.cells()];
            for (j, &b) in choice.iter().enumerate() {
                occ[modes[j] * k + b] += 1;
            }
            terms.push((FockArray::from_flat(shape, occ)?, amp));
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return PureState::new(shape, k as u32, terms);
            }
            choice[pos] += 1;
            if choice[pos] < k {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
