//! Passive System-only evolution `U ⊗ 1`.
//!
//! A creator transforms as `a†_{s,l} ↦ Σ_t U[t, s] a†_{t,l}`. Labels are
//! untouched, so each Label column evolves independently and transition
//! amplitudes factor into per-column permanents. [`symbolic_apply`] expands
//! the same map monomial by monomial and serves as the reference.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockArray, PureState};
use crate::kernels::{permanent, ComplexMatrix};

/// Maximum unitarity defect accepted for an interferometer.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Size limits for [`symbolic_apply`].
pub const ORACLE_MAX_PARTICLES: u32 = 4;
pub const ORACLE_MAX_CELLS: usize = 8;

/// An S×S unitary transfer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    u: ComplexMatrix,
    defect: f64,
}

impl Interferometer {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        let defect = u.unitarity_defect()?;
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { u, defect })
    }

    pub fn identity(dim: usize) -> Self {
        Self { u: ComplexMatrix::identity(dim), defect: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn adjoint(&self) -> Self {
        Self { u: self.u.adjoint(), defect: self.defect }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("interferometer serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct InterferometerRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for Interferometer {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.u.to_rows();
        InterferometerRepr {
            dim: self.dim(),
            re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interferometer {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = InterferometerRepr::deserialize(deserializer)?;
        if r.re.len() != r.dim || r.im.len() != r.dim || r.re.iter().chain(&r.im).any(|row| row.len() != r.dim) {
            return Err(D::Error::custom(format!("re/im must both be {0}x{0}", r.dim)));
        }
        let rows: Vec<Vec<C64>> =
            r.re.iter().zip(&r.im).map(|(re, im)| re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()).collect();
        let u = ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)?;
        Interferometer::new(u).map_err(D::Error::custom)
    }
}

/// `a` after `b`: the matrix product `a·b`.
pub fn compose(a: &Interferometer, b: &Interferometer) -> Result<Interferometer> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Interferometer::new(a.u.try_mul(&b.u)?)
}

/// Phase convention of a balanced two-port beamsplitter block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamsplitterConvention {
    /// `(1/√2) [[1, i], [i, 1]]`.
    #[default]
    Symmetric,
    /// `(1/√2) [[1, 1], [1, -1]]`.
    Hadamard,
}

/// S×S identity with a balanced beamsplitter on `(port_a, port_b)`.
pub fn embed_beamsplitter(system: usize, port_a: usize, port_b: usize) -> Result<Interferometer> {
    embed_beamsplitter_with(system, port_a, port_b, BeamsplitterConvention::Symmetric)
}

pub fn embed_beamsplitter_with(
    system: usize,
    port_a: usize,
    port_b: usize,
    convention: BeamsplitterConvention,
) -> Result<Interferometer> {
    for p in [port_a, port_b] {
        if p >= system {
            return Err(Error::IndexOutOfRange { index: p, bound: system });
        }
    }
    if port_a == port_b {
        return Err(Error::RepeatedIndex(port_a));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (aa, ab, ba, bb) = match convention {
        BeamsplitterConvention::Symmetric => (C64::new(h, 0.0), C64::new(0.0, h), C64::new(0.0, h), C64::new(h, 0.0)),
        BeamsplitterConvention::Hadamard => (C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)),
    };
    let mut u = ComplexMatrix::identity(system);
    u[(port_a, port_a)] = aa;
    u[(port_a, port_b)] = ab;
    u[(port_b, port_a)] = ba;
    u[(port_b, port_b)] = bb;
    Interferometer::new(u)
}

fn check_dims(intf: &Interferometer, state: &PureState) -> Result<()> {
    if intf.dim() != state.shape().system {
        return Err(Error::DimensionMismatch { expected: state.shape().system, got: intf.dim() });
    }
    Ok(())
}

/// All length-`parts` vectors of non-negative integers summing to `n`, in
/// lexicographically decreasing order.
pub(crate) fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(n: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=n).rev() {
            prefix.push(k);
            rec(n - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Transition amplitude of one Label column, `⟨out| U |in⟩`: the permanent
/// of `U` with row `t` repeated `out[t]` times and column `s` repeated
/// `in[s]` times, over `√(Π in! Π out!)`.
fn column_amplitude(u: &ComplexMatrix, input: &[u32], output: &[u32], norm: f64) -> Result<C64> {
    let rows: Vec<usize> = output.iter().enumerate().flat_map(|(t, &k)| std::iter::repeat_n(t, k as usize)).collect();
    let cols: Vec<usize> = input.iter().enumerate().flat_map(|(s, &k)| std::iter::repeat_n(s, k as usize)).collect();
    let m = ComplexMatrix::from_fn(rows.len(), cols.len(), |r, c| u[(rows[r], cols[c])]);
    let denom = (norm * output.iter().map(|&k| factorial(k)).product::<f64>()).sqrt();
    Ok(permanent(&m)? / denom)
}

/// Nonzero output columns reachable from one input column.
fn column_outputs(u: &ComplexMatrix, input: &[u32]) -> Result<Vec<(Vec<u32>, C64)>> {
    let n: u32 = input.iter().sum();
    let in_norm: f64 = input.iter().map(|&k| factorial(k)).product();
    let mut out = Vec::new();
    for target in compositions(n, input.len()) {
        let amp = column_amplitude(u, input, &target, in_norm)?;
        if amp.norm() > 0.0 {
            out.push((target, amp));
        }
    }
    Ok(out)
}

/// Applies `U ⊗ 1` to a state.
pub fn apply(intf: &Interferometer, state: &PureState) -> Result<PureState> {
    check_dims(intf, state)?;
    let shape = state.shape();
    let u = intf.matrix();
    let mut cache: HashMap<Vec<u32>, Vec<(Vec<u32>, C64)>> = HashMap::new();
    let mut acc: BTreeMap<FockArray, C64> = BTreeMap::new();

    for (array, amp) in state.terms() {
        let inputs: Vec<Vec<u32>> = (0..shape.label).map(|l| array.label_column(l)).collect();
        for input in &inputs {
            if !cache.contains_key(input) {
                let outs = column_outputs(u, input)?;
                cache.insert(input.clone(), outs);
            }
        }
        let per_column: Vec<&Vec<(Vec<u32>, C64)>> = inputs.iter().map(|i| &cache[i]).collect();
        if per_column.iter().any(|outs| outs.is_empty()) {
            continue;
        }

        // Cartesian product over columns, fixed column order.
        let mut idx = vec![0usize; shape.label];
        'product: loop {
            let mut a = amp;
            let mut cols: Vec<&[u32]> = Vec::with_capacity(shape.label);
            for (l, outs) in per_column.iter().enumerate() {
                let (col, ca) = &outs[idx[l]];
                a *= ca;
                cols.push(col);
            }
            *acc.entry(FockArray::from_columns(shape, &cols)).or_insert(C64::new(0.0, 0.0)) += a;

            for l in 0..shape.label {
                idx[l] += 1;
                if idx[l] < per_column[l].len() {
                    continue 'product;
                }
                idx[l] = 0;
            }
            break;
        }
    }
    Ok(PureState::unnormalized(shape, state.particle_count(), acc)?.with_flag(state.is_normalized()))
}

/// Reference evolution: expands `Π (Σ_t U[t,s] a†_{t,l})` over every choice
/// of output mode per photon and collects like Fock arrays. Cost `S^N` per
/// input term.
pub fn symbolic_apply(intf: &Interferometer, state: &PureState) -> Result<PureState> {
    check_dims(intf, state)?;
    let shape = state.shape();
    let n = state.particle_count();
    if n > ORACLE_MAX_PARTICLES {
        return Err(Error::TooLarge { n: n as usize, max: ORACLE_MAX_PARTICLES as usize });
    }
    if shape.cells() > ORACLE_MAX_CELLS {
        return Err(Error::TooLarge { n: shape.cells(), max: ORACLE_MAX_CELLS });
    }
    let u = intf.matrix();
    let system = shape.system;
    let mut acc: BTreeMap<FockArray, C64> = BTreeMap::new();

    for (array, amp) in state.terms() {
        // One creator per photon: (system mode, label).
        let mut creators = Vec::with_capacity(n as usize);
        let mut in_norm = 1.0;
        for s in 0..system {
            for l in 0..shape.label {
                let k = array.get(s, l);
                in_norm *= factorial(k);
                creators.extend(std::iter::repeat_n((s, l), k as usize));
            }
        }
        let base = amp / in_norm.sqrt();

        let mut targets = vec![0usize; creators.len()];
        loop {
            let mut coeff = base;
            let mut occ = vec![0u32; shape.cells()];
            for (&(s, l), &t) in creators.iter().zip(&targets) {
                coeff *= u[(t, s)];
                occ[t * shape.label + l] += 1;
            }
            // Π (a†_m)^k |vac⟩ = Π √(k!) |k⟩
            let out_norm: f64 = occ.iter().map(|&k| factorial(k)).product();
            let key = FockArray::from_flat(shape, occ)?;
            *acc.entry(key).or_insert(C64::new(0.0, 0.0)) += coeff * out_norm.sqrt();

            let mut pos = 0;
            loop {
                if pos == targets.len() {
                    break;
                }
                targets[pos] += 1;
                if targets[pos] < system {
                    break;
                }
                targets[pos] = 0;
                pos += 1;
            }
            if pos == targets.len() {
                break;
            }
        }
    }
    Ok(PureState::unnormalized(shape, n, acc)?.with_flag(state.is_normalized()))
}

/// Runs [`apply`], optionally cross-checking every evolution against
/// [`symbolic_apply`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Evolver {
    pub oracle: bool,
    pub tolerance: f64,
}

impl Evolver {
    pub fn new(oracle: bool) -> Self {
        Self { oracle, tolerance: 1e-10 }
    }

    pub fn apply(&self, intf: &Interferometer, state: &PureState) -> Result<PureState> {
        let out = apply(intf, state)?;
        if self.oracle {
            let reference = symbolic_apply(intf, state)?;
            let diff = out.max_amplitude_diff(&reference);
            if diff > self.tolerance {
                return Err(Error::OracleMismatch(diff));
            }
        }
        Ok(out)
    }
}
