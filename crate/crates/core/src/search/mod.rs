//! Distinguishability filters: the closed-form family and a numerical
//! search over U(S).
//!
//! A filter sends two photons entering `input_ports` to `output_ports` with
//! a vanishing determinant on that 2×2 block. The singlet (antisymmetric
//! System) part of the input then never reaches both outputs, so whatever
//! survives postselection is label-uncorrelated and passes a HOM test.
//!
//! The search parametrizes U(S) as `exp(H)` with `H` skew-Hermitian (`S²`
//! real parameters) and runs seeded Nelder-Mead restarts followed by a
//! finite-difference gradient polish.

mod nelder_mead;

pub use nelder_mead::{gradient_polish, nelder_mead, MinimizeOptions, Minimum};

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Interferometer;
use crate::kernels::{determinant, ComplexMatrix};

/// Largest mode count the search accepts.
pub const MAX_SEARCH_MODES: usize = 6;

/// Angles of the three-mode filter family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub theta: f64,
    pub phi: f64,
    pub xi: f64,
    pub zeta: f64,
}

impl FamilyParams {
    pub fn new(theta: f64, phi: f64, xi: f64, zeta: f64) -> Self {
        Self { theta, phi, xi, zeta }
    }

    /// `θ ≡ 0 (mod π/2)`: one output of the filter block goes dark and the
    /// postselected pair no longer passes a HOM test.
    pub fn is_degenerate(&self) -> bool {
        self.theta.sin().abs() < 1e-12 || self.theta.cos().abs() < 1e-12
    }
}

/// The family member for the given angles.
pub fn family_unitary(p: FamilyParams) -> Result<Interferometer> {
    let e = |x: f64| C64::from_polar(1.0, x);
    let i = C64::new(0.0, 1.0);
    let (s, c) = p.theta.sin_cos();
    let zero = C64::new(0.0, 0.0);
    let rows = vec![
        vec![-e(p.zeta), -i * e(p.zeta), zero],
        vec![i * e(-(p.phi + p.zeta)) * c, e(-(p.phi + p.zeta)) * c, -SQRT_2 * e(-p.xi) * s],
        vec![i * e(p.xi - p.zeta) * s, e(p.xi - p.zeta) * s, SQRT_2 * e(p.phi) * c],
    ];
    Interferometer::new(ComplexMatrix::from_rows(&rows)?.scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// The three-mode filter: photons in ports 0 and 1, vacuum postselected on
/// port 0, HOM test on ports 1 and 2.
pub fn canonical_filter() -> Interferometer {
    let z = |re: f64, im: f64| C64::new(re, im);
    let rows = vec![
        vec![z(SQRT_2, 0.0), z(0.0, SQRT_2), z(0.0, 0.0)],
        vec![z(0.0, 1.0), z(1.0, 0.0), z(0.0, SQRT_2)],
        vec![z(-1.0, 0.0), z(0.0, 1.0), z(SQRT_2, 0.0)],
    ];
    let u = ComplexMatrix::from_rows(&rows).expect("3x3").scale(z(0.5, 0.0));
    Interferometer::new(u).expect("unitary")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `|det U[outputs, inputs]|²`.
    DetZero,
    /// Weight of the singlet and the non-coincident `(k, k)` terms in the
    /// normalized postselected two-photon output. Reaching zero would need
    /// the determinant and both bunching amplitudes to vanish while the
    /// permanent does not.
    DetZeroPlusNoncoincident,
}

fn default_restarts() -> usize {
    32
}
fn default_max_iters() -> usize {
    2000
}
fn default_tolerance() -> f64 {
    1e-8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    /// System mode count.
    #[serde(alias = "S")]
    pub modes: usize,
    pub input_ports: Vec<usize>,
    pub output_ports: Vec<usize>,
    pub objective: Objective,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Residual at or below which a run counts as converged.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl SearchSpec {
    /// Inputs 0,1 to outputs 1,2 in three modes.
    pub fn filter_default(objective: Objective) -> Self {
        Self {
            modes: 3,
            input_ports: vec![0, 1],
            output_ports: vec![1, 2],
            objective,
            restarts: default_restarts(),
            seed: 0,
            max_iters: default_max_iters(),
            tolerance: default_tolerance(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.modes == 0 || self.modes > MAX_SEARCH_MODES {
            return bad(format!("modes must be in 1..={MAX_SEARCH_MODES}, got {}", self.modes));
        }
        if self.input_ports.is_empty() || self.input_ports.len() != self.output_ports.len() {
            return bad("input_ports and output_ports must be non-empty and of equal length".into());
        }
        for ports in [&self.input_ports, &self.output_ports] {
            for (i, &p) in ports.iter().enumerate() {
                if p >= self.modes {
                    return bad(format!("port {p} out of range for {} modes", self.modes));
                }
                if ports[..i].contains(&p) {
                    return bad(format!("port {p} repeated"));
                }
            }
        }
        if self.objective == Objective::DetZeroPlusNoncoincident && self.input_ports.len() != 2 {
            return bad("the joint objective is defined for two photons".into());
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return bad("restarts and max_iters must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be positive".into());
        }
        Ok(())
    }
}

/// `exp(H)` for the skew-Hermitian `H` encoded by `S²` reals: `S` diagonal
/// phases, then (re, im) for each upper-triangular entry in row order.
pub fn unitary_from_params(modes: usize, params: &[f64]) -> ComplexMatrix {
    assert_eq!(params.len(), modes * modes, "expected S^2 parameters");
    let mut h = nalgebra::DMatrix::<C64>::zeros(modes, modes);
    for k in 0..modes {
        h[(k, k)] = C64::new(0.0, params[k]);
    }
    let mut idx = modes;
    for j in 0..modes {
        for k in (j + 1)..modes {
            let (re, im) = (params[idx], params[idx + 1]);
            h[(j, k)] = C64::new(re, im);
            h[(k, j)] = C64::new(-re, im);
            idx += 2;
        }
    }
    ComplexMatrix::from_nalgebra(&h.exp())
}

/// Unitary from parameters drawn uniformly in `[-π, π]`.
pub fn random_unitary(modes: usize, rng: &mut impl Rng) -> Interferometer {
    let params: Vec<f64> = (0..modes * modes).map(|_| rng.gen_range(-PI..PI)).collect();
    Interferometer::new(unitary_from_params(modes, &params)).expect("exp of skew-Hermitian is unitary")
}

/// Objective value for a given unitary.
pub fn objective_value(objective: Objective, u: &ComplexMatrix, inputs: &[usize], outputs: &[usize]) -> f64 {
    match objective {
        Objective::DetZero => {
            let sub = u.submatrix(outputs, inputs).expect("validated ports");
            determinant(&sub).expect("square").norm_sqr()
        }
        Objective::DetZeroPlusNoncoincident => {
            let a = u[(outputs[0], inputs[0])];
            let b = u[(outputs[0], inputs[1])];
            let c = u[(outputs[1], inputs[0])];
            let d = u[(outputs[1], inputs[1])];
            let det = (a * d - b * c).norm_sqr();
            let bunched = 2.0 * (a * b).norm_sqr() + 2.0 * (c * d).norm_sqr();
            let coincident = (a * d + b * c).norm_sqr();
            let total = det + bunched + coincident;
            if total < 1e-300 {
                1.0
            } else {
                (det + bunched) / total
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub objective: Objective,
    pub best_unitary: Interferometer,
    pub residual: f64,
    /// Simplex iterations of the winning restart.
    pub iterations: usize,
    pub converged: bool,
    pub best_restart: usize,
    pub restart_residuals: Vec<f64>,
    pub residual_min: f64,
    pub residual_median: f64,
}

struct RestartOutcome {
    index: usize,
    minimum: Minimum,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn run_restart(spec: &SearchSpec, index: usize) -> RestartOutcome {
    let n = spec.modes * spec.modes;
    let mut rng = restart_rng(spec.seed, index);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
    let f = |x: &[f64]| objective_value(spec.objective, &unitary_from_params(spec.modes, x), &spec.input_ports, &spec.output_ports);
    let opts = MinimizeOptions { max_iters: spec.max_iters, ..Default::default() };
    let minimum = gradient_polish(&f, nelder_mead(&f, &x0, &opts), opts.polish_iters);
    RestartOutcome { index, minimum }
}

/// Multi-restart minimization. Restarts run in parallel; the winner is the
/// lowest residual, ties going to the lowest restart index.
pub fn search(spec: &SearchSpec) -> Result<SearchResult> {
    search_with_progress(spec, |_, _| {})
}

/// As [`search`], reporting each restart's `(index, residual)` in index
/// order once all restarts finish.
pub fn search_with_progress(spec: &SearchSpec, mut progress: impl FnMut(usize, f64)) -> Result<SearchResult> {
    spec.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..spec.restarts).into_par_iter().map(|i| run_restart(spec, i)).collect();
    for o in &outcomes {
        progress(o.index, o.minimum.f);
    }
    let best = outcomes
        .iter()
        .min_by(|a, b| a.minimum.f.total_cmp(&b.minimum.f).then(a.index.cmp(&b.index)))
        .expect("at least one restart");

    let restart_residuals: Vec<f64> = outcomes.iter().map(|o| o.minimum.f).collect();
    let mut sorted = restart_residuals.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let residual_median = if sorted.len() % 2 == 1 { sorted[mid] } else { 0.5 * (sorted[mid - 1] + sorted[mid]) };

    let best_unitary = Interferometer::new(unitary_from_params(spec.modes, &best.minimum.x))?;
    Ok(SearchResult {
        objective: spec.objective,
        best_unitary,
        residual: best.minimum.f,
        iterations: best.minimum.iterations,
        converged: best.minimum.f <= spec.tolerance,
        best_restart: best.index,
        residual_min: sorted[0],
        residual_median,
        restart_residuals,
    })
}
