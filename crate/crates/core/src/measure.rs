//! Label-blind photon counting, vacuum postselection and HOM tests.
//!
//! Detectors resolve photon number per System port but not the Label, so
//! the probability of a spatial pattern sums over every Fock array with
//! those row sums. The classical model routes each photon independently
//! with probabilities `|U[t, s]|²`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{apply, compose, embed_beamsplitter, Interferometer};
use crate::fock::{from_label_overlap, LabelGram, PureState};

/// Photon counts per System output port.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpatialPattern(Vec<u32>);

impl SpatialPattern {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    /// One photon in each listed port, none elsewhere.
    pub fn ones(system: usize, ports: &[usize]) -> Result<Self> {
        let mut counts = vec![0; system];
        for &p in ports {
            if p >= system {
                return Err(Error::IndexOutOfRange { index: p, bound: system });
            }
            if counts[p] != 0 {
                return Err(Error::RepeatedIndex(p));
            }
            counts[p] = 1;
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn particle_count(&self) -> u32 {
        self.0.iter().sum()
    }
}

fn check_pattern(system: usize, n: u32, pattern: &SpatialPattern) -> Result<()> {
    if pattern.0.len() != system {
        return Err(Error::DimensionMismatch { expected: system, got: pattern.0.len() });
    }
    if pattern.particle_count() != n {
        return Err(Error::ParticleCount { expected: n, got: pattern.particle_count() });
    }
    Ok(())
}

/// Probability of each spatial pattern with nonzero weight.
pub fn spatial_distribution(state: &PureState) -> BTreeMap<SpatialPattern, f64> {
    let mut out = BTreeMap::new();
    for (array, amp) in state.terms() {
        *out.entry(SpatialPattern(array.system_counts())).or_insert(0.0) += amp.norm_sqr();
    }
    out
}

/// Label-blind probability of observing `pattern`.
pub fn spatial_probability(state: &PureState, pattern: &SpatialPattern) -> Result<f64> {
    check_pattern(state.shape().system, state.particle_count(), pattern)?;
    Ok(state
        .terms()
        .filter(|(a, _)| a.system_counts() == pattern.0)
        .map(|(_, amp)| amp.norm_sqr())
        .sum())
}

/// Outcome of conditioning on vacuum in one port.
#[derive(Clone, Debug)]
pub struct PostselectionResult {
    pub probability: f64,
    /// Renormalized surviving state; `None` when nothing survives.
    pub conditional_state: Option<PureState>,
    /// Surviving terms before renormalization.
    pub unnormalized_state: PureState,
}

/// Keeps the Fock arrays with an empty row at `port`.
pub fn postselect_vacuum(state: &PureState, port: usize) -> Result<PostselectionResult> {
    let shape = state.shape();
    if port >= shape.system {
        return Err(Error::IndexOutOfRange { index: port, bound: shape.system });
    }
    let kept = PureState::unnormalized(
        shape,
        state.particle_count(),
        state.terms().filter(|(a, _)| a.system_count(port) == 0).map(|(a, v)| (a.clone(), v)),
    )?;
    let weight = |s: &PureState| s.terms().map(|(_, v)| v.norm_sqr()).sum::<f64>();
    let total = weight(state);
    let probability = if total > 0.0 { weight(&kept) / total } else { 0.0 };
    let conditional_state = if kept.is_empty() { None } else { Some(kept.normalize()?) };
    Ok(PostselectionResult { probability, conditional_state, unnormalized_state: kept })
}

/// Probability of exactly one photon in each of `port_a`, `port_b` and none
/// elsewhere, without any extra optics.
pub fn coincidence_probability(state: &PureState, port_a: usize, port_b: usize) -> Result<f64> {
    if state.particle_count() != 2 {
        return Err(Error::ParticleCount { expected: 2, got: state.particle_count() });
    }
    if port_a == port_b {
        return Err(Error::RepeatedIndex(port_a));
    }
    let pattern = SpatialPattern::ones(state.shape().system, &[port_a, port_b])?;
    spatial_probability(state, &pattern)
}

/// HOM test: a balanced beamsplitter on `(port_a, port_b)` followed by a
/// coincidence count on those ports.
pub fn hom_coincidence(state: &PureState, port_a: usize, port_b: usize) -> Result<f64> {
    if state.particle_count() != 2 {
        return Err(Error::ParticleCount { expected: 2, got: state.particle_count() });
    }
    let bs = embed_beamsplitter(state.shape().system, port_a, port_b)?;
    coincidence_probability(&apply(&bs, state)?, port_a, port_b)
}

/// HOM coincidence against label overlap: photons enter ports 0 and 1 with
/// overlap `c`, pass the optional interferometer, then the HOM test on
/// ports 0 and 1.
pub fn dip_curve(system: usize, interferometer: Option<&Interferometer>, overlaps: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = overlaps.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(Error::Usage(format!("overlap {bad} is outside [0, 1]")));
    }
    if let Some(intf) = interferometer {
        if intf.dim() != system {
            return Err(Error::DimensionMismatch { expected: system, got: intf.dim() });
        }
    }
    overlaps
        .par_iter()
        .map(|&c| {
            let gram = LabelGram::two_photon(C64::new(c, 0.0))?;
            let mut state = from_label_overlap(system, &[0, 1], &gram)?;
            if let Some(intf) = interferometer {
                state = apply(intf, &state)?;
            }
            Ok((c, hom_coincidence(&state, 0, 1)?))
        })
        .collect()
}

/// Probability of `pattern` for classical distinguishable particles, one per
/// input port, each routed independently with `|U[t, s]|²`. With a
/// postselection port, patterns are conditioned on that port being empty.
pub fn classical_prediction(
    intf: &Interferometer,
    input_ports: &[usize],
    pattern: &SpatialPattern,
    postselect_vacuum_port: Option<usize>,
) -> Result<f64> {
    let system = intf.dim();
    check_pattern(system, input_ports.len() as u32, pattern)?;
    for &p in input_ports.iter().chain(postselect_vacuum_port.iter()) {
        if p >= system {
            return Err(Error::IndexOutOfRange { index: p, bound: system });
        }
    }
    let probs = routing_probabilities(intf);
    let mut hit = 0.0;
    let mut survive = 0.0;
    for_each_assignment(input_ports.len(), system, |targets| {
        let p: f64 = input_ports.iter().zip(targets).map(|(&s, &t)| probs[t][s]).product();
        if let Some(v) = postselect_vacuum_port {
            if targets.contains(&v) {
                return;
            }
        }
        survive += p;
        let mut counts = vec![0u32; system];
        for &t in targets {
            counts[t] += 1;
        }
        if counts == pattern.0 {
            hit += p;
        }
    });
    Ok(match postselect_vacuum_port {
        Some(_) if survive > 0.0 => hit / survive,
        Some(_) => 0.0,
        None => hit,
    })
}

/// Joint probability that classical particles show `patterns[i]` after
/// stage `i`, for every stage. Particles keep their identity between
/// stages.
pub fn classical_trajectory(stages: &[Interferometer], input_ports: &[usize], patterns: &[SpatialPattern]) -> Result<f64> {
    if stages.len() != patterns.len() || stages.is_empty() {
        return Err(Error::Usage("need one pattern per stage".into()));
    }
    let system = stages[0].dim();
    for (stage, pattern) in stages.iter().zip(patterns) {
        if stage.dim() != system {
            return Err(Error::DimensionMismatch { expected: system, got: stage.dim() });
        }
        check_pattern(system, input_ports.len() as u32, pattern)?;
    }
    if let Some(&p) = input_ports.iter().find(|&&p| p >= system) {
        return Err(Error::IndexOutOfRange { index: p, bound: system });
    }

    let mut positions: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    positions.insert(input_ports.to_vec(), 1.0);
    for (stage, pattern) in stages.iter().zip(patterns) {
        let probs = routing_probabilities(stage);
        let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (from, weight) in &positions {
            for_each_assignment(from.len(), system, |targets| {
                let mut counts = vec![0u32; system];
                for &t in targets {
                    counts[t] += 1;
                }
                if counts != pattern.0 {
                    return;
                }
                let p: f64 = from.iter().zip(targets).map(|(&s, &t)| probs[t][s]).product();
                if p > 0.0 {
                    *next.entry(targets.to_vec()).or_insert(0.0) += weight * p;
                }
            });
        }
        positions = next;
    }
    Ok(positions.values().sum())
}

/// Classical probability through a sequence of stages applied in order,
/// observing only the final pattern.
pub fn classical_cascade_prediction(stages: &[Interferometer], input_ports: &[usize], pattern: &SpatialPattern) -> Result<f64> {
    let Some((first, rest)) = stages.split_first() else {
        return Err(Error::Usage("need at least one stage".into()));
    };
    // |U|² routing composes as a product of stochastic matrices, which is
    // not |product of U|².
    let system = first.dim();
    check_pattern(system, input_ports.len() as u32, pattern)?;
    let mut probs = routing_probabilities(first);
    for stage in rest {
        if stage.dim() != system {
            return Err(Error::DimensionMismatch { expected: system, got: stage.dim() });
        }
        let q = routing_probabilities(stage);
        probs = (0..system).map(|t| (0..system).map(|s| (0..system).map(|k| q[t][k] * probs[k][s]).sum()).collect()).collect();
    }
    let mut hit = 0.0;
    for_each_assignment(input_ports.len(), system, |targets| {
        let mut counts = vec![0u32; system];
        for &t in targets {
            counts[t] += 1;
        }
        if counts == pattern.0 {
            hit += input_ports.iter().zip(targets).map(|(&s, &t)| probs[t][s]).product::<f64>();
        }
    });
    Ok(hit)
}

/// `probs[t][s] = |U[t, s]|²`.
fn routing_probabilities(intf: &Interferometer) -> Vec<Vec<f64>> {
    let u = intf.matrix();
    (0..u.rows()).map(|t| (0..u.cols()).map(|s| u[(t, s)].norm_sqr()).collect()).collect()
}

fn for_each_assignment(particles: usize, system: usize, mut f: impl FnMut(&[usize])) {
    let mut targets = vec![0usize; particles];
    loop {
        f(&targets);
        let mut pos = 0;
        loop {
            if pos == particles {
                return;
            }
            targets[pos] += 1;
            if targets[pos] < system {
                break;
            }
            targets[pos] = 0;
            pos += 1;
        }
    }
}

/// Probability that at least one photon leaves through `port`.
pub fn occupation_probability(state: &PureState, port: usize) -> Result<f64> {
    if port >= state.shape().system {
        return Err(Error::IndexOutOfRange { index: port, bound: state.shape().system });
    }
    Ok(state.terms().filter(|(a, _)| a.system_count(port) > 0).map(|(_, v)| v.norm_sqr()).sum())
}

/// Everything the filter pipeline produces for one input: postselect vacuum
/// on `vacuum_port` after `filter`, then HOM-test `hom_ports`.
#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub postselection: PostselectionResult,
    pub hom_coincidence: Option<f64>,
}

pub fn filter_pipeline(
    filter: &Interferometer,
    input: &PureState,
    vacuum_port: usize,
    hom_ports: (usize, usize),
) -> Result<FilterOutcome> {
    let out = apply(filter, input)?;
    let postselection = postselect_vacuum(&out, vacuum_port)?;
    let hom_coincidence = match &postselection.conditional_state {
        Some(s) => Some(hom_coincidence(s, hom_ports.0, hom_ports.1)?),
        None => None,
    };
    Ok(FilterOutcome { postselection, hom_coincidence })
}

/// The filter followed by a beamsplitter on `hom_ports`, as one matrix.
pub fn with_hom_beamsplitter(filter: &Interferometer, hom_ports: (usize, usize)) -> Result<Interferometer> {
    compose(&embed_beamsplitter(filter.dim(), hom_ports.0, hom_ports.1)?, filter)
}
