//! Dense state-vector simulation of the quantum query model.
//!
//! The workspace is a query register holding `0..=n` tensored with an
//! auxiliary register; input bits enter only through the phase oracle,
//! which multiplies the amplitude of query value `i` by `(-1)^(x_i)`.
//! Query value 0 is a null query and always gets phase `+1`. An algorithm
//! is a sequence of workspace unitaries `U_1..U_t` and a projector pair
//! `(P_0, P_1)`; execution applies `U_1, O, U_2, O, ..., U_t, O` to the
//! all-zeros basis state and measures with the projectors.
//!
//! Progress instrumentation tracks, for a weighted set of inputs, the sum
//! `S_l = sum Gamma_xy alpha_x alpha_y |<Psi_x(l)|Psi_y(l)>|` (symmetric
//! convention), its per-query decrements, and the per-query-value overlap
//! decomposition whose total stays below `sqrt(nu)`.

pub mod zoo;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::adversary::{AmplitudeVector, WeightMatrix};
use crate::bits::BitString;
use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Construction-time tolerance for unitarity and projector identities.
pub const OPERATOR_TOLERANCE: f64 = 1e-10;
/// Per-step tolerance on state norms.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Slack added to the proved inequalities when checking them numerically.
pub const CHECK_TOLERANCE: f64 = 1e-9;
/// Workspace dimension cap.
pub const WORKSPACE_CAP: usize = 1 << 12;

/// A `t`-query algorithm over an `n`-bit input.
#[derive(Clone, Debug)]
pub struct QueryAlgorithm {
    n: u32,
    aux_dim: usize,
    unitaries: Vec<DMatrix<Complex64>>,
    p0: DMatrix<Complex64>,
    p1: DMatrix<Complex64>,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

impl QueryAlgorithm {
    pub fn new(
        n: u32,
        aux_dim: usize,
        unitaries: Vec<DMatrix<Complex64>>,
        p0: DMatrix<Complex64>,
        p1: DMatrix<Complex64>,
    ) -> Result<Self> {
        let dim = (n as usize + 1) * aux_dim;
        if dim > WORKSPACE_CAP {
            return Err(Error::SizeLimit { needed: dim as u128, cap: WORKSPACE_CAP });
        }
        let eye = DMatrix::<Complex64>::identity(dim, dim);
        for (index, u) in unitaries.iter().enumerate() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: u.nrows() });
            }
            let deviation = max_abs(&(u.adjoint() * u - &eye));
            if deviation > OPERATOR_TOLERANCE {
                return Err(Error::NonUnitary { index, deviation });
            }
        }
        for (name, p) in [("P0", &p0), ("P1", &p1)] {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.nrows() });
            }
            let idem = max_abs(&(p * p - p));
            let herm = max_abs(&(p.adjoint() - p));
            let deviation = idem.max(herm);
            if deviation > OPERATOR_TOLERANCE {
                return Err(Error::InvalidProjectors {
                    reason: format!("{name} is not an orthogonal projector"),
                    deviation,
                });
            }
        }
        let completeness = max_abs(&(&p0 + &p1 - &eye));
        if completeness > OPERATOR_TOLERANCE {
            return Err(Error::InvalidProjectors {
                reason: "P0 + P1 != I".into(),
                deviation: completeness,
            });
        }
        Ok(Self { n, aux_dim, unitaries, p0, p1 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn aux_dim(&self) -> usize {
        self.aux_dim
    }

    /// Workspace dimension `(n + 1) * aux_dim`.
    pub fn dim(&self) -> usize {
        (self.n as usize + 1) * self.aux_dim
    }

    /// Number of oracle calls.
    pub fn queries(&self) -> usize {
        self.unitaries.len()
    }

    pub fn projector(&self, outcome: bool) -> &DMatrix<Complex64> {
        if outcome {
            &self.p1
        } else {
            &self.p0
        }
    }

    /// Multiplies the amplitude of query value `i` by `(-1)^(x_i)`; query
    /// value 0 is untouched.
    pub fn apply_oracle(&self, state: &mut DVector<Complex64>, x: BitString) {
        for i in 1..=self.n {
            if x.get(i) {
                let start = i as usize * self.aux_dim;
                for z in 0..self.aux_dim {
                    state[start + z] = -state[start + z];
                }
            }
        }
    }
}

/// States of one input's computation: `states[l]` after `l` full steps
/// (unitary plus oracle), `pre_oracle[l-1]` between `U_l` and its oracle.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<DVector<Complex64>>,
    pub pre_oracle: Vec<DVector<Complex64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<Complex64> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Runs the algorithm on one input from the all-zeros basis state.
pub fn run(alg: &QueryAlgorithm, x: BitString) -> Result<Trajectory> {
    if x.len() != alg.n() {
        return Err(Error::LengthMismatch { expected: alg.n(), got: x.len() });
    }
    let dim = alg.dim();
    let mut state = DVector::<Complex64>::zeros(dim);
    state[0] = Complex64::new(1.0, 0.0);
    let mut states = vec![state.clone()];
    let mut pre_oracle = Vec::with_capacity(alg.queries());
    for (l, u) in alg.unitaries.iter().enumerate() {
        state = u * &state;
        pre_oracle.push(state.clone());
        alg.apply_oracle(&mut state, x);
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift { step: l + 1, norm });
        }
        states.push(state.clone());
    }
    Ok(Trajectory { states, pre_oracle })
}

/// Runs every tracked input. Inputs are independent, so this fans out when
/// the `parallel` feature is on; the output order always follows `inputs`.
pub fn run_tracked(alg: &QueryAlgorithm, inputs: &[BitString]) -> Result<Vec<Trajectory>> {
    #[cfg(feature = "parallel")]
    {
        inputs.par_iter().map(|&x| run(alg, x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_tracked_seq(alg, inputs)
    }
}

/// Sequential fallback behind [`run_tracked`]; also the benchmark baseline.
pub fn run_tracked_seq(alg: &QueryAlgorithm, inputs: &[BitString]) -> Result<Vec<Trajectory>> {
    inputs.iter().map(|&x| run(alg, x)).collect()
}

/// Worst-case probability of announcing `1 - f(x)`, over the given inputs.
pub fn error_probability(
    alg: &QueryAlgorithm,
    f: impl Fn(BitString) -> bool,
    inputs: &[BitString],
) -> Result<f64> {
    let trajectories = run_tracked(alg, inputs)?;
    Ok(inputs
        .iter()
        .zip(&trajectories)
        .map(|(&x, t)| (alg.projector(!f(x)) * t.final_state()).norm_squared())
        .fold(0.0, f64::max))
}

/// Matrix of complex inner products `<Psi_a|Psi_b>` for one step.
pub fn gram_complex(states: &[DVector<Complex64>]) -> DMatrix<Complex64> {
    let m = states.len();
    DMatrix::from_fn(m, m, |a, b| states[a].dotc(&states[b]))
}

/// Entrywise absolute values of [`gram_complex`].
pub fn gram(states: &[DVector<Complex64>]) -> DMatrix<f64> {
    gram_complex(states).map(|c| c.norm())
}

/// The progress measure and its per-query bookkeeping.
#[derive(Clone, Debug)]
pub struct ProgressTrace {
    pub tracked: Vec<BitString>,
    /// `S_0..S_t`.
    pub s: Vec<f64>,
    /// Absolute Gram matrix per step, indexed like `tracked`.
    pub gram: Vec<DMatrix<f64>>,
    /// `S_(l-1) - S_l` for each step `l`.
    pub decrements: Vec<f64>,
    /// Query-value overlap decomposition just before each oracle call.
    pub pre_query_sums: Vec<f64>,
    /// The same decomposition just after each oracle call.
    pub post_query_sums: Vec<f64>,
    pub nu: f64,
}

impl ProgressTrace {
    pub fn queries(&self) -> usize {
        self.decrements.len()
    }

    /// `2 * sqrt(nu)`, the proved ceiling on any single decrement.
    pub fn decrement_bound(&self) -> f64 {
        2.0 * self.nu.sqrt()
    }
}

/// Weighted pairs restricted to the tracked inputs, with positions resolved.
struct TrackedPairs {
    /// `(a, b, weight)` over both orientations.
    entries: Vec<(usize, usize, f64)>,
}

fn tracked_pairs(
    gamma: &WeightMatrix,
    alpha: &AmplitudeVector,
    tracked: &[BitString],
) -> Result<TrackedPairs> {
    let position: std::collections::BTreeMap<BitString, usize> =
        tracked.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let sym = gamma.symmetrized();
    let mut entries = Vec::new();
    for (&(x, y), &w) in sym.entries() {
        if w == 0.0 {
            continue;
        }
        let (Some(&a), Some(&b)) = (position.get(&x), position.get(&y)) else {
            return Err(Error::SupportViolation {
                x,
                y,
                reason: "weighted pair is not covered by the tracked input set".into(),
            });
        };
        entries.push((a, b, w * alpha.get(&x) * alpha.get(&y)));
    }
    Ok(TrackedPairs { entries })
}

/// Runs the tracked inputs and assembles `S_l`, the Gram matrices, the
/// decrements, and the per-query decomposition sums. `Gamma` is read in the
/// symmetric convention regardless of how it is stored.
pub fn progress_trace(
    alg: &QueryAlgorithm,
    gamma: &WeightMatrix,
    alpha: &AmplitudeVector,
    f: impl Fn(BitString) -> bool,
    tracked: &[BitString],
) -> Result<ProgressTrace> {
    let pairs = tracked_pairs(gamma, alpha, tracked)?;
    let nu = gamma.nu_stats(&f).nu;
    let trajectories = run_tracked(alg, tracked)?;
    let t = alg.queries();

    let mut s = Vec::with_capacity(t + 1);
    let mut grams = Vec::with_capacity(t + 1);
    for l in 0..=t {
        let states: Vec<DVector<Complex64>> =
            trajectories.iter().map(|tr| tr.states[l].clone()).collect();
        let g = gram(&states);
        s.push(pairs.entries.iter().map(|&(a, b, w)| w * g[(a, b)]).sum());
        grams.push(g);
    }
    let decrements: Vec<f64> = (1..=t).map(|l| s[l - 1] - s[l]).collect();

    let sym = gamma.symmetrized();
    let decomposition = |states: &[&DVector<Complex64>]| -> f64 {
        decomposition_sum(&sym, alpha, tracked, states, alg.aux_dim())
    };
    let mut pre_query_sums = Vec::with_capacity(t);
    let mut post_query_sums = Vec::with_capacity(t);
    for l in 1..=t {
        let pre: Vec<&DVector<Complex64>> =
            trajectories.iter().map(|tr| &tr.pre_oracle[l - 1]).collect();
        let post: Vec<&DVector<Complex64>> =
            trajectories.iter().map(|tr| &tr.states[l]).collect();
        pre_query_sums.push(decomposition(&pre));
        post_query_sums.push(decomposition(&post));
    }

    Ok(ProgressTrace {
        tracked: tracked.to_vec(),
        s,
        gram: grams,
        decrements,
        pre_query_sums,
        post_query_sums,
        nu,
    })
}

/// `sum over i of sum over pairs differing at i of Gamma_xy |alpha_x
/// <Psi^i_x|Psi^i_y> alpha_y|`, where `Psi^i` is the component with query
/// value `i`. Both orientations of each pair are counted, matching the
/// symmetric convention of the progress measure.
fn decomposition_sum(
    sym: &WeightMatrix,
    alpha: &AmplitudeVector,
    tracked: &[BitString],
    states: &[&DVector<Complex64>],
    aux_dim: usize,
) -> f64 {
    let position: std::collections::BTreeMap<BitString, usize> =
        tracked.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut total = 0.0;
    for (&(x, y), &w) in sym.entries() {
        if w == 0.0 {
            continue;
        }
        let (a, b) = (position[&x], position[&y]);
        let weight = w * alpha.get(&x) * alpha.get(&y);
        if weight == 0.0 {
            continue;
        }
        for i in x.differing_bits(&y) {
            let start = i as usize * aux_dim;
            let mut inner = Complex64::new(0.0, 0.0);
            for z in 0..aux_dim {
                inner += states[a][start + z].conj() * states[b][start + z];
            }
            total += weight * inner.norm();
        }
    }
    total
}

/// Outcome of the final-overlap necessary condition: every pair of tracked
/// inputs with different `f`-values must end with overlap at most
/// `2 * sqrt(eps * (1 - eps))`.
#[derive(Clone, Debug)]
pub struct OverlapVerdict {
    pub epsilon: f64,
    pub threshold: f64,
    pub max_cross_overlap: f64,
    pub worst_pair: Option<(BitString, BitString)>,
    pub pass: bool,
}

pub fn overlap_check(
    final_states: &[DVector<Complex64>],
    tracked: &[BitString],
    f: impl Fn(BitString) -> bool,
    epsilon: f64,
) -> OverlapVerdict {
    let threshold = 2.0 * (epsilon * (1.0 - epsilon)).sqrt();
    let m = gram(final_states);
    let mut max_cross_overlap = 0.0;
    let mut worst_pair = None;
    for a in 0..tracked.len() {
        for b in (a + 1)..tracked.len() {
            if f(tracked[a]) != f(tracked[b]) && m[(a, b)] > max_cross_overlap {
                max_cross_overlap = m[(a, b)];
                worst_pair = Some((tracked[a], tracked[b]));
            }
        }
    }
    OverlapVerdict {
        epsilon,
        threshold,
        max_cross_overlap,
        worst_pair,
        pass: max_cross_overlap <= threshold + CHECK_TOLERANCE,
    }
}

/// One step's decomposition check: both decomposition sums stay below
/// `sqrt(nu)`, and the observed decrement is explained by their total.
#[derive(Clone, Copy, Debug)]
pub struct DecompositionCheck {
    pub step: usize,
    pub pre_query_sum: f64,
    pub post_query_sum: f64,
    pub sqrt_nu: f64,
    pub decrement: f64,
    pub ok: bool,
}

impl DecompositionCheck {
    /// `step` is 1-based.
    pub fn from_trace(trace: &ProgressTrace, step: usize) -> Self {
        let pre = trace.pre_query_sums[step - 1];
        let post = trace.post_query_sums[step - 1];
        let sqrt_nu = trace.nu.sqrt();
        let decrement = trace.decrements[step - 1];
        let ok = pre <= sqrt_nu + CHECK_TOLERANCE
            && post <= sqrt_nu + CHECK_TOLERANCE
            && decrement <= pre + post + CHECK_TOLERANCE;
        Self { step, pre_query_sum: pre, post_query_sum: post, sqrt_nu, decrement, ok }
    }
}

/// Builds a trace and checks one step; see [`DecompositionCheck`].
pub fn query_decomposition_check(
    alg: &QueryAlgorithm,
    gamma: &WeightMatrix,
    alpha: &AmplitudeVector,
    f: impl Fn(BitString) -> bool,
    tracked: &[BitString],
    step: usize,
) -> Result<DecompositionCheck> {
    let trace = progress_trace(alg, gamma, alpha, f, tracked)?;
    Ok(DecompositionCheck::from_trace(&trace, step))
}
