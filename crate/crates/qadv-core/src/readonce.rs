//! The optimal amplitude vector for read-once formulas.
//!
//! [`construct_alpha`] builds, by structural recursion, a nonnegative unit
//! vector over the critical inputs satisfying the first-order optimality
//! conditions
//!
//! ```text
//! alpha_w = C * sum over neighbors v of w of alpha_v,    C = 1/sqrt(n).
//! ```
//!
//! A single leaf gets `alpha_0 = alpha_1 = 1/sqrt(2)` with `C = 1`. At an
//! AND node the weight of a critical one is proportional to the product of
//! its blocks' child weights, and a critical zero of type `i` additionally
//! picks up `C/C_i` on the zero block; the overall scale is fixed by unit
//! normalization. An OR node swaps the roles of zeros and ones. The constant
//! obeys `1/C^2 = sum_i 1/C_i^2`, which telescopes to `C = 1/sqrt(n)`.
//!
//! The FOCs say `alpha` is an eigenvector of the neighbor-graph adjacency
//! with eigenvalue `1/C`, so [`principal_eigen_oracle`] recomputes the
//! dominant eigenpair by power iteration and [`certify`] compares the two
//! routes. The oracle shares no code with the recursion.

use std::collections::BTreeMap;

use crate::adversary::{self, AmplitudeVector, BoundReport, WeightMatrix};
use crate::bits::BitString;
use crate::critical::{structure, CriticalConfig, NeighborRelation};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::formula::{FormulaTree, Gate};
use crate::numeric::kahan_sum;

/// Amplitudes over the critical inputs plus the Lagrange constant.
#[derive(Clone, Debug)]
pub struct AmplitudeAssignment {
    alpha: BTreeMap<BitString, f64>,
    c: f64,
    n: u32,
    zero_mass: f64,
    one_mass: f64,
}

impl AmplitudeAssignment {
    pub fn alpha(&self) -> &BTreeMap<BitString, f64> {
        &self.alpha
    }

    pub fn get(&self, w: &BitString) -> f64 {
        self.alpha.get(w).copied().unwrap_or(0.0)
    }

    /// The Lagrange constant; `1/sqrt(n)` for every read-once formula.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Total squared weight on critical zeros (one half, by construction).
    pub fn zero_mass(&self) -> f64 {
        self.zero_mass
    }

    pub fn one_mass(&self) -> f64 {
        self.one_mass
    }

    pub fn amplitudes(&self) -> AmplitudeVector {
        AmplitudeVector::new(self.alpha.clone())
            .expect("constructed assignment is a nonnegative unit vector")
    }
}

/// Builds the FOC solution for a normalized tree with the default size cap.
pub fn construct_alpha(tree: &FormulaTree) -> Result<AmplitudeAssignment> {
    construct_alpha_with(tree, &CriticalConfig::default())
}

pub fn construct_alpha_with(
    tree: &FormulaTree,
    config: &CriticalConfig,
) -> Result<AmplitudeAssignment> {
    construct_alpha_mode(tree, config, true)
}

/// Sequential construction regardless of features; same output as
/// [`construct_alpha_with`].
pub fn construct_alpha_seq(
    tree: &FormulaTree,
    config: &CriticalConfig,
) -> Result<AmplitudeAssignment> {
    construct_alpha_mode(tree, config, false)
}

fn construct_alpha_mode(
    tree: &FormulaTree,
    config: &CriticalConfig,
    parallel: bool,
) -> Result<AmplitudeAssignment> {
    tree.check_normalized()?;
    let n = tree.leaf_count();
    if n > 64 {
        return Err(Error::TooManyVariables { n });
    }
    let (zeros_count, ones_count) = crate::critical::counts_for(tree);
    let needed = zeros_count.saturating_add(ones_count);
    if needed > config.max_critical as u128 {
        return Err(Error::SizeLimit { needed, cap: config.max_critical });
    }

    let mut node = build(tree, parallel);
    // one final global renormalization absorbs the residual rounding of the
    // per-level scalings
    let total = kahan_sum(
        node.zeros.iter().chain(node.ones.iter()).map(|(_, a)| a * a),
    );
    let scale = 1.0 / total.sqrt();
    for (_, a) in node.zeros.iter_mut().chain(node.ones.iter_mut()) {
        *a *= scale;
    }
    let zero_mass = kahan_sum(node.zeros.iter().map(|(_, a)| a * a));
    let one_mass = kahan_sum(node.ones.iter().map(|(_, a)| a * a));
    let alpha = node.zeros.into_iter().chain(node.ones).collect();
    Ok(AmplitudeAssignment {
        alpha,
        c: node.c,
        n: n as u32,
        zero_mass,
        one_mass,
    })
}

struct NodeAlpha {
    c: f64,
    zeros: Vec<(BitString, f64)>,
    ones: Vec<(BitString, f64)>,
}

fn build(tree: &FormulaTree, parallel: bool) -> NodeAlpha {
    match tree {
        FormulaTree::Leaf { .. } => {
            let half = std::f64::consts::FRAC_1_SQRT_2;
            NodeAlpha {
                c: 1.0,
                zeros: vec![(BitString::new(1, 0), half)],
                ones: vec![(BitString::new(1, 1), half)],
            }
        }
        FormulaTree::Node { gate, children } => {
            let sub: Vec<NodeAlpha> =
                map_indexed(children.len(), parallel, |i| build(&children[i], false));

            let c = 1.0 / sub.iter().map(|s| 1.0 / (s.c * s.c)).sum::<f64>().sqrt();

            let majority: Vec<&[(BitString, f64)]> = sub
                .iter()
                .map(|s| match gate {
                    Gate::And => s.ones.as_slice(),
                    Gate::Or => s.zeros.as_slice(),
                })
                .collect();
            let product_side = weighted_cartesian(&majority);

            // Typed side: the block of the minority child times C/C_i, the
            // remaining blocks from the majority lists.
            let group = |i: usize| -> Vec<(BitString, f64)> {
                let prefixes = weighted_cartesian(&majority[..i]);
                let suffixes = weighted_cartesian(&majority[i + 1..]);
                let minority = match gate {
                    Gate::And => &sub[i].zeros,
                    Gate::Or => &sub[i].ones,
                };
                let ratio = c / sub[i].c;
                let mut out =
                    Vec::with_capacity(prefixes.len() * minority.len() * suffixes.len());
                for (p, pw) in &prefixes {
                    for (m, mw) in minority {
                        for (s, sw) in &suffixes {
                            out.push((p.concat(m).concat(s), ratio * pw * mw * sw));
                        }
                    }
                }
                out
            };

            let groups: Vec<Vec<(BitString, f64)>> =
                map_indexed(children.len(), parallel, group);

            let mut typed_side: Vec<(BitString, f64)> = groups.into_iter().flatten().collect();
            typed_side.sort_unstable_by_key(|&(w, _)| w);

            // Unit normalization fixes the remaining overall constant.
            let norm_sq = kahan_sum(
                product_side.iter().chain(typed_side.iter()).map(|(_, a)| a * a),
            );
            let scale = 1.0 / norm_sq.sqrt();
            let mut product_side = product_side;
            for (_, a) in product_side.iter_mut().chain(typed_side.iter_mut()) {
                *a *= scale;
            }

            match gate {
                Gate::And => NodeAlpha { c, zeros: typed_side, ones: product_side },
                Gate::Or => NodeAlpha { c, zeros: product_side, ones: typed_side },
            }
        }
    }
}

fn weighted_cartesian(lists: &[&[(BitString, f64)]]) -> Vec<(BitString, f64)> {
    let mut out = vec![(BitString::zeros(0), 1.0)];
    for list in lists {
        out = out
            .iter()
            .flat_map(|(prefix, pw)| {
                list.iter().map(move |(block, bw)| (prefix.concat(block), pw * bw))
            })
            .collect();
    }
    out
}

/// Largest violation of the first-order conditions:
/// `max over w of |alpha_w - C * sum over neighbors of alpha|`.
pub fn foc_residual(assignment: &AmplitudeAssignment, rel: &NeighborRelation) -> f64 {
    let mut neighbor_sum: BTreeMap<BitString, f64> =
        assignment.alpha.keys().map(|&w| (w, 0.0)).collect();
    for (x, y) in rel.pairs.keys() {
        *neighbor_sum.entry(*x).or_insert(0.0) += assignment.get(y);
        *neighbor_sum.entry(*y).or_insert(0.0) += assignment.get(x);
    }
    neighbor_sum
        .iter()
        .map(|(w, s)| (assignment.get(w) - assignment.c * s).abs())
        .fold(0.0, f64::max)
}

/// Dominant eigenpair of the neighbor-graph adjacency.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: BTreeMap<BitString, f64>,
    pub iterations: usize,
}

/// Vertex cap for the spectral oracle.
pub const EIGEN_VERTEX_CAP: usize = 1 << 12;

const EIGEN_TOL: f64 = 1e-13;
const EIGEN_MAX_ITER: usize = 100_000;

/// Power iteration on the symmetrized adjacency of the relation, started
/// from the all-ones vector. Iterates on `A + I` so that bipartite spectra
/// (where `-lambda_max` is also an eigenvalue) cannot trap the iteration in
/// a two-cycle; the reported eigenvalue is for `A` itself.
pub fn principal_eigen_oracle(rel: &NeighborRelation) -> Result<EigenPair> {
    let vertices: Vec<BitString> = rel.vertices().into_iter().collect();
    if vertices.len() > EIGEN_VERTEX_CAP {
        return Err(Error::SizeLimit { needed: vertices.len() as u128, cap: EIGEN_VERTEX_CAP });
    }
    let index: BTreeMap<BitString, usize> =
        vertices.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertices.len()];
    for (x, y) in rel.pairs.keys() {
        let (ix, iy) = (index[x], index[y]);
        adjacency[ix].push((iy, 1.0));
        adjacency[iy].push((ix, 1.0));
    }
    let (lambda, vec, iterations) = power_iteration(&adjacency)?;
    Ok(EigenPair {
        lambda,
        vector: vertices.into_iter().zip(vec).collect(),
        iterations,
    })
}

/// Dominant eigenpair of an arbitrary weight matrix, read symmetrically.
pub fn dominant_eigenpair(gamma: &WeightMatrix) -> Result<(f64, BTreeMap<BitString, f64>)> {
    let sym = gamma.symmetrized();
    let mut vertices: Vec<BitString> = sym
        .entries()
        .keys()
        .flat_map(|&(x, y)| [x, y])
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    if vertices.len() > EIGEN_VERTEX_CAP {
        return Err(Error::SizeLimit { needed: vertices.len() as u128, cap: EIGEN_VERTEX_CAP });
    }
    let index: BTreeMap<BitString, usize> =
        vertices.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertices.len()];
    for (&(x, y), &w) in sym.entries() {
        if w != 0.0 {
            adjacency[index[&x]].push((index[&y], w));
        }
    }
    let (lambda, vec, _) = power_iteration(&adjacency)?;
    Ok((lambda, vertices.into_iter().zip(vec).collect()))
}

fn power_iteration(adjacency: &[Vec<(usize, f64)>]) -> Result<(f64, Vec<f64>, usize)> {
    let m = adjacency.len();
    if m == 0 {
        return Ok((0.0, Vec::new(), 0));
    }
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut previous = f64::NAN;
    for iter in 1..=EIGEN_MAX_ITER {
        let av: Vec<f64> = adjacency
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * v[j]).sum())
            .collect();
        let lambda: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        if (lambda - previous).abs() < EIGEN_TOL {
            return Ok((lambda, v, iter));
        }
        previous = lambda;
        // shifted step: w = (A + I) v
        let mut w: Vec<f64> = av.iter().zip(&v).map(|(a, b)| a + b).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok((0.0, v, iter));
        }
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
    }
    Err(Error::NonConvergence { iterations: EIGEN_MAX_ITER })
}

/// Tolerances for [`certify`].
#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub critical: CriticalConfig,
    /// Largest admissible FOC residual.
    pub foc_tolerance: f64,
    /// Admissible gap between the oracle eigenvalue and `1/C`.
    pub eigen_tolerance: f64,
    /// Admissible entrywise gap between the oracle eigenvector and `alpha`
    /// (checked only when the neighbor graph is connected).
    pub entry_tolerance: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            critical: CriticalConfig::default(),
            foc_tolerance: 1e-10,
            eigen_tolerance: 1e-8,
            entry_tolerance: 1e-6,
        }
    }
}

/// Outcome of the spectral-oracle comparison.
#[derive(Clone, Copy, Debug)]
pub struct EigenComparison {
    pub lambda: f64,
    pub lambda_expected: f64,
    /// Largest entrywise gap to the oracle eigenvector; only meaningful when
    /// the neighbor graph is connected.
    pub vector_deviation: Option<f64>,
    pub agrees: bool,
}

/// Everything [`certify`] measured, plus the pass/fail verdicts.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub n: u32,
    pub x_count: usize,
    pub y_count: usize,
    pub r_count: usize,
    pub c: f64,
    pub expected_c: f64,
    pub foc_residual: f64,
    pub zero_mass: f64,
    pub one_mass: f64,
    pub nu: f64,
    pub objective_expected: f64,
    pub connected: bool,
    /// Absent when the neighbor graph exceeds the oracle's vertex cap; the
    /// FOC residual still validates the eigen-equation in that regime.
    pub eigen: Option<EigenComparison>,
    pub report: BoundReport,
    pub assignment: AmplitudeAssignment,
    pub passed: bool,
}

/// Runs the whole certification pipeline on a normalized tree: construct
/// `alpha`, measure the FOC residual and mass split, evaluate the bound,
/// and compare against the spectral oracle.
pub fn certify(tree: &FormulaTree, epsilon: f64, options: &CertifyOptions) -> Result<Certificate> {
    let (cs, rel) = structure(tree, &options.critical)?;
    let assignment = construct_alpha_with(tree, &options.critical)?;
    let gamma = WeightMatrix::from_relation(&rel);
    let report = adversary::bound(&gamma, &assignment.amplitudes(), tree.evaluator(), epsilon)?;
    let residual = foc_residual(&assignment, &rel);
    let connected = rel.is_connected();

    let n = assignment.n();
    let expected_c = 1.0 / (n as f64).sqrt();
    let lambda_expected = (n as f64).sqrt();
    let objective_expected = lambda_expected / 2.0;

    let eigen = if cs.zeros.len() + cs.ones.len() <= EIGEN_VERTEX_CAP {
        let pair = principal_eigen_oracle(&rel)?;
        let vector_deviation = connected.then(|| {
            assignment
                .alpha
                .iter()
                .map(|(w, &a)| (pair.vector.get(w).copied().unwrap_or(0.0) - a).abs())
                .fold(0.0, f64::max)
        });
        let agrees = match vector_deviation {
            Some(dev) => {
                (pair.lambda - lambda_expected).abs() <= options.eigen_tolerance
                    && dev <= options.entry_tolerance
            }
            None => pair.lambda >= lambda_expected - options.eigen_tolerance,
        };
        Some(EigenComparison {
            lambda: pair.lambda,
            lambda_expected,
            vector_deviation,
            agrees,
        })
    } else {
        None
    };

    let passed = (assignment.c() - expected_c).abs() <= 1e-12
        && residual <= options.foc_tolerance
        && (assignment.zero_mass() - 0.5).abs() <= 1e-12
        && (assignment.one_mass() - 0.5).abs() <= 1e-12
        && report.nu == 1.0
        && (report.objective - objective_expected).abs() <= 1e-10
        && eigen.is_none_or(|e| e.agrees);

    Ok(Certificate {
        n,
        x_count: cs.zeros.len(),
        y_count: cs.ones.len(),
        r_count: rel.pairs.len(),
        c: assignment.c(),
        expected_c,
        foc_residual: residual,
        zero_mass: assignment.zero_mass(),
        one_mass: assignment.one_mass(),
        nu: report.nu,
        objective_expected,
        connected,
        eigen,
        report,
        assignment,
        passed,
    })
}
