//! Built-in query algorithms.
//!
//! `xor2` computes the parity of two bits exactly with one query: prepare
//! equal amplitude on query values 1 and 2, let the oracle imprint the two
//! phases, and measure with projectors onto the even/odd combinations.
//!
//! `grover_or` computes OR on `n` bits: a uniform superposition over query
//! values `1..=n`, `k` rounds of phase query plus diffusion, then one
//! verification query. Verification splits each candidate `|i>` against the
//! null query value 0 (remembering `i` in an auxiliary tag register), lets
//! the oracle phase the candidate half, and rotates the relative sign into
//! an answer qubit; everything ends parked on query value 0, so the trailing
//! oracle call of the last step acts as the identity. `P_1` projects the
//! answer qubit onto 1. At `n = 4` with `k = 1` the construction is exact.
//!
//! `identity` never touches the input: every unitary is the identity, all
//! amplitude stays on the null query value, and the output is always 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::adversary::{AmplitudeVector, Convention, WeightMatrix};
use crate::bits::BitString;
use crate::simulator::QueryAlgorithm;

use std::collections::BTreeMap;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Householder reflection sending basis vector `source` to the unit vector
/// `target` (both real).
fn reflection_to(dim: usize, source: usize, target: &DVector<f64>) -> DMatrix<Complex64> {
    let mut w = -target.clone();
    w[source] += 1.0;
    let norm_sq = w.norm_squared();
    let mut m = DMatrix::<Complex64>::identity(dim, dim);
    if norm_sq > 1e-30 {
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] -= real(2.0 * w[r] * w[c] / norm_sq);
            }
        }
    }
    m
}

/// Exact one-query parity of two bits.
pub fn xor2() -> QueryAlgorithm {
    let dim = 3; // query values 0, 1, 2; no auxiliary register
    let mut target = DVector::<f64>::zeros(dim);
    target[1] = std::f64::consts::FRAC_1_SQRT_2;
    target[2] = std::f64::consts::FRAC_1_SQRT_2;
    let prepare = reflection_to(dim, 0, &target);

    // P1 projects onto the odd combination (|1> - |2>)/sqrt(2)
    let mut p1 = DMatrix::<Complex64>::zeros(dim, dim);
    let odd = [0.0, std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2];
    for r in 0..dim {
        for c in 0..dim {
            p1[(r, c)] = real(odd[r] * odd[c]);
        }
    }
    let p0 = DMatrix::<Complex64>::identity(dim, dim) - &p1;

    QueryAlgorithm::new(2, 1, vec![prepare], p0, p1).expect("xor2 operators are unitary")
}

/// Parity of two bits, the function `xor2` computes.
pub fn xor_eval(w: BitString) -> bool {
    w.get(1) != w.get(2)
}

/// The weighted pair structure used to trace `xor2`: unit weights between
/// the even inputs `{00, 11}` and the odd inputs `{01, 10}`, uniform
/// amplitude over all four.
pub fn xor2_testbed() -> (WeightMatrix, AmplitudeVector, Vec<BitString>) {
    let parse = |s: &str| s.parse::<BitString>().unwrap();
    let evens = [parse("00"), parse("11")];
    let odds = [parse("01"), parse("10")];
    let mut entries = BTreeMap::new();
    for &x in &evens {
        for &y in &odds {
            entries.insert((x, y), 1.0);
        }
    }
    let gamma = WeightMatrix::new(entries, Convention::OneSided)
        .expect("testbed weights are nonnegative");
    let tracked = vec![parse("00"), parse("01"), parse("10"), parse("11")];
    let alpha = AmplitudeVector::uniform(tracked.iter().copied()).unwrap();
    (gamma, alpha, tracked)
}

/// Default Grover iteration count, `round(pi/4 * sqrt(n) - 1/2)`.
pub fn default_grover_iterations(n: u32) -> usize {
    let k = (std::f64::consts::FRAC_PI_4 * (n as f64).sqrt() - 0.5).round();
    k.max(0.0) as usize
}

/// Grover search for OR over `n` bits with `k` phase iterations and one
/// verification query. Runs `k + 2` oracle calls; the last is a null query
/// on parked amplitude. Fails when the workspace `2(n+1)^2` exceeds the
/// dimension cap.
pub fn grover_or(n: u32, iterations: usize) -> crate::error::Result<QueryAlgorithm> {
    assert!(n >= 1, "grover_or needs at least one variable");
    let aux_dim = 2 * (n as usize + 1); // tag register (0..=n) times answer qubit
    let dim = (n as usize + 1) * aux_dim;
    let idx = |query: usize, tag: usize, ans: usize| (query * aux_dim) + tag * 2 + ans;

    let mut uniform = DVector::<f64>::zeros(dim);
    for i in 1..=n as usize {
        uniform[idx(i, 0, 0)] = 1.0 / (n as f64).sqrt();
    }
    let prepare = reflection_to(dim, idx(0, 0, 0), &uniform);

    // (2|u><u| - I) on the query factor; the sign it puts on query value 0
    // is irrelevant because no amplitude sits there during the iterations
    let mut diffusion = DMatrix::<Complex64>::zeros(dim, dim);
    for z in 0..aux_dim {
        diffusion[(idx(0, 0, 0) + z, idx(0, 0, 0) + z)] = real(-1.0);
        for i in 1..=n as usize {
            for j in 1..=n as usize {
                let d = 2.0 / n as f64 - f64::from(i == j);
                diffusion[(i * aux_dim + z, j * aux_dim + z)] = real(d);
            }
        }
    }

    // Verification, first half: split each candidate |i, 0, a> against the
    // parked state |0, i, a> so the next oracle call phases only one branch.
    let inv_sqrt2 = real(std::f64::consts::FRAC_1_SQRT_2);
    let mut split = DMatrix::<Complex64>::identity(dim, dim);
    for i in 1..=n as usize {
        for ans in 0..2 {
            let p = idx(i, 0, ans);
            let q = idx(0, i, ans);
            split[(p, p)] = inv_sqrt2;
            split[(q, p)] = inv_sqrt2;
            split[(p, q)] = inv_sqrt2;
            split[(q, q)] = -inv_sqrt2;
        }
    }

    // Second half: rotate the relative sign into the answer qubit and park
    // everything on query value 0, keeping the tag for orthogonality.
    let mut merge = DMatrix::<Complex64>::identity(dim, dim);
    for i in 1..=n as usize {
        let p0 = idx(i, 0, 0);
        let q0 = idx(0, i, 0);
        let p1 = idx(i, 0, 1);
        let q1 = idx(0, i, 1);
        for col in [p0, q0, p1, q1] {
            merge[(col, col)] = real(0.0);
        }
        // (|i,0,0> + |0,i,0>)/sqrt(2) -> |0,i,0>  and the sign-flipped
        // combination -> |0,i,1>; the answer-1 pairs complete the unitary
        merge[(q0, p0)] = inv_sqrt2;
        merge[(q1, p0)] = inv_sqrt2;
        merge[(q0, q0)] = inv_sqrt2;
        merge[(q1, q0)] = -inv_sqrt2;
        merge[(p0, p1)] = inv_sqrt2;
        merge[(p1, p1)] = inv_sqrt2;
        merge[(p0, q1)] = inv_sqrt2;
        merge[(p1, q1)] = -inv_sqrt2;
    }

    let mut unitaries = Vec::with_capacity(iterations + 2);
    if iterations == 0 {
        unitaries.push(&split * &prepare);
    } else {
        unitaries.push(prepare);
        for _ in 1..iterations {
            unitaries.push(diffusion.clone());
        }
        unitaries.push(&split * &diffusion);
    }
    unitaries.push(merge);

    // P1 reads the answer qubit
    let p1 = DMatrix::<Complex64>::from_fn(dim, dim, |r, c| {
        real(f64::from(r == c && r % 2 == 1))
    });
    let p0 = DMatrix::<Complex64>::identity(dim, dim) - &p1;

    QueryAlgorithm::new(n, aux_dim, unitaries, p0, p1)
}

/// `steps` null queries that never leave the initial state; always answers 0.
pub fn identity(n: u32, steps: usize) -> QueryAlgorithm {
    let dim = n as usize + 1;
    let unitaries = vec![DMatrix::<Complex64>::identity(dim, dim); steps];
    let p0 = DMatrix::<Complex64>::identity(dim, dim);
    let p1 = DMatrix::<Complex64>::zeros(dim, dim);
    QueryAlgorithm::new(n, 1, unitaries, p0, p1).expect("identity operators are unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{error_probability, gram, overlap_check, run, run_tracked};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn xor2_is_exact_with_one_query() {
        let alg = xor2();
        assert_eq!(alg.queries(), 1);
        let inputs: Vec<BitString> = BitString::all(2).collect();
        let err = error_probability(&alg, xor_eval, &inputs).unwrap();
        assert!(err <= 1e-12, "xor2 error {err}");
    }

    #[test]
    fn xor2_final_cross_overlaps_vanish() {
        let alg = xor2();
        let inputs: Vec<BitString> = BitString::all(2).collect();
        let trajectories = run_tracked(&alg, &inputs).unwrap();
        let finals: Vec<_> = trajectories.iter().map(|t| t.final_state().clone()).collect();
        let g = gram(&finals);
        for a in 0..4 {
            for b in 0..4 {
                if xor_eval(inputs[a]) != xor_eval(inputs[b]) {
                    assert!(g[(a, b)] <= 1e-12);
                }
            }
        }
        let verdict = overlap_check(&finals, &inputs, xor_eval, 1e-6);
        assert!(verdict.pass);
    }

    #[test]
    fn grover_or_answers_exactly_at_n4() {
        let alg = grover_or(4, 1).unwrap();
        let or4 = |w: BitString| (1..=4).any(|i| w.get(i));
        let t = run(&alg, bs("1000")).unwrap();
        let p1 = alg.projector(true);
        let success = (p1 * t.final_state()).norm_squared();
        assert!((success - 1.0).abs() < 1e-10, "success probability {success}");

        let mut critical = vec![bs("0000")];
        critical.extend((1..=4).map(|i| bs("0000").flip(i)));
        let err = error_probability(&alg, or4, &critical).unwrap();
        assert!(err <= 1e-10, "grover error {err}");
    }

    #[test]
    fn grover_default_iterations() {
        assert_eq!(default_grover_iterations(1), 0);
        assert_eq!(default_grover_iterations(2), 1);
        assert_eq!(default_grover_iterations(4), 1);
        assert_eq!(default_grover_iterations(16), 3);
    }

    #[test]
    fn grover_query_count_is_iterations_plus_two() {
        assert_eq!(grover_or(4, 1).unwrap().queries(), 3);
        assert_eq!(grover_or(2, 1).unwrap().queries(), 3);
        assert_eq!(grover_or(4, 0).unwrap().queries(), 2);
        assert_eq!(grover_or(8, 2).unwrap().queries(), 4);
    }

    #[test]
    fn grover_one_variable_is_exact() {
        // k = 0: prepare, verify, park; two queries, exact readout of x1
        let alg = grover_or(1, 0).unwrap();
        let f = |w: BitString| w.get(1);
        let err = error_probability(&alg, f, &[bs("0"), bs("1")]).unwrap();
        assert!(err <= 1e-12);
    }

    #[test]
    fn identity_always_answers_zero() {
        let alg = identity(3, 2);
        assert_eq!(alg.queries(), 2);
        let or3 = |w: BitString| (1..=3).any(|i| w.get(i));
        let inputs: Vec<BitString> = BitString::all(3).collect();
        let err = error_probability(&alg, or3, &inputs).unwrap();
        assert_eq!(err, 1.0); // wrong with certainty on every one of OR
        let zero_only = [bs("000")];
        assert_eq!(error_probability(&alg, or3, &zero_only).unwrap(), 0.0);
    }
}
