//! Sweeps the progress-measure inequalities across the algorithm zoo:
//! final-overlap bound, total-decrease bound, per-query decrement bound,
//! and the query-value decomposition bound.

use nalgebra::linalg::SymmetricEigen;

use qadv_core::adversary::{AmplitudeVector, WeightMatrix};
use qadv_core::bits::BitString;
use qadv_core::critical::{structure, CriticalConfig};
use qadv_core::formula::{normalize, parse};
use qadv_core::readonce::construct_alpha;
use qadv_core::simulator::zoo::{grover_or, identity, xor2, xor2_testbed, xor_eval};
use qadv_core::simulator::{
    error_probability, gram_complex, overlap_check, progress_trace, run_tracked,
    DecompositionCheck, ProgressTrace, QueryAlgorithm,
};

struct Testbed {
    name: &'static str,
    alg: QueryAlgorithm,
    gamma: WeightMatrix,
    alpha: AmplitudeVector,
    f: Box<dyn Fn(BitString) -> bool>,
    tracked: Vec<BitString>,
}

fn or_testbed(name: &'static str, alg: QueryAlgorithm, n: u32) -> Testbed {
    let text = (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" | ");
    let tree = normalize(&parse(&text).unwrap()).tree;
    let (cs, rel) = structure(&tree, &CriticalConfig::default()).unwrap();
    let gamma = WeightMatrix::from_relation(&rel);
    let alpha = construct_alpha(&tree).unwrap().amplitudes();
    let tracked: Vec<BitString> = cs.zeros.iter().chain(cs.ones.iter()).copied().collect();
    Testbed {
        name,
        alg,
        gamma,
        alpha,
        f: Box::new(move |w| tree.eval_or_panic(w)),
        tracked,
    }
}

trait EvalOrPanic {
    fn eval_or_panic(&self, w: BitString) -> bool;
}

impl EvalOrPanic for qadv_core::formula::FormulaTree {
    fn eval_or_panic(&self, w: BitString) -> bool {
        self.evaluate(w).unwrap()
    }
}

fn zoo() -> Vec<Testbed> {
    let (xor_gamma, xor_alpha, xor_tracked) = xor2_testbed();
    vec![
        Testbed {
            name: "xor2",
            alg: xor2(),
            gamma: xor_gamma,
            alpha: xor_alpha,
            f: Box::new(xor_eval),
            tracked: xor_tracked,
        },
        or_testbed("grover-or n=2", grover_or(2, 1).unwrap(), 2),
        or_testbed("grover-or n=4", grover_or(4, 1).unwrap(), 4),
        or_testbed("identity n=4 t=0", identity(4, 0), 4),
        or_testbed("identity n=4 t=2", identity(4, 2), 4),
    ]
}

fn trace_of(bed: &Testbed) -> ProgressTrace {
    progress_trace(&bed.alg, &bed.gamma, &bed.alpha, &bed.f, &bed.tracked).unwrap()
}

#[test]
fn gram_matrices_are_positive_semidefinite() {
    for bed in zoo() {
        let trajectories = run_tracked(&bed.alg, &bed.tracked).unwrap();
        for l in 0..=bed.alg.queries() {
            let states: Vec<_> = trajectories.iter().map(|t| t.states[l].clone()).collect();
            let g = gram_complex(&states);
            let eigen = SymmetricEigen::new(g.clone());
            let min = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-9, "{}: min Gram eigenvalue {min} at step {l}", bed.name);
            for a in 0..states.len() {
                assert!((g[(a, a)].re - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn per_query_decrements_stay_below_twice_sqrt_nu() {
    for bed in zoo() {
        let trace = trace_of(&bed);
        let bound = trace.decrement_bound();
        for (l, d) in trace.decrements.iter().enumerate() {
            assert!(
                *d <= bound + 1e-9,
                "{}: decrement {d} at step {} exceeds {bound}",
                bed.name,
                l + 1
            );
        }
    }
}

#[test]
fn decomposition_sums_stay_below_sqrt_nu_and_explain_the_decrements() {
    for bed in zoo() {
        let trace = trace_of(&bed);
        for step in 1..=trace.queries() {
            let check = DecompositionCheck::from_trace(&trace, step);
            assert!(
                check.ok,
                "{}: decomposition check failed at step {step}: {check:?}",
                bed.name
            );
        }
    }
}

#[test]
fn total_decrease_covers_the_required_separation() {
    // S_0 - S_t >= S_0 * (1 - 2 sqrt(eps(1-eps))) for the measured error
    for bed in zoo() {
        let trace = trace_of(&bed);
        let eps = error_probability(&bed.alg, &bed.f, &bed.tracked).unwrap();
        if eps >= 0.5 {
            continue;
        }
        let s0 = trace.s[0];
        let st = *trace.s.last().unwrap();
        let required = s0 * (1.0 - 2.0 * (eps * (1.0 - eps)).sqrt());
        assert!(
            s0 - st >= required - 1e-8,
            "{}: S_0 - S_t = {} < required {required}",
            bed.name,
            s0 - st
        );
    }
}

#[test]
fn final_overlaps_obey_the_measured_error_bound() {
    for bed in zoo() {
        let eps = error_probability(&bed.alg, &bed.f, &bed.tracked).unwrap();
        if eps >= 0.5 {
            continue;
        }
        let trajectories = run_tracked(&bed.alg, &bed.tracked).unwrap();
        let finals: Vec<_> = trajectories.iter().map(|t| t.final_state().clone()).collect();
        let verdict = overlap_check(&finals, &bed.tracked, &bed.f, eps);
        assert!(verdict.pass, "{}: {verdict:?}", bed.name);
    }
}

#[test]
fn exact_algorithms_drive_the_progress_measure_to_zero() {
    for bed in zoo() {
        let eps = error_probability(&bed.alg, &bed.f, &bed.tracked).unwrap();
        if eps > 1e-12 {
            continue;
        }
        let trace = trace_of(&bed);
        let st = *trace.s.last().unwrap();
        assert!(st.abs() <= 1e-12, "{}: S_t = {st} despite exactness", bed.name);
    }
}

#[test]
fn progress_starts_at_twice_the_one_sided_objective() {
    for bed in zoo() {
        let trace = trace_of(&bed);
        let objective = bed.gamma.objective(&bed.alpha);
        assert!(
            (trace.s[0] - 2.0 * objective).abs() <= 1e-12,
            "{}: S_0 = {} but objective = {objective}",
            bed.name,
            trace.s[0]
        );
    }
}

#[test]
fn grover_first_preparation_round_saturates_the_decomposition() {
    // uniform amplitude over query values 1..n before the first oracle call
    let bed = or_testbed("grover-or n=4", grover_or(4, 1).unwrap(), 4);
    let trace = trace_of(&bed);
    let first = trace.pre_query_sums[0];
    assert!(first <= 1.0 + 1e-9, "pre-query sum {first} above sqrt(nu) = 1");
    assert!(first > 0.1, "uniform preparation should engage the real queries");
}

#[test]
fn identity_steps_contribute_nothing_to_the_decomposition() {
    let bed = or_testbed("identity n=4 t=2", identity(4, 2), 4);
    let trace = trace_of(&bed);
    for step in 1..=trace.queries() {
        assert_eq!(trace.pre_query_sums[step - 1], 0.0);
        assert_eq!(trace.decrements[step - 1], 0.0);
    }
}
