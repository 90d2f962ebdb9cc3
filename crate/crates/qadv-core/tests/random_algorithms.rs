//! The per-query decrement and decomposition bounds hold for *every*
//! algorithm, not just sensible ones. This sweep builds haphazard unitaries
//! from a seeded generator and checks the inequalities against both the
//! read-once 0/1 relation and dense random weight matrices, where `nu` is
//! far from 1.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use qadv_core::adversary::{AmplitudeVector, Convention, WeightMatrix};
use qadv_core::bits::BitString;
use qadv_core::critical::{structure, CriticalConfig};
use qadv_core::formula::{normalize, parse};
use qadv_core::readonce::construct_alpha;
use qadv_core::simulator::{progress_trace, DecompositionCheck, QueryAlgorithm};

struct Xorshift(u64);

impl Xorshift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    /// Uniform-ish in [-1, 1).
    fn signed(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    fn complex(&mut self) -> Complex64 {
        Complex64::new(self.signed(), self.signed())
    }
}

/// Unitary from modified Gram-Schmidt on a random complex matrix.
fn random_unitary(dim: usize, rng: &mut Xorshift) -> DMatrix<Complex64> {
    loop {
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.complex());
        let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for c in 0..dim {
            let mut v: DVector<Complex64> = raw.column(c).into();
            for u in &columns {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
            let norm = v.norm();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            columns.push(v / Complex64::new(norm, 0.0));
        }
        if ok {
            return DMatrix::from_columns(&columns);
        }
    }
}

fn random_algorithm(n: u32, aux_dim: usize, steps: usize, rng: &mut Xorshift) -> QueryAlgorithm {
    let dim = (n as usize + 1) * aux_dim;
    let unitaries = (0..steps).map(|_| random_unitary(dim, rng)).collect();
    // measure an arbitrary basis split
    let cut = dim / 2;
    let p1 = DMatrix::<Complex64>::from_fn(dim, dim, |r, c| {
        Complex64::new(f64::from(r == c && r < cut), 0.0)
    });
    let p0 = DMatrix::<Complex64>::identity(dim, dim) - &p1;
    QueryAlgorithm::new(n, aux_dim, unitaries, p0, p1).expect("Gram-Schmidt output is unitary")
}

#[test]
fn read_once_inequalities_survive_arbitrary_unitaries() {
    let tree = normalize(&parse("x1 | x2 | x3").unwrap()).tree;
    let (cs, rel) = structure(&tree, &CriticalConfig::default()).unwrap();
    let gamma = WeightMatrix::from_relation(&rel);
    let alpha = construct_alpha(&tree).unwrap().amplitudes();
    let tracked: Vec<BitString> = cs.zeros.iter().chain(cs.ones.iter()).copied().collect();
    let f = tree.evaluator();

    for seed in [3u64, 17, 2026, 987_654_321] {
        let mut rng = Xorshift(seed);
        let alg = random_algorithm(3, 2, 4, &mut rng);
        let trace = progress_trace(&alg, &gamma, &alpha, &f, &tracked).unwrap();
        let ceiling = 2.0 * trace.nu.sqrt() + 1e-9;
        for step in 1..=trace.queries() {
            let check = DecompositionCheck::from_trace(&trace, step);
            assert!(check.ok, "seed {seed} step {step}: {check:?}");
            assert!(
                trace.decrements[step - 1] <= ceiling,
                "seed {seed} step {step}: decrement {} over {ceiling}",
                trace.decrements[step - 1]
            );
        }
    }
}

#[test]
fn weighted_gamma_inequalities_survive_arbitrary_unitaries() {
    // dense random weights on all cross-value pairs of OR_3, so nu != 1
    let n = 3u32;
    let or3 = |w: BitString| (1..=n).any(|i| w.get(i));
    let all: Vec<BitString> = BitString::all(n).collect();

    for seed in [5u64, 99, 4242] {
        let mut rng = Xorshift(seed);
        let mut entries = BTreeMap::new();
        for &x in all.iter().filter(|&&w| !or3(w)) {
            for &y in all.iter().filter(|&&w| or3(w)) {
                entries.insert((x, y), rng.signed().abs() * 2.0);
            }
        }
        let gamma = WeightMatrix::new(entries, Convention::OneSided).unwrap();
        gamma.validate_support(or3).unwrap();
        let nu = gamma.nu_stats(or3).nu;
        assert!(nu > 1.0, "dense weights should push nu above 1, got {nu}");

        let raw: Vec<f64> = (0..all.len()).map(|_| rng.signed().abs() + 0.01).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = AmplitudeVector::new(
            all.iter().zip(&raw).map(|(&w, &v)| (w, v / norm)).collect(),
        )
        .unwrap();

        let alg = random_algorithm(n, 3, 3, &mut rng);
        let trace = progress_trace(&alg, &gamma, &alpha, or3, &all).unwrap();
        assert_eq!(trace.nu, nu);
        let ceiling = 2.0 * nu.sqrt() + 1e-9;
        for step in 1..=trace.queries() {
            let check = DecompositionCheck::from_trace(&trace, step);
            assert!(check.ok, "seed {seed} step {step}: {check:?}");
            assert!(trace.decrements[step - 1] <= ceiling);
        }
        // S_0 is the symmetric bilinear form: twice the one-sided objective
        assert!((trace.s[0] - 2.0 * gamma.objective(&alpha)).abs() <= 1e-12);
    }
}
