//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;

use qadv_core::adversary::{self, AmplitudeVector, Convention, WeightMatrix};
use qadv_core::bits::BitString;
use qadv_core::critical::{structure, CriticalConfig};
use qadv_core::formula::{normalize, parse, NormalizedFormula};
use qadv_core::readonce::{
    certify, construct_alpha_with, foc_residual, principal_eigen_oracle, CertifyOptions,
};
use qadv_core::simulator::zoo::{
    default_grover_iterations, grover_or, identity, xor2, xor2_testbed, xor_eval,
};
use qadv_core::simulator::{
    error_probability, overlap_check, progress_trace, run_tracked, QueryAlgorithm,
};

use crate::report::{
    trace_report, AlgorithmReport, EigenReport, OverlapReport, PairReport, Report, TypeReport,
};
use crate::{Builtin, CliError, Command};

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Critical { formula, counts, max_critical } => {
            critical_cmd(formula, *counts, *max_critical)
        }
        Command::Bound { formula, epsilon, gamma, alpha, max_critical } => {
            bound_cmd(formula, *epsilon, gamma.as_deref(), alpha.as_deref(), *max_critical)
        }
        Command::VerifyFoc { formula, foc_tol, eigen_tol, entry_tol, max_critical } => {
            verify_foc_cmd(formula, *foc_tol, *eigen_tol, *entry_tol, *max_critical, true)
        }
        Command::OracleCheck { formula, eigen_tol, entry_tol, max_critical } => {
            verify_foc_cmd(formula, f64::INFINITY, *eigen_tol, *entry_tol, *max_critical, false)
        }
        Command::Simulate { builtin, n, iters, formula, epsilon, all_inputs, max_critical } => {
            simulate_cmd(*builtin, *n, *iters, formula.as_deref(), *epsilon, *all_inputs, *max_critical)
        }
    }
}

fn ingest(report: &mut Report, text: &str) -> Result<NormalizedFormula, CliError> {
    let norm = normalize(&parse(text)?);
    report.formula = Some(norm.tree.to_string());
    report.n = Some(norm.n);
    if norm.var_map.iter().any(|(orig, new)| orig != new) {
        report.var_map = Some(norm.var_map.iter().map(|(&o, &n)| [o, n]).collect());
    }
    if !norm.negations.is_empty() {
        report.negations = Some(norm.negations.iter().copied().collect());
    }
    Ok(norm)
}

fn critical_cmd(formula: &str, counts: bool, max_critical: usize) -> Result<Report, CliError> {
    let mut report = Report::new("critical");
    let norm = ingest(&mut report, formula)?;
    let config = CriticalConfig { max_critical };
    let (cs, rel) = structure(&norm.tree, &config)?;
    report.x_count = Some(cs.zeros.len());
    report.y_count = Some(cs.ones.len());
    report.r_count = Some(rel.pairs.len());
    report.connected = Some(rel.is_connected());
    if !counts {
        report.x = Some(cs.zeros.iter().map(|w| w.to_string()).collect());
        report.y = Some(cs.ones.iter().map(|w| w.to_string()).collect());
        report.r = Some(
            rel.pairs
                .iter()
                .map(|((x, y), flip)| PairReport {
                    x: x.to_string(),
                    y: y.to_string(),
                    flip: *flip,
                })
                .collect(),
        );
        report.types = Some(
            cs.types
                .iter()
                .map(|(w, child)| TypeReport { input: w.to_string(), child: *child })
                .collect(),
        );
    }
    Ok(report)
}

fn bound_cmd(
    formula: &str,
    epsilon: f64,
    gamma_path: Option<&Path>,
    alpha_path: Option<&Path>,
    max_critical: usize,
) -> Result<Report, CliError> {
    let mut report = Report::new("bound");
    let norm = ingest(&mut report, formula)?;
    match (gamma_path, alpha_path) {
        (Some(gamma_path), Some(alpha_path)) => {
            let gamma = load_gamma(gamma_path)?;
            let alpha = load_alpha(alpha_path)?;
            if !gamma.is_empty() && gamma.n() != norm.n {
                return Err(CliError::Usage(format!(
                    "weight file uses {}-bit inputs but the formula reads {} variables",
                    gamma.n(),
                    norm.n
                )));
            }
            let b = adversary::bound(&gamma, &alpha, norm.tree.evaluator(), epsilon)?;
            report.with_bound(&b);
        }
        _ => {
            let options = CertifyOptions {
                critical: CriticalConfig { max_critical },
                ..CertifyOptions::default()
            };
            let cert = certify(&norm.tree, epsilon, &options)?;
            report.with_certificate(&cert);
        }
    }
    Ok(report)
}

fn verify_foc_cmd(
    formula: &str,
    foc_tol: f64,
    eigen_tol: f64,
    entry_tol: f64,
    max_critical: usize,
    full: bool,
) -> Result<Report, CliError> {
    let mut report = Report::new(if full { "verify-foc" } else { "oracle-check" });
    let norm = ingest(&mut report, formula)?;
    let config = CriticalConfig { max_critical };
    let (cs, rel) = structure(&norm.tree, &config)?;
    let assignment = construct_alpha_with(&norm.tree, &config)?;
    let eigen = principal_eigen_oracle(&rel)?;
    let connected = rel.is_connected();

    let n = assignment.n() as f64;
    let expected_c = 1.0 / n.sqrt();
    let lambda_expected = n.sqrt();
    let vector_deviation = connected.then(|| {
        assignment
            .alpha()
            .iter()
            .map(|(w, &a)| (eigen.vector.get(w).copied().unwrap_or(0.0) - a).abs())
            .fold(0.0, f64::max)
    });
    let eigen_agrees = match vector_deviation {
        Some(dev) => (eigen.lambda - lambda_expected).abs() <= eigen_tol && dev <= entry_tol,
        None => eigen.lambda >= lambda_expected - eigen_tol,
    };

    report.x_count = Some(cs.zeros.len());
    report.y_count = Some(cs.ones.len());
    report.r_count = Some(rel.pairs.len());
    report.c = Some(assignment.c());
    report.expected_c = Some(expected_c);
    report.connected = Some(connected);
    report.eigen = Some(EigenReport {
        lambda: eigen.lambda,
        expected: lambda_expected,
        vector_deviation,
        agrees: eigen_agrees,
    });
    report.assertions_passed = eigen_agrees;

    if full {
        let residual = foc_residual(&assignment, &rel);
        report.foc_residual = Some(residual);
        report.zero_mass = Some(assignment.zero_mass());
        report.one_mass = Some(assignment.one_mass());
        report.assertions_passed &= residual <= foc_tol
            && (assignment.c() - expected_c).abs() <= 1e-12
            && (assignment.zero_mass() - 0.5).abs() <= 1e-12
            && (assignment.one_mass() - 0.5).abs() <= 1e-12;
    }
    Ok(report)
}

struct SimulationSetup {
    alg: QueryAlgorithm,
    gamma: WeightMatrix,
    alpha: AmplitudeVector,
    f: Box<dyn Fn(BitString) -> bool>,
    tracked: Vec<BitString>,
    iterations: Option<usize>,
}

fn simulate_cmd(
    builtin: Builtin,
    n: Option<u32>,
    iters: Option<usize>,
    formula: Option<&str>,
    epsilon: f64,
    all_inputs: bool,
    max_critical: usize,
) -> Result<Report, CliError> {
    let mut report = Report::new("simulate");
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CliError::Core(qadv_core::Error::BadEpsilon { epsilon }));
    }
    let setup = match builtin {
        Builtin::Xor2 => {
            if n.is_some_and(|n| n != 2) {
                return Err(CliError::Usage("xor2 runs on exactly 2 bits".into()));
            }
            if iters.is_some() {
                return Err(CliError::Usage("xor2 takes no --iters".into()));
            }
            if formula.is_some() {
                return Err(CliError::Usage(
                    "xor2 uses its built-in testbed; --formula is not applicable".into(),
                ));
            }
            report.formula = Some("x1 ^ x2".into());
            report.n = Some(2);
            let (gamma, alpha, tracked) = xor2_testbed();
            SimulationSetup {
                alg: xor2(),
                gamma,
                alpha,
                f: Box::new(xor_eval),
                tracked,
                iterations: None,
            }
        }
        Builtin::GroverOr | Builtin::Identity => {
            let n = n.ok_or_else(|| {
                CliError::Usage(format!("--n is required for {}", builtin.name()))
            })?;
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let text = formula.map(str::to_owned).unwrap_or_else(|| {
                (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" | ")
            });
            let norm = ingest(&mut report, &text)?;
            if norm.n != n {
                return Err(CliError::Usage(format!(
                    "--formula reads {} variables but --n is {n}",
                    norm.n
                )));
            }
            let config = CriticalConfig { max_critical };
            let (cs, rel) = structure(&norm.tree, &config)?;
            let gamma = WeightMatrix::from_relation(&rel);
            let alpha = construct_alpha_with(&norm.tree, &config)?.amplitudes();
            let tracked: Vec<BitString> = if all_inputs {
                if n > 8 {
                    return Err(CliError::Usage("--all-inputs is capped at n = 8".into()));
                }
                BitString::all(n).collect()
            } else {
                cs.zeros.iter().chain(cs.ones.iter()).copied().collect()
            };
            let tree = norm.tree;
            let (alg, iterations) = match builtin {
                Builtin::GroverOr => {
                    let k = iters.unwrap_or_else(|| default_grover_iterations(n));
                    (grover_or(n, k)?, Some(k))
                }
                Builtin::Identity => {
                    let k = iters.unwrap_or(0);
                    (identity(n, k), Some(k))
                }
                Builtin::Xor2 => unreachable!(),
            };
            SimulationSetup {
                alg,
                gamma,
                alpha,
                f: Box::new(move |w| tree.evaluate(w).expect("tracked inputs have length n")),
                tracked,
                iterations,
            }
        }
    };

    report.algorithm = Some(AlgorithmReport {
        builtin: builtin.name().to_string(),
        n: setup.alg.n(),
        iterations: setup.iterations,
        queries: setup.alg.queries(),
        workspace_dim: setup.alg.dim(),
    });

    let trace = progress_trace(&setup.alg, &setup.gamma, &setup.alpha, &setup.f, &setup.tracked)?;
    let measured = error_probability(&setup.alg, &setup.f, &setup.tracked)?;
    let trajectories = run_tracked(&setup.alg, &setup.tracked)?;
    let finals: Vec<_> = trajectories.iter().map(|t| t.final_state().clone()).collect();
    let at_measured = overlap_check(&finals, &setup.tracked, &setup.f, measured);
    let at_requested = overlap_check(&finals, &setup.tracked, &setup.f, epsilon);

    let trace_out = trace_report(&trace);
    let steps_ok = trace_out
        .steps
        .iter()
        .all(|s| s.decrement_ok && s.decomposition_ok);
    // the separation and overlap propositions only bind below error 1/2
    let s0 = trace.s[0];
    let st = *trace.s.last().unwrap();
    let separation_ok = if measured < 0.5 {
        s0 - st >= s0 * (1.0 - 2.0 * (measured * (1.0 - measured)).sqrt()) - 1e-8
    } else {
        true
    };
    let overlap_ok = if measured < 0.5 { at_measured.pass } else { true };

    report.epsilon = Some(epsilon);
    report.nu = Some(trace.nu);
    report.measured_error = Some(measured);
    report.overlap_at_measured_error = Some(OverlapReport::from(&at_measured));
    report.overlap_at_requested_epsilon = Some(OverlapReport::from(&at_requested));
    report.trace = Some(trace_out);
    report.assertions_passed = steps_ok && separation_ok && overlap_ok;
    Ok(report)
}

fn read_data_lines(path: &Path) -> Result<Vec<(String, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(key), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::Io(format!(
                "{}:{}: expected `key value`, found {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        let value: f64 = value.parse().map_err(|_| {
            CliError::Io(format!("{}:{}: bad number {value:?}", path.display(), lineno + 1))
        })?;
        rows.push((key.to_string(), value));
    }
    Ok(rows)
}

/// `zero_bits,one_bits weight` per line; read one-sided.
fn load_gamma(path: &Path) -> Result<WeightMatrix, CliError> {
    let mut entries = BTreeMap::new();
    for (key, value) in read_data_lines(path)? {
        let Some((x, y)) = key.split_once(',') else {
            return Err(CliError::Io(format!(
                "{}: expected `bits,bits weight`, found {key:?}",
                path.display()
            )));
        };
        let x: BitString = x.parse()?;
        let y: BitString = y.parse()?;
        entries.insert((x, y), value);
    }
    Ok(WeightMatrix::new(entries, Convention::OneSided)?)
}

/// `bits value` per line; must form a unit vector.
fn load_alpha(path: &Path) -> Result<AmplitudeVector, CliError> {
    let mut entries = BTreeMap::new();
    for (key, value) in read_data_lines(path)? {
        entries.insert(key.parse::<BitString>()?, value);
    }
    Ok(AmplitudeVector::new(entries)?)
}
