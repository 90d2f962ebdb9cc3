//! Machine-readable reports. One struct serves every subcommand; fields a
//! command does not compute are omitted from the JSON. Key order is fixed
//! by declaration order and all collections are sorted, so identical
//! invocations serialize byte-identically.

use serde::Serialize;

use qadv_core::adversary::BoundReport;
use qadv_core::readonce::Certificate;
use qadv_core::simulator::{DecompositionCheck, OverlapVerdict, ProgressTrace};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Default)]
pub struct Report {
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Original variable index -> normalized index, for remapped formulas.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_map: Option<Vec<[u32; 2]>>,
    /// Normalized indices whose leaf was negated in the input text.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negations: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<PairReport>>,
    /// Child index of the root decomposition per typed critical input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub types: Option<Vec<TypeReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub foc_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof_traced_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen: Option<EigenReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<AlgorithmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_at_measured_error: Option<OverlapReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_at_requested_epsilon: Option<OverlapReport>,
    pub assertions_passed: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            version: REPORT_VERSION.to_string(),
            command: command.to_string(),
            assertions_passed: true,
            ..Report::default()
        }
    }

    pub fn with_bound(&mut self, b: &BoundReport) {
        self.nu = Some(b.nu);
        self.epsilon = Some(b.epsilon);
        self.kappa = Some(b.kappa);
        self.objective = Some(b.objective);
        self.theorem_bound = Some(b.theorem_bound);
        self.proof_traced_bound = Some(b.proof_traced_bound);
    }

    pub fn with_certificate(&mut self, cert: &Certificate) {
        self.n = Some(cert.n);
        self.x_count = Some(cert.x_count);
        self.y_count = Some(cert.y_count);
        self.r_count = Some(cert.r_count);
        self.c = Some(cert.c);
        self.expected_c = Some(cert.expected_c);
        self.foc_residual = Some(cert.foc_residual);
        self.zero_mass = Some(cert.zero_mass);
        self.one_mass = Some(cert.one_mass);
        self.connected = Some(cert.connected);
        self.eigen = cert.eigen.map(|e| EigenReport {
            lambda: e.lambda,
            expected: e.lambda_expected,
            vector_deviation: e.vector_deviation,
            agrees: e.agrees,
        });
        self.with_bound(&cert.report);
        self.assertions_passed &= cert.passed;
    }
}

#[derive(Serialize)]
pub struct PairReport {
    pub x: String,
    pub y: String,
    pub flip: u32,
}

#[derive(Serialize)]
pub struct TypeReport {
    pub input: String,
    pub child: usize,
}

#[derive(Serialize)]
pub struct EigenReport {
    pub lambda: f64,
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector_deviation: Option<f64>,
    pub agrees: bool,
}

#[derive(Serialize)]
pub struct AlgorithmReport {
    pub builtin: String,
    pub n: u32,
    pub iterations: Option<usize>,
    pub queries: usize,
    pub workspace_dim: usize,
}

#[derive(Serialize)]
pub struct TraceReport {
    pub tracked: Vec<String>,
    pub s: Vec<f64>,
    pub nu: f64,
    pub decrement_bound: f64,
    pub steps: Vec<StepReport>,
    pub gram: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
pub struct StepReport {
    pub step: usize,
    pub s_before: f64,
    pub s_after: f64,
    pub decrement: f64,
    pub decrement_bound: f64,
    pub decrement_ok: bool,
    pub pre_query_sum: f64,
    pub post_query_sum: f64,
    pub sqrt_nu: f64,
    pub decomposition_ok: bool,
}

#[derive(Serialize)]
pub struct OverlapReport {
    pub epsilon: f64,
    pub threshold: f64,
    pub max_cross_overlap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<[String; 2]>,
    pub pass: bool,
}

impl From<&OverlapVerdict> for OverlapReport {
    fn from(v: &OverlapVerdict) -> Self {
        OverlapReport {
            epsilon: v.epsilon,
            threshold: v.threshold,
            max_cross_overlap: v.max_cross_overlap,
            worst_pair: v.worst_pair.map(|(a, b)| [a.to_string(), b.to_string()]),
            pass: v.pass,
        }
    }
}

pub fn trace_report(trace: &ProgressTrace) -> TraceReport {
    let steps = (1..=trace.queries())
        .map(|step| {
            let check = DecompositionCheck::from_trace(trace, step);
            StepReport {
                step,
                s_before: trace.s[step - 1],
                s_after: trace.s[step],
                decrement: trace.decrements[step - 1],
                decrement_bound: trace.decrement_bound(),
                decrement_ok: trace.decrements[step - 1]
                    <= trace.decrement_bound() + qadv_core::simulator::CHECK_TOLERANCE,
                pre_query_sum: check.pre_query_sum,
                post_query_sum: check.post_query_sum,
                sqrt_nu: check.sqrt_nu,
                decomposition_ok: check.ok,
            }
        })
        .collect();
    TraceReport {
        tracked: trace.tracked.iter().map(|w| w.to_string()).collect(),
        s: trace.s.clone(),
        nu: trace.nu,
        decrement_bound: trace.decrement_bound(),
        steps,
        gram: trace
            .gram
            .iter()
            .map(|g| (0..g.nrows()).map(|r| g.row(r).iter().copied().collect()).collect())
            .collect(),
    }
}

/// Human summary of the fields a report carries.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let mut row = |k: &str, v: String| {
        out.push_str(&format!("{k:<24} {v}\n"));
    };
    row("command", report.command.clone());
    if let Some(f) = &report.formula {
        row("formula", f.clone());
    }
    if let Some(n) = report.n {
        row("n", n.to_string());
    }
    if let (Some(x), Some(y), Some(r)) = (report.x_count, report.y_count, report.r_count) {
        row("|X| |Y| |R|", format!("{x} {y} {r}"));
    }
    if let Some(c) = report.c {
        row("C", format!("{c:.12}"));
    }
    if let Some(v) = report.foc_residual {
        row("FOC residual", format!("{v:.3e}"));
    }
    if let (Some(z), Some(o)) = (report.zero_mass, report.one_mass) {
        row("mass (zeros, ones)", format!("{z:.12} {o:.12}"));
    }
    if let Some(v) = report.nu {
        row("nu", format!("{v}"));
    }
    if let Some(v) = report.objective {
        row("objective", format!("{v:.12}"));
    }
    if let (Some(e), Some(k)) = (report.epsilon, report.kappa) {
        row("epsilon / kappa", format!("{e} {k:.12}"));
    }
    if let Some(v) = report.theorem_bound {
        row("theorem bound", format!("{v:.12}"));
    }
    if let Some(v) = report.proof_traced_bound {
        row("proof-traced bound", format!("{v:.12}"));
    }
    if let Some(eig) = &report.eigen {
        row(
            "eigen (lambda, expect)",
            format!("{:.12} {:.12} agrees={}", eig.lambda, eig.expected, eig.agrees),
        );
    }
    if let Some(v) = report.connected {
        row("connected", v.to_string());
    }
    if let Some(alg) = &report.algorithm {
        row(
            "algorithm",
            format!("{} n={} queries={}", alg.builtin, alg.n, alg.queries),
        );
    }
    if let Some(v) = report.measured_error {
        row("measured error", format!("{v:.3e}"));
    }
    if let Some(trace) = &report.trace {
        row("S", trace.s.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>().join(" "));
        for step in &trace.steps {
            row(
                &format!("step {}", step.step),
                format!(
                    "decrement {:.6} <= {:.6} ({}), decomposition {:.6}/{:.6} <= {:.6} ({})",
                    step.decrement,
                    step.decrement_bound,
                    if step.decrement_ok { "ok" } else { "VIOLATED" },
                    step.pre_query_sum,
                    step.post_query_sum,
                    step.sqrt_nu,
                    if step.decomposition_ok { "ok" } else { "VIOLATED" },
                ),
            );
        }
    }
    if let Some(o) = &report.overlap_at_measured_error {
        row(
            "overlap @ measured",
            format!("{:.6} <= {:.6} ({})", o.max_cross_overlap, o.threshold, o.pass),
        );
    }
    row("assertions", if report.assertions_passed { "passed".into() } else { "FAILED".into() });
    out
}
