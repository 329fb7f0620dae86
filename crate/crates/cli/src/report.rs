//! Report document shape and the two output renderers.
//!
//! The JSON form is the contract: schema_version gates breaking changes and
//! `schema/report.schema.json` at the workspace root describes it. The text
//! form is a pure projection of the same document, so the two formats can
//! never disagree on facts; it truncates only the witness listing and always
//! prints the full count.

use bellks_core::analysis::{
    AnalysisReport, ClassicalVerdict, ConstraintStatus, QuantumVerdict,
};
use serde::Serialize;

/// Bumped on any breaking change to the JSON report layout.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Witness events printed before the text renderer truncates the list.
pub const WITNESS_LISTING_LIMIT: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct Generator {
    pub name: String,
    pub version: String,
}

impl Generator {
    pub fn this_tool() -> Self {
        Self {
            name: "bellks".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Where the analyzed scenario came from.
#[derive(Debug, Clone, Serialize)]
pub struct InputProvenance {
    /// `builtin` or `file`.
    pub kind: String,
    /// Builtin name or file stem.
    pub name: String,
    /// Path as given on the command line; absent for builtins.
    pub path: Option<String>,
    /// SHA-256 of the raw input file bytes; absent for builtins.
    pub sha256: Option<String>,
}

impl InputProvenance {
    pub fn builtin(name: &str) -> Self {
        Self {
            kind: "builtin".to_string(),
            name: name.to_string(),
            path: None,
            sha256: None,
        }
    }

    pub fn file(name: &str, path: &str, sha256: String) -> Self {
        Self {
            kind: "file".to_string(),
            name: name.to_string(),
            path: Some(path.to_string()),
            sha256: Some(sha256),
        }
    }
}

/// Everything one `check` invocation knows, in stable key order.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub generator: Generator,
    pub input: InputProvenance,
    pub report: AnalysisReport,
}

impl ReportDocument {
    pub fn new(input: InputProvenance, report: AnalysisReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            generator: Generator::this_tool(),
            input,
            report,
        }
    }
}

/// Pretty JSON with a trailing newline. Struct fields serialize in
/// declaration order and all maps are ordered, so equal documents give
/// byte-identical output.
pub fn render_json(doc: &ReportDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report document serializes");
    text.push('\n');
    text
}

/// Formats a float exactly as the JSON renderer would, so the two formats
/// agree digit for digit.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn classical_text(v: &ClassicalVerdict) -> String {
    match v {
        ClassicalVerdict::Possible => "possible".to_string(),
        ClassicalVerdict::Impossible => "impossible".to_string(),
        ClassicalVerdict::ImpliedProduct { value } => format!("implied product {value:+}"),
        ClassicalVerdict::Unconstrained => "unconstrained".to_string(),
    }
}

fn quantum_text(v: &QuantumVerdict) -> String {
    match v {
        QuantumVerdict::Probability { value } => format!("probability {}", num(*value)),
        QuantumVerdict::Scalar { value } => format!("operator scalar {}", num(*value)),
        QuantumVerdict::NotScalar => "product is not a scalar".to_string(),
        QuantumVerdict::Incompatible { a, b } => {
            format!("incompatible (`{a}` and `{b}` do not commute)")
        }
    }
}

fn constraint_text(s: &ConstraintStatus) -> String {
    match s {
        ConstraintStatus::Verified { value, holds } => format!(
            "evaluates to {} ({})",
            num(*value),
            if *holds { "holds" } else { "violated" }
        ),
        ConstraintStatus::NotScalar => "product is not a scalar multiple of the identity".to_string(),
        ConstraintStatus::ClassicalOnly { a, b } => {
            format!("untestable: `{a}` and `{b}` do not commute")
        }
    }
}

/// Human-readable projection of the document.
pub fn render_text(doc: &ReportDocument) -> String {
    let r = &doc.report;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };

    line(format!("scenario {} (dim {})", r.scenario, r.dim));
    line(format!("input: {} {}", doc.input.kind, doc.input.name));
    if let Some(sha) = &doc.input.sha256 {
        line(format!("input sha256: {sha}"));
    }
    line(format!(
        "tool: {} {} (report schema {})",
        doc.generator.name, doc.generator.version, doc.schema_version
    ));
    line(format!("tolerance: {}", num(r.tolerance)));
    line(format!(
        "state independent: {}",
        if r.state_independent { "yes" } else { "no" }
    ));
    line(format!(
        "all observables commuting: {}",
        if r.all_commuting { "yes" } else { "no" }
    ));

    line(format!("\nconstraints ({}):", r.constraint_checks.len()));
    for check in &r.constraint_checks {
        line(format!("  {}", check.constraint));
        line(format!("    quantum: {}", constraint_text(&check.quantum)));
    }

    line(format!(
        "\nclassical model: {} of {} assignments satisfy the constraints ({})",
        r.classical.support_size,
        r.classical.total_assignments,
        if r.classical.satisfiable {
            "satisfiable"
        } else {
            "unsatisfiable"
        }
    ));

    line(format!("\nqueries ({}):", r.query_verdicts.len()));
    for v in &r.query_verdicts {
        line(format!("  {}", v.query));
        line(format!("    classical: {}", classical_text(&v.classical)));
        line(format!("    quantum: {}", quantum_text(&v.quantum)));
    }

    line(format!("\ncontradictions ({}):", r.contradictions.len()));
    for c in &r.contradictions {
        line(format!(
            "  {}: classical {} vs quantum {}",
            c.query,
            classical_text(&c.classical),
            quantum_text(&c.quantum)
        ));
    }

    line(format!(
        "\nwitnesses: {} forbidden events over incompatible observables (arity <= {})",
        r.witnesses.count, r.witnesses.arity_cap
    ));
    for event in r.witnesses.events.iter().take(WITNESS_LISTING_LIMIT) {
        line(format!("  {}", event.render()));
    }
    if r.witnesses.events.len() > WITNESS_LISTING_LIMIT {
        line(format!(
            "  ({} more not shown)",
            r.witnesses.events.len() - WITNESS_LISTING_LIMIT
        ));
    }

    if let Some(f) = &r.functional {
        line(format!("\nfunctional: {}", f.functional));
        match f.classical_bounds {
            Some([lo, hi]) => line(format!("  classical bounds: [{}, {}]", num(lo), num(hi))),
            None => line("  classical bounds: undefined (empty support)".to_string()),
        }
        match f.quantum_value {
            Some(v) => line(format!("  quantum value: {}", num(v))),
            None => line("  quantum value: undefined (incompatible term)".to_string()),
        }
        line(format!(
            "  violates classical bounds: {}",
            if f.violates_classical_bounds {
                "yes"
            } else {
                "no"
            }
        ));
    }

    out
}
