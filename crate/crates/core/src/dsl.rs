//! Line-oriented text format for scenarios (`.ksl` files).
//!
//! One declaration per line, `#` starts a comment, the first declaration is
//! the header. Parsing is total: any input yields either a validated
//! [`Scenario`] or a list of positioned diagnostics, never a panic, and all
//! recoverable problems in a file are reported in one pass.
//!
//! [`serialize`] writes the canonical form: header, state, observables in
//! registry order, contexts, constraints, queries, one per line. Tolerance,
//! correlation functionals, and the state-independence flag have no text
//! syntax; parsed scenarios get the defaults, and serializing drops them,
//! which keeps serialize -> parse -> serialize byte-stable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lhv::Constraint;
use crate::matrix::{Complex, ComplexMatrix, StateVector};
use crate::pauli::PauliString;
use crate::quantum::{Context, Event, Observable, ObservableKind, Outcome, Registry};
use crate::scenario::{Query, Scenario, DEFAULT_TOLERANCE, MAX_SCENARIO_DIM, MIN_SCENARIO_DIM};

/// Canonical file extension for scenario files.
pub const FILE_EXTENSION: &str = "ksl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// One problem found in a source file. `line` and `column` are 1-based and
/// count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

/// Result of a parse: the scenario if no error-severity diagnostic occurred,
/// plus every diagnostic (warnings included) sorted by source position.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub scenario: Option<Scenario>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseOutcome {
    pub fn is_success(&self) -> bool {
        self.scenario.is_some()
    }
}

/// Parse, discarding warnings: the scenario, or the full diagnostic list.
pub fn parse_strict(source: &str) -> std::result::Result<Scenario, Vec<ParseDiagnostic>> {
    let outcome = parse(source);
    match outcome.scenario {
        Some(scenario) => Ok(scenario),
        None => Err(outcome.diagnostics),
    }
}

/// Parse a scenario file. Never panics; collects all recoverable problems.
pub fn parse(source: &str) -> ParseOutcome {
    let mut raw = RawFile::default();
    let mut diags = Vec::new();
    let mut before_header_reported = false;

    for (idx, full_line) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(full_line.strip_suffix('\r').unwrap_or(full_line));
        if line.trim().is_empty() {
            continue;
        }
        let mut cursor = Cursor::new(line, line_no);
        if raw.header.is_none() && !before_header_reported {
            // Peek the keyword without committing the cursor.
            let mut probe = cursor.clone();
            if let Ok(word) = probe.ident() {
                if word != "scenario" {
                    diags.push(error_at(
                        line_no,
                        1,
                        "expected the scenario header before other declarations",
                    ));
                    before_header_reported = true;
                }
            }
        }
        if let Err(d) = parse_line(&mut cursor, &mut raw) {
            diags.push(d);
        }
    }

    let scenario = assemble(raw, &mut diags);
    diags.sort_by_key(|d| (d.line, d.column));
    let scenario = if diags.iter().any(|d| d.severity == Severity::Error) {
        None
    } else {
        scenario
    };
    ParseOutcome {
        scenario,
        diagnostics: diags,
    }
}

/// Write the canonical text form. Fails with [`Error::NotRepresentable`] if
/// the scenario uses complex amplitudes or matrix entries, which have no
/// numeric syntax in the format.
pub fn serialize(scenario: &Scenario) -> Result<String> {
    scenario.validate()?;
    let mut out = String::new();
    out.push_str(&format!("scenario \"{}\" dim {}\n", scenario.name, scenario.dim));

    let mut state_name = String::from("psi");
    while scenario.observables.contains(&state_name) {
        state_name.push('_');
    }
    out.push_str(&format!(
        "state {} = [{}]\n",
        state_name,
        real_entries(scenario.state.entries(), "state amplitude")?.join(", ")
    ));

    for obs in scenario.observables.iter() {
        match obs.kind() {
            ObservableKind::Projector(ray) => {
                out.push_str(&format!(
                    "proj {} = [{}]\n",
                    obs.id(),
                    real_entries(ray.entries(), "projector amplitude")?.join(", ")
                ));
            }
            ObservableKind::Pauli(string) => {
                out.push_str(&format!("pauli {} = {}\n", obs.id(), string));
            }
            ObservableKind::Involution(matrix) => {
                let mut cells = Vec::with_capacity(matrix.dim() * matrix.dim());
                for row in 0..matrix.dim() {
                    for col in 0..matrix.dim() {
                        cells.push(real_cell(matrix.get(row, col), "matrix entry")?);
                    }
                }
                out.push_str(&format!("obs {} = [{}]\n", obs.id(), cells.join(", ")));
            }
        }
    }

    for context in &scenario.contexts {
        let ids: Vec<&str> = context.members().iter().map(String::as_str).collect();
        out.push_str(&format!("context ({})\n", ids.join(", ")));
    }
    for constraint in &scenario.constraints {
        out.push_str(&constraint.render());
        out.push('\n');
    }
    for query in &scenario.queries {
        out.push_str(&query.render());
        out.push('\n');
    }
    Ok(out)
}

fn real_entries(entries: &[Complex], what: &str) -> Result<Vec<String>> {
    entries.iter().map(|c| real_cell(*c, what)).collect()
}

fn real_cell(c: Complex, what: &str) -> Result<String> {
    if c.im != 0.0 {
        return Err(Error::NotRepresentable(format!(
            "{what} {c} has a nonzero imaginary part"
        )));
    }
    Ok(format!("{}", c.re))
}

/// Cut a `#` comment, ignoring `#` inside the header's quoted name.
fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (idx, ch) in line.char_indices() {
        match ch {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..idx],
            _ => {}
        }
    }
    line
}

fn error_at(line: usize, column: usize, message: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic {
        severity: Severity::Error,
        message: message.into(),
        line,
        column,
    }
}

fn warning_at(line: usize, column: usize, message: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic {
        severity: Severity::Warning,
        message: message.into(),
        line,
        column,
    }
}

fn core_error_at(line: usize, column: usize, err: &Error) -> ParseDiagnostic {
    error_at(line, column, err.to_string())
}

// ---------------------------------------------------------------------------
// Raw declarations: the purely syntactic phase fills these in, the semantic
// phase turns them into a Scenario.

#[derive(Default)]
struct RawFile {
    header: Option<(String, u64, usize)>,
    // True once a `state` keyword is seen, even if the rest of that line fails
    // to parse; suppresses the redundant missing-state diagnostic.
    state_attempted: bool,
    states: Vec<(Vec<f64>, usize, usize)>,
    observables: Vec<RawObs>,
    contexts: Vec<(Vec<String>, usize, usize)>,
    constraints: Vec<(RawConstraint, usize, usize)>,
    queries: Vec<(RawQuery, usize, usize)>,
}

struct RawObs {
    id: String,
    kind: RawKind,
    line: usize,
    col: usize,
}

enum RawKind {
    Proj(Vec<f64>),
    Pauli(PauliString),
    Matrix(Vec<f64>),
}

enum RawConstraint {
    Partition(Vec<Vec<(String, Outcome)>>),
    Product(Vec<String>, Outcome),
}

enum RawQuery {
    Event(Vec<(String, Outcome)>),
    Product(Vec<String>),
}

type LineResult<T> = std::result::Result<T, ParseDiagnostic>;

fn parse_line(cursor: &mut Cursor, raw: &mut RawFile) -> LineResult<()> {
    let keyword_col = cursor.peek_col();
    let keyword = cursor.ident().map_err(|mut d| {
        d.message = "expected a declaration keyword".to_string();
        d
    })?;
    match keyword.as_str() {
        "scenario" => {
            let name = cursor.string_literal()?;
            cursor.expect_keyword("dim")?;
            let dim = cursor.unsigned_integer()?;
            cursor.finish()?;
            if raw.header.is_some() {
                return Err(error_at(
                    cursor.line_no,
                    keyword_col,
                    "scenario header already declared",
                ));
            }
            raw.header = Some((name, dim, cursor.line_no));
        }
        "state" => {
            raw.state_attempted = true;
            let _name_col = cursor.peek_col();
            let _ident = cursor.ident()?;
            cursor.expect('=')?;
            let entries = cursor.vector()?;
            cursor.finish()?;
            raw.states.push((entries, cursor.line_no, keyword_col));
        }
        "proj" => {
            let (id, col) = cursor.named_decl()?;
            let entries = cursor.vector()?;
            cursor.finish()?;
            raw.observables.push(RawObs {
                id,
                kind: RawKind::Proj(entries),
                line: cursor.line_no,
                col,
            });
        }
        "pauli" => {
            let (id, col) = cursor.named_decl()?;
            let word = cursor.pauli_word()?;
            cursor.finish()?;
            raw.observables.push(RawObs {
                id,
                kind: RawKind::Pauli(word),
                line: cursor.line_no,
                col,
            });
        }
        "obs" => {
            let (id, col) = cursor.named_decl()?;
            let entries = cursor.vector()?;
            cursor.finish()?;
            raw.observables.push(RawObs {
                id,
                kind: RawKind::Matrix(entries),
                line: cursor.line_no,
                col,
            });
        }
        "context" => {
            let ids = cursor.id_list()?;
            cursor.finish()?;
            raw.contexts.push((ids, cursor.line_no, keyword_col));
        }
        "partition" => {
            let mut events = vec![cursor.event()?];
            loop {
                cursor.skip_ws();
                match cursor.peek() {
                    Some('+') => {
                        cursor.bump();
                        events.push(cursor.event()?);
                    }
                    _ => break,
                }
            }
            cursor.expect('=')?;
            let target = cursor.outcome()?;
            cursor.finish()?;
            if target != 1 {
                return Err(error_at(
                    cursor.line_no,
                    keyword_col,
                    "a partition must sum to 1",
                ));
            }
            raw.constraints.push((
                RawConstraint::Partition(events),
                cursor.line_no,
                keyword_col,
            ));
        }
        "product" => {
            let ids = cursor.id_list()?;
            cursor.expect('=')?;
            let col = cursor.peek_col();
            let target = cursor.outcome()?;
            cursor.finish()?;
            if target != 1 && target != -1 {
                return Err(error_at(
                    cursor.line_no,
                    col,
                    "a product target must be 1 or -1",
                ));
            }
            raw.constraints.push((
                RawConstraint::Product(ids, target),
                cursor.line_no,
                keyword_col,
            ));
        }
        "query" => {
            let mut probe = cursor.clone();
            let head = probe.ident()?;
            let query = if head == "product" {
                *cursor = probe;
                RawQuery::Product(cursor.id_list()?)
            } else {
                RawQuery::Event(cursor.event()?)
            };
            cursor.finish()?;
            raw.queries.push((query, cursor.line_no, keyword_col));
        }
        other => {
            return Err(error_at(
                cursor.line_no,
                keyword_col,
                format!("unknown declaration `{other}`"),
            ));
        }
    }
    Ok(())
}

/// Build the scenario from raw declarations, pushing semantic diagnostics.
fn assemble(raw: RawFile, diags: &mut Vec<ParseDiagnostic>) -> Option<Scenario> {
    let (name, dim_raw, header_line) = match raw.header {
        Some(h) => h,
        None => {
            diags.push(error_at(1, 1, "missing scenario header"));
            return None;
        }
    };
    if dim_raw < MIN_SCENARIO_DIM as u64 || dim_raw > MAX_SCENARIO_DIM as u64 {
        diags.push(error_at(
            header_line,
            1,
            format!("dimension must be between {MIN_SCENARIO_DIM} and {MAX_SCENARIO_DIM}"),
        ));
        return None;
    }
    let dim = dim_raw as usize;

    let mut taken = BTreeSet::new();
    let state = match raw.states.as_slice() {
        [] => {
            if !raw.state_attempted {
                diags.push(error_at(header_line, 1, "missing state declaration"));
            }
            None
        }
        [(entries, line, col), extras @ ..] => {
            for (_, extra_line, extra_col) in extras {
                diags.push(error_at(*extra_line, *extra_col, "state already declared"));
            }
            build_state(entries, dim, *line, *col, diags)
        }
    };

    let mut observables = Registry::new();
    for decl in &raw.observables {
        if !taken.insert(decl.id.clone()) {
            diags.push(error_at(
                decl.line,
                decl.col,
                format!("duplicate identifier `{}`", decl.id),
            ));
            continue;
        }
        match build_observable(decl, dim) {
            Ok(obs) => {
                if let Err(e) = observables.insert(obs) {
                    diags.push(core_error_at(decl.line, decl.col, &e));
                }
            }
            Err(d) => diags.push(d),
        }
    }

    let mut contexts = Vec::new();
    let mut seen_contexts: BTreeSet<Vec<String>> = BTreeSet::new();
    for (ids, line, col) in &raw.contexts {
        match Context::new(ids.iter().cloned(), &observables, DEFAULT_TOLERANCE) {
            Ok(ctx) => {
                let key: Vec<String> = ctx.members().iter().cloned().collect();
                if !seen_contexts.insert(key) {
                    diags.push(warning_at(
                        *line,
                        *col,
                        "context repeats an earlier declaration",
                    ));
                }
                contexts.push(ctx);
            }
            Err(Error::IncompatibleEvent { a, b }) => diags.push(error_at(
                *line,
                *col,
                format!("context not mutually compatible: `{a}` and `{b}` do not commute"),
            )),
            Err(e) => diags.push(core_error_at(*line, *col, &e)),
        }
    }

    let table = crate::lhv::VariableTable::from_registry(&observables);
    let mut constraints = Vec::new();
    for (decl, line, col) in &raw.constraints {
        let built = match decl {
            RawConstraint::Partition(events) => events
                .iter()
                .map(|pairs| Event::new(pairs.iter().cloned()))
                .collect::<Result<Vec<_>>>()
                .map(|events| Constraint::PartitionUnity { events }),
            RawConstraint::Product(ids, target) => Ok(Constraint::ProductEquals {
                ids: ids.clone(),
                target: *target,
            }),
        };
        match built.and_then(|c| c.validate(&table).map(|()| c)) {
            Ok(c) => constraints.push(c),
            Err(e) => diags.push(core_error_at(*line, *col, &e)),
        }
    }

    let mut queries = Vec::new();
    for (decl, line, col) in &raw.queries {
        let built = match decl {
            RawQuery::Event(pairs) => Event::new(pairs.iter().cloned()).and_then(|event| {
                event.validate(&observables)?;
                Ok(Query::Event { event })
            }),
            RawQuery::Product(ids) => ids
                .iter()
                .try_for_each(|id| {
                    let obs = observables.get(id)?;
                    if !obs.is_dichotomic() {
                        return Err(Error::NotDichotomic { id: id.clone() });
                    }
                    Ok(())
                })
                .map(|()| Query::Product { ids: ids.clone() }),
        };
        match built {
            Ok(q) => queries.push(q),
            Err(e) => diags.push(core_error_at(*line, *col, &e)),
        }
    }

    let scenario = Scenario {
        name,
        dim,
        state: state?,
        observables,
        contexts,
        constraints,
        queries,
        functional: None,
        tolerance: DEFAULT_TOLERANCE,
        state_independent: false,
    };
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return None;
    }
    // Belt over the per-declaration checks: the assembled scenario must pass
    // the same validation the rest of the library relies on.
    if let Err(e) = scenario.validate() {
        diags.push(core_error_at(header_line, 1, &e));
        return None;
    }
    Some(scenario)
}

fn build_state(
    entries: &[f64],
    dim: usize,
    line: usize,
    col: usize,
    diags: &mut Vec<ParseDiagnostic>,
) -> Option<StateVector> {
    if entries.len() != dim {
        diags.push(error_at(
            line,
            col,
            format!("expected {dim} amplitudes, got {}", entries.len()),
        ));
        return None;
    }
    match StateVector::from_reals(entries) {
        Ok(v) => Some(v),
        Err(e) => {
            diags.push(core_error_at(line, col, &e));
            None
        }
    }
}

fn build_observable(decl: &RawObs, dim: usize) -> LineResult<Observable> {
    let fail = |e: &Error| core_error_at(decl.line, decl.col, e);
    match &decl.kind {
        RawKind::Proj(entries) => {
            if entries.len() != dim {
                return Err(error_at(
                    decl.line,
                    decl.col,
                    format!("expected {dim} amplitudes, got {}", entries.len()),
                ));
            }
            let ray = StateVector::from_reals(entries).map_err(|e| fail(&e))?;
            Observable::projector(&decl.id, ray).map_err(|e| fail(&e))
        }
        RawKind::Pauli(word) => {
            if !dim.is_power_of_two() {
                return Err(error_at(
                    decl.line,
                    decl.col,
                    format!("pauli observables need a power-of-two dimension, not {dim}"),
                ));
            }
            let qubits = dim.trailing_zeros() as usize;
            if word.letters().len() != qubits {
                return Err(error_at(
                    decl.line,
                    decl.col,
                    format!(
                        "pauli word has {} letters, dimension {dim} needs {qubits}",
                        word.letters().len()
                    ),
                ));
            }
            Observable::pauli(&decl.id, word.clone()).map_err(|e| fail(&e))
        }
        RawKind::Matrix(entries) => {
            if entries.len() != dim * dim {
                return Err(error_at(
                    decl.line,
                    decl.col,
                    format!(
                        "expected {} row-major entries, got {}",
                        dim * dim,
                        entries.len()
                    ),
                ));
            }
            let matrix = ComplexMatrix::from_fn(dim, |r, c| Complex::new(entries[r * dim + c], 0.0))
                .map_err(|e| fail(&e))?;
            Observable::involution(&decl.id, matrix).map_err(|e| fail(&e))
        }
    }
}

// ---------------------------------------------------------------------------
// Character-level scanning over one comment-stripped line.

#[derive(Clone)]
struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
}

impl Cursor {
    fn new(line: &str, line_no: usize) -> Self {
        Self {
            chars: line.chars().collect(),
            pos: 0,
            line_no,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    /// Column of the next significant character.
    fn peek_col(&mut self) -> usize {
        self.skip_ws();
        self.col()
    }

    fn fail(&self, message: impl Into<String>) -> ParseDiagnostic {
        error_at(self.line_no, self.col().min(self.chars.len() + 1), message)
    }

    fn expect(&mut self, wanted: char) -> LineResult<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == wanted => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.fail(format!("expected `{wanted}`, found `{c}`"))),
            None => Err(self.fail(format!("expected `{wanted}`"))),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> LineResult<()> {
        self.skip_ws();
        let col = self.col();
        let word = self.ident()?;
        if word == keyword {
            Ok(())
        } else {
            Err(error_at(
                self.line_no,
                col,
                format!("expected `{keyword}`, found `{word}`"),
            ))
        }
    }

    fn finish(&mut self) -> LineResult<()> {
        self.skip_ws();
        if self.pos < self.chars.len() {
            Err(self.fail("unexpected trailing text"))
        } else {
            Ok(())
        }
    }

    fn ident(&mut self) -> LineResult<String> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.fail("expected an identifier")),
        }
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                out.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    /// `IDENT "="` prefix shared by proj/pauli/obs declarations.
    fn named_decl(&mut self) -> LineResult<(String, usize)> {
        let col = self.peek_col();
        let id = self.ident()?;
        self.expect('=')?;
        Ok((id, col))
    }

    fn string_literal(&mut self) -> LineResult<String> {
        self.skip_ws();
        if self.peek() != Some('"') {
            return Err(self.fail("expected a quoted name"));
        }
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some(c) => out.push(c),
                None => return Err(self.fail("unterminated quoted name")),
            }
        }
    }

    fn unsigned_integer(&mut self) -> LineResult<u64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("expected an integer"));
        }
        let span: String = self.chars[start..self.pos].iter().collect();
        u64::from_str(&span)
            .map_err(|_| error_at(self.line_no, start + 1, format!("integer `{span}` is too large")))
    }

    /// A signed small integer, used for outcomes and product targets.
    fn outcome(&mut self) -> LineResult<Outcome> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let span: String = self.chars[start..self.pos].iter().collect();
        let digits = span.trim_start_matches(['+', '-']);
        if digits.is_empty() {
            return Err(error_at(self.line_no, start + 1, "expected an outcome"));
        }
        Outcome::from_str(&span)
            .map_err(|_| error_at(self.line_no, start + 1, format!("outcome `{span}` is out of range")))
    }

    /// Grammar `num`: optional sign, a scalar, optionally divided by a scalar.
    fn number(&mut self) -> LineResult<f64> {
        self.skip_ws();
        let mut sign = 1.0;
        if matches!(self.peek(), Some('+' | '-')) {
            if self.bump() == Some('-') {
                sign = -1.0;
            }
        }
        let mut value = self.scalar()?;
        self.skip_ws();
        if self.peek() == Some('/') {
            self.pos += 1;
            let denom_col = self.peek_col();
            let denom = self.scalar()?;
            if denom == 0.0 {
                return Err(error_at(self.line_no, denom_col, "division by zero"));
            }
            value /= denom;
        }
        Ok(sign * value)
    }

    /// An unsigned scalar: a numeric literal or `sqrt(x)`, `cos(x)`, `sin(x)`.
    fn scalar(&mut self) -> LineResult<f64> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number_literal(),
            Some(c) if c.is_ascii_alphabetic() => {
                let col = self.col();
                let name = self.ident()?;
                if !matches!(name.as_str(), "sqrt" | "cos" | "sin") {
                    return Err(error_at(
                        self.line_no,
                        col,
                        format!("unknown function `{name}`"),
                    ));
                }
                self.expect('(')?;
                self.skip_ws();
                let mut sign = 1.0;
                if matches!(self.peek(), Some('+' | '-')) {
                    if self.bump() == Some('-') {
                        sign = -1.0;
                    }
                }
                let arg_col = self.peek_col();
                let arg = sign * self.number_literal()?;
                self.expect(')')?;
                match name.as_str() {
                    "sqrt" => {
                        if arg < 0.0 {
                            Err(error_at(self.line_no, arg_col, "sqrt of a negative number"))
                        } else {
                            Ok(arg.sqrt())
                        }
                    }
                    "cos" => Ok(arg.cos()),
                    _ => Ok(arg.sin()),
                }
            }
            _ => Err(self.fail("expected a number")),
        }
    }

    /// `digits [. digits] [e [sign] digits]`; a lone malformed exponent is
    /// left unconsumed rather than guessed at.
    fn number_literal(&mut self) -> LineResult<f64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some('.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let mantissa: String = self.chars[start..self.pos].iter().collect();
        if !mantissa.chars().any(|c| c.is_ascii_digit()) {
            return Err(error_at(self.line_no, start + 1, "expected a number"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == digits_start {
                self.pos = save;
            }
        }
        let span: String = self.chars[start..self.pos].iter().collect();
        f64::from_str(&span)
            .map_err(|_| error_at(self.line_no, start + 1, format!("malformed number `{span}`")))
    }

    /// `[ num, num, ... ]` with at least one entry.
    fn vector(&mut self) -> LineResult<Vec<f64>> {
        self.expect('[')?;
        let mut out = vec![self.number()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    out.push(self.number()?);
                }
                Some(']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(c) => return Err(self.fail(format!("expected `,` or `]`, found `{c}`"))),
                None => return Err(self.fail("unclosed `[`")),
            }
        }
    }

    /// `( IDENT, IDENT, ... )` with at least one entry.
    fn id_list(&mut self) -> LineResult<Vec<String>> {
        self.expect('(')?;
        let mut out = vec![self.ident()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    out.push(self.ident()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(c) => return Err(self.fail(format!("expected `,` or `)`, found `{c}`"))),
                None => return Err(self.fail("unclosed `(`")),
            }
        }
    }

    /// `P ( IDENT = OUTCOME, ... )`.
    fn event(&mut self) -> LineResult<Vec<(String, Outcome)>> {
        self.skip_ws();
        let col = self.col();
        let head = self.ident()?;
        if head != "P" {
            return Err(error_at(
                self.line_no,
                col,
                format!("expected an event `P(...)`, found `{head}`"),
            ));
        }
        self.expect('(')?;
        let mut out = Vec::new();
        loop {
            let id = self.ident()?;
            self.expect('=')?;
            let outcome = self.outcome()?;
            out.push((id, outcome));
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(c) => return Err(self.fail(format!("expected `,` or `)`, found `{c}`"))),
                None => return Err(self.fail("unclosed `(`")),
            }
        }
    }

    /// Optional sign then a word of Pauli letters, e.g. `-XXX`.
    fn pauli_word(&mut self) -> LineResult<PauliString> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let span: String = self.chars[start..self.pos].iter().collect();
        if span.trim_start_matches(['+', '-']).is_empty() {
            return Err(error_at(self.line_no, start + 1, "expected a Pauli word"));
        }
        PauliString::from_word(&span)
            .map_err(|e| error_at(self.line_no, start + 1, e.to_string()))
    }
}
