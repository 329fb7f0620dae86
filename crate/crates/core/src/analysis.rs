//! The verdict pipeline: quantum checks, classical model, contradictions,
//! and incompatibility witnesses.
//!
//! A *contradiction* is a query answered "impossible" (or "product is c")
//! classically while the quantum side assigns it positive probability (or a
//! different scalar). A *witness* is a classically-forbidden event whose
//! observables are mutually incompatible, so quantum mechanics can neither
//! confirm nor refute the prohibition. Scenarios whose observables all
//! commute admit a genuine joint distribution; for those the pipeline
//! cross-checks its marginals against direct computation and insists on zero
//! contradictions, failing internally otherwise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lhv::{build_model, functional_bounds, ClassicalModel, Constraint};
use crate::quantum::{
    commuting_classical_model, compatible, correlation, joint_probability,
    product_identity_scalar, Event, Observable, Registry,
};
use crate::scenario::{Query, Scenario};

/// Marginal agreement required between the commuting-family joint
/// distribution and direct projector computation.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Default largest event arity searched for witnesses.
pub const DEFAULT_WITNESS_ARITY_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Witness search covers forbidden events of arity 1..=cap.
    pub witness_arity_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            witness_arity_cap: DEFAULT_WITNESS_ARITY_CAP,
        }
    }
}

/// Quantum status of one constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConstraintStatus {
    /// Quantum-testable and evaluated: partition probability sum, or the
    /// scalar the operator product equals.
    Verified { value: f64, holds: bool },
    /// The operator product is not a real scalar multiple of the identity,
    /// so the parity target is not quantum-forced.
    NotScalar,
    /// Mentions an incompatible pair; quantum mechanics cannot test it.
    ClassicalOnly { a: String, b: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintCheck {
    pub constraint: String,
    pub quantum: ConstraintStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalSummary {
    pub total_assignments: u64,
    pub support_size: usize,
    pub satisfiable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassicalVerdict {
    Possible,
    Impossible,
    ImpliedProduct { value: i8 },
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QuantumVerdict {
    Probability { value: f64 },
    Scalar { value: f64 },
    NotScalar,
    /// No joint statistics exist; `a`, `b` are an offending pair.
    Incompatible { a: String, b: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryVerdict {
    pub query: String,
    pub classical: ClassicalVerdict,
    pub quantum: QuantumVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contradiction {
    pub query: String,
    pub classical: ClassicalVerdict,
    pub quantum: QuantumVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub arity_cap: usize,
    pub count: usize,
    /// Forbidden events over incompatible observable sets, arity ascending.
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub functional: String,
    /// Extreme values over the classical support; absent if the support is
    /// empty.
    pub classical_bounds: Option<[f64; 2]>,
    /// Sum of coefficient-weighted correlations; absent if some term pairs
    /// incompatible observables.
    pub quantum_value: Option<f64>,
    pub violates_classical_bounds: bool,
}

/// Machine-checkable verdict on a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub scenario: String,
    pub dim: usize,
    pub tolerance: f64,
    pub state_independent: bool,
    pub all_commuting: bool,
    pub constraint_checks: Vec<ConstraintCheck>,
    pub classical: ClassicalSummary,
    pub query_verdicts: Vec<QueryVerdict>,
    pub contradictions: Vec<Contradiction>,
    pub witnesses: WitnessReport,
    pub functional: Option<FunctionalReport>,
}

/// Pairwise-compatibility cache over the registry, keyed by id index.
struct CompatibilityMap {
    ids: Vec<String>,
    pairs: Vec<Vec<bool>>,
}

impl CompatibilityMap {
    fn build(registry: &Registry, tol: f64) -> Result<Self> {
        let ids = registry.sorted_ids();
        let n = ids.len();
        let mut pairs = vec![vec![true; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let ok = compatible(registry.get(&ids[i])?, registry.get(&ids[j])?, tol)?;
                pairs[i][j] = ok;
                pairs[j][i] = ok;
            }
        }
        Ok(Self { ids, pairs })
    }

    fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .binary_search_by(|x| x.as_str().cmp(id))
            .map_err(|_| Error::UnknownObservable { id: id.to_string() })
    }

    /// First incompatible pair among `ids` (in sorted order), if any.
    fn first_incompatible(&self, ids: &[&str]) -> Result<Option<(String, String)>> {
        let mut indices: Vec<usize> = ids
            .iter()
            .map(|id| self.index_of(id))
            .collect::<Result<_>>()?;
        indices.sort_unstable();
        for (k, &i) in indices.iter().enumerate() {
            for &j in &indices[k + 1..] {
                if !self.pairs[i][j] {
                    return Ok(Some((self.ids[i].clone(), self.ids[j].clone())));
                }
            }
        }
        Ok(None)
    }

    fn all_commuting(&self) -> bool {
        self.pairs
            .iter()
            .enumerate()
            .all(|(i, row)| row[i + 1..].iter().all(|&ok| ok))
    }
}

fn check_constraint(
    scenario: &Scenario,
    constraint: &Constraint,
    compat: &CompatibilityMap,
) -> Result<ConstraintCheck> {
    let quantum = match constraint {
        Constraint::PartitionUnity { events } => {
            let mut status = None;
            for event in events {
                let ids: Vec<&str> = event.ids().collect();
                if let Some((a, b)) = compat.first_incompatible(&ids)? {
                    status = Some(ConstraintStatus::ClassicalOnly { a, b });
                    break;
                }
            }
            match status {
                Some(s) => s,
                None => {
                    let mut sum = 0.0;
                    for event in events {
                        sum += joint_probability(
                            &scenario.state,
                            event,
                            &scenario.observables,
                            scenario.tolerance,
                        )?;
                    }
                    ConstraintStatus::Verified {
                        value: sum,
                        holds: (sum - 1.0).abs() <= scenario.tolerance,
                    }
                }
            }
        }
        Constraint::ProductEquals { ids, target } => {
            let borrowed: Vec<&str> = ids.iter().map(String::as_str).collect();
            if let Some((a, b)) = compat.first_incompatible(&borrowed)? {
                ConstraintStatus::ClassicalOnly { a, b }
            } else {
                let obs: Vec<&Observable> = ids
                    .iter()
                    .map(|id| scenario.observables.get(id))
                    .collect::<Result<_>>()?;
                match product_identity_scalar(&obs, scenario.tolerance)? {
                    Some(value) => ConstraintStatus::Verified {
                        value,
                        holds: (value - f64::from(*target)).abs() <= scenario.tolerance,
                    },
                    None => ConstraintStatus::NotScalar,
                }
            }
        }
    };
    Ok(ConstraintCheck {
        constraint: constraint.render(),
        quantum,
    })
}

fn answer_query(
    scenario: &Scenario,
    model: &ClassicalModel,
    query: &Query,
    compat: &CompatibilityMap,
) -> Result<QueryVerdict> {
    let (classical, quantum) = match query {
        Query::Event { event } => {
            let classical = if model.event_possible(event)? {
                ClassicalVerdict::Possible
            } else {
                ClassicalVerdict::Impossible
            };
            let ids: Vec<&str> = event.ids().collect();
            let quantum = match compat.first_incompatible(&ids)? {
                Some((a, b)) => QuantumVerdict::Incompatible { a, b },
                None => QuantumVerdict::Probability {
                    value: joint_probability(
                        &scenario.state,
                        event,
                        &scenario.observables,
                        scenario.tolerance,
                    )?,
                },
            };
            (classical, quantum)
        }
        Query::Product { ids } => {
            let classical = match model.implied_product(ids)? {
                Some(value) => ClassicalVerdict::ImpliedProduct { value },
                None => ClassicalVerdict::Unconstrained,
            };
            let borrowed: Vec<&str> = ids.iter().map(String::as_str).collect();
            let quantum = match compat.first_incompatible(&borrowed)? {
                Some((a, b)) => QuantumVerdict::Incompatible { a, b },
                None => {
                    let obs: Vec<&Observable> = ids
                        .iter()
                        .map(|id| scenario.observables.get(id))
                        .collect::<Result<_>>()?;
                    match product_identity_scalar(&obs, scenario.tolerance)? {
                        Some(value) => QuantumVerdict::Scalar { value },
                        None => QuantumVerdict::NotScalar,
                    }
                }
            };
            (classical, quantum)
        }
    };
    Ok(QueryVerdict {
        query: query.render(),
        classical,
        quantum,
    })
}

fn find_contradiction(verdict: &QueryVerdict, tolerance: f64) -> Option<Contradiction> {
    let conflicting = match (&verdict.classical, &verdict.quantum) {
        (ClassicalVerdict::Impossible, QuantumVerdict::Probability { value }) => {
            *value > tolerance
        }
        (
            ClassicalVerdict::ImpliedProduct { value: c },
            QuantumVerdict::Scalar { value: q },
        ) => (f64::from(*c) - q).abs() > tolerance,
        _ => false,
    };
    conflicting.then(|| Contradiction {
        query: verdict.query.clone(),
        classical: verdict.classical.clone(),
        quantum: verdict.quantum.clone(),
    })
}

fn collect_witnesses(
    model: &ClassicalModel,
    compat: &CompatibilityMap,
    arity_cap: usize,
) -> Result<WitnessReport> {
    let mut events = Vec::new();
    let max_arity = arity_cap.min(model.table().len());
    for arity in 1..=max_arity {
        for event in model.forbidden_events(arity)? {
            let ids: Vec<&str> = event.ids().collect();
            if compat.first_incompatible(&ids)?.is_some() {
                events.push(event);
            }
        }
    }
    Ok(WitnessReport {
        arity_cap,
        count: events.len(),
        events,
    })
}

fn check_functional(
    scenario: &Scenario,
    model: &ClassicalModel,
    compat: &CompatibilityMap,
) -> Result<Option<FunctionalReport>> {
    let Some(functional) = &scenario.functional else {
        return Ok(None);
    };
    let classical_bounds = functional_bounds(model.support(), &functional.term_tuples())?
        .map(|(lo, hi)| [lo, hi]);

    let mut quantum_value = Some(0.0);
    for term in &functional.terms {
        if compat.first_incompatible(&[&term.a, &term.b])?.is_some() {
            quantum_value = None;
            break;
        }
        let corr = correlation(
            &scenario.state,
            scenario.observables.get(&term.a)?,
            scenario.observables.get(&term.b)?,
            scenario.tolerance,
        )?;
        quantum_value = quantum_value.map(|acc| acc + term.coefficient * corr);
    }

    let violates = match (quantum_value, classical_bounds) {
        (Some(q), Some([lo, hi])) => q < lo - scenario.tolerance || q > hi + scenario.tolerance,
        _ => false,
    };
    Ok(Some(FunctionalReport {
        functional: functional.render(),
        classical_bounds,
        quantum_value,
        violates_classical_bounds: violates,
    }))
}

/// Events that must agree between the joint distribution of an all-commuting
/// scenario and direct computation: every constraint event and every event
/// query.
fn marginal_check_events(scenario: &Scenario) -> Vec<Event> {
    let mut events = Vec::new();
    for constraint in &scenario.constraints {
        if let Constraint::PartitionUnity { events: ev } = constraint {
            events.extend(ev.iter().cloned());
        }
    }
    for query in &scenario.queries {
        if let Query::Event { event } = query {
            events.push(event.clone());
        }
    }
    events
}

/// Runs the full pipeline. Pure function of the inputs; reports are
/// deterministic down to the byte.
pub fn analyze(scenario: &Scenario, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    scenario.validate()?;
    if options.witness_arity_cap == 0 {
        return Err(Error::EmptyEvent);
    }
    let compat = CompatibilityMap::build(&scenario.observables, scenario.tolerance)?;
    let all_commuting = compat.all_commuting();

    let constraint_checks = scenario
        .constraints
        .iter()
        .map(|c| check_constraint(scenario, c, &compat))
        .collect::<Result<Vec<_>>>()?;

    let table = scenario.variable_table();
    let model = build_model(&table, &scenario.constraints)?;
    let classical = ClassicalSummary {
        total_assignments: model.total_assignments() as u64,
        support_size: model.support_size(),
        satisfiable: model.is_satisfiable(),
    };

    let query_verdicts = scenario
        .queries
        .iter()
        .map(|q| answer_query(scenario, &model, q, &compat))
        .collect::<Result<Vec<_>>>()?;

    let contradictions: Vec<Contradiction> = query_verdicts
        .iter()
        .filter_map(|v| find_contradiction(v, scenario.tolerance))
        .collect();

    let witnesses = collect_witnesses(&model, &compat, options.witness_arity_cap)?;
    let functional = check_functional(scenario, &model, &compat)?;

    if all_commuting {
        if !contradictions.is_empty() {
            return Err(Error::Internal(format!(
                "all-commuting scenario `{}` produced {} contradiction(s)",
                scenario.name,
                contradictions.len()
            )));
        }
        let ids = scenario.observables.sorted_ids();
        let joint = commuting_classical_model(
            &scenario.state,
            &ids,
            &scenario.observables,
            scenario.tolerance,
        )?;
        for event in marginal_check_events(scenario) {
            let direct = joint_probability(
                &scenario.state,
                &event,
                &scenario.observables,
                scenario.tolerance,
            )?;
            let marginal = joint.marginal(&event)?;
            if (direct - marginal).abs() > MARGINAL_TOL {
                return Err(Error::Internal(format!(
                    "marginal of {} disagrees with direct computation: {marginal:.15} vs {direct:.15}",
                    event.render()
                )));
            }
        }
    }

    Ok(AnalysisReport {
        scenario: scenario.name.clone(),
        dim: scenario.dim,
        tolerance: scenario.tolerance,
        state_independent: scenario.state_independent,
        all_commuting,
        constraint_checks,
        classical,
        query_verdicts,
        contradictions,
        witnesses,
        functional,
    })
}
