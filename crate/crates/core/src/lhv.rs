//! Noncontextual value assignments and the constraints that prune them.
//!
//! A hidden-variable model in this toolkit is a set of deterministic total
//! assignments (one outcome per observable, regardless of measurement
//! context) surviving two kinds of constraints: partition-unity families of
//! disjoint events whose probabilities must sum to 1, and parity requirements
//! on products of dichotomic values. Everything is decided by brute-force
//! enumeration, capped at [`ENUMERATION_CAP`] assignments; the scenarios of
//! interest need 32, 1024, and 16.
//!
//! An *empty* support is a finding, not an error: it means no noncontextual
//! assignment satisfies the constraints at all.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{Event, Outcome, Registry};

/// Largest number of total assignments the enumerator will materialize.
pub const ENUMERATION_CAP: u128 = 1 << 20;

/// Ordered table of (observable id, outcome set) pairs; fixes the enumeration
/// order. Ids are sorted lexicographically, outcome sets ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    vars: Vec<(String, Vec<Outcome>)>,
}

impl VariableTable {
    pub fn new(vars: impl IntoIterator<Item = (String, Vec<Outcome>)>) -> Result<Self> {
        let mut sorted: Vec<(String, Vec<Outcome>)> = vars.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateId {
                    id: pair[0].0.clone(),
                });
            }
        }
        for (id, outcomes) in &mut sorted {
            outcomes.sort_unstable();
            outcomes.dedup();
            if outcomes.is_empty() {
                return Err(Error::EmptyOutcomeSet { id: id.clone() });
            }
        }
        Ok(Self { vars: sorted })
    }

    /// Table over every observable in the registry.
    pub fn from_registry(registry: &Registry) -> Self {
        Self::new(
            registry
                .iter()
                .map(|obs| (obs.id().to_string(), obs.outcomes().to_vec())),
        )
        .expect("registry ids are unique and outcome sets nonempty")
    }

    pub fn vars(&self) -> &[(String, Vec<Outcome>)] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn outcomes_of(&self, id: &str) -> Result<&[Outcome]> {
        self.vars
            .iter()
            .find(|(x, _)| x == id)
            .map(|(_, o)| o.as_slice())
            .ok_or_else(|| Error::UnknownObservable { id: id.to_string() })
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vars.iter().any(|(x, _)| x == id)
    }

    /// Number of total assignments the table generates.
    pub fn assignment_count(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, (_, o)| acc.saturating_mul(o.len() as u128))
    }

    fn check_event(&self, event: &Event) -> Result<()> {
        for (id, outcome) in event.assignments() {
            if !self.outcomes_of(id)?.contains(outcome) {
                return Err(Error::BadOutcome {
                    id: id.clone(),
                    outcome: *outcome,
                });
            }
        }
        Ok(())
    }
}

/// Deterministic total assignment of one outcome to every observable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Assignment {
    values: BTreeMap<String, Outcome>,
}

impl Assignment {
    pub fn get(&self, id: &str) -> Option<Outcome> {
        self.values.get(id).copied()
    }

    pub fn values(&self) -> &BTreeMap<String, Outcome> {
        &self.values
    }

    /// True iff the assignment agrees with every (id, outcome) pair of the
    /// event. An event mentioning an id outside the assignment is unsatisfied.
    pub fn satisfies(&self, event: &Event) -> bool {
        event
            .assignments()
            .iter()
            .all(|(id, v)| self.get(id) == Some(*v))
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .values
            .iter()
            .map(|(id, v)| format!("{id}={v}"))
            .collect();
        format!("({})", body.join(","))
    }
}

/// All total assignments of the table, in lexicographic order of the outcome
/// tuple (ids sorted, outcomes ascending, last id varying fastest).
pub fn enumerate_assignments(table: &VariableTable) -> Result<Vec<Assignment>> {
    let count = table.assignment_count();
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    if table.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut indices = vec![0usize; table.len()];
    loop {
        let values: BTreeMap<String, Outcome> = table
            .vars()
            .iter()
            .zip(&indices)
            .map(|((id, outcomes), &i)| (id.clone(), outcomes[i]))
            .collect();
        out.push(Assignment { values });
        let mut pos = table.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < table.vars()[pos].1.len() {
                break;
            }
            indices[pos] = 0;
        }
        if indices.iter().all(|&i| i == 0) {
            break;
        }
    }
    Ok(out)
}

/// A restriction every admissible assignment must satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// Exactly one of a family of pairwise-disjoint events occurs.
    PartitionUnity { events: Vec<Event> },
    /// The ±1 values of the listed observables multiply to `target`.
    ProductEquals { ids: Vec<String>, target: Outcome },
}

impl Constraint {
    /// Structural validation against a table: ids known, outcomes legal,
    /// partition events pairwise disjoint, product members dichotomic.
    ///
    /// Two partial events are disjoint as sets of satisfying assignments iff
    /// they conflict on some shared observable, so disjointness of the whole
    /// family is decided exactly by pairwise comparison.
    pub fn validate(&self, table: &VariableTable) -> Result<()> {
        match self {
            Constraint::PartitionUnity { events } => {
                if events.is_empty() {
                    return Err(Error::EmptyConstraint);
                }
                for event in events {
                    table.check_event(event)?;
                }
                for (i, a) in events.iter().enumerate() {
                    for (j, b) in events.iter().enumerate().skip(i + 1) {
                        if a.consistent_with(b) {
                            let mut merged = a.assignments().clone();
                            merged.extend(b.assignments().clone());
                            let witness: Vec<String> =
                                merged.iter().map(|(id, v)| format!("{id}={v}")).collect();
                            return Err(Error::OverlappingPartition {
                                first: i,
                                second: j,
                                witness: format!("({})", witness.join(",")),
                            });
                        }
                    }
                }
                Ok(())
            }
            Constraint::ProductEquals { ids, target } => {
                if ids.is_empty() {
                    return Err(Error::EmptyConstraint);
                }
                let mut seen = std::collections::BTreeSet::new();
                for id in ids {
                    if !seen.insert(id) {
                        return Err(Error::DuplicateId { id: id.clone() });
                    }
                    if table.outcomes_of(id)? != [-1, 1] {
                        return Err(Error::NotDichotomic { id: id.clone() });
                    }
                }
                if *target != 1 && *target != -1 {
                    return Err(Error::BadProductTarget { target: *target });
                }
                Ok(())
            }
        }
    }

    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        match self {
            Constraint::PartitionUnity { events } => {
                events.iter().filter(|e| assignment.satisfies(e)).count() == 1
            }
            Constraint::ProductEquals { ids, target } => {
                let product: i32 = ids
                    .iter()
                    .map(|id| i32::from(assignment.get(id).unwrap_or(0)))
                    .product();
                product == i32::from(*target)
            }
        }
    }

    /// Canonical text form, identical to the scenario-file syntax.
    pub fn render(&self) -> String {
        match self {
            Constraint::PartitionUnity { events } => {
                let parts: Vec<String> = events.iter().map(Event::render).collect();
                format!("partition {} = 1", parts.join(" + "))
            }
            Constraint::ProductEquals { ids, target } => {
                format!("product ({}) = {}", ids.join(", "), target)
            }
        }
    }
}

/// Assignments surviving all constraints, plus the enumeration they came from.
#[derive(Debug, Clone)]
pub struct ClassicalModel {
    table: VariableTable,
    support: Vec<Assignment>,
    total: u128,
}

/// Enumerates all assignments of the table and keeps those satisfying every
/// constraint. Constraints are validated first; an empty support is returned,
/// not an error.
pub fn build_model(table: &VariableTable, constraints: &[Constraint]) -> Result<ClassicalModel> {
    for c in constraints {
        c.validate(table)?;
    }
    let all = enumerate_assignments(table)?;
    let total = all.len() as u128;
    let support = all
        .into_iter()
        .filter(|a| constraints.iter().all(|c| c.satisfied_by(a)))
        .collect();
    Ok(ClassicalModel {
        table: table.clone(),
        support,
        total,
    })
}

impl ClassicalModel {
    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    /// Surviving assignments, in enumeration order.
    pub fn support(&self) -> &[Assignment] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn total_assignments(&self) -> u128 {
        self.total
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.support.is_empty()
    }

    /// Whether some support assignment satisfies the event.
    pub fn event_possible(&self, event: &Event) -> Result<bool> {
        self.table.check_event(event)?;
        Ok(self.support.iter().any(|a| a.satisfies(event)))
    }

    /// Every event over exactly `arity` observables that no support
    /// assignment satisfies, in lexicographic order of (id subset, outcome
    /// tuple). With an empty support every event is forbidden.
    pub fn forbidden_events(&self, arity: usize) -> Result<Vec<Event>> {
        if arity == 0 {
            return Err(Error::EmptyEvent);
        }
        let n = self.table.len();
        let mut out = Vec::new();
        if arity > n {
            return Ok(out);
        }
        let mut subset: Vec<usize> = (0..arity).collect();
        loop {
            self.collect_forbidden_for_subset(&subset, &mut out)?;
            // Next k-combination in lexicographic order.
            let mut i = arity;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if subset[i] != i + n - arity {
                    break;
                }
            }
            if subset[i] == i + n - arity {
                return Ok(out);
            }
            subset[i] += 1;
            for j in i + 1..arity {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    fn collect_forbidden_for_subset(
        &self,
        subset: &[usize],
        out: &mut Vec<Event>,
    ) -> Result<()> {
        let vars = self.table.vars();
        let mut indices = vec![0usize; subset.len()];
        loop {
            let event = Event::new(
                subset
                    .iter()
                    .zip(&indices)
                    .map(|(&v, &i)| (vars[v].0.clone(), vars[v].1[i])),
            )?;
            if !self.support.iter().any(|a| a.satisfies(&event)) {
                out.push(event);
            }
            let mut pos = subset.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < vars[subset[pos]].1.len() {
                    break;
                }
                indices[pos] = 0;
            }
            if indices.iter().all(|&i| i == 0) {
                return Ok(());
            }
        }
    }

    /// If every support assignment gives the same product of the listed ±1
    /// values, returns that product. `None` when both signs occur or the
    /// support is empty (an empty support constrains nothing).
    pub fn implied_product(&self, ids: &[String]) -> Result<Option<Outcome>> {
        if ids.is_empty() {
            return Err(Error::EmptyConstraint);
        }
        for id in ids {
            if self.table.outcomes_of(id)? != [-1, 1] {
                return Err(Error::NotDichotomic { id: id.clone() });
            }
        }
        let mut implied: Option<Outcome> = None;
        for a in &self.support {
            let product: i32 = ids
                .iter()
                .map(|id| i32::from(a.get(id).expect("support assignments are total")))
                .product();
            let sign = if product >= 0 { 1 } else { -1 };
            match implied {
                None => implied = Some(sign),
                Some(prev) if prev != sign => return Ok(None),
                Some(_) => {}
            }
        }
        Ok(implied)
    }
}

/// Extreme values of a bilinear functional `sum coeff * v(a) * v(b)` over a
/// set of assignments. `None` for an empty set.
pub fn functional_bounds(
    assignments: &[Assignment],
    terms: &[(String, String, f64)],
) -> Result<Option<(f64, f64)>> {
    let mut bounds: Option<(f64, f64)> = None;
    for a in assignments {
        let mut value = 0.0;
        for (x, y, coeff) in terms {
            let vx = a.get(x).ok_or_else(|| Error::UnknownObservable {
                id: x.clone(),
            })?;
            let vy = a.get(y).ok_or_else(|| Error::UnknownObservable {
                id: y.clone(),
            })?;
            value += coeff * f64::from(vx) * f64::from(vy);
        }
        bounds = Some(match bounds {
            None => (value, value),
            Some((lo, hi)) => (lo.min(value), hi.max(value)),
        });
    }
    Ok(bounds)
}

/// Vertex check of the statement "P(X1=X2=Y2) <= P(X1=Y1) + P(X1=Y2) +
/// P(X2=Y1)": on every single assignment the left indicator is bounded by the
/// right indicator sum. Linearity extends vertex validity to every
/// distribution over the assignments.
pub fn check_derived_inequality(
    assignments: &[Assignment],
    x1: &str,
    x2: &str,
    y1: &str,
    y2: &str,
) -> Result<bool> {
    for a in assignments {
        let v = |id: &str| -> Result<Outcome> {
            a.get(id)
                .ok_or_else(|| Error::UnknownObservable { id: id.to_string() })
        };
        let (vx1, vx2, vy1, vy2) = (v(x1)?, v(x2)?, v(y1)?, v(y2)?);
        let lhs = u8::from(vx1 == vx2 && vx2 == vy2);
        let rhs = u8::from(vx1 == vy1) + u8::from(vx1 == vy2) + u8::from(vx2 == vy1);
        if lhs > rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
