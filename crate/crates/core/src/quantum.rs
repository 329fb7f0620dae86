//! Quantum side of a scenario: observables, compatibility, joint statistics.
//!
//! The central rule enforced here is that joint statistics exist *only* for
//! pairwise compatible observables. Any request that mixes incompatible ones
//! is answered with [`Error::IncompatibleEvent`] rather than a number, because
//! quantum mechanics assigns no value there and inventing one is precisely the
//! mistake this toolkit exists to catch.
//!
//! Compatibility is decided symbolically for Pauli pairs and by commutator
//! norm otherwise. Probabilities are computed by projector products on a pure
//! state; results outside [0,1] beyond rounding slack indicate a bug and
//! surface as [`Error::Internal`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, Complex, ComplexMatrix, StateVector};
use crate::pauli::PauliString;

pub type Outcome = i8;

/// Hermiticity / involution slack accepted when constructing matrix-backed
/// observables.
pub const OBSERVABLE_TOL: f64 = 1e-10;

/// Imaginary part allowed in an expectation of a Hermitian product before the
/// computation is declared internally inconsistent.
pub const IMAG_TOL: f64 = 1e-10;

/// Slack outside [0,1] (or [-1,1] for correlations) tolerated before clamping.
pub const RANGE_TOL: f64 = 1e-8;

/// Largest joint-outcome enumeration (shared with the assignment enumerator).
pub const ENUMERATION_CAP: u128 = 1 << 20;

fn is_ident(id: &str) -> bool {
    let mut chars = id.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn checked_ident(id: &str) -> Result<String> {
    if is_ident(id) {
        Ok(id.to_string())
    } else {
        Err(Error::BadIdentifier { id: id.to_string() })
    }
}

/// How an observable is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableKind {
    /// Rank-one yes/no question with outcomes {0, 1}.
    Projector(StateVector),
    /// Pauli string with phase +1 or -1; outcomes {-1, +1}, algebra exact.
    Pauli(PauliString),
    /// Hermitian involution given numerically; outcomes {-1, +1}.
    Involution(ComplexMatrix),
}

/// A named measurement with a fixed finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    id: String,
    kind: ObservableKind,
}

impl Observable {
    pub fn projector(id: &str, ray: StateVector) -> Result<Self> {
        Ok(Self {
            id: checked_ident(id)?,
            kind: ObservableKind::Projector(ray),
        })
    }

    pub fn pauli(id: &str, string: PauliString) -> Result<Self> {
        if !string.is_hermitian() {
            return Err(Error::NonRealPhase { id: id.to_string() });
        }
        Ok(Self {
            id: checked_ident(id)?,
            kind: ObservableKind::Pauli(string),
        })
    }

    pub fn involution(id: &str, m: ComplexMatrix) -> Result<Self> {
        if !m.is_hermitian(OBSERVABLE_TOL) {
            return Err(Error::NotHermitian { id: id.to_string() });
        }
        let id2 = ComplexMatrix::identity(m.dim())?;
        if m.mat_mul(&m)?.distance(&id2)? > OBSERVABLE_TOL {
            return Err(Error::NotInvolution { id: id.to_string() });
        }
        Ok(Self {
            id: checked_ident(id)?,
            kind: ObservableKind::Involution(m),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &ObservableKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ObservableKind::Projector(ray) => ray.dim(),
            ObservableKind::Pauli(s) => 1 << s.qubits(),
            ObservableKind::Involution(m) => m.dim(),
        }
    }

    pub fn outcomes(&self) -> &'static [Outcome] {
        match self.kind {
            ObservableKind::Projector(_) => &[0, 1],
            _ => &[-1, 1],
        }
    }

    pub fn is_dichotomic(&self) -> bool {
        self.outcomes() == [-1, 1]
    }

    /// The observable as an operator (the projector itself for ray questions).
    pub fn operator(&self) -> Result<ComplexMatrix> {
        match &self.kind {
            ObservableKind::Projector(ray) => Ok(matrix::projector(ray)),
            ObservableKind::Pauli(s) => s.to_matrix(),
            ObservableKind::Involution(m) => Ok(m.clone()),
        }
    }

    /// Spectral projector onto the eigenspace of `outcome`.
    pub fn outcome_projector(&self, outcome: Outcome) -> Result<ComplexMatrix> {
        if !self.outcomes().contains(&outcome) {
            return Err(Error::BadOutcome {
                id: self.id.clone(),
                outcome,
            });
        }
        let op = self.operator()?;
        match self.kind {
            ObservableKind::Projector(_) => {
                if outcome == 1 {
                    Ok(op)
                } else {
                    ComplexMatrix::identity(op.dim())?.sub(&op)
                }
            }
            // (1 +/- M)/2 for an involution M.
            _ => {
                let sign = Complex::new(0.5 * f64::from(outcome), 0.0);
                ComplexMatrix::identity(op.dim())?
                    .scale(Complex::new(0.5, 0.0))
                    .add(&op.scale(sign))
            }
        }
    }
}

/// Whether two observables admit joint statistics: exact commutation for
/// Pauli pairs, commutator norm within `tol` otherwise.
pub fn compatible(a: &Observable, b: &Observable, tol: f64) -> Result<bool> {
    if let (ObservableKind::Pauli(pa), ObservableKind::Pauli(pb)) = (&a.kind, &b.kind) {
        return pa.commutes(pb);
    }
    Ok(matrix::commutator_norm(&a.operator()?, &b.operator()?)? <= tol)
}

/// Insertion-ordered collection of observables with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    items: Vec<Observable>,
    index: BTreeMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, obs: Observable) -> Result<()> {
        if self.index.contains_key(obs.id()) {
            return Err(Error::DuplicateId {
                id: obs.id().to_string(),
            });
        }
        self.index.insert(obs.id().to_string(), self.items.len());
        self.items.push(obs);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&Observable> {
        self.index
            .get(id)
            .map(|&i| &self.items[i])
            .ok_or_else(|| Error::UnknownObservable { id: id.to_string() })
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Observables in insertion order.
    pub fn iter(&self) -> std::slice::Iter<'_, Observable> {
        self.items.iter()
    }

    /// Ids in lexicographic order.
    pub fn sorted_ids(&self) -> Vec<String> {
        self.index.keys().cloned().collect()
    }
}

/// Partial assignment of outcomes to named observables; the unit every query,
/// constraint, and forbidden-event listing is built from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Event {
    assignments: BTreeMap<String, Outcome>,
}

impl Event {
    pub fn new(pairs: impl IntoIterator<Item = (String, Outcome)>) -> Result<Self> {
        let mut assignments = BTreeMap::new();
        for (id, outcome) in pairs {
            if assignments.insert(id.clone(), outcome).is_some() {
                return Err(Error::DuplicateId { id });
            }
        }
        if assignments.is_empty() {
            return Err(Error::EmptyEvent);
        }
        Ok(Self { assignments })
    }

    pub fn from_pairs(pairs: &[(&str, Outcome)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(id, v)| (id.to_string(), v)))
    }

    pub fn assignments(&self) -> &BTreeMap<String, Outcome> {
        &self.assignments
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.assignments.keys().map(String::as_str)
    }

    pub fn get(&self, id: &str) -> Option<Outcome> {
        self.assignments.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff some total assignment satisfies both events, i.e. they agree
    /// wherever their observables overlap.
    pub fn consistent_with(&self, other: &Event) -> bool {
        self.assignments
            .iter()
            .all(|(id, v)| other.get(id).map_or(true, |w| w == *v))
    }

    /// Checks every id is registered and every outcome is in its set.
    pub fn validate(&self, registry: &Registry) -> Result<()> {
        for (id, outcome) in &self.assignments {
            let obs = registry.get(id)?;
            if !obs.outcomes().contains(outcome) {
                return Err(Error::BadOutcome {
                    id: id.clone(),
                    outcome: *outcome,
                });
            }
        }
        Ok(())
    }

    /// Canonical text form, `P(A=1,B=0)`, ids in lexicographic order.
    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .assignments
            .iter()
            .map(|(id, v)| format!("{id}={v}"))
            .collect();
        format!("P({})", body.join(","))
    }
}

/// A set of pairwise compatible observables: the largest unit that can be
/// measured in one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Context {
    members: BTreeSet<String>,
}

impl Context {
    pub fn new(
        ids: impl IntoIterator<Item = String>,
        registry: &Registry,
        tol: f64,
    ) -> Result<Self> {
        let members: BTreeSet<String> = ids.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptyContext);
        }
        for id in &members {
            registry.get(id)?;
        }
        let list: Vec<&String> = members.iter().collect();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if !compatible(registry.get(a)?, registry.get(b)?, tol)? {
                    return Err(Error::IncompatibleEvent {
                        a: (*a).clone(),
                        b: (*b).clone(),
                    });
                }
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }
}

fn check_pairwise_compatible(ids: &[&str], registry: &Registry, tol: f64) -> Result<()> {
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            if !compatible(registry.get(a)?, registry.get(b)?, tol)? {
                return Err(Error::IncompatibleEvent {
                    a: (*a).to_string(),
                    b: (*b).to_string(),
                });
            }
        }
    }
    Ok(())
}

fn real_part_checked(value: Complex, what: &str) -> Result<f64> {
    if value.im.abs() > IMAG_TOL {
        return Err(Error::Internal(format!(
            "{what} has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn clamped(raw: f64, lo: f64, hi: f64, what: &str) -> Result<f64> {
    if raw < lo - RANGE_TOL || raw > hi + RANGE_TOL {
        return Err(Error::Internal(format!(
            "{what} = {raw:.17} is outside [{lo}, {hi}]"
        )));
    }
    Ok(raw.clamp(lo, hi))
}

/// Probability of `event` on `psi`. Refuses events over incompatible
/// observables; the projectors of a compatible family commute, so the order
/// of the product (sorted by id) is immaterial.
pub fn joint_probability(
    psi: &StateVector,
    event: &Event,
    registry: &Registry,
    tol: f64,
) -> Result<f64> {
    event.validate(registry)?;
    let ids: Vec<&str> = event.ids().collect();
    check_pairwise_compatible(&ids, registry, tol)?;
    let mut product: Option<ComplexMatrix> = None;
    for (id, outcome) in event.assignments() {
        let p = registry.get(id)?.outcome_projector(*outcome)?;
        product = Some(match product {
            None => p,
            Some(acc) => acc.mat_mul(&p)?,
        });
    }
    let op = product.expect("events are nonempty");
    let raw = real_part_checked(matrix::expectation(psi, &op)?, "joint probability")?;
    clamped(raw, 0.0, 1.0, "joint probability")
}

/// Correlation `<AB>` of two compatible dichotomic observables on `psi`.
pub fn correlation(psi: &StateVector, a: &Observable, b: &Observable, tol: f64) -> Result<f64> {
    for obs in [a, b] {
        if !obs.is_dichotomic() {
            return Err(Error::NotDichotomic {
                id: obs.id().to_string(),
            });
        }
    }
    if !compatible(a, b, tol)? {
        return Err(Error::IncompatibleEvent {
            a: a.id().to_string(),
            b: b.id().to_string(),
        });
    }
    let op = a.operator()?.mat_mul(&b.operator()?)?;
    let raw = real_part_checked(matrix::expectation(psi, &op)?, "correlation")?;
    clamped(raw, -1.0, 1.0, "correlation")
}

/// If the ordered operator product of `obs` equals `c * identity` for a real
/// scalar `c` (within `tol`), returns `c`. The all-Pauli case is decided
/// symbolically and is exact.
pub fn product_identity_scalar(obs: &[&Observable], tol: f64) -> Result<Option<f64>> {
    if obs.is_empty() {
        return Ok(Some(1.0));
    }
    let paulis: Option<Vec<&PauliString>> = obs
        .iter()
        .map(|o| match o.kind() {
            ObservableKind::Pauli(s) => Some(s),
            _ => None,
        })
        .collect();
    if let Some(strings) = paulis {
        let mut acc = strings[0].clone();
        for s in &strings[1..] {
            acc = acc.product(s)?;
        }
        if acc.is_identity_word() && acc.phase().is_real() {
            return Ok(Some(acc.phase().as_complex().re));
        }
        return Ok(None);
    }
    let mut acc = obs[0].operator()?;
    for o in &obs[1..] {
        acc = acc.mat_mul(&o.operator()?)?;
    }
    let c = acc.trace() / Complex::new(acc.dim() as f64, 0.0);
    if c.im.abs() > tol {
        return Ok(None);
    }
    let scaled_identity = ComplexMatrix::identity(acc.dim())?.scale(Complex::new(c.re, 0.0));
    if acc.distance(&scaled_identity)? <= tol {
        Ok(Some(c.re))
    } else {
        Ok(None)
    }
}

/// Joint distribution over the outcome tuples of a commuting family.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    ids: Vec<String>,
    entries: Vec<(Vec<Outcome>, f64)>,
}

impl JointDistribution {
    /// Ids in lexicographic order; tuples are indexed in this order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn entries(&self) -> &[(Vec<Outcome>, f64)] {
        &self.entries
    }

    /// Marginal probability of a partial event over a subset of the ids.
    pub fn marginal(&self, event: &Event) -> Result<f64> {
        for id in event.ids() {
            if !self.ids.iter().any(|x| x == id) {
                return Err(Error::UnknownObservable { id: id.to_string() });
            }
        }
        Ok(self
            .entries
            .iter()
            .filter(|(tuple, _)| {
                self.ids
                    .iter()
                    .zip(tuple)
                    .all(|(id, v)| event.get(id).map_or(true, |w| w == *v))
            })
            .map(|(_, p)| p)
            .sum())
    }
}

/// Enumerates outcome tuples of `ids` in lexicographic order of (sorted id
/// list, tuple), with probabilities summing to 1 within 1e-9.
///
/// Only defined for pairwise compatible families; this is the classical
/// shadow quantum mechanics itself provides inside one context.
pub fn commuting_classical_model(
    psi: &StateVector,
    ids: &[String],
    registry: &Registry,
    tol: f64,
) -> Result<JointDistribution> {
    let mut sorted: Vec<String> = ids.to_vec();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateId {
                id: pair[0].clone(),
            });
        }
    }
    if sorted.is_empty() {
        return Err(Error::EmptyContext);
    }
    let borrowed: Vec<&str> = sorted.iter().map(String::as_str).collect();
    check_pairwise_compatible(&borrowed, registry, tol)?;

    let outcome_sets: Vec<&'static [Outcome]> = sorted
        .iter()
        .map(|id| registry.get(id).map(|o| o.outcomes()))
        .collect::<Result<_>>()?;
    let count = outcome_sets
        .iter()
        .fold(1u128, |acc, s| acc * s.len() as u128);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }

    let mut entries = Vec::with_capacity(count as usize);
    let mut tuple: Vec<usize> = vec![0; sorted.len()];
    loop {
        let outcomes: Vec<Outcome> = tuple
            .iter()
            .zip(&outcome_sets)
            .map(|(&i, set)| set[i])
            .collect();
        let event = Event::new(sorted.iter().cloned().zip(outcomes.iter().copied()))?;
        let p = joint_probability(psi, &event, registry, tol)?;
        entries.push((outcomes, p));
        // Mixed-radix increment, least significant position last.
        let mut pos = sorted.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < outcome_sets[pos].len() {
                break;
            }
            tuple[pos] = 0;
        }
        if tuple.iter().all(|&i| i == 0) {
            break;
        }
    }

    let total: f64 = entries.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "joint distribution sums to {total:.12}, not 1"
        )));
    }
    Ok(JointDistribution {
        ids: sorted,
        entries,
    })
}
