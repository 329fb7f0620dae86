//! A full problem instance: state, observables, contexts, constraints,
//! queries, and an optional correlation functional.
//!
//! `Scenario` is a plain aggregate with public fields; [`Scenario::validate`]
//! checks the whole structure and is run by the analysis pipeline before any
//! computation, so an inconsistent instance cannot produce a report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lhv::{Constraint, VariableTable};
use crate::matrix::StateVector;
use crate::quantum::{Context, Event, Registry};

/// Default numeric tolerance for compatibility and constraint checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Smallest and largest Hilbert dimension a scenario may declare.
pub const MIN_SCENARIO_DIM: usize = 2;
pub const MAX_SCENARIO_DIM: usize = 64;

/// A question put to both the classical and the quantum side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    /// Is this partial outcome assignment possible, and how probable?
    Event { event: Event },
    /// What is the product of these ±1 values / of these operators?
    Product { ids: Vec<String> },
}

impl Query {
    /// Canonical text form, identical to the scenario-file syntax.
    pub fn render(&self) -> String {
        match self {
            Query::Event { event } => format!("query {}", event.render()),
            Query::Product { ids } => format!("query product ({})", ids.join(", ")),
        }
    }
}

/// One `coefficient * <a b>` term of a correlation functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalTerm {
    pub a: String,
    pub b: String,
    pub coefficient: f64,
}

/// A linear combination of two-observable correlations, e.g. the CHSH sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Functional {
    pub terms: Vec<FunctionalTerm>,
}

impl Functional {
    pub fn render(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{:+}*E({},{})", t.coefficient, t.a, t.b))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn term_tuples(&self) -> Vec<(String, String, f64)> {
        self.terms
            .iter()
            .map(|t| (t.a.clone(), t.b.clone(), t.coefficient))
            .collect()
    }
}

/// A complete verification instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub state: StateVector,
    pub observables: Registry,
    pub contexts: Vec<Context>,
    pub constraints: Vec<Constraint>,
    pub queries: Vec<Query>,
    pub functional: Option<Functional>,
    pub tolerance: f64,
    /// The scenario's verdicts hold for every state (operator identities
    /// only); the state field then merely picks a default for sampling.
    pub state_independent: bool,
}

impl Scenario {
    /// Table of every observable's id and outcome set, the classical side's
    /// view of the scenario.
    pub fn variable_table(&self) -> VariableTable {
        VariableTable::from_registry(&self.observables)
    }

    /// Full structural validation; cheap relative to any analysis.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || self
                .name
                .chars()
                .any(|c| c == '"' || c == '\\' || c.is_control())
        {
            return Err(Error::BadIdentifier {
                id: self.name.clone(),
            });
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::NonFinite {
                what: "scenario tolerance",
            });
        }
        if self.dim < MIN_SCENARIO_DIM || self.dim > MAX_SCENARIO_DIM {
            return Err(Error::TooLarge {
                what: "scenario dimension",
                size: self.dim,
                max: MAX_SCENARIO_DIM,
            });
        }
        if self.state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: self.state.dim(),
            });
        }
        if self.observables.is_empty() {
            return Err(Error::NoObservables);
        }
        for obs in self.observables.iter() {
            if obs.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    left: self.dim,
                    right: obs.dim(),
                });
            }
        }
        for ctx in &self.contexts {
            // Rebuilding re-runs membership and compatibility checks.
            Context::new(
                ctx.members().iter().cloned(),
                &self.observables,
                self.tolerance,
            )?;
        }
        let table = self.variable_table();
        for constraint in &self.constraints {
            constraint.validate(&table)?;
        }
        for query in &self.queries {
            match query {
                Query::Event { event } => event.validate(&self.observables)?,
                Query::Product { ids } => {
                    if ids.is_empty() {
                        return Err(Error::EmptyConstraint);
                    }
                    for id in ids {
                        if !self.observables.get(id)?.is_dichotomic() {
                            return Err(Error::NotDichotomic { id: id.clone() });
                        }
                    }
                }
            }
        }
        if let Some(functional) = &self.functional {
            if functional.terms.is_empty() {
                return Err(Error::EmptyConstraint);
            }
            for term in &functional.terms {
                if !term.coefficient.is_finite() {
                    return Err(Error::NonFinite {
                        what: "functional coefficient",
                    });
                }
                for id in [&term.a, &term.b] {
                    if !self.observables.get(id)?.is_dichotomic() {
                        return Err(Error::NotDichotomic { id: id.clone() });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Observable;

    fn tiny_scenario() -> Scenario {
        let mut observables = Registry::new();
        observables
            .insert(
                Observable::projector("A", StateVector::from_reals(&[1.0, 0.0]).unwrap())
                    .unwrap(),
            )
            .unwrap();
        Scenario {
            name: "tiny".to_string(),
            dim: 2,
            state: StateVector::from_reals(&[1.0, 1.0]).unwrap(),
            observables,
            contexts: vec![],
            constraints: vec![],
            queries: vec![],
            functional: None,
            tolerance: DEFAULT_TOLERANCE,
            state_independent: false,
        }
    }

    #[test]
    fn valid_minimal_scenario_passes() {
        tiny_scenario().validate().unwrap();
    }

    #[test]
    fn dimension_mismatches_are_caught() {
        let mut s = tiny_scenario();
        s.dim = 3;
        assert!(matches!(
            s.validate(),
            Err(Error::DimensionMismatch { .. })
        ));

        let mut s = tiny_scenario();
        s.state = StateVector::from_reals(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            s.validate(),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn queries_and_names_are_validated() {
        let mut s = tiny_scenario();
        s.queries = vec![Query::Event {
            event: Event::from_pairs(&[("missing", 1)]).unwrap(),
        }];
        assert!(matches!(
            s.validate(),
            Err(Error::UnknownObservable { .. })
        ));

        let mut s = tiny_scenario();
        s.queries = vec![Query::Product {
            ids: vec!["A".to_string()],
        }];
        assert!(matches!(s.validate(), Err(Error::NotDichotomic { .. })));

        let mut s = tiny_scenario();
        s.name = "has \"quotes\"".to_string();
        assert!(matches!(s.validate(), Err(Error::BadIdentifier { .. })));
    }

    #[test]
    fn tolerance_must_be_sane() {
        for bad in [0.0, -1e-9, 1.5, f64::NAN] {
            let mut s = tiny_scenario();
            s.tolerance = bad;
            assert!(s.validate().is_err(), "tolerance {bad} accepted");
        }
    }

    #[test]
    fn query_rendering() {
        let q = Query::Event {
            event: Event::from_pairs(&[("B", 0), ("A", 1)]).unwrap(),
        };
        assert_eq!(q.render(), "query P(A=1,B=0)");
        let p = Query::Product {
            ids: vec!["beta".to_string(), "gamma".to_string()],
        };
        assert_eq!(p.render(), "query product (beta, gamma)");
    }

    #[test]
    fn functional_rendering() {
        let f = Functional {
            terms: vec![
                FunctionalTerm {
                    a: "X1".into(),
                    b: "Y1".into(),
                    coefficient: 1.0,
                },
                FunctionalTerm {
                    a: "X2".into(),
                    b: "Y2".into(),
                    coefficient: -1.0,
                },
            ],
        };
        assert_eq!(f.render(), "+1*E(X1,Y1) -1*E(X2,Y2)");
    }
}
