//! The three built-in scenarios the toolkit ships.
//!
//! - `hardy`: five rank-one projectors on a qutrit, cyclically orthogonal,
//!   with two partition-unity constraints. The classical model forbids an
//!   event the quantum state assigns probability 1/9.
//! - `mermin`: ten three-qubit Pauli observables arranged on five lines of a
//!   star; four line parities force a fifth the operator algebra denies. The
//!   contradiction is state-independent.
//! - `chsh`: two measurement settings per side on a singlet, with the CHSH
//!   correlation functional. No event contradiction; the violation lives in
//!   the functional exceeding the classical bounds.
//!
//! The Mermin observable labels follow the star's intersection points; the
//! mapping is re-validated at construction (line products and intra-line
//! commutation), so a wrong table cannot ship silently.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::lhv::Constraint;
use crate::matrix::{Complex, ComplexMatrix, StateVector};
use crate::pauli::PauliString;
use crate::quantum::{compatible, product_identity_scalar, Context, Event, Observable, Registry};
use crate::scenario::{Functional, FunctionalTerm, Query, Scenario, DEFAULT_TOLERANCE};

/// Names accepted by `list`/`check` style lookups, in presentation order.
pub const BUILTIN_NAMES: [&str; 3] = ["hardy", "mermin", "chsh"];

/// Angle set at which the CHSH functional reaches magnitude 2*sqrt(2) on the
/// singlet under this crate's conventions.
pub fn default_chsh_angles() -> [f64; 4] {
    [0.0, FRAC_PI_2, FRAC_PI_4, 7.0 * FRAC_PI_4]
}

/// Looks up a builtin by name; angles apply to `chsh` only.
pub fn builtin_by_name(name: &str, chsh_angles: [f64; 4]) -> Option<Scenario> {
    match name {
        "hardy" => Some(builtin_hardy()),
        "mermin" => Some(builtin_mermin()),
        "chsh" => builtin_chsh(
            chsh_angles[0],
            chsh_angles[1],
            chsh_angles[2],
            chsh_angles[3],
        )
        .ok(),
        _ => None,
    }
}

/// Five-projector qutrit scenario with two partition-unity constraints and
/// the six classically-impossible pair events as queries.
pub fn builtin_hardy() -> Scenario {
    let rays: [(&str, [f64; 3]); 5] = [
        ("P1", [1.0, -1.0, 1.0]),
        ("P2", [1.0, 1.0, 0.0]),
        ("P3", [0.0, 0.0, 1.0]),
        ("P4", [1.0, 0.0, 0.0]),
        ("P5", [0.0, 1.0, 1.0]),
    ];
    let mut observables = Registry::new();
    for (id, raw) in rays {
        let ray = StateVector::from_reals(&raw).expect("fixed rays are nonzero");
        observables
            .insert(Observable::projector(id, ray).expect("fixed ids are valid"))
            .expect("fixed ids are distinct");
    }

    let context_pairs = [
        ("P1", "P2"),
        ("P2", "P3"),
        ("P3", "P4"),
        ("P4", "P5"),
        ("P5", "P1"),
    ];
    let contexts = context_pairs
        .iter()
        .map(|&(a, b)| {
            Context::new(
                [a.to_string(), b.to_string()],
                &observables,
                DEFAULT_TOLERANCE,
            )
            .expect("cyclic neighbours are orthogonal, hence compatible")
        })
        .collect();

    let ev = |pairs: &[(&str, i8)]| Event::from_pairs(pairs).expect("fixed events are valid");
    let constraints = vec![
        Constraint::PartitionUnity {
            events: vec![ev(&[("P1", 0), ("P2", 1)]), ev(&[("P2", 0), ("P3", 1)])],
        },
        Constraint::PartitionUnity {
            events: vec![ev(&[("P3", 0), ("P4", 1)]), ev(&[("P4", 0), ("P5", 1)])],
        },
    ];

    // The six pair events no surviving assignment satisfies: the first is the
    // quantum counterexample, the other five are untestable quantumly.
    let queries = vec![
        Query::Event {
            event: ev(&[("P1", 1), ("P5", 0)]),
        },
        Query::Event {
            event: ev(&[("P1", 1), ("P3", 0)]),
        },
        Query::Event {
            event: ev(&[("P1", 1), ("P4", 1)]),
        },
        Query::Event {
            event: ev(&[("P2", 0), ("P4", 1)]),
        },
        Query::Event {
            event: ev(&[("P2", 0), ("P5", 0)]),
        },
        Query::Event {
            event: ev(&[("P3", 1), ("P5", 0)]),
        },
    ];

    let scenario = Scenario {
        name: "hardy".to_string(),
        dim: 3,
        state: StateVector::from_reals(&[1.0, 1.0, 1.0]).expect("uniform qutrit state"),
        observables,
        contexts,
        constraints,
        queries,
        functional: None,
        tolerance: DEFAULT_TOLERANCE,
        state_independent: false,
    };
    scenario.validate().expect("builtin scenario is well-formed");
    scenario
}

const MERMIN_OBSERVABLES: [(&str, &str); 10] = [
    ("alpha", "YII"),
    ("beta", "XXX"),
    ("gamma", "YYX"),
    ("delta", "YXY"),
    ("epsilon", "XYY"),
    ("zeta", "IIX"),
    ("eta", "IIY"),
    ("theta", "XII"),
    ("iota", "IYI"),
    ("kappa", "IXI"),
];

/// The five lines of the star: four with operator product +identity, the
/// horizontal one with -identity.
const MERMIN_LINES: [(&[&str], f64); 5] = [
    (&["alpha", "gamma", "zeta", "iota"], 1.0),
    (&["alpha", "delta", "eta", "kappa"], 1.0),
    (&["beta", "zeta", "theta", "kappa"], 1.0),
    (&["epsilon", "eta", "theta", "iota"], 1.0),
    (&["beta", "gamma", "delta", "epsilon"], -1.0),
];

/// Ten-observable three-qubit scenario whose four nonhorizontal line parities
/// classically force the horizontal product to +1, against the operator
/// identity -1. State-independent.
pub fn builtin_mermin() -> Scenario {
    let mut observables = Registry::new();
    for (id, word) in MERMIN_OBSERVABLES {
        let string = PauliString::from_word(word).expect("fixed words are valid");
        observables
            .insert(Observable::pauli(id, string).expect("fixed words are Hermitian"))
            .expect("fixed ids are distinct");
    }

    for (members, target) in MERMIN_LINES {
        let obs: Vec<&Observable> = members
            .iter()
            .map(|id| observables.get(id).expect("line members are registered"))
            .collect();
        for (i, a) in obs.iter().enumerate() {
            for b in &obs[i + 1..] {
                assert!(
                    compatible(a, b, DEFAULT_TOLERANCE).expect("same qubit count"),
                    "line members {} and {} must commute",
                    a.id(),
                    b.id()
                );
            }
        }
        let scalar = product_identity_scalar(&obs, DEFAULT_TOLERANCE)
            .expect("line product is computable");
        assert_eq!(
            scalar,
            Some(target),
            "line {members:?} must multiply to {target} * identity"
        );
    }

    let contexts = MERMIN_LINES
        .iter()
        .map(|(members, _)| {
            Context::new(
                members.iter().map(|s| s.to_string()),
                &observables,
                DEFAULT_TOLERANCE,
            )
            .expect("lines are commuting sets")
        })
        .collect();

    let constraints = MERMIN_LINES[..4]
        .iter()
        .map(|(members, _)| Constraint::ProductEquals {
            ids: members.iter().map(|s| s.to_string()).collect(),
            target: 1,
        })
        .collect();

    let horizontal: Vec<String> = MERMIN_LINES[4].0.iter().map(|s| s.to_string()).collect();
    let impossible_event = Event::from_pairs(&[
        ("gamma", 1),
        ("delta", 1),
        ("zeta", 1),
        ("eta", 1),
        ("iota", -1),
        ("kappa", 1),
    ])
    .expect("fixed event is valid");

    let scenario = Scenario {
        name: "mermin".to_string(),
        dim: 8,
        state: StateVector::from_reals(&[1.0; 8]).expect("uniform three-qubit state"),
        observables,
        contexts,
        constraints,
        queries: vec![
            Query::Product { ids: horizontal },
            Query::Event {
                event: impossible_event,
            },
        ],
        functional: None,
        tolerance: DEFAULT_TOLERANCE,
        state_independent: true,
    };
    scenario.validate().expect("builtin scenario is well-formed");
    scenario
}

/// In-plane spin direction cos(theta) Z + sin(theta) X.
pub(crate) fn spin_direction(theta: f64) -> ComplexMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    ComplexMatrix::from_rows(&[
        vec![Complex::new(c, 0.0), Complex::new(s, 0.0)],
        vec![Complex::new(s, 0.0), Complex::new(-c, 0.0)],
    ])
    .expect("2x2 is a valid dimension")
}

/// Two-party singlet scenario with settings `a, a'` on the first qubit and
/// `b, b'` on the second, and the CHSH functional
/// `E(X1,Y1) + E(X1,Y2) + E(X2,Y1) - E(X2,Y2)`.
///
/// Fails only for non-finite angles.
pub fn builtin_chsh(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Scenario> {
    if ![a, a_prime, b, b_prime].iter().all(|t| t.is_finite()) {
        return Err(Error::NonFinite {
            what: "measurement angle",
        });
    }
    let id2 = ComplexMatrix::identity(2)?;
    let first = |theta: f64| spin_direction(theta).tensor(&id2);
    let second = |theta: f64| id2.tensor(&spin_direction(theta));

    let mut observables = Registry::new();
    observables.insert(Observable::involution("X1", first(a)?)?)?;
    observables.insert(Observable::involution("X2", first(a_prime)?)?)?;
    observables.insert(Observable::involution("Y1", second(b)?)?)?;
    observables.insert(Observable::involution("Y2", second(b_prime)?)?)?;

    let mut contexts = Vec::new();
    for x in ["X1", "X2"] {
        for y in ["Y1", "Y2"] {
            contexts.push(Context::new(
                [x.to_string(), y.to_string()],
                &observables,
                DEFAULT_TOLERANCE,
            )?);
        }
    }

    let term = |x: &str, y: &str, coefficient: f64| FunctionalTerm {
        a: x.to_string(),
        b: y.to_string(),
        coefficient,
    };
    let functional = Functional {
        terms: vec![
            term("X1", "Y1", 1.0),
            term("X1", "Y2", 1.0),
            term("X2", "Y1", 1.0),
            term("X2", "Y2", -1.0),
        ],
    };

    // Left-hand events of the derived inequality P(X1=X2=Y2) <= P(X1=Y1) +
    // P(X1=Y2) + P(X2=Y1): jointly fixing X1 and X2 is not quantum-testable
    // at generic angles.
    let queries = vec![
        Query::Event {
            event: Event::from_pairs(&[("X1", 1), ("X2", 1), ("Y2", 1)])?,
        },
        Query::Event {
            event: Event::from_pairs(&[("X1", -1), ("X2", -1), ("Y2", -1)])?,
        },
    ];

    let scenario = Scenario {
        name: "chsh".to_string(),
        dim: 4,
        state: StateVector::from_reals(&[0.0, 1.0, -1.0, 0.0])?,
        observables,
        contexts,
        constraints: vec![],
        queries,
        functional: Some(functional),
        tolerance: DEFAULT_TOLERANCE,
        state_independent: false,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Convenience: the CHSH scenario at the maximally violating default angles.
pub fn builtin_chsh_default() -> Scenario {
    let [a, ap, b, bp] = default_chsh_angles();
    builtin_chsh(a, ap, b, bp).expect("default angles are finite")
}
