//! Seeded Monte Carlo measurement records for one context.
//!
//! Draws are i.i.d. from the exact joint distribution, computed once up
//! front; sequential projective measurement would give identical statistics
//! on a commuting set and is not simulated.
//!
//! Generator contract: `ChaCha8Rng` seeded with `seed_from_u64(seed)`; each
//! draw maps the top 53 bits of `next_u64()` to a double in `[0, 1)` via
//! `(x >> 11) * 2^-53` and selects a tuple by inverse CDF. Seeds are portable
//! across platforms and releases under this contract.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quantum::{commuting_classical_model, Context, Outcome};
use crate::scenario::Scenario;

/// Counted outcome tuples for one context. Every possible tuple appears as a
/// key, including tuples that were never drawn, so exports have a fixed row
/// set regardless of seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRun {
    context: Vec<String>,
    shots: u64,
    seed: u64,
    counts: BTreeMap<Vec<Outcome>, u64>,
}

impl SampleRun {
    /// Context member ids in sorted order; tuple positions follow this order.
    pub fn context(&self) -> &[String] {
        &self.context
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// All outcome tuples with their counts; counts sum to `shots`.
    pub fn counts(&self) -> &BTreeMap<Vec<Outcome>, u64> {
        &self.counts
    }

    /// Observed frequency of one tuple.
    pub fn frequency(&self, tuple: &[Outcome]) -> f64 {
        let hits = self.counts.get(tuple).copied().unwrap_or(0);
        hits as f64 / self.shots as f64
    }

    /// Stable text key for a tuple: outcomes joined by `|`, e.g. `0|1`.
    pub fn render_tuple(tuple: &[Outcome]) -> String {
        let parts: Vec<String> = tuple.iter().map(|o| o.to_string()).collect();
        parts.join("|")
    }

    /// Counts summed over every member except `id`, keyed by its outcome.
    pub fn marginal_counts(&self, id: &str) -> Result<BTreeMap<Outcome, u64>> {
        let position = self
            .context
            .iter()
            .position(|m| m == id)
            .ok_or_else(|| Error::UnknownObservable { id: id.to_string() })?;
        let mut out = BTreeMap::new();
        for (tuple, count) in &self.counts {
            *out.entry(tuple[position]).or_insert(0) += count;
        }
        Ok(out)
    }
}

/// Draw `shots` outcome tuples for `context` from the exact joint
/// distribution of the scenario's state. Identical inputs give identical
/// counts, byte for byte.
pub fn sample(scenario: &Scenario, context: &Context, shots: u64, seed: u64) -> Result<SampleRun> {
    if shots == 0 {
        return Err(Error::InvalidArgument {
            what: "shot count".to_string(),
            why: "at least one shot is required".to_string(),
        });
    }
    let ids: Vec<String> = context.members().iter().cloned().collect();
    let dist = commuting_classical_model(
        &scenario.state,
        &ids,
        &scenario.observables,
        scenario.tolerance,
    )?;

    let mut counts: BTreeMap<Vec<Outcome>, u64> = dist
        .entries()
        .iter()
        .map(|(tuple, _)| (tuple.clone(), 0))
        .collect();

    // Inverse CDF over the model's tuple order. The running total is within
    // rounding of 1; scaling draws by it keeps the final interval closed.
    let mut cdf = Vec::with_capacity(dist.entries().len());
    let mut acc = 0.0;
    for (_, p) in dist.entries() {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let scaled = u * total;
        let idx = cdf.partition_point(|&c| c <= scaled).min(cdf.len() - 1);
        let tuple = &dist.entries()[idx].0;
        *counts.get_mut(tuple).expect("tuple preinserted") += 1;
    }

    Ok(SampleRun {
        context: ids,
        shots,
        seed,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin_hardy;
    use crate::matrix::StateVector;
    use crate::quantum::{Observable, Registry};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn hardy_context(ids: &[&str]) -> (Scenario, Context) {
        let scenario = builtin_hardy();
        let context = Context::new(
            ids.iter().map(|s| s.to_string()),
            &scenario.observables,
            scenario.tolerance,
        )
        .unwrap();
        (scenario, context)
    }

    #[test]
    fn same_seed_reproduces_counts_exactly() {
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let first = sample(&scenario, &context, 5_000, 42).unwrap();
        let second = sample(&scenario, &context, 5_000, 42).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn different_seeds_give_different_records() {
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let first = sample(&scenario, &context, 65_536, 1).unwrap();
        let second = sample(&scenario, &context, 65_536, 2).unwrap();
        assert_ne!(first.counts(), second.counts());
    }

    #[test]
    fn counts_cover_every_tuple_and_sum_to_shots() {
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let run = sample(&scenario, &context, 10_000, 3).unwrap();
        assert_eq!(run.counts().len(), 4);
        assert_eq!(run.counts().values().sum::<u64>(), 10_000);
        assert_eq!(run.context(), ["P1", "P2"]);
    }

    #[test]
    fn one_shot_lands_on_exactly_one_tuple() {
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let run = sample(&scenario, &context, 1, 9).unwrap();
        assert_eq!(run.counts().values().sum::<u64>(), 1);
        assert_eq!(run.counts().values().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn eigenstate_context_is_deterministic() {
        let mut observables = Registry::new();
        observables
            .insert(
                Observable::projector("A", StateVector::from_reals(&[1.0, 0.0]).unwrap()).unwrap(),
            )
            .unwrap();
        let scenario = Scenario {
            name: "pointer".to_string(),
            dim: 2,
            state: StateVector::from_reals(&[1.0, 0.0]).unwrap(),
            observables,
            contexts: Vec::new(),
            constraints: Vec::new(),
            queries: Vec::new(),
            functional: None,
            tolerance: 1e-9,
            state_independent: false,
        };
        let context = Context::new(
            ["A".to_string()],
            &scenario.observables,
            scenario.tolerance,
        )
        .unwrap();
        let run = sample(&scenario, &context, 1_000, 4).unwrap();
        assert_eq!(run.counts()[&vec![1]], 1_000);
        assert_eq!(run.counts()[&vec![0]], 0);
    }

    #[test]
    fn pair_frequency_sits_near_its_probability() {
        // P(P1=0, P2=1) = 2/3; 3 sigma at 60000 shots.
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let run = sample(&scenario, &context, 60_000, 42).unwrap();
        let p = 2.0 / 3.0;
        let sigma = (p * (1.0 - p) / 60_000.0_f64).sqrt();
        assert!((run.frequency(&[0, 1]) - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn every_tuple_frequency_converges_at_scale() {
        // Exact pair distribution: (0,0) 2/9, (0,1) 2/3, (1,0) 1/9, (1,1) 0.
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        let shots = 1_000_000u64;
        let run = sample(&scenario, &context, shots, 42).unwrap();
        let expected = [
            (vec![0, 0], 2.0 / 9.0),
            (vec![0, 1], 2.0 / 3.0),
            (vec![1, 0], 1.0 / 9.0),
            (vec![1, 1], 0.0),
        ];
        for (tuple, p) in expected {
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            let err = (run.frequency(&tuple) - p).abs();
            assert!(
                err <= 5.0 * sigma + f64::EPSILON,
                "tuple {tuple:?}: error {err}, sigma {sigma}"
            );
        }
    }

    #[test]
    fn marginal_counts_match_a_direct_run_in_distribution() {
        let (scenario, pair) = hardy_context(&["P1", "P2"]);
        let single = Context::new(
            ["P1".to_string()],
            &scenario.observables,
            scenario.tolerance,
        )
        .unwrap();
        let shots = 100_000u64;
        let joint = sample(&scenario, &pair, shots, 5).unwrap();
        let direct = sample(&scenario, &single, shots, 6).unwrap();

        let marginal = joint.marginal_counts("P1").unwrap();
        let direct_counts = direct.marginal_counts("P1").unwrap();

        // Two-sample chi-square over the P1 outcomes, 1 degree of freedom.
        let mut stat = 0.0;
        let total = (2 * shots) as f64;
        for outcome in [0, 1] {
            let a = marginal.get(&outcome).copied().unwrap_or(0) as f64;
            let b = direct_counts.get(&outcome).copied().unwrap_or(0) as f64;
            let col = a + b;
            for observed in [a, b] {
                let expected = col * shots as f64 / total;
                stat += (observed - expected).powi(2) / expected;
            }
        }
        let p_value = 1.0 - ChiSquared::new(1.0).unwrap().cdf(stat);
        assert!(p_value > 0.001, "chi-square {stat}, p {p_value}");
    }

    #[test]
    fn zero_shots_are_rejected() {
        let (scenario, context) = hardy_context(&["P1", "P2"]);
        assert!(matches!(
            sample(&scenario, &context, 0, 1),
            Err(Error::InvalidArgument { .. })
        ));
    }

    #[test]
    fn oversized_contexts_are_rejected_before_enumeration() {
        let mut observables = Registry::new();
        let ray = StateVector::from_reals(&[1.0, 0.0]).unwrap();
        let mut ids = Vec::new();
        for i in 0..21 {
            let id = format!("A{i:02}");
            observables
                .insert(Observable::projector(&id, ray.clone()).unwrap())
                .unwrap();
            ids.push(id);
        }
        let scenario = Scenario {
            name: "wide".to_string(),
            dim: 2,
            state: ray,
            observables,
            contexts: Vec::new(),
            constraints: Vec::new(),
            queries: Vec::new(),
            functional: None,
            tolerance: 1e-9,
            state_independent: false,
        };
        let context = Context::new(
            ids.iter().cloned(),
            &scenario.observables,
            scenario.tolerance,
        )
        .unwrap();
        assert!(matches!(
            sample(&scenario, &context, 10, 0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
