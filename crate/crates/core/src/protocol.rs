//! End-to-end runs of the state-preparation protocols: walk, measurement
//! cascade, Pauli correction and fidelity against the swapped target.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{RegisterId, StateVector};
use crate::measurement::{
    build_coin_basis, computational_basis, measure_discard, position_basis_for, product_coin_vector,
    MeasurementBasis,
};
use crate::operators::{apply_pauli_sequence, PauliClass, PauliWord};
use crate::tables::CorrectionTable;
use crate::tolerance;
use crate::walks::{build_walk_program, run_walk, ConfigKey, Protocol, Topology};

pub type Amplitudes = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub key: ConfigKey,
    /// State Alice knows; it ends up on Bob's coin B3.
    pub alice_target: Amplitudes,
    /// State Bob knows; it ends up on Alice's coin A3.
    pub bob_target: Amplitudes,
}

fn check_normalized((c0, c1): Amplitudes) -> Result<()> {
    if (c0 * c0 + c1 * c1 - 1.0).abs() > tolerance::AMPLITUDE || !c0.is_finite() || !c1.is_finite() {
        return Err(Error::NotNormalized(c0, c1));
    }
    Ok(())
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol, topology: Topology, alice_target: Amplitudes, bob_target: Amplitudes) -> Result<Self> {
        check_normalized(alice_target)?;
        check_normalized(bob_target)?;
        Ok(Self { key: ConfigKey::new(protocol, topology), alice_target, bob_target })
    }
}

/// Labels of one complete run of the measurement cascade.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeTuple {
    pub position: String,
    pub alice: String,
    pub bob: String,
    pub charlie: Option<String>,
}

impl OutcomeTuple {
    pub fn new(position: &str, alice: &str, bob: &str, charlie: Option<&str>) -> Self {
        Self {
            position: position.to_string(),
            alice: alice.to_string(),
            bob: bob.to_string(),
            charlie: charlie.map(str::to_string),
        }
    }
}

impl fmt::Display for OutcomeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.position, self.alice, self.bob)?;
        if let Some(c) = &self.charlie {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

/// Pauli words applied to A3 and B3.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correction {
    pub a3: PauliWord,
    pub b3: PauliWord,
}

impl Correction {
    pub fn new(a3: PauliWord, b3: PauliWord) -> Self {
        Self { a3, b3 }
    }

    pub fn classes(&self) -> (PauliClass, PauliClass) {
        (PauliClass::of(&self.a3), PauliClass::of(&self.b3))
    }

    pub fn from_classes(a3: PauliClass, b3: PauliClass) -> Self {
        Self { a3: a3.representative(), b3: b3.representative() }
    }

    /// The 16 class representatives in canonical order.
    pub fn all_classes() -> Vec<Correction> {
        PauliClass::ALL
            .iter()
            .flat_map(|&a| PauliClass::ALL.iter().map(move |&b| Correction::from_classes(a, b)))
            .collect()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut ops = self.a3.on(RegisterId::A3);
        ops.extend(self.b3.on(RegisterId::B3));
        apply_pauli_sequence(state, &ops)
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.a3, self.b3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub outcome: OutcomeTuple,
    pub correction: Correction,
    pub alice_target: Amplitudes,
    pub bob_target: Amplitudes,
    pub joint_probability: f64,
    pub fidelity: f64,
    /// Set when the cascade could not be run (impossible or unknown outcome).
    pub error: Option<String>,
}

impl VerificationResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.fidelity >= 1.0 - tolerance::FIDELITY
    }
}

/// Uniform angle on the circle, returned as `(cos θ, sin θ)`.
pub fn random_target<R: Rng + ?Sized>(rng: &mut R) -> Amplitudes {
    let theta = rng.gen_range(0.0..TAU);
    (theta.cos(), theta.sin())
}

/// `count` (alice, bob) target pairs from a seeded generator.
pub fn random_target_pairs(seed: u64, count: usize) -> Vec<(Amplitudes, Amplitudes)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (random_target(&mut rng), random_target(&mut rng))).collect()
}

/// `(b₀|0⟩ + b₁|1⟩)_{A3} ⊗ (a₀|0⟩ + a₁|1⟩)_{B3}` in (A3, B3) lexicographic order.
pub fn swapped_target(alice: Amplitudes, bob: Amplitudes) -> Vec<Complex> {
    product_coin_vector(&[bob, alice])
}

type Complex = num_complex::Complex64;

/// Fidelity of the (possibly mixed) reduced state on (A3, B3) with the swapped target.
pub fn target_fidelity(state: &StateVector, alice: Amplitudes, bob: Amplitudes) -> Result<f64> {
    let rho = state.reduced_density(&[RegisterId::A3, RegisterId::B3])?;
    let f = rho.expectation(&swapped_target(alice, bob)) / rho.trace();
    Ok(f.clamp(0.0, 1.0))
}

/// Every outcome tuple of a protocol, in canonical order: position vector,
/// then Alice's coin, Bob's coin and Charlie's bits.
pub fn outcome_space(key: ConfigKey) -> Vec<OutcomeTuple> {
    let positions: Vec<String> = position_basis_for(key).labels().map(str::to_string).collect();
    let charlie: Vec<Option<&str>> = match key.protocol {
        Protocol::Uncontrolled => vec![None],
        Protocol::Controlled => ["00", "01", "10", "11"].into_iter().map(Some).collect(),
    };
    let mut out = Vec::new();
    for p in &positions {
        for a in ["beta0", "beta1"] {
            for b in ["gamma0", "gamma1"] {
                for c in &charlie {
                    out.push(OutcomeTuple::new(p, a, b, *c));
                }
            }
        }
    }
    out
}

/// Position of each outcome in [`outcome_space`].
pub fn canonical_rank(key: ConfigKey) -> HashMap<OutcomeTuple, usize> {
    outcome_space(key).into_iter().enumerate().map(|(i, o)| (o, i)).collect()
}

/// Outcome of the cascade before correction.
#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub joint_probability: f64,
    /// State of the registers that were not measured.
    pub post_state: StateVector,
}

/// Caches the target-independent part of a protocol: the walked state and
/// its position-measurement outcomes.
#[derive(Debug, Clone)]
pub struct ProtocolRunner {
    key: ConfigKey,
    walked: StateVector,
    position_basis: MeasurementBasis,
    charlie_basis: Option<MeasurementBasis>,
    positions: HashMap<String, Option<(f64, StateVector)>>,
}

impl ProtocolRunner {
    pub fn new(key: ConfigKey) -> Result<Self> {
        let program = build_walk_program(key.protocol, key.topology);
        let walked = run_walk(&program, program.steps.len())?;
        let position_basis = position_basis_for(key);
        let charlie_basis = match key.protocol {
            Protocol::Uncontrolled => None,
            Protocol::Controlled => Some(computational_basis(&[RegisterId::C1, RegisterId::C2])?),
        };
        let mut positions = HashMap::new();
        for label in position_basis.labels() {
            let entry = match measure_discard(&walked, &position_basis, label) {
                Ok(rec) => Some(rec),
                Err(Error::ImpossibleOutcome { .. }) => None,
                Err(e) => return Err(e),
            };
            positions.insert(label.to_string(), entry);
        }
        Ok(Self { key, walked, position_basis, charlie_basis, positions })
    }

    pub fn key(&self) -> ConfigKey {
        self.key
    }

    pub fn walked_state(&self) -> &StateVector {
        &self.walked
    }

    pub fn position_basis(&self) -> &MeasurementBasis {
        &self.position_basis
    }

    /// Probability of a position outcome on its own.
    pub fn position_probability(&self, label: &str) -> Result<f64> {
        match self.positions.get(label) {
            Some(entry) => Ok(entry.as_ref().map_or(0.0, |(p, _)| *p)),
            None => Err(Error::UnknownLabel(label.to_string())),
        }
    }

    fn position_state(&self, label: &str) -> Result<(f64, &StateVector)> {
        match self.positions.get(label) {
            Some(Some((p, s))) => Ok((*p, s)),
            Some(None) => Err(Error::ImpossibleOutcome { label: label.to_string(), probability: 0.0 }),
            None => Err(Error::UnknownLabel(label.to_string())),
        }
    }

    /// Position, A2 and B2 measurements, leaving Charlie's coins untouched.
    pub fn partial_cascade(
        &self,
        alice: Amplitudes,
        bob: Amplitudes,
        position: &str,
        alice_label: &str,
        bob_label: &str,
    ) -> Result<CascadeResult> {
        let (p0, state) = self.position_state(position)?;
        let (pa, state) = measure_discard(state, &build_coin_basis(RegisterId::A2, alice)?, alice_label)?;
        let (pb, state) = measure_discard(&state, &build_coin_basis(RegisterId::B2, bob)?, bob_label)?;
        Ok(CascadeResult { joint_probability: p0 * pa * pb, post_state: state })
    }

    /// The whole cascade in fixed order: positions, A2, B2, then Charlie.
    pub fn cascade(&self, alice: Amplitudes, bob: Amplitudes, outcome: &OutcomeTuple) -> Result<CascadeResult> {
        match (&self.charlie_basis, &outcome.charlie) {
            (None, Some(_)) => {
                return Err(Error::InvalidOutcome(format!("{outcome}: uncontrolled outcomes have no controller bits")))
            }
            (Some(_), None) => {
                return Err(Error::InvalidOutcome(format!("{outcome}: controlled outcomes need controller bits")))
            }
            _ => {}
        }
        let partial = self.partial_cascade(alice, bob, &outcome.position, &outcome.alice, &outcome.bob)?;
        match (&self.charlie_basis, &outcome.charlie) {
            (Some(basis), Some(bits)) => {
                let (pc, state) = measure_discard(&partial.post_state, basis, bits)?;
                Ok(CascadeResult { joint_probability: partial.joint_probability * pc, post_state: state })
            }
            _ => Ok(partial),
        }
    }

    /// Joint probability of an outcome; zero for impossible outcomes.
    pub fn success_probability(&self, alice: Amplitudes, bob: Amplitudes, outcome: &OutcomeTuple) -> Result<f64> {
        match self.cascade(alice, bob, outcome) {
            Ok(r) => Ok(r.joint_probability),
            Err(Error::ImpossibleOutcome { .. }) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    /// Fidelity after applying `correction`, with the cascade probability.
    pub fn corrected_fidelity(
        &self,
        alice: Amplitudes,
        bob: Amplitudes,
        outcome: &OutcomeTuple,
        correction: &Correction,
    ) -> Result<(f64, f64)> {
        let r = self.cascade(alice, bob, outcome)?;
        let fixed = correction.apply(&r.post_state)?;
        Ok((r.joint_probability, target_fidelity(&fixed, alice, bob)?))
    }

    pub fn run(
        &self,
        alice: Amplitudes,
        bob: Amplitudes,
        outcome: &OutcomeTuple,
        correction: &Correction,
    ) -> VerificationResult {
        let (joint_probability, fidelity, error) = match self.corrected_fidelity(alice, bob, outcome, correction) {
            Ok((p, f)) => (p, f, None),
            Err(e) => (0.0, 0.0, Some(e.to_string())),
        };
        VerificationResult {
            outcome: outcome.clone(),
            correction: correction.clone(),
            alice_target: alice,
            bob_target: bob,
            joint_probability,
            fidelity,
            error,
        }
    }

    /// Best fidelity any of the 16 correction classes reaches when Charlie's
    /// coins are traced out instead of measured.
    pub fn fidelity_without_controller(
        &self,
        alice: Amplitudes,
        bob: Amplitudes,
        position: &str,
        alice_label: &str,
        bob_label: &str,
    ) -> Result<f64> {
        let partial = self.partial_cascade(alice, bob, position, alice_label, bob_label)?;
        let mut best: f64 = 0.0;
        for c in Correction::all_classes() {
            best = best.max(target_fidelity(&c.apply(&partial.post_state)?, alice, bob)?);
        }
        Ok(best)
    }
}

pub fn run_protocol_outcome(
    config: &ProtocolConfig,
    outcome: &OutcomeTuple,
    correction: &Correction,
) -> Result<VerificationResult> {
    let runner = ProtocolRunner::new(config.key)?;
    let (joint_probability, fidelity) =
        runner.corrected_fidelity(config.alice_target, config.bob_target, outcome, correction)?;
    Ok(VerificationResult {
        outcome: outcome.clone(),
        correction: correction.clone(),
        alice_target: config.alice_target,
        bob_target: config.bob_target,
        joint_probability,
        fidelity,
        error: None,
    })
}

pub fn success_probability(config: &ProtocolConfig, outcome: &OutcomeTuple) -> Result<f64> {
    ProtocolRunner::new(config.key)?.success_probability(config.alice_target, config.bob_target, outcome)
}

/// Runs every row of `table` against `trials` seeded random target pairs.
/// Results come back in canonical outcome order, then trial order, whatever
/// the thread scheduling.
pub fn verify_table(table: &CorrectionTable, trials: usize, seed: u64) -> Result<Vec<VerificationResult>> {
    let runner = ProtocolRunner::new(table.key)?;
    let targets = random_target_pairs(seed, trials);
    let rank = canonical_rank(table.key);
    let mut rows: Vec<(usize, &OutcomeTuple, &Correction)> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, (o, c))| (rank.get(o).copied().unwrap_or(rank.len() + i), o, c))
        .collect();
    rows.sort_by_key(|(r, _, _)| *r);
    let results: Vec<Vec<VerificationResult>> = rows
        .par_iter()
        .map(|(_, outcome, correction)| {
            targets.iter().map(|&(a, b)| runner.run(a, b, outcome, correction)).collect()
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

/// Per-row aggregate of [`verify_table`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSummary {
    pub outcome: OutcomeTuple,
    pub correction: Correction,
    pub trials: usize,
    pub failures: usize,
    pub min_fidelity: f64,
    pub min_probability: f64,
    pub max_probability: f64,
    pub error: Option<String>,
}

impl RowSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Groups consecutive results of the same row.
pub fn summarize(results: &[VerificationResult]) -> Vec<RowSummary> {
    let mut out: Vec<RowSummary> = Vec::new();
    for r in results {
        let same_row = out.last().is_some_and(|s| s.outcome == r.outcome && s.correction == r.correction);
        if !same_row {
            out.push(RowSummary {
                outcome: r.outcome.clone(),
                correction: r.correction.clone(),
                trials: 0,
                failures: 0,
                min_fidelity: f64::INFINITY,
                min_probability: f64::INFINITY,
                max_probability: f64::NEG_INFINITY,
                error: None,
            });
        }
        let s = out.last_mut().expect("pushed above");
        s.trials += 1;
        s.failures += usize::from(!r.passed());
        s.min_fidelity = s.min_fidelity.min(r.fidelity);
        s.min_probability = s.min_probability.min(r.joint_probability);
        s.max_probability = s.max_probability.max(r.joint_probability);
        if s.error.is_none() {
            s.error.clone_from(&r.error);
        }
    }
    out
}

/// Entanglement left on the coins once the positions are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinEntanglement {
    /// Entrywise distance of ρ(A2,A3) from I/4; zero means four equal
    /// Schmidt coefficients across Alice's and Bob's coins.
    pub alice_bob_cut_deviation: f64,
    /// Purity of ρ(A2,B3) and ρ(B2,A3).
    pub pair_purity: (f64, f64),
}

impl CoinEntanglement {
    pub fn is_maximal(&self) -> bool {
        self.alice_bob_cut_deviation < tolerance::AMPLITUDE
            && (self.pair_purity.0 - 1.0).abs() < tolerance::AMPLITUDE
            && (self.pair_purity.1 - 1.0).abs() < tolerance::AMPLITUDE
    }
}

pub fn coin_entanglement(state: &StateVector) -> Result<CoinEntanglement> {
    let cut = state.reduced_density(&[RegisterId::A2, RegisterId::A3])?;
    let p1 = state.reduced_density(&[RegisterId::A2, RegisterId::B3])?.purity();
    let p2 = state.reduced_density(&[RegisterId::B2, RegisterId::A3])?.purity();
    Ok(CoinEntanglement { alice_bob_cut_deviation: cut.distance_from_maximally_mixed(), pair_purity: (p1, p2) })
}
