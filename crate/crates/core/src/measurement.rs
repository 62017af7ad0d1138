//! Projective measurement onto labelled vector sets over register subsets.
//!
//! A [`MeasurementBasis`] need not span the whole subspace of its registers;
//! it only has to cover the support of the states it measures. The
//! position bases on the line are an example: nine entangled vectors over a
//! 25-dimensional space.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{BasisIndex, RegisterId, RegisterLayout, StateVector};
use crate::tolerance;
use crate::walks::{ConfigKey, Protocol, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    pub label: String,
    /// Register values (in the basis' register order) and coefficients.
    pub components: Vec<(Vec<i32>, Complex64)>,
}

impl BasisVector {
    pub fn new(label: impl Into<String>, components: Vec<(Vec<i32>, Complex64)>) -> Self {
        Self { label: label.into(), components }
    }

    fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &BasisVector) -> Complex64 {
        let lookup: HashMap<&[i32], Complex64> =
            other.components.iter().map(|(k, c)| (k.as_slice(), *c)).collect();
        self.components
            .iter()
            .filter_map(|(k, c)| lookup.get(k.as_slice()).map(|d| c.conj() * d))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    registers: Vec<RegisterId>,
    vectors: Vec<BasisVector>,
}

impl MeasurementBasis {
    /// Checks that labels are unique and the vectors orthonormal.
    pub fn new(registers: Vec<RegisterId>, vectors: Vec<BasisVector>) -> Result<Self> {
        if registers.is_empty() || vectors.is_empty() {
            return Err(Error::InvalidBasis("basis needs registers and vectors".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.components.iter().any(|(k, _)| k.len() != registers.len()) {
                return Err(Error::InvalidBasis(format!("{} has components of the wrong arity", v.label)));
            }
            if (v.norm_sqr() - 1.0).abs() > tolerance::NORM {
                return Err(Error::InvalidBasis(format!("{} is not normalized", v.label)));
            }
            for w in &vectors[..i] {
                if w.label == v.label {
                    return Err(Error::InvalidBasis(format!("label {} appears twice", v.label)));
                }
                if w.inner(v).norm() > tolerance::AMPLITUDE {
                    return Err(Error::InvalidBasis(format!("{} and {} are not orthogonal", w.label, v.label)));
                }
            }
        }
        Ok(Self { registers, vectors })
    }

    pub fn registers(&self) -> &[RegisterId] {
        &self.registers
    }

    pub fn vectors(&self) -> &[BasisVector] {
        &self.vectors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.vectors.iter().map(|v| v.label.as_str())
    }

    pub fn vector(&self, label: &str) -> Result<&BasisVector> {
        self.vectors
            .iter()
            .find(|v| v.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest `|⟨u|v⟩ - δ_uv|` over all pairs.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.inner(v) - expect).norm());
            }
        }
        worst
    }

    fn slots(&self, layout: &RegisterLayout) -> Result<Vec<usize>> {
        self.registers.iter().map(|&r| layout.slot(r)).collect()
    }
}

/// Result of projecting onto one basis vector.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub label: String,
    pub probability: f64,
    /// Normalized projection. Measured registers stay in the layout, holding
    /// the chosen vector.
    pub post_state: StateVector,
}

/// Overlap of `state` with `vector ⊗ I`, keyed by the unmeasured register values.
fn partial_overlap(state: &StateVector, slots: &[usize], vector: &BasisVector) -> BTreeMap<Vec<i32>, Complex64> {
    let mut overlap: BTreeMap<Vec<i32>, Complex64> = BTreeMap::new();
    for (index, &amp) in state.terms() {
        let hit = vector
            .components
            .iter()
            .find(|(k, _)| k.iter().zip(slots).all(|(v, &s)| index.get(s) == *v));
        if let Some((_, c)) = hit {
            *overlap.entry(index.complement(slots)).or_default() += c.conj() * amp;
        }
    }
    overlap
}

fn merge(len: usize, slots: &[usize], measured: &[i32], rest: &[i32]) -> BasisIndex {
    let mut values = Vec::with_capacity(len);
    let mut rest = rest.iter();
    for i in 0..len {
        match slots.iter().position(|&s| s == i) {
            Some(p) => values.push(measured[p]),
            None => values.push(*rest.next().expect("rest has the remaining registers")),
        }
    }
    BasisIndex::new(values)
}

/// Projects `state` onto the vector labelled `chosen`.
pub fn measure_project(state: &StateVector, basis: &MeasurementBasis, chosen: &str) -> Result<OutcomeRecord> {
    let layout = state.layout();
    let slots = basis.slots(layout)?;
    let vector = basis.vector(chosen)?;
    let overlap = partial_overlap(state, &slots, vector);
    let probability: f64 = overlap.values().map(Complex64::norm_sqr).sum();
    if probability < tolerance::IMPOSSIBLE_OUTCOME {
        return Err(Error::ImpossibleOutcome { label: chosen.to_string(), probability });
    }
    let scale = 1.0 / probability.sqrt();
    let mut terms = Vec::with_capacity(overlap.len() * vector.components.len());
    for (rest, o) in &overlap {
        for (measured, c) in &vector.components {
            terms.push((merge(layout.len(), &slots, measured, rest), c * o * scale));
        }
    }
    let post_state = StateVector::from_terms(layout.clone(), terms)?;
    Ok(OutcomeRecord { label: chosen.to_string(), probability, post_state })
}

/// Like [`measure_project`], but the measured registers are removed from
/// the post-measurement state instead of being kept in the chosen vector.
pub fn measure_discard(state: &StateVector, basis: &MeasurementBasis, chosen: &str) -> Result<(f64, StateVector)> {
    let layout = state.layout();
    let slots = basis.slots(layout)?;
    let vector = basis.vector(chosen)?;
    let overlap = partial_overlap(state, &slots, vector);
    let probability: f64 = overlap.values().map(Complex64::norm_sqr).sum();
    if probability < tolerance::IMPOSSIBLE_OUTCOME {
        return Err(Error::ImpossibleOutcome { label: chosen.to_string(), probability });
    }
    let rest = Arc::new(layout.without(&basis.registers)?);
    let scale = 1.0 / probability.sqrt();
    let terms = overlap.into_iter().map(|(k, o)| (BasisIndex::new(k), o * scale)).collect();
    Ok((probability, StateVector::from_map(rest, terms)))
}

/// Probability of every vector in `basis`. Fails when the state has weight
/// outside the span of the basis.
pub fn outcome_distribution(state: &StateVector, basis: &MeasurementBasis) -> Result<Vec<(String, f64)>> {
    let slots = basis.slots(state.layout())?;
    let dist: Vec<(String, f64)> = basis
        .vectors
        .iter()
        .map(|v| {
            let p = partial_overlap(state, &slots, v).values().map(Complex64::norm_sqr).sum();
            (v.label.clone(), p)
        })
        .collect();
    let residual = state.norm_sqr() - dist.iter().map(|(_, p)| p).sum::<f64>();
    if residual > tolerance::AMPLITUDE {
        return Err(Error::ResidualSupport(residual));
    }
    Ok(dist)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two-vector basis on a single coin: `c0|0⟩ + c1|1⟩` and `c1|0⟩ - c0|1⟩`,
/// labelled `beta0/1` on A2 and `gamma0/1` on B2.
pub fn build_coin_basis(which: RegisterId, amps: (f64, f64)) -> Result<MeasurementBasis> {
    let prefix = match which {
        RegisterId::A2 => "beta",
        RegisterId::B2 => "gamma",
        other => return Err(Error::InvalidBasis(format!("no parameterized coin basis on {other}"))),
    };
    let (c0, c1) = amps;
    if (c0 * c0 + c1 * c1 - 1.0).abs() > tolerance::AMPLITUDE {
        return Err(Error::NotNormalized(c0, c1));
    }
    MeasurementBasis::new(
        vec![which],
        vec![
            BasisVector::new(format!("{prefix}0"), vec![(vec![0], real(c0)), (vec![1], real(c1))]),
            BasisVector::new(format!("{prefix}1"), vec![(vec![0], real(c1)), (vec![1], real(-c0))]),
        ],
    )
}

/// Computational basis on coin registers, labelled by bit strings (`"01"` is
/// the first register at 0 and the second at 1).
pub fn computational_basis(registers: &[RegisterId]) -> Result<MeasurementBasis> {
    let n = registers.len();
    let vectors = (0..1usize << n)
        .map(|bits| {
            let values: Vec<i32> = (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as i32).collect();
            let label: String = values.iter().map(|v| v.to_string()).collect();
            BasisVector::new(label, vec![(values, real(1.0))])
        })
        .collect();
    MeasurementBasis::new(registers.to_vec(), vectors)
}

fn single_kets(prefix: &str, kets: &[(i32, i32)]) -> Vec<BasisVector> {
    kets.iter()
        .enumerate()
        .map(|(i, &(a, b))| BasisVector::new(format!("{prefix}{i}"), vec![(vec![a, b], real(1.0))]))
        .collect()
}

/// Sign patterns on the kets `(a, b), (a, b'), (a', b), (a', b')`.
const FOUR_TERM_SIGNS: [[f64; 4]; 4] =
    [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];

fn four_term(label: String, alice: (i32, i32), bob: (i32, i32), signs: [f64; 4]) -> BasisVector {
    let kets = [(alice.0, bob.0), (alice.0, bob.1), (alice.1, bob.0), (alice.1, bob.1)];
    BasisVector::new(
        label,
        kets.iter().zip(signs).map(|(&(a, b), s)| (vec![a, b], real(0.5 * s))).collect(),
    )
}

fn sign_tag(signs: &[f64]) -> String {
    signs.iter().map(|&s| if s > 0.0 { '+' } else { '-' }).collect()
}

/// Position basis measured jointly on (A1, B1) for each protocol.
pub fn build_position_basis(protocol: Protocol, topology: Topology) -> MeasurementBasis {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = match (protocol, topology) {
        (Protocol::Uncontrolled, Topology::Line) => {
            let mut v = vec![BasisVector::new("00", vec![(vec![0, 0], real(1.0))])];
            for (tag, (a, b)) in [("02", ([0, 0], [2, -2])), ("20", ([2, -2], [0, 0]))] {
                for sign in [1.0, -1.0] {
                    v.push(BasisVector::new(
                        format!("{tag}[{}]", sign_tag(&[1.0, sign])),
                        vec![(vec![a[0], b[0]], real(s)), (vec![a[1], b[1]], real(s * sign))],
                    ));
                }
            }
            for signs in FOUR_TERM_SIGNS {
                v.push(four_term(format!("22[{}]", sign_tag(&signs)), (2, -2), (2, -2), signs));
            }
            v
        }
        (Protocol::Controlled, Topology::Line) => {
            let groups = [((3, -1), (3, -1)), ((3, -1), (1, -3)), ((1, -3), (3, -1)), ((1, -3), (1, -3))];
            groups
                .iter()
                .flat_map(|&(alice, bob)| FOUR_TERM_SIGNS.iter().map(move |&signs| (alice, bob, signs)))
                .enumerate()
                .map(|(i, (alice, bob, signs))| four_term(format!("alpha{i}"), alice, bob, signs))
                .collect()
        }
        (_, Topology::TwoVertex) => single_kets("alpha", &[(0, 0), (0, 1), (1, 0), (1, 1)]),
        (Protocol::Uncontrolled, Topology::Cycle4) => single_kets("alpha~", &[(2, 2), (2, 0), (0, 2), (0, 0)]),
        (Protocol::Controlled, Topology::Cycle4) => single_kets("alpha~", &[(3, 3), (3, 1), (1, 3), (1, 1)]),
    };
    MeasurementBasis::new(vec![RegisterId::A1, RegisterId::B1], vectors).expect("position bases are orthonormal")
}

pub fn position_basis_for(key: ConfigKey) -> MeasurementBasis {
    build_position_basis(key.protocol, key.topology)
}

/// Normalized product state of single-coin amplitudes, as a vector over a
/// coin-only layout in lexicographic order.
pub fn product_coin_vector(amps: &[(f64, f64)]) -> Vec<Complex64> {
    amps.iter().fold(vec![real(1.0)], |acc, &(c0, c1)| {
        acc.iter().flat_map(|&a| [a * c0, a * c1]).collect()
    })
}
