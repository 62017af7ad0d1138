//! Published walk states, used as fixtures for the simulator.
//!
//! Every printed state is an equal-weight superposition, so a block stores
//! only its kets and the normalization `N` (each amplitude is `+1/√N`).
//! Kets are written digit by digit with a leading `-` for negative line
//! positions, e.g. `2-20110` is A1=2, B1=-2, A2=0, A3=1, B2=1, B3=0.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{BasisIndex, StateVector};
use crate::walks::ConfigKey;

const WALK_STATES: &str = include_str!("../data/walk_states.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureKet {
    pub raw: String,
    pub values: Vec<i32>,
    /// The ket carries a minus sign in front of a zero.
    pub signed_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureState {
    pub key: ConfigKey,
    pub step: usize,
    pub normalization: u32,
    pub kets: Vec<FixtureKet>,
}

impl FixtureState {
    pub fn amplitude(&self) -> f64 {
        1.0 / f64::from(self.normalization).sqrt()
    }
}

pub fn parse_ket(raw: &str) -> std::result::Result<FixtureKet, String> {
    let mut values = Vec::new();
    let mut signed_zero = false;
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        let (negative, digit) = if c == '-' {
            (true, chars.next().ok_or_else(|| format!("dangling sign in {raw:?}"))?)
        } else {
            (false, c)
        };
        let d = digit.to_digit(10).ok_or_else(|| format!("unexpected {digit:?} in {raw:?}"))? as i32;
        signed_zero |= negative && d == 0;
        values.push(if negative { -d } else { d });
    }
    Ok(FixtureKet { raw: raw.to_string(), values, signed_zero })
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureState>> {
    let mut out: Vec<FixtureState> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| Error::Parse { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(header) = body.strip_prefix('@') {
            let f: Vec<&str> = header.split_whitespace().collect();
            if f.len() != 4 {
                return Err(err("header needs protocol, topology, step and normalization".into()));
            }
            let key = ConfigKey::new(f[0].parse().map_err(err)?, f[1].parse().map_err(err)?);
            let step = f[2].parse().map_err(|e| err(format!("step: {e}")))?;
            let normalization = f[3].parse().map_err(|e| err(format!("normalization: {e}")))?;
            out.push(FixtureState { key, step, normalization, kets: Vec::new() });
            continue;
        }
        let block = out.last_mut().ok_or_else(|| err("ket before the first header".into()))?;
        for token in body.split_whitespace() {
            block.kets.push(parse_ket(token).map_err(err)?);
        }
    }
    Ok(out)
}

/// All published walk states.
pub fn walk_fixtures() -> Vec<FixtureState> {
    parse_fixtures(WALK_STATES).expect("embedded walk states parse")
}

pub fn fixture(key: ConfigKey, step: usize) -> Option<FixtureState> {
    walk_fixtures().into_iter().find(|f| f.key == key && f.step == step)
}

/// Term-by-term comparison of a printed state with a simulated one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixtureDiff {
    /// Printed kets that do not fit the register layout.
    pub malformed: Vec<String>,
    /// Printed kets the simulation does not produce.
    pub only_in_fixture: Vec<String>,
    /// Simulated kets the printed state lacks, rendered in printed form.
    pub only_in_simulation: Vec<String>,
    /// Shared kets whose amplitudes differ: (ket, printed, simulated).
    pub amplitude_mismatches: Vec<(String, f64, Complex64)>,
    /// Kets with a sign in front of a zero position, read as unsigned.
    pub signed_zeros: Vec<String>,
}

impl FixtureDiff {
    /// True when every term agrees. Signed zeros are reported but do not
    /// count as differences.
    pub fn is_exact(&self) -> bool {
        self.malformed.is_empty()
            && self.only_in_fixture.is_empty()
            && self.only_in_simulation.is_empty()
            && self.amplitude_mismatches.is_empty()
    }

    pub fn difference_count(&self) -> usize {
        self.malformed.len() + self.only_in_fixture.len() + self.only_in_simulation.len() + self.amplitude_mismatches.len()
    }
}

impl fmt::Display for FixtureDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() && self.signed_zeros.is_empty() {
            return f.write_str("exact");
        }
        let mut parts = Vec::new();
        if !self.malformed.is_empty() {
            parts.push(format!("malformed {}", self.malformed.join(" ")));
        }
        if !self.only_in_fixture.is_empty() {
            parts.push(format!("printed only {}", self.only_in_fixture.join(" ")));
        }
        if !self.only_in_simulation.is_empty() {
            parts.push(format!("simulated only {}", self.only_in_simulation.join(" ")));
        }
        for (ket, want, got) in &self.amplitude_mismatches {
            parts.push(format!("{ket}: printed {want:.6}, simulated {got:.6}"));
        }
        if !self.signed_zeros.is_empty() {
            parts.push(format!("signed zero {}", self.signed_zeros.join(" ")));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Ket digits in printed form.
pub fn printed_ket(index: &BasisIndex) -> String {
    index.values().iter().map(i32::to_string).collect()
}

pub fn diff_fixture(fixture: &FixtureState, simulated: &StateVector, tolerance: f64) -> FixtureDiff {
    let mut diff = FixtureDiff::default();
    let layout = simulated.layout();
    let amp = fixture.amplitude();
    let mut printed = std::collections::BTreeSet::new();
    for ket in &fixture.kets {
        if ket.signed_zero {
            diff.signed_zeros.push(ket.raw.clone());
        }
        let index = BasisIndex::new(ket.values.clone());
        if !layout.contains(&index) {
            diff.malformed.push(ket.raw.clone());
            continue;
        }
        let got = simulated.amplitude(&index);
        if got.norm() <= crate::tolerance::ZERO_AMPLITUDE {
            diff.only_in_fixture.push(ket.raw.clone());
        } else if (got - amp).norm() > tolerance {
            diff.amplitude_mismatches.push((ket.raw.clone(), amp, got));
        }
        printed.insert(index);
    }
    for (index, _) in simulated.terms() {
        if !printed.contains(index) {
            diff.only_in_simulation.push(printed_ket(index));
        }
    }
    diff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::{build_walk_program, run_walk, Protocol, Topology};

    #[test]
    fn ket_parsing() {
        let k = parse_ket("2-20110").unwrap();
        assert_eq!(k.values, vec![2, -2, 0, 1, 1, 0]);
        assert!(!k.signed_zero);
        let z = parse_ket("-00101000").unwrap();
        assert_eq!(z.values, vec![0, 0, 1, 0, 1, 0, 0, 0]);
        assert!(z.signed_zero);
        assert!(parse_ket("12-").is_err());
        assert!(parse_ket("1a").is_err());
    }

    #[test]
    fn every_program_step_has_a_fixture() {
        let all = walk_fixtures();
        assert_eq!(all.len(), 30);
        for key in ConfigKey::ALL {
            for step in 1..=key.protocol.step_count() {
                assert!(all.iter().any(|f| f.key == key && f.step == step), "{key} step {step}");
            }
        }
    }

    #[test]
    fn first_line_step_matches() {
        let key = ConfigKey::new(Protocol::Uncontrolled, Topology::Line);
        let p = build_walk_program(key.protocol, key.topology);
        let d = diff_fixture(&fixture(key, 1).unwrap(), &run_walk(&p, 1).unwrap(), 1e-12);
        assert!(d.is_exact(), "{d}");
    }

    #[test]
    fn diff_flags_each_kind_of_difference() {
        let key = ConfigKey::new(Protocol::Uncontrolled, Topology::TwoVertex);
        let p = build_walk_program(key.protocol, key.topology);
        let fx = FixtureState {
            key,
            step: 1,
            normalization: 4,
            kets: vec![parse_ket("000000").unwrap(), parse_ket("100000").unwrap(), parse_ket("0000").unwrap()],
        };
        let d = diff_fixture(&fx, &run_walk(&p, 1).unwrap(), 1e-12);
        assert_eq!(d.malformed, vec!["0000"]);
        assert_eq!(d.only_in_fixture, vec!["100000"]);
        assert_eq!(d.only_in_simulation, vec!["101000"]);
        assert_eq!(d.amplitude_mismatches.len(), 1);
        assert_eq!(d.difference_count(), 4);
    }
}
