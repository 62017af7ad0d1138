//! The fixed walk programs driving each protocol variant.
//!
//! Every step applies a Hadamard to one coin and then shifts a walker
//! conditioned on that same coin:
//!
//! | step | coin | walker |
//! |------|------|--------|
//! | 1    | A2   | A1     |
//! | 2    | B2   | B1     |
//! | 3    | A3   | B1     |
//! | 4    | B3   | A1     |
//! | 5    | C1   | A1     |
//! | 6    | C2   | B1     |
//!
//! Steps 5 and 6 only exist in the controlled protocol.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{RegisterDescriptor, RegisterId, RegisterLayout, StateVector};
use crate::operators::{apply_conditional_shift, apply_hadamard, ConditionalShiftSpec, ShiftKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Uncontrolled,
    Controlled,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Uncontrolled, Protocol::Controlled];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Uncontrolled => "uncontrolled",
            Protocol::Controlled => "controlled",
        }
    }

    pub fn step_count(self) -> usize {
        match self {
            Protocol::Uncontrolled => 4,
            Protocol::Controlled => 6,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uncontrolled" => Ok(Protocol::Uncontrolled),
            "controlled" => Ok(Protocol::Controlled),
            other => Err(format!("unknown protocol {other:?} (expected uncontrolled or controlled)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topology {
    Line,
    TwoVertex,
    Cycle4,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Line, Topology::TwoVertex, Topology::Cycle4];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Line => "line",
            Topology::TwoVertex => "k2",
            Topology::Cycle4 => "c4",
        }
    }

    pub fn shift_kind(self) -> ShiftKind {
        match self {
            Topology::Line => ShiftKind::Line,
            Topology::TwoVertex => ShiftKind::TwoVertex,
            Topology::Cycle4 => ShiftKind::Cycle4,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "line" => Ok(Topology::Line),
            "k2" => Ok(Topology::TwoVertex),
            "c4" => Ok(Topology::Cycle4),
            other => Err(format!("unknown topology {other:?} (expected line, k2 or c4)")),
        }
    }
}

/// A protocol/topology pair; identifies a walk program, a position basis
/// and a correction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigKey {
    pub protocol: Protocol,
    pub topology: Topology,
}

impl ConfigKey {
    pub const ALL: [ConfigKey; 6] = [
        ConfigKey::new(Protocol::Uncontrolled, Topology::Line),
        ConfigKey::new(Protocol::Uncontrolled, Topology::TwoVertex),
        ConfigKey::new(Protocol::Uncontrolled, Topology::Cycle4),
        ConfigKey::new(Protocol::Controlled, Topology::Line),
        ConfigKey::new(Protocol::Controlled, Topology::TwoVertex),
        ConfigKey::new(Protocol::Controlled, Topology::Cycle4),
    ];

    pub const fn new(protocol: Protocol, topology: Topology) -> Self {
        Self { protocol, topology }
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.protocol, self.topology)
    }
}

/// Register layout for a protocol. Line windows are the smallest that never
/// wrap: each walker is shifted twice without a controller and three times
/// with one.
pub fn layout_for(key: ConfigKey) -> Arc<RegisterLayout> {
    let position = |id| match key.topology {
        Topology::Line => RegisterDescriptor::line(id, key.protocol.step_count() as i32 / 2),
        Topology::TwoVertex => RegisterDescriptor::cycle(id, 2),
        Topology::Cycle4 => RegisterDescriptor::cycle(id, 4),
    };
    let mut registers = vec![position(RegisterId::A1), position(RegisterId::B1)];
    let coins: &[RegisterId] = match key.protocol {
        Protocol::Uncontrolled => &[RegisterId::A2, RegisterId::A3, RegisterId::B2, RegisterId::B3],
        Protocol::Controlled => &[
            RegisterId::A2,
            RegisterId::A3,
            RegisterId::B2,
            RegisterId::B3,
            RegisterId::C1,
            RegisterId::C2,
        ],
    };
    registers.extend(coins.iter().map(|&c| RegisterDescriptor::coin(c)));
    Arc::new(RegisterLayout::new(registers).expect("protocol layouts are valid"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkStep {
    pub hadamard_coin: RegisterId,
    pub shift: ConditionalShiftSpec,
}

#[derive(Debug, Clone)]
pub struct WalkProgram {
    pub key: ConfigKey,
    pub layout: Arc<RegisterLayout>,
    pub steps: Vec<WalkStep>,
}

const WIRING: [(RegisterId, RegisterId); 6] = [
    (RegisterId::A2, RegisterId::A1),
    (RegisterId::B2, RegisterId::B1),
    (RegisterId::A3, RegisterId::B1),
    (RegisterId::B3, RegisterId::A1),
    (RegisterId::C1, RegisterId::A1),
    (RegisterId::C2, RegisterId::B1),
];

pub fn build_walk_program(protocol: Protocol, topology: Topology) -> WalkProgram {
    let key = ConfigKey::new(protocol, topology);
    let steps = WIRING[..protocol.step_count()]
        .iter()
        .map(|&(coin, walker)| WalkStep {
            hadamard_coin: coin,
            shift: ConditionalShiftSpec::new(walker, coin, topology.shift_kind()),
        })
        .collect();
    WalkProgram { key, layout: layout_for(key), steps }
}

impl WalkProgram {
    pub fn initial_state(&self) -> StateVector {
        StateVector::initial(self.layout.clone())
    }

    pub fn apply_step(&self, state: &StateVector, step: usize) -> Result<StateVector> {
        let s = &self.steps[step];
        let flipped = apply_hadamard(state, s.hadamard_coin)?;
        apply_conditional_shift(&flipped, &s.shift)
    }

    /// States after 0, 1, …, `steps.len()` steps.
    pub fn trace(&self) -> Result<Vec<StateVector>> {
        let mut states = vec![self.initial_state()];
        for step in 0..self.steps.len() {
            let next = self.apply_step(states.last().expect("non-empty"), step)?;
            states.push(next);
        }
        Ok(states)
    }
}

/// State after the first `upto` steps.
pub fn run_walk(program: &WalkProgram, upto: usize) -> Result<StateVector> {
    if upto > program.steps.len() {
        return Err(Error::StepOutOfRange { upto, steps: program.steps.len() });
    }
    let mut state = program.initial_state();
    for step in 0..upto {
        state = program.apply_step(&state, step)?;
    }
    Ok(state)
}
