//! Coin and shift operators.
//!
//! Conditional shifts act by relabelling basis terms, so they are exact and
//! cost one pass over the nonzero amplitudes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{RegisterId, RegisterKind, StateVector};

/// Graph the walker moves on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftKind {
    /// Coin 0 steps right, coin 1 steps left.
    Line,
    /// Coin 0 stays, coin 1 hops to the other vertex.
    TwoVertex,
    /// Coin 0 steps to `i + 1 mod 4`, coin 1 to `i - 1 mod 4`.
    Cycle4,
}

impl ShiftKind {
    fn name(self) -> &'static str {
        match self {
            ShiftKind::Line => "a line shift",
            ShiftKind::TwoVertex => "a two-vertex shift",
            ShiftKind::Cycle4 => "a 4-cycle shift",
        }
    }

    fn accepts(self, kind: RegisterKind) -> bool {
        matches!(
            (self, kind),
            (ShiftKind::Line, RegisterKind::PositionLine { .. })
                | (ShiftKind::TwoVertex, RegisterKind::PositionCycle { n: 2 })
                | (ShiftKind::Cycle4, RegisterKind::PositionCycle { n: 4 })
        )
    }

    /// New position after one step, or after its inverse when `adjoint` is set.
    fn step(self, position: i32, coin: i32, adjoint: bool) -> i32 {
        let forward = (coin == 0) != adjoint;
        match self {
            ShiftKind::Line => position + if forward { 1 } else { -1 },
            ShiftKind::TwoVertex => {
                if coin == 0 {
                    position
                } else {
                    1 - position
                }
            }
            ShiftKind::Cycle4 => (position + if forward { 1 } else { 3 }).rem_euclid(4),
        }
    }
}

/// Shift `target_position` according to the value of `control_coin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionalShiftSpec {
    pub target_position: RegisterId,
    pub control_coin: RegisterId,
    pub kind: ShiftKind,
}

impl ConditionalShiftSpec {
    pub fn new(target_position: RegisterId, control_coin: RegisterId, kind: ShiftKind) -> Self {
        Self { target_position, control_coin, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Z,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliAxis::X => "X",
            PauliAxis::Z => "Z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliOp {
    pub axis: PauliAxis,
    pub target: RegisterId,
}

impl PauliOp {
    pub fn x(target: RegisterId) -> Self {
        Self { axis: PauliAxis::X, target }
    }

    pub fn z(target: RegisterId) -> Self {
        Self { axis: PauliAxis::Z, target }
    }
}

/// A product of Paulis on one qubit, applied left to right. The empty word
/// is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(pub Vec<PauliAxis>);

impl PauliWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn on(&self, target: RegisterId) -> Vec<PauliOp> {
        self.0.iter().map(|&axis| PauliOp { axis, target }).collect()
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        self.0.iter().try_for_each(|a| write!(f, "{a}"))
    }
}

impl FromStr for PauliWord {
    type Err = String;

    /// Words over `{I, X, Z}`; `I` letters are identities and dropped.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.is_empty() {
            return Err("empty Pauli word".into());
        }
        s.chars()
            .filter(|&c| c != 'I')
            .map(|c| match c {
                'X' => Ok(PauliAxis::X),
                'Z' => Ok(PauliAxis::Z),
                other => Err(format!("unexpected Pauli letter {other:?} in {s:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PauliWord)
    }
}

/// A Pauli word modulo global phase. On one qubit every product of X and Z
/// is proportional to one of I, X, Z or XZ, fixed by the parities of its X
/// and Z counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliClass {
    I,
    X,
    Z,
    XZ,
}

impl PauliClass {
    pub const ALL: [PauliClass; 4] = [PauliClass::I, PauliClass::X, PauliClass::Z, PauliClass::XZ];

    pub fn of(word: &PauliWord) -> Self {
        let xs = word.0.iter().filter(|&&a| a == PauliAxis::X).count() % 2 == 1;
        let zs = word.0.iter().filter(|&&a| a == PauliAxis::Z).count() % 2 == 1;
        match (xs, zs) {
            (false, false) => PauliClass::I,
            (true, false) => PauliClass::X,
            (false, true) => PauliClass::Z,
            (true, true) => PauliClass::XZ,
        }
    }

    /// Shortest word in the class.
    pub fn representative(self) -> PauliWord {
        PauliWord(match self {
            PauliClass::I => vec![],
            PauliClass::X => vec![PauliAxis::X],
            PauliClass::Z => vec![PauliAxis::Z],
            PauliClass::XZ => vec![PauliAxis::X, PauliAxis::Z],
        })
    }
}

impl fmt::Display for PauliClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.representative().fmt(f)
    }
}

fn coin_slot(state: &StateVector, coin: RegisterId) -> Result<usize> {
    let slot = state.layout().slot(coin)?;
    if !state.layout().registers()[slot].kind.is_coin() {
        return Err(Error::NotACoin(coin));
    }
    Ok(slot)
}

/// Hadamard on one coin register.
pub fn apply_hadamard(state: &StateVector, coin: RegisterId) -> Result<StateVector> {
    let slot = coin_slot(state, coin)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out: BTreeMap<_, Complex64> = BTreeMap::new();
    for (index, &amp) in state.terms() {
        let sign = if index.get(slot) == 0 { 1.0 } else { -1.0 };
        *out.entry(index.with(slot, 0)).or_default() += h * amp;
        *out.entry(index.with(slot, 1)).or_default() += h * amp * sign;
    }
    Ok(StateVector::from_map(state.layout().clone(), out))
}

fn shift(state: &StateVector, rule: &ConditionalShiftSpec, adjoint: bool) -> Result<StateVector> {
    let layout = state.layout();
    let control = coin_slot(state, rule.control_coin)?;
    let target = layout.slot(rule.target_position)?;
    let kind = layout.registers()[target].kind;
    if !rule.kind.accepts(kind) {
        return Err(Error::ShiftKindMismatch {
            register: rule.target_position,
            expected: rule.kind.name(),
        });
    }
    state.relabel(|index| {
        let moved = rule.kind.step(index.get(target), index.get(control), adjoint);
        if !kind.contains(moved) {
            let window = match kind {
                RegisterKind::PositionLine { window } => window,
                _ => unreachable!("only line registers can overflow"),
            };
            return Err(Error::WindowOverflow { register: rule.target_position, position: moved, window });
        }
        Ok(index.with(target, moved))
    })
}

/// Coin-controlled shift of a position register.
pub fn apply_conditional_shift(state: &StateVector, rule: &ConditionalShiftSpec) -> Result<StateVector> {
    shift(state, rule, false)
}

/// Inverse of [`apply_conditional_shift`] for the same rule.
pub fn apply_conditional_shift_adjoint(
    state: &StateVector,
    rule: &ConditionalShiftSpec,
) -> Result<StateVector> {
    shift(state, rule, true)
}

/// Applies `seq` with the leftmost operator first.
pub fn apply_pauli_sequence(state: &StateVector, seq: &[PauliOp]) -> Result<StateVector> {
    let mut current = state.clone();
    for op in seq {
        let slot = coin_slot(&current, op.target)?;
        current = match op.axis {
            PauliAxis::X => current.relabel(|index| Ok(index.with(slot, 1 - index.get(slot))))?,
            PauliAxis::Z => {
                let terms = current
                    .terms()
                    .map(|(index, &amp)| {
                        let a = if index.get(slot) == 1 { -amp } else { amp };
                        (index.clone(), a)
                    })
                    .collect();
                StateVector::from_map(current.layout().clone(), terms)
            }
        };
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hilbert::{fidelity_up_to_phase, BasisIndex, RegisterDescriptor, RegisterLayout};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn walker(kind: RegisterDescriptor) -> Arc<RegisterLayout> {
        Arc::new(RegisterLayout::new(vec![kind, RegisterDescriptor::coin(RegisterId::A2)]).unwrap())
    }

    fn basis(layout: &Arc<RegisterLayout>, values: &[i32]) -> StateVector {
        StateVector::from_terms(layout.clone(), [(BasisIndex::new(values.to_vec()), c(1.0))]).unwrap()
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let layout = walker(RegisterDescriptor::line(RegisterId::A1, 2));
        let psi = apply_hadamard(&basis(&layout, &[0, 0]), RegisterId::A2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(psi.nnz(), 2);
        assert!((psi.amplitude(&BasisIndex::new(vec![0, 0])) - c(s)).norm() < 1e-15);
        assert!((psi.amplitude(&BasisIndex::new(vec![0, 1])) - c(s)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_rejects_position_register() {
        let layout = walker(RegisterDescriptor::line(RegisterId::A1, 2));
        let err = apply_hadamard(&basis(&layout, &[0, 0]), RegisterId::A1).unwrap_err();
        assert_eq!(err, Error::NotACoin(RegisterId::A1));
        let err = apply_hadamard(&basis(&layout, &[0, 0]), RegisterId::C1).unwrap_err();
        assert_eq!(err, Error::UnknownRegister(RegisterId::C1));
    }

    #[test]
    fn line_shift_moves_by_coin() {
        let layout = walker(RegisterDescriptor::line(RegisterId::A1, 2));
        let rule = ConditionalShiftSpec::new(RegisterId::A1, RegisterId::A2, ShiftKind::Line);
        let plus = apply_hadamard(&basis(&layout, &[0, 0]), RegisterId::A2).unwrap();
        let psi = apply_conditional_shift(&plus, &rule).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amplitude(&BasisIndex::new(vec![1, 0])) - c(s)).norm() < 1e-15);
        assert!((psi.amplitude(&BasisIndex::new(vec![-1, 1])) - c(s)).norm() < 1e-15);
    }

    #[test]
    fn line_shift_reports_window_overflow() {
        let layout = walker(RegisterDescriptor::line(RegisterId::A1, 1));
        let rule = ConditionalShiftSpec::new(RegisterId::A1, RegisterId::A2, ShiftKind::Line);
        let err = apply_conditional_shift(&basis(&layout, &[1, 0]), &rule).unwrap_err();
        assert_eq!(err, Error::WindowOverflow { register: RegisterId::A1, position: 2, window: 1 });
    }

    #[test]
    fn two_vertex_shift_swaps_on_coin_one() {
        let layout = walker(RegisterDescriptor::cycle(RegisterId::A1, 2));
        let rule = ConditionalShiftSpec::new(RegisterId::A1, RegisterId::A2, ShiftKind::TwoVertex);
        let moved = apply_conditional_shift(&basis(&layout, &[0, 1]), &rule).unwrap();
        assert_eq!(moved.amplitude(&BasisIndex::new(vec![1, 1])), c(1.0));
        let stayed = apply_conditional_shift(&basis(&layout, &[1, 0]), &rule).unwrap();
        assert_eq!(stayed.amplitude(&BasisIndex::new(vec![1, 0])), c(1.0));
    }

    #[test]
    fn cycle_shift_wraps_around() {
        let layout = walker(RegisterDescriptor::cycle(RegisterId::A1, 4));
        let rule = ConditionalShiftSpec::new(RegisterId::A1, RegisterId::A2, ShiftKind::Cycle4);
        let up = apply_conditional_shift(&basis(&layout, &[3, 0]), &rule).unwrap();
        assert_eq!(up.amplitude(&BasisIndex::new(vec![0, 0])), c(1.0));
        let down = apply_conditional_shift(&basis(&layout, &[0, 1]), &rule).unwrap();
        assert_eq!(down.amplitude(&BasisIndex::new(vec![3, 1])), c(1.0));
    }

    #[test]
    fn shift_kind_must_match_register() {
        let layout = walker(RegisterDescriptor::cycle(RegisterId::A1, 2));
        let rule = ConditionalShiftSpec::new(RegisterId::A1, RegisterId::A2, ShiftKind::Cycle4);
        assert!(matches!(
            apply_conditional_shift(&basis(&layout, &[0, 0]), &rule),
            Err(Error::ShiftKindMismatch { .. })
        ));
    }

    #[test]
    fn classes_follow_letter_parity() {
        let class = |w: &str| PauliClass::of(&w.parse().unwrap());
        assert_eq!(class("XZX"), PauliClass::Z);
        assert_eq!(class("ZX"), PauliClass::XZ);
        assert_eq!(class("XX"), PauliClass::I);
        assert_eq!(class("I"), PauliClass::I);
        assert_eq!(PauliClass::XZ.to_string(), "XZ");
    }

    #[test]
    fn xzx_acts_as_minus_z() {
        let layout = Arc::new(RegisterLayout::new(vec![RegisterDescriptor::coin(RegisterId::A3)]).unwrap());
        let (a0, a1) = (0.6, 0.8);
        let input = StateVector::from_terms(
            layout.clone(),
            [(BasisIndex::new(vec![0]), c(a1)), (BasisIndex::new(vec![1]), c(-a0))],
        )
        .unwrap();
        let seq: Vec<_> = "XZX".parse::<PauliWord>().unwrap().on(RegisterId::A3);
        let out = apply_pauli_sequence(&input, &seq).unwrap();
        assert!((out.amplitude(&BasisIndex::new(vec![0])) - c(-a1)).norm() < 1e-15);
        assert!((out.amplitude(&BasisIndex::new(vec![1])) - c(-a0)).norm() < 1e-15);
    }

    #[test]
    fn zx_restores_swapped_coin_state_up_to_sign() {
        // (a1|0⟩ - a0|1⟩) under X then Z is -(a0|0⟩ + a1|1⟩).
        let layout = Arc::new(RegisterLayout::new(vec![RegisterDescriptor::coin(RegisterId::A3)]).unwrap());
        let (a0, a1) = (0.6, 0.8);
        let input = StateVector::from_terms(
            layout.clone(),
            [(BasisIndex::new(vec![0]), c(a1)), (BasisIndex::new(vec![1]), c(-a0))],
        )
        .unwrap();
        let seq: Vec<_> = "XZ".parse::<PauliWord>().unwrap().on(RegisterId::A3);
        let out = apply_pauli_sequence(&input, &seq).unwrap();
        assert!((out.amplitude(&BasisIndex::new(vec![0])) - c(-a0)).norm() < 1e-15);
        assert!((out.amplitude(&BasisIndex::new(vec![1])) - c(-a1)).norm() < 1e-15);
        let target = StateVector::from_terms(
            layout,
            [(BasisIndex::new(vec![0]), c(a0)), (BasisIndex::new(vec![1]), c(a1))],
        )
        .unwrap();
        assert!((fidelity_up_to_phase(&out, &target).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_sequence_is_identity() {
        let layout = walker(RegisterDescriptor::cycle(RegisterId::A1, 4));
        let psi = basis(&layout, &[2, 1]);
        let out = apply_pauli_sequence(&psi, &[]).unwrap();
        assert_eq!(out.amplitude(&BasisIndex::new(vec![2, 1])), c(1.0));
    }

    #[test]
    fn pauli_word_parsing() {
        assert_eq!("I".parse::<PauliWord>().unwrap(), PauliWord::identity());
        assert_eq!("XZ".parse::<PauliWord>().unwrap().to_string(), "XZ");
        assert!("XY".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
    }
}
