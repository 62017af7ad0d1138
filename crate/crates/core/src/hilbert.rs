//! Composite register spaces and sparse state vectors.
//!
//! A [`RegisterLayout`] fixes the tensor order of the walkers' position
//! registers and the coin qubits. States are sparse maps from a
//! [`BasisIndex`] (one value per register) to a complex amplitude, kept in
//! a `BTreeMap` so iteration is always in basis order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Named registers, in the order the protocols lay them out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegisterId {
    A1,
    B1,
    A2,
    A3,
    B2,
    B3,
    C1,
    C2,
}

impl RegisterId {
    pub const ALL: [RegisterId; 8] = [
        RegisterId::A1,
        RegisterId::B1,
        RegisterId::A2,
        RegisterId::A3,
        RegisterId::B2,
        RegisterId::B3,
        RegisterId::C1,
        RegisterId::C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegisterId::A1 => "A1",
            RegisterId::B1 => "B1",
            RegisterId::A2 => "A2",
            RegisterId::A3 => "A3",
            RegisterId::B2 => "B2",
            RegisterId::B3 => "B3",
            RegisterId::C1 => "C1",
            RegisterId::C2 => "C2",
        }
    }
}

impl fmt::Display for RegisterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegisterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegisterId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidLayout(format!("unknown register name {s:?}")))
    }
}

/// What a register holds and therefore which values it can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterKind {
    /// Walker on the integer line, truncated to `-window..=window`.
    PositionLine { window: i32 },
    /// Walker on a cycle with vertices `0..n`.
    PositionCycle { n: u32 },
    Coin,
}

impl RegisterKind {
    pub fn dimension(&self) -> usize {
        match *self {
            RegisterKind::PositionLine { window } => (2 * window + 1) as usize,
            RegisterKind::PositionCycle { n } => n as usize,
            RegisterKind::Coin => 2,
        }
    }

    pub fn contains(&self, value: i32) -> bool {
        match *self {
            RegisterKind::PositionLine { window } => (-window..=window).contains(&value),
            RegisterKind::PositionCycle { n } => (0..n as i32).contains(&value),
            RegisterKind::Coin => value == 0 || value == 1,
        }
    }

    /// All values in ascending order.
    pub fn values(&self) -> Vec<i32> {
        match *self {
            RegisterKind::PositionLine { window } => (-window..=window).collect(),
            RegisterKind::PositionCycle { n } => (0..n as i32).collect(),
            RegisterKind::Coin => vec![0, 1],
        }
    }

    pub fn is_coin(&self) -> bool {
        matches!(self, RegisterKind::Coin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterDescriptor {
    pub id: RegisterId,
    pub kind: RegisterKind,
}

impl RegisterDescriptor {
    pub fn line(id: RegisterId, window: i32) -> Self {
        Self { id, kind: RegisterKind::PositionLine { window } }
    }

    pub fn cycle(id: RegisterId, n: u32) -> Self {
        Self { id, kind: RegisterKind::PositionCycle { n } }
    }

    pub fn coin(id: RegisterId) -> Self {
        Self { id, kind: RegisterKind::Coin }
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }
}

/// Ordered register list fixing the tensor-product order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<RegisterDescriptor>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<RegisterDescriptor>) -> Result<Self> {
        if registers.is_empty() {
            return Err(Error::InvalidLayout("layout has no registers".into()));
        }
        for (i, r) in registers.iter().enumerate() {
            if registers[..i].iter().any(|o| o.id == r.id) {
                return Err(Error::InvalidLayout(format!("register {} appears twice", r.id)));
            }
            match r.kind {
                RegisterKind::PositionLine { window } if window < 1 => {
                    return Err(Error::InvalidLayout(format!(
                        "line register {} needs a positive window, got {window}",
                        r.id
                    )));
                }
                RegisterKind::PositionCycle { n } if n != 2 && n != 4 => {
                    return Err(Error::InvalidLayout(format!(
                        "cycle register {} must have 2 or 4 vertices, got {n}",
                        r.id
                    )));
                }
                _ => {}
            }
        }
        Ok(Self { registers })
    }

    pub fn registers(&self) -> &[RegisterDescriptor] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    /// Position of `id` within a [`BasisIndex`].
    pub fn slot(&self, id: RegisterId) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.id == id)
            .ok_or(Error::UnknownRegister(id))
    }

    pub fn descriptor(&self, id: RegisterId) -> Result<&RegisterDescriptor> {
        self.slot(id).map(|s| &self.registers[s])
    }

    /// The layout with `ids` removed, keeping the order of the rest.
    pub fn without(&self, ids: &[RegisterId]) -> Result<Self> {
        for &id in ids {
            self.slot(id)?;
        }
        Self::new(self.registers.iter().filter(|r| !ids.contains(&r.id)).copied().collect())
    }

    pub fn total_dimension(&self) -> usize {
        self.registers.iter().map(RegisterDescriptor::dimension).product()
    }

    pub fn contains(&self, index: &BasisIndex) -> bool {
        index.0.len() == self.registers.len()
            && self.registers.iter().zip(&index.0).all(|(r, &v)| r.kind.contains(v))
    }

    pub fn zero_index(&self) -> BasisIndex {
        BasisIndex(vec![0; self.registers.len()])
    }

    /// Every basis index of the layout, in lexicographic order.
    pub fn basis(&self) -> Vec<BasisIndex> {
        enumerate_values(self.registers.iter().map(|r| r.kind.values()).collect())
    }
}

fn enumerate_values(per_register: Vec<Vec<i32>>) -> Vec<BasisIndex> {
    let mut out = vec![Vec::with_capacity(per_register.len())];
    for values in &per_register {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(BasisIndex).collect()
}

/// One value per register of a layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(pub Vec<i32>);

impl BasisIndex {
    pub fn new(values: Vec<i32>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[i32] {
        &self.0
    }

    pub fn get(&self, slot: usize) -> i32 {
        self.0[slot]
    }

    pub fn with(&self, slot: usize, value: i32) -> Self {
        let mut v = self.0.clone();
        v[slot] = value;
        Self(v)
    }

    /// Values at `slots`, in that order.
    pub fn project(&self, slots: &[usize]) -> Vec<i32> {
        slots.iter().map(|&s| self.0[s]).collect()
    }

    /// Values not in `slots`, in layout order.
    pub fn complement(&self, slots: &[usize]) -> Vec<i32> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| !slots.contains(i))
            .map(|(_, &v)| v)
            .collect()
    }
}

/// Renders as a ket with signed entries concatenated, e.g. `|2-20110⟩`.
impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        f.write_str("⟩")
    }
}

/// Sparse pure state over a register layout.
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: Arc<RegisterLayout>,
    amplitudes: BTreeMap<BasisIndex, Complex64>,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn initial(layout: Arc<RegisterLayout>) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(layout.zero_index(), Complex64::new(1.0, 0.0));
        Self { layout, amplitudes }
    }

    /// Builds a state from terms, summing repeated indices. The result is
    /// not normalized.
    pub fn from_terms<I>(layout: Arc<RegisterLayout>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisIndex, Complex64)>,
    {
        let mut amplitudes: BTreeMap<BasisIndex, Complex64> = BTreeMap::new();
        for (index, amp) in terms {
            if !layout.contains(&index) {
                return Err(Error::IndexOutOfRange(index.0));
            }
            *amplitudes.entry(index).or_default() += amp;
        }
        Ok(Self::from_map(layout, amplitudes))
    }

    /// Skips range checks; callers guarantee every index fits the layout.
    pub(crate) fn from_map(
        layout: Arc<RegisterLayout>,
        mut amplitudes: BTreeMap<BasisIndex, Complex64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() > tolerance::ZERO_AMPLITUDE);
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &Arc<RegisterLayout> {
        &self.layout
    }

    pub fn amplitude(&self, index: &BasisIndex) -> Complex64 {
        self.amplitudes.get(index).copied().unwrap_or_default()
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&BasisIndex, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn nnz(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(Complex64::norm_sqr).sum()
    }

    /// `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        (n > tolerance::ZERO_AMPLITUDE).then(|| self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|(k, a)| (k.clone(), a * factor)).collect();
        Self::from_map(self.layout.clone(), amplitudes)
    }

    /// Applies a map on basis indices that is injective on the support.
    pub(crate) fn relabel<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&BasisIndex) -> Result<BasisIndex>,
    {
        let mut amplitudes = BTreeMap::new();
        for (index, &amp) in &self.amplitudes {
            amplitudes.insert(f(index)?, amp);
        }
        Ok(Self { layout: self.layout.clone(), amplitudes })
    }

    /// Reduced density matrix on `registers`, tracing out everything else.
    pub fn reduced_density(&self, registers: &[RegisterId]) -> Result<DensityMatrix> {
        let slots = registers
            .iter()
            .map(|&r| self.layout.slot(r))
            .collect::<Result<Vec<_>>>()?;
        let basis = enumerate_values(
            slots.iter().map(|&s| self.layout.registers()[s].kind.values()).collect(),
        );
        let position: HashMap<&[i32], usize> =
            basis.iter().enumerate().map(|(i, b)| (b.values(), i)).collect();

        let mut blocks: HashMap<Vec<i32>, Vec<(usize, Complex64)>> = HashMap::new();
        for (index, &amp) in &self.amplitudes {
            let sub = index.project(&slots);
            blocks.entry(index.complement(&slots)).or_default().push((position[sub.as_slice()], amp));
        }

        let dim = basis.len();
        let mut data = vec![Complex64::default(); dim * dim];
        for block in blocks.values() {
            for &(i, ai) in block {
                for &(j, aj) in block {
                    data[i * dim + j] += ai * aj.conj();
                }
            }
        }
        Ok(DensityMatrix { registers: registers.to_vec(), basis, data })
    }
}

/// The all-zeros state on `layout`.
pub fn make_initial_state(layout: Arc<RegisterLayout>) -> StateVector {
    StateVector::initial(layout)
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<Complex64> {
    if x.layout != y.layout {
        return Err(Error::LayoutMismatch);
    }
    let (small, large, conj_small) = if x.nnz() <= y.nnz() { (x, y, true) } else { (y, x, false) };
    let sum = small
        .amplitudes
        .iter()
        .filter_map(|(k, a)| large.amplitudes.get(k).map(|b| (a, b)))
        .map(|(a, b)| if conj_small { a.conj() * b } else { b.conj() * a })
        .sum();
    Ok(sum)
}

/// `|⟨x|y⟩|²`; equals one exactly when normalized states agree up to a global phase.
pub fn fidelity_up_to_phase(x: &StateVector, y: &StateVector) -> Result<f64> {
    Ok(inner_product(x, y)?.norm_sqr())
}

/// Reduced state on a register subset, indexed by that subset's values in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    registers: Vec<RegisterId>,
    basis: Vec<BasisIndex>,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn registers(&self) -> &[RegisterId] {
        &self.registers
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut sum = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                sum += (self.get(i, j) * self.get(j, i)).re;
            }
        }
        sum
    }

    /// `⟨t|ρ|t⟩` for a pure vector given in this matrix's basis order.
    pub fn expectation(&self, target: &[Complex64]) -> f64 {
        assert_eq!(target.len(), self.dim(), "target dimension mismatch");
        let dim = self.dim();
        let mut sum = Complex64::default();
        for i in 0..dim {
            for j in 0..dim {
                sum += target[i].conj() * self.get(i, j) * target[j];
            }
        }
        sum.re
    }

    /// Largest entrywise deviation from `trace/dim · I`.
    pub fn distance_from_maximally_mixed(&self) -> f64 {
        let dim = self.dim();
        let level = self.trace() / dim as f64;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { level } else { 0.0 };
                worst = worst.max((self.get(i, j) - expect).norm());
            }
        }
        worst
    }
}
