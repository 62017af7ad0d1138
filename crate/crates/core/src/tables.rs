//! Correction tables: the transcribed published tables, a brute-force oracle
//! that re-derives every row, and a differ between the two.
//!
//! Table files hold one row per line:
//!
//! ```text
//! position  alice  bob  charlie  a3  b3   # optional note
//! ```
//!
//! `charlie` is `-` for the uncontrolled protocol. Correction words are over
//! `{I, X, Z}` and applied left to right. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::PauliWord;
use crate::protocol::{outcome_space, random_target_pairs, Amplitudes, Correction, OutcomeTuple, ProtocolRunner};
use crate::tolerance;
use crate::walks::{ConfigKey, Protocol, Topology};

/// Number of random target pairs a correction must work for before the
/// oracle accepts it.
pub const ORACLE_TARGETS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Reference,
    OracleDerived,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    pub key: ConfigKey,
    pub provenance: Provenance,
    pub rows: IndexMap<OutcomeTuple, Correction>,
    /// Trailing comments attached to rows in the source file.
    pub notes: IndexMap<OutcomeTuple, String>,
}

const UNCONTROLLED_LINE: &str = include_str!("../data/uncontrolled_line.txt");
const UNCONTROLLED_K2: &str = include_str!("../data/uncontrolled_k2.txt");
const CONTROLLED_LINE: &str = include_str!("../data/controlled_line.txt");
const CONTROLLED_K2: &str = include_str!("../data/controlled_k2.txt");

/// File holding the table for `key`. The 4-cycle tables are not stored
/// separately; they are the two-vertex tables with tilde labels.
pub fn table_file_name(key: ConfigKey) -> String {
    let topology = match key.topology {
        Topology::Cycle4 => Topology::TwoVertex,
        t => t,
    };
    format!("{}_{}.txt", key.protocol, topology)
}

fn embedded_text(key: ConfigKey) -> &'static str {
    match (key.protocol, key.topology) {
        (Protocol::Uncontrolled, Topology::Line) => UNCONTROLLED_LINE,
        (Protocol::Uncontrolled, _) => UNCONTROLLED_K2,
        (Protocol::Controlled, Topology::Line) => CONTROLLED_LINE,
        (Protocol::Controlled, _) => CONTROLLED_K2,
    }
}

/// `alphaN` becomes `alpha~N`; other labels are unchanged.
pub fn to_tilde(label: &str) -> String {
    match label.strip_prefix("alpha") {
        Some(rest) if !rest.starts_with('~') => format!("alpha~{rest}"),
        _ => label.to_string(),
    }
}

/// `alpha~N` becomes `alphaN`.
pub fn from_tilde(label: &str) -> String {
    label.replacen("alpha~", "alpha", 1)
}

impl CorrectionTable {
    pub fn new(key: ConfigKey, provenance: Provenance) -> Self {
        Self { key, provenance, rows: IndexMap::new(), notes: IndexMap::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, outcome: &OutcomeTuple) -> Option<&Correction> {
        self.rows.get(outcome)
    }

    pub fn parse(key: ConfigKey, provenance: Provenance, text: &str) -> Result<Self> {
        let mut table = Self::new(key, provenance);
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| Error::Parse { line, message };
            let (body, note) = match raw.split_once('#') {
                Some((b, c)) => (b, Some(c.trim())),
                None => (raw, None),
            };
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let charlie = match (fields[3], key.protocol) {
                ("-", Protocol::Uncontrolled) => None,
                (bits, Protocol::Controlled) if bits.len() == 2 && bits.chars().all(|c| c == '0' || c == '1') => {
                    Some(bits)
                }
                (other, _) => return Err(err(format!("controller field {other:?} does not fit the {} protocol", key.protocol))),
            };
            let a3: PauliWord = fields[4].parse().map_err(err)?;
            let b3: PauliWord = fields[5].parse().map_err(err)?;
            let outcome = OutcomeTuple::new(fields[0], fields[1], fields[2], charlie);
            if table.rows.contains_key(&outcome) {
                return Err(err(format!("duplicate row {outcome}")));
            }
            if let Some(note) = note.filter(|s| !s.is_empty()) {
                table.notes.insert(outcome.clone(), note.to_string());
            }
            table.rows.insert(outcome, Correction::new(a3, b3));
        }
        Ok(table)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let source = match self.provenance {
            Provenance::Reference => "transcribed",
            Provenance::OracleDerived => "derived by exhaustive search",
        };
        let _ = writeln!(out, "# {} protocol, {} topology ({} rows, {source}).", self.key.protocol, self.key.topology, self.len());
        let _ = writeln!(out, "# position  alice  bob  charlie  a3  b3");
        for (o, c) in &self.rows {
            let mut row = format!(
                "{:<10} {} {} {:<2} {:<4} {}",
                o.position,
                o.alice,
                o.bob,
                o.charlie.as_deref().unwrap_or("-"),
                c.a3.to_string(),
                c.b3
            );
            if let Some(note) = self.notes.get(o) {
                let _ = write!(row, "    # {note}");
            }
            out.push_str(row.trim_end());
            out.push('\n');
        }
        out
    }

    /// Applies `f` to every position label.
    pub fn relabel_positions(&self, key: ConfigKey, f: impl Fn(&str) -> String) -> Self {
        let map = |o: &OutcomeTuple| OutcomeTuple { position: f(&o.position), ..o.clone() };
        Self {
            key,
            provenance: self.provenance,
            rows: self.rows.iter().map(|(o, c)| (map(o), c.clone())).collect(),
            notes: self.notes.iter().map(|(o, n)| (map(o), n.clone())).collect(),
        }
    }
}

fn from_stored(key: ConfigKey, text: &str) -> Result<CorrectionTable> {
    let stored_key = ConfigKey::new(key.protocol, if key.topology == Topology::Cycle4 { Topology::TwoVertex } else { key.topology });
    let table = CorrectionTable::parse(stored_key, Provenance::Reference, text)?;
    Ok(match key.topology {
        Topology::Cycle4 => table.relabel_positions(key, to_tilde),
        _ => table,
    })
}

/// The published table for `key`, from the copy compiled into the crate.
pub fn reference_table(key: ConfigKey) -> CorrectionTable {
    from_stored(key, embedded_text(key)).expect("embedded tables parse")
}

/// The published table for `key`, read from `dir`.
pub fn load_table(dir: &Path, key: ConfigKey) -> Result<CorrectionTable> {
    let path = dir.join(table_file_name(key));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_stored(key, &text)
}

/// Every correction class that maps the cascade's output onto the swapped
/// target for all of `targets`.
pub fn valid_corrections(
    runner: &ProtocolRunner,
    outcome: &OutcomeTuple,
    targets: &[(Amplitudes, Amplitudes)],
) -> Result<Vec<Correction>> {
    let mut valid = Vec::new();
    for c in Correction::all_classes() {
        let mut ok = true;
        for &(a, b) in targets {
            let (_, f) = runner.corrected_fidelity(a, b, outcome, &c)?;
            if f < 1.0 - tolerance::FIDELITY {
                ok = false;
                break;
            }
        }
        if ok {
            valid.push(c);
        }
    }
    Ok(valid)
}

/// The unique valid correction class, as its shortest representative.
pub fn derive_correction(
    runner: &ProtocolRunner,
    outcome: &OutcomeTuple,
    targets: &[(Amplitudes, Amplitudes)],
) -> Result<Correction> {
    let mut valid = valid_corrections(runner, outcome, targets)?;
    match valid.len() {
        0 => Err(Error::NoValidCorrection(outcome.to_string())),
        1 => Ok(valid.remove(0)),
        count => Err(Error::AmbiguousCorrection { outcome: outcome.to_string(), count }),
    }
}

/// Oracle table over every possible outcome of `key`.
pub fn derive_table(key: ConfigKey, seed: u64) -> Result<CorrectionTable> {
    let runner = ProtocolRunner::new(key)?;
    let targets = random_target_pairs(seed, ORACLE_TARGETS);
    let (a, b) = targets[0];
    let rows: Vec<Option<(OutcomeTuple, Correction)>> = outcome_space(key)
        .into_par_iter()
        .map(|o| {
            if runner.success_probability(a, b, &o)? < tolerance::IMPOSSIBLE_OUTCOME {
                return Ok(None);
            }
            let c = derive_correction(&runner, &o, &targets)?;
            Ok(Some((o, c)))
        })
        .collect::<Result<_>>()?;
    let mut table = CorrectionTable::new(key, Provenance::OracleDerived);
    table.rows.extend(rows.into_iter().flatten());
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Listed,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    /// The listed correction restores the target.
    Match,
    /// The listed correction leaves fidelity below threshold.
    ListedInvalid,
    /// The row exists only on the other side.
    MissingRow(Side),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowDiff {
    pub outcome: OutcomeTuple,
    pub status: RowStatus,
    pub listed: Option<Correction>,
    pub derived: Option<Correction>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiffCounts {
    pub matched: usize,
    pub listed_invalid: usize,
    pub missing: usize,
    /// Matching rows whose listed word differs from the canonical one.
    pub non_canonical: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableDiff {
    pub key: ConfigKey,
    pub rows: Vec<RowDiff>,
}

impl TableDiff {
    pub fn counts(&self) -> DiffCounts {
        let mut c = DiffCounts::default();
        for r in &self.rows {
            match r.status {
                RowStatus::Match => {
                    c.matched += 1;
                    if r.listed != r.derived {
                        c.non_canonical += 1;
                    }
                }
                RowStatus::ListedInvalid => c.listed_invalid += 1,
                RowStatus::MissingRow(_) => c.missing += 1,
            }
        }
        c
    }

    pub fn exceptions(&self) -> impl Iterator<Item = &RowDiff> {
        self.rows.iter().filter(|r| r.status != RowStatus::Match)
    }
}

/// Classifies every row in either table. A listed row matches when its
/// correction, applied as written, restores the target at the oracle's
/// target pairs for `seed`.
pub fn diff_tables(listed: &CorrectionTable, derived: &CorrectionTable, seed: u64) -> Result<TableDiff> {
    let runner = ProtocolRunner::new(listed.key)?;
    let targets = random_target_pairs(seed, ORACLE_TARGETS);
    let mut keys: Vec<&OutcomeTuple> = listed.rows.keys().collect();
    keys.extend(derived.rows.keys().filter(|o| !listed.rows.contains_key(*o)));
    let rank = crate::protocol::canonical_rank(listed.key);
    keys.sort_by_key(|o| rank.get(*o).copied().unwrap_or(usize::MAX));

    let rows = keys
        .into_par_iter()
        .map(|o| {
            let p = listed.rows.get(o).cloned();
            let d = derived.rows.get(o).cloned();
            let status = match (&p, &d) {
                (Some(c), Some(_)) => {
                    let works = targets.iter().all(|&(a, b)| {
                        runner
                            .corrected_fidelity(a, b, o, c)
                            .is_ok_and(|(_, f)| f >= 1.0 - tolerance::FIDELITY)
                    });
                    if works {
                        RowStatus::Match
                    } else {
                        RowStatus::ListedInvalid
                    }
                }
                (Some(_), None) => RowStatus::MissingRow(Side::Derived),
                (None, _) => RowStatus::MissingRow(Side::Listed),
            };
            RowDiff { outcome: o.clone(), status, listed: p, derived: d, note: listed.notes.get(o).cloned() }
        })
        .collect();
    Ok(TableDiff { key: listed.key, rows })
}

/// Rows that differ between a two-vertex table and a 4-cycle table once
/// `alphaN` is identified with `alpha~N`, compared by correction class.
pub fn tilde_differences(two_vertex: &CorrectionTable, cycle: &CorrectionTable) -> Vec<OutcomeTuple> {
    let mapped = two_vertex.relabel_positions(cycle.key, to_tilde);
    let mut diff: Vec<OutcomeTuple> = mapped
        .rows
        .iter()
        .filter(|(o, c)| cycle.rows.get(*o).map(Correction::classes) != Some(c.classes()))
        .map(|(o, _)| o.clone())
        .collect();
    diff.extend(cycle.rows.keys().filter(|o| !mapped.rows.contains_key(*o)).cloned());
    diff
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(p: Protocol, t: Topology) -> ConfigKey {
        ConfigKey::new(p, t)
    }

    fn word(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn embedded_row_counts() {
        let counts: Vec<usize> = ConfigKey::ALL.iter().map(|&k| reference_table(k).len()).collect();
        assert_eq!(counts, vec![36, 16, 16, 256, 64, 64]);
    }

    #[test]
    fn spot_rows() {
        let t1 = reference_table(key(Protocol::Uncontrolled, Topology::Line));
        assert_eq!(
            t1.get(&OutcomeTuple::new("00", "beta0", "gamma0", None)),
            Some(&Correction::new(word("X"), word("X")))
        );
        let t2 = reference_table(key(Protocol::Uncontrolled, Topology::TwoVertex));
        assert_eq!(
            t2.get(&OutcomeTuple::new("alpha0", "beta1", "gamma1", None)),
            Some(&Correction::new(word("XZ"), word("XZ")))
        );
        let a = reference_table(key(Protocol::Controlled, Topology::Line));
        assert_eq!(
            a.get(&OutcomeTuple::new("alpha0", "beta0", "gamma0", Some("11"))),
            Some(&Correction::new(word("X"), word("X")))
        );
        let c4 = reference_table(key(Protocol::Controlled, Topology::Cycle4));
        assert!(c4.get(&OutcomeTuple::new("alpha~3", "beta0", "gamma0", Some("00"))).is_some());
    }

    #[test]
    fn notes_survive_parsing_and_rendering() {
        let t = reference_table(key(Protocol::Controlled, Topology::TwoVertex));
        assert!(!t.notes.is_empty());
        let again = CorrectionTable::parse(t.key, t.provenance, &t.render()).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let k = key(Protocol::Uncontrolled, Topology::TwoVertex);
        let bad = "# header\nalpha0 beta0 gamma0 - I\n";
        assert!(matches!(CorrectionTable::parse(k, Provenance::Reference, bad), Err(Error::Parse { line: 2, .. })));
        let controlled = "alpha0 beta0 gamma0 01 I I\n";
        assert!(CorrectionTable::parse(k, Provenance::Reference, controlled).is_err());
        let letter = "alpha0 beta0 gamma0 - Y I\n";
        assert!(CorrectionTable::parse(k, Provenance::Reference, letter).is_err());
        let dup = "alpha0 beta0 gamma0 - I I\nalpha0 beta0 gamma0 - X I\n";
        assert!(matches!(CorrectionTable::parse(k, Provenance::Reference, dup), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn tilde_labels() {
        assert_eq!(to_tilde("alpha3"), "alpha~3");
        assert_eq!(to_tilde("alpha~3"), "alpha~3");
        assert_eq!(to_tilde("02[++]"), "02[++]");
        assert_eq!(from_tilde("alpha~12"), "alpha12");
    }

    #[test]
    fn oracle_on_two_vertex_first_row() {
        let runner = ProtocolRunner::new(key(Protocol::Uncontrolled, Topology::TwoVertex)).unwrap();
        let targets = random_target_pairs(3, ORACLE_TARGETS);
        let c = derive_correction(&runner, &OutcomeTuple::new("alpha0", "beta0", "gamma0", None), &targets).unwrap();
        assert_eq!(c, Correction::default());
    }

    #[test]
    fn oracle_rejects_malformed_outcomes() {
        let controlled = ProtocolRunner::new(key(Protocol::Controlled, Topology::TwoVertex)).unwrap();
        let targets = random_target_pairs(3, ORACLE_TARGETS);
        let no_bits = OutcomeTuple::new("alpha0", "beta0", "gamma0", None);
        assert!(matches!(derive_correction(&controlled, &no_bits, &targets), Err(Error::InvalidOutcome(_))));
        let unknown = OutcomeTuple::new("alpha9", "beta0", "gamma0", Some("00"));
        assert!(matches!(derive_correction(&controlled, &unknown, &targets), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn self_diff_of_two_vertex_table_matches() {
        let t = reference_table(key(Protocol::Uncontrolled, Topology::TwoVertex));
        let d = diff_tables(&t, &t, 11).unwrap();
        assert_eq!(d.counts().matched, 16);
    }

    #[test]
    fn diff_reports_missing_and_invalid_rows() {
        let k = key(Protocol::Uncontrolled, Topology::TwoVertex);
        let derived = derive_table(k, 5).unwrap();
        let mut listed = derived.clone();
        let first = listed.rows.keys().next().unwrap().clone();
        listed.rows.insert(first.clone(), Correction::new(word("Z"), word("Z")));
        let last = listed.rows.keys().last().unwrap().clone();
        listed.rows.shift_remove(&last);
        let d = diff_tables(&listed, &derived, 5).unwrap();
        let c = d.counts();
        assert_eq!((c.matched, c.listed_invalid, c.missing), (14, 1, 1));
        assert_eq!(d.rows[0].status, RowStatus::ListedInvalid);
        assert_eq!(d.rows.last().unwrap().status, RowStatus::MissingRow(Side::Listed));
    }
}
