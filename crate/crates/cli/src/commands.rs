use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qwalk_core::fixtures::{diff_fixture, fixture};
use qwalk_core::hilbert::StateVector;
use qwalk_core::protocol::{outcome_space, summarize, verify_table, ProtocolConfig, ProtocolRunner};
use qwalk_core::tables::{derive_table, diff_tables, reference_table, load_table, CorrectionTable, Provenance, RowStatus, Side};
use qwalk_core::walks::{build_walk_program, ConfigKey, Protocol, Topology};
use qwalk_core::{Error, Result};

use crate::report::{
    ConfigEcho, DiffEntry, DiffSummary, ProbabilityEntry, RowEntry, RunReport, SampleEntry, StepSummary, TermEntry,
    VerificationSummary,
};
use crate::TABLE_DIR_VAR;

const FIXTURE_TOLERANCE: f64 = 1e-12;
const PROBABILITY_TOLERANCE: f64 = 1e-10;

fn echo(key: ConfigKey) -> ConfigEcho {
    ConfigEcho { protocol: key.protocol.to_string(), topology: key.topology.to_string(), ..Default::default() }
}

/// Published success probability per outcome, as a fraction and a value.
fn claimed_probability(key: ConfigKey) -> (&'static str, f64) {
    match (key.protocol, key.topology) {
        (Protocol::Uncontrolled, _) => ("1/16", 1.0 / 16.0),
        (Protocol::Controlled, Topology::Line) => ("1/256", 1.0 / 256.0),
        (Protocol::Controlled, _) => ("1/64", 1.0 / 64.0),
    }
}

/// The published table, from `QWALK_TABLE_DIR` when set.
fn published_table(key: ConfigKey) -> Result<(CorrectionTable, String)> {
    match std::env::var_os(TABLE_DIR_VAR) {
        Some(dir) => {
            let dir = Path::new(&dir);
            Ok((load_table(dir, key)?, dir.display().to_string()))
        }
        None => Ok((reference_table(key), "embedded".to_string())),
    }
}

fn step_summary(key: ConfigKey, step: usize, state: &StateVector) -> StepSummary {
    let mut mags = state.terms().map(|(_, a)| a.norm());
    let first = mags.next();
    let uniform = first.filter(|&m| mags.all(|x| (x - m).abs() <= FIXTURE_TOLERANCE));
    StepSummary {
        step,
        terms: state.nnz(),
        amplitude_magnitude: uniform,
        fixture: fixture(key, step).map(|f| diff_fixture(&f, state, FIXTURE_TOLERANCE).to_string()),
    }
}

fn walk_steps(key: ConfigKey, upto: usize) -> Result<Vec<StateVector>> {
    let program = build_walk_program(key.protocol, key.topology);
    if upto > program.steps.len() {
        return Err(Error::StepOutOfRange { upto, steps: program.steps.len() });
    }
    let mut states = program.trace()?;
    states.truncate(upto + 1);
    Ok(states)
}

pub fn state(key: ConfigKey, upto: Option<usize>) -> Result<(RunReport, bool)> {
    let upto = upto.unwrap_or(key.protocol.step_count());
    let states = walk_steps(key, upto)?;
    let mut report = RunReport::new("state", ConfigEcho { upto: Some(upto), ..echo(key) });
    report.steps = states.iter().enumerate().map(|(k, s)| step_summary(key, k, s)).collect();
    let last = states.last().expect("initial state is always present");
    report.terms =
        last.terms().map(|(index, a)| TermEntry { ket: index.to_string(), re: a.re, im: a.im }).collect();
    Ok((report, true))
}

pub fn verify(key: ConfigKey, trials: usize, seed: u64) -> Result<(RunReport, bool)> {
    let (table, source) = published_table(key)?;
    let results = verify_table(&table, trials, seed)?;
    let (claim_text, claim) = claimed_probability(key);

    let rows: Vec<RowEntry> = summarize(&results)
        .into_iter()
        .map(|s| RowEntry {
            outcome: s.outcome.to_string(),
            correction: s.correction.to_string(),
            failures: s.failures,
            min_fidelity: s.min_fidelity,
            min_probability: s.min_probability,
            max_probability: s.max_probability,
            error: s.error,
        })
        .collect();
    let unlisted = outcome_space(key).iter().filter(|o| table.get(o).is_none()).count();

    let mut seen: Vec<f64> = Vec::new();
    for r in &rows {
        for p in [r.min_probability, r.max_probability] {
            if r.error.is_none() && !seen.iter().any(|q| (q - p).abs() <= PROBABILITY_TOLERANCE) {
                seen.push(p);
            }
        }
    }
    seen.sort_by(f64::total_cmp);
    let off_claim = rows
        .iter()
        .filter(|r| {
            (r.min_probability - claim).abs() > PROBABILITY_TOLERANCE
                || (r.max_probability - claim).abs() > PROBABILITY_TOLERANCE
        })
        .count();
    let failed = rows.iter().filter(|r| r.failures > 0).count();
    let summary = VerificationSummary {
        rows: rows.len(),
        trials_per_row: trials,
        passed_rows: rows.len() - failed,
        failed_rows: failed,
        min_fidelity: rows.iter().map(|r| r.min_fidelity).fold(1.0, f64::min),
        claimed_probability: claim_text.to_string(),
        computed_probabilities: seen,
        rows_off_claim: off_claim,
        row_results: rows,
    };

    let mut report = RunReport::new(
        "verify",
        ConfigEcho { trials: Some(trials), seed: Some(seed), table_source: Some(source), ..echo(key) },
    );
    let passed = failed == 0 && unlisted == 0 && summary.rows > 0;
    if unlisted > 0 {
        report.probabilities = outcome_space(key)
            .iter()
            .filter(|o| table.get(o).is_none())
            .map(|o| ProbabilityEntry { outcome: format!("{o} (no row)"), probability: 0.0, claimed: None, matches_claim: None })
            .collect();
    }
    report.verification = Some(summary);
    Ok((report, passed))
}

pub fn derive(key: ConfigKey, output: Option<&Path>, against: Option<&Path>, seed: u64) -> Result<(RunReport, bool)> {
    let derived = derive_table(key, seed)?;
    if let Some(path) = output {
        std::fs::write(path, derived.render()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let (reference, source) = match against {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            (CorrectionTable::parse(key, Provenance::Reference, &text)?, path.display().to_string())
        }
        None => {
            let (t, source) = published_table(key)?;
            (t, format!("published table ({source})"))
        }
    };
    let diff = diff_tables(&reference, &derived, seed)?;
    let counts = diff.counts();
    let exceptions = diff
        .exceptions()
        .map(|r| DiffEntry {
            outcome: r.outcome.to_string(),
            status: match r.status {
                RowStatus::Match => "match",
                RowStatus::ListedInvalid => "invalid",
                RowStatus::MissingRow(Side::Derived) => "not derived",
                RowStatus::MissingRow(Side::Listed) => "not listed",
            }
            .to_string(),
            listed: r.listed.as_ref().map(ToString::to_string),
            derived: r.derived.as_ref().map(ToString::to_string),
            note: r.note.clone(),
        })
        .collect();

    let mut report = RunReport::new(
        "derive",
        ConfigEcho { seed: Some(seed), output: output.map(|p| p.display().to_string()), ..echo(key) },
    );
    report.diff = Some(DiffSummary {
        against: source,
        rows: diff.rows.len(),
        matched: counts.matched,
        invalid: counts.listed_invalid,
        missing: counts.missing,
        non_canonical: counts.non_canonical,
        exceptions,
    });
    Ok((report, counts.listed_invalid == 0))
}

pub fn run(key: ConfigKey, alice: (f64, f64), bob: (f64, f64), seed: u64) -> Result<(RunReport, bool)> {
    let config = ProtocolConfig::new(key.protocol, key.topology, alice, bob)?;
    let (table, source) = published_table(key)?;
    let runner = ProtocolRunner::new(key)?;
    let (claim_text, claim) = claimed_probability(key);

    let space = outcome_space(key);
    let mut probabilities = Vec::with_capacity(space.len());
    for o in &space {
        probabilities.push(runner.success_probability(config.alice_target, config.bob_target, o)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    let mut picked = space.len() - 1;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc {
            picked = i;
            break;
        }
    }
    let outcome = &space[picked];
    let sample = match table.get(outcome) {
        Some(c) => {
            let r = runner.run(config.alice_target, config.bob_target, outcome, c);
            SampleEntry {
                outcome: outcome.to_string(),
                probability: probabilities[picked],
                correction: Some(c.to_string()),
                fidelity: r.fidelity,
                passed: r.passed(),
                error: r.error,
            }
        }
        None => SampleEntry {
            outcome: outcome.to_string(),
            probability: probabilities[picked],
            correction: None,
            fidelity: 0.0,
            passed: false,
            error: Some("no correction listed for this outcome".to_string()),
        },
    };

    let mut report = RunReport::new(
        "run",
        ConfigEcho { seed: Some(seed), alice: Some(alice), bob: Some(bob), table_source: Some(source), ..echo(key) },
    );
    report.steps = walk_steps(key, key.protocol.step_count())?
        .iter()
        .enumerate()
        .map(|(k, s)| step_summary(key, k, s))
        .collect();
    report.probabilities = space
        .iter()
        .zip(&probabilities)
        .map(|(o, &p)| ProbabilityEntry {
            outcome: o.to_string(),
            probability: p,
            claimed: Some(claim_text.to_string()),
            matches_claim: Some((p - claim).abs() <= PROBABILITY_TOLERANCE),
        })
        .collect();
    let passed = sample.passed;
    report.sample = Some(sample);
    Ok((report, passed))
}
