//! Report produced by every command, rendered as aligned text or as JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepSummary>,
    /// Nonzero terms of the final state, sorted by basis index.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probabilities: Vec<ProbabilityEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<DiffSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub protocol: String,
    pub topology: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upto: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub terms: usize,
    /// Common magnitude of all amplitudes, when they share one.
    pub amplitude_magnitude: Option<f64>,
    /// Comparison with the published state for this step, if there is one.
    pub fixture: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub ket: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEntry {
    pub outcome: String,
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_claim: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub rows: usize,
    pub trials_per_row: usize,
    pub passed_rows: usize,
    pub failed_rows: usize,
    pub min_fidelity: f64,
    pub claimed_probability: String,
    /// Distinct joint probabilities seen across all rows.
    pub computed_probabilities: Vec<f64>,
    pub rows_off_claim: usize,
    pub row_results: Vec<RowEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowEntry {
    pub outcome: String,
    pub correction: String,
    pub failures: usize,
    pub min_fidelity: f64,
    pub min_probability: f64,
    pub max_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffSummary {
    pub against: String,
    pub rows: usize,
    pub matched: usize,
    pub invalid: usize,
    pub missing: usize,
    pub non_canonical: usize,
    pub exceptions: Vec<DiffEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub outcome: String,
    pub status: String,
    pub listed: Option<String>,
    pub derived: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub outcome: String,
    pub probability: f64,
    pub correction: Option<String>,
    pub fidelity: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str, config: ConfigEcho) -> Self {
        Self {
            command: command.to_string(),
            config,
            steps: Vec::new(),
            terms: Vec::new(),
            probabilities: Vec::new(),
            verification: None,
            diff: None,
            sample: None,
        }
    }

    pub fn render_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn parse_machine(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "{} {} {}", self.command, c.protocol, c.topology);
        let mut echo = Vec::new();
        if let Some(v) = c.upto {
            echo.push(format!("upto {v}"));
        }
        if let Some(v) = c.trials {
            echo.push(format!("trials {v}"));
        }
        if let Some(v) = c.seed {
            echo.push(format!("seed {v}"));
        }
        if let Some((x, y)) = c.alice {
            echo.push(format!("alice ({x}, {y})"));
        }
        if let Some((x, y)) = c.bob {
            echo.push(format!("bob ({x}, {y})"));
        }
        if let Some(v) = &c.table_source {
            echo.push(format!("tables {v}"));
        }
        if let Some(v) = &c.output {
            echo.push(format!("output {v}"));
        }
        if !echo.is_empty() {
            let _ = writeln!(out, "  {}", echo.join(", "));
        }

        if !self.steps.is_empty() {
            let _ = writeln!(out, "\n{:>4}  {:>5}  {:>12}  published", "step", "terms", "|amplitude|");
            for s in &self.steps {
                let mag = s.amplitude_magnitude.map_or_else(|| "mixed".to_string(), |m| format!("{m:.10}"));
                let fx = s.fixture.as_deref().unwrap_or("-");
                let _ = writeln!(out, "{:>4}  {:>5}  {:>12}  {}", s.step, s.terms, mag, fx);
            }
        }

        if !self.terms.is_empty() {
            let width = self.terms.iter().map(|t| t.ket.chars().count()).max().unwrap_or(0);
            let _ = writeln!(out);
            for t in &self.terms {
                let _ = writeln!(out, "{:<width$}  {}", t.ket, complex_text(t.re, t.im));
            }
        }

        if !self.probabilities.is_empty() {
            let width = self.probabilities.iter().map(|p| p.outcome.len()).max().unwrap_or(0).max(7);
            let _ = writeln!(out, "\n{:<width$}  {:>14}  claimed", "outcome", "probability");
            for p in &self.probabilities {
                let claim = match (&p.claimed, p.matches_claim) {
                    (Some(c), Some(true)) => format!("{c} ok"),
                    (Some(c), Some(false)) => format!("{c} differs"),
                    (Some(c), None) => c.clone(),
                    _ => "-".to_string(),
                };
                let _ = writeln!(out, "{:<width$}  {:>14.10}  {}", p.outcome, p.probability, claim);
            }
        }

        if let Some(v) = &self.verification {
            let width = v.row_results.iter().map(|r| r.outcome.len()).max().unwrap_or(0).max(7);
            let _ = writeln!(
                out,
                "\n{:<width$}  {:<12}  {:>8}  {:>14}  {:>14}",
                "outcome", "correction", "failures", "min fidelity", "probability"
            );
            for r in &v.row_results {
                let prob = if (r.max_probability - r.min_probability).abs() <= 1e-12 {
                    format!("{:.10}", r.min_probability)
                } else {
                    format!("{:.6}..{:.6}", r.min_probability, r.max_probability)
                };
                let _ = write!(
                    out,
                    "{:<width$}  {:<12}  {:>8}  {:>14.12}  {:>14}",
                    r.outcome, r.correction, r.failures, r.min_fidelity, prob
                );
                if let Some(e) = &r.error {
                    let _ = write!(out, "  {e}");
                }
                let _ = writeln!(out);
            }
            let seen: Vec<String> = v.computed_probabilities.iter().map(|p| format!("{p:.10} (1/{:.0})", 1.0 / p)).collect();
            let _ = writeln!(out, "\nrows: {} passed, {} failed of {}", v.passed_rows, v.failed_rows, v.rows);
            let _ = writeln!(out, "minimum fidelity: {:.12}", v.min_fidelity);
            let _ = writeln!(out, "claimed probability: {}", v.claimed_probability);
            let _ = writeln!(out, "computed probabilities: {}", seen.join(", "));
            let _ = writeln!(out, "rows off the claim: {}", v.rows_off_claim);
        }

        if let Some(d) = &self.diff {
            let _ = writeln!(out, "\ndiff against {}", d.against);
            let _ = writeln!(
                out,
                "  {} rows: {} match ({} with a non-canonical word), {} invalid, {} missing",
                d.rows, d.matched, d.non_canonical, d.invalid, d.missing
            );
            for e in &d.exceptions {
                let _ = write!(
                    out,
                    "  {:<24}  {:<14}  listed {:<10}  derived {:<10}",
                    e.outcome,
                    e.status,
                    e.listed.as_deref().unwrap_or("-"),
                    e.derived.as_deref().unwrap_or("-")
                );
                if let Some(n) = &e.note {
                    let _ = write!(out, "  # {n}");
                }
                let _ = writeln!(out);
            }
        }

        if let Some(s) = &self.sample {
            let _ = writeln!(out, "\nsampled outcome: {} (probability {:.10})", s.outcome, s.probability);
            let _ = writeln!(out, "correction: {}", s.correction.as_deref().unwrap_or("none listed"));
            let _ = writeln!(out, "fidelity: {:.12} ({})", s.fidelity, if s.passed { "pass" } else { "FAIL" });
            if let Some(e) = &s.error {
                let _ = writeln!(out, "error: {e}");
            }
        }
        out
    }
}

fn complex_text(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:+.10}")
    } else {
        format!("{re:+.10}{im:+.10}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new(
            "run",
            ConfigEcho { protocol: "controlled".into(), topology: "k2".into(), alice: Some((0.6, -0.8)), ..Default::default() },
        );
        r.probabilities.push(ProbabilityEntry {
            outcome: "alpha0 beta0 gamma0 00".into(),
            probability: 1.0 / 64.0 + 1e-17,
            claimed: Some("1/64".into()),
            matches_claim: Some(true),
        });
        r.sample = Some(SampleEntry {
            outcome: "alpha0 beta0 gamma0 00".into(),
            probability: 0.1 + 0.2,
            correction: None,
            fidelity: 0.999_999_999_999_9,
            passed: true,
            error: None,
        });
        r
    }

    #[test]
    fn machine_form_round_trips() {
        let r = sample();
        assert_eq!(RunReport::parse_machine(&r.render_machine()).unwrap(), r);
    }

    #[test]
    fn text_form_mentions_each_section() {
        let t = sample().render_text();
        assert!(t.contains("alice (0.6, -0.8)"));
        assert!(t.contains("1/64 ok"));
        assert!(t.contains("none listed"));
    }
}
