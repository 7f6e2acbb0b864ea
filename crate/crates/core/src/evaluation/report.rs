use super::stats::{holm_correct, wilcoxon_rank_sum, TestResult};
use super::trials::{front_detect_summary, FrontDetectSummary, TrialClass, TrialOutcome};
use super::EvalError;
use crate::world::Condition;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub trials: usize,
    pub perfect: usize,
    pub good: usize,
    pub miss: usize,
    pub mean_arrival_perfect: Option<f64>,
    pub mean_distance_perfect: Option<f64>,
    pub mean_distance_miss: Option<f64>,
    pub front_back_errs: usize,
}

impl ConditionSummary {
    pub fn count(&self, class: TrialClass) -> usize {
        match class {
            TrialClass::Perfect => self.perfect,
            TrialClass::Good => self.good,
            TrialClass::Miss => self.miss,
        }
    }

    pub fn ratio(&self, class: TrialClass) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.count(class) as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: Condition,
    pub b: Condition,
    pub test: TestResult,
    pub p_holm: f64,
}

/// Navigation results per condition, laid out like the group-ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigationReport {
    pub conditions: Vec<ConditionSummary>,
    /// Rank-sum tests of Perfect-trial arrival times between conditions.
    pub arrival_tests: Vec<PairwiseTest>,
    pub skipped_trials: usize,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

impl NavigationReport {
    pub fn from_outcomes(
        outcomes: &[TrialOutcome],
        skipped_trials: usize,
    ) -> Result<Self, EvalError> {
        let mut conditions = Vec::new();
        for c in Condition::ALL {
            let mine: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.condition == c).collect();
            if mine.is_empty() {
                continue;
            }
            let of = |k: TrialClass| mine.iter().filter(move |o| o.class == k);
            conditions.push(ConditionSummary {
                condition: c,
                trials: mine.len(),
                perfect: of(TrialClass::Perfect).count(),
                good: of(TrialClass::Good).count(),
                miss: of(TrialClass::Miss).count(),
                mean_arrival_perfect: mean(of(TrialClass::Perfect).map(|o| o.arrival_time)),
                mean_distance_perfect: mean(of(TrialClass::Perfect).map(|o| o.travel_distance)),
                mean_distance_miss: mean(of(TrialClass::Miss).map(|o| o.travel_distance)),
                front_back_errs: mine.iter().filter(|o| o.front_back_err).count(),
            });
        }
        let arrivals = |c: Condition| -> Vec<f64> {
            outcomes
                .iter()
                .filter(|o| o.condition == c && o.class == TrialClass::Perfect)
                .map(|o| o.arrival_time)
                .collect()
        };
        let mut tests = Vec::new();
        for (i, a) in conditions.iter().enumerate() {
            for b in &conditions[i + 1..] {
                let (xa, xb) = (arrivals(a.condition), arrivals(b.condition));
                if xa.is_empty() || xb.is_empty() {
                    continue;
                }
                tests.push((a.condition, b.condition, wilcoxon_rank_sum(&xa, &xb)?));
            }
        }
        let ps: Vec<f64> = tests.iter().map(|t| t.2.p_value).collect();
        let adj = holm_correct(&ps)?;
        let arrival_tests = tests
            .into_iter()
            .zip(adj)
            .map(|((a, b, test), p_holm)| PairwiseTest { a, b, test, p_holm })
            .collect();
        Ok(Self {
            conditions,
            arrival_tests,
            skipped_trials,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<22}", "Group");
        for c in &self.conditions {
            let _ = write!(s, "{:>14}", c.condition.label());
        }
        s.push('\n');
        for class in TrialClass::ALL {
            let _ = write!(s, "{:<22}", format!("{class:?}"));
            for c in &self.conditions {
                let cell = format!("{:.2} ({})", c.ratio(class), c.count(class));
                let _ = write!(s, "{cell:>14}");
            }
            s.push('\n');
        }
        let opt =
            |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |x| format!("{x:.prec$}"));
        type Column = fn(&ConditionSummary) -> Option<f64>;
        let rows: [(&str, Column); 3] = [
            ("Perfect arrival (s)", |c| c.mean_arrival_perfect),
            ("Perfect distance (m)", |c| c.mean_distance_perfect),
            ("Miss distance (m)", |c| c.mean_distance_miss),
        ];
        for (name, f) in rows {
            let _ = write!(s, "{name:<22}");
            for c in &self.conditions {
                let _ = write!(s, "{:>14}", opt(f(c), 1));
            }
            s.push('\n');
        }
        let _ = write!(s, "{:<22}", "Front/Back err");
        for c in &self.conditions {
            let _ = write!(s, "{:>14}", c.front_back_errs);
        }
        s.push('\n');
        if !self.arrival_tests.is_empty() {
            s.push_str("\nPerfect arrival time, rank-sum (Holm)\n");
            for t in &self.arrival_tests {
                let pair = format!("{} vs {}", t.a, t.b);
                let _ = writeln!(
                    s,
                    "  {pair:<26} W = {:>7.1}  p = {:.4}  p_holm = {:.4}",
                    t.test.statistic, t.test.p_value, t.p_holm
                );
            }
        }
        if self.skipped_trials > 0 {
            let _ = writeln!(s, "\n{} unfinished trial(s) skipped", self.skipped_trials);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDetectConditionSummary {
    pub condition: Condition,
    #[serde(flatten)]
    pub summary: FrontDetectSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDetectReport {
    pub conditions: Vec<FrontDetectConditionSummary>,
}

impl FrontDetectReport {
    pub fn from_errors(errors: &[(Condition, f64)]) -> Result<Self, EvalError> {
        let mut conditions = Vec::new();
        for c in Condition::ALL {
            let e: Vec<f64> = errors.iter().filter(|x| x.0 == c).map(|x| x.1).collect();
            if !e.is_empty() {
                conditions.push(FrontDetectConditionSummary {
                    condition: c,
                    summary: front_detect_summary(&e)?,
                });
            }
        }
        Ok(Self { conditions })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<12}{:>8}{:>16}{:>14}\n",
            "Condition", "n", "mean |err| (deg)", "within 30"
        );
        for c in &self.conditions {
            let _ = writeln!(
                s,
                "{:<12}{:>8}{:>16.2}{:>13.1}%",
                c.condition.label(),
                c.summary.n,
                c.summary.mean_abs,
                100.0 * c.summary.pct_within_30
            );
        }
        s
    }
}
