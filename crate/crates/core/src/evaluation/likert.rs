use super::stats::{holm_correct, wilcoxon_signed_rank, TestResult};
use super::EvalError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

/// One questionnaire answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertRow {
    pub participant: String,
    pub condition: String,
    pub question: String,
    pub score: f64,
}

/// Reads `participant,condition,question,score` CSV with a header line.
pub fn parse_likert<R: std::io::Read>(reader: R) -> Result<Vec<LikertRow>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (k, row) in rdr.deserialize::<LikertRow>().enumerate() {
        let row =
            row.map_err(|e| EvalError::Malformed(format!("questionnaire row {}: {e}", k + 2)))?;
        if !row.score.is_finite() {
            return Err(EvalError::Malformed(format!(
                "questionnaire row {}: score",
                k + 2
            )));
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertComparison {
    pub question: String,
    pub a: String,
    pub b: String,
    pub test: TestResult,
    pub p_holm: f64,
}

/// Signed-rank tests of the per-participant score difference for every
/// condition pair of every question, Holm-adjusted as one family.
pub fn analyze_likert(rows: &[LikertRow]) -> Result<Vec<LikertComparison>, EvalError> {
    let mut by_q: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, f64>>> = BTreeMap::new();
    for r in rows {
        let slot = by_q
            .entry(&r.question)
            .or_default()
            .entry(&r.condition)
            .or_default();
        if slot.insert(&r.participant, r.score).is_some() {
            return Err(EvalError::Malformed(format!(
                "duplicate answer: participant {} condition {} question {}",
                r.participant, r.condition, r.question
            )));
        }
    }
    let mut tests = Vec::new();
    for (q, conds) in &by_q {
        let names: BTreeSet<&str> = conds.keys().copied().collect();
        let names: Vec<&str> = names.into_iter().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let diffs: Vec<f64> = conds[a]
                    .iter()
                    .filter_map(|(p, sa)| conds[b].get(p).map(|sb| sb - sa))
                    .collect();
                if diffs.is_empty() {
                    continue;
                }
                tests.push((
                    q.to_string(),
                    a.to_string(),
                    b.to_string(),
                    wilcoxon_signed_rank(&diffs)?,
                ));
            }
        }
    }
    let adj = holm_correct(&tests.iter().map(|t| t.3.p_value).collect::<Vec<_>>())?;
    Ok(tests
        .into_iter()
        .zip(adj)
        .map(|((question, a, b, test), p_holm)| LikertComparison {
            question,
            a,
            b,
            test,
            p_holm,
        })
        .collect())
}

pub fn likert_text(rows: &[LikertComparison]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(
            s,
            "{:<6} {:>12} vs {:<12} n = {:>3}  W+ = {:>6.1}  p = {:.4}  p_holm = {:.4}",
            r.question, r.a, r.b, r.test.n, r.test.statistic, r.test.p_value, r.p_holm
        );
    }
    s
}
