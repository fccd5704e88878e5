//! Ranking captioning systems by a metric and by human judgment.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::table::{fmt3, text_table};
use crate::corpus::{CaptionKey, GoldAnnotation};
use crate::error::{Error, Result};
use crate::scoring::ScoreReport;

/// Kendall's tau-b between two paired samples.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("{} x values and {} y values", x.len(), y.len())));
    }
    let n = x.len();
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).partial_cmp(&0.0).unwrap_or(Ordering::Equal);
            let dy = (y[i] - y[j]).partial_cmp(&0.0).unwrap_or(Ordering::Equal);
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => {}
                (Ordering::Equal, _) => tie_x += 1,
                (_, Ordering::Equal) => tie_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom = (((concordant + discordant + tie_x) * (concordant + discordant + tie_y)) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::ZeroVariance("rank lists".into()));
    }
    Ok((concordant - discordant) as f64 / denom)
}

/// 1-based ranks by descending value; ties keep input order.
pub fn descending_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0; values.len()];
    for (r, i) in order.into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRank {
    pub model_id: String,
    pub metric_mean: f64,
    pub gold_mean: f64,
    pub metric_rank: usize,
    pub gold_rank: usize,
    pub discordant: bool,
    pub captions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub models: Vec<ModelRank>,
    pub kendall_tau: f64,
}

impl RankingReport {
    pub fn discordant(&self) -> Vec<&str> {
        self.models.iter().filter(|m| m.discordant).map(|m| m.model_id.as_str()).collect()
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .models
            .iter()
            .map(|m| {
                vec![
                    m.model_id.clone(),
                    format!("{} ({})", fmt3(m.metric_mean), m.metric_rank),
                    format!("{} ({})", fmt3(m.gold_mean), m.gold_rank),
                    if m.discordant { "*".into() } else { String::new() },
                ]
            })
            .collect();
        let mut t = text_table(&["model", "metric", "human", "flag"], &rows);
        t.push_str(&format!("kendall tau = {}\n", fmt3(self.kendall_tau)));
        t
    }
}

/// Mean paragraph score and mean gold factual-sentence ratio per model,
/// the two rankings they induce, and where the rankings disagree.
pub fn system_ranking(reports: &[ScoreReport], gold: &BTreeMap<CaptionKey, GoldAnnotation>) -> Result<RankingReport> {
    let mut per_model: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    let mut missing = Vec::new();
    for r in reports {
        let key = CaptionKey::new(&r.video_id, &r.model_id);
        let Some(g) = gold.get(&key) else {
            missing.push(key.to_string());
            continue;
        };
        let e = per_model.entry(r.model_id.as_str()).or_default();
        e.0 += r.paragraph;
        e.1 += g.sentence_ratio();
        e.2 += 1;
    }
    if !missing.is_empty() {
        return Err(Error::MissingGold { ids: missing });
    }
    if per_model.len() < 2 {
        return Err(Error::Empty(format!("ranking needs at least 2 models, got {}", per_model.len())));
    }
    let ids: Vec<&str> = per_model.keys().copied().collect();
    let metric: Vec<f64> = per_model.values().map(|&(s, _, n)| s / n as f64).collect();
    let human: Vec<f64> = per_model.values().map(|&(_, g, n)| g / n as f64).collect();
    let mr = descending_ranks(&metric);
    let hr = descending_ranks(&human);
    let mut models: Vec<ModelRank> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| ModelRank {
            model_id: id.to_string(),
            metric_mean: metric[i],
            gold_mean: human[i],
            metric_rank: mr[i],
            gold_rank: hr[i],
            discordant: mr[i] != hr[i],
            captions: per_model[id].2,
        })
        .collect();
    models.sort_by_key(|m| m.gold_rank);
    let to_f = |r: &[usize]| r.iter().map(|&v| v as f64).collect::<Vec<_>>();
    Ok(RankingReport { kendall_tau: kendall_tau_b(&to_f(&mr), &to_f(&hr))?, models })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tau_cases() {
        assert_abs_diff_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        // One swapped adjacent pair among 5: (9 − 1) / 10.
        assert_abs_diff_eq!(kendall_tau_b(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 4.0, 5.0]).unwrap(), 0.8);
        // tau-b with a tie: c=2, d=0, ties in y = 1 → 2 / sqrt(3·2).
        assert_abs_diff_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0]).unwrap(), 2.0 / 6f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn ranks() {
        assert_eq!(descending_ranks(&[0.2, 0.9, 0.5]), [3, 1, 2]);
    }
}
