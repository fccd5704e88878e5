//! Agreement between metric scores and human judgments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::table::{fmt3, text_table};
use crate::corpus::{CaptionKey, GoldAnnotation};
use crate::error::{Error, Result};
use crate::scoring::{RefMode, ScoreReport};

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("{} x values and {} y values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Empty(format!("correlation needs at least 2 pairs, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("first variable".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("second variable".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub mode: RefMode,
    pub paragraph: f64,
    pub sentence: f64,
    pub word: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub fn to_table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.metric.clone(),
                    r.mode.short().to_string(),
                    fmt3(r.paragraph),
                    fmt3(r.sentence),
                    fmt3(r.word),
                    r.n.to_string(),
                ]
            })
            .collect();
        text_table(&["metric", "ref", "para", "sent", "word", "n"], &rows)
    }
}

/// One row per (metric, reference mode): the paragraph score of each
/// caption paired with its gold paragraph score, factual-sentence ratio and
/// factual-word ratio.
pub fn correlate(
    gold: &BTreeMap<CaptionKey, GoldAnnotation>,
    metrics: &[(String, Vec<ScoreReport>)],
) -> Result<CorrelationReport> {
    let mut rows = Vec::new();
    for (name, reports) in metrics {
        let mut by_mode: BTreeMap<RefMode, Vec<&ScoreReport>> = BTreeMap::new();
        for r in reports {
            by_mode.entry(r.mode).or_default().push(r);
        }
        for (mode, reports) in by_mode {
            let missing: Vec<String> = reports
                .iter()
                .map(|r| CaptionKey::new(&r.video_id, &r.model_id))
                .filter(|k| !gold.contains_key(k))
                .map(|k| k.to_string())
                .collect();
            if !missing.is_empty() {
                return Err(Error::MissingGold { ids: missing });
            }
            let x: Vec<f64> = reports.iter().map(|r| r.paragraph).collect();
            let g: Vec<&GoldAnnotation> = reports.iter().map(|r| &gold[&CaptionKey::new(&r.video_id, &r.model_id)]).collect();
            let para: Vec<f64> = g.iter().map(|g| f64::from(g.paragraph_score)).collect();
            let sent: Vec<f64> = g.iter().map(|g| g.sentence_ratio()).collect();
            let word: Vec<f64> = g.iter().map(|g| g.word_ratio()).collect();
            let ctx = |level: &str, e: Error| match e {
                Error::ZeroVariance(what) => Error::ZeroVariance(format!("{name} ({mode}) at {level} level: {what}")),
                other => other,
            };
            rows.push(CorrelationRow {
                metric: name.clone(),
                mode,
                paragraph: pearson(&x, &para).map_err(|e| ctx("paragraph", e))?,
                sentence: pearson(&x, &sent).map_err(|e| ctx("sentence", e))?,
                word: pearson(&x, &word).map_err(|e| ctx("word", e))?,
                n: x.len(),
            });
        }
    }
    Ok(CorrelationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_lines() {
        let x = [1.0, 2.0, 3.0, 7.0];
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson(&x, &up).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&x, &down).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_variance() {
        assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }
}
