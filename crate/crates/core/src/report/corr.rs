//! Rank correlation across tasks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ReportError;
use crate::instance::TaskKind;

/// 1-based ranks; ties share the mean of the positions they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, ReportError> {
    if xs.len() != ys.len() {
        return Err(ReportError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(ReportError::DegenerateInput(
            "need at least two points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(ReportError::DegenerateInput("non-finite value".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys)).ok_or_else(|| {
        ReportError::DegenerateInput("constant input has no rank correlation".into())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationMatrix {
    pub tasks: Vec<TaskKind>,
    pub models: Vec<String>,
    /// `cells[i][j]` is the correlation of tasks i and j, or the reason it is undefined.
    pub cells: Vec<Vec<Result<f64, String>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: TaskKind, b: TaskKind) -> Option<&Result<f64, String>> {
        let i = self.tasks.iter().position(|&t| t == a)?;
        let j = self.tasks.iter().position(|&t| t == b)?;
        Some(&self.cells[i][j])
    }
}

pub const MIN_MODELS: usize = 3;

pub fn cross_task_correlation(
    per_model: &BTreeMap<String, BTreeMap<TaskKind, f64>>,
) -> Result<CorrelationMatrix, ReportError> {
    if per_model.len() < MIN_MODELS {
        return Err(ReportError::DegenerateInput(format!(
            "need at least {MIN_MODELS} models, got {}",
            per_model.len()
        )));
    }
    let tasks: Vec<TaskKind> = per_model
        .values()
        .flat_map(|m| m.keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for (model, scores) in per_model {
        if let Some(t) = tasks.iter().find(|t| !scores.contains_key(t)) {
            return Err(ReportError::MissingTask {
                model: model.clone(),
                task: *t,
            });
        }
    }
    let column = |t: TaskKind| per_model.values().map(|m| m[&t]).collect::<Vec<f64>>();
    let cells = tasks
        .iter()
        .map(|&a| {
            tasks
                .iter()
                .map(|&b| {
                    if a == b {
                        Ok(1.0)
                    } else {
                        spearman(&column(a), &column(b)).map_err(|e| e.to_string())
                    }
                })
                .collect()
        })
        .collect();
    Ok(CorrelationMatrix {
        tasks,
        models: per_model.keys().cloned().collect(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cases() {
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(
            (spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12
        );
        assert!(matches!(
            spearman(&[1.0, 1.0], &[1.0, 2.0]),
            Err(ReportError::DegenerateInput(_))
        ));
        assert!(matches!(
            spearman(&[1.0], &[1.0, 2.0]),
            Err(ReportError::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 30.0]),
            [1.5, 3.0, 1.5, 4.0]
        );
    }

    #[test]
    fn matrix() {
        let mut m = BTreeMap::new();
        for (i, name) in ["a", "b", "c", "d"].iter().enumerate() {
            let x = i as f64;
            m.insert(
                name.to_string(),
                BTreeMap::from([
                    (TaskKind::LatentList, x),
                    (TaskKind::Mrcr, 2.0 * x),
                    (TaskKind::Idk, -x),
                ]),
            );
        }
        let c = cross_task_correlation(&m).unwrap();
        assert_eq!(c.get(TaskKind::LatentList, TaskKind::Mrcr), Some(&Ok(1.0)));
        assert_eq!(c.get(TaskKind::LatentList, TaskKind::Idk), Some(&Ok(-1.0)));
        assert_eq!(c.get(TaskKind::Idk, TaskKind::Idk), Some(&Ok(1.0)));
        m.remove("a");
        m.remove("b");
        assert!(cross_task_correlation(&m).is_err());
    }
}
