//! Cross-validation plans, CV prediction error, and binary classification
//! metrics.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Metric, Result};
use crate::seeding::{self, tag};

/// Fold label (1-based) for each of `n` observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f - 1] += 1;
        }
        sizes
    }

    /// `(train, test)` row indices for fold `fold` (1-based).
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignments.len()).partition(|&i| self.assignments[i] != fold)
    }
}

/// A seeded random partition of `0..n` into `k` folds whose sizes differ by
/// at most one.
pub fn cv_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!("need 2 <= K <= n, got K = {k}, n = {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeding::rng(seed, &[tag::FOLDS]));
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k + 1;
    }
    Ok(FoldPlan { k, assignments })
}

/// `sqrt(mean((y - ŷ)²))` over pooled held-out predictions.
pub fn cv_rmse(y_true: &[f64], y_pred_heldout: &[f64]) -> Result<f64> {
    if y_true.len() != y_pred_heldout.len() {
        return Err(Error::invalid(format!(
            "{} observations but {} predictions",
            y_true.len(),
            y_pred_heldout.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::invalid("no observations"));
    }
    let sse: f64 = y_true
        .iter()
        .zip(y_pred_heldout)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sse / y_true.len() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn as_label(v: f64, which: &str, i: usize) -> Result<bool> {
    if v == 1.0 {
        Ok(true)
    } else if v == 0.0 {
        Ok(false)
    } else {
        Err(Error::invalid(format!("{which}[{i}] = {v} is not 0 or 1")))
    }
}

pub fn confusion_counts(y_true: &[f64], y_pred: &[f64]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "{} labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (i, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        match (as_label(t, "y_true", i)?, as_label(p, "y_pred", i)?) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    c.tn = y_true.len() - c.tp - c.fp - c.fn_;
    Ok(c)
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationScores {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

pub fn precision_recall_f(counts: &ConfusionCounts) -> Result<ClassificationScores> {
    if counts.tp + counts.fp == 0 {
        return Err(Error::UndefinedMetric(Metric::Precision));
    }
    if counts.tp + counts.fn_ == 0 {
        return Err(Error::UndefinedMetric(Metric::Recall));
    }
    let precision = counts.tp as f64 / (counts.tp + counts.fp) as f64;
    let recall = counts.tp as f64 / (counts.tp + counts.fn_) as f64;
    Ok(ClassificationScores {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fold_examples() {
        let plan = cv_folds(10, 5, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        let mut sizes = cv_folds(11, 5, 1).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        let loo = cv_folds(5, 5, 3).unwrap();
        assert_eq!(loo.fold_sizes(), vec![1; 5]);
        assert!(cv_folds(5, 1, 0).is_err());
        assert!(cv_folds(5, 6, 0).is_err());
        assert_eq!(cv_folds(40, 5, 9).unwrap(), cv_folds(40, 5, 9).unwrap());
    }

    #[test]
    fn split_partitions_rows() {
        let plan = cv_folds(13, 4, 2).unwrap();
        let mut seen = [0; 13];
        for f in 1..=4 {
            let (train, test) = plan.split(f);
            assert_eq!(train.len() + test.len(), 13);
            for i in test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(cv_rmse(&[1., 2., 3.], &[1., 2., 3.]).unwrap(), 0.0);
        assert_eq!(cv_rmse(&[0., 0.], &[3., 4.]).unwrap(), 12.5f64.sqrt());
        assert!((cv_rmse(&[1., 5., -2.], &[1.75, 5.75, -1.25]).unwrap() - 0.75).abs() < 1e-15);
        assert!(cv_rmse(&[1.], &[1., 2.]).is_err());
    }

    #[test]
    fn confusion_examples() {
        let c = confusion_counts(&[1., 1., 0.], &[1., 0., 1.]).unwrap();
        assert_eq!((c.tp, c.fn_, c.fp, c.tn), (1, 1, 1, 0));
        let c = confusion_counts(&[1., 0., 0., 1.], &[1., 0., 0., 1.]).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = confusion_counts(&[1., 0., 0., 1.], &[0., 1., 1., 0.]).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
        assert!(confusion_counts(&[1., 2.], &[1., 0.]).is_err());
    }

    #[test]
    fn metric_examples() {
        assert!((f_measure(0.95, 0.95) - 0.95).abs() < 1e-15);
        assert!((f_measure(0.850, 0.944) - 0.895).abs() < 0.001);
        let s = precision_recall_f(&ConfusionCounts { tp: 0, fp: 2, fn_: 3, tn: 1 }).unwrap();
        assert_eq!((s.precision, s.recall, s.f_measure), (0.0, 0.0, 0.0));
        assert!(matches!(
            precision_recall_f(&ConfusionCounts::default()),
            Err(Error::UndefinedMetric(Metric::Precision))
        ));
        assert!(matches!(
            precision_recall_f(&ConfusionCounts { tp: 0, fp: 1, fn_: 0, tn: 4 }),
            Err(Error::UndefinedMetric(Metric::Recall))
        ));
    }

    proptest! {
        #[test]
        fn f_lies_between_precision_and_recall(p in 0.001f64..1.0, r in 0.001f64..1.0) {
            let f = f_measure(p, r);
            prop_assert!(f >= p.min(r) - 1e-15 && f <= p.max(r) + 1e-15);
            if p != r {
                prop_assert!(f > p.min(r) && f < p.max(r));
            }
        }

        #[test]
        fn label_swap_swaps_counts(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..50)) {
            let t: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let q: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let a = confusion_counts(&t, &q).unwrap();
            let flip = |v: &[f64]| v.iter().map(|x| 1.0 - x).collect::<Vec<_>>();
            let b = confusion_counts(&flip(&t), &flip(&q)).unwrap();
            prop_assert_eq!((a.tp, a.tn, a.fp, a.fn_), (b.tn, b.tp, b.fn_, b.fp));
            prop_assert_eq!(a.total(), t.len());
        }

        #[test]
        fn shifted_perfect_predictor(y in prop::collection::vec(-100.0f64..100.0, 1..50), c in -10.0f64..10.0) {
            let pred: Vec<f64> = y.iter().map(|v| v + c).collect();
            prop_assert!((cv_rmse(&y, &pred).unwrap() - c.abs()).abs() < 1e-9);
        }
    }
}
