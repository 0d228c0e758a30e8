use std::collections::{BTreeMap, BTreeSet};

use crate::imgproc::iou;
use crate::visits::Detection;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    /// `image#index` of the prediction.
    pub pred_ref: String,
    /// `image#index` of the ground-truth box.
    pub gt_ref: String,
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub matched_pairs: Vec<MatchedPair>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScores {
    pub fn from_rates(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self { precision, recall, f1 }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn prf(m: &MatchResult) -> PrfScores {
    PrfScores::from_rates(ratio(m.tp, m.tp + m.fp), ratio(m.tp, m.tp + m.fn_))
}

/// Class-agnostic greedy matching, image by image.
///
/// Predictions are visited by descending confidence (input order on ties);
/// each takes the unmatched ground-truth box of highest IoU (lowest index on
/// ties) when that IoU exceeds `iou_min`. Both maps must cover the same
/// images.
pub fn match_detections(
    pred: &BTreeMap<String, Vec<Detection>>,
    gt: &BTreeMap<String, Vec<Detection>>,
    iou_min: f64,
) -> Result<MatchResult> {
    let pred_keys: BTreeSet<&String> = pred.keys().collect();
    let gt_keys: BTreeSet<&String> = gt.keys().collect();
    let unmatched: Vec<String> = pred_keys.symmetric_difference(&gt_keys).map(|s| (*s).clone()).collect();
    if !unmatched.is_empty() {
        return Err(Error::MismatchedImages(unmatched));
    }

    let mut result = MatchResult::default();
    for (image, preds) in pred {
        let truths = &gt[image];
        let mut order: Vec<usize> = (0..preds.len()).collect();
        order.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence).then(a.cmp(&b)));

        let mut taken = vec![false; truths.len()];
        for p in order {
            let mut best: Option<(usize, f64)> = None;
            for (g, truth) in truths.iter().enumerate() {
                if taken[g] {
                    continue;
                }
                let v = iou(&preds[p].bbox, &truth.bbox);
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((g, v));
                }
            }
            match best {
                Some((g, v)) if v > iou_min => {
                    taken[g] = true;
                    result.tp += 1;
                    result.matched_pairs.push(MatchedPair {
                        pred_ref: format!("{image}#{p}"),
                        gt_ref: format!("{image}#{g}"),
                        iou: v,
                    });
                }
                _ => result.fp += 1,
            }
        }
        result.fn_ += taken.iter().filter(|&&t| !t).count();
    }
    Ok(result)
}
