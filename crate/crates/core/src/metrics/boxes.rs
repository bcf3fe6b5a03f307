use serde::{Deserialize, Serialize};

use crate::grammar::Aabb;

/// Intersection over union. Zero-volume boxes score 0 against anything but
/// an identical box, which scores 1.
pub fn iou(a: &Aabb, b: &Aabb) -> f64 {
    let (va, vb) = (a.volume(), b.volume());
    if va == 0.0 || vb == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let (amin, amax, bmin, bmax) = (a.min(), a.max(), b.min(), b.max());
    let inter: f64 = (0..3)
        .map(|k| (amax[k].min(bmax[k]) - amin[k].max(bmin[k])).max(0.0))
        .product();
    let union = va + vb - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// How each ground-truth box picks its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Matching {
    /// Closest center; ties go to the higher IoU, then the lower index.
    #[default]
    NearestCenter,
    /// Highest IoU; ties go to the lower index.
    MaxIou,
}

fn center_distance(a: &Aabb, b: &Aabb) -> f64 {
    let (ca, cb) = (a.center(), b.center());
    (0..3).map(|k| (ca[k] - cb[k]).powi(2)).sum::<f64>().sqrt()
}

fn best_match(g: &Aabb, pred: &[Aabb], matching: Matching) -> f64 {
    let scored = pred.iter().map(|p| (center_distance(g, p), iou(g, p)));
    let pick = match matching {
        Matching::NearestCenter => scored.reduce(|best, c| {
            if c.0 < best.0 || (c.0 == best.0 && c.1 > best.1) {
                c
            } else {
                best
            }
        }),
        Matching::MaxIou => scored.reduce(|best, c| if c.1 > best.1 { c } else { best }),
    };
    pick.map_or(0.0, |(_, v)| v)
}

/// Mean over ground-truth boxes of the IoU with the matched prediction.
/// Several ground-truth boxes may share a prediction. No predictions scores 0;
/// `None` when `gt` is empty.
pub fn match_and_score(gt: &[Aabb], pred: &[Aabb], matching: Matching) -> Option<f64> {
    if gt.is_empty() {
        return None;
    }
    let total: f64 = gt.iter().map(|g| best_match(g, pred, matching)).sum();
    Some(total / gt.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(min: [f64; 3], max: [f64; 3]) -> Aabb {
        Aabb::new(min, max).unwrap()
    }

    #[test]
    fn analytic_iou() {
        let a = b([0.0; 3], [1.0; 3]);
        let s = b([0.5, 0.0, 0.0], [1.0, 1.0, 1.0]);
        assert_eq!(iou(&a, &a), 1.0);
        // Same unit cube shifted half a side along x.
        let c = b([-0.5, 0.0, 0.0], [0.5, 1.0, 1.0]);
        let d = b([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        assert!((iou(&c, &d) - 1.0 / 3.0).abs() < 1e-12);
        assert!((iou(&a, &s) - 0.5).abs() < 1e-12);
        assert_eq!(iou(&b([-1.0; 3], [-0.5; 3]), &a), 0.0);
    }

    #[test]
    fn degenerate_boxes() {
        let flat = b([0.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
        assert_eq!(iou(&flat, &flat), 1.0);
        assert_eq!(iou(&flat, &b([0.0; 3], [1.0; 3])), 0.0);
    }

    #[test]
    fn matching_rules() {
        let g = [b([0.0; 3], [0.5; 3])];
        assert_eq!(match_and_score(&g, &g, Matching::NearestCenter), Some(1.0));
        assert_eq!(match_and_score(&g, &[], Matching::NearestCenter), Some(0.0));
        assert_eq!(match_and_score(&[], &g, Matching::NearestCenter), None);
        // Both share the center; the tighter one has higher IoU.
        let loose = b([-0.25; 3], [0.75; 3]);
        let tight = b([0.05; 3], [0.45; 3]);
        let s = match_and_score(&g, &[loose, tight], Matching::NearestCenter).unwrap();
        assert_eq!(s, iou(&g[0], &tight).max(iou(&g[0], &loose)));
        // The nearest center wins even with lower IoU.
        let near = b([0.2; 3], [0.3; 3]);
        let far = b([0.05; 3], [0.5; 3]);
        let s = match_and_score(&g, &[far, near], Matching::NearestCenter).unwrap();
        assert_eq!(s, iou(&g[0], &near));
        let s = match_and_score(&g, &[far, near], Matching::MaxIou).unwrap();
        assert_eq!(s, iou(&g[0], &far));
    }
}
