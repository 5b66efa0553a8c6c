use serde::{Deserialize, Serialize};

use crate::geometry::{angular_union, convex_intersection_area, signed_area, BBox2, P2};

use super::{PlanarLayout, UnfoldError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub a: usize,
    pub b: usize,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Pairs with `a < b` in ascending order.
    pub overlapping_pairs: Vec<OverlapPair>,
    /// Largest pairwise intersection area, overlapping or not.
    pub max_area: f64,
    pub threshold: f64,
}

impl OverlapReport {
    pub fn is_overlapping(&self) -> bool {
        !self.overlapping_pairs.is_empty()
    }
}

/// Pairwise intersection of convex counterclockwise polygons. `ids` label
/// the polygons in the report.
pub fn polygon_overlaps(polygons: &[Vec<P2>], ids: &[usize]) -> OverlapReport {
    let total: f64 = polygons.iter().map(|p| signed_area(p).abs()).sum();
    let threshold = 1e-9 * total;
    let boxes: Vec<BBox2> = polygons.iter().map(|p| BBox2::of(p)).collect();
    let mut report = OverlapReport {
        threshold,
        ..OverlapReport::default()
    };
    for i in 0..polygons.len() {
        for j in i + 1..polygons.len() {
            if !boxes[i].overlaps(&boxes[j]) {
                continue;
            }
            let area = convex_intersection_area(&polygons[i], &polygons[j]);
            report.max_area = report.max_area.max(area);
            if area > threshold {
                let (a, b) = (ids[i].min(ids[j]), ids[i].max(ids[j]));
                report.overlapping_pairs.push(OverlapPair { a, b, area });
            }
        }
    }
    report.overlapping_pairs.sort_by_key(|p| (p.a, p.b));
    report
}

/// Angle covered more than once by wedges `(apex, start, width)` whose
/// apexes coincide within `tol`, summed over distinct apex positions.
pub fn angular_excess(wedges: &[(P2, f64, f64)], tol: f64) -> f64 {
    let mut clusters: Vec<(P2, Vec<(f64, f64)>)> = Vec::new();
    for &(apex, start, width) in wedges {
        match clusters.iter_mut().find(|c| (c.0 - apex).norm() <= tol) {
            Some(c) => c.1.push((start, width)),
            None => clusters.push((apex, vec![(start, width)])),
        }
    }
    clusters
        .iter()
        .map(|(_, w)| w.iter().map(|x| x.1).sum::<f64>() - angular_union(w))
        .sum()
}

/// Interior wedge of a counterclockwise polygon at corner `i`.
pub fn corner_wedge(polygon: &[P2], i: usize) -> (P2, f64, f64) {
    let k = polygon.len();
    let apex = polygon[i];
    let next = polygon[(i + 1) % k] - apex;
    let prev = polygon[(i + k - 1) % k] - apex;
    let start = next.y.atan2(next.x);
    let width = (prev.y.atan2(prev.x) - start).rem_euclid(std::f64::consts::TAU);
    (apex, start, width)
}

pub fn check_overlap(layout: &PlanarLayout) -> Result<OverlapReport, UnfoldError> {
    if !layout.consistency_ok {
        return Err(UnfoldError::InconsistentLayout);
    }
    let ids: Vec<usize> = layout.faces.iter().map(|f| f.face).collect();
    Ok(polygon_overlaps(&layout.polygons(), &ids))
}
