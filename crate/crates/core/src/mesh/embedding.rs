use crate::geometry::{convex_intersection_area, P2, P3, V3};

use super::PolyhedronMesh;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceIntersection {
    /// Non-coplanar faces meeting outside their shared vertices and edges;
    /// carries the length of the intersection segment.
    Crossing { faces: (usize, usize), length: f64 },
    /// Coplanar faces whose interiors overlap; carries the overlap area.
    Coplanar { faces: (usize, usize), area: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingReport {
    pub violations: Vec<FaceIntersection>,
}

impl EmbeddingReport {
    pub fn is_embedded(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pairwise face intersection test in space; pairs are reported in
/// ascending order.
pub fn check_embedded(mesh: &PolyhedronMesh) -> EmbeddingReport {
    let eps = 1e-9 * mesh.diameter();
    let area_eps = 1e-9 * mesh.surface_area();
    let polys: Vec<Vec<P3>> = mesh
        .faces()
        .iter()
        .map(|f| f.vertices.iter().map(|&v| mesh.position(v)).collect())
        .collect();
    let boxes: Vec<(P3, P3)> = polys
        .iter()
        .map(|p| p.iter().fold((p[0], p[0]), |(lo, hi), q| (lo.inf(q), hi.sup(q))))
        .collect();
    let mut report = EmbeddingReport::default();
    let faces = mesh.faces();
    for f in 0..faces.len() {
        for g in f + 1..faces.len() {
            let (lf, hf) = boxes[f];
            let (lg, hg) = boxes[g];
            if (0..3).any(|i| lf[i] > hg[i] + eps || lg[i] > hf[i] + eps) {
                continue;
            }
            let shared: Vec<usize> = faces[f]
                .vertices
                .iter()
                .copied()
                .filter(|v| faces[g].vertices.contains(v))
                .collect();
            let nf = faces[f].normal;
            let ng = faces[g].normal;
            let coplanar = nf.cross(&ng).norm() < 1e-12
                && polys[g]
                    .iter()
                    .all(|p| (nf.dot(&p.coords) - faces[f].offset).abs() < eps);
            if coplanar {
                let x = (polys[f][1] - polys[f][0]).normalize();
                let y = nf.cross(&x);
                let project = |poly: &[P3]| -> Vec<P2> {
                    let mut pts: Vec<P2> = poly
                        .iter()
                        .map(|p| P2::new(p.coords.dot(&x), p.coords.dot(&y)))
                        .collect();
                    if crate::geometry::signed_area(&pts) < 0.0 {
                        pts.reverse();
                    }
                    pts
                };
                let area = convex_intersection_area(&project(&polys[f]), &project(&polys[g]));
                if area > area_eps {
                    report
                        .violations
                        .push(FaceIntersection::Coplanar { faces: (f, g), area });
                }
                continue;
            }
            let Some((a, b)) = crossing_segment(&polys[f], &nf, faces[f].offset, &polys[g], &ng, faces[g].offset, eps)
            else {
                continue;
            };
            let allowed = match shared.as_slice() {
                [] => false,
                [v] => {
                    let p = mesh.position(*v);
                    (a - p).norm() <= eps && (b - p).norm() <= eps
                }
                [u, v] => {
                    let (p, q) = (mesh.position(*u), mesh.position(*v));
                    on_segment(&a, &p, &q, eps) && on_segment(&b, &p, &q, eps)
                }
                _ => false,
            };
            if !allowed {
                report.violations.push(FaceIntersection::Crossing {
                    faces: (f, g),
                    length: (b - a).norm(),
                });
            }
        }
    }
    report
}

fn on_segment(x: &P3, p: &P3, q: &P3, eps: f64) -> bool {
    let d = q - p;
    let t = ((x - p).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p + d * t - x).norm() <= eps
}

/// Portion of a convex polygon lying in a plane, as the extreme points along
/// `dir`.
fn plane_section(poly: &[P3], n: &V3, offset: f64, dir: &V3, eps: f64) -> Option<(P3, P3)> {
    let d: Vec<f64> = poly.iter().map(|p| n.dot(&p.coords) - offset).collect();
    if d.iter().all(|&x| x > eps) || d.iter().all(|&x| x < -eps) {
        return None;
    }
    let mut pts = Vec::new();
    let k = poly.len();
    for i in 0..k {
        let j = (i + 1) % k;
        if d[i].abs() <= eps {
            pts.push(poly[i]);
        }
        if (d[i] > eps && d[j] < -eps) || (d[i] < -eps && d[j] > eps) {
            let t = d[i] / (d[i] - d[j]);
            pts.push(poly[i] + (poly[j] - poly[i]) * t);
        }
    }
    let key = |p: &P3| dir.dot(&p.coords);
    let lo = *pts.iter().min_by(|a, b| key(a).total_cmp(&key(b)))?;
    let hi = *pts.iter().max_by(|a, b| key(a).total_cmp(&key(b)))?;
    Some((lo, hi))
}

fn crossing_segment(pf: &[P3], nf: &V3, of: f64, pg: &[P3], ng: &V3, og: f64, eps: f64) -> Option<(P3, P3)> {
    let dir = nf.cross(ng).normalize();
    let (a0, a1) = plane_section(pf, ng, og, &dir, eps)?;
    let (b0, b1) = plane_section(pg, nf, of, &dir, eps)?;
    let key = |p: &P3| dir.dot(&p.coords);
    let lo = if key(&a0) > key(&b0) { a0 } else { b0 };
    let hi = if key(&a1) < key(&b1) { a1 } else { b1 };
    if key(&hi) < key(&lo) - eps {
        return None;
    }
    Some((lo, hi))
}
