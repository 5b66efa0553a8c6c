use std::collections::VecDeque;

use nalgebra::{Isometry2, UnitComplex, Vector2};

use crate::geometry::{signed_area, P2};
use crate::mesh::PolyhedronMesh;

use super::overlap::{angular_excess, corner_wedge};
use super::{check_edges, validate_cutting, Cutting, UnfoldError};

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedFace {
    pub face: usize,
    /// Maps the face chart into the plane.
    pub isometry: Isometry2<f64>,
    pub polygon: Vec<P2>,
    /// Mesh vertex ids matching `polygon`.
    pub vertices: Vec<usize>,
    /// Parent face and the shared edge it was attached across.
    pub parent: Option<(usize, usize)>,
}

impl PlacedFace {
    pub fn point_of(&self, vertex: usize) -> Option<P2> {
        self.vertices.iter().position(|&v| v == vertex).map(|i| self.polygon[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLayout {
    pub faces: Vec<PlacedFace>,
    pub cut_edges: Vec<usize>,
    /// Primal ids of the dual edges used to attach faces.
    pub tree_edges: Vec<usize>,
    /// Uncut edges outside the tree with the larger endpoint mismatch.
    pub discrepancies: Vec<(usize, f64)>,
    pub consistency_ok: bool,
    pub tolerance: f64,
}

/// Worst-case errors of a layout against its mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutAudit {
    /// Largest relative edge-length error over all placed faces.
    pub isometry_error: f64,
    /// Relative difference between placed and mesh area.
    pub area_error: f64,
    /// Every cut edge shows up as two placed segments of its own length.
    pub cut_edges_duplicated: bool,
}

impl PlanarLayout {
    pub fn polygons(&self) -> Vec<Vec<P2>> {
        self.faces.iter().map(|f| f.polygon.clone()).collect()
    }

    pub fn area(&self) -> f64 {
        self.faces.iter().map(|f| signed_area(&f.polygon)).sum()
    }

    /// Total multiply-covered angle around the placed copies of `v`.
    pub fn angular_excess_at(&self, v: usize) -> f64 {
        let wedges: Vec<(P2, f64, f64)> = self
            .faces
            .iter()
            .filter_map(|f| {
                let i = f.vertices.iter().position(|&u| u == v)?;
                Some(corner_wedge(&f.polygon, i))
            })
            .collect();
        angular_excess(&wedges, self.tolerance)
    }

    pub fn congruence_signature(&self) -> Vec<Vec<(i64, i64)>> {
        congruence_signature(&self.polygons())
    }

    pub fn audit(&self, mesh: &PolyhedronMesh) -> LayoutAudit {
        let mut isometry_error: f64 = 0.0;
        for placed in &self.faces {
            let face = &mesh.faces()[placed.face];
            let k = placed.polygon.len();
            for i in 0..k {
                let d = (placed.polygon[(i + 1) % k] - placed.polygon[i]).norm();
                isometry_error = isometry_error.max((d - face.edge_lengths[i]).abs() / face.edge_lengths[i]);
            }
        }
        let area = mesh.surface_area();
        let area_error = (self.area() - area).abs() / area;
        let cut_edges_duplicated = self.cut_edges.iter().all(|&e| {
            let edge = &mesh.edges()[e];
            let [a, b] = edge.endpoints;
            let segments: Vec<f64> = self
                .faces
                .iter()
                .filter_map(|f| Some((f.point_of(a)? - f.point_of(b)?).norm()))
                .collect();
            segments.len() == 2 && segments.iter().all(|l| (l - edge.length).abs() <= 1e-9 * edge.length)
        });
        LayoutAudit {
            isometry_error,
            area_error,
            cut_edges_duplicated,
        }
    }
}

/// Canonical form of a set of planar polygons up to rigid motion and
/// reflection, coordinates quantized to 1e-6 of the diameter.
/// Congruent figures have equal signatures.
pub fn congruence_signature(polygons: &[Vec<P2>]) -> Vec<Vec<(i64, i64)>> {
    let points: Vec<P2> = polygons.iter().flatten().copied().collect();
    let diameter = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| (p - q).norm()))
        .fold(0.0, f64::max);
    let q = 1e-6 * diameter.max(f64::MIN_POSITIVE);
    let mut best: Option<Vec<Vec<(i64, i64)>>> = None;
    for poly in polygons {
        let k = poly.len();
        let frames = (0..k).flat_map(|i| [(poly[i], poly[(i + 1) % k]), (poly[(i + 1) % k], poly[i])]);
        for (origin, toward) in frames {
            let d = toward - origin;
            let rot = UnitComplex::new(-d.y.atan2(d.x));
            for mirror in [false, true] {
                let mut sig: Vec<Vec<(i64, i64)>> = polygons
                    .iter()
                    .map(|p| {
                        let mut pts: Vec<(i64, i64)> = p
                            .iter()
                            .map(|x| {
                                let v = rot * (x - origin);
                                let y = if mirror { -v.y } else { v.y };
                                ((v.x / q).round() as i64, (y / q).round() as i64)
                            })
                            .collect();
                        if mirror {
                            pts.reverse();
                        }
                        let start = (0..pts.len()).min_by_key(|&j| pts[j]).unwrap_or(0);
                        pts.rotate_left(start);
                        pts
                    })
                    .collect();
                sig.sort();
                if best.as_ref().is_none_or(|b| sig < *b) {
                    best = Some(sig);
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Orientation-preserving isometry taking segment `q0 q1` onto `p0 p1`,
/// matching midpoints.
pub(super) fn match_segment(q0: P2, q1: P2, p0: P2, p1: P2) -> Isometry2<f64> {
    let dq = q1 - q0;
    let dp = p1 - p0;
    let rotation = UnitComplex::new(dp.y.atan2(dp.x) - dq.y.atan2(dq.x));
    let mq = nalgebra::center(&q0, &q1);
    let mp = nalgebra::center(&p0, &p1);
    let t: Vector2<f64> = mp.coords - rotation * mq.coords;
    Isometry2::from_parts(t.into(), rotation)
}

/// Validates the cutting, then lays it out.
pub fn layout(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<PlanarLayout, UnfoldError> {
    let validity = validate_cutting(mesh, cutting)?;
    if !validity.admissible() {
        return Err(UnfoldError::InadmissibleCutting(validity));
    }
    layout_unchecked(mesh, cutting)
}

/// Breadth-first layout from face 0 over uncut edges, neighbors in
/// ascending face order. Requires only that the cut surface is connected.
pub fn layout_unchecked(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<PlanarLayout, UnfoldError> {
    check_edges(mesh, cutting)?;
    let cut = cutting.mask(mesh.edge_count());
    let fcount = mesh.face_count();
    let mut placed: Vec<Option<PlacedFace>> = vec![None; fcount];
    let mut tree = vec![false; mesh.edge_count()];
    let place = |f: usize, iso: Isometry2<f64>, parent| PlacedFace {
        face: f,
        isometry: iso,
        polygon: mesh.chart(f).iter().map(|p| iso * p).collect(),
        vertices: mesh.faces()[f].vertices.clone(),
        parent,
    };
    placed[0] = Some(place(0, Isometry2::identity(), None));
    let mut queue = VecDeque::from([0usize]);
    let mut order = vec![0usize];
    while let Some(f) = queue.pop_front() {
        let mut next: Vec<(usize, usize)> = mesh.faces()[f]
            .edges
            .iter()
            .filter(|&&e| !cut[e])
            .filter_map(|&e| mesh.edges()[e].other_face(f).map(|g| (g, e)))
            .collect();
        next.sort_unstable();
        for (g, e) in next {
            if placed[g].is_some() {
                continue;
            }
            let [a, b] = mesh.edges()[e].endpoints;
            let pf = placed[f].as_ref().expect("parent placed");
            let face_g = &mesh.faces()[g];
            let ia = face_g.position_of(a).expect("edge in face");
            let ib = face_g.position_of(b).expect("edge in face");
            let chart = mesh.chart(g);
            let iso = match_segment(
                chart[ia],
                chart[ib],
                pf.point_of(a).expect("edge in face"),
                pf.point_of(b).expect("edge in face"),
            );
            placed[g] = Some(place(g, iso, Some((f, e))));
            tree[e] = true;
            queue.push_back(g);
            order.push(g);
        }
    }
    if order.len() != fcount {
        return Err(UnfoldError::SurfaceDisconnected);
    }
    let faces: Vec<PlacedFace> = placed.into_iter().map(|p| p.expect("placed")).collect();
    let tolerance = 1e-6 * mesh.diameter();
    let mut discrepancies = Vec::new();
    for edge in mesh.edges() {
        let [f, g] = match edge.faces.as_slice() {
            [f, g] => [*f, *g],
            _ => continue,
        };
        if cut[edge.id] || tree[edge.id] {
            continue;
        }
        let [a, b] = edge.endpoints;
        let da = (faces[f].point_of(a).unwrap() - faces[g].point_of(a).unwrap()).norm();
        let db = (faces[f].point_of(b).unwrap() - faces[g].point_of(b).unwrap()).norm();
        discrepancies.push((edge.id, da.max(db)));
    }
    let consistency_ok = discrepancies.iter().all(|d| d.1 <= tolerance);
    let mut tree_edges: Vec<usize> = (0..mesh.edge_count()).filter(|&e| tree[e]).collect();
    tree_edges.sort_unstable();
    Ok(PlanarLayout {
        faces,
        cut_edges: cutting.edges().to_vec(),
        tree_edges,
        discrepancies,
        consistency_ok,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_basic_hat, build_open_fan, build_reference, BasicHatParams, FanParams, ReferenceSolid,
    };

    #[test]
    fn tetrahedron_star_net() {
        let m = build_reference(ReferenceSolid::Tetrahedron);
        let c = Cutting::new(m.vertex_edges(0).to_vec());
        let l = layout(&m, &c).unwrap();
        assert!(l.consistency_ok);
        assert!(l.discrepancies.is_empty());
        assert_eq!(l.tree_edges.len(), 3);
        let audit = l.audit(&m);
        assert!(audit.isometry_error < 1e-9);
        assert!(audit.area_error < 1e-9);
        assert!(audit.cut_edges_duplicated);
        // The star net is a triangle of side 2.
        let pts: Vec<P2> = l.faces.iter().flat_map(|f| f.polygon.clone()).collect();
        let mut best: f64 = 0.0;
        for p in &pts {
            for q in &pts {
                best = best.max((p - q).norm());
            }
        }
        assert!((best - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hat_without_cuts_does_not_close() {
        let m = build_basic_hat(&BasicHatParams::default()).unwrap();
        let l = layout_unchecked(&m, &Cutting::empty()).unwrap();
        assert!(!l.consistency_ok);
        assert!(matches!(
            layout(&m, &Cutting::empty()),
            Err(UnfoldError::InadmissibleCutting(_))
        ));
    }

    #[test]
    fn fan_one_spoke_is_consistent() {
        let m = build_open_fan(&FanParams::default()).unwrap();
        let c = Cutting::new(vec![m.vertex_edges(0)[0]]);
        let l = layout(&m, &c).unwrap();
        assert!(l.consistency_ok);
        assert_eq!(l.tree_edges.len(), 7);
    }

    #[test]
    fn cube_tree_layout_is_deterministic() {
        let m = build_reference(ReferenceSolid::Cube);
        let tree = [(0, 1), (0, 2), (0, 4), (1, 3), (1, 5), (2, 6), (3, 7)];
        let c = Cutting::new(tree.iter().map(|&(a, b)| m.edge_between(a, b).unwrap()).collect());
        assert!(layout(&m, &c).unwrap().consistency_ok);
        let a = layout_unchecked(&m, &c).unwrap();
        let b = layout_unchecked(&m, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn signature_ignores_rigid_motion_and_mirroring() {
        let tri = vec![P2::new(0.0, 0.0), P2::new(2.0, 0.0), P2::new(0.5, 1.0)];
        let sq = vec![
            P2::new(2.0, 0.0),
            P2::new(3.0, 0.0),
            P2::new(3.0, 1.0),
            P2::new(2.0, 1.0),
        ];
        let base = congruence_signature(&[tri.clone(), sq.clone()]);
        let iso = Isometry2::new(Vector2::new(3.0, -7.0), 1.1);
        let moved: Vec<Vec<P2>> = [&sq, &tri]
            .iter()
            .map(|p| p.iter().map(|x| iso * x).collect())
            .collect();
        assert_eq!(congruence_signature(&moved), base);
        let mirrored: Vec<Vec<P2>> = [&tri, &sq]
            .iter()
            .map(|p| p.iter().rev().map(|x| P2::new(-x.x, x.y)).collect())
            .collect();
        assert_eq!(congruence_signature(&mirrored), base);
        let other = vec![P2::new(0.0, 0.0), P2::new(2.0, 0.0), P2::new(1.5, 1.0)];
        assert_ne!(congruence_signature(&[other, sq]), base);
    }
}
