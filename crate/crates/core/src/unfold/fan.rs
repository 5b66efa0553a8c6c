use nalgebra::{Isometry2, UnitComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::P2;
use crate::mesh::PolyhedronMesh;

use super::overlap::{angular_excess, corner_wedge, polygon_overlaps};
use super::{OverlapReport, UnfoldError};

/// A face or face fragment placed in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedPiece {
    pub face: usize,
    pub polygon: Vec<P2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanUnfolding {
    /// Pieces in unrolling order, the center at the origin.
    pub pieces: Vec<PlacedPiece>,
    pub overlap: OverlapReport,
    /// Total angle swept around the center.
    pub total_angle: f64,
    /// Angle covered twice around the center.
    pub overlap_angle: f64,
}

/// Unrolls the faces around vertex 0 after a straight cut from the center
/// to the rim. `cut_direction` (radians) is measured around the center from
/// the first spoke of its vertex ring and may fall inside a face.
pub fn unfold_fan_single_general_cut(mesh: &PolyhedronMesh, cut_direction: f64) -> Result<FanUnfolding, UnfoldError> {
    let center = 0;
    let ring = mesh.ring(center);
    if !ring.closed || ring.faces.len() != mesh.face_count() {
        return Err(UnfoldError::UnsupportedMesh(
            "expected every face around an interior vertex 0".into(),
        ));
    }
    if mesh.faces().iter().any(|f| f.len() != 3) {
        return Err(UnfoldError::UnsupportedMesh("fan faces must be triangles".into()));
    }
    let n = ring.faces.len();
    let rims: Vec<usize> = ring.edges.iter().map(|&e| mesh.edges()[e].other(center)).collect();

    // Unrolling goes clockwise: the ring visits faces from incoming to
    // outgoing spoke. Record each face placed with its first spoke on the
    // +x axis, plus its angle.
    let mut local: Vec<(Vec<P2>, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let f = ring.faces[i];
        let face = &mesh.faces()[f];
        let chart = mesh.chart(f);
        let ic = face.position_of(center).expect("center in face");
        let ir = face.position_of(rims[i]).expect("rim in face");
        let d = chart[ir] - chart[ic];
        let iso = UnitComplex::new(-d.y.atan2(d.x));
        let pts: Vec<P2> = chart.iter().map(|p| P2::from(iso * (p - chart[ic]))).collect();
        // Reorder as (center, rim i, rim i+1) clockwise.
        let ir1 = face.position_of(rims[(i + 1) % n]).expect("rim in face");
        local.push((vec![pts[ic], pts[ir], pts[ir1]], face.angles[ic]));
    }
    let total: f64 = local.iter().map(|x| x.1).sum();
    let c = cut_direction.rem_euclid(total);

    let mut starts = Vec::with_capacity(n);
    let mut acc = 0.0;
    for (_, a) in &local {
        starts.push(acc);
        acc += a;
    }
    let j = (0..n)
        .rev()
        .find(|&i| starts[i] <= c + 1e-12)
        .expect("first face starts at zero");
    let on_spoke = (c - starts[j]).abs() <= 1e-12;

    // Face i rotated clockwise by `angle` about the center.
    let place = |poly: &[P2], angle: f64| -> Vec<P2> {
        let iso = Isometry2::rotation(-angle);
        // Clockwise triangles become counterclockwise after reversing.
        poly.iter().rev().map(|p| iso * p).collect()
    };
    let mut pieces = Vec::new();
    let split_point = |i: usize, along: f64| -> P2 {
        let (tri, _) = &local[i];
        // Ray from the center at clockwise angle `along` meets the rim edge.
        let dir = nalgebra::Vector2::new(along.cos(), -along.sin());
        let (a, b) = (tri[1].coords, tri[2].coords);
        let e = b - a;
        let denom = dir.x * e.y - dir.y * e.x;
        let t = (a.y * dir.x - a.x * dir.y) / denom;
        P2::from(a + e * -t)
    };
    if on_spoke {
        for k in 0..n {
            let i = (j + k) % n;
            let shift = if i >= j { starts[i] } else { starts[i] + total };
            pieces.push(PlacedPiece {
                face: ring.faces[i],
                polygon: place(&local[i].0, shift),
            });
        }
    } else {
        let along = c - starts[j];
        let q = split_point(j, along);
        let (tri, _) = &local[j];
        pieces.push(PlacedPiece {
            face: ring.faces[j],
            polygon: place(&[tri[0], q, tri[2]], starts[j]),
        });
        for k in 1..n {
            let i = (j + k) % n;
            let shift = if i > j { starts[i] } else { starts[i] + total };
            pieces.push(PlacedPiece {
                face: ring.faces[i],
                polygon: place(&local[i].0, shift),
            });
        }
        pieces.push(PlacedPiece {
            face: ring.faces[j],
            polygon: place(&[tri[0], tri[1], q], starts[j] + total),
        });
    }
    // Rotate so the cut lies on the +x axis.
    let back = Isometry2::rotation(c);
    for p in &mut pieces {
        for pt in &mut p.polygon {
            *pt = back * *pt;
        }
    }
    let polygons: Vec<Vec<P2>> = pieces.iter().map(|p| p.polygon.clone()).collect();
    let ids: Vec<usize> = (0..pieces.len()).collect();
    let overlap = polygon_overlaps(&polygons, &ids);
    let wedges: Vec<(P2, f64, f64)> = polygons
        .iter()
        .map(|poly| {
            let i = poly
                .iter()
                .position(|p| p.coords.norm() < 1e-12)
                .expect("center in piece");
            corner_wedge(poly, i)
        })
        .collect();
    let overlap_angle = angular_excess(&wedges, 1e-9);
    Ok(FanUnfolding {
        pieces,
        overlap,
        total_angle: total,
        overlap_angle,
    })
}

/// `count` cut directions drawn uniformly around the center from a seeded
/// generator, each paired with its unfolding.
pub fn sample_fan_general_cuts(
    mesh: &PolyhedronMesh,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, FanUnfolding)>, UnfoldError> {
    let total = unfold_fan_single_general_cut(mesh, 0.0)?.total_angle;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dir = rng.gen_range(0.0..total);
            Ok((dir, unfold_fan_single_general_cut(mesh, dir)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::constructions::{build_open_fan, FanParams};
    use crate::geometry::{signed_area, P3};
    use crate::mesh::build_mesh;

    #[test]
    fn fan_overlap_wedge_is_cut_invariant() {
        let m = build_open_fan(&FanParams::default()).unwrap();
        for dir in [0.0, 50f64.to_radians(), 0.3, 1.234, 6.9] {
            let u = unfold_fan_single_general_cut(&m, dir).unwrap();
            assert!(u.overlap.is_overlapping());
            assert!((u.overlap_angle.to_degrees() - 40.0).abs() < 1e-9, "{dir}");
            let area: f64 = u.pieces.iter().map(|p| signed_area(&p.polygon)).sum();
            assert!((area - m.surface_area()).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_cuts_are_reproducible() {
        let m = build_open_fan(&FanParams::default()).unwrap();
        let a = sample_fan_general_cuts(&m, 5, 7).unwrap();
        let b = sample_fan_general_cuts(&m, 5, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|(d, u)| *d >= 0.0 && *d < u.total_angle));
    }

    #[test]
    fn flat_fan_closes_exactly() {
        let mut v = vec![P3::origin()];
        for k in 0..6 {
            let a = (60.0 * k as f64).to_radians();
            v.push(P3::new(a.cos(), a.sin(), 0.0));
        }
        let f: Vec<Vec<usize>> = (0..6).map(|k| vec![0, k + 1, (k + 1) % 6 + 1]).collect();
        let m = build_mesh(&v, &f).unwrap();
        for dir in [0.0, 0.4] {
            let u = unfold_fan_single_general_cut(&m, dir).unwrap();
            assert!(!u.overlap.is_overlapping());
            assert!(u.overlap_angle.abs() < 1e-12);
            assert!((u.total_angle - TAU).abs() < 1e-12);
        }
    }
}
