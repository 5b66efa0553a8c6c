use std::f64::consts::PI;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ununfold::constructions::{
    build_hat, build_reference, build_spiked_octahedron, build_spiked_tetrahedron, BasicHatParams, HatParams,
    ReferenceSolid, TriHatParams,
};
use ununfold::geometry::{format_sig, P2};
use ununfold::io::{obj_string, parse_obj};
use ununfold::mesh::{angle_sum, curvatures, total_curvature, PolyhedronMesh};
use ununfold::unfold::{layout, polygon_overlaps, Cutting};

fn basic_params() -> impl Strategy<Value = HatParams> {
    (30.5f64..89.0, 30.5f64..89.0, 1.2f64..4.0)
        .prop_map(|(alpha, beta, ell)| HatParams::Basic(BasicHatParams { alpha, beta, ell }))
}

fn tri_params() -> impl Strategy<Value = HatParams> {
    (30.5f64..89.0, 1.0f64..55.0, 1.0f64..59.0)
        .prop_map(|(alpha, b, gamma)| {
            let beta = (30.0 + b - gamma / 2.0).max(1.0);
            HatParams::Triangulated(TriHatParams { alpha, beta, gamma })
        })
        .prop_filter("realizable", |p| build_hat(p, false).is_ok())
}

fn hat_params() -> impl Strategy<Value = HatParams> {
    prop_oneof![basic_params(), tri_params()]
}

// Interior curvature plus boundary turning.
fn gauss_bonnet_sum(m: &PolyhedronMesh) -> f64 {
    (0..m.vertex_count())
        .map(|v| {
            let s = angle_sum(m, v).unwrap();
            if m.is_boundary_vertex(v) {
                PI - s
            } else {
                2.0 * PI - s
            }
        })
        .sum()
}

// Kruskal over a shuffled edge order gives a random spanning tree.
fn random_tree(m: &PolyhedronMesh, seed: u64) -> Cutting {
    let mut order: Vec<usize> = (0..m.edge_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut parent: Vec<usize> = (0..m.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut tree = Vec::new();
    for e in order {
        let [a, b] = m.edges()[e].endpoints;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            tree.push(e);
        }
    }
    Cutting::new(tree)
}

fn check_tree_layout(m: &PolyhedronMesh, seed: u64) -> Result<(), TestCaseError> {
    let cut = random_tree(m, seed);
    prop_assert_eq!(cut.len(), m.vertex_count() - 1);
    let l = layout(m, &cut).unwrap();
    let audit = l.audit(m);
    prop_assert!(audit.isometry_error < 1e-9, "isometry {}", audit.isometry_error);
    prop_assert!(audit.area_error < 1e-9, "area {}", audit.area_error);
    prop_assert!(audit.cut_edges_duplicated);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hats_satisfy_gauss_bonnet(p in hat_params()) {
        let hat = build_hat(&p, false).unwrap();
        prop_assert!((gauss_bonnet_sum(&hat) - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn spiked_solids_have_total_curvature_4pi(p in hat_params()) {
        for m in [build_spiked_tetrahedron(&p).unwrap(), build_spiked_octahedron(&p).unwrap()] {
            prop_assert!((total_curvature(&m).unwrap() - 4.0 * PI).abs() < 1e-9);
            prop_assert!(curvatures(&m).iter().all(Option::is_some));
        }
    }

    #[test]
    fn cube_tree_layouts_are_isometric(seed in any::<u64>()) {
        check_tree_layout(&build_reference(ReferenceSolid::Cube), seed)?;
    }

    #[test]
    fn spiked_tree_layouts_are_isometric(p in hat_params(), seed in any::<u64>()) {
        check_tree_layout(&build_spiked_tetrahedron(&p).unwrap(), seed)?;
    }

    #[test]
    fn overlap_is_order_independent(
        pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.2f64..1.5), 2..6),
        seed in any::<u64>(),
    ) {
        let squares: Vec<Vec<P2>> = pts
            .iter()
            .map(|&(x, y, s)| vec![P2::new(x, y), P2::new(x + s, y), P2::new(x + s, y + s), P2::new(x, y + s)])
            .collect();
        let ids: Vec<usize> = (0..squares.len()).collect();
        let a = polygon_overlaps(&squares, &ids);
        let mut perm = ids.clone();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<Vec<P2>> = perm.iter().map(|&i| squares[i].clone()).collect();
        let b = polygon_overlaps(&shuffled, &perm);
        let key = |r: &ununfold::unfold::OverlapReport| {
            let mut v: Vec<(usize, usize)> = r
                .overlapping_pairs
                .iter()
                .map(|p| (p.a.min(p.b), p.a.max(p.b)))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&a), key(&b));
        prop_assert!((a.max_area - b.max_area).abs() < 1e-12);
    }

    #[test]
    fn format_sig_round_trips(x in prop::num::f64::NORMAL) {
        let y: f64 = format_sig(x, 17).parse().unwrap();
        prop_assert_eq!(x, y);
        let z: f64 = format_sig(x, 12).parse().unwrap();
        prop_assert!(((z - x) / x).abs() < 1e-11);
    }

    #[test]
    fn obj_round_trip_preserves_mesh(p in hat_params()) {
        let m = build_spiked_tetrahedron(&p).unwrap();
        let text = obj_string(&m);
        let back = parse_obj(&text).unwrap();
        prop_assert_eq!(back.face_loops(), m.face_loops());
        for v in 0..m.vertex_count() {
            prop_assert!((back.position(v) - m.position(v)).norm() < 1e-10);
        }
        prop_assert_eq!(obj_string(&back), text);
    }
}
