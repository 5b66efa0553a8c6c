use num_bigint::BigUint;
use ununfold::constructions::{
    build_basic_hat, build_open_fan, build_reference, build_spiked_octahedron, build_spiked_tetrahedron,
    build_triangulated_hat, identify_hats, BasicHatParams, FanParams, HatKind, HatParams, HatRegion, ReferenceSolid,
    TriHatParams,
};
use ununfold::mesh::{skeleton_graph, Graph, PolyhedronMesh};
use ununfold::search::{
    check_corner_to_corner, count_spanning_trees, enumerate_admissible_cuttings, orbit_classes, search_edge_unfolding,
    spanning_trees, EnumerationMode, SearchOptions, Verdict,
};
use ununfold::unfold::{validate_cutting, Cutting};

fn spiked(kind: HatKind) -> PolyhedronMesh {
    build_spiked_tetrahedron(&HatParams::default_for(kind)).unwrap()
}

fn edges(m: &PolyhedronMesh, pairs: &[(usize, usize)]) -> Cutting {
    Cutting::new(pairs.iter().map(|&(a, b)| m.edge_between(a, b).unwrap()).collect())
}

#[test]
fn tree_counts_match_frozen_oracles() {
    // Frozen from an independent rational-arithmetic Laplacian determinant.
    let cases = [
        (spiked(HatKind::Basic), 1_825_050_000u64),
        (spiked(HatKind::Triangulated), 382_205_952_000),
    ];
    for (m, expected) in cases {
        assert_eq!(
            count_spanning_trees(&skeleton_graph(&m)).unwrap(),
            BigUint::from(expected)
        );
    }
    let oct = build_spiked_octahedron(&HatParams::default_for(HatKind::Basic)).unwrap();
    assert_eq!(
        count_spanning_trees(&skeleton_graph(&oct)).unwrap().to_string(),
        "3258398643750000000"
    );
}

#[test]
fn cayley_formula() {
    for n in 2..9u32 {
        let c = count_spanning_trees(&Graph::complete(n as usize)).unwrap();
        assert_eq!(c, BigUint::from(n).pow(n - 2));
    }
    for n in 2..7usize {
        assert_eq!(spanning_trees(&Graph::complete(n)).unwrap().len(), n.pow(n as u32 - 2));
    }
}

#[test]
fn hat_candidate_spaces() {
    let basic = build_basic_hat(&BasicHatParams::default()).unwrap();
    let tri = build_triangulated_hat(&TriHatParams::default()).unwrap();
    for (m, k) in [(&basic, 512), (&tri, 4096)] {
        let r = search_edge_unfolding(m, &SearchOptions::for_mesh(m)).unwrap();
        assert_eq!(r.total_candidates, k);
        assert_eq!(r.non_overlapping, 0);
        assert_eq!(r.verdict, Verdict::EdgeUnunfoldable);
        assert!(r.funnel_ok());
    }
}

#[test]
fn hat_census_paths() {
    let basic = build_basic_hat(&BasicHatParams::default()).unwrap();
    let r = search_edge_unfolding(&basic, &SearchOptions::for_mesh(&basic)).unwrap();
    let census = r.census.unwrap();
    assert_eq!(census.cuttings, 6);
    assert_eq!(census.orbits.count, 1);
    assert!(census.all_overlap);
    assert_eq!(census.corner_to_tip_paths, Some(true));

    let tri = build_triangulated_hat(&TriHatParams::default()).unwrap();
    let r = search_edge_unfolding(&tri, &SearchOptions::for_mesh(&tri)).unwrap();
    let census = r.census.unwrap();
    assert_eq!(census.cuttings, 12);
    assert_eq!(census.orbits.count, 2);
    assert!(census.all_overlap);
    assert_eq!(census.corner_to_tip_paths, Some(true));
}

#[test]
fn fan_admissible_cuttings() {
    let m = build_open_fan(&FanParams::default()).unwrap();
    let adm = enumerate_admissible_cuttings(&m, EnumerationMode::AllInternalForests).unwrap();
    let spokes: Vec<Cutting> = m.vertex_edges(0).iter().map(|&e| Cutting::new(vec![e])).collect();
    let mut sorted = spokes.clone();
    sorted.sort();
    assert_eq!(adm, sorted);
    assert_eq!(orbit_classes(&m, &adm).len(), 1);
}

#[test]
fn corner_to_corner_examples() {
    let m = spiked(HatKind::Basic);
    let hats = identify_hats(&m).expect("hats");
    assert_eq!(hats.len(), 4);
    let h = &hats[0];
    // corner -> middle -> middle -> middle -> tip, middles in ring order.
    let path = spiral(&m, h);
    let joined = check_corner_to_corner(&m, &path).unwrap();
    assert_eq!(joined, vec![false; 4]);

    // A corner-to-corner path per hat, each joining exactly that hat.
    let options: Vec<Vec<Vec<usize>>> = hats.iter().map(|h| corner_paths(&m, h)).collect();
    for paths in &options {
        assert_eq!(paths.len(), 3);
        for p in paths {
            let joined = check_corner_to_corner(&m, &Cutting::new(p.clone())).unwrap();
            assert_eq!(joined.iter().filter(|&&x| x).count(), 1);
        }
    }
    // Some choice of four such paths closes a cycle through the corners.
    let mut cyclic = 0;
    for pick in 0..81usize {
        let mut all = Vec::new();
        for (i, paths) in options.iter().enumerate() {
            all.extend(paths[pick / 3usize.pow(i as u32) % 3].iter().copied());
        }
        let c = Cutting::new(all);
        assert_eq!(check_corner_to_corner(&m, &c).unwrap(), vec![true; 4]);
        if !validate_cutting(&m, &c).unwrap().is_forest {
            cyclic += 1;
        }
    }
    assert!(cyclic > 0);
}

fn spiral(m: &PolyhedronMesh, h: &HatRegion) -> Cutting {
    let [m0, m1, m2] = [h.middles[0], h.middles[1], h.middles[2]];
    let corner = h
        .corners
        .iter()
        .copied()
        .find(|&c| m.edge_between(c, m0).is_some())
        .unwrap();
    edges(m, &[(corner, m0), (m0, m1), (m1, m2), (m2, h.tip)])
}

// Shortest path through middles for each pair of corners.
fn corner_paths(m: &PolyhedronMesh, h: &HatRegion) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (h.corners[i], h.corners[j]);
            let mut best: Option<Vec<usize>> = None;
            for &x in &h.middles {
                if let (Some(e1), Some(e2)) = (m.edge_between(a, x), m.edge_between(x, b)) {
                    best = Some(vec![e1, e2]);
                }
            }
            if best.is_none() {
                'outer: for &x in &h.middles {
                    for &y in &h.middles {
                        if let (Some(e1), Some(e2), Some(e3)) =
                            (m.edge_between(a, x), m.edge_between(x, y), m.edge_between(y, b))
                        {
                            best = Some(vec![e1, e2, e3]);
                            break 'outer;
                        }
                    }
                }
            }
            out.push(best.expect("corners joined through middles"));
        }
    }
    out
}

#[test]
fn convex_controls() {
    let t = build_reference(ReferenceSolid::Tetrahedron);
    let r = search_edge_unfolding(&t, &SearchOptions::for_mesh(&t)).unwrap();
    assert_eq!((r.total_candidates, r.non_overlapping), (16, 16));
    let c = build_reference(ReferenceSolid::Cube);
    let r = search_edge_unfolding(&c, &SearchOptions::for_mesh(&c)).unwrap();
    assert_eq!((r.total_candidates, r.non_overlapping), (384, 384));
    assert_eq!(r.expected_candidates.as_deref(), Some("384"));
    assert_eq!(r.distinct_nets, Some(11));
}

#[test]
fn reports_do_not_depend_on_workers() {
    let meshes = [
        build_reference(ReferenceSolid::Cube),
        build_triangulated_hat(&TriHatParams::default()).unwrap(),
    ];
    for m in &meshes {
        let mut one = SearchOptions::for_mesh(m);
        one.workers = 1;
        let mut four = one.clone();
        four.workers = 4;
        let mut a = search_edge_unfolding(m, &one).unwrap();
        let mut b = search_edge_unfolding(m, &four).unwrap();
        a.timing = None;
        b.timing = None;
        assert_eq!(a, b);
    }
    let m = spiked(HatKind::Basic);
    let mut o = SearchOptions::for_mesh(&m);
    o.budget = Some(300_000);
    o.cross_check_every = 4096;
    let mut a = search_edge_unfolding(&m, &o).unwrap();
    o.workers = 3;
    let mut b = search_edge_unfolding(&m, &o).unwrap();
    a.timing = None;
    b.timing = None;
    assert_eq!(a, b);
    assert_eq!(a.total_candidates, 300_000);
    assert!(a.certificate.cross_checked > 0);
    assert_eq!(a.certificate.cross_check_failures, 0);
}

#[test]
fn certificate_agrees_with_layout() {
    let m = spiked(HatKind::Basic);
    let mut with = SearchOptions::for_mesh(&m);
    with.budget = Some(3000);
    let mut without = with.clone();
    without.fan_certificate = false;
    let a = search_edge_unfolding(&m, &with).unwrap();
    let b = search_edge_unfolding(&m, &without).unwrap();
    assert_eq!(b.certificate.certified_by_fan, 0);
    assert_eq!(b.certificate.geometric_checks, 3000);
    assert_eq!(
        (a.admissible, a.consistent, a.non_overlapping),
        (b.admissible, b.consistent, b.non_overlapping)
    );
    assert_eq!(a.exemplars, b.exemplars);
}

#[test]
fn forest_mode_budget() {
    let m = spiked(HatKind::Basic);
    let r = search_edge_unfolding(&m, &SearchOptions::new(EnumerationMode::BoundedForests { k_max: 2 }));
    assert!(matches!(r, Err(ununfold::search::SearchError::ModeUnsupported { .. })));
}

#[test]
fn truncated_spiked_run_adds_hat_exhaustion() {
    let m = spiked(HatKind::Triangulated);
    let mut o = SearchOptions::for_mesh(&m);
    o.budget = Some(5000);
    let r = search_edge_unfolding(&m, &o).unwrap();
    assert!(!r.exhaustive);
    assert_eq!(r.verdict, Verdict::Undetermined);
    assert_eq!(r.total_candidates, 5000);
    assert_eq!(r.non_overlapping, 0);
    let hats = r.hat_exhaustion.unwrap();
    assert_eq!(hats.len(), 4);
    assert!(hats
        .iter()
        .all(|h| h.total_candidates == 4096 && h.non_overlapping == 0));
    let c2c = r.corner_to_corner.unwrap();
    assert_eq!(c2c.checked, 5000);
    assert_eq!(c2c.implication_holds, 5000);
    assert_eq!(c2c.hats_joined[4], 0);
}
