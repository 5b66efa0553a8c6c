use std::collections::{HashMap, VecDeque};

use super::{curvature::angle_sum, PolyhedronMesh};

/// `p[v]` is the image of vertex `v`.
pub type Permutation = Vec<usize>;

/// `compose(a, b)` applies `b` first, then `a`.
pub fn compose(a: &[usize], b: &[usize]) -> Permutation {
    b.iter().map(|&i| a[i]).collect()
}

pub fn invert(p: &[usize]) -> Permutation {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

const ANGLE_TOL: f64 = 1e-9;

/// All skeleton automorphisms preserving edge lengths, face angles and the
/// boundary, found by backtracking along a breadth-first vertex order.
/// Sorted lexicographically; the identity comes first.
pub fn symmetry_group(mesh: &PolyhedronMesh) -> Vec<Permutation> {
    let n = mesh.vertex_count();
    let len_tol = 1e-9 * mesh.diameter().max(1.0);
    let sums: Vec<f64> = (0..n).map(|v| angle_sum(mesh, v).expect("vertex")).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in mesh.edges() {
        adj[e.endpoints[0]].push((e.endpoints[1], e.length));
        adj[e.endpoints[1]].push((e.endpoints[0], e.length));
    }
    let signature: Vec<Vec<f64>> = adj
        .iter()
        .map(|nb| {
            let mut l: Vec<f64> = nb.iter().map(|x| x.1).collect();
            l.sort_by(f64::total_cmp);
            l
        })
        .collect();
    let alike = |a: usize, b: usize| {
        mesh.is_boundary_vertex(a) == mesh.is_boundary_vertex(b)
            && (sums[a] - sums[b]).abs() < ANGLE_TOL
            && signature[a].len() == signature[b].len()
            && signature[a]
                .iter()
                .zip(&signature[b])
                .all(|(x, y)| (x - y).abs() < len_tol)
    };

    // Breadth-first order with a tree parent for every non-root vertex.
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let mut nb: Vec<usize> = adj[u].iter().map(|x| x.0).collect();
        nb.sort_unstable();
        for w in nb {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
                queue.push_back(w);
            }
        }
    }

    let length = |a: usize, b: usize| -> Option<f64> { mesh.edge_between(a, b).map(|e| mesh.edges()[e].length) };

    let mut found = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn extend(
        depth: usize,
        order: &[usize],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        candidates: &dyn Fn(usize, &[usize]) -> Vec<usize>,
        accept: &dyn Fn(&[usize]) -> bool,
        found: &mut Vec<Permutation>,
    ) {
        if depth == order.len() {
            if accept(image) {
                found.push(image.clone());
            }
            return;
        }
        let v = order[depth];
        for c in candidates(v, image) {
            if used[c] {
                continue;
            }
            image[v] = c;
            used[c] = true;
            extend(depth + 1, order, image, used, candidates, accept, found);
            used[c] = false;
            image[v] = usize::MAX;
        }
    }

    let candidates = |v: usize, image: &[usize]| -> Vec<usize> {
        let pool: Vec<usize> = if parent[v] == usize::MAX {
            (0..n).collect()
        } else {
            adj[image[parent[v]]].iter().map(|x| x.0).collect()
        };
        pool.into_iter()
            .filter(|&c| alike(v, c))
            .filter(|&c| {
                // Every already-mapped neighbor must stay a neighbor at the
                // same distance.
                adj[v].iter().all(|&(w, l)| {
                    image[w] == usize::MAX || length(c, image[w]).is_some_and(|m| (m - l).abs() < len_tol)
                })
            })
            .collect()
    };

    let faces_by_set: HashMap<Vec<usize>, usize> = mesh
        .faces()
        .iter()
        .map(|f| {
            let mut k = f.vertices.clone();
            k.sort_unstable();
            (k, f.id)
        })
        .collect();
    let accept = |image: &[usize]| -> bool {
        mesh.faces().iter().all(|f| {
            let mut k: Vec<usize> = f.vertices.iter().map(|&v| image[v]).collect();
            k.sort_unstable();
            let Some(&g) = faces_by_set.get(&k) else {
                return false;
            };
            let g = &mesh.faces()[g];
            f.vertices
                .iter()
                .zip(&f.angles)
                .all(|(&v, &a)| g.angle_at(image[v]).is_some_and(|b| (a - b).abs() < ANGLE_TOL))
        })
    };

    extend(0, &order, &mut image, &mut used, &candidates, &accept, &mut found);
    found.sort();
    found
}

#[cfg(test)]
mod tests {
    use super::super::build_mesh;
    use super::super::fixtures::*;
    use super::*;
    use crate::geometry::P3;

    fn is_group(g: &[Permutation]) -> bool {
        let id: Permutation = (0..g[0].len()).collect();
        g.contains(&id)
            && g.iter().all(|a| g.contains(&invert(a)))
            && g.iter().all(|a| g.iter().all(|b| g.contains(&compose(a, b))))
    }

    #[test]
    fn regular_solids() {
        let t = symmetry_group(&tetrahedron());
        assert_eq!(t.len(), 24);
        assert!(is_group(&t));
        let c = symmetry_group(&cube());
        assert_eq!(c.len(), 48);
        assert!(is_group(&c));
        assert_eq!(c[0], (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn scalene_tetrahedron_is_rigid() {
        let v = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.3, 0.0, 0.0),
            P3::new(0.2, 1.7, 0.0),
            P3::new(0.4, 0.5, 2.1),
        ];
        let f = vec![vec![0, 2, 1], vec![0, 1, 3], vec![1, 2, 3], vec![0, 3, 2]];
        let m = build_mesh(&v, &f).unwrap();
        assert_eq!(symmetry_group(&m), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn brute_force_agrees_on_tetrahedron() {
        // Every permutation of K4 is an isometry of the regular tetrahedron.
        let m = tetrahedron();
        let mut all = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = vec![a, b, c, d];
                        let mut s = p.clone();
                        s.sort();
                        s.dedup();
                        if s.len() == 4 {
                            all.push(p);
                        }
                    }
                }
            }
        }
        assert_eq!(symmetry_group(&m), all);
    }
}
