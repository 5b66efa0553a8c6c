use std::collections::VecDeque;

use super::PolyhedronMesh;

/// Simple undirected graph; `edges[i]` is arc `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        Graph { vertex_count, edges }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::new(n, edges)
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        adj
    }

    /// Number of connected components using only arcs for which `keep` holds.
    pub fn components_with(&self, keep: impl Fn(usize) -> bool) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut count = 0;
        for s in 0..self.vertex_count {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(w, e) in &adj[u] {
                    if !seen[w] && keep(e) {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || self.components_with(|_| true) == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualArc {
    pub faces: (usize, usize),
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub face_count: usize,
    pub arcs: Vec<DualArc>,
}

impl DualGraph {
    pub fn as_graph(&self) -> Graph {
        Graph::new(self.face_count, self.arcs.iter().map(|a| a.faces).collect())
    }
}

pub fn skeleton_graph(mesh: &PolyhedronMesh) -> Graph {
    Graph::new(
        mesh.vertex_count(),
        mesh.edges().iter().map(|e| (e.endpoints[0], e.endpoints[1])).collect(),
    )
}

/// Dual arcs in primal edge-id order.
pub fn dual_graph(mesh: &PolyhedronMesh) -> DualGraph {
    let arcs = mesh
        .edges()
        .iter()
        .filter_map(|e| match e.faces.as_slice() {
            [a, b] => Some(DualArc {
                faces: (*a, *b),
                edge: e.id,
            }),
            _ => None,
        })
        .collect();
    DualGraph {
        face_count: mesh.face_count(),
        arcs,
    }
}
