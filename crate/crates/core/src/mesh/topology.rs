use super::{skeleton_graph, Graph, MeshError, PolyhedronMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexityCertificate {
    pub genus_zero: bool,
    pub three_connected: bool,
}

impl ConvexityCertificate {
    pub fn holds(&self) -> bool {
        self.genus_zero && self.three_connected
    }
}

impl PolyhedronMesh {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> Result<i64, MeshError> {
        if !self.is_closed() {
            return Err(MeshError::OpenMesh);
        }
        Ok((2 - self.euler_characteristic()) / 2)
    }
}

/// Genus zero plus 3-connectivity of the skeleton, the latter checked by
/// deleting every vertex pair.
pub fn is_topologically_convex(mesh: &PolyhedronMesh) -> Result<ConvexityCertificate, MeshError> {
    let genus_zero = mesh.genus()? == 0;
    Ok(ConvexityCertificate {
        genus_zero,
        three_connected: is_three_connected(&skeleton_graph(mesh)),
    })
}

pub(crate) fn is_three_connected(g: &Graph) -> bool {
    let n = g.vertex_count;
    if n < 4 || !g.is_connected() {
        return false;
    }
    let adj = g.adjacency();
    let mut removed = vec![false; n];
    for a in 0..n {
        for b in a + 1..n {
            removed[a] = true;
            removed[b] = true;
            let start = (0..n).find(|&v| !removed[v]).expect("n >= 4");
            let mut seen = removed.clone();
            seen[start] = true;
            let mut stack = vec![start];
            let mut reached = 1;
            while let Some(u) = stack.pop() {
                for &(w, _) in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        reached += 1;
                        stack.push(w);
                    }
                }
            }
            removed[a] = false;
            removed[b] = false;
            if reached != n - 2 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn solids_are_convex() {
        for m in [tetrahedron(), cube()] {
            assert_eq!(m.euler_characteristic(), 2);
            assert_eq!(m.genus().unwrap(), 0);
            assert!(is_topologically_convex(&m).unwrap().holds());
        }
    }

    #[test]
    fn cycle_is_not_three_connected() {
        let g = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect());
        assert!(!is_three_connected(&g));
        assert!(is_three_connected(&Graph::complete(5)));
    }
}
