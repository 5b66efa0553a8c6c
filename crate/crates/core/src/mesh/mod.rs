//! Immutable polyhedral surfaces: construction and validation, curvature,
//! skeleton and dual graphs, topological convexity and symmetry.

mod curvature;
mod embedding;
mod graph;
mod symmetry;
mod topology;

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::geometry::{angle_between, newell_normal, P2, P3, V3};

pub use curvature::{angle_sum, curvature, curvatures, total_curvature};
pub use embedding::{check_embedded, EmbeddingReport, FaceIntersection};
pub use graph::{dual_graph, skeleton_graph, DualArc, DualGraph, Graph};
pub use symmetry::{compose, invert, symmetry_group, Permutation};
pub use topology::{is_topologically_convex, ConvexityCertificate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no faces")]
    Empty,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("face {face} references vertex {vertex}, but only {count} vertices exist")]
    IndexOutOfRange { face: usize, vertex: usize, count: usize },
    #[error("face {0} needs at least three distinct vertices")]
    DegenerateFace(usize),
    #[error("vertex {0} is not used by any face")]
    UnusedVertex(usize),
    #[error("face {face} is not planar (deviation {deviation:e})")]
    NonPlanarFace { face: usize, deviation: f64 },
    #[error("face {face} is not strictly convex at vertex {vertex} (angle {angle} rad)")]
    NonConvexFace { face: usize, vertex: usize, angle: f64 },
    #[error("edge {a}-{b} is shared by {count} faces")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("faces {0} and {1} share more than one edge")]
    SharedEdgePair(usize, usize),
    #[error("faces around vertex {0} do not form a single fan")]
    NonManifoldVertex(usize),
    #[error("surface splits into {0} face-connected components")]
    DisconnectedSurface(usize),
    #[error("face {0} cannot be oriented consistently with its neighbors")]
    InconsistentOrientation(usize),
    #[error("vertex {0} lies on the boundary; curvature is undefined there")]
    BoundaryVertex(usize),
    #[error("operation requires a closed mesh")]
    OpenMesh,
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
}

/// Validation tolerances. `plane` is relative to the bounding-box diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub plane: f64,
    pub angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            plane: 1e-9,
            angle: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub position: P3,
}

/// A strictly convex planar face. `edges[i]` joins `vertices[i]` and
/// `vertices[i + 1]`; `angles[i]` is the interior angle at `vertices[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub angles: Vec<f64>,
    pub edge_lengths: Vec<f64>,
    pub normal: V3,
    pub offset: f64,
    pub area: f64,
}

impl Face {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn position_of(&self, vertex: usize) -> Option<usize> {
        self.vertices.iter().position(|&v| v == vertex)
    }

    pub fn angle_at(&self, vertex: usize) -> Option<f64> {
        self.position_of(vertex).map(|i| self.angles[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub endpoints: [usize; 2],
    pub faces: Vec<usize>,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.faces.len() == 1
    }

    pub fn other(&self, v: usize) -> usize {
        if self.endpoints[0] == v {
            self.endpoints[1]
        } else {
            self.endpoints[0]
        }
    }

    pub fn other_face(&self, f: usize) -> Option<usize> {
        match self.faces.as_slice() {
            [a, b] if *a == f => Some(*b),
            [a, b] if *b == f => Some(*a),
            _ => None,
        }
    }
}

/// Faces around a vertex in rotational order. `faces[i]` lies between
/// `edges[i]` and `edges[i + 1]` (cyclically when `closed`). An open ring
/// has one more edge than faces; its first and last edges are boundary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexRing {
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
    pub closed: bool,
}

#[derive(Debug, Clone)]
pub struct PolyhedronMesh {
    vertices: Vec<Vertex>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    vertex_edges: Vec<Vec<usize>>,
    rings: Vec<VertexRing>,
    face_neighbors: Vec<Vec<usize>>,
    boundary_edges: Vec<usize>,
    charts: Vec<Vec<P2>>,
    edge_index: HashMap<(usize, usize), usize>,
    diameter: f64,
}

/// Builds and validates a mesh with default tolerances.
pub fn build_mesh(vertices: &[P3], faces: &[Vec<usize>]) -> Result<PolyhedronMesh, MeshError> {
    PolyhedronMesh::build(vertices, faces, Tolerances::default())
}

impl PolyhedronMesh {
    pub fn build(positions: &[P3], face_loops: &[Vec<usize>], tol: Tolerances) -> Result<PolyhedronMesh, MeshError> {
        if face_loops.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = positions.len();
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFinite(i));
            }
        }
        let mut used = vec![false; n];
        for (f, lp) in face_loops.iter().enumerate() {
            for &v in lp {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        face: f,
                        vertex: v,
                        count: n,
                    });
                }
                used[v] = true;
            }
            let mut sorted = lp.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if lp.len() < 3 || sorted.len() != lp.len() {
                return Err(MeshError::DegenerateFace(f));
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::UnusedVertex(v));
        }

        // Edge occurrences keyed by sorted endpoint pair; BTreeMap gives the
        // deterministic id order.
        let mut occurrences: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (f, lp) in face_loops.iter().enumerate() {
            for i in 0..lp.len() {
                let a = lp[i];
                let b = lp[(i + 1) % lp.len()];
                occurrences.entry((a.min(b), a.max(b))).or_default().push((f, a < b));
            }
        }
        for (&(a, b), occ) in &occurrences {
            if occ.len() > 2 {
                return Err(MeshError::NonManifoldEdge { a, b, count: occ.len() });
            }
        }

        // Face adjacency and connectivity.
        let fcount = face_loops.len();
        let mut adjacency: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); fcount];
        let mut pair_seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (&key, occ) in &occurrences {
            if let [(f, _), (g, _)] = occ.as_slice() {
                adjacency[*f].push((*g, key));
                adjacency[*g].push((*f, key));
                let pk = ((*f).min(*g), (*f).max(*g));
                let c = pair_seen.entry(pk).or_insert(0);
                *c += 1;
                if *c > 1 {
                    return Err(MeshError::SharedEdgePair(pk.0, pk.1));
                }
            }
        }
        let mut component = vec![usize::MAX; fcount];
        let mut components = 0;
        for start in 0..fcount {
            if component[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            component[start] = components;
            while let Some(f) = queue.pop_front() {
                for &(g, _) in &adjacency[f] {
                    if component[g] == usize::MAX {
                        component[g] = components;
                        queue.push_back(g);
                    }
                }
            }
            components += 1;
        }
        if components > 1 {
            return Err(MeshError::DisconnectedSurface(components));
        }

        // Orientation: propagate from face 0 so every shared edge is
        // traversed in opposite directions by its two faces.
        let mut flipped: Vec<Option<bool>> = vec![None; fcount];
        flipped[0] = Some(false);
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            let ff = flipped[f].expect("visited");
            for &(g, key) in &adjacency[f] {
                let occ = &occurrences[&key];
                let dir_f = occ.iter().find(|o| o.0 == f).expect("occurrence").1 ^ ff;
                let raw_g = occ.iter().find(|o| o.0 == g).expect("occurrence").1;
                // g must traverse the edge opposite to f.
                let want_flip = raw_g == dir_f;
                match flipped[g] {
                    None => {
                        flipped[g] = Some(want_flip);
                        queue.push_back(g);
                    }
                    Some(existing) if existing != want_flip => {
                        return Err(MeshError::InconsistentOrientation(g));
                    }
                    _ => {}
                }
            }
        }
        let mut loops: Vec<Vec<usize>> = face_loops
            .iter()
            .enumerate()
            .map(|(f, lp)| {
                let mut lp = lp.clone();
                if flipped[f] == Some(true) {
                    lp.reverse();
                    lp.rotate_right(1);
                }
                lp
            })
            .collect();

        let closed = occurrences.values().all(|o| o.len() == 2);
        if closed {
            let mut volume = 0.0;
            for lp in &loops {
                let p0 = positions[lp[0]].coords;
                for i in 1..lp.len() - 1 {
                    let p1 = positions[lp[i]].coords;
                    let p2 = positions[lp[i + 1]].coords;
                    volume += p0.dot(&p1.cross(&p2));
                }
            }
            if volume < 0.0 {
                for lp in &mut loops {
                    lp.reverse();
                    lp.rotate_right(1);
                }
            }
        }

        // Edge table.
        let mut edge_index = HashMap::new();
        let mut edges: Vec<Edge> = Vec::with_capacity(occurrences.len());
        for (id, (&(a, b), occ)) in occurrences.iter().enumerate() {
            edge_index.insert((a, b), id);
            let mut faces: Vec<usize> = occ.iter().map(|o| o.0).collect();
            faces.sort_unstable();
            edges.push(Edge {
                id,
                endpoints: [a, b],
                faces,
                length: (positions[b] - positions[a]).norm(),
            });
        }

        let mut lo = positions[0];
        let mut hi = positions[0];
        for p in positions {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let diameter = (hi - lo).norm();

        let mut faces = Vec::with_capacity(fcount);
        for (f, lp) in loops.iter().enumerate() {
            faces.push(Self::face_geometry(f, lp, positions, &edge_index, diameter, tol)?);
        }

        let vertices: Vec<Vertex> = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| Vertex { id, position })
            .collect();

        let mut vertex_edges = vec![Vec::new(); n];
        for e in &edges {
            vertex_edges[e.endpoints[0]].push(e.id);
            vertex_edges[e.endpoints[1]].push(e.id);
        }
        let boundary_edges: Vec<usize> = edges.iter().filter(|e| e.is_boundary()).map(|e| e.id).collect();

        let mut face_neighbors: Vec<Vec<usize>> = vec![Vec::new(); fcount];
        for e in &edges {
            if let [a, b] = e.faces.as_slice() {
                face_neighbors[*a].push(*b);
                face_neighbors[*b].push(*a);
            }
        }
        for nb in &mut face_neighbors {
            nb.sort_unstable();
        }

        let rings = Self::vertex_rings(n, &faces, &edges)?;
        let charts = faces.iter().map(|face| Self::face_chart(face, positions)).collect();

        Ok(PolyhedronMesh {
            vertices,
            faces,
            edges,
            vertex_edges,
            rings,
            face_neighbors,
            boundary_edges,
            charts,
            edge_index,
            diameter,
        })
    }

    fn face_geometry(
        id: usize,
        lp: &[usize],
        positions: &[P3],
        edge_index: &HashMap<(usize, usize), usize>,
        diameter: f64,
        tol: Tolerances,
    ) -> Result<Face, MeshError> {
        let pts: Vec<P3> = lp.iter().map(|&v| positions[v]).collect();
        let k = pts.len();
        let newell = newell_normal(&pts);
        let area = 0.5 * newell.norm();
        if area <= 0.0 {
            return Err(MeshError::DegenerateFace(id));
        }
        let normal = newell / newell.norm();
        let centroid = pts.iter().fold(V3::zeros(), |acc, p| acc + p.coords) / k as f64;
        let offset = normal.dot(&centroid);
        let deviation = pts
            .iter()
            .map(|p| (normal.dot(&p.coords) - offset).abs())
            .fold(0.0, f64::max);
        if deviation > tol.plane * diameter.max(f64::MIN_POSITIVE) {
            return Err(MeshError::NonPlanarFace { face: id, deviation });
        }
        let mut angles = Vec::with_capacity(k);
        let mut edge_lengths = Vec::with_capacity(k);
        let mut edges = Vec::with_capacity(k);
        for i in 0..k {
            let prev = pts[(i + k - 1) % k];
            let cur = pts[i];
            let next = pts[(i + 1) % k];
            let a = prev - cur;
            let b = next - cur;
            let angle = angle_between(&b, &a);
            let turn = (cur - prev).cross(&(next - cur)).dot(&normal);
            if turn <= 0.0 || angle >= std::f64::consts::PI - tol.angle || angle <= tol.angle {
                return Err(MeshError::NonConvexFace {
                    face: id,
                    vertex: lp[i],
                    angle,
                });
            }
            angles.push(angle);
            edge_lengths.push(b.norm());
            let (u, v) = (lp[i], lp[(i + 1) % k]);
            edges.push(edge_index[&(u.min(v), u.max(v))]);
        }
        // A consistently turning polygon is convex only if it winds once.
        let sum: f64 = angles.iter().sum();
        let expected = (k as f64 - 2.0) * std::f64::consts::PI;
        if (sum - expected).abs() > 1e-6 {
            return Err(MeshError::NonConvexFace {
                face: id,
                vertex: lp[0],
                angle: sum,
            });
        }
        Ok(Face {
            id,
            vertices: lp.to_vec(),
            edges,
            angles,
            edge_lengths,
            normal,
            offset,
            area,
        })
    }

    fn vertex_rings(n: usize, faces: &[Face], edges: &[Edge]) -> Result<Vec<VertexRing>, MeshError> {
        // For each vertex: face -> (incoming edge, outgoing edge).
        let mut corners: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
        for face in faces {
            let k = face.len();
            for i in 0..k {
                let incoming = face.edges[(i + k - 1) % k];
                let outgoing = face.edges[i];
                corners[face.vertices[i]].push((face.id, incoming, outgoing));
            }
        }
        let mut rings = Vec::with_capacity(n);
        for (v, list) in corners.iter().enumerate() {
            let by_incoming: HashMap<usize, usize> = list.iter().enumerate().map(|(i, c)| (c.1, i)).collect();
            let start = list
                .iter()
                .enumerate()
                .filter(|(_, c)| edges[c.1].is_boundary())
                .map(|(i, _)| i)
                .next();
            let open = start.is_some();
            let first = start.unwrap_or_else(|| (0..list.len()).min_by_key(|&i| list[i].0).expect("vertex has faces"));
            let mut cur = first;
            let mut ring = VertexRing {
                edges: vec![list[cur].1],
                faces: Vec::new(),
                closed: !open,
            };
            let mut visited = vec![false; list.len()];
            loop {
                if visited[cur] {
                    return Err(MeshError::NonManifoldVertex(v));
                }
                visited[cur] = true;
                let (f, _, out) = list[cur];
                ring.faces.push(f);
                if edges[out].is_boundary() {
                    ring.edges.push(out);
                    break;
                }
                match by_incoming.get(&out) {
                    Some(&next) if next == first => break,
                    Some(&next) => {
                        ring.edges.push(out);
                        cur = next;
                    }
                    None => return Err(MeshError::NonManifoldVertex(v)),
                }
            }
            if ring.faces.len() != list.len() {
                return Err(MeshError::NonManifoldVertex(v));
            }
            rings.push(ring);
        }
        Ok(rings)
    }

    fn face_chart(face: &Face, positions: &[P3]) -> Vec<P2> {
        let origin = positions[face.vertices[0]];
        let x = (positions[face.vertices[1]] - origin).normalize();
        let y = face.normal.cross(&x);
        face.vertices
            .iter()
            .map(|&v| {
                let d = positions[v] - origin;
                P2::new(d.dot(&x), d.dot(&y))
            })
            .collect()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn position(&self, v: usize) -> P3 {
        self.vertices[v].position
    }

    pub fn positions(&self) -> Vec<P3> {
        self.vertices.iter().map(|v| v.position).collect()
    }

    pub fn face_loops(&self) -> Vec<Vec<usize>> {
        self.faces.iter().map(|f| f.vertices.clone()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edges.is_empty()
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        !self.rings[v].closed
    }

    pub fn interior_edges(&self) -> Vec<usize> {
        self.edges.iter().filter(|e| !e.is_boundary()).map(|e| e.id).collect()
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn ring(&self, v: usize) -> &VertexRing {
        &self.rings[v]
    }

    pub fn face_neighbors(&self, f: usize) -> &[usize] {
        &self.face_neighbors[f]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Face polygon in its own isometric planar chart, counterclockwise
    /// when the face is seen from outside.
    pub fn chart(&self, f: usize) -> &[P2] {
        &self.charts[f]
    }

    /// Chart coordinates of a point lying in the plane of face `f`.
    pub fn to_chart(&self, f: usize, p: &P3) -> P2 {
        let face = &self.faces[f];
        let origin = self.position(face.vertices[0]);
        let x = (self.position(face.vertices[1]) - origin).normalize();
        let y = face.normal.cross(&x);
        let d = p - origin;
        P2::new(d.dot(&x), d.dot(&y))
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn surface_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// Interior angle of face `f` at vertex `v`.
    pub fn face_angle(&self, f: usize, v: usize) -> Option<f64> {
        self.faces.get(f).and_then(|face| face.angle_at(v))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn tetrahedron_counts() {
        let m = tetrahedron();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (4, 6, 4));
        assert!(m.is_closed());
        for v in 0..4 {
            assert_eq!(m.ring(v).faces.len(), 3);
            assert!(m.ring(v).closed);
        }
    }

    #[test]
    fn single_triangle_is_open() {
        let v = vec![P3::new(0.0, 0.0, 0.0), P3::new(1.0, 0.0, 0.0), P3::new(0.0, 1.0, 0.0)];
        let m = build_mesh(&v, &[vec![0, 1, 2]]).unwrap();
        assert!(!m.is_closed());
        assert_eq!(m.boundary_edges().len(), 3);
        assert!(m.is_boundary_vertex(0));
        assert_eq!(m.ring(0).edges.len(), 2);
    }

    #[test]
    fn edge_ids_follow_sorted_endpoints() {
        let m = cube();
        let pairs: Vec<[usize; 2]> = m.edges().iter().map(|e| e.endpoints).collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
    }

    #[test]
    fn inverted_input_is_reoriented_outward() {
        let m = tetrahedron();
        let flipped: Vec<Vec<usize>> = m
            .face_loops()
            .into_iter()
            .map(|mut l| {
                l.reverse();
                l
            })
            .collect();
        let again = build_mesh(&m.positions(), &flipped).unwrap();
        for f in again.faces() {
            let c = f
                .vertices
                .iter()
                .fold(V3::zeros(), |a, &v| a + again.position(v).coords);
            assert!(f.normal.dot(&c) > 0.0);
        }
    }

    #[test]
    fn rejects_nonplanar_and_nonconvex_faces() {
        let v = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(1.0, 1.0, 0.1),
            P3::new(0.0, 1.0, 0.0),
        ];
        assert!(matches!(
            build_mesh(&v, &[vec![0, 1, 2, 3]]),
            Err(MeshError::NonPlanarFace { .. })
        ));
        let w = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(2.0, 0.0, 0.0),
            P3::new(0.5, 0.5, 0.0),
            P3::new(0.0, 2.0, 0.0),
        ];
        assert!(matches!(
            build_mesh(&w, &[vec![0, 1, 2, 3]]),
            Err(MeshError::NonConvexFace { .. })
        ));
        // Collinear corner: angle exactly π.
        let c = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(2.0, 0.0, 0.0),
            P3::new(0.0, 1.0, 0.0),
        ];
        assert!(matches!(
            build_mesh(&c, &[vec![0, 1, 2, 3]]),
            Err(MeshError::NonConvexFace { .. })
        ));
    }

    #[test]
    fn rejects_nonmanifold_edge() {
        let v = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(0.0, 1.0, 0.0),
            P3::new(0.0, -1.0, 0.0),
            P3::new(0.0, 0.0, 1.0),
        ];
        let f = vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]];
        assert!(matches!(build_mesh(&v, &f), Err(MeshError::NonManifoldEdge { .. })));
    }

    #[test]
    fn rejects_two_tetrahedra_sharing_a_vertex() {
        let t = tetrahedron();
        let mut v = t.positions();
        let mut f = t.face_loops();
        for p in t.positions().iter().skip(1) {
            v.push(P3::new(-p.x + 2.0 * v[0].x, -p.y + 2.0 * v[0].y, -p.z + 2.0 * v[0].z));
        }
        // Mirror of the first tetrahedron through vertex 0; keep 0 shared.
        let map = |i: usize| if i == 0 { 0 } else { i + 3 };
        for lp in t.face_loops() {
            f.push(lp.iter().rev().map(|&i| map(i)).collect());
        }
        let err = build_mesh(&v, &f).unwrap_err();
        assert!(
            matches!(err, MeshError::NonManifoldVertex(0) | MeshError::DisconnectedSurface(_)),
            "{err:?}"
        );
    }

    #[test]
    fn rejects_faces_sharing_two_edges() {
        let v = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(1.0, 1.0, 0.0),
            P3::new(0.0, 1.0, 0.0),
            P3::new(2.0, 2.0, 0.0),
        ];
        let f = vec![vec![0, 1, 2, 3], vec![2, 1, 0, 4]];
        assert!(build_mesh(&v, &f).is_err());
    }

    #[test]
    fn rejects_bad_indices_and_unused_vertices() {
        let v = vec![P3::new(0.0, 0.0, 0.0), P3::new(1.0, 0.0, 0.0), P3::new(0.0, 1.0, 0.0)];
        assert!(matches!(
            build_mesh(&v, &[vec![0, 1, 5]]),
            Err(MeshError::IndexOutOfRange { .. })
        ));
        let mut w = v.clone();
        w.push(P3::new(4.0, 4.0, 4.0));
        assert_eq!(
            build_mesh(&w, &[vec![0, 1, 2]]).unwrap_err(),
            MeshError::UnusedVertex(3)
        );
        assert_eq!(build_mesh(&v, &[]).unwrap_err(), MeshError::Empty);
        assert_eq!(
            build_mesh(&v, &[vec![0, 1, 1]]).unwrap_err(),
            MeshError::DegenerateFace(0)
        );
    }

    #[test]
    fn charts_are_isometric() {
        let m = cube();
        for f in m.faces() {
            let chart = m.chart(f.id);
            for i in 0..f.len() {
                let d = (chart[(i + 1) % f.len()] - chart[i]).norm();
                assert!((d - f.edge_lengths[i]).abs() < 1e-12);
            }
            assert!(crate::geometry::signed_area(chart) > 0.0);
        }
    }
}
