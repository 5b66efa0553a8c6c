//! Cuttings, planar layouts of cut surfaces, overlap detection, and the two
//! constructive general unfoldings.

mod fan;
mod general;
mod layout;
mod overlap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{curvatures, dual_graph, PolyhedronMesh};

pub use fan::{sample_fan_general_cuts, unfold_fan_single_general_cut, FanUnfolding, PlacedPiece};
pub use general::{general_unfold_spiked_tetrahedron, BandParams, GeneralNet, NetPiece, PieceKind};
pub use layout::{congruence_signature, layout, layout_unchecked, LayoutAudit, PlacedFace, PlanarLayout};
pub use overlap::{check_overlap, polygon_overlaps, OverlapPair, OverlapReport};

/// Curvature below this magnitude counts as flat.
pub const FLAT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnfoldError {
    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),
    #[error("edge {0} lies on the boundary and cannot be cut")]
    BoundaryEdgeInCutting(usize),
    #[error("cutting is not admissible ({0})")]
    InadmissibleCutting(CutValidity),
    #[error("cutting separates the surface")]
    SurfaceDisconnected,
    #[error("layout does not close up consistently")]
    InconsistentLayout,
    #[error("band collision: {0}")]
    BandCollision(String),
    #[error("unsupported mesh: {0}")]
    UnsupportedMesh(String),
}

/// A set of mesh edges, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cutting {
    edges: Vec<usize>,
}

impl Cutting {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Cutting { edges }
    }

    pub fn empty() -> Self {
        Cutting::default()
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Membership bitmap over `edge_count` edges.
    pub fn mask(&self, edge_count: usize) -> Vec<bool> {
        let mut m = vec![false; edge_count];
        for &e in &self.edges {
            m[e] = true;
        }
        m
    }
}

impl From<Vec<usize>> for Cutting {
    fn from(v: Vec<usize>) -> Self {
        Cutting::new(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutValidity {
    pub is_forest: bool,
    pub spans_required: bool,
    pub surface_connected: bool,
    /// Connected components of the cut edges (0 for the empty cutting).
    pub component_count: usize,
}

impl CutValidity {
    pub fn admissible(&self) -> bool {
        self.is_forest && self.spans_required && self.surface_connected
    }
}

impl std::fmt::Display for CutValidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "forest: {}, spans: {}, connected: {}, components: {}",
            self.is_forest, self.spans_required, self.surface_connected, self.component_count
        )
    }
}

pub(crate) fn check_edges(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<(), UnfoldError> {
    for &e in cutting.edges() {
        let edge = mesh.edges().get(e).ok_or(UnfoldError::NoSuchEdge(e))?;
        if edge.is_boundary() {
            return Err(UnfoldError::BoundaryEdgeInCutting(e));
        }
    }
    Ok(())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Forest, span and surface-connectivity tests for an edge cutting.
pub fn validate_cutting(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<CutValidity, UnfoldError> {
    check_edges(mesh, cutting)?;
    let n = mesh.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut touched = vec![false; n];
    let mut is_forest = true;
    for &e in cutting.edges() {
        let [a, b] = mesh.edges()[e].endpoints;
        touched[a] = true;
        touched[b] = true;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            is_forest = false;
        } else {
            parent[ra] = rb;
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| touched[v]).map(|v| find(&mut parent, v)).collect();
    roots.sort_unstable();
    roots.dedup();
    let spans_required = curvatures(mesh)
        .iter()
        .enumerate()
        .all(|(v, k)| k.is_none_or(|k| k.abs() <= FLAT_EPS) || touched[v]);
    let cut = cutting.mask(mesh.edge_count());
    let dual = dual_graph(mesh);
    let surface_connected = dual.as_graph().components_with(|i| !cut[dual.arcs[i].edge]) == 1;
    Ok(CutValidity {
        is_forest,
        spans_required,
        surface_connected,
        component_count: roots.len(),
    })
}

/// Lays out a cutting and checks the result for overlap.
pub fn unfold_edges(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<(PlanarLayout, OverlapReport), UnfoldError> {
    let l = layout(mesh, cutting)?;
    let report = check_overlap(&l)?;
    Ok((l, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_basic_hat, build_open_fan, build_reference, BasicHatParams, FanParams, ReferenceSolid,
    };

    #[test]
    fn tetrahedron_cuttings() {
        let m = build_reference(ReferenceSolid::Tetrahedron);
        let star: Vec<usize> = m.vertex_edges(0).to_vec();
        let v = validate_cutting(&m, &Cutting::new(star)).unwrap();
        assert!(v.admissible());
        assert_eq!(v.component_count, 1);
        let tri = m.faces()[0].edges.clone();
        let v = validate_cutting(&m, &Cutting::new(tri)).unwrap();
        assert!(!v.is_forest);
        assert!(!v.admissible());
    }

    #[test]
    fn hat_spiral_path_is_admissible() {
        let m = build_basic_hat(&BasicHatParams::default()).unwrap();
        // corner 0 -> middle 0 -> middle 1 -> middle 2 -> tip
        let path = [(0, 3), (3, 4), (4, 5), (5, 6)];
        let c = Cutting::new(path.iter().map(|&(a, b)| m.edge_between(a, b).unwrap()).collect());
        assert!(validate_cutting(&m, &c).unwrap().admissible());
        let boundary = Cutting::new(vec![m.boundary_edges()[0]]);
        assert!(matches!(
            validate_cutting(&m, &boundary),
            Err(UnfoldError::BoundaryEdgeInCutting(_))
        ));
        assert_eq!(
            validate_cutting(&m, &Cutting::new(vec![99])),
            Err(UnfoldError::NoSuchEdge(99))
        );
    }

    #[test]
    fn fan_spokes() {
        let m = build_open_fan(&FanParams::default()).unwrap();
        let spokes: Vec<usize> = m.vertex_edges(0).to_vec();
        assert_eq!(spokes.len(), 8);
        let one = validate_cutting(&m, &Cutting::new(vec![spokes[0]])).unwrap();
        assert!(one.admissible());
        let two = validate_cutting(&m, &Cutting::new(vec![spokes[0], spokes[3]])).unwrap();
        assert!(!two.surface_connected);
        let none = validate_cutting(&m, &Cutting::empty()).unwrap();
        assert!(!none.spans_required);
        assert_eq!(none.component_count, 0);
    }
}
