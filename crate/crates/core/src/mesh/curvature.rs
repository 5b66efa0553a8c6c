use std::f64::consts::TAU;

use super::{MeshError, PolyhedronMesh};

/// Sum of the interior face angles at `v`, boundary vertices included.
pub fn angle_sum(mesh: &PolyhedronMesh, v: usize) -> Result<f64, MeshError> {
    if v >= mesh.vertex_count() {
        return Err(MeshError::NoSuchVertex(v));
    }
    Ok(mesh
        .ring(v)
        .faces
        .iter()
        .map(|&f| mesh.faces()[f].angle_at(v).expect("ring face contains vertex"))
        .sum())
}

/// Angle defect `2π − angle_sum`; undefined on the boundary.
pub fn curvature(mesh: &PolyhedronMesh, v: usize) -> Result<f64, MeshError> {
    let sum = angle_sum(mesh, v)?;
    if mesh.is_boundary_vertex(v) {
        return Err(MeshError::BoundaryVertex(v));
    }
    Ok(TAU - sum)
}

pub fn total_curvature(mesh: &PolyhedronMesh) -> Result<f64, MeshError> {
    if !mesh.is_closed() {
        return Err(MeshError::OpenMesh);
    }
    (0..mesh.vertex_count()).map(|v| curvature(mesh, v)).sum()
}

/// Curvature of every vertex, `None` on the boundary.
pub fn curvatures(mesh: &PolyhedronMesh) -> Vec<Option<f64>> {
    (0..mesh.vertex_count()).map(|v| curvature(mesh, v).ok()).collect()
}
