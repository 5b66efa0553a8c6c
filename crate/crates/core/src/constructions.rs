//! Parameterized generators: basic and triangulated hats, spiked
//! tetrahedra and octahedra, the pleated open fan, and reference solids.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{P3, V3};
use crate::mesh::{build_mesh, MeshError, PolyhedronMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("parameter {name} = {value} out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("no 3D realization: {0}")]
    DegenerateRealization(String),
    #[error("fan of {n} triangles with apex {apex}° has no negative curvature")]
    InsufficientAngle { n: usize, apex: f64 },
    #[error("glued corner differs from guide vertex by {0:e}")]
    GluingMismatch(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HatKind {
    Basic,
    Triangulated,
}

/// Angles in degrees; the spike base has length 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicHatParams {
    pub alpha: f64,
    pub beta: f64,
    pub ell: f64,
}

impl Default for BasicHatParams {
    fn default() -> Self {
        BasicHatParams {
            alpha: 81.0,
            beta: 35.0,
            ell: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriHatParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for TriHatParams {
    fn default() -> Self {
        TriHatParams {
            alpha: 81.0,
            beta: 30.0,
            gamma: 20.0,
        }
    }
}

impl TriHatParams {
    /// Boundary side forced by the shared legs of base and apex-γ triangles.
    pub fn side(&self) -> f64 {
        self.beta.to_radians().cos() / (self.gamma.to_radians() / 2.0).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HatParams {
    Basic(BasicHatParams),
    Triangulated(TriHatParams),
}

impl HatParams {
    pub fn kind(&self) -> HatKind {
        match self {
            HatParams::Basic(_) => HatKind::Basic,
            HatParams::Triangulated(_) => HatKind::Triangulated,
        }
    }

    pub fn default_for(kind: HatKind) -> Self {
        match kind {
            HatKind::Basic => HatParams::Basic(BasicHatParams::default()),
            HatKind::Triangulated => HatParams::Triangulated(TriHatParams::default()),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            HatParams::Basic(p) => p.alpha,
            HatParams::Triangulated(p) => p.alpha,
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            HatParams::Basic(p) => p.beta,
            HatParams::Triangulated(p) => p.beta,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            HatParams::Basic(_) => 0.0,
            HatParams::Triangulated(p) => p.gamma,
        }
    }

    /// Side of the equilateral boundary triangle.
    pub fn side(&self) -> f64 {
        match self {
            HatParams::Basic(p) => p.ell,
            HatParams::Triangulated(p) => p.side(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// α > β + γ/2: middle vertices have negative curvature.
    pub middles_negative: bool,
    /// α > 2β + γ: middles stay negative with one spike triangle removed.
    pub negative_without_spike: bool,
    pub realizable: bool,
}

const DEG_EPS: f64 = 1e-9;

fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    reason: &'static str,
) -> Result<(), ConstructionError> {
    if !value.is_finite() || value < lo || value >= hi {
        return Err(ConstructionError::OutOfRange { name, value, reason });
    }
    Ok(())
}

/// Checks parameter bounds and reports which curvature conditions hold.
pub fn validate_hat(params: &HatParams) -> Result<ConstraintReport, ConstructionError> {
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    check_range("alpha", alpha, 30.0, 90.0, "need 30 <= alpha < 90")?;
    let realizable = match params {
        HatParams::Basic(p) => {
            check_range("beta", beta, 30.0, 90.0, "need 30 <= beta < 90")?;
            if !(p.ell.is_finite() && p.ell > 1.0) {
                return Err(ConstructionError::OutOfRange {
                    name: "ell",
                    value: p.ell,
                    reason: "need ell > 1",
                });
            }
            alpha > 30.0 + DEG_EPS && beta > 30.0 + DEG_EPS
        }
        HatParams::Triangulated(p) => {
            check_range("gamma", gamma, DEG_EPS, 60.0, "need 0 < gamma < 60")?;
            check_range("beta", beta + gamma / 2.0, 30.0, 90.0, "need 30 <= beta + gamma/2 < 90")?;
            if beta <= 0.0 {
                return Err(ConstructionError::OutOfRange {
                    name: "beta",
                    value: beta,
                    reason: "need beta > 0",
                });
            }
            alpha > 30.0 + DEG_EPS && tri_hat_height(p) > 0.0
        }
    };
    Ok(ConstraintReport {
        middles_negative: alpha > beta + gamma / 2.0,
        negative_without_spike: alpha > 2.0 * beta + gamma,
        realizable,
    })
}

fn spike_height(alpha: f64) -> f64 {
    let t = 1.0 / (2.0 * alpha.to_radians().cos());
    (t * t - 1.0 / 3.0).max(0.0).sqrt()
}

fn basic_brim_height(p: &BasicHatParams) -> f64 {
    if p.beta <= 30.0 + DEG_EPS {
        return 0.0;
    }
    let s = (p.ell - 1.0) / (2.0 * p.beta.to_radians().cos());
    (s * s - (p.ell - 1.0).powi(2) / 3.0).max(0.0).sqrt()
}

fn tri_hat_height(p: &TriHatParams) -> f64 {
    let b = p.side();
    let leg = 1.0 / (2.0 * (p.gamma.to_radians() / 2.0).sin());
    let d2 = (b * b + 1.0 - b) / 3.0;
    let h2 = leg * leg - d2;
    if h2 > 1e-18 {
        h2.sqrt()
    } else {
        0.0
    }
}

fn polar(radius: f64, degrees: f64, z: f64) -> P3 {
    let a = degrees.to_radians();
    P3::new(radius * a.cos(), radius * a.sin(), z)
}

/// Vertices: corners 0..3 (on z = 0), middles 3..6, tip 6. Faces: brim
/// trapezoids 0..3, spikes 3..6.
fn basic_hat_geometry(p: &BasicHatParams) -> (Vec<P3>, Vec<Vec<usize>>) {
    let hb = basic_brim_height(p);
    let hs = spike_height(p.alpha);
    let rc = p.ell / 3f64.sqrt();
    let rm = 1.0 / 3f64.sqrt();
    let mut v: Vec<P3> = (0..3).map(|i| polar(rc, 120.0 * i as f64, 0.0)).collect();
    v.extend((0..3).map(|i| polar(rm, 120.0 * i as f64, hb)));
    v.push(P3::new(0.0, 0.0, hb + hs));
    let mut f = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        f.push(vec![i, j, 3 + j, 3 + i]);
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        f.push(vec![3 + i, 3 + j, 6]);
    }
    (v, f)
}

/// Vertices as for the basic hat; middle `k` sits opposite corner `k`.
/// Faces: boundary-base triangles 0..3, apex-γ triangles 3..6, spikes 6..9.
fn tri_hat_geometry(p: &TriHatParams) -> (Vec<P3>, Vec<Vec<usize>>) {
    let h = tri_hat_height(p);
    let hs = spike_height(p.alpha);
    let rc = p.side() / 3f64.sqrt();
    let rm = 1.0 / 3f64.sqrt();
    let mut v: Vec<P3> = (0..3).map(|k| polar(rc, 120.0 * k as f64, 0.0)).collect();
    v.extend((0..3).map(|k| polar(rm, 120.0 * k as f64 + 180.0, h)));
    v.push(P3::new(0.0, 0.0, h + hs));
    let mut f = Vec::new();
    for k in 0..3 {
        f.push(vec![(k + 1) % 3, (k + 2) % 3, 3 + k]);
    }
    for k in 0..3 {
        f.push(vec![k, 3 + (k + 2) % 3, 3 + (k + 1) % 3]);
    }
    for k in 0..3 {
        f.push(vec![3 + k, 3 + (k + 1) % 3, 6]);
    }
    (v, f)
}

fn hat_geometry(params: &HatParams, allow_flat: bool) -> Result<(Vec<P3>, Vec<Vec<usize>>), ConstructionError> {
    let report = validate_hat(params)?;
    if !report.realizable {
        let flat_brim_only =
            matches!(params, HatParams::Basic(p) if p.alpha > 30.0 + DEG_EPS && p.beta <= 30.0 + DEG_EPS);
        if !(allow_flat && flat_brim_only) {
            return Err(ConstructionError::DegenerateRealization(
                "brim or spike height is not positive".into(),
            ));
        }
    }
    Ok(match params {
        HatParams::Basic(p) => basic_hat_geometry(p),
        HatParams::Triangulated(p) => tri_hat_geometry(p),
    })
}

pub fn build_basic_hat(params: &BasicHatParams) -> Result<PolyhedronMesh, ConstructionError> {
    build_hat(&HatParams::Basic(*params), false)
}

pub fn build_triangulated_hat(params: &TriHatParams) -> Result<PolyhedronMesh, ConstructionError> {
    build_hat(&HatParams::Triangulated(*params), false)
}

/// Builds either hat. `allow_flat` admits a basic hat with β = 30°, whose
/// brim lies flat in the base plane; its intrinsic data are still exact.
pub fn build_hat(params: &HatParams, allow_flat: bool) -> Result<PolyhedronMesh, ConstructionError> {
    let (v, f) = hat_geometry(params, allow_flat)?;
    Ok(build_mesh(&v, &f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuideSolid {
    Tetrahedron,
    Octahedron,
}

fn guide(solid: GuideSolid, edge: f64) -> (Vec<P3>, Vec<[usize; 3]>) {
    let (v, tris): (Vec<P3>, Vec<[usize; 3]>) = match solid {
        GuideSolid::Tetrahedron => {
            let s = edge / (2.0 * 2f64.sqrt());
            (
                vec![
                    P3::new(s, s, s),
                    P3::new(s, -s, -s),
                    P3::new(-s, s, -s),
                    P3::new(-s, -s, s),
                ],
                vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
            )
        }
        GuideSolid::Octahedron => {
            let s = edge / 2f64.sqrt();
            let mut v = Vec::new();
            for axis in 0..3 {
                for sign in [1.0, -1.0] {
                    let mut c = [0.0; 3];
                    c[axis] = sign * s;
                    v.push(P3::new(c[0], c[1], c[2]));
                }
            }
            let mut t = Vec::new();
            for x in [0, 1] {
                for y in [2, 3] {
                    for z in [4, 5] {
                        t.push([x, y, z]);
                    }
                }
            }
            (v, t)
        }
    };
    let oriented = tris
        .into_iter()
        .map(|[a, b, c]| {
            let n = (v[b] - v[a]).cross(&(v[c] - v[a]));
            if n.dot(&v[a].coords) > 0.0 {
                [a, b, c]
            } else {
                [a, c, b]
            }
        })
        .collect();
    (v, oriented)
}

/// Glues a hat onto every face of a regular guide solid whose edge equals
/// the hat boundary side, then drops the guide faces. Vertex order: guide
/// vertices, then per guide face its three middles and tip.
pub fn build_spiked(
    solid: GuideSolid,
    params: &HatParams,
    allow_flat: bool,
) -> Result<PolyhedronMesh, ConstructionError> {
    let (hv, hf) = hat_geometry(params, allow_flat)?;
    let (gv, gf) = guide(solid, params.side());
    let mut vertices = gv.clone();
    let mut faces = Vec::new();
    let tol = 1e-9 * params.side().max(1.0);
    for tri in &gf {
        let o = (gv[tri[0]].coords + gv[tri[1]].coords + gv[tri[2]].coords) / 3.0;
        let x = (gv[tri[0]].coords - o).normalize();
        let z = (gv[tri[1]] - gv[tri[0]]).cross(&(gv[tri[2]] - gv[tri[0]])).normalize();
        let y = z.cross(&x);
        let place = |p: &P3| -> P3 { P3::from(o + x * p.x + y * p.y + z * p.z) };
        let mut map = [0usize; 7];
        for i in 0..3 {
            let d = (place(&hv[i]) - gv[tri[i]]).norm();
            if d > tol {
                return Err(ConstructionError::GluingMismatch(d));
            }
            map[i] = tri[i];
        }
        for (i, slot) in map.iter_mut().enumerate().skip(3) {
            *slot = vertices.len();
            vertices.push(place(&hv[i]));
        }
        faces.extend(hf.iter().map(|f| f.iter().map(|&i| map[i]).collect::<Vec<_>>()));
    }
    Ok(build_mesh(&vertices, &faces)?)
}

pub fn build_spiked_tetrahedron(params: &HatParams) -> Result<PolyhedronMesh, ConstructionError> {
    build_spiked(GuideSolid::Tetrahedron, params, false)
}

pub fn build_spiked_octahedron(params: &HatParams) -> Result<PolyhedronMesh, ConstructionError> {
    build_spiked(GuideSolid::Octahedron, params, false)
}

/// `n` congruent isosceles triangles with apex angle `apex_angle` (degrees)
/// and legs `leg` around a shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanParams {
    pub n: usize,
    pub apex_angle: f64,
    pub leg: f64,
}

impl Default for FanParams {
    fn default() -> Self {
        FanParams {
            n: 8,
            apex_angle: 50.0,
            leg: 1.0,
        }
    }
}

fn longitude_steps(theta: f64, psi: &[f64]) -> Vec<f64> {
    let n = psi.len();
    (0..n)
        .map(|k| {
            let (a, b) = (psi[k], psi[(k + 1) % n]);
            let c = (theta.cos() - a.sin() * b.sin()) / (a.cos() * b.cos());
            c.clamp(-1.0, 1.0).acos()
        })
        .collect()
}

fn latitude_pattern(n: usize) -> Vec<f64> {
    if n.is_multiple_of(2) {
        (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect()
    } else {
        let m = ((n - 1) / 2) as f64;
        (0..n).map(|k| (TAU * m * k as f64 / n as f64).cos()).collect()
    }
}

/// Rim latitudes of the pleated cone: the pattern scaled by the amplitude
/// that makes the longitude steps close up to one full turn.
fn pleat_latitudes(n: usize, theta: f64) -> Result<Vec<f64>, ConstructionError> {
    let pattern = latitude_pattern(n);
    let total = |amp: f64| -> f64 {
        let psi: Vec<f64> = pattern.iter().map(|s| amp * s).collect();
        longitude_steps(theta, &psi).iter().sum()
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_2 - 1e-9);
    if total(hi) > TAU {
        return Err(ConstructionError::DegenerateRealization(
            "pleated fan does not close".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > TAU {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let amp = 0.5 * (lo + hi);
    Ok(pattern.iter().map(|s| amp * s).collect())
}

/// Vertex 0 is the center, rim vertices 1..=n; face `k` is
/// `[0, k + 1, k + 2]` (rim indices wrap).
pub fn build_open_fan(params: &FanParams) -> Result<PolyhedronMesh, ConstructionError> {
    let FanParams { n, apex_angle, leg } = *params;
    if n < 3 {
        return Err(ConstructionError::OutOfRange {
            name: "n",
            value: n as f64,
            reason: "need at least 3 triangles",
        });
    }
    check_range("apex", apex_angle, DEG_EPS, 180.0, "need 0 < apex < 180")?;
    if !(leg.is_finite() && leg > 0.0) {
        return Err(ConstructionError::OutOfRange {
            name: "leg",
            value: leg,
            reason: "need leg > 0",
        });
    }
    if n as f64 * apex_angle <= 360.0 + DEG_EPS {
        return Err(ConstructionError::InsufficientAngle { n, apex: apex_angle });
    }
    let theta = apex_angle.to_radians();
    let psi = pleat_latitudes(n, theta)?;
    let steps = longitude_steps(theta, &psi);
    if steps.iter().any(|&s| s < 1e-9) {
        return Err(ConstructionError::DegenerateRealization(
            "pleated fan has a vanishing longitude step".into(),
        ));
    }
    let mut vertices = vec![P3::origin()];
    let mut phi: f64 = 0.0;
    for k in 0..n {
        let dir = V3::new(psi[k].cos() * phi.cos(), psi[k].cos() * phi.sin(), psi[k].sin());
        vertices.push(P3::from(dir * leg));
        phi += steps[k];
    }
    let faces: Vec<Vec<usize>> = (0..n).map(|k| vec![0, k + 1, (k + 1) % n + 1]).collect();
    Ok(build_mesh(&vertices, &faces)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceSolid {
    Tetrahedron,
    Cube,
}

/// Unit-edge reference solid.
pub fn build_reference(solid: ReferenceSolid) -> PolyhedronMesh {
    let (v, f): (Vec<P3>, Vec<Vec<usize>>) = match solid {
        ReferenceSolid::Tetrahedron => {
            let (v, t) = guide(GuideSolid::Tetrahedron, 1.0);
            (v, t.iter().map(|x| x.to_vec()).collect())
        }
        ReferenceSolid::Cube => {
            let v = (0..8)
                .map(|i| P3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
                .collect();
            let f = vec![
                vec![0, 2, 3, 1],
                vec![4, 5, 7, 6],
                vec![0, 1, 5, 4],
                vec![2, 6, 7, 3],
                vec![0, 4, 6, 2],
                vec![1, 3, 7, 5],
            ];
            (v, f)
        }
    };
    build_mesh(&v, &f).expect("reference solids are valid")
}

/// Vertex and face sets of one hat inside a hat or spiked-solid mesh.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatRegion {
    pub tip: usize,
    pub middles: Vec<usize>,
    pub corners: Vec<usize>,
    pub faces: Vec<usize>,
    /// Hat edges other than the three corner-to-corner boundary edges.
    pub internal_edges: Vec<usize>,
}

/// Recovers the hats of a hat or spiked-solid mesh from its combinatorics:
/// a tip is a degree-3 vertex whose neighbors form a triangle, and a hat is
/// every face touching one of those middles. Returns `None` unless the hats
/// partition the faces and each has three corners.
pub fn identify_hats(mesh: &PolyhedronMesh) -> Option<Vec<HatRegion>> {
    let neighbors = |v: usize| -> Vec<usize> {
        let mut n: Vec<usize> = mesh.vertex_edges(v).iter().map(|&e| mesh.edges()[e].other(v)).collect();
        n.sort_unstable();
        n
    };
    let mut hats = Vec::new();
    let mut owner = vec![usize::MAX; mesh.face_count()];
    for t in 0..mesh.vertex_count() {
        let middles = neighbors(t);
        if middles.len() != 3 || mesh.is_boundary_vertex(t) {
            continue;
        }
        let triangle = (0..3).all(|i| mesh.edge_between(middles[i], middles[(i + 1) % 3]).is_some());
        if !triangle {
            continue;
        }
        let mut faces: Vec<usize> = middles.iter().flat_map(|&m| mesh.ring(m).faces.clone()).collect();
        faces.sort_unstable();
        faces.dedup();
        let mut corners: Vec<usize> = faces
            .iter()
            .flat_map(|&f| mesh.faces()[f].vertices.clone())
            .filter(|v| *v != t && !middles.contains(v))
            .collect();
        corners.sort_unstable();
        corners.dedup();
        if corners.len() != 3 {
            return None;
        }
        for &f in &faces {
            if owner[f] != usize::MAX {
                return None;
            }
            owner[f] = hats.len();
        }
        let mut internal_edges: Vec<usize> = faces
            .iter()
            .flat_map(|&f| mesh.faces()[f].edges.clone())
            .filter(|&e| {
                let [a, b] = mesh.edges()[e].endpoints;
                !(corners.contains(&a) && corners.contains(&b))
            })
            .collect();
        internal_edges.sort_unstable();
        internal_edges.dedup();
        hats.push(HatRegion {
            tip: t,
            middles,
            corners,
            faces,
            internal_edges,
        });
    }
    if hats.is_empty() || owner.contains(&usize::MAX) {
        return None;
    }
    Some(hats)
}

/// Closed-form angle sum at a middle vertex: `2α + (π − γ) + (π − 2β)`,
/// which for a basic hat (γ = 0) is `2α + 2(π − β)`.
pub fn middle_angle_sum(params: &HatParams) -> f64 {
    let (a, b, g) = (
        params.alpha().to_radians(),
        params.beta().to_radians(),
        params.gamma().to_radians(),
    );
    match params.kind() {
        HatKind::Basic => 2.0 * a + 2.0 * (PI - b),
        HatKind::Triangulated => 2.0 * a + (PI - g) + (PI - 2.0 * b),
    }
}
