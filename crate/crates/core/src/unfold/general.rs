use std::collections::VecDeque;

use nalgebra::Isometry2;
use serde::{Deserialize, Serialize};

use crate::constructions::{identify_hats, HatRegion};
use crate::geometry::{signed_area, P2, P3};
use crate::mesh::PolyhedronMesh;

use super::layout::match_segment;
use super::overlap::polygon_overlaps;
use super::{OverlapReport, UnfoldError};

/// Band strips cut across the brims. `width` is a fraction of the guide
/// edge; `skew` is the angle in degrees between band sides and the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    pub width: f64,
    pub skew: f64,
}

impl Default for BandParams {
    fn default() -> Self {
        BandParams {
            width: 0.05,
            skew: 75.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Brim,
    BrimLeft,
    Band,
    BrimRight,
    Spike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetPiece {
    pub face: usize,
    pub hat: usize,
    pub kind: PieceKind,
    /// Points on the surface, in the order of `polygon`.
    pub surface: Vec<P3>,
    pub polygon: Vec<P2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralNet {
    pub pieces: Vec<NetPiece>,
    /// `(child, parent)` piece pairs of the gluing tree.
    pub gluings: Vec<(usize, usize)>,
    pub band: BandParams,
    /// Guide edges cut to unfold the underlying tetrahedron, as corner pairs.
    pub guide_cuts: Vec<[usize; 2]>,
    /// Guide edge each hat's band runs to.
    pub band_edges: Vec<[usize; 2]>,
    /// Tip-to-middle edge left cut between spike triangles, per hat.
    pub spike_cuts: Vec<usize>,
    pub overlap: OverlapReport,
    pub area: f64,
    pub surface_area: f64,
}

impl GeneralNet {
    pub fn polygons(&self) -> Vec<Vec<P2>> {
        self.pieces.iter().map(|p| p.polygon.clone()).collect()
    }

    pub fn area_error(&self) -> f64 {
        (self.area - self.surface_area).abs() / self.surface_area
    }
}

struct Hat {
    region: HatRegion,
    /// Middle adjacent to each corner, indexed like `region.corners`.
    mid: Vec<usize>,
}

impl Hat {
    fn mid_of(&self, corner: usize) -> usize {
        let i = self.region.corners.iter().position(|&c| c == corner).expect("corner");
        self.mid[i]
    }

    fn has_edge(&self, e: [usize; 2]) -> bool {
        self.region.corners.contains(&e[0]) && self.region.corners.contains(&e[1])
    }
}

fn face_with(mesh: &PolyhedronMesh, hat: &HatRegion, vs: &[usize]) -> usize {
    *hat.faces
        .iter()
        .find(|&&f| vs.iter().all(|v| mesh.faces()[f].vertices.contains(v)))
        .expect("hat face")
}

/// Builds a general unfolding of a spiked tetrahedron made of basic hats.
/// The guide tetrahedron is cut along a Hamiltonian path; each hat's spike
/// leaves its brim through a skewed band and hangs off the partner copy of
/// one of its cut guide edges. Path, band edges and spike cuts are tried in
/// lexicographic order and the first overlap-free net is returned.
pub fn general_unfold_spiked_tetrahedron(mesh: &PolyhedronMesh, band: BandParams) -> Result<GeneralNet, UnfoldError> {
    if !(band.width > 0.0 && band.width.is_finite()) {
        return Err(UnfoldError::BandCollision("band width must be positive".into()));
    }
    if !(band.skew > 0.0 && band.skew < 180.0) {
        return Err(UnfoldError::BandCollision("band skew must lie in (0, 180)".into()));
    }
    let regions = identify_hats(mesh)
        .filter(|h| h.len() == 4 && mesh.is_closed())
        .ok_or_else(|| UnfoldError::UnsupportedMesh("not a spiked tetrahedron".into()))?;
    if regions
        .iter()
        .any(|h| h.faces.iter().filter(|&&f| mesh.faces()[f].len() == 4).count() != 3)
    {
        return Err(UnfoldError::UnsupportedMesh(
            "band unfolding needs basic hats with trapezoid brims".into(),
        ));
    }
    let hats: Vec<Hat> = regions
        .into_iter()
        .map(|region| {
            let mid = region
                .corners
                .iter()
                .map(|&c| {
                    *region
                        .middles
                        .iter()
                        .find(|&&m| mesh.edge_between(c, m).is_some())
                        .expect("corner has a middle")
                })
                .collect();
            Hat { region, mid }
        })
        .collect();
    let mut guide: Vec<usize> = hats.iter().flat_map(|h| h.region.corners.clone()).collect();
    guide.sort_unstable();
    guide.dedup();
    if guide.len() != 4 {
        return Err(UnfoldError::UnsupportedMesh("hats do not share four corners".into()));
    }

    let mut last = UnfoldError::BandCollision("no arrangement tried".into());
    for path in hamiltonian_paths(&guide) {
        let cuts: Vec<[usize; 2]> = path.windows(2).map(|w| [w[0].min(w[1]), w[0].max(w[1])]).collect();
        let options: Vec<Vec<[usize; 2]>> = hats
            .iter()
            .map(|h| cuts.iter().copied().filter(|&e| h.has_edge(e)).collect())
            .collect();
        for assignment in product(&options.iter().map(|o| o.len()).collect::<Vec<_>>()) {
            let band_edges: Vec<[usize; 2]> = assignment.iter().enumerate().map(|(h, &i)| options[h][i]).collect();
            let bands = match band_geometry(mesh, &hats, &band_edges, band) {
                Ok(b) => b,
                Err(e) => {
                    last = e;
                    continue;
                }
            };
            for spikes in product(&[3, 3, 3, 3]) {
                let net = assemble(mesh, &hats, &cuts, &band_edges, &bands, &spikes, band)?;
                if !net.overlap.is_overlapping() {
                    return Ok(net);
                }
                last = UnfoldError::BandCollision(format!(
                    "every arrangement overlaps; last max overlap area {:e}",
                    net.overlap.max_area
                ));
            }
        }
    }
    Err(last)
}

/// Hamiltonian paths of the complete graph on `v`, each listed once with
/// its first vertex smaller than its last, in lexicographic order.
fn hamiltonian_paths(v: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm = v.to_vec();
    permute(&mut perm, 0, &mut out);
    out.retain(|p| p[0] < p[p.len() - 1]);
    out.sort();
    out
}

fn permute(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, out);
        p.swap(k, i);
    }
}

/// Mixed-radix counting in lexicographic order.
fn product(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// One band on the surface.
struct Band {
    /// Guide corner the trapezoid bottom starts from, and where it ends.
    from: usize,
    to: usize,
    bottom: [P3; 2],
    top: [P3; 2],
    /// Bottom interval as distances from `from`.
    interval: (f64, f64),
}

fn band_geometry(
    mesh: &PolyhedronMesh,
    hats: &[Hat],
    band_edges: &[[usize; 2]],
    params: BandParams,
) -> Result<Vec<Band>, UnfoldError> {
    let mut bands = Vec::with_capacity(hats.len());
    for (hat, &[a, b]) in hats.iter().zip(band_edges) {
        let f = face_with(mesh, &hat.region, &[a, b]);
        let lp = &mesh.faces()[f].vertices;
        let ia = lp.iter().position(|&v| v == a).expect("corner in face");
        let (from, to) = if lp[(ia + 1) % lp.len()] == b { (a, b) } else { (b, a) };
        let (x, y) = (mesh.position(from), mesh.position(to));
        let mx = mesh.position(hat.mid_of(from));
        let my = mesh.position(hat.mid_of(to));
        let len = (y - x).norm();
        let top_len = (my - mx).norm();
        let u = (y - x) / len;
        let r = mx - x;
        let height = (r - u * r.dot(&u)).norm();
        let w = params.width * len;
        let shift = height / params.skew.to_radians().tan();
        let lo = len / 2.0 + shift - w / 2.0;
        let hi = len / 2.0 + shift + w / 2.0;
        let (tlo, thi) = (top_len / 2.0 - w / 2.0, top_len / 2.0 + w / 2.0);
        if lo <= 0.0 || hi >= len || tlo <= 0.0 || thi >= top_len {
            return Err(UnfoldError::BandCollision(
                "band does not fit inside its trapezoid".into(),
            ));
        }
        bands.push(Band {
            from,
            to,
            bottom: [x + u * lo, x + u * hi],
            top: [mx + u * tlo, mx + u * thi],
            interval: (lo, hi),
        });
    }
    for i in 0..bands.len() {
        for j in i + 1..bands.len() {
            let (p, q) = (&bands[i], &bands[j]);
            if [p.from.min(p.to), p.from.max(p.to)] != [q.from.min(q.to), q.from.max(q.to)] {
                continue;
            }
            let len = (mesh.position(p.to) - mesh.position(p.from)).norm();
            // Express q's interval from p's starting corner.
            let (qlo, qhi) = if q.from == p.from {
                q.interval
            } else {
                (len - q.interval.1, len - q.interval.0)
            };
            if qlo < p.interval.1 + 1e-9 * len && p.interval.0 < qhi + 1e-9 * len {
                return Err(UnfoldError::BandCollision(format!(
                    "bands of hats {i} and {j} meet on guide edge {}-{}",
                    p.from.min(p.to),
                    p.from.max(p.to)
                )));
            }
        }
    }
    Ok(bands)
}

struct Builder<'a> {
    mesh: &'a PolyhedronMesh,
    pieces: Vec<NetPiece>,
    glue: Vec<(usize, usize, P3, P3)>,
}

impl Builder<'_> {
    fn piece(&mut self, face: usize, hat: usize, kind: PieceKind, surface: Vec<P3>) -> usize {
        self.pieces.push(NetPiece {
            face,
            hat,
            kind,
            surface,
            polygon: Vec::new(),
        });
        self.pieces.len() - 1
    }

    fn whole(&mut self, face: usize, hat: usize, kind: PieceKind) -> usize {
        let pts = self.mesh.faces()[face]
            .vertices
            .iter()
            .map(|&v| self.mesh.position(v))
            .collect();
        self.piece(face, hat, kind, pts)
    }

    fn glue(&mut self, a: usize, b: usize, p: P3, q: P3) {
        self.glue.push((a, b, p, q));
    }
}

/// Pieces per hat: the banded trapezoid split in three, the two other
/// trapezoids, three spike triangles.
#[derive(Default, Clone)]
struct HatPieces {
    left: usize,
    band: usize,
    /// Whole trapezoid on each non-band guide edge, keyed by sorted corners.
    whole: Vec<([usize; 2], usize)>,
}

/// Whether segment `p q` lies along one side of the polygon.
fn shares_side(poly: &[P3], p: &P3, q: &P3) -> bool {
    let k = poly.len();
    (0..k).any(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % k]);
        let d = b - a;
        let scale = d.norm();
        let near = |x: &P3| {
            let t = (x - a).dot(&d) / d.norm_squared();
            (-1e-9..=1.0 + 1e-9).contains(&t) && (a + d * t - x).norm() <= 1e-9 * scale
        };
        near(p) && near(q)
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    mesh: &PolyhedronMesh,
    hats: &[Hat],
    cuts: &[[usize; 2]],
    band_edges: &[[usize; 2]],
    bands: &[Band],
    spikes: &[usize],
    params: BandParams,
) -> Result<GeneralNet, UnfoldError> {
    let mut b = Builder {
        mesh,
        pieces: Vec::new(),
        glue: Vec::new(),
    };
    let mut per_hat: Vec<HatPieces> = Vec::new();
    let mut spike_cuts = Vec::new();
    for (h, (hat, band)) in hats.iter().zip(bands).enumerate() {
        let (x, y) = (band.from, band.to);
        let z = *hat
            .region
            .corners
            .iter()
            .find(|&&c| c != x && c != y)
            .expect("third corner");
        let (mx, my, mz) = (hat.mid_of(x), hat.mid_of(y), hat.mid_of(z));
        let t = hat.region.tip;
        let p = |v: usize| mesh.position(v);
        let txy = face_with(mesh, &hat.region, &[x, y]);
        let left = b.piece(
            txy,
            h,
            PieceKind::BrimLeft,
            vec![p(x), band.bottom[0], band.top[0], p(mx)],
        );
        let bandp = b.piece(
            txy,
            h,
            PieceKind::Band,
            vec![band.bottom[0], band.bottom[1], band.top[1], band.top[0]],
        );
        let right = b.piece(
            txy,
            h,
            PieceKind::BrimRight,
            vec![band.bottom[1], p(y), p(my), band.top[1]],
        );
        let tyz = b.whole(face_with(mesh, &hat.region, &[y, z]), h, PieceKind::Brim);
        let tzx = b.whole(face_with(mesh, &hat.region, &[z, x]), h, PieceKind::Brim);
        b.glue(right, tyz, p(y), p(my));
        b.glue(tyz, tzx, p(z), p(mz));
        b.glue(tzx, left, p(x), p(mx));
        let s0 = b.whole(face_with(mesh, &hat.region, &[mx, my, t]), h, PieceKind::Spike);
        let s1 = b.whole(face_with(mesh, &hat.region, &[my, mz, t]), h, PieceKind::Spike);
        let s2 = b.whole(face_with(mesh, &hat.region, &[mz, mx, t]), h, PieceKind::Spike);
        b.glue(bandp, s0, band.top[0], band.top[1]);
        let cut_mid = match spikes[h] {
            0 => {
                b.glue(s0, s1, p(my), p(t));
                b.glue(s0, s2, p(mx), p(t));
                mz
            }
            1 => {
                b.glue(s0, s1, p(my), p(t));
                b.glue(s1, s2, p(mz), p(t));
                mx
            }
            _ => {
                b.glue(s0, s2, p(mx), p(t));
                b.glue(s2, s1, p(mz), p(t));
                my
            }
        };
        spike_cuts.push(mesh.edge_between(t, cut_mid).expect("spike edge"));
        let sorted = |a: usize, c: usize| [a.min(c), a.max(c)];
        per_hat.push(HatPieces {
            left,
            band: bandp,
            whole: vec![(sorted(y, z), tyz), (sorted(z, x), tzx)],
        });
    }

    // Hats meet across uncut guide edges through whole trapezoids.
    let all_edges: Vec<[usize; 2]> = {
        let mut g: Vec<usize> = hats.iter().flat_map(|h| h.region.corners.clone()).collect();
        g.sort_unstable();
        g.dedup();
        let mut e = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                e.push([g[i], g[j]]);
            }
        }
        e
    };
    let owners = |e: [usize; 2]| -> Vec<usize> { (0..hats.len()).filter(|&h| hats[h].has_edge(e)).collect() };
    let whole_on =
        |h: usize, e: [usize; 2]| -> Option<usize> { per_hat[h].whole.iter().find(|w| w.0 == e).map(|w| w.1) };
    for e in all_edges.iter().filter(|e| !cuts.contains(e)) {
        let o = owners(*e);
        let (p0, p1) = (mesh.position(e[0]), mesh.position(e[1]));
        let a = whole_on(o[0], *e).expect("uncut edge has whole trapezoids");
        let c = whole_on(o[1], *e).expect("uncut edge has whole trapezoids");
        b.glue(a, c, p0, p1);
    }
    // Each band hangs off the other hat's copy of its guide edge.
    for h in 0..hats.len() {
        let e = band_edges[h];
        let other = *owners(e).iter().find(|&&o| o != h).expect("edge has two hats");
        let target = if band_edges[other] == e {
            // Our interval sits on the partner's left piece (checked in
            // band_geometry).
            per_hat[other].left
        } else {
            whole_on(other, e).expect("partner trapezoid")
        };
        let band = &bands[h];
        b.glue(per_hat[h].band, target, band.bottom[0], band.bottom[1]);
    }

    let n = b.pieces.len();
    for &(i, j, p, q) in &b.glue {
        if !shares_side(&b.pieces[i].surface, &p, &q) || !shares_side(&b.pieces[j].surface, &p, &q) {
            return Err(UnfoldError::UnsupportedMesh(format!(
                "gluing of pieces {i} and {j} is not along a common side"
            )));
        }
    }
    if b.glue.len() + 1 != n {
        return Err(UnfoldError::UnsupportedMesh("gluing graph is not a tree".into()));
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, g) in b.glue.iter().enumerate() {
        adj[g.0].push((g.1, i));
        adj[g.1].push((g.0, i));
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut iso: Vec<Option<Isometry2<f64>>> = vec![None; n];
    iso[0] = Some(Isometry2::identity());
    let mut gluings = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(pc) = queue.pop_front() {
        for &(ch, gi) in &adj[pc] {
            if iso[ch].is_some() {
                continue;
            }
            let (_, _, p, q) = b.glue[gi];
            let fp = b.pieces[pc].face;
            let fc = b.pieces[ch].face;
            let ip = iso[pc].expect("parent placed");
            iso[ch] = Some(match_segment(
                mesh.to_chart(fc, &p),
                mesh.to_chart(fc, &q),
                ip * mesh.to_chart(fp, &p),
                ip * mesh.to_chart(fp, &q),
            ));
            gluings.push((ch, pc));
            queue.push_back(ch);
        }
    }
    if iso.iter().any(Option::is_none) {
        return Err(UnfoldError::UnsupportedMesh("gluing graph is disconnected".into()));
    }
    for (piece, is) in b.pieces.iter_mut().zip(&iso) {
        let is = is.expect("placed");
        piece.polygon = piece
            .surface
            .iter()
            .map(|s| is * mesh.to_chart(piece.face, s))
            .collect();
    }
    let polygons: Vec<Vec<P2>> = b.pieces.iter().map(|p| p.polygon.clone()).collect();
    let ids: Vec<usize> = (0..n).collect();
    let overlap = polygon_overlaps(&polygons, &ids);
    let area = polygons.iter().map(|p| signed_area(p)).sum();
    gluings.sort_unstable();
    Ok(GeneralNet {
        pieces: b.pieces,
        gluings,
        band: params,
        guide_cuts: cuts.to_vec(),
        band_edges: band_edges.to_vec(),
        spike_cuts,
        overlap,
        area,
        surface_area: mesh.surface_area(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_spiked_tetrahedron, BasicHatParams, HatParams, TriHatParams};

    fn spiked() -> PolyhedronMesh {
        build_spiked_tetrahedron(&HatParams::Basic(BasicHatParams::default())).unwrap()
    }

    #[test]
    fn default_net_is_overlap_free() {
        let m = spiked();
        let net = general_unfold_spiked_tetrahedron(&m, BandParams::default()).unwrap();
        assert_eq!(net.pieces.len(), 32);
        assert_eq!(net.gluings.len(), 31);
        assert!(!net.overlap.is_overlapping(), "{:?}", net.overlap);
        assert!(net.area_error() < 1e-9);
        assert_eq!(net.band_edges.len(), 4);
        for piece in &net.pieces {
            assert!(signed_area(&piece.polygon) > 0.0);
        }
    }

    #[test]
    fn perpendicular_bands_collide() {
        let m = spiked();
        let band = BandParams {
            width: 0.05,
            skew: 90.0,
        };
        assert!(matches!(
            general_unfold_spiked_tetrahedron(&m, band),
            Err(UnfoldError::BandCollision(_))
        ));
    }

    #[test]
    fn triangulated_hats_are_unsupported() {
        let m = build_spiked_tetrahedron(&HatParams::Triangulated(TriHatParams::default())).unwrap();
        assert!(matches!(
            general_unfold_spiked_tetrahedron(&m, BandParams::default()),
            Err(UnfoldError::UnsupportedMesh(_))
        ));
    }

    #[test]
    fn helpers() {
        assert_eq!(hamiltonian_paths(&[0, 1, 2, 3]).len(), 12);
        assert_eq!(product(&[2, 3]).len(), 6);
        assert_eq!(product(&[2, 3])[1], vec![0, 1]);
    }
}
