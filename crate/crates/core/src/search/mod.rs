//! Exhaustive enumeration of edge cuttings, ununfoldability verdicts and
//! symmetry orbits.

mod trees;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{identify_hats, HatRegion};
use crate::mesh::{build_mesh, curvatures, skeleton_graph, symmetry_group, Permutation, PolyhedronMesh};
use crate::unfold::{check_overlap, layout_unchecked, validate_cutting, Cutting, PlanarLayout, UnfoldError, FLAT_EPS};

pub use trees::{count_spanning_trees, for_each_spanning_tree, spanning_trees};
use trees::{mask_edges, TreeEnumerator, TreeState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("graph too large for the enumerator ({vertices} vertices, {edges} edges; limits 64 and 128)")]
    GraphTooLarge { vertices: usize, edges: usize },
    #[error("mode {mode} unsupported: {reason}")]
    ModeUnsupported { mode: EnumerationMode, reason: String },
    #[error("mesh is not a spiked solid")]
    NotASpikedSolid,
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnumerationMode {
    /// Every spanning tree of the skeleton (closed meshes).
    SpanningTrees,
    /// Every subset of non-boundary edges.
    AllInternalForests,
    /// Forests with at most `k_max` components (closed meshes).
    BoundedForests { k_max: usize },
}

impl EnumerationMode {
    pub fn name(&self) -> &'static str {
        match self {
            EnumerationMode::SpanningTrees => "spanning-trees",
            EnumerationMode::AllInternalForests => "all-internal-forests",
            EnumerationMode::BoundedForests { .. } => "bounded-forests",
        }
    }

    /// Spanning trees for closed meshes, all internal forests otherwise.
    pub fn default_for(mesh: &PolyhedronMesh) -> Self {
        if mesh.is_closed() {
            EnumerationMode::SpanningTrees
        } else {
            EnumerationMode::AllInternalForests
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnumerationMode {
    type Err = String;

    /// `spanning-trees`, `all-internal-forests`, `bounded-forests` or
    /// `bounded-forests:<k_max>` (default 2).
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "spanning-trees" => Ok(EnumerationMode::SpanningTrees),
            "all-internal-forests" => Ok(EnumerationMode::AllInternalForests),
            "bounded-forests" => Ok(EnumerationMode::BoundedForests { k_max: 2 }),
            _ => match s.strip_prefix("bounded-forests:").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 1 => Ok(EnumerationMode::BoundedForests { k_max: k }),
                _ => Err(format!("unknown enumeration mode {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub mode: EnumerationMode,
    pub workers: usize,
    /// Spanning-tree mode: stop after this many trees, taken in
    /// enumeration order.
    pub budget: Option<u64>,
    /// Forest modes refuse meshes whose candidate estimate exceeds this.
    pub forest_budget: u64,
    /// Stop once a non-overlapping cutting is found.
    pub early_exit: bool,
    /// Skip layout for spanning trees whose cut pattern at some vertex
    /// leaves a fan of faces with angle sum above 2π.
    pub fan_certificate: bool,
    /// Roughly one in this many certified trees is laid out anyway to
    /// cross-check the certificate (0 disables).
    pub cross_check_every: u64,
    /// Consistent cuttings and nets kept for orbit and congruence
    /// classification.
    pub collect_limit: usize,
    /// Bounded-forest mode: skip layout when some cut component encloses
    /// curvature that is not a multiple of 2π.
    pub gauss_bonnet_pruning: bool,
}

impl SearchOptions {
    pub fn new(mode: EnumerationMode) -> Self {
        SearchOptions {
            mode,
            workers: 1,
            budget: None,
            forest_budget: 200_000,
            early_exit: false,
            fan_certificate: true,
            cross_check_every: 1 << 20,
            collect_limit: 100_000,
            gauss_bonnet_pruning: true,
        }
    }

    pub fn for_mesh(mesh: &PolyhedronMesh) -> Self {
        SearchOptions::new(EnumerationMode::default_for(mesh))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EdgeUnunfoldable,
    EdgeUnfoldable,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::EdgeUnunfoldable => "edge-ununfoldable",
            Verdict::EdgeUnfoldable => "edge-unfoldable",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub closed: bool,
    pub boundary_edges: usize,
    pub euler_characteristic: i64,
}

impl MeshSummary {
    pub fn of(mesh: &PolyhedronMesh) -> Self {
        MeshSummary {
            vertices: mesh.vertex_count(),
            edges: mesh.edge_count(),
            faces: mesh.face_count(),
            closed: mesh.is_closed(),
            boundary_edges: mesh.boundary_edges().len(),
            euler_characteristic: mesh.euler_characteristic(),
        }
    }
}

/// Lexicographically smallest cutting seen in each outcome class.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Exemplars {
    pub inadmissible: Option<Vec<usize>>,
    pub inconsistent: Option<Vec<usize>>,
    pub overlapping: Option<Vec<usize>>,
    pub non_overlapping: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Lexicographically smallest image of the orbit under the symmetry group.
    pub representative: Vec<usize>,
    /// Number of the classified cuttings in this orbit.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub count: usize,
    pub orbits: Vec<Orbit>,
}

/// Consistent cuttings in which every negative-curvature vertex meets at
/// least two cut edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub cuttings: usize,
    pub orbits: OrbitSummary,
    pub all_overlap: bool,
    /// For a single hat: each is one path from a corner to the tip through
    /// every middle vertex.
    pub corner_to_tip_paths: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CertificateStats {
    pub certified_by_fan: u64,
    pub geometric_checks: u64,
    pub cross_checked: u64,
    pub cross_check_failures: u64,
}

/// Corner-to-corner paths over the enumerated trees of a spiked solid.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CornerToCorner {
    pub checked: u64,
    /// `hats_joined[k]`: trees in which exactly `k` hats have internal cuts
    /// joining two of their corners.
    pub hats_joined: Vec<u64>,
    /// Trees for which a non-overlapping layout implies that every hat is
    /// joined.
    pub implication_holds: u64,
}

impl CornerToCorner {
    fn add(&mut self, joined: usize, hats: usize, non_overlapping: bool) {
        if self.hats_joined.len() <= hats {
            self.hats_joined.resize(hats + 1, 0);
        }
        self.checked += 1;
        self.hats_joined[joined] += 1;
        self.implication_holds += u64::from(!non_overlapping || joined == hats);
    }

    fn merge(&mut self, o: &CornerToCorner) {
        if self.hats_joined.len() < o.hats_joined.len() {
            self.hats_joined.resize(o.hats_joined.len(), 0);
        }
        for (a, b) in self.hats_joined.iter_mut().zip(&o.hats_joined) {
            *a += b;
        }
        self.checked += o.checked;
        self.implication_holds += o.implication_holds;
    }
}

/// Exhaustive search over the internal edges of one hat cut out of a
/// spiked solid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatExhaustion {
    pub hat: usize,
    pub total_candidates: u64,
    pub admissible: u64,
    pub consistent: u64,
    pub non_overlapping: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
    pub candidates_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mesh: MeshSummary,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    pub verdict: Verdict,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub total_candidates: u64,
    /// Matrix-Tree count of the skeleton in spanning-tree mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_candidates: Option<String>,
    pub admissible: u64,
    pub consistent: u64,
    pub non_overlapping: u64,
    pub pruned_by_curvature: u64,
    pub exemplars: Exemplars,
    pub symmetry_order: usize,
    /// Orbits of the consistent cuttings, when few enough were kept.
    pub consistent_orbits: Option<OrbitSummary>,
    pub census: Option<Census>,
    /// Congruence classes among non-overlapping nets.
    pub distinct_nets: Option<usize>,
    pub certificate: CertificateStats,
    pub corner_to_corner: Option<CornerToCorner>,
    pub hat_exhaustion: Option<Vec<HatExhaustion>>,
    /// Wall-clock statistics; left out of serialized reports unless set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl SearchReport {
    /// non-overlapping ≤ consistent ≤ admissible ≤ total.
    pub fn funnel_ok(&self) -> bool {
        self.non_overlapping <= self.consistent
            && self.consistent <= self.admissible
            && self.admissible <= self.total_candidates
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Inadmissible,
    Inconsistent,
    Overlapping,
    NonOverlapping,
}

type Signature = Vec<Vec<(i64, i64)>>;

#[derive(Debug, Default)]
struct Tally {
    total: u64,
    admissible: u64,
    consistent: u64,
    non_overlapping: u64,
    pruned: u64,
    cert: CertificateStats,
    c2c: CornerToCorner,
    exemplars: Exemplars,
    /// Consistent cuttings with their overlap flag.
    consistent_cuts: Vec<(Vec<usize>, bool)>,
    nets: BTreeSet<Signature>,
}

fn keep_min(slot: &mut Option<Vec<usize>>, edges: &[usize]) {
    if slot.as_deref().is_none_or(|cur| edges < cur) {
        *slot = Some(edges.to_vec());
    }
}

fn merge_min(slot: &mut Option<Vec<usize>>, other: Option<Vec<usize>>) {
    if let Some(o) = other {
        keep_min(slot, &o);
    }
}

impl Tally {
    fn slot(&mut self, o: Outcome) -> &mut Option<Vec<usize>> {
        match o {
            Outcome::Inadmissible => &mut self.exemplars.inadmissible,
            Outcome::Inconsistent => &mut self.exemplars.inconsistent,
            Outcome::Overlapping => &mut self.exemplars.overlapping,
            Outcome::NonOverlapping => &mut self.exemplars.non_overlapping,
        }
    }

    fn absorb(&mut self, o: Outcome, edges: &[usize], layout: Option<&PlanarLayout>, limit: usize) {
        keep_min(self.slot(o), edges);
        if o == Outcome::Inadmissible {
            return;
        }
        self.admissible += 1;
        if o == Outcome::Inconsistent {
            return;
        }
        self.consistent += 1;
        self.keep_cut(edges, o == Outcome::Overlapping, limit);
        if o == Outcome::NonOverlapping {
            self.non_overlapping += 1;
            if self.non_overlapping as usize <= limit {
                if let Some(l) = layout {
                    self.nets.insert(l.congruence_signature());
                }
            } else {
                self.nets = BTreeSet::new();
            }
        }
    }

    /// Cuttings are kept only while the consistent count stays within
    /// `limit`; past it they could never be classified.
    fn keep_cut(&mut self, edges: &[usize], overlapping: bool, limit: usize) {
        if self.consistent as usize <= limit {
            self.consistent_cuts.push((edges.to_vec(), overlapping));
        } else {
            self.consistent_cuts = Vec::new();
        }
    }

    fn merge(&mut self, o: Tally, limit: usize) {
        self.total += o.total;
        self.admissible += o.admissible;
        self.consistent += o.consistent;
        self.non_overlapping += o.non_overlapping;
        self.pruned += o.pruned;
        self.cert.certified_by_fan += o.cert.certified_by_fan;
        self.cert.geometric_checks += o.cert.geometric_checks;
        self.cert.cross_checked += o.cert.cross_checked;
        self.cert.cross_check_failures += o.cert.cross_check_failures;
        self.c2c.merge(&o.c2c);
        merge_min(&mut self.exemplars.inadmissible, o.exemplars.inadmissible);
        merge_min(&mut self.exemplars.inconsistent, o.exemplars.inconsistent);
        merge_min(&mut self.exemplars.overlapping, o.exemplars.overlapping);
        merge_min(&mut self.exemplars.non_overlapping, o.exemplars.non_overlapping);
        if self.consistent as usize <= limit {
            self.consistent_cuts.extend(o.consistent_cuts);
        } else {
            self.consistent_cuts = Vec::new();
        }
        if self.non_overlapping as usize <= limit {
            self.nets.extend(o.nets);
        } else {
            self.nets = BTreeSet::new();
        }
    }
}

struct Context<'a> {
    mesh: &'a PolyhedronMesh,
    opts: &'a SearchOptions,
    curv: Vec<Option<f64>>,
}

impl Context<'_> {
    fn classify(&self, cutting: &Cutting, tally: &mut Tally) -> Result<(Outcome, Option<PlanarLayout>), SearchError> {
        let validity = validate_cutting(self.mesh, cutting)?;
        if !validity.admissible() {
            return Ok((Outcome::Inadmissible, None));
        }
        if matches!(self.opts.mode, EnumerationMode::BoundedForests { .. })
            && self.opts.gauss_bonnet_pruning
            && !self.holonomy_may_vanish(cutting)
        {
            tally.pruned += 1;
            return Ok((Outcome::Inconsistent, None));
        }
        tally.cert.geometric_checks += 1;
        let l = layout_unchecked(self.mesh, cutting)?;
        if !l.consistency_ok {
            return Ok((Outcome::Inconsistent, Some(l)));
        }
        let overlap = check_overlap(&l)?;
        let o = if overlap.is_overlapping() {
            Outcome::Overlapping
        } else {
            Outcome::NonOverlapping
        };
        Ok((o, Some(l)))
    }

    /// Rotational holonomy around a cut component is its enclosed
    /// curvature, so a consistent layout needs every component's total
    /// curvature to be a multiple of 2π.
    fn holonomy_may_vanish(&self, cutting: &Cutting) -> bool {
        let n = self.mesh.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut touched = vec![false; n];
        for &e in cutting.edges() {
            let [a, b] = self.mesh.edges()[e].endpoints;
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for v in (0..n).filter(|&v| touched[v]) {
            let r = find(&mut parent, v);
            *sums.entry(r).or_default() += self.curv[v].unwrap_or(0.0);
        }
        let tau = std::f64::consts::TAU;
        sums.values().all(|k| (k - tau * (k / tau).round()).abs() <= 1e-6)
    }

    fn run_cutting(&self, edges: &[usize], tally: &mut Tally) -> Result<(), SearchError> {
        let cutting = Cutting::new(edges.to_vec());
        tally.total += 1;
        let (o, l) = self.classify(&cutting, tally)?;
        tally.absorb(o, cutting.edges(), l.as_ref(), self.opts.collect_limit);
        Ok(())
    }
}

/// Processes chunks in fixed-size batches so early exit stops at the same
/// point whatever the worker count.
fn run_chunks<C: Sync>(
    opts: &SearchOptions,
    chunks: &[C],
    work: impl Fn(&C) -> Result<Tally, SearchError> + Sync,
) -> Result<(Tally, bool), SearchError> {
    const BATCH: usize = 64;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let mut total = Tally::default();
    let mut stopped = false;
    for batch in chunks.chunks(BATCH) {
        let parts: Vec<Result<Tally, SearchError>> = pool.install(|| batch.par_iter().map(&work).collect());
        for p in parts {
            total.merge(p?, opts.collect_limit);
        }
        if opts.early_exit && total.non_overlapping > 0 {
            stopped = true;
            break;
        }
    }
    Ok((total, stopped))
}

fn sampled(mask: u128, every: u64) -> bool {
    if every == 0 {
        return false;
    }
    let mut z = (mask as u64) ^ ((mask >> 64) as u64).rotate_left(29) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z.is_multiple_of(every)
}

/// Over-2π fan table for each vertex whose angle sum exceeds 2π: bit
/// pattern over the vertex's ring edges to whether some fan between
/// consecutive cut edges has angle sum above 2π.
fn fan_tables(mesh: &PolyhedronMesh) -> Vec<(usize, Vec<bool>)> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::new();
    for v in 0..mesh.vertex_count() {
        let ring = mesh.ring(v);
        let d = ring.edges.len();
        if !ring.closed || d > 16 {
            continue;
        }
        let angles: Vec<f64> = ring
            .faces
            .iter()
            .map(|&f| mesh.face_angle(f, v).expect("face at vertex"))
            .collect();
        if angles.iter().sum::<f64>() <= tau + 1e-9 {
            continue;
        }
        let mut table = vec![false; 1 << d];
        for (p, slot) in table.iter_mut().enumerate().skip(1) {
            let cuts: Vec<usize> = (0..d).filter(|i| p >> i & 1 == 1).collect();
            *slot = cuts.iter().enumerate().any(|(k, &i)| {
                let j = cuts[(k + 1) % cuts.len()];
                let len = if j > i { j - i } else { j + d - i };
                (0..len).map(|s| angles[(i + s) % d]).sum::<f64>() > tau + 1e-9
            });
        }
        out.push((v, table));
    }
    out
}

/// Whether the cut edges among `edges` connect at least two of `corners`,
/// for every subset of `edges` given as a bit pattern.
fn corner_table(mesh: &PolyhedronMesh, hat: &HatRegion) -> Vec<bool> {
    let k = hat.internal_edges.len();
    (0..1usize << k)
        .map(|p| {
            let cut: Vec<usize> = (0..k)
                .filter(|i| p >> i & 1 == 1)
                .map(|i| hat.internal_edges[i])
                .collect();
            corners_joined(mesh, hat, &cut)
        })
        .collect()
}

fn corners_joined(mesh: &PolyhedronMesh, hat: &HatRegion, cut: &[usize]) -> bool {
    let n = mesh.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for &e in cut {
        let [a, b] = mesh.edges()[e].endpoints;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let roots: Vec<usize> = hat.corners.iter().map(|&c| find(&mut parent, c)).collect();
    roots[0] == roots[1] || roots[0] == roots[2] || roots[1] == roots[2]
}

/// For each hat of a spiked solid, whether the cutting restricted to that
/// hat's internal edges joins two of its corners.
pub fn check_corner_to_corner(mesh: &PolyhedronMesh, cutting: &Cutting) -> Result<Vec<bool>, SearchError> {
    let hats = spiked_hats(mesh).ok_or(SearchError::NotASpikedSolid)?;
    Ok(hats
        .iter()
        .map(|h| {
            let cut: Vec<usize> = cutting
                .edges()
                .iter()
                .copied()
                .filter(|e| h.internal_edges.binary_search(e).is_ok())
                .collect();
            corners_joined(mesh, h, &cut)
        })
        .collect())
}

fn spiked_hats(mesh: &PolyhedronMesh) -> Option<Vec<HatRegion>> {
    if !mesh.is_closed() {
        return None;
    }
    identify_hats(mesh).filter(|h| h.len() >= 4)
}

/// Partition of `cuttings` under the mesh's symmetry group, ordered by
/// representative.
pub fn orbit_classes(mesh: &PolyhedronMesh, cuttings: &[Cutting]) -> Vec<Orbit> {
    orbits_under(mesh, &symmetry_group(mesh), cuttings.iter().map(|c| c.edges()))
}

fn edge_permutations(mesh: &PolyhedronMesh, group: &[Permutation]) -> Vec<Vec<usize>> {
    group
        .iter()
        .map(|p| {
            mesh.edges()
                .iter()
                .map(|e| {
                    let [a, b] = e.endpoints;
                    mesh.edge_between(p[a], p[b]).expect("automorphism maps edges to edges")
                })
                .collect()
        })
        .collect()
}

fn orbits_under<'a>(
    mesh: &PolyhedronMesh,
    group: &[Permutation],
    cuttings: impl Iterator<Item = &'a [usize]>,
) -> Vec<Orbit> {
    let perms = edge_permutations(mesh, group);
    let mut orbits: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in cuttings {
        let canonical = perms
            .iter()
            .map(|p| {
                let mut img: Vec<usize> = c.iter().map(|&e| p[e]).collect();
                img.sort_unstable();
                img
            })
            .min()
            .unwrap_or_else(|| c.to_vec());
        *orbits.entry(canonical).or_default() += 1;
    }
    orbits
        .into_iter()
        .map(|(representative, size)| Orbit { representative, size })
        .collect()
}

fn summarize(orbits: Vec<Orbit>) -> OrbitSummary {
    OrbitSummary {
        count: orbits.len(),
        orbits,
    }
}

/// Whether the cut edges form one simple path from a corner of `hat` to
/// its tip that visits every middle vertex.
fn is_corner_to_tip_path(mesh: &PolyhedronMesh, hat: &HatRegion, cut: &[usize]) -> bool {
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for &e in cut {
        for v in mesh.edges()[e].endpoints {
            *degree.entry(v).or_default() += 1;
        }
    }
    let ends: Vec<usize> = degree.iter().filter(|x| *x.1 == 1).map(|x| *x.0).collect();
    let simple = degree.values().all(|&d| d <= 2) && ends.len() == 2 && degree.len() == cut.len() + 1;
    let from_corner = ends.iter().any(|v| hat.corners.contains(v));
    simple
        && from_corner
        && ends.contains(&hat.tip)
        && hat.middles.iter().all(|m| degree.contains_key(m))
        && degree.keys().filter(|v| hat.corners.contains(v)).count() == 1
}

fn census(
    mesh: &PolyhedronMesh,
    group: &[Permutation],
    curv: &[Option<f64>],
    consistent: &[(Vec<usize>, bool)],
) -> Census {
    let negative: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&v| curv[v].is_some_and(|k| k < -FLAT_EPS))
        .collect();
    let members: Vec<&(Vec<usize>, bool)> = consistent
        .iter()
        .filter(|(cut, _)| {
            negative
                .iter()
                .all(|&v| cut.iter().filter(|&&e| mesh.edges()[e].endpoints.contains(&v)).count() >= 2)
        })
        .collect();
    let hat = identify_hats(mesh).filter(|h| h.len() == 1 && !mesh.is_closed());
    Census {
        cuttings: members.len(),
        orbits: summarize(orbits_under(mesh, group, members.iter().map(|m| m.0.as_slice()))),
        all_overlap: members.iter().all(|m| m.1),
        corner_to_tip_paths: hat.map(|h| members.iter().all(|m| is_corner_to_tip_path(mesh, &h[0], &m.0))),
    }
}

/// The faces of one hat as a mesh of its own.
fn hat_submesh(mesh: &PolyhedronMesh, hat: &HatRegion) -> Result<PolyhedronMesh, SearchError> {
    let mut index = BTreeMap::new();
    let mut positions = Vec::new();
    let mut loops = Vec::new();
    for &f in &hat.faces {
        let lp = mesh.faces()[f]
            .vertices
            .iter()
            .map(|&v| {
                *index.entry(v).or_insert_with(|| {
                    positions.push(mesh.position(v));
                    positions.len() - 1
                })
            })
            .collect();
        loops.push(lp);
    }
    build_mesh(&positions, &loops).map_err(|e| SearchError::Unfold(UnfoldError::UnsupportedMesh(e.to_string())))
}

/// All cuttings of the mode's candidate class that pass the admissibility
/// tests, in enumeration order.
pub fn enumerate_admissible_cuttings(
    mesh: &PolyhedronMesh,
    mode: EnumerationMode,
) -> Result<Vec<Cutting>, SearchError> {
    let opts = SearchOptions::new(mode);
    let mut out = Vec::new();
    for edges in candidates(mesh, &opts)? {
        let c = Cutting::new(edges);
        if validate_cutting(mesh, &c)?.admissible() {
            out.push(c);
        }
    }
    Ok(out)
}

/// Candidate edge sets of the forest modes and of small spanning-tree runs.
fn candidates(mesh: &PolyhedronMesh, opts: &SearchOptions) -> Result<Vec<Vec<usize>>, SearchError> {
    let unsupported = |reason: String| SearchError::ModeUnsupported {
        mode: opts.mode,
        reason,
    };
    match opts.mode {
        EnumerationMode::SpanningTrees => {
            if !mesh.is_closed() {
                return Err(unsupported("mesh has a boundary".into()));
            }
            spanning_trees(&skeleton_graph(mesh))
        }
        EnumerationMode::AllInternalForests => {
            let internal = mesh.interior_edges();
            let k = internal.len();
            if k >= 63 || 1u64 << k > opts.forest_budget {
                return Err(unsupported(format!(
                    "2^{k} subsets exceed the forest budget of {}",
                    opts.forest_budget
                )));
            }
            Ok((0u64..1 << k)
                .map(|s| (0..k).filter(|i| s >> i & 1 == 1).map(|i| internal[i]).collect())
                .collect())
        }
        EnumerationMode::BoundedForests { k_max } => {
            if !mesh.is_closed() {
                return Err(unsupported("mesh has a boundary".into()));
            }
            let n = mesh.vertex_count();
            let m = mesh.edge_count();
            let required = curvatures(mesh)
                .iter()
                .filter(|k| k.is_some_and(|k| k.abs() > FLAT_EPS))
                .count();
            let min_size = required.saturating_sub(k_max);
            let estimate: f64 = (min_size..n).map(|s| binomial(m, s)).sum();
            if estimate > opts.forest_budget as f64 {
                return Err(unsupported(format!(
                    "about {estimate:.3e} candidates exceed the forest budget of {}",
                    opts.forest_budget
                )));
            }
            let mut out = Vec::new();
            let mut label: Vec<usize> = (0..n).collect();
            let mut cur = Vec::new();
            forests(mesh, 0, min_size, &mut label, &mut cur, &mut out);
            Ok(out)
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Forests with between `min_size` and V−1 edges, in lexicographic order.
fn forests(
    mesh: &PolyhedronMesh,
    d: usize,
    min_size: usize,
    label: &mut Vec<usize>,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let m = mesh.edge_count();
    if cur.len() + (m - d) < min_size {
        return;
    }
    if d == m {
        out.push(cur.clone());
        return;
    }
    let [a, b] = mesh.edges()[d].endpoints;
    if label[a] != label[b] && cur.len() + 1 < mesh.vertex_count() {
        let saved = label.clone();
        let (from, to) = (label[b], label[a]);
        for l in label.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
        cur.push(d);
        forests(mesh, d + 1, min_size, label, cur, out);
        cur.pop();
        *label = saved;
    }
    forests(mesh, d + 1, min_size, label, cur, out);
}

/// Runs the requested enumeration, lays out every admissible candidate and
/// checks it for overlap.
pub fn search_edge_unfolding(mesh: &PolyhedronMesh, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let start = Instant::now();
    let ctx = Context {
        mesh,
        opts,
        curv: curvatures(mesh),
    };
    let mut expected = None;
    let mut covered_all = true;
    let mut note = None;
    let (tally, stopped) = match opts.mode {
        EnumerationMode::SpanningTrees if mesh.is_closed() => {
            let (t, s, exp, all) = spanning_search(&ctx)?;
            expected = Some(exp.clone());
            covered_all = all;
            if !all {
                note = Some(format!(
                    "deterministic prefix: first {} of {exp} spanning trees in lexicographic order",
                    t.total
                ));
            }
            (t, s)
        }
        _ => {
            let cands = candidates(mesh, opts)?;
            let chunks: Vec<&[Vec<usize>]> = cands.chunks(256).collect();
            run_chunks(opts, &chunks, |chunk| {
                let mut t = Tally::default();
                for edges in chunk.iter() {
                    ctx.run_cutting(edges, &mut t)?;
                    if opts.early_exit && t.non_overlapping > 0 {
                        break;
                    }
                }
                Ok(t)
            })?
        }
    };
    if stopped {
        note = Some("stopped at the first non-overlapping cutting".into());
    }
    let exhaustive = covered_all && !stopped;
    let verdict = if tally.non_overlapping > 0 {
        Verdict::EdgeUnfoldable
    } else if exhaustive {
        Verdict::EdgeUnunfoldable
    } else {
        Verdict::Undetermined
    };
    let group = symmetry_group(mesh);
    let limit = opts.collect_limit;
    let (consistent_orbits, census_report) = if tally.consistent as usize <= limit {
        let mut cuts = tally.consistent_cuts.clone();
        cuts.sort();
        (
            Some(summarize(orbits_under(
                mesh,
                &group,
                cuts.iter().map(|c| c.0.as_slice()),
            ))),
            Some(census(mesh, &group, &ctx.curv, &cuts)),
        )
    } else {
        (None, None)
    };
    let distinct_nets = (tally.non_overlapping as usize <= limit).then_some(tally.nets.len());
    let hats = spiked_hats(mesh);
    let corner_to_corner = hats
        .as_ref()
        .filter(|_| opts.mode == EnumerationMode::SpanningTrees)
        .map(|_| tally.c2c.clone());
    let hat_exhaustion = match (&hats, covered_all) {
        (Some(hats), false) => Some(exhaust_hats(mesh, hats, opts)?),
        _ => None,
    };
    let seconds = start.elapsed().as_secs_f64();
    Ok(SearchReport {
        mesh: MeshSummary::of(mesh),
        mode: opts.mode.name().to_string(),
        k_max: match opts.mode {
            EnumerationMode::BoundedForests { k_max } => Some(k_max),
            _ => None,
        },
        verdict,
        exhaustive,
        note,
        total_candidates: tally.total,
        expected_candidates: expected,
        admissible: tally.admissible,
        consistent: tally.consistent,
        non_overlapping: tally.non_overlapping,
        pruned_by_curvature: tally.pruned,
        exemplars: tally.exemplars,
        symmetry_order: group.len(),
        consistent_orbits,
        census: census_report,
        distinct_nets,
        certificate: tally.cert,
        corner_to_corner,
        hat_exhaustion,
        timing: Some(Timing {
            seconds,
            candidates_per_second: tally.total as f64 / seconds.max(1e-9),
        }),
    })
}

fn exhaust_hats(
    mesh: &PolyhedronMesh,
    hats: &[HatRegion],
    opts: &SearchOptions,
) -> Result<Vec<HatExhaustion>, SearchError> {
    hats.iter()
        .enumerate()
        .map(|(i, h)| {
            let sub = hat_submesh(mesh, h)?;
            let mut o = SearchOptions::new(EnumerationMode::AllInternalForests);
            o.workers = opts.workers;
            o.forest_budget = opts.forest_budget.max(1 << 16);
            let r = search_edge_unfolding(&sub, &o)?;
            Ok(HatExhaustion {
                hat: i,
                total_candidates: r.total_candidates,
                admissible: r.admissible,
                consistent: r.consistent,
                non_overlapping: r.non_overlapping,
            })
        })
        .collect()
}

/// Spanning-tree search over a closed mesh. Returns the tally, whether it
/// stopped early, the Matrix-Tree count, and whether every tree was covered.
fn spanning_search(ctx: &Context) -> Result<(Tally, bool, String, bool), SearchError> {
    let mesh = ctx.mesh;
    let opts = ctx.opts;
    let graph = skeleton_graph(mesh);
    let expected = count_spanning_trees(&graph)?;
    let genus_zero = mesh.genus().is_ok_and(|g| g == 0);

    // Pattern groups: first the fan tables, then one per hat.
    let fans = if opts.fan_certificate && genus_zero {
        fan_tables(mesh)
    } else {
        Vec::new()
    };
    let hats = spiked_hats(mesh).unwrap_or_default();
    let mut tags: Vec<Vec<(usize, u32)>> = vec![Vec::new(); mesh.edge_count()];
    for (g, (v, _)) in fans.iter().enumerate() {
        for (i, &e) in mesh.ring(*v).edges.iter().enumerate() {
            tags[e].push((g, 1 << i));
        }
    }
    let corner_tables: Vec<Vec<bool>> = hats.iter().map(|h| corner_table(mesh, h)).collect();
    for (h, hat) in hats.iter().enumerate() {
        for (i, &e) in hat.internal_edges.iter().enumerate() {
            tags[e].push((fans.len() + h, 1 << i));
        }
    }
    let en = TreeEnumerator::new(&graph, &tags).map_err(|e| match e {
        SearchError::GraphTooLarge { .. } => SearchError::ModeUnsupported {
            mode: opts.mode,
            reason: e.to_string(),
        },
        e => e,
    })?;
    let (depth, prefixes) = en.split(1024);
    let mut chunks: Vec<(u128, Option<u64>)> = Vec::new();
    let mut covered_all = true;
    match opts.budget {
        None => chunks.extend(prefixes.iter().map(|&p| (p, None))),
        Some(budget) => {
            let mut used: u128 = 0;
            for &p in &prefixes {
                let c = en.prefix_count(p, depth);
                let left = budget as u128 - used;
                if left == 0 {
                    covered_all = false;
                    break;
                }
                if c > left {
                    chunks.push((p, Some(left as u64)));
                    covered_all = false;
                    break;
                }
                chunks.push((p, None));
                used += c;
            }
        }
    }
    let fan_count = fans.len();
    let visits = opts
        .budget
        .map_or(expected.clone(), |b| expected.clone().min(BigUint::from(b)));
    let limit = if visits <= BigUint::from(opts.collect_limit) {
        opts.collect_limit
    } else {
        0
    };
    let leaf = |s: &TreeState, t: &mut Tally| -> Result<(), SearchError> {
        t.total += 1;
        let joined = corner_tables
            .iter()
            .enumerate()
            .filter(|(h, table)| table[s.patterns[fan_count + h] as usize])
            .count();
        let certified = fans
            .iter()
            .enumerate()
            .any(|(g, (_, table))| table[s.patterns[g] as usize]);
        if certified {
            t.cert.certified_by_fan += 1;
            if !sampled(s.mask, opts.cross_check_every) {
                // A spanning tree of a genus-0 surface is admissible and
                // lays out consistently; the over-2π fan forces overlap.
                if !corner_tables.is_empty() {
                    t.c2c.add(joined, corner_tables.len(), false);
                }
                t.admissible += 1;
                t.consistent += 1;
                if t.exemplars.overlapping.is_none() {
                    t.exemplars.overlapping = Some(mask_edges(s.mask).collect());
                }
                if t.consistent as usize <= limit {
                    t.consistent_cuts.push((mask_edges(s.mask).collect(), true));
                } else if !t.consistent_cuts.is_empty() {
                    t.consistent_cuts = Vec::new();
                }
                return Ok(());
            }
        }
        let cutting = Cutting::new(mask_edges(s.mask).collect());
        let (o, l) = ctx.classify(&cutting, t)?;
        if !corner_tables.is_empty() {
            t.c2c.add(joined, corner_tables.len(), o == Outcome::NonOverlapping);
        }
        if certified {
            t.cert.cross_checked += 1;
            if o != Outcome::Overlapping {
                t.cert.cross_check_failures += 1;
            }
        }
        t.absorb(o, cutting.edges(), l.as_ref(), limit);
        Ok(())
    };
    let (tally, stopped) = run_chunks(opts, &chunks, |&(prefix, cap)| {
        let mut t = Tally::default();
        let mut err = None;
        let mut st = en.state_with(prefix);
        let _ = en.descend(&mut st, depth, &mut |s: &TreeState| {
            if let Err(e) = leaf(s, &mut t) {
                err = Some(e);
                return ControlFlow::Break(());
            }
            if cap.is_some_and(|c| t.total >= c) || (opts.early_exit && t.non_overlapping > 0) {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        match err {
            Some(e) => Err(e),
            None => Ok(t),
        }
    })?;
    Ok((tally, stopped, expected.to_string(), covered_all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_basic_hat, build_open_fan, build_reference, BasicHatParams, FanParams, ReferenceSolid,
    };

    #[test]
    fn mode_names_round_trip() {
        for m in [
            EnumerationMode::SpanningTrees,
            EnumerationMode::AllInternalForests,
            EnumerationMode::BoundedForests { k_max: 2 },
        ] {
            assert_eq!(m.name().parse::<EnumerationMode>().unwrap(), m);
        }
        assert_eq!(
            "bounded-forests:3".parse::<EnumerationMode>().unwrap(),
            EnumerationMode::BoundedForests { k_max: 3 }
        );
        assert!("trees".parse::<EnumerationMode>().is_err());
    }

    #[test]
    fn tetrahedron_all_trees_unfold() {
        let m = build_reference(ReferenceSolid::Tetrahedron);
        let r = search_edge_unfolding(&m, &SearchOptions::for_mesh(&m)).unwrap();
        assert_eq!(r.total_candidates, 16);
        assert_eq!(r.non_overlapping, 16);
        assert_eq!(r.expected_candidates.as_deref(), Some("16"));
        assert_eq!(r.verdict, Verdict::EdgeUnfoldable);
        assert_eq!(r.distinct_nets, Some(2));
        assert!(r.funnel_ok());
    }

    #[test]
    fn cube_has_eleven_nets() {
        let m = build_reference(ReferenceSolid::Cube);
        let r = search_edge_unfolding(&m, &SearchOptions::for_mesh(&m)).unwrap();
        assert_eq!(r.non_overlapping, 384);
        assert_eq!(r.distinct_nets, Some(11));
        assert_eq!(r.consistent_orbits.unwrap().count, 11);
        assert_eq!(r.symmetry_order, 48);
    }

    #[test]
    fn early_exit_stops() {
        let m = build_reference(ReferenceSolid::Cube);
        let mut o = SearchOptions::for_mesh(&m);
        o.early_exit = true;
        let r = search_edge_unfolding(&m, &o).unwrap();
        assert!(r.non_overlapping >= 1);
        assert!(!r.exhaustive);
        assert_eq!(r.verdict, Verdict::EdgeUnfoldable);
    }

    #[test]
    fn budget_takes_a_lexicographic_prefix() {
        let m = build_reference(ReferenceSolid::Cube);
        let mut o = SearchOptions::for_mesh(&m);
        o.budget = Some(100);
        let r = search_edge_unfolding(&m, &o).unwrap();
        assert_eq!(r.total_candidates, 100);
        assert!(!r.exhaustive);
        assert!(r.note.is_some());
        let first = spanning_trees(&skeleton_graph(&m)).unwrap()[0].clone();
        assert_eq!(r.exemplars.non_overlapping, Some(first));
    }

    #[test]
    fn fan_single_spokes() {
        let m = build_open_fan(&FanParams::default()).unwrap();
        let adm = enumerate_admissible_cuttings(&m, EnumerationMode::AllInternalForests).unwrap();
        assert_eq!(adm.len(), 8);
        assert!(adm.iter().all(|c| c.len() == 1));
        assert_eq!(orbit_classes(&m, &adm).len(), 1);
    }

    #[test]
    fn spanning_mode_needs_closed_mesh() {
        let m = build_basic_hat(&BasicHatParams::default()).unwrap();
        let e = search_edge_unfolding(&m, &SearchOptions::new(EnumerationMode::SpanningTrees));
        assert!(matches!(e, Err(SearchError::ModeUnsupported { .. })));
        assert!(matches!(
            check_corner_to_corner(&m, &Cutting::empty()),
            Err(SearchError::NotASpikedSolid)
        ));
    }

    #[test]
    fn cube_forests_consistent_only_when_trees() {
        let m = build_reference(ReferenceSolid::Cube);
        let r = search_edge_unfolding(&m, &SearchOptions::new(EnumerationMode::BoundedForests { k_max: 2 })).unwrap();
        assert_eq!(r.consistent, 384);
        assert_eq!(r.non_overlapping, 384);
        assert!(r.admissible > r.consistent);
        assert!(r.funnel_ok());
    }

    #[test]
    fn fan_table_marks_single_cut_at_saddle() {
        let m = crate::constructions::build_spiked_tetrahedron(&crate::constructions::HatParams::default_for(
            crate::constructions::HatKind::Basic,
        ))
        .unwrap();
        let tables = fan_tables(&m);
        assert_eq!(tables.len(), 12);
        for (_, t) in &tables {
            assert!(!t[0]);
            for i in 0..4 {
                assert!(t[1 << i]);
            }
        }
    }
}
