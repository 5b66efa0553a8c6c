use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ununfold::constructions::{
    build_hat, build_open_fan, build_reference, build_spiked, identify_hats, BasicHatParams, FanParams, GuideSolid,
    HatParams, ReferenceSolid, TriHatParams,
};
use ununfold::io::{
    read_config, read_obj_with, report_json, write_net_json, write_obj, write_report, write_svg, NetDrawing,
};
use ununfold::mesh::{
    angle_sum, check_embedded, curvatures, is_topologically_convex, skeleton_graph, symmetry_group, total_curvature,
    PolyhedronMesh, Tolerances,
};
use ununfold::search::{count_spanning_trees, search_edge_unfolding, EnumerationMode, SearchOptions};
use ununfold::unfold::{
    check_overlap, general_unfold_spiked_tetrahedron, layout, sample_fan_general_cuts, unfold_fan_single_general_cut,
    BandParams, Cutting,
};
use ununfold::Error;

#[derive(Parser)]
#[command(
    name = "ununfold",
    version,
    about = "Build spiked polyhedra, search their edge unfoldings and draw nets"
)]
struct Cli {
    /// key=value file giving defaults for any long option
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a construction and write it as OBJ
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print topology, curvature and symmetry of a mesh
    Inspect {
        #[command(flatten)]
        source: Source,
        /// Unfold a fan along this many random general cuts
        #[arg(long)]
        sample_cuts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search edge cuttings and print a JSON report with the verdict
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall-clock statistics in the report
        #[arg(long)]
        timing: bool,
    },
    /// Lay out a net and write it as SVG, or as JSON for a .json output
    Net {
        #[command(flatten)]
        source: Source,
        /// Edge ids to cut, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        cut: Option<Vec<usize>>,
        /// General unfolding of a spiked tetrahedron
        #[arg(long)]
        general: bool,
        /// First non-overlapping edge unfolding in enumeration order
        #[arg(long)]
        first_found: bool,
        /// Straight cut from a fan's center, degrees from its first spoke
        #[arg(long, allow_negative_numbers = true)]
        cut_direction: Option<f64>,
        /// Band width as a fraction of the guide edge
        #[arg(long)]
        band_width: Option<f64>,
        /// Band skew in degrees
        #[arg(long)]
        band_skew: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count spanning trees of the skeleton (Matrix-Tree theorem)
    CountTrees {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    Hat,
    SpikedTetrahedron,
    SpikedOctahedron,
    Fan,
    Tetrahedron,
    Cube,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Basic,
    Triangulated,
}

#[derive(Args, Debug, Default)]
struct Source {
    /// Construction to build (or give --mesh)
    #[arg(value_enum)]
    construction: Option<Construction>,
    /// Read the mesh from an OBJ file
    #[arg(long, conflicts_with = "construction")]
    mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Spike apex angle, degrees
    #[arg(long)]
    alpha: Option<f64>,
    /// Spike base angle, degrees
    #[arg(long)]
    beta: Option<f64>,
    /// Basic hat boundary side
    #[arg(long)]
    ell: Option<f64>,
    /// Triangulated hat apex angle at the middles, degrees
    #[arg(long)]
    gamma: Option<f64>,
    /// Fan triangle count
    #[arg(long)]
    n: Option<usize>,
    /// Fan apex angle, degrees
    #[arg(long)]
    apex: Option<f64>,
    /// Fan leg length
    #[arg(long)]
    leg: Option<f64>,
    /// Accept a basic hat whose brim lies flat
    #[arg(long)]
    allow_flat: bool,
    /// Face planarity tolerance, relative to the mesh diameter
    #[arg(long)]
    plane_tol: Option<f64>,
    /// Convexity tolerance, radians
    #[arg(long)]
    angle_tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct SearchArgs {
    /// spanning-trees, all-internal-forests, bounded-forests[:k_max]
    #[arg(long)]
    mode: Option<String>,
    /// Spanning-tree mode: process only this many trees
    #[arg(long)]
    budget: Option<u64>,
    /// Forest modes: refuse meshes with more candidates than this
    #[arg(long)]
    forest_budget: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Stop at the first non-overlapping cutting
    #[arg(long)]
    early_exit: bool,
    /// Lay out every tree instead of using the over-2π fan certificate
    #[arg(long)]
    no_certificate: bool,
}

/// Config file values, consumed key by key so leftovers can be reported.
struct Config {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        let values = match path {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        Ok(Config {
            values,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(v)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Usage(format!("config: bad value {v:?} for {key}")))
            })
            .transpose()
    }

    fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<(), Error> {
        if slot.is_none() {
            *slot = self.get(key)?;
        }
        Ok(())
    }

    fn flag(&self, slot: &mut bool, key: &str) -> Result<(), Error> {
        if let Some(b) = self.get::<bool>(key)? {
            *slot |= b;
        }
        Ok(())
    }

    fn choice<T: ValueEnum>(&self, slot: &mut Option<T>, key: &str) -> Result<(), Error> {
        if slot.is_none() {
            if let Some(v) = self.raw(key) {
                *slot =
                    Some(T::from_str(v, true).map_err(|_| Error::Usage(format!("config: bad value {v:?} for {key}")))?);
            }
        }
        Ok(())
    }

    fn finish(&self) -> Result<(), Error> {
        let used = self.used.borrow();
        let unknown: Vec<&String> = self.values.keys().filter(|k| !used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Usage(format!("config: unknown keys {unknown:?}")))
        }
    }
}

impl Source {
    fn fill(&mut self, c: &Config) -> Result<(), Error> {
        c.choice(&mut self.construction, "construction")?;
        c.fill(&mut self.mesh, "mesh")?;
        c.choice(&mut self.kind, "kind")?;
        c.fill(&mut self.alpha, "alpha")?;
        c.fill(&mut self.beta, "beta")?;
        c.fill(&mut self.ell, "ell")?;
        c.fill(&mut self.gamma, "gamma")?;
        c.fill(&mut self.n, "n")?;
        c.fill(&mut self.apex, "apex")?;
        c.fill(&mut self.leg, "leg")?;
        c.flag(&mut self.allow_flat, "allow-flat")?;
        c.fill(&mut self.plane_tol, "plane-tol")?;
        c.fill(&mut self.angle_tol, "angle-tol")
    }

    fn hat_params(&self) -> Result<HatParams, Error> {
        match self.kind.unwrap_or(Kind::Basic) {
            Kind::Basic => {
                if self.gamma.is_some() {
                    return Err(Error::Usage("--gamma applies to triangulated hats".into()));
                }
                let d = BasicHatParams::default();
                Ok(HatParams::Basic(BasicHatParams {
                    alpha: self.alpha.unwrap_or(d.alpha),
                    beta: self.beta.unwrap_or(d.beta),
                    ell: self.ell.unwrap_or(d.ell),
                }))
            }
            Kind::Triangulated => {
                if self.ell.is_some() {
                    return Err(Error::Usage("--ell applies to basic hats".into()));
                }
                let d = TriHatParams::default();
                Ok(HatParams::Triangulated(TriHatParams {
                    alpha: self.alpha.unwrap_or(d.alpha),
                    beta: self.beta.unwrap_or(d.beta),
                    gamma: self.gamma.unwrap_or(d.gamma),
                }))
            }
        }
    }

    fn load(&self) -> Result<(PolyhedronMesh, String), Error> {
        let d = Tolerances::default();
        let tol = Tolerances {
            plane: self.plane_tol.unwrap_or(d.plane),
            angle: self.angle_tol.unwrap_or(d.angle),
        };
        if !(tol.plane > 0.0 && tol.angle > 0.0) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        if let Some(path) = &self.mesh {
            let name = path
                .file_stem()
                .map_or("mesh".to_string(), |s| s.to_string_lossy().into_owned());
            return Ok((read_obj_with(path, tol)?, name));
        }
        let c = self
            .construction
            .ok_or_else(|| Error::Usage("give a construction or --mesh".into()))?;
        let mesh = match c {
            Construction::Hat => build_hat(&self.hat_params()?, self.allow_flat)?,
            Construction::SpikedTetrahedron => {
                build_spiked(GuideSolid::Tetrahedron, &self.hat_params()?, self.allow_flat)?
            }
            Construction::SpikedOctahedron => {
                build_spiked(GuideSolid::Octahedron, &self.hat_params()?, self.allow_flat)?
            }
            Construction::Fan => {
                let d = FanParams::default();
                build_open_fan(&FanParams {
                    n: self.n.unwrap_or(d.n),
                    apex_angle: self.apex.unwrap_or(d.apex_angle),
                    leg: self.leg.unwrap_or(d.leg),
                })?
            }
            Construction::Tetrahedron => build_reference(ReferenceSolid::Tetrahedron),
            Construction::Cube => build_reference(ReferenceSolid::Cube),
        };
        let name = c.to_possible_value().expect("named").get_name().to_string();
        Ok((mesh, name))
    }
}

fn workers(flag: Option<usize>, config: &Config) -> Result<usize, Error> {
    let env = match std::env::var("UNUNFOLD_WORKERS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("UNUNFOLD_WORKERS: bad value {v:?}")))?,
        ),
        Err(_) => None,
    };
    let from_config = config.get::<usize>("workers")?;
    let w = flag
        .or(env)
        .or(from_config)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if w == 0 {
        return Err(Error::Usage("worker count must be at least 1".into()));
    }
    Ok(w)
}

fn vertex_classes(mesh: &PolyhedronMesh) -> Vec<(&'static str, Vec<usize>)> {
    if let Some(hats) = identify_hats(mesh) {
        let mut corners: Vec<usize> = hats.iter().flat_map(|h| h.corners.clone()).collect();
        corners.sort_unstable();
        corners.dedup();
        return vec![
            ("tip", hats.iter().map(|h| h.tip).collect()),
            ("middle", hats.iter().flat_map(|h| h.middles.clone()).collect()),
            ("corner", corners),
        ];
    }
    let (boundary, interior): (Vec<usize>, Vec<usize>) =
        (0..mesh.vertex_count()).partition(|&v| mesh.is_boundary_vertex(v));
    if boundary.is_empty() {
        vec![("vertex", interior)]
    } else {
        vec![("interior", interior), ("boundary", boundary)]
    }
}

fn print_summary(mesh: &PolyhedronMesh) -> Result<(), Error> {
    println!(
        "V={} E={} F={} chi={}",
        mesh.vertex_count(),
        mesh.edge_count(),
        mesh.face_count(),
        mesh.euler_characteristic()
    );
    let curv = curvatures(mesh);
    println!("class      count  curvature (deg)  angle sum (deg)");
    for (name, vs) in vertex_classes(mesh) {
        let range = |xs: Vec<f64>| -> String {
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if xs.is_empty() {
                "-".into()
            } else if hi - lo <= 1e-9 {
                format!("{lo:.6}")
            } else {
                format!("{lo:.6}..{hi:.6}")
            }
        };
        let k: Vec<f64> = vs.iter().filter_map(|&v| curv[v]).map(f64::to_degrees).collect();
        let sums = vs
            .iter()
            .map(|&v| angle_sum(mesh, v).map(f64::to_degrees))
            .collect::<Result<Vec<f64>, _>>()?;
        println!("{name:<10} {:>5}  {:<15}  {}", vs.len(), range(k), range(sums));
    }
    if mesh.is_closed() {
        println!("total curvature {:.9} deg", total_curvature(mesh)?.to_degrees());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate { mut source, mut output } => {
            source.fill(&config)?;
            config.fill(&mut output, "output")?;
            config.finish()?;
            let (mesh, name) = source.load()?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{name}.obj")));
            write_obj(&mesh, &path)?;
            print_summary(&mesh)?;
            println!("wrote {}", path.display());
        }
        Command::Inspect {
            mut source,
            mut sample_cuts,
            mut seed,
        } => {
            source.fill(&config)?;
            config.fill(&mut sample_cuts, "sample-cuts")?;
            config.fill(&mut seed, "seed")?;
            config.finish()?;
            let (mesh, _) = source.load()?;
            print_summary(&mesh)?;
            if mesh.is_closed() {
                let cert = is_topologically_convex(&mesh)?;
                println!(
                    "genus {}, topologically convex: {}",
                    mesh.genus()?,
                    if cert.holds() { "yes" } else { "no" }
                );
            }
            let emb = check_embedded(&mesh);
            println!(
                "embedded: {} ({} violations)",
                if emb.is_embedded() { "yes" } else { "no" },
                emb.violations.len()
            );
            println!("symmetry group order {}", symmetry_group(&mesh).len());
            if let Some(hats) = identify_hats(&mesh) {
                println!("hats {}", hats.len());
            }
            if let Ok(count) = count_spanning_trees(&skeleton_graph(&mesh)) {
                println!("spanning trees {count}");
            }
            if let Some(count) = sample_cuts {
                let seed = seed.unwrap_or(0);
                let runs = sample_fan_general_cuts(&mesh, count, seed)?;
                let angles: Vec<f64> = runs.iter().map(|r| r.1.overlap_angle.to_degrees()).collect();
                let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = angles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let all = runs.iter().all(|r| r.1.overlap.is_overlapping());
                println!(
                    "{count} general cuts (seed {seed}): overlap angle {lo:.9}..{hi:.9} deg, all overlapping: {}",
                    if all { "yes" } else { "no" }
                );
            }
        }
        Command::Verify {
            mut source,
            mut search,
            mut report,
            mut timing,
        } => {
            source.fill(&config)?;
            config.fill(&mut search.mode, "mode")?;
            config.fill(&mut search.budget, "budget")?;
            config.fill(&mut search.forest_budget, "forest-budget")?;
            config.flag(&mut search.early_exit, "early-exit")?;
            config.flag(&mut search.no_certificate, "no-certificate")?;
            config.fill(&mut report, "report")?;
            config.flag(&mut timing, "timing")?;
            let workers = workers(search.workers, &config)?;
            config.finish()?;
            let (mesh, _) = source.load()?;
            let mode = match &search.mode {
                Some(m) => m.parse::<EnumerationMode>().map_err(Error::Usage)?,
                None => EnumerationMode::default_for(&mesh),
            };
            let mut opts = SearchOptions::new(mode);
            opts.workers = workers;
            opts.budget = search.budget;
            if let Some(b) = search.forest_budget {
                opts.forest_budget = b;
            }
            opts.early_exit = search.early_exit;
            opts.fan_certificate = !search.no_certificate;
            let r = search_edge_unfolding(&mesh, &opts)?;
            if let Some(t) = r.timing {
                eprintln!("{:.3} s, {:.0} candidates/s", t.seconds, t.candidates_per_second);
            }
            match report {
                Some(path) => {
                    write_report(&r, &path, timing)?;
                    println!(
                        "verdict {}: {} candidates, {} admissible, {} consistent, {} non-overlapping",
                        r.verdict, r.total_candidates, r.admissible, r.consistent, r.non_overlapping
                    );
                    println!("wrote {}", path.display());
                }
                None => print!("{}", report_json(&r, timing)?),
            }
        }
        Command::Net {
            mut source,
            mut cut,
            mut general,
            mut first_found,
            mut cut_direction,
            mut band_width,
            mut band_skew,
            workers: worker_flag,
            mut output,
        } => {
            source.fill(&config)?;
            if cut.is_none() {
                if let Some(v) = config.raw("cut") {
                    let edges = v
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| Error::Usage(format!("config: bad value {v:?} for cut")))?;
                    cut = Some(edges);
                }
            }
            config.flag(&mut general, "general")?;
            config.flag(&mut first_found, "first-found")?;
            config.fill(&mut cut_direction, "cut-direction")?;
            config.fill(&mut band_width, "band-width")?;
            config.fill(&mut band_skew, "band-skew")?;
            config.fill(&mut output, "output")?;
            let workers = workers(worker_flag, &config)?;
            config.finish()?;
            let chosen = [cut.is_some(), general, first_found, cut_direction.is_some()]
                .iter()
                .filter(|&&b| b)
                .count();
            if chosen != 1 {
                return Err(Error::Usage(
                    "give exactly one of --cut, --general, --first-found, --cut-direction".into(),
                ));
            }
            let (mesh, name) = source.load()?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{name}-net.svg")));
            let drawing = if general {
                let d = BandParams::default();
                let band = BandParams {
                    width: band_width.unwrap_or(d.width),
                    skew: band_skew.unwrap_or(d.skew),
                };
                let net = general_unfold_spiked_tetrahedron(&mesh, band)?;
                println!(
                    "{} pieces, {} overlapping pairs, area error {:.3e}",
                    net.pieces.len(),
                    net.overlap.overlapping_pairs.len(),
                    net.area_error()
                );
                NetDrawing::from_general(&net)
            } else if let Some(deg) = cut_direction {
                let fan = unfold_fan_single_general_cut(&mesh, deg.to_radians())?;
                println!(
                    "{} pieces, {} overlapping pairs, overlap angle {:.9} deg",
                    fan.pieces.len(),
                    fan.overlap.overlapping_pairs.len(),
                    fan.overlap_angle.to_degrees()
                );
                NetDrawing::from_fan(&fan)
            } else {
                let cutting = match cut {
                    Some(edges) => Cutting::new(edges),
                    None => {
                        let mut opts = SearchOptions::new(EnumerationMode::default_for(&mesh));
                        opts.workers = workers;
                        opts.early_exit = true;
                        let r = search_edge_unfolding(&mesh, &opts)?;
                        let edges = r
                            .exemplars
                            .non_overlapping
                            .ok_or_else(|| Error::Usage("no non-overlapping edge unfolding exists".into()))?;
                        Cutting::new(edges)
                    }
                };
                let l = layout(&mesh, &cutting)?;
                let overlap = check_overlap(&l)?;
                println!(
                    "cut edges {:?}: {} faces, {} overlapping pairs",
                    cutting.edges(),
                    l.faces.len(),
                    overlap.overlapping_pairs.len()
                );
                NetDrawing::from_layout(&mesh, &l, &overlap)
            };
            if path.extension().is_some_and(|e| e == "json") {
                write_net_json(&drawing, &path)?;
            } else {
                write_svg(&drawing, &path)?;
            }
            println!("wrote {}", path.display());
        }
        Command::CountTrees { mut source } => {
            source.fill(&config)?;
            config.finish()?;
            let (mesh, _) = source.load()?;
            println!("{}", count_spanning_trees(&skeleton_graph(&mesh))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
