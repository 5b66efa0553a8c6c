use std::path::PathBuf;

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ununfold_core::constructions::{
    build_open_fan, build_reference, build_spiked, BasicHatParams, ConstructionError, FanParams, GuideSolid, HatParams,
    ReferenceSolid, TriHatParams,
};
use ununfold_core::io::{self as uio, IoError, NetDrawing};
use ununfold_core::mesh::{self, skeleton_graph, PolyhedronMesh};
use ununfold_core::search::{self, EnumerationMode, SearchError, SearchOptions};
use ununfold_core::unfold::{self, BandParams, Cutting};
use ununfold_core::Error;

create_exception!(ununfold, UnunfoldError, PyException);
create_exception!(ununfold, ModeUnsupportedError, UnunfoldError);

fn err(e: impl Into<Error>) -> PyErr {
    let e: Error = e.into();
    match &e {
        Error::Search(SearchError::ModeUnsupported { .. }) => ModeUnsupportedError::new_err(e.to_string()),
        Error::Io(IoError::File { .. }) => PyIOError::new_err(e.to_string()),
        Error::Io(_) | Error::Usage(_) => PyValueError::new_err(e.to_string()),
        _ => UnunfoldError::new_err(e.to_string()),
    }
}

/// A polyhedral surface, closed or with boundary.
#[pyclass(name = "Mesh", frozen)]
struct PyMesh {
    inner: PolyhedronMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<(f64, f64, f64)>, faces: Vec<Vec<usize>>) -> PyResult<Self> {
        let points: Vec<_> = vertices.into_iter().map(|(x, y, z)| mesh_point(x, y, z)).collect();
        let inner = mesh::build_mesh(&points, &faces).map_err(err)?;
        Ok(PyMesh { inner })
    }

    #[staticmethod]
    fn read_obj(path: PathBuf) -> PyResult<Self> {
        Ok(PyMesh {
            inner: uio::read_obj(&path).map_err(err)?,
        })
    }

    #[staticmethod]
    fn parse_obj(text: &str) -> PyResult<Self> {
        Ok(PyMesh {
            inner: uio::parse_obj(text).map_err(err)?,
        })
    }

    fn to_obj(&self) -> String {
        uio::obj_string(&self.inner)
    }

    fn write_obj(&self, path: PathBuf) -> PyResult<()> {
        uio::write_obj(&self.inner, &path).map_err(err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.face_count()
    }

    #[getter]
    fn is_closed(&self) -> bool {
        self.inner.is_closed()
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        self.inner.positions().iter().map(|p| (p.x, p.y, p.z)).collect()
    }

    #[getter]
    fn faces(&self) -> Vec<Vec<usize>> {
        self.inner.face_loops()
    }

    /// Endpoint pairs indexed by edge id.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (e.endpoints[0], e.endpoints[1]))
            .collect()
    }

    #[getter]
    fn surface_area(&self) -> f64 {
        self.inner.surface_area()
    }

    fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.inner.edge_between(a, b)
    }

    fn angle_sum(&self, v: usize) -> PyResult<f64> {
        mesh::angle_sum(&self.inner, v).map_err(err)
    }

    /// Angle defect per vertex in radians, `None` on the boundary.
    fn curvatures(&self) -> Vec<Option<f64>> {
        mesh::curvatures(&self.inner)
    }

    fn total_curvature(&self) -> PyResult<f64> {
        mesh::total_curvature(&self.inner).map_err(err)
    }

    fn symmetry_order(&self) -> usize {
        mesh::symmetry_group(&self.inner).len()
    }

    fn count_spanning_trees(&self) -> PyResult<BigUint> {
        search::count_spanning_trees(&skeleton_graph(&self.inner)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, edges={}, faces={}, closed={})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.face_count(),
            self.inner.is_closed()
        )
    }
}

fn mesh_point(x: f64, y: f64, z: f64) -> ununfold_core::geometry::P3 {
    ununfold_core::geometry::P3::new(x, y, z)
}

/// A planar layout: polygons, cut segments and overlap regions.
#[pyclass(name = "Net", frozen)]
struct PyNet {
    drawing: NetDrawing,
    #[pyo3(get)]
    overlapping: bool,
    #[pyo3(get)]
    overlapping_pairs: Vec<(usize, usize)>,
    /// Wedge angle in degrees, for fan unfoldings.
    #[pyo3(get)]
    overlap_angle: Option<f64>,
}

#[pymethods]
impl PyNet {
    #[getter]
    fn polygons(&self) -> Vec<Vec<(f64, f64)>> {
        self.drawing
            .polygons
            .iter()
            .map(|p| p.iter().map(|q| (q.x, q.y)).collect())
            .collect()
    }

    #[getter]
    fn area(&self) -> f64 {
        self.drawing
            .polygons
            .iter()
            .map(|p| ununfold_core::geometry::signed_area(p))
            .sum()
    }

    fn to_svg(&self) -> String {
        self.drawing.to_svg()
    }

    fn write_svg(&self, path: PathBuf) -> PyResult<()> {
        uio::write_svg(&self.drawing, &path).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Net(pieces={}, overlapping={})",
            self.drawing.polygons.len(),
            self.overlapping
        )
    }
}

fn pairs(report: &unfold::OverlapReport) -> Vec<(usize, usize)> {
    report.overlapping_pairs.iter().map(|p| (p.a, p.b)).collect()
}

fn hat_params(
    kind: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    ell: Option<f64>,
    gamma: Option<f64>,
) -> PyResult<HatParams> {
    match kind {
        "basic" => {
            let d = BasicHatParams::default();
            Ok(HatParams::Basic(BasicHatParams {
                alpha: alpha.unwrap_or(d.alpha),
                beta: beta.unwrap_or(d.beta),
                ell: ell.unwrap_or(d.ell),
            }))
        }
        "triangulated" => {
            let d = TriHatParams::default();
            Ok(HatParams::Triangulated(TriHatParams {
                alpha: alpha.unwrap_or(d.alpha),
                beta: beta.unwrap_or(d.beta),
                gamma: gamma.unwrap_or(d.gamma),
            }))
        }
        other => Err(PyValueError::new_err(format!(
            "unknown hat kind {other:?}, expected \"basic\" or \"triangulated\""
        ))),
    }
}

fn built(r: Result<PolyhedronMesh, ConstructionError>) -> PyResult<PyMesh> {
    r.map(|inner| PyMesh { inner }).map_err(err)
}

/// Open hat; angles in degrees.
#[pyfunction]
#[pyo3(signature = (kind="basic", alpha=None, beta=None, ell=None, gamma=None, allow_flat=false))]
fn hat(
    kind: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    ell: Option<f64>,
    gamma: Option<f64>,
    allow_flat: bool,
) -> PyResult<PyMesh> {
    let p = hat_params(kind, alpha, beta, ell, gamma)?;
    built(ununfold_core::constructions::build_hat(&p, allow_flat))
}

#[pyfunction]
#[pyo3(signature = (kind="basic", alpha=None, beta=None, ell=None, gamma=None))]
fn spiked_tetrahedron(
    kind: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    ell: Option<f64>,
    gamma: Option<f64>,
) -> PyResult<PyMesh> {
    let p = hat_params(kind, alpha, beta, ell, gamma)?;
    built(build_spiked(GuideSolid::Tetrahedron, &p, false))
}

#[pyfunction]
#[pyo3(signature = (kind="basic", alpha=None, beta=None, ell=None, gamma=None))]
fn spiked_octahedron(
    kind: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    ell: Option<f64>,
    gamma: Option<f64>,
) -> PyResult<PyMesh> {
    let p = hat_params(kind, alpha, beta, ell, gamma)?;
    built(build_spiked(GuideSolid::Octahedron, &p, false))
}

#[pyfunction]
#[pyo3(signature = (n=8, apex=50.0, leg=1.0))]
fn fan(n: usize, apex: f64, leg: f64) -> PyResult<PyMesh> {
    built(build_open_fan(&FanParams {
        n,
        apex_angle: apex,
        leg,
    }))
}

#[pyfunction]
fn tetrahedron() -> PyMesh {
    PyMesh {
        inner: build_reference(ReferenceSolid::Tetrahedron),
    }
}

#[pyfunction]
fn cube() -> PyMesh {
    PyMesh {
        inner: build_reference(ReferenceSolid::Cube),
    }
}

/// Exhaustive edge-cutting search. Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (mesh, mode=None, budget=None, workers=1, early_exit=false, timing=false))]
fn search_edge_unfolding<'py>(
    py: Python<'py>,
    mesh: &PyMesh,
    mode: Option<&str>,
    budget: Option<u64>,
    workers: usize,
    early_exit: bool,
    timing: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match mode {
        Some(m) => m.parse::<EnumerationMode>().map_err(PyValueError::new_err)?,
        None => EnumerationMode::default_for(&mesh.inner),
    };
    let mut opts = SearchOptions::new(mode);
    opts.workers = workers;
    opts.budget = budget;
    opts.early_exit = early_exit;
    let report = py
        .detach(|| search::search_edge_unfolding(&mesh.inner, &opts))
        .map_err(err)?;
    let json = uio::report_json(&report, timing).map_err(err)?;
    py.import("json")?.call_method1("loads", (json,))
}

/// Admissibility of an edge cutting, as a dict.
#[pyfunction]
fn validate_cutting<'py>(py: Python<'py>, mesh: &PyMesh, edges: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let v = unfold::validate_cutting(&mesh.inner, &Cutting::new(edges)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("is_forest", v.is_forest)?;
    d.set_item("spans_required", v.spans_required)?;
    d.set_item("surface_connected", v.surface_connected)?;
    d.set_item("component_count", v.component_count)?;
    d.set_item("admissible", v.admissible())?;
    Ok(d)
}

/// Lays out an admissible edge cutting.
#[pyfunction]
fn unfold_edges(mesh: &PyMesh, edges: Vec<usize>) -> PyResult<PyNet> {
    let (layout, overlap) = unfold::unfold_edges(&mesh.inner, &Cutting::new(edges)).map_err(err)?;
    Ok(PyNet {
        drawing: NetDrawing::from_layout(&mesh.inner, &layout, &overlap),
        overlapping: overlap.is_overlapping(),
        overlapping_pairs: pairs(&overlap),
        overlap_angle: None,
    })
}

/// General unfolding of a spiked tetrahedron built from basic hats.
#[pyfunction]
#[pyo3(signature = (mesh, band_width=None, band_skew=None))]
fn general_unfold(mesh: &PyMesh, band_width: Option<f64>, band_skew: Option<f64>) -> PyResult<PyNet> {
    let d = BandParams::default();
    let band = BandParams {
        width: band_width.unwrap_or(d.width),
        skew: band_skew.unwrap_or(d.skew),
    };
    let net = unfold::general_unfold_spiked_tetrahedron(&mesh.inner, band).map_err(err)?;
    Ok(PyNet {
        drawing: NetDrawing::from_general(&net),
        overlapping: net.overlap.is_overlapping(),
        overlapping_pairs: pairs(&net.overlap),
        overlap_angle: None,
    })
}

/// Fan unrolled after a straight cut at `direction` degrees from the first spoke.
#[pyfunction]
fn fan_cut(mesh: &PyMesh, direction: f64) -> PyResult<PyNet> {
    let f = unfold::unfold_fan_single_general_cut(&mesh.inner, direction.to_radians()).map_err(err)?;
    Ok(PyNet {
        drawing: NetDrawing::from_fan(&f),
        overlapping: f.overlap.is_overlapping(),
        overlapping_pairs: pairs(&f.overlap),
        overlap_angle: Some(f.overlap_angle.to_degrees()),
    })
}

#[pymodule]
fn ununfold(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UnunfoldError", m.py().get_type::<UnunfoldError>())?;
    m.add("ModeUnsupportedError", m.py().get_type::<ModeUnsupportedError>())?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyNet>()?;
    m.add_function(wrap_pyfunction!(hat, m)?)?;
    m.add_function(wrap_pyfunction!(spiked_tetrahedron, m)?)?;
    m.add_function(wrap_pyfunction!(spiked_octahedron, m)?)?;
    m.add_function(wrap_pyfunction!(fan, m)?)?;
    m.add_function(wrap_pyfunction!(tetrahedron, m)?)?;
    m.add_function(wrap_pyfunction!(cube, m)?)?;
    m.add_function(wrap_pyfunction!(search_edge_unfolding, m)?)?;
    m.add_function(wrap_pyfunction!(validate_cutting, m)?)?;
    m.add_function(wrap_pyfunction!(unfold_edges, m)?)?;
    m.add_function(wrap_pyfunction!(general_unfold, m)?)?;
    m.add_function(wrap_pyfunction!(fan_cut, m)?)?;
    Ok(())
}
