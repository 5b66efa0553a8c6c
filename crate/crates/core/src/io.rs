//! OBJ meshes, SVG nets, JSON reports and key=value config files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{clip_convex, format_sig, round_sig, BBox2, P2, P3};
use crate::mesh::{MeshError, PolyhedronMesh, Tolerances};
use crate::search::SearchReport;
use crate::unfold::{FanUnfolding, GeneralNet, OverlapReport, PlanarLayout};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents).map_err(file_error(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        file_error(path)(e)
    })
}

/// Parses `v` and `f` records (1-based indices, `a/b/c` tokens use the
/// first field). Comments, blank lines and normal, texture, group and
/// material records are skipped.
pub fn parse_obj(text: &str) -> Result<PolyhedronMesh, IoError> {
    parse_obj_with(text, Tolerances::default())
}

pub fn parse_obj_with(text: &str, tol: Tolerances) -> Result<PolyhedronMesh, IoError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| IoError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = content.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        match tag {
            "v" => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad coordinate {t:?}"))))
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 && coords.len() != 4 {
                    return Err(err(format!("vertex needs 3 coordinates, got {}", coords.len())));
                }
                vertices.push(P3::new(coords[0], coords[1], coords[2]));
            }
            "f" => {
                let idx: Vec<usize> = tokens
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        match first.parse::<usize>() {
                            Ok(k) if k >= 1 => Ok(k - 1),
                            _ => Err(err(format!("bad face index {t:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(err("face needs at least 3 vertices".into()));
                }
                faces.push(idx);
            }
            "vn" | "vt" | "o" | "g" | "s" | "mtllib" | "usemtl" => {}
            other => return Err(err(format!("unsupported record {other:?}"))),
        }
    }
    Ok(PolyhedronMesh::build(&vertices, &faces, tol)?)
}

pub fn read_obj(path: &Path) -> Result<PolyhedronMesh, IoError> {
    read_obj_with(path, Tolerances::default())
}

pub fn read_obj_with(path: &Path, tol: Tolerances) -> Result<PolyhedronMesh, IoError> {
    let text = fs::read_to_string(path).map_err(file_error(path))?;
    parse_obj_with(&text, tol)
}

/// OBJ text with 12 significant digits and counterclockwise faces.
pub fn obj_string(mesh: &PolyhedronMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} vertices, {} edges, {} faces",
        mesh.vertex_count(),
        mesh.edge_count(),
        mesh.face_count()
    );
    for p in mesh.positions() {
        let _ = writeln!(
            s,
            "v {} {} {}",
            format_sig(p.x, 12),
            format_sig(p.y, 12),
            format_sig(p.z, 12)
        );
    }
    for f in mesh.faces() {
        let idx: Vec<String> = f.vertices.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(s, "f {}", idx.join(" "));
    }
    s
}

pub fn write_obj(mesh: &PolyhedronMesh, path: &Path) -> Result<(), IoError> {
    write_atomic(path, obj_string(mesh).as_bytes())
}

/// Pretty JSON; wall-clock timing is dropped unless `timing` is set so that
/// reports are reproducible byte for byte.
pub fn report_json(report: &SearchReport, timing: bool) -> Result<String, IoError> {
    let mut r = report.clone();
    if !timing {
        r.timing = None;
    }
    Ok(serde_json::to_string_pretty(&r)? + "\n")
}

pub fn write_report(report: &SearchReport, path: &Path, timing: bool) -> Result<(), IoError> {
    write_atomic(path, report_json(report, timing)?.as_bytes())
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, IoError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| IoError::Parse {
            line: i + 1,
            message: format!("expected key=value, got {content:?}"),
        })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(IoError::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, IoError> {
    let text = fs::read_to_string(path).map_err(file_error(path))?;
    parse_config(&text)
}

/// Polygons, highlighted segments and shaded overlap regions of a net.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetDrawing {
    pub polygons: Vec<Vec<P2>>,
    /// Mesh face of each polygon.
    pub face_ids: Vec<usize>,
    pub cut_edges: Vec<usize>,
    pub cuts: Vec<(P2, P2)>,
    pub overlaps: Vec<Vec<P2>>,
}

fn overlap_regions(polygons: &[Vec<P2>], ids: &[usize], report: &OverlapReport) -> Vec<Vec<P2>> {
    report
        .overlapping_pairs
        .iter()
        .filter_map(|pair| {
            let i = ids.iter().position(|&x| x == pair.a)?;
            let j = ids.iter().position(|&x| x == pair.b)?;
            let region = clip_convex(&polygons[i], &polygons[j]);
            (region.len() >= 3).then_some(region)
        })
        .collect()
}

impl NetDrawing {
    /// Faces of an edge unfolding with both copies of every cut edge.
    pub fn from_layout(mesh: &PolyhedronMesh, layout: &PlanarLayout, overlap: &OverlapReport) -> Self {
        let polygons = layout.polygons();
        let mut cuts = Vec::new();
        for &e in &layout.cut_edges {
            let [a, b] = mesh.edges()[e].endpoints;
            for f in &layout.faces {
                if let (Some(p), Some(q)) = (f.point_of(a), f.point_of(b)) {
                    cuts.push((p, q));
                }
            }
        }
        let ids: Vec<usize> = layout.faces.iter().map(|f| f.face).collect();
        let overlaps = overlap_regions(&polygons, &ids, overlap);
        NetDrawing {
            polygons,
            face_ids: ids,
            cut_edges: layout.cut_edges.clone(),
            cuts,
            overlaps,
        }
    }

    pub fn from_general(net: &GeneralNet) -> Self {
        let polygons = net.polygons();
        let ids: Vec<usize> = (0..polygons.len()).collect();
        let overlaps = overlap_regions(&polygons, &ids, &net.overlap);
        NetDrawing {
            polygons,
            face_ids: net.pieces.iter().map(|p| p.face).collect(),
            cut_edges: net.spike_cuts.clone(),
            cuts: Vec::new(),
            overlaps,
        }
    }

    pub fn from_fan(fan: &FanUnfolding) -> Self {
        let polygons: Vec<Vec<P2>> = fan.pieces.iter().map(|p| p.polygon.clone()).collect();
        let ids: Vec<usize> = (0..polygons.len()).collect();
        let overlaps = overlap_regions(&polygons, &ids, &fan.overlap);
        NetDrawing {
            polygons,
            face_ids: fan.pieces.iter().map(|p| p.face).collect(),
            cut_edges: Vec::new(),
            cuts: Vec::new(),
            overlaps,
        }
    }

    /// `{faces: [{face_id, vertices}], cut_edges, overlaps}` with
    /// coordinates rounded to 12 significant digits.
    pub fn to_json(&self) -> Result<String, IoError> {
        let pts =
            |poly: &[P2]| -> Vec<[f64; 2]> { poly.iter().map(|p| [round_sig(p.x, 12), round_sig(p.y, 12)]).collect() };
        let faces: Vec<serde_json::Value> = self
            .polygons
            .iter()
            .zip(&self.face_ids)
            .map(|(poly, &id)| serde_json::json!({ "face_id": id, "vertices": pts(poly) }))
            .collect();
        let overlaps: Vec<Vec<[f64; 2]>> = self.overlaps.iter().map(|r| pts(r)).collect();
        let doc = serde_json::json!({
            "faces": faces,
            "cut_edges": self.cut_edges,
            "overlaps": overlaps,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    /// SVG with y pointing up and the view box padded by 5%. Each face is
    /// one `<polygon>`; overlap regions are `<path>` elements.
    pub fn to_svg(&self) -> String {
        let all: Vec<P2> = self.polygons.iter().flatten().copied().collect();
        let b = if all.is_empty() {
            BBox2::of(&[P2::origin()])
        } else {
            BBox2::of(&all)
        };
        let (w, h) = (b.max.x - b.min.x, b.max.y - b.min.y);
        let pad = 0.05 * w.max(h).max(1e-12);
        let (x0, y0) = (b.min.x - pad, -b.max.y - pad);
        let (vw, vh) = (w + 2.0 * pad, h + 2.0 * pad);
        let num = |x: f64| format_sig(x, 12);
        let pt = |p: &P2| format!("{},{}", num(p.x), num(-p.y));
        let stroke = num(0.004 * vw.max(vh));
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
            num(x0),
            num(y0),
            num(vw),
            num(vh)
        );
        let _ = writeln!(
            s,
            r##"<g fill="#f4e8c1" stroke="#333" stroke-width="{stroke}" stroke-linejoin="round">"##
        );
        for poly in &self.polygons {
            let pts: Vec<String> = poly.iter().map(pt).collect();
            let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(s, "</g>");
        if !self.overlaps.is_empty() {
            let _ = writeln!(s, r##"<g fill="#d62728" fill-opacity="0.6" stroke="none">"##);
            for region in &self.overlaps {
                let pts: Vec<String> = region.iter().map(pt).collect();
                let _ = writeln!(s, r#"<path d="M {} Z"/>"#, pts.join(" L "));
            }
            let _ = writeln!(s, "</g>");
        }
        if !self.cuts.is_empty() {
            let _ = writeln!(
                s,
                r##"<g stroke="#1f77b4" stroke-width="{}">"##,
                num(0.008 * vw.max(vh))
            );
            for (p, q) in &self.cuts {
                let _ = writeln!(
                    s,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    num(p.x),
                    num(-p.y),
                    num(q.x),
                    num(-q.y)
                );
            }
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        s
    }
}

pub fn write_svg(drawing: &NetDrawing, path: &Path) -> Result<(), IoError> {
    write_atomic(path, drawing.to_svg().as_bytes())
}

pub fn write_net_json(drawing: &NetDrawing, path: &Path) -> Result<(), IoError> {
    write_atomic(path, drawing.to_json()?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures;

    #[test]
    fn obj_round_trip_is_stable() {
        let m = fixtures::cube();
        let text = obj_string(&m);
        let back = parse_obj(&text).unwrap();
        assert_eq!(back.face_loops(), m.face_loops());
        assert_eq!(obj_string(&back), text);
    }

    #[test]
    fn obj_errors_carry_line_numbers() {
        let e = parse_obj("v 0 0 0\nv 1 0 x\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }), "{e}");
        let e = parse_obj("v 0 0 0\nf 1 2\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }));
        let e = parse_obj("v 0 0 0\nf 0 1 2\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }));
        let e = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n").unwrap_err();
        assert!(matches!(e, IoError::Mesh(MeshError::IndexOutOfRange { .. })));
        assert!(matches!(parse_obj("curv 1\n"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn slash_tokens_and_comments() {
        let text = "# tri\nv 0 0 0\nv 1 0 0 # x axis\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n";
        assert_eq!(parse_obj(text).unwrap().face_count(), 1);
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# settings\nalpha = 81\n\nmode=spanning-trees # trailing\n").unwrap();
        assert_eq!(c["alpha"], "81");
        assert_eq!(c["mode"], "spanning-trees");
        assert!(matches!(
            parse_config("a=1\noops\n"),
            Err(IoError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn svg_counts_polygons() {
        let d = NetDrawing {
            polygons: vec![
                vec![P2::new(0.0, 0.0), P2::new(1.0, 0.0), P2::new(0.0, 1.0)],
                vec![P2::new(1.0, 0.0), P2::new(1.0, 1.0), P2::new(0.0, 1.0)],
            ],
            face_ids: vec![3, 5],
            cut_edges: vec![0],
            cuts: vec![(P2::new(0.0, 0.0), P2::new(1.0, 0.0))],
            overlaps: Vec::new(),
        };
        let json: serde_json::Value = serde_json::from_str(&d.to_json().unwrap()).unwrap();
        assert_eq!(json["faces"][1]["face_id"], 5);
        assert_eq!(json["faces"][0]["vertices"][1][0], 1.0);
        assert_eq!(json["cut_edges"][0], 0);
        let svg = d.to_svg();
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#));
        assert!(svg.contains("0,-1"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
