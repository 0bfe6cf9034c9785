//! Truss JSON files (version 1) and CSV export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::truss::{Edge, Truss};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileV1 {
    version: u32,
    vertices: Vec<VertexRec>,
    edges: Vec<EdgeRec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faces: Option<Vec<[usize; 3]>>,
    #[serde(default, skip_serializing_if = "is_false")]
    allow_coincident: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRec {
    id: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRec {
    id: usize,
    a: usize,
    b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(default)]
    removed: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    bigon: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Non-fatal findings while reading a file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ParseWarning {
    /// Prescribed length differs from the endpoint distance by more than 1e-6.
    LengthMismatch { edge: usize, prescribed: f64, geometric: f64 },
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub truss: Truss<f64>,
    pub warnings: Vec<ParseWarning>,
}

fn check_dense(ids: impl Iterator<Item = usize>, what: &str) -> Result<()> {
    for (k, id) in ids.enumerate() {
        if id != k {
            return Err(Error::Parse(format!("{what}[{k}]: id {id} breaks the dense 0..n order")));
        }
    }
    Ok(())
}

pub fn parse_truss(src: &str) -> Result<Parsed> {
    let file: FileV1 = serde_json::from_str(src)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("field version: unsupported value {}", file.version)));
    }
    check_dense(file.vertices.iter().map(|v| v.id), "vertices")?;
    check_dense(file.edges.iter().map(|e| e.id), "edges")?;
    let pos: Vec<Point<f64>> = file.vertices.iter().map(|v| Point::new(v.x, v.y)).collect();
    for (k, p) in pos.iter().enumerate() {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::Parse(format!("vertices[{k}]: non-finite coordinate")));
        }
    }
    if !file.allow_coincident {
        let mut sorted: Vec<(usize, Point<f64>)> = pos.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| a.1.x.total_cmp(&b.1.x));
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                if sorted[j].1.x - sorted[i].1.x > 1e-9 {
                    break;
                }
                if sorted[i].1.dist(sorted[j].1) <= 1e-9 {
                    let (a, b) = (sorted[i].0.min(sorted[j].0), sorted[i].0.max(sorted[j].0));
                    return Err(Error::CoincidentVertices(a, b));
                }
            }
        }
    }
    let edges: Vec<Edge<f64>> = file
        .edges
        .iter()
        .map(|r| Edge { a: r.a, b: r.b, length: r.length, removed: r.removed, bigon: r.bigon })
        .collect();
    let truss = Truss::new(pos, edges, file.faces)?;
    let mut warnings = Vec::new();
    for (id, e) in truss.edges().iter().enumerate() {
        if let Some(l) = e.length {
            let g = truss.geometric_length(id);
            if (l - g).abs() > 1e-6 {
                warnings.push(ParseWarning::LengthMismatch { edge: id, prescribed: l, geometric: g });
            }
        }
    }
    Ok(Parsed { truss, warnings })
}

/// Canonical text: fixed key order, one record per line, shortest round-trip floats.
pub fn serialize_truss(t: &Truss<f64>) -> String {
    let mut out = String::from("{\"version\":1,\n\"vertices\":[");
    for (i, p) in t.vertices().iter().enumerate() {
        let rec = VertexRec { id: i, x: p.x, y: p.y };
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&serde_json::to_string(&rec).expect("vertex record"));
    }
    out.push_str("],\n\"edges\":[");
    for (i, e) in t.edges().iter().enumerate() {
        let rec = EdgeRec { id: i, a: e.a, b: e.b, length: e.length, removed: e.removed, bigon: e.bigon };
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&serde_json::to_string(&rec).expect("edge record"));
    }
    out.push(']');
    if let Some(faces) = t.stored_faces() {
        out.push_str(",\n\"faces\":");
        out.push_str(&serde_json::to_string(faces).expect("faces"));
    }
    if has_coincident(t) {
        out.push_str(",\n\"allow_coincident\":true");
    }
    out.push_str("}\n");
    out
}

fn has_coincident(t: &Truss<f64>) -> bool {
    let v = t.vertices();
    (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i].dist(v[j]) <= 1e-9))
}

/// Rows as CSV with an `edge_<id>` header.
pub fn rows_to_csv(rows: &nalgebra::DMatrix<f64>, edge_order: &[usize]) -> String {
    let mut out = edge_order.iter().map(|e| format!("edge_{e}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in 0..rows.nrows() {
        let line: Vec<String> = (0..rows.ncols()).map(|c| format!("{:.16e}", rows[(r, c)])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
