use std::fmt::Write as _;

use serde::Serialize;

use crate::geometry::{powr, BoundaryFace, DomainParams};
use crate::{Error, Result};

pub const MESH_HEADER: &str = "ncusp-mesh v1";

/// Edge `[from, to]` of the boundary, traversed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub face: BoundaryFace,
}

/// How a generated mesh was graded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshGrading {
    pub levels: usize,
    pub ratio: f64,
    pub alpha: f64,
    pub sublayers: usize,
}

/// Triangulation of the planar cusp `0 < x_1 < x_2^alpha, 0 < x_2 < 1`.
#[derive(Clone, Debug, Serialize)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
    grading: Option<MeshGrading>,
    tip: Option<usize>,
    tip_height: f64,
    min_quality: f64,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn quality(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
    let e = [d(a, b), d(b, c), d(c, a)];
    let lo = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = e.iter().cloned().fold(0.0, f64::max);
    lo / hi
}

/// Graded triangulation of `Omega_gamma` for `n = 2`.
///
/// Rows of vertices sit at heights `ratio^{k + j/s}` for `k < levels`,
/// `j < s`, plus the bottom row at `ratio^levels`. A row at height `h` is
/// split into `max(1, round(s h^{alpha-1} / (1 - ratio)))` intervals so the
/// cells stay close to square, with `s` chosen so the top row has
/// `7 levels` intervals. Rows are joined by a zipper sweep and the bottom
/// row is fanned to the origin, which is a single triangle whenever the
/// bottom row has one interval.
pub fn generate_cusp_mesh(params: &DomainParams, levels: usize, grading_ratio: f64) -> Result<TriMesh> {
    if params.n() != 2 {
        return Err(Error::InvalidArgument(format!(
            "meshes exist for n = 2 only (got n = {})",
            params.n()
        )));
    }
    if levels < 3 {
        return Err(Error::range("levels", "levels >= 3"));
    }
    if !(grading_ratio > 0.0 && grading_ratio < 1.0) {
        return Err(Error::range("grading_ratio", "0 < grading_ratio < 1"));
    }
    let alpha = params.alpha();
    let r = grading_ratio;
    let n_top = 7 * levels;
    let s = ((n_top as f64 * (1.0 - r)).round() as usize).max(1);

    let mut heights = Vec::with_capacity(levels * s + 1);
    for k in 0..levels {
        for j in 0..s {
            heights.push(powr(r, k as f64 + j as f64 / s as f64));
        }
    }
    heights.push(powr(r, levels as f64));

    let count = |h: f64| -> usize {
        ((s as f64 * powr(h, alpha - 1.0) / (1.0 - r)).round() as usize).max(1)
    };

    let mut vertices = Vec::new();
    let mut rows: Vec<(usize, usize)> = Vec::with_capacity(heights.len());
    let mut prev = usize::MAX;
    for &h in &heights {
        let m = count(h).min(prev);
        prev = m;
        let width = powr(h, alpha);
        rows.push((vertices.len(), m));
        for j in 0..=m {
            let x1 = if j == m { width } else { width * j as f64 / m as f64 };
            vertices.push([x1, h]);
        }
    }
    let tip = vertices.len();
    vertices.push([0.0, 0.0]);

    let mut triangles = Vec::new();
    let mut push = |tri: [usize; 3], vertices: &[[f64; 2]]| {
        let [a, b, c] = tri;
        if signed_area(vertices[a], vertices[b], vertices[c]) < 0.0 {
            triangles.push([a, c, b]);
        } else {
            triangles.push(tri);
        }
    };
    for w in rows.windows(2) {
        let ((us, nu), (ls, nl)) = (w[0], w[1]);
        let (mut i, mut j) = (0, 0);
        while i < nu || j < nl {
            let advance_upper = if j == nl {
                true
            } else if i == nu {
                false
            } else {
                (i + 1) as f64 / nu as f64 <= (j + 1) as f64 / nl as f64
            };
            if advance_upper {
                push([us + i, ls + j, us + i + 1], &vertices);
                i += 1;
            } else {
                push([us + i, ls + j, ls + j + 1], &vertices);
                j += 1;
            }
        }
    }
    let (bs, nb) = *rows.last().unwrap();
    for j in 0..nb {
        push([bs + j, tip, bs + j + 1], &vertices);
    }

    let mut boundary = Vec::new();
    for w in rows.windows(2) {
        boundary.push(BoundaryEdge {
            v: [w[0].0, w[1].0],
            face: BoundaryFace::Flat(1),
        });
    }
    boundary.push(BoundaryEdge {
        v: [bs, tip],
        face: BoundaryFace::Flat(1),
    });
    boundary.push(BoundaryEdge {
        v: [tip, bs + nb],
        face: BoundaryFace::Slanted(1),
    });
    for w in rows.windows(2).rev() {
        boundary.push(BoundaryEdge {
            v: [w[1].0 + w[1].1, w[0].0 + w[0].1],
            face: BoundaryFace::Slanted(1),
        });
    }
    let (ts, nt) = rows[0];
    for j in (0..nt).rev() {
        boundary.push(BoundaryEdge {
            v: [ts + j + 1, ts + j],
            face: BoundaryFace::Top,
        });
    }

    let grading = MeshGrading {
        levels,
        ratio: r,
        alpha,
        sublayers: s,
    };
    TriMesh::build(vertices, triangles, boundary, Some(grading))
}

impl TriMesh {
    fn build(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
        grading: Option<MeshGrading>,
    ) -> Result<TriMesh> {
        let mut min_quality = f64::INFINITY;
        for (index, t) in triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| vertices[i]);
            let q = if signed_area(a, b, c) > 0.0 { quality(a, b, c) } else { 0.0 };
            if !(q >= 1e-6) {
                return Err(Error::DegenerateTriangle { index, quality: q });
            }
            min_quality = min_quality.min(q);
        }
        let tip = vertices.iter().position(|v| v[0] == 0.0 && v[1] == 0.0);
        let tip_height = vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != tip)
            .map(|(_, v)| v[1])
            .fold(f64::INFINITY, f64::min);
        Ok(TriMesh {
            vertices,
            triangles,
            boundary,
            grading,
            tip,
            tip_height,
            min_quality,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn grading(&self) -> Option<&MeshGrading> {
        self.grading.as_ref()
    }

    /// Index of the vertex at the origin, if the mesh reaches it.
    pub fn tip(&self) -> Option<usize> {
        self.tip
    }

    /// Lowest height of a vertex other than the tip.
    pub fn tip_height(&self) -> f64 {
        self.tip_height
    }

    /// Smallest shortest-to-longest edge ratio over all triangles.
    pub fn min_quality(&self) -> f64 {
        self.min_quality
    }

    pub fn dof(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                signed_area(a, b, c)
            })
            .sum()
    }

    pub fn is_tip_edge(&self, e: &BoundaryEdge) -> bool {
        self.tip.is_some_and(|t| e.v.contains(&t))
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        let [p, q] = e.v.map(|i| self.vertices[i]);
        ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
    }

    /// Outward unit normal of a counterclockwise boundary edge.
    pub fn outward_normal(&self, e: &BoundaryEdge) -> [f64; 2] {
        let [p, q] = e.v.map(|i| self.vertices[i]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let l = (dx * dx + dy * dy).sqrt();
        [dy / l, -dx / l]
    }

    /// Text form `ncusp-mesh v1`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{MESH_HEADER}").unwrap();
        if let Some(g) = &self.grading {
            writeln!(
                s,
                "# grading levels={} ratio={} alpha={} sublayers={}",
                g.levels, g.ratio, g.alpha, g.sublayers
            )
            .unwrap();
        }
        for v in &self.vertices {
            writeln!(s, "v {:?} {:?}", v[0], v[1]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "t {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        for e in &self.boundary {
            let tag = match e.face {
                BoundaryFace::Flat(_) => "FLAT",
                BoundaryFace::Slanted(_) => "SLANTED",
                BoundaryFace::Top => "TOP",
            };
            writeln!(s, "b {} {} {tag}", e.v[0], e.v[1]).unwrap();
        }
        s
    }

    /// Parses the text form written by [`TriMesh::to_text`].
    pub fn from_text(text: &str) -> Result<TriMesh> {
        let err = |line: usize, message: String| Error::MeshFormat { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == MESH_HEADER => {}
            _ => return Err(err(1, format!("expected header `{MESH_HEADER}`"))),
        }
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut boundary = Vec::new();
        let mut grading = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(g) = rest.trim().strip_prefix("grading") {
                    grading = Some(parse_grading(g).map_err(|m| err(lineno, m))?);
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let kind = parts.next().unwrap();
            let fields: Vec<&str> = parts.collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(lineno, format!("{s}: {e}")));
            let idx = |s: &str, bound: usize| -> Result<usize> {
                let i = s.parse::<usize>().map_err(|e| err(lineno, format!("{s}: {e}")))?;
                if i >= bound {
                    return Err(err(lineno, format!("vertex index {i} out of range")));
                }
                Ok(i)
            };
            match (kind, fields.len()) {
                ("v", 2) => vertices.push([num(fields[0])?, num(fields[1])?]),
                ("t", 3) => {
                    let nv = vertices.len();
                    triangles.push([idx(fields[0], nv)?, idx(fields[1], nv)?, idx(fields[2], nv)?]);
                }
                ("b", 3) => {
                    let nv = vertices.len();
                    let face = match fields[2] {
                        "FLAT" => BoundaryFace::Flat(1),
                        "SLANTED" => BoundaryFace::Slanted(1),
                        "TOP" => BoundaryFace::Top,
                        other => return Err(err(lineno, format!("unknown tag {other}"))),
                    };
                    boundary.push(BoundaryEdge {
                        v: [idx(fields[0], nv)?, idx(fields[1], nv)?],
                        face,
                    });
                }
                _ => return Err(err(lineno, format!("malformed record `{line}`"))),
            }
        }
        TriMesh::build(vertices, triangles, boundary, grading)
    }
}

fn parse_grading(s: &str) -> std::result::Result<MeshGrading, String> {
    let mut g = MeshGrading {
        levels: 0,
        ratio: f64::NAN,
        alpha: f64::NAN,
        sublayers: 0,
    };
    for kv in s.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad grading field {kv}"))?;
        let bad = |e: &dyn std::fmt::Display| format!("{kv}: {e}");
        match k {
            "levels" => g.levels = v.parse().map_err(|e| bad(&e))?,
            "ratio" => g.ratio = v.parse().map_err(|e| bad(&e))?,
            "alpha" => g.alpha = v.parse().map_err(|e| bad(&e))?,
            "sublayers" => g.sublayers = v.parse().map_err(|e| bad(&e))?,
            _ => return Err(format!("unknown grading field {k}")),
        }
    }
    Ok(g)
}
