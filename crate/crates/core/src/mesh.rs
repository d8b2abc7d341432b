//! Flat-panel surface meshes for perfect conductors.
//!
//! Panels are triangles or planar quads. Vertex order is counter-clockwise
//! when seen from the side the normal points to; on closed meshes the
//! normals point outward. Meshes can be generated programmatically or read
//! from a small text format:
//!
//! ```text
//! # abphase surface mesh v1
//! orientation outward
//! vertices 8
//! 0 0 0
//! 1 0 0
//! 1 1 0
//! 0 1 0
//! 0 0 1
//! 1 0 1
//! 1 1 1
//! 0 1 1
//! panels 8
//! 4 0 1 5 4
//! 4 1 2 6 5
//! 4 2 3 7 6
//! 4 3 0 4 7
//! 3 4 5 6
//! 3 4 6 7
//! 3 0 2 1
//! 3 0 3 2
//! ```
//!
//! This is the unit cube: four side quads and the top and bottom faces split
//! into two triangles each. Lines starting with `#` and blank lines are
//! ignored anywhere. `orientation inward` declares that the listed panel
//! order puts the normals inside; the reader flips every panel so the stored
//! mesh is always outward. Vertex indices are zero based. See
//! [`SurfaceMesh::parse`] for the exact grammar.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sources::{checked_unit, orthonormal_basis};
use crate::Vec3;

/// Relative tolerance on quad planarity (off-plane distance over diameter).
pub const PLANARITY_TOLERANCE: f64 = 1e-6;

/// Header line written by [`SurfaceMesh::to_text`].
pub const FORMAT_HEADER: &str = "# abphase surface mesh v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// indices into the mesh vertex list, 3 or 4 of them
    pub indices: Vec<usize>,
    /// corner positions, same order as `indices`
    pub vertices: Vec<Vec3>,
    /// area centroid
    pub centroid: Vec3,
    /// unit normal
    pub normal: Vec3,
    /// m^2
    pub area: f64,
}

impl Panel {
    fn build(all: &[Vec3], indices: Vec<usize>) -> Result<Self> {
        let vertices: Vec<Vec3> = indices.iter().map(|&i| all[i]).collect();
        let n = vertices.len();
        // Newell's method: robust for slightly non-planar input
        let mut newell = Vec3::zeros();
        for k in 0..n {
            newell += vertices[k].cross(&vertices[(k + 1) % n]);
        }
        let area = 0.5 * newell.norm();
        let diameter = vertices
            .iter()
            .flat_map(|a| vertices.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        if !(area > 1e-14 * diameter * diameter) || area == 0.0 {
            return Err(Error::Mesh(format!("degenerate panel {indices:?}")));
        }
        let normal = newell / newell.norm();
        if n == 4 {
            let off = (vertices[3] - vertices[0]).dot(&normal).abs()
                .max((vertices[2] - vertices[0]).dot(&normal).abs());
            if off > PLANARITY_TOLERANCE * diameter {
                return Err(Error::Mesh(format!(
                    "quad {indices:?} is not planar (offset {off:.3e} m)"
                )));
            }
        }
        // area-weighted centroid of the fan triangles
        let mut weighted = Vec3::zeros();
        for k in 1..n - 1 {
            let a = 0.5 * (vertices[k] - vertices[0]).cross(&(vertices[k + 1] - vertices[0])).dot(&normal);
            weighted += a * (vertices[0] + vertices[k] + vertices[k + 1]) / 3.0;
        }
        let centroid = weighted / area;
        Ok(Self {
            indices,
            vertices,
            centroid,
            normal,
            area,
        })
    }

    /// Largest corner-to-corner distance.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                d = d.max((v[a] - v[b]).norm());
            }
        }
        d
    }

    /// Fan triangles as vertex-index triples, same orientation as the panel.
    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let i = &self.indices;
        (1..i.len() - 1).map(move |k| [i[0], i[k], i[k + 1]])
    }
}

/// An undirected edge and the panels sharing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub panels: [Option<usize>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    panels: Vec<Panel>,
    edges: Vec<Edge>,
    closed: bool,
}

impl SurfaceMesh {
    /// Build from vertices and panel index lists. Every edge may be shared by
    /// at most two panels, which must traverse it in opposite directions.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::Mesh("mesh has no panels".into()));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Mesh("non-finite vertex".into()));
        }
        let mut panels = Vec::with_capacity(faces.len());
        for face in faces {
            if face.len() != 3 && face.len() != 4 {
                return Err(Error::Mesh(format!(
                    "panel with {} vertices; only 3 or 4 are supported",
                    face.len()
                )));
            }
            if let Some(&bad) = face.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "vertex index {bad} out of range ({} vertices)",
                    vertices.len()
                )));
            }
            let mut sorted = face.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != face.len() {
                return Err(Error::Mesh(format!("panel {face:?} repeats a vertex")));
            }
            panels.push(Panel::build(&vertices, face)?);
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (p, panel) in panels.iter().enumerate() {
            let idx = &panel.indices;
            for k in 0..idx.len() {
                let e = (idx[k], idx[(k + 1) % idx.len()]);
                if directed.insert(e, p).is_some() {
                    return Err(Error::Mesh(format!(
                        "edge {}-{} traversed twice in the same direction: inconsistent orientation or non-manifold edge",
                        e.0, e.1
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        let mut keys: Vec<_> = directed.keys().copied().collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let forward = directed[&(a, b)];
            match directed.get(&(b, a)) {
                Some(&back) if a < b => edges.push(Edge {
                    vertices: [a, b],
                    panels: [Some(forward), Some(back)],
                }),
                Some(_) => {}
                None => edges.push(Edge {
                    vertices: [a.min(b), a.max(b)],
                    panels: [Some(forward), None],
                }),
            }
        }
        let closed = edges.iter().all(|e| e.panels[1].is_some());
        Ok(Self {
            vertices,
            panels,
            edges,
            closed,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Every edge is shared by exactly two panels.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    /// Vertices lying on an unshared edge.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.panels[1].is_none()) {
            on[e.vertices[0]] = true;
            on[e.vertices[1]] = true;
        }
        on
    }

    /// Vertices referenced by at least one panel.
    pub fn used_vertices(&self) -> Vec<bool> {
        let mut used = vec![false; self.vertices.len()];
        for p in &self.panels {
            for &i in &p.indices {
                used[i] = true;
            }
        }
        used
    }

    /// Enclosed volume via the divergence theorem; positive for outward
    /// normals on a closed mesh.
    pub fn signed_volume(&self) -> f64 {
        self.panels
            .iter()
            .map(|p| p.centroid.dot(&p.normal) * p.area)
            .sum::<f64>()
            / 3.0
    }

    /// `|sum n A| / sum A`: the flux of a constant unit field through the
    /// surface, relative. Vanishes (to rounding) on a closed mesh.
    pub fn flux_defect(&self) -> f64 {
        let net: Vec3 = self.panels.iter().map(|p| p.normal * p.area).sum();
        net.norm() / self.total_area()
    }

    /// Check the closed-mesh invariants: closed, outward, zero net flux.
    pub fn validate_closed(&self) -> Result<()> {
        if !self.closed {
            return Err(Error::Mesh("mesh is not closed".into()));
        }
        if self.signed_volume() <= 0.0 {
            return Err(Error::Mesh("closed mesh has inward normals".into()));
        }
        let defect = self.flux_defect();
        if defect > 1e-6 {
            return Err(Error::Mesh(format!(
                "net flux of a constant field is {defect:.3e} of the area"
            )));
        }
        Ok(())
    }

    /// Reverse every panel's orientation.
    pub fn flipped(&self) -> Self {
        let faces = self
            .panels
            .iter()
            .map(|p| p.indices.iter().rev().copied().collect())
            .collect();
        Self::new(self.vertices.clone(), faces).expect("flipping preserves validity")
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        self.mapped(|v| v + offset)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        self.mapped(|v| v * factor)
    }

    fn mapped(&self, f: impl Fn(Vec3) -> Vec3) -> Self {
        let vertices = self.vertices.iter().map(|&v| f(v)).collect();
        let faces = self.panels.iter().map(|p| p.indices.clone()).collect();
        Self::new(vertices, faces).expect("affine map preserves validity")
    }

    /// Generalized winding number of the surface about `point`: 1 inside a
    /// closed outward mesh, 0 outside, 1/2 on the surface.
    pub fn winding_number(&self, point: Vec3) -> f64 {
        let mut omega = 0.0;
        for p in &self.panels {
            for [i, j, k] in p.triangles() {
                let a = self.vertices[i] - point;
                let b = self.vertices[j] - point;
                let c = self.vertices[k] - point;
                let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
                let num = a.dot(&b.cross(&c));
                let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
                omega += 2.0 * num.atan2(den);
            }
        }
        omega / (4.0 * PI)
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let used = self.used_vertices();
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for (v, _) in self.vertices.iter().zip(&used).filter(|(_, &u)| u) {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Whether `point` lies strictly inside a closed mesh.
    pub fn contains(&self, point: Vec3) -> bool {
        if !self.closed {
            return false;
        }
        let (lo, hi) = self.bounds();
        if (0..3).any(|k| point[k] < lo[k] || point[k] > hi[k]) {
            return false;
        }
        self.winding_number(point) > 0.5
    }

    /// Distance from `point` to the nearest panel centroid, a cheap proxy for
    /// surface clearance.
    pub fn nearest_centroid_distance(&self, point: Vec3) -> f64 {
        self.panels
            .iter()
            .map(|p| (p.centroid - point).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Parse the text format. Grammar, one item per line, `#` comments and
    /// blank lines ignored:
    ///
    /// ```text
    /// orientation outward|inward
    /// vertices N
    /// x y z          (N lines)
    /// panels M
    /// 3 i j k        (or 4 i j k l; M lines)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")))
        };
        let keyword = |(line, text): (usize, &str), key: &str| -> Result<String> {
            let mut parts = text.split_whitespace();
            if parts.next() != Some(key) {
                return Err(parse_err(line, format!("expected `{key} ...`, found `{text}`")));
            }
            let value = parts
                .next()
                .ok_or_else(|| parse_err(line, format!("`{key}` needs a value")))?;
            if parts.next().is_some() {
                return Err(parse_err(line, format!("trailing tokens after `{key}`")));
            }
            Ok(value.to_string())
        };
        let count = |(line, text): (usize, &str), key: &str| -> Result<usize> {
            let v = keyword((line, text), key)?;
            v.parse()
                .map_err(|_| parse_err(line, format!("`{v}` is not a count")))
        };

        let entry = next("orientation")?;
        let inward = match keyword(entry, "orientation")?.as_str() {
            "outward" => false,
            "inward" => true,
            other => {
                return Err(parse_err(
                    entry.0,
                    format!("orientation must be `outward` or `inward`, found `{other}`"),
                ))
            }
        };
        let n_vertices = count(next("vertices")?, "vertices")?;
        let mut vertices = Vec::with_capacity(n_vertices);
        for _ in 0..n_vertices {
            let (line, text) = next("a vertex")?;
            let coords: Vec<f64> = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(line, format!("bad coordinate: {e}")))?;
            if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                return Err(parse_err(line, "a vertex is three finite numbers".into()));
            }
            vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
        }
        let n_panels = count(next("panels")?, "panels")?;
        let mut faces = Vec::with_capacity(n_panels);
        for _ in 0..n_panels {
            let (line, text) = next("a panel")?;
            let ints: Vec<usize> = text
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(line, format!("bad index: {e}")))?;
            match ints.split_first() {
                Some((&k, rest)) if (k == 3 || k == 4) && rest.len() == k => {
                    let mut face = rest.to_vec();
                    if inward {
                        face.reverse();
                    }
                    faces.push(face);
                }
                _ => {
                    return Err(parse_err(
                        line,
                        "a panel is `3 i j k` or `4 i j k l`".into(),
                    ))
                }
            }
        }
        if let Some((line, text)) = lines.next() {
            return Err(parse_err(line, format!("unexpected trailing line `{text}`")));
        }
        let mesh = Self::new(vertices, faces)?;
        if mesh.closed && mesh.signed_volume() <= 0.0 {
            return Err(Error::Mesh(format!(
                "declared orientation `{}` contradicts the panel order (normals point inward)",
                if inward { "inward" } else { "outward" }
            )));
        }
        Ok(mesh)
    }

    /// Serialize in the text format, always with `orientation outward`.
    /// Coordinates use Rust's shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "orientation outward");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?} {:?}", v.x, v.y, v.z);
        }
        let _ = writeln!(s, "panels {}", self.panels.len());
        for p in &self.panels {
            let _ = write!(s, "{}", p.indices.len());
            for i in &p.indices {
                let _ = write!(s, " {i}");
            }
            s.push('\n');
        }
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// The unit cube of the format example.
    pub fn unit_cube() -> Self {
        let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
        let vertices = vec![
            v(0., 0., 0.),
            v(1., 0., 0.),
            v(1., 1., 0.),
            v(0., 1., 0.),
            v(0., 0., 1.),
            v(1., 0., 1.),
            v(1., 1., 1.),
            v(0., 1., 1.),
        ];
        let faces = vec![
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
            vec![4, 5, 6],
            vec![4, 6, 7],
            vec![0, 2, 1],
            vec![0, 3, 2],
        ];
        Self::new(vertices, faces).expect("static cube is valid")
    }

    /// Subdivided icosahedron projected onto a sphere: `20 * 4^level`
    /// triangles.
    pub fn icosphere(center: Vec3, radius: f64, level: u32) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid("radius", "must be positive"));
        }
        if level > 6 {
            return Err(Error::invalid("level", "at most 6 (81920 panels)"));
        }
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1., t, 0.),
            (1., t, 0.),
            (-1., -t, 0.),
            (1., -t, 0.),
            (0., -1., t),
            (0., 1., t),
            (0., -1., -t),
            (0., 1., -t),
            (t, 0., -1.),
            (t, 0., 1.),
            (-t, 0., -1.),
            (-t, 0., 1.),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
                *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push(((verts[a] + verts[b]) / 2.0).normalize());
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        let vertices = verts.into_iter().map(|v| center + v * radius).collect();
        Self::new(vertices, faces.iter().map(|f| f.to_vec()).collect())
    }

    /// Open square plate in the plane through `center` perpendicular to
    /// `normal`, `n x n` quads. `grading >= 1` clusters panels toward the
    /// center: node `u in [-1, 1]` maps to `half_width * sign(u) |u|^grading`.
    pub fn plate(
        center: Vec3,
        normal: Vec3,
        half_width: f64,
        n: usize,
        grading: f64,
    ) -> Result<Self> {
        let normal = checked_unit("normal", normal)?;
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("half_width", "must be positive"));
        }
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::invalid("grading", "must be >= 1"));
        }
        let (e1, e2) = orthonormal_basis(normal);
        let nodes: Vec<f64> = (0..=n)
            .map(|k| {
                let u = -1.0 + 2.0 * k as f64 / n as f64;
                half_width * u.signum() * u.abs().powf(grading)
            })
            .collect();
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for &y in &nodes {
            for &x in &nodes {
                vertices.push(center + e1 * x + e2 * y);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut faces = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self::new(vertices, faces)
    }

    /// Closed cylinder with flat end caps. The side has `n_around x n_along`
    /// quads; each cap has a central triangle fan plus `cap_rings - 1` rings
    /// of quads. Panel count: `n_around * (n_along + 2 * cap_rings)`.
    pub fn closed_cylinder(
        center: Vec3,
        axis: Vec3,
        radius: f64,
        length: f64,
        n_around: usize,
        n_along: usize,
        cap_rings: usize,
    ) -> Result<Self> {
        let axis = checked_unit("axis", axis)?;
        if !(radius > 0.0) || !radius.is_finite() || !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid("radius/length", "must be positive"));
        }
        if n_around < 3 || n_along == 0 || cap_rings == 0 {
            return Err(Error::invalid(
                "n_around/n_along/cap_rings",
                "need n_around >= 3, n_along >= 1, cap_rings >= 1",
            ));
        }
        let (e1, e2) = orthonormal_basis(axis);
        let ring = |r: f64, z: f64, k: usize| {
            let phi = 2.0 * PI * k as f64 / n_around as f64;
            center + axis * z + (e1 * phi.cos() + e2 * phi.sin()) * r
        };
        let h = length / 2.0;
        let mut vertices = Vec::new();
        // side rings, bottom to top
        for j in 0..=n_along {
            let z = -h + length * j as f64 / n_along as f64;
            for k in 0..n_around {
                vertices.push(ring(radius, z, k));
            }
        }
        let side = |j: usize, k: usize| j * n_around + k % n_around;
        let mut faces = Vec::new();
        for j in 0..n_along {
            for k in 0..n_around {
                // ccw seen from outside: around (+phi) then up (+axis)
                faces.push(vec![side(j, k), side(j, k + 1), side(j + 1, k + 1), side(j + 1, k)]);
            }
        }
        // caps: inner rings at radius r * m / cap_rings
        for (z, outer_ring, up) in [(-h, 0, false), (h, n_along, true)] {
            let mut rings: Vec<Vec<usize>> = Vec::with_capacity(cap_rings + 1);
            let center_index = vertices.len();
            vertices.push(center + axis * z);
            for m in 1..cap_rings {
                let r = radius * m as f64 / cap_rings as f64;
                let start = vertices.len();
                for k in 0..n_around {
                    vertices.push(ring(r, z, k));
                }
                rings.push((start..start + n_around).collect());
            }
            rings.push((0..n_around).map(|k| side(outer_ring, k)).collect());
            let mut push = |mut f: Vec<usize>| {
                // ccw about +axis is outward on the top cap
                if !up {
                    f.reverse();
                }
                faces.push(f);
            };
            for k in 0..n_around {
                let kn = (k + 1) % n_around;
                push(vec![center_index, rings[0][k], rings[0][kn]]);
            }
            for m in 0..cap_rings - 1 {
                for k in 0..n_around {
                    let kn = (k + 1) % n_around;
                    push(vec![rings[m][k], rings[m + 1][k], rings[m + 1][kn], rings[m][kn]]);
                }
            }
        }
        Self::new(vertices, faces)
    }

    /// Closed axis-aligned box with `n` x `n` quads per face.
    pub fn cuboid(center: Vec3, half_extents: Vec3, n: usize) -> Result<Self> {
        if half_extents.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid("half_extents", "must be positive"));
        }
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        let mut index: HashMap<[i64; 3], usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut vid = |g: [i64; 3], vertices: &mut Vec<Vec3>| {
            *index.entry(g).or_insert_with(|| {
                let p = Vec3::new(
                    -1.0 + 2.0 * g[0] as f64 / n as f64,
                    -1.0 + 2.0 * g[1] as f64 / n as f64,
                    -1.0 + 2.0 * g[2] as f64 / n as f64,
                );
                vertices.push(center + half_extents.component_mul(&p));
                vertices.len() - 1
            })
        };
        let n_i = n as i64;
        let mut faces = Vec::with_capacity(6 * n * n);
        for axis in 0..3 {
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            for side in [0, n_i] {
                for a in 0..n_i {
                    for b in 0..n_i {
                        let g = |du: i64, dv: i64| {
                            let mut c = [0i64; 3];
                            c[axis] = side;
                            c[u] = a + du;
                            c[v] = b + dv;
                            c
                        };
                        // (u, v, axis) is right handed, so u then v is ccw
                        // seen from +axis
                        let mut f = vec![
                            vid(g(0, 0), &mut vertices),
                            vid(g(1, 0), &mut vertices),
                            vid(g(1, 1), &mut vertices),
                            vid(g(0, 1), &mut vertices),
                        ];
                        if side == 0 {
                            f.reverse();
                        }
                        faces.push(f);
                    }
                }
            }
        }
        Self::new(vertices, faces)
    }
}
