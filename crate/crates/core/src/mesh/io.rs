//! Mesh file formats.
//!
//! `simple` is a whitespace-separated ASCII format with 1-based indices:
//!
//! ```text
//! <node count>
//! x y z                  (one line per node)
//! <cell count>
//! i j k l material_tag   (one line per cell)
//! <tagged face count>    (optional block)
//! i j k boundary_tag
//! ```
//!
//! Lines starting with `#` are ignored. `msh2` reads the `$Nodes` and
//! `$Elements` sections of Gmsh 2.2 ASCII files: type 4 elements become cells
//! (first tag is the material), type 2 elements tag boundary faces (first tag).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{MeshError, Point3, TetMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Msh2,
    Simple,
}

impl MeshFormat {
    /// Guesses the format from the file extension (`.msh` is Gmsh).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("msh") => MeshFormat::Msh2,
            _ => MeshFormat::Simple,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "msh2" | "msh" => Ok(MeshFormat::Msh2),
            "simple" => Ok(MeshFormat::Simple),
            other => Err(format!("unknown mesh format '{other}' (expected msh2 or simple)")),
        }
    }
}

pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<TetMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    match format {
        MeshFormat::Simple => parse_simple(&text),
        MeshFormat::Msh2 => parse_msh2(&text),
    }
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'))
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        Self { items, pos: 0 }
    }

    fn is_empty(&self) -> bool {
        self.pos >= self.items.len()
    }

    fn line(&self) -> usize {
        self.items.get(self.pos).or(self.items.last()).map(|t| t.0).unwrap_or(0)
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T, MeshError> {
        let line = self.line();
        let (_, tok) = self
            .items
            .get(self.pos)
            .ok_or_else(|| MeshError::Parse { line, msg: format!("unexpected end of file, expected {what}") })?;
        self.pos += 1;
        tok.parse()
            .map_err(|_| MeshError::Parse { line, msg: format!("expected {what}, found '{tok}'") })
    }

    fn index(&mut self, count: usize, what: &str) -> Result<usize, MeshError> {
        let line = self.line();
        let i: usize = self.next(what)?;
        if i == 0 || i > count {
            return Err(MeshError::Parse { line, msg: format!("{what} {i} out of range 1..={count}") });
        }
        Ok(i - 1)
    }
}

pub fn parse_simple(text: &str) -> Result<TetMesh, MeshError> {
    let mut t = Tokens::new(text);
    let n_nodes: usize = t.next("node count")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        nodes.push(Point3::new(t.next("x")?, t.next("y")?, t.next("z")?));
    }
    let n_cells: usize = t.next("cell count")?;
    let mut cells = Vec::with_capacity(n_cells);
    let mut tags = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let mut cell = [0; 4];
        for slot in &mut cell {
            *slot = t.index(n_nodes, "node index")?;
        }
        cells.push(cell);
        tags.push(t.next("material tag")?);
    }
    let mut tagged = Vec::new();
    if !t.is_empty() {
        let n_faces: usize = t.next("tagged face count")?;
        for _ in 0..n_faces {
            let tri = [t.index(n_nodes, "node index")?, t.index(n_nodes, "node index")?, t.index(n_nodes, "node index")?];
            tagged.push((tri, t.next("boundary tag")?));
        }
    }
    if !t.is_empty() {
        return Err(MeshError::Parse { line: t.line(), msg: "trailing data".into() });
    }
    let mut mesh = TetMesh::new(nodes, cells, tags)?;
    mesh.set_boundary_tags(&tagged)?;
    Ok(mesh)
}

/// Serializes to the `simple` format. All boundary faces are written with
/// their tags, so the output reloads to an identical mesh.
pub fn to_simple(mesh: &TetMesh) -> String {
    let mut s = String::new();
    writeln!(s, "{}", mesh.num_nodes()).unwrap();
    for p in mesh.nodes() {
        writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
    }
    writeln!(s, "{}", mesh.num_cells()).unwrap();
    for (c, cell) in mesh.cells().iter().enumerate() {
        writeln!(s, "{} {} {} {} {}", cell[0] + 1, cell[1] + 1, cell[2] + 1, cell[3] + 1, mesh.cell_tag(c)).unwrap();
    }
    let boundary: Vec<usize> = mesh.boundary_faces().collect();
    writeln!(s, "{}", boundary.len()).unwrap();
    for f in boundary {
        let [a, b, c] = mesh.faces()[f];
        writeln!(s, "{} {} {} {}", a + 1, b + 1, c + 1, mesh.face_tag(f).unwrap_or(0)).unwrap();
    }
    s
}

pub fn write_simple(mesh: &TetMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, to_simple(mesh))?;
    Ok(())
}

pub fn parse_msh2(text: &str) -> Result<TetMesh, MeshError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let err = |line: usize, msg: &str| MeshError::Parse { line, msg: msg.to_string() };
    let parse_nums = |line: usize, l: &str| -> Result<Vec<f64>, MeshError> {
        l.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, &format!("bad number '{t}'"))))
            .collect()
    };

    let mut node_ids: HashMap<u64, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut cells = Vec::new();
    let mut tags = Vec::new();
    let mut triangles: Vec<([u64; 3], i32, usize)> = Vec::new();
    let mut seen_format = false;
    let mut i = 0;
    while i < lines.len() {
        let (ln, l) = lines[i];
        match l {
            "$MeshFormat" => {
                let (vln, v) = *lines.get(i + 1).ok_or_else(|| err(ln, "truncated $MeshFormat"))?;
                let mut parts = v.split_whitespace();
                let version = parts.next().unwrap_or("");
                if !version.starts_with("2.") {
                    return Err(err(vln, &format!("unsupported MSH version {version}")));
                }
                if parts.next() != Some("0") {
                    return Err(err(vln, "only ASCII MSH files are supported"));
                }
                seen_format = true;
                i += 2;
            }
            "$Nodes" => {
                let (cln, count) = *lines.get(i + 1).ok_or_else(|| err(ln, "truncated $Nodes"))?;
                let count: usize = count.parse().map_err(|_| err(cln, "bad node count"))?;
                for k in 0..count {
                    let (nln, nl) = *lines.get(i + 2 + k).ok_or_else(|| err(ln, "truncated $Nodes"))?;
                    let v = parse_nums(nln, nl)?;
                    if v.len() != 4 {
                        return Err(err(nln, "node line needs id x y z"));
                    }
                    node_ids.insert(v[0] as u64, nodes.len());
                    nodes.push(Point3::new(v[1], v[2], v[3]));
                }
                i += 2 + count;
            }
            "$Elements" => {
                let (cln, count) = *lines.get(i + 1).ok_or_else(|| err(ln, "truncated $Elements"))?;
                let count: usize = count.parse().map_err(|_| err(cln, "bad element count"))?;
                for k in 0..count {
                    let (eln, el) = *lines.get(i + 2 + k).ok_or_else(|| err(ln, "truncated $Elements"))?;
                    let v: Vec<u64> = el
                        .split_whitespace()
                        .map(|t| t.parse::<u64>().map_err(|_| err(eln, &format!("bad integer '{t}'"))))
                        .collect::<Result<_, _>>()?;
                    if v.len() < 3 {
                        return Err(err(eln, "element line too short"));
                    }
                    let (etype, ntags) = (v[1], v[2] as usize);
                    let rest = v.get(3 + ntags..).ok_or_else(|| err(eln, "element line too short"))?;
                    let tag = if ntags > 0 { v[3] as i32 } else { 0 };
                    match etype {
                        4 if rest.len() == 4 => {
                            cells.push([rest[0], rest[1], rest[2], rest[3]]);
                            tags.push(tag);
                        }
                        2 if rest.len() == 3 => triangles.push(([rest[0], rest[1], rest[2]], tag, eln)),
                        4 | 2 => return Err(err(eln, "wrong node count for element type")),
                        _ => {}
                    }
                }
                i += 2 + count;
            }
            _ => i += 1,
        }
    }
    if !seen_format {
        return Err(err(1, "missing $MeshFormat section"));
    }
    let lookup = |id: u64, line: usize| node_ids.get(&id).copied().ok_or_else(|| err(line, &format!("unknown node {id}")));
    let cells: Vec<[usize; 4]> = cells
        .iter()
        .map(|c| Ok([lookup(c[0], 0)?, lookup(c[1], 0)?, lookup(c[2], 0)?, lookup(c[3], 0)?]))
        .collect::<Result<_, MeshError>>()?;
    let tagged = triangles
        .iter()
        .map(|(t, tag, line)| Ok(([lookup(t[0], *line)?, lookup(t[1], *line)?, lookup(t[2], *line)?], *tag)))
        .collect::<Result<Vec<_>, MeshError>>()?;
    let mut mesh = TetMesh::new(nodes, cells, tags)?;
    mesh.set_boundary_tags(&tagged)?;
    Ok(mesh)
}
