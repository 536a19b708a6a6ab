//! k-skeletons: k colored directed multigraphs on a shared finite vertex set.
//!
//! Conventions: an edge `e` points from `source(e)` to `range(e)`, and a path
//! `ef` is composable when `source(e) == range(f)`. Every basis ordering used
//! downstream is derived from the input order of vertices and edges, so two
//! parses of the same file produce identical matrices.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktheory::IntMatrix;
use crate::report::{ValidationReport, Violation};

/// Colors are 1-based, as in the file format.
pub type Color = usize;

/// Identifies the block of a two-color object for colors `i < j` between
/// vertices `v` (range side) and `w` (source side). The derived ordering,
/// `(i, j, v, w)` lexicographically, is the canonical block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub i: Color,
    pub j: Color,
    pub v: usize,
    pub w: usize,
}

impl BlockKey {
    pub fn new(i: Color, j: Color, v: usize, w: usize) -> Self {
        BlockKey { i, j, v, w }
    }

    pub fn describe(&self, s: &Skeleton) -> String {
        format!(
            "(i={}, j={}, v={}, w={})",
            self.i,
            self.j,
            s.vertex_id(self.v),
            s.vertex_id(self.w)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub color: Color,
    pub range: usize,
    pub source: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub color: usize,
    pub range: String,
    pub source: String,
}

/// On-disk layout of a skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonFile {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone)]
pub struct Skeleton {
    k: usize,
    vertices: Vec<String>,
    vertex_index: HashMap<String, usize>,
    edges: Vec<Edge>,
    /// Global edge indices per color, in file order. Color `c` lives at `c - 1`.
    by_color: Vec<Vec<usize>>,
    /// `incoming[c - 1][v]`: color-c edges with range `v`, in file order.
    incoming: Vec<Vec<Vec<usize>>>,
    /// Position of each edge among the color-c edges sharing its range and source.
    local_pos: Vec<usize>,
    /// Nonempty two-color path lists keyed by `(first color, second color, v, w)`.
    pair_paths: HashMap<(Color, Color, usize, usize), Vec<[usize; 2]>>,
    pair_pos: HashMap<[usize; 2], usize>,
}

impl PartialEq for Skeleton {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Skeleton {
    /// Builds a skeleton from file data, rejecting structural malformation
    /// (duplicate ids, dangling vertex references, colors out of range).
    /// The path-count and no-sources conditions are checked separately by
    /// [`validate_skeleton`].
    pub fn from_file(file: SkeletonFile) -> Result<Self> {
        if file.k == 0 {
            return Err(Error::Malformed("k must be positive".into()));
        }
        let mut vertex_index = HashMap::with_capacity(file.vertices.len());
        for (idx, id) in file.vertices.iter().enumerate() {
            if vertex_index.insert(id.clone(), idx).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let mut seen: HashSet<(usize, &str)> = HashSet::new();
        let mut edges = Vec::with_capacity(file.edges.len());
        for rec in &file.edges {
            if rec.color == 0 || rec.color > file.k {
                return Err(Error::ColorOutOfRange {
                    color: rec.color,
                    k: file.k,
                });
            }
            if !seen.insert((rec.color, rec.id.as_str())) {
                return Err(Error::DuplicateEdge {
                    id: rec.id.clone(),
                    color: rec.color,
                });
            }
            let lookup = |name: &String| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::DanglingVertex {
                        edge: rec.id.clone(),
                        vertex: name.clone(),
                    })
            };
            edges.push(Edge {
                id: rec.id.clone(),
                color: rec.color,
                range: lookup(&rec.range)?,
                source: lookup(&rec.source)?,
            });
        }
        Ok(Self::index(file.k, file.vertices, vertex_index, edges))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SkeletonFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    /// Single-vertex skeleton with `counts[c - 1]` loops of color `c`.
    /// Loops of color `c` are named `c{c}_{n}` with `n` counting from 1.
    pub fn bouquet(counts: &[usize]) -> Self {
        let vertices = vec!["v".to_string()];
        let edges = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| {
                (1..=n).map(move |m| EdgeRecord {
                    id: format!("c{}_{}", c + 1, m),
                    color: c + 1,
                    range: "v".into(),
                    source: "v".into(),
                })
            })
            .collect();
        Self::from_file(SkeletonFile {
            k: counts.len(),
            vertices,
            edges,
        })
        .expect("bouquet skeleton is well formed")
    }

    fn index(
        k: usize,
        vertices: Vec<String>,
        vertex_index: HashMap<String, usize>,
        edges: Vec<Edge>,
    ) -> Self {
        let nv = vertices.len();
        let mut by_color = vec![Vec::new(); k];
        let mut incoming = vec![vec![Vec::new(); nv]; k];
        let mut local_pos = vec![0; edges.len()];
        let mut group_count: HashMap<(Color, usize, usize), usize> = HashMap::new();
        for (idx, e) in edges.iter().enumerate() {
            by_color[e.color - 1].push(idx);
            incoming[e.color - 1][e.range].push(idx);
            let slot = group_count.entry((e.color, e.range, e.source)).or_insert(0);
            local_pos[idx] = *slot;
            *slot += 1;
        }

        let mut pair_paths: HashMap<(Color, Color, usize, usize), Vec<[usize; 2]>> =
            HashMap::new();
        let mut pair_pos = HashMap::new();
        for c1 in 1..=k {
            for c2 in 1..=k {
                if c1 == c2 {
                    continue;
                }
                for &e in &by_color[c1 - 1] {
                    for &f in &incoming[c2 - 1][edges[e].source] {
                        let list = pair_paths
                            .entry((c1, c2, edges[e].range, edges[f].source))
                            .or_default();
                        pair_pos.insert([e, f], list.len());
                        list.push([e, f]);
                    }
                }
            }
        }

        Skeleton {
            k,
            vertices,
            vertex_index,
            edges,
            by_color,
            incoming,
            local_pos,
            pair_paths,
            pair_pos,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// Global indices of the color-`c` edges, in file order.
    pub fn color_edges(&self, c: Color) -> &[usize] {
        &self.by_color[c - 1]
    }

    /// Color-`c` edges with range `v`, in file order.
    pub fn incoming(&self, c: Color, v: usize) -> &[usize] {
        &self.incoming[c - 1][v]
    }

    /// Color-`c` edges with range `v` and source `w`, in file order: the
    /// basis of the coordinate space `C^{v E_c w}`.
    pub fn edges_between(&self, c: Color, v: usize, w: usize) -> Vec<usize> {
        self.incoming(c, v)
            .iter()
            .copied()
            .filter(|&e| self.edges[e].source == w)
            .collect()
    }

    /// Position of an edge inside [`Skeleton::edges_between`] for its own
    /// color, range and source.
    pub fn local_position(&self, edge: usize) -> usize {
        self.local_pos[edge]
    }

    pub fn check_color(&self, c: Color) -> Result<()> {
        if c == 0 || c > self.k {
            Err(Error::ColorOutOfRange { color: c, k: self.k })
        } else {
            Ok(())
        }
    }

    /// Paths `ef` with `color(e) = i`, `color(f) = j`, `range(e) = v` and
    /// `source(f) = w`, ordered by the positions of `e` then `f` within their
    /// color lists. This is the canonical basis of `C^{v E_i E_j w}`.
    pub fn two_color_paths(&self, i: Color, j: Color, v: usize, w: usize) -> &[[usize; 2]] {
        self.pair_paths
            .get(&(i, j, v, w))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn two_color_count(&self, i: Color, j: Color, v: usize, w: usize) -> usize {
        self.two_color_paths(i, j, v, w).len()
    }

    /// Position of a composable two-edge path in its canonical basis.
    pub fn pair_position(&self, path: [usize; 2]) -> Option<usize> {
        self.pair_pos.get(&path).copied()
    }

    /// Composable three-edge paths with the given color sequence from `w` to
    /// `v`, ordered lexicographically by edge positions.
    pub fn three_color_paths(&self, colors: [Color; 3], v: usize, w: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for &e in self.incoming(colors[0], v) {
            for &f in self.incoming(colors[1], self.edges[e].source) {
                for &g in self.incoming(colors[2], self.edges[f].source) {
                    if self.edges[g].source == w {
                        out.push([e, f, g]);
                    }
                }
            }
        }
        out
    }

    /// All composable triples `efg` with colors `colors[0], colors[1],
    /// colors[2]`, over every pair of endpoints, in lexicographic order.
    pub fn composable_triples(&self, colors: [Color; 3]) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for &e in self.color_edges(colors[0]) {
            for &f in self.incoming(colors[1], self.edges[e].source) {
                for &g in self.incoming(colors[2], self.edges[f].source) {
                    out.push([e, f, g]);
                }
            }
        }
        out
    }

    /// Keys `(i < j, v, w)` whose block `v E_i E_j w` is nonempty, in
    /// canonical order.
    pub fn block_keys(&self) -> Vec<BlockKey> {
        let mut keys = Vec::new();
        for i in 1..=self.k {
            for j in i + 1..=self.k {
                for v in 0..self.vertex_count() {
                    for w in 0..self.vertex_count() {
                        if self.two_color_count(i, j, v, w) > 0 {
                            keys.push(BlockKey::new(i, j, v, w));
                        }
                    }
                }
            }
        }
        keys
    }

    /// Color triples `i < j < l`.
    pub fn color_triples(&self) -> Vec<[Color; 3]> {
        let mut out = Vec::new();
        for i in 1..=self.k {
            for j in i + 1..=self.k {
                for l in j + 1..=self.k {
                    out.push([i, j, l]);
                }
            }
        }
        out
    }

    /// `M_c(v, w) = |v E_c w|`: rows indexed by range, columns by source.
    pub fn adjacency_matrix(&self, c: Color) -> Result<IntMatrix> {
        self.check_color(c)?;
        let n = self.vertex_count();
        let mut m = IntMatrix::zeros(n, n);
        for &e in self.color_edges(c) {
            let edge = &self.edges[e];
            m.add_at(edge.range, edge.source, 1);
        }
        Ok(m)
    }

    pub fn to_file(&self) -> SkeletonFile {
        SkeletonFile {
            k: self.k,
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    color: e.color,
                    range: self.vertices[e.range].clone(),
                    source: self.vertices[e.source].clone(),
                })
                .collect(),
        }
    }

    pub fn path_ids<const N: usize>(&self, path: [usize; N]) -> [String; N] {
        path.map(|e| self.edges[e].id.clone())
    }
}

/// Checks the two skeleton conditions: every vertex receives at least one
/// edge of each color, and `|v E_i E_j w| = |v E_j E_i w|` for all `i != j`.
pub fn validate_skeleton(s: &Skeleton) -> ValidationReport {
    let mut report = ValidationReport::new("skeleton");
    for v in 0..s.vertex_count() {
        for c in 1..=s.k() {
            if s.incoming(c, v).is_empty() {
                report.push(Violation::NoSources {
                    vertex: s.vertex_id(v).to_string(),
                    color: c,
                });
            }
        }
    }
    for i in 1..=s.k() {
        for j in i + 1..=s.k() {
            for v in 0..s.vertex_count() {
                for w in 0..s.vertex_count() {
                    let ij = s.two_color_count(i, j, v, w);
                    let ji = s.two_color_count(j, i, v, w);
                    if ij != ji {
                        report.push(Violation::PathCountMismatch {
                            v: s.vertex_id(v).to_string(),
                            w: s.vertex_id(w).to_string(),
                            i,
                            j,
                            ij_paths: ij,
                            ji_paths: ji,
                        });
                    }
                }
            }
        }
    }
    report
}

/// Free-function form of [`Skeleton::adjacency_matrix`].
pub fn adjacency_matrix(s: &Skeleton, c: Color) -> Result<IntMatrix> {
    s.adjacency_matrix(c)
}

/// Free-function form of [`Skeleton::two_color_paths`]; rejects `i == j` and
/// colors out of range.
pub fn two_color_paths(s: &Skeleton, i: Color, j: Color, v: usize, w: usize) -> Result<Vec<[usize; 2]>> {
    s.check_color(i)?;
    s.check_color(j)?;
    if i == j {
        return Err(Error::RepeatedColor(i));
    }
    Ok(s.two_color_paths(i, j, v, w).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertex(edges: &[(&str, usize, &str, &str)], k: usize) -> Result<Skeleton> {
        Skeleton::from_file(SkeletonFile {
            k,
            vertices: vec!["u".into(), "v".into()],
            edges: edges
                .iter()
                .map(|&(id, color, r, s)| EdgeRecord {
                    id: id.into(),
                    color,
                    range: r.into(),
                    source: s.into(),
                })
                .collect(),
        })
    }

    #[test]
    fn bouquets_validate() {
        assert!(validate_skeleton(&Skeleton::bouquet(&[1, 1])).ok);
        let s = Skeleton::bouquet(&[2, 3]);
        assert!(validate_skeleton(&s).ok);
        assert_eq!(s.two_color_count(1, 2, 0, 0), 6);
        assert_eq!(s.two_color_count(2, 1, 0, 0), 6);
    }

    #[test]
    fn color_one_source_is_reported() {
        // The only color-1 edge runs v -> u, so v receives no color-1 edge.
        let s = two_vertex(
            &[("a", 1, "u", "v"), ("b1", 2, "u", "u"), ("b2", 2, "v", "v")],
            2,
        )
        .unwrap();
        let report = validate_skeleton(&s);
        assert!(!report.ok);
        assert!(report.violations.contains(&Violation::NoSources {
            vertex: "v".into(),
            color: 1
        }));
    }

    #[test]
    fn adjacency_counts_by_range_then_source() {
        let s = two_vertex(
            &[("x", 1, "u", "u"), ("y", 1, "u", "v"), ("z", 1, "u", "v")],
            1,
        )
        .unwrap();
        let m = s.adjacency_matrix(1).unwrap();
        assert_eq!(m.to_i64_rows(), vec![vec![1, 2], vec![0, 0]]);

        let single = Skeleton::bouquet(&[3]);
        assert_eq!(single.adjacency_matrix(1).unwrap().to_i64_rows(), vec![vec![3]]);

        let empty = two_vertex(&[("x", 1, "u", "u")], 2).unwrap();
        assert_eq!(
            empty.adjacency_matrix(2).unwrap().to_i64_rows(),
            vec![vec![0, 0], vec![0, 0]]
        );
        assert!(matches!(
            s.adjacency_matrix(2),
            Err(Error::ColorOutOfRange { color: 2, k: 1 })
        ));
    }

    #[test]
    fn two_color_paths_are_lexicographic() {
        let s = Skeleton::bouquet(&[2, 1]);
        let ids: Vec<_> = s
            .two_color_paths(1, 2, 0, 0)
            .iter()
            .map(|&p| s.path_ids(p))
            .collect();
        assert_eq!(ids, vec![["c1_1", "c2_1"], ["c1_2", "c2_1"]]);

        let s = Skeleton::bouquet(&[2, 2]);
        let ids: Vec<_> = s
            .two_color_paths(1, 2, 0, 0)
            .iter()
            .map(|&p| s.path_ids(p))
            .collect();
        assert_eq!(
            ids,
            vec![
                ["c1_1", "c2_1"],
                ["c1_1", "c2_2"],
                ["c1_2", "c2_1"],
                ["c1_2", "c2_2"]
            ]
        );
        assert!(matches!(two_color_paths(&s, 1, 1, 0, 0), Err(Error::RepeatedColor(1))));
    }

    #[test]
    fn disconnected_pair_has_no_paths() {
        let s = two_vertex(
            &[("a", 1, "u", "u"), ("b", 1, "v", "v"), ("c", 2, "u", "u"), ("d", 2, "v", "v")],
            2,
        )
        .unwrap();
        assert!(validate_skeleton(&s).ok);
        assert!(s.two_color_paths(1, 2, 0, 1).is_empty());
    }

    #[test]
    fn malformed_files_are_errors() {
        assert!(matches!(
            two_vertex(&[("a", 1, "u", "nowhere")], 1),
            Err(Error::DanglingVertex { .. })
        ));
        assert!(matches!(
            two_vertex(&[("a", 1, "u", "u"), ("a", 1, "v", "v")], 1),
            Err(Error::DuplicateEdge { .. })
        ));
        // Same id in different colors is fine.
        assert!(two_vertex(&[("a", 1, "u", "u"), ("a", 2, "v", "v")], 2).is_ok());
        let dup = SkeletonFile {
            k: 1,
            vertices: vec!["u".into(), "u".into()],
            edges: vec![],
        };
        assert!(matches!(Skeleton::from_file(dup), Err(Error::DuplicateVertex(_))));
        assert!(Skeleton::from_json("{\"k\": 1, \"vertices\": [").is_err());
    }

    #[test]
    fn reparse_gives_identical_bases() {
        let s = Skeleton::bouquet(&[2, 3, 2]);
        let text = serde_json::to_string(&s.to_file()).unwrap();
        let t = Skeleton::from_json(&text).unwrap();
        assert_eq!(s, t);
        for (i, j) in [(1, 2), (2, 1), (1, 3), (3, 2)] {
            assert_eq!(s.two_color_paths(i, j, 0, 0), t.two_color_paths(i, j, 0, 0));
        }
    }
}
