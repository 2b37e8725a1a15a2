//! The proximity graph `G_d(sigma)` and its component census.
//!
//! Neighbor search bins points into a grid of cells with side at least `d`,
//! so every edge joins points in the same or adjacent cells. On the torus the
//! grid wraps; when it has fewer than three cells along an axis the wrapped
//! neighbours coincide and are deduplicated.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pointfield::{Convention, PointConfiguration};

/// Upper bound on the number of grid cells; coarser grids are still exact.
const MAX_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphOptions {
    /// Allow `d >= N` by falling back to an all-pairs scan.
    pub dense_fallback: bool,
}

/// Vertices are point indices; `(i, j)` with `i < j` is an edge iff the two
/// points are at distance `<= d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityGraph {
    threshold: f64,
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl ProximityGraph {
    /// Graph from an explicit edge list. Edges are normalized to `i < j`,
    /// sorted and deduplicated; loops are rejected.
    pub fn from_edges(vertex_count: usize, threshold: f64, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(domain(format!("self-loop at vertex {a}")));
            }
            if a.max(b) >= vertex_count {
                return Err(domain(format!(
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &norm {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        Ok(ProximityGraph {
            threshold,
            vertex_count,
            edges: norm,
            adjacency,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `M(d, sigma)`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edge-list export: header then one `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# vertices={} threshold={}\n", self.vertex_count, self.threshold);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty edge list".into(),
        })?;
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| bad(1, "header must start with `#`".into()))?;
        let (mut vertices, mut threshold) = (None, None);
        for field in body.split_whitespace() {
            match field.split_once('=') {
                Some(("vertices", v)) => vertices = Some(v.parse::<usize>().map_err(|e| bad(1, e.to_string()))?),
                Some(("threshold", v)) => threshold = Some(v.parse::<f64>().map_err(|e| bad(1, e.to_string()))?),
                _ => return Err(bad(1, format!("unexpected header field `{field}`"))),
            }
        }
        let vertices = vertices.ok_or_else(|| bad(1, "header lacks `vertices=`".into()))?;
        let threshold = threshold.unwrap_or(f64::NAN);
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<usize> {
                parts
                    .next()
                    .ok_or_else(|| bad(idx + 1, "expected two vertex indices".into()))?
                    .parse::<usize>()
                    .map_err(|e| bad(idx + 1, e.to_string()))
            };
            let a = next()?;
            let b = next()?;
            if parts.next().is_some() {
                return Err(bad(idx + 1, "trailing fields".into()));
            }
            edges.push((a, b));
        }
        Self::from_edges(vertices, threshold, &edges)
    }
}

/// Builds `G_d(sigma)` with cell-list neighbor search.
pub fn build_graph(config: &PointConfiguration, d: f64) -> Result<ProximityGraph> {
    build_graph_with(config, d, GraphOptions::default())
}

pub fn build_graph_with(config: &PointConfiguration, d: f64, options: GraphOptions) -> Result<ProximityGraph> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(domain(format!("threshold must be positive, got {d}")));
    }
    let half_side = config.box_spec().half_side();
    let edges = if d >= half_side {
        if !options.dense_fallback {
            return Err(Error::ThresholdTooLarge { d, half_side });
        }
        all_pairs_edges(config, d)
    } else {
        cell_list_edges(config, d)
    };
    ProximityGraph::from_edges(config.len(), d, &edges)
}

/// Reference all-pairs scan.
pub fn all_pairs_edges(config: &PointConfiguration, d: f64) -> Vec<(usize, usize)> {
    let n = config.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if config.distance(i, j) <= d {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn cell_list_edges(config: &PointConfiguration, d: f64) -> Vec<(usize, usize)> {
    let bx = config.box_spec();
    let dim = bx.dim();
    let wraps = bx.convention() == Convention::Torus;
    let side = bx.side();

    // cells per axis: as many as fit with side >= d, capped in total
    let mut per_axis = ((side / d).floor() as usize).max(1);
    while per_axis > 1 && ((per_axis as f64).powi(dim as i32) > MAX_CELLS as f64 || side / (per_axis as f64) < d) {
        per_axis -= 1;
    }
    let cell_side = side / per_axis as f64;

    let cell_coord = |x: f64| -> usize {
        let c = ((x + bx.half_side()) / cell_side).floor() as isize;
        c.clamp(0, per_axis as isize - 1) as usize
    };
    let flat = |coords: &[usize]| coords.iter().fold(0usize, |acc, &c| acc * per_axis + c);

    let n = config.len();
    let cell_count = per_axis.pow(dim as u32);
    let mut cell_of = Vec::with_capacity(n);
    let mut counts = vec![0usize; cell_count + 1];
    let mut coords_buf = vec![0usize; dim];
    for p in config.points() {
        for (k, &x) in p.iter().enumerate() {
            coords_buf[k] = cell_coord(x);
        }
        let c = flat(&coords_buf);
        cell_of.push(c);
        counts[c + 1] += 1;
    }
    for c in 0..cell_count {
        counts[c + 1] += counts[c];
    }
    let starts = counts.clone();
    let mut fill = counts;
    let mut members = vec![0usize; n];
    for (i, &c) in cell_of.iter().enumerate() {
        members[fill[c]] = i;
        fill[c] += 1;
    }

    let offsets: Vec<Vec<isize>> = (0..3usize.pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let o = (code % 3) as isize - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();

    let mut edges = Vec::new();
    let mut neighbor_cells = Vec::with_capacity(offsets.len());
    let mut base = vec![0usize; dim];
    let mut shifted = vec![0usize; dim];
    for cell in 0..cell_count {
        if starts[cell] == starts[cell + 1] {
            continue;
        }
        let mut rem = cell;
        for k in (0..dim).rev() {
            base[k] = rem % per_axis;
            rem /= per_axis;
        }
        neighbor_cells.clear();
        'offsets: for off in &offsets {
            for k in 0..dim {
                let c = base[k] as isize + off[k];
                shifted[k] = if wraps {
                    c.rem_euclid(per_axis as isize) as usize
                } else if c < 0 || c >= per_axis as isize {
                    continue 'offsets;
                } else {
                    c as usize
                };
            }
            let other = flat(&shifted);
            // each unordered cell pair is visited once, from the lower index
            if other >= cell {
                neighbor_cells.push(other);
            }
        }
        neighbor_cells.sort_unstable();
        neighbor_cells.dedup();
        for &other in &neighbor_cells {
            for &i in &members[starts[cell]..starts[cell + 1]] {
                for &j in &members[starts[other]..starts[other + 1]] {
                    if (other != cell || i < j) && config.distance(i, j) <= d {
                        edges.push((i.min(j), i.max(j)));
                    }
                }
            }
        }
    }
    edges
}

/// `m(x, d, sigma)`: the number of other points within distance `d` of vertex `x`.
pub fn local_count(x: usize, graph: &ProximityGraph) -> Result<usize> {
    if x >= graph.vertex_count {
        return Err(domain(format!(
            "vertex {x} out of range for {} vertices",
            graph.vertex_count
        )));
    }
    Ok(graph.adjacency[x].len())
}

/// A connected component: its vertices in ascending order and its edge count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: usize,
}

/// Edge count `M` with the isolated-edge (`M1`), 3-vertex path (`M2`) and
/// isolated-triangle (`M3`) component counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    /// Every component, isolated vertices included, ordered by smallest vertex.
    pub components: Vec<Component>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

pub fn component_census(graph: &ProximityGraph) -> ComponentCensus {
    let n = graph.vertex_count;
    let mut uf = UnionFind::new(n);
    for &(a, b) in &graph.edges {
        uf.union(a, b);
    }
    // components are numbered in order of their smallest vertex
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Component> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = components.len();
            components.push(Component {
                vertices: Vec::new(),
                edges: 0,
            });
        }
        slot[v] = root_slot[r];
        components[slot[v]].vertices.push(v);
    }
    for &(a, _) in &graph.edges {
        components[slot[a]].edges += 1;
    }
    let (mut m1, mut m2, mut m3) = (0, 0, 0);
    for c in &components {
        match (c.vertices.len(), c.edges) {
            (2, 1) => m1 += 1,
            (3, 2) => m2 += 1,
            (3, 3) => m3 += 1,
            _ => {}
        }
    }
    ComponentCensus {
        m: graph.edges.len(),
        m1,
        m2,
        m3,
        components,
    }
}

impl ComponentCensus {
    /// Components that carry at least one edge.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.edges > 0)
    }
}
