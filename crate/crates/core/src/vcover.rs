//! Minimum vertex covers, the constructive cover that proves
//! `alpha(G) <= (e(G) + 1) / 2`, and exhaustive checks of the cover bounds
//! over small connected graphs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::proxgraph::ProximityGraph;

/// Largest component the exact solver accepts.
pub const EXACT_VERTEX_CAP: usize = 64;

/// A finite graph without loops or multiple edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(domain(format!("loop at vertex {a}")));
            }
            if a.max(b) >= vertex_count {
                return Err(domain(format!(
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(domain("multiple edges are not allowed"));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &norm {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        Ok(SimpleGraph {
            vertex_count,
            edges: norm,
            adjacency,
        })
    }

    pub fn path(v: usize) -> Self {
        let edges: Vec<_> = (1..v).map(|i| (i - 1, i)).collect();
        Self::new(v, &edges).expect("path is simple")
    }

    pub fn cycle(v: usize) -> Self {
        assert!(v >= 3);
        let edges: Vec<_> = (0..v).map(|i| (i, (i + 1) % v)).collect();
        Self::new(v, &edges).expect("cycle is simple")
    }

    pub fn complete(v: usize) -> Self {
        let edges: Vec<_> = (0..v).flat_map(|i| ((i + 1)..v).map(move |j| (i, j))).collect();
        Self::new(v, &edges).expect("complete graph is simple")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("star is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_connected(&self) -> bool {
        let alive = vec![true; self.vertex_count];
        Residual::connected(&self.adjacency, &alive)
    }

    /// Vertex sets of the connected components, each ascending, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// `true` when every edge has an endpoint in `cover`.
    pub fn is_cover(&self, cover: &[usize]) -> bool {
        let mut mark = vec![false; self.vertex_count];
        for &v in cover {
            if v < self.vertex_count {
                mark[v] = true;
            }
        }
        self.edges.iter().all(|&(a, b)| mark[a] || mark[b])
    }

    /// Adjacency masks of the subgraph induced by `vertices` (at most 64),
    /// indexed by position in `vertices`.
    fn masks(&self, vertices: &[usize]) -> Vec<u64> {
        let mut local = vec![usize::MAX; self.vertex_count];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        vertices
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter(|&&w| local[w] != usize::MAX)
                    .fold(0u64, |m, &w| m | (1u64 << local[w]))
            })
            .collect()
    }
}

impl From<&ProximityGraph> for SimpleGraph {
    fn from(g: &ProximityGraph) -> Self {
        SimpleGraph::new(g.vertex_count(), g.edges()).expect("proximity graphs are simple")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    Exact,
    Constructive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub size: usize,
    pub cover: Vec<usize>,
    pub mode: CoverMode,
}

// ---------------------------------------------------------------------------
// exact solver on bitmasks

#[inline]
fn bit(v: u32) -> u64 {
    1u64 << v
}

/// Size of a greedy maximal matching: a lower bound on the cover number.
fn matching_bound(adj: &[u64], alive: u64) -> u32 {
    let mut free = alive;
    let mut size = 0;
    let mut rest = alive;
    while rest != 0 {
        let v = rest.trailing_zeros();
        rest &= rest - 1;
        if free & bit(v) == 0 {
            continue;
        }
        let partners = adj[v as usize] & free;
        if partners != 0 {
            let w = partners.trailing_zeros();
            free &= !(bit(v) | bit(w));
            size += 1;
        }
    }
    size
}

/// Cover number of a graph whose vertices all have degree exactly 2: a union
/// of cycles, each needing `ceil(len / 2)` vertices.
fn cycles_cover(adj: &[u64], mut alive: u64) -> u32 {
    let mut total = 0;
    while alive != 0 {
        let start = alive.trailing_zeros();
        let mut comp = bit(start);
        let mut frontier = bit(start);
        while frontier != 0 {
            let v = frontier.trailing_zeros();
            frontier &= frontier - 1;
            let fresh = adj[v as usize] & alive & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        total += comp.count_ones().div_ceil(2);
        alive &= !comp;
    }
    total
}

fn branch(adj: &[u64], mut alive: u64, mut current: u32, best: &mut u32) {
    // degree-0 and degree-1 reductions
    loop {
        let mut changed = false;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            if alive & bit(v) == 0 {
                continue;
            }
            let nbrs = adj[v as usize] & alive;
            match nbrs.count_ones() {
                0 => {
                    alive &= !bit(v);
                    changed = true;
                }
                1 => {
                    alive &= !(bit(v) | nbrs);
                    current += 1;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if current >= *best {
        return;
    }
    if alive == 0 {
        *best = current;
        return;
    }
    if current + matching_bound(adj, alive) >= *best {
        return;
    }
    let (mut pick, mut max_deg) = (0u32, 0u32);
    let mut rest = alive;
    while rest != 0 {
        let v = rest.trailing_zeros();
        rest &= rest - 1;
        let deg = (adj[v as usize] & alive).count_ones();
        if deg > max_deg {
            max_deg = deg;
            pick = v;
        }
    }
    if max_deg == 2 {
        let total = current + cycles_cover(adj, alive);
        if total < *best {
            *best = total;
        }
        return;
    }
    let nbrs = adj[pick as usize] & alive;
    branch(adj, alive & !bit(pick), current + 1, best);
    branch(adj, alive & !bit(pick) & !nbrs, current + nbrs.count_ones(), best);
}

/// Minimum cover size of the subgraph induced on `alive`.
pub(crate) fn cover_number_masks(adj: &[u64], alive: u64) -> u32 {
    let mut best = alive.count_ones() + 1;
    branch(adj, alive, 0, &mut best);
    best
}

/// Lexicographically smallest minimum cover of the masked graph.
fn lex_min_cover_masks(adj: &[u64]) -> u64 {
    let k = adj.len() as u32;
    let full = if k == 64 { u64::MAX } else { bit(k) - 1 };
    let alpha = cover_number_masks(adj, full);
    let (mut include, mut exclude) = (0u64, 0u64);
    for v in 0..k {
        let trial = include | bit(v);
        let forced = trial
            | (0..k)
                .filter(|&x| exclude & bit(x) != 0)
                .fold(0u64, |m, x| m | adj[x as usize]);
        let feasible =
            forced & exclude == 0 && forced.count_ones() + cover_number_masks(adj, full & !forced & !exclude) == alpha;
        if feasible {
            include = trial;
        } else {
            exclude |= bit(v);
        }
    }
    // every neighbour of an excluded vertex was included when reached
    include
}

/// Exact minimum vertex cover, solved per component by branch and bound.
/// Among all minimum covers the lexicographically smallest is returned.
pub fn min_vertex_cover(g: &SimpleGraph) -> Result<CoverResult> {
    let mut cover = Vec::new();
    for comp in g.components() {
        if comp.len() == 1 {
            continue;
        }
        if comp.len() > EXACT_VERTEX_CAP {
            return Err(Error::InstanceTooLarge {
                vertices: comp.len(),
                cap: EXACT_VERTEX_CAP,
            });
        }
        let chosen = lex_min_cover_masks(&g.masks(&comp));
        cover.extend(
            comp.iter()
                .enumerate()
                .filter(|(k, _)| chosen & bit(*k as u32) != 0)
                .map(|(_, &v)| v),
        );
    }
    cover.sort_unstable();
    Ok(CoverResult {
        size: cover.len(),
        cover,
        mode: CoverMode::Exact,
    })
}

/// Cover number `alpha(G)` without reconstructing a cover.
pub fn cover_number(g: &SimpleGraph) -> Result<usize> {
    let mut total = 0;
    for comp in g.components() {
        if comp.len() > EXACT_VERTEX_CAP {
            return Err(Error::InstanceTooLarge {
                vertices: comp.len(),
                cap: EXACT_VERTEX_CAP,
            });
        }
        let k = comp.len() as u32;
        let full = if k == 64 { u64::MAX } else { bit(k) - 1 };
        total += cover_number_masks(&g.masks(&comp), full) as usize;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// constructive cover

/// A graph with some vertices crossed out.
struct Residual<'a> {
    adjacency: &'a [Vec<usize>],
    alive: Vec<bool>,
}

impl<'a> Residual<'a> {
    fn degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().filter(|&&w| self.alive[w]).count()
    }

    fn live_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Crosses out `s` and its edges, then every vertex left isolated.
    fn cross_out(&self, s: usize) -> Vec<bool> {
        let mut alive = self.alive.clone();
        alive[s] = false;
        for &w in &self.adjacency[s] {
            if alive[w] && !self.adjacency[w].iter().any(|&x| alive[x]) {
                alive[w] = false;
            }
        }
        alive
    }

    /// Connectivity of the live vertices; no live vertices counts as connected.
    fn connected(adjacency: &[Vec<usize>], alive: &[bool]) -> bool {
        let Some(start) = alive.iter().position(|&a| a) else {
            return true;
        };
        let mut seen = vec![false; alive.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == alive.iter().filter(|&&a| a).count()
    }

    /// Smallest non-end vertex whose crossing out leaves a connected (or
    /// empty) remainder.
    fn nonend_vertex(&self) -> Option<usize> {
        (0..self.alive.len())
            .filter(|&v| self.alive[v] && self.degree(v) >= 2)
            .find(|&v| Self::connected(self.adjacency, &self.cross_out(v)))
    }
}

/// Non-end vertex whose removal, followed by removal of the isolated
/// vertices it leaves, keeps the graph connected. Smallest index wins.
pub fn nonend_removal_vertex(g: &SimpleGraph) -> Result<usize> {
    if g.vertex_count < 3 {
        return Err(domain(format!("need at least 3 vertices, got {}", g.vertex_count)));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let residual = Residual {
        adjacency: &g.adjacency,
        alive: vec![true; g.vertex_count],
    };
    residual
        .nonend_vertex()
        .ok_or_else(|| domain("no removable non-end vertex in a connected graph"))
}

/// Cover built by repeatedly crossing out a removable non-end vertex; each
/// step deletes at least two edges, so the size is at most `(e + 1) / 2`.
pub fn constructive_cover(g: &SimpleGraph) -> Result<CoverResult> {
    if g.edges.is_empty() {
        return Err(domain("constructive cover needs at least one edge"));
    }
    let mut alive: Vec<bool> = (0..g.vertex_count).map(|v| g.degree(v) > 0).collect();
    if alive.iter().filter(|&&a| a).count() != g.vertex_count || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut cover = Vec::new();
    loop {
        let residual = Residual {
            adjacency: &g.adjacency,
            alive,
        };
        match residual.live_count() {
            0 => break,
            2 => {
                // a single edge: take its smaller endpoint
                cover.push(residual.alive.iter().position(|&a| a).expect("two live vertices"));
                break;
            }
            _ => {
                let s = residual
                    .nonend_vertex()
                    .ok_or_else(|| domain("no removable non-end vertex in a connected graph"))?;
                cover.push(s);
                alive = residual.cross_out(s);
            }
        }
    }
    cover.sort_unstable();
    Ok(CoverResult {
        size: cover.len(),
        cover,
        mode: CoverMode::Constructive,
    })
}

// ---------------------------------------------------------------------------
// exhaustive verification

/// Largest `alpha / e` over connected graphs on `v` vertices:
/// `(v + 1) / (2v)` for odd `v`, `v / (2(v - 1))` for even `v`.
pub fn extremal_ratio(v: usize) -> (usize, usize) {
    if v % 2 == 1 {
        (v + 1, 2 * v)
    } else {
        (v, 2 * (v - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub vertices: usize,
    pub connected_graphs: u64,
    /// `alpha` and `e` of the first graph (in code order) attaining the max.
    pub max_alpha: usize,
    pub max_edges: usize,
    pub max_ratio: f64,
    pub expected_ratio: f64,
    pub matches_expected: bool,
    pub witness: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    HalfPlusOne,
    TwoThirds,
    ThreeFifths,
    Constructive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: BoundKind,
    pub vertices: usize,
    pub alpha: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverBoundsReport {
    pub max_vertices: usize,
    pub rows: Vec<RatioRow>,
    pub violations: Vec<Violation>,
}

impl CoverBoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.rows.iter().all(|r| r.matches_expected)
    }
}

fn edge_slots(v: usize) -> Vec<(usize, usize)> {
    (0..v).flat_map(|i| ((i + 1)..v).map(move |j| (i, j))).collect()
}

fn code_masks(v: usize, slots: &[(usize, usize)], code: u64) -> Vec<u64> {
    let mut adj = vec![0u64; v];
    for (k, &(a, b)) in slots.iter().enumerate() {
        if code & (1 << k) != 0 {
            adj[a] |= bit(b as u32);
            adj[b] |= bit(a as u32);
        }
    }
    adj
}

fn masks_connected(adj: &[u64]) -> bool {
    let full = bit(adj.len() as u32) - 1;
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let v = frontier.trailing_zeros();
        frontier &= frontier - 1;
        let fresh = adj[v as usize] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == full
}

#[derive(Default)]
struct ChunkTally {
    graphs: u64,
    best: Option<(usize, usize, u64)>,
    violations: Vec<(BoundKind, usize, u64)>,
}

fn check_code(v: usize, slots: &[(usize, usize)], code: u64, tally: &mut ChunkTally) {
    let adj = code_masks(v, slots, code);
    if !masks_connected(&adj) {
        return;
    }
    tally.graphs += 1;
    let e = code.count_ones() as usize;
    let alpha = cover_number_masks(&adj, bit(v as u32) - 1) as usize;
    if 2 * alpha > e + 1 {
        tally.violations.push((BoundKind::HalfPlusOne, alpha, code));
    }
    if e >= 2 && 3 * alpha > 2 * e {
        tally.violations.push((BoundKind::TwoThirds, alpha, code));
    }
    if e >= 4 && 5 * alpha > 3 * e {
        tally.violations.push((BoundKind::ThreeFifths, alpha, code));
    }
    let edges: Vec<(usize, usize)> = slots
        .iter()
        .enumerate()
        .filter(|(k, _)| code & (1 << k) != 0)
        .map(|(_, &p)| p)
        .collect();
    let graph = SimpleGraph::new(v, &edges).expect("enumerated graphs are simple");
    match constructive_cover(&graph) {
        Ok(c) if c.size <= e.div_ceil(2) && graph.is_cover(&c.cover) && alpha <= c.size => {}
        _ => tally.violations.push((BoundKind::Constructive, alpha, code)),
    }
    let better = match tally.best {
        None => true,
        Some((a, be, _)) => alpha * be > a * e,
    };
    if better {
        tally.best = Some((alpha, e, code));
    }
}

/// Enumerates every connected labeled graph on `2..=max_v` vertices and checks
/// `alpha <= (e+1)/2`, `alpha <= 2e/3` (e >= 2), `alpha <= 3e/5` (e >= 4), the
/// constructive cover bound, and the extremal ratio per vertex count.
pub fn verify_cover_bounds(max_v: usize) -> Result<CoverBoundsReport> {
    if !(3..=8).contains(&max_v) {
        return Err(domain(format!("max_v must be in 3..=8, got {max_v}")));
    }
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for v in 2..=max_v {
        let slots = edge_slots(v);
        let total: u64 = 1 << slots.len();
        let chunk = 1u64 << 12;
        let tallies: Vec<ChunkTally> = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut tally = ChunkTally::default();
                for code in (c * chunk)..((c + 1) * chunk).min(total) {
                    check_code(v, &slots, code, &mut tally);
                }
                tally
            })
            .collect();
        let mut graphs = 0;
        let mut best: Option<(usize, usize, u64)> = None;
        for t in tallies {
            graphs += t.graphs;
            if let Some((a, e, code)) = t.best {
                if best.is_none_or(|(ba, be, _)| a * be > ba * e) {
                    best = Some((a, e, code));
                }
            }
            for (kind, alpha, code) in t.violations {
                violations.push(Violation {
                    kind,
                    vertices: v,
                    alpha,
                    edges: decode(&slots, code),
                });
            }
        }
        let (alpha, e, code) = best.expect("every v >= 2 has a connected graph");
        let (num, den) = extremal_ratio(v);
        rows.push(RatioRow {
            vertices: v,
            connected_graphs: graphs,
            max_alpha: alpha,
            max_edges: e,
            max_ratio: alpha as f64 / e as f64,
            expected_ratio: num as f64 / den as f64,
            matches_expected: alpha * den == num * e,
            witness: decode(&slots, code),
        });
    }
    Ok(CoverBoundsReport {
        max_vertices: max_v,
        rows,
        violations,
    })
}

fn decode(slots: &[(usize, usize)], code: u64) -> Vec<(usize, usize)> {
    slots
        .iter()
        .enumerate()
        .filter(|(k, _)| code & (1 << k) != 0)
        .map(|(_, &p)| p)
        .collect()
}
