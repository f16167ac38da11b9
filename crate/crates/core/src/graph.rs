//! Problem graphs, independent-set enumeration and the dual (median) graph.
//!
//! Vertex `j` corresponds to bit `j` of a [`Bitstring`]. When bitstrings are
//! printed, vertex 0 is the leftmost character, so the five-vertex set
//! `{x1, x3, x5}` prints as `10101`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::units::mhz_to_rad_per_us;

/// Largest vertex count a [`Graph`] can hold (one bit per vertex in a `u32`).
pub const MAX_VERTICES: usize = 32;
/// Largest vertex count for which all `2^n` subsets are enumerated.
pub const MAX_ENUMERATION_VERTICES: usize = 24;

/// Occupation word: bit `j` set means vertex `j` is excited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Bitstring(pub u32);

impl Bitstring {
    pub const EMPTY: Bitstring = Bitstring(0);

    pub fn from_vertices(vertices: &[usize]) -> Self {
        Bitstring(vertices.iter().fold(0u32, |acc, &v| acc | (1 << v)))
    }

    /// Parses a vertex-0-first string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        if s.len() > MAX_VERTICES {
            return Err(Error::invalid(format!("bitstring `{s}` longer than {MAX_VERTICES}")));
        }
        let mut word = 0u32;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => word |= 1 << j,
                _ => return Err(Error::invalid(format!("bad character `{c}` in bitstring `{s}`"))),
            }
        }
        Ok(Bitstring(word))
    }

    #[inline]
    pub fn contains(self, vertex: usize) -> bool {
        self.0 >> vertex & 1 == 1
    }

    #[inline]
    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn flip(self, vertex: usize) -> Self {
        Bitstring(self.0 ^ (1 << vertex))
    }

    pub fn vertices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&j| self.contains(j))
    }

    /// Vertex-0-first rendering over `n` characters.
    pub fn to_string_n(self, n: usize) -> String {
        (0..n).map(|j| if self.contains(j) { '1' } else { '0' }).collect()
    }

    pub fn fits(self, n: usize) -> bool {
        n >= 32 || self.0 >> n == 0
    }
}

/// Number of positions at which two bitstrings differ.
#[inline]
pub fn hamming_distance(a: Bitstring, b: Bitstring) -> u32 {
    (a.0 ^ b.0).count_ones()
}

/// Interaction strengths (rad/μs) for the two unit-disk neighbour shells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDiskParams {
    /// Lattice width in sites.
    pub width: usize,
    /// Lattice height in sites.
    pub height: usize,
    /// Nearest-neighbour strength (distance `a`).
    pub v_nn: f64,
    /// Diagonal next-nearest-neighbour strength (distance `√2 a`).
    pub v_nnn: f64,
}

impl UnitDiskParams {
    pub fn new(width: usize, height: usize) -> Self {
        UnitDiskParams {
            width,
            height,
            v_nn: mhz_to_rad_per_us(107.0),
            v_nnn: mhz_to_rad_per_us(13.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    positions: Option<Vec<[f64; 2]>>,
    edges: BTreeMap<(usize, usize), f64>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph from an explicit weighted edge list. Edge endpoints
    /// are unordered; duplicates are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::invalid(format!("vertex count must be in 1..={MAX_VERTICES}, got {n}")));
        }
        let mut map = BTreeMap::new();
        let mut neighbors = vec![0u32; n];
        for &(a, b, v) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) references a vertex outside 0..{n}")));
            }
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("edge ({a}, {b}) has non-positive strength {v}")));
            }
            let key = (a.min(b), a.max(b));
            if map.insert(key, v).is_some() {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
            neighbors[a] |= 1 << b;
            neighbors[b] |= 1 << a;
        }
        Ok(Graph {
            n,
            positions: None,
            edges: map,
            neighbors,
        })
    }

    /// Same as [`Graph::from_edges`] with every edge at unit strength.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
        Self::from_edges(n, &weighted)
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::from_edges(n, &[])
    }

    /// Path `0 - 1 - ... - (n-1)` with unit strengths.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
        Self::unweighted(n, &edges)
    }

    /// Unit-disk graph over lattice positions: pairs at distance `1` get
    /// `v_nn`, diagonal pairs at `√2` get `v_nnn`, anything farther is
    /// unconnected.
    pub fn from_positions(positions: Vec<[f64; 2]>, v_nn: f64, v_nnn: f64) -> Result<Self> {
        let edges = unit_disk_edges(&positions, v_nn, v_nnn);
        let mut g = Self::from_edges(positions.len(), &edges)?;
        g.positions = Some(positions);
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Edges as `(i, j, V_ij)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn interaction(&self, a: usize, b: usize) -> Option<f64> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    /// Neighbour mask of vertex `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u32 {
        self.neighbors[v]
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u32;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let fresh = self.neighbors[v] & !seen;
            seen |= fresh;
            queue.extend(Bitstring(fresh).vertices());
        }
        seen.count_ones() as usize == self.n
    }

    /// Interaction energy `Σ V_ij s_i s_j` of a configuration.
    pub fn interaction_energy(&self, s: Bitstring) -> f64 {
        self.edges
            .iter()
            .filter(|(&(a, b), _)| s.contains(a) && s.contains(b))
            .map(|(_, &v)| v)
            .sum()
    }

    /// Copy of this graph with every edge set to `v0`.
    pub fn with_uniform_interaction(&self, v0: f64) -> Result<Self> {
        if !(v0 > 0.0) {
            return Err(Error::invalid(format!("uniform interaction must be positive, got {v0}")));
        }
        let mut g = self.clone();
        for v in g.edges.values_mut() {
            *v = v0;
        }
        Ok(g)
    }

    /// Serialises to the line-oriented text format:
    /// `n <count>`, then `v <id> <x> <y>` per positioned vertex, then
    /// `e <i> <j> <V_ij in rad/us>` per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        if let Some(pos) = &self.positions {
            for (i, p) in pos.iter().enumerate() {
                let _ = writeln!(out, "v {i} {} {}", p[0], p[1]);
            }
        }
        for (a, b, v) in self.edges() {
            let _ = writeln!(out, "e {a} {b} {v}");
        }
        out
    }

    /// Parses the text format written by [`Graph::to_text`]. Blank lines and
    /// `#` comments are ignored. When vertex positions are given they must
    /// cover every vertex, and the edge list must match the unit-disk rule.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut positions: BTreeMap<usize, [f64; 2]> = BTreeMap::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .ok_or_else(|| err(format!("missing field {i} in `{line}`")))?
                    .parse::<f64>()
                    .map_err(|e| err(format!("bad number in `{line}`: {e}")))
            };
            let idx_field = |i: usize| -> Result<usize> {
                fields
                    .get(i)
                    .ok_or_else(|| err(format!("missing field {i} in `{line}`")))?
                    .parse::<usize>()
                    .map_err(|e| err(format!("bad index in `{line}`: {e}")))
            };
            match fields[0] {
                "n" if fields.len() == 2 => {
                    if n.is_some() {
                        return Err(err("duplicate `n` header".into()));
                    }
                    n = Some(idx_field(1)?);
                }
                "v" if fields.len() == 4 => {
                    let id = idx_field(1)?;
                    positions.insert(id, [num(2)?, num(3)?]);
                }
                "e" if fields.len() == 4 => edges.push((idx_field(1)?, idx_field(2)?, num(3)?)),
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
            if n.is_none() {
                return Err(err("`n <count>` header must come first".into()));
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing `n <count>` header".into(),
        })?;
        let mut g = Graph::from_edges(n, &edges)?;
        if !positions.is_empty() {
            if positions.len() != n || positions.keys().copied().ne(0..n) {
                return Err(Error::invalid("positions must be given for every vertex 0..n"));
            }
            let pos: Vec<_> = positions.into_values().collect();
            let expected: BTreeMap<_, _> = unit_disk_edges(&pos, 1.0, 1.0)
                .into_iter()
                .map(|(a, b, _)| ((a, b), ()))
                .collect();
            if expected.keys().ne(g.edges.keys()) {
                return Err(Error::invalid("edge list does not match the unit-disk rule for the given positions"));
            }
            g.positions = Some(pos);
        }
        Ok(g)
    }

    /// Graphviz rendering; vertices carry their lattice position when known.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            match &self.positions {
                Some(p) => {
                    let _ = writeln!(out, "  {v} [pos=\"{},{}!\"];", p[v][0], p[v][1]);
                }
                None => {
                    let _ = writeln!(out, "  {v};");
                }
            }
        }
        for (a, b, v) in self.edges() {
            let _ = writeln!(out, "  {a} -- {b} [label=\"{v:.4}\"];");
        }
        out.push_str("}\n");
        out
    }
}

fn unit_disk_edges(positions: &[[f64; 2]], v_nn: f64, v_nnn: f64) -> Vec<(usize, usize, f64)> {
    const EPS: f64 = 1e-9;
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            let d2 = dx * dx + dy * dy;
            if d2 <= 1.0 + EPS {
                edges.push((i, j, v_nn));
            } else if d2 <= 2.0 + EPS {
                edges.push((i, j, v_nnn));
            }
        }
    }
    edges
}

const MAX_GENERATION_ATTEMPTS: usize = 100_000;

/// Samples a connected unit-disk graph: `n` distinct sites drawn uniformly
/// without replacement from a `width x height` square lattice (spacing 1),
/// rejected and redrawn until connected. Vertices are labelled in row-major
/// site order.
pub fn generate_unit_disk(n: usize, params: &UnitDiskParams, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_unit_disk_with(n, params, &mut rng)
}

pub fn generate_unit_disk_with<R: rand::Rng + ?Sized>(
    n: usize,
    params: &UnitDiskParams,
    rng: &mut R,
) -> Result<Graph> {
    let sites = params.width * params.height;
    if n == 0 {
        return Err(Error::invalid("vertex count must be at least 1"));
    }
    if n > MAX_VERTICES {
        return Err(Error::Capacity {
            what: "graph",
            n,
            max: MAX_VERTICES,
        });
    }
    if sites < n {
        return Err(Error::invalid(format!(
            "{}x{} region has {sites} sites, cannot host {n} vertices",
            params.width, params.height
        )));
    }
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut chosen = index::sample(rng, sites, n).into_vec();
        chosen.sort_unstable();
        let positions: Vec<[f64; 2]> = chosen
            .iter()
            .map(|&s| [(s % params.width) as f64, (s / params.width) as f64])
            .collect();
        let g = Graph::from_positions(positions, params.v_nn, params.v_nnn)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::invalid(format!(
        "no connected sample found in {MAX_GENERATION_ATTEMPTS} attempts"
    )))
}

/// True iff no edge of `g` has both endpoints in `s`.
pub fn is_independent(g: &Graph, s: Bitstring) -> bool {
    s.vertices()
        .take_while(|&v| v < g.n())
        .all(|v| g.neighbors(v) & s.0 == 0)
}

/// Independent sets in ascending numeric order, with an inverse index.
#[derive(Clone, Debug, PartialEq)]
pub struct ISBasis {
    n: usize,
    states: Vec<Bitstring>,
    index: HashMap<Bitstring, usize>,
}

impl ISBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Bitstring] {
        &self.states
    }

    pub fn get(&self, i: usize) -> Bitstring {
        self.states[i]
    }

    pub fn index_of(&self, s: Bitstring) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn contains(&self, s: Bitstring) -> bool {
        self.index.contains_key(&s)
    }

    pub fn max_size(&self) -> u32 {
        self.states.iter().map(|s| s.count()).max().unwrap_or(0)
    }
}

fn check_enumeration_capacity(g: &Graph) -> Result<()> {
    if g.n() > MAX_ENUMERATION_VERTICES {
        return Err(Error::Capacity {
            what: "independent-set enumeration",
            n: g.n(),
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    Ok(())
}

/// All independent sets of `g` (including the empty set), ascending.
pub fn enumerate_independent_sets(g: &Graph) -> Result<ISBasis> {
    check_enumeration_capacity(g)?;
    // Branch on vertices in order; `forbidden` tracks neighbours of chosen ones.
    fn extend(g: &Graph, v: usize, set: u32, forbidden: u32, out: &mut Vec<Bitstring>) {
        if v == g.n() {
            out.push(Bitstring(set));
            return;
        }
        extend(g, v + 1, set, forbidden, out);
        if forbidden >> v & 1 == 0 {
            extend(g, v + 1, set | 1 << v, forbidden | g.neighbors(v), out);
        }
    }
    let mut states = Vec::new();
    extend(g, 0, 0, 0, &mut states);
    states.sort_unstable();
    let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Ok(ISBasis {
        n: g.n(),
        states,
        index,
    })
}

/// Maximum independent sets: their common size and the full list, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximumSets {
    pub size: u32,
    pub sets: Vec<Bitstring>,
}

impl MaximumSets {
    pub fn contains(&self, s: Bitstring) -> bool {
        self.sets.binary_search(&s).is_ok()
    }
}

pub fn maximum_independent_sets(g: &Graph) -> Result<MaximumSets> {
    let basis = enumerate_independent_sets(g)?;
    Ok(maximum_sets_of(&basis))
}

pub(crate) fn maximum_sets_of(basis: &ISBasis) -> MaximumSets {
    let size = basis.max_size();
    let sets = basis.states().iter().copied().filter(|s| s.count() == size).collect();
    MaximumSets { size, sets }
}

/// Graph on the independent sets of a source graph, with an edge between
/// two sets iff they differ in exactly one vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGraph {
    pub basis: ISBasis,
    /// Pairs of basis indices `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn vertex_count(&self) -> usize {
        self.basis.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == idx || b == idx).count()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn to_dot(&self) -> String {
        let n = self.basis.n();
        let mut out = String::from("graph dual {\n");
        for (i, s) in self.basis.states().iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{}\"];", s.to_string_n(n));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn dual_graph(g: &Graph) -> Result<DualGraph> {
    let basis = enumerate_independent_sets(g)?;
    Ok(dual_of(basis))
}

pub fn dual_of(basis: ISBasis) -> DualGraph {
    let mut edges = Vec::new();
    for (a, &s) in basis.states().iter().enumerate() {
        for v in 0..basis.n() {
            if !s.contains(v) {
                if let Some(b) = basis.index_of(s.flip(v)) {
                    edges.push((a, b));
                }
            }
        }
    }
    edges.sort_unstable();
    DualGraph { basis, edges }
}
