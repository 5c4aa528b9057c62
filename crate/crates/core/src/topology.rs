//! The decision variable: a symmetric, zero-diagonal binary adjacency matrix.
//!
//! Only the strict upper triangle is stored, one bit per unordered pair, so
//! `x_ij = x_ji` and `x_ii = 0` hold for every value of the type.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

pub const TOPOLOGY_SCHEMA: &str = "mnsdp-topology/1";

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    n: usize,
    bits: Vec<u64>,
}

/// Number of unordered pairs over `n` nodes.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Topology {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            bits: vec![0; pair_count(n).div_ceil(64)],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut t = Self::empty(n);
        let m = pair_count(n);
        for w in 0..t.bits.len() {
            let remaining = m - w * 64;
            t.bits[w] = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        t
    }

    /// Builds a topology from an edge list. Each pair may appear once, in
    /// either orientation.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut t = Self::empty(n);
        for &(i, j) in edges {
            t.check_pair(i, j)?;
            if t.has_edge(i, j) {
                return Err(Error::param(format!("duplicate edge ({i}, {j})")));
            }
            t.set_edge(i, j, true)?;
        }
        Ok(t)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Index of the unordered pair `{i, j}` in the packed upper triangle.
    #[inline]
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(a != b && b < self.n);
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Inverse of [`pair_index`](Self::pair_index).
    pub fn pair_at(&self, mut idx: usize) -> (usize, usize) {
        let mut i = 0;
        let mut row = self.n - 1;
        while idx >= row {
            idx -= row;
            i += 1;
            row -= 1;
        }
        (i, i + 1 + idx)
    }

    #[inline]
    pub fn get_pair(&self, idx: usize) -> bool {
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub fn set_pair(&mut self, idx: usize, value: bool) {
        let mask = 1u64 << (idx % 64);
        if value {
            self.bits[idx / 64] |= mask;
        } else {
            self.bits[idx / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip_pair(&mut self, idx: usize) {
        self.bits[idx / 64] ^= 1u64 << (idx % 64);
    }

    /// `x_ij`; the diagonal always reads 0.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.get_pair(self.pair_index(i, j))
    }

    pub fn set_edge(&mut self, i: usize, j: usize, value: bool) -> Result<()> {
        self.check_pair(i, j)?;
        let idx = self.pair_index(i, j);
        self.set_pair(idx, value);
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::param(format!(
                "diagonal entry ({i}, {i}) is fixed at 0"
            )));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::param(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.n
            )));
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.has_edge(i, j))
    }

    /// Neighbours of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.n {
            return Err(Error::param(format!(
                "node {i} out of range for {} nodes",
                self.n
            )));
        }
        Ok((0..self.n).filter(|&j| self.has_edge(i, j)).collect())
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.has_edge(i, j)).count()
    }

    /// Total circuit length `Y = Σ_ij x_ij D_ij / 2`, summed once per stored pair.
    pub fn total_length(&self, inst: &Instance) -> Result<f64> {
        if inst.n() != self.n {
            return Err(Error::Mismatch(format!(
                "topology has {} nodes, instance has {}",
                self.n,
                inst.n()
            )));
        }
        Ok(self.total_length_unchecked(inst))
    }

    pub(crate) fn total_length_unchecked(&self, inst: &Instance) -> f64 {
        let mut total = 0.0;
        for (i, j) in self.edges() {
            total += inst.distance(i, j);
        }
        total
    }

    /// Row bitsets of the full symmetric matrix.
    pub(crate) fn adjacency(&self) -> Adjacency {
        let mut adj = Adjacency::new(self.n);
        for (w, &word) in self.bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let idx = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                let (i, j) = self.pair_at(idx);
                adj.set(i, j, true);
            }
        }
        adj
    }

    pub fn to_file(&self, instance_name: &str) -> TopologyFile {
        TopologyFile {
            schema: TOPOLOGY_SCHEMA.to_string(),
            instance: instance_name.to_string(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn to_json(&self, instance_name: &str) -> String {
        serde_json::to_string_pretty(&self.to_file(instance_name)).expect("topology serializes")
    }

    /// Graphviz rendering with node classes, fixed positions and edge lengths.
    pub fn to_dot(&self, inst: &Instance) -> Result<String> {
        if inst.n() != self.n {
            return Err(Error::Mismatch(format!(
                "topology has {} nodes, instance has {}",
                self.n,
                inst.n()
            )));
        }
        let mut out = String::new();
        writeln!(out, "graph \"{}\" {{", inst.name().replace('"', "\\\"")).unwrap();
        writeln!(out, "  node [shape=circle];").unwrap();
        for node in inst.nodes() {
            writeln!(
                out,
                "  {} [label=\"{} (K={})\", pos=\"{:.4},{:.4}!\"];",
                node.id,
                node.id,
                node.k_class.k(),
                node.x,
                node.y
            )
            .unwrap();
        }
        for (i, j) in self.edges() {
            writeln!(out, "  {i} -- {j} [label=\"{:.2}\"];", inst.distance(i, j)).unwrap();
        }
        out.push_str("}\n");
        Ok(out)
    }
}

impl std::fmt::Debug for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Topology")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// On-disk topology (`mnsdp-topology/1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub schema: String,
    pub instance: String,
    pub edges: Vec<[usize; 2]>,
}

impl TopologyFile {
    /// Validates the file against `inst` and builds the topology.
    pub fn into_topology(self, inst: &Instance) -> Result<Topology> {
        if self.schema != TOPOLOGY_SCHEMA {
            return Err(Error::format(
                "schema",
                format!("expected \"{TOPOLOGY_SCHEMA}\", found \"{}\"", self.schema),
            ));
        }
        if self.instance != inst.name() {
            return Err(Error::Mismatch(format!(
                "topology belongs to instance \"{}\", not \"{}\"",
                self.instance,
                inst.name()
            )));
        }
        let n = inst.n();
        let mut t = Topology::empty(n);
        for (pos, &[i, j]) in self.edges.iter().enumerate() {
            if i >= j {
                return Err(Error::format(
                    format!("edges[{pos}]"),
                    format!("expected i < j, found [{i}, {j}]"),
                ));
            }
            if j >= n {
                return Err(Error::Mismatch(format!(
                    "edges[{pos}] = [{i}, {j}] references a node beyond the instance's {n} nodes"
                )));
            }
            if t.has_edge(i, j) {
                return Err(Error::format(
                    format!("edges[{pos}]"),
                    format!("duplicate edge [{i}, {j}]"),
                ));
            }
            t.set_edge(i, j, true)?;
        }
        Ok(t)
    }
}

pub fn parse_topology(json: &str, inst: &Instance) -> Result<Topology> {
    let file: TopologyFile =
        serde_json::from_str(json).map_err(|e| Error::format("topology", e.to_string()))?;
    file.into_topology(inst)
}

pub fn save_topology(t: &Topology, inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut json = t.to_json(inst.name());
    json.push('\n');
    fs::write(path, json)?;
    Ok(())
}

pub fn load_topology(path: impl AsRef<Path>, inst: &Instance) -> Result<Topology> {
    parse_topology(&fs::read_to_string(path)?, inst)
}

/// Full-matrix row bitsets, used by the evaluators for fast neighbourhood
/// intersections.
#[derive(Clone, Debug)]
pub(crate) struct Adjacency {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Adjacency {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: bool) {
        let (wi, wj) = (i * self.words + j / 64, j * self.words + i / 64);
        let (mi, mj) = (1u64 << (j % 64), 1u64 << (i % 64));
        if value {
            self.rows[wi] |= mi;
            self.rows[wj] |= mj;
        } else {
            self.rows[wi] &= !mi;
            self.rows[wj] &= !mj;
        }
    }

    pub(crate) fn to_topology(&self) -> Topology {
        let mut t = Topology::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has(i, j) {
                    let idx = t.pair_index(i, j);
                    t.set_pair(idx, true);
                }
            }
        }
        t
    }
}
