//! Problem instances and the MNSDP-LIB style benchmark generator.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::constraints::evaluate;
use crate::error::{Error, Result};
use crate::rng::{self, TAG_GENERATOR};
use crate::topology::Topology;

pub const INSTANCE_SCHEMA: &str = "mnsdp-instance/1";

/// Reliability class: a class-`K` node must survive any `K` node failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    One,
    Two,
    Three,
}

impl NodeClass {
    pub const ALL: [NodeClass; 3] = [NodeClass::One, NodeClass::Two, NodeClass::Three];

    pub fn k(self) -> u8 {
        match self {
            NodeClass::One => 1,
            NodeClass::Two => 2,
            NodeClass::Three => 3,
        }
    }

    pub fn from_k(k: u64) -> Option<Self> {
        match k {
            1 => Some(NodeClass::One),
            2 => Some(NodeClass::Two),
            3 => Some(NodeClass::Three),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub generation: f64,
    pub load: f64,
    pub k_class: NodeClass,
}

impl Node {
    /// `G_i - L_i`, the power a healthy node can export to failed neighbours.
    #[inline]
    pub fn surplus(&self) -> f64 {
        self.generation - self.load
    }
}

/// An immutable problem instance with its derived Euclidean distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    nodes: Vec<Node>,
    ratio: f64,
    seed: u64,
    distance: Vec<f64>,
    surplus: Vec<f64>,
}

impl Instance {
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, ratio: f64, seed: u64) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::param(format!(
                "an instance needs at least 3 nodes, got {n}"
            )));
        }
        if !ratio.is_finite() {
            return Err(Error::param("ratio must be finite"));
        }
        for (pos, node) in nodes.iter().enumerate() {
            if node.id != pos {
                return Err(Error::param(format!(
                    "node at position {pos} has id {}",
                    node.id
                )));
            }
            for (what, v) in [
                ("x", node.x),
                ("y", node.y),
                ("generation", node.generation),
                ("load", node.load),
            ] {
                if !v.is_finite() {
                    return Err(Error::param(format!("node {pos}: {what} is not finite")));
                }
            }
            if node.generation < 0.0 || node.load < 0.0 {
                return Err(Error::param(format!(
                    "node {pos}: generation and load must be nonnegative"
                )));
            }
        }
        let mut distance = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy) = (nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
                let d = (dx * dx + dy * dy).sqrt();
                distance[i * n + j] = d;
                distance[j * n + i] = d;
            }
        }
        let surplus = nodes.iter().map(Node::surplus).collect();
        Ok(Self {
            name: name.into(),
            nodes,
            ratio,
            seed,
            distance,
            surplus,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance[i * self.n() + j]
    }

    #[inline]
    pub fn surplus(&self, i: usize) -> f64 {
        self.surplus[i]
    }

    pub(crate) fn surpluses(&self) -> &[f64] {
        &self.surplus
    }

    #[inline]
    pub fn load(&self, i: usize) -> f64 {
        self.nodes[i].load
    }

    #[inline]
    pub fn class(&self, i: usize) -> NodeClass {
        self.nodes[i].k_class
    }

    /// Node counts per class `(n1, n2, n3)`.
    pub fn composition(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for node in &self.nodes {
            c[node.k_class.k() as usize - 1] += 1;
        }
        c
    }

    /// Whether the complete graph satisfies every reliability constraint.
    pub fn complete_graph_feasible(&self) -> bool {
        evaluate(&Topology::complete(self.n()), self)
            .map(|e| e.feasible)
            .unwrap_or(false)
    }

    pub fn to_json(&self) -> String {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|nd| {
                json!({
                    "id": nd.id,
                    "x": nd.x,
                    "y": nd.y,
                    "generation": nd.generation,
                    "load": nd.load,
                    "k": nd.k_class.k(),
                })
            })
            .collect();
        let doc = json!({
            "schema": INSTANCE_SCHEMA,
            "name": self.name,
            "n": self.n(),
            "ratio": self.ratio,
            "seed": self.seed,
            "nodes": nodes,
        });
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| Error::format("instance", e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::format("instance", "expected a JSON object"))?;

        let schema = str_field(obj, "schema", "schema")?;
        if schema != INSTANCE_SCHEMA {
            return Err(Error::format(
                "schema",
                format!("expected \"{INSTANCE_SCHEMA}\", found \"{schema}\""),
            ));
        }
        let name = str_field(obj, "name", "name")?.to_string();
        let n = uint_field(obj, "n", "n")? as usize;
        let ratio = num_field(obj, "ratio", "ratio")?;
        let seed = uint_field(obj, "seed", "seed")?;
        let raw_nodes = obj
            .get("nodes")
            .ok_or_else(|| Error::format("nodes", "missing field"))?
            .as_array()
            .ok_or_else(|| Error::format("nodes", "expected an array"))?;
        if raw_nodes.len() != n {
            return Err(Error::format(
                "n",
                format!("declares {n} nodes but \"nodes\" has {}", raw_nodes.len()),
            ));
        }
        if n < 3 {
            return Err(Error::format(
                "n",
                format!("at least 3 nodes required, got {n}"),
            ));
        }

        let mut nodes = Vec::with_capacity(n);
        for (pos, raw) in raw_nodes.iter().enumerate() {
            let path = |f: &str| format!("nodes[{pos}].{f}");
            let o = raw
                .as_object()
                .ok_or_else(|| Error::format(format!("nodes[{pos}]"), "expected an object"))?;
            let id = uint_field(o, "id", &path("id"))? as usize;
            if id != pos {
                return Err(Error::format(
                    path("id"),
                    format!("expected {pos}, got {id}"),
                ));
            }
            let x = num_field(o, "x", &path("x"))?;
            let y = num_field(o, "y", &path("y"))?;
            let generation = num_field(o, "generation", &path("generation"))?;
            let load = num_field(o, "load", &path("load"))?;
            for (f, v) in [("generation", generation), ("load", load)] {
                if v < 0.0 {
                    return Err(Error::format(
                        path(f),
                        format!("must be nonnegative, got {v}"),
                    ));
                }
            }
            let k = uint_field(o, "k", &path("k"))?;
            let k_class = NodeClass::from_k(k)
                .ok_or_else(|| Error::format(path("k"), format!("expected 1, 2 or 3, got {k}")))?;
            nodes.push(Node {
                id,
                x,
                y,
                generation,
                load,
                k_class,
            });
        }
        Instance::new(name, nodes, ratio, seed)
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(path, "missing field"))
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str> {
    field(obj, key, path)?
        .as_str()
        .ok_or_else(|| Error::format(path, "expected a string"))
}

fn num_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    let v = field(obj, key, path)?
        .as_f64()
        .ok_or_else(|| Error::format(path, "expected a number"))?;
    if !v.is_finite() {
        return Err(Error::format(path, "expected a finite number"));
    }
    Ok(v)
}

fn uint_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<u64> {
    field(obj, key, path)?
        .as_u64()
        .ok_or_else(|| Error::format(path, "expected a nonnegative integer"))
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut text = inst.to_json();
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

/// Benchmark generator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub nodes: usize,
    /// Generation/consumption ratio `r`; loads are `G_i / r`.
    pub ratio: f64,
    pub seed: u64,
    /// Fixed class counts `(n1, n2, n3)`; uniform random classes otherwise.
    pub composition: Option<[usize; 3]>,
    /// Generation values are drawn uniformly from this range.
    pub generation_range: (f64, f64),
    /// Redraws allowed when the complete graph turns out infeasible.
    pub max_attempts: usize,
    pub name: Option<String>,
}

impl GeneratorConfig {
    pub fn new(nodes: usize, ratio: f64, seed: u64) -> Self {
        Self {
            nodes,
            ratio,
            seed,
            composition: None,
            generation_range: (10.0, 100.0),
            max_attempts: 100,
            name: None,
        }
    }

    pub fn with_composition(mut self, composition: [usize; 3]) -> Self {
        self.composition = Some(composition);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 3 {
            return Err(Error::param(format!(
                "node count must be at least 3, got {}",
                self.nodes
            )));
        }
        if !(self.ratio.is_finite() && self.ratio > 1.0) {
            return Err(Error::param(format!(
                "ratio must be > 1, got {}",
                self.ratio
            )));
        }
        if let Some(c) = self.composition {
            if c.iter().sum::<usize>() != self.nodes {
                return Err(Error::param(format!(
                    "composition {c:?} does not sum to {} nodes",
                    self.nodes
                )));
            }
        }
        let (lo, hi) = self.generation_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(Error::param(format!(
                "invalid generation range [{lo}, {hi}]"
            )));
        }
        if self.max_attempts == 0 {
            return Err(Error::param("max_attempts must be at least 1"));
        }
        Ok(())
    }

    pub fn default_name(&self) -> String {
        format!("MNSDP-{}-r{}-s{}", self.nodes, self.ratio, self.seed)
    }

    /// Generates the instance; redraws with a fresh sub-stream until the
    /// complete graph is feasible or `max_attempts` is exhausted.
    pub fn generate(&self) -> Result<Instance> {
        self.validate()?;
        let name = self.name.clone().unwrap_or_else(|| self.default_name());
        for attempt in 0..self.max_attempts {
            let inst = self.draw(&name, attempt as u64)?;
            if inst.complete_graph_feasible() {
                return Ok(inst);
            }
        }
        Err(Error::Unsatisfiable(format!(
            "no draw out of {} had a feasible complete graph (n={}, r={}, seed={})",
            self.max_attempts, self.nodes, self.ratio, self.seed
        )))
    }

    pub(crate) fn draw(&self, name: &str, attempt: u64) -> Result<Instance> {
        let n = self.nodes;
        let mut rng = rng::stream(self.seed, &[TAG_GENERATOR, attempt]);
        let positions: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0)))
            .collect();
        let (lo, hi) = self.generation_range;
        let generation: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        let classes: Vec<NodeClass> = match self.composition {
            None => (0..n)
                .map(|_| NodeClass::ALL[rng.gen_range(0..3)])
                .collect(),
            Some(c) => {
                let mut pool: Vec<NodeClass> = NodeClass::ALL
                    .iter()
                    .zip(c)
                    .flat_map(|(&cls, count)| std::iter::repeat_n(cls, count))
                    .collect();
                pool.shuffle(&mut rng);
                pool
            }
        };
        let nodes = (0..n)
            .map(|id| Node {
                id,
                x: positions[id].0,
                y: positions[id].1,
                generation: generation[id],
                load: generation[id] / self.ratio,
                k_class: classes[id],
            })
            .collect();
        Instance::new(name, nodes, self.ratio, self.seed)
    }
}

/// Generates an instance with the default generation range.
pub fn generate_instance(
    n: usize,
    ratio: f64,
    seed: u64,
    composition: Option<[usize; 3]>,
) -> Result<Instance> {
    let mut cfg = GeneratorConfig::new(n, ratio, seed);
    cfg.composition = composition;
    cfg.generate()
}
