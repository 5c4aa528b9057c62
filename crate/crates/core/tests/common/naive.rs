//! Straightforward reference evaluator built from the constraint definitions
//! on a dense boolean matrix. It shares no code with the library beyond
//! reading node data, and sums every term in ascending index order.

#![allow(dead_code)]

use mnsdp_core::{Instance, Topology};

pub struct Naive {
    pub n: usize,
    pub x: Vec<Vec<bool>>,
    pub g: Vec<f64>,
    pub load: Vec<f64>,
    pub k: Vec<u8>,
    pub d: Vec<Vec<f64>>,
}

impl Naive {
    pub fn new(t: &Topology, inst: &Instance) -> Self {
        let n = inst.n();
        let nodes = inst.nodes();
        let mut x = vec![vec![false; n]; n];
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    x[i][j] = t.has_edge(i, j);
                    let dx = nodes[i].x - nodes[j].x;
                    let dy = nodes[i].y - nodes[j].y;
                    d[i][j] = (dx * dx + dy * dy).sqrt();
                }
            }
        }
        Naive {
            n,
            x,
            g: nodes.iter().map(|v| v.generation - v.load).collect(),
            load: nodes.iter().map(|v| v.load).collect(),
            k: nodes.iter().map(|v| v.k_class.k()).collect(),
            d,
        }
    }

    pub fn s(&self, i: usize) -> f64 {
        let mut total = 0.0;
        for j in 0..self.n {
            if j != i && self.x[i][j] {
                total += self.g[j];
            }
        }
        total
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        if self.x[i][j] {
            self.g[i] + self.g[j]
        } else {
            0.0
        }
    }

    pub fn common(&self, i: usize, j: usize) -> f64 {
        let mut total = 0.0;
        for k in 0..self.n {
            if k != i && k != j && self.x[i][k] && self.x[j][k] {
                total += self.g[k];
            }
        }
        total
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut total = 0.0;
        for l in 0..self.n {
            if l != i && l != j && l != k && self.x[i][l] && self.x[j][l] && self.x[k][l] {
                total += self.g[l];
            }
        }
        total
    }

    pub fn c1(&self, i: usize) -> f64 {
        (self.load[i] - self.s(i)).max(0.0)
    }

    pub fn c2(&self, j: usize, i: usize) -> f64 {
        let lhs = self.s(j) + self.s(i) - self.r(i, j) - self.common(i, j);
        (self.load[j] + self.load[i] - lhs).max(0.0)
    }

    pub fn c3(&self, j: usize, i: usize, k: usize) -> f64 {
        let lhs = self.s(j) + self.s(i) - self.r(j, i) - self.common(j, i) + self.s(k)
            - self.r(j, k)
            - self.common(j, k)
            + self.triple(i, j, k)
            - self.r(i, k)
            - self.common(i, k);
        (self.load[i] + self.load[j] + self.load[k] - lhs).max(0.0)
    }

    /// Objective summed once per unordered pair, `i < j` in row-major order.
    pub fn objective(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.x[i][j] {
                    total += self.d[i][j];
                }
            }
        }
        total
    }

    /// The full double sum over ordered pairs, halved.
    pub fn objective_double(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.x[i][j] {
                    total += self.d[i][j];
                }
            }
        }
        total / 2.0
    }

    /// Per-class violation sums.
    pub fn parts(&self) -> [f64; 3] {
        let n = self.n;
        let (mut v1, mut v2, mut v3) = (0.0, 0.0, 0.0);
        for j in 0..n {
            match self.k[j] {
                1 => v1 += self.c1(j),
                2 => {
                    for i in 0..n {
                        if i != j {
                            v2 += self.c2(j, i);
                        }
                    }
                }
                _ => {}
            }
        }
        for j in 0..n {
            if self.k[j] != 3 {
                continue;
            }
            for i in 0..n {
                for k in (i + 1)..n {
                    if i != j && k != j {
                        v3 += self.c3(j, i, k);
                    }
                }
            }
        }
        [v1, v2, v3]
    }

    pub fn violation(&self) -> f64 {
        let [a, b, c] = self.parts();
        a + b + c
    }
}

pub fn naive_eval(t: &Topology, inst: &Instance) -> (f64, f64) {
    let nv = Naive::new(t, inst);
    (nv.objective(), nv.violation())
}
