//! N-K reliability constraints.
//!
//! With surplus `g_i = G_i - L_i` and neighbour support `S_i = Σ_j g_j x_ij`:
//!
//! * class I node `i`: `S_i >= L_i`
//! * class II node `j`, every `i != j`:
//!   `S_j + S_i - r_ij - s_ij >= L_j + L_i`
//! * class III node `j`, every unordered pair `{i, k}` of other nodes:
//!   `S_j + S_i - r_ji - s_ji + S_k - r_jk - s_jk + t_ijk - r_ik - s_ik >= L_i + L_j + L_k`
//!
//! where `r_ij = x_ij (g_i + g_j)` is the mutual supply of a pair, `s_ij` the
//! total surplus of the pair's common neighbours and `t_ijk` that of the
//! triple's common neighbours. Each constraint contributes its shortfall
//! `max(0, rhs - lhs)` to the aggregate violation.
//!
//! Sums run in ascending node order everywhere so that evaluation is
//! bit-for-bit reproducible.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeClass};
use crate::topology::{Adjacency, Topology};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Total circuit length.
    pub objective: f64,
    /// Sum of constraint shortfalls, `>= 0`.
    pub violation: f64,
    pub feasible: bool,
}

impl Evaluation {
    pub fn new(objective: f64, violation: f64) -> Self {
        Self {
            objective,
            violation,
            feasible: violation == 0.0,
        }
    }
}

/// Violation split by node class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ViolationBreakdown {
    pub type1: f64,
    pub type2: f64,
    pub type3: f64,
}

impl ViolationBreakdown {
    pub fn total(&self) -> f64 {
        self.type1 + self.type2 + self.type3
    }
}

#[inline]
fn shortfall(rhs: f64, lhs: f64) -> f64 {
    (rhs - lhs).max(0.0)
}

/// Cached neighbourhood sums for one topology.
#[derive(Clone, Debug)]
pub(crate) struct SupportState<'a> {
    inst: &'a Instance,
    adj: Adjacency,
    /// `S_i`.
    support: Vec<f64>,
    /// `s_ij` for every ordered pair, stored symmetrically.
    common: Vec<f64>,
}

impl<'a> SupportState<'a> {
    pub(crate) fn new(adj: Adjacency, inst: &'a Instance) -> Self {
        let n = adj.n();
        let mut state = Self {
            inst,
            adj,
            support: vec![0.0; n],
            common: vec![0.0; n * n],
        };
        for i in 0..n {
            state.support[i] = state.support_sum(i);
            for j in (i + 1)..n {
                let s = state.common_sum(i, j);
                state.common[i * n + j] = s;
                state.common[j * n + i] = s;
            }
        }
        state
    }

    fn support_sum(&self, i: usize) -> f64 {
        let sur = self.inst.surpluses();
        let mut total = 0.0;
        for (w, &word) in self.adj.row(i).iter().enumerate() {
            let mut m = word;
            while m != 0 {
                total += sur[w * 64 + m.trailing_zeros() as usize];
                m &= m - 1;
            }
        }
        total
    }

    fn common_sum(&self, i: usize, j: usize) -> f64 {
        let sur = self.inst.surpluses();
        let (ri, rj) = (self.adj.row(i), self.adj.row(j));
        let mut total = 0.0;
        for w in 0..self.adj.words() {
            let mut m = ri[w] & rj[w];
            while m != 0 {
                total += sur[w * 64 + m.trailing_zeros() as usize];
                m &= m - 1;
            }
        }
        total
    }

    /// `t_ijk` given the precomputed intersection of rows `i` and `j`.
    #[inline]
    fn triple_sum(&self, pair_rows: &[u64], k: usize) -> f64 {
        let sur = self.inst.surpluses();
        let rk = self.adj.row(k);
        let mut total = 0.0;
        for (w, &pw) in pair_rows.iter().enumerate() {
            let mut m = pw & rk[w];
            while m != 0 {
                total += sur[w * 64 + m.trailing_zeros() as usize];
                m &= m - 1;
            }
        }
        total
    }

    #[inline]
    fn mutual(&self, i: usize, j: usize) -> f64 {
        if self.adj.has(i, j) {
            self.inst.surplus(i) + self.inst.surplus(j)
        } else {
            0.0
        }
    }

    #[inline]
    fn common(&self, i: usize, j: usize) -> f64 {
        self.common[i * self.adj.n() + j]
    }

    fn pair_rows_into(&self, i: usize, j: usize, buf: &mut Vec<u64>) {
        buf.clear();
        buf.extend(
            self.adj
                .row(i)
                .iter()
                .zip(self.adj.row(j))
                .map(|(a, b)| a & b),
        );
    }

    #[inline]
    pub(crate) fn support(&self, i: usize) -> f64 {
        self.support[i]
    }

    #[inline]
    pub(crate) fn type1(&self, i: usize) -> f64 {
        shortfall(self.inst.load(i), self.support[i])
    }

    #[inline]
    pub(crate) fn type2(&self, j: usize, i: usize) -> f64 {
        let lhs = self.support[j] + self.support[i] - self.mutual(i, j) - self.common(i, j);
        shortfall(self.inst.load(j) + self.inst.load(i), lhs)
    }

    /// Class-III shortfall; `ji_rows` must hold `row_j & row_i`.
    #[inline]
    fn type3_with(&self, j: usize, i: usize, k: usize, ji_rows: &[u64]) -> f64 {
        let s = &self.support;
        let lhs = s[j] + s[i] - self.mutual(j, i) - self.common(j, i) + s[k]
            - self.mutual(j, k)
            - self.common(j, k)
            + self.triple_sum(ji_rows, k)
            - self.mutual(i, k)
            - self.common(i, k);
        let inst = self.inst;
        shortfall(inst.load(i) + inst.load(j) + inst.load(k), lhs)
    }

    pub(crate) fn type3(&self, j: usize, i: usize, k: usize) -> f64 {
        let mut buf = Vec::new();
        self.pair_rows_into(j, i, &mut buf);
        self.type3_with(j, i, k, &buf)
    }

    pub(crate) fn breakdown(&self) -> ViolationBreakdown {
        let inst = self.inst;
        let n = inst.n();
        let mut out = ViolationBreakdown::default();
        let mut buf = Vec::with_capacity(self.adj.words());
        for j in 0..n {
            match inst.class(j) {
                NodeClass::One => out.type1 += self.type1(j),
                NodeClass::Two => {
                    for i in (0..n).filter(|&i| i != j) {
                        out.type2 += self.type2(j, i);
                    }
                }
                NodeClass::Three => {}
            }
        }
        for j in (0..n).filter(|&j| inst.class(j) == NodeClass::Three) {
            for i in (0..n).filter(|&i| i != j) {
                self.pair_rows_into(j, i, &mut buf);
                for k in ((i + 1)..n).filter(|&k| k != j) {
                    out.type3 += self.type3_with(j, i, k, &buf);
                }
            }
        }
        out
    }

    /// Whether every constraint whose index set meets `{a, b}` holds.
    fn touched_satisfied(&self, a: usize, b: usize) -> bool {
        let inst = self.inst;
        let n = inst.n();
        let touches = |x: usize| x == a || x == b;
        for x in [a, b] {
            if inst.class(x) == NodeClass::One && self.type1(x) > 0.0 {
                return false;
            }
        }
        let mut buf = Vec::with_capacity(self.adj.words());
        for j in 0..n {
            match inst.class(j) {
                NodeClass::One => {}
                NodeClass::Two => {
                    if touches(j) {
                        if (0..n).any(|i| i != j && self.type2(j, i) > 0.0) {
                            return false;
                        }
                    } else if self.type2(j, a) > 0.0 || self.type2(j, b) > 0.0 {
                        return false;
                    }
                }
                NodeClass::Three => {
                    for i in (0..n).filter(|&i| i != j) {
                        let i_touched = touches(j) || touches(i);
                        self.pair_rows_into(j, i, &mut buf);
                        if i_touched {
                            for k in ((i + 1)..n).filter(|&k| k != j) {
                                if self.type3_with(j, i, k, &buf) > 0.0 {
                                    return false;
                                }
                            }
                        } else {
                            for k in [a, b] {
                                if k > i && k != j && self.type3_with(j, i, k, &buf) > 0.0 {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Toggles edge `{a, b}` and refreshes every cached sum it affects.
    fn set_edge(&mut self, a: usize, b: usize, value: bool) {
        self.adj.set(a, b, value);
        let n = self.adj.n();
        for x in [a, b] {
            self.support[x] = self.support_sum(x);
            for y in (0..n).filter(|&y| y != x) {
                let s = self.common_sum(x, y);
                self.common[x * n + y] = s;
                self.common[y * n + x] = s;
            }
        }
    }
}

fn check_dims(t: &Topology, inst: &Instance) -> Result<()> {
    if t.n() != inst.n() {
        return Err(Error::Mismatch(format!(
            "topology has {} nodes, instance has {}",
            t.n(),
            inst.n()
        )));
    }
    Ok(())
}

fn check_node(inst: &Instance, i: usize) -> Result<()> {
    if i >= inst.n() {
        return Err(Error::param(format!(
            "node {i} out of range for {} nodes",
            inst.n()
        )));
    }
    Ok(())
}

fn check_class(inst: &Instance, j: usize, class: NodeClass) -> Result<()> {
    check_node(inst, j)?;
    if inst.class(j) != class {
        return Err(Error::param(format!(
            "node {j} is class {}, constraint requires class {}",
            inst.class(j).k(),
            class.k()
        )));
    }
    Ok(())
}

fn state_for<'a>(t: &Topology, inst: &'a Instance) -> Result<SupportState<'a>> {
    check_dims(t, inst)?;
    Ok(SupportState::new(t.adjacency(), inst))
}

/// `S_i`, the total surplus of `i`'s neighbours.
pub fn surplus_support(t: &Topology, inst: &Instance, i: usize) -> Result<f64> {
    check_node(inst, i)?;
    Ok(state_for(t, inst)?.support(i))
}

/// Shortfall of the class-I constraint at node `i`.
pub fn eval_type1(t: &Topology, inst: &Instance, i: usize) -> Result<f64> {
    check_class(inst, i, NodeClass::One)?;
    Ok(state_for(t, inst)?.type1(i))
}

/// Shortfall of the class-II constraint for node `j` failing together with `i`.
pub fn eval_type2(t: &Topology, inst: &Instance, j: usize, i: usize) -> Result<f64> {
    check_class(inst, j, NodeClass::Two)?;
    check_node(inst, i)?;
    if i == j {
        return Err(Error::param("class-II constraint needs i != j"));
    }
    Ok(state_for(t, inst)?.type2(j, i))
}

/// Shortfall of the class-III constraint for node `j` failing together with `i` and `k`.
pub fn eval_type3(t: &Topology, inst: &Instance, j: usize, i: usize, k: usize) -> Result<f64> {
    check_class(inst, j, NodeClass::Three)?;
    check_node(inst, i)?;
    check_node(inst, k)?;
    if i == j || k == j || i == k {
        return Err(Error::param(
            "class-III constraint needs pairwise distinct i, j, k",
        ));
    }
    Ok(state_for(t, inst)?.type3(j, i, k))
}

/// Objective and aggregate violation of `t`.
pub fn evaluate(t: &Topology, inst: &Instance) -> Result<Evaluation> {
    evaluate_detailed(t, inst).map(|(e, _)| e)
}

/// Like [`evaluate`], also returning per-class violation sums.
pub fn evaluate_detailed(
    t: &Topology,
    inst: &Instance,
) -> Result<(Evaluation, ViolationBreakdown)> {
    let state = state_for(t, inst)?;
    let breakdown = state.breakdown();
    let objective = t.total_length_unchecked(inst);
    Ok((Evaluation::new(objective, breakdown.total()), breakdown))
}

/// Number of constraints under the `n1 + n2·n + n3·n²` counting convention.
///
/// The evaluator itself checks `n - 1` partners per class-II node and each
/// unordered pair once per class-III node; this count is for reporting.
pub fn constraint_count(inst: &Instance) -> u64 {
    let n = inst.n() as u64;
    let [n1, n2, n3] = inst.composition().map(|c| c as u64);
    n1 + n2 * n + n3 * n * n
}

/// Evaluation front end that counts calls against a budget.
#[derive(Debug)]
pub struct Evaluator<'a> {
    inst: &'a Instance,
    calls: Cell<u64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self {
            inst,
            calls: Cell::new(0),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn evaluate(&self, t: &Topology) -> Result<Evaluation> {
        let e = evaluate(t, self.inst)?;
        self.calls.set(self.calls.get() + 1);
        Ok(e)
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

/// Edge-toggle feasibility tracking.
///
/// Keeps `S`, `s` and the adjacency rows of a topology cached and, after a
/// toggle of `{a, b}`, re-checks only the constraints whose index set meets
/// `{a, b}`; no other constraint can change value.
#[derive(Clone, Debug)]
pub struct FeasibilityTracker<'a> {
    state: SupportState<'a>,
}

impl<'a> FeasibilityTracker<'a> {
    pub fn new(t: &Topology, inst: &'a Instance) -> Result<Self> {
        Ok(Self {
            state: state_for(t, inst)?,
        })
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.state.adj.has(a, b)
    }

    pub fn set_edge(&mut self, a: usize, b: usize, value: bool) {
        debug_assert!(a != b);
        self.state.set_edge(a, b, value);
    }

    /// Whether every constraint involving `a` or `b` holds in the current state.
    pub fn touched_satisfied(&self, a: usize, b: usize) -> bool {
        self.state.touched_satisfied(a, b)
    }

    /// Removes `{a, b}` if the result stays feasible; otherwise leaves the
    /// state untouched. The current state must be feasible.
    pub fn try_remove(&mut self, a: usize, b: usize) -> bool {
        debug_assert!(self.has_edge(a, b));
        self.set_edge(a, b, false);
        if self.touched_satisfied(a, b) {
            true
        } else {
            self.set_edge(a, b, true);
            false
        }
    }

    pub fn topology(&self) -> Topology {
        self.state.adj.to_topology()
    }

    /// Full evaluation from the cached sums; identical to [`evaluate`].
    pub fn evaluation(&self) -> Evaluation {
        let t = self.topology();
        Evaluation::new(
            t.total_length_unchecked(self.state.inst),
            self.state.breakdown().total(),
        )
    }
}
