//! Heuristic construction of short feasible topologies.
//!
//! Start from the complete graph and repeatedly try to drop an edge: pick a
//! random node `p`, pick one of its neighbours by roulette wheel with
//! probability proportional to distance, and keep the removal when the
//! topology stays feasible. The walk stops after `n` consecutive rejections.

use rand::Rng;

use crate::constraints::{Evaluator, FeasibilityTracker};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng::{self, TAG_INIT};
use crate::selection::{Individual, Population};
use crate::topology::Topology;

/// What happened during one heuristic run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeuristicTrace {
    /// Accepted removals, in order.
    pub removed: Vec<(usize, usize)>,
    pub rejected: usize,
}

/// Roulette-wheel pick over `weights`; uniform when they sum to zero.
pub fn roulette_pick<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return rng.gen_range(0..weights.len());
    }
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    // Rounding can leave `target` just past the last boundary.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// One heuristic solution with the default stall limit `n`.
pub fn heuristic_solution<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Result<Topology> {
    heuristic_solution_traced(inst, inst.n(), rng).map(|(t, _)| t)
}

/// Runs the heuristic with an explicit stall limit and reports every step.
pub fn heuristic_solution_traced<R: Rng + ?Sized>(
    inst: &Instance,
    stall_limit: usize,
    rng: &mut R,
) -> Result<(Topology, HeuristicTrace)> {
    let n = inst.n();
    let complete = Topology::complete(n);
    let mut tracker = FeasibilityTracker::new(&complete, inst)?;
    if !tracker.evaluation().feasible {
        return Err(Error::Unsatisfiable(format!(
            "the complete graph of instance \"{}\" is infeasible",
            inst.name()
        )));
    }

    let mut neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).collect())
        .collect();
    let mut trace = HeuristicTrace::default();
    let mut weights = Vec::with_capacity(n);
    let mut count = 0;
    while count < stall_limit {
        // Uniform over nodes that still have an edge to drop.
        let live = neighbors.iter().filter(|nb| !nb.is_empty()).count();
        if live == 0 {
            break;
        }
        let mut pick = rng.gen_range(0..live);
        let p = neighbors
            .iter()
            .position(|nb| {
                if nb.is_empty() {
                    return false;
                }
                if pick == 0 {
                    return true;
                }
                pick -= 1;
                false
            })
            .expect("live node exists");

        weights.clear();
        weights.extend(neighbors[p].iter().map(|&q| inst.distance(p, q)));
        let q = neighbors[p][roulette_pick(&weights, rng)];

        if tracker.try_remove(p, q) {
            neighbors[p].retain(|&x| x != q);
            neighbors[q].retain(|&x| x != p);
            trace.removed.push((p.min(q), p.max(q)));
            count = 0;
        } else {
            trace.rejected += 1;
            count += 1;
        }
    }
    Ok((tracker.topology(), trace))
}

/// `size` independent heuristic solutions, stream `i` keyed by `(seed, i)`.
///
/// Each member is evaluated once through `evaluator`.
pub fn init_population(evaluator: &Evaluator<'_>, size: usize, seed: u64) -> Result<Population> {
    if size < 2 {
        return Err(Error::param(format!(
            "population size must be at least 2, got {size}"
        )));
    }
    let inst = evaluator.instance();
    let mut members = Vec::with_capacity(size);
    for i in 0..size {
        let mut rng = rng::stream(seed, &[TAG_INIT, i as u64]);
        let topology = heuristic_solution(inst, &mut rng)?;
        let eval = evaluator.evaluate(&topology)?;
        members.push(Individual { topology, eval });
    }
    Ok(Population::new(members))
}
