//! Feasibility rules and the two-stage environmental selection.

use rand::seq::index;
use rand::Rng;

use crate::constraints::Evaluation;
use crate::error::{Error, Result};
use crate::topology::Topology;

/// A topology together with its current evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub topology: Topology,
    pub eval: Evaluation,
}

impl Individual {
    pub fn better_than(&self, other: &Individual) -> bool {
        feasible_rule_better(&self.eval, &other.eval)
    }
}

/// Fixed-size population; slot `i` of the offspring population is the
/// child of parent `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Individual] {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    /// Index of the best member under the feasibility rules (first on ties).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.better_than(&self.members[best]) {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    pub fn feasible_count(&self) -> usize {
        self.members.iter().filter(|m| m.eval.feasible).count()
    }
}

/// Deb's feasibility rules: feasible beats infeasible, then smaller
/// objective among feasible, smaller violation among infeasible. Ties are
/// `false`, so the incumbent `b` is kept.
pub fn feasible_rule_better(a: &Evaluation, b: &Evaluation) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.objective < b.objective,
        (false, false) => a.violation < b.violation,
    }
}

/// Which slots changed during one selection call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionReport {
    /// Slots taken over by their own offspring in stage 1.
    pub stage1: Vec<usize>,
    /// Offspring indices placed in the archive.
    pub archived: Vec<usize>,
    /// `(slot, offspring index)` pairs installed from the archive in stage 2.
    pub stage2: Vec<(usize, usize)>,
}

/// Two-stage environmental selection.
///
/// Stage 1 replaces a parent with its offspring when the offspring wins
/// under [`feasible_rule_better`] (strictly smaller violation, or both
/// feasible with a strictly smaller objective). Offspring with a larger
/// violation but a smaller objective than their (original) parent go to an
/// archive. Stage 2 runs `N / batch_size` rounds: it samples `batch_size` population slots
/// (with replacement) and up to `batch_size` archive entries (without
/// replacement); if the most violating sampled slot has a larger objective
/// than the least violating sampled archive entry, that entry takes the slot
/// and leaves the archive.
pub fn environmental_selection<R: Rng + ?Sized>(
    pop: Population,
    off: Population,
    batch_size: usize,
    rng: &mut R,
) -> Result<Population> {
    environmental_selection_traced(pop, off, batch_size, rng).map(|(p, _)| p)
}

pub fn environmental_selection_traced<R: Rng + ?Sized>(
    pop: Population,
    off: Population,
    batch_size: usize,
    rng: &mut R,
) -> Result<(Population, SelectionReport)> {
    let n = pop.len();
    if off.len() != n {
        return Err(Error::param(format!(
            "population has {n} members but offspring has {}",
            off.len()
        )));
    }
    if batch_size == 0 || batch_size > n {
        return Err(Error::param(format!(
            "batch size {batch_size} outside [1, {n}]"
        )));
    }

    let mut report = SelectionReport::default();
    let mut members = pop.members;
    let offspring = off.members;

    // Archive membership is decided against the parents as they were before
    // any replacement.
    let mut archive: Vec<usize> = Vec::new();
    for (i, child) in offspring.iter().enumerate() {
        let parent = &members[i].eval;
        if child.eval.violation > parent.violation && child.eval.objective < parent.objective {
            archive.push(i);
        }
    }
    report.archived = archive.clone();

    for (i, child) in offspring.iter().enumerate() {
        if feasible_rule_better(&child.eval, &members[i].eval) {
            members[i] = child.clone();
            report.stage1.push(i);
        }
    }

    for _ in 0..n / batch_size {
        if archive.is_empty() {
            break;
        }
        let mut worst = rng.gen_range(0..n);
        for _ in 1..batch_size {
            let slot = rng.gen_range(0..n);
            if members[slot].eval.violation > members[worst].eval.violation {
                worst = slot;
            }
        }
        let take = batch_size.min(archive.len());
        let picks = index::sample(rng, archive.len(), take);
        let mut best_pos = picks.index(0);
        for pos in picks.iter().skip(1) {
            if offspring[archive[pos]].eval.violation < offspring[archive[best_pos]].eval.violation
            {
                best_pos = pos;
            }
        }
        let candidate = archive[best_pos];
        if members[worst].eval.objective > offspring[candidate].eval.objective {
            members[worst] = offspring[candidate].clone();
            archive.remove(best_pos);
            report.stage2.push((worst, candidate));
        }
    }

    Ok((Population::new(members), report))
}
