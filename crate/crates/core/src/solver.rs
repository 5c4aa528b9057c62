//! The LBMDE main loop.
//!
//! Heuristic initialization, then per generation: one DE offspring per
//! parent (donor drawn uniformly from the other members, `best` being the
//! incumbent), two-stage environmental selection, and the standstill
//! mutation once the incumbent has not improved for `standstill_threshold`
//! generations. The loop stops when the evaluation budget is spent.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;

use crate::constraints::{evaluate, Evaluator};
use crate::error::{Error, Result};
use crate::initializer::init_population;
use crate::instance::Instance;
use crate::rng::{self, TAG_MUTATION, TAG_OFFSPRING, TAG_SELECTION};
use crate::selection::{environmental_selection, Individual, Population};
use crate::topology::Topology;
use crate::variation::{
    matrix_de_offspring, per_bit_de_offspring, standstill_mutation, VariationParams,
};

/// Offspring operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Operator {
    /// Row-wise binary-matrix DE.
    #[default]
    MatrixDe,
    /// Independent per-pair DE (ablation baseline).
    PerBitDe,
}

impl Operator {
    pub fn offspring<R: Rng + ?Sized>(
        self,
        parent: &Topology,
        donor: &Topology,
        best: &Topology,
        params: &VariationParams,
        rng: &mut R,
    ) -> Result<Topology> {
        match self {
            Operator::MatrixDe => matrix_de_offspring(parent, donor, best, params, rng),
            Operator::PerBitDe => per_bit_de_offspring(parent, donor, best, params, rng),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::MatrixDe => "matrix-de",
            Operator::PerBitDe => "per-bit-de",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-de" => Ok(Operator::MatrixDe),
            "per-bit-de" => Ok(Operator::PerBitDe),
            other => Err(Error::param(format!(
                "unknown operator \"{other}\" (expected matrix-de or per-bit-de)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub population_size: usize,
    pub max_evaluations: u64,
    pub f: f64,
    pub cr: f64,
    pub row_rate: f64,
    pub batch_size: usize,
    /// Stagnant generations before the standstill mutation fires.
    pub standstill_threshold: usize,
    pub seed: u64,
    pub operator: Operator,
}

impl SolverConfig {
    /// Defaults: `N = 20n`, budget `n·N`, `F = 0.2`, `CR = 0.5`, row rate
    /// `1/n`, batch 10, threshold 20, seed 0, matrix DE.
    pub fn for_instance(inst: &Instance) -> Self {
        let n = inst.n();
        let params = VariationParams::defaults_for(n);
        Self {
            population_size: 20 * n,
            max_evaluations: (n * 20 * n) as u64,
            f: params.f,
            cr: params.cr,
            row_rate: params.row_rate,
            batch_size: 10,
            standstill_threshold: 20,
            seed: 0,
            operator: Operator::MatrixDe,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_operator(mut self, operator: Operator) -> Self {
        self.operator = operator;
        self
    }

    pub fn variation_params(&self) -> Result<VariationParams> {
        VariationParams::new(self.f, self.cr, self.row_rate)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::param(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.max_evaluations < self.population_size as u64 {
            return Err(Error::param(format!(
                "budget of {} evaluations cannot cover the initial population of {}",
                self.max_evaluations, self.population_size
            )));
        }
        if self.batch_size == 0 || self.batch_size > self.population_size {
            return Err(Error::param(format!(
                "batch size {} outside [1, {}]",
                self.batch_size, self.population_size
            )));
        }
        if self.standstill_threshold == 0 {
            return Err(Error::param("standstill threshold must be at least 1"));
        }
        self.variation_params().map(|_| ())
    }
}

/// One convergence-log row.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub evaluations: u64,
    /// Incumbent objective, once a feasible solution has been seen.
    pub best_objective: Option<f64>,
    pub best_violation: f64,
    /// Feasible members of the population after the generation.
    pub feasible_count: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Best solution evaluated during the run.
    pub best: Individual,
    pub history: Vec<GenerationRecord>,
    pub evaluations: u64,
    pub wall_time: f64,
}

pub const CONVERGENCE_HEADER: &str =
    "generation,evaluations,best_objective,best_violation,feasible_count";

impl RunResult {
    /// Writes the convergence log; an empty objective field means no
    /// feasible solution was known at that generation.
    pub fn write_convergence_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CONVERGENCE_HEADER}")?;
        for r in &self.history {
            let objective = r
                .best_objective
                .map(|o| format!("{o:.6}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{:.6},{}",
                r.generation, r.evaluations, objective, r.best_violation, r.feasible_count
            )?;
        }
        Ok(())
    }

    pub fn convergence_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_convergence_csv(&mut buf)
            .expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

struct Incumbent {
    best: Individual,
    improved: bool,
}

impl Incumbent {
    fn offer(&mut self, candidate: &Individual) {
        if candidate.better_than(&self.best) {
            self.best = candidate.clone();
            self.improved = true;
        }
    }
}

fn record(gen: usize, evals: u64, inc: &Individual, pop: &Population) -> GenerationRecord {
    GenerationRecord {
        generation: gen,
        evaluations: evals,
        best_objective: inc.eval.feasible.then_some(inc.eval.objective),
        best_violation: inc.eval.violation,
        feasible_count: pop.feasible_count(),
    }
}

/// Runs LBMDE on `inst`. Deterministic for a fixed `(inst, cfg)`.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<RunResult> {
    cfg.validate()?;
    let params = cfg.variation_params()?;
    let started = Instant::now();
    let evaluator = Evaluator::new(inst);
    let n_pop = cfg.population_size;

    let mut pop = init_population(&evaluator, n_pop, cfg.seed)?;
    let mut incumbent = Incumbent {
        best: pop.best().clone(),
        improved: false,
    };
    let mut history = vec![record(0, evaluator.calls(), &incumbent.best, &pop)];
    let mut stagnation = 0usize;
    let mut gen = 0usize;

    while evaluator.calls() < cfg.max_evaluations {
        gen += 1;
        incumbent.improved = false;
        let best_topology = incumbent.best.topology.clone();

        let mut children = Vec::with_capacity(n_pop);
        for (i, parent) in pop.members().iter().enumerate() {
            let mut rng = rng::stream(cfg.seed, &[TAG_OFFSPRING, gen as u64, i as u64]);
            let mut donor = rng.gen_range(0..n_pop - 1);
            if donor >= i {
                donor += 1;
            }
            let topology = cfg.operator.offspring(
                &parent.topology,
                &pop.members()[donor].topology,
                &best_topology,
                &params,
                &mut rng,
            )?;
            let eval = evaluator.evaluate(&topology)?;
            children.push(Individual { topology, eval });
        }
        for child in &children {
            incumbent.offer(child);
        }

        let mut sel_rng = rng::stream(cfg.seed, &[TAG_SELECTION, gen as u64]);
        pop =
            environmental_selection(pop, Population::new(children), cfg.batch_size, &mut sel_rng)?;

        if evaluator.calls() < cfg.max_evaluations {
            let mut mut_rng = rng::stream(cfg.seed, &[TAG_MUTATION, gen as u64]);
            if standstill_mutation(
                &mut pop,
                stagnation,
                cfg.standstill_threshold,
                &evaluator,
                &mut mut_rng,
            )? > 0
            {
                for member in pop.members() {
                    incumbent.offer(member);
                }
            }
        }

        stagnation = if incumbent.improved {
            0
        } else {
            stagnation + 1
        };
        history.push(record(gen, evaluator.calls(), &incumbent.best, &pop));
    }

    Ok(RunResult {
        best: incumbent.best,
        history,
        evaluations: evaluator.calls(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Largest number of candidate edges [`brute_force`] will enumerate.
pub const BRUTE_FORCE_MAX_PAIRS: usize = 22;

/// Exhaustive search over every topology; ties on the objective go to the
/// lexicographically smallest edge list.
pub fn brute_force(inst: &Instance) -> Result<(Topology, f64)> {
    let n = inst.n();
    let pairs = n * (n - 1) / 2;
    if pairs > BRUTE_FORCE_MAX_PAIRS {
        return Err(Error::param(format!(
            "{n} nodes give {pairs} candidate edges; exhaustive search is limited to {BRUTE_FORCE_MAX_PAIRS}"
        )));
    }
    let mut best: Option<(Topology, f64)> = None;
    let mut t = Topology::empty(n);
    for mask in 0u64..(1u64 << pairs) {
        for idx in 0..pairs {
            t.set_pair(idx, mask >> idx & 1 == 1);
        }
        let e = evaluate(&t, inst)?;
        if !e.feasible {
            continue;
        }
        let replace = match &best {
            None => true,
            Some((bt, bo)) => e.objective < *bo || (e.objective == *bo && t.edges().lt(bt.edges())),
        };
        if replace {
            best = Some((t.clone(), e.objective));
        }
    }
    best.ok_or_else(|| {
        Error::Unsatisfiable(format!(
            "instance \"{}\" admits no feasible topology",
            inst.name()
        ))
    })
}
