use std::fs::{self, File};
use std::io::BufWriter;

use mnsdp_core::initializer::heuristic_solution;
use mnsdp_core::rng;
use mnsdp_core::topology::{load_topology, save_topology};
use mnsdp_core::{
    constraint_count, evaluate_detailed, load_instance, save_instance, solve as run_solver,
    GeneratorConfig, Instance, Result, SolverConfig,
};

use crate::{BenchArgs, EvalArgs, ExportDotArgs, GenArgs, InitArgs, SolveArgs, SolverArgs};

/// Exit status for a run whose best solution is still infeasible.
const INFEASIBLE: u8 = 3;

pub fn gen(args: GenArgs) -> Result<u8> {
    let mut cfg = GeneratorConfig::new(args.nodes, args.ratio, args.seed);
    cfg.composition = args.composition;
    cfg.name = args.name;
    let inst = cfg.generate()?;
    save_instance(&inst, &args.out)?;
    let [n1, n2, n3] = inst.composition();
    println!("instance:        {}", inst.name());
    println!(
        "nodes:           {} (K=1: {n1}, K=2: {n2}, K=3: {n3})",
        inst.n()
    );
    println!("constraints:     {}", constraint_count(&inst));
    println!(
        "complete graph:  {}",
        feasibility(inst.complete_graph_feasible())
    );
    Ok(0)
}

fn feasibility(feasible: bool) -> &'static str {
    if feasible {
        "feasible"
    } else {
        "infeasible"
    }
}

fn solver_config(inst: &Instance, seed: u64, a: &SolverArgs) -> SolverConfig {
    let mut cfg = SolverConfig::for_instance(inst)
        .with_seed(seed)
        .with_operator(a.algo);
    if let Some(pop) = a.pop {
        cfg.population_size = pop;
        if a.budget.is_none() {
            cfg.max_evaluations = (inst.n() * pop) as u64;
        }
    }
    if let Some(budget) = a.budget {
        cfg.max_evaluations = budget;
    }
    if let Some(f) = a.f {
        cfg.f = f;
    }
    if let Some(cr) = a.cr {
        cfg.cr = cr;
    }
    if let Some(rate) = a.row_rate {
        cfg.row_rate = rate;
    }
    if let Some(batch) = a.batch {
        cfg.batch_size = batch;
    }
    if let Some(s) = a.standstill {
        cfg.standstill_threshold = s;
    }
    cfg
}

pub fn solve(args: SolveArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let cfg = solver_config(&inst, args.seed, &args.solver);
    let run = run_solver(&inst, &cfg)?;

    if let Some(path) = &args.out {
        save_topology(&run.best.topology, &inst, path)?;
    }
    if let Some(path) = &args.log {
        run.write_convergence_csv(BufWriter::new(File::create(path)?))?;
    }

    let e = run.best.eval;
    println!("instance:     {}", inst.name());
    println!("algorithm:    {} (seed {})", cfg.operator, cfg.seed);
    println!("objective:    {:.6}", e.objective);
    println!("violation:    {:.6}", e.violation);
    println!("feasible:     {}", e.feasible);
    println!("edges:        {}", run.best.topology.edge_count());
    println!("evaluations:  {}", run.evaluations);
    println!("generations:  {}", run.history.len() - 1);
    println!("wall time:    {:.3} s", run.wall_time);
    Ok(if e.feasible { 0 } else { INFEASIBLE })
}

pub fn eval(args: EvalArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let t = load_topology(&args.topology, &inst)?;
    let (e, parts) = evaluate_detailed(&t, &inst)?;
    println!("instance:          {}", inst.name());
    println!("edges:             {}", t.edge_count());
    println!("objective:         {:.6}", e.objective);
    println!("violation K=1:     {:.6}", parts.type1);
    println!("violation K=2:     {:.6}", parts.type2);
    println!("violation K=3:     {:.6}", parts.type3);
    println!("violation total:   {:.6}", e.violation);
    println!("feasible:          {}", e.feasible);
    Ok(0)
}

pub fn export_dot(args: ExportDotArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let t = load_topology(&args.topology, &inst)?;
    fs::write(&args.out, t.to_dot(&inst)?)?;
    Ok(0)
}

pub fn init(args: InitArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let mut r = rng::stream(args.seed, &[0]);
    let t = heuristic_solution(&inst, &mut r)?;
    let (e, _) = evaluate_detailed(&t, &inst)?;
    if let Some(path) = &args.out {
        save_topology(&t, &inst, path)?;
    }
    println!("edges:      {}", t.edge_count());
    println!("objective:  {:.6}", e.objective);
    println!("feasible:   {}", e.feasible);
    Ok(0)
}

pub fn bench(args: BenchArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let mut objectives = Vec::with_capacity(args.runs);
    let mut infeasible = 0;
    for r in 0..args.runs {
        let seed = args.seed + r as u64;
        let cfg = solver_config(&inst, seed, &args.solver);
        let run = run_solver(&inst, &cfg)?;
        let e = run.best.eval;
        println!(
            "run {r:>3}  seed {seed:>6}  objective {:>12.6}  violation {:.6}  {:.2} s",
            e.objective, e.violation, run.wall_time
        );
        if e.feasible {
            objectives.push(e.objective);
        } else {
            infeasible += 1;
        }
    }
    if objectives.is_empty() {
        println!("no feasible runs");
        return Ok(INFEASIBLE);
    }
    let k = objectives.len() as f64;
    let mean = objectives.iter().sum::<f64>() / k;
    let var = objectives.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    let best = objectives.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "{} on {}: mean {:.6}  std {:.6}  best {:.6}  feasible {}/{}",
        args.solver.algo,
        inst.name(),
        mean,
        var.sqrt(),
        best,
        objectives.len(),
        objectives.len() + infeasible
    );
    Ok(0)
}
