//! Multi-microgrid network structure design (MNSDP).
//!
//! A network of `n` microgrids is encoded as a symmetric binary adjacency
//! matrix. Every node carries a reliability class `K ∈ {1, 2, 3}` and must
//! stay supplied after any `K` node failures; the goal is the shortest total
//! circuit length that satisfies all of those N-K constraints.
//!
//! The crate provides:
//!
//! * [`instance`]: problem data, the benchmark generator and the JSON file format.
//! * [`topology`]: the packed adjacency matrix, its objective and DOT export.
//! * [`constraints`]: the type-I/II/III reliability constraints and the
//!   aggregate violation, plus an incremental feasibility tracker.
//! * [`initializer`]: the roulette-wheel edge-removal heuristic.
//! * [`variation`]: the row-wise binary-matrix DE operator, the per-bit
//!   baseline and the standstill mutation.
//! * [`selection`]: feasibility-rule comparison and two-stage environmental
//!   selection with an archive.
//! * [`solver`]: the LBMDE main loop, convergence logging and an exhaustive
//!   solver for tiny instances.
//!
//! ```no_run
//! use mnsdp_core::{generate_instance, solve, SolverConfig};
//!
//! let inst = generate_instance(20, 1.6, 3, None).unwrap();
//! let cfg = SolverConfig::for_instance(&inst).with_seed(11);
//! let run = solve(&inst, &cfg).unwrap();
//! println!("{:.3}", run.best.eval.objective);
//! ```

pub mod constraints;
pub mod error;
pub mod initializer;
pub mod instance;
pub mod rng;
pub mod selection;
pub mod solver;
pub mod topology;
pub mod variation;

pub use constraints::{
    constraint_count, evaluate, evaluate_detailed, Evaluation, Evaluator, ViolationBreakdown,
};
pub use error::{Error, Result};
pub use initializer::{heuristic_solution, init_population};
pub use instance::{
    generate_instance, load_instance, save_instance, GeneratorConfig, Instance, Node, NodeClass,
};
pub use selection::{environmental_selection, feasible_rule_better, Individual, Population};
pub use solver::{brute_force, solve, GenerationRecord, Operator, RunResult, SolverConfig};
pub use topology::Topology;
pub use variation::{
    matrix_de_offspring, per_bit_de_offspring, standstill_mutation, VariationParams,
};
