#![allow(dead_code)]

pub mod naive;

use mnsdp_core::{Instance, Node, NodeClass, Topology};
use rand::Rng;

/// Arbitrary instance with independent generation and load draws, so that
/// surpluses may be negative and every constraint class is exercised.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> Instance {
    let nodes = (0..n)
        .map(|id| Node {
            id,
            x: rng.gen_range(0.0..10.0),
            y: rng.gen_range(0.0..10.0),
            generation: rng.gen_range(0.0..20.0),
            load: rng.gen_range(0.0..15.0),
            k_class: NodeClass::from_k(rng.gen_range(1..=3)).unwrap(),
        })
        .collect();
    Instance::new("random", nodes, 1.5, 0).unwrap()
}

pub fn random_topology<R: Rng>(rng: &mut R, n: usize, density: f64) -> Topology {
    let mut t = Topology::empty(n);
    for idx in 0..t.pair_count() {
        t.set_pair(idx, rng.gen::<f64>() < density);
    }
    t
}
