mod common;

use common::{random_instance, random_topology};
use mnsdp_core::variation::{
    flip_mutation, matrix_de_offspring_traced, per_bit_de_offspring_traced, GeneSource,
};
use mnsdp_core::{
    evaluate, matrix_de_offspring, per_bit_de_offspring, standstill_mutation, Evaluator,
    Individual, Population, Topology, VariationParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `|observed - n p| <= 3 sqrt(n p (1 - p))`.
fn within_three_sigma(observed: usize, n: usize, p: f64) -> bool {
    let n = n as f64;
    (observed as f64 - n * p).abs() <= 3.0 * (n * p * (1.0 - p)).sqrt()
}

#[test]
fn matrix_gene_sources_follow_f_and_cr() {
    let params = VariationParams::new(0.2, 0.5, 1.0 / 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let parent = random_topology(&mut rng, 20, 0.5);
    let donor = random_topology(&mut rng, 20, 0.5);
    let best = random_topology(&mut rng, 20, 0.5);
    let mut counts = [0usize; 3];
    let mut total = 0;
    while total < 100_000 {
        matrix_de_offspring_traced(&parent, &donor, &best, &params, &mut rng, |_, _, src| {
            counts[src as usize] += 1;
            total += 1;
        })
        .unwrap();
    }
    assert!(
        within_three_sigma(counts[GeneSource::Best as usize], total, 0.2),
        "{counts:?}"
    );
    assert!(
        within_three_sigma(counts[GeneSource::Donor as usize], total, 0.4),
        "{counts:?}"
    );
    assert!(
        within_three_sigma(counts[GeneSource::Parent as usize], total, 0.4),
        "{counts:?}"
    );
}

#[test]
fn per_bit_best_fraction_is_f() {
    let params = VariationParams::new(0.3, 0.5, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let t = Topology::empty(50);
    let mut from_best = 0;
    let mut total = 0;
    while total < 100_000 {
        per_bit_de_offspring_traced(&t, &t, &t, &params, &mut rng, |_, src| {
            from_best += (src == GeneSource::Best) as usize;
            total += 1;
        })
        .unwrap();
    }
    assert!(
        within_three_sigma(from_best, total, 0.3),
        "{from_best}/{total}"
    );
}

#[test]
fn degenerate_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let parent = random_topology(&mut rng, 12, 0.5);
    let donor = random_topology(&mut rng, 12, 0.5);
    let best = random_topology(&mut rng, 12, 0.5);

    let all_best = VariationParams::new(1.0, 0.5, 0.2).unwrap();
    assert_eq!(
        per_bit_de_offspring(&parent, &donor, &best, &all_best, &mut rng).unwrap(),
        best
    );

    let frozen = VariationParams::new(0.0, 0.0, 1.0).unwrap();
    assert_eq!(
        matrix_de_offspring(&parent, &donor, &best, &frozen, &mut rng).unwrap(),
        parent
    );
    assert_eq!(
        per_bit_de_offspring(&parent, &donor, &best, &frozen, &mut rng).unwrap(),
        parent
    );

    // Every row selected, every gene from the donor.
    let copy = VariationParams::new(0.0, 1.0, 1.0).unwrap();
    assert_eq!(
        matrix_de_offspring(&parent, &donor, &best, &copy, &mut rng).unwrap(),
        donor
    );
}

#[test]
fn dimension_mismatch() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let p = VariationParams::defaults_for(5);
    let (a, b) = (Topology::empty(5), Topology::empty(6));
    assert!(matrix_de_offspring(&a, &b, &a, &p, &mut rng).is_err());
    assert!(per_bit_de_offspring(&a, &a, &b, &p, &mut rng).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn identical_inputs_give_the_parent(seed in any::<u64>(), n in 3usize..=25, f in 0.0f64..=1.0, cr in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_topology(&mut rng, n, 0.5);
        let p = VariationParams::new(f, cr, 1.0 / n as f64).unwrap();
        prop_assert_eq!(&matrix_de_offspring(&t, &t, &t, &p, &mut rng).unwrap(), &t);
        prop_assert_eq!(&per_bit_de_offspring(&t, &t, &t, &p, &mut rng).unwrap(), &t);
    }

    #[test]
    fn untouched_rows_are_copied(seed in any::<u64>(), n in 3usize..=25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parent = random_topology(&mut rng, n, 0.5);
        let donor = random_topology(&mut rng, n, 0.5);
        let best = random_topology(&mut rng, n, 0.5);
        let p = VariationParams::defaults_for(n);
        let mut rows = vec![false; n];
        let child = matrix_de_offspring_traced(&parent, &donor, &best, &p, &mut rng, |j, _, _| rows[j] = true).unwrap();
        prop_assert!(rows.iter().any(|&r| r));
        for i in 0..n {
            for k in (i + 1)..n {
                if !rows[i] && !rows[k] {
                    prop_assert_eq!(child.has_edge(i, k), parent.has_edge(i, k));
                }
            }
        }
    }
}

#[test]
fn operator_outputs_stay_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut bad = 0;
    for trial in 0..10_000 {
        let n = rng.gen_range(3..=15);
        let parent = random_topology(&mut rng, n, 0.5);
        let donor = random_topology(&mut rng, n, 0.5);
        let best = random_topology(&mut rng, n, 0.5);
        let p = VariationParams::new(rng.gen(), rng.gen(), rng.gen_range(0.05..=1.0)).unwrap();
        let child = if trial % 2 == 0 {
            matrix_de_offspring(&parent, &donor, &best, &p, &mut rng).unwrap()
        } else {
            per_bit_de_offspring(&parent, &donor, &best, &p, &mut rng).unwrap()
        };
        for i in 0..n {
            bad += child.has_edge(i, i) as usize;
            for j in 0..n {
                bad += (child.has_edge(i, j) != child.has_edge(j, i)) as usize;
            }
        }
    }
    assert_eq!(bad, 0);
}

#[test]
fn about_one_flip_per_individual() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let trials = 10_000;
    let mut t = Topology::empty(20);
    let flips: usize = (0..trials).map(|_| flip_mutation(&mut t, &mut rng)).sum();
    // Sum of 10^4 * 190 Bernoulli(1/190) draws.
    let p = 1.0 / 190.0;
    assert!(within_three_sigma(flips, trials * 190, p), "{flips} flips");
}

fn population(inst: &mnsdp_core::Instance, rng: &mut ChaCha8Rng, size: usize) -> Population {
    let members = (0..size)
        .map(|_| {
            let topology = random_topology(rng, inst.n(), 0.6);
            let eval = evaluate(&topology, inst).unwrap();
            Individual { topology, eval }
        })
        .collect();
    Population::new(members)
}

#[test]
fn standstill_mutation_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let inst = random_instance(&mut rng, 8);
    let ev = Evaluator::new(&inst);
    let pop = population(&inst, &mut rng, 30);

    let mut same = pop.clone();
    assert_eq!(
        standstill_mutation(&mut same, 0, 5, &ev, &mut rng).unwrap(),
        0
    );
    assert_eq!(
        standstill_mutation(&mut same, 4, 5, &ev, &mut rng).unwrap(),
        0
    );
    assert_eq!(same, pop);
    assert!(standstill_mutation(&mut same, 4, 0, &ev, &mut rng).is_err());

    for _ in 0..20 {
        let mut mutated = pop.clone();
        let best = pop.best_index();
        let spent = standstill_mutation(&mut mutated, 5, 5, &ev, &mut rng).unwrap();
        assert_eq!(mutated.members()[best], pop.members()[best]);
        let changed = pop
            .members()
            .iter()
            .zip(mutated.members())
            .filter(|(a, b)| a.topology != b.topology)
            .count();
        assert_eq!(spent, changed);
        for m in mutated.members() {
            assert_eq!(m.eval, evaluate(&m.topology, &inst).unwrap());
        }
    }
}
