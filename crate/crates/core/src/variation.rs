//! Offspring generation for binary adjacency matrices.
//!
//! Both DE operators use the same three-way gene rule: with probability `F`
//! the gene comes from the best solution, otherwise with probability `CR`
//! from a random donor, otherwise it stays as in the parent. The matrix
//! operator applies the rule to whole rows (each row picked with
//! probability `row_rate`), the per-bit operator to every pair independently.

use rand::Rng;

use crate::constraints::Evaluator;
use crate::error::{Error, Result};
use crate::selection::Population;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    /// Probability of taking a gene from the best solution.
    pub f: f64,
    /// Probability of taking a gene from the donor when the best was not chosen.
    pub cr: f64,
    /// Probability of selecting each row.
    pub row_rate: f64,
}

impl VariationParams {
    pub fn new(f: f64, cr: f64, row_rate: f64) -> Result<Self> {
        let p = Self { f, cr, row_rate };
        p.validate()?;
        Ok(p)
    }

    /// `F = 0.2`, `CR = 0.5`, one expected row per offspring.
    pub fn defaults_for(n: usize) -> Self {
        Self {
            f: 0.2,
            cr: 0.5,
            row_rate: 1.0 / n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.f) {
            return Err(Error::param(format!(
                "F must lie in [0, 1], got {}",
                self.f
            )));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::param(format!(
                "CR must lie in [0, 1], got {}",
                self.cr
            )));
        }
        if !(self.row_rate > 0.0 && self.row_rate <= 1.0) {
            return Err(Error::param(format!(
                "row rate must lie in (0, 1], got {}",
                self.row_rate
            )));
        }
        Ok(())
    }
}

/// Where an offspring gene was copied from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneSource {
    Best,
    Donor,
    Parent,
}

#[inline]
fn pick_source<R: Rng + ?Sized>(params: &VariationParams, rng: &mut R) -> GeneSource {
    if rng.gen::<f64>() <= params.f {
        GeneSource::Best
    } else if rng.gen::<f64>() <= params.cr {
        GeneSource::Donor
    } else {
        GeneSource::Parent
    }
}

fn check_dims(parent: &Topology, donor: &Topology, best: &Topology) -> Result<()> {
    if parent.n() != donor.n() || parent.n() != best.n() {
        return Err(Error::Mismatch(format!(
            "operator inputs have {}, {} and {} nodes",
            parent.n(),
            donor.n(),
            best.n()
        )));
    }
    Ok(())
}

#[inline]
fn source_bit(
    src: GeneSource,
    idx: usize,
    parent: &Topology,
    donor: &Topology,
    best: &Topology,
) -> bool {
    match src {
        GeneSource::Best => best.get_pair(idx),
        GeneSource::Donor => donor.get_pair(idx),
        GeneSource::Parent => parent.get_pair(idx),
    }
}

/// Row-wise binary-matrix DE offspring.
pub fn matrix_de_offspring<R: Rng + ?Sized>(
    parent: &Topology,
    donor: &Topology,
    best: &Topology,
    params: &VariationParams,
    rng: &mut R,
) -> Result<Topology> {
    matrix_de_offspring_traced(parent, donor, best, params, rng, |_, _, _| {})
}

/// [`matrix_de_offspring`] reporting `(row, column, source)` for every
/// gene decided in a selected row.
pub fn matrix_de_offspring_traced<R: Rng + ?Sized>(
    parent: &Topology,
    donor: &Topology,
    best: &Topology,
    params: &VariationParams,
    rng: &mut R,
    mut on_gene: impl FnMut(usize, usize, GeneSource),
) -> Result<Topology> {
    check_dims(parent, donor, best)?;
    let n = parent.n();
    let mut rows: Vec<usize> = (0..n)
        .filter(|_| rng.gen::<f64>() < params.row_rate)
        .collect();
    if rows.is_empty() {
        rows.push(rng.gen_range(0..n));
    }
    let mut child = parent.clone();
    for &j in &rows {
        for k in (0..n).filter(|&k| k != j) {
            let src = pick_source(params, rng);
            let idx = child.pair_index(j, k);
            child.set_pair(idx, source_bit(src, idx, parent, donor, best));
            on_gene(j, k, src);
        }
    }
    Ok(child)
}

/// Per-bit DE offspring: the same gene rule on every pair, without rows.
pub fn per_bit_de_offspring<R: Rng + ?Sized>(
    parent: &Topology,
    donor: &Topology,
    best: &Topology,
    params: &VariationParams,
    rng: &mut R,
) -> Result<Topology> {
    per_bit_de_offspring_traced(parent, donor, best, params, rng, |_, _| {})
}

/// [`per_bit_de_offspring`] reporting `(pair index, source)` per gene.
pub fn per_bit_de_offspring_traced<R: Rng + ?Sized>(
    parent: &Topology,
    donor: &Topology,
    best: &Topology,
    params: &VariationParams,
    rng: &mut R,
    mut on_gene: impl FnMut(usize, GeneSource),
) -> Result<Topology> {
    check_dims(parent, donor, best)?;
    let mut child = parent.clone();
    for idx in 0..parent.pair_count() {
        let src = pick_source(params, rng);
        child.set_pair(idx, source_bit(src, idx, parent, donor, best));
        on_gene(idx, src);
    }
    Ok(child)
}

/// Flips each pair of `t` with probability `1 / pair_count`; returns the
/// number of flips.
pub fn flip_mutation<R: Rng + ?Sized>(t: &mut Topology, rng: &mut R) -> usize {
    let m = t.pair_count();
    if m == 0 {
        return 0;
    }
    let p = 1.0 / m as f64;
    let mut flips = 0;
    for idx in 0..m {
        if rng.gen::<f64>() < p {
            t.flip_pair(idx);
            flips += 1;
        }
    }
    flips
}

/// Standstill mutation.
///
/// When `stagnation >= threshold`, every member except the single best is
/// bit-flip mutated; members whose topology changed are re-evaluated.
/// Returns the number of evaluations spent.
pub fn standstill_mutation<R: Rng + ?Sized>(
    pop: &mut Population,
    stagnation: usize,
    threshold: usize,
    evaluator: &Evaluator<'_>,
    rng: &mut R,
) -> Result<usize> {
    if threshold == 0 {
        return Err(Error::param("standstill threshold must be at least 1"));
    }
    if stagnation < threshold {
        return Ok(0);
    }
    let keep = pop.best_index();
    let mut evaluated = 0;
    for (i, member) in pop.members_mut().iter_mut().enumerate() {
        if i == keep {
            continue;
        }
        if flip_mutation(&mut member.topology, rng) == 0 {
            continue;
        }
        member.eval = evaluator.evaluate(&member.topology)?;
        evaluated += 1;
    }
    Ok(evaluated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_topology(n: usize, rng: &mut ChaCha8Rng) -> Topology {
        let mut t = Topology::empty(n);
        for idx in 0..t.pair_count() {
            t.set_pair(idx, rng.gen_bool(0.5));
        }
        t
    }

    #[test]
    fn params_validation() {
        assert!(VariationParams::new(0.2, 0.5, 0.1).is_ok());
        assert!(VariationParams::new(1.2, 0.5, 0.1).is_err());
        assert!(VariationParams::new(0.2, -0.5, 0.1).is_err());
        assert!(VariationParams::new(0.2, 0.5, 0.0).is_err());
        assert_eq!(VariationParams::defaults_for(10).row_rate, 0.1);
    }

    #[test]
    fn f_one_copies_best_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (parent, donor, best) = (
            Topology::empty(8),
            random_topology(8, &mut rng),
            Topology::complete(8),
        );
        let p = VariationParams::new(1.0, 0.5, 0.3).unwrap();
        let mut rows = std::collections::BTreeSet::new();
        let child = matrix_de_offspring_traced(&parent, &donor, &best, &p, &mut rng, |j, _, s| {
            assert_eq!(s, GeneSource::Best);
            rows.insert(j);
        })
        .unwrap();
        for i in 0..8 {
            for k in 0..8 {
                let touched = i != k && (rows.contains(&i) || rows.contains(&k));
                assert_eq!(child.has_edge(i, k), touched);
            }
        }
    }

    #[test]
    fn zero_rates_keep_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let parent = random_topology(9, &mut rng);
        let donor = random_topology(9, &mut rng);
        let best = random_topology(9, &mut rng);
        let p = VariationParams::new(0.0, 0.0, 0.5).unwrap();
        for _ in 0..50 {
            assert_eq!(
                matrix_de_offspring(&parent, &donor, &best, &p, &mut rng).unwrap(),
                parent
            );
            assert_eq!(
                per_bit_de_offspring(&parent, &donor, &best, &p, &mut rng).unwrap(),
                parent
            );
        }
    }

    #[test]
    fn cr_one_copies_donor_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let parent = random_topology(10, &mut rng);
        let donor = random_topology(10, &mut rng);
        let best = random_topology(10, &mut rng);
        let p = VariationParams::new(0.0, 1.0, 0.2).unwrap();
        let mut rows = Vec::new();
        let child = matrix_de_offspring_traced(&parent, &donor, &best, &p, &mut rng, |j, _, _| {
            rows.push(j)
        })
        .unwrap();
        for i in 0..10 {
            assert!(!child.has_edge(i, i));
            for k in 0..10 {
                assert_eq!(child.has_edge(i, k), child.has_edge(k, i));
                if i != k && (rows.contains(&i) || rows.contains(&k)) {
                    assert_eq!(child.has_edge(i, k), donor.has_edge(i, k));
                }
            }
        }
    }

    #[test]
    fn at_least_one_row_is_selected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = Topology::empty(6);
        let p = VariationParams::new(0.2, 0.5, 1e-12).unwrap();
        let mut genes = 0;
        matrix_de_offspring_traced(&t, &t, &t, &p, &mut rng, |_, _, _| genes += 1).unwrap();
        assert_eq!(genes, 5);
    }

    #[test]
    fn per_bit_f_one_is_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let parent = random_topology(12, &mut rng);
        let donor = random_topology(12, &mut rng);
        let best = random_topology(12, &mut rng);
        let p = VariationParams::new(1.0, 0.3, 0.1).unwrap();
        assert_eq!(
            per_bit_de_offspring(&parent, &donor, &best, &p, &mut rng).unwrap(),
            best
        );
    }

    #[test]
    fn identical_inputs_are_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random_topology(11, &mut rng);
        let p = VariationParams::defaults_for(11);
        assert_eq!(matrix_de_offspring(&t, &t, &t, &p, &mut rng).unwrap(), t);
        assert_eq!(per_bit_de_offspring(&t, &t, &t, &p, &mut rng).unwrap(), t);
    }

    #[test]
    fn per_bit_best_fraction_is_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = Topology::empty(20);
        let p = VariationParams::new(0.2, 0.5, 0.05).unwrap();
        let (mut total, mut from_best) = (0usize, 0usize);
        while total < 100_000 {
            per_bit_de_offspring_traced(&t, &t, &t, &p, &mut rng, |_, s| {
                total += 1;
                from_best += (s == GeneSource::Best) as usize;
            })
            .unwrap();
        }
        let n = total as f64;
        let sigma = (n * 0.2 * 0.8).sqrt();
        assert!((from_best as f64 - 0.2 * n).abs() <= 3.0 * sigma);
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = VariationParams::defaults_for(5);
        let (a, b) = (Topology::empty(5), Topology::empty(6));
        assert!(matrix_de_offspring(&a, &b, &a, &p, &mut rng).is_err());
        assert!(per_bit_de_offspring(&a, &a, &b, &p, &mut rng).is_err());
    }
}
