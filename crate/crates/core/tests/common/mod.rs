#![allow(dead_code)]

use crnlap::crn::{build_network, ReactionNetwork};
use crnlap::{LabeledDigraph, Matrix, Rational, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Network with unit labels from integer complexes (one slice per vertex).
pub fn unit_network(n_species: usize, complexes: &[&[i64]], edges: &[(usize, usize)]) -> ReactionNetwork<Rational> {
    let cols: Vec<Vec<Rational>> = complexes.iter().map(|c| c.iter().map(|&v| q(v)).collect()).collect();
    let g = LabeledDigraph::from_indexed(cols.len(), edges.iter().map(|&(s, t)| (s, t, q(1))).collect()).unwrap();
    let species = (1..=n_species).map(|i| format!("X{i}")).collect();
    build_network(species, Matrix::from_columns(&cols, n_species), g).unwrap()
}

/// 1→2→3→1 with y(1)=(2,1), y(2)=(0,2), y(3)=(1,0).
pub fn three_cycle() -> ReactionNetwork<Rational> {
    unit_network(2, &[&[2, 1], &[0, 2], &[1, 0]], &[(0, 1), (1, 2), (2, 0)])
}

/// Edge-sum form `Σ k x^{y(i)} (y(i') - y(i))`.
pub fn edge_sum_rhs<T: Scalar>(net: &ReactionNetwork<T>, x: &[T], pow: impl Fn(&T, &T) -> T) -> Vec<T> {
    let g = net.graph();
    let y = net.complexes();
    let mut f = vec![T::zero(); net.species_count()];
    for (e, k) in g.edges().iter().zip(g.labels()) {
        let mono = (0..y.rows()).fold(T::one(), |acc, r| acc * pow(&x[r], &y[(r, e.source)]));
        for (r, fr) in f.iter_mut().enumerate() {
            *fr = fr.clone() + k.clone() * mono.clone() * (y[(r, e.target)].clone() - y[(r, e.source)].clone());
        }
    }
    f
}

pub fn rational_pow(x: &Rational, e: &Rational) -> Rational {
    let e = e.to_integer();
    let e: i32 = num_traits::ToPrimitive::to_i32(&e).unwrap();
    num_traits::Pow::pow(x, e)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
