//! Seeded random instances: digraphs with strongly connected components,
//! weakly reversible networks, and networks with a planted complex-balanced
//! equilibrium.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::crn::{build_network, monomial_vector, ReactionNetwork};
use crate::graph::{AuxTree, LabeledDigraph};
use crate::laplacian::{tree_constants, TreeBackend};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

/// `p/q` with `1 ≤ p, q ≤ max`.
pub fn rational_label<R: Rng>(rng: &mut R, max: i64) -> Rational {
    Rational::from_ratio(rng.gen_range(1..=max), rng.gen_range(1..=max))
}

/// Digraph on `1..=max_vertices` vertices whose components are strongly
/// connected: each component of size ≥ 2 carries a random Hamiltonian cycle
/// plus random extra edges. Component membership is not contiguous in
/// declaration order.
pub fn random_scc_digraph<R: Rng>(rng: &mut R, max_vertices: usize) -> LabeledDigraph<Rational> {
    let n = rng.gen_range(1..=max_vertices.max(1));
    random_scc_digraph_on(rng, n)
}

pub fn random_scc_digraph_on<R: Rng>(rng: &mut R, n: usize) -> LabeledDigraph<Rational> {
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(rng);
    let parts = rng.gen_range(1..=n.clamp(1, 3));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut edges = Vec::new();
    let mut start = 0;
    for end in cuts {
        let comp = &vertices[start..end];
        start = end;
        if comp.len() < 2 {
            continue;
        }
        for i in 0..comp.len() {
            edges.push((comp[i], comp[(i + 1) % comp.len()]));
        }
        for &a in comp {
            for &b in comp {
                if a != b && !edges.contains(&(a, b)) && rng.gen_bool(0.3) {
                    edges.push((a, b));
                }
            }
        }
    }
    edges.shuffle(rng);
    let labeled = edges.into_iter().map(|(a, b)| (a, b, rational_label(rng, 9))).collect();
    LabeledDigraph::from_indexed(n, labeled).expect("generated graph is simple")
}

/// Random spanning tree per component with random edge directions.
pub fn random_aux_tree<R: Rng, T: Scalar>(rng: &mut R, g: &LabeledDigraph<T>) -> AuxTree {
    let mut edges = Vec::new();
    for comp in g.scc_partition() {
        let mut order = comp.clone();
        order.shuffle(rng);
        for i in 1..order.len() {
            let other = order[rng.gen_range(0..i)];
            if rng.gen_bool(0.5) {
                edges.push((order[i], other));
            } else {
                edges.push((other, order[i]));
            }
        }
    }
    AuxTree::from_edges(g, &edges).expect("random spanning forest is a valid tree")
}

/// Weakly reversible network with `1..=max_species` species, at most
/// `max_vertices` complexes, and distinct integer complexes in `0..=3`.
pub fn random_network<R: Rng>(rng: &mut R, max_species: usize, max_vertices: usize) -> ReactionNetwork<Rational> {
    let n = rng.gen_range(1..=max_species.max(1));
    let available = 4usize.saturating_pow(n as u32);
    let v = rng.gen_range(1..=max_vertices.min(available).max(1));
    let g = random_scc_digraph_on(rng, v);
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(v);
    while columns.len() < v {
        let c: Vec<Rational> = (0..n).map(|_| Rational::from_i64(rng.gen_range(0..=3))).collect();
        if !columns.contains(&c) {
            columns.push(c);
        }
    }
    let species = (1..=n).map(|i| format!("X{i}")).collect();
    build_network(species, Matrix::from_columns(&columns, n), g).expect("generated network is valid")
}

/// A network together with a positive complex-balanced equilibrium.
#[derive(Clone, Debug)]
pub struct PlantedNetwork {
    pub net: ReactionNetwork<Rational>,
    pub x_star: Vec<Rational>,
}

/// Relabels a random network by `k_{i→j} = k̃_{i→j} K̃_i / x*^{y(i)}`, which
/// makes a random rational `x*` complex balanced.
pub fn planted_network<R: Rng>(rng: &mut R, max_species: usize, max_vertices: usize) -> PlantedNetwork {
    let base = random_network(rng, max_species, max_vertices);
    let x_star: Vec<Rational> = (0..base.species_count()).map(|_| rational_label(rng, 4)).collect();
    let psi = monomial_vector(&base, &x_star).expect("positive state");
    let k = tree_constants(base.graph(), TreeBackend::Minors).expect("weakly reversible").values;
    let g = base.graph();
    let labels = g
        .edges()
        .iter()
        .zip(g.labels())
        .map(|(e, l)| l.clone() * k[e.source].clone() / psi[e.source].clone())
        .collect();
    let net = base.with_labels(labels).expect("same edge count");
    PlantedNetwork { net, x_star }
}

/// Positive state with log-uniform entries in `[e^-1.5, e^1.5]`.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.5f64..1.5).exp()).collect()
}

/// Positive rational state with entries `p/q`, `1 ≤ p, q ≤ 5`.
pub fn random_rational_state<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rational_label(rng, 5)).collect()
}
