//! Reaction networks under mass-action kinetics.
//!
//! A network is a labeled digraph on complexes together with the complex
//! matrix `Y` (species × vertices). The vector field is `f_k(x) = Y A_k x^Y`;
//! for weakly reversible networks it also has the binomial form
//! `-Y I_ℰ 𝒜 I_ℰᵀ diag(K_k⁻¹) x^Y`.

use std::ops::Deref;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{validate_aux_tree, AuxTree, LabeledDigraph};
use crate::laplacian::{core_matrix, laplacian_matrix, tree_constants, CoreDecomposition, TreeBackend};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A strictly positive state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T>(Vec<T>);

impl<T: Scalar> StateVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        check_positive(&values)?;
        Ok(StateVector(values))
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for StateVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

pub(crate) fn check_positive<T: Scalar>(x: &[T]) -> Result<()> {
    if x.iter().all(Scalar::is_positive) {
        Ok(())
    } else {
        Err(Error::NonPositiveState)
    }
}

#[derive(Clone, Debug)]
pub struct ReactionNetwork<T> {
    species: Vec<String>,
    graph: LabeledDigraph<T>,
    complexes: Matrix<T>,
    s_basis: Matrix<T>,
    s_perp_basis: Matrix<T>,
    tree_constants: OnceLock<Result<Vec<T>>>,
}

/// Builds a network from species names, the complex matrix `Y`
/// (`species × vertices`, columns in vertex order) and the reaction graph.
pub fn build_network<T: Scalar>(
    species: Vec<String>,
    complexes: Matrix<T>,
    graph: LabeledDigraph<T>,
) -> Result<ReactionNetwork<T>> {
    let n = species.len();
    let v = graph.vertex_count();
    if complexes.shape() != (n, v) {
        return Err(Error::ShapeMismatch(format!(
            "complex matrix is {}x{}, expected {n}x{v}",
            complexes.rows(),
            complexes.cols()
        )));
    }
    for (i, name) in species.iter().enumerate() {
        if species[..i].contains(name) {
            return Err(Error::ShapeMismatch(format!("species {name} declared twice")));
        }
    }
    for c in 0..v {
        if complexes.column(c).iter().any(|e| *e < T::zero()) {
            return Err(Error::NegativeComplexEntry(graph.vertex_id(c).to_string()));
        }
        for d in 0..c {
            if (0..n).all(|r| complexes[(r, c)] == complexes[(r, d)]) {
                return Err(Error::DuplicateComplex(
                    graph.vertex_id(d).to_string(),
                    graph.vertex_id(c).to_string(),
                ));
            }
        }
    }
    let (incidence, _) = graph.incidence_matrices();
    let reaction_vectors = complexes.mul(&incidence);
    let s_basis = reaction_vectors.column_space();
    let s_perp_basis = reaction_vectors.transpose().nullspace();
    Ok(ReactionNetwork {
        species,
        graph,
        complexes,
        s_basis,
        s_perp_basis,
        tree_constants: OnceLock::new(),
    })
}

impl<T: Scalar> ReactionNetwork<T> {
    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn graph(&self) -> &LabeledDigraph<T> {
        &self.graph
    }

    /// `Y`, species × vertices.
    pub fn complexes(&self) -> &Matrix<T> {
        &self.complexes
    }

    /// `y(i)`.
    pub fn complex(&self, vertex: usize) -> Vec<T> {
        self.complexes.column(vertex)
    }

    /// Basis of `S = im(Y I_E)`, one vector per column.
    pub fn s_basis(&self) -> &Matrix<T> {
        &self.s_basis
    }

    /// Basis of `S⊥ = ker((Y I_E)ᵀ)`, one vector per column.
    pub fn s_perp_basis(&self) -> &Matrix<T> {
        &self.s_perp_basis
    }

    pub fn is_weakly_reversible(&self) -> bool {
        self.graph.has_strongly_connected_components()
    }

    /// `K_k`, computed on first use.
    pub fn tree_constants(&self) -> Result<&[T]> {
        self.tree_constants
            .get_or_init(|| {
                if !self.is_weakly_reversible() {
                    return Err(Error::NotWeaklyReversible);
                }
                tree_constants(&self.graph, TreeBackend::Minors).map(|t| t.values)
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// `Y I_ℰ`, species × ℰ.
    pub fn aux_reaction_vectors(&self, aux: &AuxTree) -> Matrix<T> {
        self.complexes.mul(&aux.incidence(self.graph.vertex_count()))
    }

    /// Same network with every number converted to `f64`.
    pub fn to_float(&self) -> ReactionNetwork<f64> {
        let tree_constants = OnceLock::new();
        if let Some(k) = self.tree_constants.get() {
            let _ = tree_constants.set(k.as_ref().map(|v| v.iter().map(Scalar::to_f64).collect()).map_err(Clone::clone));
        }
        ReactionNetwork {
            species: self.species.clone(),
            graph: self.graph.to_f64(),
            complexes: self.complexes.to_f64(),
            s_basis: self.s_basis.to_f64(),
            s_perp_basis: self.s_perp_basis.to_f64(),
            tree_constants,
        }
    }

    /// Same complexes and graph shape with new edge labels.
    pub fn with_labels(&self, labels: Vec<T>) -> Result<ReactionNetwork<T>> {
        if labels.len() != self.graph.edge_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} edges",
                labels.len(),
                self.graph.edge_count()
            )));
        }
        let ids = self.graph.vertex_ids();
        let edges = self
            .graph
            .edges()
            .iter()
            .zip(labels)
            .map(|(e, k)| (ids[e.source].clone(), ids[e.target].clone(), k))
            .collect();
        let graph = LabeledDigraph::build(ids, edges)?;
        build_network(self.species.clone(), self.complexes.clone(), graph)
    }

    fn check_state(&self, x: &[T]) -> Result<()> {
        if x.len() != self.species.len() {
            return Err(Error::ShapeMismatch(format!(
                "state has {} entries, network has {} species",
                x.len(),
                self.species.len()
            )));
        }
        check_positive(x)
    }
}

/// `x^Y`: entry `i` is `∏_j x_j^{Y_{j,i}}`.
pub fn monomial_vector<T: Scalar>(net: &ReactionNetwork<T>, x: &[T]) -> Result<Vec<T>> {
    net.check_state(x)?;
    let y = net.complexes();
    (0..y.cols())
        .map(|i| {
            (0..y.rows()).try_fold(T::one(), |acc, j| {
                let p = x[j].try_pow(&y[(j, i)]).ok_or(Error::InexactExponent)?;
                Ok(acc * p)
            })
        })
        .collect()
}

/// `f_k(x) = Y A_k x^Y`.
pub fn mass_action_rhs<T: Scalar>(net: &ReactionNetwork<T>, x: &[T]) -> Result<Vec<T>> {
    let m = monomial_vector(net, x)?;
    Ok(net.complexes().mul_vec(&laplacian_matrix(net.graph()).mul_vec(&m)))
}

/// `I_ℰᵀ diag(K_k⁻¹) x^Y`: entry `i → i'` is
/// `x^{y(i')}/(K_k)_{i'} - x^{y(i)}/(K_k)_i`.
pub fn binomials<T: Scalar>(net: &ReactionNetwork<T>, aux: &AuxTree, x: &[T]) -> Result<Vec<T>> {
    let k = net.tree_constants()?;
    validate_aux_tree(net.graph(), aux).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
    let scaled = scaled_monomials(net, k, x)?;
    Ok(aux
        .edges
        .iter()
        .map(|e| scaled[e.target].clone() - scaled[e.source].clone())
        .collect())
}

/// `x^{y(i)} / (K_k)_i` for every vertex.
pub fn scaled_monomials<T: Scalar>(net: &ReactionNetwork<T>, k: &[T], x: &[T]) -> Result<Vec<T>> {
    let m = monomial_vector(net, x)?;
    Ok(m.into_iter().zip(k).map(|(v, kk)| v / kk.clone()).collect())
}

/// The vector field evaluated through the binomial decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialForm<T> {
    pub value: Vec<T>,
    pub binomials: Vec<T>,
}

/// `-Y I_ℰ 𝒜 I_ℰᵀ diag(K_k⁻¹) x^Y` for the auxiliary tree `aux`.
pub fn binomial_rhs<T: Scalar>(net: &ReactionNetwork<T>, aux: &AuxTree, x: &[T]) -> Result<BinomialForm<T>> {
    if !net.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    let d = core_matrix(net.graph(), aux)?;
    binomial_rhs_with(net, &d, x)
}

/// As [`binomial_rhs`], reusing a decomposition of the network's graph.
pub fn binomial_rhs_with<T: Scalar>(
    net: &ReactionNetwork<T>,
    d: &CoreDecomposition<T>,
    x: &[T],
) -> Result<BinomialForm<T>> {
    let b = binomials(net, &d.aux, x)?;
    let value = net
        .aux_reaction_vectors(&d.aux)
        .mul_vec(&d.core.mul_vec(&b))
        .into_iter()
        .map(|v| -v)
        .collect();
    Ok(BinomialForm { value, binomials: b })
}

/// Bases of `S` and `S⊥`, one vector per column.
pub fn stoichiometric_subspace<T: Scalar>(net: &ReactionNetwork<T>) -> (Matrix<T>, Matrix<T>) {
    (net.s_basis().clone(), net.s_perp_basis().clone())
}
