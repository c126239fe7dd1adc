//! Graph Laplacian, tree constants, the core-matrix decomposition and the
//! cycle decomposition of `A_k diag(K_k)`.
//!
//! For a labeled digraph whose components are strongly connected, and an
//! auxiliary tree `ℰ` (one spanning tree per component),
//!
//! ```text
//! A_k diag(K_k) = -I_ℰ 𝒜 I_ℰᵀ
//! ```
//!
//! for a unique invertible, block-diagonal core matrix `𝒜`. It is obtained
//! from any left inverse `L` with `L I_ℰ = -Id` as `𝒜 = -L A_k diag(K_k) Lᵀ`.

use crate::error::{Error, Result};
use crate::graph::{AuxKind, AuxTree, Cycle, LabeledDigraph};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Residual tolerance in float mode, relative to `max |A_k diag(K_k)|`.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-12;

/// Laplacian `A_k = I_E diag(k) I_{E,s}ᵀ`: `(A_k)_{ij} = k_{j→i}` and the
/// diagonal holds minus the outgoing label sums.
pub fn laplacian_matrix<T: Scalar>(g: &LabeledDigraph<T>) -> Matrix<T> {
    let n = g.vertex_count();
    let mut a: Matrix<T> = Matrix::zeros(n, n);
    for (e, k) in g.edges().iter().zip(g.labels()) {
        a[(e.target, e.source)] = a[(e.target, e.source)].clone() + k.clone();
        a[(e.source, e.source)] = a[(e.source, e.source)].clone() - k.clone();
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeBackend {
    /// Sum over enumerated arborescences.
    Enumeration,
    /// Principal minors of `-A_k` per component (matrix-tree theorem).
    Minors,
}

/// Tree constants `K_k`: for each vertex, the sum over spanning trees of
/// its component directed towards it of the product of edge labels.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeConstants<T> {
    pub values: Vec<T>,
    pub backend: TreeBackend,
}

pub fn tree_constants<T: Scalar>(g: &LabeledDigraph<T>, backend: TreeBackend) -> Result<TreeConstants<T>> {
    if !g.has_strongly_connected_components() {
        return Err(Error::NotStronglyConnectedComponents);
    }
    let n = g.vertex_count();
    let values = match backend {
        TreeBackend::Enumeration => (0..n)
            .map(|i| {
                g.arborescences(i).map(|trees| {
                    trees
                        .iter()
                        .fold(T::zero(), |acc, t| acc + t.weight(g))
                })
            })
            .collect::<Result<Vec<T>>>()?,
        TreeBackend::Minors => {
            let minus_a = laplacian_matrix(g).neg();
            let mut values = vec![T::zero(); n];
            for comp in g.scc_partition() {
                for &i in comp {
                    let rest: Vec<usize> = comp.iter().copied().filter(|&v| v != i).collect();
                    values[i] = minus_a.select(&rest, &rest).determinant();
                }
            }
            values
        }
    };
    Ok(TreeConstants { values, backend })
}

/// `A_k diag(K_k)`.
pub fn scaled_laplacian<T: Scalar>(laplacian: &Matrix<T>, tree_constants: &[T]) -> Matrix<T> {
    Matrix::from_fn(laplacian.rows(), laplacian.cols(), |r, c| {
        laplacian[(r, c)].clone() * tree_constants[c].clone()
    })
}

/// A left inverse `L` (`ℰ × V`) of the incidence matrix with `L I_ℰ = -Id`,
/// block-diagonal by component.
///
/// Chain and star trees use the explicit 0/1 patterns; other trees use
/// `-(I_ℰᵀ I_ℰ)⁻¹ I_ℰᵀ`.
pub fn left_inverse<T: Scalar>(aux: &AuxTree, n: usize) -> Matrix<T> {
    match aux.kind {
        AuxKind::Chain => chain_left_inverse(aux, n),
        AuxKind::Star => star_left_inverse(aux, n),
        AuxKind::General => general_left_inverse(aux, n),
    }
}

/// `(J)_{(i→i'),j} = 1` iff `j` precedes or equals `i` on the chain.
fn chain_left_inverse<T: Scalar>(aux: &AuxTree, n: usize) -> Matrix<T> {
    let m = aux.edges.len();
    let mut predecessor = vec![None; n];
    for e in &aux.edges {
        predecessor[e.target] = Some(e.source);
    }
    let mut l = Matrix::zeros(m, n);
    for (j, e) in aux.edges.iter().enumerate() {
        let mut v = Some(e.source);
        while let Some(u) = v {
            l[(j, u)] = T::one();
            v = predecessor[u];
        }
    }
    l
}

/// Negated star pattern: `-(J)_{(i→r),j}` with `J = 1` off `j = i`.
fn star_left_inverse<T: Scalar>(aux: &AuxTree, n: usize) -> Matrix<T> {
    let m = aux.edges.len();
    let mut l = Matrix::zeros(m, n);
    for j in 0..m {
        let comp = aux.component_map[j];
        let mut members: Vec<usize> = aux
            .edges
            .iter()
            .zip(&aux.component_map)
            .filter(|(_, &c)| c == comp)
            .flat_map(|(e, _)| [e.source, e.target])
            .collect();
        members.sort_unstable();
        members.dedup();
        for v in members {
            if v != aux.edges[j].source {
                l[(j, v)] = -T::one();
            }
        }
    }
    l
}

/// `-(I_ℰᵀ I_ℰ)⁻¹ I_ℰᵀ`, valid for any auxiliary tree.
pub fn general_left_inverse<T: Scalar>(aux: &AuxTree, n: usize) -> Matrix<T> {
    let inc: Matrix<T> = aux.incidence(n);
    let gram = inc.transpose().mul(&inc);
    let inv = gram
        .inverse()
        .expect("incidence matrix of a forest has full column rank");
    inv.mul(&inc.transpose()).neg()
}

/// Result of the core-matrix decomposition.
#[derive(Clone, Debug)]
pub struct CoreDecomposition<T> {
    pub aux: AuxTree,
    /// `𝒜_{k,ℰ}`, `ℰ × ℰ`, block-diagonal by component.
    pub core: Matrix<T>,
    pub laplacian: Matrix<T>,
    pub tree_constants: TreeConstants<T>,
    /// `I_ℰ`, `V × ℰ`.
    pub incidence: Matrix<T>,
    /// `max |A_k diag(K_k) + I_ℰ 𝒜 I_ℰᵀ|`.
    pub residual: T,
}

impl<T: Scalar> CoreDecomposition<T> {
    pub fn scaled_laplacian(&self) -> Matrix<T> {
        scaled_laplacian(&self.laplacian, &self.tree_constants.values)
    }

    /// `-I_ℰ 𝒜 I_ℰᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        self.incidence
            .mul(&self.core)
            .mul(&self.incidence.transpose())
            .neg()
    }

    /// Diagonal block of the core matrix for component `c`.
    pub fn block(&self, c: usize) -> Matrix<T> {
        let idx = self.aux.component_edges(c);
        self.core.select(&idx, &idx)
    }

    pub fn block_count(&self) -> usize {
        self.aux.component_map.iter().copied().max().map_or(0, |m| m + 1)
    }
}

/// Core matrix of `g` for the auxiliary tree `aux`.
pub fn core_matrix<T: Scalar>(g: &LabeledDigraph<T>, aux: &AuxTree) -> Result<CoreDecomposition<T>> {
    core_matrix_with(g, aux, left_inverse(aux, g.vertex_count()))
}

/// Core matrix computed with a caller-supplied left inverse
/// (`L I_ℰ = -Id`). The result does not depend on the choice of `L`.
pub fn core_matrix_with<T: Scalar>(
    g: &LabeledDigraph<T>,
    aux: &AuxTree,
    left: Matrix<T>,
) -> Result<CoreDecomposition<T>> {
    if !g.has_strongly_connected_components() {
        return Err(Error::NotStronglyConnectedComponents);
    }
    crate::graph::validate_aux_tree(g, aux).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
    let n = g.vertex_count();
    let incidence: Matrix<T> = aux.incidence(n);
    if left.mul(&incidence) != Matrix::identity(aux.edges.len()).neg() {
        let check = left.mul(&incidence).add(&Matrix::identity(aux.edges.len()));
        let scale = check.max_abs();
        if T::EXACT || scale > 1e-12 {
            return Err(Error::InvalidArgument(
                "matrix is not a left inverse of the incidence matrix".into(),
            ));
        }
    }
    let laplacian = laplacian_matrix(g);
    let tree_constants = tree_constants(g, TreeBackend::Minors)?;
    let ak = scaled_laplacian(&laplacian, &tree_constants.values);
    let core = left.mul(&ak).mul(&left.transpose()).neg();
    let residual = ak
        .add(&incidence.mul(&core).mul(&incidence.transpose()))
        .max_abs_exact();
    Ok(CoreDecomposition {
        aux: aux.clone(),
        core,
        laplacian,
        tree_constants,
        incidence,
        residual,
    })
}

/// Star-tree core matrix read off directly:
/// `(𝒜)_{i→r, j→r} = -(A_k)_{ij} (K_k)_j`.
pub fn star_core_from_laplacian<T: Scalar>(g: &LabeledDigraph<T>, aux: &AuxTree) -> Result<Matrix<T>> {
    if aux.kind != AuxKind::Star {
        return Err(Error::InvalidAuxTree("star tree required".into()));
    }
    crate::graph::validate_aux_tree(g, aux).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
    let a = laplacian_matrix(g);
    let k = tree_constants(g, TreeBackend::Minors)?.values;
    let m = aux.edges.len();
    Ok(Matrix::from_fn(m, m, |r, c| {
        if aux.component_map[r] != aux.component_map[c] {
            return T::zero();
        }
        let (i, j) = (aux.edges[r].source, aux.edges[c].source);
        -(a[(i, j)].clone() * k[j].clone())
    }))
}

/// Outcome of [`verify_core_decomposition`]; `None` marks checks that do
/// not apply to the tree's kind.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreReport {
    pub residual: f64,
    pub residual_ok: bool,
    pub invertible: bool,
    /// Chain trees: entrywise non-negative with positive diagonal.
    pub chain_nonnegative: Option<bool>,
    /// Star trees: positive diagonal, non-positive off-diagonal, row and
    /// column diagonal dominance.
    pub star_dominant: Option<bool>,
}

impl CoreReport {
    pub fn passed(&self) -> bool {
        self.residual_ok
            && self.invertible
            && self.chain_nonnegative != Some(false)
            && self.star_dominant != Some(false)
    }
}

pub fn verify_core_decomposition<T: Scalar>(d: &CoreDecomposition<T>) -> CoreReport {
    let ak = d.scaled_laplacian();
    let residual_matrix = ak.sub(&d.reconstruct());
    let scale = ak.max_abs().max(f64::MIN_POSITIVE);
    let residual_ok = residual_matrix
        .entries()
        .iter()
        .all(|v| v.is_negligible(scale, FLOAT_RESIDUAL_TOL));
    let blocks: Vec<Matrix<T>> = (0..d.block_count()).map(|c| d.block(c)).collect();
    let invertible = blocks.iter().all(|b| {
        if T::EXACT {
            !b.determinant().is_zero()
        } else {
            b.rank() == b.rows()
        }
    });
    let core = &d.core;
    let m = core.rows();
    let chain_nonnegative = (d.aux.kind == AuxKind::Chain).then(|| {
        (0..m).all(|i| {
            core[(i, i)].is_positive() && (0..m).all(|j| core[(i, j)] >= T::zero())
        })
    });
    let star_dominant = (d.aux.kind == AuxKind::Star).then(|| {
        blocks.iter().all(|b| {
            let k = b.rows();
            (0..k).all(|i| {
                let off_ok = (0..k).all(|j| i == j || b[(i, j)] <= T::zero());
                let row_off = (0..k).filter(|&j| j != i).fold(T::zero(), |acc, j| acc + b[(i, j)].abs());
                let col_off = (0..k).filter(|&j| j != i).fold(T::zero(), |acc, j| acc + b[(j, i)].abs());
                b[(i, i)].is_positive() && off_ok && b[(i, i)] >= row_off && b[(i, i)] >= col_off
            })
        })
    });
    CoreReport {
        residual: d.residual.to_f64(),
        residual_ok,
        invertible,
        chain_nonnegative,
        star_dominant,
    }
}

/// One term `λ_{k,C} A_C` of the cycle decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleTerm<T> {
    pub cycle: Cycle,
    pub coefficient: T,
}

/// `A_k diag(K_k) = Σ_C λ_{k,C} A_C` over all simple cycles `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleDecomposition<T> {
    pub terms: Vec<CycleTerm<T>>,
}

impl<T: Scalar> CycleDecomposition<T> {
    /// `Σ_C λ_{k,C} A_C` as an `n × n` matrix.
    pub fn sum(&self, n: usize) -> Matrix<T> {
        self.terms.iter().fold(Matrix::zeros(n, n), |acc, t| {
            acc.add(&t.cycle.unit_laplacian::<T>(n).scale(&t.coefficient))
        })
    }
}

/// `λ_{k,C}`: sum over subgraphs in which every vertex of the component is
/// the source of exactly one edge and `C` is the only cycle, of the label
/// product.
pub fn cycle_decomposition<T: Scalar>(g: &LabeledDigraph<T>) -> Result<CycleDecomposition<T>> {
    if !g.has_strongly_connected_components() {
        return Err(Error::NotStronglyConnectedComponents);
    }
    let terms = g
        .enumerate_cycles()
        .into_iter()
        .map(|cycle| {
            let cycle_weight = cycle
                .edges
                .iter()
                .fold(T::one(), |acc, &e| acc * g.label(e).clone());
            let forests = g
                .rooted_forests(&cycle.vertices)
                .iter()
                .fold(T::zero(), |acc, f| {
                    acc + f.iter().fold(T::one(), |p, &e| p * g.label(e).clone())
                });
            CycleTerm {
                cycle,
                coefficient: cycle_weight * forests,
            }
        })
        .collect();
    Ok(CycleDecomposition { terms })
}
