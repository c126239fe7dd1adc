//! Monomial evaluation orders and the regions they cut out.
//!
//! For a chain tree `ℰ` the stratum `𝒮_{k,ℰ}` is the set of positive states
//! with `I_ℰᵀ diag(K_k⁻¹) x^Y ≥ 0`. In log coordinates it is the polyhedron
//! `𝒫_{k,ℰ} = {z : (Y I_ℰ)ᵀ z ≥ I_ℰᵀ ln K_k}`, whose recession cone is
//! `𝒞_ℰ = {z : (Y I_ℰ)ᵀ z ≥ 0}` with lineality space `S⊥`.

use std::sync::OnceLock;

use crate::crn::{binomials, mass_action_rhs, scaled_monomials, ReactionNetwork};
use crate::error::{Error, Result};
use crate::graph::{permutations, validate_aux_tree, AuxTree};
use crate::linalg::{dot, Matrix};
use crate::scalar::{primitive_direction, Rational, Scalar};

/// Relative slack for inequalities and ties in float mode.
pub const STRICT_TOL: f64 = 1e-12;
/// Relative tolerance for orthogonality to the lineality space.
pub const LINEALITY_TOL: f64 = 1e-10;
/// Largest ambient dimension accepted by [`extreme_rays`].
pub const MAX_RAY_DIMENSION: usize = 10;
/// Largest number of tied chain orders enumerated at a boundary state.
pub const MAX_TIED_ORDERS: usize = 64;

/// Chain tree sorting each component ascending by `x^{y(i)}/(K_k)_i`,
/// ties broken by declaration order.
pub fn monomial_order<T: Scalar>(net: &ReactionNetwork<T>, x: &[T]) -> Result<AuxTree> {
    let k = net.tree_constants()?;
    let values = scaled_monomials(net, k, x)?;
    let g = net.graph();
    let orders: Vec<Vec<usize>> = g
        .scc_partition()
        .iter()
        .map(|comp| {
            let mut order = comp.clone();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite monomials").then(a.cmp(&b)));
            order
        })
        .collect();
    AuxTree::chain(g, &orders)
}

/// Every chain order consistent with `x` when tied values (within
/// `rel_tol` of the largest value in float mode, equal in exact mode) may be
/// permuted. `None` when more than `cap` orders exist.
pub fn admissible_chain_orders<T: Scalar>(
    net: &ReactionNetwork<T>,
    x: &[T],
    rel_tol: f64,
    cap: usize,
) -> Result<Option<Vec<AuxTree>>> {
    let k = net.tree_constants()?;
    let values = scaled_monomials(net, k, x)?;
    let scale = values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let g = net.graph();
    let mut per_component: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut total: usize = 1;
    for comp in g.scc_partition() {
        let mut order = comp.clone();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite monomials").then(a.cmp(&b)));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match classes.last_mut() {
                Some(class)
                    if (values[v].clone() - values[*class.last().expect("non-empty")].clone())
                        .is_negligible(scale, rel_tol) =>
                {
                    class.push(v)
                }
                _ => classes.push(vec![v]),
            }
        }
        let mut orders: Vec<Vec<usize>> = vec![Vec::new()];
        for class in &classes {
            let count = (1..=class.len()).product::<usize>();
            total = total.saturating_mul(count);
            if total > cap {
                return Ok(None);
            }
            let perms = permutations(class);
            orders = orders
                .iter()
                .flat_map(|prefix| {
                    perms.iter().map(move |p| {
                        let mut o = prefix.clone();
                        o.extend(p);
                        o
                    })
                })
                .collect();
        }
        per_component.push(orders);
    }
    let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for orders in &per_component {
        combos = combos
            .iter()
            .flat_map(|prefix| {
                orders.iter().map(move |o| {
                    let mut c = prefix.clone();
                    c.push(o.clone());
                    c
                })
            })
            .collect();
    }
    combos
        .iter()
        .map(|orders| AuxTree::chain(g, orders))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// `x ∈ 𝒮_{k,ℰ}`: every binomial `x^{y(i')}/K_{i'} - x^{y(i)}/K_i` of the
/// tree is non-negative (down to `-1e-12 × max` in float mode).
pub fn stratum_contains<T: Scalar>(net: &ReactionNetwork<T>, aux: &AuxTree, x: &[T]) -> Result<bool> {
    let b = binomials(net, aux, x)?;
    let values = scaled_monomials(net, net.tree_constants()?, x)?;
    let scale = values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    Ok(b.iter().all(|v| *v >= T::zero() || v.is_negligible(scale, STRICT_TOL)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionMode {
    /// `𝒞_ℰ`, independent of the rate constants.
    Cone,
    /// `𝒫_{k,ℰ}`.
    Polyhedron,
}

/// Inequality description `(Y I_ℰ)ᵀ z ≥ offset` of a cone or polyhedron in
/// log coordinates.
#[derive(Clone, Debug)]
pub struct ConeDescription {
    pub aux: AuxTree,
    pub mode: RegionMode,
    /// `Y I_ℰ`; column `j` is the normal of inequality `j`.
    pub normals: Matrix<Rational>,
    /// `I_ℰᵀ ln K_k` for polyhedra, zero for cones.
    pub offset: Vec<f64>,
    /// Basis of the lineality space `ker((Y I_ℰ)ᵀ)`.
    pub lineality: Matrix<Rational>,
    rays: OnceLock<Result<Vec<Vec<Rational>>>>,
}

pub fn region_constraints<T: Scalar>(
    net: &ReactionNetwork<T>,
    aux: &AuxTree,
    mode: RegionMode,
) -> Result<ConeDescription> {
    let k = net.tree_constants()?;
    validate_aux_tree(net.graph(), aux).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
    let exact = net.aux_reaction_vectors(aux);
    let entries = exact
        .entries()
        .iter()
        .map(|v| v.to_rational().ok_or_else(|| Error::InvalidArgument(format!("complex entry {v} is not finite"))))
        .collect::<Result<Vec<_>>>()?;
    let normals = Matrix::from_fn(exact.rows(), exact.cols(), |r, c| entries[r * exact.cols() + c].clone());
    let offset = match mode {
        RegionMode::Cone => vec![0.0; aux.edges.len()],
        RegionMode::Polyhedron => {
            let ln_k: Vec<f64> = k.iter().map(|v| v.to_f64().ln()).collect();
            aux.edges.iter().map(|e| ln_k[e.target] - ln_k[e.source]).collect()
        }
    };
    let lineality = normals.transpose().nullspace();
    Ok(ConeDescription {
        aux: aux.clone(),
        mode,
        normals,
        offset,
        lineality,
        rays: OnceLock::new(),
    })
}

impl ConeDescription {
    pub fn dimension(&self) -> usize {
        self.normals.rows()
    }

    /// `(Y I_ℰ)ᵀ z - offset`.
    pub fn slacks(&self, z: &[f64]) -> Vec<f64> {
        let normals = self.normals.to_f64();
        normals
            .tr_mul_vec(z)
            .into_iter()
            .zip(&self.offset)
            .map(|(v, o)| v - o)
            .collect()
    }

    /// Membership with slack `-tol × max(1, |offset|, |z|·|normal|)`.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        let normals = self.normals.to_f64();
        let scale = z.iter().map(|v| v.abs()).fold(0.0, f64::max) * normals.max_abs();
        let scale = self.offset.iter().map(|v| v.abs()).fold(scale.max(1.0), f64::max);
        self.slacks(z).iter().all(|s| *s >= -tol * scale)
    }
}

/// Extreme rays of the recession cone `{z : (Y I_ℰ)ᵀ z ≥ 0}` modulo its
/// lineality space, as primitive integer vectors in lexicographic order.
pub fn extreme_rays(desc: &ConeDescription) -> Result<&[Vec<Rational>]> {
    desc.rays
        .get_or_init(|| compute_rays(desc))
        .as_ref()
        .map(Vec::as_slice)
        .map_err(Clone::clone)
}

/// `true` when the cone equals its lineality space.
pub fn is_trivial_cone(desc: &ConeDescription) -> Result<bool> {
    Ok(extreme_rays(desc)?.is_empty())
}

fn compute_rays(desc: &ConeDescription) -> Result<Vec<Vec<Rational>>> {
    let n = desc.dimension();
    if n > MAX_RAY_DIMENSION {
        return Err(Error::DimensionTooLarge(n, MAX_RAY_DIMENSION));
    }
    // The cone is lineality ⊕ (cone ∩ im(Y I_ℰ)); the second part is pointed.
    let basis = desc.normals.column_space();
    let constraints = desc.normals.transpose().mul(&basis);
    let mut rays: Vec<Vec<Rational>> = pointed_cone_rays(&constraints)
        .into_iter()
        .map(|w| primitive_direction(&basis.mul_vec(&w)))
        .collect();
    rays.sort();
    rays.dedup();
    debug_assert!(rays
        .iter()
        .all(|r| desc.normals.tr_mul_vec(r).iter().all(|v| *v >= Rational::from_i64(0))));
    Ok(rays)
}

/// Double description for `{w : G w ≥ 0}` with `G` of full column rank.
fn pointed_cone_rays(g: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let s = g.cols();
    if s == 0 {
        return Vec::new();
    }
    let zero = Rational::from_i64(0);
    let rows = g.row_vectors();
    let mut basis_rows: Vec<usize> = Vec::new();
    for r in 0..rows.len() {
        let mut trial = basis_rows.clone();
        trial.push(r);
        if g.select(&trial, &(0..s).collect::<Vec<_>>()).rank() == trial.len() {
            basis_rows = trial;
        }
        if basis_rows.len() == s {
            break;
        }
    }
    assert_eq!(basis_rows.len(), s, "constraint matrix must have full column rank");
    let square = g.select(&basis_rows, &(0..s).collect::<Vec<_>>());
    let inverse = square.inverse().expect("independent rows");
    let mut rays: Vec<Vec<Rational>> = inverse.columns().into_iter().map(|c| primitive_direction(&c)).collect();
    let mut processed = basis_rows.clone();
    for r in 0..rows.len() {
        if basis_rows.contains(&r) {
            continue;
        }
        let a = &rows[r];
        let values: Vec<Rational> = rays.iter().map(|ray| dot(a, ray)).collect();
        let mut next: Vec<Vec<Rational>> = Vec::new();
        for (ray, v) in rays.iter().zip(&values) {
            if *v >= zero {
                next.push(ray.clone());
            }
        }
        if s >= 2 {
            for (p, vp) in rays.iter().zip(&values) {
                if *vp <= zero {
                    continue;
                }
                for (q, vq) in rays.iter().zip(&values) {
                    if *vq >= zero || !adjacent(&rows, &processed, p, q, s) {
                        continue;
                    }
                    let combo: Vec<Rational> = p
                        .iter()
                        .zip(q)
                        .map(|(pi, qi)| vp.clone() * qi.clone() - vq.clone() * pi.clone())
                        .collect();
                    next.push(primitive_direction(&combo));
                }
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(r);
        if rays.is_empty() {
            break;
        }
    }
    rays
}

/// Rays are adjacent when the constraints tight at both have rank `s - 2`.
fn adjacent(rows: &[Vec<Rational>], processed: &[usize], p: &[Rational], q: &[Rational], s: usize) -> bool {
    let zero = Rational::from_i64(0);
    let tight: Vec<Vec<Rational>> = processed
        .iter()
        .filter(|&&r| dot(&rows[r], p) == zero && dot(&rows[r], q) == zero)
        .map(|&r| rows[r].clone())
        .collect();
    if tight.len() < s - 2 {
        return false;
    }
    Matrix::from_rows(tight, s).rank() == s - 2
}

/// Inner products behind a polar-interior decision.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarReport {
    pub inside: bool,
    /// `f · w` for each lineality basis vector `w`.
    pub lineality_products: Vec<f64>,
    /// `f · r` for each extreme ray `r`.
    pub ray_products: Vec<f64>,
}

/// `f ∈ int 𝒞_ℰ^pol` via rays: `f ⊥ lin 𝒞_ℰ` and `f · r < 0` for every
/// extreme ray `r`.
pub fn polar_interior_contains(desc: &ConeDescription, f: &[f64]) -> Result<PolarReport> {
    if f.len() != desc.dimension() {
        return Err(Error::ShapeMismatch(format!(
            "vector has {} entries, cone lives in dimension {}",
            f.len(),
            desc.dimension()
        )));
    }
    let rays = extreme_rays(desc)?;
    let f_scale = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let norm = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let lineality: Vec<Vec<f64>> = desc.lineality.to_f64().columns();
    let lineality_products: Vec<f64> = lineality.iter().map(|w| dot(f, w)).collect();
    let orthogonal = lineality
        .iter()
        .zip(&lineality_products)
        .all(|(w, p)| p.abs() <= LINEALITY_TOL * f_scale * norm(w));
    let float_rays: Vec<Vec<f64>> = rays.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
    let ray_products: Vec<f64> = float_rays.iter().map(|r| dot(f, r)).collect();
    let negative = float_rays
        .iter()
        .zip(&ray_products)
        .all(|(r, p)| *p < -STRICT_TOL * f_scale * norm(r));
    Ok(PolarReport {
        inside: orthogonal && negative,
        lineality_products,
        ray_products,
    })
}

/// `f_k(x) ∈ int rec(𝒫_{k,ℰ})^pol` for a state in the stratum of `aux`;
/// needs no equilibrium.
pub fn recession_polar_check<T: Scalar>(net: &ReactionNetwork<T>, aux: &AuxTree, x: &[T]) -> Result<PolarReport> {
    if !net.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    if !stratum_contains(net, aux, x)? {
        return Err(Error::PointNotInStratum);
    }
    let desc = region_constraints(net, aux, RegionMode::Cone)?;
    let f: Vec<f64> = mass_action_rhs(net, x)?.iter().map(Scalar::to_f64).collect();
    polar_interior_contains(&desc, &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crn::build_network;
    use crate::graph::LabeledDigraph;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn net(n_species: usize, cols: &[&[i64]], edges: Vec<(usize, usize)>) -> ReactionNetwork<Rational> {
        let cols: Vec<Vec<Rational>> = cols.iter().map(|c| c.iter().map(|&v| q(v)).collect()).collect();
        let g = LabeledDigraph::from_indexed(cols.len(), edges.into_iter().map(|(s, t)| (s, t, q(1))).collect())
            .unwrap();
        let species = (1..=n_species).map(|i| format!("X{i}")).collect();
        build_network(species, Matrix::from_columns(&cols, n_species), g).unwrap()
    }

    fn three_cycle() -> ReactionNetwork<Rational> {
        net(2, &[&[2, 1], &[0, 2], &[1, 0]], vec![(0, 1), (1, 2), (2, 0)])
    }

    fn two_component() -> ReactionNetwork<Rational> {
        net(
            2,
            &[&[2, 1], &[0, 2], &[1, 0], &[0, 0], &[1, 1]],
            vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 3)],
        )
    }

    fn half() -> Vec<Rational> {
        vec![Rational::from_ratio(1, 2); 2]
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn orders_follow_scaled_monomials() {
        let n = three_cycle();
        let aux = monomial_order(&n, &half()).unwrap();
        assert_eq!(aux.chain_orders(n.graph()).unwrap(), vec![vec![0, 1, 2]]);
        let tie = monomial_order(&n, &[q(1), q(1)]).unwrap();
        assert_eq!(tie.chain_orders(n.graph()).unwrap(), vec![vec![0, 1, 2]]);
        let two = two_component();
        let aux = monomial_order(&two, &[q(2), q(1)]).unwrap();
        assert_eq!(aux.chain_orders(two.graph()).unwrap(), vec![vec![1, 2, 0], vec![3, 4]]);
    }

    #[test]
    fn tied_orders_are_enumerated() {
        let n = three_cycle();
        let all = admissible_chain_orders(&n, &[q(1), q(1)], STRICT_TOL, 64).unwrap().unwrap();
        assert_eq!(all.len(), 6);
        assert!(admissible_chain_orders(&n, &[q(1), q(1)], STRICT_TOL, 5).unwrap().is_none());
        let one = admissible_chain_orders(&n, &half(), STRICT_TOL, 64).unwrap().unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn stratum_membership() {
        let n = three_cycle();
        let aux = AuxTree::chain(n.graph(), &[vec![0, 1, 2]]).unwrap();
        assert!(stratum_contains(&n, &aux, &half()).unwrap());
        assert!(!stratum_contains(&n, &aux, &[q(2), q(1)]).unwrap());
        assert!(stratum_contains(&n, &aux, &[q(1), q(1)]).unwrap());
        let bad = AuxTree::unchecked(n.graph(), &[(0, 1)], crate::graph::AuxKind::Chain);
        assert!(matches!(stratum_contains(&n, &bad, &half()), Err(Error::InvalidAuxTree(_))));
    }

    #[test]
    fn plane_cone_and_rays() {
        let n = three_cycle();
        let aux = AuxTree::chain(n.graph(), &[vec![0, 1, 2]]).unwrap();
        let desc = region_constraints(&n, &aux, RegionMode::Cone).unwrap();
        assert_eq!(desc.normals.columns(), vec![ints(&[-2, 1]), ints(&[1, -2])]);
        assert_eq!(desc.lineality.cols(), 0);
        assert_eq!(extreme_rays(&desc).unwrap(), &[ints(&[-2, -1]), ints(&[-1, -2])]);
        assert!(!is_trivial_cone(&desc).unwrap());
        let report = polar_interior_contains(&desc, &[0.5, 0.125]).unwrap();
        assert!(report.inside);
        assert_eq!(report.ray_products, vec![-1.125, -0.75]);
        assert!(!polar_interior_contains(&desc, &[0.0, 0.0]).unwrap().inside);
        assert!(!polar_interior_contains(&desc, &[-1.0, -2.0]).unwrap().inside);
    }

    #[test]
    fn second_component_makes_cone_trivial() {
        let n = two_component();
        let aux = AuxTree::chain(n.graph(), &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let desc = region_constraints(&n, &aux, RegionMode::Cone).unwrap();
        assert_eq!(desc.normals.column(2), ints(&[1, 1]));
        assert!(is_trivial_cone(&desc).unwrap());
    }

    #[test]
    fn edgeless_network_has_trivial_cone() {
        let n = net(2, &[&[1, 0], &[0, 1]], vec![]);
        let aux = AuxTree::canonical_chain(n.graph());
        let desc = region_constraints(&n, &aux, RegionMode::Cone).unwrap();
        assert!(is_trivial_cone(&desc).unwrap());
        assert_eq!(desc.lineality.cols(), 2);
    }

    #[test]
    fn half_space_has_one_ray_modulo_lineality() {
        // 0 ⇄ X1 with species X1, X2: single normal (1, 0), lineality e2.
        let n = net(2, &[&[0, 0], &[1, 0]], vec![(0, 1), (1, 0)]);
        let aux = AuxTree::canonical_chain(n.graph());
        let desc = region_constraints(&n, &aux, RegionMode::Cone).unwrap();
        assert_eq!(desc.lineality.columns(), vec![ints(&[0, 1])]);
        assert_eq!(extreme_rays(&desc).unwrap().len(), 1);
        let ray = &extreme_rays(&desc).unwrap()[0];
        assert_eq!(dot(&desc.normals.column(0), ray), q(1));
    }

    #[test]
    fn polyhedron_matches_stratum_in_log_coordinates() {
        let n = three_cycle();
        let aux = AuxTree::chain(n.graph(), &[vec![0, 1, 2]]).unwrap();
        let poly = region_constraints(&n, &aux, RegionMode::Polyhedron).unwrap();
        assert!(poly.contains(&[0.5f64.ln(), 0.5f64.ln()], 1e-10));
        assert!(!poly.contains(&[2f64.ln(), 0.0], 1e-10));
    }

    #[test]
    fn recession_check_on_three_cycle() {
        let n = three_cycle();
        let aux = AuxTree::chain(n.graph(), &[vec![0, 1, 2]]).unwrap();
        assert!(recession_polar_check(&n, &aux, &half()).unwrap().inside);
        assert!(!recession_polar_check(&n, &aux, &[q(1), q(1)]).unwrap().inside);
        assert_eq!(recession_polar_check(&n, &aux, &[q(2), q(1)]), Err(Error::PointNotInStratum));
    }

    #[test]
    fn large_dimension_refused() {
        let cols: Vec<Vec<i64>> = (0..2).map(|j| (0..11).map(|i| i64::from(i == j)).collect()).collect();
        let refs: Vec<&[i64]> = cols.iter().map(Vec::as_slice).collect();
        let n = net(11, &refs, vec![(0, 1), (1, 0)]);
        let desc = region_constraints(&n, &AuxTree::canonical_chain(n.graph()), RegionMode::Cone).unwrap();
        assert_eq!(extreme_rays(&desc), Err(Error::DimensionTooLarge(11, 10)));
    }
}
