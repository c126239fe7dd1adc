//! Complex-balanced equilibria (CBEs): detection, solving in log
//! coordinates, sampling of the CBE manifold `x* ∘ e^{S⊥}`, and its unique
//! intersection with a stoichiometric class.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crn::{check_positive, monomial_vector, ReactionNetwork};
use crate::error::{Error, Result};
use crate::graph::AuxTree;
use crate::laplacian::laplacian_matrix;
use crate::scalar::Scalar;

/// Relative tolerance of the CBE test in float mode.
pub const CBE_TOL: f64 = 1e-10;
/// Relative consistency tolerance of the log-coordinate system.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Damped Newton iterations allowed in [`birch_intersect`].
pub const NEWTON_MAX_ITER: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct CbeCheck {
    pub is_cbe: bool,
    /// `‖A_k x^Y‖∞`.
    pub residual: f64,
    /// `‖diag(k) I_{E,s}ᵀ x^Y‖∞`, the largest reaction flux.
    pub scale: f64,
}

/// Tests `A_k x^Y = 0`: exactly for rationals, relative to the largest
/// reaction flux for floats.
pub fn is_cbe<T: Scalar>(net: &ReactionNetwork<T>, x: &[T]) -> Result<CbeCheck> {
    let m = monomial_vector(net, x)?;
    let flow = laplacian_matrix(net.graph()).mul_vec(&m);
    let g = net.graph();
    let scale = g
        .edges()
        .iter()
        .zip(g.labels())
        .map(|(e, k)| (k.clone() * m[e.source].clone()).to_f64().abs())
        .fold(0.0, f64::max);
    let residual = flow.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let is_cbe = flow.iter().all(|v| v.is_negligible(scale, CBE_TOL));
    Ok(CbeCheck { is_cbe, residual, scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbeStatus {
    Found,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CbeResult {
    pub status: CbeStatus,
    pub witness: Option<Vec<f64>>,
    /// Distance of `I_ℰᵀ ln K_k` from `im((Y I_ℰ)ᵀ)`.
    pub log_residual: f64,
}

/// Solves `(Y I_ℰ)ᵀ z = I_ℰᵀ ln K_k` for the canonical chain tree and
/// returns `x* = e^z` for the minimum-norm `z`.
pub fn solve_cbe<T: Scalar>(net: &ReactionNetwork<T>) -> Result<CbeResult> {
    solve_cbe_with(net, &AuxTree::canonical_chain(net.graph()))
}

/// As [`solve_cbe`] for a given auxiliary tree.
pub fn solve_cbe_with<T: Scalar>(net: &ReactionNetwork<T>, aux: &AuxTree) -> Result<CbeResult> {
    let k = net.tree_constants()?;
    crate::graph::validate_aux_tree(net.graph(), aux).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
    let n = net.species_count();
    let normals = net.aux_reaction_vectors(aux).to_f64();
    let m = aux.edges.len();
    let ln_k: Vec<f64> = k.iter().map(|v| ln_scalar(v)).collect();
    let rhs = DVector::from_iterator(m, aux.edges.iter().map(|e| ln_k[e.target] - ln_k[e.source]));
    let system = DMatrix::from_fn(m, n, |r, c| normals[(c, r)]);
    let z = if m == 0 || n == 0 {
        DVector::zeros(n)
    } else {
        let svd = system.clone().svd(true, true);
        let eps = f64::EPSILON * (m.max(n) as f64) * svd.singular_values.max().max(1.0);
        svd.solve(&rhs, eps).map_err(|e| Error::InvalidArgument(e.to_string()))?
    };
    let log_residual = if m == 0 { 0.0 } else { (&system * &z - &rhs).norm() };
    let tolerance = CONSISTENCY_TOL * rhs.norm().max(1.0);
    if log_residual <= tolerance {
        Ok(CbeResult {
            status: CbeStatus::Found,
            witness: Some(z.iter().map(|v| v.exp()).collect()),
            log_residual,
        })
    } else {
        Ok(CbeResult {
            status: CbeStatus::Infeasible,
            witness: None,
            log_residual,
        })
    }
}

/// `ln` of a positive scalar, accurate for rationals beyond the `f64` range.
fn ln_scalar<T: Scalar>(v: &T) -> f64 {
    let f = v.to_f64();
    if f.is_finite() && f > 0.0 {
        return f.ln();
    }
    let r = v.to_rational().expect("finite scalar");
    let bits = |b: &num_bigint::BigInt| {
        let digits = b.bits();
        let shift = digits.saturating_sub(60);
        let head: f64 = num_traits::ToPrimitive::to_f64(&(b >> shift)).unwrap_or(f64::NAN);
        head.ln() + shift as f64 * std::f64::consts::LN_2
    };
    bits(r.numer()) - bits(r.denom())
}

pub(crate) fn require_cbe(net: &ReactionNetwork<f64>, x_star: &[f64]) -> Result<()> {
    let check = is_cbe(net, x_star)?;
    if check.is_cbe {
        Ok(())
    } else {
        Err(Error::NotACbe(check.residual))
    }
}

/// `count` points `x* ∘ e^w`, `w` uniform in the box `[-1, 1]` over the
/// `S⊥` basis coordinates.
pub fn cbe_manifold_sample<T: Scalar>(
    net: &ReactionNetwork<T>,
    x_star: &[f64],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let fnet = net.to_float();
    require_cbe(&fnet, x_star)?;
    let w = fnet.s_perp_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let c: Vec<f64> = (0..w.cols()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let shift = w.mul_vec(&c);
            x_star.iter().zip(shift).map(|(x, s)| x * s.exp()).collect()
        })
        .collect())
}

/// The unique point of `x* ∘ e^{S⊥}` in the class `x' + S`.
pub fn birch_intersect<T: Scalar>(net: &ReactionNetwork<T>, x_star: &[f64], x_prime: &[f64]) -> Result<Vec<f64>> {
    let d = net.s_perp_basis().cols();
    birch_intersect_from(net, x_star, x_prime, &vec![0.0; d])
}

/// Damped Newton on `h(c) = Σ x*_i e^{(Wc)_i} - c·(Wᵀx')`, `W` a basis of
/// `S⊥`, started at `c0`.
pub fn birch_intersect_from<T: Scalar>(
    net: &ReactionNetwork<T>,
    x_star: &[f64],
    x_prime: &[f64],
    c0: &[f64],
) -> Result<Vec<f64>> {
    let fnet = net.to_float();
    check_positive(x_prime)?;
    require_cbe(&fnet, x_star)?;
    let n = fnet.species_count();
    if x_prime.len() != n {
        return Err(Error::ShapeMismatch(format!("state has {} entries, expected {n}", x_prime.len())));
    }
    let basis = fnet.s_perp_basis();
    let d = basis.cols();
    if c0.len() != d {
        return Err(Error::ShapeMismatch(format!("start has {} entries, expected {d}", c0.len())));
    }
    if d == 0 {
        return Ok(x_star.to_vec());
    }
    let w = DMatrix::from_fn(n, d, |r, c| basis[(r, c)]);
    let xs = DVector::from_column_slice(x_star);
    let target = w.transpose() * DVector::from_column_slice(x_prime);
    let point = |c: &DVector<f64>| xs.component_mul(&(&w * c).map(f64::exp));
    let h = |c: &DVector<f64>| point(c).sum() - c.dot(&target);
    let scale = target.amax().max(xs.amax()).max(x_prime.iter().cloned().fold(0.0, f64::max));
    let mut c = DVector::from_column_slice(c0);
    for _ in 0..NEWTON_MAX_ITER {
        let x = point(&c);
        let grad = w.transpose() * &x - &target;
        if grad.amax() <= 1e-12 * scale {
            return Ok(x.iter().copied().collect());
        }
        let hess = w.transpose() * DMatrix::from_diagonal(&x) * &w;
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => hess.lu().solve(&(-&grad)).ok_or(Error::NoConvergence(0))?,
        };
        // Near the minimum the decrease of h drops below rounding, so small
        // Newton decrements take the full step.
        let decrement = -grad.dot(&step);
        if decrement <= 1e-8 * (1.0 + scale) {
            c += step;
            continue;
        }
        let h0 = h(&c);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let trial = &c + &step * t;
            if h(&trial) <= h0 - 1e-4 * t * decrement {
                c = trial;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            return Err(Error::NoConvergence(NEWTON_MAX_ITER));
        }
    }
    let x = point(&c);
    let grad = w.transpose() * &x - &target;
    if grad.amax() <= 1e-12 * scale {
        Ok(x.iter().copied().collect())
    } else {
        Err(Error::NoConvergence(NEWTON_MAX_ITER))
    }
}

/// Residuals of a Birch point: distance from `x' + S` (via `Wᵀ(x - x')`)
/// and from the manifold (the `S`-component of `ln(x/x*)`), both relative.
pub fn birch_residuals<T: Scalar>(net: &ReactionNetwork<T>, x_star: &[f64], x_prime: &[f64], x: &[f64]) -> (f64, f64) {
    let fnet = net.to_float();
    let w = fnet.s_perp_basis();
    let s = fnet.s_basis();
    let scale = x.iter().chain(x_prime).cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let diff: Vec<f64> = x.iter().zip(x_prime).map(|(a, b)| a - b).collect();
    let class = w.tr_mul_vec(&diff).iter().map(|v| v.abs()).fold(0.0, f64::max) / scale;
    let log: Vec<f64> = x.iter().zip(x_star).map(|(a, b)| (a / b).ln()).collect();
    let log_scale = log.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let manifold = s.tr_mul_vec(&log).iter().map(|v| v.abs()).fold(0.0, f64::max) / log_scale;
    (class, manifold)
}

/// Float copy of a state in any scalar type.
pub fn to_float_state<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(Scalar::to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crn::build_network;
    use crate::graph::LabeledDigraph;
    use crate::linalg::Matrix;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn net(n_species: usize, cols: &[&[i64]], edges: Vec<(usize, usize, i64)>) -> ReactionNetwork<Rational> {
        let cols: Vec<Vec<Rational>> = cols.iter().map(|c| c.iter().map(|&v| q(v)).collect()).collect();
        let g = LabeledDigraph::from_indexed(cols.len(), edges.into_iter().map(|(s, t, k)| (s, t, q(k))).collect())
            .unwrap();
        let species = (1..=n_species).map(|i| format!("X{i}")).collect();
        build_network(species, Matrix::from_columns(&cols, n_species), g).unwrap()
    }

    fn three_cycle() -> ReactionNetwork<Rational> {
        net(2, &[&[2, 1], &[0, 2], &[1, 0]], vec![(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    }

    #[test]
    fn cbe_detection() {
        let n = three_cycle();
        assert!(is_cbe(&n, &[q(1), q(1)]).unwrap().is_cbe);
        assert!(!is_cbe(&n, &[Rational::from_ratio(1, 2), Rational::from_ratio(1, 2)]).unwrap().is_cbe);
        assert!(!is_cbe(&n.to_float(), &[0.5, 0.5]).unwrap().is_cbe);
        let single = net(1, &[&[1]], vec![]);
        assert!(is_cbe(&single, &[q(5)]).unwrap().is_cbe);
    }

    #[test]
    fn solve_unit_three_cycle() {
        let r = solve_cbe(&three_cycle()).unwrap();
        assert_eq!(r.status, CbeStatus::Found);
        for v in r.witness.unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let single = net(1, &[&[1]], vec![]);
        assert_eq!(solve_cbe(&single).unwrap().witness, Some(vec![1.0]));
    }

    #[test]
    fn infeasible_when_binomials_conflict() {
        // X ⇄ 2X and 0 ⇄ X in one linkage class with unbalanced rates: the
        // log system over-determines ln x.
        let n = net(1, &[&[0], &[1], &[2]], vec![(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 3)]);
        let r = solve_cbe(&n).unwrap();
        assert_eq!(r.status, CbeStatus::Infeasible);
        assert!(r.log_residual > 0.1);
    }

    #[test]
    fn sampling_stays_on_manifold() {
        let n = three_cycle();
        let pts = cbe_manifold_sample(&n, &[1.0, 1.0], 5, 7).unwrap();
        assert!(pts.iter().all(|p| p == &vec![1.0, 1.0]));
        assert!(cbe_manifold_sample(&n, &[1.0, 1.0], 0, 7).unwrap().is_empty());
        assert!(matches!(cbe_manifold_sample(&n, &[0.5, 0.5], 1, 7), Err(Error::NotACbe(_))));
        // 2X ⇄ X + Y ⇄ 2Y: S⊥ is spanned by (1, 1).
        let line = net(2, &[&[2, 0], &[1, 1], &[0, 2]], vec![(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1)]);
        let pts = cbe_manifold_sample(&line, &[1.0, 1.0], 10, 3).unwrap();
        for p in pts {
            assert!((p[0] - p[1]).abs() < 1e-12);
            assert!(is_cbe(&line.to_float(), &p).unwrap().is_cbe);
        }
    }

    #[test]
    fn birch_point_examples() {
        let n = three_cycle();
        assert_eq!(birch_intersect(&n, &[1.0, 1.0], &[3.0, 0.2]).unwrap(), vec![1.0, 1.0]);
        let autocatalytic = net(1, &[&[1], &[2]], vec![(0, 1, 1), (1, 0, 1)]);
        let x = birch_intersect(&autocatalytic, &[1.0], &[4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        // A ⇄ B: the class of (3, 1) meets the manifold at (2, 2).
        let iso = net(2, &[&[1, 0], &[0, 1]], vec![(0, 1, 1), (1, 0, 1)]);
        let x = birch_intersect(&iso, &[1.0, 1.0], &[3.0, 1.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
        let (class, manifold) = birch_residuals(&iso, &[1.0, 1.0], &[3.0, 1.0], &x);
        assert!(class < 1e-10 && manifold < 1e-10);
        let again = birch_intersect_from(&iso, &[1.0, 1.0], &[3.0, 1.0], &[2.5]).unwrap();
        assert!((again[0] - x[0]).abs() < 1e-9);
    }

    #[test]
    fn log_of_huge_rationals() {
        let big = Rational::from_integer(num_bigint::BigInt::from(10).pow(400u32));
        assert!((ln_scalar(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
