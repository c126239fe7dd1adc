//! Lyapunov function `L(x) = Σ x_i (ln(x_i/x*_i) - 1) + x*_i`, the
//! chain-core decrease certificate, binomial differential inclusion
//! membership, and trajectory simulation.

use crate::crn::{binomials, check_positive, scaled_monomials, ReactionNetwork};
use crate::equilibria::{require_cbe, solve_cbe, CbeStatus};
use crate::error::{Error, Result};
use crate::geometry::{
    admissible_chain_orders, monomial_order, polar_interior_contains, region_constraints, stratum_contains,
    RegionMode, LINEALITY_TOL, MAX_TIED_ORDERS, STRICT_TOL,
};
use crate::graph::AuxTree;
use crate::laplacian::core_matrix;
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

/// Absolute bound on `|v|` for the inclusion on the equilibrium manifold.
pub const ZERO_VELOCITY_TOL: f64 = 1e-12;

fn check_pair(x: &[f64], x_star: &[f64]) -> Result<()> {
    check_positive(x)?;
    check_positive(x_star)?;
    if x.len() != x_star.len() {
        return Err(Error::ShapeMismatch(format!("states of length {} and {}", x.len(), x_star.len())));
    }
    Ok(())
}

pub fn lyapunov_value(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_pair(x, x_star)?;
    Ok(x.iter().zip(x_star).map(|(a, b)| a * ((a / b).ln() - 1.0) + b).sum())
}

/// `∇L(x) = ln(x/x*)`.
pub fn lyapunov_gradient(x: &[f64], x_star: &[f64]) -> Result<Vec<f64>> {
    check_pair(x, x_star)?;
    Ok(x.iter().zip(x_star).map(|(a, b)| (a / b).ln()).collect())
}

/// `ln(x/x*) · f_k(x)`.
pub fn lyapunov_derivative<T: Scalar>(net: &ReactionNetwork<T>, x: &[f64], x_star: &[f64]) -> Result<f64> {
    let fnet = net.to_float();
    let u = lyapunov_gradient(x, x_star)?;
    require_cbe(&fnet, x_star)?;
    let f = crate::crn::mass_action_rhs(&fnet, x)?;
    Ok(dot(&u, &f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    StrictDecrease,
    Equilibrium,
    Failure,
}

/// `dL/dt = -aᵀ 𝒜 b` on the stratum of the monomial order of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCertificate {
    pub aux: AuxTree,
    /// `(Y I_ℰ)ᵀ ln(x/x*)`.
    pub a: Vec<f64>,
    /// `I_ℰᵀ diag(K_k⁻¹) x^Y`.
    pub b: Vec<f64>,
    pub core: Matrix<f64>,
    pub value: f64,
    /// An edge of `ℰ` with `a > 0` and `b > 0`.
    pub witness_edge: Option<usize>,
    pub verdict: Verdict,
}

pub fn decrease_certificate<T: Scalar>(
    net: &ReactionNetwork<T>,
    x: &[f64],
    x_star: &[f64],
) -> Result<StabilityCertificate> {
    let fnet = net.to_float();
    let u = lyapunov_gradient(x, x_star)?;
    require_cbe(&fnet, x_star)?;
    let aux = monomial_order(&fnet, x)?;
    let core = core_matrix(net.graph(), &aux)?.core.to_f64();
    let normals = fnet.aux_reaction_vectors(&aux);
    let a = normals.tr_mul_vec(&u);
    let b = binomials(&fnet, &aux, x)?;
    let value = -dot(&a, &core.mul_vec(&b));

    let scale_b = scaled_monomials(&fnet, fnet.tree_constants()?, x)?
        .into_iter()
        .fold(0.0, f64::max);
    let scale_a = u.iter().map(|v| v.abs()).fold(0.0, f64::max) * normals.max_abs();
    let tol_a = STRICT_TOL * scale_a;
    let tol_b = STRICT_TOL * scale_b;
    let signs_ok = a.iter().all(|v| *v >= -tol_a) && b.iter().all(|v| *v >= -tol_b);
    let witness_edge = (0..b.len()).find(|&j| a[j] > tol_a && b[j] > tol_b);
    let verdict = if b.iter().all(|v| v.abs() <= tol_b) {
        Verdict::Equilibrium
    } else if signs_ok && value < 0.0 {
        Verdict::StrictDecrease
    } else {
        Verdict::Failure
    };
    Ok(StabilityCertificate {
        aux,
        a,
        b,
        core,
        value,
        witness_edge,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BdiVerdict {
    Member,
    NotMember,
    /// More tied orders than the enumeration cap.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BdiReport {
    pub verdict: BdiVerdict,
    /// `ln(x/x*) ∈ S⊥`.
    pub on_equilibrium_manifold: bool,
    /// Chain orders whose strata contain `x`.
    pub orders_checked: usize,
}

/// `v ∈ F(ln(x/x*))`: `{0}` on `S⊥`, otherwise the interior of the polar
/// cones of every chain stratum containing `x`.
pub fn bdi_membership<T: Scalar>(net: &ReactionNetwork<T>, x_star: &[f64], x: &[f64], v: &[f64]) -> Result<BdiReport> {
    let fnet = net.to_float();
    let u = lyapunov_gradient(x, x_star)?;
    require_cbe(&fnet, x_star)?;
    if v.len() != u.len() {
        return Err(Error::ShapeMismatch(format!("velocity has {} entries, expected {}", v.len(), u.len())));
    }
    let u_scale = u.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let on_manifold = fnet.s_basis().columns().iter().all(|s| {
        let s_scale = s.iter().map(|e| e.abs()).fold(0.0, f64::max);
        dot(s, &u).abs() <= LINEALITY_TOL * u_scale * s_scale
    });
    if on_manifold {
        let zero = v.iter().all(|e| e.abs() <= ZERO_VELOCITY_TOL);
        return Ok(BdiReport {
            verdict: if zero { BdiVerdict::Member } else { BdiVerdict::NotMember },
            on_equilibrium_manifold: true,
            orders_checked: 0,
        });
    }
    let Some(orders) = admissible_chain_orders(&fnet, x, STRICT_TOL, MAX_TIED_ORDERS)? else {
        return Ok(BdiReport {
            verdict: BdiVerdict::Indeterminate,
            on_equilibrium_manifold: false,
            orders_checked: 0,
        });
    };
    let mut checked = 0;
    let mut inside = true;
    for aux in orders {
        if !stratum_contains(&fnet, &aux, x)? {
            continue;
        }
        checked += 1;
        let desc = region_constraints(net, &aux, RegionMode::Cone)?;
        inside &= polar_interior_contains(&desc, v)?.inside;
    }
    Ok(BdiReport {
        verdict: if inside { BdiVerdict::Member } else { BdiVerdict::NotMember },
        on_equilibrium_manifold: false,
        orders_checked: checked,
    })
}

/// Integrator settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationControls {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the vector field when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Reference equilibrium for `L`; solved for when `None`.
    pub x_star: Option<Vec<f64>>,
}

impl Default for SimulationControls {
    fn default() -> Self {
        SimulationControls {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: None,
            max_steps: 1_000_000,
            x_star: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `L(x(t))` per recorded state; empty without a reference equilibrium.
    pub lyapunov: Vec<f64>,
    pub x_star: Option<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Mass-action vector field in edge-sum form, for positive states.
struct VectorField {
    sources: Vec<usize>,
    rates: Vec<f64>,
    exponents: Vec<Vec<f64>>,
    jumps: Vec<Vec<f64>>,
}

impl VectorField {
    fn new(net: &ReactionNetwork<f64>) -> Self {
        let g = net.graph();
        let y = net.complexes();
        let exponents = (0..g.vertex_count()).map(|v| y.column(v)).collect();
        let jumps = g
            .edges()
            .iter()
            .map(|e| (0..y.rows()).map(|r| y[(r, e.target)] - y[(r, e.source)]).collect())
            .collect();
        VectorField {
            sources: g.edges().iter().map(|e| e.source).collect(),
            rates: g.labels().to_vec(),
            exponents,
            jumps,
        }
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let monomials: Vec<f64> = self
            .exponents
            .iter()
            .map(|y| x.iter().zip(y).map(|(xi, yi)| if *yi == 0.0 { 1.0 } else { xi.powf(*yi) }).product())
            .collect();
        let mut f = vec![0.0; x.len()];
        for ((s, k), jump) in self.sources.iter().zip(&self.rates).zip(&self.jumps) {
            let flux = k * monomials[*s];
            for (fi, d) in f.iter_mut().zip(jump) {
                *fi += flux * d;
            }
        }
        f
    }
}

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates `dx/dt = f_k(x)` on `[0, t_end]` with the Dormand–Prince 5(4)
/// pair. Steps leaving the positive orthant are rejected and halved.
pub fn simulate<T: Scalar>(
    net: &ReactionNetwork<T>,
    x0: &[f64],
    t_end: f64,
    controls: &SimulationControls,
) -> Result<Trajectory> {
    check_positive(x0)?;
    let fnet = net.to_float();
    if x0.len() != fnet.species_count() {
        return Err(Error::ShapeMismatch(format!(
            "state has {} entries, network has {} species",
            x0.len(),
            fnet.species_count()
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("end time {t_end} must be positive")));
    }
    let x_star = match &controls.x_star {
        Some(s) => {
            check_pair(x0, s)?;
            Some(s.clone())
        }
        None if fnet.is_weakly_reversible() => {
            let r = solve_cbe(&fnet)?;
            (r.status == CbeStatus::Found).then(|| r.witness).flatten()
        }
        None => None,
    };
    let field = VectorField::new(&fnet);
    let n = x0.len();
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut k1 = field.eval(&x);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        lyapunov: Vec::new(),
        x_star: x_star.clone(),
        accepted: 0,
        rejected: 0,
    };
    let record_l = |state: &[f64], out: &mut Vec<f64>| {
        if let Some(s) = &x_star {
            out.push(lyapunov_value(state, s).expect("positive states"));
        }
    };
    record_l(&x, &mut traj.lyapunov);
    let mut h = controls.initial_step.unwrap_or_else(|| {
        let fmax = k1.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let xmax = x.iter().cloned().fold(0.0, f64::max);
        if fmax > 0.0 {
            (0.01 * xmax / fmax).min(t_end)
        } else {
            t_end
        }
    });
    let mut k = vec![vec![0.0; n]; 7];
    while t < t_end {
        if traj.accepted + traj.rejected >= controls.max_steps {
            return Err(Error::NoConvergence(controls.max_steps));
        }
        h = h.min(t_end - t);
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow(h));
        }
        k[0].clone_from(&k1);
        let mut positive = true;
        for s in 1..7 {
            let stage: Vec<f64> = (0..n)
                .map(|i| x[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
                .collect();
            if stage.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
                positive = false;
                break;
            }
            k[s] = field.eval(&stage);
        }
        if !positive {
            traj.rejected += 1;
            h *= 0.5;
            continue;
        }
        // Stage 7 is evaluated at the fifth-order solution.
        let x_new: Vec<f64> = (0..n)
            .map(|i| x[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>())
            .collect();
        let err = ((0..n)
            .map(|i| {
                let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                let sc = controls.atol + controls.rtol * x[i].abs().max(x_new[i].abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n.max(1) as f64)
            .sqrt();
        if err <= 1.0 {
            t = if t_end - t - h <= 1e-15 * t_end { t_end } else { t + h };
            x = x_new;
            k1 = k[6].clone();
            traj.accepted += 1;
            traj.times.push(t);
            traj.states.push(x.clone());
            record_l(&x, &mut traj.lyapunov);
        } else {
            traj.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crn::build_network;
    use crate::graph::LabeledDigraph;
    use crate::scalar::Rational;

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

    #[test]
    fn lyapunov_values() {
        assert_eq!(lyapunov_value(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((lyapunov_value(&[std::f64::consts::E, 1.0], &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((lyapunov_value(&[0.5, 0.5], &[1.0, 1.0]).unwrap() - 0.306853).abs() < 1e-6);
        assert_eq!(lyapunov_value(&[0.0, 1.0], &[1.0, 1.0]), Err(Error::NonPositiveState));
    }

    #[test]
    fn derivative_on_three_cycle() {
        let n = three_cycle();
        let d = lyapunov_derivative(&n, &[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!((d - 0.5f64.ln() * 0.625).abs() < 1e-15);
        assert!((d + 0.43321).abs() < 1e-5);
        assert_eq!(lyapunov_derivative(&n, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(lyapunov_derivative(&n, &[1.0, 1.0], &[0.5, 0.5]), Err(Error::NotACbe(_))));
    }

    #[test]
    fn certificate_on_three_cycle() {
        let n = three_cycle();
        let c = decrease_certificate(&n, &[0.5, 0.5], &[1.0, 1.0]).unwrap();
        let ln2 = 2f64.ln();
        assert!((c.a[0] - ln2).abs() < 1e-15 && (c.a[1] - ln2).abs() < 1e-15);
        assert_eq!(c.b, vec![0.125, 0.25]);
        assert_eq!(c.core.entries(), &[1.0, 1.0, 0.0, 1.0]);
        assert!((c.value - lyapunov_derivative(&n, &[0.5, 0.5], &[1.0, 1.0]).unwrap()).abs() < 1e-15);
        assert_eq!(c.verdict, Verdict::StrictDecrease);
        assert_eq!(c.witness_edge, Some(0));
        let eq = decrease_certificate(&n, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(eq.verdict, Verdict::Equilibrium);
    }

    #[test]
    fn inclusion_examples() {
        let n = three_cycle();
        let f = vec![0.5, 0.125];
        assert_eq!(bdi_membership(&n, &[1.0, 1.0], &[0.5, 0.5], &f).unwrap().verdict, BdiVerdict::Member);
        let minus: Vec<f64> = f.iter().map(|v| -v).collect();
        assert_eq!(bdi_membership(&n, &[1.0, 1.0], &[0.5, 0.5], &minus).unwrap().verdict, BdiVerdict::NotMember);
        let at_eq = bdi_membership(&n, &[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!(at_eq.on_equilibrium_manifold);
        assert_eq!(at_eq.verdict, BdiVerdict::Member);
    }

    #[test]
    fn boundary_state_with_zero_core_entry() {
        // On the tie x1^2 x2 = x2^2 the chain core [[1,1],[0,1]] has a zero
        // entry and f_k(x) lands on a ray of the cone of the other order.
        let n = net(2, &[&[2, 1], &[0, 2], &[1, 0]], vec![(0, 1), (1, 2), (2, 0)]);
        let x = [0.25, 0.5];
        let f = crate::crn::mass_action_rhs(&n.to_float(), &x).unwrap();
        assert_eq!(f, vec![0.4375, -0.21875]);
        assert_eq!(f[0] * -1.0 + f[1] * -2.0, 0.0);
        let report = bdi_membership(&n, &[1.0, 1.0], &x, &f).unwrap();
        assert_eq!(report.orders_checked, 2);
        assert_eq!(report.verdict, BdiVerdict::NotMember);
    }

    #[test]
    fn simulation_converges_on_three_cycle() {
        let n = three_cycle();
        let traj = simulate(&n, &[0.5, 0.5], 50.0, &SimulationControls::default()).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 50.0);
        let end = traj.final_state();
        assert!((end[0] - 1.0).abs() < 1e-6 && (end[1] - 1.0).abs() < 1e-6);
        assert!(traj.lyapunov.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        let still = simulate(&n, &[1.0, 1.0], 5.0, &SimulationControls::default()).unwrap();
        assert!(still.states.iter().all(|s| s == &vec![1.0, 1.0]));
    }

    #[test]
    fn simulation_conserves_mass() {
        let n = net(2, &[&[1, 0], &[0, 1]], vec![(0, 1), (1, 0)]);
        let traj = simulate(&n, &[3.0, 1.0], 20.0, &SimulationControls::default()).unwrap();
        for s in &traj.states {
            assert!((s[0] + s[1] - 4.0).abs() < 1e-7);
        }
        assert!((traj.final_state()[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn simulation_rejects_bad_input() {
        let n = three_cycle();
        let c = SimulationControls::default();
        assert_eq!(simulate(&n, &[0.0, 1.0], 1.0, &c), Err(Error::NonPositiveState));
        assert!(matches!(simulate(&n, &[1.0, 1.0], -1.0, &c), Err(Error::InvalidArgument(_))));
    }
}
