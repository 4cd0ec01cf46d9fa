//! Auxiliary-angle schedules `theta(t)`, `beta(t)`, `gamma(t)`.
//!
//! Every schedule is a closed-form evaluable object with an analytic first
//! derivative. No schedule is ever sampled into a table and interpolated.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::integrate_real;

/// A real function of time with an analytic first derivative.
pub trait Schedule: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// Real polynomial `sum_j c_j t^j` on `[0, t_f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSchedule {
    coefficients: Vec<f64>,
    t_f: f64,
}

impl PolynomialSchedule {
    pub fn new(coefficients: Vec<f64>, t_f: f64) -> Result<Self> {
        ensure_positive("t_f", t_f)?;
        if coefficients.is_empty() {
            return Err(Error::invalid("coefficients", "at least one coefficient is required"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "coefficients must be finite"));
        }
        Ok(PolynomialSchedule { coefficients, t_f })
    }

    pub fn constant(value: f64, t_f: f64) -> Result<Self> {
        Self::new(vec![value], t_f)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * t + (j * (j - 1)) as f64 * c)
    }
}

impl Schedule for PolynomialSchedule {
    fn value(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    fn derivative(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * t + j as f64 * c)
    }
}

/// Cubic with `theta(0) = 0`, `theta(t_f) = pi` and vanishing slope at both ends:
/// `theta(t) = 3 pi (t/t_f)^2 - 2 pi (t/t_f)^3`.
pub fn build_theta_cubic(t_f: f64) -> Result<PolynomialSchedule> {
    ensure_positive("t_f", t_f)?;
    PolynomialSchedule::new(vec![0.0, 0.0, 3.0 * PI / (t_f * t_f), -2.0 * PI / (t_f * t_f * t_f)], t_f)
}

/// Quartic `beta_s` with `beta_s(0) = beta_s(t_f) = pi/2`, `beta_s(t_f/2) = beta_mid`,
/// `beta_s'(0) = edge_slope` and `beta_s'(t_f) = -edge_slope`.
pub fn build_beta_quartic(t_f: f64, beta_mid: f64, edge_slope: f64) -> Result<PolynomialSchedule> {
    ensure_positive("t_f", t_f)?;
    if !beta_mid.is_finite() || !edge_slope.is_finite() {
        return Err(Error::invalid("beta_mid/edge_slope", "must be finite"));
    }
    let row = |t: f64| -> Vec<f64> { (0..5).map(|j| t.powi(j)).collect() };
    let drow = |t: f64| -> Vec<f64> {
        (0..5).map(|j| if j == 0 { 0.0 } else { j as f64 * t.powi(j - 1) }).collect()
    };
    let matrix = vec![row(0.0), row(t_f), row(0.5 * t_f), drow(0.0), drow(t_f)];
    let rhs = vec![FRAC_PI_2, FRAC_PI_2, beta_mid, edge_slope, -edge_slope];
    let coefficients = solve_linear(matrix, rhs)?;
    PolynomialSchedule::new(coefficients, t_f)
}

/// Dense Gaussian elimination with partial pivoting.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::SolverFailure("matrix is not square".into()));
    }
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() <= 1e-14 * scale {
            return Err(Error::SolverFailure(format!("singular system at column {col}")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            let pivot_row = a[col].clone();
            for (x, y) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * y;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// `gamma = nu [2 theta - sin(2 theta)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaAnsatz {
    pub nu: f64,
    pub theta: PolynomialSchedule,
}

pub fn build_gamma_ansatz(nu: f64, theta: PolynomialSchedule) -> GammaAnsatz {
    GammaAnsatz { nu, theta }
}

impl Schedule for GammaAnsatz {
    fn value(&self, t: f64) -> f64 {
        let th = self.theta.value(t);
        self.nu * (2.0 * th - (2.0 * th).sin())
    }

    fn derivative(&self, t: f64) -> f64 {
        let s = self.theta.value(t).sin();
        4.0 * self.nu * s * s * self.theta.derivative(t)
    }
}

/// `beta = arccot(4 nu sin^3 theta)` on the branch with range `(0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaOptimal {
    pub nu: f64,
    pub theta: PolynomialSchedule,
}

pub fn build_beta_optimal(nu: f64, theta: PolynomialSchedule) -> BetaOptimal {
    BetaOptimal { nu, theta }
}

/// Continuous inverse cotangent with range `(0, pi)`.
pub fn arccot(x: f64) -> f64 {
    FRAC_PI_2 - x.atan()
}

impl Schedule for BetaOptimal {
    fn value(&self, t: f64) -> f64 {
        let s = self.theta.value(t).sin();
        arccot(4.0 * self.nu * s * s * s)
    }

    fn derivative(&self, t: f64) -> f64 {
        let th = self.theta.value(t);
        let (s, c) = th.sin_cos();
        let x = 4.0 * self.nu * s * s * s;
        let dx = 12.0 * self.nu * s * s * c * self.theta.derivative(t);
        -dx / (1.0 + x * x)
    }
}

/// Shared closure type for phase rates.
pub type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `gamma(t) = int_0^t rate(s) ds`, evaluated by adaptive quadrature from the
/// nearest precomputed knot below `t`.
#[derive(Clone)]
pub struct IntegratedPhase {
    rate: RateFn,
    t_f: f64,
    knots: Vec<f64>,
    tol: f64,
}

impl fmt::Debug for IntegratedPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegratedPhase")
            .field("t_f", &self.t_f)
            .field("knots", &self.knots.len())
            .field("tol", &self.tol)
            .finish()
    }
}

impl IntegratedPhase {
    pub const KNOTS: usize = 64;

    pub fn new(rate: RateFn, t_f: f64, tol: f64) -> Result<Self> {
        ensure_positive("t_f", t_f)?;
        ensure_positive("tol", tol)?;
        let h = t_f / Self::KNOTS as f64;
        let mut knots = Vec::with_capacity(Self::KNOTS + 1);
        knots.push(0.0);
        let mut acc = 0.0;
        for k in 0..Self::KNOTS {
            let r = rate.clone();
            acc += integrate_real(move |t| r(t), k as f64 * h, (k + 1) as f64 * h, tol)?;
            knots.push(acc);
        }
        Ok(IntegratedPhase { rate, t_f, knots, tol })
    }

    pub fn total(&self) -> f64 {
        *self.knots.last().expect("knots are never empty")
    }
}

impl Schedule for IntegratedPhase {
    fn value(&self, t: f64) -> f64 {
        let h = self.t_f / Self::KNOTS as f64;
        let k = ((t / h).floor().max(0.0) as usize).min(Self::KNOTS);
        let t0 = k as f64 * h;
        if t == t0 {
            return self.knots[k];
        }
        let r = self.rate.clone();
        // Tolerance is validated at construction; a failure here means the rate
        // is not integrable, which the constructor would already have hit.
        let tail = integrate_real(move |s| r(s), t0, t, self.tol).unwrap_or(f64::NAN);
        self.knots[k] + tail
    }

    fn derivative(&self, t: f64) -> f64 {
        (self.rate)(t)
    }
}

/// The three auxiliary angles of a design, each with its first derivative.
#[derive(Debug, Clone)]
pub struct AngleSet {
    pub theta: Arc<dyn Schedule>,
    pub beta: Arc<dyn Schedule>,
    pub gamma: Arc<dyn Schedule>,
    pub t_f: f64,
}

impl AngleSet {
    pub fn new(theta: Arc<dyn Schedule>, beta: Arc<dyn Schedule>, gamma: Arc<dyn Schedule>, t_f: f64) -> Self {
        AngleSet { theta, beta, gamma, t_f }
    }

    /// Angles of the optimal family for parameter `nu`.
    pub fn optimal(nu: f64, t_f: f64) -> Result<Self> {
        let theta = build_theta_cubic(t_f)?;
        Ok(AngleSet::new(
            Arc::new(theta.clone()),
            Arc::new(build_beta_optimal(nu, theta.clone())),
            Arc::new(build_gamma_ansatz(nu, theta)),
            t_f,
        ))
    }

    /// Flat pi pulse: `theta = pi t / t_f`, `beta = pi/2`, constant `gamma`.
    pub fn pi_pulse(t_f: f64) -> Result<Self> {
        Ok(AngleSet::new(
            Arc::new(PolynomialSchedule::new(vec![0.0, PI / t_f], t_f)?),
            Arc::new(PolynomialSchedule::constant(FRAC_PI_2, t_f)?),
            Arc::new(PolynomialSchedule::constant(0.0, t_f)?),
            t_f,
        ))
    }

    /// Residual of `gamma' sin(theta) sin(beta) = theta' cos(beta)`, relative
    /// to the size of the rates `|theta'| + |gamma' sin(theta)|`. Scaling by the
    /// rates rather than the products keeps the measure meaningful where
    /// `cos(beta)` is tiny.
    pub fn consistency_residual(&self, t: f64) -> f64 {
        let th = self.theta.value(t);
        let b = self.beta.value(t);
        let g_dot = self.gamma.derivative(t);
        let th_dot = self.theta.derivative(t);
        let lhs = g_dot * th.sin() * b.sin();
        let rhs = th_dot * b.cos();
        if lhs == rhs {
            return 0.0;
        }
        let scale = (th_dot.abs() + (g_dot * th.sin()).abs()).max(f64::MIN_POSITIVE);
        (lhs - rhs).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn theta_cubic_examples() {
        let th = build_theta_cubic(1.0).unwrap();
        assert_eq!(th.value(0.0), 0.0);
        assert_abs_diff_eq!(th.value(0.5), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(th.value(0.25), 5.0 * PI / 32.0, epsilon = 1e-15);
        assert_abs_diff_eq!(th.value(1.0), PI, epsilon = 1e-15);
        assert_eq!(th.derivative(0.0), 0.0);
        assert_abs_diff_eq!(th.derivative(1.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn theta_cubic_matches_linear_solve() {
        // Independent route: solve the 4x4 boundary system numerically.
        for &t_f in &[0.5, 1.0, 3.7] {
            let m = vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, t_f, t_f * t_f, t_f * t_f * t_f],
                vec![0.0, 1.0, 2.0 * t_f, 3.0 * t_f * t_f],
            ];
            let c = solve_linear(m, vec![0.0, 0.0, PI, 0.0]).unwrap();
            let th = build_theta_cubic(t_f).unwrap();
            for (a, b) in c.iter().zip(th.coefficients()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn theta_cubic_rejects_bad_duration() {
        assert!(build_theta_cubic(0.0).is_err());
        assert!(build_theta_cubic(-1.0).is_err());
        assert!(build_theta_cubic(f64::NAN).is_err());
    }

    #[test]
    fn gamma_ansatz_examples() {
        let th = build_theta_cubic(1.0).unwrap();
        let g = build_gamma_ansatz(0.643, th.clone());
        assert_eq!(g.value(0.0), 0.0);
        assert_abs_diff_eq!(g.value(1.0), 2.0 * PI * 0.643, epsilon = 1e-12);
        assert_abs_diff_eq!(g.value(0.5), 0.643 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(g.value(0.5), 2.0200, epsilon = 1e-4);
        // quadrature of the analytic rate reproduces the value
        let q = integrate_real(|t| g.derivative(t), 0.0, 0.5, 1e-13).unwrap();
        assert_abs_diff_eq!(q, g.value(0.5), epsilon = 1e-12);
    }

    #[test]
    fn beta_optimal_examples() {
        let th = build_theta_cubic(1.0).unwrap();
        let b = build_beta_optimal(0.643, th.clone());
        assert_abs_diff_eq!(b.value(0.0), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b.value(1.0), FRAC_PI_2, epsilon = 1e-12);
        let b0 = build_beta_optimal(0.0, th);
        assert_eq!(b0.value(0.3), FRAC_PI_2);
        // oracle: solve cot(beta) = 4 nu by bisection on (0, pi/2)
        let target = 4.0 * 0.643;
        let (mut lo, mut hi) = (1e-9, FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / mid.tan() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(b.value(0.5), 0.5 * (lo + hi), epsilon = 1e-12);
        assert_abs_diff_eq!(b.value(0.5), 0.37078, epsilon = 1e-4);
    }

    #[test]
    fn arccot_branch_is_continuous_through_zero() {
        assert_abs_diff_eq!(arccot(0.0), FRAC_PI_2);
        assert!(arccot(1e6) > 0.0 && arccot(1e6) < 1e-5);
        assert!(arccot(-1e6) < PI && arccot(-1e6) > PI - 1e-5);
        assert!((arccot(1e-12) - arccot(-1e-12)).abs() < 1e-11);
    }

    #[test]
    fn beta_quartic_defaults() {
        let b = build_beta_quartic(1.0, 2.0 * PI / 17.0, -15.0 * PI / 17.0).unwrap();
        assert_abs_diff_eq!(b.value(0.0), FRAC_PI_2, epsilon = 1e-14);
        assert_abs_diff_eq!(b.value(0.5), 2.0 * PI / 17.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.value(1.0), FRAC_PI_2, epsilon = 1e-13);
        assert_abs_diff_eq!(b.derivative(0.0), -15.0 * PI / 17.0, epsilon = 1e-13);
        assert_abs_diff_eq!(b.derivative(1.0), 15.0 * PI / 17.0, epsilon = 1e-12);
        // Frozen from the symmetric form beta = A + B u^2 + C u^4, u = t - 1/2,
        // solved by hand: A = 2, B = 37, C = -44 (units of pi/17), expanded in t.
        let expected = [PI / 2.0, -15.0 * PI / 17.0, -29.0 * PI / 17.0, 88.0 * PI / 17.0, -44.0 * PI / 17.0];
        for (c, e) in b.coefficients().iter().zip(expected) {
            assert_abs_diff_eq!(*c, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(solve_linear(m, vec![1.0, 2.0]), Err(Error::SolverFailure(_))));
    }

    #[test]
    fn optimal_angles_are_consistent() {
        let a = AngleSet::optimal(0.643, 1.0).unwrap();
        for k in 1..100 {
            let t = k as f64 / 100.0;
            assert!(a.consistency_residual(t) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn integrated_phase_matches_closed_form() {
        let th = build_theta_cubic(2.0).unwrap();
        let g = build_gamma_ansatz(0.4, th);
        let gg = g.clone();
        let ip = IntegratedPhase::new(Arc::new(move |t| gg.derivative(t)), 2.0, 1e-14).unwrap();
        for &t in &[0.0, 0.013, 0.7, 1.0, 1.99, 2.0] {
            assert_abs_diff_eq!(ip.value(t), g.value(t), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(ip.total(), g.value(2.0), epsilon = 1e-12);
    }
}
