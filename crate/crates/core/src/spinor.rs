//! Two-component amplitudes in the bare basis {|1>, |2>}.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// A pair of complex amplitudes `a1 |1> + a2 |2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub a1: Complex64,
    pub a2: Complex64,
}

impl Spinor {
    pub const fn new(a1: Complex64, a2: Complex64) -> Self {
        Spinor { a1, a2 }
    }

    /// Bare level |1>.
    pub fn up() -> Self {
        Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Bare level |2>.
    pub fn down() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.a1.conj() * other.a1 + self.a2.conj() * other.a2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Populations `(|a1|^2, |a2|^2)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.a1.norm_sqr(), self.a2.norm_sqr())
    }

    /// Euclidean distance, phase-sensitive.
    pub fn distance(&self, other: &Spinor) -> f64 {
        (*self - *other).norm()
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Spinor) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn scale(&self, z: Complex64) -> Spinor {
        Spinor::new(self.a1 * z, self.a2 * z)
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.a1 - other.a1).norm().max((self.a2 - other.a2).norm())
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.a1 + rhs.a1, self.a2 + rhs.a2)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.a1 - rhs.a1, self.a2 - rhs.a2)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.a1 * rhs, self.a2 * rhs)
    }
}

/// Real traceless Hamiltonian `hx sigma_x + hz sigma_z` (energy units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHamiltonian {
    pub hx: f64,
    pub hz: f64,
}

impl RealHamiltonian {
    pub fn apply(&self, psi: &Spinor) -> Spinor {
        Spinor::new(
            psi.a1 * self.hz + psi.a2 * self.hx,
            psi.a1 * self.hx - psi.a2 * self.hz,
        )
    }

    /// Exact propagator `exp(-i H dt / hbar)` applied to `psi`.
    pub fn propagate(&self, psi: &Spinor, dt: f64, hbar: f64) -> Spinor {
        let r = self.hx.hypot(self.hz);
        let phi = r * dt / hbar;
        let (s, c) = phi.sin_cos();
        // exp(-i phi n.sigma) = cos(phi) - i sin(phi) n.sigma
        let (nx, nz) = if r > 0.0 { (self.hx / r, self.hz / r) } else { (0.0, 0.0) };
        let mi_s = Complex64::new(0.0, -s);
        Spinor::new(
            psi.a1 * (c + mi_s * nz) + psi.a2 * (mi_s * nx),
            psi.a1 * (mi_s * nx) + psi.a2 * (c - mi_s * nz),
        )
    }

    /// Operator norm of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &RealHamiltonian) -> f64 {
        // [a.sigma, b.sigma] = 2i (a x b).sigma; only the y component survives.
        2.0 * (self.hz * other.hx - self.hx * other.hz).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagate_is_unitary_and_matches_rotation() {
        let h = RealHamiltonian { hx: 0.7, hz: -0.3 };
        let psi = Spinor::new(Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.7));
        let psi = psi * (1.0 / psi.norm());
        let out = h.propagate(&psi, 0.37, 1.0);
        assert!((out.norm() - 1.0).abs() < 1e-14);

        // sigma_x rotation by pi/2 inverts |1>.
        let flip = RealHamiltonian { hx: 1.0, hz: 0.0 }.propagate(&Spinor::up(), std::f64::consts::FRAC_PI_2, 1.0);
        assert!((flip.populations().1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_vanishes_for_parallel_fields() {
        let a = RealHamiltonian { hx: 1.0, hz: 2.0 };
        let b = RealHamiltonian { hx: 2.0, hz: 4.0 };
        assert_eq!(a.commutator_norm(&b), 0.0);
        let c = RealHamiltonian { hx: 1.0, hz: 0.0 };
        let d = RealHamiltonian { hx: 0.0, hz: 1.0 };
        assert_eq!(c.commutator_norm(&d), 2.0);
    }
}
