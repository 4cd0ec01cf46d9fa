//! Dormand-Prince 5(4) integrator for two-component complex states, with the
//! standard fourth-order continuous extension for output at arbitrary times.

use crate::error::{Error, Result};
use crate::spinor::Spinor;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Adaptive step-size settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// States at the requested sample times plus the final state.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub samples: Vec<Spinor>,
    pub last: Spinor,
    pub stats: OdeStats,
}

fn axpy(y: &Spinor, terms: &[(f64, &Spinor)], h: f64) -> Spinor {
    let mut out = *y;
    for (w, k) in terms {
        if *w != 0.0 {
            out = out + **k * (w * h);
        }
    }
    out
}

impl Dopri5 {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        Dopri5 { rtol, atol, ..Dopri5::default() }
    }

    fn error_norm(&self, err: &Spinor, y0: &Spinor, y1: &Spinor) -> f64 {
        let comps = [
            (err.a1.re, y0.a1.re, y1.a1.re),
            (err.a1.im, y0.a1.im, y1.a1.im),
            (err.a2.re, y0.a2.re, y1.a2.re),
            (err.a2.im, y0.a2.im, y1.a2.im),
        ];
        let sum: f64 = comps
            .iter()
            .map(|&(e, a, b)| {
                let sc = self.atol + self.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum();
        (sum / 4.0).sqrt()
    }

    /// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction). `samples`
    /// must lie in the closed interval and be ordered along the direction of
    /// integration.
    pub fn integrate<F>(&self, f: F, t0: f64, y0: Spinor, t1: f64, samples: &[f64]) -> Result<OdeSolution>
    where
        F: Fn(f64, &Spinor) -> Spinor,
    {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::invalid("tol", "tolerances must be positive"));
        }
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        if samples.iter().any(|&s| s < lo || s > hi || !s.is_finite()) {
            return Err(Error::invalid("samples", "sample times must lie inside the integration interval"));
        }
        if samples.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) {
            return Err(Error::invalid("samples", "sample times must be ordered along the integration direction"));
        }

        let mut out = Vec::with_capacity(samples.len());
        let mut next = 0;
        while next < samples.len() && samples[next] == t0 {
            out.push(y0);
            next += 1;
        }
        let mut stats = OdeStats::default();
        let span = (t1 - t0).abs();
        if span == 0.0 {
            return Ok(OdeSolution { samples: out, last: y0, stats });
        }

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        stats.evaluations += 1;
        let mut h = dir * (span * 1e-3).min(0.01 * span.max(1.0));
        let h_floor = span * 1e-14;

        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let last_step = (t + h - t1) * dir >= 0.0;
            if last_step {
                h = t1 - t;
            }
            let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(t + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
            let k6 = f(t + h, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
            let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
            let k7 = f(t + h, &y_new);
            stats.evaluations += 6;

            let err = axpy(
                &Spinor::zero(),
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                h,
            );
            let en = self.error_norm(&err, &y, &y_new);

            if en <= 1.0 {
                stats.accepted += 1;
                let t_new = if last_step { t1 } else { t + h };
                // continuous extension over [t, t_new]
                let r1 = y;
                let r2 = y_new - y;
                let r3 = k1 * h - r2;
                let r4 = r2 - k7 * h - r3;
                let r5 = axpy(&Spinor::zero(), &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)], h);
                while next < samples.len() && (samples[next] - t_new) * dir <= 0.0 {
                    let s = samples[next];
                    let v = if s == t_new {
                        y_new
                    } else {
                        let th = (s - t) / h;
                        let th1 = 1.0 - th;
                        r1 + (r2 + (r3 + (r4 + r5 * th1) * th) * th1) * th
                    };
                    out.push(v);
                    next += 1;
                }
                t = t_new;
                y = y_new;
                k1 = k7;
                if last_step {
                    break;
                }
                let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                h *= fac;
            } else {
                stats.rejected += 1;
                h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            }
            if h.abs() < h_floor {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
        Ok(OdeSolution { samples: out, last: y, stats })
    }
}
