//! Adaptive Dormand–Prince 5(4) integration of the Bloch equation
//! `dr/dt = h(t) × r`.
//!
//! The step controller is the PI controller of Hairer, Nørsett & Wanner
//! (`dopri5.f`). Integration always lands exactly on the requested end time.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::su2::{BlochVector, PauliVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_step: f64::INFINITY,
            initial_step: 1e-4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::invalid(name, format!("{tol} not in (0, 1e-2]")));
            }
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid("max_step", "must be positive"));
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(Error::invalid(
                "initial_step",
                "must be positive and finite",
            ));
        }
        Ok(())
    }

    /// Steps shorter than this abort the integration.
    pub fn min_step(&self) -> f64 {
        1e-6 * self.initial_step
    }
}

/// `h × r`
#[inline]
pub fn bloch_rhs(h: &PauliVector, r: &Vector3<f64>) -> Vector3<f64> {
    h.h.cross(r)
}

// Dormand–Prince 5(4) tableau.
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
// b − b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Stateful integrator: remembers the last step size so consecutive calls
/// over adjacent intervals do not restart from `initial_step`.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    cfg: IntegratorConfig,
    step: f64,
    err_old: f64,
    pub stats: StepStats,
}

impl Dopri5 {
    pub fn new(cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            step: cfg.initial_step.min(cfg.max_step),
            err_old: 1e-4,
            stats: StepStats::default(),
        })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn integrate<F>(
        &mut self,
        h_fn: F,
        r0: Vector3<f64>,
        t0: f64,
        t1: f64,
    ) -> Result<Vector3<f64>>
    where
        F: Fn(f64) -> PauliVector,
    {
        if !(t1 >= t0) {
            return Err(Error::invalid(
                "t1",
                format!("end time {t1} precedes start {t0}"),
            ));
        }
        let f = |t: f64, y: &Vector3<f64>| bloch_rhs(&h_fn(t), y);
        let (atol, rtol) = (self.cfg.abs_tol, self.cfg.rel_tol);
        let min_step = self.cfg.min_step();

        let mut t = t0;
        let mut y = r0;
        if t1 == t0 {
            return Ok(y);
        }
        let mut k1 = f(t, &y);
        let mut h = self.step.min(self.cfg.max_step);
        let mut last_rejected = false;

        loop {
            let remaining = t1 - t;
            let natural = h;
            let landing = h >= remaining;
            if landing {
                h = remaining;
            } else if h < min_step {
                return Err(Error::StepUnderflow {
                    t,
                    step: h,
                    min_step,
                });
            }

            let k2 = f(t + C2 * h, &(y + h * A21 * k1));
            let k3 = f(t + C3 * h, &(y + h * (A31 * k1 + A32 * k2)));
            let k4 = f(t + C4 * h, &(y + h * (A41 * k1 + A42 * k2 + A43 * k3)));
            let k5 = f(
                t + C5 * h,
                &(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)),
            );
            let t_new = if landing { t1 } else { t + h };
            let k6 = f(
                t_new,
                &(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)),
            );
            let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let k7 = f(t_new, &y_new);
            let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

            let err = ((0..3)
                .map(|i| {
                    let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
                    (err_vec[i] / sk).powi(2)
                })
                .sum::<f64>()
                / 3.0)
                .sqrt();
            if !err.is_finite() || !y_new.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite { t });
            }

            // PI controller
            let fac11 = err.powf(EXPO);
            let fac =
                (fac11 / self.err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);

            if err <= 1.0 {
                self.stats.accepted += 1;
                self.err_old = err.max(1e-4);
                t = t_new;
                y = y_new;
                k1 = k7;
                let mut proposal = (h / fac).min(self.cfg.max_step);
                if last_rejected {
                    proposal = proposal.min(h);
                }
                last_rejected = false;
                if landing {
                    // a truncated landing step says nothing about the natural
                    // step size of the next interval
                    self.step = if h < natural { natural } else { proposal };
                    return Ok(y);
                }
                self.step = proposal;
                h = proposal;
            } else {
                self.stats.rejected += 1;
                last_rejected = true;
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                self.step = h;
            }
        }
    }
}

/// Integrate `dr/dt = h(t) × r` from `t0` to `t1`.
pub fn integrate<F>(
    h_fn: F,
    r0: &BlochVector,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<BlochVector>
where
    F: Fn(f64) -> PauliVector,
{
    let mut solver = Dopri5::new(*cfg)?;
    let r = solver.integrate(h_fn, *r0.vector(), t0, t1)?;
    Ok(BlochVector::from_raw(r))
}
