//! Evolution backends sampled stroboscopically on the period grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonians::{h_eff, rotating_h, rwa_h, MagnusOrder};
use crate::integrator::{Dopri5, IntegratorConfig};
use crate::protocol::{PeriodGrid, TlsParams};
use crate::su2::{apply, rotation_matrix, AxisAngle, BlochVector, RotationMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    Rwa,
    Magnus1,
    Magnus2,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Rwa, Method::Magnus1, Method::Magnus2];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Rwa => "rwa",
            Method::Magnus1 => "magnus1",
            Method::Magnus2 => "magnus2",
        }
    }

    pub fn magnus_order(&self) -> Option<MagnusOrder> {
        match self {
            Method::Magnus1 => Some(MagnusOrder::First),
            Method::Magnus2 => Some(MagnusOrder::FirstPlusSecond),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "backends",
                    format!("unknown backend `{s}` (expected exact, rwa, magnus1 or magnus2)"),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub j: usize,
    pub t: f64,
    pub r: BlochVector,
}

/// State at every period point `t_0 … t_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StroboscopicTrace {
    pub method: Method,
    pub records: Vec<TraceRecord>,
}

impl StroboscopicTrace {
    fn from_states(method: Method, grid: &PeriodGrid, states: Vec<BlochVector>) -> Self {
        let records = grid
            .times()
            .iter()
            .zip(states)
            .enumerate()
            .map(|(j, (&t, r))| TraceRecord { j, t, r })
            .collect();
        Self { method, records }
    }

    pub fn final_state(&self) -> &BlochVector {
        &self.records.last().expect("trace has at least t_0").r
    }

    /// `max_j ||r(t_j)| − |r(t_0)||`
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.records[0].r.norm();
        self.records
            .iter()
            .map(|rec| (rec.r.norm() - n0).abs())
            .fold(0.0, f64::max)
    }
}

fn integrate_on_grid<F>(
    method: Method,
    grid: &PeriodGrid,
    r0: &BlochVector,
    cfg: &IntegratorConfig,
    h_fn: F,
) -> Result<StroboscopicTrace>
where
    F: Fn(f64) -> crate::su2::PauliVector + Copy,
{
    let mut solver = Dopri5::new(*cfg)?;
    let times = grid.times();
    let mut states = Vec::with_capacity(times.len());
    let mut r = *r0.vector();
    states.push(*r0);
    for w in times.windows(2) {
        r = solver.integrate(h_fn, r, w[0], w[1])?;
        states.push(BlochVector::from_raw(r));
    }
    Ok(StroboscopicTrace::from_states(method, grid, states))
}

/// Full rotating-frame dynamics, integrated period to period.
pub fn run_exact(
    tls: &TlsParams,
    grid: &PeriodGrid,
    r0: &BlochVector,
    cfg: &IntegratorConfig,
) -> Result<StroboscopicTrace> {
    let drive = *grid.drive();
    integrate_on_grid(Method::Exact, grid, r0, cfg, |t| rotating_h(tls, &drive, t))
}

/// Rotating-wave dynamics, integrated period to period.
pub fn run_rwa(
    tls: &TlsParams,
    grid: &PeriodGrid,
    r0: &BlochVector,
    cfg: &IntegratorConfig,
) -> Result<StroboscopicTrace> {
    let drive = *grid.drive();
    integrate_on_grid(Method::Rwa, grid, r0, cfg, |t| rwa_h(tls, &drive, t))
}

/// One-period Bloch maps `M_1 … M_N` generated by the effective Hamiltonians.
pub fn magnus_maps(
    tls: &TlsParams,
    grid: &PeriodGrid,
    order: MagnusOrder,
) -> Result<Vec<RotationMatrix>> {
    (1..=grid.n_periods())
        .map(|j| {
            let he = h_eff(tls, grid, j, order)?;
            Ok(rotation_matrix(&AxisAngle::from_hamiltonian(
                &he.pv, he.tau,
            )))
        })
        .collect()
}

/// Stroboscopic evolution `r(t_j) = M_j r(t_{j−1})`.
pub fn run_magnus(
    tls: &TlsParams,
    grid: &PeriodGrid,
    r0: &BlochVector,
    order: MagnusOrder,
) -> Result<StroboscopicTrace> {
    let method = match order {
        MagnusOrder::First => Method::Magnus1,
        MagnusOrder::FirstPlusSecond => Method::Magnus2,
    };
    let maps = magnus_maps(tls, grid, order)?;
    let mut states = Vec::with_capacity(maps.len() + 1);
    states.push(*r0);
    let mut r = *r0;
    for m in &maps {
        r = apply(m, &r);
        states.push(r);
    }
    Ok(StroboscopicTrace::from_states(method, grid, states))
}

pub fn run(
    method: Method,
    tls: &TlsParams,
    grid: &PeriodGrid,
    r0: &BlochVector,
    cfg: &IntegratorConfig,
) -> Result<StroboscopicTrace> {
    match method {
        Method::Exact => run_exact(tls, grid, r0, cfg),
        Method::Rwa => run_rwa(tls, grid, r0, cfg),
        Method::Magnus1 => run_magnus(tls, grid, r0, MagnusOrder::First),
        Method::Magnus2 => run_magnus(tls, grid, r0, MagnusOrder::FirstPlusSecond),
    }
}

/// Landau–Zener excitation probability `1 − exp(−πu²η²/(4α))` for a sweep
/// through resonance at chirp rate `α > 0`.
pub fn lz_probability(tls: &TlsParams, eta: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(
            "alpha",
            "Landau-Zener formula needs alpha > 0",
        ));
    }
    let ueta = tls.u() * eta;
    Ok(-(-PI * ueta * ueta / (4.0 * alpha)).exp_m1())
}
