//! Observables, trace comparison and the preset experiments.
//!
//! Internal units for the presets are nanoseconds and rad/ns.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{h_eff, rotating_h, rwa_h};
use crate::integrator::{Dopri5, IntegratorConfig};
use crate::propagators::{lz_probability, run, Method, StroboscopicTrace};
use crate::protocol::{ChirpDrive, PeriodGrid, TlsParams};
use crate::su2::{rotation_matrix, AxisAngle, BlochVector, PauliVector, RotationMatrix};

/// Ordinary frequency in GHz to angular frequency in rad/ns.
pub fn ghz(f: f64) -> f64 {
    TAU * f
}

/// `P_x = (1 − r_x)/2`, the population of the lower eigenstate of `Δσx/2`.
/// Clamped to `[0, 1]` against rounding in `|r|`.
pub fn p_x(r: &BlochVector) -> f64 {
    (0.5 * (1.0 - r.x())).clamp(0.0, 1.0)
}

/// `(1 + r_x)/2 = 1 − P_x`, the excited-state population.
pub fn excitation(r: &BlochVector) -> f64 {
    0.5 * (1.0 + r.x())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub methods: (Method, Method),
    pub max_abs_px_error: f64,
    pub mean_abs_px_error: f64,
    /// Grid echo: number of periods and final time.
    pub n_periods: usize,
    pub t_final: f64,
    /// `|P_x^a(t_j) − P_x^b(t_j)|` for every period point.
    pub per_point: Vec<f64>,
}

/// Pointwise `P_x` differences between two traces on the same grid.
pub fn compare(a: &StroboscopicTrace, b: &StroboscopicTrace) -> Result<ComparisonReport> {
    if a.records.is_empty()
        || a.records.len() != b.records.len()
        || a.records.iter().zip(&b.records).any(|(x, y)| x.t != y.t)
    {
        return Err(Error::GridMismatch);
    }
    let per_point: Vec<f64> = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(x, y)| (p_x(&x.r) - p_x(&y.r)).abs())
        .collect();
    let max = per_point.iter().copied().fold(0.0, f64::max);
    let mean = per_point.iter().sum::<f64>() / per_point.len() as f64;
    Ok(ComparisonReport {
        methods: (a.method, b.method),
        max_abs_px_error: max,
        mean_abs_px_error: mean,
        n_periods: per_point.len() - 1,
        t_final: a.records.last().map_or(0.0, |r| r.t),
        per_point,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub tls: TlsParams,
    pub drive: ChirpDrive,
    /// Drive frequency `ω(t_N)` that fixed `drive.n_periods`.
    pub omega_end: f64,
    pub initial_state: BlochVector,
    pub backends: Vec<Method>,
    pub integrator: IntegratorConfig,
    /// Parameter choices not fixed by the experiment description.
    pub assumptions: Vec<&'static str>,
}

const SPLITTING_GHZ: f64 = 6.0;
const ETA_GHZ: f64 = 0.027;

fn experiment_integrator() -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        max_step: f64::INFINITY,
        initial_step: 1e-4,
    }
}

fn chirp_preset(
    name: &'static str,
    omega0: f64,
    omega_end: f64,
    alpha: f64,
    initial_state: BlochVector,
    extra: &'static str,
) -> ExperimentPreset {
    let tls = TlsParams::symmetric(ghz(SPLITTING_GHZ)).expect("positive splitting");
    let eta = ghz(ETA_GHZ);
    let drive = ChirpDrive::new(omega0, alpha, eta, 1).expect("valid preset drive");
    let n = drive
        .periods_until(omega_end)
        .expect("preset chirp reaches its end frequency");
    ExperimentPreset {
        name,
        tls,
        drive: drive.with_periods(n),
        omega_end,
        initial_state,
        backends: Method::ALL.to_vec(),
        integrator: experiment_integrator(),
        assumptions: vec![
            "splitting Delta = 2*pi*6.0 GHz (resonance 'at about 6 GHz')",
            "symmetric TLS: epsilon0 = 0, u = 1, v = 0",
            extra,
        ],
    }
}

/// Upward chirp 2π·5.9 → 2π·6.1 GHz at `α = 1.5η²`, starting from `r = ẑ`.
pub fn fig3_preset() -> ExperimentPreset {
    let eta = ghz(ETA_GHZ);
    chirp_preset(
        "fig3",
        ghz(5.9),
        ghz(6.1),
        1.5 * eta * eta,
        BlochVector::new(0.0, 0.0, 1.0).expect("unit vector"),
        "chirp rate alpha = 1.5 eta^2, initial state r = (0, 0, 1)",
    )
}

/// Experimental downward chirp 2π·6.1 → 2π·5.9 GHz at `α = −2π·1 MHz/ns`
/// (`≈ −0.22η²`), starting from the ground state.
pub fn shalibo_preset() -> ExperimentPreset {
    chirp_preset(
        "shalibo",
        ghz(6.1),
        ghz(5.9),
        -ghz(1e-3),
        BlochVector::ground(),
        "chirp rate alpha = -2*pi*1 MHz/ns, initial state r = (-1, 0, 0)",
    )
}

pub fn preset(name: &str) -> Option<ExperimentPreset> {
    match name {
        "fig3" => Some(fig3_preset()),
        "shalibo" => Some(shalibo_preset()),
        _ => None,
    }
}

impl ExperimentPreset {
    pub fn grid(&self) -> Result<PeriodGrid> {
        self.drive.build_grid()
    }

    /// Run every configured backend (in parallel) on the preset grid.
    pub fn run(&self) -> Result<Vec<StroboscopicTrace>> {
        run_backends(
            &self.tls,
            &self.grid()?,
            &self.initial_state,
            &self.integrator,
            &self.backends,
        )
    }
}

/// Run `methods` on a shared grid; results are returned in the order given.
pub fn run_backends(
    tls: &TlsParams,
    grid: &PeriodGrid,
    r0: &BlochVector,
    cfg: &IntegratorConfig,
    methods: &[Method],
) -> Result<Vec<StroboscopicTrace>> {
    methods
        .par_iter()
        .map(|&m| run(m, tls, grid, r0, cfg))
        .collect()
}

/// Minimum half-width of the Landau–Zener window in units of `uη`.
pub const LZ_MIN_WINDOW: f64 = 20.0;

pub const LZ_DEFAULT_WINDOW: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzPoint {
    pub alpha: f64,
    pub p_exact: f64,
    pub p_formula: f64,
}

impl LzPoint {
    pub fn abs_err(&self) -> f64 {
        (self.p_exact - self.p_formula).abs()
    }
}

/// Square chirp window that sweeps the detuning from `+W·uη` to `−W·uη`.
/// Returns the drive and the sweep duration.
pub fn lz_drive(tls: &TlsParams, eta: f64, alpha: f64, window: f64) -> Result<(ChirpDrive, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(
            "alpha",
            "Landau-Zener sweep needs alpha > 0",
        ));
    }
    if !(window >= LZ_MIN_WINDOW) {
        return Err(Error::WindowTooNarrow {
            required: LZ_MIN_WINDOW,
            got: window,
        });
    }
    let gap = tls.u() * eta;
    if !(gap > 0.0) {
        return Err(Error::invalid(
            "eta",
            "Landau-Zener sweep needs a non-zero coupling u*eta",
        ));
    }
    let omega0 = tls.splitting() - window * gap;
    if !(omega0 > 0.0) {
        return Err(Error::invalid(
            "eta",
            format!("window of {window} u*eta below the splitting leaves omega0 <= 0"),
        ));
    }
    let drive = ChirpDrive::new(omega0, alpha, eta, 1)?;
    Ok((drive, window * gap / alpha))
}

/// Unit vector along the cycle-averaged field at `t`.
fn adiabatic_axis(tls: &TlsParams, drive: &ChirpDrive, t: f64) -> Vector3<f64> {
    rwa_h(tls, drive, t).h.normalize()
}

/// Probability of adiabatic passage through one sweep, next to the
/// Landau–Zener formula.
///
/// The state starts in the lower adiabatic state of the cycle-averaged field
/// (close to the ground state `−x̂` for a wide window) and is projected on the
/// continuation of that state at the end of the window (close to `+x̂`).
/// Projecting at the window edges removes the `O(uη/δ)` oscillations that a
/// bare-state measurement would carry.
pub fn lz_sweep(
    tls: &TlsParams,
    eta: f64,
    alphas: &[f64],
    cfg: &IntegratorConfig,
    window: f64,
) -> Result<Vec<LzPoint>> {
    if alphas.is_empty() {
        return Err(Error::invalid(
            "alphas",
            "at least one chirp rate is required",
        ));
    }
    alphas
        .par_iter()
        .map(|&alpha| {
            let (drive, t_end) = lz_drive(tls, eta, alpha, window)?;
            let r0 = -adiabatic_axis(tls, &drive, 0.0);
            let mut solver = Dopri5::new(*cfg)?;
            let r = solver.integrate(|t| rotating_h(tls, &drive, t), r0, 0.0, t_end)?;
            let axis = adiabatic_axis(tls, &drive, t_end);
            Ok(LzPoint {
                alpha,
                p_exact: 0.5 * (1.0 - r.dot(&axis)),
                p_formula: lz_probability(tls, eta, alpha)?,
            })
        })
        .collect()
}

/// Resonance scan for a harmonic drive.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSiegertScan {
    pub omega0s: Vec<f64>,
    /// Long-time maximum excitation from the ground state, per method and `ω₀`.
    pub curves: Vec<(Method, Vec<f64>)>,
    /// Interpolated `ω₀` of maximum excitation, per method.
    pub peaks: Vec<(Method, f64)>,
}

impl BlochSiegertScan {
    pub fn peak(&self, method: Method) -> Option<f64> {
        self.peaks
            .iter()
            .find(|(m, _)| *m == method)
            .map(|&(_, p)| p)
    }
}

/// `3u²η²/(4Δ)`: downward displacement of the second-order resonance.
pub fn predicted_bloch_siegert_shift(tls: &TlsParams, eta: f64) -> f64 {
    let ueta = tls.u() * eta;
    3.0 * ueta * ueta / (4.0 * tls.splitting())
}

/// `points` equally spaced drive frequencies spanning `Δ ± span·uη`.
pub fn default_omega0_grid(tls: &TlsParams, eta: f64, span: f64, points: usize) -> Vec<f64> {
    let centre = tls.splitting();
    let half = span * tls.u() * eta;
    let n = points.max(3);
    (0..n)
        .map(|k| centre - half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect()
}

/// Bloch map of one drive period `[0, 2π/ω₀]` for a harmonic drive.
pub fn one_period_map(
    method: Method,
    tls: &TlsParams,
    drive: &ChirpDrive,
    cfg: &IntegratorConfig,
) -> Result<RotationMatrix> {
    let grid = drive.with_periods(1).with_alpha(0.0).build_grid()?;
    let tau = grid.tau(1)?;
    let flow = |h_fn: &dyn Fn(f64) -> PauliVector| -> Result<RotationMatrix> {
        let mut cols = [Vector3::zeros(); 3];
        for (i, col) in cols.iter_mut().enumerate() {
            let mut solver = Dopri5::new(*cfg)?;
            *col = solver.integrate(h_fn, Vector3::ith(i, 1.0), 0.0, tau)?;
        }
        RotationMatrix::from_matrix(Matrix3::from_columns(&cols), 1e-6)
    };
    let d = *grid.drive();
    match method {
        Method::Exact => flow(&|t| rotating_h(tls, &d, t)),
        Method::Rwa => flow(&|t| rwa_h(tls, &d, t)),
        Method::Magnus1 | Method::Magnus2 => {
            let order = method.magnus_order().expect("magnus method");
            let he = h_eff(tls, &grid, 1, order)?;
            Ok(rotation_matrix(&AxisAngle::from_hamiltonian(
                &he.pv, he.tau,
            )))
        }
    }
}

/// Supremum of the excitation `(1 + r_x)/2` reached from the ground state
/// under repeated application of `m`: `1 − e_x²` for rotation axis `e`.
pub fn max_transfer(m: &RotationMatrix) -> f64 {
    let aa = m.to_axis_angle();
    if aa.angle() == 0.0 {
        return 0.0;
    }
    let ex = aa.axis()[0];
    1.0 - ex * ex
}

/// Vertex of the parabola through the maximum of `ys` and its neighbours.
pub fn interpolate_peak(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (k, _) =
        ys.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &y)| if y > acc.1 { (i, y) } else { acc },
        );
    if k == 0 || k + 1 >= ys.len() {
        return None;
    }
    let (y0, y1, y2) = (ys[k - 1], ys[k], ys[k + 1]);
    let (x0, x1, x2) = (xs[k - 1], xs[k], xs[k + 1]);
    // general (non-uniform) three-point vertex
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Some(x1);
    }
    Some(x1 - 0.5 * num / den)
}

/// Locate the resonance of each backend for a harmonic drive (`α = 0`).
pub fn bloch_siegert_scan(
    tls: &TlsParams,
    eta: f64,
    omega0s: &[f64],
    methods: &[Method],
    cfg: &IntegratorConfig,
) -> Result<BlochSiegertScan> {
    if omega0s.len() < 3 {
        return Err(Error::invalid(
            "omega0",
            "scan needs at least three drive frequencies",
        ));
    }
    let mut curves = Vec::with_capacity(methods.len());
    let mut peaks = Vec::with_capacity(methods.len());
    for &method in methods {
        let curve = omega0s
            .par_iter()
            .map(|&w| {
                let drive = ChirpDrive::new(w, 0.0, eta, 1)?;
                Ok(max_transfer(&one_period_map(method, tls, &drive, cfg)?))
            })
            .collect::<Result<Vec<f64>>>()?;
        let peak = interpolate_peak(omega0s, &curve).ok_or(Error::PeakAtBoundary {
            method: method.name(),
        })?;
        curves.push((method, curve));
        peaks.push((method, peak));
    }
    Ok(BlochSiegertScan {
        omega0s: omega0s.to_vec(),
        curves,
        peaks,
    })
}
