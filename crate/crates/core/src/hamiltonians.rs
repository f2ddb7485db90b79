//! Hamiltonians of the chirped two-level system as [`PauliVector`]s.
//!
//! All vectors are coefficients of `σ/2`: a term `c·σz/2` stores `h_z = c`,
//! a term `c·σz` stores `h_z = 2c`. The drive phase is `φ(t) = ω₀t + αt²`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::protocol::{ChirpDrive, PeriodGrid, TlsParams};
use crate::su2::{decompose, PauliVector};

/// `H = Δ₀σx/2 + ε₀σz/2 + η σz sin φ(t)`.
pub fn lab_h(tls: &TlsParams, drive: &ChirpDrive, t: f64) -> PauliVector {
    let sin_phi = drive.phase(t).sin();
    PauliVector::new(
        0.0,
        tls.delta0(),
        0.0,
        tls.epsilon0() + 2.0 * drive.eta * sin_phi,
    )
}

/// Lab Hamiltonian in the eigenbasis of its static part:
/// `H = Δσx/2 + uη σz sin φ + vη σx sin φ`.
pub fn eigenframe_h(tls: &TlsParams, drive: &ChirpDrive, t: f64) -> PauliVector {
    let sin_phi = drive.phase(t).sin();
    let eta = drive.eta;
    PauliVector::new(
        0.0,
        tls.splitting() + 2.0 * tls.v() * eta * sin_phi,
        0.0,
        2.0 * tls.u() * eta * sin_phi,
    )
}

/// Frame co-rotating with the drive phase about x:
///
/// `H̄ = δσx/2 − uη σy/2 + vη σx sin φ + uη σz sin 2φ/2 + uη σy cos 2φ/2`.
pub fn rotating_h(tls: &TlsParams, drive: &ChirpDrive, t: f64) -> PauliVector {
    let (sin_phi, cos_phi) = drive.phase(t).sin_cos();
    let ueta = tls.u() * drive.eta;
    PauliVector::new(
        0.0,
        drive.detuning_at(tls, t) + 2.0 * tls.v() * drive.eta * sin_phi,
        // −uη + uη cos 2φ, written without cancellation
        -2.0 * ueta * sin_phi * sin_phi,
        2.0 * ueta * sin_phi * cos_phi,
    )
}

/// Rotating-wave Hamiltonian `δ(t)σx/2 − uη σy/2`.
pub fn rwa_h(tls: &TlsParams, drive: &ChirpDrive, t: f64) -> PauliVector {
    PauliVector::new(0.0, drive.detuning_at(tls, t), -tls.u() * drive.eta, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagnusOrder {
    First,
    FirstPlusSecond,
}

/// Second-order correction to the one-period effective Hamiltonian, split
/// into the part known from harmonic driving and the part that only exists
/// for a chirp (linear in `α`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderTerms {
    /// `(−3(ηu)²/(4ω), −uη(δ − ατ)/(2ω), 2η²uv/ω)`
    pub harmonic: Vector3<f64>,
    /// `(4αvη/ω², 0, αuη/ω²)`
    pub chirp: Vector3<f64>,
}

impl SecondOrderTerms {
    pub fn total(&self) -> Vector3<f64> {
        self.harmonic + self.chirp
    }
}

/// Time-independent Hamiltonian generating the evolution over period `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub j: usize,
    pub pv: PauliVector,
    pub tau: f64,
    pub energy: f64,
    pub axis: Vector3<f64>,
}

/// Mean detuning over period `j`, `δ_{j−1} − ατ_j`.
fn mean_detuning(tls: &TlsParams, grid: &PeriodGrid, j: usize) -> Result<f64> {
    Ok(grid.shorthand_delta(tls, j - 1)? - grid.drive().alpha * grid.tau(j)?)
}

fn check_period(grid: &PeriodGrid, j: usize) -> Result<()> {
    if j == 0 || j > grid.n_periods() {
        return Err(Error::IndexOutOfRange {
            j,
            n: grid.n_periods(),
        });
    }
    Ok(())
}

/// First-order effective Hamiltonian of period `j`: `(δ_{j−1} − ατ_j, −uη, 0)`.
pub fn first_order(tls: &TlsParams, grid: &PeriodGrid, j: usize) -> Result<Vector3<f64>> {
    check_period(grid, j)?;
    Ok(Vector3::new(
        mean_detuning(tls, grid, j)?,
        -tls.u() * grid.drive().eta,
        0.0,
    ))
}

/// Chirp-only second-order terms `(4αvη/ω², 0, αuη/ω²)` at phase rate `ω`.
pub fn chirp_terms(tls: &TlsParams, eta: f64, alpha: f64, omega: f64) -> Vector3<f64> {
    let w2 = omega * omega;
    Vector3::new(
        4.0 * alpha * tls.v() * eta / w2,
        0.0,
        alpha * tls.u() * eta / w2,
    )
}

/// Second-order terms of period `j`, evaluated with the phase rate
/// `ω_{j−1} = ω₀ + 2αt_{j−1}`.
pub fn second_order_terms(
    tls: &TlsParams,
    grid: &PeriodGrid,
    j: usize,
) -> Result<SecondOrderTerms> {
    check_period(grid, j)?;
    let d = grid.drive();
    let (eta, alpha) = (d.eta, d.alpha);
    let (u, v) = (tls.u(), tls.v());
    let w = grid.shorthand_omega(j - 1)?;
    let dbar = mean_detuning(tls, grid, j)?;
    let ueta = u * eta;
    Ok(SecondOrderTerms {
        harmonic: Vector3::new(
            -3.0 * ueta * ueta / (4.0 * w),
            -ueta * dbar / (2.0 * w),
            2.0 * eta * eta * u * v / w,
        ),
        chirp: chirp_terms(tls, eta, alpha, w),
    })
}

pub fn h_eff(
    tls: &TlsParams,
    grid: &PeriodGrid,
    j: usize,
    order: MagnusOrder,
) -> Result<EffectiveHamiltonian> {
    let mut h = first_order(tls, grid, j)?;
    if order == MagnusOrder::FirstPlusSecond {
        h += second_order_terms(tls, grid, j)?.total();
    }
    let pv = PauliVector::from_vector(h);
    let d = decompose(&pv);
    Ok(EffectiveHamiltonian {
        j,
        pv,
        tau: grid.tau(j)?,
        energy: d.energy,
        axis: d.axis,
    })
}
