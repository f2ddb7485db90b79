//! Linear chirp protocol and the period-point grid.
//!
//! The drive phase is `φ(t) = ω(t)·t = ω₀t + αt²` with `ω(t) = ω₀ + αt`, so the
//! instantaneous phase rate is `φ̇ = ω₀ + 2αt` and the detuning from the
//! splitting `Δ` is `δ(t) = Δ − ω₀ − 2αt`. Period points `t_j` solve
//! `φ(t_j) = 2πj`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Static two-level system `H = Δ₀σx/2 + ε₀σz/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsParams {
    delta0: f64,
    epsilon0: f64,
}

impl TlsParams {
    pub fn new(delta0: f64, epsilon0: f64) -> Result<Self> {
        if !delta0.is_finite() || !epsilon0.is_finite() {
            return Err(Error::invalid("delta0/epsilon0", "must be finite"));
        }
        if delta0.hypot(epsilon0) <= 0.0 {
            return Err(Error::invalid(
                "delta0/epsilon0",
                "splitting must be positive",
            ));
        }
        Ok(Self { delta0, epsilon0 })
    }

    /// Unbiased system with splitting `delta` (`u = 1`, `v = 0`).
    pub fn symmetric(delta: f64) -> Result<Self> {
        Self::new(delta, 0.0)
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    /// `Δ = √(Δ₀² + ε₀²)`
    pub fn splitting(&self) -> f64 {
        self.delta0.hypot(self.epsilon0)
    }

    /// `Δ₀/Δ`
    pub fn u(&self) -> f64 {
        self.delta0 / self.splitting()
    }

    /// `ε₀/Δ`
    pub fn v(&self) -> f64 {
        self.epsilon0 / self.splitting()
    }
}

/// Linearly chirped drive starting at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpDrive {
    pub omega0: f64,
    pub alpha: f64,
    pub eta: f64,
    pub n_periods: usize,
}

/// Ratios controlling the validity of the Magnus truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// `η/ω₀`
    pub drive_ratio: f64,
    /// `|δ₀|/ω₀`
    pub detuning_ratio: f64,
    /// `2π|α|/ω₀²`
    pub chirp_ratio: f64,
}

impl ValidityReport {
    /// Ratios above this are flagged as outside the weak-drive/weak-chirp regime.
    pub const THRESHOLD: f64 = 0.1;

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value) in [
            ("eta/omega0", self.drive_ratio),
            ("|delta0|/omega0", self.detuning_ratio),
            ("2*pi*|alpha|/omega0^2", self.chirp_ratio),
        ] {
            if value > Self::THRESHOLD {
                out.push(format!(
                    "{name} = {value:.3e} exceeds {:.1}; the second-order Magnus result may be inaccurate",
                    Self::THRESHOLD
                ));
            }
        }
        out
    }
}

impl ChirpDrive {
    pub fn new(omega0: f64, alpha: f64, eta: f64, n_periods: usize) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be positive and finite"));
        }
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::invalid("eta", "must be non-negative and finite"));
        }
        if n_periods == 0 {
            return Err(Error::invalid("n_periods", "must be at least 1"));
        }
        Ok(Self {
            omega0,
            alpha,
            eta,
            n_periods,
        })
    }

    pub fn with_periods(mut self, n_periods: usize) -> Self {
        self.n_periods = n_periods;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    /// `ω(t) = ω₀ + αt`
    pub fn omega_at(&self, t: f64) -> f64 {
        self.omega0 + self.alpha * t
    }

    /// `φ̇(t) = ω₀ + 2αt`
    pub fn phase_rate(&self, t: f64) -> f64 {
        self.omega0 + 2.0 * self.alpha * t
    }

    /// `δ(t) = Δ − ω₀ − 2αt`
    pub fn detuning_at(&self, tls: &TlsParams, t: f64) -> f64 {
        tls.splitting() - self.omega0 - 2.0 * self.alpha * t
    }

    /// Drive phase `ω₀t + αt²` reduced to `[0, 2π)`.
    pub fn phase(&self, t: f64) -> f64 {
        phase::reduced(self.omega0, self.alpha, t)
    }

    /// Non-negative root of `αt² + ω₀t − 2πj = 0`, in the rationalised form
    /// `4πj / (ω₀ + √(ω₀² + 8παj))`.
    pub fn period_point(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Ok(0.0);
        }
        let jf = j as f64;
        let disc = self.omega0.mul_add(self.omega0, 8.0 * PI * self.alpha * jf);
        if !(disc > 0.0) {
            return Err(Error::NegativeDiscriminant {
                j,
                discriminant: disc,
            });
        }
        Ok(4.0 * PI * jf / (self.omega0 + disc.sqrt()))
    }

    pub fn build_grid(&self) -> Result<PeriodGrid> {
        let times = (0..=self.n_periods)
            .map(|j| self.period_point(j))
            .collect::<Result<Vec<_>>>()?;
        let t_end = times[self.n_periods];
        if !(self.omega_at(t_end) > 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("drive frequency becomes non-positive before t = {t_end}"),
            ));
        }
        Ok(PeriodGrid {
            drive: *self,
            times,
        })
    }

    /// Smallest `N` such that `ω(t_N)` has reached `omega_end` (from below for
    /// `α > 0`, from above for `α < 0`).
    pub fn periods_until(&self, omega_end: f64) -> Result<usize> {
        let span = omega_end - self.omega0;
        if self.alpha == 0.0 || !(span / self.alpha > 0.0) {
            return Err(Error::invalid(
                "omega_end",
                "a chirp with this sign of alpha never reaches the requested end frequency",
            ));
        }
        let reached = |t: f64| {
            if self.alpha > 0.0 {
                self.omega_at(t) >= omega_end
            } else {
                self.omega_at(t) <= omega_end
            }
        };
        let t_end = span / self.alpha;
        let guess = ((self.omega0 * t_end + self.alpha * t_end * t_end) / TAU).ceil();
        let mut n = (guess as usize).max(1);
        while n > 1 && reached(self.period_point(n - 1)?) {
            n -= 1;
        }
        while !reached(self.period_point(n)?) {
            n += 1;
        }
        Ok(n)
    }

    pub fn validity(&self, tls: &TlsParams) -> ValidityReport {
        ValidityReport {
            drive_ratio: self.eta / self.omega0,
            detuning_ratio: (tls.splitting() - self.omega0).abs() / self.omega0,
            chirp_ratio: TAU * self.alpha.abs() / (self.omega0 * self.omega0),
        }
    }
}

/// Period points `0 = t_0 < t_1 < … < t_N` of a drive.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodGrid {
    drive: ChirpDrive,
    times: Vec<f64>,
}

impl PeriodGrid {
    pub fn drive(&self) -> &ChirpDrive {
        &self.drive
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of full periods `N`.
    pub fn n_periods(&self) -> usize {
        self.times.len() - 1
    }

    fn check(&self, j: usize) -> Result<()> {
        if j <= self.n_periods() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                j,
                n: self.n_periods(),
            })
        }
    }

    fn check_period(&self, j: usize) -> Result<()> {
        if j == 0 {
            return Err(Error::IndexOutOfRange {
                j,
                n: self.n_periods(),
            });
        }
        self.check(j)
    }

    pub fn t(&self, j: usize) -> Result<f64> {
        self.check(j)?;
        Ok(self.times[j])
    }

    /// `τ_j = t_j − t_{j−1}`, for `1 ≤ j ≤ N`.
    pub fn tau(&self, j: usize) -> Result<f64> {
        self.check_period(j)?;
        Ok(self.times[j] - self.times[j - 1])
    }

    /// `ω̄_j = 2π/τ_j`, for `1 ≤ j ≤ N`.
    pub fn mean_omega(&self, j: usize) -> Result<f64> {
        Ok(TAU / self.tau(j)?)
    }

    /// `ω_j = ω₀ + 2αt_j`, the phase rate at the period point. This differs
    /// from the drive frequency `ω(t_j) = ω₀ + αt_j` by `αt_j`.
    pub fn shorthand_omega(&self, j: usize) -> Result<f64> {
        Ok(self.drive.phase_rate(self.t(j)?))
    }

    /// `δ_j = Δ − ω₀ − 2αt_j`.
    pub fn shorthand_delta(&self, tls: &TlsParams, j: usize) -> Result<f64> {
        Ok(self.drive.detuning_at(tls, self.t(j)?))
    }
}

/// Argument reduction of `ω₀t + αt²` modulo 2π in double-double arithmetic.
///
/// Over `10⁵` periods the phase reaches `~6·10⁵` rad; evaluating it in plain
/// `f64` and then taking `sin` loses about six digits.
mod phase {
    use std::f64::consts::TAU;

    /// `2π − TAU` (the part of 2π below f64 resolution).
    const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

    #[inline]
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    /// `(hi + lo) mod 2π`, returned as a single double near `[−π, π]`.
    #[inline]
    fn reduce(hi: f64, lo: f64) -> f64 {
        let k = (hi / TAU).round();
        let r = (-k).mul_add(TAU, hi);
        r - k * TAU_LO + lo
    }

    pub(super) fn reduced(omega0: f64, alpha: f64, t: f64) -> f64 {
        let (a_hi, a_lo) = two_prod(omega0, t);
        let (tt_hi, tt_lo) = two_prod(t, t);
        let (b_hi, b_lo) = two_prod(alpha, tt_hi);
        let b_lo = alpha.mul_add(tt_lo, b_lo);
        let phi = reduce(a_hi, a_lo) + reduce(b_hi, b_lo);
        let phi = reduce(phi, 0.0);
        if phi < 0.0 {
            phi + TAU
        } else {
            phi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(omega0: f64, alpha: f64, n: usize) -> ChirpDrive {
        ChirpDrive::new(omega0, alpha, 0.0, n).unwrap()
    }

    #[test]
    fn tls_derived_quantities() {
        let s = TlsParams::new(3.0, 4.0).unwrap();
        assert_eq!(s.splitting(), 5.0);
        assert_eq!(s.u(), 0.6);
        assert_eq!(s.v(), 0.8);
        assert!((s.u().powi(2) + s.v().powi(2) - 1.0).abs() < 1e-14);
        assert!(TlsParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn omega_and_detuning() {
        let d = drive(1.0, 0.1, 1);
        assert!((d.omega_at(2.0) - 1.2).abs() < 1e-15);
        assert_eq!(drive(1.0, 0.0, 1).omega_at(123.0), 1.0);

        let s = TlsParams::symmetric(1.5).unwrap();
        assert_eq!(drive(1.0, 0.0, 1).detuning_at(&s, 7.0), 0.5);
        let t_star = (1.5 - 1.0) / (2.0 * 0.1);
        assert!(d.detuning_at(&s, t_star).abs() < 1e-15);
    }

    #[test]
    fn period_point_examples() {
        let d = drive(1.0, 0.1, 1);
        assert_eq!(d.period_point(0).unwrap(), 0.0);
        // textbook root of 0.1 t² + t − 2π = 0
        let naive = (-1.0 + (1.0 + 0.8 * PI).sqrt()) / 0.2;
        let t1 = d.period_point(1).unwrap();
        assert!((t1 - naive).abs() < 1e-14);
        assert!((t1 - 4.371_864_972_981_41).abs() < 1e-12);
        assert!((d.omega_at(t1) * t1 - TAU).abs() < 1e-14);

        let h = drive(2.0, 0.0, 1);
        for j in 0..50 {
            assert_eq!(h.period_point(j).unwrap(), TAU * j as f64 / 2.0);
        }
    }

    #[test]
    fn harmonic_grid_is_uniform() {
        let g = drive(TAU, 0.0, 3).build_grid().unwrap();
        assert_eq!(g.times(), &[0.0, 1.0, 2.0, 3.0]);
        for j in 1..=3 {
            assert_eq!(g.tau(j).unwrap(), 1.0);
            assert_eq!(g.mean_omega(j).unwrap(), TAU);
        }
    }

    #[test]
    fn positive_chirp_shrinks_periods_and_orders_frequencies() {
        let g = drive(1.0, 0.05, 40).build_grid().unwrap();
        for j in 1..=40 {
            let wbar = g.mean_omega(j).unwrap();
            assert!(g.shorthand_omega(j - 1).unwrap() <= wbar);
            assert!(wbar <= g.shorthand_omega(j).unwrap());
            if j > 1 {
                assert!(g.tau(j).unwrap() < g.tau(j - 1).unwrap());
            }
        }
    }

    #[test]
    fn shorthand_values() {
        let s = TlsParams::symmetric(1.3).unwrap();
        let d = drive(1.0, 0.02, 10);
        let g = d.build_grid().unwrap();
        assert_eq!(g.shorthand_omega(0).unwrap(), 1.0);
        assert!((g.shorthand_delta(&s, 0).unwrap() - 0.3).abs() < 1e-15);
        for j in 0..=10 {
            let t = g.t(j).unwrap();
            let diff = g.shorthand_omega(j).unwrap() - d.omega_at(t);
            assert!((diff - 0.02 * t).abs() < 1e-14);
        }
        assert!(matches!(
            g.shorthand_omega(11),
            Err(Error::IndexOutOfRange { j: 11, n: 10 })
        ));
        assert!(g.tau(0).is_err());
    }

    #[test]
    fn strong_negative_chirp_is_rejected() {
        // ω₀² + 8παj turns negative at j ≈ 39.8
        let d = drive(1.0, -0.001, 100);
        assert!(matches!(
            d.build_grid(),
            Err(Error::NegativeDiscriminant { j: 40, .. })
        ));
        assert!(drive(1.0, -0.001, 39).build_grid().is_ok());
    }

    #[test]
    fn periods_until_end_frequency() {
        let d = drive(1.0, 0.01, 1);
        let n = d.periods_until(1.5).unwrap();
        assert!(d.omega_at(d.period_point(n).unwrap()) >= 1.5);
        assert!(d.omega_at(d.period_point(n - 1).unwrap()) < 1.5);

        let down = drive(1.0, -0.001, 1);
        let n = down.periods_until(0.95).unwrap();
        assert!(down.omega_at(down.period_point(n).unwrap()) <= 0.95);
        assert!(down.omega_at(down.period_point(n - 1).unwrap()) > 0.95);

        assert!(d.periods_until(0.5).is_err());
        assert!(drive(1.0, 0.0, 1).periods_until(2.0).is_err());
    }

    #[test]
    fn phase_reduction_matches_naive_for_small_arguments() {
        let d = drive(1.7, 0.03, 1);
        for &t in &[0.0f64, 0.5, 3.0, 11.0] {
            let naive = (1.7 * t + 0.03 * t * t).rem_euclid(TAU);
            assert!((d.phase(t) - naive).abs() < 1e-13);
        }
    }

    #[test]
    fn phase_vanishes_at_period_points() {
        let d = drive(37.0, 0.04, 100_000);
        for j in [1usize, 17, 1000, 99_999] {
            let t = d.period_point(j).unwrap();
            let phi = d.phase(t);
            let dist = phi.min(TAU - phi);
            // limited by the rounding of t_j itself, φ̇·ulp(t_j)
            assert!(
                dist < 4.0 * d.phase_rate(t) * t * f64::EPSILON,
                "j = {j}: {dist:e}"
            );
        }
    }

    #[test]
    fn validity_flags() {
        let s = TlsParams::symmetric(1.0).unwrap();
        let weak = ChirpDrive::new(1.0, 1e-4, 0.01, 1).unwrap();
        assert!(weak.validity(&s).warnings().is_empty());
        let strong = ChirpDrive::new(1.0, 0.1, 0.5, 1).unwrap();
        assert_eq!(strong.validity(&s).warnings().len(), 2);
    }
}
