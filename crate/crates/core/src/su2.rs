//! SU(2)/SO(3) algebra for a single spin-1/2.
//!
//! Hamiltonians are stored as Pauli coefficients, `H = h0·1 + h·σ/2`, so the
//! vector `h` has units of angular frequency and `|h|` is the level splitting.
//! The Bloch map generated by a constant `H` over a time `τ` is the rotation
//! about `h/|h|` by the angle `|h|·τ` in the positive (right-handed) sense.
//! Every propagator in this crate reproduces that map in the constant-field
//! limit.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|e| = 1` for axes handed to the rotation builders.
pub const UNIT_AXIS_TOL: f64 = 1e-12;

/// Slack on `|r| <= 1` accepted for physical states.
pub const BLOCH_NORM_TOL: f64 = 1e-9;

/// Coefficients of a 2×2 Hermitian operator in the `(1, σx/2, σy/2, σz/2)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector {
    pub h0: f64,
    pub h: Vector3<f64>,
}

impl PauliVector {
    pub fn new(h0: f64, hx: f64, hy: f64, hz: f64) -> Self {
        Self {
            h0,
            h: Vector3::new(hx, hy, hz),
        }
    }

    /// Traceless operator `h·σ/2`.
    pub fn from_vector(h: Vector3<f64>) -> Self {
        Self { h0: 0.0, h }
    }

    pub fn zero() -> Self {
        Self::from_vector(Vector3::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.h0.is_finite() && self.h.iter().all(|c| c.is_finite())
    }

    /// `|h|`, the splitting between the two eigenvalues.
    pub fn energy(&self) -> f64 {
        self.h.norm()
    }

    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        let [sx, sy, sz] = pauli();
        Matrix2::identity() * Complex64::from(self.h0)
            + (sx * Complex64::from(self.h[0])
                + sy * Complex64::from(self.h[1])
                + sz * Complex64::from(self.h[2]))
                * Complex64::from(0.5)
    }

    /// Recover the coefficients from a Hermitian matrix (anti-Hermitian part is dropped).
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Self {
        let [sx, sy, sz] = pauli();
        let tr = |a: &Matrix2<Complex64>| (m * a).trace().re;
        Self {
            h0: 0.5 * m.trace().re,
            h: Vector3::new(tr(&sx), tr(&sy), tr(&sz)),
        }
    }

    /// The two eigenvalues `h0 ∓ |h|/2`, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let half = 0.5 * self.energy();
        [self.h0 - half, self.h0 + half]
    }
}

impl std::ops::Add for PauliVector {
    type Output = PauliVector;

    fn add(self, rhs: Self) -> Self {
        Self {
            h0: self.h0 + rhs.h0,
            h: self.h + rhs.h,
        }
    }
}

impl std::ops::Neg for PauliVector {
    type Output = PauliVector;

    fn neg(self) -> Self {
        Self {
            h0: -self.h0,
            h: -self.h,
        }
    }
}

impl std::ops::Mul<f64> for PauliVector {
    type Output = PauliVector;

    fn mul(self, c: f64) -> Self {
        Self {
            h0: c * self.h0,
            h: c * self.h,
        }
    }
}

/// `(σx, σy, σz)`.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

/// Energy and direction of `h`, `h = energy·axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub energy: f64,
    pub axis: Vector3<f64>,
    /// `h = 0`; the axis is the conventional x̂.
    pub degenerate: bool,
}

/// Split `h` into `|h|` and a unit axis. A vanishing `h` yields `(0, x̂)`.
pub fn decompose(pv: &PauliVector) -> Decomposition {
    let energy = pv.energy();
    if energy > 0.0 {
        Decomposition {
            energy,
            axis: pv.h / energy,
            degenerate: false,
        }
    } else {
        Decomposition {
            energy: 0.0,
            axis: Vector3::x(),
            degenerate: true,
        }
    }
}

/// Unit axis and rotation angle `θ = E·τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    axis: Vector3<f64>,
    angle: f64,
}

impl AxisAngle {
    pub fn new(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let norm = axis.norm();
        if !((norm - 1.0).abs() <= UNIT_AXIS_TOL) || !angle.is_finite() {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(Self { axis, angle })
    }

    /// Evolution under the constant Hamiltonian `pv` for a time `tau`.
    pub fn from_hamiltonian(pv: &PauliVector, tau: f64) -> Self {
        let d = decompose(pv);
        Self {
            axis: d.axis,
            // degenerate case: energy is exactly zero, so the angle is too
            angle: d.energy * tau,
        }
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Proper rotation of the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wrap a matrix after checking orthogonality and `det = +1` to `tol`.
    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let r = Self(m);
        let err = r.orthogonality_error().max((r.determinant() - 1.0).abs());
        if err <= tol {
            Ok(r)
        } else {
            Err(Error::invalid(
                "rotation",
                format!("matrix is not a proper rotation (deviation {err:e})"),
            ))
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `max |MᵀM − 1|`, entrywise.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &RotationMatrix) -> Self {
        Self(self.0 * first.0)
    }

    /// Axis and angle in `[0, π]`, via the quaternion of the matrix.
    ///
    /// For the identity the axis is x̂. At `θ = π` the sign of the axis is
    /// arbitrary.
    pub fn to_axis_angle(&self) -> AxisAngle {
        let m = &self.0;
        let tr = m.trace();
        // Shepperd: pivot on the largest of (w, x, y, z)².
        let candidates = [tr, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        let (k, _) = candidates
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        let (w, x, y, z) = match k {
            0 => {
                let s = 2.0 * (1.0 + tr).sqrt();
                (
                    0.25 * s,
                    (m[(2, 1)] - m[(1, 2)]) / s,
                    (m[(0, 2)] - m[(2, 0)]) / s,
                    (m[(1, 0)] - m[(0, 1)]) / s,
                )
            }
            1 => {
                let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
                (
                    (m[(2, 1)] - m[(1, 2)]) / s,
                    0.25 * s,
                    (m[(0, 1)] + m[(1, 0)]) / s,
                    (m[(0, 2)] + m[(2, 0)]) / s,
                )
            }
            2 => {
                let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
                (
                    (m[(0, 2)] - m[(2, 0)]) / s,
                    (m[(0, 1)] + m[(1, 0)]) / s,
                    0.25 * s,
                    (m[(1, 2)] + m[(2, 1)]) / s,
                )
            }
            _ => {
                let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
                (
                    (m[(1, 0)] - m[(0, 1)]) / s,
                    (m[(0, 2)] + m[(2, 0)]) / s,
                    (m[(1, 2)] + m[(2, 1)]) / s,
                    0.25 * s,
                )
            }
        };
        let (w, v) = if w < 0.0 {
            (-w, -Vector3::new(x, y, z))
        } else {
            (w, Vector3::new(x, y, z))
        };
        let sin_half = v.norm();
        if sin_half == 0.0 {
            return AxisAngle {
                axis: Vector3::x(),
                angle: 0.0,
            };
        }
        AxisAngle {
            axis: v / sin_half,
            angle: 2.0 * sin_half.atan2(w),
        }
    }
}

/// The Bloch-sphere rotation about `e` by `θ`:
///
/// ```text
/// c + ex²(1−c)        ex ey(1−c) − ez s   ex ez(1−c) + ey s
/// ex ey(1−c) + ez s   c + ey²(1−c)        ey ez(1−c) − ex s
/// ex ez(1−c) − ey s   ey ez(1−c) + ex s   c + ez²(1−c)
/// ```
///
/// with `c = cos θ`, `s = sin θ`. `1 − c` is formed as `2 sin²(θ/2)` so small
/// angles keep full relative precision.
pub fn rotation_matrix(aa: &AxisAngle) -> RotationMatrix {
    let (ex, ey, ez) = (aa.axis[0], aa.axis[1], aa.axis[2]);
    let (s, c) = aa.angle.sin_cos();
    let half = (0.5 * aa.angle).sin();
    let k = 2.0 * half * half;
    RotationMatrix(Matrix3::new(
        c + ex * ex * k,
        ex * ey * k - ez * s,
        ex * ez * k + ey * s,
        ex * ey * k + ez * s,
        c + ey * ey * k,
        ey * ez * k - ex * s,
        ex * ez * k - ey * s,
        ey * ez * k + ex * s,
        c + ez * ez * k,
    ))
}

/// `U = exp(iθ e·σ/2) = cos(θ/2)·1 + i sin(θ/2)·e·σ`.
///
/// Its action on states is `ρ ↦ U† ρ U`, which is the rotation
/// [`rotation_matrix`] on the Bloch vector (see [`so3_image`]).
pub fn su2_exponential(aa: &AxisAngle) -> Matrix2<Complex64> {
    let (s, c) = (0.5 * aa.angle).sin_cos();
    let [sx, sy, sz] = pauli();
    let e_sigma = sx * Complex64::from(aa.axis[0])
        + sy * Complex64::from(aa.axis[1])
        + sz * Complex64::from(aa.axis[2]);
    Matrix2::identity() * Complex64::from(c) + e_sigma * Complex64::new(0.0, s)
}

/// Matrix of the map `r ↦ r'` induced by `ρ ↦ U† ρ U`:
/// `M_ab = Tr[σ_a U† σ_b U]/2`.
pub fn so3_image(u: &Matrix2<Complex64>) -> Matrix3<f64> {
    let sigma = pauli();
    let ud = u.adjoint();
    Matrix3::from_fn(|a, b| 0.5 * (sigma[a] * ud * sigma[b] * u).trace().re)
}

/// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    pub fn from_vector(r: Vector3<f64>) -> Result<Self> {
        let norm = r.norm();
        if !(norm <= 1.0 + BLOCH_NORM_TOL) {
            return Err(Error::UnphysicalState { norm });
        }
        Ok(Self(r))
    }

    /// Skips the norm check; used for integrator output, whose drift is
    /// bounded separately.
    pub(crate) fn from_raw(r: Vector3<f64>) -> Self {
        Self(r)
    }

    /// Ground state of the static splitting `Δσx/2`.
    pub fn ground() -> Self {
        Self(-Vector3::x())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

pub fn apply(m: &RotationMatrix, r: &BlochVector) -> BlochVector {
    BlochVector(m.0 * r.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn aa(x: f64, y: f64, z: f64, angle: f64) -> AxisAngle {
        AxisAngle::new(Vector3::new(x, y, z).normalize(), angle).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let (delta, eta) = (0.3, 0.7);
        let d = decompose(&PauliVector::new(0.0, delta, -eta, 0.0));
        let e = (delta * delta + eta * eta).sqrt();
        assert!((d.energy - e).abs() < 1e-15);
        assert!((d.axis - Vector3::new(delta, -eta, 0.0) / e).amax() < 1e-15);

        let d = decompose(&PauliVector::zero());
        assert_eq!(d.energy, 0.0);
        assert_eq!(d.axis, Vector3::x());
        assert!(d.degenerate);

        let d = decompose(&PauliVector::new(0.0, 3.0, 4.0, 0.0));
        assert_eq!(d.energy, 5.0);
        assert!((d.axis - Vector3::new(0.6, 0.8, 0.0)).amax() < 1e-16);
    }

    #[test]
    fn decompose_reconstructs() {
        let pv = PauliVector::new(0.0, 1e-3, -2.5, 7.0);
        let d = decompose(&pv);
        let back = d.axis * d.energy;
        assert!((back - pv.h).norm() <= 1e-14 * pv.energy());
    }

    #[test]
    fn matrix_round_trip() {
        let pv = PauliVector::new(0.25, 1.0, -2.0, 3.5);
        assert_eq!(PauliVector::from_matrix(&pv.to_matrix()), pv);
    }

    #[test]
    fn half_turn_about_x() {
        let m = rotation_matrix(&aa(1.0, 0.0, 0.0, PI));
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        assert!((m.matrix() - expected).amax() < 1e-15);
        let r = apply(&m, &BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert!((r.vector() - Vector3::new(0.0, 0.0, -1.0)).amax() < 1e-15);
    }

    #[test]
    fn quarter_turn_about_z() {
        // c = 0, s = 1 substituted into the display above.
        let m = rotation_matrix(&aa(0.0, 0.0, 1.0, FRAC_PI_2));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((m.matrix() - expected).amax() < 1e-15);
        let r = apply(&m, &BlochVector::new(1.0, 0.0, 0.0).unwrap());
        assert!((r.vector() - Vector3::y()).amax() < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let m = rotation_matrix(&aa(0.3, -0.2, 0.9, 0.0));
        assert_eq!(*m.matrix(), Matrix3::identity());
    }

    #[test]
    fn non_unit_axis_rejected() {
        let err = AxisAngle::new(Vector3::new(1.0, 1.0, 0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::NonUnitAxis { .. }));
    }

    #[test]
    fn su2_examples() {
        let u = su2_exponential(&aa(0.0, 1.0, 0.0, 0.0));
        assert!((u - Matrix2::identity()).map(|z| z.norm()).max() < 1e-16);

        let u = su2_exponential(&aa(0.0, 0.0, 1.0, TAU));
        assert!((u + Matrix2::identity()).map(|z| z.norm()).max() < 1e-15);
    }

    #[test]
    fn degenerate_hamiltonian_gives_identity_evolution() {
        let a = AxisAngle::from_hamiltonian(&PauliVector::zero(), 3.0);
        assert_eq!(a.angle(), 0.0);
        assert_eq!(*rotation_matrix(&a).matrix(), Matrix3::identity());
    }

    #[test]
    fn axis_angle_recovery() {
        for &(x, y, z, th) in &[
            (1.0, 2.0, 3.0, 0.4),
            (0.0, -1.0, 0.2, 3.0),
            (0.3, 0.3, -0.9, 1e-7),
            (1.0, 0.0, 0.0, PI),
        ] {
            let a = aa(x, y, z, th);
            let back = rotation_matrix(&a).to_axis_angle();
            assert!(
                (back.angle() - th).abs() < 1e-12,
                "{th} vs {}",
                back.angle()
            );
            let same = (back.axis() - a.axis()).amax() < 1e-9;
            let flipped = th == PI && (back.axis() + a.axis()).amax() < 1e-9;
            assert!(same || flipped);
        }
        assert_eq!(RotationMatrix::identity().to_axis_angle().angle(), 0.0);
    }

    #[test]
    fn unphysical_state_rejected() {
        assert!(BlochVector::new(0.8, 0.8, 0.0).is_err());
        assert!(BlochVector::new(0.0, 0.0, 1.0).is_ok());
    }
}
