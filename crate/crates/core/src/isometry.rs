//! Linear and affine isometries of Minkowski space.
//!
//! A [`LinearIsometry`] is an element of the identity component of
//! `SO(2,1)`: it preserves the form, has determinant one and keeps the future
//! cone. An [`AffineIsometry`] adds a translation. Hyperbolic elements carry
//! eigen-data (an expanding and a contracting null direction plus a fixed
//! spacelike direction), which drives the hyperbolicity and compression
//! estimates used elsewhere in the crate.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Mat3, SpacePoint, Vector3};
use crate::lorentz::{self, lorentz_cross, CirclePoint, LorentzError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsometryError {
    #[error("matrix does not preserve the form (defect {0:e})")]
    NotIsometry(f64),
    #[error("determinant is {0}, expected 1")]
    WrongDeterminant(f64),
    #[error("matrix reverses time orientation")]
    ReversesTime,
    #[error("non-finite entries")]
    NonFinite,
    #[error("isometry is {0:?}, not hyperbolic")]
    NotHyperbolic(Classification),
    #[error("eigenvector computation degenerated")]
    Degenerate,
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearIsometry(Mat3);

/// `max |g^T J g - J|` relative to the squared size of `g`.
pub fn isometry_defect(m: &Mat3) -> f64 {
    let gram = m.transpose() * Mat3::LORENTZ * *m;
    gram.max_abs_diff(&Mat3::LORENTZ) / m.max_abs().powi(2).max(1.0)
}

impl LinearIsometry {
    pub const IDENTITY: LinearIsometry = LinearIsometry(Mat3::IDENTITY);

    /// Validate a matrix as an orientation- and time-preserving isometry.
    pub fn try_new(m: Mat3, tol: f64) -> Result<Self, IsometryError> {
        if !m.is_finite() {
            return Err(IsometryError::NonFinite);
        }
        let defect = isometry_defect(&m);
        if defect > tol {
            return Err(IsometryError::NotIsometry(defect));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > tol * m.max_abs().powi(3).max(1.0) {
            return Err(IsometryError::WrongDeterminant(det));
        }
        if m.0[2][2] <= 0.0 {
            return Err(IsometryError::ReversesTime);
        }
        Ok(LinearIsometry(m))
    }

    /// Wrap a matrix already known to be an isometry, e.g. a product of
    /// validated factors.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        LinearIsometry(m)
    }

    /// Rotation by `angle` in the first two coordinates.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        LinearIsometry(Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))
    }

    /// Boost of rapidity `s` in the second and third coordinates; its
    /// expanding null direction is `(0, 1, 1)`.
    pub fn transvection(s: f64) -> Self {
        let (sh, ch) = (s.sinh(), s.cosh());
        LinearIsometry(Mat3([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]]))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn apply(&self, v: &Vector3) -> Vector3 {
        self.0 * *v
    }

    /// Inverse `J g^T J`, exact for an exact isometry.
    pub fn inverse(&self) -> Self {
        LinearIsometry(Mat3::LORENTZ * self.0.transpose() * Mat3::LORENTZ)
    }

    pub fn power(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = LinearIsometry::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            out = out * base;
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn classify(&self, tol: f64) -> Classification {
        if self.0.max_abs_diff(&Mat3::IDENTITY) <= tol {
            return Classification::Identity;
        }
        let t = self.trace();
        if t > 3.0 + tol {
            Classification::Hyperbolic
        } else if t < 3.0 - tol {
            Classification::Elliptic
        } else {
            Classification::Parabolic
        }
    }

    /// Eigen-data of a hyperbolic element.
    ///
    /// Both null eigenvectors are found as kernels of `h - lambda I` for the
    /// expanding eigenvalue `lambda`, using `h = g` and `h = g^-1`; this keeps
    /// the computation well conditioned when the eigenvalues are far apart.
    pub fn hyperbolic_data(&self, tol: f64) -> Result<HyperbolicData, IsometryError> {
        let class = self.classify(tol);
        if class != Classification::Hyperbolic {
            return Err(IsometryError::NotHyperbolic(class));
        }
        let half_trace = self.trace() - 1.0;
        let expansion = 0.5 * (half_trace + (half_trace * half_trace - 4.0).max(0.0).sqrt());
        let expanding = expanding_null_direction(&self.0, expansion)?;
        let contracting = expanding_null_direction(&self.inverse().0, expansion)?;
        let neutral = lorentz::unit_spacelike(&lorentz_cross(&contracting, &expanding))?;
        Ok(HyperbolicData {
            contraction: 1.0 / expansion,
            expanding,
            contracting,
            neutral,
        })
    }

    /// Hyperbolicity of a hyperbolic element.
    pub fn hyperbolicity(&self, tol: f64) -> Result<f64, IsometryError> {
        Ok(self.hyperbolic_data(tol)?.hyperbolicity())
    }

    /// Induced action on the circle of future null rays.
    pub fn circle_action(&self, p: &CirclePoint) -> CirclePoint {
        CirclePoint::from_direction(&self.apply(&p.null_vector()))
    }

    /// Write the isometry as `R(theta) T(s) R(theta')` with `s >= 0`.
    pub fn cartan(&self, tol: f64) -> CartanDecomposition {
        let m = &self.0 .0;
        let cosh_s = m[2][2].max(1.0);
        let rapidity = cosh_s.acosh();
        let (a, b) = (m[0][2], m[1][2]);
        if a.hypot(b) <= tol {
            return CartanDecomposition {
                theta: m[1][0].atan2(m[0][0]),
                rapidity: 0.0,
                theta_prime: 0.0,
            };
        }
        let theta = (-a).atan2(b);
        let rest = LinearIsometry::transvection(-rapidity).0 * LinearIsometry::rotation(-theta).0 * self.0;
        CartanDecomposition {
            theta,
            rapidity,
            theta_prime: rest.0[1][0].atan2(rest.0[0][0]),
        }
    }

    /// Bound `K` with `1/K <= rho(g a, g b) / rho(a, b) <= K` on the circle.
    pub fn distortion_bound(&self) -> f64 {
        let c = self.0 .0[2][2].max(1.0);
        (c + (c * c - 1.0).sqrt()) * FRAC_PI_2
    }
}

fn expanding_null_direction(m: &Mat3, expansion: f64) -> Result<Vector3, IsometryError> {
    let k = m
        .sub_scaled_identity(expansion)
        .kernel_direction()
        .ok_or(IsometryError::Degenerate)?;
    if k.z().abs() < 1e-300 {
        return Err(IsometryError::Degenerate);
    }
    Ok(k * (1.0 / k.z()))
}

impl Mul for LinearIsometry {
    type Output = LinearIsometry;
    fn mul(self, o: LinearIsometry) -> LinearIsometry {
        LinearIsometry(self.0 * o.0)
    }
}

/// Eigen-data of a hyperbolic isometry `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicData {
    /// Eigenvalue in `(0, 1)`; the other null eigenvalue is its inverse.
    pub contraction: f64,
    /// Null eigenvector for `1 / contraction`, scaled onto the circle.
    pub expanding: Vector3,
    /// Null eigenvector for `contraction`, scaled onto the circle.
    pub contracting: Vector3,
    /// Unit spacelike fixed vector with `det(contracting, expanding, neutral) > 0`.
    pub neutral: Vector3,
}

impl HyperbolicData {
    pub fn hyperbolicity(&self) -> f64 {
        (self.expanding - self.contracting).norm()
    }

    /// Euclidean orthonormal basis of the plane spanned by the neutral and
    /// expanding directions.
    pub fn weak_unstable_basis(&self) -> (Vector3, Vector3) {
        let a = self.neutral.normalized().expect("unit spacelike");
        let b = (self.expanding - a * a.dot(&self.expanding))
            .normalized()
            .expect("independent directions");
        (a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanDecomposition {
    pub theta: f64,
    pub rapidity: f64,
    pub theta_prime: f64,
}

impl CartanDecomposition {
    pub fn compose(&self) -> LinearIsometry {
        LinearIsometry::rotation(self.theta)
            * LinearIsometry::transvection(self.rapidity)
            * LinearIsometry::rotation(self.theta_prime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineIsometry {
    linear: LinearIsometry,
    translation: Vector3,
}

impl AffineIsometry {
    pub const IDENTITY: AffineIsometry = AffineIsometry {
        linear: LinearIsometry::IDENTITY,
        translation: Vector3::ZERO,
    };

    pub fn new(linear: LinearIsometry, translation: Vector3) -> Self {
        AffineIsometry {
            linear,
            translation,
        }
    }

    pub fn linear(&self) -> &LinearIsometry {
        &self.linear
    }

    pub fn translation(&self) -> Vector3 {
        self.translation
    }

    pub fn apply(&self, p: &SpacePoint) -> SpacePoint {
        SpacePoint::from_vector(self.linear.apply(&p.to_vector()) + self.translation)
    }

    pub fn apply_vector(&self, v: &Vector3) -> Vector3 {
        self.linear.apply(v)
    }

    pub fn inverse(&self) -> Self {
        let inv = self.linear.inverse();
        AffineIsometry {
            linear: inv,
            translation: -inv.apply(&self.translation),
        }
    }
}

impl Mul for AffineIsometry {
    type Output = AffineIsometry;
    /// `(a * b)(p) = a(b(p))`.
    fn mul(self, o: AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            linear: self.linear * o.linear,
            translation: self.linear.apply(&o.translation) + self.translation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `|h^-1(y) - x| / delta`.
    pub worst_ratio: f64,
    pub hyperbolicity: f64,
}

/// Sample points `y` in the disc of radius `delta * eps / 4` about `h(x)`
/// inside the weak-unstable plane of `h`, and check `|h^-1(y) - x| < delta`.
pub fn compression_check<R: Rng + ?Sized>(
    h: &AffineIsometry,
    delta: f64,
    x: &SpacePoint,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<CompressionReport, IsometryError> {
    if !(delta > 0.0) {
        return Err(IsometryError::BadRadius(delta));
    }
    let data = h.linear().hyperbolic_data(tol)?;
    let eps = data.hyperbolicity();
    let (a, b) = data.weak_unstable_basis();
    let radius = delta * eps / 4.0;
    let image = h.apply(x);
    let inverse = h.inverse();
    let mut report = CompressionReport {
        samples,
        violations: 0,
        worst_ratio: 0.0,
        hyperbolicity: eps,
    };
    for _ in 0..samples {
        let r = radius * rng.random::<f64>().sqrt() * (1.0 - 1e-12);
        let t = std::f64::consts::TAU * rng.random::<f64>();
        let y = image + (a * t.cos() + b * t.sin()) * r;
        let ratio = inverse.apply(&y).distance(x) / delta;
        report.worst_ratio = report.worst_ratio.max(ratio);
        if ratio >= 1.0 {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// Side lengths of the rectangle inscribed in the sphere of radius `delta`
/// whose diagonals lie along `v` and along the expanding null direction
/// `plus` of its frame.
pub fn frame_rectangle_sides(v: &Vector3, delta: f64, tol: f64) -> Result<(f64, f64), IsometryError> {
    let frame = lorentz::null_frame(v, tol)?;
    let a = frame.plus.normalized().ok_or(IsometryError::Degenerate)?;
    let b = v.normalized().ok_or(IsometryError::Degenerate)?;
    Ok(((a - b).norm() * delta, (a + b).norm() * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{null_vector_at, DEFAULT_TOL};
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn close(a: &Vector3, b: &Vector3, tol: f64) -> bool {
        (*a - *b).max_abs() < tol
    }

    fn g_sqrt2() -> LinearIsometry {
        let r = 2.0 * SQRT_2;
        LinearIsometry::try_new(Mat3([[3.0, 0.0, r], [0.0, 1.0, 0.0], [r, 0.0, 3.0]]), DEFAULT_TOL)
            .unwrap()
    }

    #[test]
    fn rejects_non_isometries() {
        let tol = DEFAULT_TOL;
        let scaled = Mat3([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            LinearIsometry::try_new(scaled, tol),
            Err(IsometryError::NotIsometry(_))
        ));
        let flip = Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            LinearIsometry::try_new(flip, tol),
            Err(IsometryError::WrongDeterminant(_))
        ));
        let past = Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert_eq!(LinearIsometry::try_new(past, tol), Err(IsometryError::ReversesTime));
    }

    #[test]
    fn transvection_classification() {
        let t = LinearIsometry::transvection(1.0);
        assert_eq!(t.classify(DEFAULT_TOL), Classification::Hyperbolic);
        assert!((t.trace() - (1.0 + 2.0 * 1f64.cosh())).abs() < 1e-15);
        assert_eq!(LinearIsometry::rotation(0.3).classify(DEFAULT_TOL), Classification::Elliptic);
        assert_eq!(LinearIsometry::IDENTITY.classify(DEFAULT_TOL), Classification::Identity);
        let parabolic = LinearIsometry::try_new(
            Mat3([[1.0, -1.0, 1.0], [1.0, 0.5, 0.5], [1.0, -0.5, 1.5]]),
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(parabolic.classify(DEFAULT_TOL), Classification::Parabolic);
    }

    #[test]
    fn transvection_eigen_data() {
        let d = LinearIsometry::transvection(1.0).hyperbolic_data(DEFAULT_TOL).unwrap();
        assert!((d.contraction - (-1.0f64).exp()).abs() < 1e-15);
        assert!(close(&d.contracting, &Vector3::new(0.0, -1.0, 1.0), 1e-14));
        assert!(close(&d.expanding, &Vector3::new(0.0, 1.0, 1.0), 1e-14));
        assert!(close(&d.neutral, &Vector3::new(-1.0, 0.0, 0.0), 1e-14));
    }

    #[test]
    fn eigen_data_of_boost_along_first_axis() {
        let d = g_sqrt2().hyperbolic_data(DEFAULT_TOL).unwrap();
        assert!((d.contraction - (3.0 - 2.0 * SQRT_2)).abs() < 1e-15);
        assert!(close(&d.expanding, &Vector3::new(1.0, 0.0, 1.0), 1e-14));
        assert!(close(&d.contracting, &Vector3::new(-1.0, 0.0, 1.0), 1e-14));
        assert!((d.hyperbolicity() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn not_hyperbolic_is_an_error() {
        assert!(matches!(
            LinearIsometry::rotation(1.0).hyperbolic_data(DEFAULT_TOL),
            Err(IsometryError::NotHyperbolic(Classification::Elliptic))
        ));
    }

    #[test]
    fn circle_action_of_transvection() {
        let s = 0.7;
        let p = LinearIsometry::transvection(s).circle_action(&CirclePoint::new(0.0));
        let expected = Vector3::new(1.0 / s.cosh(), s.tanh(), 1.0);
        assert!(close(&p.null_vector(), &expected, 1e-15));
    }

    #[test]
    fn cartan_of_basic_elements() {
        let c = LinearIsometry::transvection(0.8).cartan(DEFAULT_TOL);
        assert!((c.rapidity - 0.8).abs() < 1e-14 && c.theta.abs() < 1e-14 && c.theta_prime.abs() < 1e-14);
        let c = LinearIsometry::rotation(FRAC_PI_4).cartan(DEFAULT_TOL);
        assert!((c.theta - FRAC_PI_4).abs() < 1e-15);
        assert_eq!((c.rapidity, c.theta_prime), (0.0, 0.0));
    }

    #[test]
    fn inverse_and_affine_composition() {
        let g = LinearIsometry::rotation(0.4) * LinearIsometry::transvection(1.3);
        assert!((g * g.inverse()).matrix().max_abs_diff(&Mat3::IDENTITY) < 1e-13);
        let h = AffineIsometry::new(g, Vector3::new(1.0, 2.0, 3.0));
        let p = SpacePoint::new(0.5, -1.0, 2.0);
        assert!(h.inverse().apply(&h.apply(&p)).distance(&p) < 1e-13);
        let k = AffineIsometry::new(LinearIsometry::rotation(1.0), Vector3::E1);
        assert!((h * k).apply(&p).distance(&h.apply(&k.apply(&p))) < 1e-13);
    }

    #[test]
    fn frame_rectangle_of_first_axis() {
        let (a, b) = frame_rectangle_sides(&Vector3::E1, 1.0, DEFAULT_TOL).unwrap();
        assert!((a - SQRT_2).abs() < 1e-15 && (b - SQRT_2).abs() < 1e-15);
        assert!(a.min(b) >= 1.0);
    }

    #[test]
    fn distortion_of_rotation_is_pi_over_two() {
        assert!((LinearIsometry::rotation(PI / 3.0).distortion_bound() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn circle_action_maps_null_to_null() {
        let g = g_sqrt2();
        let w = g.apply(&null_vector_at(1.0));
        assert!(crate::lorentz::form(&w, &w).abs() < 1e-13);
    }
}
