//! The Lorentzian form on R^3 and the objects built from it.
//!
//! The form is `B(u, v) = u1 v1 + u2 v2 - u3 v3`. Future null rays are
//! identified with the unit circle through the representatives
//! `(cos phi, sin phi, 1)`; a unit spacelike vector `v` corresponds to the open
//! arc of null rays `u` with `B(u, v) > 0`, and its null frame consists of the
//! two endpoints of that arc.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Vector3;

/// Tolerance used throughout for sign decisions on the form.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("zero vector has no causal character")]
    ZeroVector,
    #[error("vector is not spacelike (B(v, v) = {0})")]
    NotSpacelike(f64),
    #[error("spacelike vector is not unit (B(v, v) = {0})")]
    NotUnit(f64),
    #[error("vector is not future null")]
    NotFutureNull,
    #[error("arc length {0} is outside (0, 2 pi)")]
    BadInterval(f64),
    #[error("non-finite input")]
    NonFinite,
}

/// `B(u, v)`.
pub fn form(u: &Vector3, v: &Vector3) -> f64 {
    u.0[0] * v.0[0] + u.0[1] * v.0[1] - u.0[2] * v.0[2]
}

/// Lorentzian cross product, characterised by `B(u x v, w) = det(u, v, w)`.
pub fn lorentz_cross(u: &Vector3, v: &Vector3) -> Vector3 {
    let [u1, u2, u3] = u.0;
    let [v1, v2, v3] = v.0;
    Vector3([u2 * v3 - u3 * v2, u3 * v1 - u1 * v3, -(u1 * v2 - u2 * v1)])
}

/// `Jv`, so that `B(x, v)` is the Euclidean dot product `x . Jv`.
pub fn lorentz_dual(v: &Vector3) -> Vector3 {
    Vector3([v.0[0], v.0[1], -v.0[2]])
}

/// `det(a, b, c)` with the vectors as rows.
pub fn det3(a: &Vector3, b: &Vector3, c: &Vector3) -> f64 {
    a.dot(&b.cross(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeOrientation {
    Future,
    Past,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Lightlike(TimeOrientation),
    Timelike(TimeOrientation),
}

/// Causal character of a nonzero vector. `tol` is applied to `B(u, u)`
/// after scaling `u` to Euclidean unit length.
pub fn causal_class(u: &Vector3, tol: f64) -> Result<CausalClass, LorentzError> {
    if !u.is_finite() {
        return Err(LorentzError::NonFinite);
    }
    let n = u.norm();
    if n <= tol {
        return Err(LorentzError::ZeroVector);
    }
    let unit = *u * (1.0 / n);
    let q = form(&unit, &unit);
    let orientation = if u.z() > 0.0 {
        TimeOrientation::Future
    } else {
        TimeOrientation::Past
    };
    Ok(if q > tol {
        CausalClass::Spacelike
    } else if q < -tol {
        CausalClass::Timelike(orientation)
    } else {
        CausalClass::Lightlike(orientation)
    })
}

/// Scale a spacelike vector to `B(v, v) = 1`.
pub fn unit_spacelike(v: &Vector3) -> Result<Vector3, LorentzError> {
    if !v.is_finite() {
        return Err(LorentzError::NonFinite);
    }
    let q = form(v, v);
    let scale = v.dot(v);
    if scale == 0.0 {
        return Err(LorentzError::ZeroVector);
    }
    if q <= DEFAULT_TOL * scale {
        return Err(LorentzError::NotSpacelike(q));
    }
    Ok(*v * (1.0 / q.sqrt()))
}

/// Check that `v` is unit spacelike within `tol`, relative to its size.
pub fn require_unit_spacelike(v: &Vector3, tol: f64) -> Result<(), LorentzError> {
    if !v.is_finite() {
        return Err(LorentzError::NonFinite);
    }
    let q = form(v, v);
    if q <= 0.0 {
        return Err(LorentzError::NotSpacelike(q));
    }
    if (q - 1.0).abs() > tol * v.dot(v).max(1.0) {
        return Err(LorentzError::NotUnit(q));
    }
    Ok(())
}

/// A point of the circle of future null rays, stored by its angle in
/// `[0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    angle: f64,
}

impl CirclePoint {
    pub fn new(angle: f64) -> Self {
        CirclePoint {
            angle: canonical_angle(angle),
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Representative `(cos phi, sin phi, 1)`.
    pub fn null_vector(&self) -> Vector3 {
        null_vector_at(self.angle)
    }

    /// Projection of a future null vector to the circle.
    pub fn from_null(w: &Vector3, tol: f64) -> Result<Self, LorentzError> {
        if !w.is_finite() {
            return Err(LorentzError::NonFinite);
        }
        let n = w.norm();
        if n == 0.0 || w.z() <= 0.0 || form(w, w).abs() > tol * n * n {
            return Err(LorentzError::NotFutureNull);
        }
        Ok(CirclePoint::new(w.y().atan2(w.x())))
    }

    /// Projection of any vector with positive third coordinate, without
    /// checking that it is null.
    pub fn from_direction(w: &Vector3) -> Self {
        CirclePoint::new(w.y().atan2(w.x()))
    }
}

/// `(cos phi, sin phi, 1)` without reducing the angle.
pub fn null_vector_at(angle: f64) -> Vector3 {
    Vector3::new(angle.cos(), angle.sin(), 1.0)
}

/// Reduce an angle to `[0, 2 pi)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Euclidean chord distance between two circle points.
pub fn chord_distance(a: &CirclePoint, b: &CirclePoint) -> f64 {
    chord_from_angles(a.angle, b.angle)
}

/// `2 |sin((a - b) / 2)|`.
pub fn chord_from_angles(a: f64, b: f64) -> f64 {
    2.0 * ((a - b) / 2.0).sin().abs()
}

/// Open arc `(start, end)` of the circle traversed counterclockwise, with
/// `0 < end - start < 2 pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    start: f64,
    end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self, LorentzError> {
        if !start.is_finite() || !end.is_finite() {
            return Err(LorentzError::NonFinite);
        }
        let len = end - start;
        if len <= 0.0 || len >= TAU {
            return Err(LorentzError::BadInterval(len));
        }
        Ok(Interval { start, end })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    /// The other arc with the same endpoints.
    pub fn complement(&self) -> Interval {
        Interval {
            start: self.end,
            end: self.start + TAU,
        }
    }

    /// Whether the angle lies strictly inside, with `tol` trimmed from both
    /// ends.
    pub fn contains_angle(&self, angle: f64, tol: f64) -> bool {
        let offset = (angle - self.start).rem_euclid(TAU);
        offset > tol && offset < self.length() - tol
    }

    pub fn contains(&self, p: &CirclePoint, tol: f64) -> bool {
        self.contains_angle(p.angle(), tol)
    }

    /// Angular gap between the closures of two arcs, or `None` when the
    /// closures meet.
    pub fn gap(&self, other: &Interval) -> Option<f64> {
        let offset = (other.start - self.end).rem_euclid(TAU);
        let trailing = TAU - self.length() - (offset + other.length());
        let g = offset.min(trailing);
        (offset > 0.0 && trailing > 0.0).then_some(g)
    }

    /// Chord distance between the endpoints.
    pub fn chord(&self) -> f64 {
        chord_from_angles(self.start, self.end)
    }
}

/// Unit spacelike vector whose positive half-plane is bounded by the arc.
///
/// This is the normalised `u_end ⊠ u_start`, written in closed form from the
/// arc's midpoint `c` and half-width `h` as `(cos c, sin c, cos h) / sin h`;
/// the cross product itself loses all accuracy on very short arcs.
pub fn spacelike_from_interval(interval: &Interval) -> Vector3 {
    let c = interval.midpoint();
    let (sh, ch) = (0.5 * interval.length()).sin_cos();
    Vector3([c.cos() / sh, c.sin() / sh, ch / sh])
}

/// The two future null directions orthogonal to a unit spacelike vector,
/// scaled onto the circle. `plus` is the clockwise endpoint of the arc of `v`,
/// `minus` the counterclockwise one, and `det(minus, plus, v) > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullFrame {
    pub minus: Vector3,
    pub plus: Vector3,
    pub axis: Vector3,
}

impl NullFrame {
    /// Frame of `-axis`: the same null vectors with their roles exchanged.
    pub fn opposite(&self) -> NullFrame {
        NullFrame {
            minus: self.plus,
            plus: self.minus,
            axis: -self.axis,
        }
    }

    /// Arc of the axis, from `plus` counterclockwise to `minus`.
    pub fn interval(&self) -> Interval {
        let start = self.plus.y().atan2(self.plus.x());
        let mut end = self.minus.y().atan2(self.minus.x());
        while end <= start {
            end += TAU;
        }
        Interval { start, end }
    }

    /// Chord distance between the two null vectors.
    pub fn hyperbolicity(&self) -> f64 {
        (self.plus - self.minus).norm()
    }
}

/// Null frame of a unit spacelike vector.
pub fn null_frame(v: &Vector3, tol: f64) -> Result<NullFrame, LorentzError> {
    require_unit_spacelike(v, tol)?;
    let radius = v.x().hypot(v.y());
    let centre = v.y().atan2(v.x());
    let half_width = ((radius - v.z()) * (radius + v.z())).max(0.0).sqrt().atan2(v.z());
    Ok(NullFrame {
        minus: null_vector_at(centre + half_width),
        plus: null_vector_at(centre - half_width),
        axis: *v,
    })
}

/// Chord distance between the endpoints of the arc of `v`.
pub fn hyperbolicity(v: &Vector3, tol: f64) -> Result<f64, LorentzError> {
    Ok(null_frame(v, tol)?.hyperbolicity())
}

/// Euclidean radius bounding the unit spacelike vectors of hyperbolicity at
/// least `eps`.
pub fn eps_spacelike_radius(eps: f64) -> f64 {
    (8.0 / (eps * eps) - 1.0).max(0.0).sqrt()
}

pub fn is_eps_spacelike(v: &Vector3, eps: f64, tol: f64) -> Result<bool, LorentzError> {
    Ok(hyperbolicity(v, tol)? >= eps - tol)
}

/// Angular length of the arc of a unit spacelike vector.
pub fn arc_length(v: &Vector3, tol: f64) -> Result<f64, LorentzError> {
    Ok(null_frame(v, tol)?.interval().length())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneClass {
    /// The restricted form is positive definite (spacelike plane).
    Definite,
    /// The restricted form has signature (1, 1).
    Indefinite,
    /// The restricted form is degenerate (null plane).
    Degenerate,
}

/// Classify the plane `{x : B(x, normal) = 0}`.
pub fn classify_plane(normal: &Vector3, tol: f64) -> Result<PlaneClass, LorentzError> {
    Ok(match causal_class(normal, tol)? {
        CausalClass::Timelike(_) => PlaneClass::Definite,
        CausalClass::Spacelike => PlaneClass::Indefinite,
        CausalClass::Lightlike(_) => PlaneClass::Degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI, SQRT_2};

    fn close(a: &Vector3, b: &Vector3, tol: f64) -> bool {
        (*a - *b).max_abs() < tol
    }

    #[test]
    fn form_on_basis_and_circle() {
        assert_eq!(form(&Vector3::E1, &Vector3::E1), 1.0);
        assert_eq!(form(&Vector3::E3, &Vector3::E3), -1.0);
        let a = null_vector_at(0.0);
        let b = null_vector_at(PI);
        assert!((form(&a, &b) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn cross_product_values() {
        assert_eq!(
            lorentz_cross(&Vector3::E1, &Vector3::E2),
            Vector3::new(0.0, 0.0, -1.0)
        );
        let c = lorentz_cross(&null_vector_at(FRAC_PI_2), &null_vector_at(-FRAC_PI_2));
        assert!(close(&c, &Vector3::new(2.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(
            causal_class(&Vector3::ZERO, DEFAULT_TOL),
            Err(LorentzError::ZeroVector)
        );
    }

    #[test]
    fn causal_classes() {
        let t = DEFAULT_TOL;
        assert_eq!(causal_class(&Vector3::E1, t), Ok(CausalClass::Spacelike));
        assert_eq!(
            causal_class(&Vector3::new(0.0, 1.0, 1.0), t),
            Ok(CausalClass::Lightlike(TimeOrientation::Future))
        );
        assert_eq!(
            causal_class(&Vector3::new(0.0, 0.0, -2.0), t),
            Ok(CausalClass::Timelike(TimeOrientation::Past))
        );
    }

    #[test]
    fn null_frame_of_first_axis() {
        let f = null_frame(&Vector3::E1, DEFAULT_TOL).unwrap();
        assert!(close(&f.minus, &Vector3::new(0.0, 1.0, 1.0), 1e-15));
        assert!(close(&f.plus, &Vector3::new(0.0, -1.0, 1.0), 1e-15));
        assert!(det3(&f.minus, &f.plus, &f.axis) > 0.0);
        assert!((f.hyperbolicity() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn null_frame_of_tilted_vectors() {
        let v = Vector3::new(2.0, 0.0, 3.0_f64.sqrt());
        let f = null_frame(&v, DEFAULT_TOL).unwrap();
        assert!(close(&f.plus, &null_vector_at(-FRAC_PI_6), 1e-15));
        assert!(close(&f.minus, &null_vector_at(FRAC_PI_6), 1e-15));

        let w = Vector3::new(SQRT_2, 0.0, 1.0);
        let g = null_frame(&w, DEFAULT_TOL).unwrap();
        assert!(close(&g.plus, &null_vector_at(-FRAC_PI_4), 1e-15));
        assert!(close(&g.minus, &null_vector_at(FRAC_PI_4), 1e-15));
        assert!((g.hyperbolicity() - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn null_frame_rejects_non_unit() {
        assert!(matches!(
            null_frame(&Vector3::new(2.0, 0.0, 0.0), DEFAULT_TOL),
            Err(LorentzError::NotUnit(_))
        ));
        assert!(matches!(
            null_frame(&Vector3::E3, DEFAULT_TOL),
            Err(LorentzError::NotSpacelike(_))
        ));
    }

    #[test]
    fn chord_values() {
        let a = CirclePoint::new(0.0);
        assert!((chord_distance(&a, &CirclePoint::new(PI)) - 2.0).abs() < 1e-15);
        assert!((chord_distance(&a, &CirclePoint::new(FRAC_PI_2)) - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn spacelike_from_symmetric_intervals() {
        let v = spacelike_from_interval(&Interval::new(-FRAC_PI_4, FRAC_PI_4).unwrap());
        assert!(close(&v, &Vector3::new(SQRT_2, 0.0, 1.0), 1e-15));
        let v = spacelike_from_interval(&Interval::new(-FRAC_PI_6, FRAC_PI_6).unwrap());
        assert!(close(&v, &Vector3::new(2.0, 0.0, 3.0_f64.sqrt()), 1e-14));
        let v = spacelike_from_interval(&Interval::new(3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4).unwrap());
        assert!(close(&v, &Vector3::new(-SQRT_2, 0.0, 1.0), 1e-14));
    }

    #[test]
    fn half_width_formula() {
        // Arc of half-width a centred at 0 has normal (csc a, 0, cot a).
        for a in [0.1, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let v = spacelike_from_interval(&Interval::new(-a, a).unwrap());
            let expected = Vector3::new(1.0 / a.sin(), 0.0, 1.0 / a.tan());
            assert!(close(&v, &expected, 1e-12 * expected.norm()));
        }
    }

    #[test]
    fn interval_gap() {
        let a = Interval::new(-FRAC_PI_6, FRAC_PI_6).unwrap();
        let b = Interval::new(PI / 3.0, 2.0 * PI / 3.0).unwrap();
        assert!((a.gap(&b).unwrap() - FRAC_PI_6).abs() < 1e-15);
        assert!((b.gap(&a).unwrap() - FRAC_PI_6).abs() < 1e-15);
        let c = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(a.gap(&c), None);
    }

    #[test]
    fn interval_rejects_bad_lengths() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, TAU).is_err());
    }

    #[test]
    fn plane_classes() {
        assert_eq!(classify_plane(&Vector3::E3, DEFAULT_TOL), Ok(PlaneClass::Definite));
        assert_eq!(classify_plane(&Vector3::E1, DEFAULT_TOL), Ok(PlaneClass::Indefinite));
        assert_eq!(
            classify_plane(&Vector3::new(1.0, 0.0, 1.0), DEFAULT_TOL),
            Ok(PlaneClass::Degenerate)
        );
    }
}
