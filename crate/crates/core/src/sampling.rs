//! Random inputs for property checks.

use std::f64::consts::TAU;

use rand::{Rng, RngExt};

use crate::isometry::{AffineIsometry, LinearIsometry};
use crate::linalg::{SpacePoint, Vector3};
use crate::lorentz::{self, Interval};

/// Unit spacelike vector whose arc has length in `[min_arc, 2pi - min_arc]`.
pub fn unit_spacelike<R: Rng + ?Sized>(rng: &mut R, min_arc: f64) -> Vector3 {
    let start = TAU * rng.random::<f64>();
    let length = min_arc + (TAU - 2.0 * min_arc) * rng.random::<f64>();
    lorentz::spacelike_from_interval(&Interval::new(start, start + length).expect("length within (0, 2pi)"))
}

/// `R_a tau_s R_b` with uniform angles and rapidity in `[0, max_rapidity]`.
pub fn linear_isometry<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> LinearIsometry {
    let a = TAU * rng.random::<f64>();
    let b = TAU * rng.random::<f64>();
    let s = max_rapidity * rng.random::<f64>();
    LinearIsometry::rotation(a) * LinearIsometry::transvection(s) * LinearIsometry::rotation(b)
}

/// Hyperbolic isometry `k tau_s k^-1` with rapidity in `[0.1, 2]` and a
/// random conjugator, retried until its hyperbolicity is at least `min_eps`.
pub fn hyperbolic_isometry<R: Rng + ?Sized>(rng: &mut R, min_eps: f64) -> LinearIsometry {
    loop {
        let k = linear_isometry(rng, 1.5);
        let s = 0.1 + 1.9 * rng.random::<f64>();
        let g = k * LinearIsometry::transvection(s) * k.inverse();
        if g.hyperbolicity(lorentz::DEFAULT_TOL).is_ok_and(|e| e >= min_eps) {
            return g;
        }
    }
}

pub fn point_in_box<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> SpacePoint {
    SpacePoint([0, 1, 2].map(|_| half_width * (2.0 * rng.random::<f64>() - 1.0)))
}

pub fn affine_isometry<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64, max_shift: f64) -> AffineIsometry {
    AffineIsometry::new(linear_isometry(rng, max_rapidity), point_in_box(rng, max_shift).to_vector())
}
