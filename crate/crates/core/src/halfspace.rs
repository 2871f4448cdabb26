//! Crooked planes and crooked half-spaces.
//!
//! For a unit spacelike direction `u` and vertex `p`, write `x = q - p` and
//! let `(minus, plus, u)` be the null frame of `u`. The crooked plane
//! `C(u, p)` is the union of
//!
//! * the stem: `B(x, u) = 0` with `x` timelike or null,
//! * the wing through `plus`: `B(x, plus) = 0`, `B(x, u) >= 0`,
//! * the wing through `minus`: `B(x, minus) = 0`, `B(x, u) <= 0`.
//!
//! It separates space into two crooked half-spaces. `H(u, p)` is the one
//! containing `p + x` for future timelike `x` with `B(x, u) > 0`:
//!
//! * `B(x, u) > 0` and `B(x, plus) < 0`, or
//! * `B(x, u) < 0` and `B(x, minus) > 0`, or
//! * `B(x, u) = 0`, `B(x, plus) < 0` and `B(x, minus) > 0`.
//!
//! The other half-space is `H(-u, p)`. The closure of `H(u, p)` is the union
//! of two dihedral wedges, which makes distances between half-spaces a small
//! convex problem (see [`crate::cone`]).

use std::f64::consts::TAU;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::nearest_in_cone;
use crate::isometry::AffineIsometry;
use crate::linalg::{SpacePoint, Vector3};
use crate::lorentz::{self, form, CirclePoint, Interval, LorentzError, NullFrame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HalfSpaceError {
    #[error("truncation radius must be positive, got {0}")]
    BadTruncation(f64),
    #[error("non-finite vertex")]
    NonFinite,
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Membership {
    InHalfSpace,
    OnCrookedPlane,
    InOpposite,
}

impl Membership {
    pub fn flip(self) -> Membership {
        match self {
            Membership::InHalfSpace => Membership::InOpposite,
            Membership::OnCrookedPlane => Membership::OnCrookedPlane,
            Membership::InOpposite => Membership::InHalfSpace,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrookedHalfSpace {
    direction: Vector3,
    vertex: SpacePoint,
    frame: NullFrame,
}

fn sign_with_tol(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

impl CrookedHalfSpace {
    pub fn new(direction: Vector3, vertex: SpacePoint, tol: f64) -> Result<Self, HalfSpaceError> {
        if !vertex.is_finite() {
            return Err(HalfSpaceError::NonFinite);
        }
        let frame = lorentz::null_frame(&direction, tol)?;
        Ok(CrookedHalfSpace {
            direction,
            vertex,
            frame,
        })
    }

    /// Half-space whose direction is the unit normal of an arc.
    pub fn from_interval(interval: &Interval, vertex: SpacePoint, tol: f64) -> Result<Self, HalfSpaceError> {
        CrookedHalfSpace::new(lorentz::spacelike_from_interval(interval), vertex, tol)
    }

    pub fn direction(&self) -> Vector3 {
        self.direction
    }

    pub fn vertex(&self) -> SpacePoint {
        self.vertex
    }

    pub fn frame(&self) -> &NullFrame {
        &self.frame
    }

    /// Arc of null directions of the direction vector.
    pub fn interval(&self) -> Interval {
        self.frame.interval()
    }

    /// Angular length of that arc.
    pub fn angle(&self) -> f64 {
        self.interval().length()
    }

    /// The complementary half-space across the same crooked plane.
    pub fn opposite(&self) -> CrookedHalfSpace {
        CrookedHalfSpace {
            direction: -self.direction,
            vertex: self.vertex,
            frame: self.frame.opposite(),
        }
    }

    /// Image under an affine isometry: direction `L(h) u`, vertex `h(p)`.
    ///
    /// The null frame is mapped projectively and the direction rebuilt from
    /// it. Mapping `u` itself loses the unit length to cancellation once the
    /// linear part is large, while the images of the null rays stay accurate.
    pub fn transform(&self, h: &AffineIsometry, _tol: f64) -> Result<CrookedHalfSpace, HalfSpaceError> {
        let vertex = h.apply(&self.vertex);
        if !vertex.is_finite() {
            return Err(HalfSpaceError::NonFinite);
        }
        let plus = CirclePoint::from_direction(&h.apply_vector(&self.frame.plus)).angle();
        let minus = CirclePoint::from_direction(&h.apply_vector(&self.frame.minus)).angle();
        let interval = Interval::new(plus, plus + (minus - plus).rem_euclid(TAU))?;
        let axis = lorentz::spacelike_from_interval(&interval);
        Ok(CrookedHalfSpace {
            direction: axis,
            vertex,
            frame: NullFrame {
                minus: lorentz::null_vector_at(minus),
                plus: lorentz::null_vector_at(plus),
                axis,
            },
        })
    }

    /// Signed Euclidean distances of `q - p` from the planes orthogonal to
    /// `u`, `plus` and `minus`.
    fn signed_offsets(&self, q: &SpacePoint) -> (f64, f64, f64) {
        let x = *q - self.vertex;
        let f = &self.frame;
        (
            form(&x, &f.axis) / f.axis.norm(),
            form(&x, &f.plus) / f.plus.norm(),
            form(&x, &f.minus) / f.minus.norm(),
        )
    }

    /// Which side of the crooked plane `q` is on. Points within `tol` of any
    /// of the three defining planes where it matters count as on the plane.
    pub fn membership(&self, q: &SpacePoint, tol: f64) -> Membership {
        let (bu, bp, bm) = self.signed_offsets(q);
        let (su, sp, sm) = (sign_with_tol(bu, tol), sign_with_tol(bp, tol), sign_with_tol(bm, tol));
        match su {
            1 => match sp {
                -1 => Membership::InHalfSpace,
                1 => Membership::InOpposite,
                _ => Membership::OnCrookedPlane,
            },
            -1 => match sm {
                1 => Membership::InHalfSpace,
                -1 => Membership::InOpposite,
                _ => Membership::OnCrookedPlane,
            },
            _ => match (sp, sm) {
                (-1, 1) => Membership::InHalfSpace,
                (1, -1) => Membership::InOpposite,
                _ => Membership::OnCrookedPlane,
            },
        }
    }

    pub fn contains(&self, q: &SpacePoint, tol: f64) -> bool {
        self.membership(q, tol) == Membership::InHalfSpace
    }

    /// The two wedges whose union is the closure.
    pub fn closure_wedges(&self) -> [Wedge; 2] {
        let f = &self.frame;
        [
            Wedge {
                apex: self.vertex,
                constraints: [f.axis, -f.plus],
                edge: f.plus,
                rays: [f.minus, f.axis],
            },
            Wedge {
                apex: self.vertex,
                constraints: [-f.axis, f.minus],
                edge: f.minus,
                rays: [-f.axis, -f.plus],
            },
        ]
    }

    /// Euclidean distance from `q` to the closure.
    pub fn distance_to_point(&self, q: &SpacePoint) -> f64 {
        self.closure_wedges()
            .iter()
            .map(|w| w.distance_to_point(q))
            .fold(f64::INFINITY, f64::min)
    }

    /// A point in the interior, drawn from one of the wedges with
    /// coordinates of size up to `scale` along the frame vectors.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> SpacePoint {
        let wedges = self.closure_wedges();
        let w = &wedges[usize::from(rng.random::<bool>())];
        let a = scale * (1e-3 + rng.random::<f64>());
        let b = scale * (1e-3 + rng.random::<f64>());
        let c = scale * (2.0 * rng.random::<f64>() - 1.0);
        w.apex + w.rays[0] * a + w.rays[1] * b + w.edge * c
    }
}

/// Dihedral wedge `{x : B(x - apex, n_k) >= 0, k = 1, 2}`, also described as
/// `apex + cone(rays) + R edge`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub apex: SpacePoint,
    pub constraints: [Vector3; 2],
    pub edge: Vector3,
    pub rays: [Vector3; 2],
}

impl Wedge {
    fn generators(&self) -> [Vector3; 4] {
        [self.rays[0], self.rays[1], self.edge, -self.edge]
    }

    pub fn contains(&self, q: &SpacePoint, tol: f64) -> bool {
        let x = *q - self.apex;
        self.constraints
            .iter()
            .all(|n| form(&x, n) / n.norm() >= -tol)
    }

    pub fn distance_to_point(&self, q: &SpacePoint) -> f64 {
        nearest_in_cone(self.apex - *q, &self.generators()).distance()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub distance: f64,
    /// Nearest points, one in each closure.
    pub witnesses: [SpacePoint; 2],
    /// Set when the nearest points lie beyond the truncation radius, so the
    /// distance is only approached far from the vertices.
    pub asymptotic: bool,
    pub truncation: f64,
}

/// Default truncation radius for a pair of half-spaces.
pub fn default_truncation(a: &CrookedHalfSpace, b: &CrookedHalfSpace) -> f64 {
    1e3 * (a.vertex.to_vector().norm().max(b.vertex.to_vector().norm()) + 1.0)
}

/// Euclidean distance between the closures of two crooked half-spaces.
pub fn separation(
    a: &CrookedHalfSpace,
    b: &CrookedHalfSpace,
    truncation: Option<f64>,
) -> Result<Separation, HalfSpaceError> {
    let truncation = truncation.unwrap_or_else(|| default_truncation(a, b));
    if !(truncation > 0.0) {
        return Err(HalfSpaceError::BadTruncation(truncation));
    }
    let mut best: Option<Separation> = None;
    for wa in a.closure_wedges() {
        for wb in b.closure_wedges() {
            let ga = wa.generators();
            let gb = wb.generators();
            let gens: Vec<Vector3> = ga.iter().copied().chain(gb.iter().map(|g| -*g)).collect();
            let proj = nearest_in_cone(wa.apex - wb.apex, &gens);
            let d = proj.distance();
            if best.as_ref().is_some_and(|s| s.distance <= d) {
                continue;
            }
            let c = &proj.coefficients;
            let x = (0..4).fold(wa.apex, |acc, i| acc + ga[i] * c[i]);
            let y = (0..4).fold(wb.apex, |acc, i| acc + gb[i] * c[4 + i]);
            let far = x.to_vector().norm().max(y.to_vector().norm());
            best = Some(Separation {
                distance: d,
                witnesses: [x, y],
                asymptotic: far > truncation,
                truncation,
            });
        }
    }
    Ok(best.expect("four wedge pairs"))
}
