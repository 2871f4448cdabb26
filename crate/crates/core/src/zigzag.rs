//! Slices of crooked planes by definite planes.
//!
//! A definite plane meets a crooked plane in a zigzag: a stem segment
//! joining two vertices, each carrying a ray. The slice of a crooked
//! half-space is one of the two regions the zigzag bounds. Points of the
//! plane are handled in orthonormal in-plane coordinates `(s, t)`, and all
//! lengths and angles use the Euclidean metric of those coordinates.
//!
//! The second half of the module builds the half-plane approximations of a
//! nested sequence of half-spaces: lines `L_k` perpendicular to a fixed
//! direction `nu`, each touching the zigzag of the `k`-th half-space and
//! bounding a half-plane that contains its slice.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineError, AffineSchottky, NestedSequence};
use crate::halfspace::CrookedHalfSpace;
use crate::linalg::{SpacePoint, Vector3};
use crate::lorentz;

pub type PlanePoint = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZigzagError {
    #[error("plane basis is not orthonormal")]
    NotOrthonormal,
    #[error("plane is not definite")]
    NotDefinite,
    #[error("plane passes within {0:e} of the vertex")]
    VertexOnPlane(f64),
    #[error("half-space angle {0} is not below a quarter turn")]
    WideAngle(f64),
    #[error("no vertex of zigzag {0} bounds a containing half-plane")]
    NoValidVertex(usize),
    #[error("width {delta} exceeds delta0 = {delta0}")]
    WidthTooLarge { delta: f64, delta0: f64 },
    #[error("sequence has no terms")]
    EmptySequence,
    #[error(transparent)]
    Affine(#[from] AffineError),
}

fn add(a: PlanePoint, b: PlanePoint) -> PlanePoint {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: PlanePoint, b: PlanePoint) -> PlanePoint {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: PlanePoint, k: f64) -> PlanePoint {
    [a[0] * k, a[1] * k]
}

fn dot(a: PlanePoint, b: PlanePoint) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: PlanePoint, b: PlanePoint) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: PlanePoint) -> f64 {
    a[0].hypot(a[1])
}

fn unit(a: PlanePoint) -> PlanePoint {
    scale(a, 1.0 / norm(a))
}

/// Counterclockwise normal.
fn left_normal(a: PlanePoint) -> PlanePoint {
    [-a[1], a[0]]
}

/// Signed angle from `a` to `b` in `(-pi, pi]`.
fn signed_angle(a: PlanePoint, b: PlanePoint) -> f64 {
    cross(a, b).atan2(dot(a, b))
}

fn distance_to_segment(w: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(sub(w, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(sub(w, add(a, scale(ab, t))))
}

fn distance_to_ray(w: PlanePoint, origin: PlanePoint, dir: PlanePoint) -> f64 {
    let t = dot(sub(w, origin), dir).max(0.0);
    norm(sub(w, add(origin, scale(dir, t))))
}

/// An affine 2-plane on which the Lorentzian form is positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitePlane {
    base: SpacePoint,
    e1: Vector3,
    e2: Vector3,
    normal: Vector3,
}

impl DefinitePlane {
    pub fn new(base: SpacePoint, e1: Vector3, e2: Vector3, tol: f64) -> Result<Self, ZigzagError> {
        if (e1.norm() - 1.0).abs() > tol || (e2.norm() - 1.0).abs() > tol || e1.dot(&e2).abs() > tol {
            return Err(ZigzagError::NotOrthonormal);
        }
        let normal = e1.cross(&e2);
        // B restricted to the plane is definite iff the Lorentz dual of the
        // Euclidean normal is timelike.
        let [n1, n2, n3] = normal.0;
        if n1 * n1 + n2 * n2 - n3 * n3 >= -tol {
            return Err(ZigzagError::NotDefinite);
        }
        Ok(DefinitePlane { base, e1, e2, normal })
    }

    /// The plane `x3 = height` with coordinates `(x1, x2)`.
    pub fn horizontal(height: f64) -> Self {
        DefinitePlane {
            base: SpacePoint::new(0.0, 0.0, height),
            e1: Vector3::E1,
            e2: Vector3::E2,
            normal: Vector3::E3,
        }
    }

    pub fn base(&self) -> SpacePoint {
        self.base
    }

    pub fn normal(&self) -> Vector3 {
        self.normal
    }

    pub fn lift(&self, w: PlanePoint) -> SpacePoint {
        self.base + self.e1 * w[0] + self.e2 * w[1]
    }

    pub fn project(&self, q: &SpacePoint) -> PlanePoint {
        self.coordinates(&(*q - self.base))
    }

    /// In-plane components of a vector.
    pub fn coordinates(&self, v: &Vector3) -> PlanePoint {
        [v.dot(&self.e1), v.dot(&self.e2)]
    }

    /// Gram matrix `(B(e1, e1), B(e1, e2), B(e2, e2))` of the in-plane basis.
    pub fn gram(&self) -> [f64; 3] {
        [
            lorentz::form(&self.e1, &self.e1),
            lorentz::form(&self.e1, &self.e2),
            lorentz::form(&self.e2, &self.e2),
        ]
    }

    /// Signed Euclidean distance from the plane.
    pub fn offset(&self, q: &SpacePoint) -> f64 {
        self.normal.dot(&(*q - self.base))
    }
}

/// A stem `[v0, v1]` with a ray at each end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zigzag {
    pub v0: PlanePoint,
    pub v1: PlanePoint,
    /// Unit direction of the ray at `v0`.
    pub d0: PlanePoint,
    /// Unit direction of the ray at `v1`.
    pub d1: PlanePoint,
}

impl Zigzag {
    /// Unit vector from `v0` to `v1`.
    pub fn stem_direction(&self) -> PlanePoint {
        unit(sub(self.v1, self.v0))
    }

    pub fn stem_length(&self) -> f64 {
        norm(sub(self.v1, self.v0))
    }

    pub fn distance_to(&self, w: PlanePoint) -> f64 {
        distance_to_segment(w, self.v0, self.v1)
            .min(distance_to_ray(w, self.v0, self.d0))
            .min(distance_to_ray(w, self.v1, self.d1))
    }

    /// Whether `w` lies left of the zigzag traversed inward along the first
    /// ray, across the stem, and out along the second. Uses the total angle
    /// the zigzag sweeps as seen from `w`, which differs by a full turn
    /// between the two sides.
    pub fn is_left(&self, w: PlanePoint) -> bool {
        let a = sub(self.v0, w);
        let b = sub(self.v1, w);
        let swept = signed_angle(self.d0, a) + signed_angle(a, b) + signed_angle(b, self.d1);
        let s = self.stem_direction();
        let left = signed_angle(self.d0, scale(s, -1.0)) + PI + signed_angle(s, self.d1);
        (swept - left).abs() < PI
    }

    /// Vertices joined by the stem and rays truncated where they leave the
    /// box `[xmin, xmax] x [ymin, ymax]`.
    pub fn polyline(&self, viewport: [f64; 4]) -> [PlanePoint; 4] {
        let end0 = add(self.v0, scale(self.d0, ray_exit(self.v0, self.d0, viewport)));
        let end1 = add(self.v1, scale(self.d1, ray_exit(self.v1, self.d1, viewport)));
        [end0, self.v0, self.v1, end1]
    }
}

/// Parameter at which a ray leaves a box, or zero if it never meets it.
fn ray_exit(origin: PlanePoint, dir: PlanePoint, [xmin, xmax, ymin, ymax]: [f64; 4]) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for (o, d, a, b) in [(origin[0], dir[0], xmin, xmax), (origin[1], dir[1], ymin, ymax)] {
        if d.abs() < 1e-300 {
            if o < a || o > b {
                return 0.0;
            }
            continue;
        }
        let (t1, t2) = ((a - o) / d, (b - o) / d);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
    }
    if hi.is_finite() && lo <= hi {
        hi
    } else {
        0.0
    }
}

/// The slice of a crooked half-space: a zigzag and the side it bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagRegion {
    pub zigzag: Zigzag,
    /// The region lies left of the zigzag.
    pub left: bool,
    /// Angle of the sliced half-space.
    pub angle: f64,
    /// Gram matrix of the Lorentzian form in in-plane coordinates.
    pub gram: [f64; 3],
}

impl ZigzagRegion {
    /// Open region: points within `tol` of the zigzag are excluded.
    pub fn contains(&self, w: PlanePoint, tol: f64) -> bool {
        self.zigzag.distance_to(w) > tol && self.zigzag.is_left(w) == self.left
    }

    /// Unit normal to the stem pointing into the region.
    pub fn inward_normal(&self) -> PlanePoint {
        let n = left_normal(self.zigzag.stem_direction());
        if self.left {
            n
        } else {
            scale(n, -1.0)
        }
    }

    /// Angles `(theta0, theta1)` in `[0, 2pi)` from the stem to each ray,
    /// measured at the ray's vertex towards the region.
    ///
    /// Angles are taken in the metric the Lorentzian form induces on the
    /// plane, which makes them invariant under isometries. On horizontal
    /// planes this is the Euclidean metric.
    pub fn angles(&self) -> (f64, f64) {
        // Cholesky factor: |L^T x| is the induced length of x, and L^T keeps
        // orientation.
        let [g11, g12, g22] = self.gram;
        let a = g11.sqrt();
        let b = g12 / a;
        let c = (g22 - b * b).sqrt();
        let iso = |x: PlanePoint| [a * x[0] + b * x[1], c * x[1]];
        let s = unit(iso(self.zigzag.stem_direction()));
        let n = if self.left { left_normal(s) } else { scale(left_normal(s), -1.0) };
        let at = |d: PlanePoint, stem: PlanePoint| {
            let d = iso(d);
            dot(d, n).atan2(dot(d, stem)).rem_euclid(TAU)
        };
        (at(self.zigzag.d0, s), at(self.zigzag.d1, scale(s, -1.0)))
    }

    /// Bisector of the two ray directions, or `None` if they are opposite.
    pub fn recession_bisector(&self) -> Option<PlanePoint> {
        let b = add(self.zigzag.d0, self.zigzag.d1);
        (norm(b) > 1e-12).then(|| unit(b))
    }
}

/// Intersect the crooked plane bounding `h` with a definite plane.
pub fn slice(h: &CrookedHalfSpace, plane: &DefinitePlane, tol: f64) -> Result<ZigzagRegion, ZigzagError> {
    let p = h.vertex();
    let gap = plane.offset(&p);
    if gap.abs() <= tol * (1.0 + p.to_vector().norm()) {
        return Err(ZigzagError::VertexOnPlane(gap.abs()));
    }
    let n = plane.normal();
    let u = h.direction();
    let frame = h.frame();
    let (xp, xm) = (frame.plus, frame.minus);
    // Both null directions meet the plane on the same side of the vertex:
    // the future stem if the plane lies above it, the past stem otherwise.
    let tp = -gap / n.dot(&xp);
    let tm = -gap / n.dot(&xm);
    let v0 = p + xp * tp;
    let v1 = p + xm * tm;
    let d0 = u - xp * (n.dot(&u) / n.dot(&xp));
    let d1 = -u + xm * (n.dot(&u) / n.dot(&xm));
    let zigzag = Zigzag {
        v0: plane.project(&v0),
        v1: plane.project(&v1),
        d0: unit(plane.coordinates(&d0)),
        d1: unit(plane.coordinates(&d1)),
    };
    // Near the future stem the half-space lies where B(. - p, u) > 0, near
    // the past stem where it is negative.
    let gradient = plane.coordinates(&lorentz::lorentz_dual(&u));
    let toward = dot(gradient, left_normal(zigzag.stem_direction()));
    let future = tp > 0.0;
    Ok(ZigzagRegion {
        zigzag,
        left: (toward > 0.0) == future,
        angle: h.angle(),
        gram: plane.gram(),
    })
}

/// Height near `height` whose horizontal plane stays at least `clearance`
/// from every given point; the second value reports whether it moved.
pub fn clear_height(height: f64, points: &[SpacePoint], clearance: f64) -> (f64, bool) {
    let mut c = height;
    for step in 1..=64 {
        if points.iter().all(|p| (p.0[2] - c).abs() > clearance) {
            return (c, step > 1);
        }
        c = height + clearance * 3.0 * step as f64;
    }
    (c, true)
}

/// Half-plane `{w : nu . w >= offset}` bounded by a line through a zigzag
/// vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneApprox {
    pub vertex: PlanePoint,
    pub nu: PlanePoint,
    pub offset: f64,
}

impl HalfPlaneApprox {
    pub fn contains(&self, w: PlanePoint, tol: f64) -> bool {
        dot(self.nu, w) >= self.offset - tol
    }
}

/// Stem direction of the first region, oriented into its recession cone.
pub fn reference_direction(first: &ZigzagRegion) -> Result<PlanePoint, ZigzagError> {
    if first.angle >= FRAC_PI_2 {
        return Err(ZigzagError::WideAngle(first.angle));
    }
    let s = first.zigzag.stem_direction();
    let b = first.recession_bisector().ok_or(ZigzagError::WideAngle(first.angle))?;
    Ok(if dot(s, b) >= 0.0 { s } else { scale(s, -1.0) })
}

/// Half-plane through the lower vertex of `region` along `nu`, if it
/// contains the region.
fn bounding_half_plane(region: &ZigzagRegion, nu: PlanePoint, tol: f64) -> Option<HalfPlaneApprox> {
    let z = &region.zigzag;
    let (low, high) = if dot(nu, z.v0) <= dot(nu, z.v1) { (z.v0, z.v1) } else { (z.v1, z.v0) };
    let offset = dot(nu, low);
    // The zigzag lies in the closed half-plane; the open complement is then
    // connected and misses the zigzag, so one probe point decides it.
    let zigzag_inside = dot(nu, high) >= offset - tol && dot(nu, z.d0) >= -tol && dot(nu, z.d1) >= -tol;
    let probe = sub(low, scale(nu, 1.0 + z.stem_length()));
    (zigzag_inside && !region.contains(probe, tol)).then_some(HalfPlaneApprox { vertex: low, nu, offset })
}

/// Slice every half-space and bound each slice by a half-plane
/// perpendicular to the reference direction of the first.
pub fn approx_half_planes(
    half_spaces: &[CrookedHalfSpace],
    plane: &DefinitePlane,
    tol: f64,
) -> Result<(PlanePoint, Vec<ZigzagRegion>, Vec<HalfPlaneApprox>), ZigzagError> {
    let regions = half_spaces
        .iter()
        .map(|h| slice(h, plane, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let first = regions.first().ok_or(ZigzagError::EmptySequence)?;
    let nu = reference_direction(first)?;
    let approx = regions
        .iter()
        .enumerate()
        .map(|(k, r)| bounding_half_plane(r, nu, tol).ok_or(ZigzagError::NoValidVertex(k)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((nu, regions, approx))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub k: usize,
    /// Distance between `L_k` and `L_{k+1}`.
    pub rho: f64,
    /// Hyperbolicity of the prefix `gamma_k`.
    pub eps: f64,
    /// `delta eps / (4 sqrt 2)`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnstableAngleRow {
    pub k: usize,
    /// Angle between `nu` and the trace on the plane of the weak-unstable
    /// plane of `gamma_k`.
    pub angle: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub height: f64,
    pub nu: PlanePoint,
    pub delta: f64,
    pub rows: Vec<SeparationRow>,
    pub angles: Vec<UnstableAngleRow>,
    pub ok: bool,
}

impl SeparationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,rho_Lk_Lk1,bound,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.17e},{:.17e},{}\n", r.k, r.rho, r.bound, r.pass));
        }
        out
    }
}

/// Check the spacing of consecutive lines `L_k` against the width `delta`
/// and the hyperbolicity of the prefixes, slicing at the height of the
/// sequence's start point.
pub fn separation_report(
    group: &AffineSchottky,
    sequence: &NestedSequence,
    delta: f64,
    delta0: f64,
    tol: f64,
) -> Result<SeparationReport, ZigzagError> {
    if delta > delta0 {
        return Err(ZigzagError::WidthTooLarge { delta, delta0 });
    }
    let half_spaces: Vec<CrookedHalfSpace> = sequence.terms.iter().map(|t| t.half_space).collect();
    let vertices: Vec<SpacePoint> = half_spaces.iter().map(|h| h.vertex()).collect();
    let (height, _) = clear_height(sequence.start.0[2], &vertices, 1e-6 * (1.0 + sequence.start.0[2].abs()));
    let plane = DefinitePlane::horizontal(height);
    let (nu, _, approx) = approx_half_planes(&half_spaces, &plane, tol)?;
    let nu3 = Vector3::new(nu[0], nu[1], 0.0);

    let mut rows = Vec::new();
    let mut angles = Vec::new();
    for (k, term) in sequence.terms.iter().enumerate().skip(1) {
        let linear = group.word_linear_precise(&term.prefix);
        let eps = linear.hyperbolicity(tol).unwrap_or(0.0);
        if let Ok(data) = linear.to_f64().hyperbolic_data(tol) {
            let trace = plane.normal().cross(&lorentz::lorentz_dual(&data.expanding));
            let c = (trace.dot(&nu3).abs() / trace.norm()).min(1.0);
            let angle = c.acos();
            angles.push(UnstableAngleRow {
                k,
                angle,
                pass: angle <= FRAC_PI_4 + tol,
            });
        }
        if k + 1 < approx.len() {
            let rho = approx[k + 1].offset - approx[k].offset;
            let bound = delta * eps / (4.0 * SQRT_2);
            rows.push(SeparationRow {
                k,
                rho,
                eps,
                bound,
                pass: rho >= bound - tol,
            });
        }
    }
    let ok = rows.iter().all(|r| r.pass) && angles.iter().all(|a| a.pass);
    Ok(SeparationReport {
        height,
        nu,
        delta,
        rows,
        angles,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::example_config;
    use crate::halfspace::Membership;
    use crate::lorentz::DEFAULT_TOL;
    use crate::word::Word;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: PlanePoint, b: PlanePoint) -> bool {
        norm(sub(a, b)) < 1e-12
    }

    fn half_space(u: Vector3) -> CrookedHalfSpace {
        CrookedHalfSpace::new(u, SpacePoint::ORIGIN, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn model_slices() {
        let h = half_space(Vector3::E1);
        let z = slice(&h, &DefinitePlane::horizontal(1.0), DEFAULT_TOL).unwrap().zigzag;
        assert!(close(z.v0, [0.0, -1.0]) && close(z.v1, [0.0, 1.0]));
        assert!(close(z.d0, [1.0, 0.0]) && close(z.d1, [-1.0, 0.0]));
        let z = slice(&h, &DefinitePlane::horizontal(2.0), DEFAULT_TOL).unwrap().zigzag;
        assert!(close(z.v0, [0.0, -2.0]) && close(z.v1, [0.0, 2.0]));
        assert!(matches!(
            slice(&h, &DefinitePlane::horizontal(0.0), DEFAULT_TOL),
            Err(ZigzagError::VertexOnPlane(_))
        ));
    }

    #[test]
    fn plane_checks() {
        let o = SpacePoint::ORIGIN;
        assert!(DefinitePlane::new(o, Vector3::E1, Vector3::E3, DEFAULT_TOL).is_err());
        assert!(DefinitePlane::new(o, Vector3::E1, Vector3::E1, DEFAULT_TOL).is_err());
        let tilt = Vector3::new(0.0, 0.8, 0.6);
        assert!(DefinitePlane::new(o, Vector3::E1, tilt, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn sector_angles() {
        let r = slice(&half_space(Vector3::E1), &DefinitePlane::horizontal(1.0), DEFAULT_TOL).unwrap();
        let (t0, t1) = r.angles();
        assert!((t0 - FRAC_PI_2).abs() < 1e-12 && (t1 - 3.0 * FRAC_PI_2).abs() < 1e-12);
        let u = Vector3::new(2.0, 0.0, 3f64.sqrt());
        let r = slice(&half_space(u), &DefinitePlane::horizontal(1.0), DEFAULT_TOL).unwrap();
        let (t0, t1) = r.angles();
        assert!((r.angle - PI / 3.0).abs() < 1e-12);
        assert!((t0 - PI / 6.0).abs() < 1e-12 && (t1 - 7.0 * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn region_matches_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tilt = Vector3::new(0.0, 0.8, 0.6);
        let planes = [
            DefinitePlane::horizontal(1.5),
            DefinitePlane::horizontal(-2.0),
            DefinitePlane::new(SpacePoint::new(0.0, 0.0, 0.7), Vector3::E1, tilt, DEFAULT_TOL).unwrap(),
        ];
        for plane in &planes {
            for _ in 0..20 {
                let a = rng.random::<f64>() * TAU;
                let r = 1.0 + 2.0 * rng.random::<f64>();
                let z = (r * r - 1.0).sqrt() * (2.0 * rng.random::<f64>() - 1.0).signum();
                let p = SpacePoint::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, 0.2 * rng.random::<f64>());
                let h = CrookedHalfSpace::new(Vector3::new(r * a.cos(), r * a.sin(), z), p, DEFAULT_TOL).unwrap();
                let region = slice(&h, plane, DEFAULT_TOL).unwrap();
                let (t0, t1) = region.angles();
                assert!(((t1 - t0).rem_euclid(TAU) - PI).abs() < 1e-9);
                assert!(!region.contains(region.zigzag.v0, 1e-9));
                for _ in 0..50 {
                    let w = [20.0 * rng.random::<f64>() - 10.0, 20.0 * rng.random::<f64>() - 10.0];
                    if region.zigzag.distance_to(w) < 1e-6 {
                        continue;
                    }
                    let inside = h.membership(&plane.lift(w), 1e-9) == Membership::InHalfSpace;
                    assert_eq!(region.contains(w, 1e-9), inside, "{w:?}");
                }
            }
        }
    }

    #[test]
    fn polyline_ends_on_viewport() {
        let r = slice(&half_space(Vector3::E1), &DefinitePlane::horizontal(1.0), DEFAULT_TOL).unwrap();
        let line = r.zigzag.polyline([-5.0, 5.0, -5.0, 5.0]);
        assert!(close(line[0], [5.0, -1.0]) && close(line[3], [-5.0, 1.0]));
    }

    fn example_sequence() -> (AffineSchottky, NestedSequence, f64) {
        let g = example_config(4.0).build(DEFAULT_TOL).unwrap();
        let x = SpacePoint::new(0.1, -0.2, 0.3);
        let w = Word::from_signed_labels(&[-1, 2, 2, -1, -2]).unwrap();
        let seq = g.nested_sequence(&g.word_isometry(&w).apply(&x), 5, DEFAULT_TOL).unwrap();
        let d0 = g.delta0(DEFAULT_TOL).unwrap().separation.distance;
        (g, seq, d0)
    }

    #[test]
    fn half_planes_contain_slices_and_nest() {
        let (_, seq, _) = example_sequence();
        let hs: Vec<_> = seq.terms.iter().map(|t| t.half_space).collect();
        let plane = DefinitePlane::horizontal(seq.start.0[2]);
        let (nu, regions, approx) = approx_half_planes(&hs, &plane, DEFAULT_TOL).unwrap();
        let z0 = regions[0].zigzag;
        assert!(close(approx[0].vertex, z0.v0) || close(approx[0].vertex, z0.v1));
        for d in [z0.d0, z0.d1] {
            assert!(dot(d, nu).clamp(-1.0, 1.0).acos() <= FRAC_PI_4 + 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (k, (region, pi)) in regions.iter().zip(&approx).enumerate() {
            let centre = pi.vertex;
            for _ in 0..400 {
                let w = add(centre, [60.0 * rng.random::<f64>() - 30.0, 60.0 * rng.random::<f64>() - 30.0]);
                if region.contains(w, 1e-9) {
                    assert!(pi.contains(w, 1e-9), "k = {k}");
                    if k > 0 {
                        assert!(approx[k - 1].contains(w, 1e-9));
                    }
                }
            }
        }
        for pair in approx.windows(2) {
            assert!(pair[1].offset >= pair[0].offset - 1e-9);
        }
    }

    #[test]
    fn separation_bounds_hold_and_violations_show() {
        let (g, seq, d0) = example_sequence();
        assert!(matches!(
            separation_report(&g, &seq, 2.0 * d0, d0, DEFAULT_TOL),
            Err(ZigzagError::WidthTooLarge { .. })
        ));
        let report = separation_report(&g, &seq, d0 / 2.0, d0, DEFAULT_TOL).unwrap();
        assert!(report.ok, "{report:?}");
        assert!(!report.rows.is_empty() && report.angles.len() == seq.terms.len() - 1);
        assert!(report.to_csv().starts_with("k,rho_Lk_Lk1,bound,pass\n"));
        for row in &report.rows {
            assert!((row.bound - d0 * row.eps / (8.0 * SQRT_2)).abs() < 1e-15);
        }

        // Drag the third half-space down onto the second line.
        let mut broken = seq.clone();
        let gap = report.rows[0].rho - report.rows[0].bound / 2.0;
        let shift = Vector3::new(report.nu[0], report.nu[1], 0.0) * -gap;
        let h = broken.terms[2].half_space;
        broken.terms[2].half_space = CrookedHalfSpace::new(h.direction(), h.vertex() + shift, 1e-6).unwrap();
        let report = separation_report(&g, &broken, d0 / 2.0, d0, DEFAULT_TOL).unwrap();
        assert!(!report.ok);
        assert!(!report.rows[0].pass);
    }
}
