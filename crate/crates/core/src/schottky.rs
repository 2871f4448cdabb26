//! Schottky groups acting on the hyperbolic plane.
//!
//! A configuration pairs `2m` disjoint arcs of the circle at infinity: the
//! generator `g_i` maps the arc `A_i^-` onto the complement of the closure of
//! `A_i^+`. The half-plane over each arc is the set of future timelike
//! vectors `u` with `B(u, v) > 0`, where `v` is the unit spacelike vector of
//! the arc. The common exterior `Delta` of these half-planes is a fundamental
//! domain, and ping-pong on the half-planes yields the estimates used later.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isometry::{IsometryError, LinearIsometry};
use crate::linalg::{Mat3, Vector3};
use crate::lorentz::{self, form, CirclePoint, Interval, LorentzError};
use crate::word::{Letter, Sign, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error("arcs overlap or touch")]
    OverlappingArcs,
    #[error("half-planes are not ultraparallel (|B| = {0})")]
    NotUltraparallel(f64),
    #[error("configuration needs at least one generator")]
    Empty,
    #[error("{arcs} arc pairs but {generators} generators")]
    CountMismatch { arcs: usize, generators: usize },
    #[error("generator index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
}

/// Open half-plane `{u : B(u, normal) > 0}` of the hyperbolic plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    normal: Vector3,
}

impl HalfPlane {
    pub fn new(normal: Vector3, tol: f64) -> Result<Self, LorentzError> {
        lorentz::require_unit_spacelike(&normal, tol)?;
        Ok(HalfPlane { normal })
    }

    pub fn from_interval(interval: &Interval) -> Self {
        HalfPlane {
            normal: lorentz::spacelike_from_interval(interval),
        }
    }

    pub fn normal(&self) -> Vector3 {
        self.normal
    }

    /// `B(u, normal) > tol |u|`.
    pub fn contains(&self, u: &Vector3, tol: f64) -> bool {
        form(u, &self.normal) > tol * u.norm()
    }
}

/// Transvection along the common perpendicular of the geodesics over two
/// disjoint arcs, mapping `minus` onto the complement of the closure of
/// `plus`.
pub fn build_generator(minus: &Interval, plus: &Interval, tol: f64) -> Result<LinearIsometry, SchottkyError> {
    if minus.gap(plus).is_none() {
        return Err(SchottkyError::OverlappingArcs);
    }
    let from = lorentz::spacelike_from_interval(minus);
    let to = -lorentz::spacelike_from_interval(plus);
    let cosh_d = form(&from, &to);
    if cosh_d <= 1.0 + tol {
        return Err(SchottkyError::NotUltraparallel(cosh_d.abs()));
    }
    let sinh_d = (cosh_d * cosh_d - 1.0).sqrt();
    let e = from;
    let f = (to - from * cosh_d) * (1.0 / sinh_d);
    let image = |x: Vector3| {
        let a = form(&x, &e);
        let b = -form(&x, &f);
        x + (e * (cosh_d - 1.0) + f * sinh_d) * a + (e * sinh_d + f * (cosh_d - 1.0)) * b
    };
    let cols = [image(Vector3::E1), image(Vector3::E2), image(Vector3::E3)];
    let mut m = Mat3::IDENTITY;
    for (j, c) in cols.iter().enumerate() {
        for i in 0..3 {
            m.0[i][j] = c.0[i];
        }
    }
    Ok(LinearIsometry::try_new(m, tol)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyConfig {
    /// `[A_i^-, A_i^+]` for each generator.
    arcs: Vec<[Interval; 2]>,
    generators: Vec<LinearIsometry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyReport {
    pub ok: bool,
    /// Smallest angular gap between closures of distinct arcs.
    pub min_gap: f64,
    /// `2 sin(min_gap / 2)`.
    pub eps0: f64,
    /// Largest chord error between paired arc endpoints.
    pub pairing_residual: f64,
    /// An arc shorter than a quarter turn, if any.
    pub small_arc: Option<Letter>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PingPongReport {
    pub checked: usize,
    pub failures: usize,
}

impl SchottkyConfig {
    pub fn new(arcs: Vec<[Interval; 2]>, generators: Vec<LinearIsometry>) -> Result<Self, SchottkyError> {
        if arcs.is_empty() {
            return Err(SchottkyError::Empty);
        }
        if arcs.len() != generators.len() {
            return Err(SchottkyError::CountMismatch {
                arcs: arcs.len(),
                generators: generators.len(),
            });
        }
        Ok(SchottkyConfig { arcs, generators })
    }

    /// Build each generator from its pair of arcs.
    pub fn from_arcs(arcs: Vec<[Interval; 2]>, tol: f64) -> Result<Self, SchottkyError> {
        let generators = arcs
            .iter()
            .map(|[minus, plus]| build_generator(minus, plus, tol))
            .collect::<Result<Vec<_>, _>>()?;
        SchottkyConfig::new(arcs, generators)
    }

    pub fn rank(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, letter: Letter) -> Interval {
        self.arcs[letter.generator][letter.sign.slot()]
    }

    pub fn half_plane(&self, letter: Letter) -> HalfPlane {
        HalfPlane::from_interval(&self.arc(letter))
    }

    pub fn generator(&self, letter: Letter) -> LinearIsometry {
        let g = self.generators[letter.generator];
        match letter.sign {
            Sign::Plus => g,
            Sign::Minus => g.inverse(),
        }
    }

    pub fn word_isometry(&self, word: &Word) -> LinearIsometry {
        word.letters()
            .iter()
            .fold(LinearIsometry::IDENTITY, |acc, &l| acc * self.generator(l))
    }

    pub fn letters(&self) -> Vec<Letter> {
        Letter::all(self.rank())
    }

    /// Smallest angular gap between the closures of any two arcs, or `None`
    /// when two closures meet.
    pub fn min_gap(&self) -> Option<f64> {
        let letters = self.letters();
        let mut best = f64::INFINITY;
        for (i, a) in letters.iter().enumerate() {
            for b in &letters[i + 1..] {
                best = best.min(self.arc(*a).gap(&self.arc(*b))?);
            }
        }
        Some(best)
    }

    pub fn eps0(&self) -> Option<f64> {
        self.min_gap().map(|g| 2.0 * (g / 2.0).sin())
    }

    /// Whether `u` lies in the common exterior of all half-planes.
    pub fn delta_contains(&self, u: &Vector3, tol: f64) -> bool {
        self.letters()
            .iter()
            .all(|&l| form(u, &self.half_plane(l).normal()) < -tol * u.norm())
    }

    pub fn verify(&self, tol: f64) -> SchottkyReport {
        let mut failures = Vec::new();
        let mut warnings = Vec::new();
        let min_gap = self.min_gap();
        if min_gap.is_none() {
            failures.push("arcs are not pairwise disjoint".to_string());
        }
        let mut residual = 0.0_f64;
        for (i, g) in self.generators.iter().enumerate() {
            let [minus, plus] = self.arcs[i];
            let start = g.circle_action(&CirclePoint::new(minus.start()));
            let end = g.circle_action(&CirclePoint::new(minus.end()));
            residual = residual
                .max(lorentz::chord_distance(&start, &CirclePoint::new(plus.end())))
                .max(lorentz::chord_distance(&end, &CirclePoint::new(plus.start())));
            match g.hyperbolic_data(tol) {
                Ok(d) => {
                    let exp = CirclePoint::from_direction(&d.expanding);
                    let con = CirclePoint::from_direction(&d.contracting);
                    if !plus.contains(&exp, 0.0) || !minus.contains(&con, 0.0) {
                        failures.push(format!("generator {} has fixed points outside its arcs", i + 1));
                    }
                }
                Err(e) => failures.push(format!("generator {}: {e}", i + 1)),
            }
        }
        if residual > tol {
            failures.push(format!("pairing residual {residual:e} exceeds tolerance"));
        }
        let small_arc = self
            .letters()
            .into_iter()
            .filter(|&l| self.arc(l).length() < FRAC_PI_2)
            .min_by(|a, b| self.arc(*a).length().total_cmp(&self.arc(*b).length()));
        if self.rank() < 2 {
            warnings.push("single generator: no arc is guaranteed shorter than a quarter turn".to_string());
        }
        let min_gap = min_gap.unwrap_or(0.0);
        SchottkyReport {
            ok: failures.is_empty(),
            min_gap,
            eps0: 2.0 * (min_gap / 2.0).sin(),
            pairing_residual: residual,
            small_arc,
            failures,
            warnings,
        }
    }

    /// Uniform samples of `Delta` in the projective disc, as future timelike
    /// vectors with third coordinate one.
    pub fn sample_delta<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, tol: f64) -> Vec<Vector3> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count && attempts < 1000 * count.max(1) {
            attempts += 1;
            let r = rng.random::<f64>().sqrt();
            let t = TAU * rng.random::<f64>();
            let u = Vector3::new(r * t.cos(), r * t.sin(), 1.0);
            if r < 1.0 && self.delta_contains(&u, tol) {
                out.push(u);
            }
        }
        out
    }

    /// Check that the word maps every sample into the half-plane of its
    /// leftmost letter.
    pub fn pingpong_check(&self, word: &Word, samples: &[Vector3], tol: f64) -> PingPongReport {
        let Some(first) = word.first() else {
            return PingPongReport::default();
        };
        let g = self.word_isometry(word);
        let target = self.half_plane(first);
        let failures = samples
            .iter()
            .filter(|u| !target.contains(&g.apply(u), tol))
            .count();
        PingPongReport {
            checked: samples.len(),
            failures,
        }
    }

    /// Pull a future timelike vector back towards `Delta`, returning the
    /// word `w` with `u` in `w(closure of Delta)` and the representative.
    pub fn descend(&self, u: &Vector3, max_steps: usize, tol: f64) -> Option<(Word, Vector3)> {
        let mut word = Word::empty();
        let mut current = *u;
        for _ in 0..max_steps {
            let scale = 1.0 / current.z();
            current = current * scale;
            match self
                .letters()
                .into_iter()
                .find(|&l| self.half_plane(l).contains(&current, tol))
            {
                None => return Some((word, current)),
                Some(l) => {
                    current = self.generator(l).inverse().apply(&current);
                    word.push(l);
                }
            }
        }
        None
    }
}

/// Lower bound on the hyperbolicity of a reduced word whose last letter does
/// not cancel its first, or `None` when no bound is available.
pub fn word_hyperbolicity_guarantee(word: &Word, eps0: f64) -> Option<f64> {
    let (first, last) = (word.first()?, word.last()?);
    (word.is_reduced() && (word.len() == 1 || last != first.inverse())).then_some(eps0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::DEFAULT_TOL;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI, SQRT_2};

    fn arc(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn generator_for_quarter_arcs() {
        let g = build_generator(&arc(3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4), &arc(-FRAC_PI_4, FRAC_PI_4), DEFAULT_TOL)
            .unwrap();
        let r = 2.0 * SQRT_2;
        let expected = Mat3([[3.0, 0.0, r], [0.0, 1.0, 0.0], [r, 0.0, 3.0]]);
        assert!(g.matrix().max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn generator_for_sixth_arcs() {
        let g = build_generator(&arc(5.0 * FRAC_PI_6, 7.0 * FRAC_PI_6), &arc(-FRAC_PI_6, FRAC_PI_6), DEFAULT_TOL)
            .unwrap();
        let r = 4.0 * 3f64.sqrt();
        let expected = Mat3([[7.0, 0.0, r], [0.0, 1.0, 0.0], [r, 0.0, 7.0]]);
        assert!(g.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn swapping_arcs_inverts() {
        let a = arc(5.0 * FRAC_PI_6, 7.0 * FRAC_PI_6);
        let b = arc(0.3, 1.2);
        let g = build_generator(&a, &b, DEFAULT_TOL).unwrap();
        let h = build_generator(&b, &a, DEFAULT_TOL).unwrap();
        assert!((g * h).matrix().max_abs_diff(&Mat3::IDENTITY) < 1e-12);
    }

    #[test]
    fn overlapping_arcs_rejected() {
        assert_eq!(
            build_generator(&arc(0.0, 1.0), &arc(0.5, 2.0), DEFAULT_TOL),
            Err(SchottkyError::OverlappingArcs)
        );
        assert_eq!(
            build_generator(&arc(0.0, 1.0), &arc(1.0, 2.0), DEFAULT_TOL),
            Err(SchottkyError::OverlappingArcs)
        );
    }

    #[test]
    fn half_plane_membership() {
        let h = HalfPlane::new(Vector3::E1, DEFAULT_TOL).unwrap();
        assert!(h.contains(&Vector3::new(0.5, 0.0, 1.0), DEFAULT_TOL));
        assert!(!h.contains(&Vector3::new(0.0, 0.0, 1.0), DEFAULT_TOL));
    }

    #[test]
    fn single_generator_is_flagged() {
        let cfg = SchottkyConfig::from_arcs(vec![[arc(5.0 * FRAC_PI_6, 7.0 * FRAC_PI_6), arc(-FRAC_PI_6, FRAC_PI_6)]], DEFAULT_TOL)
            .unwrap();
        let r = cfg.verify(DEFAULT_TOL);
        assert!(r.ok);
        assert_eq!(r.warnings.len(), 1);
        assert!((r.min_gap - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn guarantee_needs_non_cancelling_ends() {
        let w = Word::from_signed_labels(&[1, 2, -1]).unwrap();
        assert_eq!(word_hyperbolicity_guarantee(&w, 0.5), None);
        let w = Word::from_signed_labels(&[1, 2, 1]).unwrap();
        assert_eq!(word_hyperbolicity_guarantee(&w, 0.5), Some(0.5));
        assert_eq!(word_hyperbolicity_guarantee(&Word::empty(), 0.5), None);
    }
}
