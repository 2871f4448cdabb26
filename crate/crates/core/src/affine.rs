//! Affine Schottky groups with crooked fundamental domains.
//!
//! Each generator `h_i` pairs two crooked half-spaces: it maps `H_i^-` onto
//! the complement of the closure of `H_i^+`. When the `2m` closures are
//! pairwise disjoint, the region `X` outside all of them is a fundamental
//! domain and its translates tile space. [`AffineSchottky::locate`] finds the
//! tile of a point by repeatedly pulling it out of whichever half-space
//! contains it.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::halfspace::{self, CrookedHalfSpace, HalfSpaceError, Membership, Separation};
use crate::isometry::{AffineIsometry, IsometryError};
use crate::linalg::SpacePoint;
use crate::lorentz::{self, LorentzError};
use crate::precise::PreciseIsometry;
use crate::schottky::{SchottkyConfig, SchottkyError, SchottkyReport};
use crate::word::{self, Letter, Sign, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AffineError {
    #[error("configuration needs at least one generator")]
    Empty,
    #[error("{half_spaces} half-space pairs for {generators} generators")]
    CountMismatch { half_spaces: usize, generators: usize },
    #[error("no half-space has angle below a quarter turn")]
    NoSmallHalfSpace,
    #[error("a second generator is needed to move the point")]
    SingleGenerator,
    #[error("the point reaches the fundamental domain after {steps} steps")]
    Terminates { steps: usize },
    #[error("word is not reduced")]
    NotReduced,
    #[error(transparent)]
    HalfSpace(#[from] HalfSpaceError),
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineSchottky {
    generators: Vec<AffineIsometry>,
    inverses: Vec<AffineIsometry>,
    /// `[H_i^-, H_i^+]` for each generator.
    half_spaces: Vec<[CrookedHalfSpace; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Location {
    /// `q = word(representative)` with the representative inside `X`.
    Interior { word: Word, representative: SpacePoint },
    /// The representative lies on the face shared by the tiles of `word`
    /// and `neighbour`.
    Boundary {
        word: Word,
        neighbour: Word,
        representative: SpacePoint,
    },
    /// The step budget ran out; `point` is the last pulled-back point.
    NotLocated { word: Word, point: SpacePoint },
}

impl Location {
    pub fn word(&self) -> &Word {
        match self {
            Location::Interior { word, .. }
            | Location::Boundary { word, .. }
            | Location::NotLocated { word, .. } => word,
        }
    }

    pub fn representative(&self) -> SpacePoint {
        match self {
            Location::Interior { representative, .. } | Location::Boundary { representative, .. } => {
                *representative
            }
            Location::NotLocated { point, .. } => *point,
        }
    }

    pub fn is_located(&self) -> bool {
        !matches!(self, Location::NotLocated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSeparation {
    pub first: Letter,
    pub second: Letter,
    pub separation: Separation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// Largest `|L(h_i) u_i^- + u_i^+|`.
    pub direction_residual: f64,
    /// Largest `|h_i(p_i^-) - p_i^+|`.
    pub vertex_residual: f64,
    /// Every pair of half-space closures.
    pub separations: Vec<PairSeparation>,
    /// Closest pair of half-space closures.
    pub min_separation: Option<PairSeparation>,
    pub delta0: Option<PairSeparation>,
    pub linear: SchottkyReport,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedTerm {
    pub letter: Letter,
    /// Product of the letters before this one.
    pub prefix: Word,
    /// `prefix(H_letter)`.
    pub half_space: CrookedHalfSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedSequence {
    /// Word applied to the query point so that the first half-space has
    /// angle below a quarter turn.
    pub adjustment: Word,
    pub start: SpacePoint,
    pub terms: Vec<NestedTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub word: Word,
    /// `word = conjugator * core * conjugator^-1` with `core` cyclically
    /// reduced.
    pub conjugator: Word,
    pub core: Word,
    pub guarantee: f64,
    pub actual: f64,
    pub holds: bool,
}

impl AffineSchottky {
    pub fn new(generators: Vec<AffineIsometry>, half_spaces: Vec<[CrookedHalfSpace; 2]>) -> Result<Self, AffineError> {
        if generators.is_empty() {
            return Err(AffineError::Empty);
        }
        if generators.len() != half_spaces.len() {
            return Err(AffineError::CountMismatch {
                half_spaces: half_spaces.len(),
                generators: generators.len(),
            });
        }
        let inverses = generators.iter().map(|g| g.inverse()).collect();
        Ok(AffineSchottky {
            generators,
            inverses,
            half_spaces,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letters(&self) -> Vec<Letter> {
        Letter::all(self.rank())
    }

    pub fn half_space(&self, letter: Letter) -> &CrookedHalfSpace {
        &self.half_spaces[letter.generator][letter.sign.slot()]
    }

    pub fn generator(&self, letter: Letter) -> &AffineIsometry {
        match letter.sign {
            Sign::Plus => &self.generators[letter.generator],
            Sign::Minus => &self.inverses[letter.generator],
        }
    }

    pub fn word_isometry(&self, word: &Word) -> AffineIsometry {
        word.letters()
            .iter()
            .fold(AffineIsometry::IDENTITY, |acc, &l| acc * *self.generator(l))
    }

    /// Linear part of a word at double-double precision.
    pub fn word_linear_precise(&self, word: &Word) -> PreciseIsometry {
        let factors: Vec<PreciseIsometry> = (0..self.rank())
            .map(|i| PreciseIsometry::refine(self.generators[i].linear()))
            .collect();
        word.letters()
            .iter()
            .fold(PreciseIsometry::identity(), |acc, l| match l.sign {
                Sign::Plus => acc * factors[l.generator],
                Sign::Minus => acc * factors[l.generator].inverse(),
            })
    }

    /// The linear Schottky group of the half-space directions and linear
    /// parts.
    pub fn linear_config(&self) -> Result<SchottkyConfig, AffineError> {
        let arcs = self
            .half_spaces
            .iter()
            .map(|[minus, plus]| [minus.interval(), plus.interval()])
            .collect();
        let linear = self.generators.iter().map(|g| *g.linear()).collect();
        Ok(SchottkyConfig::new(arcs, linear)?)
    }

    /// Smallest letter whose half-space has angle below a quarter turn.
    pub fn small_letter(&self) -> Option<Letter> {
        self.letters()
            .into_iter()
            .filter(|&l| self.half_space(l).angle() < FRAC_PI_2)
            .min_by(|a, b| self.half_space(*a).angle().total_cmp(&self.half_space(*b).angle()))
    }

    pub fn validate(&self, tol: f64) -> Result<ValidationReport, AffineError> {
        let mut failures = Vec::new();
        let mut direction_residual = 0.0_f64;
        let mut vertex_residual = 0.0_f64;
        for (i, g) in self.generators.iter().enumerate() {
            let [minus, plus] = &self.half_spaces[i];
            direction_residual = direction_residual
                .max((g.apply_vector(&minus.direction()) + plus.direction()).max_abs());
            vertex_residual = vertex_residual.max(g.apply(&minus.vertex()).distance(&plus.vertex()));
        }
        if direction_residual > tol {
            failures.push(format!("direction pairing residual {direction_residual:e}"));
        }
        if vertex_residual > tol {
            failures.push(format!("vertex pairing residual {vertex_residual:e}"));
        }
        let linear = self.linear_config()?.verify(tol);
        failures.extend(linear.failures.iter().map(|f| format!("linear part: {f}")));

        let letters = self.letters();
        let mut separations = Vec::new();
        for (i, &a) in letters.iter().enumerate() {
            for &b in &letters[i + 1..] {
                separations.push(PairSeparation {
                    first: a,
                    second: b,
                    separation: halfspace::separation(self.half_space(a), self.half_space(b), None)?,
                });
            }
        }
        let min_separation = separations
            .iter()
            .min_by(|x, y| x.separation.distance.total_cmp(&y.separation.distance))
            .cloned();
        if let Some(m) = &min_separation {
            if m.separation.distance <= tol {
                failures.push(format!(
                    "half-spaces {} and {} are not disjoint",
                    m.first.signed_label(),
                    m.second.signed_label()
                ));
            }
        }
        let delta0 = if failures.is_empty() {
            let d = self.delta0(tol)?;
            if d.separation.distance <= tol {
                failures.push("uniform width delta0 is not positive".to_string());
            }
            Some(d)
        } else {
            None
        };
        Ok(ValidationReport {
            ok: failures.is_empty(),
            direction_residual,
            vertex_residual,
            separations,
            min_separation,
            delta0,
            linear,
            failures,
        })
    }

    /// Smallest distance between a face `C_a` and an inner face
    /// `h_a(C_b)`, over letters `b` other than the inverse of `a`.
    pub fn delta0(&self, tol: f64) -> Result<PairSeparation, AffineError> {
        let mut best: Option<PairSeparation> = None;
        for a in self.letters() {
            let outside = self.half_space(a).opposite();
            for b in self.letters() {
                if b == a.inverse() {
                    continue;
                }
                let inner = self.half_space(b).transform(self.generator(a), tol)?;
                let s = halfspace::separation(&outside, &inner, None)?;
                if best.as_ref().is_none_or(|m| s.distance < m.separation.distance) {
                    best = Some(PairSeparation {
                        first: a,
                        second: b,
                        separation: s,
                    });
                }
            }
        }
        Ok(best.expect("at least one letter pair"))
    }

    /// Letter whose open half-space contains `q`.
    pub fn containing_letter(&self, q: &SpacePoint, tol: f64) -> Option<Letter> {
        self.letters()
            .into_iter()
            .find(|&l| self.half_space(l).membership(q, tol) == Membership::InHalfSpace)
    }

    /// Whether `q` lies in the closed fundamental domain.
    pub fn domain_contains(&self, q: &SpacePoint, tol: f64) -> bool {
        self.containing_letter(q, tol).is_none()
    }

    pub fn locate(&self, q: &SpacePoint, max_steps: usize, tol: f64) -> Location {
        let mut word = Word::empty();
        let mut point = *q;
        for _ in 0..=max_steps {
            match self.containing_letter(&point, tol) {
                None => {
                    let on_face = self.letters().into_iter().find(|&l| {
                        self.half_space(l).membership(&point, tol) == Membership::OnCrookedPlane
                    });
                    return match on_face {
                        Some(l) => Location::Boundary {
                            neighbour: word.with(l),
                            word,
                            representative: point,
                        },
                        None => Location::Interior {
                            word,
                            representative: point,
                        },
                    };
                }
                Some(l) => {
                    if word.len() == max_steps {
                        break;
                    }
                    point = self.generator(l.inverse()).apply(&point);
                    word.push(l);
                }
            }
        }
        Location::NotLocated { word, point }
    }

    /// Faces of the tile `word(X)`, one per letter.
    pub fn tile_faces(&self, word: &Word, tol: f64) -> Result<Vec<(Letter, CrookedHalfSpace)>, AffineError> {
        let g = self.word_isometry(word);
        self.letters()
            .into_iter()
            .map(|l| Ok((l, self.half_space(l).transform(&g, tol)?)))
            .collect()
    }

    /// Build `len` terms of the nested sequence of half-spaces containing
    /// the point, after moving it into a half-space with small angle.
    /// Fails if the descent reaches the fundamental domain first.
    pub fn nested_sequence(&self, q: &SpacePoint, len: usize, tol: f64) -> Result<NestedSequence, AffineError> {
        let small = self.small_letter().ok_or(AffineError::NoSmallHalfSpace)?;
        let first = self
            .containing_letter(q, tol)
            .ok_or(AffineError::Terminates { steps: 0 })?;
        let adjustment = if first == small {
            Word::empty()
        } else if first != small.inverse() {
            Word::new(vec![small])
        } else {
            let other = self
                .letters()
                .into_iter()
                .find(|&l| l.generator != small.generator)
                .ok_or(AffineError::SingleGenerator)?;
            Word::new(vec![small, other])
        };
        let start = self.word_isometry(&adjustment).apply(q);
        let mut terms = Vec::with_capacity(len);
        let mut prefix = Word::empty();
        let mut prefix_map = AffineIsometry::IDENTITY;
        let mut point = start;
        for k in 0..len {
            let letter = self
                .containing_letter(&point, tol)
                .ok_or(AffineError::Terminates { steps: k })?;
            terms.push(NestedTerm {
                letter,
                prefix: prefix.clone(),
                half_space: self.half_space(letter).transform(&prefix_map, tol)?,
            });
            point = self.generator(letter.inverse()).apply(&point);
            prefix.push(letter);
            prefix_map = prefix_map * *self.generator(letter);
        }
        Ok(NestedSequence {
            adjustment,
            start,
            terms,
        })
    }

    /// Compare the guaranteed lower bound on the hyperbolicity of a word with
    /// the value computed from its eigenvectors.
    pub fn hyperbolicity_audit(&self, word: &Word, eps0: f64, tol: f64) -> Result<AuditEntry, AffineError> {
        if !word.is_reduced() || word.is_empty() {
            return Err(AffineError::NotReduced);
        }
        let (conjugator, core) = word.cyclic_reduction();
        let guarantee = if conjugator.is_empty() {
            eps0
        } else {
            eps0 / self.word_linear_precise(&conjugator).to_f64().distortion_bound()
        };
        let actual = self
            .word_linear_precise(word)
            .hyperbolicity(tol)
            .ok_or(IsometryError::NotHyperbolic(crate::isometry::Classification::Elliptic))?;
        Ok(AuditEntry {
            word: word.clone(),
            conjugator,
            core,
            guarantee,
            actual,
            holds: actual >= guarantee - tol,
        })
    }
}

/// Number of tiles `word(X)` with word length at most `depth`.
pub fn tile_count(m: usize, depth: usize) -> usize {
    word::reduced_word_count(m, depth)
}

/// Unit direction of the half-space over an arc, for building
/// configurations from arcs.
pub fn direction_for_arc(arc: &lorentz::Interval) -> crate::linalg::Vector3 {
    lorentz::spacelike_from_interval(arc)
}
