//! JSON configuration files for affine Schottky groups.
//!
//! Generator and half-space indices are one-based and signs are `+1`/`-1`.
//! A file either spells out every linear part, translation and direction,
//! or gives arcs under `"intervals"` and lets the missing pieces be derived:
//! directions from the arcs, linear parts from [`build_generator`], and
//! translations from the paired vertices.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineError, AffineSchottky};
use crate::halfspace::CrookedHalfSpace;
use crate::isometry::{AffineIsometry, LinearIsometry};
use crate::linalg::{Mat3, SpacePoint, Vector3};
use crate::lorentz::Interval;
use crate::schottky::build_generator;
use crate::word::{Letter, Sign};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Schema(String),
    /// The file is well formed but describes an impossible object, e.g. a
    /// matrix that is not an isometry.
    #[error("{0}")]
    Math(String),
}

impl ConfigError {
    /// Whether the failure is mathematical rather than a reading or
    /// formatting problem.
    pub fn is_mathematical(&self) -> bool {
        matches!(self, ConfigError::Math(_))
    }
}

impl From<AffineError> for ConfigError {
    fn from(e: AffineError) -> Self {
        ConfigError::Math(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorEntry>,
    pub half_spaces: Vec<HalfSpaceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<IntervalEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    /// Row-major linear part.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceEntry {
    pub i: usize,
    pub sign: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    pub vertex: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalEntry {
    pub i: usize,
    pub sign: i64,
    pub phi1: f64,
    pub phi2: f64,
}

fn letter_of(i: usize, sign: i64, m: usize, what: &str) -> Result<Letter, ConfigError> {
    if i == 0 || i > m {
        return Err(ConfigError::Schema(format!("{what} index {i} outside 1..={m}")));
    }
    let sign = Sign::from_int(sign).ok_or_else(|| ConfigError::Schema(format!("{what} sign {sign} is not +1 or -1")))?;
    Ok(Letter::new(i - 1, sign))
}

/// Place each entry in its `(generator, sign)` slot, rejecting duplicates.
fn slots<T: Clone>(
    m: usize,
    entries: impl Iterator<Item = (usize, i64, T)>,
    what: &str,
) -> Result<Vec<[Option<T>; 2]>, ConfigError> {
    let mut out: Vec<[Option<T>; 2]> = vec![[None, None]; m];
    for (i, sign, value) in entries {
        let l = letter_of(i, sign, m, what)?;
        let slot = &mut out[l.generator][l.sign.slot()];
        if slot.is_some() {
            return Err(ConfigError::Schema(format!("duplicate {what} entry for i = {i}, sign = {sign}")));
        }
        *slot = Some(value);
    }
    Ok(out)
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Explicit description of a built configuration.
    pub fn from_affine(group: &AffineSchottky) -> Self {
        let m = group.rank();
        let generators = (0..m)
            .map(|i| {
                let h = group.generator(Letter::new(i, Sign::Plus));
                GeneratorEntry {
                    linear: Some(h.linear().matrix().0),
                    translation: Some(h.translation().0),
                }
            })
            .collect();
        let half_spaces = group
            .letters()
            .into_iter()
            .map(|l| {
                let h = group.half_space(l);
                HalfSpaceEntry {
                    i: l.generator + 1,
                    sign: l.sign.as_int(),
                    direction: Some(h.direction().0),
                    vertex: h.vertex().0,
                }
            })
            .collect();
        ConfigFile {
            m,
            generators,
            half_spaces,
            intervals: Vec::new(),
        }
    }

    pub fn build(&self, tol: f64) -> Result<AffineSchottky, ConfigError> {
        let m = self.m;
        if m == 0 {
            return Err(ConfigError::Schema("m must be at least 1".into()));
        }
        if !self.generators.is_empty() && self.generators.len() != m {
            return Err(ConfigError::Schema(format!(
                "{} generators listed for m = {m}",
                self.generators.len()
            )));
        }
        let intervals = slots(
            m,
            self.intervals.iter().map(|e| (e.i, e.sign, (e.phi1, e.phi2))),
            "interval",
        )?;
        let intervals: Vec<[Option<Interval>; 2]> = intervals
            .into_iter()
            .map(|pair| {
                let conv = |p: Option<(f64, f64)>| {
                    p.map(|(a, b)| Interval::new(a, b).map_err(|e| ConfigError::Schema(format!("interval ({a}, {b}): {e}"))))
                        .transpose()
                };
                Ok([conv(pair[0])?, conv(pair[1])?])
            })
            .collect::<Result<_, ConfigError>>()?;
        let entries = slots(
            m,
            self.half_spaces.iter().map(|e| (e.i, e.sign, (e.direction, e.vertex))),
            "half-space",
        )?;

        let mut half_spaces = Vec::with_capacity(m);
        for (i, pair) in entries.iter().enumerate() {
            let mut built = Vec::with_capacity(2);
            for sign in [Sign::Minus, Sign::Plus] {
                let label = Letter::new(i, sign).signed_label();
                let (direction, vertex) = pair[sign.slot()]
                    .ok_or_else(|| ConfigError::Schema(format!("missing half-space {label}")))?;
                let vertex = SpacePoint(vertex);
                let h = match (direction, intervals[i][sign.slot()]) {
                    (Some(d), _) => CrookedHalfSpace::new(Vector3(d), vertex, tol),
                    (None, Some(arc)) => CrookedHalfSpace::from_interval(&arc, vertex, tol),
                    (None, None) => {
                        return Err(ConfigError::Schema(format!(
                            "half-space {label} has neither a direction nor an interval"
                        )))
                    }
                }
                .map_err(|e| ConfigError::Math(format!("half-space {label}: {e}")))?;
                built.push(h);
            }
            half_spaces.push([built[0], built[1]]);
        }

        let mut generators = Vec::with_capacity(m);
        for (i, [minus, plus]) in half_spaces.iter().enumerate() {
            let entry = self.generators.get(i);
            let linear = match entry.and_then(|e| e.linear) {
                Some(rows) => LinearIsometry::try_new(Mat3(rows), tol)
                    .map_err(|e| ConfigError::Math(format!("generator {}: {e}", i + 1)))?,
                None => match intervals[i] {
                    [Some(a), Some(b)] => build_generator(&a, &b, tol)
                        .map_err(|e| ConfigError::Math(format!("generator {}: {e}", i + 1)))?,
                    _ => {
                        return Err(ConfigError::Schema(format!(
                            "generator {} has no linear part and no interval pair",
                            i + 1
                        )))
                    }
                },
            };
            let translation = match entry.and_then(|e| e.translation) {
                Some(t) => Vector3(t),
                None => plus.vertex() - SpacePoint::from_vector(linear.apply(&minus.vertex().to_vector())),
            };
            generators.push(AffineIsometry::new(linear, translation));
        }
        Ok(AffineSchottky::new(generators, half_spaces)?)
    }
}

/// The two-generator example: arcs of a third of a quarter turn on each
/// axis, translations of length `tau` along the coordinate axes.
pub fn example_config(tau: f64) -> ConfigFile {
    use std::f64::consts::PI;
    let arcs = [
        (1, -1, 5.0 * PI / 6.0, 7.0 * PI / 6.0),
        (1, 1, -PI / 6.0, PI / 6.0),
        (2, -1, 4.0 * PI / 3.0, 5.0 * PI / 3.0),
        (2, 1, PI / 3.0, 2.0 * PI / 3.0),
    ];
    let vertices = [
        [0.0, -tau / 2.0, 0.0],
        [0.0, tau / 2.0, 0.0],
        [tau / 2.0, 0.0, 0.0],
        [-tau / 2.0, 0.0, 0.0],
    ];
    ConfigFile {
        m: 2,
        generators: vec![
            GeneratorEntry {
                linear: None,
                translation: Some([0.0, tau, 0.0]),
            },
            GeneratorEntry {
                linear: None,
                translation: Some([-tau, 0.0, 0.0]),
            },
        ],
        half_spaces: arcs
            .iter()
            .zip(vertices)
            .map(|(&(i, sign, _, _), vertex)| HalfSpaceEntry {
                i,
                sign,
                direction: None,
                vertex,
            })
            .collect(),
        intervals: arcs
            .iter()
            .map(|&(i, sign, phi1, phi2)| IntervalEntry { i, sign, phi1, phi2 })
            .collect(),
    }
}
