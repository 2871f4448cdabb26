//! The operations behind the `crooked` binary.
//!
//! Each command returns an [`Outcome`] holding its exit code and the text
//! for both streams, so the binary only has to print and exit.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::affine::{AffineSchottky, Location, PairSeparation};
use crate::config::{ConfigError, ConfigFile};
use crate::linalg::SpacePoint;
use crate::sampling;
use crate::svg::{ScenePolyline, SvgScene};
use crate::verify;
use crate::word::{reduced_words, Sign, Word};
use crate::zigzag::{self, DefinitePlane};

pub const EXIT_OK: i32 = 0;
/// Unreadable or malformed input, or bad usage.
pub const EXIT_INPUT: i32 = 1;
/// The input is well formed but a mathematical condition fails.
pub const EXIT_MATH: i32 = 2;
pub const EXIT_NOT_LOCATED: i32 = 3;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const TOL_ENV: &str = "CROOKED_TOL";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Tolerance from the flag, else the environment, else [`DEFAULT_TOL`].
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>) -> Result<f64, String> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s.trim().parse::<f64>().map_err(|_| format!("{TOL_ENV}={s:?} is not a number"))?,
        (None, None) => DEFAULT_TOL,
    };
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(format!("tolerance must be positive and finite, got {tol}"))
    }
}

/// Letters written `1+`, `2-`, ..., inside brackets.
pub fn display_word(w: &Word) -> String {
    let parts: Vec<String> = w
        .letters()
        .iter()
        .map(|l| format!("{}{}", l.generator + 1, if l.sign == Sign::Plus { '+' } else { '-' }))
        .collect();
    format!("[{}]", parts.join(","))
}

fn load(path: &Path, tol: f64) -> Result<AffineSchottky, Outcome> {
    let config = ConfigFile::load(path).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {e}\n")))?;
    config.build(tol).map_err(|e| {
        let code = if e.is_mathematical() { EXIT_MATH } else { EXIT_INPUT };
        Outcome::fail(code, format!("error: {e}\n"))
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Outcome> {
    fs::write(path, contents).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: cannot write {}: {e}\n", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn pair_json(p: &PairSeparation) -> Value {
    json!({
        "first": p.first.signed_label(),
        "second": p.second.signed_label(),
        "distance": p.separation.distance,
        "asymptotic": p.separation.asymptotic,
    })
}

fn failure_outcome(e: ConfigError) -> Outcome {
    Outcome::fail(if e.is_mathematical() { EXIT_MATH } else { EXIT_INPUT }, format!("error: {e}\n"))
}

pub fn validate(path: &Path, tol: f64) -> Outcome {
    let group = match load(path, tol) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let report = match group.validate(tol) {
        Ok(r) => r,
        Err(e) => return failure_outcome(e.into()),
    };
    let value = json!({
        "ok": report.ok,
        "tol": tol,
        "m": group.rank(),
        "direction_residual": report.direction_residual,
        "vertex_residual": report.vertex_residual,
        "theta0": report.linear.min_gap,
        "eps0": report.linear.eps0,
        "delta0": report.delta0.as_ref().map(pair_json),
        "min_separation": report.min_separation.as_ref().map(pair_json),
        "separations": report.separations.iter().map(pair_json).collect::<Vec<_>>(),
        "small_letter": group.small_letter().map(|l| l.signed_label()),
        "failures": report.failures,
        "warnings": report.linear.warnings,
    });
    let mut out = Outcome::ok(pretty(&value));
    if !report.ok {
        out.code = EXIT_MATH;
        for f in &report.failures {
            out.stderr.push_str(&format!("validation failed: {f}\n"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TileOptions {
    pub plane: f64,
    pub depth: usize,
    pub viewport: [f64; 4],
    pub width: f64,
    pub out: Option<PathBuf>,
}

impl Default for TileOptions {
    fn default() -> Self {
        TileOptions {
            plane: 0.0,
            depth: 2,
            viewport: [-20.0, 20.0, -20.0, 20.0],
            width: 800.0,
            out: None,
        }
    }
}

/// Slice every face of every tile of word length at most `depth` by a
/// horizontal plane and draw the zigzags.
pub fn tile(path: &Path, opts: &TileOptions, tol: f64) -> Outcome {
    let [xmin, xmax, ymin, ymax] = opts.viewport;
    if !(opts.viewport.iter().all(|v| v.is_finite()) && xmin < xmax && ymin < ymax) {
        return Outcome::fail(EXIT_INPUT, format!("error: empty viewport {:?}\n", opts.viewport));
    }
    if !(opts.plane.is_finite() && opts.width.is_finite() && opts.width > 0.0) {
        return Outcome::fail(EXIT_INPUT, "error: plane height and width must be finite\n");
    }
    let group = match load(path, tol) {
        Ok(g) => g,
        Err(o) => return o,
    };
    match group.validate(tol) {
        Ok(r) if r.ok => {}
        Ok(r) => return Outcome::fail(EXIT_MATH, format!("error: configuration is invalid: {}\n", r.failures.join("; "))),
        Err(e) => return failure_outcome(e.into()),
    }

    let words = reduced_words(group.rank(), opts.depth);
    let mut faces = Vec::with_capacity(words.len());
    for w in &words {
        match group.tile_faces(w, tol) {
            Ok(f) => faces.push((w, f)),
            Err(e) => return failure_outcome(e.into()),
        }
    }
    let vertices: Vec<SpacePoint> = faces.iter().flat_map(|(_, f)| f.iter().map(|(_, h)| h.vertex())).collect();
    let clearance = 1e-6 * (1.0 + opts.plane.abs());
    let (height, moved) = zigzag::clear_height(opts.plane, &vertices, clearance);
    let mut stderr = String::new();
    if moved {
        stderr.push_str(&format!(
            "warning: plane x3 = {} passes through a crooked-plane vertex; using x3 = {height}\n",
            opts.plane
        ));
    }
    let plane = DefinitePlane::horizontal(height);

    let mut scene = SvgScene::new(opts.viewport, opts.width);
    for (w, tile_faces) in &faces {
        for (letter, h) in tile_faces {
            match zigzag::slice(h, &plane, tol) {
                Ok(region) => scene.polylines.push(ScenePolyline {
                    word_length: w.len(),
                    word: w.to_string(),
                    face: letter.signed_label(),
                    points: region.zigzag.polyline(opts.viewport).to_vec(),
                }),
                Err(e) => stderr.push_str(&format!("warning: face {} of tile {w} skipped: {e}\n", letter.signed_label())),
            }
        }
    }
    let svg = scene.render();
    let drawn = svg.matches("<polyline").count();
    let summary = json!({
        "tiles": words.len(),
        "zigzags": scene.polylines.len(),
        "drawn": drawn,
        "height": height,
        "depth": opts.depth,
    });
    match &opts.out {
        Some(p) => {
            if let Err(o) = write_file(p, &svg) {
                return o;
            }
            Outcome { code: EXIT_OK, stdout: pretty(&summary), stderr }
        }
        None => Outcome { code: EXIT_OK, stdout: svg, stderr },
    }
}

fn location_json(loc: &Location) -> Value {
    let (status, neighbour) = match loc {
        Location::Interior { .. } => ("interior", None),
        Location::Boundary { neighbour, .. } => ("boundary", Some(neighbour)),
        Location::NotLocated { .. } => ("not_located", None),
    };
    json!({
        "status": status,
        "word": loc.word().signed_labels(),
        "display": display_word(loc.word()),
        "final_point": loc.representative().0,
        "neighbour": neighbour.map(|n| n.signed_labels()),
    })
}

/// Where the descent stalled, as nested half-spaces around the point.
fn nested_diagnostics(group: &AffineSchottky, q: &SpacePoint, steps: usize, tol: f64) -> String {
    let mut out = format!("error: point {:?} not located after {steps} steps\n", q.0);
    match group.nested_sequence(q, steps.clamp(1, 8), tol) {
        Ok(seq) => {
            out.push_str(&format!("adjustment {}\n", display_word(&seq.adjustment)));
            for (k, t) in seq.terms.iter().enumerate() {
                out.push_str(&format!(
                    "k={k} letter={} prefix={} vertex={:?} angle={}\n",
                    t.letter.signed_label(),
                    display_word(&t.prefix),
                    t.half_space.vertex().0,
                    t.half_space.angle()
                ));
            }
        }
        Err(e) => out.push_str(&format!("no nested sequence: {e}\n")),
    }
    out
}

pub fn locate(path: &Path, point: [f64; 3], max_steps: usize, tol: f64) -> Outcome {
    if !point.iter().all(|c| c.is_finite()) {
        return Outcome::fail(EXIT_INPUT, "error: point coordinates must be finite\n");
    }
    let group = match load(path, tol) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let q = SpacePoint(point);
    let loc = group.locate(&q, max_steps, tol);
    let mut out = Outcome::ok(pretty(&location_json(&loc)));
    if !loc.is_located() {
        out.code = EXIT_NOT_LOCATED;
        out.stderr = nested_diagnostics(&group, &q, max_steps, tol);
    }
    out
}

/// Locate `count` seeded random points of `[-20, 20]^3` and summarise.
pub fn locate_batch(path: &Path, count: usize, seed: u64, max_steps: usize, tol: f64) -> Outcome {
    let group = match load(path, tol) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut located, mut boundary, mut longest, mut total, mut worst) = (0usize, 0usize, 0usize, 0usize, 0.0_f64);
    let mut stderr = String::new();
    for _ in 0..count {
        let q = sampling::point_in_box(&mut rng, 20.0);
        let loc = group.locate(&q, max_steps, tol);
        if loc.is_located() {
            located += 1;
            boundary += usize::from(matches!(loc, Location::Boundary { .. }));
            longest = longest.max(loc.word().len());
            total += loc.word().len();
            worst = worst.max(group.word_isometry(loc.word()).apply(&loc.representative()).distance(&q));
        } else if stderr.is_empty() {
            stderr = nested_diagnostics(&group, &q, max_steps, tol);
        }
    }
    let summary = json!({
        "rng": verify::RNG_NAME,
        "seed": seed,
        "points": count,
        "located": located,
        "boundary": boundary,
        "max_word_length": longest,
        "mean_word_length": if located > 0 { total as f64 / located as f64 } else { 0.0 },
        "max_round_trip_error": worst,
    });
    Outcome {
        code: if located == count { EXIT_OK } else { EXIT_NOT_LOCATED },
        stdout: pretty(&summary),
        stderr,
    }
}

pub fn verify(path: &Path, samples: usize, seed: u64, tol: f64, csv: Option<&Path>) -> Outcome {
    let group = match load(path, tol) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let report = verify::run(&group, samples, seed, tol);
    if let Some(p) = csv {
        if let Err(o) = write_file(p, &report.separation_csv()) {
            return o;
        }
    }
    let mut stdout = serde_json::to_string_pretty(&report).expect("report serializes");
    stdout.push('\n');
    let mut stderr = String::new();
    for c in report.checks.iter().filter(|c| !c.passed) {
        let kind = match c.failure {
            Some(verify::FailureKind::Tolerance) => "tolerance",
            _ => "mathematics",
        };
        stderr.push_str(&format!(
            "check {} failed ({kind}): {} of {} violations; counterexample: {}\n",
            c.name,
            c.violations,
            c.checked,
            c.counterexample.as_deref().unwrap_or("none")
        ));
    }
    Outcome {
        code: if report.ok { EXIT_OK } else { EXIT_MATH },
        stdout,
        stderr,
    }
}
