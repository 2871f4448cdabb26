//! The property suite behind `crooked verify`.
//!
//! Every check draws its inputs from its own ChaCha8 stream, so a report is
//! reproducible from the seed and the sample budget alone. A check that
//! fails at the requested tolerance is run again at [`LOOSE_TOL`]; if it
//! passes there the failure is put down to tolerance, otherwise to the
//! mathematics.

use std::f64::consts::{PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::AffineSchottky;
use crate::halfspace::{self, CrookedHalfSpace, Membership};
use crate::isometry::{compression_check, AffineIsometry};
use crate::linalg::SpacePoint;
use crate::lorentz::{self, chord_from_angles, CirclePoint};
use crate::sampling;
use crate::word::{reduced_words, Letter, Sign, Word};
use crate::zigzag::{self, DefinitePlane, SeparationRow};

pub const RNG_NAME: &str = "ChaCha8";
pub const LOOSE_TOL: f64 = 1e-6;

/// Round-trip error allowed when re-applying a located word.
pub const ROUND_TRIP_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Tolerance,
    Mathematics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    /// Largest value of the check's error measure; absent when nothing was
    /// checked or the check has no measure.
    pub worst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rng: String,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub ok: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip)]
    pub separation_rows: Vec<SeparationRow>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Separation rows of every checked nested sequence, in order.
    pub fn separation_csv(&self) -> String {
        let mut out = String::from("k,rho_Lk_Lk1,bound,pass\n");
        for r in &self.separation_rows {
            out.push_str(&format!("{},{:.17e},{:.17e},{}\n", r.k, r.rho, r.bound, r.pass));
        }
        out
    }
}

struct Tally {
    checked: usize,
    violations: usize,
    worst: f64,
    counterexample: Option<String>,
    rows: Vec<SeparationRow>,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            checked: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
            counterexample: None,
            rows: Vec::new(),
        }
    }
}

impl Tally {
    fn record(&mut self, ok: bool, measure: f64, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if measure.is_nan() || measure > self.worst {
            self.worst = measure;
        }
        if !ok {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }
}

struct Suite<'a> {
    group: &'a AffineSchottky,
    samples: usize,
}

type Check = fn(&Suite, &mut ChaCha8Rng, f64) -> Tally;

const CHECKS: &[(&str, Check)] = &[
    ("pairing", check_pairing),
    ("disjointness", check_disjointness),
    ("linear_schottky", check_linear_schottky),
    ("hyperbolicity_formula", check_hyperbolicity_formula),
    ("compression", check_compression),
    ("distortion", check_distortion),
    ("ping_pong", check_ping_pong),
    ("trichotomy", check_trichotomy),
    ("equivariance", check_equivariance),
    ("eps0_criterion", check_eps0),
    ("conjugate_family", check_conjugate_family),
    ("hyperbolicity_audit", check_audit),
    ("locate", check_locate),
    ("delta0_neighbourhood", check_delta0_neighbourhood),
    ("separation_chain", check_separation_chain),
    ("zigzag_angles", check_zigzag_angles),
    ("zigzag_regions", check_zigzag_regions),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn run(group: &AffineSchottky, samples: usize, seed: u64, tol: f64) -> VerifyReport {
    let suite = Suite { group, samples };
    let mut checks = Vec::new();
    let mut separation_rows = Vec::new();
    for (index, (name, check)) in CHECKS.iter().enumerate() {
        let tally = check(&suite, &mut stream(seed, index), tol);
        let passed = tally.violations == 0;
        let failure = (!passed).then(|| {
            if tol < LOOSE_TOL && check(&suite, &mut stream(seed, index), LOOSE_TOL).violations == 0 {
                FailureKind::Tolerance
            } else {
                FailureKind::Mathematics
            }
        });
        separation_rows.extend(tally.rows);
        checks.push(CheckResult {
            name: name.to_string(),
            passed,
            checked: tally.checked,
            violations: tally.violations,
            worst: (tally.worst > f64::NEG_INFINITY).then_some(tally.worst),
            failure,
            counterexample: tally.counterexample,
        });
    }
    VerifyReport {
        rng: RNG_NAME.to_string(),
        seed,
        samples,
        tol,
        ok: checks.iter().all(|c| c.passed),
        checks,
        separation_rows,
    }
}

/// Points strictly inside the fundamental domain, by rejection from a box.
pub fn sample_domain(group: &AffineSchottky, rng: &mut ChaCha8Rng, count: usize, tol: f64) -> Vec<SpacePoint> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let x = sampling::point_in_box(rng, 4.0);
        if group
            .letters()
            .into_iter()
            .all(|l| group.half_space(l).membership(&x, tol) == Membership::InOpposite)
        {
            out.push(x);
        }
    }
    out
}

/// Reduced word of the given length starting with `first`.
pub fn random_word(rng: &mut ChaCha8Rng, m: usize, first: Letter, len: usize) -> Word {
    let letters = Letter::all(m);
    let mut w = Word::new(vec![first]);
    while w.len() < len {
        let last = w.last().expect("non-empty");
        let choices: Vec<Letter> = letters.iter().copied().filter(|&l| l != last.inverse()).collect();
        w.push(choices[rng.random_range(0..choices.len())]);
    }
    w
}

fn random_half_space(rng: &mut ChaCha8Rng, tol: f64) -> CrookedHalfSpace {
    let u = sampling::unit_spacelike(rng, 0.05);
    CrookedHalfSpace::new(u, sampling::point_in_box(rng, 2.0), tol.max(1e-12)).expect("sampled direction is unit spacelike")
}

fn check_pairing(s: &Suite, _: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    for i in 0..g.rank() {
        let h = g.generator(Letter::new(i, Sign::Plus));
        let minus = g.half_space(Letter::new(i, Sign::Minus));
        let plus = g.half_space(Letter::new(i, Sign::Plus));
        let dir = (h.apply_vector(&minus.direction()) + plus.direction()).max_abs() / plus.direction().max_abs().max(1.0);
        let vert = h.apply(&minus.vertex()).distance(&plus.vertex()) / plus.vertex().to_vector().norm().max(1.0);
        let worst = dir.max(vert);
        t.record(worst <= tol, worst, || format!("generator {}: direction residual {dir:e}, vertex residual {vert:e}", i + 1));
    }
    t
}

fn check_disjointness(s: &Suite, _: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let letters = g.letters();
    for (i, &a) in letters.iter().enumerate() {
        for &b in &letters[i + 1..] {
            match halfspace::separation(g.half_space(a), g.half_space(b), None) {
                Ok(sep) => t.record(sep.distance > tol, -sep.distance, || {
                    format!("closures of {} and {} meet", a.signed_label(), b.signed_label())
                }),
                Err(e) => t.record(false, f64::INFINITY, || e.to_string()),
            }
        }
    }
    match g.delta0(tol) {
        Ok(d) => t.record(d.separation.distance > tol, -d.separation.distance, || "delta0 is not positive".into()),
        Err(e) => t.record(false, f64::INFINITY, || e.to_string()),
    }
    t
}

fn check_linear_schottky(s: &Suite, _: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    match s.group.linear_config() {
        Ok(cfg) => {
            let r = cfg.verify(tol);
            t.record(r.ok, r.pairing_residual, || r.failures.join("; "));
        }
        Err(e) => t.record(false, f64::INFINITY, || e.to_string()),
    }
    t
}

fn check_hyperbolicity_formula(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..s.samples {
        let v = sampling::unit_spacelike(rng, 0.01);
        let rho = lorentz::hyperbolicity(&v, 1e-9).unwrap_or(f64::NAN);
        let closed = 2.0 * (2.0 / (1.0 + v.dot(&v))).sqrt();
        let err = (rho - closed).abs();
        t.record(err < tol, err, || format!("v = {:?}: chord {rho}, closed form {closed}", v.0));
    }
    t
}

fn check_compression(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..(s.samples / 50).max(3) {
        let linear = sampling::hyperbolic_isometry(rng, 0.05);
        let h = AffineIsometry::new(linear, sampling::point_in_box(rng, 5.0).to_vector());
        let x = sampling::point_in_box(rng, 5.0);
        for delta in [0.1, 1.0, 10.0] {
            match compression_check(&h, delta, &x, 100, tol.max(1e-12), rng) {
                Ok(r) => t.record(r.violations == 0, r.worst_ratio, || {
                    format!("h = {:?}, delta = {delta}, x = {:?}: {} violations", h, x.0, r.violations)
                }),
                Err(e) => t.record(false, f64::INFINITY, || e.to_string()),
            }
        }
    }
    t
}

fn check_distortion(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..s.samples {
        let psi = sampling::linear_isometry(rng, 3.0);
        let (a1, a2) = (TAU * rng.random::<f64>(), TAU * rng.random::<f64>());
        let before = chord_from_angles(a1, a2);
        if before < 1e-6 {
            continue;
        }
        let b1 = psi.circle_action(&CirclePoint::new(a1)).angle();
        let b2 = psi.circle_action(&CirclePoint::new(a2)).angle();
        let ratio = chord_from_angles(b1, b2) / before;
        let k = psi.distortion_bound();
        let excess = (ratio / k).max(1.0 / (ratio * k)) - 1.0;
        t.record(excess <= tol, excess, || format!("psi = {psi:?}, angles ({a1}, {a2}): ratio {ratio}, K = {k}"));
    }
    t
}

fn check_ping_pong(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let pool = sample_domain(g, rng, (s.samples / 100).max(2), tol);
    if pool.is_empty() {
        t.record(false, f64::INFINITY, || "no interior points of the domain found".into());
        return t;
    }
    for w in reduced_words(g.rank(), 4).into_iter().filter(|w| !w.is_empty()) {
        let h = g.word_isometry(&w);
        for x in &pool {
            let y = h.apply(x);
            let landed = g.containing_letter(&y, tol);
            t.record(landed == w.first(), f64::NEG_INFINITY, || {
                format!("word {w}, x = {:?}: image lies in {:?}", x.0, landed.map(|l| l.signed_label()))
            });
        }
    }
    t
}

fn check_trichotomy(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..s.samples {
        let h = random_half_space(rng, tol);
        let q = sampling::point_in_box(rng, 5.0);
        let m = h.membership(&q, tol);
        let flipped = h.opposite().membership(&q, tol) == m.flip();
        let in_wedges = m != Membership::InHalfSpace || h.closure_wedges().iter().any(|w| w.contains(&q, tol));
        t.record(flipped && in_wedges, f64::NEG_INFINITY, || format!("{h:?}, q = {:?}: {m:?}", q.0));
    }
    t
}

fn check_equivariance(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..(s.samples / 10).max(1) {
        let iso = sampling::affine_isometry(rng, 2.0, 5.0);
        let h = random_half_space(rng, tol);
        let image = match h.transform(&iso, tol) {
            Ok(i) => i,
            Err(e) => {
                t.record(false, f64::INFINITY, || e.to_string());
                continue;
            }
        };
        for _ in 0..10 {
            let q = sampling::point_in_box(rng, 5.0);
            let (before, after) = (h.membership(&q, tol), image.membership(&iso.apply(&q), tol));
            t.record(before == after, f64::NEG_INFINITY, || format!("{h:?} under {iso:?}, q = {:?}: {before:?} vs {after:?}", q.0));
        }
    }
    t
}

fn eps0(g: &AffineSchottky) -> Option<f64> {
    g.linear_config().ok()?.eps0()
}

fn check_eps0(s: &Suite, _: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let Some(eps0) = eps0(g) else {
        t.record(false, f64::INFINITY, || "arcs overlap, no eps0".into());
        return t;
    };
    for w in reduced_words(g.rank(), 6).into_iter().filter(|w| !w.is_empty() && w.is_cyclically_reduced()) {
        let actual = g.word_linear_precise(&w).hyperbolicity(1e-9).unwrap_or(0.0);
        t.record(actual >= eps0 - tol, eps0 - actual, || format!("word {w}: hyperbolicity {actual} < {eps0}"));
    }
    t
}

fn check_conjugate_family(s: &Suite, _: &mut ChaCha8Rng, _tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    if g.rank() < 2 {
        return t;
    }
    let values: Vec<f64> = (0..=6)
        .map(|n| {
            let mut labels = vec![1; n];
            labels.push(2);
            labels.extend(std::iter::repeat_n(-1, n));
            let w = Word::from_signed_labels(&labels).expect("valid labels");
            g.word_linear_precise(&w).hyperbolicity(1e-9).unwrap_or(f64::NAN)
        })
        .collect();
    for n in 1..values.len() {
        let (prev, value) = (values[n - 1], values[n]);
        t.record(value < prev, value - prev, || format!("n = {n}: {value} does not decrease from {prev}"));
    }
    t
}

fn check_audit(s: &Suite, _: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let Some(eps0) = eps0(g) else {
        t.record(false, f64::INFINITY, || "arcs overlap, no eps0".into());
        return t;
    };
    for w in reduced_words(g.rank(), 5).into_iter().filter(|w| !w.is_empty()) {
        match g.hyperbolicity_audit(&w, eps0, tol) {
            Ok(e) => t.record(e.holds, e.guarantee - e.actual, || format!("{e:?}")),
            Err(err) => t.record(false, f64::INFINITY, || format!("word {w}: {err}")),
        }
    }
    t
}

fn check_locate(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    for _ in 0..s.samples {
        let q = sampling::point_in_box(rng, 20.0);
        let loc = g.locate(&q, 10_000, tol);
        let back = g.word_isometry(loc.word()).apply(&loc.representative());
        let err = back.distance(&q);
        let ok = loc.is_located() && loc.word().is_reduced() && err < ROUND_TRIP_TOL;
        t.record(ok, err, || format!("q = {:?}: {loc:?}, round trip {err:e}", q.0));
    }
    t
}

fn check_delta0_neighbourhood(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let delta0 = match g.delta0(tol) {
        Ok(d) => d.separation.distance,
        Err(e) => {
            t.record(false, f64::INFINITY, || e.to_string());
            return t;
        }
    };
    let letters = g.letters();
    let mut pairs = Vec::new();
    for &a in &letters {
        for &b in &letters {
            if b != a.inverse() {
                if let Ok(inner) = g.half_space(b).transform(g.generator(a), tol) {
                    pairs.push((a, b, g.half_space(a).opposite(), inner));
                }
            }
        }
    }
    for i in 0..s.samples {
        let (a, b, outside, inner) = &pairs[i % pairs.len()];
        let x = outside.sample_interior(rng, 3.0);
        if !outside.contains(&x, tol) {
            continue;
        }
        let d = inner.distance_to_point(&x);
        t.record(d >= delta0 - tol, delta0 - d, || {
            format!("x = {:?} outside {} is {d} from the image of {} under {}", x.0, a.signed_label(), b.signed_label(), a.signed_label())
        });
    }
    t
}

fn check_separation_chain(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    let g = s.group;
    let (Some(small), Ok(d)) = (g.small_letter(), g.delta0(tol)) else {
        t.record(false, f64::INFINITY, || "needs a small half-space and delta0".into());
        return t;
    };
    let delta0 = d.separation.distance;
    let pool = sample_domain(g, rng, 4, tol);
    if pool.is_empty() {
        t.record(false, f64::INFINITY, || "no interior points of the domain found".into());
        return t;
    }
    for i in 0..(s.samples / 100).max(2) {
        let w = random_word(rng, g.rank(), small, 5);
        let x = pool[i % pool.len()];
        let q = g.word_isometry(&w).apply(&x);
        let report = g
            .nested_sequence(&q, w.len(), tol)
            .map_err(|e| e.to_string())
            .and_then(|seq| zigzag::separation_report(g, &seq, delta0, delta0, tol).map_err(|e| e.to_string()));
        match report {
            Ok(r) => {
                for row in &r.rows {
                    t.record(row.pass, row.bound - row.rho, || format!("word {w}, x = {:?}: {row:?}", x.0));
                }
                for a in &r.angles {
                    t.record(a.pass, f64::NEG_INFINITY, || format!("word {w}, x = {:?}: {a:?}", x.0));
                }
                t.rows.extend(r.rows);
            }
            Err(e) => t.record(false, f64::INFINITY, || format!("word {w}, x = {:?}: {e}", x.0)),
        }
    }
    t
}

fn check_zigzag_angles(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..(s.samples / 2).max(1) {
        let h = random_half_space(rng, tol);
        let plane = DefinitePlane::horizontal(10.0 * rng.random::<f64>() - 5.0);
        let Ok(region) = zigzag::slice(&h, &plane, 1e-9) else { continue };
        let (t0, t1) = region.angles();
        let phase = ((t1 - t0).rem_euclid(TAU) - PI).abs();
        let half = region.angle / 2.0;
        let sectors = ((t0 - half).abs().max((t1 - half - PI).abs())).min((t1 - half).abs().max((t0 - half - PI).abs()));
        let err = phase.max(sectors);
        t.record(err <= tol, err, || format!("{h:?} at height {}: angles ({t0}, {t1}), half-space angle {}", plane.base().0[2], region.angle));
    }
    t
}

fn check_zigzag_regions(s: &Suite, rng: &mut ChaCha8Rng, tol: f64) -> Tally {
    let mut t = Tally::default();
    for _ in 0..(s.samples / 10).max(1) {
        let h = random_half_space(rng, tol);
        let plane = DefinitePlane::horizontal(10.0 * rng.random::<f64>() - 5.0);
        let Ok(region) = zigzag::slice(&h, &plane, 1e-9) else { continue };
        for _ in 0..10 {
            let w = [20.0 * rng.random::<f64>() - 10.0, 20.0 * rng.random::<f64>() - 10.0];
            if region.zigzag.distance_to(w) < 1e-6 {
                continue;
            }
            let expected = h.membership(&plane.lift(w), tol) == Membership::InHalfSpace;
            let got = region.contains(w, tol);
            t.record(got == expected, f64::NEG_INFINITY, || format!("{h:?}, plane height {}, w = {w:?}", plane.base().0[2]));
        }
    }
    t
}
