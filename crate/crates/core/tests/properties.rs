use std::f64::consts::{PI, TAU};

use crooked_tiling::config::example_config;
use crooked_tiling::halfspace::{CrookedHalfSpace, Membership};
use crooked_tiling::isometry::{AffineIsometry, LinearIsometry};
use crooked_tiling::lorentz::{self, chord_from_angles, CirclePoint, Interval};
use crooked_tiling::word::Word;
use crooked_tiling::zigzag::{self, DefinitePlane};
use crooked_tiling::{SpacePoint, Vector3};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn linear(a: f64, s: f64, b: f64) -> LinearIsometry {
    LinearIsometry::rotation(a) * LinearIsometry::transvection(s) * LinearIsometry::rotation(b)
}

fn half_space(start: f64, len: f64, p: [f64; 3]) -> CrookedHalfSpace {
    let arc = Interval::new(start, start + len).unwrap();
    CrookedHalfSpace::from_interval(&arc, SpacePoint(p), TOL).unwrap()
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
}

fn labels(m: i64, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select((1..=m).flat_map(|i| [i, -i]).collect::<Vec<_>>()), 0..max_len)
        .prop_map(|raw| {
            let mut reduced: Vec<i64> = Vec::new();
            for l in raw {
                if reduced.last() == Some(&-l) {
                    reduced.pop();
                } else {
                    reduced.push(l);
                }
            }
            Word::from_signed_labels(&reduced).unwrap()
        })
}

proptest! {
    #[test]
    fn isometries_preserve_the_form(a in 0.0..TAU, s in -2.0..2.0f64, b in 0.0..TAU, u in point(), v in point()) {
        let g = linear(a, s, b);
        let (u, v) = (Vector3(u), Vector3(v));
        let before = lorentz::form(&u, &v);
        let after = lorentz::form(&g.apply(&u), &g.apply(&v));
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + u.norm() * v.norm() * (2.0 * s.abs()).exp()));
    }

    #[test]
    fn hyperbolicity_matches_closed_form(start in 0.0..TAU, len in 0.05..(TAU - 0.05)) {
        let v = lorentz::spacelike_from_interval(&Interval::new(start, start + len).unwrap());
        let rho = lorentz::hyperbolicity(&v, TOL).unwrap();
        prop_assert!((rho - 2.0 * (2.0 / (1.0 + v.dot(&v))).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn chords_are_symmetric_and_bounded(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let c = chord_from_angles(a, b);
        prop_assert!((c - chord_from_angles(b, a)).abs() < 1e-15);
        prop_assert!((0.0..=2.0 + 1e-15).contains(&c));
        prop_assert!((c - chord_from_angles(a + TAU, b)).abs() < 1e-12);
    }

    #[test]
    fn circle_action_is_a_group_action(a in 0.0..TAU, s in -1.5..1.5f64, b in 0.0..TAU, t in 0.0..TAU) {
        let g = linear(a, s, b);
        let p = CirclePoint::new(t);
        let back = g.inverse().circle_action(&g.circle_action(&p));
        prop_assert!(lorentz::chord_distance(&back, &p) < 1e-9);
    }

    #[test]
    fn membership_flips_with_the_opposite(start in 0.0..TAU, len in 0.05..(TAU - 0.05), p in point(), q in point()) {
        let h = half_space(start, len, p);
        let q = SpacePoint(q);
        prop_assert_eq!(h.opposite().membership(&q, TOL), h.membership(&q, TOL).flip());
    }

    #[test]
    fn membership_is_equivariant(
        start in 0.0..TAU, len in 0.05..(TAU - 0.05), p in point(), q in point(),
        a in 0.0..TAU, s in -1.5..1.5f64, b in 0.0..TAU, shift in point(),
    ) {
        let h = half_space(start, len, p);
        let q = SpacePoint(q);
        // Labels of points very close to the crooked plane are decided by
        // rounding, so keep away from it.
        prop_assume!(h.distance_to_point(&q).max(h.opposite().distance_to_point(&q)) > 1e-6);
        let g = AffineIsometry::new(linear(a, s, b), Vector3(shift));
        let image = h.transform(&g, TOL).unwrap();
        prop_assert_eq!(image.membership(&g.apply(&q), TOL), h.membership(&q, TOL));
    }

    #[test]
    fn zigzag_phase_is_a_half_turn(start in 0.0..TAU, len in 0.05..(TAU - 0.05), p in point(), c in -5.0..5.0f64) {
        let h = half_space(start, len, p);
        prop_assume!((c - p[2]).abs() > 1e-6);
        let region = zigzag::slice(&h, &DefinitePlane::horizontal(c), TOL).unwrap();
        let (t0, t1) = region.angles();
        prop_assert!(((t1 - t0).rem_euclid(TAU) - PI).abs() < 1e-9);
    }

    #[test]
    fn zigzag_regions_are_slices(start in 0.0..TAU, len in 0.05..(TAU - 0.05), p in point(), c in -5.0..5.0f64, s in -10.0..10.0f64, t in -10.0..10.0f64) {
        let h = half_space(start, len, p);
        prop_assume!((c - p[2]).abs() > 1e-6);
        let plane = DefinitePlane::horizontal(c);
        let region = zigzag::slice(&h, &plane, TOL).unwrap();
        prop_assume!(region.zigzag.distance_to([s, t]) > 1e-6);
        let expected = h.membership(&plane.lift([s, t]), TOL) == Membership::InHalfSpace;
        prop_assert_eq!(region.contains([s, t], TOL), expected);
    }

    #[test]
    fn words_compose_with_their_inverses(w in labels(2, 10), q in point()) {
        let g = example_config(4.0).build(TOL).unwrap();
        let q = SpacePoint(q);
        let forward = g.word_isometry(&w);
        let there = forward.apply(&q);
        let back = g.word_isometry(&w.inverse()).apply(&there);
        // Rounding grows with the condition number of the linear part.
        let growth = forward.linear().matrix().max_abs().powi(2);
        prop_assert!(back.distance(&q) < 1e-13 * growth * (1.0 + q.to_vector().norm()));
    }

    #[test]
    fn located_points_round_trip(q in [-20.0..20.0f64, -20.0..20.0f64, -20.0..20.0f64]) {
        let g = example_config(4.0).build(TOL).unwrap();
        let q = SpacePoint(q);
        let loc = g.locate(&q, 10_000, TOL);
        prop_assert!(loc.is_located());
        prop_assert!(loc.word().is_reduced());
        prop_assert!(g.containing_letter(&loc.representative(), TOL).is_none());
        let back = g.word_isometry(loc.word()).apply(&loc.representative());
        prop_assert!(back.distance(&q) < 1e-7);
    }

    #[test]
    fn tiles_land_in_their_first_half_space(w in labels(2, 6)) {
        let g = example_config(4.0).build(TOL).unwrap();
        prop_assume!(!w.is_empty());
        // A point of X that is far from every face.
        let x = SpacePoint([0.0, 0.0, 0.0]);
        prop_assert!(g.domain_contains(&x, TOL));
        let y = g.word_isometry(&w).apply(&x);
        prop_assert_eq!(g.containing_letter(&y, TOL), w.first());
    }
}
