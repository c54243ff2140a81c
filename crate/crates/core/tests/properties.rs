use geoforge_core::constants::{
    adams_bound, basmajian_bound, run_pipeline, PipelineOptions, SurfaceDescription,
};
use geoforge_core::intersection::{self_intersection, IntersectionConfig};
use geoforge_core::moebius::{axes_cross, Axis, ElementKind, Endpoint};
use geoforge_core::pants::{back_geodesic_length, horocycle_self_distance, Boundary, PantsWithCusps};
use geoforge_core::strand::{
    lifted_crossings, strand_length_bounds, winding_argument, winding_number, LiftedStrand,
};
use geoforge_core::words::{
    canonicalize, classify_word, cyclic_reduce, evaluate, evaluate_letters, free_reduce, inverse_word,
    reduced_product, CyclicWord, Letter, WordKind,
};
use geoforge_core::PrecisionContext;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Integer};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(0usize..4, 1..=max).prop_map(|v| free_reduce(&v.into_iter().map(|i| Letter::ALL[i]).collect::<Vec<_>>()))
}

fn cyclic(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    letters(max).prop_map(|w| cyclic_reduce(&w)).prop_filter("non-trivial", |w| !w.is_empty())
}

fn hyperbolic(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    cyclic(max).prop_filter("hyperbolic", |w| evaluate_letters(w).is_hyperbolic())
}

fn rotate(w: &[Letter], r: usize) -> Vec<Letter> {
    let r = r % w.len();
    [&w[r..], &w[..r]].concat()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn conjugation_preserves_kind_and_length(m in letters(8), n in cyclic(8)) {
        let ctx = ctx();
        let g = evaluate_letters(&m);
        let x = evaluate_letters(&n);
        let conj = &(&g * &x) * &g.inverse();
        prop_assert_eq!(conj.classify(), x.classify());
        prop_assert_eq!(conj.abs_trace(), x.abs_trace());
        if x.is_hyperbolic() {
            prop_assert_eq!(conj.translation_length(&ctx).unwrap(), x.translation_length(&ctx).unwrap());
        }
    }

    #[test]
    fn axis_pushforward(m in letters(6), n in hyperbolic(6)) {
        let x = evaluate_letters(&n);
        let g = evaluate_letters(&m);
        let conj = &(&g * &x) * &g.inverse();
        prop_assert_eq!(conj.axis().unwrap(), g.push_axis(&x.axis().unwrap()));
    }

    #[test]
    fn axes_cross_is_symmetric(u in hyperbolic(6), v in hyperbolic(6)) {
        let x = evaluate_letters(&u);
        let y = evaluate_letters(&v);
        let (ax, ay) = (x.axis().unwrap(), y.axis().unwrap());
        prop_assert_eq!(axes_cross(&ax, &ay), axes_cross(&ay, &ax));
    }

    #[test]
    fn trace_is_rotation_and_inverse_invariant(w in cyclic(12), r in 0usize..12) {
        let t = evaluate_letters(&w).trace();
        let rot = evaluate_letters(&rotate(&w, r)).trace();
        let inv = evaluate_letters(&inverse_word(&w)).trace();
        // traces in PSL are defined up to sign; the signed matrices agree exactly
        prop_assert_eq!(Integer::from(t.abs_ref()), Integer::from(rot.abs_ref()));
        prop_assert_eq!(Integer::from(t.abs_ref()), Integer::from(inv.abs_ref()));
        let sw = geoforge_core::words::signed_matrix(&w).trace();
        prop_assert_eq!(&sw, &geoforge_core::words::signed_matrix(&rotate(&w, r)).trace());
        prop_assert_eq!(&sw, &geoforge_core::words::signed_matrix(&inverse_word(&w)).trace());
    }

    #[test]
    fn classification_is_conjugation_invariant(w in cyclic(10), g in letters(6)) {
        let ctx = ctx();
        let cw = canonicalize(&w).unwrap();
        let conj = canonicalize(&reduced_product(&[&g, &w, &inverse_word(&g)])).unwrap();
        let inv = canonicalize(&inverse_word(&w)).unwrap();
        prop_assert_eq!(&cw, &conj);
        prop_assert_eq!(&cw, &inv);
        let c1 = classify_word(&cw, &ctx);
        let c2 = classify_word(&conj, &ctx);
        prop_assert_eq!(c1.kind, c2.kind);
        prop_assert_eq!(c1.trace, c2.trace);
        prop_assert_eq!(c1.length, c2.length);
    }

    #[test]
    fn peripheral_closure(g in letters(6), which in 0usize..3, k in 1usize..6) {
        let ctx = ctx();
        let unit: Vec<Letter> = match which {
            0 => vec![Letter::A],
            1 => vec![Letter::B],
            _ => vec![Letter::A, Letter::BInv],
        };
        let power: Vec<Letter> = unit.iter().copied().cycle().take(unit.len() * k).collect();
        let w = canonicalize(&reduced_product(&[&g, &power, &inverse_word(&g)])).unwrap();
        prop_assert_eq!(classify_word(&w, &ctx).kind, WordKind::Peripheral);
        prop_assert_eq!(evaluate(&w).classify(), ElementKind::Parabolic);
    }

    #[test]
    fn power_law(w in cyclic(6), m in 1usize..=5) {
        let ctx = ctx();
        let cw = canonicalize(&w).unwrap();
        let x = evaluate(&cw);
        prop_assume!(x.is_hyperbolic());
        let p = cw.power(m).unwrap();
        let single = x.translation_length(&ctx).unwrap();
        let multiple = evaluate(&p).translation_length(&ctx).unwrap();
        let err = Float::with_val(128, &multiple - Float::with_val(128, &single * m as u32)).abs();
        prop_assert!(err < Float::with_val(128, 1e-30) * &multiple);
        // tr(M^m) = 2 T_m(tr M / 2), via the recurrence t_{j+1} = t t_j - t_{j-1}
        let t = geoforge_core::words::signed_matrix(cw.letters()).trace();
        let (mut prev, mut cur) = (Integer::from(2), t.clone());
        for _ in 1..m {
            let next = Integer::from(&t * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        prop_assert_eq!(geoforge_core::words::signed_matrix(p.letters()).trace(), cur);
    }

    /// Inside the printed length window for winding `w` the floor formula
    /// returns `w - 1`, while the shadow of the lifted strand meets exactly `w`
    /// fundamental intervals.
    #[test]
    fn winding_round_trip(h in 0.01f64..8.0, w in 1u64..200, t in 0.001f64..0.999) {
        let ctx = ctx();
        let h = Float::with_val(128, h);
        let (lo, hi) = strand_length_bounds(&h, w, &ctx).unwrap();
        let l = Float::with_val(128, &hi - &lo) * t + &lo;
        if w == 1 {
            prop_assert_eq!(winding_number(&h, &l, &ctx), Err(geoforge_core::Error::NotAStrand));
        } else {
            prop_assert_eq!(winding_number(&h, &l, &ctx).unwrap(), w - 1);
        }
        let extent = winding_argument(&h, &l, &ctx);
        let lifted = LiftedStrand::from_extent(&h, Float::with_val(128, 0u32), &extent, &ctx).unwrap();
        prop_assert_eq!(lifted.winding(), w);
        prop_assert_eq!(lifted_crossings(&lifted, &lifted, true), w - 1);
    }

    #[test]
    fn winding_is_monotone(h in 0.05f64..4.0, l in 0.5f64..20.0, dl in 0.0f64..3.0, dh in 0.0f64..2.0) {
        let ctx = ctx();
        let f = |x: f64| Float::with_val(128, x);
        let base = winding_number(&f(h), &f(l), &ctx);
        if let Ok(base) = base {
            prop_assert!(winding_number(&f(h), &f(l + dl), &ctx).unwrap() >= base);
            if let Ok(w) = winding_number(&f(h + dh), &f(l), &ctx) {
                prop_assert!(w <= base);
            }
        }
    }

    #[test]
    fn horocycle_cases_are_continuous(h in 0.1f64..3.5, shrink in 10u32..60) {
        let ctx = ctx();
        let tiny = Float::with_val(128, 1u32) >> shrink;
        let h = Float::with_val(128, h);
        let c1 = PantsWithCusps::new([Boundary::Cusp, Boundary::Geodesic(tiny.clone()), Boundary::Geodesic(tiny.clone())]).unwrap();
        let c2 = PantsWithCusps::new([Boundary::Cusp, Boundary::Geodesic(tiny), Boundary::Cusp]).unwrap();
        let c3 = PantsWithCusps::thrice_punctured_sphere();
        let d1 = horocycle_self_distance(&c1, &h, &ctx).unwrap();
        let d2 = horocycle_self_distance(&c2, &h, &ctx).unwrap();
        let d3 = horocycle_self_distance(&c3, &h, &ctx).unwrap();
        let bound = Float::with_val(128, 1u32) >> (2 * shrink - 4);
        prop_assert!(Float::with_val(128, &d1 - &d2).abs() < bound);
        prop_assert!(Float::with_val(128, &d2 - &d3).abs() < bound);
        prop_assert!(d1 >= d2 && d2 >= d3);
    }
}

#[test]
fn translation_length_increases_with_trace() {
    let ctx = ctx();
    let mut prev = None;
    for t in 3u32..400 {
        let l = geoforge_core::moebius::length_from_abs_trace(&Integer::from(t), &ctx);
        if let Some(p) = prev {
            assert!(l > p);
        }
        prev = Some(l);
    }
}

fn interval_contains(lo: &Endpoint, hi: &Endpoint, p: &Endpoint) -> bool {
    // the open boundary arc between two points of the real line, read
    // without passing through infinity
    let key = |e: &Endpoint| match e {
        Endpoint::Finite(x) => (0, x.clone()),
        Endpoint::Infinity => (1, Float::new(256)),
    };
    let (a, b, c) = (key(lo), key(hi), key(p));
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a < c && c < b
}

#[test]
fn axes_cross_matches_numeric_interlacing() {
    let ctx = PrecisionContext::new(256);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut crossing = 0;
    while checked < 10_000 {
        let word = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=7);
            let raw: Vec<Letter> = (0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect();
            evaluate_letters(&free_reduce(&raw))
        };
        let x = word(&mut rng);
        let y = word(&mut rng);
        if !x.is_hyperbolic() || !y.is_hyperbolic() {
            continue;
        }
        let (ax, ay): (Axis, Axis) = (x.axis().unwrap(), y.axis().unwrap());
        let exact = match axes_cross(&ax, &ay) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let (p1, p2) = ax.endpoints(&ctx);
        let (q1, q2) = ay.endpoints(&ctx);
        let numeric = interval_contains(&p1, &p2, &q1) != interval_contains(&p1, &p2, &q2);
        assert_eq!(exact, numeric, "{x} vs {y}");
        checked += 1;
        crossing += exact as usize;
    }
    assert!(crossing > 100 && crossing < 9_900);
}

#[test]
fn self_intersection_invariance_on_short_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctx = ctx();
    let mut done = 0;
    while done < 60 {
        let len = rng.gen_range(2..=7);
        let raw: Vec<Letter> = (0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect();
        let w = cyclic_reduce(&free_reduce(&raw));
        if w.is_empty() {
            continue;
        }
        let cw = canonicalize(&w).unwrap();
        if !classify_word(&cw, &ctx).is_hyperbolic_primitive() {
            continue;
        }
        let base = self_intersection(&cw, &IntersectionConfig::default()).unwrap();
        assert!(base.certified && base.count >= 1);
        assert!(base.counts.windows(2).all(|p| p[0].1 <= p[1].1));
        // the engine sees the same class however it is written
        let rot = CyclicWord::parse(&geoforge_core::words::letters_to_string(&rotate(&w, rng.gen_range(0..w.len()))));
        let inv = CyclicWord::parse(&geoforge_core::words::letters_to_string(&inverse_word(&w)));
        for other in [rot.unwrap(), inv.unwrap()] {
            let r = self_intersection(&other, &IntersectionConfig::default()).unwrap();
            assert_eq!(r.count, base.count);
        }
        done += 1;
    }
}

#[test]
fn back_geodesic_grows_linearly() {
    let ctx = ctx();
    let a = Float::with_val(128, 0.8);
    let p = PantsWithCusps::geodesic(a.clone(), Float::with_val(128, 1.3), Float::with_val(128, 0.5)).unwrap();
    let lengths: Vec<Float> = (1..=100).map(|k| back_geodesic_length(&p, k, &ctx).unwrap()).collect();
    assert!(lengths.windows(2).all(|w| w[1] > w[0]));
    let slope = Float::with_val(128, &lengths[99] - &lengths[98]);
    assert!(Float::with_val(128, &slope - &a).abs() < 1e-20);
}

#[test]
fn thresholds_are_coherent_for_surface_y() {
    let ctx = ctx();
    let s = SurfaceDescription::thrice_punctured_sphere(&ctx).unwrap();
    let (report, values) = run_pipeline(&s, &PipelineOptions::default()).unwrap();
    // K is of order 1e90 and the inequality is decided in the 89th digit
    let wide = 512;
    let k = Float::with_val(wide, report.k.value.clone());
    let ratio = Float::with_val(wide, &values.eps / &values.h_max);
    for mult in [1u32, 2, 10] {
        let x = Float::with_val(wide, &k * mult);
        let lhs = Float::with_val(wide, x.asinh_ref()) * 2u32 + &values.d1 + 1u32;
        let rhs = Float::with_val(wide, &ratio * x.root(5));
        assert!(lhs < rhs, "K coherence at {mult}K");
    }
    let direct = Float::with_val(128, report.direct_k_thick.certificate.value.clone());
    for mult in [1u32, 2, 10] {
        let x = Float::with_val(128, &direct * mult);
        let lhs = basmajian_bound(x.to_integer().unwrap().to_u64().unwrap(), &values.d1, &ctx).unwrap();
        let rhs = Float::with_val(128, &values.eps_thick / 12u32) * x.sqrt();
        assert!(lhs < rhs);
    }
    assert_eq!(adams_bound(0, 3).unwrap(), 4);
    let four = Float::with_val(128, 4u32).ln() * 2u32;
    assert_eq!(values.d1, four);
}
