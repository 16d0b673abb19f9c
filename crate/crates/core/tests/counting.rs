use num_rational::BigRational;
use proptest::prelude::*;
use wordlab_core::counting::{
    count_points, count_points_brute, epsilon_flat_estimate, lct_estimate_via_jets, CountMethod, CountOptions, DEFAULT_BUDGET,
};
use wordlab_core::polymap::parse_poly;
use wordlab_core::words::{parse_word, WordKind};
use wordlab_core::{Carrier, IdealSpec, Measure, Poly, Ring, WordMap};

fn poly_strategy(vars: u32) -> impl Strategy<Value = Poly> {
    let term = (-3i128..4, proptest::collection::vec((0..vars, 1u32..4), 0..3));
    proptest::collection::vec(term, 1..4).prop_map(|ts| {
        let mut p = Poly::zero();
        for (c, mono) in ts {
            let mut m = Poly::constant(c);
            for (v, e) in mono {
                m = m.mul(&Poly::var(v).pow(e));
            }
            p = p.add(&m);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn point_counts_match_brute_force(
        polys in proptest::collection::vec(poly_strategy(3), 1..3),
        ring in prop::sample::select(vec!["fp:3", "fp:5", "zmod:2^3", "zmod:3^2", "tpoly:2^2", "fq:2^2"]),
    ) {
        prop_assume!(polys.iter().any(|p| !p.is_zero()));
        let ideal = IdealSpec::new(3, polys, 0).unwrap();
        let r = Ring::parse(ring, None).unwrap();
        prop_assert_eq!(count_points(&ideal, &r, DEFAULT_BUDGET).unwrap(), count_points_brute(&ideal, &r, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), workers in 1usize..4) {
        let ring = Ring::parse("fp:3", None).unwrap();
        let w = parse_word("[x1,[x1,x2]]", WordKind::Lie).unwrap();
        let map = WordMap::new(w, &Carrier::parse("A:1").unwrap(), &ring, DEFAULT_BUDGET).unwrap();
        let a = map.sample(3000, seed, 1).unwrap();
        let b = map.sample(3000, seed, workers).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }
}

#[test]
fn fibers_partition_the_inputs() {
    for (w, kind, carrier, ring) in [
        ("[x1,[x2,x3]]", WordKind::Lie, "A:1", "fp:3"),
        ("x1 x2 x1^-1 x2^-1", WordKind::Group, "sl:2", "zmod:2^2"),
        ("x1 x2 - x2 x1", WordKind::Assoc, "mat:2", "fp:2"),
    ] {
        let ring = Ring::parse(ring, None).unwrap();
        let map = WordMap::new(parse_word(w, kind).unwrap(), &Carrier::parse(carrier).unwrap(), &ring, DEFAULT_BUDGET).unwrap();
        let h = map.histogram(&CountOptions::enumerate()).unwrap();
        assert_eq!(h.counts.values().sum::<u128>(), map.input_count(), "{w}");
        let mut total = 0;
        for k in 0..map.carrier().order() {
            total += map.fiber_count(k, &CountOptions::default()).unwrap();
        }
        assert_eq!(total, map.input_count(), "{w}");
    }
}

#[test]
fn auto_and_enumerate_agree() {
    let ring = Ring::parse("fp:3", None).unwrap();
    let c = Carrier::parse("sl:2").unwrap();
    let w = parse_word("x1 x2 x1^-1 x2^-1 x3^2", WordKind::Group).unwrap();
    let map = WordMap::new(w, &c, &ring, DEFAULT_BUDGET).unwrap();
    let auto = map.histogram(&CountOptions::default()).unwrap();
    let brute = map.histogram(&CountOptions { method: CountMethod::Enumerate, workers: 2, ..Default::default() }).unwrap();
    assert_eq!(Measure::from_histogram(&auto), Measure::from_histogram(&brute));
}

#[test]
fn flatness_exponent_is_at_most_one() {
    let c = Carrier::parse("A:1").unwrap();
    for (w, grid) in [("[x1,x2]", &[(3, 1), (5, 1), (3, 2)][..]), ("[x1,[x2,x3]]", &[(3, 1), (5, 1)]), ("x1", &[(3, 2)])] {
        let word = parse_word(w, WordKind::Lie).unwrap();
        let s = epsilon_flat_estimate(&word, &c, grid, &CountOptions::default()).unwrap();
        for r in s.rows.iter().filter(|r| r.statistic.starts_with("eps_hat")) {
            assert!(r.value <= 1.0 + 1e-12 && r.value > 0.0, "{w}: {}", r.value);
        }
    }
}

#[test]
fn lct_of_monomial_powers() {
    for n in 2..=4usize {
        let ideal = IdealSpec::new(1, vec![parse_poly(&format!("x1^{n}")).unwrap()], 0).unwrap();
        let r = lct_estimate_via_jets(&ideal, n - 1, &[2, 3], 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.estimate, BigRational::new(1.into(), (n as i64).into()), "x^{n}");
        assert!(r.partial.windows(2).all(|w| w[1] <= w[0]));
    }
}
