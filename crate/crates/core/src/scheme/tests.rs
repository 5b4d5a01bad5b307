use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::arith::{PrimeField, Rationals};

fn gf() -> PrimeField {
    PrimeField::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pt(f: &PrimeField, c: &[i64]) -> Point<crate::arith::Fp> {
    Point::new(f, c.iter().map(|&x| f.from_i64(x)).collect()).unwrap()
}

#[test]
fn points_are_normalized() {
    let f = gf();
    let p = pt(&f, &[0, 3, 6]);
    assert_eq!(p.coords(), &[f.zero(), f.one(), f.from_i64(2)]);
    assert_eq!(p, pt(&f, &[0, -1, -2]));
    assert!(Point::new(&f, vec![f.zero(); 3]).is_err());
}

#[test]
fn ynd_shapes() {
    let f = gf();
    let y = build_ynd(&f, 2, 5, &mut rng(1)).unwrap();
    assert_eq!(y.census().get("double"), Some(&7));
    assert_eq!(y.components.len(), 7);
    assert_eq!(y.degree(), Some(21));

    let y = build_ynd(&f, 4, 5, &mut rng(2)).unwrap();
    assert_eq!(y.census().get("double"), Some(&25));
    assert_eq!(y.census().get("simple"), Some(&1));
    assert_eq!(y.degree(), Some(126));

    let y = build_ynd(&f, 1, 4, &mut rng(3)).unwrap();
    assert_eq!(y.census().get("double"), Some(&2));
    assert_eq!(y.census().get("simple"), Some(&1));
    assert_eq!(y.degree(), Some(5));

    // B = 3 in P^3 at d = 4: 35 = 4*8 + 3
    let y = build_ynd(&f, 3, 4, &mut rng(4)).unwrap();
    assert_eq!(y.census().get("double_in_subspace"), Some(&1));
    assert_eq!(y.degree(), Some(35));
    y.validate(&f).unwrap();
}

#[test]
fn double_in_h_splits_into_double_and_simple() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 3);
    let y = SchemeConfig {
        n: 3,
        components: vec![Component::Double {
            at: pt(&f, &[1, 2, 3, 0]),
        }],
        hyperplane: None,
    };
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.n, 2);
    assert_eq!(tr.trace.components, vec![Component::Double { at: pt(&f, &[1, 2, 3]) }]);
    assert_eq!(
        tr.residual.components,
        vec![Component::Simple {
            at: pt(&f, &[1, 2, 3, 0])
        }]
    );
}

#[test]
fn scheme_off_h_is_its_own_residual() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 2);
    let y = random_doubles(&f, 2, 5, &mut rng(5)).unwrap();
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert!(tr.trace.components.is_empty());
    assert_eq!(tr.residual.components, y.components);
}

#[test]
fn specialized_trace_is_a_model_scheme() {
    // A_{2,5} = 7, B_{2,5} = 0: trace of the specialized doubles has
    // degree 3 * 7 = 21 = C(7, 5), so chi on H is 0
    let f = gf();
    let h = Hyperplane::coordinate(&f, 3);
    let mut r = rng(6);
    let mut y = random_doubles(&f, 3, 7, &mut r).unwrap();
    y = specialize_into_h(&f, &y, &(0..7).collect::<Vec<_>>(), &h, &mut r).unwrap();
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.degree(), Some(21));
    assert_eq!(crate::combinatorics::euler_char(2, 5, 21), 0);
    assert_eq!(tr.residual.degree(), Some(7));
}

#[test]
fn specialize_doubles_of_y25() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 2);
    let mut r = rng(7);
    let y = build_ynd(&f, 2, 5, &mut r).unwrap();
    let s = specialize_into_h(&f, &y, &(0..7).collect::<Vec<_>>(), &h, &mut r).unwrap();
    let tr = trace_residual(&f, &s, &h).unwrap();
    assert_eq!(tr.trace.degree(), Some(14));
    assert_eq!(tr.residual.degree(), Some(7));
    assert_eq!(
        specialize_into_h(&f, &y, &[], &h, &mut r).unwrap().components,
        y.components
    );
}

#[test]
fn eject_simple_point() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 2);
    let x = Component::Simple { at: pt(&f, &[1, 5, 0]) };
    let e = eject(&f, &x, &h, &[f.zero(), f.zero(), f.one()]).unwrap();
    assert_eq!(e.degree(2), Some(1 + 3));
    let y = SchemeConfig {
        n: 2,
        components: vec![e],
        hyperplane: None,
    };
    y.validate(&f).unwrap();
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.components, vec![Component::Double { at: pt(&f, &[1, 5]) }]);
    assert!(matches!(tr.residual.components[..], [Component::Jet2 { .. }]));
    assert_eq!(tr.trace.degree(), Some(2));
    assert_eq!(tr.residual.degree(), Some(2));
}

#[test]
fn eject_partial_double() {
    let f = gf();
    let n = 3;
    let h = Hyperplane::coordinate(&f, n);
    let x = Component::DoubleInSubspace {
        at: pt(&f, &[1, 0, 0, 0]),
        directions: vec![vec![f.zero(), f.one(), f.zero(), f.zero()]],
    };
    let e = eject(&f, &x, &h, &[f.one(), f.one(), f.one(), f.one()]).unwrap();
    assert_eq!(e.degree(n), Some(2 + (n as u64 + 1)));
    let y = SchemeConfig {
        n,
        components: vec![e],
        hyperplane: None,
    };
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.degree(), Some(n as u64));
    assert_eq!(tr.residual.degree(), Some(3));
    assert_eq!(
        eject(&f, &x, &h, &[f.one(), f.zero(), f.zero(), f.zero()]),
        Err(SchemeError::DirectionInHyperplane)
    );
}

#[test]
fn jets_and_subspaces_cut_by_h() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 3);
    let at = pt(&f, &[1, 2, 0, 0]);
    let jet = Component::Jet2 {
        at: at.clone(),
        direction: vec![f.zero(), f.zero(), f.zero(), f.one()],
    };
    let sub = Component::DoubleInSubspace {
        at: pt(&f, &[0, 1, 1, 0]),
        directions: vec![
            vec![f.one(), f.zero(), f.zero(), f.one()],
            vec![f.zero(), f.zero(), f.one(), f.from_i64(2)],
        ],
    };
    let y = SchemeConfig {
        n: 3,
        components: vec![jet, sub],
        hyperplane: None,
    };
    y.validate(&f).unwrap();
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.degree(), Some(1 + 2));
    assert_eq!(tr.residual.degree(), Some(2));
    assert_eq!(
        tr.trace.degree().unwrap() + tr.residual.degree().unwrap(),
        y.degree().unwrap()
    );
    match &tr.trace.components[1] {
        Component::DoubleInSubspace { directions, .. } => {
            // (0,0,1,2) - 2 (1,0,0,1) = (-2,0,1,0) in H
            let two = f.from_i64(2);
            assert_eq!(directions, &vec![vec![f.neg(&two), f.zero(), f.one()]]);
        }
        other => panic!("unexpected trace {other:?}"),
    }
}

#[test]
fn lines_meet_h_once() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 2);
    let mut y = random_doubles(&f, 2, 2, &mut rng(8)).unwrap();
    let pts: Vec<_> = y.components.iter().filter_map(|c| c.support().cloned()).collect();
    y = extend(
        &y,
        &SchemeConfig {
            n: 2,
            components: lines_joining(&pts),
            hyperplane: None,
        },
    )
    .unwrap();
    assert_eq!(y.components.len(), 3);
    assert_eq!(y.degree(), None);
    assert_eq!(y.condition_count(3), 2 * 3 + 4);
    let tr = trace_residual(&f, &y, &h).unwrap();
    assert_eq!(tr.trace.census().get("simple"), Some(&1));
    assert_eq!(tr.residual.census().get("line"), Some(&1));
    let line = &tr.residual.components[2];
    assert_eq!(line.condition_count(2, 2), 3);

    let bad = random_doubles(&f, 2, 1, &mut rng(9)).unwrap();
    assert!(extend(&y, &bad).is_err());
    assert_eq!(extend(&bad, &SchemeConfig::empty(2)).unwrap(), bad);
}

#[test]
fn complexes_have_the_right_shape() {
    let f = gf();
    let h = Hyperplane::coordinate(&f, 4);
    let mut r = rng(10);
    assert_eq!(make_complex(&f, 4, -1, &h, &mut r).unwrap(), None);
    for s in 0..=3i64 {
        let c = make_complex(&f, 4, s, &h, &mut r).unwrap().unwrap();
        let Component::Complex { points, generators } = &c else {
            panic!("not a complex");
        };
        assert_eq!(generators.len() as i64, s + 2);
        assert_eq!(points.len() as i64, (s + 2) * (s + 1) / 2);
        assert!(points.iter().all(|p| h.contains(&f, p.coords())));
        let refs: Vec<_> = points.iter().map(|p| p.coords()).collect();
        assert_eq!(rank_of(&f, &refs) as i64, s + 1);
    }
    assert!(make_complex(&f, 4, 4, &h, &mut r).is_err());
}

#[test]
fn generic_hyperplane_round_trip() {
    let f = gf();
    let h = Hyperplane::new(&f, vec![f.from_i64(2), f.from_i64(-1), f.from_i64(5), f.zero()]).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_point_on(&f, &h, &mut r).unwrap();
        assert!(h.contains(&f, p.coords()));
        assert_eq!(h.from_local(&f, &h.to_local(p.coords())), p.coords());
        let dirs = h.complement_of(&f, p.coords());
        assert_eq!(dirs.len(), 2);
        let mut all: Vec<&[_]> = vec![p.coords()];
        all.extend(dirs.iter().map(Vec::as_slice));
        assert_eq!(rank_of(&f, &all), 3);
        assert!(dirs.iter().all(|v| h.contains(&f, v)));
    }
}

#[test]
fn same_seed_same_scheme() {
    let f = gf();
    let a = SchemeJson::from_config(&build_ynd(&f, 3, 4, &mut rng(12)).unwrap()).render();
    let b = SchemeJson::from_config(&build_ynd(&f, 3, 4, &mut rng(12)).unwrap()).render();
    assert_eq!(a, b);
    let c = SchemeJson::from_config(&build_ynd(&f, 3, 4, &mut rng(13)).unwrap()).render();
    assert_ne!(a, c);
}

#[test]
fn json_round_trip() {
    let f = gf();
    let mut r = rng(14);
    let h = Hyperplane::coordinate(&f, 3);
    let mut y = build_ynd(&f, 3, 4, &mut r).unwrap();
    push_transverse_jets(&f, &mut y, 1, &h, &mut r).unwrap();
    let x = Component::Simple {
        at: random_point_on(&f, &h, &mut r).unwrap(),
    };
    y.components
        .push(eject(&f, &x, &h, &[f.one(), f.one(), f.one(), f.one()]).unwrap());
    y.components.push(make_complex(&f, 3, 1, &h, &mut r).unwrap().unwrap());
    y.hyperplane = Some(h);
    let text = SchemeJson::from_config(&y).render();
    let back = SchemeJson::parse(&text).unwrap().to_config(&f).unwrap().0;
    assert_eq!(back, y);
    assert_eq!(SchemeJson::from_config(&back).render(), text);
}

#[test]
fn json_rationals_and_errors() {
    let q = Rationals;
    let text = r#"{"n": 2, "components": [
        {"kind": "double", "support": ["2", "1/2", "0"]},
        {"kind": "jet2", "support": ["0", "1", "0"], "subspace_basis": [["0", "0", "1"]]}
    ], "values": ["1", "0", "0", "0", "-3/4"]}"#;
    let (y, values) = SchemeJson::parse(text).unwrap().to_config(&q).unwrap();
    assert_eq!(y.degree(), Some(5));
    assert_eq!(values.unwrap().len(), 5);
    assert_eq!(y.components[0].support().unwrap().coords()[1], q.parse("1/4").unwrap());

    let bad = r#"{"n": 2, "components": [
        {"kind": "double", "support": ["1", "0", "0"]},
        {"kind": "double", "support": ["1", "0"]}
    ]}"#;
    match SchemeJson::parse(bad).unwrap().to_config(&q) {
        Err(SchemeError::Invalid { index, .. }) => assert_eq!(index, 1),
        other => panic!("expected an error at component 1, got {other:?}"),
    }
    let unknown = r#"{"n": 1, "components": [{"kind": "triple", "support": ["1", "0"]}]}"#;
    assert!(matches!(
        SchemeJson::parse(unknown).unwrap().to_config(&q),
        Err(SchemeError::Invalid { index: 0, .. })
    ));
    let twice = r#"{"n": 1, "components": [
        {"kind": "simple", "support": ["1", "1"]},
        {"kind": "double", "support": ["2", "2"]}
    ]}"#;
    assert!(matches!(
        SchemeJson::parse(twice).unwrap().to_config(&q),
        Err(SchemeError::Invalid { index: 1, .. })
    ));
    assert!(SchemeJson::parse(r#"{"n": 1, "components": [], "extra": 1}"#).is_err());
}
