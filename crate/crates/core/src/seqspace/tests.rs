use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real(values: &[f64], tail: Tail) -> SeqWindow {
    SeqWindow::from_real(values, tail).unwrap()
}

fn random_window(rng: &mut ChaCha8Rng, len: usize) -> SeqWindow {
    let values: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SeqWindow::new(values, Tail::Zero).unwrap()
}

#[test]
fn window_validation() {
    assert!(SeqWindow::new(vec![], Tail::Zero).is_err());
    assert!(SeqWindow::from_real(&[f64::NAN], Tail::Zero).is_err());
    assert!(SeqWindow::from_real(
        &[1.0],
        Tail::Limit {
            p: c(0.0),
            bound: Some(-1.0)
        }
    )
    .is_err());
    let w = real(
        &[1.0, -3.0],
        Tail::Limit {
            p: c(5.0),
            bound: None,
        },
    );
    assert_eq!(w.sup_norm(), 5.0);
    assert_eq!(w.get(7), Some(c(5.0)));
    assert_eq!(w.tail_deviation(), Some((8.0, false)));
    assert_eq!(real(&[1.0], Tail::Unknown).get(1), None);
}

#[test]
fn offset_round_trip() {
    let w = real(
        &[2.0, 1.5],
        Tail::Limit {
            p: c(1.0),
            bound: Some(0.25),
        },
    );
    let o = w.offset(c(1.0));
    assert_eq!(o.values(), &[c(1.0), c(0.5)]);
    assert_eq!(
        o.tail(),
        Tail::Limit {
            p: c(0.0),
            bound: Some(0.25)
        }
    );
    let z = real(
        &[3.0],
        Tail::Limit {
            p: c(3.0),
            bound: Some(0.0),
        },
    )
    .offset(c(3.0));
    assert_eq!(z.tail(), Tail::Zero);
}

#[test]
fn sqrt_dist_examples() {
    assert_eq!(sqrt_dist(4, 9), 1.0);
    assert_eq!(sqrt_dist(0, 1), 1.0);
    assert_eq!(sqrt_dist(7, 7), 0.0);
}

#[test]
fn metric_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20_000 {
        let (a, b, d) = (
            rng.gen_range(0..=10_000usize),
            rng.gen_range(0..=10_000usize),
            rng.gen_range(0..=10_000usize),
        );
        assert_eq!(sqrt_dist(a, b), sqrt_dist(b, a));
        assert_eq!(sqrt_dist(a, b) == 0.0, a == b);
        assert!(sqrt_dist(a, d) <= sqrt_dist(a, b) + sqrt_dist(b, d) + 1e-12);
    }
}

#[test]
fn shift_sandwich_sampled() {
    let lo = 1.0 / 6f64.sqrt();
    for j in 0..300 {
        for k in (j + 1)..=300 {
            let r = sqrt_dist(j, k);
            let s = sqrt_dist(j + 1, k + 1);
            assert!(lo * r <= s + 1e-15 && s <= r + 1e-15, "j={j} k={k}");
        }
    }
}

#[test]
fn modulus_examples() {
    let w = real(&[0.0, 1.0, 0.0, 0.0, 1.0], Tail::Unknown);
    // neighbouring distances: 1, 0.414, 0.318, 0.268
    assert_eq!(modulus_of_continuity(&w, 0.25).unwrap(), 0.0);
    assert_eq!(modulus_of_continuity(&w, 0.27).unwrap(), 1.0);
    assert!(modulus_of_continuity(&w, 0.0).is_err());
    assert!(modulus_of_continuity(&w, f64::NAN).is_err());
    let k = real(
        &[2.0; 50],
        Tail::Limit {
            p: c(2.0),
            bound: Some(0.0),
        },
    );
    assert_eq!(modulus_of_continuity(&k, 3.0).unwrap(), 0.0);
}

#[test]
fn modulus_sees_tail() {
    // Past the window the sequence is 0; σ(3) = 1 sits at distance 2 - √3 from index 4.
    let w = real(&[1.0, 1.0, 1.0, 1.0], Tail::Zero);
    assert_eq!(modulus_of_continuity(&w, 0.2).unwrap(), 0.0);
    assert_eq!(modulus_of_continuity(&w, 0.3).unwrap(), 1.0);
    let u = real(&[1.0, 1.0, 1.0, 1.0], Tail::Unknown);
    assert_eq!(modulus_of_continuity(&u, 0.3).unwrap(), 0.0);
}

#[test]
fn modulus_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let w = random_window(&mut rng, 120);
        let u = SeqWindow::new(w.values().to_vec(), Tail::Unknown).unwrap();
        for delta in [0.05, 0.2, 0.7, 1.5, 4.0] {
            let mut brute = 0.0f64;
            for j in 0..120 {
                for k in 0..120 {
                    if sqrt_dist(j, k) <= delta {
                        brute = brute.max((w.values()[j] - w.values()[k]).norm());
                    }
                }
            }
            assert_eq!(modulus_of_continuity(&u, delta).unwrap(), brute);
        }
    }
}

#[test]
fn lipschitz_examples() {
    let w = real(&[0.0, 1.0, 1.0], Tail::Unknown);
    assert_eq!(lipschitz_seminorm(&w).unwrap(), 1.0);
    let w = real(&[0.0, 0.0, 1.0], Tail::Unknown);
    assert_eq!(lipschitz_seminorm(&w).unwrap(), 2f64.sqrt());
    assert!(lipschitz_seminorm(&real(&[1.0], Tail::Zero)).is_err());
}

#[test]
fn shifts() {
    let s = shift_right(&real(&[1.0, 2.0], Tail::Zero));
    assert_eq!(s.values(), &[c(0.0), c(1.0), c(2.0)]);
    assert_eq!(s.tail(), Tail::Zero);
    let l = shift_left(&real(&[5.0, 7.0, 9.0], Tail::Unknown)).unwrap();
    assert_eq!(l.values(), &[c(7.0), c(9.0)]);
    assert!(shift_left(&real(&[5.0], Tail::Zero)).is_err());
}

#[test]
fn vp_examples() {
    assert_eq!(vp_radius(0, 0.9), 0);
    assert_eq!(vp_radius(4, 0.5), 1);
    let w = real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], Tail::Zero);
    let y = vp_smooth(&w, 0.5).unwrap();
    assert_eq!(y.values()[0], c(1.0));
    assert_eq!(y.values()[4], c(5.5));
    assert_eq!(y.values()[5], c(3.0));
    assert_eq!(y.len(), w.len());

    let k = real(
        &[0.25; 40],
        Tail::Limit {
            p: c(0.25),
            bound: Some(0.0),
        },
    );
    for delta in [0.1, 0.5, 0.99] {
        assert_eq!(vp_smooth(&k, delta).unwrap().values(), k.values());
    }
    assert!(vp_smooth(&w, 0.0).is_err());
    assert!(vp_smooth(&w, 1.0).is_err());
    assert!(vp_smooth(&w, 1.5).is_err());
    assert!(vp_smooth(&real(&[1.0], Tail::Unknown), 0.5).is_err());
}

#[test]
fn vp_prefix_stops_at_window_edge() {
    let w = real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], Tail::Unknown);
    let y = vp_smooth_prefix(&w, 0.5).unwrap();
    assert_eq!(y.len(), 5);
    assert_eq!(y.values()[4], c(5.5));
    assert_eq!(y.tail(), Tail::Unknown);
}

#[test]
fn vp_bounds_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let w = random_window(&mut rng, 300);
        for delta in [0.1, 0.3, 0.7] {
            let y = vp_smooth(&w, delta).unwrap();
            let diff = y
                .values()
                .iter()
                .zip(w.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff <= modulus_of_continuity(&w, delta).unwrap() + 1e-12);
            let lip = lipschitz_seminorm(&y).unwrap();
            assert!(lip <= 4.0 * 2f64.sqrt() * w.sup_norm() / delta + 1e-9);
        }
    }
}

#[test]
fn shift_difference_examples() {
    let k = real(&[3.0; 30], Tail::Unknown);
    assert_eq!(shift_difference_sup(&k, 2, 0).unwrap(), 0.0);
    let g = SeqGenerator::Geometric(0.5).window(60).unwrap();
    let d = shift_difference_sup(&g, 1, 20).unwrap();
    assert_eq!(d, 0.5f64.powi(21));
    assert!(shift_difference_sup(&k, 0, 0).is_err());
    assert!(shift_difference_sup(&k, 5, 25).is_err());
}

#[test]
fn cos_sqrt_shift_decay() {
    let w = SeqGenerator::CosSqrt.window(20_000).unwrap();
    assert!(shift_difference_sup(&w, 1, 10_000).unwrap() <= 0.005);
}

#[test]
fn min_index_examples() {
    assert_eq!(min_index_lower_bound(0.25).unwrap(), 3.0);
    assert!((min_index_lower_bound(0.1).unwrap() - 24.0).abs() < 1e-12);
    assert!(min_index_lower_bound(0.5).is_err());
    assert!(min_index_lower_bound(0.0).is_err());
    for j in 1..400usize {
        for k in (j + 1)..400 {
            let r = sqrt_dist(j, k);
            if r < 0.5 {
                assert!(j as f64 >= min_index_lower_bound(r).unwrap() - 1e-9);
            }
        }
    }
}

#[test]
fn target_json() {
    let w = target_from_json(r#"{"values":[1,[0,2]],"tail":{"kind":"limit","p":0.5}}"#).unwrap();
    assert_eq!(w.values(), &[c(1.0), Complex64::new(0.0, 2.0)]);
    assert_eq!(
        w.tail(),
        Tail::Limit {
            p: c(0.5),
            bound: None
        }
    );
    let back = serde_json::to_string(&TargetFile::from_window(&w)).unwrap();
    assert_eq!(target_from_json(&back).unwrap(), w);
    assert!(target_from_json(r#"{"values":[],"tail":{"kind":"zero"}}"#).is_err());
    assert!(target_from_json(r#"{"values":[1],"tail":{"kind":"weird"}}"#).is_err());
    assert!(matches!(target_from_json("nope"), Err(Error::Format(_))));
}

proptest! {
    #[test]
    fn modulus_monotone(values in prop::collection::vec(-5.0f64..5.0, 2..80),
                        d1 in 0.01f64..3.0, extra in 0.0f64..3.0) {
        let w = SeqWindow::from_real(&values, Tail::Zero).unwrap();
        prop_assert!(modulus_of_continuity(&w, d1).unwrap()
            <= modulus_of_continuity(&w, d1 + extra).unwrap());
    }

    #[test]
    fn shift_round_trip(values in prop::collection::vec(-5.0f64..5.0, 1..50)) {
        let w = SeqWindow::from_real(&values, Tail::Zero).unwrap();
        prop_assert_eq!(shift_left(&shift_right(&w)).unwrap(), w);
    }

    #[test]
    fn modulus_shift_invariance(values in prop::collection::vec(-5.0f64..5.0, 3..120),
                                delta in 0.05f64..2.0) {
        let w = SeqWindow::from_real(&values, Tail::Unknown).unwrap();
        let l = shift_left(&w).unwrap();
        let shifted = modulus_of_continuity(&l, delta).unwrap();
        prop_assert!(shifted <= modulus_of_continuity(&w, delta).unwrap() + 1e-15);
        prop_assert!(modulus_of_continuity(&w, delta / 6f64.sqrt()).unwrap() <= shifted + 1e-15);
    }
}
