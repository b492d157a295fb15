use num_traits::{Signed, Zero};
use pdt_core::cvp::{closest_vectors, covering_box, interior_point, points_at_most};
use pdt_core::exact::{definiteness, frac, rat, to_rat_vec, Definiteness, Mat, Rat};
use pdt_core::qfunc::QuadraticFunction;
use proptest::prelude::*;

fn box_iter(b: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in b {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn sym(n: usize, e: &[i64]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = rat(e[i * n + j]);
            m[(j, i)] = rat(e[i * n + j]);
        }
    }
    m
}

fn pd_instance() -> impl Strategy<Value = (Mat, Vec<Rat>)> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(-5i64..=5, n * n), prop::collection::vec((-8i64..=8, 1i64..=4), n)))
        .prop_filter_map("positive definite", |(n, e, c)| {
            let q = sym(n, &e);
            definiteness(&q).unwrap().is_positive_definite().then(|| (q, c.iter().map(|&(p, d)| frac(p, d)).collect()))
        })
}

fn dist(q: &Mat, c: &[Rat], z: &[i64]) -> Rat {
    let d: Vec<Rat> = to_rat_vec(z).iter().zip(c).map(|(a, b)| a - b).collect();
    q.quad(&d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closest_vectors_match_box_enumeration((q, c) in pd_instance()) {
        let b = covering_box(&q, &c).unwrap();
        let volume: i64 = b.iter().map(|(lo, hi)| hi - lo + 1).product();
        prop_assume!(volume <= 200_000);
        let r = closest_vectors(&q, &c).unwrap();
        let mut best: Option<Rat> = None;
        let mut arg = Vec::new();
        for z in box_iter(&b) {
            let d = dist(&q, &c, &z);
            match &best {
                Some(m) if &d > m => {}
                Some(m) if &d == m => arg.push(z),
                _ => {
                    best = Some(d);
                    arg = vec![z];
                }
            }
        }
        arg.sort();
        let mut got = r.minimizers.clone();
        got.sort();
        prop_assert_eq!(best.unwrap(), r.squared_distance);
        prop_assert_eq!(got, arg);
    }

    #[test]
    fn points_at_most_symmetric_under_reflection(
        (q, half) in pd_instance().prop_flat_map(|(q, _)| { let n = q.rows(); (Just(q), prop::collection::vec(-3i64..=3, n)) }),
        bound in 0i64..=6,
    ) {
        let n = q.rows();
        let c: Vec<Rat> = half.iter().map(|&h| frac(h, 2)).collect();
        // q[x − c] as a function of x
        let lin: Vec<Rat> = q.mul_vec(&c).into_iter().map(|v| v * rat(-2)).collect();
        let f = QuadraticFunction::new(q.clone(), lin, q.quad(&c)).unwrap();
        let pts = points_at_most(&f, &rat(bound)).unwrap();
        for z in &pts {
            prop_assert!(f.eval_int(z) <= rat(bound));
            let mirror: Vec<i64> = (0..n).map(|i| half[i] - z[i]).collect();
            prop_assert!(pts.binary_search(&mirror).is_ok());
        }
    }

    #[test]
    fn interior_point_certifies_sign(
        (n, e, lin, k) in (1usize..=3).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(-3i64..=3, n * n),
            prop::collection::vec(-4i64..=4, n),
            -3i64..=3,
        ))
    ) {
        let q = sym(n, &e);
        let f = QuadraticFunction::new(q.clone(), to_rat_vec(&lin), rat(k)).unwrap();
        match interior_point(&f) {
            Some(z) => prop_assert!(f.eval_int(&z).is_negative()),
            None => {
                let indefinite = matches!(definiteness(&q).unwrap(), Definiteness::Indefinite { .. });
                prop_assert!(!indefinite);
                for z in box_iter(&vec![(-6, 6); n]) {
                    prop_assert!(!f.eval_int(&z).is_negative());
                }
            }
        }
    }
}

#[test]
fn identity_center_half_has_four_minimizers() {
    let r = closest_vectors(&Mat::identity(2), &[frac(1, 2), frac(1, 2)]).unwrap();
    assert_eq!(r.minimizers.len(), 4);
    assert_eq!(r.squared_distance, frac(1, 2));
}

#[test]
fn non_definite_forms_are_rejected() {
    let q = Mat::from_ints(2, 2, &[1, 0, 0, 0]);
    assert!(closest_vectors(&q, &[Rat::zero(), Rat::zero()]).is_err());
}
