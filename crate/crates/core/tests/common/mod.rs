#![allow(dead_code)]

use pdt_core::exact::{IMat, Int};
use rand::Rng;

/// Product of random elementary integer matrices and sign flips.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R) -> IMat {
    let mut m = IMat::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) {
            m[(0, 0)] = Int::from(-1);
        }
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let s = Int::from(rng.gen_range(-1i64..=1));
        for c in 0..n {
            let v = &m[(j, c)] * &s;
            m[(i, c)] += v;
        }
    }
    let i = rng.gen_range(0..n);
    if rng.gen_bool(0.5) {
        for c in 0..n {
            m[(i, c)] = -&m[(i, c)];
        }
    }
    m
}

pub fn random_shift<R: Rng>(n: usize, rng: &mut R) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-3..=3)).collect()
}
