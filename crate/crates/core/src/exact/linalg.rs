use super::{clear_denominators, lcm_of_denominators, primitive, Int, Mat, Rat};
use num_traits::{One, Zero};

/// Fraction-free row echelon form of an integer-scaled matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero echelon rows; `rows[k]` has its pivot at `pivots[k]`.
    pub rows: Vec<Vec<Int>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
    swaps: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the right kernel as primitive integer vectors, one per free column.
    pub fn kernel(&self) -> Vec<Vec<Int>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![Rat::zero(); self.cols];
                x[free] = Rat::one();
                for (k, &pc) in self.pivots.iter().enumerate().rev() {
                    let row = &self.rows[k];
                    let mut s = Rat::zero();
                    for j in pc + 1..self.cols {
                        if !row[j].is_zero() && !x[j].is_zero() {
                            s += Rat::from_integer(row[j].clone()) * &x[j];
                        }
                    }
                    x[pc] = -s / Rat::from_integer(row[pc].clone());
                }
                primitive(&x)
            })
            .collect()
    }
}

/// Bareiss elimination of integer rows.
pub fn echelon_int(mut a: Vec<Vec<Int>>, cols: usize) -> Echelon {
    let m = a.len();
    let mut prev = Int::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let piv = a[r][c].clone();
        let (top, bottom) = a.split_at_mut(r + 1);
        let prow = &top[r];
        for row in bottom.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            if f.is_zero() {
                if piv != prev {
                    for x in row[c + 1..].iter_mut() {
                        if !x.is_zero() {
                            *x = &piv * &*x / &prev;
                        }
                    }
                }
                continue;
            }
            for j in c + 1..cols {
                let v = &piv * &row[j] - &f * &prow[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots, cols, swaps }
}

pub(crate) fn scaled_rows(m: &Mat) -> Vec<Vec<Int>> {
    (0..m.rows()).map(|r| clear_denominators(m.row(r))).collect()
}

pub fn echelon(m: &Mat) -> Echelon {
    echelon_int(scaled_rows(m), m.cols())
}

/// Rank over the rationals.
pub fn rank(m: &Mat) -> usize {
    echelon(m).rank()
}

/// Basis of the right kernel with primitive integer columns; empty iff full column rank.
pub fn nullspace(m: &Mat) -> Vec<Vec<Int>> {
    echelon(m).kernel()
}

/// Exact solution of `a·x = b`, or `None` when the system is inconsistent.
/// Underdetermined systems get the particular solution with free variables zero.
pub fn solve(a: &Mat, b: &Mat) -> Option<Mat> {
    assert_eq!(a.rows(), b.rows(), "right-hand side row count");
    let n = a.cols();
    let k = b.cols();
    let rows: Vec<Vec<Int>> = (0..a.rows())
        .map(|r| {
            let mut row: Vec<Rat> = a.row(r).to_vec();
            row.extend_from_slice(b.row(r));
            clear_denominators(&row)
        })
        .collect();
    let e = echelon_int(rows, n + k);
    if e.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    let mut x = Mat::zeros(n, k);
    for j in 0..k {
        for (idx, &pc) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[idx];
            let mut s = Rat::from_integer(row[n + j].clone());
            for l in pc + 1..n {
                if !row[l].is_zero() {
                    s -= Rat::from_integer(row[l].clone()) * &x[(l, j)];
                }
            }
            x[(pc, j)] = s / Rat::from_integer(row[pc].clone());
        }
    }
    Some(x)
}

pub fn det(m: &Mat) -> Rat {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Rat::one();
    }
    let mut scale = Int::one();
    let rows: Vec<Vec<Int>> = (0..n)
        .map(|r| {
            scale *= lcm_of_denominators(m.row(r));
            clear_denominators(m.row(r))
        })
        .collect();
    let e = echelon_int(rows, n);
    if e.rank() < n {
        return Rat::zero();
    }
    let mut d = e.rows[n - 1][n - 1].clone();
    if e.swaps % 2 == 1 {
        d = -d;
    }
    Rat::new(d, scale)
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    assert!(m.is_square());
    if rank(m) < m.rows() {
        return None;
    }
    solve(m, &Mat::identity(m.rows()))
}

#[cfg(test)]
mod tests {
    use super::super::{frac, int_to_rat_vec, rat};
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Mat::identity(2)), 2);
        assert_eq!(rank(&Mat::zeros(3, 3)), 0);
        assert_eq!(rank(&Mat::from_ints(2, 2, &[1, 2, 2, 4])), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&Mat::identity(3)).is_empty());
        let k = nullspace(&Mat::from_ints(1, 2, &[1, 1]));
        assert_eq!(k, vec![ints(&[-1, 1])]);
        let k = nullspace(&Mat::from_ints(2, 2, &[1, 2, 2, 4]));
        assert_eq!(k, vec![ints(&[-2, 1])]);
    }

    #[test]
    fn solve_examples() {
        let b = Mat::from_ints(2, 1, &[5, -7]);
        assert_eq!(solve(&Mat::identity(2), &b), Some(b.clone()));
        let x = solve(&Mat::from_ints(1, 1, &[2]), &Mat::from_ints(1, 1, &[3])).unwrap();
        assert_eq!(x[(0, 0)], frac(3, 2));
        let inconsistent = solve(&Mat::from_ints(2, 2, &[1, 1, 1, 1]), &Mat::from_ints(2, 1, &[0, 1]));
        assert!(inconsistent.is_none());
    }

    #[test]
    fn det_handles_swaps_and_fractions() {
        assert_eq!(det(&Mat::from_ints(2, 2, &[0, 1, 1, 0])), rat(-1));
        let m = Mat::from_vec(2, 2, vec![frac(1, 2), rat(1), rat(3), frac(1, 3)]);
        assert_eq!(det(&m), frac(1, 6) - rat(3));
        let a = Mat::from_ints(3, 3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]);
        assert_eq!(det(&a), rat(4));
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(3));
    }

    fn small_matrix() -> impl Strategy<Value = Mat> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| Mat::from_ints(r, c, &v))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = nullspace(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.cols());
            for v in &k {
                let image = m.mul_vec(&int_to_rat_vec(v));
                prop_assert!(image.iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn solutions_satisfy_system(m in small_matrix(), seed in proptest::collection::vec(-3i64..4, 6)) {
            // Right-hand side in the column space, so the system is consistent.
            let x0: Vec<Rat> = seed.iter().take(m.cols()).map(|&v| rat(v)).collect();
            let b = Mat::from_vec(m.rows(), 1, m.mul_vec(&x0));
            let x = solve(&m, &b).expect("consistent by construction");
            prop_assert_eq!(m.mul(&x), b);
        }
    }
}
