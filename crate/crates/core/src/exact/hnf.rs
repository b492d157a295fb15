use super::{IMat, Int, Matrix};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn combine_rows(a: &mut [Vec<Int>], r: usize, i: usize, x: &Int, y: &Int, p: &Int, q: &Int) {
    // (row_r, row_i) <- (x·row_r + y·row_i, -q·row_r + p·row_i), determinant x·p + y·q = 1.
    let (lo, hi) = a.split_at_mut(i);
    let rr = &mut lo[r];
    let ri = &mut hi[0];
    for (u, v) in rr.iter_mut().zip(ri.iter_mut()) {
        let nu = x * &*u + y * &*v;
        let nv = p * &*v - q * &*u;
        *u = nu;
        *v = nv;
    }
}

/// Row Hermite normal form: returns `(H, U)` with `H = U·m`, `U` unimodular,
/// pivots positive and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IMat) -> (IMat, IMat) {
    let rows = m.rows();
    let cols = m.cols();
    // Work on [m | I] so the row operations accumulate into U.
    let mut a: Vec<Vec<Int>> = (0..rows)
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.extend((0..rows).map(|j| if j == r { Int::one() } else { Int::zero() }));
            row
        })
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let e = a[r][c].extended_gcd(&a[i][c]);
            let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
            if g.is_negative() {
                g = -g;
                x = -x;
                y = -y;
            }
            let p = &a[r][c] / &g;
            let q = &a[i][c] / &g;
            combine_rows(&mut a, r, i, &x, &y, &p, &q);
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for v in a[r].iter_mut() {
                *v = -&*v;
            }
        }
        let piv = a[r][c].clone();
        for i in 0..r {
            let f = a[i][c].div_floor(&piv);
            if !f.is_zero() {
                let pr = a[r].clone();
                for (u, v) in a[i].iter_mut().zip(pr.iter()) {
                    *u -= &f * v;
                }
            }
        }
        r += 1;
    }
    let h: Vec<Vec<Int>> = a.iter().map(|row| row[..cols].to_vec()).collect();
    let u: Vec<Vec<Int>> = a.iter().map(|row| row[cols..].to_vec()).collect();
    (Matrix::from_rows(cols, &h), Matrix::from_rows(rows, &u))
}

/// A unimodular change of basis of `Zⁿ` adapted to the kernel of an integer matrix:
/// `complement ∪ kernel` is a basis of `Zⁿ` and `kernel` spans `ker(m) ∩ Zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularSplit {
    pub complement: Vec<Vec<Int>>,
    pub kernel: Vec<Vec<Int>>,
}

impl UnimodularSplit {
    /// Columns `complement..., kernel...` as an `n × n` unimodular matrix.
    pub fn basis_matrix(&self) -> IMat {
        let n = self.complement.len() + self.kernel.len();
        let mut out = IMat::zeros(n, n);
        for (j, v) in self.complement.iter().chain(self.kernel.iter()).enumerate() {
            for i in 0..n {
                out[(i, j)] = v[i].clone();
            }
        }
        out
    }
}

/// Saturated integer kernel lattice of `m` together with a lattice complement.
pub fn integer_kernel(m: &IMat) -> UnimodularSplit {
    let (h, u) = hnf(&m.transpose());
    let mut complement = Vec::new();
    let mut kernel = Vec::new();
    for r in 0..h.rows() {
        let row = u.row(r).to_vec();
        if h.row(r).iter().all(Zero::is_zero) {
            kernel.push(row);
        } else {
            complement.push(row);
        }
    }
    UnimodularSplit { complement, kernel }
}
