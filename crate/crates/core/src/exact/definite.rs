use super::{nullspace, primitive, rat, ExactError, Int, Mat, Rat};
use num_traits::{Signed, Zero};

/// Sign classification of a symmetric rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    /// Singular and positive semidefinite; `kernel` is a primitive integer basis of the kernel.
    PositiveSemidefinite { kernel: Vec<Vec<Int>> },
    /// `negative_direction` is a primitive integer `x` with `xᵀ·q·x < 0`.
    Indefinite { negative_direction: Vec<Int> },
}

impl Definiteness {
    pub fn is_positive_definite(&self) -> bool {
        matches!(self, Definiteness::PositiveDefinite)
    }
}

struct Pivot {
    index: usize,
    /// `(j, S_pj / S_pp)` over coordinates still active when `index` was eliminated.
    multipliers: Vec<(usize, Rat)>,
}

/// Classifies `q` by symmetric Gaussian elimination (an exact LDLᵀ with
/// diagonal pivoting). Negative pivots, or a zero pivot with a nonzero row,
/// produce an explicit negative direction.
pub fn definiteness(q: &Mat) -> Result<Definiteness, ExactError> {
    if !q.is_symmetric() {
        return Err(ExactError::NotSymmetric);
    }
    let n = q.rows();
    let mut s = q.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<Pivot> = Vec::new();

    loop {
        if let Some(&i) = active.iter().find(|&&i| s[(i, i)].is_negative()) {
            let mut w = vec![Rat::zero(); n];
            w[i] = rat(1);
            return Ok(indefinite(q, &pivots, w));
        }
        let Some(pos) = active.iter().position(|&i| s[(i, i)].is_positive()) else {
            break;
        };
        let p = active.remove(pos);
        let d = s[(p, p)].clone();
        let multipliers: Vec<(usize, Rat)> =
            active.iter().map(|&j| (j, &s[(p, j)] / &d)).collect();
        for &(j, ref mj) in &multipliers {
            if mj.is_zero() {
                continue;
            }
            for &(k, _) in &multipliers {
                let spk = s[(p, k)].clone();
                if !spk.is_zero() {
                    s[(j, k)] -= mj * spk;
                }
            }
        }
        pivots.push(Pivot { index: p, multipliers });
    }

    // Remaining active block has zero diagonal.
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            let sij = &s[(i, j)];
            if !sij.is_zero() {
                let mut w = vec![Rat::zero(); n];
                w[i] = rat(1);
                w[j] = if sij.is_positive() { rat(-1) } else { rat(1) };
                return Ok(indefinite(q, &pivots, w));
            }
        }
    }
    if active.is_empty() {
        Ok(Definiteness::PositiveDefinite)
    } else {
        Ok(Definiteness::PositiveSemidefinite { kernel: nullspace(q) })
    }
}

fn indefinite(q: &Mat, pivots: &[Pivot], mut w: Vec<Rat>) -> Definiteness {
    // Zero every completed square so that only the negative residual remains.
    for piv in pivots.iter().rev() {
        let mut s = Rat::zero();
        for (j, m) in &piv.multipliers {
            if !w[*j].is_zero() && !m.is_zero() {
                s += m * &w[*j];
            }
        }
        w[piv.index] = -s;
    }
    debug_assert!(q.quad(&w).is_negative());
    Definiteness::Indefinite { negative_direction: short_negative(q, &w) }
}

/// A short integer vector with `q[x] < 0`, found by rounding scaled copies of
/// the direction `w` (normalized to maximum entry 1).
fn short_negative(q: &Mat, w: &[Rat]) -> Vec<Int> {
    let m = w.iter().map(|x| x.abs()).max().expect("nonempty");
    let unit: Vec<Rat> = w.iter().map(|x| x / &m).collect();
    let mut s = Int::from(1);
    loop {
        let x: Vec<Rat> = unit.iter().map(|u| (u * Rat::from_integer(s.clone())).round()).collect();
        if q.quad(&x).is_negative() {
            return primitive(&x);
        }
        s *= 2;
    }
}
