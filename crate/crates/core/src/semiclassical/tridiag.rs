//! Complex symmetric tridiagonal systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `A x = rhs` with `A` complex symmetric tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub diag: Vec<Complex64>,
    /// `off[j] = A[j][j+1] = A[j+1][j]`.
    pub off: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl TridiagonalSystem {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 {
            return Err(Error::invalid("diag", "must not be empty"));
        }
        if self.off.len() + 1 != n {
            return Err(Error::LengthMismatch {
                field: "off",
                expected: n - 1,
                got: self.off.len(),
            });
        }
        if self.rhs.len() != n {
            return Err(Error::LengthMismatch {
                field: "rhs",
                expected: n,
                got: self.rhs.len(),
            });
        }
        Ok(())
    }

    /// Full solution by forward elimination and back substitution, no pivoting.
    pub fn solve(&self) -> Result<Vec<Complex64>> {
        self.check_shape()?;
        let n = self.len();
        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut y = vec![Complex64::new(0.0, 0.0); n];

        let mut pivot = self.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = self.diag[i] - self.off[i - 1] * upper[i - 1];
            }
            if pivot == Complex64::new(0.0, 0.0) || !pivot.is_finite() {
                return Err(Error::Singular { row: i });
            }
            if i + 1 < n {
                upper[i] = self.off[i] / pivot;
            }
            let carried = if i > 0 { self.off[i - 1] * y[i - 1] } else { Complex64::new(0.0, 0.0) };
            y[i] = (self.rhs[i] - carried) / pivot;
        }
        for i in (0..n - 1).rev() {
            y[i] = y[i] - upper[i] * y[i + 1];
        }
        Ok(y)
    }

    /// First unknown only, in O(1) extra memory.
    ///
    /// Falls back to [`Self::solve`] when the right-hand side has support
    /// beyond row 0.
    pub fn solve_head(&self) -> Result<Complex64> {
        self.check_shape()?;
        if self.rhs[1..].iter().any(|r| *r != Complex64::new(0.0, 0.0)) {
            return Ok(self.solve()?[0]);
        }
        head_response(self.len(), |j| self.diag[j], |j| self.off[j], self.rhs[0])
    }
}

/// First component of the solution of a symmetric tridiagonal system whose
/// right-hand side is `rhs0` on row 0 and zero elsewhere.
///
/// Runs the elimination from the far end towards row 0 as a ratio of trailing
/// determinants, `x_0 = rhs0 · D_1 / D_0`, with
/// `D_j = diag_j D_(j+1) − off_j² D_(j+2)`. Tracking determinants rather than
/// their ratios keeps a vanishing trailing pivot (a lossless dark resonance)
/// finite. The pair is rescaled whenever it drifts towards over- or underflow.
/// A zero coupling decouples everything behind it, so the sweep starts at the
/// first zero off-diagonal.
pub(crate) fn head_response(
    len: usize,
    diag: impl Fn(usize) -> Complex64,
    off: impl Fn(usize) -> Complex64,
    rhs0: Complex64,
) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let last = (0..len.saturating_sub(1)).find(|&j| off(j) == zero).unwrap_or(len - 1);

    // (D_(j+1), D_(j+2)) before each step
    let mut next = one;
    let mut after = zero;
    for j in (0..=last).rev() {
        let o = if j < last { off(j) } else { zero };
        let current = diag(j) * next - o * o * after;
        after = next;
        next = current;
        let scale = next.norm().max(after.norm());
        if !(1e-150..=1e150).contains(&scale) && scale > 0.0 {
            next /= scale;
            after /= scale;
        }
    }
    // next = D_0, after = D_1
    let det = next;
    let minor = after;
    if det == zero || !det.is_finite() {
        return Err(Error::Singular { row: 0 });
    }
    Ok(rhs0 * minor / det)
}
