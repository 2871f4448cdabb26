//! Double-double evaluation of isometry products.
//!
//! Products such as `a^n b a^-n` have modest eigenvalues but entries of
//! size `|a|^(2n)`, so their eigenvectors cannot be recovered from an `f64`
//! matrix once `n` grows. Here the factors are first polished to exact
//! isometries at double-double precision, multiplied at that precision, and
//! the null eigenvectors extracted the same way as in
//! [`crate::isometry::LinearIsometry::hyperbolic_data`].

use std::ops::Mul;

use twofloat::TwoFloat;

use crate::isometry::LinearIsometry;
use crate::linalg::Mat3;

type Dd = TwoFloat;

const ZERO: Dd = TwoFloat::from_f64(0.0);

#[derive(Clone, Copy, Debug)]
pub struct PreciseIsometry([[Dd; 3]; 3]);

impl PreciseIsometry {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Dd::from(1.0);
        }
        PreciseIsometry(m)
    }

    /// Lift an `f64` isometry and project it onto the isometry group with the
    /// iteration `X <- (X + J X^-T J) / 2`, which converges quadratically.
    pub fn refine(g: &LinearIsometry) -> Self {
        let m = g.matrix().0;
        let mut x = PreciseIsometry(m.map(|row| row.map(Dd::from)));
        for _ in 0..3 {
            let cof = x.cofactor();
            let det = x.determinant();
            let mut next = x.0;
            for i in 0..3 {
                for j in 0..3 {
                    let t = cof[i][j] / det * Dd::from(sign(i) * sign(j));
                    next[i][j] = (x.0[i][j] + t) * Dd::from(0.5);
                }
            }
            x = PreciseIsometry(next);
        }
        x
    }

    /// Inverse `J X^T J`.
    pub fn inverse(&self) -> Self {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[j][i] * Dd::from(sign(i) * sign(j));
            }
        }
        PreciseIsometry(m)
    }

    pub fn to_f64(&self) -> LinearIsometry {
        LinearIsometry::from_matrix_unchecked(Mat3(self.0.map(|row| row.map(f64::from))))
    }

    fn determinant(&self) -> Dd {
        let c = self.cofactor();
        self.0[0][0] * c[0][0] + self.0[0][1] * c[0][1] + self.0[0][2] * c[0][2]
    }

    fn cofactor(&self) -> [[Dd; 3]; 3] {
        let m = &self.0;
        let mut c = [[ZERO; 3]; 3];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                *cell = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            }
        }
        c
    }

    fn trace(&self) -> Dd {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Chord distance between the null eigenvectors, or `None` when the
    /// element is not hyperbolic beyond `tol`.
    pub fn hyperbolicity(&self, tol: f64) -> Option<f64> {
        let half_trace = self.trace() - Dd::from(1.0);
        if f64::from(half_trace) <= 2.0 + tol {
            return None;
        }
        let disc = (half_trace * half_trace - Dd::from(4.0)).sqrt();
        let expansion = (half_trace + disc) * Dd::from(0.5);
        let plus = expanding_direction(&self.0, expansion)?;
        let minus = expanding_direction(&self.inverse().0, expansion)?;
        let d: Dd = (0..3)
            .map(|k| (plus[k] - minus[k]) * (plus[k] - minus[k]))
            .fold(ZERO, |a, b| a + b);
        Some(f64::from(d.sqrt()))
    }
}

fn sign(i: usize) -> f64 {
    if i == 2 {
        -1.0
    } else {
        1.0
    }
}

fn expanding_direction(m: &[[Dd; 3]; 3], expansion: Dd) -> Option<[Dd; 3]> {
    let mut rows = *m;
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] -= expansion;
    }
    let cross = |a: &[Dd; 3], b: &[Dd; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let size = |v: &[Dd; 3]| v.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>();
    let best = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ]
    .into_iter()
    .max_by(|a, b| size(a).total_cmp(&size(b)))?;
    if f64::from(best[2]) == 0.0 {
        return None;
    }
    Some(best.map(|x| x / best[2]))
}

impl Mul for PreciseIsometry {
    type Output = PreciseIsometry;
    fn mul(self, o: PreciseIsometry) -> PreciseIsometry {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).fold(ZERO, |acc, k| acc + self.0[i][k] * o.0[k][j]);
            }
        }
        PreciseIsometry(out)
    }
}
