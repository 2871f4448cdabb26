//! Nearest point of a translated finitely generated cone.
//!
//! Minimises `|offset + sum c_i g_i|` over `c >= 0`. An optimum is always
//! supported on at most three linearly independent generators, so the
//! solver enumerates those supports, solves the unconstrained least-squares
//! problem on each, and keeps the best candidate with nonnegative
//! coefficients. Every kept candidate is a point of the cone, hence the
//! minimum over them is the exact optimum.

use crate::linalg::Vector3;

#[derive(Clone, Debug, PartialEq)]
pub struct ConeProjection {
    /// Coefficient of each input generator.
    pub coefficients: Vec<f64>,
    /// `offset + sum c_i g_i` at the optimum.
    pub residual: Vector3,
}

impl ConeProjection {
    pub fn distance(&self) -> f64 {
        self.residual.norm()
    }
}

pub fn nearest_in_cone(offset: Vector3, generators: &[Vector3]) -> ConeProjection {
    let n = generators.len();
    let units: Vec<Option<(Vector3, f64)>> = generators
        .iter()
        .map(|g| g.normalized().map(|u| (u, g.norm())))
        .collect();
    let mut best = ConeProjection {
        coefficients: vec![0.0; n],
        residual: offset,
    };
    let mut best_norm = offset.norm();
    let mut support = Vec::with_capacity(3);
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() > 3 {
            continue;
        }
        support.clear();
        support.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let Some(basis) = support
            .iter()
            .map(|&i| units[i].map(|(u, _)| u))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let Some(coeffs) = least_squares(&basis, &offset) else {
            continue;
        };
        if coeffs.iter().any(|&c| c < 0.0) {
            continue;
        }
        let residual = basis
            .iter()
            .zip(&coeffs)
            .fold(offset, |acc, (g, c)| acc + *g * *c);
        let r = residual.norm();
        if r < best_norm {
            best_norm = r;
            let mut coefficients = vec![0.0; n];
            for (&i, c) in support.iter().zip(&coeffs) {
                coefficients[i] = c / units[i].expect("checked above").1;
            }
            best = ConeProjection {
                coefficients,
                residual,
            };
        }
    }
    best
}

/// Coefficients minimising `|offset + sum c_i b_i|` for independent unit
/// vectors `b_i`, or `None` when they are (nearly) dependent.
fn least_squares(basis: &[Vector3], offset: &Vector3) -> Option<Vec<f64>> {
    let k = basis.len();
    let mut gram = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = basis[i].dot(&basis[j]);
        }
        rhs[i] = -basis[i].dot(offset);
    }
    solve(&mut gram, &mut rhs, k)?;
    Some(rhs[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on the leading `k x k` block.
fn solve(a: &mut [[f64; 3]; 3], b: &mut [f64; 3], k: usize) -> Option<()> {
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..k).rev() {
        let s: f64 = (col + 1..k).map(|c| a[col][c] * b[c]).sum();
        b[col] = (b[col] - s) / a[col][col];
    }
    Some(())
}
