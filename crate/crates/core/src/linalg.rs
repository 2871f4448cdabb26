//! Small fixed-size vector and matrix types for three-dimensional work.
//!
//! `Vector3` is a displacement in R^3 and `SpacePoint` is a point of affine
//! space. Subtracting two points gives a vector; adding a vector to a point
//! gives a point. Euclidean operations live here; the Lorentzian form is in
//! [`crate::lorentz`].

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector3(pub [f64; 3]);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpacePoint(pub [f64; 3]);

impl Vector3 {
    pub const ZERO: Vector3 = Vector3([0.0; 3]);
    pub const E1: Vector3 = Vector3([1.0, 0.0, 0.0]);
    pub const E2: Vector3 = Vector3([0.0, 1.0, 0.0]);
    pub const E3: Vector3 = Vector3([0.0, 0.0, 1.0]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vector3([x, y, z])
    }

    pub fn dot(&self, other: &Vector3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Euclidean cross product.
    pub fn cross(&self, other: &Vector3) -> Vector3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Vector3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Euclidean unit vector, or `None` for a zero vector.
    pub fn normalized(&self) -> Option<Vector3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self * (1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }
}

impl SpacePoint {
    pub const ORIGIN: SpacePoint = SpacePoint([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        SpacePoint([x, y, z])
    }

    /// Position vector relative to the origin.
    pub fn to_vector(self) -> Vector3 {
        Vector3(self.0)
    }

    pub fn from_vector(v: Vector3) -> Self {
        SpacePoint(v.0)
    }

    pub fn distance(&self, other: &SpacePoint) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vector3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Index<usize> for SpacePoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, o: Vector3) -> Vector3 {
        Vector3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vector3 {
    fn add_assign(&mut self, o: Vector3) {
        *self = *self + o;
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, o: Vector3) -> Vector3 {
        Vector3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        Vector3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vector3 {
    type Output = Vector3;
    fn mul(self, s: f64) -> Vector3 {
        Vector3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Mul<Vector3> for f64 {
    type Output = Vector3;
    fn mul(self, v: Vector3) -> Vector3 {
        v * self
    }
}

impl Add<Vector3> for SpacePoint {
    type Output = SpacePoint;
    fn add(self, v: Vector3) -> SpacePoint {
        SpacePoint((self.to_vector() + v).0)
    }
}

impl Sub<Vector3> for SpacePoint {
    type Output = SpacePoint;
    fn sub(self, v: Vector3) -> SpacePoint {
        SpacePoint((self.to_vector() - v).0)
    }
}

impl Sub for SpacePoint {
    type Output = Vector3;
    fn sub(self, o: SpacePoint) -> Vector3 {
        self.to_vector() - o.to_vector()
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Diagonal matrix of the Lorentzian form.
    pub const LORENTZ: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);

    pub fn from_row_major(entries: [f64; 9]) -> Self {
        Mat3([
            [entries[0], entries[1], entries[2]],
            [entries[3], entries[4], entries[5]],
            [entries[6], entries[7], entries[8]],
        ])
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }

    pub fn row(&self, i: usize) -> Vector3 {
        Vector3(self.0[i])
    }

    pub fn column(&self, j: usize) -> Vector3 {
        Vector3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn determinant(&self) -> f64 {
        self.row(0).dot(&self.row(1).cross(&self.row(2)))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn sub_scaled_identity(&self, s: f64) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            m.0[i][i] -= s;
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|x| x.is_finite())
    }

    /// Euclidean null direction of a rank-2 matrix: the largest cross
    /// product among pairs of rows. `None` when every pair is degenerate.
    pub fn kernel_direction(&self) -> Option<Vector3> {
        let rows = [self.row(0), self.row(1), self.row(2)];
        let candidates = [
            rows[0].cross(&rows[1]),
            rows[0].cross(&rows[2]),
            rows[1].cross(&rows[2]),
        ];
        let best = candidates
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
        best.normalized()
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

impl Mul<Vector3> for Mat3 {
    type Output = Vector3;
    fn mul(self, v: Vector3) -> Vector3 {
        Vector3([self.row(0).dot(&v), self.row(1).dot(&v), self.row(2).dot(&v)])
    }
}
