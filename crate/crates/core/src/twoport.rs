//! 2×2 complex matrices and the ABCD / S / Y conversions used by the ladder solver.

use std::ops::Mul;

use num_complex::Complex64;

/// Row-major 2×2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Inverse, or `None` when the determinant vanishes relative to the entries.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        let scale = self.max_norm().powi(2).max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-14 * scale {
            return None;
        }
        let inv = det.inv();
        Some(Mat2 {
            a: self.d * inv,
            b: -self.b * inv,
            c: -self.c * inv,
            d: self.a * inv,
        })
    }

    /// Series impedance between the ports.
    pub fn series(z: Complex64) -> Self {
        Mat2 {
            b: z,
            ..Mat2::IDENTITY
        }
    }

    /// Shunt admittance to ground.
    pub fn shunt(y: Complex64) -> Self {
        Mat2 {
            c: y,
            ..Mat2::IDENTITY
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// S-parameters of a two-port, `[[s11, s12], [s21, s22]]`.
pub type SMatrix = Mat2;

/// ABCD → S at real reference impedance `z0`.
pub fn abcd_to_s(t: &Mat2, z0: f64) -> SMatrix {
    let (a, b, c, d) = (t.a, t.b / z0, t.c * z0, t.d);
    let den = a + b + c + d;
    let inv = den.inv();
    Mat2 {
        a: (a + b - c - d) * inv,
        b: 2.0 * t.det() * inv,
        c: 2.0 * inv,
        d: (-a + b - c + d) * inv,
    }
}

/// S → Y at `z0`: `Y = (1/z0)·(I − S)(I + S)⁻¹`. `None` at the conversion singularity.
pub fn s_to_y(s: &SMatrix, z0: f64) -> Option<Mat2> {
    let i_plus = Mat2::new(ONE + s.a, s.b, s.c, ONE + s.d);
    let i_minus = Mat2::new(ONE - s.a, -s.b, -s.c, ONE - s.d);
    let inv = i_plus.inverse()?;
    let y = i_minus * inv;
    let g = 1.0 / z0;
    Some(Mat2::new(y.a * g, y.b * g, y.c * g, y.d * g))
}

/// Y → S at `z0`: `S = (I − z0·Y)(I + z0·Y)⁻¹`. `None` when `I + z0·Y` is singular.
pub fn y_to_s(y: &Mat2, z0: f64) -> Option<SMatrix> {
    let zy = Mat2::new(y.a * z0, y.b * z0, y.c * z0, y.d * z0);
    let i_plus = Mat2::new(ONE + zy.a, zy.b, zy.c, ONE + zy.d);
    let i_minus = Mat2::new(ONE - zy.a, -zy.b, -zy.c, ONE - zy.d);
    Some(i_minus * i_plus.inverse()?)
}
