//! The quadratic space M_2(R) of signature (2,2).
//!
//! An integral matrix M = (a,b;c,d) pairs with a point z = (z1,z2) in H^2
//! through the kernel
//!
//!   R(z,M) = |a - b z2 - c z1 + d z1 z2|^2 / (2 y1 y2),
//!
//! whose vanishing cuts out the Hecke correspondence T(det M). The
//! positive definite majorant of the quadratic form (M,M) = 2 det M is
//! 2R(z,M) + (M,M) = ||A(z)^{-1} a||^2, with A(z) the upper triangular
//! frame matrix attached to z. Enumeration of lattice points under a
//! majorant bound is done in the sheared coordinates
//!
//!   w1 = a - x2 b - x1 c + x1 x2 d,  w2 = b - x1 d,
//!   w3 = c - x2 d,                   w4 = d,
//!
//! in which A(z)^{-1} a = (w1/t, w2/s, s w3, t w4) and the Gaussian
//! majorant factorizes exactly, giving computable tail bounds.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// An integral 2x2 matrix, an element of the lattice L = M_2(Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatMat {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl LatMat {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// The quadratic form (M,M) = 2 det M.
    pub fn quad_form(&self) -> i64 {
        2 * self.det()
    }

    /// Euclidean norm squared a^2 + b^2 + c^2 + d^2 of the coordinate vector.
    pub fn norm0(&self) -> i64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }
}

/// A point z = (z1, z2) in the product of two upper half planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointH2 {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl PointH2 {
    /// Both imaginary parts must be positive.
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(y1 > 0.0 && y2 > 0.0) || !(y1.is_finite() && y2.is_finite()) {
            return Err(Error::Domain(format!(
                "PointH2 requires y1, y2 > 0, got y1={y1}, y2={y2}"
            )));
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    pub fn from_complex(z1: Complex64, z2: Complex64) -> Result<Self> {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    pub fn z1(&self) -> Complex64 {
        Complex64::new(self.x1, self.y1)
    }

    pub fn z2(&self) -> Complex64 {
        Complex64::new(self.x2, self.y2)
    }

    /// t = sqrt(y1 y2); large t means close to the boundary divisor.
    pub fn t(&self) -> f64 {
        (self.y1 * self.y2).sqrt()
    }

    /// s = sqrt(y1 / y2).
    pub fn s(&self) -> f64 {
        (self.y1 / self.y2).sqrt()
    }

    pub fn q1(&self) -> Complex64 {
        (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * self.z1()).exp()
    }

    pub fn q2(&self) -> Complex64 {
        (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * self.z2()).exp()
    }

    pub fn swap(&self) -> Self {
        Self { x1: self.x2, y1: self.y2, x2: self.x1, y2: self.y1 }
    }
}

/// Components of A(z)^{-1} a, the frame coordinates of a lattice vector.
#[derive(Debug, Clone, Copy)]
pub struct TransformedVec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TransformedVec {
    /// ||a'||^2 = 2R(z,M) + (M,M), the majorant value.
    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// a'd' - b'c'; A(z) is unimodular so the determinant is preserved.
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

/// a' = A(z)^{-1} a componentwise:
/// a' = t^{-1}(a - x2 b - x1 c + x1 x2 d), b' = s^{-1}(b - x1 d),
/// c' = s(c - x2 d), d' = t d.
pub fn transform(m: &LatMat, z: &PointH2) -> TransformedVec {
    let (t, s) = (z.t(), z.s());
    let (a, b, c, d) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
    TransformedVec {
        a: (a - z.x2 * b - z.x1 * c + z.x1 * z.x2 * d) / t,
        b: (b - z.x1 * d) / s,
        c: s * (c - z.x2 * d),
        d: t * d,
    }
}

/// R(z,M) = |a - b z2 - c z1 + d z1 z2|^2 / (2 y1 y2).
pub fn r_kernel(z: &PointH2, m: &LatMat) -> f64 {
    let z1 = z.z1();
    let z2 = z.z2();
    let a = Complex64::new(m.a as f64, 0.0) - (m.b as f64) * z2 - (m.c as f64) * z1
        + (m.d as f64) * z1 * z2;
    a.norm_sqr() / (2.0 * z.y1 * z.y2)
}

/// The majorant 2R(z,M) + (M,M), computed through the frame coordinates.
pub fn majorant(z: &PointH2, m: &LatMat) -> f64 {
    transform(m, z).norm_sq()
}

/// Frobenius norm of A(z); an upper bound for its operator norm.
pub fn frame_norm_bound(z: &PointH2) -> f64 {
    let (t, s) = (z.t(), z.s());
    let (x1, x2) = (z.x1, z.x2);
    let sq = t * t
        + (s * x2).powi(2)
        + (x1 / s).powi(2)
        + (x1 * x2 / t).powi(2)
        + s * s
        + (x1 / t).powi(2)
        + 1.0 / (s * s)
        + (x2 / t).powi(2)
        + 1.0 / (t * t);
    sq.sqrt()
}

/// Half-widths of the enumeration window in the sheared coordinates
/// (w1, w2, w3, w4); a window with half-width k_i in coordinate i covers
/// all lattice points whose frame coordinate a'_i satisfies
/// |a'_i| <= k_i / sigma_i with sigma = (t, s, 1/s, 1/t).
#[derive(Debug, Clone, Copy)]
pub(crate) struct SumWindow {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl SumWindow {
    /// Window with uniform frame radius r: k_i = sigma_i * r, so that every
    /// excluded point has pi*v*||a'||^2 >= pi*v*r^2 regardless of direction.
    pub fn from_frame_radius(z: &PointH2, r: f64) -> Self {
        let (t, s) = (z.t(), z.s());
        SumWindow { k1: t * r, k2: s * r, k3: r / s, k4: r / t }
    }

    /// Number of integer points in the box, as a cost estimate.
    pub fn cell_count(&self) -> f64 {
        (2.0 * self.k1 + 1.0)
            * (2.0 * self.k2 + 1.0)
            * (2.0 * self.k3 + 1.0)
            * (2.0 * self.k4 + 1.0)
    }
}

fn window_range(center: f64, half: f64) -> std::ops::RangeInclusive<i64> {
    let lo = (center - half).ceil() as i64;
    let hi = (center + half).floor() as i64;
    lo..=hi
}

/// All M with det M = m inside the sheared window around z, sorted
/// lexicographically by (a, b, c, d). For m = 0 the zero matrix is skipped.
///
/// Determinant structure keeps this cheap: for d != 0 the entry a is
/// determined by divisibility, for d = 0 the pairs (b,c) come from the
/// factorizations of -m.
pub(crate) fn enumerate_window(m: i64, z: &PointH2, win: &SumWindow) -> Vec<LatMat> {
    let mut out = Vec::new();
    let (x1, x2) = (z.x1, z.x2);
    for d in window_range(0.0, win.k4) {
        let df = d as f64;
        if d != 0 {
            for b in window_range(x1 * df, win.k2) {
                for c in window_range(x2 * df, win.k3) {
                    let num = m + b * c;
                    if num % d != 0 {
                        continue;
                    }
                    let a = num / d;
                    let center = x2 * b as f64 + x1 * c as f64 - x1 * x2 * df;
                    if (a as f64 - center).abs() <= win.k1 {
                        out.push(LatMat::new(a, b, c, d));
                    }
                }
            }
        } else if m != 0 {
            // d = 0 forces bc = -m
            for b in window_range(0.0, win.k2) {
                if b == 0 || (-m) % b != 0 {
                    continue;
                }
                let c = (-m) / b;
                if (c as f64).abs() > win.k3 {
                    continue;
                }
                let center = x2 * b as f64 + x1 * c as f64;
                for a in window_range(center, win.k1) {
                    out.push(LatMat::new(a, b, c, 0));
                }
            }
        } else {
            // d = 0, m = 0: bc = 0, i.e. b = 0 or c = 0
            for b in window_range(0.0, win.k2) {
                let c_iter: Vec<i64> = if b == 0 {
                    window_range(0.0, win.k3).collect()
                } else {
                    vec![0]
                };
                for c in c_iter {
                    let center = x2 * b as f64 + x1 * c as f64;
                    for a in window_range(center, win.k1) {
                        let m0 = LatMat::new(a, b, c, 0);
                        if !m0.is_zero() {
                            out.push(m0);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// All M with det M = m and norm0 <= norm_bound, lexicographic order.
pub fn enumerate_det(m: i64, norm_bound: f64) -> Vec<LatMat> {
    if norm_bound < 0.0 {
        return Vec::new();
    }
    let bound = norm_bound.floor() as i64;
    let half = (norm_bound.sqrt()).floor() as i64;
    let mut out = Vec::new();
    for d in -half..=half {
        if d != 0 {
            for b in -half..=half {
                for c in -half..=half {
                    let num = m + b * c;
                    if num % d != 0 {
                        continue;
                    }
                    let a = num / d;
                    let mm = LatMat::new(a, b, c, d);
                    if a.abs() <= half && mm.norm0() <= bound {
                        out.push(mm);
                    }
                }
            }
        } else if m != 0 {
            for b in -half..=half {
                if b == 0 || (-m) % b != 0 {
                    continue;
                }
                let c = (-m) / b;
                for a in -half..=half {
                    let mm = LatMat::new(a, b, c, 0);
                    if mm.norm0() <= bound {
                        out.push(mm);
                    }
                }
            }
        } else {
            for b in -half..=half {
                let c_iter: Vec<i64> = if b == 0 { (-half..=half).collect() } else { vec![0] };
                for c in c_iter {
                    for a in -half..=half {
                        let mm = LatMat::new(a, b, c, 0);
                        if !mm.is_zero() && mm.norm0() <= bound {
                            out.push(mm);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// All M with det M = m and 2R(z,M) + (M,M) <= radius, lexicographic order.
///
/// Completeness comes from the window bounds: any such M has frame norm
/// ||a'|| <= sqrt(radius), hence lies in the sheared box.
pub fn enumerate_majorant(m: i64, z: &PointH2, radius: f64) -> Vec<LatMat> {
    if radius < 0.0 {
        return Vec::new();
    }
    let win = SumWindow::from_frame_radius(z, radius.sqrt());
    let tol = 1e-9 * (1.0 + radius.abs());
    enumerate_window(m, z, &win)
        .into_iter()
        .filter(|mm| majorant(z, mm) <= radius + tol)
        .collect()
}

/// The set R_N of upper triangular Hecke representatives (a,b;0,d) with
/// ad = N, d > 0, 0 <= b < d. Its cardinality is sigma_1(N).
pub fn hecke_reps(n: i64) -> Result<Vec<LatMat>> {
    if n <= 0 {
        return Err(Error::Domain(format!("hecke_reps requires N >= 1, got {n}")));
    }
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let a = n / d;
        for b in 0..d {
            out.push(LatMat::new(a, b, 0, d));
        }
    }
    Ok(out)
}

/// True iff some M with det M = m has R(z,M) < tol, i.e. z lies within
/// tolerance of the Hecke correspondence T(m). For m < 0 the cycle is
/// empty and this is always false.
pub fn on_divisor(z: &PointH2, m: i64, tol: f64) -> Result<bool> {
    if m == 0 {
        return Err(Error::Domain(
            "on_divisor is undefined for m = 0; T(0) is the boundary multiple".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("on_divisor requires tol > 0, got {tol}")));
    }
    // R < tol implies majorant < 2 tol + 2m
    let radius = 2.0 * tol + 2.0 * m.max(0) as f64 + 0.5;
    Ok(enumerate_majorant(m, z, radius)
        .iter()
        .any(|mm| r_kernel(z, mm) < tol))
}
