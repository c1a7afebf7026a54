//! (1,1)-forms on H^2 and the Kudla-Millson Schwartz form.
//!
//! A form is stored by its four complex coefficients in the ordered basis
//!
//!   e1 = dz1^dzb1/y1^2,  e2 = dz2^dzb2/y2^2,
//!   e3 = dz1^dzb2/(y1 y2),  e4 = dz2^dzb1/(y1 y2).
//!
//! The invariant 2-form constants are
//!
//!   Omega_1 = -(i/8)(e1+e2+e3+e4),
//!   Omega_2 = (1/4)(e3-e4),
//!   Omega_3 = -(i/8)(e1+e2-e3-e4),
//!
//! and the Schwartz form is
//!
//!   phi_KM(v,z,M) = (c1' Omega_1 + c2' Omega_2 + c3' Omega_3) e^{-2 pi v R(z,M)}
//!
//! with c1' = v(a'+d')^2 - 1/(2pi), c2' = v(a'+d')(c'-b'),
//! c3' = v(c'-b')^2 - 1/(2pi) in the frame coordinates of the point.
//!
//! dd^c = -(1/(2 pi i)) del delbar is realized numerically by second order
//! central differences of the mixed Wirtinger derivatives.

use crate::error::{Error, Result};
use crate::green;
use crate::lattice::{r_kernel, transform, LatMat, PointH2};
use crate::special::cap_b_unchecked;
use num_complex::Complex64;
use std::f64::consts::PI;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// A (1,1)-form by coefficients in the basis (e1, e2, e3, e4).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Form11 {
    pub c11: C64,
    pub c22: C64,
    pub c12: C64,
    pub c21: C64,
}

impl Form11 {
    pub fn new(c11: C64, c22: C64, c12: C64, c21: C64) -> Self {
        Self { c11, c22, c12, c21 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scale(&self, w: C64) -> Self {
        Self::new(self.c11 * w, self.c22 * w, self.c12 * w, self.c21 * w)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.c11 + other.c11,
            self.c22 + other.c22,
            self.c12 + other.c12,
            self.c21 + other.c21,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.c11
            .norm()
            .max(self.c22.norm())
            .max(self.c12.norm())
            .max(self.c21.norm())
    }

    /// Max coefficient distance, scale-normalized by 1 + max magnitude.
    pub fn distance(&self, other: &Self) -> f64 {
        let diff = self.sub(other).max_abs();
        diff / (1.0 + self.max_abs().max(other.max_abs()))
    }

    /// A real (1,1)-form has c11, c22 purely imaginary and c21 = -conj(c12);
    /// returns the worst violation.
    pub fn reality_defect(&self) -> f64 {
        self.c11
            .re
            .abs()
            .max(self.c22.re.abs())
            .max((self.c21 + self.c12.conj()).norm())
    }
}

/// Omega_1 = -(i/8)(e1+e2+e3+e4).
pub fn omega_1() -> Form11 {
    let w = -I / 8.0;
    Form11::new(w, w, w, w)
}

/// Omega_2 = (1/4)(e3-e4).
pub fn omega_2() -> Form11 {
    let q = C64::new(0.25, 0.0);
    Form11::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), q, -q)
}

/// Omega_3 = -(i/8)(e1+e2-e3-e4).
pub fn omega_3() -> Form11 {
    let w = -I / 8.0;
    Form11::new(w, w, -w, -w)
}

/// The three invariant 2-forms bundled together.
#[derive(Debug, Clone, Copy)]
pub struct OmegaConstants {
    pub omega1: Form11,
    pub omega2: Form11,
    pub omega3: Form11,
}

impl Default for OmegaConstants {
    fn default() -> Self {
        Self { omega1: omega_1(), omega2: omega_2(), omega3: omega_3() }
    }
}

/// phi_KM(v,z,M), including M = 0 where it degenerates to
/// -(1/2pi)(Omega_1 + Omega_3).
pub fn phi_km(v: f64, z: &PointH2, m: &LatMat) -> Form11 {
    let tv = transform(m, z);
    let apd = tv.a + tv.d;
    let cmb = tv.c - tv.b;
    let c1 = v * apd * apd - 1.0 / (2.0 * PI);
    let c2 = v * apd * cmb;
    let c3 = v * cmb * cmb - 1.0 / (2.0 * PI);
    let phi0 = (-2.0 * PI * v * r_kernel(z, m)).exp();
    omega_1()
        .scale(C64::new(c1 * phi0, 0.0))
        .add(&omega_2().scale(C64::new(c2 * phi0, 0.0)))
        .add(&omega_3().scale(C64::new(c3 * phi0, 0.0)))
}

/// phi_KM with the theta-series phase: phi_KM(v,z,M) e^{2 pi i tau det M}.
/// The Gaussian e^{-2 pi v R} and |q^{det M}| fuse into e^{-pi v ||a'||^2},
/// so the product stays finite for every M.
pub(crate) fn phi_km_weighted(tau: C64, z: &PointH2, m: &LatMat) -> Form11 {
    let (u, v) = (tau.re, tau.im);
    let tv = transform(m, z);
    let apd = tv.a + tv.d;
    let cmb = tv.c - tv.b;
    let c1 = v * apd * apd - 1.0 / (2.0 * PI);
    let c2 = v * apd * cmb;
    let c3 = v * cmb * cmb - 1.0 / (2.0 * PI);
    let expo = -PI * v * tv.norm_sq();
    if expo < -745.0 {
        return Form11::zero();
    }
    let phase = (C64::new(expo, 2.0 * PI * u * m.det() as f64)).exp();
    omega_1()
        .scale(phase * c1)
        .add(&omega_2().scale(phase * c2))
        .add(&omega_3().scale(phase * c3))
}

fn wirtinger_coeffs(
    f: &dyn Fn(&PointH2) -> f64,
    z: &PointH2,
    h: f64,
) -> Result<Form11> {
    let eval = |x1: f64, y1: f64, x2: f64, y2: f64| -> Result<f64> {
        let p = PointH2::new(x1, y1, x2, y2)?;
        let v = f(&p);
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "non-finite sample at ({x1}, {y1}, {x2}, {y2})"
            )));
        }
        Ok(v)
    };
    let (x1, y1, x2, y2) = (z.x1, z.y1, z.x2, z.y2);
    let f0 = eval(x1, y1, x2, y2)?;

    // same-variable Laplacians: d_z d_zbar = (1/4)(d_x^2 + d_y^2)
    let dxx1 = (eval(x1 + h, y1, x2, y2)? - 2.0 * f0 + eval(x1 - h, y1, x2, y2)?) / (h * h);
    let dyy1 = (eval(x1, y1 + h, x2, y2)? - 2.0 * f0 + eval(x1, y1 - h, x2, y2)?) / (h * h);
    let dxx2 = (eval(x1, y1, x2 + h, y2)? - 2.0 * f0 + eval(x1, y1, x2 - h, y2)?) / (h * h);
    let dyy2 = (eval(x1, y1, x2, y2 + h)? - 2.0 * f0 + eval(x1, y1, x2, y2 - h)?) / (h * h);

    let cross = |du: usize, dw: usize| -> Result<f64> {
        // second-order mixed stencil in coordinates (du, dw), 0..3 = x1,y1,x2,y2
        let shift = |i: usize, sgn_u: f64, sgn_w: f64| -> [f64; 4] {
            let mut c = [x1, y1, x2, y2];
            c[du] += sgn_u * h;
            c[dw] += sgn_w * h;
            let _ = i;
            c
        };
        let pp = shift(0, 1.0, 1.0);
        let pm = shift(0, 1.0, -1.0);
        let mp = shift(0, -1.0, 1.0);
        let mm = shift(0, -1.0, -1.0);
        Ok((eval(pp[0], pp[1], pp[2], pp[3])? - eval(pm[0], pm[1], pm[2], pm[3])?
            - eval(mp[0], mp[1], mp[2], mp[3])?
            + eval(mm[0], mm[1], mm[2], mm[3])?)
            / (4.0 * h * h))
    };

    let fx1x2 = cross(0, 2)?;
    let fx1y2 = cross(0, 3)?;
    let fy1x2 = cross(1, 2)?;
    let fy1y2 = cross(1, 3)?;

    // dd^c f = -(1/(2 pi i)) sum_jk d_{z_j} d_{zbar_k} f dz_j ^ dzbar_k
    let pref = -1.0 / (2.0 * PI * I);
    let d11 = C64::new(0.25 * (dxx1 + dyy1), 0.0);
    let d22 = C64::new(0.25 * (dxx2 + dyy2), 0.0);
    // d_{z1} d_{zbar2} = (1/4)(f_{x1x2} + f_{y1y2} + i f_{x1y2} - i f_{y1x2})
    let d12 = C64::new(0.25 * (fx1x2 + fy1y2), 0.25 * (fx1y2 - fy1x2));
    // d_{z2} d_{zbar1} = (1/4)(f_{x1x2} + f_{y1y2} - i f_{x1y2} + i f_{y1x2})
    let d21 = C64::new(0.25 * (fx1x2 + fy1y2), 0.25 * (fy1x2 - fx1y2));

    Ok(Form11::new(
        pref * d11 * (y1 * y1),
        pref * d22 * (y2 * y2),
        pref * d12 * (y1 * y2),
        pref * d21 * (y1 * y2),
    ))
}

/// dd^c of a scalar field by second-order central differences; O(h^2) error.
pub fn ddc_numeric(f: &dyn Fn(&PointH2) -> f64, z: &PointH2, h: f64) -> Result<Form11> {
    if !(1e-5..=1e-2).contains(&h) {
        return Err(Error::Domain(format!("step h must lie in [1e-5, 1e-2], got {h}")));
    }
    wirtinger_coeffs(f, z, h)
}

/// dd^c with one Richardson step (h and h/2), O(h^4) error.
pub fn ddc_numeric_richardson(
    f: &dyn Fn(&PointH2) -> f64,
    z: &PointH2,
    h: f64,
) -> Result<Form11> {
    let coarse = ddc_numeric(f, z, h)?;
    let fine = ddc_numeric(f, z, h / 2.0)?;
    Ok(fine
        .scale(C64::new(4.0 / 3.0, 0.0))
        .sub(&coarse.scale(C64::new(1.0 / 3.0, 0.0))))
}

/// Max-coefficient residual of dd^c xi(v,.,M) = -phi_KM(v,z,M) at z,
/// via Richardson-extrapolated differences.
pub fn verify_kudla_identity(v: f64, z: &PointH2, m: &LatMat, h: f64) -> Result<f64> {
    let r = r_kernel(z, m);
    if r <= 1e-3 {
        return Err(Error::OnCycle { matrix: *m, r });
    }
    let mm = *m;
    let f = move |p: &PointH2| green::xi_point_unchecked(v, p, &mm);
    let lhs = ddc_numeric_richardson(&f, z, h)?;
    let rhs = phi_km(v, z, m).scale(C64::new(-1.0, 0.0));
    Ok(lhs.sub(&rhs).max_abs())
}

/// The restricted Schwartz form
/// (v(b/s-cs)^2 - 1/(2pi)) (t/sqrt v) e^{-pi v((b/s)^2+(cs)^2)} e^{-2 pi i u bc} Omega_3.
pub fn phi_restricted(v: f64, u: f64, t: f64, s: f64, b: i64, c: i64) -> Form11 {
    let bs = b as f64 / s;
    let cs = c as f64 * s;
    let coef = (v * (bs - cs).powi(2) - 1.0 / (2.0 * PI)) * (t / v.sqrt())
        * (-PI * v * (bs * bs + cs * cs)).exp();
    let phase = (-2.0 * PI * I * (u * (b * c) as f64)).exp();
    omega_3().scale(phase * coef)
}

fn ode_combo_fd(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    // F - s F' - s^2 F'' by central differences
    let fp = (f(s + h) - f(s - h)) / (2.0 * h);
    let fpp = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
    f(s) - s * fp - s * s * fpp
}

fn ode_combo_richardson(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    let coarse = ode_combo_fd(f, s, h);
    let fine = ode_combo_fd(f, s, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Scalar check that dd^c of the restricted Green function reproduces the
/// negative of the restricted Schwartz form, together with the annihilation
/// of the piecewise-linear I-profile.
///
/// The B-part compares (t/(4 pi sqrt v)) (F - sF' - s^2F'') e^{2 pi v bc - 2 pi i u bc},
/// F(s) = B(pi v (b/s + cs)^2), against -phi_restricted; the I-part checks
/// I - sI' - s^2 I'' = 0 away from the cone wall |b/s| = |cs|.
pub fn verify_restricted_identity(
    v: f64,
    u: f64,
    t: f64,
    s: f64,
    b: i64,
    c: i64,
    h: f64,
) -> Result<f64> {
    let bs = b as f64 / s;
    let cs = c as f64 * s;
    let gap = (bs.abs() - cs.abs()).abs();
    if b * c < 0 && gap < 1e-3 {
        return Err(Error::ConeWall { gap });
    }
    let (bf, cf) = (b as f64, c as f64);
    let big_b = move |sv: f64| cap_b_unchecked(PI * v * (bf / sv + cf * sv).powi(2));

    let combo = ode_combo_richardson(&big_b, s, h);
    let lhs = C64::new(t / (4.0 * PI * v.sqrt()) * combo * (2.0 * PI * v * (b * c) as f64).exp(), 0.0)
        * (-2.0 * PI * I * (u * (b * c) as f64)).exp();
    let rhs = -phi_restricted(v, u, t, s, b, c).c12 / omega_3().c12;
    let scale = 1.0 + rhs.norm();
    let mut residual = (lhs - rhs).norm() / scale;

    if b * c < 0 {
        let i_profile = move |sv: f64| 4.0 * PI * v.sqrt() * (bf / sv).abs().min((cf * sv).abs());
        let combo_i = ode_combo_richardson(&i_profile, s, h);
        residual = residual.max((t / (4.0 * PI) * combo_i).abs());
    }
    Ok(residual)
}

/// Diagonal pullback comparison with the O(1,2) Schwartz form: evaluates
/// both sides of
///
///   phi_KM(v, (wbar, -1/wbar), M) e^{2 pi i tau det M}
///     = e^{2 pi i tau dt^2} phi_(1,2)(tau, w, X),
///
/// dt = (a+d)/2 and X the trace-zero part of M, as multiples of dw^dwbar.
pub fn restrict_to_12(v: f64, u: f64, w: C64, m: &LatMat) -> Result<(C64, C64)> {
    if !(w.im > 0.0) {
        return Err(Error::Domain(format!("w must lie in H, got {w}")));
    }
    let tau = C64::new(u, v);
    let (uw, vw) = (w.re, w.im);
    let z1 = w.conj();
    let z2 = -1.0 / w.conj();

    // frame combinations at z = (wbar, -1/wbar); y1 y2 > 0 even though the
    // individual imaginary parts are negative
    let (x1, y1) = (z1.re, z1.im);
    let (x2, y2) = (z2.re, z2.im);
    let t2 = y1 * y2;
    let t = t2.sqrt();
    let (a, b, c, d) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
    let big_a = C64::new(a, 0.0) - b * z2 - c * z1 + d * z1 * z2;
    let r = big_a.norm_sqr() / (2.0 * t2);
    let apd = (a - x2 * b - x1 * c + x1 * x2 * d + d * t2) / t;
    let cmb = (y1 * (c - x2 * d) - y2 * (b - x1 * d)) / t;

    let c1 = v * apd * apd - 1.0 / (2.0 * PI);
    let c2 = v * apd * cmb;
    let c3 = v * cmb * cmb - 1.0 / (2.0 * PI);
    let c11 = (c1 + c3) / (8.0 * I);
    let c12 = (C64::new(c1 - c3, 0.0) + 2.0 * I * c2) / (8.0 * I);
    let c21 = (C64::new(c1 - c3, 0.0) - 2.0 * I * c2) / (8.0 * I);

    // pull back to the diagonal w1 = w2 = w: e1, e2 -> -dw^dwbar/vw^2,
    // e3 -> -(|w|^2/w^2) dw^dwbar/vw^2, e4 -> -(|w|^2/wbar^2) dw^dwbar/vw^2
    let ww = w.norm_sqr();
    let pull = -(c11 + c11 + c12 * ww / (w * w) + c21 * ww / (w.conj() * w.conj())) / (vw * vw);
    let det_m = m.det() as f64;
    let lhs = pull * (2.0 * PI * I * tau * det_m).exp() * (-2.0 * PI * v * r).exp();

    // O(1,2) side
    let at = (a - d) / 2.0;
    let dt = (a + d) / 2.0;
    let det_x = -at * at - b * c;
    let xxw = -(c * w.norm_sqr() - 2.0 * at * uw - b) / vw;
    let xxz = xxw * xxw - 2.0 * det_x;
    let phi12 = C64::new(v * xxw * xxw - 1.0 / (2.0 * PI), 0.0)
        * (2.0 * PI * I * C64::new(u * det_x, 0.0)).exp()
        * (-PI * v * xxz).exp();
    // omega = dx^dy/y^2 = (i/2) dw^dwbar / vw^2
    let rhs = (2.0 * PI * I * tau * dt * dt).exp() * phi12 * (I / 2.0) / (vw * vw);

    Ok((lhs, rhs))
}
