//! q-expansions, class numbers and theta series.
//!
//! Covers the classical modular quantities (Delta, E4, j, Hecke's
//! non-holomorphic E_2), Hurwitz class numbers by reduced-form counting,
//! the Hirzebruch-Zagier W/U/V kernels with their corrected Poisson
//! summation, and a family of theta series indexed by [`ThetaKind`] with
//! numerically checkable functional equations:
//!
//!   theta(tau)            = sum e^{pi i n^2 tau}
//!   theta_KM              = X_+ theta,  X_+ = 2iv d_tau + 1/2
//!   theta_(1,1)(tau)      = sum e^{-pi v(b^2+c^2)} e^{-2 pi i u bc}
//!   theta_(1,1)^KM        = -pi sum (v(b-c)^2 - 1/(2pi)) E(b,c;tau)
//!   check theta^KM        = (1/sqrt v) sum (v(b-c)^2 - 1/(2pi)) E(b,c;tau)
//!   Theta_(2,2)(tau,z)    = sum_M e^{pi i(u(M,M) + iv(M,M)_z)}
//!   Theta_phiKM(tau,z)    = sum_M phi_KM(v,z,M) e^{2 pi i tau det M}
//!   Xi(tau,z)             = sum_m Xi(v,z,m) q^m
//!   Xi_check^+(tau,z)     = (1/2) sum_{b,c} xi_check(v,z;b,c) q^{-bc} - (t/2v)(s+1/s)

use crate::error::{Error, Result};
use crate::forms::{phi_km_weighted, Form11};
use crate::green;
use crate::lattice::{transform, LatMat, PointH2};
use crate::special::{cap_b_scaled, erfcx};
use crate::sum::NeumaierSum;
use num_complex::Complex64;
pub use num_rational::Rational64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// A truncated two-sided q-expansion with complex coefficients.
#[derive(Debug, Clone, Default)]
pub struct QSeries {
    pub coeffs: BTreeMap<i64, C64>,
    pub cutoff: i64,
}

impl QSeries {
    pub fn new(cutoff: i64) -> Self {
        Self { coeffs: BTreeMap::new(), cutoff }
    }

    pub fn set(&mut self, n: i64, c: C64) {
        self.coeffs.insert(n, c);
    }

    pub fn add_to(&mut self, n: i64, c: C64) {
        *self.coeffs.entry(n).or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn coeff(&self, n: i64) -> C64 {
        self.coeffs.get(&n).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Evaluate at tau (v > 0); exponents iterate in sorted order so the
    /// result is deterministic.
    pub fn eval(&self, tau: C64) -> C64 {
        let q = (2.0 * PI * I * tau).exp();
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (&n, &c) in &self.coeffs {
            let term = c * q.powi(n as i32);
            re.add(term.re);
            im.add(term.im);
        }
        C64::new(re.total(), im.total())
    }
}

/// The theta series families handled by [`theta_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    Jacobi,
    JacobiKm,
    Siegel11,
    Siegel11Km,
    CheckKm,
    Siegel22,
    PhiKmSeries,
    GreenSeries,
    XiCheckPlus,
}

impl ThetaKind {
    pub fn parse(tag: &str) -> Option<Self> {
        Some(match tag {
            "jacobi" => Self::Jacobi,
            "jacobi_km" => Self::JacobiKm,
            "siegel11" => Self::Siegel11,
            "siegel11_km" => Self::Siegel11Km,
            "check_km" => Self::CheckKm,
            "siegel22" => Self::Siegel22,
            "phi_km_series" => Self::PhiKmSeries,
            "green_series" => Self::GreenSeries,
            "xi_check_plus" => Self::XiCheckPlus,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Jacobi => "jacobi",
            Self::JacobiKm => "jacobi_km",
            Self::Siegel11 => "siegel11",
            Self::Siegel11Km => "siegel11_km",
            Self::CheckKm => "check_km",
            Self::Siegel22 => "siegel22",
            Self::PhiKmSeries => "phi_km_series",
            Self::GreenSeries => "green_series",
            Self::XiCheckPlus => "xi_check_plus",
        }
    }

    pub fn needs_point(&self) -> bool {
        matches!(
            self,
            Self::Siegel22 | Self::PhiKmSeries | Self::GreenSeries | Self::XiCheckPlus
        )
    }
}

/// Scalar or (1,1)-form valued theta evaluation.
#[derive(Debug, Clone, Copy)]
pub enum ThetaValue {
    Scalar(C64),
    Form(Form11),
}

impl ThetaValue {
    pub fn scalar(&self) -> Option<C64> {
        match self {
            Self::Scalar(c) => Some(*c),
            Self::Form(_) => None,
        }
    }

    pub fn form(&self) -> Option<Form11> {
        match self {
            Self::Form(f) => Some(*f),
            Self::Scalar(_) => None,
        }
    }
}

/// sigma_1(N) = sum of divisors.
pub fn sigma1(n: i64) -> Result<i64> {
    if n <= 0 {
        return Err(Error::Domain(format!("sigma1 requires N >= 1, got {n}")));
    }
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            if d != n / d {
                s += n / d;
            }
        }
        d += 1;
    }
    Ok(s)
}

fn sigma3(n: i64) -> i64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d * d * d;
            let e = n / d;
            if e != d {
                s += e * e * e;
            }
        }
        d += 1;
    }
    s
}

/// Hurwitz class number H(N) by enumerating reduced positive definite
/// binary quadratic forms (a,b,c), |b| <= a <= c, of discriminant
/// b^2 - 4ac = -N, weighting the square class by 1/2 and the hexagonal
/// class by 1/3; H(0) = -1/12, and H vanishes unless N = 0, 3 mod 4.
pub fn hurwitz_h(n: i64) -> Result<Rational64> {
    if n < 0 {
        return Err(Error::Domain(format!("hurwitz_h requires N >= 0, got {n}")));
    }
    if n == 0 {
        return Ok(Rational64::new(-1, 12));
    }
    if n % 4 == 1 || n % 4 == 2 {
        return Ok(Rational64::new(0, 1));
    }
    let mut total = Rational64::new(0, 1);
    let bmax = ((n as f64 / 3.0).sqrt() as i64) + 2;
    for b in -bmax..=bmax {
        if (b * b + n) % 4 != 0 {
            continue;
        }
        let ac = (b * b + n) / 4;
        let mut a = b.abs().max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                if b.abs() <= a && a <= c {
                    // boundary convention: b >= 0 when |b| = a or a = c
                    if (b.abs() == a || a == c) && b < 0 {
                        a += 1;
                        continue;
                    }
                    let w = if a == c && b == 0 {
                        Rational64::new(1, 2)
                    } else if a == b && a == c {
                        Rational64::new(1, 3)
                    } else {
                        Rational64::new(1, 1)
                    };
                    total += w;
                }
            }
            a += 1;
        }
    }
    Ok(total)
}

/// H_1(N) = sum over s^2 <= 4N of H(4N - s^2).
pub fn hurwitz_h1(n: i64) -> Result<Rational64> {
    if n < 0 {
        return Err(Error::Domain(format!("hurwitz_h1 requires N >= 0, got {n}")));
    }
    let mut total = hurwitz_h(4 * n)?;
    let mut s = 1;
    while s * s <= 4 * n {
        total += hurwitz_h(4 * n - s * s)? * 2;
        s += 1;
    }
    Ok(total)
}

/// Hecke's non-holomorphic weight 2 Eisenstein series
/// E_2(tau,1) = -1/24 + 1/(8 pi v) + sum_{N>0} sigma_1(N) q^N.
pub fn eisenstein_e2(tau: C64, cutoff: usize) -> C64 {
    let v = tau.im;
    let q = (2.0 * PI * I * tau).exp();
    let mut acc = C64::new(-1.0 / 24.0 + 1.0 / (8.0 * PI * v), 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=cutoff as i64 {
        qn *= q;
        acc += (sigma1(n).unwrap() as f64) * qn;
    }
    acc
}

/// Delta(z) = q prod (1 - q^n)^24.
pub fn delta_eval(z: C64, cutoff: usize) -> C64 {
    let q = (2.0 * PI * I * z).exp();
    let mut prod = q;
    let mut qn = C64::new(1.0, 0.0);
    for _ in 1..=cutoff {
        qn *= q;
        prod *= (C64::new(1.0, 0.0) - qn).powi(24);
    }
    prod
}

fn e4_eval(z: C64, cutoff: usize) -> C64 {
    let q = (2.0 * PI * I * z).exp();
    let mut acc = C64::new(1.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=cutoff as i64 {
        qn *= q;
        acc += 240.0 * sigma3(n) as f64 * qn;
    }
    acc
}

/// j(z) = E_4(z)^3 / Delta(z).
pub fn j_eval(z: C64, cutoff: usize) -> C64 {
    e4_eval(z, cutoff).powi(3) / delta_eval(z, cutoff)
}

/// Psi_N(z1,z2) = (Delta(z1) Delta(z2))^{sigma_1(N)} prod_{g in R_N} (j(z1) - j(g z2)).
pub fn psi_n_eval(z1: C64, z2: C64, n: i64, cutoff: usize) -> Result<C64> {
    let reps = crate::lattice::hecke_reps(n)?;
    let sig = sigma1(n)? as i32;
    let j1 = j_eval(z1, cutoff);
    let mut prod = (delta_eval(z1, cutoff) * delta_eval(z2, cutoff)).powi(sig);
    for g in &reps {
        let gz2 = (g.a as f64 * z2 + g.b as f64) / C64::new(g.d as f64, 0.0);
        prod *= j1 - j_eval(gz2, cutoff);
    }
    Ok(prod)
}

fn kahan_complex<T: IntoIterator<Item = C64>>(terms: T) -> C64 {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    C64::new(re.total(), im.total())
}

fn theta_jacobi(tau: C64, k: i64) -> C64 {
    kahan_complex((-k..=k).map(|n| (PI * I * ((n * n) as f64) * tau).exp()))
}

fn theta_jacobi_km(tau: C64, k: i64) -> C64 {
    let v = tau.im;
    kahan_complex((-k..=k).map(|n| {
        let n2 = (n * n) as f64;
        -2.0 * PI * (v * n2 - 1.0 / (4.0 * PI)) * (PI * I * n2 * tau).exp()
    }))
}

fn siegel11_term(tau: C64, b: i64, c: i64) -> C64 {
    let (u, v) = (tau.re, tau.im);
    C64::new(-PI * v * ((b * b + c * c) as f64), -2.0 * PI * u * ((b * c) as f64)).exp()
}

fn theta_siegel11(tau: C64, k: i64) -> C64 {
    kahan_complex(
        (-k..=k).flat_map(|b| (-k..=k).map(move |c| (b, c))).map(|(b, c)| siegel11_term(tau, b, c)),
    )
}

fn theta_siegel11_km(tau: C64, k: i64) -> C64 {
    let v = tau.im;
    kahan_complex(
        (-k..=k)
            .flat_map(|b| (-k..=k).map(move |c| (b, c)))
            .map(|(b, c)| {
                let f = v * (((b - c) * (b - c)) as f64) - 1.0 / (2.0 * PI);
                -PI * f * siegel11_term(tau, b, c)
            }),
    )
}

fn theta_check_km(tau: C64, k: i64) -> C64 {
    theta_siegel11_km(tau, k) * C64::new(-1.0 / (PI * tau.im.sqrt()), 0.0)
}

fn theta_siegel22(tau: C64, z: &PointH2, k: i64) -> C64 {
    let (u, v) = (tau.re, tau.im);
    let rows: Vec<C64> = (-k..=k)
        .into_par_iter()
        .map(|a| {
            let mut row = Vec::with_capacity(((2 * k + 1) * (2 * k + 1)) as usize);
            for b in -k..=k {
                for c in -k..=k {
                    for d in -k..=k {
                        let m = LatMat::new(a, b, c, d);
                        let maj = transform(&m, z).norm_sq();
                        let expo = -PI * v * maj;
                        if expo < -745.0 {
                            continue;
                        }
                        row.push(C64::new(expo, 2.0 * PI * u * m.det() as f64).exp());
                    }
                }
            }
            kahan_complex(row)
        })
        .collect();
    kahan_complex(rows)
}

fn theta_phi_km(tau: C64, z: &PointH2, k: i64) -> Form11 {
    let rows: Vec<Form11> = (-k..=k)
        .into_par_iter()
        .map(|a| {
            let mut acc = Form11::zero();
            for b in -k..=k {
                for c in -k..=k {
                    for d in -k..=k {
                        acc = acc.add(&phi_km_weighted(tau, z, &LatMat::new(a, b, c, d)));
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = Form11::zero();
    for r in rows {
        acc = acc.add(&r);
    }
    acc
}

/// One term xi_check(v,z;b,c) q^{-bc} of the boundary generating series,
/// with the growing q-power fused into the B-kernel exponent.
fn xi_check_weighted(tau: C64, t: f64, s: f64, b: i64, c: i64) -> C64 {
    let (u, v) = (tau.re, tau.im);
    let bs = b as f64 / s;
    let cs = c as f64 * s;
    let alpha = PI * v * (bs + cs) * (bs + cs);
    let bc = (b * c) as f64;
    // B(alpha) e^{2 pi v bc} = 2 e^{-pi v((b/s)^2+(cs)^2)} (1 - sqrt(pi a) erfcx)
    let b_part = cap_b_scaled(alpha, 2.0 * PI * v * bc);
    let i_part = if b * c < 0 {
        4.0 * PI * v.sqrt() * bs.abs().min(cs.abs()) * (2.0 * PI * v * bc).exp()
    } else {
        0.0
    };
    let phase = (-2.0 * PI * I * u * bc).exp();
    C64::new(t / v.sqrt() * (b_part - i_part), 0.0) * phase
}

fn theta_xi_check_plus(tau: C64, z: &PointH2, k: i64) -> C64 {
    let (t, s) = (z.t(), z.s());
    let v = tau.im;
    let sum = kahan_complex(
        (-k..=k)
            .flat_map(|b| (-k..=k).map(move |c| (b, c)))
            .map(|(b, c)| xi_check_weighted(tau, t, s, b, c)),
    );
    0.5 * sum - C64::new(t / (2.0 * v) * (s + 1.0 / s), 0.0)
}

fn theta_green_series(tau: C64, z: &PointH2, k: i64) -> Result<C64> {
    let v = tau.im;
    let q = (2.0 * PI * I * tau).exp();
    let mut terms = Vec::new();
    for m in -k..=k {
        let rep = if m == 0 {
            green::green_zero(v, z, 1e-10)?
        } else {
            green::kudla_green(v, z, m, 1e-10)?
        };
        terms.push(C64::new(rep.value, 0.0) * q.powi(m as i32));
    }
    Ok(kahan_complex(terms))
}

/// Evaluate a theta series at tau (and z where the kind requires it) with
/// rectangular cutoff.
pub fn theta_eval(
    kind: ThetaKind,
    tau: C64,
    z: Option<&PointH2>,
    cutoff: i64,
) -> Result<ThetaValue> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("tau must lie in H, got {tau}")));
    }
    if kind.needs_point() && z.is_none() {
        return Err(Error::Domain(format!("theta kind {} requires a point z", kind.name())));
    }
    let k = cutoff.max(1);
    Ok(match kind {
        ThetaKind::Jacobi => ThetaValue::Scalar(theta_jacobi(tau, k)),
        ThetaKind::JacobiKm => ThetaValue::Scalar(theta_jacobi_km(tau, k)),
        ThetaKind::Siegel11 => ThetaValue::Scalar(theta_siegel11(tau, k)),
        ThetaKind::Siegel11Km => ThetaValue::Scalar(theta_siegel11_km(tau, k)),
        ThetaKind::CheckKm => ThetaValue::Scalar(theta_check_km(tau, k)),
        ThetaKind::Siegel22 => ThetaValue::Scalar(theta_siegel22(tau, z.unwrap(), k)),
        ThetaKind::PhiKmSeries => ThetaValue::Form(theta_phi_km(tau, z.unwrap(), k)),
        ThetaKind::GreenSeries => ThetaValue::Scalar(theta_green_series(tau, z.unwrap(), k)?),
        ThetaKind::XiCheckPlus => ThetaValue::Scalar(theta_xi_check_plus(tau, z.unwrap(), k)),
    })
}

/// Residual of the functional equation for the given kind:
/// max of the S-relation defect |f(-1/tau) - J(tau) f(tau)|/(1 + |f(-1/tau)|)
/// and the T-periodicity defect at the kind's period.
pub fn modularity_residual(
    kind: ThetaKind,
    tau: C64,
    z: Option<&PointH2>,
    cutoff: i64,
) -> Result<f64> {
    let s_tau = -1.0 / tau;
    let period = match kind {
        ThetaKind::Jacobi | ThetaKind::JacobiKm => 2.0,
        _ => 1.0,
    };
    let t_tau = tau + period;

    // S-relation multipliers J(tau) with f(-1/tau) = J(tau) f(tau)
    let j: C64 = match kind {
        ThetaKind::Jacobi => (tau / I).sqrt(),
        // theta_KM(tau) = (i/tau)^{1/2} (taubar/tau) theta_KM(-1/tau)
        ThetaKind::JacobiKm => (tau / I).sqrt() * tau / tau.conj(),
        ThetaKind::Siegel11 => tau.sqrt() * tau.conj().sqrt(),
        ThetaKind::Siegel11Km => tau.powf(1.5) * tau.conj().powf(-0.5),
        ThetaKind::CheckKm | ThetaKind::PhiKmSeries | ThetaKind::XiCheckPlus => tau * tau,
        ThetaKind::Siegel22 => C64::new(tau.norm_sqr(), 0.0),
        ThetaKind::GreenSeries => {
            return Err(Error::Domain(
                "modularity_residual is not defined for green_series".into(),
            ))
        }
    };

    match kind {
        ThetaKind::PhiKmSeries => {
            let f0 = theta_eval(kind, tau, z, cutoff)?.form().unwrap();
            let fs = theta_eval(kind, s_tau, z, cutoff)?.form().unwrap();
            let ft = theta_eval(kind, t_tau, z, cutoff)?.form().unwrap();
            let s_res = fs.sub(&f0.scale(j)).max_abs() / (1.0 + fs.max_abs());
            let t_res = ft.sub(&f0).max_abs() / (1.0 + f0.max_abs());
            Ok(s_res.max(t_res))
        }
        _ => {
            let f0 = theta_eval(kind, tau, z, cutoff)?.scalar().unwrap();
            let fs = theta_eval(kind, s_tau, z, cutoff)?.scalar().unwrap();
            let ft = theta_eval(kind, t_tau, z, cutoff)?.scalar().unwrap();
            let s_res = (fs - j * f0).norm() / (1.0 + fs.norm());
            let t_res = (ft - f0).norm() / (1.0 + f0.norm());
            Ok(s_res.max(t_res))
        }
    }
}

/// The Hirzebruch-Zagier kernels
/// U_tau(l,l') = 2 v^{-1/2} beta(pi v(l-l')^2) e(l l' tau),
/// V_tau(l,l') = (1/2) min(|l|,|l'|) e(l l' tau) for l l' > 0 (else 0),
/// W = U - V. U is evaluated through erfcx so that the Gaussian decay
/// e^{-pi v(l^2 + l'^2)} is explicit for every sign pattern.
pub fn w_kernel(tau: C64, lam: f64, lam2: f64) -> (C64, C64, C64) {
    let (u, v) = (tau.re, tau.im);
    let alpha = PI * v * (lam - lam2) * (lam - lam2);
    let scale = if alpha == 0.0 {
        1.0
    } else {
        1.0 - (PI * alpha).sqrt() * erfcx(alpha.sqrt())
    };
    let u_val = C64::new(
        scale / (4.0 * PI * v.sqrt()) * (-PI * v * (lam * lam + lam2 * lam2)).exp(),
        0.0,
    ) * (2.0 * PI * I * u * lam * lam2).exp();
    let v_val = if lam * lam2 > 0.0 {
        C64::new(0.5 * lam.abs().min(lam2.abs()), 0.0) * (2.0 * PI * I * tau * lam * lam2).exp()
    } else {
        C64::new(0.0, 0.0)
    };
    (u_val, v_val, u_val - v_val)
}

fn w_grid_sum(tau: C64, s: f64, cutoff: i64) -> C64 {
    kahan_complex(
        (-cutoff..=cutoff)
            .flat_map(|b| (-cutoff..=cutoff).map(move |c| (b, c)))
            .map(|(b, c)| w_kernel(tau, -(b as f64) / s, c as f64 * s).2),
    )
}

/// Defect of the corrected Poisson summation
/// |tau^{-2} sum W_{-1/tau} - sum W_tau + (i/(4 pi tau))(s + 1/s)|.
pub fn poisson_defect_check(tau: C64, s: f64, cutoff: i64) -> f64 {
    let lhs = w_grid_sum(-1.0 / tau, s, cutoff) / (tau * tau);
    let rhs = w_grid_sum(tau, s, cutoff);
    (lhs - rhs + I / (4.0 * PI * tau) * (s + 1.0 / s)).norm()
}

/// Quadrant limits of the defective lattice function and the origin value
/// of its double sum.
#[derive(Debug, Clone, Copy)]
pub struct F2Limits {
    /// lim_{x -> 0} g_tau(x,y) = -1/(2 pi i s tau).
    pub g_limit: C64,
    /// lim_{y -> 0} h_tau(x,y) = -s/(2 pi i tau).
    pub h_limit: C64,
    /// F_2(0,0) by direct double summation; only available at s = 1.
    pub f2_origin: Option<C64>,
}

/// Closed form of F_2(0,0) at s = 1: 2 sum_{m >= 1} q^m (1+q^m)/(1-q^m).
pub fn f2_closed_form(tau: C64, cutoff: i64) -> C64 {
    let q = (2.0 * PI * I * tau).exp();
    kahan_complex((1..=cutoff).map(|m| {
        let qm = q.powi(m as i32);
        2.0 * qm * (1.0 + qm) / (1.0 - qm)
    }))
}

pub fn f2_limits(tau: C64, s: f64, cutoff: i64) -> F2Limits {
    let g_limit = -1.0 / (2.0 * PI * I * s * tau);
    let h_limit = -s / (2.0 * PI * I * tau);
    let f2_origin = if (s - 1.0).abs() < 1e-12 {
        let q = (2.0 * PI * I * tau).exp();
        let mut terms = Vec::new();
        for m in 1..=cutoff {
            for n in 1..=cutoff {
                let e = q.powi((m * n) as i32);
                if e.norm() < 1e-30 {
                    continue;
                }
                terms.push(2.0 * (m.min(n) as f64) * e);
            }
        }
        Some(kahan_complex(terms))
    } else {
        None
    };
    F2Limits { g_limit, h_limit, f2_origin }
}

/// The two boundary generating series of the Hirzebruch-Zagier circle:
/// first the line-integral form
///
///   -1/(4 pi v) - (1/2) sum_{-bc>0} min(|b|,|c|) q^{-bc}
///     + (1/(8 pi sqrt v)) sum_{b,c} B(pi v (b+c)^2) q^{-bc},
///
/// then the class-number form
///
///   sum_{N>=0} H_1(N) q^N + (1/(8 pi sqrt v)) sum_{b,c} B(pi v (b+c)^2) q^{-bc}.
pub fn funke_series(tau: C64, cutoff: i64) -> Result<(C64, C64)> {
    let (u, v) = (tau.re, tau.im);
    let q = (2.0 * PI * I * tau).exp();
    let k = cutoff.max(1);

    let mut b_terms = Vec::new();
    let mut min_terms = Vec::new();
    for b in -k..=k {
        for c in -k..=k {
            let bc = (b * c) as f64;
            // B(pi v(b+c)^2) q^{-bc}: magnitudes fuse to e^{-pi v(b^2+c^2)}
            let alpha = PI * v * ((b + c) * (b + c)) as f64;
            let mag = cap_b_scaled(alpha, 2.0 * PI * v * bc);
            b_terms.push(C64::new(mag, 0.0) * (-2.0 * PI * I * u * bc).exp());
            if -b * c > 0 {
                min_terms
                    .push(C64::new(b.abs().min(c.abs()) as f64, 0.0) * q.powi((-b * c) as i32));
            }
        }
    }
    let b_series = kahan_complex(b_terms) / (8.0 * PI * v.sqrt());
    let min_series = kahan_complex(min_terms);
    let line_form = C64::new(-1.0 / (4.0 * PI * v), 0.0) - 0.5 * min_series + b_series;

    let mut h1_terms = Vec::new();
    for n in 0..=k {
        let h1 = hurwitz_h1(n)?;
        let h1f = *h1.numer() as f64 / *h1.denom() as f64;
        h1_terms.push(C64::new(h1f, 0.0) * q.powi(n as i32));
    }
    let class_form = kahan_complex(h1_terms) + b_series;
    Ok((line_form, class_form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::cap_b_unchecked;
    use approx::assert_relative_eq;

    fn ph2(x1: f64, y1: f64, x2: f64, y2: f64) -> PointH2 {
        PointH2::new(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn sigma1_values() {
        assert_eq!(sigma1(1).unwrap(), 1);
        assert_eq!(sigma1(4).unwrap(), 7);
        assert_eq!(sigma1(6).unwrap(), 12);
        assert!(sigma1(0).is_err());
    }

    #[test]
    fn hurwitz_h_values() {
        let r = |p, q| Rational64::new(p, q);
        assert_eq!(hurwitz_h(0).unwrap(), r(-1, 12));
        assert_eq!(hurwitz_h(3).unwrap(), r(1, 3));
        assert_eq!(hurwitz_h(4).unwrap(), r(1, 2));
        assert_eq!(hurwitz_h(7).unwrap(), r(1, 1));
        assert_eq!(hurwitz_h(8).unwrap(), r(1, 1));
        assert_eq!(hurwitz_h(11).unwrap(), r(1, 1));
        assert_eq!(hurwitz_h(12).unwrap(), r(4, 3));
        assert_eq!(hurwitz_h(15).unwrap(), r(2, 1));
        assert_eq!(hurwitz_h(16).unwrap(), r(3, 2));
        assert_eq!(hurwitz_h(23).unwrap(), r(3, 1));
        assert_eq!(hurwitz_h(1).unwrap(), r(0, 1));
        assert_eq!(hurwitz_h(2).unwrap(), r(0, 1));
    }

    #[test]
    fn hurwitz_h1_values() {
        let r = |p, q| Rational64::new(p, q);
        assert_eq!(hurwitz_h1(0).unwrap(), r(-1, 12));
        assert_eq!(hurwitz_h1(1).unwrap(), r(1, 1));
        assert_eq!(hurwitz_h1(2).unwrap(), r(4, 1));
    }

    #[test]
    fn hurwitz_identity() {
        // 2 sigma_1(N) = H_1(N) + sum_{d | N} min(d, N/d), exactly
        for n in 1..=200i64 {
            let mut min_sum = 0i64;
            let mut d = 1;
            while d <= n {
                if n % d == 0 {
                    min_sum += d.min(n / d);
                }
                d += 1;
            }
            let lhs = Rational64::new(2 * sigma1(n).unwrap(), 1);
            let rhs = hurwitz_h1(n).unwrap() + Rational64::new(min_sum, 1);
            assert_eq!(lhs, rhs, "identity fails at N = {n}");
        }
    }

    #[test]
    fn e2_constant_term_and_coefficients() {
        let tau = C64::new(0.0, 7.0);
        // at large v the q-part is negligible
        let got = eisenstein_e2(C64::new(0.0, 40.0), 10);
        assert_relative_eq!(
            got.re,
            -1.0 / 24.0 + 1.0 / (8.0 * PI * 40.0),
            epsilon = 1e-12
        );
        let _ = tau;
        assert_eq!(sigma1(6).unwrap(), 12); // coefficient of q^6
    }

    #[test]
    fn e2_vanishes_at_i() {
        let got = eisenstein_e2(C64::new(0.0, 1.0), 80);
        assert!(got.norm() < 1e-10, "E2(i,1) = {got}");
    }

    #[test]
    fn delta_leading_asymptotics() {
        let d = delta_eval(C64::new(0.0, 10.0), 60);
        let ratio = d.norm() / (-20.0 * PI).exp();
        assert!((0.9..=1.1).contains(&ratio));
    }

    #[test]
    fn j_special_values() {
        let ji = j_eval(C64::new(0.0, 1.0), 80);
        assert!((ji - C64::new(1728.0, 0.0)).norm() / 1728.0 < 1e-6, "j(i) = {ji}");
        let rho = C64::new(0.5, 3.0f64.sqrt() / 2.0);
        assert!(j_eval(rho, 80).norm() < 1e-6);
    }

    #[test]
    fn psi_vanishing_and_generic() {
        let z = C64::new(0.2, 1.1);
        // N = 1, z1 = z2: the factor j(z1) - j(z2) vanishes
        assert!(psi_n_eval(z, z, 1, 60).unwrap().norm() < 1e-6);
        // point on T(2): z1 = 2 z2
        let z2 = C64::new(0.15, 0.9);
        let p2 = psi_n_eval(2.0 * z2, z2, 2, 60).unwrap();
        assert!(p2.norm() < 1e-4 * (1.0 + p2.norm()), "Psi_2 = {p2}");
        // generic point: nonzero
        let p1 = psi_n_eval(C64::new(0.2, 2.0), C64::new(1.0 / 7.0, 3.0), 1, 60).unwrap();
        assert!(p1.norm() > 1e-6);
    }

    #[test]
    fn jacobi_km_is_maass_derivative_termwise() {
        // theta_KM = (2iv d_tau + 1/2) theta coefficientwise:
        // the n-term of theta is e^{pi i n^2 tau}, so X_+ gives
        // (1/2 - 2 pi v n^2) e^{pi i n^2 tau}
        let tau = C64::new(0.3, 1.2);
        let v = tau.im;
        for n in -4i64..=4 {
            let n2 = (n * n) as f64;
            let maass = C64::new(0.5 - 2.0 * PI * v * n2, 0.0) * (PI * I * n2 * tau).exp();
            let summand =
                C64::new(-2.0 * PI * (v * n2 - 1.0 / (4.0 * PI)), 0.0) * (PI * I * n2 * tau).exp();
            assert!((maass - summand).norm() < 1e-15);
        }
    }

    #[test]
    fn jacobi_km_vanishes_at_i() {
        let v = theta_eval(ThetaKind::JacobiKm, C64::new(0.0, 1.0), None, 60)
            .unwrap()
            .scalar()
            .unwrap();
        assert!(v.norm() < 1e-12, "theta_KM(i) = {v}");
    }

    #[test]
    fn theta_t_periodicity_is_exact() {
        let tau = C64::new(0.37, 0.9);
        for (kind, p) in [(ThetaKind::Jacobi, 2.0), (ThetaKind::Siegel11, 1.0)] {
            let a = theta_eval(kind, tau, None, 40).unwrap().scalar().unwrap();
            let b = theta_eval(kind, tau + p, None, 40).unwrap().scalar().unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_functional_equations() {
        let tau = C64::new(1.0 / 3.0, 2.0);
        for kind in [
            ThetaKind::Jacobi,
            ThetaKind::JacobiKm,
            ThetaKind::Siegel11,
            ThetaKind::Siegel11Km,
            ThetaKind::CheckKm,
        ] {
            let r = modularity_residual(kind, tau, None, 50).unwrap();
            assert!(r < 1e-9, "{} residual {r}", kind.name());
        }
    }

    #[test]
    fn siegel22_weight_one_one() {
        let z = ph2(0.0, 1.0, 0.0, 1.0);
        let tau = C64::new(0.2, 1.0);
        let r = modularity_residual(ThetaKind::Siegel22, tau, Some(&z), 14).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn xi_check_plus_weight_two() {
        let z = ph2(0.0, 2.0, 0.0, 0.5);
        let tau = C64::new(1.0 / 3.0, 1.0);
        let r = modularity_residual(ThetaKind::XiCheckPlus, tau, Some(&z), 60).unwrap();
        assert!(r < 1e-7, "residual {r}");
    }

    #[test]
    fn green_series_has_no_functional_equation() {
        let z = ph2(0.0, 2.0, 1.0 / 3.0, 1.0);
        assert!(modularity_residual(ThetaKind::GreenSeries, C64::new(0.0, 1.0), Some(&z), 3)
            .is_err());
    }

    #[test]
    fn green_series_partial_sums_cauchy() {
        let z = ph2(0.0, 2.0, 1.0 / 3.0, 1.0);
        let tau = C64::new(0.25, 1.0);
        let mut vals = Vec::new();
        for k in [3i64, 4, 5, 6] {
            vals.push(
                theta_eval(ThetaKind::GreenSeries, tau, Some(&z), k)
                    .unwrap()
                    .scalar()
                    .unwrap(),
            );
        }
        let d1 = (vals[1] - vals[0]).norm();
        let d2 = (vals[2] - vals[1]).norm();
        let d3 = (vals[3] - vals[2]).norm();
        assert!(d2 < d1 && d3 < d2, "not Cauchy: {d1} {d2} {d3}");
    }

    #[test]
    fn theta_eval_argument_checks() {
        assert!(theta_eval(ThetaKind::Siegel22, C64::new(0.0, 1.0), None, 5).is_err());
        assert!(theta_eval(ThetaKind::Jacobi, C64::new(0.0, -1.0), None, 5).is_err());
        assert!(ThetaKind::parse("no_such_kind").is_none());
        assert_eq!(ThetaKind::parse("check_km"), Some(ThetaKind::CheckKm));
    }

    #[test]
    fn w_kernel_cases() {
        let tau = C64::new(0.3, 1.1);
        // V vanishes for opposite signs
        let (_, v, _) = w_kernel(tau, 1.0, -2.0);
        assert_eq!(v, C64::new(0.0, 0.0));
        // equal arguments: U = (1/(4 pi sqrt v)) e(l^2 tau)
        let lam = 0.7;
        let (u, _, _) = w_kernel(tau, lam, lam);
        let want = (2.0 * PI * I * tau * lam * lam).exp() / (4.0 * PI * tau.im.sqrt());
        assert!((u - want).norm() < 1e-14);
    }

    #[test]
    fn xi_check_relates_to_w() {
        // xi_check(tau,(t,s),(b,c)) = 8 pi t W_tau(-b/s, cs)
        let tau = C64::new(0.0, 1.0);
        let (t, s, b, c) = (2.0, 1.0, 1i64, -1i64);
        let lhs = xi_check_weighted(tau, t, s, b, c);
        let (_, _, w) = w_kernel(tau, -(b as f64) / s, c as f64 * s);
        assert!((lhs - 8.0 * PI * t * w).norm() < 1e-12);
    }

    #[test]
    fn poisson_defect_small() {
        assert!(poisson_defect_check(C64::new(1.0 / 3.0, 1.0), 1.0, 60) < 1e-7);
        assert!(poisson_defect_check(C64::new(0.0, 2.0), 2.0, 60) < 1e-7);
    }

    #[test]
    fn poisson_defect_symmetric_in_s_inversion() {
        // the defect term (s + 1/s) is even under s -> 1/s, and the W-grid
        // is itself symmetric, so the residual agrees exactly
        let tau = C64::new(0.2, 1.3);
        let a = poisson_defect_check(tau, 2.0, 30);
        let b = poisson_defect_check(tau, 0.5, 30);
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn f2_limits_and_origin() {
        let tau = C64::new(0.0, 2.0);
        let lim = f2_limits(tau, 1.0, 200);
        // closed forms
        assert!((lim.g_limit - (-1.0 / (2.0 * PI * I * tau))).norm() < 1e-15);
        assert!((lim.h_limit - (-1.0 / (2.0 * PI * I * tau))).norm() < 1e-15);
        // numerical limit of the lattice tail sum at small x
        let s = 1.3;
        let lim2 = f2_limits(tau, s, 200);
        let x = 1e-4;
        let y = 0.37;
        let q = (2.0 * PI * I * tau).exp();
        let mut g = C64::new(0.0, 0.0);
        for n in 1..200_000 {
            let term = C64::new(x / s, 0.0) * q.powf(x * (y + n as f64));
            g += term;
            if term.norm() < 1e-22 {
                break;
            }
        }
        assert!((g - lim2.g_limit).norm() / lim2.g_limit.norm() < 1e-3);
        // origin: direct sum against the closed form, s = 1 only
        let direct = lim.f2_origin.expect("origin at s=1");
        let closed = f2_closed_form(tau, 200);
        assert!((direct - closed).norm() < 1e-10, "gap {}", (direct - closed).norm());
        assert!(f2_limits(tau, 1.3, 50).f2_origin.is_none());
    }

    #[test]
    fn funke_series_coefficient_identities() {
        // N = 2 instance of 2 sigma_1 = H_1 + min-sum: 6 = 4 + 2
        assert_eq!(hurwitz_h1(2).unwrap(), Rational64::new(4, 1));
        // B-integral coefficient at b + c = 0 is (1/(8 pi sqrt v)) * 2
        let v = 1.7f64;
        let coef = cap_b_unchecked(0.0) / (8.0 * PI * v.sqrt());
        assert_relative_eq!(coef, 2.0 / (8.0 * PI * v.sqrt()), epsilon = 1e-15);
        // both series evaluate finitely
        let (a, b) = funke_series(C64::new(0.1, 1.5), 30).unwrap();
        assert!(a.norm().is_finite() && b.norm().is_finite());
    }

    #[test]
    fn qseries_eval_deterministic() {
        let mut s = QSeries::new(10);
        s.set(-2, C64::new(1.0, 0.0));
        s.set(3, C64::new(0.0, 2.0));
        let tau = C64::new(0.3, 1.0);
        let q = (2.0 * PI * I * tau).exp();
        let want = q.powi(-2) + C64::new(0.0, 2.0) * q.powi(3);
        assert!((s.eval(tau) - want).norm() < 1e-14);
        assert_eq!(s.coeff(3), C64::new(0.0, 2.0));
        assert_eq!(s.coeff(7), C64::new(0.0, 0.0));
    }
}
