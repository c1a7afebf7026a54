//! The verification suites behind `kudla-lab verify`.
//!
//! Each suite returns one [`Report`] per check; tolerances default to the
//! values the acceptance gate pins down and can be overridden globally.

use crate::quad;
use crate::report::Report;
use kudla_core::forms::{
    ddc_numeric_richardson, omega_3, phi_km, restrict_to_12, verify_kudla_identity,
    verify_restricted_identity,
};
use kudla_core::green::{
    boundary_expansion, fourier_a0, fourier_an, green_modified, green_zero, kudla_green,
    CutoffSpec,
};
use kudla_core::heights::{height_closed, height_numeric};
use kudla_core::lattice::{hecke_reps, r_kernel, transform, LatMat, PointH2};
use kudla_core::qseries::{
    eisenstein_e2, f2_closed_form, f2_limits, funke_series, hurwitz_h, hurwitz_h1,
    modularity_residual, poisson_defect_check, sigma1, theta_eval, Rational64, ThetaKind,
};
use kudla_core::special::{beta_hz, cap_b, erfcx};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

type C64 = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub tol_override: Option<f64>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tol_override: None, seed: 7 }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "special", "lattice", "fourier", "boundary", "ddc", "theta", "poisson", "hurwitz", "heights",
];

fn timed(mut report: Report, started: Instant) -> Report {
    report = report.with_runtime(started.elapsed().as_millis() as u64);
    report
}

fn tol(cfg: &SuiteConfig, default: f64) -> f64 {
    cfg.tol_override.unwrap_or(default)
}

// ---------------------------------------------------------------- special

pub fn suite_special(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();

    let t0 = Instant::now();
    let r = (cap_b(0.0).unwrap() - 2.0).abs();
    out.push(timed(Report::new("special/B(0)=2", r, tol(cfg, 0.0)), t0));

    // 10 log-spaced alpha in [1e-3, 1e2]
    let alphas: Vec<f64> = (0..10).map(|k| 10f64.powf(-3.0 + 5.0 * k as f64 / 9.0)).collect();

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &a in &alphas {
        let closed = cap_b(a).unwrap();
        let q = quad::cap_b_quadrature(a, 1e-14 * (1.0 + closed));
        worst = worst.max((closed - q).abs() / closed.abs());
    }
    out.push(timed(
        Report::new("special/B-closed-vs-quadrature", worst, tol(cfg, 1e-10))
            .with_input("alphas", format!("{alphas:?}")),
        t0,
    ));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &a in &alphas {
        let closed = beta_hz(a).unwrap();
        let q = quad::cap_b_quadrature(a, 1e-15) / (16.0 * PI);
        worst = worst.max((closed - q).abs() / closed.abs());
    }
    out.push(timed(Report::new("special/beta-closed-vs-quadrature", worst, tol(cfg, 1e-10)), t0));

    let t0 = Instant::now();
    let mut violation = 0.0f64;
    let mut t = 0.0;
    while t <= 10.0 {
        let mid = erfcx(t) * PI.sqrt() / 2.0;
        let lo = 1.0 / (t + (t * t + 2.0).sqrt());
        let hi = 1.0 / (t + (t * t + 4.0 / PI).sqrt());
        violation = violation.max(lo - mid).max(mid - hi);
        t += 0.01;
    }
    out.push(timed(
        Report::new("special/erfc-sandwich-bounds", violation.max(0.0), tol(cfg, 0.0)),
        t0,
    ));
    out
}

// ---------------------------------------------------------------- lattice

fn random_point(rng: &mut ChaCha8Rng) -> PointH2 {
    PointH2::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(0.2..5.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(0.2..5.0),
    )
    .unwrap()
}

fn random_mat(rng: &mut ChaCha8Rng) -> LatMat {
    LatMat::new(
        rng.gen_range(-9..=9),
        rng.gen_range(-9..=9),
        rng.gen_range(-9..=9),
        rng.gen_range(-9..=9),
    )
}

pub fn suite_lattice(cfg: &SuiteConfig) -> Vec<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z = random_point(&mut rng);
        let m = random_mat(&mut rng);
        let lhs = transform(&m, &z).norm_sq();
        let rhs = 2.0 * r_kernel(&z, &m) + m.quad_form() as f64;
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    out.push(timed(
        Report::new("lattice/majorant-identity", worst, tol(cfg, 1e-10))
            .with_input("samples", 1000)
            .with_input("seed", cfg.seed),
        t0,
    ));

    // R(gamma z, M^gamma) = R(z, M) for the generators T (translation) and
    // S (inversion) acting on the first factor; M^gamma = gamma_1 M tgamma_2
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = random_point(&mut rng);
        let m = random_mat(&mut rng);
        let r0 = r_kernel(&z, &m);

        // T in the first variable: z1 -> z1 + 1, M^gamma = T^{-1}... the
        // invariant combination is R((z1+1, z2), M) = R(z, M^g) with
        // g = (T^{-1}, 1): M^g = T^{-1} M.
        let zt = PointH2::new(z.x1 + 1.0, z.y1, z.x2, z.y2).unwrap();
        let mt = LatMat::new(m.a - m.c, m.b - m.d, m.c, m.d);
        worst = worst.max((r_kernel(&zt, &mt) - r0).abs() / (1.0 + r0));

        // S in the first variable: z1 -> -1/z1; with S = (0,-1;1,0),
        // M^g = S^{-1} M keeps R invariant
        let z1 = z.z1();
        let sz1 = -1.0 / z1;
        let zs = PointH2::new(sz1.re, sz1.im, z.x2, z.y2).unwrap();
        let ms = LatMat::new(m.c, m.d, -m.a, -m.b);
        worst = worst.max((r_kernel(&zs, &ms) - r0).abs() / (1.0 + r0));

        // S in the second variable: z2 -> -1/z2, acting through tgamma_2
        let z2 = z.z2();
        let sz2 = -1.0 / z2;
        let zs2 = PointH2::new(z.x1, z.y1, sz2.re, sz2.im).unwrap();
        let ms2 = LatMat::new(m.b, -m.a, m.d, -m.c);
        worst = worst.max((r_kernel(&zs2, &ms2) - r0).abs() / (1.0 + r0));
    }
    out.push(timed(Report::new("lattice/r-transform-invariance", worst, tol(cfg, 1e-10)), t0));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let z = random_point(&mut rng);
        let m = random_mat(&mut rng);
        let lhs = r_kernel(&z, &m);
        let rhs = r_kernel(&z.swap(), &m.transpose());
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs));
    }
    out.push(timed(Report::new("lattice/swap-symmetry", worst, tol(cfg, 1e-12)), t0));

    let t0 = Instant::now();
    let mut mismatches = 0.0;
    for n in 1..=12i64 {
        if hecke_reps(n).unwrap().len() as i64 != sigma1(n).unwrap() {
            mismatches += 1.0;
        }
    }
    out.push(timed(Report::new("lattice/hecke-cardinality", mismatches, tol(cfg, 0.0)), t0));
    out
}

// ---------------------------------------------------------------- fourier

pub fn suite_fourier(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();

    // a_bc(0) = (t/sqrt v) B(pi v (b/s + cs)^2) against quadrature
    let t0 = Instant::now();
    let cases0: [(f64, f64, f64, i64, i64); 5] = [
        (1.0, 2.0, 1.0, 1, -1),
        (0.7, 1.5, 1.3, 1, 1),
        (2.0, 1.0, 0.8, 2, -1),
        (1.0, 3.0, 1.0, 0, 1),
        (1.5, 2.5, 2.0, -1, -1),
    ];
    let mut worst = 0.0f64;
    for &(v, t, s, b, c) in &cases0 {
        let closed = fourier_a0(v, t, s, b, c);
        let alpha = PI * v * (b as f64 / s + c as f64 * s).powi(2);
        let q = t / v.sqrt() * quad::cap_b_quadrature(alpha, 1e-13);
        worst = worst.max((closed - q).abs());
    }
    out.push(timed(
        Report::new("fourier/a0-closed-vs-quadrature", worst, tol(cfg, 1e-8))
            .with_input("cases", 5),
        t0,
    ));

    // a_bc(n) against the u-integral (t/sqrt v) int_1^inf
    //   e^{-pi v y^2 u/t^2 - pi t^2 n^2/(v u)} u^{-3/2} du
    let t0 = Instant::now();
    let cases: [(f64, f64, f64, i64); 5] = [
        (1.0, 1.5, 2.0, 1),
        (1.0, 2.0, 1.0, 1),
        (0.7, 1.2, 0.5, 2),
        (2.0, 3.0, 1.5, 1),
        (1.0, 1.0, 3.0, 3),
    ];
    let mut worst = 0.0f64;
    for &(v, t, y, n) in &cases {
        let closed = fourier_an(v, t, 1.0, y, n);
        let a = PI * v * y * y / (t * t);
        let b = PI * t * t * (n * n) as f64 / v;
        let f = move |u: f64| (-a * u - b / u).exp() * u.powf(-1.5);
        let upper = if a > 1e-6 { (60.0 / a).max(60.0) } else { 1e9 };
        let q = t / v.sqrt() * quad::integrate(&f, 1.0, upper.min(1e7), 1e-14);
        worst = worst.max((closed - q).abs());
    }
    out.push(timed(
        Report::new("fourier/an-closed-vs-quadrature", worst, tol(cfg, 1e-8))
            .with_input("cases", 5),
        t0,
    ));
    out
}

// --------------------------------------------------------------- boundary

pub fn suite_boundary(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let ray = |t: f64, s0: f64| PointH2::new(0.1, t * s0, 0.2, t / s0).unwrap();

    for (m, label) in [(1i64, "m=1"), (0, "m=0")] {
        let t0 = Instant::now();
        let mut diffs = Vec::new();
        for &t in &[5.0, 10.0, 20.0] {
            let z = ray(t, 1.0);
            let xi = if m == 0 {
                green_zero(1.0, &z, 1e-12).unwrap().value
            } else {
                kudla_green(1.0, &z, m, 1e-12).unwrap().value
            };
            diffs.push((xi - boundary_expansion(1.0, &z, m)).abs());
        }
        // decrease along the ray, up to the summation noise floor
        let growth = (diffs[1] - diffs[0]).max(diffs[2] - diffs[1]).max(0.0);
        out.push(timed(
            Report::new(&format!("boundary/decay-{label}"), growth, tol(cfg, 1e-9))
                .with_values(&diffs),
            t0,
        ));
        let t0 = Instant::now();
        out.push(timed(
            Report::new(&format!("boundary/final-gap-{label}"), diffs[2], tol(cfg, 1e-6)),
            t0,
        ));
    }
    out
}

// -------------------------------------------------------------------- ddc

pub fn suite_ddc(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let h = 1e-3;

    let t0 = Instant::now();
    let z = PointH2::new(0.0, 1.0, 0.0, 2.0).unwrap();
    let f = |p: &PointH2| p.t();
    let got = ddc_numeric_richardson(&f, &z, h).unwrap();
    let want = omega_3().scale(C64::new(z.t() / (4.0 * PI), 0.0));
    out.push(timed(
        Report::new("ddc/dd^c-t", got.sub(&want).max_abs(), tol(cfg, 1e-5)),
        t0,
    ));

    let t0 = Instant::now();
    let f = |p: &PointH2| (p.t() * p.t()).ln();
    let got = ddc_numeric_richardson(&f, &z, h).unwrap();
    let want = phi_km(1.0, &z, &LatMat::new(0, 0, 0, 0)).scale(C64::new(-1.0, 0.0));
    out.push(timed(
        Report::new("ddc/dd^c-log-t2", got.sub(&want).max_abs(), tol(cfg, 1e-5)),
        t0,
    ));

    let t0 = Instant::now();
    let cases = [
        (PointH2::new(0.0, 1.0, 0.0, 2.0).unwrap(), LatMat::new(1, 0, 0, -1)),
        (PointH2::new(1.0 / 3.0, 2.0, 0.0, 3.0).unwrap(), LatMat::new(0, 1, -1, 0)),
        (PointH2::new(0.0, 1.0, 0.0, 2.0).unwrap(), LatMat::new(0, 1, 1, 0)),
        (PointH2::new(0.2, 1.5, -0.3, 1.1).unwrap(), LatMat::new(1, 1, -1, 1)),
        (PointH2::new(-0.4, 0.9, 0.1, 1.8).unwrap(), LatMat::new(2, 1, 0, 1)),
    ];
    let mut worst = 0.0f64;
    for (z, m) in &cases {
        worst = worst.max(verify_kudla_identity(1.0, z, m, h).unwrap());
    }
    out.push(timed(
        Report::new("ddc/kudla-identity", worst, tol(cfg, 1e-5)).with_input("points", 5),
        t0,
    ));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &(v, u, t, s, b, c) in &[
        (1.0, 0.2, 1.5, 1.3, 1i64, -2i64),
        (1.0, 0.0, 1.0, 2.0, 1, -1),
        (0.8, 0.1, 1.2, 0.9, 1, 2),
        (1.4, -0.3, 2.0, 1.6, 2, -1),
    ] {
        worst = worst.max(verify_restricted_identity(v, u, t, s, b, c, h).unwrap());
    }
    out.push(timed(Report::new("ddc/restricted-identity", worst, tol(cfg, 1e-5)), t0));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (w, m) in [
        (C64::new(0.0, 1.0), LatMat::new(0, 1, -1, 0)),
        (C64::new(0.0, 1.0), LatMat::new(1, 0, 0, 1)),
        (C64::new(0.4, 1.3), LatMat::new(2, 1, -1, 3)),
    ] {
        let (lhs, rhs) = restrict_to_12(1.1, 0.3, w, &m).unwrap();
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    out.push(timed(Report::new("ddc/o12-restriction", worst, tol(cfg, 1e-8)), t0));
    out
}

// ------------------------------------------------------------------ theta

pub fn suite_theta(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let cutoff = 50i64;
    let tau = C64::new(1.0 / 3.0, 2.0);

    for kind in [
        ThetaKind::Jacobi,
        ThetaKind::JacobiKm,
        ThetaKind::Siegel11,
        ThetaKind::Siegel11Km,
        ThetaKind::CheckKm,
    ] {
        let t0 = Instant::now();
        let r = modularity_residual(kind, tau, None, cutoff).unwrap();
        out.push(timed(
            Report::new(&format!("theta/{}", kind.name()), r, tol(cfg, 1e-9))
                .with_input("tau", tau)
                .with_input("cutoff", cutoff),
            t0,
        ));
    }

    let t0 = Instant::now();
    let v = theta_eval(ThetaKind::JacobiKm, C64::new(0.0, 1.0), None, cutoff)
        .unwrap()
        .scalar()
        .unwrap();
    out.push(timed(Report::new("theta/jacobi_km-at-i", v.norm(), tol(cfg, 1e-12)), t0));

    let t0 = Instant::now();
    let z = PointH2::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let r = modularity_residual(ThetaKind::Siegel22, C64::new(0.2, 1.0), Some(&z), cutoff).unwrap();
    out.push(timed(Report::new("theta/siegel22", r, tol(cfg, 1e-9)), t0));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (tau, z) in [
        (C64::new(0.0, 1.0), PointH2::new(0.0, 1.0, 0.0, 2.0).unwrap()),
        (C64::new(0.5, 0.5), PointH2::new(0.0, 1.0, 0.0, 1.0).unwrap()),
        (C64::new(-0.25, 0.8), PointH2::new(0.2, 1.5, 0.0, 1.0).unwrap()),
    ] {
        worst = worst
            .max(modularity_residual(ThetaKind::PhiKmSeries, tau, Some(&z), cutoff).unwrap());
    }
    out.push(timed(
        Report::new("theta/phi_km_series", worst, tol(cfg, 1e-6)).with_input("points", 3),
        t0,
    ));
    out
}

// ---------------------------------------------------------------- poisson

pub fn suite_poisson(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let cutoff = 60i64;

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (tau, s) in [
        (C64::new(1.0 / 3.0, 1.0), 1.0),
        (C64::new(0.0, 2.0), 2.0),
        (C64::new(0.2, 1.5), 0.5),
    ] {
        worst = worst.max(poisson_defect_check(tau, s, cutoff));
    }
    out.push(timed(
        Report::new("poisson/corrected-summation", worst, tol(cfg, 1e-7))
            .with_input("cutoff", cutoff),
        t0,
    ));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (tau, z) in [
        (C64::new(1.0 / 3.0, 1.0), PointH2::new(0.0, 2.0, 0.0, 0.5).unwrap()),
        (C64::new(0.0, 1.0), PointH2::new(0.0, 1.0, 0.0, 1.0).unwrap()),
        (C64::new(-0.2, 0.8), PointH2::new(0.1, 1.2, -0.3, 0.7).unwrap()),
    ] {
        worst = worst
            .max(modularity_residual(ThetaKind::XiCheckPlus, tau, Some(&z), cutoff).unwrap());
    }
    out.push(timed(Report::new("poisson/xi-check-plus-weight-2", worst, tol(cfg, 1e-7)), t0));

    let t0 = Instant::now();
    let tau = C64::new(0.0, 2.0);
    let direct = f2_limits(tau, 1.0, 300).f2_origin.unwrap();
    let closed = f2_closed_form(tau, 300);
    out.push(timed(
        Report::new("poisson/f2-origin", (direct - closed).norm(), tol(cfg, 1e-10))
            .with_input("tau", tau),
        t0,
    ));
    out
}

// ---------------------------------------------------------------- hurwitz

pub fn suite_hurwitz(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();

    let t0 = Instant::now();
    let mut bad = 0.0;
    for n in 0..=800i64 {
        let h = hurwitz_h(n).unwrap();
        if n > 0 && (n % 4 == 1 || n % 4 == 2) && h != 0.into() {
            bad += 1.0;
        }
        if n > 0 && h < 0.into() {
            bad += 1.0;
        }
    }
    out.push(timed(
        Report::new("hurwitz/reduced-form-range", bad, tol(cfg, 0.0)).with_input("n_max", 800),
        t0,
    ));

    let t0 = Instant::now();
    let ok1 = hurwitz_h1(1).unwrap() == 1.into();
    let ok2 = hurwitz_h1(2).unwrap() == 4.into();
    let bad = (!ok1 as i32 + !ok2 as i32) as f64;
    out.push(timed(Report::new("hurwitz/h1-values", bad, tol(cfg, 0.0)), t0));

    let t0 = Instant::now();
    let mut bad = 0.0;
    for n in 1..=200i64 {
        let mut min_sum = 0i64;
        for d in 1..=n {
            if n % d == 0 {
                min_sum += d.min(n / d);
            }
        }
        let lhs = Rational64::new(2 * sigma1(n).unwrap(), 1);
        if lhs != hurwitz_h1(n).unwrap() + Rational64::new(min_sum, 1) {
            bad += 1.0;
        }
    }
    out.push(timed(
        Report::new("hurwitz/class-number-identity", bad, tol(cfg, 0.0)).with_input("n_max", 200),
        t0,
    ));

    // informational: the two boundary generating series against 2 E_2; the
    // displays do not combine into an exact identity, so the discrepancy is
    // recorded rather than asserted
    let t0 = Instant::now();
    let tau = C64::new(0.1, 1.2);
    let (line_form, class_form) = funke_series(tau, 40).unwrap();
    let e2 = 2.0 * eisenstein_e2(tau, 40);
    let mut rep = Report::new(
        "hurwitz/eisenstein-relation-info",
        (class_form - e2).norm().min((line_form - e2).norm()),
        f64::INFINITY,
    );
    rep = rep
        .with_values(&[
            (line_form - e2).norm(),
            (class_form - e2).norm(),
            (line_form - class_form).norm(),
        ])
        .with_input("note", "informational: recorded, not asserted");
    out.push(timed(rep, t0));
    out
}

// ---------------------------------------------------------------- heights

pub fn suite_heights(cfg: &SuiteConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let spec = CutoffSpec::default();

    for m in [1i64, 2, 3] {
        let t0 = Instant::now();
        let est = height_numeric(m, 1.0, 40.0, &spec).unwrap();
        let want = 4.0 * PI * sigma1(m).unwrap() as f64;
        out.push(timed(
            Report::new(&format!("heights/numeric-m{m}"), (est.height.value - want).abs(), tol(cfg, 1e-3))
                .with_values(&[est.height.value, want, est.error_estimate]),
            t0,
        ));
    }

    // m = 0 boundary slope: 2 Xi~_rho(v,(i,iT),0) / log|q1 q2| -> 1/6 - 1/(2 pi v)
    let t0 = Instant::now();
    let v = 1.0;
    let t_big = 40.0;
    let z = PointH2::new(0.0, 1.0, 0.0, t_big).unwrap();
    let val = green_modified(v, &z, 0, &spec, 1e-10).unwrap().value;
    let ratio = 2.0 * val / (-2.0 * PI * (1.0 + t_big));
    let want = 1.0 / 6.0 - 1.0 / (2.0 * PI * v);
    out.push(timed(
        Report::new("heights/zero-slope-ratio", (ratio - want).abs(), tol(cfg, 1e-3))
            .with_values(&[ratio, want]),
        t0,
    ));

    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for m in 1..=20i64 {
        let lhs = height_closed(m, 1.0).value;
        let rhs = 4.0 * PI * sigma1(m).unwrap() as f64;
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    out.push(timed(Report::new("heights/series-termwise", worst, tol(cfg, 1e-12)), t0));

    let t0 = Instant::now();
    let e2 = eisenstein_e2(C64::new(0.0, 1.0), 80);
    out.push(timed(Report::new("heights/e2-vanishes-at-i", e2.norm(), tol(cfg, 1e-10)), t0));
    out
}

// ------------------------------------------------------------------ entry

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<Vec<Report>> {
    Some(match name {
        "special" => suite_special(cfg),
        "lattice" => suite_lattice(cfg),
        "fourier" => suite_fourier(cfg),
        "boundary" => suite_boundary(cfg),
        "ddc" => suite_ddc(cfg),
        "theta" => suite_theta(cfg),
        "poisson" => suite_poisson(cfg),
        "hurwitz" => suite_hurwitz(cfg),
        "heights" => suite_heights(cfg),
        "all" => {
            let mut all = Vec::new();
            for s in SUITE_NAMES {
                all.extend(run_suite(s, cfg).unwrap());
            }
            all
        }
        _ => return None,
    })
}

