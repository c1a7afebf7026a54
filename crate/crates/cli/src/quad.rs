//! Adaptive Simpson quadrature for the verification suites.
//!
//! Used as the independent oracle side of closed-form checks; kept free of
//! any special-function code so the comparison stays meaningful.

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrate f over [a, b] to absolute tolerance tol.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Quadrature of int_1^inf e^{-alpha u} u^{-3/2} du with the upper limit
/// chosen so the dropped tail is below the tolerance.
pub fn cap_b_quadrature(alpha: f64, tol: f64) -> f64 {
    let f = move |u: f64| (-alpha * u).exp() * u.powf(-1.5);
    // tail beyond U is bounded by e^{-alpha U} * 2/sqrt(U)
    let upper = if alpha > 0.0 { (40.0 / alpha).max(50.0) } else { 1e12 };
    integrate(&f, 1.0, upper.min(1e7), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let got = integrate(&|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((got - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cap_b_quadrature_at_zero_limit() {
        // int_1^inf u^{-3/2} du = 2, approached as alpha -> 0
        let got = cap_b_quadrature(1e-9, 1e-12);
        assert!((got - 2.0).abs() < 1e-3);
    }
}
