//! Archimedean heights of the modified special cycles against the point
//! (i, infinity).
//!
//! The closed forms are 0 for m < 0, 4 pi sigma_1(m) for m > 0 and
//! 4 pi c_0 with c_0 = -1/24 + 1/(8 pi v) for m = 0; the numeric route
//! evaluates the modified Green function at (i, iT) and lets T grow. The
//! generating series of the closed heights is 4 pi E_2(tau, 1) termwise.

use crate::error::Result;
use crate::green::{green_modified, CutoffSpec};
use crate::lattice::PointH2;
use crate::qseries::{sigma1, QSeries};
use num_complex::Complex64;
use std::f64::consts::PI;

/// c_0 = -1/24 + 1/(8 pi v), the multiple of the boundary divisor in T(0).
pub fn c0(v: f64) -> f64 {
    -1.0 / 24.0 + 1.0 / (8.0 * PI * v)
}

/// How a height value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightMethod {
    ClosedForm,
    NumericLimit,
}

#[derive(Debug, Clone, Copy)]
pub struct HeightValue {
    pub m: i64,
    pub value: f64,
    pub method: HeightMethod,
}

/// A numeric height estimate together with the spread of the two
/// evaluation scales used for it.
#[derive(Debug, Clone, Copy)]
pub struct HeightEstimate {
    pub height: HeightValue,
    pub error_estimate: f64,
}

/// Closed-form archimedean height: 0 (m < 0), 4 pi sigma_1(m) (m > 0),
/// 4 pi c_0(v) (m = 0).
pub fn height_closed(m: i64, v: f64) -> HeightValue {
    let value = if m < 0 {
        0.0
    } else if m == 0 {
        4.0 * PI * c0(v)
    } else {
        4.0 * PI * sigma1(m).expect("m > 0") as f64
    };
    HeightValue { m, value, method: HeightMethod::ClosedForm }
}

/// Numeric height for m > 0: the modified Green function at z_T = (i, iT),
/// which tends to 4 pi sigma_1(m) as T grows. The error estimate is the
/// spread between the evaluations at T and T/2.
pub fn height_numeric(m: i64, v: f64, t_large: f64, spec: &CutoffSpec) -> Result<HeightEstimate> {
    if m <= 0 {
        return Err(crate::error::Error::Domain(format!(
            "height_numeric requires m > 0, got {m}"
        )));
    }
    if t_large < spec.t1 * spec.t1 {
        return Err(crate::error::Error::Domain(format!(
            "height_numeric requires T >= t1^2 = {} so that rho = 1 at (i, iT)",
            spec.t1 * spec.t1
        )));
    }
    let eval = |t: f64| -> Result<f64> {
        let z = PointH2::new(0.0, 1.0, 0.0, t)?;
        Ok(green_modified(v, &z, m, spec, 1e-10)?.value)
    };
    let coarse = eval(t_large / 2.0)?;
    let fine = eval(t_large)?;
    Ok(HeightEstimate {
        height: HeightValue { m, value: fine, method: HeightMethod::NumericLimit },
        error_estimate: (fine - coarse).abs(),
    })
}

/// The generating series sum_{m >= 0} height_closed(m) q^m as a QSeries.
pub fn height_qseries(v: f64, cutoff: i64) -> QSeries {
    let mut s = QSeries::new(cutoff);
    for m in 0..=cutoff {
        s.set(m, Complex64::new(height_closed(m, v).value, 0.0));
    }
    s
}

/// Evaluate the height generating series at tau. With v = Im(tau) it equals
/// 4 pi E_2(tau, 1) by construction of the closed forms.
pub fn height_series(v: f64, cutoff: i64, tau: Complex64) -> Complex64 {
    height_qseries(v, cutoff).eval(tau)
}
