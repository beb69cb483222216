//! Principal branch of the Lambert W function on the real line.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// The branch point `-1/e`.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Inputs this far below the branch point are treated as the branch point.
pub const BRANCH_TOLERANCE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 50;
const RESIDUAL_TOL: f64 = 1e-14;

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // series in p = sqrt(2(ex + 1)) around the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W0(x)`, the solution `w >= -1` of `w * e^w = x`.
///
/// Halley iteration from a piecewise initial estimate. Inputs within
/// [`BRANCH_TOLERANCE`] below `-1/e` are clamped to the branch point.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    if x < BRANCH_POINT - BRANCH_TOLERANCE {
        return Err(Error::Domain(format!(
            "lambert_w0 undefined for x = {x} < -1/e"
        )));
    }
    Ok(w0_unchecked(x))
}

/// Like [`lambert_w0`] but clamps every input below the branch point.
pub(crate) fn w0_unchecked(x: f64) -> f64 {
    if x <= BRANCH_POINT {
        return -1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let tol = RESIDUAL_TOL * x.abs().max(1.0);
    let mut w = initial_guess(x);
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= tol {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        if next == w {
            break;
        }
        w = next;
    }
    w
}
