//! Closed-form upper bounds on the identical-basis and parallel game values.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn check_n(n: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::param(format!(
            "n = {n}: the bounds need an even n >= 2"
        )));
    }
    Ok(())
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `1/2 + (sqrt(e)/2) cos(pi/8)^n`. Vacuous (above 1) for small `n`.
pub fn bound_identical_bb84(n: usize) -> Result<f64> {
    check_n(n)?;
    let c = (std::f64::consts::PI / 8.0).cos();
    Ok(0.5 + 0.5 * 0.5f64.exp() * c.powi(n as i32))
}

/// The tighter intermediate bound before the Stirling-type estimate:
/// `1/2 + (1/2N) sum_{i=0}^{n/2} C(n/2, i)^2 2^{-i/2}` with `N = C(n, n/2)`.
///
/// Each `alpha = 1` permutation contributes at most 1, and each `alpha = 0`
/// permutation whose images differ from their inputs in `2i` positions
/// contributes at most `2^{-i/2}`.
pub fn bound_bb84_chain(n: usize) -> Result<f64> {
    check_n(n)?;
    let h = n / 2;
    let ln_n = ln_binomial(n, h);
    let sum: f64 = (0..=h)
        .map(|i| (2.0 * ln_binomial(h, i) - ln_n - (i as f64 / 2.0) * std::f64::consts::LN_2).exp())
        .sum();
    Ok(0.5 + 0.5 * sum)
}

/// `ln` of [`bound_parallel`].
pub fn ln_bound_parallel(n: usize, kappa: usize) -> Result<f64> {
    check_n(n)?;
    if kappa == 0 {
        return Err(Error::param("kappa must be at least 1"));
    }
    let ln2 = std::f64::consts::LN_2;
    let ln_n = ln_binomial(n, n / 2);
    let ratio =
        (1.0 - (-(n as f64 / 4.0 + 0.5) * ln2).exp()) / (1.0 - std::f64::consts::FRAC_1_SQRT_2);
    // ln(1 + X) with X = C(n/2, n/4)^2 * ratio, kept in log space
    let ln_x = 2.0 * ln_binomial(n / 2, n / 4) + ratio.ln();
    let ln_1px = if ln_x > 0.0 {
        ln_x + (-ln_x).exp().ln_1p()
    } else {
        ln_x.exp().ln_1p()
    };
    Ok(kappa as f64 * (ln_1px - ln2 - ln_n))
}

/// `(1/(2N))^kappa (1 + C(n/2, n/4)^2 (1 - 2^{-n/4-1/2}) / (1 - 2^{-1/2}))^kappa`
/// with `N = C(n, n/2)`. For odd `n/2` the central binomial uses `floor(n/4)`.
pub fn bound_parallel(n: usize, kappa: usize) -> Result<f64> {
    Ok(ln_bound_parallel(n, kappa)?.exp())
}
