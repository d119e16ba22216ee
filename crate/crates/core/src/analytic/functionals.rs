//! Interference functionals.
//!
//! `G(s, α)` is the Laplace exponent of a single Rayleigh-faded PPP
//! interferer field. `F(s, α, R)` is the same exponent for full-duplex
//! pairs, where both endpoints of every link radiate. `K` is the angular
//! average that couples the two endpoints.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{integrate_finite, integrate_semi_infinite, QuadratureSpec};

/// Relative slack allowed when checking `(1 + δ) G ≤ F ≤ 2 G`.
pub const SANDWICH_SLACK: f64 = 1e-6;

fn check_args(s: f64, alpha: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("s must be > 0, got {s}")));
    }
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be > 2, got {alpha}")));
    }
    Ok(())
}

/// `G(s, α) = π² δ s^δ / sin(π δ)` with `δ = 2/α`.
pub fn g_fn(s: f64, alpha: f64) -> Result<f64> {
    check_args(s, alpha)?;
    let delta = 2.0 / alpha;
    Ok(PI * PI * delta * s.powf(delta) / (PI * delta).sin())
}

// x / (1 + x) without the inf/inf at x = ∞.
#[inline]
fn saturating_ratio(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// Scaled gain `s · d^{-α}` toward the origin from the partner endpoint at
/// angle `phi` relative to the ray through the near endpoint.
#[inline]
fn partner_gain(s: f64, r: f64, big_r: f64, alpha: f64, phi: f64) -> f64 {
    // r² + R² + 2 r R cos φ, arranged so it never goes negative.
    let c = (0.5 * phi).cos();
    let d2 = (r - big_r) * (r - big_r) + 4.0 * r * big_r * c * c;
    s * d2.powf(-0.5 * alpha)
}

/// `∫₀^π b/(1+b) dφ` where `b` is the partner gain. `K = 2π − 2·this`.
fn partner_blocking(s: f64, r: f64, big_r: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_finite(
        |phi| saturating_ratio(partner_gain(s, r, big_r, alpha, phi)),
        0.0,
        PI,
        spec,
    )
}

/// `K(s, r, R, α) = ∫₀^{2π} dφ / (1 + s (r² + R² + 2 r R cos φ)^{-α/2})`.
pub fn k_fn(s: f64, r: f64, big_r: f64, alpha: f64) -> Result<f64> {
    k_fn_with(s, r, big_r, alpha, &QuadratureSpec::default())
}

pub fn k_fn_with(s: f64, r: f64, big_r: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_args(s, alpha)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be >= 0, got {r}")));
    }
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::domain(format!("R must be > 0, got {big_r}")));
    }
    // Integrand is symmetric about φ = π.
    integrate_finite(
        |phi| 1.0 / (1.0 + partner_gain(s, r, big_r, alpha, phi)),
        0.0,
        PI,
        spec,
    )
    .map(|half| 2.0 * half)
}

/// `F(s, α, R) = ∫₀^∞ (2π − K(s, r, R, α) / (1 + s r^{-α})) r dr`.
///
/// The bracket is evaluated as
/// `2π·a/(1+a) + 2/(1+a) · ∫₀^π b/(1+b) dφ` with `a = s r^{-α}`, which is
/// the same quantity without the cancellation of `2π − K/(1+a)` at large `r`.
///
/// Every result is checked against `(1+δ) G ≤ F ≤ 2 G`.
pub fn f_fn(s: f64, alpha: f64, big_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_args(s, alpha)?;
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::domain(format!("R must be > 0, got {big_r}")));
    }
    spec.validate()?;

    let wrap = |source: Error| Error::Functional {
        s,
        alpha,
        r_link: big_r,
        source: Box::new(source),
    };

    let inner_spec = spec.tightened(1e-2);
    // The closure cannot return errors, so the first one is parked here.
    let failure = std::cell::RefCell::new(None);
    let integrand = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let a = s * r.powf(-alpha);
        match partner_blocking(s, r, big_r, alpha, &inner_spec) {
            Ok(j) => r * (2.0 * PI * saturating_ratio(a) + 2.0 * j / (1.0 + a)),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    // The partner endpoint can sit on the receiver when r = R; split there.
    let near = integrate_finite(integrand, 0.0, big_r, spec);
    let far = integrate_semi_infinite(|r| integrand(big_r + r), 0.0, spec);
    if let Some(e) = failure.into_inner() {
        return Err(wrap(e));
    }
    let f = near.map_err(wrap)? + far.map_err(wrap)?;

    let g = g_fn(s, alpha)?;
    let delta = 2.0 / alpha;
    let (lo, hi) = ((1.0 + delta) * g, 2.0 * g);
    if f < lo * (1.0 - SANDWICH_SLACK) || f > hi * (1.0 + SANDWICH_SLACK) {
        return Err(wrap(Error::Consistency(format!(
            "F = {f:e} outside [(1+δ)G, 2G] = [{lo:e}, {hi:e}]"
        ))));
    }
    Ok(f)
}
