//! Exact generator for the positive stable random variable and its
//! polynomially tilted version.
//!
//! The positive stable variable `T_alpha` has Laplace transform
//! `E exp(-s T) = exp(-s^alpha)`; the tilted version `T_{alpha,theta}`
//! has density proportional to `t^-theta f_alpha(t)`. One draw costs one
//! unit-rate gamma variate plus one Zolotarev variate: with
//! `b = theta/alpha`,
//!
//! ```text
//! T = ( A(Z) / G )^((1-alpha)/alpha) = 1 / (B(Z) G^(1-alpha))^(1/alpha)
//! ```
//!
//! where `Z` has density proportional to `B(x)^b` on `[0, pi]`,
//! `G ~ gamma(1 + theta (1-alpha)/alpha)`, and `A`, `B = A^-(1-alpha)`
//! are the Zolotarev functions below. `Z` is produced by rejection:
//! a uniform proposal when the Gaussian width `sigma` is large, a
//! half-normal proposal otherwise, and for `b` in (-1, 0) a power-law
//! proposal against the lower envelope `B(x) >= B(0) (pi - x) / pi`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::ln_gamma;

/// Iteration cap for the rejection loops. The accepted-fraction is O(1)
/// for all admissible parameters, so hitting the cap signals a fault.
pub const REJECTION_CAP: u64 = 1_000_000;

/// Below this argument the Zolotarev functions use their analytic limit.
const LIMIT_EPS: f64 = 1e-10;

/// Parameters of the tilted positive stable distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    theta: f64,
}

impl StableParams {
    /// Requires `0 < alpha < 1` and `theta > -alpha`, which keeps the
    /// tilt exponent `b = theta/alpha` above -1 and the density
    /// normalizer finite.
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "stable exponent must satisfy 0 < alpha < 1, got {alpha}"
            )));
        }
        if !theta.is_finite() || theta <= -alpha {
            return Err(Error::InvalidParameter(format!(
                "tilt must satisfy theta > -alpha, got theta={theta}, alpha={alpha}"
            )));
        }
        Ok(StableParams { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Tilt exponent `b = theta / alpha` of the Zolotarev density.
    pub fn tilt(&self) -> f64 {
        self.theta / self.alpha
    }
}

/// Dominating-curve constants of the Zolotarev rejection sampler.
#[derive(Debug, Clone, Copy)]
pub struct ZolotarevEnvelope {
    /// Tilt exponent, greater than -1.
    pub b: f64,
    /// Gaussian width, `sigma^2 = 1 / (b alpha (1-alpha))`; infinite
    /// unless `b > 0`.
    pub sigma: f64,
    /// `B(0) = alpha^-alpha (1-alpha)^-(1-alpha)`, the maximum of `B`.
    pub b0: f64,
}

impl ZolotarevEnvelope {
    pub fn new(params: &StableParams) -> Self {
        let alpha = params.alpha;
        let b = params.tilt();
        let sigma = if b > 0.0 {
            (1.0 / (b * alpha * (1.0 - alpha))).sqrt()
        } else {
            f64::INFINITY
        };
        ZolotarevEnvelope {
            b,
            sigma,
            b0: ln_b0(alpha).exp(),
        }
    }
}

/// log B(0).
fn ln_b0(alpha: f64) -> f64 {
    -(alpha * alpha.ln() + (1.0 - alpha) * (1.0 - alpha).ln())
}

/// log A(x) for 0 <= x < pi, computed in log space to survive the
/// vanishing sines at both ends of the interval.
fn ln_a_unchecked(x: f64, alpha: f64) -> f64 {
    if x < LIMIT_EPS {
        // A(0) = (alpha^alpha (1-alpha)^(1-alpha))^(1/(1-alpha))
        return (alpha * alpha.ln() + (1.0 - alpha) * (1.0 - alpha).ln()) / (1.0 - alpha);
    }
    (alpha * (alpha * x).sin().ln() + (1.0 - alpha) * ((1.0 - alpha) * x).sin().ln()
        - x.sin().ln())
        / (1.0 - alpha)
}

/// log B(x) = -(1-alpha) log A(x). `pi_minus_x` is passed separately so
/// that `sin x = sin(pi - x)` keeps full precision next to pi.
fn ln_b_unchecked(x: f64, pi_minus_x: f64, alpha: f64) -> f64 {
    if x < LIMIT_EPS {
        return ln_b0(alpha);
    }
    pi_minus_x.min(x).sin().ln()
        - alpha * (alpha * x).sin().ln()
        - (1.0 - alpha) * ((1.0 - alpha) * x).sin().ln()
}

fn check_zolotarev_args(x: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Zolotarev functions require 0 < alpha < 1, got {alpha}"
        )));
    }
    if !(0.0..PI).contains(&x) {
        return Err(Error::Domain(format!(
            "Zolotarev functions are defined on [0, pi), got {x} (A diverges at pi)"
        )));
    }
    Ok(())
}

/// Zolotarev function
/// `A(x) = (sin(alpha x)^alpha sin((1-alpha)x)^(1-alpha) / sin x)^(1/(1-alpha))`,
/// with its analytic limit at `x = 0`.
pub fn zolotarev_a(x: f64, alpha: f64) -> Result<f64> {
    check_zolotarev_args(x, alpha)?;
    Ok(ln_a_unchecked(x, alpha).exp())
}

/// `B(x) = A(x)^-(1-alpha)`, decreasing from `B(0)` to 0 on `[0, pi)`.
pub fn zolotarev_b(x: f64, alpha: f64) -> Result<f64> {
    check_zolotarev_args(x, alpha)?;
    Ok(ln_b_unchecked(x, PI - x, alpha).exp())
}

/// Accepted Zolotarev draw paired with `log B` at the draw, carried at
/// full precision. Recomputing `log B` from the rounded position would
/// lose the distance to pi when that distance drops below one ulp, which
/// happens with non-negligible probability for tilts near -1.
fn sample_zolotarev_with_ln_b(
    params: &StableParams,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let alpha = params.alpha;
    let b = params.tilt();
    if b == 0.0 {
        let x = rng.uniform_in(0.0, PI);
        return Ok((x, ln_b_unchecked(x, PI - x, alpha)));
    }
    let lb0 = ln_b0(alpha);
    if b > 0.0 {
        let sigma = (1.0 / (b * alpha * (1.0 - alpha))).sqrt();
        if sigma >= (2.0 * PI).sqrt() {
            for _ in 0..REJECTION_CAP {
                let x = rng.uniform_in(0.0, PI);
                let v = rng.uniform();
                let ln_bx = ln_b_unchecked(x, PI - x, alpha);
                if v.ln() <= b * (ln_bx - lb0) {
                    return Ok((x, ln_bx));
                }
            }
        } else {
            for _ in 0..REJECTION_CAP {
                let n = rng.normal();
                let x = sigma * n.abs();
                if x >= PI {
                    continue;
                }
                let v = rng.uniform();
                let ln_bx = ln_b_unchecked(x, PI - x, alpha);
                if v.ln() - 0.5 * n * n <= b * (ln_bx - lb0) {
                    return Ok((x, ln_bx));
                }
            }
        }
    } else {
        // b in (-1, 0): the density grows like (pi - x)^b at pi. From
        // sin x >= x (pi - x) / pi and sin(cx) <= cx it follows that
        // B(x) >= B(0) (pi - x) / pi, hence
        // B(x)^b <= B(0)^b ((pi - x)/pi)^b. Proposing pi - X = pi U^(1/(1+b))
        // by inversion gives an O(1) acceptance rate on the whole interval.
        //
        // log(pi - X) is kept in log space: for b near -1 the proposal
        // reaches distances from pi far below the smallest positive
        // float, where the density still carries real mass. Splitting
        // log B(x) = log sinc(pi - x) - ... + log(pi - x) keeps the
        // acceptance ratio finite there, and the returned log B stays
        // exact even when the position itself rounds onto pi.
        let inv = 1.0 / (1.0 + b);
        for _ in 0..REJECTION_CAP {
            let ln_pmx = PI.ln() + inv * rng.uniform().ln();
            let pmx = ln_pmx.exp();
            let x = PI - pmx;
            let v = rng.uniform();
            let sinc = if pmx < 1e-8 { 1.0 } else { pmx.sin() / pmx };
            // ln B(x) - ln(pi - x), finite on the whole interval.
            let ln_rest = sinc.ln()
                - alpha * (alpha * x).sin().ln()
                - (1.0 - alpha) * ((1.0 - alpha) * x).sin().ln();
            if v.ln() <= b * (ln_rest - lb0 + PI.ln()) {
                return Ok((x, ln_rest + ln_pmx));
            }
        }
    }
    Err(Error::RejectionCapExceeded {
        iterations: REJECTION_CAP,
    })
}

/// Draws a variate with density proportional to `B(x)^b` on `[0, pi]`,
/// `b = theta/alpha`.
///
/// Branch selection: `b = 0` is exactly uniform; `b > 0` uses a uniform
/// proposal when `sigma >= sqrt(2 pi)` and a half-normal proposal
/// otherwise (accept when `X <= pi` and `V exp(-N^2/2) <= (B(X)/B(0))^b`);
/// `b < 0` uses the power-law proposal described above.
pub fn sample_zolotarev(params: &StableParams, rng: &mut RngStream) -> Result<f64> {
    sample_zolotarev_with_ln_b(params, rng).map(|(x, _)| x)
}

/// Draws `T_{alpha,theta}` from one Zolotarev and one gamma variate.
///
/// For negative tilts the law has a heavy right tail and the extreme
/// quantiles can exceed the f64 range; such draws come back as infinity,
/// which the truncation-level map handles as its limit.
pub fn sample_tilted_stable(params: &StableParams, rng: &mut RngStream) -> Result<f64> {
    let alpha = params.alpha;
    let (_, ln_w) = sample_zolotarev_with_ln_b(params, rng)?;
    let shape = 1.0 + params.theta * (1.0 - alpha) / alpha;
    let g = loop {
        let g = rng.gamma_raw(shape);
        if g > 0.0 {
            break g;
        }
    };
    let ln_t = -(ln_w + (1.0 - alpha) * g.ln()) / alpha;
    Ok(ln_t.exp())
}

/// Closed-form moment `E(T_{alpha,theta}^r)`, finite for `r - theta < alpha`:
///
/// ```text
/// E T^r = Gamma(theta+1)/Gamma(theta/alpha+1)
///         * Gamma(1-(r-theta)/alpha) / Gamma(1-(r-theta))
/// ```
///
/// This is the analytic oracle the sampler is validated against.
pub fn tilted_stable_moment(params: &StableParams, r: f64) -> Result<f64> {
    let (alpha, theta) = (params.alpha, params.theta);
    let s = r - theta;
    if !r.is_finite() || s >= alpha {
        return Err(Error::InfiniteMoment(format!(
            "E(T^r) requires r - theta < alpha, got r={r}, theta={theta}, alpha={alpha}"
        )));
    }
    let ln = ln_gamma(theta + 1.0) - ln_gamma(theta / alpha + 1.0) + ln_gamma(1.0 - s / alpha)
        - ln_gamma(1.0 - s);
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (1..n).map(move |i| PI * i as f64 / n as f64)
    }

    #[test]
    fn params_validate_ranges() {
        assert!(StableParams::new(0.0, 1.0).is_err());
        assert!(StableParams::new(1.0, 1.0).is_err());
        assert!(StableParams::new(0.5, -0.5).is_err());
        assert!(StableParams::new(0.5, -0.49).is_ok());
        assert!(StableParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn zolotarev_a_closed_forms() {
        // alpha = 1/2: A(x) = (sin(x/2)^2 / sin x)^2, so A(pi/2) = 1/2.
        assert!((zolotarev_a(PI / 2.0, 0.5).unwrap() - 0.5).abs() < 1e-12);
        // Analytic limit at 0: alpha^(alpha/(1-alpha)) (1-alpha).
        assert!((zolotarev_a(0.0, 0.5).unwrap() - 0.25).abs() < 1e-12);
        assert!((zolotarev_a(1e-12, 0.5).unwrap() - 0.25).abs() < 1e-12);
        // Divergence at pi.
        assert!(zolotarev_a(PI - 1e-8, 0.5).unwrap() > 1e6);
        assert!(zolotarev_a(PI, 0.5).is_err());
        assert!(zolotarev_a(-0.1, 0.5).is_err());
        assert!(zolotarev_a(1.0, 0.0).is_err());
    }

    #[test]
    fn zolotarev_b_closed_forms_and_bound() {
        assert!((zolotarev_b(0.0, 0.5).unwrap() - 2.0).abs() < 1e-12);
        let expect = 0.5f64.powf(-0.5);
        assert!((zolotarev_b(PI / 2.0, 0.5).unwrap() - expect).abs() < 1e-12);
        for &alpha in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            let b0 = zolotarev_b(0.0, alpha).unwrap();
            let mut prev = b0;
            for x in grid(1000) {
                let bx = zolotarev_b(x, alpha).unwrap();
                assert!(bx <= b0 * (1.0 + 1e-12), "B({x}) > B(0) at alpha={alpha}");
                assert!(bx <= prev * (1.0 + 1e-12), "B not decreasing at {x}");
                prev = bx;
            }
        }
    }

    #[test]
    fn gaussian_envelope_dominates_for_positive_tilt() {
        for &alpha in &[0.25, 0.5, 0.75] {
            for &theta in &[0.1, 1.0, 10.0] {
                let params = StableParams::new(alpha, theta).unwrap();
                let env = ZolotarevEnvelope::new(&params);
                assert!(env.sigma.is_finite());
                let lb0 = ln_b0(alpha);
                for x in grid(1000) {
                    let lhs = env.b * (ln_b_unchecked(x, PI - x, alpha) - lb0);
                    let rhs = -x * x / (2.0 * env.sigma * env.sigma);
                    assert!(
                        lhs <= rhs + 1e-9,
                        "envelope violated at alpha={alpha} theta={theta} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn envelope_sigma_infinite_without_positive_tilt() {
        let params = StableParams::new(0.5, 0.0).unwrap();
        assert!(ZolotarevEnvelope::new(&params).sigma.is_infinite());
        let params = StableParams::new(0.5, -0.2).unwrap();
        assert!(ZolotarevEnvelope::new(&params).sigma.is_infinite());
        let params = StableParams::new(0.5, 1.0).unwrap();
        let env = ZolotarevEnvelope::new(&params);
        assert!((env.b0 - 2.0).abs() < 1e-12);
        assert!((env.b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn moment_oracle_closed_forms() {
        let p = StableParams::new(0.5, 0.0).unwrap();
        assert!((tilted_stable_moment(&p, 0.0).unwrap() - 1.0).abs() < 1e-12);
        // E T^-1/2 at theta = 0: Gamma(2)/Gamma(1.5) = 2/sqrt(pi).
        let expect = 2.0 / PI.sqrt();
        assert!((tilted_stable_moment(&p, -0.5).unwrap() - expect).abs() < 1e-12);
        let p = StableParams::new(0.5, 1.0).unwrap();
        assert!((tilted_stable_moment(&p, -0.5).unwrap() - 2.256_758_334_191_025).abs() < 1e-12);
        // Finiteness boundary: r - theta >= alpha has no moment.
        assert!(tilted_stable_moment(&p, 1.5).is_err());
        assert!(tilted_stable_moment(&p, 1.499).is_ok());
    }

    #[test]
    fn zolotarev_draws_stay_in_range() {
        let mut rng = RngStream::new(11);
        for &theta in &[0.0, 0.3, 2.0, -0.2] {
            let params = StableParams::new(0.5, theta).unwrap();
            for _ in 0..2000 {
                let z = sample_zolotarev(&params, &mut rng).unwrap();
                assert!((0.0..=PI).contains(&z), "z={z} outside [0, pi] at theta={theta}");
            }
        }
    }

    #[test]
    fn positive_tilt_empties_the_right_end() {
        // Density proportional to B(x)^b collapses near pi for b > 0.
        let params = StableParams::new(0.5, 1.0).unwrap();
        let mut rng = RngStream::new(5);
        let n = 10_000;
        let far = (0..n)
            .filter(|_| sample_zolotarev(&params, &mut rng).unwrap() > 0.95 * PI)
            .count();
        // A uniform law would put ~500 draws there.
        assert!(far < 50, "unexpected mass near pi: {far}");
    }

    #[test]
    fn negative_tilt_piles_up_at_the_right_end() {
        let params = StableParams::new(0.5, -0.25).unwrap();
        let mut rng = RngStream::new(6);
        let n = 10_000;
        let far = (0..n)
            .filter(|_| sample_zolotarev(&params, &mut rng).unwrap() > 0.95 * PI)
            .count();
        assert!(far > 1200, "expected heavy mass near pi, got {far}");
    }

    #[test]
    fn tilted_stable_draws_are_positive_and_finite() {
        let mut rng = RngStream::new(3);
        for &(alpha, theta) in &[(0.25, 0.0), (0.5, 1.0), (0.75, 10.0)] {
            let params = StableParams::new(alpha, theta).unwrap();
            for _ in 0..2000 {
                let t = sample_tilted_stable(&params, &mut rng).unwrap();
                assert!(t.is_finite() && t > 0.0);
            }
        }
        // Negative tilts have a heavy right tail; draws may legitimately
        // exceed the f64 range but must never be NaN or nonpositive.
        let params = StableParams::new(0.5, -0.4).unwrap();
        for _ in 0..10_000 {
            let t = sample_tilted_stable(&params, &mut rng).unwrap();
            assert!(!t.is_nan() && t > 0.0);
        }
    }
}
