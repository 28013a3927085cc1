//! Measurable functionals of a realization — CDF values `F(x)` and the
//! mean — together with the closed-form laws available at `alpha = 1/2`
//! that the samplers are validated against: `F(1/2)` is
//! `Beta(theta+1/2, theta+1/2)` and `F(1/3)` has the explicit density in
//! [`ref_f_third_density`].

use crate::epsilon_py::EpsilonPyRealization;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::special::{beta_inc, ln_gamma};
use std::f64::consts::PI;

/// `F_eps(x) = sum_{xi_i <= x} p_i + R 1{xi_0 <= x}`; right-continuous
/// and nondecreasing, with full mass above the largest atom.
pub fn cdf_eval(realization: &EpsilonPyRealization, x: f64) -> f64 {
    let mut f = 0.0;
    for (w, a) in realization.weights.iter().zip(&realization.atoms) {
        if *a <= x {
            f += w;
        }
    }
    if realization.extra_atom <= x {
        f += realization.remainder;
    }
    f
}

/// `mu_eps = sum p_i xi_i + R xi_0`; always inside the convex hull of the
/// atoms.
pub fn mean_functional(realization: &EpsilonPyRealization) -> f64 {
    let mut m = realization.remainder * realization.extra_atom;
    for (w, a) in realization.weights.iter().zip(&realization.atoms) {
        m += w * a;
    }
    m
}

/// CDF of a fixed realization under repeated queries: atoms are sorted
/// once and prefix sums cached, so each query is a binary search. Used by
/// the Kolmogorov scans over evaluation grids.
#[derive(Debug, Clone)]
pub struct CdfEvaluator {
    atoms: Vec<f64>,
    cumulative: Vec<f64>,
}

impl CdfEvaluator {
    pub fn new(realization: &EpsilonPyRealization) -> Self {
        let mut pairs: Vec<(f64, f64)> = realization
            .atoms
            .iter()
            .copied()
            .zip(realization.weights.iter().copied())
            .chain(std::iter::once((
                realization.extra_atom,
                realization.remainder,
            )))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut cumulative = Vec::with_capacity(pairs.len());
        let mut running = 0.0;
        for (a, w) in pairs {
            running += w;
            atoms.push(a);
            cumulative.push(running);
        }
        CdfEvaluator { atoms, cumulative }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|&a| a <= x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }
}

/// Beta(a, b) law with exact CDF through the regularized incomplete beta
/// function.
#[derive(Debug, Clone, Copy)]
pub struct BetaLaw {
    a: f64,
    b: f64,
}

impl BetaLaw {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta law requires positive shapes, got a={a}, b={b}"
            )));
        }
        Ok(BetaLaw { a, b })
    }

    pub fn shapes(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn density(&self, w: f64) -> f64 {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        let ln = ln_gamma(self.a + self.b) - ln_gamma(self.a) - ln_gamma(self.b)
            + (self.a - 1.0) * w.ln()
            + (self.b - 1.0) * (1.0 - w).ln();
        ln.exp()
    }

    pub fn cdf(&self, w: f64) -> f64 {
        beta_inc(self.a, self.b, w.clamp(0.0, 1.0))
    }

    /// Quantile by bisection; the CDF is strictly increasing on (0,1).
    pub fn quantile(&self, p: f64) -> f64 {
        bisect_quantile(|w| self.cdf(w), p)
    }
}

/// Reference law of `F(1/2)` at `alpha = 1/2`:
/// `Beta(theta + 1/2, theta + 1/2)`. Symmetric, so its mean is 1/2 for
/// every admissible `theta`.
pub fn ref_f_half(theta: f64) -> Result<BetaLaw> {
    if !(theta > -0.5) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "F(1/2) reference law requires theta > -1/2, got {theta}"
        )));
    }
    BetaLaw::new(theta + 0.5, theta + 0.5)
}

/// Density of `F(1/3)` at `alpha = 1/2`:
///
/// ```text
/// f(w) = 2/sqrt(pi) 9^theta Gamma(theta+1)/Gamma(theta+1/2)
///        (w(1-w))^(theta-1/2) / (1+3w)^(theta+1)
/// ```
pub fn ref_f_third_density(theta: f64, w: f64) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!(
            "F(1/3) density is evaluated on (0,1), got {w}"
        )));
    }
    Ok(FThirdLaw::new(theta)?.density_unchecked(w))
}

/// Reference law of `F(1/3)` at `alpha = 1/2`, with CDF and quantiles by
/// adaptive quadrature. The substitution `w = sin^2 u` removes the
/// endpoint singularities of the density, which behaves like
/// `(w(1-w))^(theta-1/2)` near 0 and 1; the transformed integrand is
/// smooth for `theta >= 0`, the range the validation studies use.
#[derive(Debug, Clone, Copy)]
pub struct FThirdLaw {
    theta: f64,
    /// `log` of the density normalizer in front of the w-dependent part.
    ln_front: f64,
}

/// Quadrature tolerance; keeps the normalization check well inside 1e-8.
const CDF_TOL: f64 = 1e-10;

impl FThirdLaw {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > -0.5) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "F(1/3) reference law requires theta > -1/2, got {theta}"
            )));
        }
        let ln_front = (2.0 / PI.sqrt()).ln() + theta * 9f64.ln() + ln_gamma(theta + 1.0)
            - ln_gamma(theta + 0.5);
        Ok(FThirdLaw { theta, ln_front })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn density_unchecked(&self, w: f64) -> f64 {
        self.ln_front.exp()
            * (w * (1.0 - w)).powf(self.theta - 0.5)
            * (1.0 + 3.0 * w).powf(-(self.theta + 1.0))
    }

    pub fn density(&self, w: f64) -> Result<f64> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::Domain(format!(
                "F(1/3) density is evaluated on (0,1), got {w}"
            )));
        }
        Ok(self.density_unchecked(w))
    }

    /// Transformed integrand in `u`, after `w = sin^2 u`:
    /// `front 4^(1/2-theta) sin(2u)^(2 theta) / (1 + 3 sin^2 u)^(theta+1)`.
    fn integrand(&self, u: f64) -> f64 {
        let front = (self.ln_front + (0.5 - self.theta) * 4f64.ln()).exp();
        let s2 = (2.0 * u).sin();
        let si = u.sin();
        front * s2.powf(2.0 * self.theta) * (1.0 + 3.0 * si * si).powf(-(self.theta + 1.0))
    }

    pub fn cdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        if w >= 1.0 {
            return self.normalization();
        }
        let upper = w.sqrt().asin();
        adaptive_simpson(&|u| self.integrand(u), 0.0, upper, CDF_TOL)
    }

    /// Total mass by quadrature; the oracle that checks the closed form
    /// integrates to 1 before it is trusted as a test reference.
    pub fn normalization(&self) -> f64 {
        adaptive_simpson(&|u| self.integrand(u), 0.0, PI / 2.0, CDF_TOL)
    }

    /// Mean by quadrature; equals the base-measure mass of [0, 1/3].
    pub fn mean(&self) -> f64 {
        adaptive_simpson(
            &|u: f64| {
                let s = u.sin();
                s * s * self.integrand(u)
            },
            0.0,
            PI / 2.0,
            CDF_TOL,
        )
    }

    pub fn quantile(&self, p: f64) -> f64 {
        bisect_quantile(|w| self.cdf(w), p)
    }
}

/// The two closed-form reference laws.
#[derive(Debug, Clone, Copy)]
pub enum ReferenceLaw {
    FHalf(BetaLaw),
    FThird(FThirdLaw),
}

impl ReferenceLaw {
    pub fn f_half(theta: f64) -> Result<Self> {
        Ok(ReferenceLaw::FHalf(ref_f_half(theta)?))
    }

    pub fn f_third(theta: f64) -> Result<Self> {
        Ok(ReferenceLaw::FThird(FThirdLaw::new(theta)?))
    }

    pub fn cdf(&self, w: f64) -> f64 {
        match self {
            ReferenceLaw::FHalf(law) => law.cdf(w),
            ReferenceLaw::FThird(law) => law.cdf(w),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            ReferenceLaw::FHalf(law) => law.quantile(p),
            ReferenceLaw::FThird(law) => law.quantile(p),
        }
    }
}

fn bisect_quantile<F: Fn(f64) -> f64>(cdf: F, p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
