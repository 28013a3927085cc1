//! Samplers for the eps-truncated Pitman-Yor process.
//!
//! The Pitman-Yor process `sum_i p_i delta_{xi_i}` with discount `alpha`
//! and concentration `theta` has stick-breaking frequencies
//! `p_i = V_i prod_{j<i} (1 - V_j)`, `V_j ~ Beta(1-alpha, theta + j alpha)`.
//! Truncating at the stopping time `tau(eps) = min{n : R_n < eps}`, where
//! `R_n = prod_{j<=n} (1 - V_j)` is the mass left after `n` sticks, and
//! parking the leftover mass on one fresh atom gives a finite measure
//! within total variation `eps` of the full process, almost surely.
//!
//! Two routes are provided: the exact stopping-rule sampler, and an
//! approximate sampler that first draws the truncation level from its
//! limiting law `tau - 1 ~ (eps T_{alpha,theta} / alpha)^(-alpha/(1-alpha))`
//! and then fills in the sticks unconditionally.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tilted_stable::{sample_tilted_stable, StableParams};

/// Hard cap on the number of materialized sticks; two f64 buffers at this
/// length stay within ~0.5 GiB. Reaching it is a resource fault, not a
/// statistical event, for every parameter range this crate targets.
pub const MAX_TRUNCATION: u64 = 1 << 25;

/// Parameters of an eps-truncated Pitman-Yor process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PYParams {
    alpha: f64,
    theta: f64,
    epsilon: f64,
}

impl PYParams {
    /// Requires `0 <= alpha < 1`, `theta > -alpha` and `0 < epsilon < 1`.
    /// `alpha = 0` selects the Dirichlet code path (and then the
    /// constraint reads `theta > 0`).
    pub fn new(alpha: f64, theta: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "discount must satisfy 0 <= alpha < 1, got {alpha}"
            )));
        }
        if !theta.is_finite() || theta <= -alpha {
            return Err(Error::InvalidParameter(format!(
                "concentration must satisfy theta > -alpha, got theta={theta}, alpha={alpha}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation level must satisfy 0 < eps < 1, got {epsilon}"
            )));
        }
        Ok(PYParams {
            alpha,
            theta,
            epsilon,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The tilted-stable parameters governing the limiting truncation law.
    /// Only defined for `alpha > 0`.
    pub fn stable(&self) -> Result<StableParams> {
        StableParams::new(self.alpha, self.theta)
    }

    fn with_theta(&self, theta: f64) -> Result<Self> {
        PYParams::new(self.alpha, theta, self.epsilon)
    }
}

/// Atom-generating distribution, independent of the weights.
#[derive(Debug, Clone, Copy, Default)]
pub enum BaseMeasure {
    /// Uniform on [0, 1]; the default location space.
    #[default]
    Uniform01,
    /// Degenerate at a point. Mostly useful in tests.
    Constant(f64),
    /// Arbitrary sampler.
    Custom(fn(&mut RngStream) -> f64),
}

impl BaseMeasure {
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            BaseMeasure::Uniform01 => rng.uniform(),
            BaseMeasure::Constant(c) => *c,
            BaseMeasure::Custom(f) => f(rng),
        }
    }
}

/// One draw of the truncated process: `tau` weighted atoms plus the
/// remainder mass on a fresh atom.
#[derive(Debug, Clone)]
pub struct EpsilonPyRealization {
    /// Stick-breaking weights `p_1..p_tau`.
    pub weights: Vec<f64>,
    /// Atom locations `xi_1..xi_tau`.
    pub atoms: Vec<f64>,
    /// Leftover mass `R_tau`.
    pub remainder: f64,
    /// The fresh atom `xi_0` carrying the remainder.
    pub extra_atom: f64,
    /// True when produced by the stopping-rule sampler, in which case
    /// `remainder < eps` and the stop was minimal.
    pub exact: bool,
}

impl EpsilonPyRealization {
    /// Number of stick-breaking atoms.
    pub fn tau(&self) -> usize {
        self.weights.len()
    }

    /// `sum p_i + R`, compensated so the check is not polluted by naive
    /// summation error on long weight vectors.
    pub fn total_mass(&self) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &w in self.weights.iter().chain(std::iter::once(&self.remainder)) {
            let t = sum + w;
            if sum.abs() >= w.abs() {
                comp += (sum - t) + w;
            } else {
                comp += (w - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

/// Shared stick-breaking loop: breaks until the remainder drops below
/// `eps`, accumulating `log R` so the remainder never underflows and
/// reconstructing the weights as `p_i = V_i exp(log R_{i-1})`.
fn break_sticks_until(
    alpha: f64,
    theta: f64,
    ln_eps: f64,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, f64)> {
    let mut weights = Vec::new();
    let mut log_r = 0.0f64;
    let mut i = 1u64;
    while log_r >= ln_eps {
        if i > MAX_TRUNCATION {
            return Err(Error::TruncationOverflow {
                level: i as f64,
            });
        }
        let (v, ln_one_minus_v) = rng.beta_fraction(1.0 - alpha, theta + i as f64 * alpha);
        weights.push(v * log_r.exp());
        log_r += ln_one_minus_v;
        i += 1;
    }
    Ok((weights, log_r.exp()))
}

fn draw_atoms(
    base: &BaseMeasure,
    count: usize,
    rng: &mut RngStream,
) -> (f64, Vec<f64>) {
    let extra = base.draw(rng);
    let atoms = (0..count).map(|_| base.draw(rng)).collect();
    (extra, atoms)
}

/// Exact sampler: runs the stopping rule itself, so the returned
/// realization always satisfies `R_tau < eps <= R_{tau-1}`.
///
/// `alpha = 0` delegates to [`sample_dirichlet_exact`].
pub fn sample_exact(
    params: &PYParams,
    base: &BaseMeasure,
    rng: &mut RngStream,
) -> Result<EpsilonPyRealization> {
    if params.alpha == 0.0 {
        return sample_dirichlet_exact(params, base, rng);
    }
    let (weights, remainder) =
        break_sticks_until(params.alpha, params.theta, params.epsilon.ln(), rng)?;
    let (extra_atom, atoms) = draw_atoms(base, weights.len(), rng);
    Ok(EpsilonPyRealization {
        weights,
        atoms,
        remainder,
        extra_atom,
        exact: true,
    })
}

/// Dirichlet special case (`alpha = 0`): the same stopping rule with
/// `V_i ~ Beta(1, theta)` sticks, for which `tau - 1` is exactly
/// Poisson(theta log 1/eps) distributed.
pub fn sample_dirichlet_exact(
    params: &PYParams,
    base: &BaseMeasure,
    rng: &mut RngStream,
) -> Result<EpsilonPyRealization> {
    if params.alpha != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Dirichlet sampler requires alpha = 0, got {}",
            params.alpha
        )));
    }
    let (weights, remainder) = break_sticks_until(0.0, params.theta, params.epsilon.ln(), rng)?;
    let (extra_atom, atoms) = draw_atoms(base, weights.len(), rng);
    Ok(EpsilonPyRealization {
        weights,
        atoms,
        remainder,
        extra_atom,
        exact: true,
    })
}

/// Truncation level implied by a tilted-stable draw `t`:
/// `tau = 1 + floor((eps t / alpha)^(-alpha/(1-alpha)))`.
///
/// Saturates instead of overflowing; the samplers that materialize the
/// sticks enforce [`MAX_TRUNCATION`] on top of this.
pub fn tau_from_stable_draw(t: f64, params: &PYParams) -> u64 {
    debug_assert!(t > 0.0);
    let alpha = params.alpha;
    let y = (params.epsilon * t / alpha).powf(-alpha / (1.0 - alpha));
    (y.floor() as u64).saturating_add(1)
}

/// Standalone draw of the asymptotic truncation level (no sticks, no
/// atoms): one tilted-stable variate pushed through
/// [`tau_from_stable_draw`]. Requires `alpha > 0`.
pub fn sample_tau_asymptotic(params: &PYParams, rng: &mut RngStream) -> Result<u64> {
    let stable = params.stable()?;
    let t = sample_tilted_stable(&stable, rng)?;
    Ok(tau_from_stable_draw(t, params))
}

/// Approximate sampler: draws the truncation level from its limiting law
/// first, which lets the weight and atom buffers be allocated up front,
/// then generates the sticks unconditionally.
///
/// Two approximations are involved: the level comes from the asymptotic
/// law, and the sticks are not drawn conditionally on that level. In
/// particular the remainder is *not* guaranteed to be below `eps`.
///
/// `alpha = 0` is routed to [`sample_dirichlet_exact`]: the limiting law
/// degenerates there while the Poisson stopping law is exact anyway.
pub fn sample_approx(
    params: &PYParams,
    base: &BaseMeasure,
    rng: &mut RngStream,
) -> Result<EpsilonPyRealization> {
    if params.alpha == 0.0 {
        return sample_dirichlet_exact(params, base, rng);
    }
    let stable = params.stable()?;
    let t = sample_tilted_stable(&stable, rng)?;
    let tau = tau_from_stable_draw(t, params);
    if tau > MAX_TRUNCATION {
        return Err(Error::TruncationOverflow { level: tau as f64 });
    }
    let tau = tau as usize;
    let mut weights = Vec::with_capacity(tau);
    let mut log_r = 0.0f64;
    for i in 1..=tau {
        let (v, ln_one_minus_v) =
            rng.beta_fraction(1.0 - params.alpha, params.theta + i as f64 * params.alpha);
        weights.push(v * log_r.exp());
        log_r += ln_one_minus_v;
    }
    let remainder = log_r.exp();
    let (extra_atom, atoms) = draw_atoms(base, tau, rng);
    Ok(EpsilonPyRealization {
        weights,
        atoms,
        remainder,
        extra_atom,
        exact: false,
    })
}

/// Observed clustering of a latent exchangeable sample: `k` unique values
/// with their multiplicities.
#[derive(Debug, Clone, Default)]
pub struct ClusterSummary {
    values: Vec<f64>,
    counts: Vec<u64>,
}

impl ClusterSummary {
    pub fn new(values: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if values.len() != counts.len() {
            return Err(Error::InvalidParameter(format!(
                "{} cluster values with {} counts",
                values.len(),
                counts.len()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidParameter(
                "cluster counts must be strictly positive".into(),
            ));
        }
        Ok(ClusterSummary { values, counts })
    }

    pub fn empty() -> Self {
        ClusterSummary::default()
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Which truncated sampler backs the leftover component of a posterior
/// draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Exact,
    Approx,
}

/// Posterior draw conditional on latent cluster data: fixed atoms at the
/// observed unique values with Dirichlet weights, plus a rescaled
/// truncated process carrying the leftover mass.
#[derive(Debug, Clone)]
pub struct PosteriorRealization {
    /// Observed unique values `X*_1..X*_k`.
    pub cluster_atoms: Vec<f64>,
    /// Dirichlet weights `q_1..q_k` attached to them.
    pub cluster_weights: Vec<f64>,
    /// Weight `q_{k+1}` of the truncated process component.
    pub base_weight: f64,
    /// Truncated process at parameters `(alpha, theta + alpha k)`.
    pub process: EpsilonPyRealization,
}

impl PosteriorRealization {
    /// Folds everything into one realization: fixed atoms first, then the
    /// rescaled process atoms, with the rescaled remainder on the process
    /// extra atom. Total mass stays 1 within rounding.
    pub fn flatten(&self) -> EpsilonPyRealization {
        let total = self.cluster_weights.len() + self.process.weights.len();
        let mut weights = Vec::with_capacity(total);
        weights.extend_from_slice(&self.cluster_weights);
        weights.extend(self.process.weights.iter().map(|w| w * self.base_weight));
        let mut atoms = Vec::with_capacity(total);
        atoms.extend_from_slice(&self.cluster_atoms);
        atoms.extend_from_slice(&self.process.atoms);
        EpsilonPyRealization {
            weights,
            atoms,
            remainder: self.base_weight * self.process.remainder,
            extra_atom: self.process.extra_atom,
            exact: self.process.exact,
        }
    }
}

/// Samples the posterior mixture
/// `sum_j q_j delta_{X*_j} + q_{k+1} P*_eps`, where
/// `(q_1,..,q_k,q_{k+1}) ~ Dirichlet(n*_1 - alpha,..,n*_k - alpha, theta + alpha k)`
/// and `P*_eps` is a truncated process with concentration bumped to
/// `theta + alpha k`. With no clusters this reduces to the prior sampler.
pub fn posterior_sample(
    params: &PYParams,
    clusters: &ClusterSummary,
    base: &BaseMeasure,
    method: SamplerKind,
    rng: &mut RngStream,
) -> Result<PosteriorRealization> {
    let alpha = params.alpha;
    if let Some(&bad) = clusters.counts.iter().find(|&&c| (c as f64) <= alpha) {
        return Err(Error::InvalidParameter(format!(
            "cluster count {bad} must exceed the discount {alpha}"
        )));
    }
    let k = clusters.k();
    let (cluster_weights, base_weight) = if k == 0 {
        (Vec::new(), 1.0)
    } else {
        // Dirichlet vector from normalized gammas.
        let mut raw: Vec<f64> = clusters
            .counts
            .iter()
            .map(|&n| rng.gamma_raw(n as f64 - alpha))
            .collect();
        raw.push(rng.gamma_raw(params.theta + alpha * k as f64));
        let total: f64 = raw.iter().sum();
        let base_weight = raw.pop().expect("k+1 components") / total;
        for g in &mut raw {
            *g /= total;
        }
        (raw, base_weight)
    };
    let inner = params.with_theta(params.theta + alpha * k as f64)?;
    let process = match method {
        SamplerKind::Exact => sample_exact(&inner, base, rng)?,
        SamplerKind::Approx => sample_approx(&inner, base, rng)?,
    };
    Ok(PosteriorRealization {
        cluster_atoms: clusters.values.clone(),
        cluster_weights,
        base_weight,
        process,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MASS_TOL: f64 = 1e-12;

    fn params(alpha: f64, theta: f64, eps: f64) -> PYParams {
        PYParams::new(alpha, theta, eps).unwrap()
    }

    #[test]
    fn params_validate_ranges() {
        assert!(PYParams::new(-0.1, 1.0, 0.1).is_err());
        assert!(PYParams::new(1.0, 1.0, 0.1).is_err());
        assert!(PYParams::new(0.5, -0.5, 0.1).is_err());
        assert!(PYParams::new(0.0, 0.0, 0.1).is_err()); // Dirichlet needs theta > 0
        assert!(PYParams::new(0.5, 1.0, 0.0).is_err());
        assert!(PYParams::new(0.5, 1.0, 1.0).is_err());
        assert!(PYParams::new(0.0, 2.0, 0.1).is_ok());
    }

    #[test]
    fn exact_draw_normalizes_and_stops_minimally() {
        let p = params(0.5, 1.0, 0.01);
        let mut rng = RngStream::new(123);
        for _ in 0..200 {
            let r = sample_exact(&p, &BaseMeasure::Uniform01, &mut rng).unwrap();
            assert!(r.exact);
            assert!(r.tau() >= 1);
            assert_eq!(r.weights.len(), r.atoms.len());
            assert!((r.total_mass() - 1.0).abs() < MASS_TOL);
            assert!(r.remainder < p.epsilon());
            if r.tau() >= 2 {
                // R_{tau-1} = p_tau + R_tau must not yet be below eps.
                let prev = r.weights[r.tau() - 1] + r.remainder;
                assert!(prev >= p.epsilon() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn approx_draw_normalizes() {
        let p = params(0.5, 1.0, 0.05);
        let mut rng = RngStream::new(321);
        for _ in 0..200 {
            let r = sample_approx(&p, &BaseMeasure::Uniform01, &mut rng).unwrap();
            assert!(!r.exact);
            assert!(r.tau() >= 1);
            assert!((r.total_mass() - 1.0).abs() < MASS_TOL);
        }
    }

    #[test]
    fn truncation_level_arithmetic() {
        // exponent -alpha/(1-alpha) = -1 at alpha = 1/2:
        // (0.1 * 2 / 0.5)^-1 = 2.5, so tau = 1 + floor(2.5) = 3.
        let p = params(0.5, 1.0, 0.1);
        assert_eq!(tau_from_stable_draw(2.0, &p), 3);
        // t > alpha/eps makes the power drop below 1, so tau = 1.
        assert_eq!(tau_from_stable_draw(5.1, &p), 1);
        assert_eq!(tau_from_stable_draw(1e300, &p), 1);
    }

    #[test]
    fn asymptotic_tau_is_at_least_one() {
        let p = params(0.25, 10.0, 0.05);
        let mut rng = RngStream::new(77);
        for _ in 0..2000 {
            assert!(sample_tau_asymptotic(&p, &mut rng).unwrap() >= 1);
        }
    }

    #[test]
    fn asymptotic_tau_requires_positive_discount() {
        let p = params(0.0, 1.0, 0.1);
        let mut rng = RngStream::new(1);
        assert!(sample_tau_asymptotic(&p, &mut rng).is_err());
    }

    #[test]
    fn dirichlet_route_stops_below_eps() {
        let p = params(0.0, 1.0, 0.1);
        let mut rng = RngStream::new(99);
        for _ in 0..500 {
            let r = sample_dirichlet_exact(&p, &BaseMeasure::Uniform01, &mut rng).unwrap();
            assert!(r.remainder < 0.1);
            assert!((r.total_mass() - 1.0).abs() < MASS_TOL);
        }
        // alpha = 0 requests through either sampler land on the same path.
        let via_exact = sample_exact(&p, &BaseMeasure::Uniform01, &mut RngStream::new(4)).unwrap();
        let via_approx =
            sample_approx(&p, &BaseMeasure::Uniform01, &mut RngStream::new(4)).unwrap();
        assert_eq!(via_exact.weights, via_approx.weights);
    }

    #[test]
    fn dirichlet_sampler_rejects_positive_discount() {
        let p = params(0.5, 1.0, 0.1);
        let mut rng = RngStream::new(1);
        assert!(sample_dirichlet_exact(&p, &BaseMeasure::Uniform01, &mut rng).is_err());
    }

    #[test]
    fn posterior_with_no_clusters_is_the_prior() {
        let p = params(0.5, 1.0, 0.05);
        let post = posterior_sample(
            &p,
            &ClusterSummary::empty(),
            &BaseMeasure::Uniform01,
            SamplerKind::Exact,
            &mut RngStream::new(8),
        )
        .unwrap();
        let prior = sample_exact(&p, &BaseMeasure::Uniform01, &mut RngStream::new(8)).unwrap();
        assert_eq!(post.base_weight, 1.0);
        assert!(post.cluster_weights.is_empty());
        assert_eq!(post.process.weights, prior.weights);
        assert_eq!(post.process.atoms, prior.atoms);
    }

    #[test]
    fn posterior_mass_sums_to_one() {
        let p = params(0.5, 1.0, 0.05);
        let clusters = ClusterSummary::new(vec![0.1, 0.4, 0.7, 0.9], vec![3, 5, 1, 2]).unwrap();
        let mut rng = RngStream::new(15);
        for _ in 0..200 {
            let post = posterior_sample(
                &p,
                &clusters,
                &BaseMeasure::Uniform01,
                SamplerKind::Approx,
                &mut rng,
            )
            .unwrap();
            let flat = post.flatten();
            assert!((flat.total_mass() - 1.0).abs() < MASS_TOL);
            assert_eq!(flat.weights.len(), flat.atoms.len());
        }
    }

    #[test]
    fn cluster_summary_validates() {
        assert!(ClusterSummary::new(vec![0.1], vec![]).is_err());
        assert!(ClusterSummary::new(vec![0.1], vec![0]).is_err());
        assert!(ClusterSummary::new(vec![0.1, 0.2], vec![2, 1]).is_ok());
    }
}
