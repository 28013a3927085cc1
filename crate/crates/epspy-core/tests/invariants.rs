//! Randomized structural invariants of the truncated-process samplers,
//! checked over a cloud of admissible parameters.

use epspy_core::*;

const MASS_TOL: f64 = 1e-12;

struct ParamCloud {
    rng: RngStream,
}

impl ParamCloud {
    fn new(seed: u64) -> Self {
        ParamCloud {
            rng: RngStream::new(seed),
        }
    }

    /// Draws (alpha, theta, eps) across the admissible space, keeping eps
    /// large enough that the exact loop length stays test-sized.
    fn draw(&mut self) -> PYParams {
        let alpha = if self.rng.uniform() < 0.1 {
            0.0
        } else {
            self.rng.uniform_in(0.01, 0.7)
        };
        let theta = if alpha > 0.0 && self.rng.uniform() < 0.15 {
            // negative corner of the admissible window
            self.rng.uniform_in(-alpha + 0.05, 0.0)
        } else {
            self.rng.uniform_in(f64::max(0.05, -alpha + 0.05), 10.0)
        };
        let eps = self.rng.uniform_in(0.05, 0.5);
        PYParams::new(alpha, theta, eps).unwrap()
    }
}

#[test]
fn realizations_normalize_and_stop_minimally_across_the_parameter_cloud() {
    let mut cloud = ParamCloud::new(31);
    let mut rng = RngStream::new(32);
    for draw in 0..1000 {
        let params = cloud.draw();
        let r = sample_exact(&params, &BaseMeasure::Uniform01, &mut rng).unwrap();
        let ctx = format!(
            "draw {draw}: alpha={}, theta={}, eps={}",
            params.alpha(),
            params.theta(),
            params.epsilon()
        );
        assert!(r.tau() >= 1, "{ctx}");
        assert_eq!(r.weights.len(), r.atoms.len(), "{ctx}");
        assert!((r.total_mass() - 1.0).abs() < MASS_TOL, "{ctx}: mass {}", r.total_mass());
        assert!(r.remainder < params.epsilon(), "{ctx}");
        assert!(r.weights.iter().all(|&w| w >= 0.0), "{ctx}");
        if r.tau() >= 2 {
            let before_last = r.weights[r.tau() - 1] + r.remainder;
            assert!(
                before_last >= params.epsilon() * (1.0 - 1e-12),
                "{ctx}: stopped early, R_(tau-1) = {before_last}"
            );
        }
        if params.alpha() > 0.0 {
            let a = sample_approx(&params, &BaseMeasure::Uniform01, &mut rng).unwrap();
            assert!(a.tau() >= 1, "{ctx}");
            assert!((a.total_mass() - 1.0).abs() < MASS_TOL, "{ctx}: approx mass");
            assert!(sample_tau_asymptotic(&params, &mut rng).unwrap() >= 1, "{ctx}");
        }
    }
}

#[test]
fn cdf_is_monotone_across_the_parameter_cloud() {
    let mut cloud = ParamCloud::new(33);
    let mut rng = RngStream::new(34);
    for _ in 0..200 {
        let params = cloud.draw();
        let r = sample_exact(&params, &BaseMeasure::Uniform01, &mut rng).unwrap();
        let eval = CdfEvaluator::new(&r);
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let f = eval.eval(x);
            assert!(f >= prev, "cdf decreased at {x}");
            assert!((f - cdf_eval(&r, x)).abs() < 1e-12);
            prev = f;
        }
        assert!((eval.eval(2.0) - 1.0).abs() < MASS_TOL);
    }
}

#[test]
fn remainder_bounds_the_cdf_perturbation() {
    // Moving the leftover mass to a fresh atom changes the CDF by at most
    // the remainder, uniformly over the evaluation grid; with an exact
    // draw that is strictly less than eps. This is the total variation
    // guarantee of the truncation, observed through functionals.
    let mut cloud = ParamCloud::new(35);
    let mut rng = RngStream::new(36);
    for _ in 0..200 {
        let params = cloud.draw();
        let r = sample_exact(&params, &BaseMeasure::Uniform01, &mut rng).unwrap();
        let mut moved = r.clone();
        moved.extra_atom = rng.uniform();
        let sup = (0..=1000)
            .map(|i| {
                let x = i as f64 / 1000.0;
                (cdf_eval(&r, x) - cdf_eval(&moved, x)).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(sup <= r.remainder + 1e-15);
        assert!(sup < params.epsilon());
    }
}

#[test]
fn two_sample_distance_equals_brute_force_on_small_samples() {
    let mut rng = RngStream::new(37);
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 50) as usize;
        let m = 1 + (rng.next_u64() % 50) as usize;
        // Mix continuous values with lattice ties.
        let gen = |rng: &mut RngStream, len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| {
                    if rng.uniform() < 0.5 {
                        (rng.next_u64() % 6) as f64 / 2.0
                    } else {
                        rng.uniform()
                    }
                })
                .collect()
        };
        let a = EmpiricalDistribution::new(gen(&mut rng, n)).unwrap();
        let b = EmpiricalDistribution::new(gen(&mut rng, m)).unwrap();
        let d = ks_two_sample(&a, &b);
        let brute = a
            .values()
            .iter()
            .chain(b.values())
            .map(|&x| (a.ecdf(x) - b.ecdf(x)).abs())
            .fold(0.0f64, f64::max);
        assert!((d - brute).abs() < 1e-14, "{d} vs {brute} (n={n}, m={m})");
    }
}

#[test]
fn posterior_flattening_preserves_mass_across_the_cloud() {
    let mut cloud = ParamCloud::new(38);
    let mut rng = RngStream::new(39);
    for _ in 0..200 {
        let params = cloud.draw();
        let k = (rng.next_u64() % 5) as usize;
        let values: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
        let counts: Vec<u64> = (0..k).map(|_| 1 + rng.next_u64() % 20).collect();
        let clusters = ClusterSummary::new(values, counts).unwrap();
        let method = if params.alpha() > 0.0 && rng.uniform() < 0.5 {
            SamplerKind::Approx
        } else {
            SamplerKind::Exact
        };
        let post =
            posterior_sample(&params, &clusters, &BaseMeasure::Uniform01, method, &mut rng)
                .unwrap();
        let flat = post.flatten();
        assert!((flat.total_mass() - 1.0).abs() < MASS_TOL);
        assert_eq!(flat.weights.len(), flat.atoms.len());
        assert_eq!(flat.weights.len(), k + post.process.tau());
    }
}
