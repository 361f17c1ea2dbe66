//! Samplers and closed-form evaluations for the distributions the model uses.
//!
//! All samplers use inverse-CDF transforms on an explicit stream, so a fixed
//! seed and call sequence reproduce the same draws.

use rand::Rng;

use crate::numeric::exprel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistributionError {
    #[error("probability {name}={value} outside {range}")]
    Probability { name: &'static str, value: f64, range: &'static str },
    #[error("truncation bound must be at least 1")]
    ZeroBound,
    #[error("power-law bounds must satisfy 0 < lower < upper <= 1 (got lower={lower}, upper={upper})")]
    PowerLawBounds { lower: f64, upper: f64 },
    #[error("power-law exponent must be positive (got {0})")]
    Exponent(f64),
    #[error("activation degree must be at least 1")]
    ZeroDegree,
}

fn check_prob(name: &'static str, value: f64, allow_one: bool) -> Result<(), DistributionError> {
    let ok = value > 0.0 && (value < 1.0 || (allow_one && value == 1.0));
    if ok {
        Ok(())
    } else {
        Err(DistributionError::Probability { name, value, range: if allow_one { "(0,1]" } else { "(0,1)" } })
    }
}

/// Uniform draw on `(0, 1]`, safe to take the logarithm of.
#[inline]
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Geometric law `Pr(k) = p (1-p)^(k - start)` for `k >= start`.
///
/// Active periods, inactive periods and link durations use the
/// success-probability form with `start = 1`. The activation degree uses the
/// continuation form `Pr(k) = (1-lambda) lambda^(k-1)`, built with
/// [`Geometric::continuation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    p: f64,
    support_start: u64,
    ln_fail: f64,
}

impl Geometric {
    pub fn new(p: f64, support_start: u64) -> Result<Self, DistributionError> {
        check_prob("p", p, true)?;
        Ok(Geometric { p, support_start, ln_fail: (-p).ln_1p() })
    }

    /// Success probability `p`, support starting at 1.
    pub fn success(p: f64) -> Result<Self, DistributionError> {
        Geometric::new(p, 1)
    }

    /// Continuation probability `lambda` in `[0, 1)`, support starting at 1.
    pub fn continuation(lambda: f64) -> Result<Self, DistributionError> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(DistributionError::Probability { name: "lambda", value: lambda, range: "[0,1)" });
        }
        Geometric::new(1.0 - lambda, 1)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn support_start(&self) -> u64 {
        self.support_start
    }

    pub fn mean(&self) -> f64 {
        self.support_start as f64 + (1.0 - self.p) / self.p
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k < self.support_start {
            return 0.0;
        }
        self.p * (((k - self.support_start) as f64) * self.ln_fail).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.p == 1.0 {
            return self.support_start;
        }
        let k = (open_unit(rng).ln() / self.ln_fail).floor();
        self.support_start + if k >= 1.8e19 { u64::MAX / 2 } else { k as u64 }
    }
}

/// Link-creation delay: `Pr(t) = p_c (1-p_c)^t / (1 - (1-p_c)^B)` on `t = 0..B-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGeometric {
    p_c: f64,
    bound: u64,
    ln_fail: f64,
    norm: f64,
}

impl TruncatedGeometric {
    pub fn new(p_c: f64, bound: u64) -> Result<Self, DistributionError> {
        check_prob("p_c", p_c, true)?;
        if bound == 0 {
            return Err(DistributionError::ZeroBound);
        }
        let ln_fail = (-p_c).ln_1p();
        // 1 - (1-p)^B
        let norm = -((bound as f64) * ln_fail).exp_m1();
        Ok(TruncatedGeometric { p_c, bound, ln_fail, norm })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn pmf(&self, t: u64) -> f64 {
        if t >= self.bound {
            return 0.0;
        }
        if self.p_c == 1.0 {
            return if t == 0 { 1.0 } else { 0.0 };
        }
        self.p_c * ((t as f64) * self.ln_fail).exp() / self.norm
    }

    pub fn cdf(&self, t: u64) -> f64 {
        if t + 1 >= self.bound {
            return 1.0;
        }
        -(((t + 1) as f64) * self.ln_fail).exp_m1() / self.norm
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.p_c == 1.0 || self.bound == 1 {
            return 0;
        }
        let u = rng.random::<f64>();
        // solve 1 - (1-p)^(t+1) >= u * norm
        let t = ((-u * self.norm).ln_1p() / self.ln_fail).floor();
        if t <= 0.0 {
            0
        } else {
            (t as u64).min(self.bound - 1)
        }
    }
}

/// Bounded power law `f(x) = beta x^-(beta+1) / (lower^-beta - upper^-beta)` on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedPowerLaw {
    beta: f64,
    lower: f64,
    upper: f64,
}

impl BoundedPowerLaw {
    pub fn new(beta: f64, lower: f64, upper: f64) -> Result<Self, DistributionError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(DistributionError::Exponent(beta));
        }
        if !(lower > 0.0 && lower < upper && upper <= 1.0) {
            return Err(DistributionError::PowerLawBounds { lower, upper });
        }
        Ok(BoundedPowerLaw { beta, lower, upper })
    }

    /// Upper limit fixed at 1.
    pub fn unit(beta: f64, lower: f64) -> Result<Self, DistributionError> {
        BoundedPowerLaw::new(beta, lower, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    fn norm(&self) -> f64 {
        self.lower.powf(-self.beta) - self.upper.powf(-self.beta)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lower || x > self.upper {
            return 0.0;
        }
        self.beta * x.powf(-(self.beta + 1.0)) / self.norm()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower {
            0.0
        } else if x >= self.upper {
            1.0
        } else {
            (self.lower.powf(-self.beta) - x.powf(-self.beta)) / self.norm()
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let a = self.lower.powf(-self.beta);
        (a - u * self.norm()).powf(-1.0 / self.beta).clamp(self.lower, self.upper)
    }

    pub fn mean(&self) -> f64 {
        let b = self.beta;
        let (lo, hi) = (self.lower, self.upper);
        if (b - 1.0).abs() < 1e-12 {
            (hi.ln() - lo.ln()) / self.norm()
        } else {
            b / (b - 1.0) * (lo.powf(1.0 - b) - hi.powf(1.0 - b)) / self.norm()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Stationary probabilities `(pi0, pi1)` of the inactive/active chain.
pub fn equilibrium_probs(rho: f64, q: f64) -> Result<(f64, f64), DistributionError> {
    check_prob("rho", rho, true)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(DistributionError::Probability { name: "q", value: q, range: "[0,1]" });
    }
    let s = q + rho;
    Ok((rho / s, q / s))
}

/// `integral_{lower}^{upper} x^(a-1) dx`, continuous through `a = 0`.
fn power_integral(a: f64, ln_lo: f64, ln_hi: f64) -> f64 {
    let w = ln_hi - ln_lo;
    // factor out the larger endpoint so the exponent stays non-positive
    if a > 0.0 {
        (a * ln_hi).exp() * w * exprel(-a * w)
    } else {
        (a * ln_lo).exp() * w * exprel(a * w)
    }
}

/// Marginal activation-degree pmf when `lambda` follows `potential`:
///
/// `Pr(d) = beta / (xi^-beta - psi^-beta) * integral_xi^psi (1-x) x^(d-beta-2) dx`.
///
/// With `psi = 1` this is the closed form
/// `beta/(xi^-beta - 1) * [(1 - xi^(d-beta-1))/(d-beta-1) - (1 - xi^(d-beta))/(d-beta)]`;
/// the removable singularities at `d - beta in {0, 1}` are evaluated through
/// a series expansion of `expm1(x)/x`.
pub fn mixed_degree_pmf(d: u64, potential: &BoundedPowerLaw) -> Result<f64, DistributionError> {
    if d == 0 {
        return Err(DistributionError::ZeroDegree);
    }
    Ok(mixed_degree_pmf_unchecked(d, potential.beta, potential.lower.ln(), potential.upper.ln()))
}

pub(crate) fn mixed_degree_pmf_unchecked(d: u64, beta: f64, ln_lo: f64, ln_hi: f64) -> f64 {
    let a = d as f64 - beta - 1.0;
    let norm = (-beta * ln_lo).exp() - (-beta * ln_hi).exp();
    let diff = power_integral(a, ln_lo, ln_hi) - power_integral(a + 1.0, ln_lo, ln_hi);
    (beta / norm * diff).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn degenerate_geometric_is_constant() {
        let g = Geometric::success(1.0).unwrap();
        let mut r = rng::stream(1, &[]);
        assert!((0..1000).all(|_| g.sample(&mut r) == 1));
        let d = Geometric::continuation(0.0).unwrap();
        assert_eq!(d.sample(&mut r), 1);
    }

    #[test]
    fn geometric_rejects_bad_probabilities() {
        assert!(Geometric::success(0.0).is_err());
        assert!(Geometric::success(1.5).is_err());
        assert!(Geometric::continuation(1.0).is_err());
    }

    #[test]
    fn geometric_pmf_matches_formula() {
        let g = Geometric::success(0.085).unwrap();
        assert!((g.pmf(1) - 0.085).abs() < 1e-15);
        assert!((g.pmf(3) - 0.085 * 0.915f64.powi(2)).abs() < 1e-15);
        assert_eq!(g.pmf(0), 0.0);
        assert!((g.mean() - 1.0 / 0.085).abs() < 1e-12);
        let d = Geometric::continuation(0.32).unwrap();
        assert!((d.pmf(2) - 0.68 * 0.32).abs() < 1e-15);
        assert!((d.mean() - 1.0 / 0.68).abs() < 1e-12);
    }

    #[test]
    fn truncated_geometric_two_point_support() {
        let t = TruncatedGeometric::new(0.5, 2).unwrap();
        assert!((t.pmf(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.pmf(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.pmf(2), 0.0);
        assert!(TruncatedGeometric::new(0.5, 0).is_err());
    }

    #[test]
    fn truncated_geometric_sums_to_one_and_samples_in_support() {
        let t = TruncatedGeometric::new(0.02, 60).unwrap();
        let s: f64 = (0..60).map(|k| t.pmf(k)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((t.cdf(59) - 1.0).abs() < 1e-15);
        let mut r = rng::stream(3, &[]);
        assert!((0..10_000).all(|_| t.sample(&mut r) < 60));
        let sharp = TruncatedGeometric::new(1.0 - 1e-12, 50).unwrap();
        assert!((0..1000).all(|_| sharp.sample(&mut r) == 0));
        assert!(sharp.pmf(0) > 1.0 - 1e-9);
    }

    #[test]
    fn power_law_cdf_endpoints() {
        let p = BoundedPowerLaw::unit(2.963, 0.26).unwrap();
        assert_eq!(p.cdf(0.26), 0.0);
        assert_eq!(p.cdf(1.0), 1.0);
        assert!((p.quantile(0.0) - 0.26).abs() < 1e-15);
        assert!((p.quantile(1.0) - 1.0).abs() < 1e-12);
        assert!(BoundedPowerLaw::new(2.0, 0.5, 0.5).is_err());
        assert!(BoundedPowerLaw::new(-1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        let (a, b) = equilibrium_probs(0.3, 0.3).unwrap();
        assert_eq!((a, b), (0.5, 0.5));
        let (_, pi1) = equilibrium_probs(0.085, 0.0048).unwrap();
        assert!((pi1 - 0.0048 / 0.0898).abs() < 1e-15);
        assert!((pi1 - 0.05345).abs() < 5e-6);
        let (_, pi1) = equilibrium_probs(1.0, 1e-12).unwrap();
        assert!(pi1 < 1e-11);
    }

    #[test]
    fn mixed_pmf_is_finite_at_removable_singularities() {
        // d - beta = 0 and d - beta = 1 exactly
        for (d, beta) in [(3u64, 3.0), (4, 3.0), (2, 1.0)] {
            let p = BoundedPowerLaw::unit(beta, 0.26).unwrap();
            let v = mixed_degree_pmf(d, &p).unwrap();
            let near = BoundedPowerLaw::unit(beta + 1e-9, 0.26).unwrap();
            let w = mixed_degree_pmf(d, &near).unwrap();
            assert!(v.is_finite() && v > 0.0);
            assert!((v - w).abs() < 1e-7 * v, "{d} {beta}: {v} vs {w}");
        }
        assert!(mixed_degree_pmf(0, &BoundedPowerLaw::unit(2.0, 0.2).unwrap()).is_err());
    }

    #[test]
    fn mixed_pmf_tail_is_finite_and_decays_as_inverse_square() {
        let p = BoundedPowerLaw::unit(2.963, 0.26).unwrap();
        let f1 = p.pdf(1.0);
        for d in [1_000u64, 100_000, 1_000_000] {
            let v = mixed_degree_pmf(d, &p).unwrap();
            let asymptote = f1 / (d as f64 * d as f64);
            assert!((v / asymptote - 1.0).abs() < 0.01, "{d}: {v} vs {asymptote}");
        }
    }
}
