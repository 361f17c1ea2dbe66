//! Maximum-likelihood estimation of the model parameters from CIP samples.
//!
//! Closed-form estimators are used where they exist. The link-delay and
//! mixed-degree conditions are solved with the bracketing root finder in
//! [`crate::numeric`].

use std::collections::BTreeMap;

use crate::numeric::{exprel, find_root, BracketFailure, CompensatedSum};
use crate::stochastic::mixed_degree_pmf_unchecked;

/// Initial exponent of the alternating mixed-degree solve.
pub const BETA_START: f64 = 2.5;
/// Iteration cap of the alternating mixed-degree solve.
pub const MAX_ALTERNATIONS: usize = 100;
/// Both parameters must move less than this between alternations.
pub const ALTERNATION_TOL: f64 = 1e-4;

const P_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);
const XI_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-4);
const BETA_BRACKET: (f64, f64) = (1e-3, 30.0);
const X_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("no samples for `{parameter}`")]
    Empty { parameter: &'static str },
    #[error("invalid `{parameter}` sample {value}: {reason}")]
    InvalidSample { parameter: &'static str, value: u64, reason: &'static str },
    #[error("no valid activation rate: z*rho = {z_rho} must exceed mean daily activations {h_mean}")]
    Infeasible { z_rho: f64, h_mean: f64 },
    #[error("`{parameter}` has no interior maximum: score is {score_lo} at {lo} and {score_hi} at {hi}")]
    Boundary { parameter: &'static str, lo: f64, hi: f64, score_lo: f64, score_hi: f64 },
    #[error("`{parameter}` score is not finite on the bracket")]
    NotFinite { parameter: &'static str },
    #[error(
        "mixed-degree fit did not converge after {iterations} alternations \
         (beta={beta}, xi={xi}, last changes {beta_change:.3e}/{xi_change:.3e})"
    )]
    NonConvergence { iterations: usize, beta: f64, xi: f64, beta_change: f64, xi_change: f64 },
}

/// Samples of the co-location interaction parameters, in time steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CipSamples {
    /// Active-period lengths `t_a` (>= 1).
    pub active_periods: Vec<u64>,
    /// Inactive-period lengths `t_w` (>= 1). Not used by the fitters.
    pub inactive_periods: Vec<u64>,
    /// Activations per node per day `h`.
    pub activation_frequencies: Vec<u64>,
    /// Links per active copy `d` (>= 1).
    pub degrees: Vec<u64>,
    /// Link-creation delays `t_c` (>= 0).
    pub link_delays: Vec<u64>,
    /// Link durations `t_d` (>= 1).
    pub link_durations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    pub rho_log_likelihood: f64,
    pub q_log_likelihood: f64,
    pub lambda_log_likelihood: f64,
    pub mixed_log_likelihood: f64,
    pub p_c_log_likelihood: f64,
    pub p_c_iterations: usize,
    pub mixed: MixedDegreeFit,
    /// Geometric fit of the link durations, for comparison with `p_b = rho`.
    pub p_b_from_durations: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedParams {
    pub rho: f64,
    pub q: f64,
    pub lambda: f64,
    pub beta: f64,
    pub xi: f64,
    pub p_c: f64,
    pub p_b: f64,
    pub diagnostics: FitDiagnostics,
}

fn check_nonempty(parameter: &'static str, s: &[u64]) -> Result<(), FitError> {
    if s.is_empty() {
        Err(FitError::Empty { parameter })
    } else {
        Ok(())
    }
}

fn check_positive(parameter: &'static str, s: &[u64]) -> Result<(), FitError> {
    check_nonempty(parameter, s)?;
    match s.iter().find(|&&v| v == 0) {
        Some(&v) => Err(FitError::InvalidSample { parameter, value: v, reason: "must be at least 1" }),
        None => Ok(()),
    }
}

fn sum_u64(s: &[u64]) -> f64 {
    s.iter().map(|&v| v as f64).sum()
}

fn counts(s: &[u64]) -> Vec<(u64, f64)> {
    let mut m: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in s {
        *m.entry(v).or_default() += 1;
    }
    m.into_iter().map(|(v, c)| (v, c as f64)).collect()
}

fn root_or_boundary<F: FnMut(f64) -> f64>(
    parameter: &'static str,
    f: F,
    (lo, hi): (f64, f64),
    f_tol: f64,
) -> Result<crate::numeric::Root, FitError> {
    find_root(f, lo, hi, X_TOL, f_tol).map_err(|e| match e {
        BracketFailure::NoSignChange { f_lo, f_hi } => {
            FitError::Boundary { parameter, lo, hi, score_lo: f_lo, score_hi: f_hi }
        }
        BracketFailure::NotFinite { .. } => FitError::NotFinite { parameter },
    })
}

/// Geometric MLE `m / sum(s)` for samples with support starting at 1.
pub fn fit_geometric(samples: &[u64]) -> Result<f64, FitError> {
    check_positive("samples", samples)?;
    Ok(samples.len() as f64 / sum_u64(samples))
}

fn fit_geometric_named(parameter: &'static str, samples: &[u64]) -> Result<f64, FitError> {
    check_positive(parameter, samples)?;
    Ok(samples.len() as f64 / sum_u64(samples))
}

/// Log-likelihood of a support-1 geometric law.
pub fn geometric_log_likelihood(samples: &[u64], p: f64) -> f64 {
    let n = samples.len() as f64;
    let excess = sum_u64(samples) - n;
    n * p.ln() + excess * (-p).ln_1p()
}

/// Continuation-form geometric MLE for activation degrees: `1 - m / sum(d)`.
pub fn fit_homogeneous_degree(degrees: &[u64]) -> Result<f64, FitError> {
    check_positive("degrees", degrees)?;
    let lambda = 1.0 - degrees.len() as f64 / sum_u64(degrees);
    if lambda <= 0.0 {
        return Err(FitError::Boundary { parameter: "lambda", lo: 0.0, hi: 1.0, score_lo: 0.0, score_hi: 0.0 });
    }
    Ok(lambda)
}

/// Activation probability from the mean daily activation count:
/// `q = rho * h / (z * rho - h)`.
pub fn fit_activation_rate(h_samples: &[u64], rho: f64, steps_per_day: u32) -> Result<f64, FitError> {
    check_nonempty("activation_frequencies", h_samples)?;
    let h_mean = sum_u64(h_samples) / h_samples.len() as f64;
    let z_rho = steps_per_day as f64 * rho;
    if h_mean == 0.0 {
        return Err(FitError::Boundary { parameter: "q", lo: 0.0, hi: 1.0, score_lo: 0.0, score_hi: 0.0 });
    }
    if z_rho <= h_mean {
        return Err(FitError::Infeasible { z_rho, h_mean });
    }
    let q = rho * h_mean / (z_rho - h_mean);
    if q >= 1.0 {
        return Err(FitError::Infeasible { z_rho, h_mean });
    }
    Ok(q)
}

/// Poisson log-likelihood of daily activation counts with rate `z q rho / (q + rho)`.
pub fn activation_log_likelihood(h_samples: &[u64], rho: f64, q: f64, steps_per_day: u32) -> f64 {
    let mu = steps_per_day as f64 * q * rho / (q + rho);
    let mut acc = CompensatedSum::new();
    for (h, c) in counts(h_samples) {
        let ln_fact: f64 = (2..=h).map(|k| (k as f64).ln()).sum();
        acc.add(c * (h as f64 * mu.ln() - mu - ln_fact));
    }
    acc.value()
}

/// Link-delay likelihood over a set of active periods.
///
/// A delay `t` of a link from a copy of length `t_a` has the truncated law
/// `p (1-p)^t / (1 - (1-p)^B)` with bound `B = t_a + delta`. Because delays
/// are not paired with their copy, each delay is scored against the
/// empirical mixture over the active periods whose bound admits it:
/// `f(t) = p (1-p)^t W(t) / m` with `W(t) = sum_{B > t} 1 / (1 - (1-p)^B)`.
#[derive(Debug, Clone)]
pub struct LinkDelayLikelihood {
    /// Distinct bounds (ascending) with their multiplicities.
    bounds: Vec<(u64, f64)>,
    /// Distinct delays with multiplicities.
    delays: Vec<(u64, f64)>,
    n: f64,
    m: f64,
}

impl LinkDelayLikelihood {
    pub fn new(t_c: &[u64], t_a: &[u64], delta: u64) -> Result<Self, FitError> {
        check_nonempty("link_delays", t_c)?;
        check_positive("active_periods", t_a)?;
        let bounds: Vec<(u64, f64)> = counts(t_a).into_iter().map(|(a, c)| (a + delta, c)).collect();
        let delays = counts(t_c);
        let max_bound = bounds.last().unwrap().0;
        if let Some(&(t, _)) = delays.iter().rev().find(|&&(t, _)| t >= max_bound) {
            return Err(FitError::InvalidSample {
                parameter: "link_delays",
                value: t,
                reason: "exceeds every active period plus delta",
            });
        }
        Ok(LinkDelayLikelihood { bounds, delays, n: t_c.len() as f64, m: t_a.len() as f64 })
    }

    pub fn sample_count(&self) -> f64 {
        self.n
    }

    /// Visit each distinct delay with the suffix sums `W(t)` and `W'(t)`.
    fn walk<F: FnMut(u64, f64, f64, f64)>(&self, p: f64, mut visit: F) {
        let ln_q = (-p).ln_1p();
        let (mut w, mut dw) = (CompensatedSum::new(), CompensatedSum::new());
        let mut bi = self.bounds.len();
        for &(t, c) in self.delays.iter().rev() {
            while bi > 0 && self.bounds[bi - 1].0 > t {
                bi -= 1;
                let (b, nb) = self.bounds[bi];
                let b = b as f64;
                let qb = (b * ln_q).exp();
                let norm = -(b * ln_q).exp_m1();
                w.add(nb / norm);
                dw.add(-nb * b * qb / (1.0 - p) / (norm * norm));
            }
            visit(t, c, w.value(), dw.value());
        }
    }

    pub fn score(&self, p: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        self.walk(p, |t, c, w, dw| acc.add(c * (1.0 / p - t as f64 / (1.0 - p) + dw / w)));
        acc.value()
    }

    pub fn log_likelihood(&self, p: f64) -> f64 {
        let ln_q = (-p).ln_1p();
        let mut acc = CompensatedSum::new();
        self.walk(p, |t, c, w, _| acc.add(c * (p.ln() + t as f64 * ln_q + (w / self.m).ln())));
        acc.value()
    }
}

/// Link-creation probability `p_c` from delays and active periods.
pub fn fit_truncated_geometric(t_c: &[u64], t_a: &[u64], delta: u64) -> Result<f64, FitError> {
    fit_truncated_geometric_root(t_c, t_a, delta).map(|(p, _)| p)
}

fn fit_truncated_geometric_root(t_c: &[u64], t_a: &[u64], delta: u64) -> Result<(f64, usize), FitError> {
    let lik = LinkDelayLikelihood::new(t_c, t_a, delta)?;
    let f_tol = 1e-7 * lik.sample_count();
    let root = root_or_boundary("p_c", |p| lik.score(p), P_BRACKET, f_tol)?;
    Ok((root.x, root.iterations as usize))
}

/// `d/dx exprel(x) = (x e^x - e^x + 1) / x^2`.
fn exprel_prime(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // sum_{k>=1} k x^(k-1) / (k+1)!
        let mut term_fact = 2.0; // (k+1)!
        let mut pow = 1.0;
        let mut acc = 0.0;
        for k in 1..=14 {
            acc += k as f64 * pow / term_fact;
            pow *= x;
            term_fact *= (k + 2) as f64;
        }
        acc
    } else {
        (x.exp() * (x - 1.0) + 1.0) / (x * x)
    }
}

/// `G(a) = integral_xi^1 x^(a-1) dx` with `ln_xi = L`.
fn g(a: f64, ln_xi: f64) -> f64 {
    -ln_xi * exprel(a * ln_xi)
}

/// `dG/da`.
fn g_prime(a: f64, ln_xi: f64) -> f64 {
    -ln_xi * ln_xi * exprel_prime(a * ln_xi)
}

/// Degree counts prepared for the mixed-degree likelihood.
#[derive(Debug, Clone)]
pub struct MixedDegreeLikelihood {
    counts: Vec<(u64, f64)>,
    n: f64,
}

impl MixedDegreeLikelihood {
    pub fn new(degrees: &[u64]) -> Result<Self, FitError> {
        check_positive("degrees", degrees)?;
        Ok(MixedDegreeLikelihood { counts: counts(degrees), n: degrees.len() as f64 })
    }

    pub fn sample_count(&self) -> f64 {
        self.n
    }

    pub fn log_likelihood(&self, beta: f64, xi: f64) -> f64 {
        let l = xi.ln();
        let mut acc = CompensatedSum::new();
        for &(d, c) in &self.counts {
            acc.add(c * mixed_degree_pmf_unchecked(d, beta, l, 0.0).ln());
        }
        acc.value()
    }

    /// `d lnL / d xi`.
    pub fn xi_score(&self, beta: f64, xi: f64) -> f64 {
        let l = xi.ln();
        let mut acc = CompensatedSum::new();
        // beta xi^(-beta-1) / (xi^-beta - 1) = beta / (xi (1 - xi^beta))
        acc.add(self.n * beta / (xi * -(beta * l).exp_m1()));
        for &(d, c) in &self.counts {
            let a = d as f64 - beta - 1.0;
            let diff = g(a, l) - g(a + 1.0, l);
            let num = ((a - 1.0) * l).exp() * (xi - 1.0);
            acc.add(c * num / diff);
        }
        acc.value()
    }

    /// `d lnL / d beta`.
    pub fn beta_score(&self, beta: f64, xi: f64) -> f64 {
        let l = xi.ln();
        let mut acc = CompensatedSum::new();
        acc.add(self.n * (1.0 / beta + l / -(beta * l).exp_m1()));
        for &(d, c) in &self.counts {
            let a = d as f64 - beta - 1.0;
            let diff = g(a, l) - g(a + 1.0, l);
            let num = g_prime(a + 1.0, l) - g_prime(a, l);
            acc.add(c * num / diff);
        }
        acc.value()
    }

    /// `d lnL / d psi` for a power law on `[xi, psi]`, evaluated at general `psi`.
    pub fn psi_score(&self, beta: f64, xi: f64, psi: f64) -> f64 {
        let (lo, hi) = (xi.ln(), psi.ln());
        let gen = |a: f64| (a * lo).exp() * (hi - lo) * exprel(a * (hi - lo));
        let mut acc = CompensatedSum::new();
        let norm = xi.powf(-beta) - psi.powf(-beta);
        acc.add(-self.n * beta * psi.powf(-beta - 1.0) / norm);
        for &(d, c) in &self.counts {
            let a = d as f64 - beta - 1.0;
            let diff = gen(a) - gen(a + 1.0);
            acc.add(c * (psi.powf(a - 1.0) - psi.powf(a)) / diff);
        }
        acc.value()
    }

    fn score_norm(&self, beta: f64, xi: f64) -> f64 {
        self.beta_score(beta, xi).abs().max(self.xi_score(beta, xi).abs())
    }

    /// Newton steps on both score equations jointly, from a point the
    /// alternating solve has already brought close to the root.
    fn polish(&self, mut beta: f64, mut xi: f64) -> (f64, f64) {
        let tol = 1e-8 * self.n;
        let mut norm = self.score_norm(beta, xi);
        for _ in 0..20 {
            if norm <= tol {
                break;
            }
            let (sb, sx) = (self.beta_score(beta, xi), self.xi_score(beta, xi));
            let (hb, hx) = (1e-6 * beta, 1e-6 * xi);
            let bb = (self.beta_score(beta + hb, xi) - self.beta_score(beta - hb, xi)) / (2.0 * hb);
            let bx = (self.beta_score(beta, xi + hx) - self.beta_score(beta, xi - hx)) / (2.0 * hx);
            let xb = (self.xi_score(beta + hb, xi) - self.xi_score(beta - hb, xi)) / (2.0 * hb);
            let xx = (self.xi_score(beta, xi + hx) - self.xi_score(beta, xi - hx)) / (2.0 * hx);
            let det = bb * xx - bx * xb;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let nb = beta - (sb * xx - bx * sx) / det;
            let nx = xi - (bb * sx - xb * sb) / det;
            if !(nb > BETA_BRACKET.0 && nb < BETA_BRACKET.1 && nx > XI_BRACKET.0 && nx < XI_BRACKET.1) {
                break;
            }
            let next = self.score_norm(nb, nx);
            if !(next < norm) {
                break;
            }
            (beta, xi, norm) = (nb, nx, next);
        }
        (beta, xi)
    }

    fn solve_xi(&self, beta: f64) -> Result<f64, FitError> {
        let tol = 1e-7 * self.n;
        root_or_boundary("xi", |x| self.xi_score(beta, x), XI_BRACKET, tol).map(|r| r.x)
    }

    fn solve_beta(&self, xi: f64) -> Result<f64, FitError> {
        let tol = 1e-7 * self.n;
        root_or_boundary("beta", |b| self.beta_score(b, xi), BETA_BRACKET, tol).map(|r| r.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedDegreeFit {
    pub beta: f64,
    pub xi: f64,
    /// Estimates after the first xi-then-beta pass.
    pub one_step_beta: f64,
    pub one_step_xi: f64,
    pub iterations: usize,
}

/// Alternating solve of the mixed-degree score equations, starting at
/// `beta = 2.5`: xi given beta, then beta given xi, until both move less
/// than `1e-4`.
pub fn fit_mixed_degree(degrees: &[u64]) -> Result<MixedDegreeFit, FitError> {
    let lik = MixedDegreeLikelihood::new(degrees)?;
    if lik.counts.len() == 1 && lik.counts[0].0 == 1 {
        let s = lik.beta_score(BETA_BRACKET.1, 0.5);
        return Err(FitError::Boundary {
            parameter: "beta",
            lo: BETA_BRACKET.0,
            hi: BETA_BRACKET.1,
            score_lo: lik.beta_score(BETA_BRACKET.0, 0.5),
            score_hi: s,
        });
    }
    let mut beta = BETA_START;
    let mut xi = lik.solve_xi(beta)?;
    let mut one_step = None;
    let (mut d_beta, mut d_xi) = (f64::INFINITY, f64::INFINITY);
    for it in 1..=MAX_ALTERNATIONS {
        if it > 1 {
            let next = lik.solve_xi(beta)?;
            d_xi = (next - xi).abs();
            xi = next;
        }
        let next = lik.solve_beta(xi)?;
        d_beta = (next - beta).abs();
        beta = next;
        one_step.get_or_insert((beta, xi));
        if it > 1 && d_beta < ALTERNATION_TOL && d_xi < ALTERNATION_TOL {
            let (one_step_beta, one_step_xi) = one_step.unwrap();
            let (beta, xi) = lik.polish(beta, xi);
            return Ok(MixedDegreeFit { beta, xi, one_step_beta, one_step_xi, iterations: it });
        }
    }
    Err(FitError::NonConvergence {
        iterations: MAX_ALTERNATIONS,
        beta,
        xi,
        beta_change: d_beta,
        xi_change: d_xi,
    })
}

/// Degree samples below this count produce a warning.
pub const RECOMMENDED_DEGREE_SAMPLES: usize = 1000;

/// Fit every parameter; `p_b` is set to `rho`.
pub fn fit_all(samples: &CipSamples, steps_per_day: u32, delta: u64) -> Result<FittedParams, FitError> {
    let rho = fit_geometric_named("active_periods", &samples.active_periods)?;
    let q = fit_activation_rate(&samples.activation_frequencies, rho, steps_per_day)?;
    let lambda = fit_homogeneous_degree(&samples.degrees)?;
    let mixed = fit_mixed_degree(&samples.degrees)?;
    let (p_c, p_c_iterations) =
        fit_truncated_geometric_root(&samples.link_delays, &samples.active_periods, delta)?;

    let mut warnings = Vec::new();
    if samples.degrees.len() < RECOMMENDED_DEGREE_SAMPLES {
        warnings.push(format!(
            "only {} degree samples; the mixed-degree estimate may be unreliable",
            samples.degrees.len()
        ));
    }
    let p_b_from_durations = fit_geometric_named("link_durations", &samples.link_durations).ok();
    if p_b_from_durations.is_none() {
        warnings.push("no usable link durations; p_b taken from rho only".to_string());
    }
    let degree_lik = MixedDegreeLikelihood::new(&samples.degrees)?;
    let delay_lik = LinkDelayLikelihood::new(&samples.link_delays, &samples.active_periods, delta)?;
    let deg_geom: Vec<u64> = samples.degrees.clone();
    let diagnostics = FitDiagnostics {
        rho_log_likelihood: geometric_log_likelihood(&samples.active_periods, rho),
        q_log_likelihood: activation_log_likelihood(&samples.activation_frequencies, rho, q, steps_per_day),
        lambda_log_likelihood: geometric_log_likelihood(&deg_geom, 1.0 - lambda),
        mixed_log_likelihood: degree_lik.log_likelihood(mixed.beta, mixed.xi),
        p_c_log_likelihood: delay_lik.log_likelihood(p_c),
        p_c_iterations,
        mixed,
        p_b_from_durations,
        warnings,
    };
    Ok(FittedParams { rho, q, lambda, beta: mixed.beta, xi: mixed.xi, p_c, p_b: rho, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_examples() {
        assert_eq!(fit_geometric(&[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(fit_geometric(&[2, 4, 6]).unwrap(), 0.25);
        assert!(matches!(fit_geometric(&[]), Err(FitError::Empty { .. })));
        assert!(matches!(fit_geometric(&[0, 3]), Err(FitError::InvalidSample { .. })));
    }

    #[test]
    fn activation_rate_inverts_mean() {
        let z = 288u32;
        let (rho, q) = (0.085, 0.0048);
        let h_mean = q * z as f64 * rho / (q + rho);
        // integer samples with the right mean are not available, so check the formula directly
        let q_hat = rho * h_mean / (z as f64 * rho - h_mean);
        assert!((q_hat - q).abs() < 1e-12);
        let q_fit = fit_activation_rate(&[1, 1, 2, 1], rho, z).unwrap();
        assert!((q_fit - rho * 1.25 / (z as f64 * rho - 1.25)).abs() < 1e-15);
        assert!(matches!(fit_activation_rate(&[0, 0], rho, z), Err(FitError::Boundary { .. })));
        assert!(matches!(fit_activation_rate(&[30], 0.1, 288), Err(FitError::Infeasible { .. })));
    }

    #[test]
    fn exprel_prime_is_smooth_across_switch() {
        for &x in &[-0.1000001f64, -0.0999999, 0.0999999, 0.1000001] {
            let h = 1e-5;
            let fd = (exprel(x + h) - exprel(x - h)) / (2.0 * h);
            assert!((exprel_prime(x) - fd).abs() < 1e-8, "{x}");
        }
        assert!((exprel_prime(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_period_untruncated_limit() {
        let t_c: Vec<u64> = vec![0, 10, 25, 40, 3, 70, 12];
        let p = fit_truncated_geometric(&t_c, &[100_000], 36).unwrap();
        let n = t_c.len() as f64;
        let expect = n / (n + t_c.iter().sum::<u64>() as f64);
        assert!((p - expect).abs() < 1e-6, "{p} vs {expect}");
    }

    #[test]
    fn all_zero_delays_hit_upper_bound() {
        let e = fit_truncated_geometric(&[0, 0, 0], &[5, 7], 36).unwrap_err();
        assert!(matches!(e, FitError::Boundary { parameter: "p_c", .. }), "{e:?}");
    }

    #[test]
    fn delay_beyond_every_bound_is_rejected() {
        let e = fit_truncated_geometric(&[50], &[5], 10).unwrap_err();
        assert!(matches!(e, FitError::InvalidSample { .. }));
    }

    #[test]
    fn all_ones_degrees_are_boundary() {
        let e = fit_mixed_degree(&[1; 500]).unwrap_err();
        assert!(matches!(e, FitError::Boundary { parameter: "beta", .. }), "{e:?}");
        assert!(fit_homogeneous_degree(&[1; 10]).is_err());
    }

    #[test]
    fn scores_match_finite_differences() {
        let d: Vec<u64> = (1..40).flat_map(|k| std::iter::repeat_n(k, 200 / k as usize + 1)).collect();
        let lik = MixedDegreeLikelihood::new(&d).unwrap();
        for &(b, x) in &[(2.5, 0.3), (3.0, 0.26), (1.7, 0.5), (4.0, 0.1)] {
            let h = 1e-6;
            let fb = (lik.log_likelihood(b + h, x) - lik.log_likelihood(b - h, x)) / (2.0 * h);
            let fx = (lik.log_likelihood(b, x + h) - lik.log_likelihood(b, x - h)) / (2.0 * h);
            let sb = lik.beta_score(b, x);
            let sx = lik.xi_score(b, x);
            assert!((fb - sb).abs() < 1e-4 * (1.0 + sb.abs()), "beta {b} {x}: {fb} vs {sb}");
            assert!((fx - sx).abs() < 1e-4 * (1.0 + sx.abs()), "xi {b} {x}: {fx} vs {sx}");
        }
        let t_a: Vec<u64> = (1..60).collect();
        let t_c: Vec<u64> = (0..40).map(|k| k % 50).collect();
        let dl = LinkDelayLikelihood::new(&t_c, &t_a, 5).unwrap();
        for &p in &[0.01, 0.05, 0.3] {
            let h = 1e-7;
            let fd = (dl.log_likelihood(p + h) - dl.log_likelihood(p - h)) / (2.0 * h);
            assert!((fd - dl.score(p)).abs() < 1e-4 * (1.0 + fd.abs()), "{p}: {fd} vs {}", dl.score(p));
        }
    }

    #[test]
    fn psi_score_at_unit_matches_finite_difference_of_general_likelihood() {
        let d: Vec<u64> = (1..30).flat_map(|k| std::iter::repeat_n(k, 100 / k as usize + 1)).collect();
        let lik = MixedDegreeLikelihood::new(&d).unwrap();
        let ll = |psi: f64| -> f64 {
            counts(&d)
                .iter()
                .map(|&(k, c)| c * mixed_degree_pmf_unchecked(k, 2.8, 0.3f64.ln(), psi.ln()).ln())
                .sum()
        };
        let psi = 0.9;
        let h = 1e-6;
        let fd = (ll(psi + h) - ll(psi - h)) / (2.0 * h);
        let s = lik.psi_score(2.8, 0.3, psi);
        assert!((fd - s).abs() < 1e-4 * (1.0 + s.abs()), "{fd} vs {s}");
    }
}
