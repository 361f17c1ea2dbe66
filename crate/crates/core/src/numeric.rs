//! Small numerical helpers shared by the fitters and the exposure model.

/// Neumaier-compensated accumulator; the result does not depend on how the
/// terms were partitioned to within a few ulps.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `expm1(x) / x`, continuous through `x = 0`.
#[inline]
pub fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        x.exp_m1() / x
    }
}

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: u32,
}

/// Why a bracketed search could not start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BracketFailure {
    /// `f(lo)` and `f(hi)` share a sign.
    NoSignChange { f_lo: f64, f_hi: f64 },
    /// `f` was not finite at an end point.
    NotFinite { f_lo: f64, f_hi: f64 },
}

/// Bisection with secant acceleration on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `x_tol` *and* `|f| <= f_tol`, or
/// when the bracket collapses to adjacent floats.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<Root, BracketFailure>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(BracketFailure::NotFinite { f_lo: fa, f_hi: fb });
    }
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(BracketFailure::NoSignChange { f_lo: fa, f_hi: fb });
    }
    let mut iterations = 0;
    let mut last_width = b - a;
    loop {
        iterations += 1;
        let width = b - a;
        let (best, fbest) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
        if (width <= x_tol && fbest.abs() <= f_tol) || iterations > 400 {
            return Ok(Root { x: best, fx: fbest, iterations });
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Ok(Root { x: best, fx: fbest, iterations });
        }
        // secant step, accepted only if it lands well inside and the bracket
        // has been shrinking fast enough
        let secant = b - fb * (b - a) / (fb - fa);
        let margin = 1e-3 * width;
        let x = if secant.is_finite() && secant > a + margin && secant < b - margin && width < 0.7 * last_width {
            secant
        } else {
            mid
        };
        last_width = width;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(BracketFailure::NotFinite { f_lo: fa, f_hi: fb });
        }
        if fx == 0.0 {
            return Ok(Root { x, fx, iterations });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
    }

    #[test]
    fn exprel_is_continuous_at_zero() {
        for &x in &[-1e-4f64, -1e-6, 0.0, 1e-6, 1e-4] {
            let exact = if x == 0.0 { 1.0 } else { x.exp_m1() / x };
            assert!((exprel(x) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 3.0, 1e-12, 1e-12).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-10);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let e = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9, 1e-9).unwrap_err();
        assert!(matches!(e, BracketFailure::NoSignChange { .. }));
    }
}
