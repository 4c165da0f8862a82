//! Binomial rate estimates with exact Clopper-Pearson bounds.

/// Remainder of Stirling's series for `ln Γ(x)`, good to 1e-12 for `x >= 10`.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / x
}

/// `ln B(a, b)`. Large arguments go through Stirling's series so the
/// huge `ln Γ` terms cancel analytically instead of in floating point.
fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, big) = if a < b { (a, b) } else { (b, a) };
    let s = a + b;
    if small >= 10.0 {
        0.5 * libm::log(2.0 * core::f64::consts::PI)
            - 0.5 * libm::log(s)
            - (small - 0.5) * libm::log1p(big / small)
            - (big - 0.5) * libm::log1p(small / big)
            + stirling_tail(small)
            + stirling_tail(big)
            - stirling_tail(s)
    } else if big >= 10.0 {
        // ln Γ(big + small) - ln Γ(big)
        let ratio = (big - 0.5) * libm::log1p(small / big) + small * libm::log(s) - small
            + stirling_tail(s)
            - stirling_tail(big);
        libm::lgamma(small) - ratio
    } else {
        libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(s)
    }
}

/// Continued fraction for the incomplete beta (modified Lentz). `xc` is
/// `1 - x`, passed separately so the leading term keeps full precision
/// near the mean.
fn beta_cf(a: f64, b: f64, x: f64, xc: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = ((a + 1.0) * xc - (b - 1.0) * x) / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = -ln_beta(a, b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x, 1.0 - x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x, x) / b
    }
}

/// `x` with `I_x(a, b) = q`, by bisection.
pub fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inc_beta(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-sided Clopper-Pearson upper bound on the failure rate.
pub fn cp_upper_bound(n: u64, failures: u64, confidence: f64) -> f64 {
    let k = failures.min(n);
    if k == n {
        return 1.0;
    }
    if k == 0 {
        // closed form of the same quantile, exact to rounding
        return -libm::expm1(libm::log(1.0 - confidence) / n as f64);
    }
    beta_quantile(k as f64 + 1.0, (n - k) as f64, confidence)
}

/// One-sided Clopper-Pearson lower bound on the failure rate.
pub fn cp_lower_bound(n: u64, failures: u64, confidence: f64) -> f64 {
    let k = failures.min(n);
    if k == 0 {
        return 0.0;
    }
    if k == n {
        return libm::exp(libm::log(1.0 - confidence) / n as f64);
    }
    beta_quantile(k as f64, (n - k + 1) as f64, 1.0 - confidence)
}

/// Two-sided Clopper-Pearson interval with `confidence` coverage.
pub fn cp_interval(n: u64, failures: u64, confidence: f64) -> (f64, f64) {
    let tail = 0.5 * (1.0 - confidence);
    (
        cp_lower_bound(n, failures, 1.0 - tail),
        cp_upper_bound(n, failures, 1.0 - tail),
    )
}

/// Standard normal upper tail `P(Z > x)`.
pub fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// `x` with `P(Z > x) = p`, for `0 < p < 1`.
pub fn normal_tail_inverse(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_tail(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Failure count over a number of trials, with its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub n_trials: u64,
    pub n_failures: u64,
    pub point: f64,
    pub cp_lower_95: f64,
    pub cp_upper_95: f64,
}

impl RateEstimate {
    pub fn new(n_trials: u64, n_failures: u64) -> Self {
        let point = if n_trials > 0 {
            n_failures as f64 / n_trials as f64
        } else {
            0.0
        };
        if n_trials == 0 {
            return RateEstimate {
                n_trials,
                n_failures,
                point,
                cp_lower_95: 0.0,
                cp_upper_95: 1.0,
            };
        }
        RateEstimate {
            n_trials,
            n_failures,
            point,
            cp_lower_95: cp_lower_bound(n_trials, n_failures, 0.95),
            cp_upper_95: cp_upper_bound(n_trials, n_failures, 0.95),
        }
    }

    /// Two-sided interval at `confidence`.
    pub fn interval(&self, confidence: f64) -> (f64, f64) {
        if self.n_trials == 0 {
            return (0.0, 1.0);
        }
        cp_interval(self.n_trials, self.n_failures, confidence)
    }

    pub fn upper(&self, confidence: f64) -> f64 {
        if self.n_trials == 0 {
            return 1.0;
        }
        cp_upper_bound(self.n_trials, self.n_failures, confidence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Beta, ContinuousCDF};

    #[test]
    fn incomplete_beta_matches_reference() {
        for &(a, b, x) in &[
            (1.0, 1.0, 0.3),
            (2.5, 7.0, 0.2),
            (30.0, 3.0, 0.95),
            (0.5, 0.5, 0.01),
            (12.0, 40.0, 0.2),
        ] {
            let want = Beta::new(a, b).unwrap().cdf(x);
            let got = inc_beta(a, b, x);
            assert!(
                (got - want).abs() <= 1e-10 * want.max(1e-300) + 1e-14,
                "{a} {b} {x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn incomplete_beta_with_huge_shape() {
        // 40-digit values from an arbitrary-precision evaluation
        for &(a, b, x, want) in &[
            (11.0, 1e7, 1.2e-6, 0.652_771_966_296_939_2),
            (1.0, 3e6, 1e-6, 0.950_213_006_312_732_4),
            (2e5, 2e5, 0.501, 0.897_048_479_663_120_6),
        ] {
            let got = inc_beta(a, b, x);
            assert!(
                (got / want - 1.0).abs() < 1e-10,
                "{a} {b} {x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn zero_failure_bound() {
        let n = 2_995_732;
        let u = cp_upper_bound(n, 0, 0.95);
        assert!((u / 1e-6 - 1.0).abs() < 1e-3);
        let u = cp_upper_bound(100, 0, 0.95);
        assert!((u - (1.0 - libm::pow(0.05, 0.01))).abs() < 1e-12);
        assert!((u - 0.02951).abs() < 1e-5);
        assert_eq!(cp_upper_bound(10, 10, 0.95), 1.0);
    }

    #[test]
    fn general_bounds_match_beta_quantiles() {
        // quantiles bisected at 40 digits
        assert!((cp_upper_bound(100, 3, 0.95) - 0.075_710_793_749_830_05).abs() < 1e-12);
        assert!((cp_lower_bound(100, 3, 0.95) - 0.008_225_829_107_652_687).abs() < 1e-12);
    }

    #[test]
    fn estimate_is_ordered() {
        for &(n, k) in &[(10u64, 0u64), (10, 10), (1000, 7), (1, 1), (1, 0)] {
            let r = RateEstimate::new(n, k);
            assert!(r.cp_lower_95 <= r.point && r.point <= r.cp_upper_95);
            let (lo, hi) = r.interval(0.95);
            assert!(lo <= r.point && r.point <= hi);
        }
    }

    #[test]
    fn normal_tail_values() {
        assert!((normal_tail(4.753) / 1.0e-6 - 1.0).abs() < 0.01);
        assert!((normal_tail_inverse(1e-3) - 3.0902).abs() < 1e-3);
        assert!((normal_tail(0.0) - 0.5).abs() < 1e-15);
    }
}
