//! Float math for the `no_std` build, backed by `libm`, plus a few small
//! special functions shared by the modules above.

/// Extension trait supplying the `std`-style `f64` math methods.
///
/// In a `no_std` crate the inherent `f64` methods from `std` do not exist,
/// so the usual method syntax resolves to this trait instead.
// Never called under `cfg(test)`: the harness links `std`, whose inherent
// float methods take priority.
#[cfg_attr(test, allow(dead_code))]
pub(crate) trait FloatExt {
    fn exp(self) -> f64;
    fn ln(self) -> f64;
    fn ln_1p(self) -> f64;
    fn log2(self) -> f64;
    fn log10(self) -> f64;
    fn powf(self, e: f64) -> f64;
    fn powi(self, e: i32) -> f64;
    fn sqrt(self) -> f64;
    fn sin(self) -> f64;
    fn cos(self) -> f64;
    fn ceil(self) -> f64;
    fn round(self) -> f64;
}

impl FloatExt for f64 {
    #[inline(always)]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline(always)]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline(always)]
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    #[inline(always)]
    fn log2(self) -> f64 {
        libm::log2(self)
    }
    #[inline(always)]
    fn log10(self) -> f64 {
        libm::log10(self)
    }
    #[inline(always)]
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline(always)]
    fn powi(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    #[inline(always)]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline(always)]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    #[inline(always)]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline(always)]
    fn ceil(self) -> f64 {
        libm::ceil(self)
    }
    #[inline(always)]
    fn round(self) -> f64 {
        libm::round(self)
    }
}

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
pub(crate) const SQRT_PI: f64 = 1.772_453_850_905_516;
pub(crate) const LN_3: f64 = 1.098_612_288_668_109_8;

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub(crate) fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Scaled complementary error function `erfcx(x) = exp(x^2) erfc(x)`.
///
/// The direct product overflows/underflows for x beyond ~26, so large
/// arguments use the asymptotic expansion
/// `erfcx(x) ~ 1/(x sqrt(pi)) * sum_m (-1)^m (2m-1)!! / (2x^2)^m`,
/// whose truncation error is below the last retained term; at x >= 12 ten
/// terms reach full double precision. For large x this approaches
/// `1/(x sqrt(pi))`.
pub(crate) fn erfcx(x: f64) -> f64 {
    if x < 12.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        let inv2x2 = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..=10u32 {
            term *= -((2 * m - 1) as f64) * inv2x2;
            sum += term;
        }
        sum / (x * SQRT_PI)
    }
}

/// Binary entropy in nats, continuously extended by H(0) = H(1) = 0.
///
/// Returns NaN outside [0, 1] (beyond a small rounding slack), which the
/// grid optimisers treat as an infeasible point.
pub(crate) fn bin_entropy(x: f64) -> f64 {
    const SLACK: f64 = 1e-12;
    if !((-SLACK..=1.0 + SLACK).contains(&x)) {
        return f64::NAN;
    }
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
}

/// Binary entropy in bits, extended as [`bin_entropy`].
pub(crate) fn bin_entropy_bits(x: f64) -> f64 {
    bin_entropy(x) / core::f64::consts::LN_2
}

/// `x * H(a/x)` in nats with the continuous extension to 0 at `x = 0`
/// (which requires `a = 0`; any `a > 0` with `x = 0` is infeasible and
/// yields NaN).
pub(crate) fn scaled_entropy(x: f64, a: f64) -> f64 {
    const SLACK: f64 = 1e-12;
    if x.abs() <= SLACK {
        if a.abs() <= SLACK {
            return 0.0;
        }
        return f64::NAN;
    }
    // A negative span is outside the domain even at a = 0: the optimizer
    // relies on NaN here to reject constraint-violating points whose
    // entropy arguments happen to vanish.
    if x < 0.0 {
        return f64::NAN;
    }
    x * bin_entropy(a / x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfcx_matches_direct_product_at_moderate_arguments() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 4.9, 11.9] {
            let direct = (x * x).exp() * libm::erfc(x);
            assert!((erfcx(x) - direct).abs() <= 1e-15 * direct.max(1.0));
        }
    }

    #[test]
    fn erfcx_branches_agree_at_series_switch() {
        // At the branch boundary x = 12 the asymptotic series (taken by
        // erfcx) and the direct product must agree to rounding error.
        let series = erfcx(12.0);
        let direct = 144.0f64.exp() * libm::erfc(12.0);
        assert!(
            ((series - direct) / direct).abs() < 1e-13,
            "{series} vs {direct}"
        );
    }

    #[test]
    fn erfcx_large_argument_limit() {
        // erfcx(x) -> 1/(x sqrt(pi)) as x grows.
        let x = 1.0e6;
        let approx = 1.0 / (x * SQRT_PI);
        assert!((erfcx(x) - approx).abs() / approx < 1e-10);
    }

    #[test]
    fn entropy_endpoints_and_symmetry() {
        assert_eq!(bin_entropy(0.0), 0.0);
        assert_eq!(bin_entropy(1.0), 0.0);
        assert!((bin_entropy(0.5) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!((bin_entropy(0.2) - bin_entropy(0.8)).abs() < 1e-15);
        assert!(bin_entropy(1.5).is_nan());
    }

    #[test]
    fn scaled_entropy_extension() {
        assert_eq!(scaled_entropy(0.0, 0.0), 0.0);
        assert!(scaled_entropy(0.0, 0.1).is_nan());
        assert!(scaled_entropy(-0.2, 0.0).is_nan());
        let direct = 0.3 * bin_entropy(0.1 / 0.3);
        assert!((scaled_entropy(0.3, 0.1) - direct).abs() < 1e-15);
    }

    #[test]
    fn q_function_reference_values() {
        // Q(0) = 1/2, Q(1.959964) ~ 0.025.
        assert!((q_func(0.0) - 0.5).abs() < 1e-15);
        assert!((q_func(1.959_963_984_540_054) - 0.025).abs() < 1e-12);
    }
}
