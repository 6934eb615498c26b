//! Numeric substrate: log-domain arithmetic, composite Gauss-Legendre
//! quadrature, damped fixed-point iteration, deterministic box-grid
//! maximisation and monotone bisection.
//!
//! Probability-like quantities are carried as natural logarithms with
//! `f64::NEG_INFINITY` encoding an exact zero, so that spectra spanning
//! thousands of orders of magnitude and bound terms near underflow stay
//! representable. All routines here are deterministic: identical inputs
//! produce bit-identical results.

// Unused under `cfg(test)`: the harness links `std`, whose inherent float
// methods shadow the trait.
#[allow(unused_imports)]
use crate::math::FloatExt;
use alloc::vec::Vec;

/// Natural-log encoding of zero.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// Errors raised by the routines in this module.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// A function evaluated to NaN/infinity where a finite value is required,
    /// or an optimiser found no finite value on its whole grid.
    NonFinite,
    /// Fixed-point iteration failed to converge within the iteration cap.
    NoConvergence { iterations: usize },
    /// Bisection was called with endpoints that do not bracket a sign change.
    BadBracket,
}

impl core::fmt::Display for NumericsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NumericsError::NonFinite => write!(f, "non-finite value where a finite one is required"),
            NumericsError::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            NumericsError::BadBracket => write!(f, "endpoints do not bracket the predicate change"),
        }
    }
}

impl core::error::Error for NumericsError {}

/// `ln(exp(a) + exp(b))` without overflow; either argument may be
/// [`LOG_ZERO`].
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(exp(a) - exp(b))` for `a >= b`; returns [`LOG_ZERO`] when the
/// difference underflows to zero.
#[inline]
pub fn log_sub(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "log_sub requires a >= b");
    if b == LOG_ZERO {
        return a;
    }
    if a == b {
        return LOG_ZERO;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// `ln(sum_i exp(v_i))` over a slice, stabilised by shifting with the
/// largest finite element. Empty input and all-[`LOG_ZERO`] input give
/// [`LOG_ZERO`].
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut hi = LOG_ZERO;
    for &v in values {
        if v > hi {
            hi = v;
        }
    }
    if hi == LOG_ZERO {
        return LOG_ZERO;
    }
    if hi.is_infinite() {
        return hi;
    }
    let mut acc = 0.0;
    for &v in values {
        if v != LOG_ZERO {
            acc += (v - hi).exp();
        }
    }
    hi + acc.ln()
}

/// Streaming accumulator equivalent to [`log_sum_exp`] over pushed values.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    total: f64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum { total: LOG_ZERO }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.total = log_add(self.total, v);
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

/// `ln C(n, k)` via log-gamma; out-of-range `k` (negative or above `n`)
/// returns [`LOG_ZERO`], matching the combinatorial convention that such
/// binomials vanish.
pub fn log_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || (k as u64) > n {
        return LOG_ZERO;
    }
    let k = k as u64;
    if k == 0 || k == n {
        return 0.0;
    }
    let nf = n as f64;
    let kf = k as f64;
    libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0)
}

/// `ln C(n, k)` where `n` may be negative (vanishing binomial), used when a
/// formula's upper index is itself a difference that can go negative.
pub fn log_binomial_i(n: i64, k: i64) -> f64 {
    if n < 0 {
        return LOG_ZERO;
    }
    log_binomial(n as u64, k)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Nodes and weights of a fixed quadrature rule over a symmetric interval.
///
/// Channel-output integrals use a composite Gauss-Legendre rule: the window
/// `[-L, L]` is split into panels of (at most) unit length carrying
/// `nodes_per_unit` Gauss-Legendre points each. Integrands in this crate
/// are products of unit-variance Gaussians with smooth tilting factors, for
/// which this rule is accurate to well below 1e-12.
#[derive(Debug, Clone)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// `n`-point Gauss-Legendre rule on `[-1, 1]`.
    ///
    /// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
    /// iteration from the Chebyshev initial guess; weights are
    /// `2 / ((1 - x^2) P_n'(x)^2)`.
    pub fn gauss_legendre(n: usize) -> Quadrature {
        assert!(n >= 2, "Gauss-Legendre rule needs at least two nodes");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n and its derivative by the three-term recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Quadrature { nodes, weights }
    }

    /// Composite rule over `[-half_width, half_width]` with unit-length
    /// panels of `nodes_per_unit` Gauss-Legendre points.
    pub fn composite_symmetric(half_width: f64, nodes_per_unit: usize) -> Quadrature {
        assert!(half_width > 0.0 && half_width.is_finite());
        let base = Quadrature::gauss_legendre(nodes_per_unit);
        let panels = (2.0 * half_width).ceil() as usize;
        let width = 2.0 * half_width / panels as f64;
        let mut nodes = Vec::with_capacity(panels * nodes_per_unit);
        let mut weights = Vec::with_capacity(panels * nodes_per_unit);
        for p in 0..panels {
            let a = -half_width + p as f64 * width;
            let mid = a + 0.5 * width;
            let scale = 0.5 * width;
            for (&x, &w) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + scale * x);
                weights.push(scale * w);
            }
        }
        Quadrature { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over the rule's interval.
    ///
    /// Fails with [`NumericsError::NonFinite`] if `f` is non-finite at any
    /// node.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> Result<f64, NumericsError> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(NumericsError::NonFinite);
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Fixed point
// ---------------------------------------------------------------------------

/// Damped fixed-point iteration `x <- x + damping (map(x) - x)` from `x0`,
/// stopping once `|map(x) - x| <= tol`.
///
/// The damping factor 0.5 trades speed for robustness on the oscillatory
/// maps that arise from alternating tilting-measure updates. Callers are
/// expected to fall back to one-dimensional root bracketing when
/// [`NumericsError::NoConvergence`] is returned.
pub fn fixed_point(
    mut map: impl FnMut(f64) -> f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, NumericsError> {
    const DAMPING: f64 = 0.5;
    let mut x = x0;
    for _ in 0..max_iter {
        let fx = map(x);
        if !fx.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        if (fx - x).abs() <= tol {
            return Ok(x);
        }
        x += DAMPING * (fx - x);
    }
    Err(NumericsError::NoConvergence { iterations: max_iter })
}

// ---------------------------------------------------------------------------
// Box-grid maximisation
// ---------------------------------------------------------------------------

/// Result of [`maximize_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxOptResult {
    /// Coordinates of the best grid point (lexicographically smallest among
    /// ties).
    pub argmax: Vec<f64>,
    /// Objective value there.
    pub max: f64,
    /// Number of objective evaluations performed.
    pub evaluations: usize,
}

/// Deterministic maximisation over an axis-aligned box: a coarse uniform
/// grid of `coarse` points per dimension followed by `refine_rounds` rounds
/// of local grids shrunk by a factor 4 around the incumbent (clamped to the
/// box).
///
/// Non-finite objective values (NaN or +/-inf) mark infeasible points and
/// are skipped; if no grid point at all is finite the result is
/// [`NumericsError::NonFinite`]. The incumbent is only replaced by a
/// strictly larger value and grids are scanned in lexicographic order, so
/// ties resolve to the smallest coordinates and adding refinement rounds
/// never lowers the result.
pub fn maximize_box(
    f: impl FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    coarse: usize,
    refine_rounds: usize,
) -> Result<BoxOptResult, NumericsError> {
    let counts = alloc::vec![coarse; bounds.len()];
    maximize_box_dims(f, bounds, &counts, refine_rounds)
}

/// As [`maximize_box`] with a separate grid resolution per dimension, for
/// objectives whose feasible set is thin in some coordinates only.
pub fn maximize_box_dims(
    mut f: impl FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    coarse: &[usize],
    refine_rounds: usize,
) -> Result<BoxOptResult, NumericsError> {
    assert!(!bounds.is_empty(), "empty parameter box");
    assert_eq!(bounds.len(), coarse.len(), "one grid count per dimension");
    assert!(coarse.iter().all(|&c| c >= 2), "grids need at least two points");
    for &(lo, hi) in bounds {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "invalid box");
    }

    let dim = bounds.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0usize;

    let scan =
        |f: &mut dyn FnMut(&[f64]) -> f64,
         lows: &[f64],
         highs: &[f64],
         best: &mut Option<(Vec<f64>, f64)>,
         evaluations: &mut usize| {
            let mut idx = alloc::vec![0usize; dim];
            let mut point = alloc::vec![0.0f64; dim];
            loop {
                for d in 0..dim {
                    point[d] =
                        lows[d] + (highs[d] - lows[d]) * idx[d] as f64 / (coarse[d] - 1) as f64;
                }
                let v = f(&point);
                *evaluations += 1;
                if v.is_finite() {
                    let better = match best {
                        None => true,
                        Some((_, b)) => v > *b,
                    };
                    if better {
                        *best = Some((point.clone(), v));
                    }
                }
                // Advance the mixed-radix counter; last dimension fastest so
                // the scan order is lexicographic in the point coordinates.
                let mut d = dim;
                loop {
                    if d == 0 {
                        return;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < coarse[d] {
                        break;
                    }
                    idx[d] = 0;
                }
            }
        };

    let lows: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let highs: Vec<f64> = bounds.iter().map(|b| b.1).collect();
    scan(&mut f, &lows, &highs, &mut best, &mut evaluations);

    if let Some((ref argmax, _)) = best {
        let mut center = argmax.clone();
        for round in 1..=refine_rounds {
            let shrink = 4.0f64.powi(round as i32);
            let mut lo = alloc::vec![0.0; dim];
            let mut hi = alloc::vec![0.0; dim];
            for d in 0..dim {
                let half = 0.5 * (bounds[d].1 - bounds[d].0) / shrink;
                lo[d] = (center[d] - half).max(bounds[d].0);
                hi[d] = (center[d] + half).min(bounds[d].1);
            }
            scan(&mut f, &lo, &hi, &mut best, &mut evaluations);
            center = best.as_ref().unwrap().0.clone();
        }
    }

    match best {
        Some((argmax, max)) => Ok(BoxOptResult { argmax, max, evaluations }),
        None => Err(NumericsError::NonFinite),
    }
}

// ---------------------------------------------------------------------------
// Bisection
// ---------------------------------------------------------------------------

/// Smallest `x` in `[lo, hi]` (to within `tol`) at which a monotone
/// predicate becomes true.
///
/// Requires `pred(lo) == false` and `pred(hi) == true`; otherwise
/// [`NumericsError::BadBracket`]. The returned point always satisfies the
/// predicate.
pub fn bisect(
    mut pred: impl FnMut(f64) -> bool,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    assert!(lo < hi && tol > 0.0);
    if pred(lo) || !pred(hi) {
        return Err(NumericsError::BadBracket);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn log_add_handles_zeros() {
        assert_eq!(log_add(LOG_ZERO, LOG_ZERO), LOG_ZERO);
        assert_eq!(log_add(LOG_ZERO, 1.5), 1.5);
        assert!((log_add(0.0, 0.0) - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_spectrum_total() {
        // Entries of a small repeat-accumulate spectrum (1 + 0.4 + 1.6 +
        // 0.6 + 0.4 = 4): the log-domain sum must be ln 4.
        let v = vec![1.0f64.ln(), 0.4f64.ln(), 1.6f64.ln(), 0.6f64.ln(), 0.4f64.ln()];
        assert!((log_sum_exp(&v) - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_deep_underflow() {
        // Both terms underflow in linear domain; the shifted sum does not.
        let v = vec![-1000.0, -1001.0];
        let expect = -1000.0 + (1.0 + (-1.0f64).exp()).ln();
        assert!((log_sum_exp(&v) - expect).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), LOG_ZERO);
        assert_eq!(log_sum_exp(&[LOG_ZERO, LOG_ZERO]), LOG_ZERO);
    }

    #[test]
    fn log_sub_inverse_of_add() {
        let a = 2.3;
        let b = -0.7;
        let s = log_add(a, b);
        assert!((log_sub(s, b) - a).abs() < 1e-12);
        assert_eq!(log_sub(a, a), LOG_ZERO);
    }

    #[test]
    fn log_binomial_small_values() {
        assert_eq!(log_binomial(0, 0), 0.0);
        assert_eq!(log_binomial(10, -1), LOG_ZERO);
        assert_eq!(log_binomial(10, 11), LOG_ZERO);
        assert!((log_binomial(52, 5) - 2_598_960.0f64.ln()).abs() < 1e-10);
        assert_eq!(log_binomial_i(-3, 0), LOG_ZERO);
    }

    #[test]
    fn log_binomial_matches_bigint_at_500_250() {
        // Exact big-integer evaluation of C(500, 250), reduced to a log by
        // splitting off the binary exponent.
        use alloc::string::ToString;
        use num_bigint::BigUint;
        let mut c = BigUint::from(1u32);
        for i in 0..250u64 {
            c = c * BigUint::from(500 - i) / BigUint::from(i + 1);
        }
        let bits = c.bits();
        let shift = bits.saturating_sub(53);
        let top: BigUint = c >> shift;
        let top: f64 = top.to_string().parse().unwrap();
        let exact_ln = top.ln() + shift as f64 * core::f64::consts::LN_2;
        let got = log_binomial(500, 250);
        assert!(
            ((got - exact_ln) / exact_ln).abs() < 1e-9,
            "got {got}, exact {exact_ln}"
        );
    }

    #[test]
    fn log_binomial_pascal_recurrence() {
        // C(n, k) = C(n-1, k-1) + C(n-1, k) in log domain across all n <= 60.
        for n in 1..=60u64 {
            for k in 0..=(n as i64) {
                let lhs = log_binomial(n, k);
                let rhs = log_add(log_binomial(n - 1, k - 1), log_binomial(n - 1, k));
                if lhs == LOG_ZERO {
                    assert_eq!(rhs, LOG_ZERO);
                } else {
                    assert!((lhs - rhs).abs() < 1e-10, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn quadrature_weight_sum_and_gaussian_mass() {
        let q = Quadrature::composite_symmetric(13.0, 64);
        let total: f64 = q.weights().iter().sum();
        assert!((total - 26.0).abs() < 1e-12);
        // Unit-variance Gaussian centred well inside the window.
        for &mu in &[-5.0, 0.0, 5.0] {
            let mass = q
                .integrate(|y| (-(y - mu) * (y - mu) / 2.0).exp() / crate::math::SQRT_2PI)
                .unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "mu={mu}: {mass}");
        }
    }

    #[test]
    fn quadrature_rejects_non_finite_integrands() {
        let q = Quadrature::composite_symmetric(1.0, 8);
        assert!(matches!(
            q.integrate(|_| f64::NAN).unwrap_err(),
            NumericsError::NonFinite
        ));
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        // An n-point rule integrates degree 2n-1 exactly.
        let q = Quadrature::gauss_legendre(8);
        let integral = q.integrate(|x| x.powi(14) + 3.0 * x.powi(7) + 1.0).unwrap();
        let exact = 2.0 / 15.0 + 2.0;
        assert!((integral - exact).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_linear_contraction() {
        // map(x) = 0.5 x + 1 has fixed point 2.
        let x = fixed_point(|x| 0.5 * x + 1.0, 0.0, 1e-12, 200).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_reports_no_convergence() {
        let err = fixed_point(|x| -2.0 * x + 1.0, 10.0, 1e-14, 5).unwrap_err();
        assert!(matches!(err, NumericsError::NoConvergence { iterations: 5 }));
    }

    #[test]
    fn maximize_box_concave_1d_matches_dense_scan() {
        let f = |u: f64| -> f64 {
            crate::math::bin_entropy(u) - 0.4 * u
        };
        let got = maximize_box(|p| f(p[0]), &[(0.0, 1.0)], 21, 4).unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0.0;
        for i in 0..=1_000_000u64 {
            let u = i as f64 / 1e6;
            let v = f(u);
            if v > best {
                best = v;
                arg = u;
            }
        }
        assert!((got.max - best).abs() < 1e-6, "{} vs {best}", got.max);
        assert!((got.argmax[0] - arg).abs() < 1e-3);
    }

    #[test]
    fn maximize_box_tie_breaks_to_smallest_point() {
        let got = maximize_box(|_| 1.0, &[(0.0, 1.0), (2.0, 3.0)], 5, 2).unwrap();
        assert_eq!(got.argmax, vec![0.0, 2.0]);
        assert_eq!(got.max, 1.0);
    }

    #[test]
    fn maximize_box_refinement_is_monotone() {
        let f = |p: &[f64]| -(p[0] - 0.31).powi(2) - (p[1] + 0.2).powi(2);
        let mut prev = f64::NEG_INFINITY;
        for rounds in 0..=5 {
            let r = maximize_box(f, &[(-1.0, 1.0), (-1.0, 1.0)], 9, rounds).unwrap();
            assert!(r.max >= prev - 1e-15);
            prev = r.max;
        }
    }

    #[test]
    fn maximize_box_all_infeasible_is_an_error() {
        let err = maximize_box(|_| f64::NAN, &[(0.0, 1.0)], 5, 1).unwrap_err();
        assert_eq!(err, NumericsError::NonFinite);
        // Points at -inf count as infeasible too.
        let err = maximize_box(|_| f64::NEG_INFINITY, &[(0.0, 1.0)], 5, 1).unwrap_err();
        assert_eq!(err, NumericsError::NonFinite);
    }

    #[test]
    fn bisect_finds_smallest_true_point() {
        let x = bisect(|x| x >= core::f64::consts::E, 0.0, 10.0, 1e-9).unwrap();
        assert!(x >= core::f64::consts::E && x - core::f64::consts::E < 1e-8);
    }

    #[test]
    fn bisect_rejects_bad_brackets() {
        assert_eq!(bisect(|_| true, 0.0, 1.0, 1e-6).unwrap_err(), NumericsError::BadBracket);
        assert_eq!(bisect(|_| false, 0.0, 1.0, 1e-6).unwrap_err(), NumericsError::BadBracket);
    }

    #[test]
    fn bisect_result_stable_under_tolerance_refinement() {
        let coarse = bisect(|x| x * x >= 2.0, 0.0, 2.0, 1e-3).unwrap();
        let fine = bisect(|x| x * x >= 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((coarse - fine).abs() <= 1e-3);
    }
}
