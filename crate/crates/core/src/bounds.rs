//! Upper bounds on the block and bit error probability of maximum-likelihood
//! decoding when the bits of a binary linear code are assigned at random to
//! a set of parallel MBIOS channels.
//!
//! The code is split into constant Hamming weight subcodes; each bound is
//! either a sum of per-subcode terms (DS2 bound, 1961 Gallager bound, exact
//! union bound via Craig's identity, Bhattacharyya union bound) or couples
//! the subcodes through a shared parameter (sphere bound, Shulman-Feder
//! bound and its modified form). Every quantity is handled in the natural
//! log domain; channel outputs are integrated on fixed symmetric quadrature
//! tables wide enough for all admissible tilting parameters, and parameter
//! choices whose tilted integrands would peak outside the tables are
//! reported as infeasible (skipping a candidate can only loosen a minimised
//! upper bound, never invalidate it).

use crate::channels::{MbiosChannel, OutputSupport, ParallelChannelSet};
use crate::math::bin_entropy;
// Unused under `cfg(test)`: the harness links `std`, whose inherent float
// methods shadow the trait.
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::numerics::{
    log_add, log_binomial, log_sub, maximize_box_dims, NumericsError, Quadrature, LOG_ZERO,
};
use crate::spectra::{DistanceSpectrum, Iowe};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Smallest admissible value of the exponent parameter `rho`.
pub const RHO_MIN: f64 = 1e-3;
/// The tilting parameter `lambda` is searched through `lambda' = lambda /
/// (1 + lambda)`; this cap keeps `lambda` finite.
pub(crate) const LAMBDA_PRIME_MAX: f64 = 1.0 - 1e-3;
const TILT_TOL: f64 = 1e-10;
const TILT_MAX_ITER: usize = 500;
/// Nodes of the Gauss-Legendre rule used for Craig's identity.
const CRAIG_NODES: usize = 256;
/// Quadrature tables span `8 m + 12` per side (`m` the Gaussian offset).
const TABLE_WIDTH_FACTOR: f64 = 8.0;
const TABLE_MARGIN: f64 = 12.0;
/// A tilted integrand whose peak is closer than this to the table edge is
/// treated as infeasible.
const GUARD_MARGIN: f64 = 10.0;
/// Grid points per dimension inside a warm-start window.
const WINDOW_COARSE: usize = 5;
const EDGE_EPS: f64 = 1e-9;

/// Failure modes of the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsError {
    /// The requested bound needs a channel feature the set lacks (the exact
    /// union and sphere bounds exist in closed form only for Gaussian sets).
    UnsupportedChannel(&'static str),
    /// A bit error bound was requested from a spectrum without bit weights.
    MissingIowe,
    /// The tilting fixed point did not converge.
    NoConvergence,
    /// A parameter was outside its admissible range.
    InvalidParameter(&'static str),
}

impl core::fmt::Display for BoundsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BoundsError::UnsupportedChannel(what) => write!(f, "unsupported channel: {what}"),
            BoundsError::MissingIowe => {
                write!(f, "bit error bounds need an input with bit multiplicities")
            }
            BoundsError::NoConvergence => write!(f, "tilting iteration did not converge"),
            BoundsError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

/// Which error probability a bound targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Block,
    Bit,
}

/// Variant of the Shulman-Feder bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfVariant {
    /// Whole-code 1961 Gallager form with the spectrum replaced by its
    /// worst ratio to the binomial.
    Gallager,
    /// DS2 form of the same reduction.
    Ds2,
}

/// Bound family selector for [`error_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Per-subcode DS2 bound, optimised tilting measure.
    Ds2,
    /// Per-subcode 1961 Gallager bound, optimised tilting measure.
    Gallager61,
    /// Exact union bound via Craig's identity (Gaussian sets only).
    UnionQ,
    /// Bhattacharyya union bound.
    Ub,
    /// Sphere bound (Gaussian sets only).
    Sphere,
    /// Shulman-Feder bound.
    Sf,
    /// Modified Shulman-Feder bound: union terms where the spectrum is
    /// benign, Shulman-Feder on the remaining weight range.
    Msf,
    /// Per-subcode hybrid form: Gallager-style outer structure evaluated
    /// with the DS2-optimal tilting measure.
    Hybrid,
    /// Whole-code DS2 bound with a single tilting measure for all weights.
    Ds2Whole,
}

/// Optimised parameters attached to a per-subcode term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptParams {
    /// No free parameters (union terms, screened subcodes).
    None,
    Ds2 { lambda: f64, rho: f64, k: f64 },
    Gallager { rho: f64, s: f64, c: f64 },
    Sphere { rho: f64, beta: f64 },
    Sf { rho: f64 },
    Hybrid { lambda: f64, rho: f64, k: f64 },
}

/// One subcode's contribution to a bound, in natural log.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcodeTerm {
    pub h: u32,
    pub log_contribution: f64,
    pub params: OptParams,
}

/// A bound value together with its per-subcode decomposition.
///
/// `log_total` is clamped to 0 (probabilities never exceed 1) while
/// `log_total_raw` keeps the unclamped sum of the contributions; the
/// contributions always log-sum to `log_total_raw`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub log_total: f64,
    pub log_total_raw: f64,
    pub per_subcode: Vec<SubcodeTerm>,
    /// Subcodes answered by the cheap union screen instead of the optimiser.
    pub skipped: usize,
}

fn assemble_result(kind: BoundKind, per_subcode: Vec<SubcodeTerm>, skipped: usize) -> BoundResult {
    let mut acc = StreamLse::new();
    for t in &per_subcode {
        acc.push(t.log_contribution);
    }
    let raw = acc.total();
    BoundResult { kind, log_total: raw.min(0.0), log_total_raw: raw, per_subcode, skipped }
}

/// Optimised tilting measure of the DS2 bound at one normalized weight.
///
/// The implied probability tilting on channel `j` is `psi(y) = betas[j] *
/// p0(y) * (1 + k (p1/p0)^lambda)^rho`, which integrates to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltingSolution {
    pub lambda: f64,
    pub rho: f64,
    pub k: f64,
    pub betas: Vec<f64>,
}

/// Weight partition produced by the modified Shulman-Feder bound. The two
/// index sets are disjoint and cover `1..=n`; `delta_l`/`delta_r` are the
/// normalized endpoints of the Shulman-Feder range (zero when empty).
#[derive(Debug, Clone, PartialEq)]
pub struct MsfPartition {
    pub delta_l: f64,
    pub delta_r: f64,
    pub psi_plus: Vec<u32>,
    pub psi_minus: Vec<u32>,
}

/// Un-normalized tilting measures `f(y; j)` sampled on the quadrature
/// tables, as used by the whole-code 1961 Gallager bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltingFamily {
    r: f64,
    s: f64,
    ys: Vec<Vec<f64>>,
    log_w: Vec<Vec<f64>>,
    log_f: Vec<Vec<f64>>,
}

impl TiltingFamily {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `rho` implied by the pair `(r, s)` through `r = s (1 - 1/rho)`.
    pub fn rho(&self) -> f64 {
        self.s / (self.s - self.r)
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Output points of channel `j` at which the measure is sampled.
    pub fn outputs(&self, j: usize) -> &[f64] {
        &self.ys[j]
    }

    /// Natural log of the measure on channel `j` (arbitrary scale; every
    /// consumer is invariant to a per-family constant factor).
    pub fn log_f(&self, j: usize) -> &[f64] {
        &self.log_f[j]
    }
}

/// Code description accepted by [`error_bound`].
#[derive(Debug, Clone, Copy)]
pub enum BoundInput<'a> {
    Spectrum(&'a DistanceSpectrum),
    Iowe(&'a Iowe),
}

impl<'a> From<&'a DistanceSpectrum> for BoundInput<'a> {
    fn from(s: &'a DistanceSpectrum) -> Self {
        BoundInput::Spectrum(s)
    }
}

impl<'a> From<&'a Iowe> for BoundInput<'a> {
    fn from(io: &'a Iowe) -> Self {
        BoundInput::Iowe(io)
    }
}

impl BoundInput<'_> {
    fn to_spectrum(self) -> DistanceSpectrum {
        match self {
            BoundInput::Spectrum(s) => s.clone(),
            BoundInput::Iowe(io) => io.to_spectrum(),
        }
    }
}

/// Evaluation settings shared by the bound families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    /// Subcodes whose exact union term is below this probability are kept
    /// at the union term instead of being optimised. `None` picks `1e-10`
    /// for block targets and `1e-6 / n` for bit targets.
    pub threshold: Option<f64>,
    /// Grid points per dimension of the coarse parameter scan.
    pub coarse: usize,
    /// Refinement rounds around the incumbent (grid shrinks 4x per round).
    pub refine_rounds: usize,
    /// Half width of the warm-start window around the previous subcode's
    /// optimum, in parameter units.
    pub warm_window: f64,
    /// Drop subcodes of normalized weight above `1 - R` (valid for every
    /// code of the ensemble after expurgating a vanishing fraction).
    pub expurgate: bool,
    /// Quadrature panels per unit output for continuous channels.
    pub nodes_per_unit: usize,
    /// Variant used by `BoundKind::Sf`.
    pub sf_variant: SfVariant,
    /// Whether `BoundKind::Msf` searches the left partition endpoint.
    pub msf_finite_length: bool,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            threshold: None,
            coarse: 13,
            refine_rounds: 4,
            warm_window: 0.1,
            expurgate: false,
            nodes_per_unit: 12,
            sf_variant: SfVariant::Gallager,
            msf_finite_length: true,
        }
    }
}

// ---------------------------------------------------------------------------
// small helpers

/// `a * b` with the convention `0 * (+/-inf) = 0` (exponent of an absent
/// factor).
#[inline]
pub(crate) fn xmul(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Streaming log-sum-exp that propagates `+inf` (a diverging integral) and
/// never produces NaN from `-inf` terms.
pub(crate) struct StreamLse {
    m: f64,
    s: f64,
    pos_inf: bool,
}

impl StreamLse {
    pub(crate) fn new() -> Self {
        StreamLse { m: LOG_ZERO, s: 0.0, pos_inf: false }
    }

    #[inline]
    pub(crate) fn push(&mut self, v: f64) {
        debug_assert!(!v.is_nan(), "NaN pushed into log accumulator");
        if v == f64::INFINITY {
            self.pos_inf = true;
        } else if v > LOG_ZERO {
            if v <= self.m {
                self.s += (v - self.m).exp();
            } else {
                self.s = self.s * (self.m - v).exp() + 1.0;
                self.m = v;
            }
        }
    }

    pub(crate) fn total(&self) -> f64 {
        if self.pos_inf {
            f64::INFINITY
        } else if self.s == 0.0 {
            LOG_ZERO
        } else {
            self.m + self.s.ln()
        }
    }
}

// ---------------------------------------------------------------------------
// channel tables

pub(crate) struct ChannelTable {
    log_w: Vec<f64>,
    lp0: Vec<f64>,
    lp1: Vec<f64>,
    ys: Vec<f64>,
    /// `lp1 - lp0` per node (log likelihood ratio towards the one-signal).
    ldiff: Vec<f64>,
    /// `exp(log_w + lp0)` per node; strictly positive on continuous tables.
    w0: Vec<f64>,
    /// Every node has positive density under both signals (Gaussian case),
    /// enabling linear-domain accumulation.
    dense: bool,
    /// Gaussian signal offset (`0` for discrete alphabets).
    m: f64,
    /// Largest admissible tilted-peak displacement (`inf` for discrete).
    shift_limit: f64,
}

impl ChannelTable {
    fn len(&self) -> usize {
        self.ys.len()
    }
}

pub(crate) struct Tables {
    pub(crate) tabs: Vec<ChannelTable>,
    pub(crate) log_alpha: Vec<f64>,
    pub(crate) log_gamma_bar: f64,
    all_awgn: bool,
    nus: Vec<f64>,
}

impl Tables {
    pub(crate) fn len(&self) -> usize {
        self.tabs.len()
    }
}

pub(crate) fn build_tables(set: &ParallelChannelSet, nodes_per_unit: usize) -> Tables {
    let mut tabs = Vec::with_capacity(set.len());
    let mut log_alpha = Vec::with_capacity(set.len());
    let mut gbar = StreamLse::new();
    let mut all_awgn = true;
    let mut nus = Vec::with_capacity(set.len());
    for (alpha, ch) in set.iter() {
        let (ys, log_w, m, shift_limit) = match ch.output_support() {
            OutputSupport::Discrete { points } => {
                let w = vec![0.0; points.len()];
                (points, w, 0.0, f64::INFINITY)
            }
            OutputSupport::Continuous { .. } => {
                let m = match *ch {
                    MbiosChannel::Biawgn { nu } => (2.0 * nu).sqrt(),
                    _ => unreachable!("only the Gaussian channel is continuous"),
                };
                let half_width = TABLE_WIDTH_FACTOR * m + TABLE_MARGIN;
                let quad = Quadrature::composite_symmetric(half_width, nodes_per_unit);
                let ys = quad.nodes().to_vec();
                let log_w: Vec<f64> = quad.weights().iter().map(|&w| w.ln()).collect();
                debug_assert!((ys[0] + ys[ys.len() - 1]).abs() < 1e-12);
                (ys, log_w, m, half_width - GUARD_MARGIN)
            }
        };
        let lp0: Vec<f64> = ys.iter().map(|&y| ch.log_p_zero(y)).collect();
        let lp1: Vec<f64> = ys.iter().map(|&y| ch.log_p_one(y)).collect();
        let ldiff: Vec<f64> = lp0.iter().zip(&lp1).map(|(&a, &b)| b - a).collect();
        let w0: Vec<f64> = lp0.iter().zip(&log_w).map(|(&p, &w)| (p + w).exp()).collect();
        let dense = lp0.iter().chain(&lp1).all(|&p| p > LOG_ZERO);
        gbar.push(alpha.ln() + ch.bhattacharyya().ln());
        match *ch {
            MbiosChannel::Biawgn { nu } => nus.push(nu),
            _ => {
                all_awgn = false;
                nus.push(0.0);
            }
        }
        log_alpha.push(alpha.ln());
        tabs.push(ChannelTable { log_w, lp0, lp1, ys, ldiff, w0, dense, m, shift_limit });
    }
    Tables { tabs, log_alpha, log_gamma_bar: gbar.total(), all_awgn, nus }
}

// ---------------------------------------------------------------------------
// DS2 bound

/// Per-channel log integrals of the DS2 tilting measure `g = (1 + k u)^rho`
/// with `u = (p1/p0)^lambda`:
///
///   C = sum p0 u (1 + k u)^(rho - 1)      (wrong-bit positions)
///   E = sum p0 (1 + k u)^(rho - 1)        (right-bit positions)
///   D = sum p0 (1 + k u)^rho              (normalizer; beta = 1/D)
///
/// Nodes with `p0 = 0` are resolved through the exact limit `g -> (k u)^rho`
/// so that erasure-style atoms yield `+inf` (a genuinely divergent moment)
/// instead of NaN.
fn ds2_integrals_log(t: &ChannelTable, lambda: f64, rho: f64, ln_k: f64) -> (f64, f64, f64) {
    let mut c = StreamLse::new();
    let mut e = StreamLse::new();
    let mut d = StreamLse::new();
    for i in 0..t.len() {
        let (lp0, lp1, lw) = (t.lp0[i], t.lp1[i], t.log_w[i]);
        if lp0 > LOG_ZERO {
            let lu = xmul(lambda, lp1 - lp0);
            let lt = if ln_k == LOG_ZERO || lu == LOG_ZERO {
                0.0
            } else {
                ln_1p_exp(ln_k + lu)
            };
            c.push(lw + lp0 + lu + xmul(rho - 1.0, lt));
            e.push(lw + lp0 + xmul(rho - 1.0, lt));
            d.push(lw + lp0 + xmul(rho, lt));
        } else if lp1 > LOG_ZERO {
            // p0 = 0, p1 > 0: only the k u branch of g survives.
            if ln_k == LOG_ZERO {
                // g = 1 exactly; contribution p0^(1-lambda) p1^lambda.
                if lambda > 1.0 {
                    c.push(f64::INFINITY);
                } else if lambda == 1.0 {
                    c.push(lw + lp1);
                }
            } else {
                let coef = 1.0 - lambda * rho;
                if coef < 0.0 {
                    c.push(f64::INFINITY);
                    d.push(f64::INFINITY);
                } else if coef == 0.0 {
                    c.push(lw + lp1 + (rho - 1.0) * ln_k);
                    d.push(lw + lp1 + rho * ln_k);
                }
            }
        }
    }
    (c.total(), e.total(), d.total())
}

/// Same integrals accumulated in the linear domain; valid on dense tables
/// where `t = 1 + k u >= 1` keeps every accumulator in `(0, D]` with
/// `C <= sum p0^(1-lambda) p1^lambda` finite inside the feasibility guard.
/// Falls back to the log path on any overflow (extreme tilt corners).
fn ds2_integrals(t: &ChannelTable, lambda: f64, rho: f64, k: f64) -> (f64, f64, f64) {
    if !t.dense || !k.is_finite() {
        return ds2_integrals_log(t, lambda, rho, k.ln());
    }
    let (mut c, mut e, mut d) = (0.0f64, 0.0f64, 0.0f64);
    let rm1 = rho - 1.0;
    for i in 0..t.len() {
        let u = (lambda * t.ldiff[i]).exp();
        let tt = 1.0 + k * u;
        if !tt.is_finite() {
            return ds2_integrals_log(t, lambda, rho, k.ln());
        }
        let tp = if tt == 1.0 { 1.0 } else { tt.powf(rm1) };
        let w0 = t.w0[i];
        c += w0 * u * tp;
        e += w0 * tp;
        d += w0 * (tp * tt);
    }
    if c.is_finite() && d.is_finite() && c > 0.0 {
        (c.ln(), e.ln(), d.ln())
    } else {
        ds2_integrals_log(t, lambda, rho, k.ln())
    }
}

/// True when every tilted integrand at `(lambda, ...)` peaks safely inside
/// the quadrature tables.
pub(crate) fn ds2_shift_ok(tables: &Tables, lambda: f64) -> bool {
    tables.tabs.iter().all(|t| 2.0 * lambda * t.m <= t.shift_limit)
}

pub(crate) struct TiltingState {
    pub(crate) k: f64,
    pub(crate) ln_betas: Vec<f64>,
    pub(crate) ln_c: Vec<f64>,
    pub(crate) ln_e: Vec<f64>,
}

/// One pass of the alternating tilting update: normalizers from the current
/// `k`, then the weight-balance value of `k` from the new normalizers.
fn tilting_pass(tables: &Tables, delta: f64, lambda: f64, rho: f64, k: f64) -> TiltingState {
    let j = tables.len();
    let mut ln_c = Vec::with_capacity(j);
    let mut ln_e = Vec::with_capacity(j);
    let mut ln_betas = Vec::with_capacity(j);
    for t in &tables.tabs {
        let (c, e, d) = ds2_integrals(t, lambda, rho, k);
        ln_c.push(c);
        ln_e.push(e);
        ln_betas.push(-d);
    }
    let mut num = StreamLse::new();
    let mut den = StreamLse::new();
    for idx in 0..j {
        let w = tables.log_alpha[idx] + xmul(1.0 - 1.0 / rho, ln_betas[idx]);
        num.push(w + ln_e[idx]);
        den.push(w + ln_c[idx]);
    }
    let ln_next = (delta / (1.0 - delta)).ln() + num.total() - den.total();
    TiltingState { k: ln_next.exp(), ln_betas, ln_c, ln_e }
}

/// Solve the coupled tilting equations: the normalizers are explicit in
/// `k`, so the problem reduces to the scalar balance residual
/// `F(k) = rhs(k) - k` with `F(0) > 0` and `F` eventually negative. A
/// bracketed secant iteration (Illinois damping) finds the root; `hint`
/// warm-starts the bracket from a nearby solve.
pub(crate) fn tilting_solve(
    tables: &Tables,
    delta: f64,
    lambda: f64,
    rho: f64,
    hint: Option<f64>,
) -> Option<TiltingState> {
    if delta <= 0.0 {
        let state = tilting_pass(tables, 1e-12, lambda, rho, 0.0);
        return Some(TiltingState { k: 0.0, ..state });
    }
    let residual = |k: f64| -> f64 {
        let state = tilting_pass(tables, delta, lambda, rho, k);
        state.k - k
    };
    let finish = |k: f64| -> Option<TiltingState> {
        let state = tilting_pass(tables, delta, lambda, rho, k);
        if state.ln_betas.iter().all(|b| b.is_finite()) {
            Some(TiltingState { k, ..state })
        } else {
            None
        }
    };
    let r0 = residual(0.0);
    if !r0.is_finite() || r0 <= 0.0 {
        // rhs(0) = delta / ((1 - delta) gamma_bar(lambda)) should be
        // positive; a non-finite value means a divergent moment.
        return if r0 == 0.0 { finish(0.0) } else { None };
    }
    let (mut lo, mut flo) = (0.0f64, r0);
    let mut hi = match hint {
        Some(h) if h.is_finite() && h > 0.0 => h,
        _ => r0.max(1e-6),
    };
    let mut fhi = residual(hi);
    let mut grew = 0;
    while fhi > 0.0 {
        lo = hi;
        flo = fhi;
        hi *= 4.0;
        fhi = residual(hi);
        grew += 1;
        if grew > 200 || !fhi.is_finite() {
            return None;
        }
    }
    let mut k = hi;
    let mut side = 0i8;
    for _ in 0..TILT_MAX_ITER {
        let mut mid = hi - fhi * (hi - lo) / (fhi - flo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let fmid = residual(mid);
        if !fmid.is_finite() {
            return None;
        }
        k = mid;
        if fmid > 0.0 {
            lo = mid;
            flo = fmid;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            fhi = fmid;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        }
        if hi - lo < TILT_TOL * k.max(1.0) || fmid.abs() < TILT_TOL * k.max(1.0) {
            return finish(k);
        }
    }
    finish(k)
}

/// Optimised tilting measure at normalized weight `delta` for fixed
/// `(lambda, rho)`. The normalizers make every implied per-channel measure
/// integrate to one.
pub fn ds2_tilting_solve(
    delta: f64,
    lambda: f64,
    rho: f64,
    set: &ParallelChannelSet,
) -> Result<TiltingSolution, BoundsError> {
    if !(0.0..1.0).contains(&delta) {
        return Err(BoundsError::InvalidParameter("delta must lie in [0, 1)"));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(BoundsError::InvalidParameter("lambda must be finite and >= 0"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(BoundsError::InvalidParameter("rho must lie in (0, 1]"));
    }
    let tables = build_tables(set, BoundConfig::default().nodes_per_unit);
    if delta == 0.0 {
        return Ok(TiltingSolution { lambda, rho, k: 0.0, betas: vec![1.0; set.len()] });
    }
    let state =
        tilting_solve(&tables, delta, lambda, rho, None).ok_or(BoundsError::NoConvergence)?;
    Ok(TiltingSolution {
        lambda,
        rho,
        k: state.k.max(0.0),
        betas: state.ln_betas.iter().map(|&b| b.exp()).collect(),
    })
}

/// Per-subcode DS2 value at fixed `(lambda, rho)`, `+inf` when infeasible.
fn ds2_value(
    tables: &Tables,
    log_ah: f64,
    h: u32,
    n: u32,
    lambda: f64,
    rho: f64,
    hint: Option<f64>,
) -> (f64, f64) {
    if !ds2_shift_ok(tables, lambda) {
        return (f64::INFINITY, 0.0);
    }
    let delta = h as f64 / n as f64;
    let state = match tilting_solve(tables, delta, lambda, rho, hint) {
        Some(s) => s,
        None => return (f64::INFINITY, 0.0),
    };
    let mut t1 = StreamLse::new();
    let mut t2 = StreamLse::new();
    for j in 0..tables.len() {
        let w = tables.log_alpha[j] + xmul(1.0 - 1.0 / rho, state.ln_betas[j]);
        t1.push(w + state.ln_c[j]);
        t2.push(w + state.ln_e[j]);
    }
    let value = rho * log_ah + rho * (h as f64 * t1.total() + (n - h) as f64 * t2.total());
    if value.is_nan() {
        (f64::INFINITY, state.k)
    } else {
        (value, state.k)
    }
}

/// Windowed grid minimiser shared by the per-subcode optimisers. Keeps the
/// previous optimum as a warm start; a window argmin that lands on a window
/// edge which is not also a box edge triggers a full-box rerun, which keeps
/// warm chains consistent with cold evaluation.
pub(crate) struct WarmChain {
    bounds: Vec<(f64, f64)>,
    counts_full: Vec<usize>,
    refine: usize,
    window: f64,
    prev: Option<Vec<f64>>,
}

impl WarmChain {
    pub(crate) fn new(bounds: Vec<(f64, f64)>, counts_full: Vec<usize>, window: f64, refine: usize) -> Self {
        WarmChain { bounds, counts_full, refine, window, prev: None }
    }

    /// Minimise `obj` (which returns `+inf` when infeasible); `None` when no
    /// grid point is feasible.
    pub(crate) fn minimize(&mut self, mut obj: impl FnMut(&[f64]) -> f64) -> Option<(Vec<f64>, f64)> {
        let full = |obj: &mut dyn FnMut(&[f64]) -> f64, me: &Self| {
            maximize_box_dims(|p| -obj(p), &me.bounds, &me.counts_full, me.refine).ok()
        };
        let result = match &self.prev {
            Some(center) => {
                let win: Vec<(f64, f64)> = center
                    .iter()
                    .zip(&self.bounds)
                    .map(|(&c, &(lo, hi))| ((c - self.window).max(lo), (c + self.window).min(hi)))
                    .collect();
                let counts = vec![WINDOW_COARSE; win.len()];
                match maximize_box_dims(|p| -obj(p), &win, &counts, self.refine) {
                    Ok(r) => {
                        let on_inner_edge = r.argmax.iter().zip(&win).zip(&self.bounds).any(
                            |((&x, &(wlo, whi)), &(blo, bhi))| {
                                ((x - wlo).abs() < EDGE_EPS && (wlo - blo).abs() > EDGE_EPS)
                                    || ((whi - x).abs() < EDGE_EPS && (bhi - whi).abs() > EDGE_EPS)
                            },
                        );
                        if on_inner_edge {
                            full(&mut obj, self)
                        } else {
                            Some(r)
                        }
                    }
                    Err(NumericsError::NonFinite) => full(&mut obj, self),
                    Err(_) => None,
                }
            }
            None => full(&mut obj, self),
        }?;
        self.prev = Some(result.argmax.clone());
        Some((result.argmax, -result.max))
    }
}

fn ds2_chain(config: &BoundConfig) -> WarmChain {
    WarmChain::new(
        vec![(0.0, LAMBDA_PRIME_MAX), (RHO_MIN, 1.0)],
        vec![config.coarse, config.coarse],
        config.warm_window,
        config.refine_rounds,
    )
}

/// One optimised DS2 subcode term; returns the minimum of the grid search
/// and the exact Bhattacharyya endpoint `(lambda, rho) = (1/2, 1)`.
fn ds2_subcode_core(
    tables: &Tables,
    chain: &mut WarmChain,
    log_ah: f64,
    h: u32,
    n: u32,
) -> (f64, OptParams) {
    let mut last_k = None;
    let grid = chain.minimize(|p| {
        let lambda = p[0] / (1.0 - p[0]);
        let (value, k) = ds2_value(tables, log_ah, h, n, lambda, p[1], last_k);
        if value.is_finite() && k > 0.0 {
            last_k = Some(k);
        }
        value
    });
    let bhat = log_ah + h as f64 * tables.log_gamma_bar;
    let delta = h as f64 / n as f64;
    let bhat_k = delta / (1.0 - delta) / tables.log_gamma_bar.exp();
    match grid {
        Some((argmin, value)) if value <= bhat => {
            let lambda = argmin[0] / (1.0 - argmin[0]);
            let rho = argmin[1];
            let k = ds2_value(tables, log_ah, h, n, lambda, rho, last_k).1;
            (value, OptParams::Ds2 { lambda, rho, k })
        }
        _ => (bhat, OptParams::Ds2 { lambda: 0.5, rho: 1.0, k: bhat_k }),
    }
}

/// Tightest DS2 bound on one constant-weight subcode, minimised over the
/// tilting parameters. Returns the log bound and the optimising
/// `(lambda, rho)`.
pub fn ds2_subcode_bound(
    log_ah: f64,
    h: u32,
    n: u32,
    set: &ParallelChannelSet,
) -> Result<(f64, f64, f64), BoundsError> {
    if h == 0 || h > n {
        return Err(BoundsError::InvalidParameter("subcode weight must lie in 1..=n"));
    }
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let mut chain = ds2_chain(&config);
    let (value, params) = ds2_subcode_core(&tables, &mut chain, log_ah, h, n);
    match params {
        OptParams::Ds2 { lambda, rho, .. } => Ok((value, lambda, rho)),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// 1961 Gallager bound

/// Per-channel log integrals of the 1961 Gallager bound with the optimal
/// connection `r = s (1 - 1/rho)` and the two-parameter stationary measure
/// `f = [((1-c) (p0^a - p1^a)^2 + 2 c (p0 p1)^a) / (p0^(1-s) + p1^(1-s))]^(rho/s)`
/// where `a = (1 - r) / 2`:
///
///   Z  = sum (p0 p1)^a f^r                      (wrong-bit positions)
///   Gr = sum (p0^(1-r) + p1^(1-r)) / 2 * f^r    (right-bit positions)
///   Gs = sum (p0^(1-s) + p1^(1-s)) / 2 * f^s    (normalization moment)
///
/// `f^r = base^(rho - 1)` and `f^s = base^rho`, so nodes where the measure
/// vanishes make the negative-power moments diverge honestly to `+inf`.
pub(crate) fn gallager_integrals(t: &ChannelTable, rho: f64, s: f64, c: f64) -> Option<(f64, f64, f64)> {
    let r = s * (1.0 - 1.0 / rho);
    if (1.0 + 2.0 * r.abs()) * t.m > t.shift_limit {
        return None;
    }
    let a = 0.5 * (1.0 - r);
    let ln_1mc = (1.0 - c).ln();
    let ln_2c = LN_2 + c.ln();
    let mut z = StreamLse::new();
    let mut gr = StreamLse::new();
    let mut gs = StreamLse::new();
    for i in 0..t.len() {
        let (lp0, lp1, lw) = (t.lp0[i], t.lp1[i], t.log_w[i]);
        if lp0 == LOG_ZERO && lp1 == LOG_ZERO {
            continue;
        }
        let x0 = a * lp0;
        let x1 = a * lp1;
        let ln_sq = if x0 == x1 {
            LOG_ZERO
        } else {
            2.0 * log_sub(x0.max(x1), x0.min(x1))
        };
        let ln_num = log_add(ln_1mc + ln_sq, ln_2c + x0 + x1);
        let ln_den = log_add(xmul(1.0 - s, lp0), xmul(1.0 - s, lp1));
        let ln_base = ln_num - ln_den;
        if ln_base == LOG_ZERO {
            // f = 0 at a mass point: negative powers of f diverge unless the
            // accompanying density factor vanishes too.
            if lp0 > LOG_ZERO && lp1 > LOG_ZERO {
                z.push(f64::INFINITY);
            }
            gr.push(f64::INFINITY);
            continue;
        }
        z.push(lw + x0 + x1 + xmul(rho - 1.0, ln_base));
        gr.push(lw - LN_2 + log_add((1.0 - r) * lp0, (1.0 - r) * lp1) + xmul(rho - 1.0, ln_base));
        gs.push(
            lw - LN_2
                + log_add(xmul(1.0 - s, lp0), xmul(1.0 - s, lp1))
                + xmul(rho, ln_base),
        );
    }
    Some((z.total(), gr.total(), gs.total()))
}

/// Per-subcode 1961 Gallager value at fixed `(rho, s, c)`, `+inf` when
/// infeasible. `rho = 1` collapses to the Bhattacharyya union term.
fn gallager_value(tables: &Tables, log_ah: f64, h: u32, n: u32, rho: f64, s: f64, c: f64) -> f64 {
    if rho >= 1.0 - 1e-12 {
        return log_ah + h as f64 * tables.log_gamma_bar;
    }
    let mut zb = StreamLse::new();
    let mut grb = StreamLse::new();
    let mut gsb = StreamLse::new();
    for (j, t) in tables.tabs.iter().enumerate() {
        let (z, gr, gs) = match gallager_integrals(t, rho, s, c) {
            Some(v) => v,
            None => return f64::INFINITY,
        };
        zb.push(tables.log_alpha[j] + z);
        grb.push(tables.log_alpha[j] + gr);
        gsb.push(tables.log_alpha[j] + gs);
    }
    let value = bin_entropy(rho)
        + rho * log_ah
        + rho * (h as f64 * zb.total() + xmul((n - h) as f64, grb.total()))
        + xmul(n as f64 * (1.0 - rho), gsb.total());
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

fn gallager_chain(config: &BoundConfig) -> WarmChain {
    WarmChain::new(
        vec![(RHO_MIN, 1.0), (RHO_MIN, 1.0), (0.0, 1.0)],
        vec![config.coarse, config.coarse, config.coarse.min(9)],
        config.warm_window,
        config.refine_rounds,
    )
}

/// One optimised 1961 Gallager subcode term; the `rho = 1` endpoint (the
/// Bhattacharyya union term) is always a candidate.
fn gallager_subcode_core(
    tables: &Tables,
    chain: &mut WarmChain,
    log_ah: f64,
    h: u32,
    n: u32,
) -> (f64, OptParams) {
    let grid = chain.minimize(|p| gallager_value(tables, log_ah, h, n, p[0], p[1], p[2]));
    let bhat = log_ah + h as f64 * tables.log_gamma_bar;
    match grid {
        Some((argmin, value)) if value <= bhat => {
            (value, OptParams::Gallager { rho: argmin[0], s: argmin[1], c: argmin[2] })
        }
        _ => (bhat, OptParams::Gallager { rho: 1.0, s: 1.0, c: 0.0 }),
    }
}

/// Tightest 1961 Gallager bound on one constant-weight subcode. Returns the
/// log bound and the optimising `(rho, s, c)`.
pub fn gallager_subcode_bound(
    log_ah: f64,
    h: u32,
    n: u32,
    set: &ParallelChannelSet,
) -> Result<(f64, f64, f64, f64), BoundsError> {
    if h == 0 || h > n {
        return Err(BoundsError::InvalidParameter("subcode weight must lie in 1..=n"));
    }
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let mut chain = gallager_chain(&config);
    let (value, params) = gallager_subcode_core(&tables, &mut chain, log_ah, h, n);
    match params {
        OptParams::Gallager { rho, s, c } => Ok((value, rho, s, c)),
        _ => unreachable!(),
    }
}

/// The tilting family that makes the whole-code 1961 Gallager bound
/// reproduce the random-coding exponent: per channel
/// `f = [(p0^(1-r)/2 + p1^(1-r)/2)^2 / (p0^(1-s) + p1^(1-s))]^(1/(s-r))`
/// (up to an arbitrary constant factor, which all consumers cancel).
pub fn gallager_random_tilting(
    set: &ParallelChannelSet,
    r: f64,
    s: f64,
) -> Result<TiltingFamily, BoundsError> {
    if !(r <= 0.0 && s > 0.0 && s <= 1.0) {
        return Err(BoundsError::InvalidParameter("need r <= 0 and 0 < s <= 1"));
    }
    let tables = build_tables(set, BoundConfig::default().nodes_per_unit);
    let a = 0.5 * (1.0 - r);
    let inv = 1.0 / (s - r);
    let mut ys = Vec::with_capacity(tables.len());
    let mut log_w = Vec::with_capacity(tables.len());
    let mut log_f = Vec::with_capacity(tables.len());
    for t in &tables.tabs {
        let f: Vec<f64> = (0..t.len())
            .map(|i| {
                let num = 2.0 * log_add(a * t.lp0[i], a * t.lp1[i]);
                let den = log_add(xmul(1.0 - s, t.lp0[i]), xmul(1.0 - s, t.lp1[i]));
                inv * (num - den)
            })
            .collect();
        ys.push(t.ys.clone());
        log_w.push(t.log_w.clone());
        log_f.push(f);
    }
    Ok(TiltingFamily { r, s, ys, log_w, log_f })
}

/// Whole-code 1961 Gallager bound evaluated with an explicit tilting family;
/// `rho` is implied by the family's `(r, s)`. Uses the literal channel
/// moments, so the family need not be symmetric.
pub fn gallager_whole_code_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
    family: &TiltingFamily,
) -> Result<f64, BoundsError> {
    if family.len() != set.len() {
        return Err(BoundsError::InvalidParameter("family and channel set sizes differ"));
    }
    let rho = family.rho();
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(BoundsError::InvalidParameter("family implies rho outside (0, 1]"));
    }
    let n = spectrum.n();
    let mut zb = StreamLse::new();
    let mut grb = StreamLse::new();
    let mut gsb = StreamLse::new();
    for (j, (alpha, ch)) in set.iter().enumerate() {
        let la = alpha.ln();
        let mut z = StreamLse::new();
        let mut gr = StreamLse::new();
        let mut gs = StreamLse::new();
        for (i, &y) in family.ys[j].iter().enumerate() {
            let lw = family.log_w[j][i];
            let lf = family.log_f[j][i];
            let lp0 = ch.log_p_zero(y);
            let lp1 = ch.log_p_one(y);
            let a = 0.5 * (1.0 - family.r);
            if lp0 > LOG_ZERO || lp1 > LOG_ZERO {
                z.push(lw + a * (lp0 + lp1) + xmul(family.r, lf));
                gr.push(lw + xmul(1.0 - family.r, lp0) + xmul(family.r, lf));
                gs.push(lw + xmul(1.0 - family.s, lp0) + xmul(family.s, lf));
            }
        }
        zb.push(la + z.total());
        grb.push(la + gr.total());
        gsb.push(la + gs.total());
    }
    let mut sum = StreamLse::new();
    for h in 1..=n {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            sum.push(la + h as f64 * zb.total() + (n - h) as f64 * grb.total());
        }
    }
    Ok(bin_entropy(rho) + rho * sum.total() + xmul(n as f64 * (1.0 - rho), gsb.total()))
}

// ---------------------------------------------------------------------------
// union bounds

/// Cached Craig-identity quadrature: `ln m(theta) = ln sum_j alpha_j
/// exp(-nu_j / sin^2 theta)` on a Gauss-Legendre grid over `(0, pi/2)`.
struct CraigMix {
    ln_w: Vec<f64>,
    ln_mix: Vec<f64>,
}

impl CraigMix {
    fn new(tables: &Tables) -> Option<CraigMix> {
        if !tables.all_awgn {
            return None;
        }
        let quad = Quadrature::gauss_legendre(CRAIG_NODES);
        let mut ln_w = Vec::with_capacity(CRAIG_NODES);
        let mut ln_mix = Vec::with_capacity(CRAIG_NODES);
        for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
            let theta = 0.5 * FRAC_PI_2 * (x + 1.0);
            let sin2 = theta.sin() * theta.sin();
            let mut mix = StreamLse::new();
            for (j, &nu) in tables.nus.iter().enumerate() {
                mix.push(tables.log_alpha[j] - nu / sin2);
            }
            ln_w.push((w * 0.5 * FRAC_PI_2).ln());
            ln_mix.push(mix.total());
        }
        Some(CraigMix { ln_w, ln_mix })
    }

    /// Exact union term of one subcode: the assignment-averaged pairwise
    /// error probability times the subcode multiplicity.
    fn term(&self, log_ah: f64, h: u32) -> f64 {
        let mut acc = StreamLse::new();
        for i in 0..self.ln_w.len() {
            acc.push(self.ln_w[i] + h as f64 * self.ln_mix[i]);
        }
        log_ah + acc.total() - PI.ln()
    }
}

/// Exact union bound for Gaussian channel sets: the pairwise error
/// probability is a finite integral by Craig's identity, and averaging over
/// the random assignment turns it into a mixture power.
pub fn union_bound_q(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
) -> Result<BoundResult, BoundsError> {
    let tables = build_tables(set, BoundConfig::default().nodes_per_unit);
    let craig = CraigMix::new(&tables)
        .ok_or(BoundsError::UnsupportedChannel("exact union bound needs Gaussian channels"))?;
    let mut terms = Vec::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            terms.push(SubcodeTerm {
                h,
                log_contribution: craig.term(la, h),
                params: OptParams::None,
            });
        }
    }
    Ok(assemble_result(BoundKind::UnionQ, terms, 0))
}

/// Bhattacharyya union bound `sum_h A_h gamma_bar^h`, valid for any MBIOS
/// set.
pub fn union_bhattacharyya(spectrum: &DistanceSpectrum, set: &ParallelChannelSet) -> BoundResult {
    let tables = build_tables(set, BoundConfig::default().nodes_per_unit);
    let mut terms = Vec::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            terms.push(SubcodeTerm {
                h,
                log_contribution: la + h as f64 * tables.log_gamma_bar,
                params: OptParams::None,
            });
        }
    }
    assemble_result(BoundKind::Ub, terms, 0)
}

// ---------------------------------------------------------------------------
// sphere bound

/// Whole-code sphere bound value at `(rho, beta)`; requires `beta rho < 1`
/// except at the `rho = 1, beta = 1` corner, where it equals the
/// Bhattacharyya union bound.
fn sphere_value(tables: &Tables, spectrum: &DistanceSpectrum, rho: f64, beta: f64) -> f64 {
    let n = spectrum.n() as f64;
    let tail_coef = 0.5 * n * (1.0 - rho);
    let tail = if tail_coef == 0.0 {
        0.0
    } else {
        if 1.0 - beta * rho <= 0.0 {
            return f64::INFINITY;
        }
        tail_coef * ((1.0 - rho).ln() - (1.0 - beta * rho).ln())
    };
    let mut mix = StreamLse::new();
    for (j, &nu) in tables.nus.iter().enumerate() {
        mix.push(tables.log_alpha[j] - beta * nu);
    }
    let ln_mix = mix.total();
    let mut sum = StreamLse::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            sum.push(la + h as f64 * ln_mix);
        }
    }
    let value = rho * (sum.total() - 0.5 * n * beta.ln()) + tail;
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

fn sphere_core(
    tables: &Tables,
    spectrum: &DistanceSpectrum,
    config: &BoundConfig,
) -> Result<BoundResult, BoundsError> {
    if !tables.all_awgn {
        return Err(BoundsError::UnsupportedChannel("sphere bound needs Gaussian channels"));
    }
    // Search over (rho, b) with beta = 1 + b (1/rho - 1), which maps the
    // feasible wedge 1 <= beta <= 1/rho onto the unit square.
    let obj = |p: &[f64]| -> f64 {
        let rho = p[0];
        let beta = 1.0 + p[1] * (1.0 / rho - 1.0);
        sphere_value(tables, spectrum, rho, beta)
    };
    let grid = maximize_box_dims(
        |p| -obj(p),
        &[(RHO_MIN, 1.0), (0.0, 1.0)],
        &[config.coarse.max(17), config.coarse.max(17)],
        config.refine_rounds,
    )
    .ok();
    let corner = sphere_value(tables, spectrum, 1.0, 1.0);
    let (value, rho, beta) = match grid {
        Some(r) if -r.max <= corner => {
            let rho = r.argmax[0];
            (-r.max, rho, 1.0 + r.argmax[1] * (1.0 / rho - 1.0))
        }
        _ => (corner, 1.0, 1.0),
    };
    // Attribute the coupled total to subcodes by the inner-sum shares.
    let mut mix = StreamLse::new();
    for (j, &nu) in tables.nus.iter().enumerate() {
        mix.push(tables.log_alpha[j] - beta * nu);
    }
    let ln_mix = mix.total();
    let mut inner = StreamLse::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            inner.push(la + h as f64 * ln_mix);
        }
    }
    let inner_total = inner.total();
    let mut terms = Vec::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            terms.push(SubcodeTerm {
                h,
                log_contribution: value + (la + h as f64 * ln_mix - inner_total),
                params: OptParams::Sphere { rho, beta },
            });
        }
    }
    Ok(assemble_result(BoundKind::Sphere, terms, 0))
}

/// Sphere bound for Gaussian channel sets, optimised over its two
/// parameters; never worse than the Bhattacharyya union bound.
pub fn sphere_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
) -> Result<BoundResult, BoundsError> {
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    sphere_core(&tables, spectrum, &config)
}

// ---------------------------------------------------------------------------
// Shulman-Feder bound

/// Worst log ratio of the spectrum to the binomial spectrum of a random
/// code with the same rate, and the weight attaining it.
fn sf_ratio_range(log_a: &[f64], n: u32, k: u32, h_lo: u32, h_hi: u32) -> Option<(f64, u32)> {
    let nk_ln2 = (n - k) as f64 * LN_2;
    let mut best: Option<(f64, u32)> = None;
    for h in h_lo..=h_hi {
        let la = log_a[h as usize];
        if la > LOG_ZERO {
            let v = la - (log_binomial(n as u64, h as i64) - nk_ln2);
            if best.map_or(true, |(b, _)| v > b) {
                best = Some((v, h));
            }
        }
    }
    best
}

/// Per-channel Gallager random-coding moment `ln sum_y (p0^b / 2 + p1^b /
/// 2)^(1+rho)` with `b = 1 / (1 + rho)`.
pub(crate) fn sf_channel_moment(t: &ChannelTable, rho: f64) -> f64 {
    let b = 1.0 / (1.0 + rho);
    let mut acc = StreamLse::new();
    for i in 0..t.len() {
        if t.lp0[i] == LOG_ZERO && t.lp1[i] == LOG_ZERO {
            continue;
        }
        acc.push(t.log_w[i] + (1.0 + rho) * (log_add(b * t.lp0[i], b * t.lp1[i]) - LN_2));
    }
    acc.total()
}

/// Shulman-Feder value at fixed `rho`.
fn sf_value(tables: &Tables, n: u32, k: u32, ln_ratio: f64, rho: f64, variant: SfVariant) -> f64 {
    let rate_term = k as f64 * rho * LN_2 + rho * ln_ratio;
    match variant {
        SfVariant::Gallager => {
            let mut w = StreamLse::new();
            for (j, t) in tables.tabs.iter().enumerate() {
                w.push(tables.log_alpha[j] + sf_channel_moment(t, rho));
            }
            bin_entropy(rho) + rate_term + n as f64 * w.total()
        }
        SfVariant::Ds2 => {
            let mut w = StreamLse::new();
            for (j, t) in tables.tabs.iter().enumerate() {
                w.push(tables.log_alpha[j] + sf_channel_moment(t, rho) / rho);
            }
            rate_term + n as f64 * rho * w.total()
        }
    }
}

fn sf_minimize(
    tables: &Tables,
    n: u32,
    k: u32,
    ln_ratio: f64,
    variant: SfVariant,
    config: &BoundConfig,
) -> (f64, f64) {
    let r = maximize_box_dims(
        |p| -sf_value(tables, n, k, ln_ratio, p[0], variant),
        &[(RHO_MIN, 1.0)],
        &[65],
        config.refine_rounds,
    )
    .expect("Shulman-Feder objective is finite");
    (-r.max, r.argmax[0])
}

/// Shulman-Feder bound: the spectrum enters only through its worst ratio to
/// the binomial, paired with the random-coding channel moments.
pub fn sf_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
    variant: SfVariant,
) -> Result<BoundResult, BoundsError> {
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let n = spectrum.n();
    let (ln_ratio, h_star) = match sf_ratio_range(spectrum.log_a_slice(), n, spectrum.k(), 1, n) {
        Some(v) => v,
        None => return Ok(assemble_result(BoundKind::Sf, Vec::new(), 0)),
    };
    let (value, rho) = sf_minimize(&tables, n, spectrum.k(), ln_ratio, variant, &config);
    let terms = vec![SubcodeTerm {
        h: h_star,
        log_contribution: value,
        params: OptParams::Sf { rho },
    }];
    Ok(assemble_result(BoundKind::Sf, terms, 0))
}

// ---------------------------------------------------------------------------
// modified Shulman-Feder bound

struct MsfOutcome {
    result: BoundResult,
    partition: MsfPartition,
}

fn msf_core(
    tables: &Tables,
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
    finite_length: bool,
    config: &BoundConfig,
) -> MsfOutcome {
    let n = spectrum.n();
    let k = spectrum.k();
    let craig = CraigMix::new(tables);
    let union_term = |h: u32| -> f64 {
        let la = spectrum.log_a(h);
        match &craig {
            Some(c) => c.term(la, h),
            None => la + h as f64 * tables.log_gamma_bar,
        }
    };
    // A weight class stays in the union part when the Bhattacharyya decay
    // beats the binomial growth left over at the set's mutual information.
    let ibar_bits = set.avg_mutual_info();
    let keeps_union = |h: u32| -> bool {
        let delta = h as f64 / n as f64;
        -delta * tables.log_gamma_bar >= bin_entropy(delta) + (ibar_bits - 1.0) * LN_2
    };
    let fails: Vec<u32> = (1..=n).filter(|&h| !keeps_union(h)).collect();
    // Union terms are fixed per weight and the channel moments depend only
    // on rho, so both are cached across the partition search.
    let union_terms: Vec<f64> = (0..=n)
        .map(|h| if h > 0 && spectrum.log_a(h) > LOG_ZERO { union_term(h) } else { LOG_ZERO })
        .collect();
    let mut moment_cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut build = |h_lo: u32, h_hi: u32| -> (f64, Vec<SubcodeTerm>) {
        let mut terms = Vec::new();
        for h in 1..=n {
            if (h < h_lo || h > h_hi) && spectrum.log_a(h) > LOG_ZERO {
                terms.push(SubcodeTerm {
                    h,
                    log_contribution: union_terms[h as usize],
                    params: OptParams::None,
                });
            }
        }
        if let Some((ln_ratio, h_star)) =
            sf_ratio_range(spectrum.log_a_slice(), n, k, h_lo, h_hi)
        {
            let cache = &mut moment_cache;
            let r = maximize_box_dims(
                |p: &[f64]| {
                    let rho = p[0];
                    let wbar = *cache.entry(rho.to_bits()).or_insert_with(|| {
                        let mut w = StreamLse::new();
                        for (j, t) in tables.tabs.iter().enumerate() {
                            w.push(tables.log_alpha[j] + sf_channel_moment(t, rho));
                        }
                        w.total()
                    });
                    -(bin_entropy(rho)
                        + k as f64 * rho * LN_2
                        + rho * ln_ratio
                        + n as f64 * wbar)
                },
                &[(RHO_MIN, 1.0)],
                &[65],
                config.refine_rounds,
            )
            .expect("Shulman-Feder objective is finite");
            terms.push(SubcodeTerm {
                h: h_star,
                log_contribution: -r.max,
                params: OptParams::Sf { rho: r.argmax[0] },
            });
        }
        let mut acc = StreamLse::new();
        for t in &terms {
            acc.push(t.log_contribution);
        }
        (acc.total(), terms)
    };
    if fails.is_empty() {
        let (_, terms) = build(1, 0);
        let partition = MsfPartition {
            delta_l: 0.0,
            delta_r: 0.0,
            psi_plus: (1..=n).collect(),
            psi_minus: Vec::new(),
        };
        return MsfOutcome { result: assemble_result(BoundKind::Msf, terms, 0), partition };
    }
    let h_l0 = *fails.first().expect("nonempty");
    let h_r0 = *fails.last().expect("nonempty");
    let mut best = (f64::INFINITY, h_l0);
    if finite_length {
        // h_lo = h_r0 + 1 degenerates to the pure union bound, so the tuned
        // split never loses to it.
        for h_lo in h_l0..=h_r0 + 1 {
            let (total, _) = build(h_lo, h_r0);
            if total < best.0 {
                best = (total, h_lo);
            }
        }
    }
    let h_lo = best.1;
    let (_, terms) = build(h_lo, h_r0);
    let partition = if h_lo > h_r0 {
        MsfPartition {
            delta_l: 0.0,
            delta_r: 0.0,
            psi_plus: (1..=n).collect(),
            psi_minus: Vec::new(),
        }
    } else {
        MsfPartition {
            delta_l: h_lo as f64 / n as f64,
            delta_r: h_r0 as f64 / n as f64,
            psi_plus: (1..=n).filter(|&h| h < h_lo || h > h_r0).collect(),
            psi_minus: (h_lo..=h_r0).collect(),
        }
    };
    MsfOutcome { result: assemble_result(BoundKind::Msf, terms, 0), partition }
}

/// Modified Shulman-Feder bound: exact union terms where the spectrum is
/// close to binomial, a Shulman-Feder term over the remaining weight range.
/// With `finite_length` the left endpoint of that range is tuned by linear
/// search, which never loosens the bound relative to the untuned split.
pub fn msf_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
    finite_length: bool,
) -> Result<(BoundResult, MsfPartition), BoundsError> {
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let out = msf_core(&tables, spectrum, set, finite_length, &config);
    Ok((out.result, out.partition))
}

// ---------------------------------------------------------------------------
// hybrid per-subcode bound (Gallager outer form, DS2 measure)

/// Per-subcode hybrid values with the DS2 measure fixed by `(lambda, rho)`:
/// the average-normalizer form and the looser per-channel-normalizer form.
/// Returns `None` when the measure is infeasible on the tables.
fn hybrid_pair(
    tables: &Tables,
    log_ah: f64,
    h: u32,
    n: u32,
    lambda: f64,
    rho: f64,
) -> Option<(f64, f64, f64)> {
    if !ds2_shift_ok(tables, lambda) {
        return None;
    }
    let delta = h as f64 / n as f64;
    let state = tilting_solve(tables, delta, lambda, rho, None)?;
    let mut avg_c = StreamLse::new();
    let mut avg_e = StreamLse::new();
    let mut avg_d = StreamLse::new();
    let mut mix_c = StreamLse::new();
    let mut mix_e = StreamLse::new();
    for (j, t) in tables.tabs.iter().enumerate() {
        let (c, e, d) = ds2_integrals(t, lambda, rho, state.k);
        let la = tables.log_alpha[j];
        avg_c.push(la + c);
        avg_e.push(la + e);
        avg_d.push(la + d);
        mix_c.push(la + c + xmul((1.0 - rho) / rho, d));
        mix_e.push(la + e + xmul((1.0 - rho) / rho, d));
    }
    let he = bin_entropy(rho);
    let shared = 0.0;
    let avg = he
        + rho * (log_ah + h as f64 * avg_c.total() + (n - h) as f64 * avg_e.total())
        + xmul(n as f64 * (1.0 - rho), avg_d.total())
        + shared;
    let per_channel = he
        + rho * (log_ah + h as f64 * mix_c.total() + (n - h) as f64 * mix_e.total());
    if avg.is_nan() || per_channel.is_nan() {
        None
    } else {
        Some((avg, per_channel, state.k))
    }
}

fn hybrid_subcode_core(
    tables: &Tables,
    chain: &mut WarmChain,
    log_ah: f64,
    h: u32,
    n: u32,
) -> (f64, OptParams) {
    let (_, params) = ds2_subcode_core(tables, chain, log_ah, h, n);
    let (lambda, rho) = match params {
        OptParams::Ds2 { lambda, rho, .. } => (lambda, rho),
        _ => unreachable!(),
    };
    match hybrid_pair(tables, log_ah, h, n, lambda, rho) {
        Some((avg, _, k)) => (avg, OptParams::Hybrid { lambda, rho, k }),
        None => (
            bin_entropy(1.0) + log_ah + h as f64 * tables.log_gamma_bar,
            OptParams::Hybrid { lambda: 0.5, rho: 1.0, k: 0.0 },
        ),
    }
}

/// Per-subcode hybrid bound: the 1961 Gallager outer structure evaluated
/// with the DS2-optimal tilting measure of each subcode, using the
/// assignment-averaged normalizer (never looser than normalizing per
/// channel).
pub fn hybrid_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
) -> Result<BoundResult, BoundsError> {
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let mut chain = ds2_chain(&config);
    let mut terms = Vec::new();
    for h in 1..=spectrum.n() {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            let (value, params) = hybrid_subcode_core(&tables, &mut chain, la, h, spectrum.n());
            terms.push(SubcodeTerm { h, log_contribution: value, params });
        }
    }
    Ok(assemble_result(BoundKind::Hybrid, terms, 0))
}

// ---------------------------------------------------------------------------
// whole-code DS2 bound

fn ds2_whole_value(
    tables: &Tables,
    spectrum: &DistanceSpectrum,
    lambda: f64,
    rho: f64,
    k: f64,
) -> f64 {
    if !ds2_shift_ok(tables, lambda) {
        return f64::INFINITY;
    }
    let mut mix_c = StreamLse::new();
    let mut mix_e = StreamLse::new();
    for (j, t) in tables.tabs.iter().enumerate() {
        let (c, e, d) = ds2_integrals(t, lambda, rho, k);
        mix_c.push(tables.log_alpha[j] + c + xmul((1.0 - rho) / rho, d));
        mix_e.push(tables.log_alpha[j] + e + xmul((1.0 - rho) / rho, d));
    }
    let (c, e) = (mix_c.total(), mix_e.total());
    let n = spectrum.n();
    let mut sum = StreamLse::new();
    for h in 1..=n {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            sum.push(la + h as f64 * c + (n - h) as f64 * e);
        }
    }
    let value = rho * sum.total();
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

/// Whole-code DS2 bound: one tilting measure `(lambda, rho, k)` shared by
/// all subcodes (the per-subcode form with weight-dependent measures is
/// tighter; this variant trades tightness for a single three-parameter
/// search).
pub fn ds2_whole_code_bound(
    spectrum: &DistanceSpectrum,
    set: &ParallelChannelSet,
) -> Result<BoundResult, BoundsError> {
    let config = BoundConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let obj = |p: &[f64]| -> f64 {
        let lambda = p[0] / (1.0 - p[0]);
        let k = p[2] / (1.0 - p[2]);
        ds2_whole_value(&tables, spectrum, lambda, p[1], k)
    };
    let grid = maximize_box_dims(
        |p| -obj(p),
        &[(0.0, LAMBDA_PRIME_MAX), (RHO_MIN, 1.0), (0.0, LAMBDA_PRIME_MAX)],
        &[11, 11, 11],
        config.refine_rounds,
    )
    .ok();
    let corner = ds2_whole_value(&tables, spectrum, 0.5, 1.0, 0.0);
    let (value, lambda, rho, k) = match grid {
        Some(r) if -r.max <= corner => {
            let lambda = r.argmax[0] / (1.0 - r.argmax[0]);
            let k = r.argmax[2] / (1.0 - r.argmax[2]);
            (-r.max, lambda, r.argmax[1], k)
        }
        _ => (corner, 0.5, 1.0, 0.0),
    };
    // Share attribution mirrors the inner weighted sum at the optimum.
    let mut mix_c = StreamLse::new();
    let mut mix_e = StreamLse::new();
    for (j, t) in tables.tabs.iter().enumerate() {
        let (c, e, d) = ds2_integrals(t, lambda, rho, k);
        mix_c.push(tables.log_alpha[j] + c + xmul((1.0 - rho) / rho, d));
        mix_e.push(tables.log_alpha[j] + e + xmul((1.0 - rho) / rho, d));
    }
    let (c, e) = (mix_c.total(), mix_e.total());
    let n = spectrum.n();
    let mut inner = StreamLse::new();
    for h in 1..=n {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            inner.push(la + h as f64 * c + (n - h) as f64 * e);
        }
    }
    let inner_total = inner.total();
    let mut terms = Vec::new();
    for h in 1..=n {
        let la = spectrum.log_a(h);
        if la > LOG_ZERO {
            terms.push(SubcodeTerm {
                h,
                log_contribution: value + (la + h as f64 * c + (n - h) as f64 * e - inner_total),
                params: OptParams::Ds2 { lambda, rho, k },
            });
        }
    }
    Ok(assemble_result(BoundKind::Ds2Whole, terms, 0))
}

// ---------------------------------------------------------------------------
// orchestration

fn default_threshold(target: Target, n: u32) -> f64 {
    match target {
        Target::Block => 1e-10,
        Target::Bit => 1e-6 / n as f64,
    }
}

/// Evaluate one bound family on a code ensemble over a parallel channel set.
///
/// The spectrum used is `A_h` for block targets and the bit-weighted `A'_h`
/// for bit targets (which requires input carrying bit multiplicities). With
/// `config.expurgate` the weights above `n - k` are dropped. For the
/// per-subcode optimised kinds each weight class is first screened by its
/// exact union term: classes below `config.threshold` keep the union term
/// (it is already negligible), the others are optimised with a warm-started
/// parameter search and the optimised value is never reported above the
/// screen term.
pub fn error_bound(
    input: BoundInput<'_>,
    set: &ParallelChannelSet,
    kind: BoundKind,
    target: Target,
    config: &BoundConfig,
) -> Result<BoundResult, BoundsError> {
    let base = input.to_spectrum();
    let n = base.n();
    let k = base.k();
    let mut log_a: Vec<f64> = match target {
        Target::Block => base.log_a_slice().to_vec(),
        Target::Bit => {
            let bit = base.log_a_bit_slice().ok_or(BoundsError::MissingIowe)?.to_vec();
            let mut v = bit;
            // The zero-weight entry never enters a bound; keep the spectrum
            // constructor's convention for it.
            v[0] = 0.0;
            v
        }
    };
    if config.expurgate {
        let h_max = n - k;
        for entry in log_a.iter_mut().skip(h_max as usize + 1) {
            *entry = LOG_ZERO;
        }
    }
    let eff = DistanceSpectrum::new(n, k, log_a, None)
        .map_err(|_| BoundsError::InvalidParameter("spectrum"))?;
    let tables = build_tables(set, config.nodes_per_unit);
    match kind {
        BoundKind::Ub => Ok(union_bhattacharyya(&eff, set)),
        BoundKind::UnionQ => union_bound_q(&eff, set),
        BoundKind::Sphere => sphere_core(&tables, &eff, config),
        BoundKind::Sf => {
            let mut r = sf_bound(&eff, set, config.sf_variant)?;
            r.kind = BoundKind::Sf;
            Ok(r)
        }
        BoundKind::Msf => {
            Ok(msf_core(&tables, &eff, set, config.msf_finite_length, config).result)
        }
        BoundKind::Ds2Whole => ds2_whole_code_bound(&eff, set),
        BoundKind::Ds2 | BoundKind::Gallager61 | BoundKind::Hybrid => {
            let craig = CraigMix::new(&tables);
            let screen = |la: f64, h: u32| -> f64 {
                match &craig {
                    Some(c) => c.term(la, h),
                    None => la + h as f64 * tables.log_gamma_bar,
                }
            };
            let ln_thr = config.threshold.unwrap_or(default_threshold(target, n)).ln();
            let mut chain = match kind {
                BoundKind::Gallager61 => gallager_chain(config),
                _ => ds2_chain(config),
            };
            let mut terms = Vec::new();
            let mut skipped = 0usize;
            for h in 1..=eff.n() {
                let la = eff.log_a(h);
                if la <= LOG_ZERO {
                    continue;
                }
                let q = screen(la, h);
                if q < ln_thr {
                    terms.push(SubcodeTerm { h, log_contribution: q, params: OptParams::None });
                    skipped += 1;
                    continue;
                }
                let (value, params) = match kind {
                    BoundKind::Ds2 => ds2_subcode_core(&tables, &mut chain, la, h, n),
                    BoundKind::Gallager61 => {
                        gallager_subcode_core(&tables, &mut chain, la, h, n)
                    }
                    _ => hybrid_subcode_core(&tables, &mut chain, la, h, n),
                };
                // Both bound the same subcode probability; report the better.
                terms.push(SubcodeTerm { h, log_contribution: value.min(q), params });
            }
            Ok(assemble_result(kind, terms, skipped))
        }
    }
}

// ---------------------------------------------------------------------------
