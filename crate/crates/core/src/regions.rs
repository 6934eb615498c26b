//! Asymptotic error exponents of the parallel-channel bounds and the inner
//! bounds on attainable channel regions they induce, plus capacity and
//! cutoff-rate reference boundaries for two-channel BIAWGN sets.
//!
//! For a normalized Hamming weight `delta`, each exponent function returns
//! a lower bound `E(delta)` on the error exponent of the constant-weight
//! subcodes of an ensemble, with the spectral growth rate `r(delta)` taken
//! from a precomputed [`GrowthRate`] curve. A channel point is declared
//! attainable when three checks pass: the ensemble's low-weight spectral
//! conditions are declared (they are established analytically per ensemble,
//! not computed), the small-weight spectral slope clears the decay of the
//! assignment-averaged Bhattacharyya constant, and the exponent infimum
//! over the weight grid `delta >= DELTA_MIN` stays strictly positive.
//! Frontiers in the `((Eb/N0)_1, (Eb/N0)_2)` plane are traced by bisecting
//! the attainability predicate in `(Eb/N0)_2` at each grid `(Eb/N0)_1`.

use crate::asymspec::{Ensemble, GrowthRate};
use crate::bounds::{
    build_tables, ds2_shift_ok, gallager_integrals, sf_channel_moment, tilting_solve, xmul,
    StreamLse, Tables, WarmChain, LAMBDA_PRIME_MAX, RHO_MIN,
};
use crate::channels::{
    ebno_db_to_nu, solve_capacity_ebno2, solve_cutoff_ebno2, ChannelError, MbiosChannel,
    ParallelChannelSet,
};
use crate::math::bin_entropy;
// Unused under `cfg(test)`: the harness links `std`, whose inherent float
// methods shadow the trait.
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::numerics::{bisect, maximize_box_dims};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;
use core::fmt;

/// Smallest normalized weight on the attainability grid. Weights below it
/// are covered by the closed-form small-weight slope test instead of the
/// grid infimum.
pub const DELTA_MIN: f64 = 1e-3;
/// Positivity margin separating a genuinely positive exponent infimum from
/// optimizer noise.
pub const EPS_POS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum RegionsError {
    /// The ensemble's low-weight spectral conditions were not declared.
    MissingFlags,
    /// No attainable point exists inside the scanned SNR range.
    Infeasible,
    InvalidParameter(&'static str),
    Channel(ChannelError),
}

impl fmt::Display for RegionsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionsError::MissingFlags => {
                write!(f, "the ensemble's spectral conditions are not declared")
            }
            RegionsError::Infeasible => {
                write!(f, "no attainable point inside the scanned SNR range")
            }
            RegionsError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            RegionsError::Channel(e) => write!(f, "channel error: {e}"),
        }
    }
}

impl From<ChannelError> for RegionsError {
    fn from(e: ChannelError) -> Self {
        RegionsError::Channel(e)
    }
}

/// Exponent families the attainability analysis can run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    /// DS2 exponent, maximized over `(lambda, rho)` with per-weight tilting.
    Ds2,
    /// 1961 Gallager exponent, maximized over `(rho, s, c)`.
    Gallager61,
    /// Union-Bhattacharyya exponent `-r(delta) - delta ln(gamma_bar)`.
    Ub,
    /// Union exponent where the spectrum is near-binomial, a shared
    /// random-coding tail exponent over the remaining weight range.
    Msf,
}

/// Curve families a traced frontier can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Ds2,
    Gallager61,
    Ub,
    Msf,
    Capacity,
    Cutoff,
}

impl From<ExponentKind> for BoundaryKind {
    fn from(kind: ExponentKind) -> Self {
        match kind {
            ExponentKind::Ds2 => BoundaryKind::Ds2,
            ExponentKind::Gallager61 => BoundaryKind::Gallager61,
            ExponentKind::Ub => BoundaryKind::Ub,
            ExponentKind::Msf => BoundaryKind::Msf,
        }
    }
}

/// Declares the two per-ensemble spectral conditions of the attainability
/// theorem that are established analytically rather than computed: the
/// total multiplicity below some block-length-divergent weight cutoff
/// vanishes, and the finite-length spectral exponents converge uniformly to
/// the asymptotic growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleFlags {
    pub low_weight_mass_vanishes: bool,
    pub uniform_growth_convergence: bool,
}

impl EnsembleFlags {
    /// Both conditions declared.
    pub fn declared() -> Self {
        EnsembleFlags { low_weight_mass_vanishes: true, uniform_growth_convergence: true }
    }

    /// The conditions known to hold for the built-in ensembles: fully
    /// random codes, the repeat-accumulate family, and its systematic
    /// variants. `None` for repeat-accumulate codes with fewer than three
    /// repetitions, where they are not established.
    pub fn established(ensemble: &Ensemble) -> Option<Self> {
        match *ensemble {
            Ensemble::Nsra { q } if q < 3 => None,
            _ => Some(Self::declared()),
        }
    }

    fn check(&self) -> Result<(), RegionsError> {
        if self.low_weight_mass_vanishes && self.uniform_growth_convergence {
            Ok(())
        } else {
            Err(RegionsError::MissingFlags)
        }
    }
}

/// Grid and optimizer controls for exponent curves and frontier tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionConfig {
    /// Uniform weight-grid points on `[DELTA_MIN, 1]` (a fixed log-spaced
    /// lead-in below 0.1 is always added).
    pub delta_points: usize,
    /// Grid points per dimension of the coarse parameter scan.
    pub coarse: usize,
    /// Refinement rounds around the incumbent.
    pub refine_rounds: usize,
    /// Warm-start window half width across neighboring weights.
    pub warm_window: f64,
    /// Quadrature panels per unit output for continuous channels.
    pub nodes_per_unit: usize,
    /// `(Eb/N0)_2` scan range for frontier bisection, in dB.
    pub ebno2_range_db: (f64, f64),
    /// Frontier bisection tolerance in dB.
    pub ebno2_tol_db: f64,
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig {
            delta_points: 200,
            coarse: 13,
            refine_rounds: 4,
            warm_window: 0.1,
            nodes_per_unit: 12,
            ebno2_range_db: (-10.0, 40.0),
            ebno2_tol_db: 0.01,
        }
    }
}

impl RegionConfig {
    /// Coarse-grid mode: several times faster frontier tracing at a small
    /// cost in exponent accuracy (the exponent search can only shrink on a
    /// coarser grid, so traced regions stay valid inner bounds).
    pub fn coarse() -> Self {
        RegionConfig {
            delta_points: 60,
            coarse: 9,
            refine_rounds: 3,
            warm_window: 0.15,
            nodes_per_unit: 8,
            ebno2_range_db: (-10.0, 40.0),
            ebno2_tol_db: 0.02,
        }
    }
}

/// A sampled exponent lower-bound curve. Weights where the growth curve has
/// no codewords are omitted, so every stored value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    kind: ExponentKind,
    deltas: Vec<f64>,
    values: Vec<f64>,
}

impl ExponentCurve {
    pub fn kind(&self) -> ExponentKind {
        self.kind
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Exponent lower bounds in nats per symbol, parallel to [`Self::deltas`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest exponent on the curve; `+inf` for an empty curve.
    pub fn infimum(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// A traced frontier in the two-channel SNR plane: the smallest
/// `(Eb/N0)_2` making the channel pair attainable (or meeting the
/// reference rate), per grid `(Eb/N0)_1`. Grid points whose frontier lies
/// above the scan ceiling are omitted; points whose frontier lies below the
/// scan floor are clamped to it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    kind: BoundaryKind,
    rate: f64,
    alphas: (f64, f64),
    points: Vec<(f64, f64)>,
}

impl RegionBoundary {
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn alphas(&self) -> (f64, f64) {
        self.alphas
    }

    /// `((Eb/N0)_1 dB, (Eb/N0)_2 dB)` pairs in grid order.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

// ---------------------------------------------------------------------------
// exponent evaluation

/// DS2 exponent at fixed `(lambda, rho)` with the tilting solved at
/// `delta`; `-inf` when infeasible. Also returns the solved weight-balance
/// parameter for warm-starting neighboring evaluations.
fn ds2_exponent_value(
    tables: &Tables,
    r: f64,
    delta: f64,
    lambda: f64,
    rho: f64,
    hint: Option<f64>,
) -> (f64, f64) {
    if !ds2_shift_ok(tables, lambda) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let state = match tilting_solve(tables, delta, lambda, rho, hint) {
        Some(s) => s,
        None => return (f64::NEG_INFINITY, 0.0),
    };
    let mut t1 = StreamLse::new();
    let mut t2 = StreamLse::new();
    for j in 0..tables.len() {
        let w = tables.log_alpha[j] + xmul(1.0 - 1.0 / rho, state.ln_betas[j]);
        t1.push(w + state.ln_c[j]);
        t2.push(w + state.ln_e[j]);
    }
    let e = -(rho * r + rho * (delta * t1.total() + (1.0 - delta) * t2.total()));
    if e.is_nan() {
        (f64::NEG_INFINITY, state.k)
    } else {
        (e, state.k)
    }
}

/// 1961 Gallager exponent at fixed `(rho, s, c)`; `-inf` when infeasible.
/// `rho = 1` collapses to the union-Bhattacharyya exponent.
pub(crate) fn gallager_exponent_value(
    tables: &Tables,
    r: f64,
    delta: f64,
    rho: f64,
    s: f64,
    c: f64,
) -> f64 {
    if rho >= 1.0 - 1e-12 {
        return -(r + delta * tables.log_gamma_bar);
    }
    let mut zb = StreamLse::new();
    let mut grb = StreamLse::new();
    let mut gsb = StreamLse::new();
    for (j, t) in tables.tabs.iter().enumerate() {
        let (z, gr, gs) = match gallager_integrals(t, rho, s, c) {
            Some(v) => v,
            None => return f64::NEG_INFINITY,
        };
        zb.push(tables.log_alpha[j] + z);
        grb.push(tables.log_alpha[j] + gr);
        gsb.push(tables.log_alpha[j] + gs);
    }
    let e = -(rho * (r + delta * zb.total() + xmul(1.0 - delta, grb.total()))
        + xmul(1.0 - rho, gsb.total()));
    if e.is_nan() {
        f64::NEG_INFINITY
    } else {
        e
    }
}

fn ds2_exponent_chain(config: &RegionConfig) -> WarmChain {
    WarmChain::new(
        vec![(0.0, LAMBDA_PRIME_MAX), (RHO_MIN, 1.0)],
        vec![config.coarse, config.coarse],
        config.warm_window,
        config.refine_rounds,
    )
}

fn gallager_exponent_chain(config: &RegionConfig) -> WarmChain {
    WarmChain::new(
        vec![(RHO_MIN, 1.0), (RHO_MIN, 1.0), (0.0, 1.0)],
        vec![config.coarse, config.coarse, config.coarse.min(9)],
        config.warm_window,
        config.refine_rounds,
    )
}

/// Optimised DS2 exponent at one weight; the exact `(lambda, rho) =
/// (1/2, 1)` union-Bhattacharyya endpoint is always a candidate.
fn ds2_exponent_at(
    tables: &Tables,
    chain: &mut WarmChain,
    last_k: &mut Option<f64>,
    r: f64,
    delta: f64,
) -> f64 {
    let grid = chain.minimize(|p| {
        let lambda = p[0] / (1.0 - p[0]);
        let (e, k) = ds2_exponent_value(tables, r, delta, lambda, p[1], *last_k);
        if e.is_finite() && k > 0.0 {
            *last_k = Some(k);
        }
        -e
    });
    let bhat = -(r + delta * tables.log_gamma_bar);
    match grid {
        Some((_, neg_e)) => bhat.max(-neg_e),
        None => bhat,
    }
}

/// Optimised 1961 Gallager exponent at one weight; the `rho = 1` endpoint
/// (the union-Bhattacharyya exponent) is always a candidate.
fn gallager_exponent_at(tables: &Tables, chain: &mut WarmChain, r: f64, delta: f64) -> f64 {
    let grid = chain.minimize(|p| -gallager_exponent_value(tables, r, delta, p[0], p[1], p[2]));
    let bhat = -(r + delta * tables.log_gamma_bar);
    match grid {
        Some((_, neg_e)) => bhat.max(-neg_e),
        None => bhat,
    }
}

/// A weight class stays in the union part of the split exponent when the
/// Bhattacharyya decay beats the binomial growth left over at the set's
/// mutual information (same split as the finite-length bound).
fn keeps_union(delta: f64, log_gamma_bar: f64, ibar_bits: f64) -> bool {
    -delta * log_gamma_bar >= bin_entropy(delta) + (ibar_bits - 1.0) * LN_2
}

/// Shared random-coding tail exponent over the non-union weight range:
/// `max_rho -[rho (R ln 2 + excess) + ln(sum_j alpha_j W_j(rho))]` where
/// `excess` is the largest spectral overshoot over the binomial benchmark
/// on that range.
fn msf_tail_exponent(tables: &Tables, rate: f64, excess: f64, config: &RegionConfig) -> f64 {
    let a = rate * LN_2 + excess;
    let obj = |p: &[f64]| {
        let rho = p[0];
        let mut w = StreamLse::new();
        for (j, t) in tables.tabs.iter().enumerate() {
            w.push(tables.log_alpha[j] + sf_channel_moment(t, rho));
        }
        -(rho * a + w.total())
    };
    maximize_box_dims(obj, &[(RHO_MIN, 1.0)], &[65], config.refine_rounds)
        .map(|r| r.max)
        .unwrap_or(0.0)
}

/// Weight grid for attainability scans and exponent curves: a log-spaced
/// lead-in covering the small-weight dip plus `delta_points` uniform points
/// on `[DELTA_MIN, 1]`.
fn delta_grid(config: &RegionConfig) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=12).map(|k| DELTA_MIN * 10f64.powf(k as f64 / 6.0)).collect();
    let dp = config.delta_points.max(2);
    for i in 0..dp {
        grid.push(DELTA_MIN + (1.0 - DELTA_MIN) * i as f64 / (dp - 1) as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

/// DS2 exponent lower bound at one normalized weight, maximized over the
/// tilting parameters, with the growth rate interpolated from `growth`.
/// `+inf` where the growth curve reports no codewords.
pub fn ds2_exponent(delta: f64, growth: &GrowthRate, set: &ParallelChannelSet) -> f64 {
    debug_assert!(delta > 0.0 && delta <= 1.0);
    let r = growth.interpolate(delta);
    if !r.is_finite() {
        return f64::INFINITY;
    }
    let config = RegionConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let mut chain = ds2_exponent_chain(&config);
    let mut last_k = None;
    ds2_exponent_at(&tables, &mut chain, &mut last_k, r, delta)
}

/// 1961 Gallager exponent lower bound at one normalized weight, maximized
/// over `(rho, s, c)`, with the growth rate interpolated from `growth`.
/// `+inf` where the growth curve reports no codewords.
pub fn gallager_exponent(delta: f64, growth: &GrowthRate, set: &ParallelChannelSet) -> f64 {
    debug_assert!(delta > 0.0 && delta <= 1.0);
    let r = growth.interpolate(delta);
    if !r.is_finite() {
        return f64::INFINITY;
    }
    let config = RegionConfig::default();
    let tables = build_tables(set, config.nodes_per_unit);
    let mut chain = gallager_exponent_chain(&config);
    gallager_exponent_at(&tables, &mut chain, r, delta)
}

/// Samples the requested exponent family over the weight grid. Weights
/// without codewords are omitted. For the split-union kind, every weight in
/// the non-union range carries the shared tail exponent.
pub fn exponent_curve(
    kind: ExponentKind,
    growth: &GrowthRate,
    set: &ParallelChannelSet,
    config: &RegionConfig,
) -> ExponentCurve {
    let tables = build_tables(set, config.nodes_per_unit);
    let grid = delta_grid(config);
    let rate = growth.ensemble().rate();
    let ibar = set.avg_mutual_info();
    let mut deltas = Vec::new();
    let mut rs = Vec::new();
    for &d in &grid {
        let r = growth.interpolate(d);
        if r.is_finite() {
            deltas.push(d);
            rs.push(r);
        }
    }
    let values = match kind {
        ExponentKind::Ub => deltas
            .iter()
            .zip(&rs)
            .map(|(&d, &r)| -(r + d * tables.log_gamma_bar))
            .collect(),
        ExponentKind::Ds2 => {
            let mut chain = ds2_exponent_chain(config);
            let mut last_k = None;
            deltas
                .iter()
                .zip(&rs)
                .map(|(&d, &r)| ds2_exponent_at(&tables, &mut chain, &mut last_k, r, d))
                .collect()
        }
        ExponentKind::Gallager61 => {
            let mut chain = gallager_exponent_chain(config);
            deltas
                .iter()
                .zip(&rs)
                .map(|(&d, &r)| gallager_exponent_at(&tables, &mut chain, r, d))
                .collect()
        }
        ExponentKind::Msf => {
            let mut excess = f64::NEG_INFINITY;
            for (&d, &r) in deltas.iter().zip(&rs) {
                if !keeps_union(d, tables.log_gamma_bar, ibar) {
                    excess = excess.max(r - (bin_entropy(d) - (1.0 - rate) * LN_2));
                }
            }
            let tail = if excess.is_finite() {
                msf_tail_exponent(&tables, rate, excess, config)
            } else {
                f64::INFINITY
            };
            deltas
                .iter()
                .zip(&rs)
                .map(|(&d, &r)| {
                    if keeps_union(d, tables.log_gamma_bar, ibar) {
                        -(r + d * tables.log_gamma_bar)
                    } else {
                        tail
                    }
                })
                .collect()
        }
    };
    ExponentCurve { kind, deltas, values }
}

/// Attainability scan body shared by the public predicate and the frontier
/// tracers. The union-Bhattacharyya exponent screens each weight first:
/// the optimized exponents can only improve on it, so weights it already
/// clears are never optimized.
fn attainable_inner(
    set: &ParallelChannelSet,
    growth: &GrowthRate,
    kind: ExponentKind,
    config: &RegionConfig,
) -> bool {
    let tables = build_tables(set, config.nodes_per_unit);
    let lgb = tables.log_gamma_bar;
    if !(growth.r0_slope() < -lgb) {
        return false;
    }
    let grid = delta_grid(config);
    let rate = growth.ensemble().rate();
    let ibar = set.avg_mutual_info();
    let mut ds2_chain = ds2_exponent_chain(config);
    let mut gal_chain = gallager_exponent_chain(config);
    let mut last_k = None;
    let mut excess = f64::NEG_INFINITY;
    for &d in &grid {
        let r = growth.interpolate(d);
        if !r.is_finite() {
            continue;
        }
        let e_ub = -(r + d * lgb);
        match kind {
            ExponentKind::Ub => {
                if e_ub <= EPS_POS {
                    return false;
                }
            }
            ExponentKind::Msf => {
                if keeps_union(d, lgb, ibar) {
                    if e_ub <= EPS_POS {
                        return false;
                    }
                } else {
                    excess = excess.max(r - (bin_entropy(d) - (1.0 - rate) * LN_2));
                }
            }
            ExponentKind::Ds2 => {
                if e_ub <= EPS_POS
                    && ds2_exponent_at(&tables, &mut ds2_chain, &mut last_k, r, d) <= EPS_POS
                {
                    return false;
                }
            }
            ExponentKind::Gallager61 => {
                if e_ub <= EPS_POS
                    && gallager_exponent_at(&tables, &mut gal_chain, r, d) <= EPS_POS
                {
                    return false;
                }
            }
        }
    }
    if kind == ExponentKind::Msf && excess.is_finite() {
        return msf_tail_exponent(&tables, rate, excess, config) > EPS_POS;
    }
    true
}

/// Whether the channel set lies in the inner bound on the attainable region
/// traced from the requested exponent family: the declared spectral
/// conditions, the strict small-weight slope inequality, and a strictly
/// positive exponent infimum over the weight grid.
pub fn attainable(
    set: &ParallelChannelSet,
    growth: &GrowthRate,
    kind: ExponentKind,
    flags: EnsembleFlags,
    config: &RegionConfig,
) -> Result<bool, RegionsError> {
    flags.check()?;
    Ok(attainable_inner(set, growth, kind, config))
}

fn diagonal_pair(rate: f64, alphas: (f64, f64), e1_db: f64, e2_db: f64) -> ParallelChannelSet {
    let ch = |db: f64| {
        MbiosChannel::biawgn(ebno_db_to_nu(rate, db)).expect("BIAWGN noise parameter is positive")
    };
    ParallelChannelSet::new(vec![ch(e1_db), ch(e2_db)], vec![alphas.0, alphas.1])
        .expect("two-channel assignment is valid")
}

fn check_boundary_args(ensemble: &Ensemble, rate: f64, alphas: (f64, f64)) -> Result<(), RegionsError> {
    if (rate - ensemble.rate()).abs() > 1e-9 {
        return Err(RegionsError::InvalidParameter("rate must match the ensemble rate"));
    }
    if !(alphas.0 >= 0.0 && alphas.1 >= 0.0 && (alphas.0 + alphas.1 - 1.0).abs() <= 1e-12) {
        return Err(RegionsError::InvalidParameter("alphas must be >= 0 and sum to 1"));
    }
    Ok(())
}

/// One frontier sample: the smallest `(Eb/N0)_2` in the scan range making
/// the pair with `e1_db` attainable, or `None` when even the scan ceiling
/// is unattainable. Values at the scan floor are clamped to it. Grid
/// points are independent, so callers may evaluate them concurrently.
pub fn boundary_point(
    growth: &GrowthRate,
    kind: ExponentKind,
    rate: f64,
    alphas: (f64, f64),
    flags: EnsembleFlags,
    e1_db: f64,
    config: &RegionConfig,
) -> Result<Option<f64>, RegionsError> {
    flags.check()?;
    let (lo, hi) = config.ebno2_range_db;
    let pred =
        |e2: f64| attainable_inner(&diagonal_pair(rate, alphas, e1_db, e2), growth, kind, config);
    if !pred(hi) {
        return Ok(None);
    }
    if pred(lo) {
        return Ok(Some(lo));
    }
    Ok(Some(
        bisect(pred, lo, hi, config.ebno2_tol_db)
            .expect("attainability is monotone on the bracketed range"),
    ))
}

/// Traces the inner-bound frontier of a two-BIAWGN attainable region: for
/// each grid `(Eb/N0)_1`, the smallest `(Eb/N0)_2` in the scan range whose
/// channel pair is attainable, found by bisection (attainability is
/// monotone in SNR). Grid points unattainable even at the scan ceiling are
/// omitted; points attainable already at the scan floor are clamped to it.
pub fn region_boundary(
    ensemble: Ensemble,
    kind: ExponentKind,
    rate: f64,
    alphas: (f64, f64),
    ebno1_grid_db: &[f64],
    config: &RegionConfig,
) -> Result<RegionBoundary, RegionsError> {
    check_boundary_args(&ensemble, rate, alphas)?;
    let flags = EnsembleFlags::established(&ensemble).ok_or(RegionsError::MissingFlags)?;
    let growth = GrowthRate::compute(ensemble, &GrowthRate::default_grid());
    let mut points = Vec::new();
    for &e1 in ebno1_grid_db {
        if let Some(e2) = boundary_point(&growth, kind, rate, alphas, flags, e1, config)? {
            points.push((e1, e2));
        }
    }
    Ok(RegionBoundary { kind: kind.into(), rate, alphas, points })
}

/// The frontier's intersection with the equal-SNR diagonal: the smallest
/// `x` (dB) for which the pair `((Eb/N0)_1, (Eb/N0)_2) = (x, x)` is
/// attainable.
pub fn symmetric_boundary_point(
    ensemble: Ensemble,
    kind: ExponentKind,
    alphas: (f64, f64),
    config: &RegionConfig,
) -> Result<f64, RegionsError> {
    let rate = ensemble.rate();
    check_boundary_args(&ensemble, rate, alphas)?;
    EnsembleFlags::established(&ensemble).ok_or(RegionsError::MissingFlags)?.check()?;
    let growth = GrowthRate::compute(ensemble, &GrowthRate::default_grid());
    let (lo, hi) = config.ebno2_range_db;
    let pred =
        |x: f64| attainable_inner(&diagonal_pair(rate, alphas, x, x), &growth, kind, config);
    if !pred(hi) {
        return Err(RegionsError::Infeasible);
    }
    if pred(lo) {
        return Ok(lo);
    }
    Ok(bisect(pred, lo, hi, config.ebno2_tol_db)
        .expect("attainability is monotone on the bracketed range"))
}

/// Capacity and cutoff-rate reference frontiers over the `(Eb/N0)_1` grid
/// for a two-BIAWGN set. Grid points where one channel alone meets the
/// rate, or where no second-channel SNR can, are omitted from the
/// respective curve.
pub fn reference_boundaries(
    rate: f64,
    alphas: (f64, f64),
    ebno1_grid_db: &[f64],
) -> Result<(RegionBoundary, RegionBoundary), RegionsError> {
    let mut capacity = Vec::new();
    let mut cutoff = Vec::new();
    for &e1 in ebno1_grid_db {
        match solve_capacity_ebno2(rate, e1, alphas) {
            Ok(e2) => capacity.push((e1, e2)),
            Err(ChannelError::Infeasible) => {}
            Err(e) => return Err(e.into()),
        }
        match solve_cutoff_ebno2(rate, e1, alphas) {
            Ok(e2) => cutoff.push((e1, e2)),
            Err(ChannelError::Infeasible) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok((
        RegionBoundary { kind: BoundaryKind::Capacity, rate, alphas, points: capacity },
        RegionBoundary { kind: BoundaryKind::Cutoff, rate, alphas, points: cutoff },
    ))
}

/// Equal-SNR point of the capacity frontier. With identical channels the
/// assignment average collapses to a single channel, so the point is the
/// single-channel SNR at which BIAWGN capacity meets the rate (independent
/// of the assignment probabilities).
pub fn symmetric_capacity_point(rate: f64) -> Result<f64, RegionsError> {
    Ok(solve_capacity_ebno2(rate, 0.0, (0.0, 1.0))?)
}

/// Equal-SNR point of the cutoff-rate frontier (see
/// [`symmetric_capacity_point`] for why it is assignment-independent).
pub fn symmetric_cutoff_point(rate: f64) -> Result<f64, RegionsError> {
    Ok(solve_cutoff_ebno2(rate, 0.0, (0.0, 1.0))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::linear_to_db;

    fn awgn_pair(nu1: f64, nu2: f64) -> ParallelChannelSet {
        ParallelChannelSet::new(
            vec![MbiosChannel::biawgn(nu1).unwrap(), MbiosChannel::biawgn(nu2).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    fn nsra3_growth() -> GrowthRate {
        GrowthRate::compute(Ensemble::Nsra { q: 3 }, &GrowthRate::default_grid())
    }

    #[test]
    fn ds2_exponent_dominates_union_bhattacharyya_endpoint() {
        let growth = nsra3_growth();
        let set = awgn_pair(0.8, 0.4);
        let tables = build_tables(&set, 12);
        for delta in [0.05, 0.2, 0.5, 0.9] {
            let r = growth.interpolate(delta);
            let e_ub = -(r + delta * tables.log_gamma_bar);
            let e = ds2_exponent(delta, &growth, &set);
            assert!(e >= e_ub - 1e-12, "delta {delta}: {e} < {e_ub}");
        }
    }

    #[test]
    fn gallager_exponent_dominates_union_bhattacharyya_endpoint() {
        let growth = nsra3_growth();
        let set = awgn_pair(0.8, 0.4);
        let tables = build_tables(&set, 12);
        for delta in [0.05, 0.3, 0.7] {
            let r = growth.interpolate(delta);
            let e_ub = -(r + delta * tables.log_gamma_bar);
            let e = gallager_exponent(delta, &growth, &set);
            assert!(e >= e_ub - 1e-12, "delta {delta}: {e} < {e_ub}");
        }
    }

    #[test]
    fn exponents_not_positive_on_zero_capacity_channels() {
        // A crossover-1/2 BSC carries no information, so no ensemble with
        // codewords at a weight can have a positive exponent there.
        let set = ParallelChannelSet::new(
            vec![MbiosChannel::bsc(0.5).unwrap(), MbiosChannel::bsc(0.5).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        let growth = nsra3_growth();
        let delta = 0.3;
        assert!(growth.interpolate(delta) > 0.0);
        assert!(ds2_exponent(delta, &growth, &set) <= 1e-9);
        assert!(gallager_exponent(delta, &growth, &set) <= 1e-9);
    }

    #[test]
    fn gallager_exponent_value_matches_direct_bsc_evaluation() {
        // Independent direct evaluation of the three channel moments and
        // the exponent assembly on a single BSC.
        let p: f64 = 0.08;
        let set = ParallelChannelSet::new(vec![MbiosChannel::bsc(p).unwrap()], vec![1.0]).unwrap();
        let tables = build_tables(&set, 12);
        let (delta, r_growth) = (0.25, -0.11);
        let (rho, s, c) = (0.6, 0.7, 0.3);
        let rr = s * (1.0 - 1.0 / rho);
        let a = (1.0 - rr) / 2.0;
        let f_pow = |y0: f64, y1: f64, e: f64| -> f64 {
            let num = (1.0 - c) * (y0.powf(a) - y1.powf(a)).powi(2)
                + 2.0 * c * (y0 * y1).powf(a);
            let den = y0.powf(1.0 - s) + y1.powf(1.0 - s);
            (num / den).powf(e)
        };
        let q = 1.0 - p;
        // Output alphabet {0, 1} with p(0|0) = q, p(1|0) = p and the
        // mirrored law for the other input.
        let z = (q * p).powf(a) * f_pow(q, p, rho - 1.0)
            + (p * q).powf(a) * f_pow(p, q, rho - 1.0);
        let gr = 0.5 * (q.powf(1.0 - rr) + p.powf(1.0 - rr)) * f_pow(q, p, rho - 1.0)
            + 0.5 * (p.powf(1.0 - rr) + q.powf(1.0 - rr)) * f_pow(p, q, rho - 1.0);
        let gs = 0.5 * (q.powf(1.0 - s) + p.powf(1.0 - s)) * f_pow(q, p, rho)
            + 0.5 * (p.powf(1.0 - s) + q.powf(1.0 - s)) * f_pow(p, q, rho);
        let expected = -(rho * (r_growth + delta * z.ln() + (1.0 - delta) * gr.ln())
            + (1.0 - rho) * gs.ln());
        let got = gallager_exponent_value(&tables, r_growth, delta, rho, s, c);
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn small_weight_slope_matches_closed_form() {
        // E(delta)/delta at delta = 1e-4 against the closed-form slope
        // -r0 - ln(gamma_bar), on an interior attainable point.
        let growth = nsra3_growth();
        let rate = 1.0 / 3.0;
        let set = awgn_pair(ebno_db_to_nu(rate, 3.0), ebno_db_to_nu(rate, 3.0));
        let tables = build_tables(&set, 12);
        let delta = 1e-4;
        let slope = ds2_exponent(delta, &growth, &set) / delta;
        let closed = -growth.r0_slope() - tables.log_gamma_bar;
        assert!(closed > 0.0);
        assert!(
            (slope - closed).abs() <= 0.1 * closed.abs(),
            "slope {slope} vs closed form {closed}"
        );
    }

    #[test]
    fn exponent_grid_refinement_never_decreases() {
        let growth = nsra3_growth();
        let set = awgn_pair(0.9, 0.5);
        let tables = build_tables(&set, 12);
        let coarse = RegionConfig { coarse: 5, refine_rounds: 1, ..RegionConfig::default() };
        let fine = RegionConfig { coarse: 13, refine_rounds: 4, ..RegionConfig::default() };
        for delta in [0.1, 0.4, 0.8] {
            let r = growth.interpolate(delta);
            let mut hint = None;
            let e_coarse = ds2_exponent_at(
                &tables,
                &mut ds2_exponent_chain(&coarse),
                &mut hint,
                r,
                delta,
            );
            let mut hint = None;
            let e_fine =
                ds2_exponent_at(&tables, &mut ds2_exponent_chain(&fine), &mut hint, r, delta);
            assert!(e_fine >= e_coarse - 1e-12, "delta {delta}: {e_fine} < {e_coarse}");
        }
    }

    #[test]
    fn msf_curve_is_union_where_spectrum_is_thin() {
        let growth = nsra3_growth();
        let rate = 1.0 / 3.0;
        let set = awgn_pair(ebno_db_to_nu(rate, 4.0), ebno_db_to_nu(rate, 4.0));
        let config = RegionConfig::coarse();
        let tables = build_tables(&set, config.nodes_per_unit);
        let ibar = set.avg_mutual_info();
        let curve = exponent_curve(ExponentKind::Msf, &growth, &set, &config);
        assert!(!curve.deltas().is_empty());
        for (&d, &e) in curve.deltas().iter().zip(curve.values()) {
            assert!(e.is_finite());
            if keeps_union(d, tables.log_gamma_bar, ibar) {
                let expected = -(growth.interpolate(d) + d * tables.log_gamma_bar);
                assert!((e - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attainability_flips_with_snr() {
        let growth = nsra3_growth();
        let rate = 1.0 / 3.0;
        let config = RegionConfig::coarse();
        let flags = EnsembleFlags::declared();
        let strong = awgn_pair(ebno_db_to_nu(rate, 12.0), ebno_db_to_nu(rate, 12.0));
        let weak = awgn_pair(ebno_db_to_nu(rate, -5.0), ebno_db_to_nu(rate, -5.0));
        for kind in [ExponentKind::Ds2, ExponentKind::Gallager61, ExponentKind::Ub] {
            assert!(attainable(&strong, &growth, kind, flags, &config).unwrap(), "{kind:?}");
            assert!(!attainable(&weak, &growth, kind, flags, &config).unwrap(), "{kind:?}");
        }
    }

    #[test]
    fn attainable_requires_declared_flags() {
        let growth = nsra3_growth();
        let set = awgn_pair(1.0, 1.0);
        let flags =
            EnsembleFlags { low_weight_mass_vanishes: false, uniform_growth_convergence: true };
        assert_eq!(
            attainable(&set, &growth, ExponentKind::Ub, flags, &RegionConfig::default()),
            Err(RegionsError::MissingFlags)
        );
        assert!(EnsembleFlags::established(&Ensemble::Nsra { q: 2 }).is_none());
        assert!(EnsembleFlags::established(&Ensemble::Nsra { q: 3 }).is_some());
    }

    #[test]
    fn union_boundary_is_monotone_and_brackets_attainability() {
        let ensemble = Ensemble::Nsra { q: 3 };
        let config = RegionConfig::coarse();
        let grid = [0.0, 2.0, 4.0];
        let boundary = region_boundary(
            ensemble,
            ExponentKind::Ub,
            1.0 / 3.0,
            (0.5, 0.5),
            &grid,
            &config,
        )
        .unwrap();
        let pts = boundary.points();
        assert_eq!(pts.len(), 3);
        for w in pts.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-9, "boundary must be nonincreasing: {pts:?}");
        }
        // The bisection output brackets the attainability flip.
        let growth = GrowthRate::compute(ensemble, &GrowthRate::default_grid());
        let (e1, e2) = pts[1];
        let probe = |db: f64| {
            attainable_inner(
                &diagonal_pair(1.0 / 3.0, (0.5, 0.5), e1, db),
                &growth,
                ExponentKind::Ub,
                &config,
            )
        };
        assert!(probe(e2 + 0.02));
        assert!(!probe(e2 - 0.02));
    }

    #[test]
    fn reference_points_match_closed_forms() {
        // Cutoff: single-channel R0 = 1 - log2(1 + e^(-nu)) inverted at
        // rate 1/3; capacity point below the cutoff point.
        let rate = 1.0 / 3.0;
        let nu = -(2f64.powf(1.0 - rate) - 1.0).ln();
        let expected = linear_to_db(nu / rate);
        let cutoff = symmetric_cutoff_point(rate).unwrap();
        assert!((cutoff - expected).abs() < 1e-9);
        let capacity = symmetric_capacity_point(rate).unwrap();
        assert!(capacity < cutoff);
        // Two-channel cutoff reference at the documented operating point.
        let (_, cut) = reference_boundaries(rate, (0.5, 0.5), &[0.0]).unwrap();
        assert_eq!(cut.points().len(), 1);
        assert!((cut.points()[0].1 - 3.69).abs() < 0.01);
    }

    #[test]
    fn reference_curves_nest_on_a_grid() {
        let rate = 1.0 / 3.0;
        let grid: Vec<f64> = (0..=12).map(|i| -2.0 + i as f64).collect();
        let (capacity, cutoff) = reference_boundaries(rate, (0.5, 0.5), &grid).unwrap();
        assert!(!capacity.points().is_empty() && !cutoff.points().is_empty());
        for &(e1, e2_cut) in cutoff.points() {
            if let Some(&(_, e2_cap)) =
                capacity.points().iter().find(|&&(x, _)| (x - e1).abs() < 1e-12)
            {
                assert!(e2_cut > e2_cap, "cutoff must lie strictly inside capacity at {e1}");
            }
        }
    }
}
