//! Memoryless binary-input output-symmetric (MBIOS) channel models and the
//! parallel-channel sets built from them.
//!
//! A [`ParallelChannelSet`] holds `J` independent component channels
//! together with assignment probabilities `alpha_j` (each transmitted code
//! bit is mapped to channel `j` with probability `alpha_j`, independently
//! of the other bits). Throughout, conditional densities are written
//! `p(y|0)` and `p(y|1)`; output symmetry means `p(y|0) = p(-y|1)`.
//!
//! Conventions:
//!
//! * The BIAWGN channel with parameter `nu = Es/N0 = R (Eb/N0)` has unit
//!   noise variance and antipodal signalling at `-sqrt(2 nu)` for bit 0 and
//!   `+sqrt(2 nu)` for bit 1, so its Bhattacharyya parameter is
//!   `gamma = exp(-nu)`.
//! * Public interfaces take and return `Eb/N0` in dB; the linear domain is
//!   internal.
//! * Capacities, cutoff rates and mutual informations are in bits per
//!   channel use.

use crate::math::{erfcx, q_func, LN_SQRT_2PI, SQRT_2PI};
// Unused under `cfg(test)`: the harness links `std`, whose inherent float
// methods shadow the trait.
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::numerics::{bisect, log_add, Quadrature};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

/// Default Gauss-Legendre density for channel-output integrals (nodes per
/// unit-length panel).
pub const DEFAULT_NODES_PER_UNIT: usize = 64;

/// Margin added to the farthest signal mean when truncating Gaussian
/// output integrals: the tail mass beyond 12 noise standard deviations is
/// below 2e-33, far under every tolerance used in this crate.
pub const WINDOW_MARGIN: f64 = 12.0;

/// Errors from channel construction and the channel-level solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// Parameter outside its admissible range.
    InvalidParameter(&'static str),
    /// The requested operating point does not exist (the target is either
    /// unreachable for any channel-2 SNR or already met at zero SNR).
    Infeasible,
    /// The requested computation method does not apply to this channel kind.
    UnsupportedMethod,
    /// An integrand evaluated to a non-finite value.
    NonFinite,
}

impl core::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChannelError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            ChannelError::Infeasible => write!(f, "no admissible operating point"),
            ChannelError::UnsupportedMethod => write!(f, "method unsupported for this channel"),
            ChannelError::NonFinite => write!(f, "non-finite integrand"),
        }
    }
}

impl core::error::Error for ChannelError {}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10.0f64.powf(db / 10.0)
}

/// `10 log10(linear)`.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// BIAWGN channel parameter `nu = R (Eb/N0)` from a code rate and `Eb/N0`
/// in dB.
pub fn ebno_db_to_nu(rate: f64, ebno_db: f64) -> f64 {
    rate * db_to_linear(ebno_db)
}

/// Output alphabet description used when building integration tables.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputSupport {
    /// Continuous output; integrate over `[-half_width, half_width]`.
    Continuous { half_width: f64 },
    /// Finite output alphabet at the given points.
    Discrete { points: Vec<f64> },
}

/// A memoryless binary-input output-symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MbiosChannel {
    /// Binary-input AWGN with `nu = Es/N0` (unit noise variance).
    Biawgn { nu: f64 },
    /// Binary symmetric channel with crossover probability `p <= 1/2`,
    /// outputs `+1` (agree) and `-1` (flip).
    Bsc { p: f64 },
    /// Binary erasure channel with erasure probability `eps`, outputs
    /// `+1`, `0` (erasure), `-1`.
    Bec { eps: f64 },
}

impl MbiosChannel {
    pub fn biawgn(nu: f64) -> Result<Self, ChannelError> {
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(ChannelError::InvalidParameter("nu must be finite and >= 0"));
        }
        Ok(MbiosChannel::Biawgn { nu })
    }

    /// BIAWGN channel at rate `rate` and the given `Eb/N0` in dB.
    pub fn biawgn_from_ebno_db(rate: f64, ebno_db: f64) -> Result<Self, ChannelError> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(ChannelError::InvalidParameter("rate must lie in (0, 1)"));
        }
        Self::biawgn(ebno_db_to_nu(rate, ebno_db))
    }

    pub fn bsc(p: f64) -> Result<Self, ChannelError> {
        if !(p.is_finite() && (0.0..=0.5).contains(&p)) {
            return Err(ChannelError::InvalidParameter("p must lie in [0, 1/2]"));
        }
        Ok(MbiosChannel::Bsc { p })
    }

    pub fn bec(eps: f64) -> Result<Self, ChannelError> {
        if !(eps.is_finite() && (0.0..=1.0).contains(&eps)) {
            return Err(ChannelError::InvalidParameter("eps must lie in [0, 1]"));
        }
        Ok(MbiosChannel::Bec { eps })
    }

    /// Gaussian signal offset `sqrt(2 nu)` (zero for discrete channels).
    fn mean_offset(&self) -> f64 {
        match *self {
            MbiosChannel::Biawgn { nu } => (2.0 * nu).sqrt(),
            _ => 0.0,
        }
    }

    /// Where (and how) to integrate functions of the channel output.
    pub fn output_support(&self) -> OutputSupport {
        match *self {
            MbiosChannel::Biawgn { .. } => OutputSupport::Continuous {
                half_width: self.mean_offset() + WINDOW_MARGIN,
            },
            MbiosChannel::Bsc { .. } => OutputSupport::Discrete { points: vec![1.0, -1.0] },
            MbiosChannel::Bec { .. } => OutputSupport::Discrete { points: vec![1.0, 0.0, -1.0] },
        }
    }

    /// Natural log of `p(y|0)` (a density for BIAWGN, a point mass at the
    /// support points for discrete channels).
    pub fn log_p_zero(&self, y: f64) -> f64 {
        match *self {
            MbiosChannel::Biawgn { .. } => {
                let m = self.mean_offset();
                -0.5 * (y + m) * (y + m) - LN_SQRT_2PI
            }
            MbiosChannel::Bsc { p } => {
                if y == 1.0 {
                    (1.0 - p).ln()
                } else {
                    p.ln()
                }
            }
            MbiosChannel::Bec { eps } => {
                if y == 1.0 {
                    (1.0 - eps).ln()
                } else if y == 0.0 {
                    eps.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Natural log of `p(y|1) = p(-y|0)`.
    pub fn log_p_one(&self, y: f64) -> f64 {
        self.log_p_zero(-y)
    }

    /// Sum (or integral) of `f` over the output alphabet.
    ///
    /// Continuous outputs use the composite Gauss-Legendre rule over the
    /// channel's truncation window; discrete outputs are summed exactly.
    pub fn integrate_output(&self, mut f: impl FnMut(f64) -> f64) -> Result<f64, ChannelError> {
        match self.output_support() {
            OutputSupport::Continuous { half_width } => {
                Quadrature::composite_symmetric(half_width, DEFAULT_NODES_PER_UNIT)
                    .integrate(f)
                    .map_err(|_| ChannelError::NonFinite)
            }
            OutputSupport::Discrete { points } => {
                let mut acc = 0.0;
                for y in points {
                    let v = f(y);
                    if !v.is_finite() {
                        return Err(ChannelError::NonFinite);
                    }
                    acc += v;
                }
                Ok(acc)
            }
        }
    }

    /// Bhattacharyya parameter `gamma = sum_y sqrt(p(y|0) p(y|1))`.
    ///
    /// Computed from the output law itself; for BIAWGN the closed form
    /// `exp(-nu)` serves as an accuracy cross-check in tests.
    pub fn bhattacharyya(&self) -> f64 {
        match *self {
            MbiosChannel::Biawgn { .. } => self
                .integrate_output(|y| (0.5 * (self.log_p_zero(y) + self.log_p_one(y))).exp())
                .expect("finite integrand"),
            MbiosChannel::Bsc { p } => 2.0 * (p * (1.0 - p)).sqrt(),
            MbiosChannel::Bec { eps } => eps,
        }
    }

    /// Channel capacity in bits per use under equiprobable inputs.
    ///
    /// `Quadrature` evaluates the defining output integral (exact sums for
    /// the discrete channels). `Series` applies only to BIAWGN and sums 30
    /// terms of an Euler-transformed tail expansion built on the scaled
    /// complementary error function; the two routes agree to better than
    /// 1e-6 and serve as mutual cross-checks.
    pub fn capacity(&self, method: CapacityMethod) -> Result<f64, ChannelError> {
        match (*self, method) {
            (MbiosChannel::Biawgn { .. }, CapacityMethod::Quadrature) => {
                Ok(self.mutual_info_quadrature())
            }
            (MbiosChannel::Biawgn { .. }, CapacityMethod::Series) => Ok(self.capacity_series()),
            (MbiosChannel::Bsc { p }, CapacityMethod::Quadrature) => {
                Ok(1.0 - crate::math::bin_entropy_bits(p))
            }
            (MbiosChannel::Bec { eps }, CapacityMethod::Quadrature) => Ok(1.0 - eps),
            (_, CapacityMethod::Series) => Err(ChannelError::UnsupportedMethod),
        }
    }

    /// Capacity of the BIAWGN channel by direct quadrature:
    /// `C = 1 - (2 pi)^{-1/2} / ln 2 * Int exp(-(y-beta)^2/2) ln(1+e^{-2 beta y}) dy`
    /// with `beta = sqrt(2 nu)`.
    fn mutual_info_quadrature(&self) -> f64 {
        let beta = self.mean_offset();
        let half_width = beta + WINDOW_MARGIN;
        let quad = Quadrature::composite_symmetric(half_width, DEFAULT_NODES_PER_UNIT);
        let integral = quad
            .integrate(|y| {
                let g = (-0.5 * (y - beta) * (y - beta)).exp() / SQRT_2PI;
                g * ln_1p_exp(-2.0 * beta * y)
            })
            .expect("finite integrand");
        1.0 - integral / LN_2
    }

    /// BIAWGN capacity via the 30-term tail series.
    fn capacity_series(&self) -> f64 {
        let beta = self.mean_offset();
        let mut tail = 0.0;
        for k in 0..30u32 {
            let mut delta = 0.0;
            let mut binom = 1.0; // C(k, m), updated multiplicatively
            for m in 0..=k {
                let km = (k - m) as f64;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                delta += sign / ((km + 1.0) * (km + 2.0))
                    * binom
                    * erfcx((2.0 * km + 3.0) * beta / core::f64::consts::SQRT_2);
                binom *= (k - m) as f64 / (m as f64 + 1.0);
            }
            delta *= 0.5 * (-0.5 * beta * beta).exp();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            tail += sign * delta / 2.0f64.powi(k as i32 + 1);
        }
        let bracket = (2.0 * beta / SQRT_2PI) * (-0.5 * beta * beta).exp()
            - (2.0 * beta * beta - 1.0) * q_func(beta)
            + tail;
        1.0 - bracket / LN_2
    }

    /// Mutual information `I(X;Y)` in bits with equiprobable inputs,
    /// computed from the generic output average
    /// `sum_y p(y|0) log2(2 p(y|0) / (p(y|0)+p(y|1)))`
    /// (equal to the conditioning on `X=1` by symmetry). For MBIOS channels
    /// this coincides with the capacity.
    pub fn mutual_info(&self) -> f64 {
        self.integrate_output(|y| {
            let lp0 = self.log_p_zero(y);
            let lp1 = self.log_p_one(y);
            let p0 = lp0.exp();
            if p0 == 0.0 {
                return 0.0;
            }
            p0 * (LN_2 + lp0 - log_add(lp0, lp1)) / LN_2
        })
        .expect("finite integrand")
    }
}

/// Capacity evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMethod {
    Quadrature,
    Series,
}

/// `ln(1 + e^x)` without overflow.
fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

// ---------------------------------------------------------------------------
// Parallel channel sets
// ---------------------------------------------------------------------------

/// A set of `J` independent MBIOS channels with bit-assignment
/// probabilities `alpha_j` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelChannelSet {
    channels: Vec<MbiosChannel>,
    alphas: Vec<f64>,
}

impl ParallelChannelSet {
    pub fn new(channels: Vec<MbiosChannel>, alphas: Vec<f64>) -> Result<Self, ChannelError> {
        if channels.is_empty() || channels.len() != alphas.len() {
            return Err(ChannelError::InvalidParameter(
                "channels and alphas must be non-empty and of equal length",
            ));
        }
        let mut total = 0.0;
        for &a in &alphas {
            if !(a.is_finite() && a >= 0.0) {
                return Err(ChannelError::InvalidParameter("alphas must be >= 0"));
            }
            total += a;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(ChannelError::InvalidParameter("alphas must sum to 1"));
        }
        Ok(ParallelChannelSet { channels, alphas })
    }

    /// Two BIAWGN channels at a common code rate, the usual experimental
    /// setup.
    pub fn biawgn_pair(
        rate: f64,
        ebno1_db: f64,
        ebno2_db: f64,
        alphas: (f64, f64),
    ) -> Result<Self, ChannelError> {
        Self::new(
            vec![
                MbiosChannel::biawgn_from_ebno_db(rate, ebno1_db)?,
                MbiosChannel::biawgn_from_ebno_db(rate, ebno2_db)?,
            ],
            vec![alphas.0, alphas.1],
        )
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channels(&self) -> &[MbiosChannel] {
        &self.channels
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &MbiosChannel)> {
        self.alphas.iter().copied().zip(self.channels.iter())
    }

    /// Assignment-averaged Bhattacharyya parameter
    /// `gamma_bar = sum_j alpha_j gamma_j`.
    pub fn avg_bhattacharyya(&self) -> f64 {
        self.iter().map(|(a, c)| a * c.bhattacharyya()).sum()
    }

    /// Cutoff rate of the parallel set,
    /// `R0 = 1 - log2(1 + gamma_bar)` bits per use.
    pub fn cutoff_rate(&self) -> f64 {
        1.0 - (1.0 + self.avg_bhattacharyya()).log2()
    }

    /// Assignment-averaged capacity `sum_j alpha_j C_j` in bits per use.
    pub fn avg_capacity(&self, method: CapacityMethod) -> Result<f64, ChannelError> {
        let mut acc = 0.0;
        for (a, c) in self.iter() {
            acc += a * c.capacity(method)?;
        }
        Ok(acc)
    }

    /// Assignment-averaged mutual information under equiprobable inputs
    /// (equal to [`Self::avg_capacity`] for MBIOS channels, computed by the
    /// independent generic route).
    pub fn avg_mutual_info(&self) -> f64 {
        self.iter().map(|(a, c)| a * c.mutual_info()).sum()
    }
}

// ---------------------------------------------------------------------------
// Two-channel reference solvers
// ---------------------------------------------------------------------------

/// Linear-domain `(Eb/N0)_2` at which a two-BIAWGN set with assignment
/// probabilities `(alpha_1, alpha_2)` meets `R0 = rate`, given channel 1 at
/// `ebno1_db`:
/// `-(1/R) ln[(2^{1-R} - 1 - alpha_1 e^{-R (Eb/N0)_1}) / alpha_2]`.
///
/// The value may be zero or negative, meaning channel 2 meets the target at
/// arbitrarily low SNR; errors with [`ChannelError::Infeasible`] when the
/// bracketed quantity is `<= 0` (no channel-2 SNR reaches the target).
pub fn solve_cutoff_ebno2_linear(
    rate: f64,
    ebno1_db: f64,
    alphas: (f64, f64),
) -> Result<f64, ChannelError> {
    check_two_channel_args(rate, alphas)?;
    let nu1 = ebno_db_to_nu(rate, ebno1_db);
    let arg = 2.0f64.powf(1.0 - rate) - 1.0 - alphas.0 * (-nu1).exp();
    if arg <= 0.0 {
        return Err(ChannelError::Infeasible);
    }
    Ok(-(arg / alphas.1).ln() / rate)
}

/// `(Eb/N0)_2` in dB at which the two-channel cutoff rate equals `rate`;
/// [`ChannelError::Infeasible`] when no strictly positive solution exists
/// (in either direction).
pub fn solve_cutoff_ebno2(
    rate: f64,
    ebno1_db: f64,
    alphas: (f64, f64),
) -> Result<f64, ChannelError> {
    let lin = solve_cutoff_ebno2_linear(rate, ebno1_db, alphas)?;
    if lin <= 0.0 {
        return Err(ChannelError::Infeasible);
    }
    Ok(linear_to_db(lin))
}

/// `(Eb/N0)_2` in dB at which the assignment-averaged BIAWGN capacity
/// equals `rate`, given channel 1 at `ebno1_db`. Solved by bisection of the
/// monotone capacity integral. [`ChannelError::Infeasible`] when channel 1
/// alone already meets the rate (`alpha_1 C_1 >= rate`) or when no
/// channel-2 SNR can close the gap (`target >= alpha_2`).
pub fn solve_capacity_ebno2(
    rate: f64,
    ebno1_db: f64,
    alphas: (f64, f64),
) -> Result<f64, ChannelError> {
    check_two_channel_args(rate, alphas)?;
    let nu1 = ebno_db_to_nu(rate, ebno1_db);
    let c1 = MbiosChannel::Biawgn { nu: nu1 }.capacity(CapacityMethod::Quadrature)?;
    let target = rate - alphas.0 * c1;
    if target <= 0.0 || target >= alphas.1 {
        return Err(ChannelError::Infeasible);
    }
    let c2_target = target / alphas.1;
    let cap = |nu: f64| {
        MbiosChannel::Biawgn { nu }
            .capacity(CapacityMethod::Quadrature)
            .expect("BIAWGN capacity is total")
    };
    let mut hi = 1.0;
    while cap(hi) < c2_target {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(ChannelError::Infeasible);
        }
    }
    let nu2 = bisect(|nu| cap(nu) >= c2_target, 0.0, hi, 1e-11 * hi)
        .map_err(|_| ChannelError::Infeasible)?;
    if nu2 <= 0.0 {
        return Err(ChannelError::Infeasible);
    }
    Ok(linear_to_db(nu2 / rate))
}

fn check_two_channel_args(rate: f64, alphas: (f64, f64)) -> Result<(), ChannelError> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(ChannelError::InvalidParameter("rate must lie in (0, 1)"));
    }
    if !(alphas.0 >= 0.0 && alphas.1 > 0.0 && (alphas.0 + alphas.1 - 1.0).abs() <= 1e-12) {
        return Err(ChannelError::InvalidParameter("alphas must be >= 0 and sum to 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditional_densities_normalise() {
        for &nu in &[0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let ch = MbiosChannel::biawgn(nu).unwrap();
            let mass = ch.integrate_output(|y| ch.log_p_zero(y).exp()).unwrap();
            assert!((mass - 1.0).abs() < 1e-9, "nu={nu}: {mass}");
        }
        for ch in [MbiosChannel::bsc(0.11).unwrap(), MbiosChannel::bec(0.4).unwrap()] {
            let mass = ch.integrate_output(|y| ch.log_p_zero(y).exp()).unwrap();
            assert!((mass - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn output_symmetry_holds_pointwise() {
        let channels = [
            MbiosChannel::biawgn(0.7).unwrap(),
            MbiosChannel::bsc(0.2).unwrap(),
            MbiosChannel::bec(0.3).unwrap(),
        ];
        for ch in channels {
            for &y in &[1.0, 0.0, -1.0, 0.35, -2.2] {
                let a = ch.log_p_zero(y);
                let b = ch.log_p_one(-y);
                assert!(a == b || (a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bhattacharyya_closed_forms() {
        // BIAWGN: integral route vs exp(-nu).
        for &nu in &[0.1, 1.0, 2.5] {
            let g = MbiosChannel::biawgn(nu).unwrap().bhattacharyya();
            assert!((g - (-nu).exp()).abs() < 1e-9, "nu={nu}");
        }
        assert!((MbiosChannel::bsc(0.1).unwrap().bhattacharyya() - 0.6).abs() < 1e-15);
        assert!((MbiosChannel::bec(0.25).unwrap().bhattacharyya() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn average_bhattacharyya_mixes_linearly() {
        // gamma values 0.2 and 0.5 with alphas (0.3, 0.7) average to 0.41.
        let set = ParallelChannelSet::new(
            alloc::vec![
                MbiosChannel::biawgn(-(0.2f64.ln())).unwrap(),
                MbiosChannel::biawgn(-(0.5f64.ln())).unwrap(),
            ],
            alloc::vec![0.3, 0.7],
        )
        .unwrap();
        assert!((set.avg_bhattacharyya() - 0.41).abs() < 1e-9);
    }

    #[test]
    fn cutoff_rate_endpoints() {
        // Perfect channels (gamma -> 0) give R0 -> 1; useless ones give 0.
        let perfect = ParallelChannelSet::new(
            alloc::vec![MbiosChannel::biawgn(30.0).unwrap()],
            alloc::vec![1.0],
        )
        .unwrap();
        assert!((perfect.cutoff_rate() - 1.0).abs() < 1e-9);
        let useless = ParallelChannelSet::new(
            alloc::vec![MbiosChannel::bsc(0.5).unwrap()],
            alloc::vec![1.0],
        )
        .unwrap();
        assert!(useless.cutoff_rate().abs() < 1e-12);
    }

    #[test]
    fn cutoff_solver_reference_point() {
        // Rate 1/3, channel 1 at 0 dB, equal assignment: the second channel
        // must sit near 3.69 dB.
        let db = solve_cutoff_ebno2(1.0 / 3.0, 0.0, (0.5, 0.5)).unwrap();
        assert!((db - 3.69).abs() < 0.01, "{db}");
    }

    #[test]
    fn cutoff_solver_round_trips_to_rate() {
        let rate = 1.0 / 3.0;
        let db = solve_cutoff_ebno2(rate, 0.0, (0.5, 0.5)).unwrap();
        let set = ParallelChannelSet::biawgn_pair(rate, 0.0, db, (0.5, 0.5)).unwrap();
        assert!((set.cutoff_rate() - rate).abs() < 1e-9);
    }

    #[test]
    fn cutoff_solver_perfect_channel_limit() {
        // As channel 1 becomes noiseless, the linear solution tends to
        // -(1/R) ln((2^{1-R} - 1) / alpha_2), which is negative at rate 1/3
        // (channel 2 is then unconstrained).
        let rate = 1.0 / 3.0;
        let lin = solve_cutoff_ebno2_linear(rate, 400.0, (0.5, 0.5)).unwrap();
        let expect = -3.0 * ((2.0f64.powf(2.0 / 3.0) - 1.0) / 0.5).ln();
        assert!((lin - expect).abs() < 1e-9);
        assert!(lin < 0.0);
        assert_eq!(
            solve_cutoff_ebno2(rate, 400.0, (0.5, 0.5)).unwrap_err(),
            ChannelError::Infeasible
        );
    }

    #[test]
    fn cutoff_solver_infeasible_when_channel1_too_noisy() {
        // At rate 0.9 the bracketed term goes negative for a noisy channel 1.
        assert_eq!(
            solve_cutoff_ebno2(0.9, -20.0, (0.5, 0.5)).unwrap_err(),
            ChannelError::Infeasible
        );
    }

    #[test]
    fn capacity_series_matches_quadrature() {
        // beta = sqrt(2 nu) over the acceptance grid.
        for &beta in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let nu = beta * beta / 2.0;
            let ch = MbiosChannel::biawgn(nu).unwrap();
            let q = ch.capacity(CapacityMethod::Quadrature).unwrap();
            let s = ch.capacity(CapacityMethod::Series).unwrap();
            assert!((q - s).abs() < 1e-6, "beta={beta}: quad={q} series={s}");
        }
    }

    #[test]
    fn capacity_limits_and_closed_forms() {
        let zero = MbiosChannel::biawgn(0.0).unwrap();
        assert!(zero.capacity(CapacityMethod::Quadrature).unwrap().abs() < 1e-12);
        let strong = MbiosChannel::biawgn(20.0).unwrap();
        assert!((strong.capacity(CapacityMethod::Quadrature).unwrap() - 1.0).abs() < 1e-9);
        let bsc = MbiosChannel::bsc(0.1).unwrap();
        let expect = 1.0 - (-0.1f64 * 0.1f64.log2() - 0.9 * 0.9f64.log2());
        assert!((bsc.capacity(CapacityMethod::Quadrature).unwrap() - expect).abs() < 1e-12);
        assert_eq!(
            bsc.capacity(CapacityMethod::Series).unwrap_err(),
            ChannelError::UnsupportedMethod
        );
        let bec = MbiosChannel::bec(0.25).unwrap();
        assert!((bec.capacity(CapacityMethod::Quadrature).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn capacity_monotone_in_snr() {
        let mut prev = -1.0;
        for &nu in &[0.0, 0.2, 0.5, 1.0, 2.0, 4.0] {
            let c = MbiosChannel::biawgn(nu)
                .unwrap()
                .capacity(CapacityMethod::Quadrature)
                .unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn mutual_info_agrees_with_capacity() {
        for ch in [
            MbiosChannel::biawgn(0.8).unwrap(),
            MbiosChannel::bsc(0.1).unwrap(),
            MbiosChannel::bec(0.3).unwrap(),
        ] {
            let c = ch.capacity(CapacityMethod::Quadrature).unwrap();
            assert!((ch.mutual_info() - c).abs() < 1e-9, "{ch:?}");
        }
        // BSC(0.1) mutual information is 1 - H2(0.1) ~ 0.531.
        assert!((MbiosChannel::bsc(0.1).unwrap().mutual_info() - 0.531).abs() < 1e-3);
    }

    #[test]
    fn capacity_solver_diagonal_fixed_point() {
        // With equal assignment, the point where a single channel's
        // capacity equals the rate lies on the solver's diagonal: feeding
        // it as channel 1 must return (numerically) the same Eb/N0.
        let rate = 1.0 / 3.0;
        let cap = |nu: f64| {
            MbiosChannel::biawgn(nu)
                .unwrap()
                .capacity(CapacityMethod::Quadrature)
                .unwrap()
        };
        let nu_star = bisect(|nu| cap(nu) >= rate, 0.0, 5.0, 1e-12).unwrap();
        let limit_db = linear_to_db(nu_star / rate);
        // Known single-channel antipodal-input capacity limit at rate 1/3.
        assert!((limit_db - (-0.495)).abs() < 0.01, "{limit_db}");
        let solved = solve_capacity_ebno2(rate, limit_db, (0.5, 0.5)).unwrap();
        assert!((solved - limit_db).abs() < 1e-5, "{solved} vs {limit_db}");
    }

    #[test]
    fn capacity_solver_infeasible_cases() {
        // Channel 1 alone exceeds rate 1/3 at 10 dB.
        assert_eq!(
            solve_capacity_ebno2(1.0 / 3.0, 10.0, (0.5, 0.5)).unwrap_err(),
            ChannelError::Infeasible
        );
        // Rate too high for the split: alpha_2 cannot close the gap.
        assert_eq!(
            solve_capacity_ebno2(0.9, -10.0, (0.5, 0.5)).unwrap_err(),
            ChannelError::Infeasible
        );
    }

    #[test]
    fn set_construction_validates() {
        assert!(ParallelChannelSet::new(alloc::vec![], alloc::vec![]).is_err());
        assert!(ParallelChannelSet::new(
            alloc::vec![MbiosChannel::bsc(0.1).unwrap()],
            alloc::vec![0.9],
        )
        .is_err());
        assert!(MbiosChannel::bsc(0.6).is_err());
        assert!(MbiosChannel::biawgn(-1.0).is_err());
        assert!(MbiosChannel::bec(1.5).is_err());
    }
}
