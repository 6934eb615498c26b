//! Ensemble-average weight enumerators, stored in the natural-log domain.
//!
//! An [`Iowe`] maps `(w, h)` to `ln A_{w,h}`, the log of the average number
//! of codewords with input weight `w` and output weight `h`. Ensemble
//! averages over uniform interleavers are fractional, so entries are real
//! numbers; they are also astronomically large at moderate block lengths,
//! which is why nothing here ever leaves the log domain.
//!
//! Provided ensembles: binary random linear codes, non-systematic
//! repeat-accumulate codes (repetition, interleaver, accumulator), and the
//! rate-1/3 systematic punctured constructions built from a six-fold
//! repetition, a 3-bit single-parity-check stage and an accumulator,
//! optionally preceded by a partial-accumulate precoder. Component
//! enumerators and uniform-interleaver concatenation are exposed so the
//! pipelines can be rebuilt and cross-checked piecewise.
//!
//! [`ensemble_oracle`] averages over every interleaver permutation by brute
//! force and is the ground truth the closed forms are tested against.

// Unused under `cfg(test)`: the harness links `std`, whose inherent float
// methods shadow the trait.
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::numerics::{log_binomial_i, log_sum_exp, LogSum, LOG_ZERO};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

/// Errors from enumerator construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectraError {
    /// Parameter outside its admissible range.
    InvalidParameter(&'static str),
    /// Serial concatenation with `outer.n != inner.k`.
    DimensionMismatch { outer_n: u32, inner_k: u32 },
    /// Exhaustive interleaver enumeration beyond the supported size.
    OracleTooLarge { interleaver_len: u32 },
}

impl core::fmt::Display for SpectraError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpectraError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            SpectraError::DimensionMismatch { outer_n, inner_k } => {
                write!(f, "outer output length {outer_n} != inner input length {inner_k}")
            }
            SpectraError::OracleTooLarge { interleaver_len } => {
                write!(f, "oracle limited to interleaver length 10, got {interleaver_len}")
            }
        }
    }
}

impl core::error::Error for SpectraError {}

/// Input-output weight enumerator of a code ensemble with `k` input and
/// `n` output bits, sparse over `(w, h)` in the log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Iowe {
    k: u32,
    n: u32,
    entries: BTreeMap<(u32, u32), f64>,
}

impl Iowe {
    fn empty(k: u32, n: u32) -> Self {
        Iowe { k, n, entries: BTreeMap::new() }
    }

    /// Builds an enumerator from explicit log-domain entries.
    ///
    /// Keys must satisfy `w <= k`, `h <= n`; the all-zero codeword entry
    /// `(0,0)` must be `0` in the log domain and is inserted when absent.
    pub fn from_log_entries(
        k: u32,
        n: u32,
        entries: impl IntoIterator<Item = ((u32, u32), f64)>,
    ) -> Result<Self, SpectraError> {
        let mut iowe = Iowe::empty(k, n);
        for ((w, h), lv) in entries {
            if w > k || h > n {
                return Err(SpectraError::InvalidParameter("entry key outside (k, n)"));
            }
            if lv.is_nan() || lv == f64::INFINITY {
                return Err(SpectraError::InvalidParameter("entry value must be finite or -inf"));
            }
            if (w, h) == (0, 0) && lv != 0.0 {
                return Err(SpectraError::InvalidParameter("all-zero codeword entry must be 1"));
            }
            if lv > LOG_ZERO {
                iowe.entries.insert((w, h), lv);
            }
        }
        iowe.entries.insert((0, 0), 0.0);
        Ok(iowe)
    }

    /// Adds `exp(log_value)` to the `(w, h)` slot.
    fn accumulate(&mut self, w: u32, h: u32, log_value: f64) {
        if log_value == LOG_ZERO {
            return;
        }
        debug_assert!(w <= self.k && h <= self.n);
        self.entries
            .entry((w, h))
            .and_modify(|slot| *slot = crate::numerics::log_add(*slot, log_value))
            .or_insert(log_value);
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `ln A_{w,h}`, [`LOG_ZERO`] for absent entries.
    pub fn log_get(&self, w: u32, h: u32) -> f64 {
        self.entries.get(&(w, h)).copied().unwrap_or(LOG_ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries.iter().map(|(&(w, h), &lv)| (w, h, lv))
    }

    /// `ln` of the total codeword count; `k ln 2` for a complete ensemble.
    pub fn log_total(&self) -> f64 {
        let mut sum = LogSum::new();
        for (_, _, lv) in self.iter() {
            sum.push(lv);
        }
        sum.total()
    }

    /// Marginal distance spectrum `A_h = sum_w A_{w,h}`.
    pub fn marginalize(&self) -> DistanceSpectrum {
        let mut log_a = vec![LOG_ZERO; self.n as usize + 1];
        for (_, h, lv) in self.iter() {
            log_a[h as usize] = crate::numerics::log_add(log_a[h as usize], lv);
        }
        DistanceSpectrum { n: self.n, k: self.k, log_a, log_a_bit: None }
    }

    /// Bit-multiplicity marginal `A'_h = sum_w (w/k) A_{w,h}` (log domain,
    /// indexed by `h`), the spectrum driving bit-error bounds.
    pub fn bit_weight(&self) -> Result<Vec<f64>, SpectraError> {
        if self.k == 0 {
            return Err(SpectraError::InvalidParameter("bit weighting needs k >= 1"));
        }
        let lk = (self.k as f64).ln();
        let mut log_ab = vec![LOG_ZERO; self.n as usize + 1];
        for (w, h, lv) in self.iter() {
            if w == 0 {
                continue;
            }
            let term = (w as f64).ln() - lk + lv;
            log_ab[h as usize] = crate::numerics::log_add(log_ab[h as usize], term);
        }
        Ok(log_ab)
    }

    /// Marginal spectrum carrying both `A_h` and `A'_h`.
    pub fn to_spectrum(&self) -> DistanceSpectrum {
        let mut spectrum = self.marginalize();
        if self.k > 0 {
            spectrum.log_a_bit = Some(self.bit_weight().expect("k >= 1"));
        }
        spectrum
    }
}

/// Distance spectrum of an ensemble: `ln A_h` for `h = 0..=n`, optionally
/// with the bit-multiplicity spectrum `ln A'_h` (`A'_h <= A_h`).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpectrum {
    n: u32,
    k: u32,
    log_a: Vec<f64>,
    log_a_bit: Option<Vec<f64>>,
}

impl DistanceSpectrum {
    pub fn new(
        n: u32,
        k: u32,
        log_a: Vec<f64>,
        log_a_bit: Option<Vec<f64>>,
    ) -> Result<Self, SpectraError> {
        if log_a.len() != n as usize + 1 {
            return Err(SpectraError::InvalidParameter("log_a must have n + 1 entries"));
        }
        if log_a[0] != 0.0 {
            return Err(SpectraError::InvalidParameter("A_0 must be 1"));
        }
        if let Some(bit) = &log_a_bit {
            if bit.len() != n as usize + 1 {
                return Err(SpectraError::InvalidParameter("log_a_bit must have n + 1 entries"));
            }
            for (h, (&b, &a)) in bit.iter().zip(log_a.iter()).enumerate() {
                if h > 0 && b > a + 1e-9 {
                    return Err(SpectraError::InvalidParameter("A'_h must not exceed A_h"));
                }
            }
        }
        Ok(DistanceSpectrum { n, k, log_a, log_a_bit })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// `ln A_h`.
    pub fn log_a(&self, h: u32) -> f64 {
        self.log_a.get(h as usize).copied().unwrap_or(LOG_ZERO)
    }

    pub fn log_a_slice(&self) -> &[f64] {
        &self.log_a
    }

    /// `ln A'_h` when bit weighting is available.
    pub fn log_a_bit(&self, h: u32) -> Option<f64> {
        self.log_a_bit.as_ref().map(|v| v.get(h as usize).copied().unwrap_or(LOG_ZERO))
    }

    pub fn log_a_bit_slice(&self) -> Option<&[f64]> {
        self.log_a_bit.as_deref()
    }

    pub fn has_bit_weights(&self) -> bool {
        self.log_a_bit.is_some()
    }

    /// `ln sum_h A_h`.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.log_a)
    }
}

/// Average distance spectrum of the binary random linear ensemble:
/// `A_0 = 1`, `A_h = C(n,h) 2^{-n(1-R)}` for `h >= 1`. `n R` must be
/// integral. The total deviates from `2^{nR}` by `1 - 2^{-n(1-R)}`, so the
/// exact-count invariant holds only asymptotically for this ensemble.
pub fn random_code_spectrum(n: u32, rate: f64) -> Result<DistanceSpectrum, SpectraError> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(SpectraError::InvalidParameter("rate must lie in (0, 1)"));
    }
    let k_real = n as f64 * rate;
    let k = k_real.round();
    if (k_real - k).abs() > 1e-9 || n == 0 {
        return Err(SpectraError::InvalidParameter("n * rate must be a positive integer"));
    }
    let redundancy = (n as f64 - k) * LN_2;
    let mut log_a = vec![0.0; n as usize + 1];
    for h in 1..=n {
        log_a[h as usize] = log_binomial_i(n as i64, h as i64) - redundancy;
    }
    Ok(DistanceSpectrum { n, k: k as u32, log_a, log_a_bit: None })
}

// ---------------------------------------------------------------------------
// Component codes and concatenation
// ---------------------------------------------------------------------------

/// Component encoders used by the repeat-accumulate family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentCode {
    /// `q`-fold repetition of `blocks` input bits.
    Rep { q: u32, blocks: u32 },
    /// Rate-1 differential encoder (accumulator) over `len` bits.
    Acc { len: u32 },
    /// Parity of each consecutive group of `p` bits, `blocks` groups.
    Spc { p: u32, blocks: u32 },
}

/// Exact IOWE of a component code.
///
/// Repetition and accumulator enumerators are closed-form; the
/// single-parity-check enumerator convolves the per-group weight polynomial
/// across groups, which keeps it exact for any `p`.
pub fn component_iowe(code: ComponentCode) -> Result<Iowe, SpectraError> {
    match code {
        ComponentCode::Rep { q, blocks } => {
            if q == 0 {
                return Err(SpectraError::InvalidParameter("repetition factor must be >= 1"));
            }
            let mut iowe = Iowe::empty(blocks, q * blocks);
            for w in 0..=blocks {
                iowe.accumulate(w, q * w, log_binomial_i(blocks as i64, w as i64));
            }
            Ok(iowe)
        }
        ComponentCode::Acc { len } => {
            let mut iowe = Iowe::empty(len, len);
            iowe.accumulate(0, 0, 0.0);
            for w in 1..=len {
                let even = (w / 2) as i64;
                let odd = ((w + 1) / 2) as i64 - 1;
                for d in 1..=len {
                    let lv = log_binomial_i((len - d) as i64, even)
                        + log_binomial_i(d as i64 - 1, odd);
                    iowe.accumulate(w, d, lv);
                }
            }
            Ok(iowe)
        }
        ComponentCode::Spc { p, blocks } => {
            if p == 0 {
                return Err(SpectraError::InvalidParameter("parity group size must be >= 1"));
            }
            let (pb, b) = (p as usize * blocks as usize, blocks as usize);
            // group polynomial: input weight i contributes parity i mod 2
            // with multiplicity C(p, i)
            let group: Vec<(usize, usize, f64)> = (0..=p)
                .map(|i| (i as usize, (i % 2) as usize, log_binomial_i(p as i64, i as i64)))
                .collect();
            let mut cur = vec![vec![LOG_ZERO; b + 1]; pb + 1];
            cur[0][0] = 0.0;
            for t in 0..b {
                let mut next = vec![vec![LOG_ZERO; b + 1]; pb + 1];
                for w in 0..=(p as usize * t) {
                    for d in 0..=t {
                        let lv = cur[w][d];
                        if lv == LOG_ZERO {
                            continue;
                        }
                        for &(i, parity, lc) in &group {
                            let slot = &mut next[w + i][d + parity];
                            *slot = crate::numerics::log_add(*slot, lv + lc);
                        }
                    }
                }
                cur = next;
            }
            let mut iowe = Iowe::empty(p * blocks, blocks);
            for (w, row) in cur.iter().enumerate() {
                for (d, &lv) in row.iter().enumerate() {
                    iowe.accumulate(w as u32, d as u32, lv);
                }
            }
            Ok(iowe)
        }
    }
}

/// IOWE of the identity code on `n` bits, `A_{w,w} = C(n, w)`.
pub fn identity_iowe(n: u32) -> Iowe {
    let mut iowe = Iowe::empty(n, n);
    for w in 0..=n {
        iowe.accumulate(w, w, log_binomial_i(n as i64, w as i64));
    }
    iowe
}

/// Average IOWE of `outer` followed by a uniform interleaver and `inner`:
/// `A_{w,d} = sum_h outer_{w,h} inner_{h,d} / C(inner.k, h)`.
pub fn serial_concat(outer: &Iowe, inner: &Iowe) -> Result<Iowe, SpectraError> {
    if outer.n != inner.k {
        return Err(SpectraError::DimensionMismatch { outer_n: outer.n, inner_k: inner.k });
    }
    let mut out = Iowe::empty(outer.k, inner.n);
    for (&(w, h), &lv_outer) in &outer.entries {
        let lc = log_binomial_i(inner.k as i64, h as i64);
        for (&(_, d), &lv_inner) in inner.entries.range((h, 0)..=(h, inner.n)) {
            out.accumulate(w, d, lv_outer + lv_inner - lc);
        }
    }
    Ok(out)
}

/// Prepends the input bits to the output: `(w, d) -> (w, w + d)`.
fn add_systematic(iowe: &Iowe) -> Iowe {
    let mut out = Iowe::empty(iowe.k, iowe.k + iowe.n);
    for (w, d, lv) in iowe.iter() {
        out.accumulate(w, w + d, lv);
    }
    out
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

/// Average IOWE of the non-systematic repeat-accumulate ensemble:
/// `q`-fold repetition of `n_info` bits, uniform interleaver, accumulator.
///
/// `A_{w,h} = C(N,w) C(qN-h, floor(qw/2)) C(h-1, ceil(qw/2)-1) / C(qN, qw)`
/// for `w >= 1`; the binomials vanish outside the admissible support.
pub fn nsra_iowe(n_info: u32, q: u32) -> Result<Iowe, SpectraError> {
    if n_info == 0 || q < 2 {
        return Err(SpectraError::InvalidParameter("need n_info >= 1 and q >= 2"));
    }
    let (n_big, qn) = (n_info as i64, (q * n_info) as i64);
    let mut iowe = Iowe::empty(n_info, q * n_info);
    iowe.accumulate(0, 0, 0.0);
    for w in 1..=n_info {
        let qw = (q * w) as i64;
        let even = qw / 2;
        let odd = (qw + 1) / 2 - 1;
        let lead = log_binomial_i(n_big, w as i64) - log_binomial_i(qn, qw);
        for h in 1..=(q * n_info) {
            let lv = lead
                + log_binomial_i(qn - h as i64, even)
                + log_binomial_i(h as i64 - 1, odd);
            iowe.accumulate(w, h, lv);
        }
    }
    Ok(iowe)
}

/// Average IOWE of the rate-1/3 systematic punctured repeat-accumulate
/// ensemble on `n_info` input bits: six-fold repetition, uniform
/// interleaver, parity over groups of three, accumulator; output is the
/// `n_info` systematic bits followed by the `2 n_info` accumulator bits.
pub fn spra_iowe(n_info: u32) -> Result<Iowe, SpectraError> {
    if n_info == 0 {
        return Err(SpectraError::InvalidParameter("need n_info >= 1"));
    }
    let rep = component_iowe(ComponentCode::Rep { q: 6, blocks: n_info })?;
    let spc = component_iowe(ComponentCode::Spc { p: 3, blocks: 2 * n_info })?;
    let acc = component_iowe(ComponentCode::Acc { len: 2 * n_info })?;
    let punctured = serial_concat(&serial_concat(&rep, &spc)?, &acc)?;
    Ok(add_systematic(&punctured))
}

/// IOWE of the systematic partial-accumulate precoder on `n_info` bits:
/// `m_direct` bits pass through unchanged, the rest run through an
/// accumulator. `m_direct = n_info` reduces to the identity code.
pub fn precoder_iowe(n_info: u32, m_direct: u32) -> Result<Iowe, SpectraError> {
    if m_direct > n_info {
        return Err(SpectraError::InvalidParameter("m_direct must not exceed n_info"));
    }
    let acc = component_iowe(ComponentCode::Acc { len: n_info - m_direct })?;
    let mut iowe = Iowe::empty(n_info, n_info);
    for m in 0..=m_direct {
        let lc = log_binomial_i(m_direct as i64, m as i64);
        for (w, d, lv) in acc.iter() {
            iowe.accumulate(w + m, d + m, lc + lv);
        }
    }
    Ok(iowe)
}

/// Average IOWE of the precoded rate-1/3 ensemble: the precoder feeds the
/// systematic punctured repeat-accumulate encoder through a uniform
/// interleaver, but the transmitted systematic bits are the original ones,
/// so the inner systematic weight `l` is swapped out for `w`:
/// `A_{w,d} = sum_l pre_{w,l} spra_{l, d-w+l} / C(N, l)`.
pub fn spara_iowe(n_info: u32, m_direct: u32) -> Result<Iowe, SpectraError> {
    let pre = precoder_iowe(n_info, m_direct)?;
    let spra = spra_iowe(n_info)?;
    let mut out = Iowe::empty(n_info, 3 * n_info);
    for (&(w, l), &lv_pre) in &pre.entries {
        let lc = log_binomial_i(n_info as i64, l as i64);
        for (&(_, dl), &lv_spra) in spra.entries.range((l, 0)..=(l, spra.n)) {
            debug_assert!(dl >= l, "systematic inner output weight");
            out.accumulate(w, w + (dl - l), lv_pre + lv_spra - lc);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

/// Ensembles the brute-force oracle can enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Nsra { n_info: u32, q: u32 },
    Spra { n_info: u32 },
    Spara { n_info: u32, m_direct: u32 },
}

const ORACLE_MAX_INTERLEAVER: u32 = 10;

/// Exact ensemble-average IOWE by enumerating every interleaver
/// permutation and every input word. Ground truth for the closed forms;
/// limited to interleaver length 10 (3.6M permutations).
pub fn ensemble_oracle(kind: OracleKind) -> Result<Iowe, SpectraError> {
    let (n_info, interleaver_len) = match kind {
        OracleKind::Nsra { n_info, q } => {
            if n_info == 0 || q < 2 {
                return Err(SpectraError::InvalidParameter("need n_info >= 1 and q >= 2"));
            }
            (n_info, q * n_info)
        }
        OracleKind::Spra { n_info } => {
            if n_info == 0 {
                return Err(SpectraError::InvalidParameter("need n_info >= 1"));
            }
            (n_info, 6 * n_info)
        }
        OracleKind::Spara { n_info, m_direct } => {
            if n_info == 0 || m_direct > n_info {
                return Err(SpectraError::InvalidParameter("need 0 <= m_direct <= n_info >= 1"));
            }
            (n_info, 6 * n_info)
        }
    };
    if interleaver_len > ORACLE_MAX_INTERLEAVER {
        return Err(SpectraError::OracleTooLarge { interleaver_len });
    }

    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut n_perms: u64 = 0;
    for_each_permutation(interleaver_len as usize, |perm| {
        n_perms += 1;
        for u in 0u32..(1 << n_info) {
            let (w, d) = oracle_encode(kind, u, perm);
            *counts.entry((w, d)).or_insert(0) += 1;
        }
    });

    let n_out = match kind {
        OracleKind::Nsra { q, .. } => q * n_info,
        _ => 3 * n_info,
    };
    let log_perms = (n_perms as f64).ln();
    let mut iowe = Iowe::empty(n_info, n_out);
    for (&(w, d), &c) in &counts {
        iowe.accumulate(w, d, (c as f64).ln() - log_perms);
    }
    Ok(iowe)
}

/// Encodes one input word under one fixed interleaver; returns
/// `(input weight, output weight)`.
fn oracle_encode(kind: OracleKind, u: u32, perm: &[usize]) -> (u32, u32) {
    let (n_info, repetitions) = match kind {
        OracleKind::Nsra { n_info, q } => (n_info, q),
        OracleKind::Spra { n_info } | OracleKind::Spara { n_info, .. } => (n_info, 6),
    };
    let bits: Vec<u8> = (0..n_info).map(|i| ((u >> i) & 1) as u8).collect();
    let w = bits.iter().map(|&b| b as u32).sum();

    let stage = match kind {
        OracleKind::Spara { m_direct, .. } => {
            // partial accumulator ahead of the repetition stage
            let mut v = bits.clone();
            let mut running = 0u8;
            for bit in v.iter_mut().skip(m_direct as usize) {
                running ^= *bit;
                *bit = running;
            }
            v
        }
        _ => bits,
    };

    let mut repeated = Vec::with_capacity(perm.len());
    for &b in &stage {
        for _ in 0..repetitions {
            repeated.push(b);
        }
    }
    let interleaved: Vec<u8> = perm.iter().map(|&i| repeated[i]).collect();

    match kind {
        OracleKind::Nsra { .. } => {
            let mut running = 0u8;
            let mut h = 0u32;
            for b in interleaved {
                running ^= b;
                h += running as u32;
            }
            (w, h)
        }
        OracleKind::Spra { .. } | OracleKind::Spara { .. } => {
            let mut running = 0u8;
            let mut h = w;
            for group in interleaved.chunks(3) {
                running ^= group[0] ^ group[1] ^ group[2];
                h += running as u32;
            }
            (w, h)
        }
    }
}

/// Heap's algorithm, calling `visit` on every permutation of `0..len`.
fn for_each_permutation(len: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..len).collect();
    let mut c = vec![0usize; len];
    visit(&a);
    let mut i = 0;
    while i < len {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
