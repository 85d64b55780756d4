//! Counter-based randomness.
//!
//! Every random quantity attached to a lattice location (a site rate, a cell
//! weight, a coupling variable) is a pure function of `(seed, stream, i, j)`.
//! Tables can therefore be grown, trimmed or revisited without perturbing
//! values that were already drawn, and replicas never share state.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Independent families of per-location draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    SiteRate = 1,
    Weight = 2,
    Coupling = 3,
}

/// SplitMix64 finaliser.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the counter cell `(seed, stream, i, j)`.
#[inline(always)]
pub fn cell_key(seed: u64, stream: Stream, i: i64, j: i64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN_GAMMA);
    h = mix64(h ^ (stream as u64).wrapping_mul(GOLDEN_GAMMA));
    h = mix64(h ^ (i as u64).wrapping_add(GOLDEN_GAMMA));
    mix64(h ^ (j as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// The `k`-th 64-bit word drawn from a cell key. Distinct `k` give disjoint substreams.
#[inline(always)]
pub fn substream(key: u64, k: u64) -> u64 {
    mix64(key ^ (k.wrapping_add(1)).wrapping_mul(GOLDEN_GAMMA))
}

/// Uniform on the open interval (0, 1); never returns 0 or 1.
#[inline(always)]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Inverse-CDF exponential draw with the given rate.
#[inline(always)]
pub fn exponential(bits: u64, rate: f64) -> f64 {
    -open_unit(bits).ln() / rate
}
