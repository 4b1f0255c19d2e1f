//! Chirp plans and random sub-chirp hopping plans.
//!
//! A frequency-hopping chirp is built by slicing one linear FMCW chirp into
//! `n_sub` equal sub-chirps and transmitting them in a permuted order. All
//! sub-chirps share the slope and duration, and their frequency supports are
//! mutually exclusive and cover the full sweep bandwidth, which is what makes
//! the beat segments re-orderable without losing phase continuity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full parameterization of one chirp: carrier, slope, sampling, and the
/// sub-chirp split. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpPlan {
    /// Carrier (sweep start) frequency in Hz.
    pub carrier_freq_hz: f64,
    /// Chirp slope in Hz/s.
    pub slope_hz_per_s: f64,
    /// Complex ADC sampling rate in Hz.
    pub sample_rate_hz: f64,
    /// Total samples per chirp.
    pub n_samples: usize,
    /// Number of equal-duration sub-chirps.
    pub n_sub: usize,
}

impl ChirpPlan {
    /// Validates and builds a plan. `n_samples` must split evenly into
    /// `n_sub` slots.
    pub fn new(
        carrier_freq_hz: f64,
        slope_hz_per_s: f64,
        sample_rate_hz: f64,
        n_samples: usize,
        n_sub: usize,
    ) -> Result<Self> {
        if !(carrier_freq_hz.is_finite() && carrier_freq_hz >= 0.0) {
            return Err(Error::config(format!(
                "carrier_freq_hz must be finite and nonnegative, got {carrier_freq_hz}"
            )));
        }
        if !(slope_hz_per_s.is_finite() && slope_hz_per_s > 0.0) {
            return Err(Error::config(format!(
                "slope_hz_per_s must be positive, got {slope_hz_per_s}"
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::config(format!(
                "sample_rate_hz must be positive, got {sample_rate_hz}"
            )));
        }
        if n_samples == 0 {
            return Err(Error::config("n_samples must be positive"));
        }
        if n_sub == 0 || n_sub > n_samples {
            return Err(Error::config(format!(
                "n_sub must be in 1..={n_samples}, got {n_sub}"
            )));
        }
        if n_samples % n_sub != 0 {
            return Err(Error::config(format!(
                "n_samples ({n_samples}) is not divisible by n_sub ({n_sub})"
            )));
        }
        Ok(ChirpPlan {
            carrier_freq_hz,
            slope_hz_per_s,
            sample_rate_hz,
            n_samples,
            n_sub,
        })
    }

    /// Samples in one sub-chirp time slot.
    pub fn samples_per_slot(&self) -> usize {
        self.n_samples / self.n_sub
    }

    /// Full chirp duration T in seconds.
    pub fn duration_s(&self) -> f64 {
        self.n_samples as f64 / self.sample_rate_hz
    }

    /// Sub-chirp duration T_b in seconds.
    pub fn sub_duration_s(&self) -> f64 {
        self.samples_per_slot() as f64 / self.sample_rate_hz
    }

    /// Sub-chirp bandwidth B_sub = slope * T_b in Hz.
    pub fn sub_bandwidth_hz(&self) -> f64 {
        self.slope_hz_per_s * self.sub_duration_s()
    }

    /// Full sweep bandwidth in Hz. Defined as `B_sub * n_sub` so the
    /// sub-chirp supports tile the band exactly.
    pub fn bandwidth_hz(&self) -> f64 {
        self.sub_bandwidth_hz() * self.n_sub as f64
    }

    /// Distance resolution of the full-band chirp, c / (2B), in meters.
    pub fn range_resolution_m(&self) -> f64 {
        crate::scene::SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz())
    }

    /// Distance resolution of a single sub-chirp, c * n_sub / (2B), in meters.
    pub fn sub_range_resolution_m(&self) -> f64 {
        self.range_resolution_m() * self.n_sub as f64
    }

    /// Largest distance that maps below half the sampling rate,
    /// c * f_s / (4 * slope), in meters.
    pub fn max_unambiguous_range_m(&self) -> f64 {
        crate::scene::SPEED_OF_LIGHT * self.sample_rate_hz / (4.0 * self.slope_hz_per_s)
    }
}

/// A permutation of sub-chirp indices and its precomputed inverse.
///
/// `perm[j]` is the sub-chirp transmitted in time slot `j` (0-based), so the
/// slot's start frequency is `carrier + perm[j] * B_sub`. The inverse satisfies
/// `inv[perm[j]] == j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoppingPlan {
    perm: Vec<usize>,
    inv: Vec<usize>,
    seed: u64,
}

impl HoppingPlan {
    /// Identity permutation: sub-chirps in ascending frequency order, which
    /// reproduces a conventional FMCW chirp.
    pub fn identity(n_sub: usize) -> Self {
        let perm: Vec<usize> = (0..n_sub).collect();
        HoppingPlan {
            inv: perm.clone(),
            perm,
            seed: 0,
        }
    }

    /// Uniformly random permutation from a Fisher-Yates shuffle driven by a
    /// ChaCha8 stream seeded with `seed`. Identical seeds give identical
    /// plans on every platform.
    pub fn random(n_sub: usize, seed: u64) -> Result<Self> {
        if n_sub == 0 {
            return Err(Error::argument("n_sub must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n_sub).collect();
        for i in (1..n_sub).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let mut plan = HoppingPlan {
            perm,
            inv: Vec::new(),
            seed,
        };
        plan.inv = invert(&plan.perm);
        Ok(plan)
    }

    /// Builds a plan from an explicit permutation, validating that it is a
    /// bijection on `{0, .., len-1}`.
    pub fn from_perm(perm: Vec<usize>, seed: u64) -> Result<Self> {
        if perm.is_empty() {
            return Err(Error::argument("permutation must be nonempty"));
        }
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::argument(format!(
                    "not a bijection on 0..{n}: {perm:?}"
                )));
            }
            seen[p] = true;
        }
        let inv = invert(&perm);
        Ok(HoppingPlan { perm, inv, seed })
    }

    /// Sub-chirp index transmitted in each time slot.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Inverse permutation: `inverse()[i]` is the time slot carrying
    /// sub-chirp `i`.
    pub fn inverse(&self) -> &[usize] {
        &self.inv
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &p)| p == j)
    }
}

impl<'de> Deserialize<'de> for HoppingPlan {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            perm: Vec<usize>,
            #[serde(default)]
            #[allow(dead_code)]
            inv: Vec<usize>,
            #[serde(default)]
            seed: u64,
        }
        let raw = Raw::deserialize(deserializer)?;
        HoppingPlan::from_perm(raw.perm, raw.seed).map_err(serde::de::Error::custom)
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (j, &p) in perm.iter().enumerate() {
        inv[p] = j;
    }
    inv
}

/// Start frequency of every time slot: `carrier + perm[j] * B_sub`.
///
/// Sorting the result ascending always reproduces the conventional plan's
/// frequency ladder, whatever the permutation.
pub fn subchirp_start_freqs(plan: &ChirpPlan, hopping: &HoppingPlan) -> Result<Vec<f64>> {
    if hopping.len() != plan.n_sub {
        return Err(Error::config(format!(
            "hopping plan covers {} slots but chirp plan has {} sub-chirps",
            hopping.len(),
            plan.n_sub
        )));
    }
    let b_sub = plan.sub_bandwidth_hz();
    Ok(hopping
        .perm()
        .iter()
        .map(|&k| plan.carrier_freq_hz + k as f64 * b_sub)
        .collect())
}
