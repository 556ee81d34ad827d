use rayon::prelude::*;

use crate::adapt::lut::{select_constellation, LutStore};
use crate::adapt::mcs::McsEntry;
use crate::channel::{simulate_ber, ChannelContext, Fading, StoppingRule};
use crate::codec::Constellation;
use crate::error::{Error, Result};

/// Which constellation the transmitter uses at each probed SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationSource {
    /// Re-select the stored optimized design nearest to the probe SNR.
    Adaptive,
    /// Fixed conventional square QAM.
    Conventional,
}

impl std::fmt::Display for ConstellationSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstellationSource::Adaptive => write!(f, "adaptive"),
            ConstellationSource::Conventional => write!(f, "conventional"),
        }
    }
}

/// Search settings for [`latency_sweep`]. Probes share RNG streams across
/// traceback windows and sources (seeded per grid index), so paired
/// comparisons see common fading and noise.
#[derive(Debug, Clone)]
pub struct LatencySearchConfig {
    pub snr_lo_db: f64,
    pub snr_hi_db: f64,
    pub resolution_db: f64,
    pub n_b: usize,
    pub stop: StoppingRule,
    pub seed: u64,
}

impl Default for LatencySearchConfig {
    fn default() -> Self {
        Self {
            snr_lo_db: 0.0,
            snr_hi_db: 40.0,
            resolution_db: 0.1,
            n_b: 920,
            stop: StoppingRule::default(),
            seed: 0,
        }
    }
}

/// One sweep result: the smallest grid SNR whose simulated BER meets the
/// target with the given traceback window, or unattained if even the top of
/// the range fails. Latency is reported both in super-trellis steps (tau)
/// and information bits (tau times bits per super-step).
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyCell {
    pub tau: usize,
    pub latency_bits: usize,
    pub target_ber: f64,
    pub required_snr_db: Option<f64>,
    pub attained: bool,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// For each (traceback window, target BER) pair, bisect on the SNR grid for
/// the smallest average SNR whose simulated BER is at or below the target.
/// Monotone-in-SNR behavior is assumed at the Monte-Carlo confidence of the
/// stopping rule.
pub fn latency_sweep(
    mcs: &McsEntry,
    source: ConstellationSource,
    store: Option<&LutStore>,
    fading: Fading,
    targets: &[f64],
    taus: &[usize],
    cfg: &LatencySearchConfig,
) -> Result<Vec<LatencyCell>> {
    let constraint_length = mcs.encoder()?.constraint_length();
    for &tau in taus {
        if tau < constraint_length {
            return Err(Error::InvalidConfig(format!(
                "traceback window {tau} below constraint length {constraint_length}"
            )));
        }
    }
    for &t in targets {
        if !(t > 0.0 && t < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "target BER {t} outside (0, 0.5)"
            )));
        }
    }
    if source == ConstellationSource::Adaptive && store.is_none() {
        return Err(Error::MissingRecord(
            "adaptive sweep requires a constellation store".into(),
        ));
    }
    if cfg.resolution_db <= 0.0 || cfg.snr_hi_db <= cfg.snr_lo_db {
        return Err(Error::InvalidConfig("bad SNR search range".into()));
    }
    let steps = ((cfg.snr_hi_db - cfg.snr_lo_db) / cfg.resolution_db).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| cfg.snr_lo_db + k as f64 * cfg.resolution_db)
        .collect();
    let l = mcs.supertrellis()?.info_bits_per_step();

    let probe = |grid_idx: usize, tau: usize| -> Result<f64> {
        let snr_db = grid[grid_idx];
        let ctx = ChannelContext::from_avg_snr_db(fading, snr_db, 1.0, 1.0)?;
        let constellation = match source {
            ConstellationSource::Adaptive => {
                select_constellation(fading, snr_db, mcs.id, store.unwrap())?
            }
            ConstellationSource::Conventional => {
                Constellation::conventional(mcs.modulation_order)?
            }
        };
        let seed = splitmix64(cfg.seed ^ (grid_idx as u64).wrapping_mul(0x51_7C_C1_B7_27_22_0A95));
        let est = simulate_ber(mcs, &constellation, &ctx, cfg.n_b, &cfg.stop, Some(tau), seed)?;
        Ok(est.ber)
    };

    let cells: Vec<(usize, f64)> = taus
        .iter()
        .flat_map(|&tau| targets.iter().map(move |&t| (tau, t)))
        .collect();
    cells
        .into_par_iter()
        .map(|(tau, target)| {
            if probe(grid.len() - 1, tau)? > target {
                return Ok(LatencyCell {
                    tau,
                    latency_bits: tau * l,
                    target_ber: target,
                    required_snr_db: None,
                    attained: false,
                });
            }
            let required = if probe(0, tau)? <= target {
                grid[0]
            } else {
                // Invariant: grid[lo] fails the target, grid[hi] meets it.
                let mut lo = 0usize;
                let mut hi = grid.len() - 1;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if probe(mid, tau)? <= target {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                grid[hi]
            };
            Ok(LatencyCell {
                tau,
                latency_bits: tau * l,
                target_ber: target,
                required_snr_db: Some(required),
                attained: true,
            })
        })
        .collect()
}
