//! Monte-Carlo link simulation: Nakagami-m fast fading, AWGN, frame
//! transmission, coherent reception, and BER estimation.
//!
//! Every frame draws from its own counter-based RNG stream derived from
//! (seed, frame index), so results are identical for any parallelism degree.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::adapt::McsEntry;
use crate::codec::{map_symbols, puncture, viterbi_decode, Constellation, DecoderConfig};
use crate::error::{Error, Result};

/// Fading family: integer-m Nakagami, or the m -> infinity limit (AWGN).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fading {
    Nakagami(u32),
    Awgn,
}

impl Fading {
    pub fn is_awgn(&self) -> bool {
        matches!(self, Fading::Awgn)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Fading::Nakagami(0) => Err(Error::InvalidConfig(
                "Nakagami m must be a positive integer".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Fading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fading::Nakagami(m) => write!(f, "{m}"),
            Fading::Awgn => write!(f, "awgn"),
        }
    }
}

/// Channel parameters: fading order, average fading power, total noise
/// variance (N0/2 per dimension), and the symbol energy budget. The average
/// received SNR is `omega * e_s / n0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelContext {
    pub fading: Fading,
    pub omega: f64,
    pub n0: f64,
    pub e_s: f64,
}

impl ChannelContext {
    pub fn new(fading: Fading, omega: f64, n0: f64, e_s: f64) -> Result<Self> {
        fading.validate()?;
        if omega <= 0.0 || n0 <= 0.0 || e_s <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "omega, n0, e_s must be positive (got {omega}, {n0}, {e_s})"
            )));
        }
        Ok(Self {
            fading,
            omega,
            n0,
            e_s,
        })
    }

    /// Context pinned to an average SNR in dB, with omega and e_s given.
    pub fn from_avg_snr_db(fading: Fading, snr_db: f64, omega: f64, e_s: f64) -> Result<Self> {
        let snr = 10f64.powf(snr_db / 10.0);
        Self::new(fading, omega, omega * e_s / snr, e_s)
    }

    /// Noise-free context for exact round-trip simulations; the analytical
    /// bound rejects it (it needs n0 > 0), the simulator does not.
    pub fn noiseless(fading: Fading, omega: f64, e_s: f64) -> Result<Self> {
        fading.validate()?;
        if omega <= 0.0 || e_s <= 0.0 {
            return Err(Error::InvalidConfig("omega and e_s must be positive".into()));
        }
        Ok(Self {
            fading,
            omega,
            n0: 0.0,
            e_s,
        })
    }

    pub fn avg_snr(&self) -> f64 {
        if self.n0 == 0.0 {
            f64::INFINITY
        } else {
            self.omega * self.e_s / self.n0
        }
    }

    pub fn avg_snr_db(&self) -> f64 {
        10.0 * self.avg_snr().log10()
    }
}

/// Draw one fading amplitude: sqrt of a Gamma(m, omega/m) power, so
/// `E[h^2] = omega`. The AWGN limit returns sqrt(omega) deterministically.
pub fn nakagami_gain<R: Rng + ?Sized>(ctx: &ChannelContext, rng: &mut R) -> f64 {
    match ctx.fading {
        Fading::Awgn => ctx.omega.sqrt(),
        Fading::Nakagami(m) => {
            // Sum of m unit exponentials is Gamma(m, 1) for integer m.
            let mut g = 0.0f64;
            for _ in 0..m {
                let u: f64 = rng.gen();
                g -= (1.0 - u).ln();
            }
            (g * ctx.omega / m as f64).sqrt()
        }
    }
}

/// One transmitted frame with everything the receiver sees.
#[derive(Debug, Clone)]
pub struct Frame {
    pub info_bits: Vec<bool>,
    pub coded_bits: Vec<bool>,
    pub symbols: Vec<Complex64>,
    pub gains: Vec<f64>,
    pub received: Vec<Complex64>,
}

/// Encode, puncture, map, and push a frame through the fading channel
/// (`r_i = h_i s_i + n_i`, noise variance N0/2 per dimension, one
/// independent gain per symbol). Beyond the zero tail, the frame is padded
/// with zero bits to a whole number of super-steps; pad bits are excluded
/// from every error count.
pub fn transmit_frame<R: Rng + ?Sized>(
    info_bits: &[bool],
    mcs: &McsEntry,
    constellation: &Constellation,
    ctx: &ChannelContext,
    rng: &mut R,
) -> Result<Frame> {
    if constellation.order() != mcs.modulation_order {
        return Err(Error::InvalidConstellation(format!(
            "constellation order {} does not match MCS modulation order {}",
            constellation.order(),
            mcs.modulation_order
        )));
    }
    let encoder = mcs.encoder()?;
    let pad = mcs.frame_pad_len(info_bits.len())?;
    let mut padded = info_bits.to_vec();
    padded.extend(std::iter::repeat(false).take(pad));
    let coded = encoder.encode(&padded);
    let kept = match mcs.puncture.as_ref() {
        Some(p) => puncture(&coded, p)?,
        None => coded,
    };
    let symbols = map_symbols(&kept, constellation)?;

    let noise_sigma = (ctx.n0 / 2.0).sqrt();
    let mut gains = Vec::with_capacity(symbols.len());
    let mut received = Vec::with_capacity(symbols.len());
    for &s in &symbols {
        let h = nakagami_gain(ctx, rng);
        let n_re: f64 = rng.sample::<f64, _>(StandardNormal) * noise_sigma;
        let n_im: f64 = rng.sample::<f64, _>(StandardNormal) * noise_sigma;
        gains.push(h);
        received.push(s * h + Complex64::new(n_re, n_im));
    }
    Ok(Frame {
        info_bits: info_bits.to_vec(),
        coded_bits: kept,
        symbols,
        gains,
        received,
    })
}

/// Monte-Carlo stopping rule: run until `min_errors` bit errors have been
/// seen or `max_frames` frames are exhausted, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_errors: 200,
            max_frames: 100_000,
        }
    }
}

/// BER estimate with the independent-error standard error
/// `sqrt(ber (1 - ber) / bits)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub bit_errors: u64,
    pub bits_simulated: u64,
    pub ber: f64,
    pub std_error: f64,
    pub frames: u64,
}

impl BerEstimate {
    fn from_counts(bit_errors: u64, bits_simulated: u64, frames: u64) -> Self {
        let ber = if bits_simulated == 0 {
            0.0
        } else {
            bit_errors as f64 / bits_simulated as f64
        };
        let std_error = if bits_simulated == 0 {
            0.0
        } else {
            (ber * (1.0 - ber) / bits_simulated as f64).sqrt()
        };
        Self {
            bit_errors,
            bits_simulated,
            ber,
            std_error,
            frames,
        }
    }
}

/// Frames per stopping-rule check. Fixed so that results do not depend on
/// the parallelism degree.
const FRAME_BATCH: u64 = 64;

/// Simulate random frames through encode -> channel -> Viterbi and count
/// information-bit errors (tail and alignment pad excluded). `traceback`
/// of `None` decodes with a window covering the whole frame (exact ML).
/// Deterministic for a given seed.
pub fn simulate_ber(
    mcs: &McsEntry,
    constellation: &Constellation,
    ctx: &ChannelContext,
    n_b: usize,
    stop: &StoppingRule,
    traceback: Option<usize>,
    seed: u64,
) -> Result<BerEstimate> {
    if stop.max_frames == 0 {
        return Err(Error::InvalidConfig("max_frames must be >= 1".into()));
    }
    if n_b == 0 {
        return Err(Error::InvalidConfig("frame size must be >= 1".into()));
    }
    let encoder = mcs.encoder()?;
    let trellis = mcs.supertrellis()?;
    let pad = mcs.frame_pad_len(n_b)?;
    let num_steps = (n_b + pad + encoder.tail_len()) / trellis.info_bits_per_step();
    let config = DecoderConfig::new(traceback.unwrap_or(num_steps))?;

    let mut frames = 0u64;
    let mut errors = 0u64;
    while frames < stop.max_frames && errors < stop.min_errors {
        let batch = FRAME_BATCH.min(stop.max_frames - frames);
        let batch_errors: u64 = (frames..frames + batch)
            .into_par_iter()
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx);
                let info: Vec<bool> = (0..n_b).map(|_| rng.gen::<bool>()).collect();
                let frame = transmit_frame(&info, mcs, constellation, ctx, &mut rng)
                    .expect("frame parameters validated before the loop");
                let decoded = viterbi_decode(
                    &frame.received,
                    &frame.gains,
                    constellation,
                    &trellis,
                    &config,
                )
                .expect("decoder parameters validated before the loop");
                decoded
                    .iter()
                    .zip(&info)
                    .filter(|(a, b)| a != b)
                    .count() as u64
            })
            .sum();
        errors += batch_errors;
        frames += batch;
    }
    Ok(BerEstimate::from_counts(errors, frames * n_b as u64, frames))
}

/// Closed-form BER of coherent BPSK over Rayleigh fading at average SNR
/// `snr` (linear): `0.5 (1 - sqrt(snr / (1 + snr)))`.
pub fn rayleigh_bpsk_ber(snr: f64) -> f64 {
    0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
}
