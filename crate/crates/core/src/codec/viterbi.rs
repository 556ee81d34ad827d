use num_complex::Complex64;

use crate::codec::constellation::Constellation;
use crate::codec::trellis::SuperTrellis;
use crate::error::{Error, Result};

/// Decoder settings. `traceback_window` is the back-search limit in
/// super-trellis steps: a step's decision is committed once the decoder is
/// that many steps past it. A window at least as long as the frame makes the
/// decoder an exact ML sequence detector over the trellis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderConfig {
    pub traceback_window: usize,
}

impl DecoderConfig {
    pub fn new(traceback_window: usize) -> Result<Self> {
        if traceback_window == 0 {
            return Err(Error::InvalidConfig("traceback window must be >= 1".into()));
        }
        Ok(Self { traceback_window })
    }
}

/// Soft-decision Viterbi decoding over the supertrellis with perfect CSI.
///
/// The branch metric of a super-transition is the summed squared Euclidean
/// distance `sum_k |r_k - h_k s_k|^2` over its symbols. Paths start from
/// state 0. Metric ties are broken toward the lower-indexed predecessor
/// state (and then the lower input word), so decoding is deterministic.
///
/// Returns the decoded information bits, `info_bits_per_step` per super-step.
pub fn viterbi_decode(
    received: &[Complex64],
    csi: &[f64],
    constellation: &Constellation,
    trellis: &SuperTrellis,
    config: &DecoderConfig,
) -> Result<Vec<bool>> {
    if csi.len() != received.len() {
        return Err(Error::LengthMismatch(format!(
            "{} CSI gains for {} received samples",
            csi.len(),
            received.len()
        )));
    }
    if constellation.bits_per_symbol() != trellis.bits_per_symbol() {
        return Err(Error::InvalidConstellation(format!(
            "constellation order {} does not match trellis symbol alphabet {}",
            constellation.order(),
            trellis.modulation_order()
        )));
    }
    if config.traceback_window == 0 {
        return Err(Error::InvalidConfig("traceback window must be >= 1".into()));
    }
    let spt = trellis.symbols_per_step();
    if received.len() % spt != 0 {
        return Err(Error::LengthMismatch(format!(
            "{} samples do not fill {}-symbol super-steps",
            received.len(),
            spt
        )));
    }
    let num_steps = received.len() / spt;
    let num_states = trellis.num_states();
    let order = constellation.order();
    let tau = config.traceback_window;
    let l = trellis.info_bits_per_step();

    let mut metrics = vec![f64::INFINITY; num_states];
    metrics[0] = 0.0;
    let mut next_metrics = vec![f64::INFINITY; num_states];
    // Survivor memory: (predecessor state, input word) per step per state.
    let mut survivors: Vec<Vec<(u32, u32)>> = Vec::with_capacity(num_steps);
    let mut decided: Vec<u32> = vec![u32::MAX; num_steps];
    let mut dist = vec![0.0f64; spt * order];

    for step in 0..num_steps {
        // Per-position distance tables: dist[k][label] = |r_k - h_k s_label|^2.
        for k in 0..spt {
            let r = received[step * spt + k];
            let h = csi[step * spt + k];
            for label in 0..order {
                dist[k * order + label] = (r - constellation.point(label) * h).norm_sqr();
            }
        }
        next_metrics.fill(f64::INFINITY);
        let mut surv = vec![(u32::MAX, u32::MAX); num_states];
        for state in 0..num_states {
            let pm = metrics[state];
            if !pm.is_finite() {
                continue;
            }
            for tr in trellis.transitions(state) {
                let mut bm = pm;
                for (k, &label) in tr.symbols.iter().enumerate() {
                    bm += dist[k * order + label];
                }
                if bm < next_metrics[tr.next_state] {
                    next_metrics[tr.next_state] = bm;
                    surv[tr.next_state] = (state as u32, tr.input as u32);
                }
            }
        }
        std::mem::swap(&mut metrics, &mut next_metrics);
        survivors.push(surv);

        // Fixed-lag release: commit the decision tau steps back by tracing
        // from the currently best state.
        if step + 1 > tau {
            let release = step - tau;
            let mut s = best_state(&metrics);
            for back in (release..=step).rev() {
                let (prev, input) = survivors[back][s];
                if back == release {
                    decided[release] = input;
                }
                s = prev as usize;
            }
        }
    }

    // Final flush from the best end state through the still-open suffix.
    if num_steps > 0 {
        let mut s = best_state(&metrics);
        for back in (0..num_steps).rev() {
            let (prev, input) = survivors[back][s];
            if decided[back] == u32::MAX {
                decided[back] = input;
            }
            s = prev as usize;
        }
    }

    let mut bits = Vec::with_capacity(num_steps * l);
    for &word in &decided {
        debug_assert_ne!(word, u32::MAX);
        for t in 0..l {
            bits.push((word >> (l - 1 - t)) & 1 == 1);
        }
    }
    Ok(bits)
}

fn best_state(metrics: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_metric = f64::INFINITY;
    for (s, &m) in metrics.iter().enumerate() {
        if m < best_metric {
            best_metric = m;
            best = s;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::constellation::map_symbols;
    use crate::codec::encoder::Encoder;
    use crate::codec::puncture::{puncture, PuncturePattern};

    fn bits(s: &str) -> Vec<bool> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c == '1')
            .collect()
    }

    fn noiseless_roundtrip(
        info: &[bool],
        pattern: Option<&PuncturePattern>,
        order: usize,
        tau: usize,
    ) -> Vec<bool> {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        let trellis = SuperTrellis::build(&enc, pattern, order).unwrap();
        let l = trellis.info_bits_per_step();
        let total = info.len() + enc.tail_len();
        let pad = (l - total % l) % l;
        let mut padded = info.to_vec();
        padded.extend(std::iter::repeat(false).take(pad));
        let coded = enc.encode(&padded);
        let kept = match pattern {
            Some(p) => puncture(&coded, p).unwrap(),
            None => coded,
        };
        let c = Constellation::conventional(order).unwrap();
        let symbols = map_symbols(&kept, &c).unwrap();
        let csi = vec![1.0; symbols.len()];
        let cfg = DecoderConfig::new(tau).unwrap();
        viterbi_decode(&symbols, &csi, &c, &trellis, &cfg).unwrap()
    }

    #[test]
    fn noiseless_recovery_hand_trace() {
        let decoded = noiseless_roundtrip(&bits("1011"), None, 16, 20);
        assert_eq!(&decoded[..4], &bits("1011")[..]);
    }

    #[test]
    fn noiseless_recovery_various_frames() {
        for len in [1usize, 5, 12, 33, 64] {
            let info: Vec<bool> = (0..len).map(|i| (i * 7 + 3) % 5 < 2).collect();
            let decoded = noiseless_roundtrip(&info, None, 4, 15);
            assert_eq!(&decoded[..len], &info[..], "frame length {len}");
        }
    }

    #[test]
    fn noiseless_recovery_punctured() {
        let p = PuncturePattern::from_rows(&[&[1, 1, 0], &[0, 1, 1]]).unwrap();
        let info: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        let decoded = noiseless_roundtrip(&info, Some(&p), 16, 25);
        assert_eq!(&decoded[..40], &info[..]);
    }

    #[test]
    fn csi_length_mismatch_is_rejected() {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        let trellis = SuperTrellis::build(&enc, None, 4).unwrap();
        let c = Constellation::conventional(4).unwrap();
        let cfg = DecoderConfig::new(4).unwrap();
        let rx = vec![num_complex::Complex64::new(1.0, 0.0); 4];
        let csi = vec![1.0; 3];
        assert!(viterbi_decode(&rx, &csi, &c, &trellis, &cfg).is_err());
    }

    #[test]
    fn zero_window_is_rejected() {
        assert!(DecoderConfig::new(0).is_err());
    }
}
