use crate::codec::{Encoder, PuncturePattern, SuperTrellis};
use crate::error::Result;

/// A modulation-and-coding scheme: the rate-1/2 base encoder, an optional
/// puncturing mask, and the modulation order. `nominal_rate` is the
/// catalog label; `computed_rate` is derived from the mask and is what the
/// throughput math uses. The two disagree for MCS-3, whose published 3/4
/// label does not match its mask (which keeps 6 of 8 bits, rate 2/3); both
/// are kept and the mismatch is surfaced via [`McsEntry::rate_mismatch`].
#[derive(Debug, Clone, PartialEq)]
pub struct McsEntry {
    pub id: u32,
    pub modulation_order: usize,
    pub generators: Vec<u32>,
    pub puncture: Option<PuncturePattern>,
    pub nominal_rate: (u32, u32),
}

impl McsEntry {
    /// MCS-1: rate 1/2, 16-ary.
    pub fn mcs1() -> Self {
        Self {
            id: 1,
            modulation_order: 16,
            generators: vec![0o5, 0o7],
            puncture: None,
            nominal_rate: (1, 2),
        }
    }

    /// MCS-2: rate 3/4 via the [1 1 0; 0 1 1] mask, 16-ary.
    pub fn mcs2() -> Self {
        Self {
            id: 2,
            modulation_order: 16,
            generators: vec![0o5, 0o7],
            puncture: Some(
                PuncturePattern::from_rows(&[&[1, 1, 0], &[0, 1, 1]])
                    .expect("static mask is valid"),
            ),
            nominal_rate: (3, 4),
        }
    }

    /// MCS-3: labeled rate 3/4 with the [1 1 0 1; 0 1 1 1] mask, 64-ary.
    pub fn mcs3() -> Self {
        Self {
            id: 3,
            modulation_order: 64,
            generators: vec![0o5, 0o7],
            puncture: Some(
                PuncturePattern::from_rows(&[&[1, 1, 0, 1], &[0, 1, 1, 1]])
                    .expect("static mask is valid"),
            ),
            nominal_rate: (3, 4),
        }
    }

    /// The simulation catalog: MCS-1 through MCS-3.
    pub fn table() -> Vec<Self> {
        vec![Self::mcs1(), Self::mcs2(), Self::mcs3()]
    }

    pub fn by_id(id: u32) -> Option<Self> {
        match id {
            0 => Some(Self::validation_bpsk()),
            1 => Some(Self::mcs1()),
            2 => Some(Self::mcs2()),
            3 => Some(Self::mcs3()),
            _ => None,
        }
    }

    /// Uncoded BPSK (pass-through generator, one state): the channel-oracle
    /// validation mode, not part of the catalog.
    pub fn validation_bpsk() -> Self {
        Self {
            id: 0,
            modulation_order: 2,
            generators: vec![0o1],
            puncture: None,
            nominal_rate: (1, 1),
        }
    }

    pub fn encoder(&self) -> Result<Encoder> {
        Encoder::new(&self.generators)
    }

    pub fn supertrellis(&self) -> Result<SuperTrellis> {
        let encoder = self.encoder()?;
        SuperTrellis::build(&encoder, self.puncture.as_ref(), self.modulation_order)
    }

    /// Code rate implied by the mask: information bits per transmitted coded
    /// bit, as a reduced fraction.
    pub fn computed_rate(&self) -> (u32, u32) {
        let (num, den) = match self.puncture.as_ref() {
            Some(p) => (p.period() as u32, p.kept_per_period() as u32),
            None => (1, self.generators.len() as u32),
        };
        let g = gcd(num, den);
        (num / g, den / g)
    }

    pub fn rate(&self) -> f64 {
        let (n, d) = self.computed_rate();
        n as f64 / d as f64
    }

    /// True when the catalog label disagrees with the mask-derived rate.
    pub fn rate_mismatch(&self) -> bool {
        self.computed_rate() != {
            let g = gcd(self.nominal_rate.0, self.nominal_rate.1);
            (self.nominal_rate.0 / g, self.nominal_rate.1 / g)
        }
    }

    /// Peak spectral efficiency `log2(M) * R` in bits/s/Hz.
    pub fn max_se(&self) -> f64 {
        (self.modulation_order as f64).log2() * self.rate()
    }

    /// Zero bits appended after the tail so a frame of `n_b` information
    /// bits fills whole super-steps.
    pub fn frame_pad_len(&self, n_b: usize) -> Result<usize> {
        let encoder = self.encoder()?;
        let (l, _) = crate::codec::super_step_shape(
            &encoder,
            self.puncture.as_ref(),
            self.modulation_order,
        )?;
        let total = n_b + encoder.tail_len();
        Ok((l - total % l) % l)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rates() {
        assert_eq!(McsEntry::mcs1().computed_rate(), (1, 2));
        assert_eq!(McsEntry::mcs2().computed_rate(), (3, 4));
        assert_eq!(McsEntry::mcs3().computed_rate(), (2, 3));
        assert!(!McsEntry::mcs1().rate_mismatch());
        assert!(!McsEntry::mcs2().rate_mismatch());
        assert!(McsEntry::mcs3().rate_mismatch());
    }

    #[test]
    fn peak_spectral_efficiencies() {
        assert!((McsEntry::mcs1().max_se() - 2.0).abs() < 1e-12);
        assert!((McsEntry::mcs2().max_se() - 3.0).abs() < 1e-12);
        // Mask-derived rate: log2(64) * 2/3 = 4.
        assert!((McsEntry::mcs3().max_se() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn supertrellis_shapes() {
        assert_eq!(McsEntry::mcs1().supertrellis().unwrap().info_bits_per_step(), 2);
        assert_eq!(McsEntry::mcs2().supertrellis().unwrap().info_bits_per_step(), 3);
        assert_eq!(McsEntry::mcs3().supertrellis().unwrap().info_bits_per_step(), 4);
        assert_eq!(McsEntry::validation_bpsk().supertrellis().unwrap().num_states(), 1);
    }

    #[test]
    fn frame_padding_fills_super_steps() {
        // 920 + 2 tail bits: already a multiple of 2 for MCS-1, needs 2 more
        // for MCS-2 (l = 3) and 2 more for MCS-3 (l = 4).
        assert_eq!(McsEntry::mcs1().frame_pad_len(920).unwrap(), 0);
        assert_eq!(McsEntry::mcs2().frame_pad_len(920).unwrap(), 2);
        assert_eq!(McsEntry::mcs3().frame_pad_len(920).unwrap(), 2);
    }
}
