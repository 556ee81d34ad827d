use num_complex::Complex64;

use crate::error::{Error, Result};

/// A labeled two-dimensional signal set. `points[i]` is the symbol
/// transmitted for the `log2(M)`-bit pattern whose integer value is `i`
/// (MSB first), matching the fixed label order used throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        let m = points.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidConstellation(format!(
                "order {m} is not a power of two >= 2"
            )));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidConstellation("non-finite point".into()));
        }
        Ok(Self { points })
    }

    /// Modulation order M.
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.points.len().trailing_zeros() as usize
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Mean symbol energy `(1/M) sum |s_i|^2`.
    pub fn avg_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Unit-energy Gray-labeled square QAM (BPSK for M = 2). Each axis takes
    /// half of the label bits, alternating from the MSB: the leading axis bit
    /// selects the sign and the remaining axis bits Gray-index the amplitude.
    /// For M = 16 this reproduces the usual +-1/sqrt(10), +-3/sqrt(10) grid.
    pub fn conventional(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::InvalidConstellation(format!(
                "order {order} is not a power of two >= 2"
            )));
        }
        let k = order.trailing_zeros() as usize;
        let k_re = k - k / 2;
        let k_im = k / 2;
        // Per-axis mean square of the odd-integer grid with 2^k levels is
        // (4^k - 1) / 3.
        let msq = |bits: usize| -> f64 {
            if bits == 0 {
                0.0
            } else {
                ((1u64 << (2 * bits)) - 1) as f64 / 3.0
            }
        };
        let scale = 1.0 / (msq(k_re) + msq(k_im)).sqrt();
        let points = (0..order)
            .map(|label| {
                let mut re_bits = 0usize;
                let mut im_bits = 0usize;
                for t in 0..k {
                    let bit = (label >> (k - 1 - t)) & 1;
                    if t % 2 == 0 {
                        re_bits = (re_bits << 1) | bit;
                    } else {
                        im_bits = (im_bits << 1) | bit;
                    }
                }
                Complex64::new(
                    axis_level(re_bits, k_re) * scale,
                    axis_level(im_bits, k_im) * scale,
                )
            })
            .collect();
        Ok(Self { points })
    }
}

/// Signed odd-integer level for one axis: the leading bit is the sign, the
/// rest Gray-index the amplitude from the innermost ring outward.
fn axis_level(bits: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let sign = (bits >> (k - 1)) & 1;
    let mag = gray_decode(bits & ((1 << (k - 1)) - 1));
    let amp = (2 * mag + 1) as f64;
    if sign == 1 {
        -amp
    } else {
        amp
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = 0;
    while g > 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

/// Group coded bits MSB-first into `bits_per_symbol`-wide labels.
pub fn group_labels(coded: &[bool], bits_per_symbol: usize) -> Result<Vec<usize>> {
    if coded.len() % bits_per_symbol != 0 {
        return Err(Error::LengthMismatch(format!(
            "{} coded bits do not fill {}-bit symbols",
            coded.len(),
            bits_per_symbol
        )));
    }
    Ok(coded
        .chunks(bits_per_symbol)
        .map(|chunk| chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
        .collect())
}

/// Map coded bits onto constellation symbols, MSB-first per symbol.
pub fn map_symbols(coded: &[bool], constellation: &Constellation) -> Result<Vec<Complex64>> {
    Ok(group_labels(coded, constellation.bits_per_symbol())?
        .into_iter()
        .map(|label| constellation.point(label))
        .collect())
}
