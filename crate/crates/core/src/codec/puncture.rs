use crate::error::{Error, Result};

/// Periodic puncturing mask with one row per encoder output stream.
///
/// Column `p` of the mask decides which of the coded bits produced at base
/// step `t` with `t % period == p` are transmitted. Every column must keep at
/// least one bit, otherwise a whole step would be erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    mask: Vec<Vec<bool>>,
    period: usize,
}

impl PuncturePattern {
    pub fn new(mask: Vec<Vec<bool>>) -> Result<Self> {
        if mask.is_empty() || mask[0].is_empty() {
            return Err(Error::InvalidPattern("empty mask".into()));
        }
        let period = mask[0].len();
        if mask.iter().any(|row| row.len() != period) {
            return Err(Error::InvalidPattern("ragged mask rows".into()));
        }
        for p in 0..period {
            if !mask.iter().any(|row| row[p]) {
                return Err(Error::InvalidPattern(format!("all-zero column {p}")));
            }
        }
        Ok(Self { mask, period })
    }

    /// Convenience constructor from 0/1 rows, e.g. `&[&[1, 1, 0], &[0, 1, 1]]`.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&b| b != 0).collect())
                .collect(),
        )
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn num_streams(&self) -> usize {
        self.mask.len()
    }

    /// Transmitted bits per puncturing period.
    pub fn kept_per_period(&self) -> usize {
        self.mask
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count())
            .sum()
    }

    pub fn keeps(&self, stream: usize, step: usize) -> bool {
        self.mask[stream][step % self.period]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.mask
    }
}

/// Drop coded bits according to the mask. `coded` is in stream-major-per-step
/// order (all outputs of base step 0, then step 1, ...) and must cover whole
/// base steps.
pub fn puncture(coded: &[bool], pattern: &PuncturePattern) -> Result<Vec<bool>> {
    let streams = pattern.num_streams();
    if coded.len() % streams != 0 {
        return Err(Error::LengthMismatch(format!(
            "coded length {} is not a multiple of {} streams",
            coded.len(),
            streams
        )));
    }
    let steps = coded.len() / streams;
    let mut out = Vec::with_capacity(steps * pattern.kept_per_period() / pattern.period() + streams);
    for step in 0..steps {
        for stream in 0..streams {
            if pattern.keeps(stream, step) {
                out.push(coded[step * streams + stream]);
            }
        }
    }
    Ok(out)
}

/// Re-expand a punctured sequence to `num_steps` base steps. Erased positions
/// come back as `None`; a soft decoder gives them zero branch metric.
pub fn depuncture(
    bits: &[bool],
    pattern: &PuncturePattern,
    num_steps: usize,
) -> Result<Vec<Option<bool>>> {
    let streams = pattern.num_streams();
    let mut out = vec![None; num_steps * streams];
    let mut src = 0usize;
    for step in 0..num_steps {
        for stream in 0..streams {
            if pattern.keeps(stream, step) {
                let bit = *bits.get(src).ok_or_else(|| {
                    Error::LengthMismatch(format!(
                        "punctured sequence too short: {} bits for {} steps",
                        bits.len(),
                        num_steps
                    ))
                })?;
                out[step * streams + stream] = Some(bit);
                src += 1;
            }
        }
    }
    if src != bits.len() {
        return Err(Error::LengthMismatch(format!(
            "punctured sequence too long: {} bits for {} steps",
            bits.len(),
            num_steps
        )));
    }
    Ok(out)
}
