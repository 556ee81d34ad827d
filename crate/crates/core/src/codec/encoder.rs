use crate::error::{Error, Result};

/// Feedforward rate-1/n convolutional encoder defined by octal generator
/// polynomials.
///
/// The shift register holds `constraint_length` bits: the newest input bit in
/// the most significant position and the `constraint_length - 1` state bits
/// below it. The state after a step is the register shifted right by one, so
/// the state is always the most recent `constraint_length - 1` input bits.
///
/// For generators `[0o5, 0o7]` the encoder is the classic 4-state rate-1/2
/// code: input 1,0,1,1 from the zero state produces 11 01 00 10.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoder {
    generators: Vec<u32>,
    constraint_length: usize,
}

impl Encoder {
    /// Build an encoder from generator polynomials (write them as octal
    /// literals, e.g. `&[0o5, 0o7]`). The constraint length is the highest
    /// polynomial degree plus one.
    pub fn new(generators: &[u32]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidEncoder("empty generator list".into()));
        }
        if generators.iter().any(|&g| g == 0) {
            return Err(Error::InvalidEncoder("generator polynomial of zero".into()));
        }
        let constraint_length = generators
            .iter()
            .map(|&g| (32 - g.leading_zeros()) as usize)
            .max()
            .unwrap();
        Ok(Self {
            generators: generators.to_vec(),
            constraint_length,
        })
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    /// Number of trellis states, `2^(constraint_length - 1)`.
    pub fn num_states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    /// Coded bits produced per input bit.
    pub fn num_outputs(&self) -> usize {
        self.generators.len()
    }

    /// Base code rate as (1, n).
    pub fn rate(&self) -> (usize, usize) {
        (1, self.generators.len())
    }

    /// Zero bits appended per frame to drive the trellis back to state 0.
    pub fn tail_len(&self) -> usize {
        self.constraint_length - 1
    }

    /// One shift-register step from `state` with `input`. Returns the coded
    /// bits packed into a word (bit j = output of generator j) and the
    /// successor state.
    pub fn step(&self, state: usize, input: bool) -> (u32, usize) {
        let reg = ((input as u32) << (self.constraint_length - 1)) | state as u32;
        let mut out = 0u32;
        for (j, &g) in self.generators.iter().enumerate() {
            out |= ((reg & g).count_ones() & 1) << j;
        }
        (out, (reg >> 1) as usize)
    }

    /// Encode a frame starting from the zero state, appending
    /// `constraint_length - 1` zero tail bits so the trellis terminates at
    /// state 0. Output length is `(info.len() + tail_len()) * num_outputs()`.
    pub fn encode(&self, info: &[bool]) -> Vec<bool> {
        let n = self.num_outputs();
        let total = info.len() + self.tail_len();
        let mut out = Vec::with_capacity(total * n);
        let mut state = 0usize;
        for step in 0..total {
            let bit = if step < info.len() { info[step] } else { false };
            let (word, next) = self.step(state, bit);
            for j in 0..n {
                out.push((word >> j) & 1 == 1);
            }
            state = next;
        }
        debug_assert_eq!(state, 0);
        out
    }
}
