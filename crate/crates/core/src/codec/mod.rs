//! Convolutional coding chain: encoder, puncturing, symbol mapping, the
//! supertrellis that groups base steps into whole-symbol transitions, and a
//! traceback-window soft-decision Viterbi decoder.

mod constellation;
mod encoder;
mod puncture;
mod trellis;
mod viterbi;

pub use constellation::{group_labels, map_symbols, Constellation};
pub use encoder::Encoder;
pub use puncture::{depuncture, puncture, PuncturePattern};
pub use trellis::{ParallelGroup, SuperTransition, SuperTrellis, MAX_SUPER_STEP};
pub use viterbi::{viterbi_decode, DecoderConfig};

pub(crate) use trellis::super_step_shape;
