//! SNR-adaptive irregular constellation design for convolutionally coded
//! links: an analytical BER upper bound drives a particle-swarm search for
//! symbol locations per (fading order, average SNR) operating point, and a
//! Monte-Carlo link simulator over Nakagami-m fading validates the designs,
//! selects schemes by spectral efficiency, and sweeps decoding latency.

pub mod adapt;
pub mod bound;
pub mod channel;
pub mod codec;
pub mod error;
pub mod shaper;
pub mod validation;

pub use adapt::{LutRecord, LutStore, McsEntry};
pub use bound::{BoundResult, ProductStateMatrix};
pub use channel::{BerEstimate, ChannelContext, Fading, Frame, StoppingRule};
pub use codec::{Constellation, DecoderConfig, Encoder, PuncturePattern, SuperTrellis};
pub use error::{Error, Result};
pub use shaper::{OptimizedConstellation, PsoConfig};
