//! Analytical BER upper bound via the product-state matrix and
//! generating-function method, with the derivative at the counting variable
//! taken exactly through dual-number arithmetic.

mod dual;
mod linalg;
mod psm;

pub use dual::Dual;
pub use linalg::spectral_radius;
pub use psm::{ber_upper_bound, chernoff_pair, BoundResult, ProductStateMatrix};

use crate::channel::ChannelContext;
use crate::codec::{Constellation, SuperTrellis};
use crate::error::Result;

/// Assemble the product-state matrix for a trellis, constellation, and
/// channel context.
pub fn build_product_state_matrix(
    trellis: &SuperTrellis,
    constellation: &Constellation,
    ctx: &ChannelContext,
) -> Result<ProductStateMatrix> {
    ProductStateMatrix::build(trellis, constellation, ctx)
}

/// Bound the BER of a constellation on a given trellis and channel; the
/// usual entry point for fitness evaluation and curve generation.
pub fn evaluate_bound(
    trellis: &SuperTrellis,
    constellation: &Constellation,
    ctx: &ChannelContext,
) -> Result<BoundResult> {
    let psm = ProductStateMatrix::build(trellis, constellation, ctx)?;
    ber_upper_bound(&psm, trellis.info_bits_per_step())
}
