use serde::{Deserialize, Serialize};

use crate::adapt::lut::{select_constellation, LutStore};
use crate::adapt::mcs::McsEntry;
use crate::bound::evaluate_bound;
use crate::channel::{ChannelContext, Fading};
use crate::codec::Constellation;
use crate::error::{Error, Result};

/// Where a BER figure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PbSource {
    Bound,
    Sim,
}

impl std::fmt::Display for PbSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PbSource::Bound => write!(f, "bound"),
            PbSource::Sim => write!(f, "sim"),
        }
    }
}

/// One point of a spectral-efficiency curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SeCurvePoint {
    pub snr_db: f64,
    pub mcs: u32,
    pub pb_source: PbSource,
    pub p_b: f64,
    pub se: f64,
}

/// Goodput in bits/s/Hz for a frame of `n_b` information bits:
/// `log2(M) * R * (1 - p_b)^n_b`. Saturates at `log2(M) * R` for error-free
/// links and falls to zero as `p_b` approaches 1.
pub fn spectral_efficiency(p_b: f64, modulation_order: usize, rate: f64, n_b: usize) -> f64 {
    let p = p_b.clamp(0.0, 1.0);
    (modulation_order as f64).log2() * rate * (1.0 - p).powi(n_b as i32)
}

/// Bound-based BER of an MCS with a given constellation at an operating
/// point, clamped into [0, 1] for the goodput formula (divergent bounds
/// count as certain failure).
pub fn bound_pb(mcs: &McsEntry, constellation: &Constellation, ctx: &ChannelContext) -> Result<f64> {
    let trellis = mcs.supertrellis()?;
    match evaluate_bound(&trellis, constellation, ctx) {
        Ok(r) if !r.divergent => Ok(r.p_b_bound.clamp(0.0, 1.0)),
        Ok(_) => Ok(1.0),
        Err(Error::Numerical(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// Pick the candidate MCS with the best bound-driven spectral efficiency at
/// the operating point. Each candidate uses its stored constellation when
/// the store has one for (m, mcs), otherwise the conventional QAM fallback.
/// Ties go to the lower modulation order, then the lower rate.
pub fn select_mcs(
    fading: Fading,
    snr_db: f64,
    candidates: &[McsEntry],
    store: &LutStore,
    n_b: usize,
) -> Result<(u32, SeCurvePoint)> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("empty MCS candidate list".into()));
    }
    let ctx = ChannelContext::from_avg_snr_db(fading, snr_db, 1.0, 1.0)?;
    let mut best: Option<(&McsEntry, SeCurvePoint)> = None;
    for mcs in candidates {
        let constellation = match select_constellation(fading, snr_db, mcs.id, store) {
            Ok(c) => c,
            Err(Error::MissingRecord(_)) => Constellation::conventional(mcs.modulation_order)?,
            Err(e) => return Err(e),
        };
        let p_b = bound_pb(mcs, &constellation, &ctx)?;
        let point = SeCurvePoint {
            snr_db,
            mcs: mcs.id,
            pb_source: PbSource::Bound,
            p_b,
            se: spectral_efficiency(p_b, mcs.modulation_order, mcs.rate(), n_b),
        };
        let replace = match &best {
            None => true,
            Some((cur, cur_point)) => {
                if point.se != cur_point.se {
                    point.se > cur_point.se
                } else {
                    (mcs.modulation_order, mcs.rate()) < (cur.modulation_order, cur.rate())
                }
            }
        };
        if replace {
            best = Some((mcs, point));
        }
    }
    let (mcs, point) = best.unwrap();
    Ok((mcs.id, point))
}
