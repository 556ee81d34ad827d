//! Independent cross-check oracles: exhaustive ML decoding, direct
//! error-event enumeration, and a scalar-variable evaluation of the
//! generating function. These deliberately avoid the production code paths
//! they are used to verify (the Viterbi recursion and the dual-number
//! matrix algebra), so tests can compare the two routes.

use num_complex::Complex64;

use crate::bound::chernoff_pair;
use crate::channel::ChannelContext;
use crate::codec::{puncture, Constellation, Encoder, PuncturePattern, SuperTrellis};
use crate::error::Result;

/// Encode `bits` by direct shift-register stepping, with no tail appended.
pub fn encode_raw(encoder: &Encoder, bits: &[bool]) -> Vec<bool> {
    let n = encoder.num_outputs();
    let mut out = Vec::with_capacity(bits.len() * n);
    let mut state = 0usize;
    for &b in bits {
        let (word, next) = encoder.step(state, b);
        for j in 0..n {
            out.push((word >> j) & 1 == 1);
        }
        state = next;
    }
    out
}

/// Minimum-metric search over every input sequence of `num_bits` bits:
/// encode, puncture, map, and score against the received samples with
/// perfect CSI. Exact ML reference for short frames; cost is `2^num_bits`
/// encodings.
pub fn exhaustive_ml_decode(
    received: &[Complex64],
    csi: &[f64],
    encoder: &Encoder,
    pattern: Option<&PuncturePattern>,
    constellation: &Constellation,
    num_bits: usize,
) -> Result<Vec<bool>> {
    assert!(num_bits <= 24, "exhaustive search limited to short frames");
    let mut best_metric = f64::INFINITY;
    let mut best_bits = vec![false; num_bits];
    for word in 0..(1u64 << num_bits) {
        let bits: Vec<bool> = (0..num_bits).map(|t| (word >> (num_bits - 1 - t)) & 1 == 1).collect();
        let coded = encode_raw(encoder, &bits);
        let kept = match pattern {
            Some(p) => puncture(&coded, p)?,
            None => coded,
        };
        let symbols = crate::codec::map_symbols(&kept, constellation)?;
        debug_assert_eq!(symbols.len(), received.len());
        let mut metric = 0.0;
        for (k, &s) in symbols.iter().enumerate() {
            metric += (received[k] - s * csi[k]).norm_sqr();
            if metric >= best_metric {
                break;
            }
        }
        if metric < best_metric {
            best_metric = metric;
            best_bits = bits;
        }
    }
    Ok(best_bits)
}

/// Truncated union bound by direct enumeration of error events on the
/// supertrellis: pairs of transition sequences that leave a common state on
/// differing transitions, keep distinct states in between, and remerge
/// within `max_super_steps`. Each event contributes
/// `2^(-l len) * (information-bit errors) * (product of Chernoff factors)`,
/// summed over all starting states; the total is divided by `l`.
///
/// Truncation only discards positive mass, so the result is a lower bound
/// on the full generating-function value.
pub fn enumerate_error_event_bound(
    trellis: &SuperTrellis,
    constellation: &Constellation,
    ctx: &ChannelContext,
    max_super_steps: usize,
) -> Result<f64> {
    let order = constellation.order();
    let mut dtab = vec![0.0f64; order * order];
    for i in 0..order {
        for j in 0..order {
            dtab[i * order + j] = chernoff_pair(
                constellation.point(i),
                constellation.point(j),
                ctx.fading,
                ctx.omega,
                ctx.n0,
            )?;
        }
    }
    let l = trellis.info_bits_per_step();
    let per_step = 0.5f64.powi(l as i32);
    let pair_weight = |correct: &crate::codec::SuperTransition,
                       wrong: &crate::codec::SuperTransition|
     -> (u32, f64) {
        let w = (correct.input ^ wrong.input).count_ones();
        let mut d = 1.0;
        for (k, &sc) in correct.symbols.iter().enumerate() {
            d *= dtab[sc * order + wrong.symbols[k]];
        }
        (w, d)
    };

    let mut total = 0.0f64;
    // Depth-first over open (still-split) state pairs.
    struct Node {
        u: usize,
        v: usize,
        depth: usize,
        weight: f64,
        bit_errors: u32,
    }
    let mut stack: Vec<Node> = Vec::new();
    for start in 0..trellis.num_states() {
        for correct in trellis.transitions(start) {
            for wrong in trellis.transitions(start) {
                if correct.input == wrong.input {
                    continue;
                }
                let (w, d) = pair_weight(correct, wrong);
                let weight = per_step * d;
                if correct.next_state == wrong.next_state {
                    total += weight * w as f64;
                } else if max_super_steps > 1 {
                    stack.push(Node {
                        u: correct.next_state,
                        v: wrong.next_state,
                        depth: 1,
                        weight,
                        bit_errors: w,
                    });
                }
            }
        }
    }
    while let Some(node) = stack.pop() {
        for correct in trellis.transitions(node.u) {
            for wrong in trellis.transitions(node.v) {
                let (w, d) = pair_weight(correct, wrong);
                let weight = node.weight * per_step * d;
                let bit_errors = node.bit_errors + w;
                if correct.next_state == wrong.next_state {
                    total += weight * bit_errors as f64;
                } else if node.depth + 1 < max_super_steps {
                    stack.push(Node {
                        u: correct.next_state,
                        v: wrong.next_state,
                        depth: node.depth + 1,
                        weight,
                        bit_errors,
                    });
                }
            }
        }
    }
    Ok(total / l as f64)
}

/// The generating-function expression evaluated with the counting variable
/// as a plain scalar: assemble the pairwise-state matrix with `I^w`
/// evaluated numerically at `i_value`, then compute
/// `1^T S_GG 1 + (1^T S_GB)(Id - S_BB)^(-1) S_BG 1` in f64 arithmetic.
/// Finite differences of this function in `i_value` cross-check the
/// dual-number derivative.
pub fn scalar_generating_function(
    trellis: &SuperTrellis,
    constellation: &Constellation,
    ctx: &ChannelContext,
    i_value: f64,
) -> Result<f64> {
    let order = constellation.order();
    let mut dtab = vec![0.0f64; order * order];
    for i in 0..order {
        for j in 0..order {
            dtab[i * order + j] = chernoff_pair(
                constellation.point(i),
                constellation.point(j),
                ctx.fading,
                ctx.omega,
                ctx.n0,
            )?;
        }
    }
    let n = trellis.num_states();
    let dim = n * n;
    let l = trellis.info_bits_per_step();
    let per_pair = 0.5f64.powi(l as i32);
    let mut s = vec![0.0f64; dim * dim];
    for u in 0..n {
        for v in 0..n {
            let row = u * n + v;
            for correct in trellis.transitions(u) {
                for wrong in trellis.transitions(v) {
                    let col = correct.next_state * n + wrong.next_state;
                    let w = (correct.input ^ wrong.input).count_ones();
                    let mut d = per_pair * i_value.powi(w as i32);
                    for (k, &sc) in correct.symbols.iter().enumerate() {
                        d *= dtab[sc * order + wrong.symbols[k]];
                    }
                    s[row * dim + col] += d;
                }
            }
        }
    }

    let good: Vec<usize> = (0..n).map(|u| u * n + u).collect();
    let bad: Vec<usize> = (0..dim).filter(|i| i / n != i % n).collect();
    let nb = bad.len();

    let gg: f64 = good
        .iter()
        .flat_map(|&r| good.iter().map(move |&c| s[r * dim + c]))
        .sum();

    // Solve (Id - S_BB) x = S_BG 1 with naive pivoted elimination.
    let mut m = vec![0.0f64; nb * nb];
    for (i, &r) in bad.iter().enumerate() {
        for (j, &c) in bad.iter().enumerate() {
            m[i * nb + j] = if i == j { 1.0 } else { 0.0 } - s[r * dim + c];
        }
    }
    let mut rhs: Vec<f64> = bad
        .iter()
        .map(|&r| good.iter().map(|&c| s[r * dim + c]).sum())
        .collect();
    for col in 0..nb {
        let mut pivot = col;
        for row in col + 1..nb {
            if m[row * nb + col].abs() > m[pivot * nb + col].abs() {
                pivot = row;
            }
        }
        if pivot != col {
            for j in 0..nb {
                m.swap(col * nb + j, pivot * nb + j);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..nb {
            let f = m[row * nb + col] / m[col * nb + col];
            if f == 0.0 {
                continue;
            }
            for j in col..nb {
                m[row * nb + j] -= f * m[col * nb + j];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0f64; nb];
    for row in (0..nb).rev() {
        let mut acc = rhs[row];
        for j in row + 1..nb {
            acc -= m[row * nb + j] * x[j];
        }
        x[row] = acc / m[row * nb + row];
    }

    let cross: f64 = (0..nb)
        .map(|j| {
            let col_sum: f64 = good.iter().map(|&g| s[g * dim + bad[j]]).sum();
            col_sum * x[j]
        })
        .sum();
    Ok(gg + cross)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::evaluate_bound;
    use crate::channel::Fading;

    #[test]
    fn scalar_function_derivative_matches_dual_bound() {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        let trellis = SuperTrellis::build(&enc, None, 16).unwrap();
        let c = Constellation::conventional(16).unwrap();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), 10.0, 1.0, 1.0).unwrap();
        let l = trellis.info_bits_per_step();
        let bound = evaluate_bound(&trellis, &c, &ctx).unwrap();
        assert!(!bound.divergent);
        let h = 1e-6;
        let fp = scalar_generating_function(&trellis, &c, &ctx, 1.0 + h).unwrap();
        let fm = scalar_generating_function(&trellis, &c, &ctx, 1.0 - h).unwrap();
        let fd = (fp - fm) / (2.0 * h) / l as f64;
        let rel = (fd - bound.p_b_bound).abs() / bound.p_b_bound;
        assert!(rel < 1e-6, "dual {} vs fd {fd}", bound.p_b_bound);
    }

    #[test]
    fn event_enumeration_lower_bounds_the_matrix_value() {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        let trellis = SuperTrellis::build(&enc, None, 4).unwrap();
        let c = Constellation::conventional(4).unwrap();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(1), 8.0, 1.0, 1.0).unwrap();
        let truncated = enumerate_error_event_bound(&trellis, &c, &ctx, 12).unwrap();
        let closed = evaluate_bound(&trellis, &c, &ctx).unwrap();
        assert!(!closed.divergent);
        assert!(truncated <= closed.p_b_bound * (1.0 + 1e-12));
        assert!(closed.p_b_bound <= truncated * 1.05, "{} vs {truncated}", closed.p_b_bound);
    }
}
