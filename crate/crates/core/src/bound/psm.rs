use num_complex::Complex64;

use crate::bound::dual::Dual;
use crate::bound::linalg::{solve_id_minus, spectral_radius};
use crate::channel::{ChannelContext, Fading};
use crate::codec::{Constellation, SuperTrellis};
use crate::error::{Error, Result};

/// Chernoff factor bounding the probability of deciding symbol `s_hat` when
/// `s` was sent, under ML decoding with perfect CSI:
/// `(1 + omega |s - s_hat|^2 / (4 n0 m))^(-m)` for Nakagami-m fading, and its
/// m -> infinity limit `exp(-omega |s - s_hat|^2 / (4 n0))` for AWGN.
pub fn chernoff_pair(
    s: Complex64,
    s_hat: Complex64,
    fading: Fading,
    omega: f64,
    n0: f64,
) -> Result<f64> {
    if omega <= 0.0 || n0 <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "omega and n0 must be positive (got {omega}, {n0})"
        )));
    }
    let x = omega * (s - s_hat).norm_sqr() / (4.0 * n0);
    match fading {
        Fading::Nakagami(0) => Err(Error::InvalidConfig(
            "Nakagami m must be a positive integer".into(),
        )),
        Fading::Nakagami(m) => Ok((1.0 + x / m as f64).powi(-(m as i32))),
        Fading::Awgn => Ok((-x).exp()),
    }
}

/// Pairwise-state transition matrix of the generating-function bound.
///
/// Rows and columns are indexed by ordered state pairs `(u, v)` where `u`
/// tracks the transmitted path and `v` a candidate decoded path. The entry
/// for `(u, v) -> (ubar, vbar)` is
///
/// ```text
/// Pr(u -> ubar | u) * sum_n p_n * I^(w_n) * D_n
/// ```
///
/// summed over every pairing of a correct parallel transition `u -> ubar`
/// with an erroneous one `v -> vbar`; `w_n` is the Hamming weight of the XOR
/// of their information words and `D_n` the product of Chernoff factors over
/// their symbol positions. The counting variable is carried as a [`Dual`].
#[derive(Debug, Clone)]
pub struct ProductStateMatrix {
    num_states: usize,
    entries: Vec<Dual>,
    good: Vec<usize>,
    bad: Vec<usize>,
    ctx: ChannelContext,
}

impl ProductStateMatrix {
    /// Assemble the matrix for a trellis, constellation, and channel.
    pub fn build(
        trellis: &SuperTrellis,
        constellation: &Constellation,
        ctx: &ChannelContext,
    ) -> Result<Self> {
        if constellation.bits_per_symbol() != trellis.bits_per_symbol() {
            return Err(Error::InvalidConstellation(format!(
                "constellation order {} does not match trellis symbol alphabet {}",
                constellation.order(),
                trellis.modulation_order()
            )));
        }
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
        let mut entries = vec![Dual::ZERO; dim * dim];
        for u in 0..n {
            for v in 0..n {
                let row = u * n + v;
                for gc in trellis.groups(u) {
                    for ge in trellis.groups(v) {
                        let col = gc.next_state * n + ge.next_state;
                        let mut acc = Dual::ZERO;
                        for &ti in &gc.transitions {
                            let correct = &trellis.transitions(u)[ti];
                            for &tj in &ge.transitions {
                                let wrong = &trellis.transitions(v)[tj];
                                let w = (correct.input ^ wrong.input).count_ones();
                                let mut d = per_pair;
                                for (k, &sc) in correct.symbols.iter().enumerate() {
                                    d *= dtab[sc * order + wrong.symbols[k]];
                                }
                                acc += Dual::new(d, d * w as f64);
                            }
                        }
                        entries[row * dim + col] += acc;
                    }
                }
            }
        }

        let good = (0..n).map(|u| u * n + u).collect();
        let bad = (0..dim).filter(|i| i / n != i % n).collect();
        Ok(Self {
            num_states: n,
            entries,
            good,
            bad,
            ctx: *ctx,
        })
    }

    /// Build directly from entries in `(u, v)` row-major order; used for
    /// consistency checks such as state relabeling.
    pub fn from_entries(num_states: usize, entries: Vec<Dual>, ctx: ChannelContext) -> Result<Self> {
        let dim = num_states * num_states;
        if entries.len() != dim * dim {
            return Err(Error::InvalidConfig(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let good = (0..num_states).map(|u| u * num_states + u).collect();
        let bad = (0..dim).filter(|i| i / num_states != i % num_states).collect();
        Ok(Self {
            num_states,
            entries,
            good,
            bad,
            ctx,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn dim(&self) -> usize {
        self.num_states * self.num_states
    }

    pub fn entry(&self, row: usize, col: usize) -> Dual {
        self.entries[row * self.dim() + col]
    }

    /// Entry addressed by state pairs: `((u, v), (ubar, vbar))`.
    pub fn entry_by_states(&self, from: (usize, usize), to: (usize, usize)) -> Dual {
        let n = self.num_states;
        self.entry(from.0 * n + from.1, to.0 * n + to.1)
    }

    pub fn good_indices(&self) -> &[usize] {
        &self.good
    }

    pub fn bad_indices(&self) -> &[usize] {
        &self.bad
    }

    pub fn context(&self) -> &ChannelContext {
        &self.ctx
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Dual> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                out.push(self.entries[r * dim + c]);
            }
        }
        out
    }
}

/// Outcome of the generating-function bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// Upper bound on the information BER; `f64::INFINITY` when divergent.
    pub p_b_bound: f64,
    /// Spectral radius of the value part of `S_BB`.
    pub spectral_radius: f64,
    /// True when the bad-to-bad block does not contract (radius >= 1) and no
    /// finite bound exists.
    pub divergent: bool,
    /// Average SNR of the channel the matrix was built for.
    pub avg_snr: f64,
    pub fading: Fading,
}

/// Evaluate the BER upper bound
/// `(1/l) d/dI [ 1^T S_GG 1 + (1^T S_GB) (I - S_BB)^(-1) S_BG 1 ]` at I = 1,
/// propagating the derivative through the linear solve with dual numbers.
///
/// A spectral radius of the value part of `S_BB` at or above 1 yields a
/// divergent result; a singular solve below that radius is reported as a
/// numerical failure.
pub fn ber_upper_bound(psm: &ProductStateMatrix, l: usize) -> Result<BoundResult> {
    if l == 0 {
        return Err(Error::InvalidConfig("l must be >= 1".into()));
    }
    let good = psm.good_indices();
    let bad = psm.bad_indices();
    let nb = bad.len();

    let bb_values: Vec<Vec<f64>> = bad
        .iter()
        .map(|&r| bad.iter().map(|&c| psm.entry(r, c).val).collect())
        .collect();
    let rho = spectral_radius(&bb_values)?;
    if rho >= 1.0 {
        return Ok(BoundResult {
            p_b_bound: f64::INFINITY,
            spectral_radius: rho,
            divergent: true,
            avg_snr: psm.context().avg_snr(),
            fading: psm.context().fading,
        });
    }

    // 1^T S_GG 1: every good-to-good entry.
    let gg: Dual = psm.block(good, good).into_iter().sum();

    // (I - S_BB)^(-1) (S_BG 1), then contract with 1^T S_GB.
    let bb = psm.block(bad, bad);
    let bg = psm.block(bad, good);
    let bg_row_sums: Vec<Dual> = (0..nb)
        .map(|i| bg[i * good.len()..(i + 1) * good.len()].iter().copied().sum())
        .collect();
    let solved = solve_id_minus(&bb, &bg_row_sums, nb)?;
    let gb = psm.block(good, bad);
    let gb_col_sums: Vec<Dual> = (0..nb)
        .map(|j| (0..good.len()).map(|i| gb[i * nb + j]).sum())
        .collect();
    let cross: Dual = gb_col_sums
        .iter()
        .zip(&solved)
        .map(|(&a, &b)| a * b)
        .sum();

    let total = gg + cross;
    Ok(BoundResult {
        p_b_bound: total.der / l as f64,
        spectral_radius: rho,
        divergent: false,
        avg_snr: psm.context().avg_snr(),
        fading: psm.context().fading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Encoder;

    fn ctx(m: u32, snr_db: f64) -> ChannelContext {
        ChannelContext::from_avg_snr_db(Fading::Nakagami(m), snr_db, 1.0, 1.0).unwrap()
    }

    fn mcs1_trellis() -> SuperTrellis {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        SuperTrellis::build(&enc, None, 16).unwrap()
    }

    #[test]
    fn chernoff_matches_direct_substitution() {
        let s = Complex64::new(1.0, 0.0);
        let sh = Complex64::new(-1.0, 0.0);
        let d = chernoff_pair(s, sh, Fading::Nakagami(1), 1.0, 1.0).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chernoff_is_one_at_zero_distance() {
        let s = Complex64::new(0.3, -0.7);
        for fading in [Fading::Nakagami(1), Fading::Nakagami(4), Fading::Awgn] {
            let d = chernoff_pair(s, s, fading, 2.0, 0.5).unwrap();
            assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn chernoff_awgn_is_exponential_limit() {
        let s = Complex64::new(1.0, 0.0);
        let sh = Complex64::new(-1.0, 0.0);
        let d = chernoff_pair(s, sh, Fading::Awgn, 1.0, 1.0).unwrap();
        assert!((d - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn chernoff_decreases_with_milder_fading() {
        let s = Complex64::new(0.6, 0.2);
        let sh = Complex64::new(-0.4, -0.1);
        let mut prev = f64::INFINITY;
        for m in [1u32, 2, 3, 4, 8, 16] {
            let d = chernoff_pair(s, sh, Fading::Nakagami(m), 1.0, 0.2).unwrap();
            assert!(d < prev, "m = {m}");
            prev = d;
        }
        let awgn = chernoff_pair(s, sh, Fading::Awgn, 1.0, 0.2).unwrap();
        assert!(awgn < prev);
    }

    #[test]
    fn chernoff_rejects_bad_parameters() {
        let s = Complex64::new(1.0, 0.0);
        assert!(chernoff_pair(s, -s, Fading::Nakagami(1), 0.0, 1.0).is_err());
        assert!(chernoff_pair(s, -s, Fading::Nakagami(1), 1.0, 0.0).is_err());
        assert!(chernoff_pair(s, -s, Fading::Nakagami(0), 1.0, 1.0).is_err());
    }

    #[test]
    fn matrix_dimensions_and_partition() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(2, 12.0)).unwrap();
        assert_eq!(psm.dim(), 16);
        assert_eq!(psm.good_indices().len(), 4);
        assert_eq!(psm.bad_indices().len(), 12);
    }

    #[test]
    fn diagonal_good_entry_value() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(2, 12.0)).unwrap();
        // Single parallel transition, identical paths: weight 0, D = 1.
        let e = psm.entry_by_states((0, 0), (0, 0));
        assert!((e.val - 0.25).abs() < 1e-15);
        assert_eq!(e.der, 0.0);
    }

    #[test]
    fn identical_path_entries_have_zero_derivative() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(1, 9.0)).unwrap();
        for u in 0..4 {
            for g in t.groups(u) {
                if g.transitions.len() == 1 {
                    let e = psm.entry_by_states((u, u), (g.next_state, g.next_state));
                    assert_eq!(e.der, 0.0);
                }
            }
        }
    }

    #[test]
    fn entry_values_are_probability_weighted() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(2, 12.0)).unwrap();
        for r in 0..psm.dim() {
            for col in 0..psm.dim() {
                let e = psm.entry(r, col);
                assert!(e.val >= 0.0 && e.val <= 1.0 + 1e-12, "entry ({r},{col}) = {}", e.val);
            }
        }
    }

    #[test]
    fn bound_vanishes_at_high_snr() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(2, 60.0)).unwrap();
        let r = ber_upper_bound(&psm, t.info_bits_per_step()).unwrap();
        assert!(!r.divergent);
        assert!(r.p_b_bound < 1e-10, "bound {}", r.p_b_bound);
    }

    #[test]
    fn bound_is_monotone_in_snr() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let mut prev = f64::INFINITY;
        for snr_db in [8.0, 10.0, 12.0, 14.0, 16.0, 20.0, 24.0] {
            let psm = ProductStateMatrix::build(&t, &c, &ctx(2, snr_db)).unwrap();
            let r = ber_upper_bound(&psm, t.info_bits_per_step()).unwrap();
            if !r.divergent {
                assert!(r.p_b_bound <= prev + 1e-15, "snr {snr_db}");
                prev = r.p_b_bound;
            }
        }
        assert!(prev < 1.0);
    }

    #[test]
    fn low_snr_diverges() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let psm = ProductStateMatrix::build(&t, &c, &ctx(1, -10.0)).unwrap();
        let r = ber_upper_bound(&psm, t.info_bits_per_step()).unwrap();
        assert!(r.divergent);
        assert!(r.spectral_radius >= 1.0);
        assert!(r.p_b_bound.is_infinite());
    }

    #[test]
    fn permutation_of_states_leaves_bound_unchanged() {
        let t = mcs1_trellis();
        let c = Constellation::conventional(16).unwrap();
        let context = ctx(2, 11.0);
        let psm = ProductStateMatrix::build(&t, &c, &context).unwrap();
        let l = t.info_bits_per_step();
        let base = ber_upper_bound(&psm, l).unwrap().p_b_bound;

        let perm = [2usize, 0, 3, 1];
        let n = 4usize;
        let dim = n * n;
        let map = |idx: usize| -> usize {
            let (u, v) = (idx / n, idx % n);
            perm[u] * n + perm[v]
        };
        let mut entries = vec![Dual::ZERO; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                entries[map(r) * dim + map(col)] = psm.entry(r, col);
            }
        }
        let permuted = ProductStateMatrix::from_entries(n, entries, context).unwrap();
        let permuted_bound = ber_upper_bound(&permuted, l).unwrap().p_b_bound;
        assert!(
            (permuted_bound - base).abs() <= 1e-12 * base.abs(),
            "{permuted_bound} vs {base}"
        );
    }
}
