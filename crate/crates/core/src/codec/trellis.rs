use crate::codec::encoder::Encoder;
use crate::codec::puncture::PuncturePattern;
use crate::error::{Error, Result};

/// Longest super-step, in base encoder steps, that alignment search will try.
pub const MAX_SUPER_STEP: usize = 64;

/// One supertrellis transition: `input_bits_per_step` information bits
/// (MSB = earliest bit) producing whole symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperTransition {
    pub input: usize,
    pub next_state: usize,
    pub symbols: Vec<usize>,
}

/// Transitions sharing the same (state, next_state) pair. Each carries
/// probability `1 / transitions.len()` within the group; `prob` is the
/// chance of reaching `next_state` at all from the source state.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelGroup {
    pub next_state: usize,
    pub transitions: Vec<usize>,
    pub prob: f64,
}

/// Trellis over grouped base steps so that every transition emits complete
/// modulation symbols. A super-step spans `info_bits_per_step` base steps
/// (one information bit each) and a whole number of puncturing periods.
#[derive(Debug, Clone)]
pub struct SuperTrellis {
    num_states: usize,
    info_bits_per_step: usize,
    symbols_per_step: usize,
    bits_per_symbol: usize,
    transitions: Vec<Vec<SuperTransition>>,
    groups: Vec<Vec<ParallelGroup>>,
}

impl SuperTrellis {
    /// Group base steps of `encoder` (punctured by `pattern`, if any) into the
    /// minimal-period supertrellis whose transitions emit whole symbols of a
    /// `modulation_order`-ary constellation.
    pub fn build(
        encoder: &Encoder,
        pattern: Option<&PuncturePattern>,
        modulation_order: usize,
    ) -> Result<Self> {
        if modulation_order < 2 || !modulation_order.is_power_of_two() {
            return Err(Error::Alignment(format!(
                "modulation order {modulation_order} is not a power of two"
            )));
        }
        if let Some(p) = pattern {
            if p.num_streams() != encoder.num_outputs() {
                return Err(Error::InvalidPattern(format!(
                    "mask has {} streams but encoder has {} outputs",
                    p.num_streams(),
                    encoder.num_outputs()
                )));
            }
        }
        let bits_per_symbol = modulation_order.trailing_zeros() as usize;
        let (info_bits_per_step, symbols_per_step) =
            super_step_shape(encoder, pattern, modulation_order)?;

        let num_states = encoder.num_states();
        let n_out = encoder.num_outputs();
        let l = info_bits_per_step;
        let mut transitions = Vec::with_capacity(num_states);
        let mut groups: Vec<Vec<ParallelGroup>> = Vec::with_capacity(num_states);
        for state in 0..num_states {
            let mut state_transitions = Vec::with_capacity(1 << l);
            for input in 0..(1usize << l) {
                let mut s = state;
                let mut kept = Vec::with_capacity(symbols_per_step * bits_per_symbol);
                for step in 0..l {
                    let bit = (input >> (l - 1 - step)) & 1 == 1;
                    let (word, next) = encoder.step(s, bit);
                    s = next;
                    for j in 0..n_out {
                        let keep = pattern.map_or(true, |p| p.keeps(j, step));
                        if keep {
                            kept.push((word >> j) & 1 == 1);
                        }
                    }
                }
                let symbols = kept
                    .chunks(bits_per_symbol)
                    .map(|chunk| chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
                    .collect();
                state_transitions.push(SuperTransition {
                    input,
                    next_state: s,
                    symbols,
                });
            }
            let mut state_groups: Vec<ParallelGroup> = Vec::new();
            for (idx, t) in state_transitions.iter().enumerate() {
                match state_groups
                    .iter_mut()
                    .find(|g| g.next_state == t.next_state)
                {
                    Some(g) => g.transitions.push(idx),
                    None => state_groups.push(ParallelGroup {
                        next_state: t.next_state,
                        transitions: vec![idx],
                        prob: 0.0,
                    }),
                }
            }
            state_groups.sort_by_key(|g| g.next_state);
            let total = (1usize << l) as f64;
            for g in &mut state_groups {
                g.prob = g.transitions.len() as f64 / total;
            }
            transitions.push(state_transitions);
            groups.push(state_groups);
        }

        Ok(Self {
            num_states,
            info_bits_per_step,
            symbols_per_step,
            bits_per_symbol,
            transitions,
            groups,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Information bits consumed per super-transition (the grouping length).
    pub fn info_bits_per_step(&self) -> usize {
        self.info_bits_per_step
    }

    pub fn symbols_per_step(&self) -> usize {
        self.symbols_per_step
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn modulation_order(&self) -> usize {
        1 << self.bits_per_symbol
    }

    /// All transitions out of `state`, indexed by input word.
    pub fn transitions(&self, state: usize) -> &[SuperTransition] {
        &self.transitions[state]
    }

    /// Parallel-transition groups out of `state`, sorted by successor.
    pub fn groups(&self, state: usize) -> &[ParallelGroup] {
        &self.groups[state]
    }
}

/// Find the minimal super-step: a multiple of the puncturing period whose
/// surviving coded bits fill whole symbols. Returns
/// (base steps, symbols per super-step).
pub(crate) fn super_step_shape(
    encoder: &Encoder,
    pattern: Option<&PuncturePattern>,
    modulation_order: usize,
) -> Result<(usize, usize)> {
    let bits_per_symbol = modulation_order.trailing_zeros() as usize;
    let period = pattern.map_or(1, |p| p.period());
    let kept_per_period = pattern.map_or(encoder.num_outputs(), |p| p.kept_per_period());
    let mut l = period;
    while l <= MAX_SUPER_STEP {
        let kept = kept_per_period * (l / period);
        if kept % bits_per_symbol == 0 {
            return Ok((l, kept / bits_per_symbol));
        }
        l += period;
    }
    Err(Error::Alignment(format!(
        "no super-step within {MAX_SUPER_STEP} base steps aligns {kept_per_period} kept bits per \
         {period}-step period to {bits_per_symbol}-bit symbols"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc57() -> Encoder {
        Encoder::new(&[0o5, 0o7]).unwrap()
    }

    #[test]
    fn unpunctured_16ary_groups_two_steps() {
        let t = SuperTrellis::build(&enc57(), None, 16).unwrap();
        assert_eq!(t.num_states(), 4);
        assert_eq!(t.info_bits_per_step(), 2);
        assert_eq!(t.symbols_per_step(), 1);
        for s in 0..4 {
            assert_eq!(t.transitions(s).len(), 4);
            // Four successors, one parallel transition each.
            assert_eq!(t.groups(s).len(), 4);
            assert!(t.groups(s).iter().all(|g| g.transitions.len() == 1));
        }
    }

    #[test]
    fn punctured_16ary_has_parallel_pairs() {
        let p = PuncturePattern::from_rows(&[&[1, 1, 0], &[0, 1, 1]]).unwrap();
        let t = SuperTrellis::build(&enc57(), Some(&p), 16).unwrap();
        assert_eq!(t.info_bits_per_step(), 3);
        assert_eq!(t.symbols_per_step(), 1);
        for s in 0..4 {
            assert_eq!(t.transitions(s).len(), 8);
            assert_eq!(t.groups(s).len(), 4);
            assert!(t.groups(s).iter().all(|g| g.transitions.len() == 2));
        }
    }

    #[test]
    fn unpunctured_4ary_is_base_trellis() {
        let t = SuperTrellis::build(&enc57(), None, 4).unwrap();
        assert_eq!(t.info_bits_per_step(), 1);
        assert_eq!(t.symbols_per_step(), 1);
        for s in 0..4 {
            assert_eq!(t.transitions(s).len(), 2);
        }
    }

    #[test]
    fn transition_probabilities_are_stochastic() {
        let p = PuncturePattern::from_rows(&[&[1, 1, 0, 1], &[0, 1, 1, 1]]).unwrap();
        let t = SuperTrellis::build(&enc57(), Some(&p), 64).unwrap();
        assert_eq!(t.info_bits_per_step(), 4);
        for s in 0..t.num_states() {
            let total: f64 = t.groups(s).iter().map(|g| g.prob).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for g in t.groups(s) {
                // Pr(state -> next) = |group| / 2^l, parallel transitions
                // equally likely within the group.
                let want = g.transitions.len() as f64 / (1u64 << t.info_bits_per_step()) as f64;
                assert!((g.prob - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two_order() {
        assert!(SuperTrellis::build(&enc57(), None, 12).is_err());
    }

    #[test]
    fn rejects_unalignable_combination() {
        // 33-step period keeping 35 bits can only align to 4-bit symbols at
        // l = 132, past the search cap.
        let mut rows: Vec<Vec<bool>> = vec![vec![true; 33], vec![false; 33]];
        rows[1][0] = true;
        rows[1][1] = true;
        let p = PuncturePattern::new(rows).unwrap();
        assert_eq!(p.kept_per_period(), 35);
        assert!(SuperTrellis::build(&enc57(), Some(&p), 16).is_err());
    }

    #[test]
    fn symbols_match_encode_then_puncture() {
        use crate::codec::constellation::group_labels;
        use crate::codec::puncture::puncture;

        let enc = enc57();
        let p = PuncturePattern::from_rows(&[&[1, 1, 0], &[0, 1, 1]]).unwrap();
        let t = SuperTrellis::build(&enc, Some(&p), 16).unwrap();
        // Walking the supertrellis must reproduce encode -> puncture -> label
        // for a multiple-of-l frame that ends wherever it ends.
        let info = [true, false, true, true, false, true];
        let mut state = 0usize;
        let mut labels = Vec::new();
        for chunk in info.chunks(t.info_bits_per_step()) {
            let word = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            let tr = &t.transitions(state)[word];
            labels.extend_from_slice(&tr.symbols);
            state = tr.next_state;
        }
        let mut coded = Vec::new();
        let mut s = 0usize;
        for &b in &info {
            let (word, next) = enc.step(s, b);
            for j in 0..2 {
                coded.push((word >> j) & 1 == 1);
            }
            s = next;
        }
        let kept = puncture(&coded, &p).unwrap();
        let want = group_labels(&kept, 4).unwrap();
        assert_eq!(labels, want);
        assert_eq!(state, s);
    }
}
