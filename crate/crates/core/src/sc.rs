//! Successive cancellation over the code tree.
//!
//! The decoder walks the leaves `u_1 .. u_N` in order. Channel LLRs are
//! bit-reverse permuted on entry so the tree below is the plain
//! `G_2^{⊗n}` tree: a node with LLRs `a` (size `2s`) feeds its left child
//! `f(a_j, a_{j+s})` and its right child `a_{j+s} + (1 - 2 l_j) a_j`, and
//! returns the codeword `(l ⊕ r, r)`.
//!
//! Work is measured in f/g evaluations ("visits"); a full pass costs
//! `N log2 N`. A decode can resume from any leaf of an earlier trace: the
//! prefix is replayed from the stored hard decisions (partial sums are
//! re-encoded, not re-decoded) and only the LLR path down to the resume
//! leaf, `N - 1` evaluations, is recomputed.

use crate::codec::{bit_reversal_perm, transform_in_place, CodeConfig};
use crate::{Error, Real, Result};

/// Check-node rule used by `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckRule {
    /// `2 atanh(tanh(a/2) tanh(b/2))`, evaluated in a log-domain form that
    /// cannot overflow.
    #[default]
    Exact,
    MinSum,
}

impl CheckRule {
    #[inline]
    pub fn apply<T: Real>(self, a: T, b: T) -> T {
        let sign = if (a < T::zero()) ^ (b < T::zero()) { -T::one() } else { T::one() };
        let m = a.abs().min(b.abs());
        match self {
            CheckRule::MinSum => sign * m,
            CheckRule::Exact => {
                sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
            }
        }
    }
}

#[inline]
pub(crate) fn g_update<T: Real>(a: T, b: T, left_bit: u8) -> T {
    if left_bit == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision on an LLR; a zero LLR decides 0.
#[inline]
pub fn hard_decision<T: Real>(llr: T) -> u8 {
    (llr < T::zero()) as u8
}

/// Result of one SC pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ScTrace<T> {
    pub u_hat: Vec<u8>,
    /// `L(u_i)` at the moment `u_i` was decided, before any flip.
    pub decision_llrs: Vec<T>,
    pub visits: u64,
}

impl<T: Real> ScTrace<T> {
    /// `(1 - 2 û_i) L(u_i)`, 1-based: the LLR seen from the side of the
    /// decision actually taken. Equals `|L(u_i)|` for unflipped unfrozen bits.
    pub fn aligned_llr(&self, i: usize) -> T {
        let l = self.decision_llrs[i - 1];
        if self.u_hat[i - 1] == 0 {
            l
        } else {
            -l
        }
    }
}

pub fn visit_count<T>(trace: &ScTrace<T>) -> u64 {
    trace.visits
}

/// Strictly increasing 1-based positions whose hard decision is inverted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FlipSet(Vec<usize>);

impl FlipSet {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        if positions.first() == Some(&0) {
            return Err(Error::Input("flip positions are 1-based".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input(format!("flip positions {positions:?} not strictly increasing")));
        }
        Ok(Self(positions))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// This set plus `i`, which must exceed every current member.
    pub fn extended(&self, i: usize) -> Result<Self> {
        if self.last().is_some_and(|l| l >= i) {
            return Err(Error::Input(format!("u_{i} does not extend {:?}", self.0)));
        }
        let mut v = self.0.clone();
        v.push(i);
        Ok(Self(v))
    }

    pub fn validate(&self, config: &CodeConfig) -> Result<()> {
        for &i in &self.0 {
            if i == 0 || i > config.len() {
                return Err(Error::Input(format!("flip position {i} out of range")));
            }
            if config.is_frozen(i) {
                return Err(Error::Input(format!("flip position u_{i} is frozen")));
            }
        }
        Ok(())
    }
}

/// Reusable SC workspace for one block length.
#[derive(Debug, Clone)]
pub struct ScDecoder<T> {
    log_len: u32,
    rule: CheckRule,
    perm: Vec<usize>,
    /// `llr[d]` holds the node at depth `d` on the path to the current leaf.
    llr: Vec<Vec<T>>,
    /// `left[d]` holds the codeword of the finished left child of the depth-`d` node.
    left: Vec<Vec<u8>>,
    scratch: Vec<u8>,
    visits: u64,
}

impl<T: Real> ScDecoder<T> {
    pub fn new(log_len: u32) -> Self {
        Self::with_rule(log_len, CheckRule::Exact)
    }

    pub fn with_rule(log_len: u32, rule: CheckRule) -> Self {
        let n = log_len as usize;
        let len = 1usize << log_len;
        Self {
            log_len,
            rule,
            perm: bit_reversal_perm(log_len).into_iter().map(|p| p - 1).collect(),
            llr: (0..=n).map(|d| vec![T::zero(); len >> d]).collect(),
            left: (0..n).map(|d| vec![0u8; len >> (d + 1)]).collect(),
            scratch: vec![0u8; len],
            visits: 0,
        }
    }

    pub fn rule(&self) -> CheckRule {
        self.rule
    }

    fn check_inputs(&self, llrs: &[T], config: &CodeConfig) -> Result<()> {
        if config.log_len() != self.log_len {
            return Err(Error::Input(format!(
                "decoder built for N = {}, code has N = {}",
                1usize << self.log_len,
                config.len()
            )));
        }
        if llrs.len() != config.len() {
            return Err(Error::Input(format!(
                "{} LLRs supplied for block length {}",
                llrs.len(),
                config.len()
            )));
        }
        Ok(())
    }

    fn load(&mut self, llrs: &[T]) {
        for (dst, &p) in self.llr[0].iter_mut().zip(&self.perm) {
            *dst = llrs[p];
        }
    }

    /// Fills `llr[first..=n]` along the path to `leaf` (0-based).
    fn descend(&mut self, leaf: usize, first: usize) {
        let n = self.log_len as usize;
        for d in first..=n {
            let size = 1usize << (n - d);
            let (upper, lower) = self.llr.split_at_mut(d);
            let parent = &upper[d - 1];
            let node = &mut lower[0];
            if (leaf >> (n - d)) & 1 == 1 {
                let left = &self.left[d - 1];
                for j in 0..size {
                    node[j] = g_update(parent[j], parent[j + size], left[j]);
                }
            } else {
                for j in 0..size {
                    node[j] = self.rule.apply(parent[j], parent[j + size]);
                }
            }
            self.visits += size as u64;
        }
    }

    /// Depth of the shallowest node that must be recomputed for `leaf`.
    fn first_dirty_depth(&self, leaf: usize) -> usize {
        if leaf == 0 {
            1
        } else {
            let n = self.log_len as usize;
            let top = (usize::BITS - (leaf ^ (leaf - 1)).leading_zeros()) as usize;
            n - top + 1
        }
    }

    /// Propagates the decided bit of `leaf` into the partial sums.
    fn commit(&mut self, leaf: usize, bit: u8) {
        let n = self.log_len as usize;
        self.scratch[0] = bit;
        let mut d = n;
        while d > 0 {
            let size = 1usize << (n - d);
            if (leaf >> (n - d)) & 1 == 0 {
                self.left[d - 1][..size].copy_from_slice(&self.scratch[..size]);
                return;
            }
            let left = &self.left[d - 1];
            for j in 0..size {
                let r = self.scratch[j];
                self.scratch[size + j] = r;
                self.scratch[j] = left[j] ^ r;
            }
            d -= 1;
        }
    }

    /// Rebuilds the partial sums on the path to `leaf` from known decisions.
    fn replay_prefix(&mut self, leaf: usize, u_prefix: &[u8]) {
        let n = self.log_len as usize;
        for d in 1..=n {
            if (leaf >> (n - d)) & 1 == 1 {
                let size = 1usize << (n - d);
                let start = ((leaf >> (n - d)) - 1) << (n - d);
                let buf = &mut self.left[d - 1][..size];
                buf.copy_from_slice(&u_prefix[start..start + size]);
                transform_in_place(buf);
            }
        }
    }

    /// Core pass. `policy(i, llr, sign_bit)` returns the bit kept for
    /// unfrozen `u_i` (1-based); frozen bits are always 0.
    pub(crate) fn run<P>(
        &mut self,
        llrs: &[T],
        config: &CodeConfig,
        resume: Option<(&ScTrace<T>, usize)>,
        mut policy: P,
    ) -> Result<ScTrace<T>>
    where
        P: FnMut(usize, T, u8) -> u8,
    {
        self.check_inputs(llrs, config)?;
        let len = config.len();
        self.load(llrs);
        self.visits = 0;

        let mut u_hat = vec![0u8; len];
        let mut decision_llrs = vec![T::zero(); len];
        let mut start = 0;
        if let Some((parent, from)) = resume {
            if from == 0 || from > len {
                return Err(Error::Input(format!("resume position {from} out of range")));
            }
            if parent.u_hat.len() != len || parent.decision_llrs.len() != len {
                return Err(Error::Input("parent trace length mismatch".into()));
            }
            start = from - 1;
            u_hat[..start].copy_from_slice(&parent.u_hat[..start]);
            decision_llrs[..start].copy_from_slice(&parent.decision_llrs[..start]);
            if start > 0 {
                self.replay_prefix(start, &u_hat);
            }
        }

        let mask = config.frozen_mask();
        for leaf in start..len {
            let first = if leaf == start { 1 } else { self.first_dirty_depth(leaf) };
            self.descend(leaf, first);
            let l = self.llr[self.log_len as usize][0];
            decision_llrs[leaf] = l;
            let bit = if mask[leaf] {
                0
            } else {
                policy(leaf + 1, l, hard_decision(l)) & 1
            };
            u_hat[leaf] = bit;
            self.commit(leaf, bit);
        }
        Ok(ScTrace { u_hat, decision_llrs, visits: self.visits })
    }

    /// SC with the decisions at `flips` inverted.
    pub fn decode(&mut self, llrs: &[T], config: &CodeConfig, flips: &FlipSet) -> Result<ScTrace<T>> {
        flips.validate(config)?;
        self.run(llrs, config, None, |i, _, s| if flips.contains(i) { s ^ 1 } else { s })
    }

    /// Continues `parent` from `u_from` onward (1-based), keeping its
    /// decisions before `from` and inverting the decisions at `flips`
    /// (members below `from` are assumed already reflected in `parent`).
    pub fn resume(
        &mut self,
        llrs: &[T],
        config: &CodeConfig,
        parent: &ScTrace<T>,
        from: usize,
        flips: &FlipSet,
    ) -> Result<ScTrace<T>> {
        flips.validate(config)?;
        self.run(llrs, config, Some((parent, from)), |i, _, s| {
            if flips.contains(i) {
                s ^ 1
            } else {
                s
            }
        })
    }
}

pub fn sc_decode<T: Real>(llrs: &[T], config: &CodeConfig) -> Result<ScTrace<T>> {
    ScDecoder::new(config.log_len()).decode(llrs, config, &FlipSet::empty())
}

pub fn sc_decode_flip<T: Real>(llrs: &[T], config: &CodeConfig, flips: &FlipSet) -> Result<ScTrace<T>> {
    ScDecoder::new(config.log_len()).decode(llrs, config, flips)
}
