//! Reference decoders: CRC-aided SC list and the genie-aided SC decoder.

use std::rc::Rc;

use crate::codec::{bit_reversal_perm, CodeConfig};
use crate::sc::{g_update, hard_decision, CheckRule, ScDecoder};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub u_hat: Vec<u8>,
    pub crc_ok: bool,
    /// f/g evaluations, summed over all list paths for CA-SCL.
    pub visits: u64,
}

/// Corrects the first `k` wrong hard decisions using `true_u`.
pub fn genie_sc_decode<T: Real>(
    llrs: &[T],
    config: &CodeConfig,
    true_u: &[u8],
    k: usize,
) -> Result<DecodeOutcome> {
    if true_u.len() != config.len() {
        return Err(Error::Input("true message length mismatch".into()));
    }
    let mut spent = 0;
    let trace = ScDecoder::new(config.log_len()).run(llrs, config, None, |i, _, sign| {
        let truth = true_u[i - 1];
        if sign != truth && spent < k {
            spent += 1;
            truth
        } else {
            sign
        }
    })?;
    Ok(DecodeOutcome {
        crc_ok: config.crc_passes(&trace.u_hat),
        u_hat: trace.u_hat,
        visits: trace.visits,
    })
}

/// Decision history shared between paths: `(bit, parent)` records.
const NO_PARENT: u32 = u32::MAX;

#[derive(Clone)]
struct Path<T> {
    /// `llr[d - 1]` is the depth-`d` node on the current leaf path.
    llr: Vec<Rc<Vec<T>>>,
    left: Vec<Rc<Vec<u8>>>,
    metric: T,
    tail: u32,
}

struct Candidate<T> {
    path: usize,
    bit: u8,
    metric: T,
    order: usize,
}

/// SC list decoder with copy-on-write path state (lazy copying).
pub struct ListDecoder<T> {
    log_len: u32,
    list_size: usize,
    rule: CheckRule,
    perm: Vec<usize>,
    channel: Vec<T>,
    scratch: Vec<u8>,
    history: Vec<(u8, u32)>,
}

impl<T: Real> ListDecoder<T> {
    pub fn new(log_len: u32, list_size: usize) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::Config("list size must be at least 1".into()));
        }
        let len = 1usize << log_len;
        Ok(Self {
            log_len,
            list_size,
            rule: CheckRule::Exact,
            perm: bit_reversal_perm(log_len).into_iter().map(|p| p - 1).collect(),
            channel: vec![T::zero(); len],
            scratch: vec![0; len],
            history: Vec::new(),
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    fn fresh_path(&self) -> Path<T> {
        let n = self.log_len as usize;
        let len = 1usize << n;
        Path {
            llr: (1..=n).map(|d| Rc::new(vec![T::zero(); len >> d])).collect(),
            left: (0..n).map(|d| Rc::new(vec![0u8; len >> (d + 1)])).collect(),
            metric: T::zero(),
            tail: NO_PARENT,
        }
    }

    fn descend(&self, path: &mut Path<T>, leaf: usize) -> u64 {
        let n = self.log_len as usize;
        let first = if leaf == 0 {
            1
        } else {
            n - (usize::BITS - (leaf ^ (leaf - 1)).leading_zeros()) as usize + 1
        };
        let mut visits = 0;
        for d in first..=n {
            let size = 1usize << (n - d);
            let (upper, lower) = path.llr.split_at_mut(d - 1);
            let parent: &[T] = if d == 1 { &self.channel } else { &upper[d - 2] };
            let node = Rc::make_mut(&mut lower[0]);
            if (leaf >> (n - d)) & 1 == 1 {
                let left = &path.left[d - 1];
                for j in 0..size {
                    node[j] = g_update(parent[j], parent[j + size], left[j]);
                }
            } else {
                for j in 0..size {
                    node[j] = self.rule.apply(parent[j], parent[j + size]);
                }
            }
            visits += size as u64;
        }
        visits
    }

    fn commit(scratch: &mut [u8], log_len: u32, path: &mut Path<T>, leaf: usize, bit: u8) {
        let n = log_len as usize;
        scratch[0] = bit;
        let mut d = n;
        while d > 0 {
            let size = 1usize << (n - d);
            if (leaf >> (n - d)) & 1 == 0 {
                Rc::make_mut(&mut path.left[d - 1])[..size].copy_from_slice(&scratch[..size]);
                return;
            }
            let left = &path.left[d - 1];
            for j in 0..size {
                let r = scratch[j];
                scratch[size + j] = r;
                scratch[j] = left[j] ^ r;
            }
            d -= 1;
        }
    }

    fn record(&mut self, path: &mut Path<T>, bit: u8) {
        self.history.push((bit, path.tail));
        path.tail = (self.history.len() - 1) as u32;
    }

    fn message(&self, path: &Path<T>, len: usize) -> Vec<u8> {
        let mut u = vec![0u8; len];
        let mut at = path.tail;
        let mut k = len;
        while at != NO_PARENT {
            k -= 1;
            let (bit, parent) = self.history[at as usize];
            u[k] = bit;
            at = parent;
        }
        u
    }

    pub fn decode(&mut self, llrs: &[T], config: &CodeConfig) -> Result<DecodeOutcome> {
        if config.log_len() != self.log_len || llrs.len() != config.len() {
            return Err(Error::Input(format!(
                "{} LLRs for a list decoder of length {}",
                llrs.len(),
                1usize << self.log_len
            )));
        }
        let len = config.len();
        for (dst, &p) in self.channel.iter_mut().zip(&self.perm) {
            *dst = llrs[p];
        }
        self.history.clear();
        let mut paths = vec![self.fresh_path()];
        let mut visits = 0u64;
        let mask = config.frozen_mask();

        for leaf in 0..len {
            let mut leaf_llrs = Vec::with_capacity(paths.len());
            for path in paths.iter_mut() {
                visits += self.descend(path, leaf);
                leaf_llrs.push(path.llr.last().map_or(self.channel[0], |v| v[0]));
            }
            if mask[leaf] {
                for (path, &l) in paths.iter_mut().zip(&leaf_llrs) {
                    if l < T::zero() {
                        path.metric = path.metric + l.abs();
                    }
                    Self::commit(&mut self.scratch, self.log_len, path, leaf, 0);
                    self.record(path, 0);
                }
                continue;
            }

            let mut cands = Vec::with_capacity(2 * paths.len());
            for (p, (path, &l)) in paths.iter().zip(&leaf_llrs).enumerate() {
                let sign = hard_decision(l);
                cands.push(Candidate { path: p, bit: sign, metric: path.metric, order: 2 * p });
                cands.push(Candidate {
                    path: p,
                    bit: sign ^ 1,
                    metric: path.metric + l.abs(),
                    order: 2 * p + 1,
                });
            }
            if cands.len() > self.list_size {
                cands.sort_by(|a, b| {
                    a.metric
                        .partial_cmp(&b.metric)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.order.cmp(&b.order))
                });
                cands.truncate(self.list_size);
                cands.sort_by_key(|c| c.order);
            }
            let mut next = Vec::with_capacity(cands.len());
            for c in &cands {
                let mut path = paths[c.path].clone();
                path.metric = c.metric;
                Self::commit(&mut self.scratch, self.log_len, &mut path, leaf, c.bit);
                self.record(&mut path, c.bit);
                next.push(path);
            }
            paths = next;
        }

        let mut ranked: Vec<(T, Vec<u8>)> =
            paths.iter().map(|p| (p.metric, self.message(p, len))).collect();
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let passing = ranked.iter().position(|(_, u)| config.crc_passes(u));
        let (crc_ok, pick) = match passing {
            Some(k) => (true, k),
            None => (false, 0),
        };
        Ok(DecodeOutcome { u_hat: ranked.swap_remove(pick).1, crc_ok, visits })
    }
}

/// CRC-aided SCL: best-metric CRC-passing path, else best-metric path.
pub fn ca_scl_decode<T: Real>(llrs: &[T], config: &CodeConfig, list_size: usize) -> Result<DecodeOutcome> {
    ListDecoder::new(config.log_len(), list_size)?.decode(llrs, config)
}
