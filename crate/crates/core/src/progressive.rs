//! Progressive multi-level bit flipping over layered critical sets.
//!
//! The search tree has the plain SC estimate at its root. A node whose last
//! flip is `u_i` spawns one child per member of the critical set recomputed
//! with `u_1 .. u_i` frozen. Nodes are decoded level by level (children
//! queued in flip-metric order under their parent) until a candidate passes
//! the CRC, the tree is exhausted or the node budget runs out.
//!
//! Two GA-based pruning rules trim the tree:
//! * `E_NoChild`: too many later LLRs fall below `mu - gamma_left * sigma`,
//!   so the node probably carries a wrong flip and gets no children;
//! * `E_NotSelect(u_i)`: `L(u_i)` exceeds `mu + gamma_right * sigma`, so
//!   `u_i` is probably right and is not offered as a flip.
//!
//! LLRs are compared in decision-aligned form (`(1 - 2 û_i) L(u_i)`), which
//! is what the all-zero-codeword analysis sees for an arbitrary codeword.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::codec::CodeConfig;
use crate::critical::{CriticalSet, LayeredCriticalSets};
use crate::gauss::GaProfile;
use crate::sc::{FlipSet, ScDecoder, ScTrace};
use crate::{Error, Real, Result};

/// Pruning thresholds. `None` switches the corresponding rule off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneParams<T> {
    pub gamma_left: T,
    pub gamma_right: Option<T>,
    /// `omega[l]` applies to nodes at level `l`; missing entries are off.
    pub omega: Vec<Option<T>>,
}

/// Rows of the level-4 parameter table: (Eb/N0, γ_left, γ_right, ω_2, ω_3).
const LEVEL4_TABLE: [(f64, f64, f64, f64, f64); 5] = [
    (1.5, 3.6, 2.0, 0.5, 0.25),
    (1.75, 3.6, 2.0, 0.5, 0.25),
    (2.0, 3.6, 2.0, 0.5, 0.25),
    (2.25, 4.0, 3.0, 0.6, 0.3),
    (2.5, 6.0, 5.0, 0.6, 0.3),
];

impl<T: Real> PruneParams<T> {
    /// No pruning at all: every node expands every candidate.
    pub fn disabled() -> Self {
        Self { gamma_left: T::zero(), gamma_right: None, omega: Vec::new() }
    }

    /// Tuned level-4 parameters for N = 1024, K = 512, nearest tabulated
    /// Eb/N0 row.
    pub fn tuned(ebn0_db: f64) -> Self {
        let row = LEVEL4_TABLE
            .iter()
            .min_by(|a, b| (a.0 - ebn0_db).abs().total_cmp(&(b.0 - ebn0_db).abs()))
            .expect("table is not empty");
        Self {
            gamma_left: T::of(row.1),
            gamma_right: Some(T::of(row.2)),
            omega: vec![None, None, Some(T::of(row.3)), Some(T::of(row.4)), None],
        }
    }

    pub fn omega_at(&self, level: usize) -> Option<T> {
        self.omega.get(level).copied().flatten()
    }

    pub fn validate(&self) -> Result<()> {
        let bad_gamma = |g: T| !(g >= T::zero()) || !g.is_finite();
        if bad_gamma(self.gamma_left) || self.gamma_right.is_some_and(bad_gamma) {
            return Err(Error::Config("pruning gammas must be finite and nonnegative".into()));
        }
        if self.omega.iter().flatten().any(|&w| !(w >= T::zero() && w <= T::one())) {
            return Err(Error::Config("pruning omegas must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

impl<T: Real> Default for PruneParams<T> {
    fn default() -> Self {
        Self::disabled()
    }
}

/// One explored node of the search tree.
#[derive(Debug, Clone)]
pub struct FlipNode<T> {
    pub flips: FlipSet,
    pub level: usize,
    pub trace: Rc<ScTrace<T>>,
    /// Candidates offered to the next level after pruning; empty when the
    /// node was not expanded.
    pub child_set: CriticalSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgressiveResult {
    pub u_hat: Vec<u8>,
    pub crc_ok: bool,
    pub nodes_explored: usize,
    pub total_visits: u64,
    pub winning_flips: Option<FlipSet>,
    pub budget_exhausted: bool,
}

/// Candidates sorted by `|L(u_i)| / mu_i`, ties to the lower index.
pub fn flip_order<T: Real>(
    candidates: &CriticalSet,
    trace: &ScTrace<T>,
    profile: &GaProfile<T>,
) -> Result<Vec<usize>> {
    let mut keyed = Vec::with_capacity(candidates.len());
    for &i in candidates.members() {
        let mu = profile.mean(i);
        if !(mu > T::zero()) {
            return Err(Error::ZeroMean(i));
        }
        keyed.push((trace.decision_llrs[i - 1].abs() / mu, i));
    }
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}

/// `N_2 / N_1 >= omega_level` over unfrozen `u_j`, `j > after`, `j ∉ exclude`.
pub fn e_no_child<T: Real>(
    trace: &ScTrace<T>,
    after: usize,
    config: &CodeConfig,
    profile: &GaProfile<T>,
    params: &PruneParams<T>,
    level: usize,
    exclude: &CriticalSet,
) -> bool {
    let Some(omega) = params.omega_at(level) else {
        return false;
    };
    let two = T::of(2.0);
    let (mut n1, mut n2) = (0usize, 0usize);
    for &j in config.info_set().iter().filter(|&&j| j > after) {
        if exclude.contains(j) {
            continue;
        }
        n1 += 1;
        let mu = profile.mean(j);
        if trace.aligned_llr(j) < mu - params.gamma_left * (two * mu).sqrt() {
            n2 += 1;
        }
    }
    n1 > 0 && T::of(n2 as f64) >= omega * T::of(n1 as f64)
}

/// `llr > mu + gamma_right * sqrt(2 mu)`.
pub fn e_not_select<T: Real>(llr: T, mu: T, params: &PruneParams<T>) -> bool {
    match params.gamma_right {
        Some(gamma) => llr > mu + gamma * (T::of(2.0) * mu).sqrt(),
        None => false,
    }
}

/// Smallest 1-based index where `trace` disagrees with `true_u`.
pub fn genie_first_error<T>(trace: &ScTrace<T>, true_u: &[u8]) -> Option<usize> {
    trace
        .u_hat
        .iter()
        .zip(true_u)
        .position(|(a, b)| a != b)
        .map(|k| k + 1)
}

struct Pending<T> {
    parent: Rc<ScTrace<T>>,
    flips: FlipSet,
}

/// Reusable progressive decoder bound to one code.
pub struct ProgressiveDecoder<'a, T> {
    config: &'a CodeConfig,
    profile: GaProfile<T>,
    params: PruneParams<T>,
    max_level: usize,
    node_budget: usize,
    sc: ScDecoder<T>,
    layers: LayeredCriticalSets,
}

impl<'a, T: Real> ProgressiveDecoder<'a, T> {
    pub fn new(
        config: &'a CodeConfig,
        profile: &GaProfile<T>,
        max_level: usize,
        params: PruneParams<T>,
    ) -> Result<Self> {
        if config.crc().is_none() {
            return Err(Error::Config("progressive decoding needs a CRC".into()));
        }
        if profile.len() != config.len() {
            return Err(Error::Config(format!(
                "GA profile has {} means for block length {}",
                profile.len(),
                config.len()
            )));
        }
        params.validate()?;
        let layers = LayeredCriticalSets::new(config.frozen_mask())?;
        let node_budget = 4 * layers.get(0).len() * max_level;
        Ok(Self {
            config,
            profile: profile.clone(),
            params,
            max_level,
            node_budget,
            sc: ScDecoder::new(config.log_len()),
            layers,
        })
    }

    /// Caps the number of decodes (root included).
    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn node_budget(&self) -> usize {
        self.node_budget
    }

    pub fn critical_set(&self) -> &CriticalSet {
        self.layers.get(0)
    }

    pub fn decode(&mut self, llrs: &[T]) -> Result<ProgressiveResult> {
        self.search(llrs, None)
    }

    /// Like [`decode`](Self::decode), also returning every explored node in
    /// decode order.
    pub fn decode_logged(&mut self, llrs: &[T]) -> Result<(ProgressiveResult, Vec<FlipNode<T>>)> {
        let mut log = Vec::new();
        let res = self.search(llrs, Some(&mut log))?;
        Ok((res, log))
    }

    /// Pruned, metric-ordered children of a node whose last flip is `after`.
    fn children(&self, trace: &ScTrace<T>, after: usize, level: usize, root: bool) -> Result<Vec<usize>> {
        let set = self.layers.get(after);
        if set.is_empty()
            || e_no_child(trace, after, self.config, &self.profile, &self.params, level, set)
        {
            return Ok(Vec::new());
        }
        if root {
            return flip_order(set, trace, &self.profile);
        }
        let kept: Vec<usize> = set
            .members()
            .iter()
            .copied()
            .filter(|&j| !e_not_select(trace.aligned_llr(j), self.profile.mean(j), &self.params))
            .collect();
        flip_order(&CriticalSet::from_sorted(kept), trace, &self.profile)
    }

    fn search(&mut self, llrs: &[T], mut log: Option<&mut Vec<FlipNode<T>>>) -> Result<ProgressiveResult> {
        let config = self.config;
        let root = Rc::new(self.sc.decode(llrs, config, &FlipSet::empty())?);
        let mut explored = 1usize;
        let mut visits = root.visits;

        let fail = |root: &ScTrace<T>, explored, visits, budget_exhausted| ProgressiveResult {
            u_hat: root.u_hat.clone(),
            crc_ok: false,
            nodes_explored: explored,
            total_visits: visits,
            winning_flips: None,
            budget_exhausted,
        };

        let root_children = if config.crc_passes(&root.u_hat) || self.max_level == 0 {
            Vec::new()
        } else {
            self.children(&root, 0, 0, true)?
        };
        if let Some(log) = log.as_deref_mut() {
            log.push(FlipNode {
                flips: FlipSet::empty(),
                level: 0,
                trace: root.clone(),
                child_set: CriticalSet::from_sorted(sorted(&root_children)),
            });
        }
        if config.crc_passes(&root.u_hat) {
            return Ok(ProgressiveResult {
                u_hat: root.u_hat.clone(),
                crc_ok: true,
                nodes_explored: 1,
                total_visits: visits,
                winning_flips: None,
                budget_exhausted: false,
            });
        }

        let mut current: Vec<Pending<T>> = root_children
            .into_iter()
            .map(|i| Pending { parent: root.clone(), flips: FlipSet::new(vec![i]).expect("single position") })
            .collect();
        let mut level = 1;
        while !current.is_empty() {
            let mut next = Vec::new();
            for pending in current {
                if explored >= self.node_budget {
                    return Ok(fail(&root, explored, visits, true));
                }
                let at = pending.flips.last().expect("non-root node has a flip");
                let only = FlipSet::new(vec![at])?;
                let trace = self.sc.resume(llrs, config, &pending.parent, at, &only)?;
                explored += 1;
                visits += trace.visits;
                if config.crc_passes(&trace.u_hat) {
                    if let Some(log) = log.as_deref_mut() {
                        log.push(FlipNode {
                            flips: pending.flips.clone(),
                            level,
                            trace: Rc::new(trace.clone()),
                            child_set: CriticalSet::default(),
                        });
                    }
                    return Ok(ProgressiveResult {
                        u_hat: trace.u_hat,
                        crc_ok: true,
                        nodes_explored: explored,
                        total_visits: visits,
                        winning_flips: Some(pending.flips),
                        budget_exhausted: false,
                    });
                }
                let kids = if level < self.max_level {
                    self.children(&trace, at, level, false)?
                } else {
                    Vec::new()
                };
                let trace = Rc::new(trace);
                if let Some(log) = log.as_deref_mut() {
                    log.push(FlipNode {
                        flips: pending.flips.clone(),
                        level,
                        trace: trace.clone(),
                        child_set: CriticalSet::from_sorted(sorted(&kids)),
                    });
                }
                for j in kids {
                    next.push(Pending { parent: trace.clone(), flips: pending.flips.extended(j)? });
                }
            }
            current = next;
            level += 1;
        }
        Ok(fail(&root, explored, visits, false))
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// One-shot progressive decode with the default node budget.
pub fn progressive_decode<T: Real>(
    llrs: &[T],
    config: &CodeConfig,
    profile: &GaProfile<T>,
    max_level: usize,
    params: &PruneParams<T>,
) -> Result<ProgressiveResult> {
    ProgressiveDecoder::new(config, profile, max_level, params.clone())?.decode(llrs)
}
