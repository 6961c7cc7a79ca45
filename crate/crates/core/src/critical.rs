//! Tree coloring, rate-1 subblock partition and critical sets.
//!
//! A node is black when every leaf below it is unfrozen, white when every
//! leaf is frozen, gray otherwise. The maximal black subtrees are the rate-1
//! subblocks; the critical set holds the first leaf of each.

use std::sync::OnceLock;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeColor {
    White,
    Black,
    Gray,
}

impl NodeColor {
    fn merge(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            NodeColor::Gray
        }
    }
}

/// Colors per depth; `levels[d][k]` is the `k`-th node at depth `d`
/// (depth 0 is the root, depth `n` the leaves `u_1 .. u_N`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeColoring {
    pub levels: Vec<Vec<NodeColor>>,
}

impl TreeColoring {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> NodeColor {
        self.levels[0][0]
    }
}

fn check_mask(mask: &[bool]) -> Result<u32> {
    if mask.is_empty() || !mask.len().is_power_of_two() {
        return Err(Error::Input(format!(
            "frozen mask length {} is not a power of two",
            mask.len()
        )));
    }
    Ok(mask.len().trailing_zeros())
}

pub fn color_tree(frozen_mask: &[bool]) -> Result<TreeColoring> {
    let n = check_mask(frozen_mask)? as usize;
    let mut levels = vec![Vec::new(); n + 1];
    levels[n] = frozen_mask
        .iter()
        .map(|&f| if f { NodeColor::White } else { NodeColor::Black })
        .collect();
    for d in (0..n).rev() {
        levels[d] = levels[d + 1]
            .chunks_exact(2)
            .map(|pair| pair[0].merge(pair[1]))
            .collect();
    }
    Ok(TreeColoring { levels })
}

/// One rate-1 subblock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subblock {
    /// First leaf, 1-based.
    pub first: usize,
    /// Number of leaves, a power of two.
    pub size: usize,
    pub root_depth: u32,
}

impl Subblock {
    pub fn last(&self) -> usize {
        self.first + self.size - 1
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.first..=self.last()).contains(&i)
    }

    pub fn log_size(&self) -> u32 {
        self.size.trailing_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubblockPartition {
    pub blocks: Vec<Subblock>,
}

impl SubblockPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block holding unfrozen leaf `i`.
    pub fn block_of(&self, i: usize) -> Option<&Subblock> {
        let idx = self.blocks.partition_point(|b| b.first <= i);
        idx.checked_sub(1)
            .map(|k| &self.blocks[k])
            .filter(|b| b.contains(i))
    }
}

fn collect_blocks(coloring: &TreeColoring) -> Vec<Subblock> {
    let n = coloring.depth();
    let mut blocks = Vec::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((d, k)) = stack.pop() {
        match coloring.levels[d][k] {
            NodeColor::White => {}
            NodeColor::Black => {
                let size = 1usize << (n - d);
                blocks.push(Subblock { first: k * size + 1, size, root_depth: d as u32 });
            }
            NodeColor::Gray => {
                stack.push((d + 1, 2 * k + 1));
                stack.push((d + 1, 2 * k));
            }
        }
    }
    blocks
}

pub fn partition(frozen_mask: &[bool]) -> Result<SubblockPartition> {
    let blocks = collect_blocks(&color_tree(frozen_mask)?);
    if blocks.is_empty() {
        return Err(Error::EmptyPartition);
    }
    Ok(SubblockPartition { blocks })
}

/// Sorted 1-based members.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CriticalSet(Vec<usize>);

impl CriticalSet {
    pub fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self(members)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl From<&SubblockPartition> for CriticalSet {
    fn from(p: &SubblockPartition) -> Self {
        Self(p.blocks.iter().map(|b| b.first).collect())
    }
}

pub fn critical_set(frozen_mask: &[bool]) -> Result<CriticalSet> {
    Ok(CriticalSet::from(&partition(frozen_mask)?))
}

/// Critical set of the code with `u_1 .. u_prefix_end` treated as frozen.
/// An empty result (nothing unfrozen after the prefix) is not an error.
pub fn modified_critical_set(frozen_mask: &[bool], prefix_end: usize) -> Result<CriticalSet> {
    check_mask(frozen_mask)?;
    if prefix_end > frozen_mask.len() {
        return Err(Error::Input(format!(
            "prefix end {prefix_end} beyond block length {}",
            frozen_mask.len()
        )));
    }
    let mut mask = frozen_mask.to_vec();
    mask[..prefix_end].iter_mut().for_each(|f| *f = true);
    let blocks = collect_blocks(&color_tree(&mask)?);
    Ok(CriticalSet(blocks.iter().map(|b| b.first).collect()))
}

/// Modified critical sets for every prefix of one mask, computed on first use.
#[derive(Debug)]
pub struct LayeredCriticalSets {
    mask: Vec<bool>,
    by_prefix: Vec<OnceLock<CriticalSet>>,
}

impl LayeredCriticalSets {
    pub fn new(frozen_mask: &[bool]) -> Result<Self> {
        check_mask(frozen_mask)?;
        Ok(Self {
            mask: frozen_mask.to_vec(),
            by_prefix: (0..=frozen_mask.len()).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `modified_critical_set(mask, prefix_end)`; `get(0)` is the plain critical set.
    pub fn get(&self, prefix_end: usize) -> &CriticalSet {
        self.by_prefix[prefix_end].get_or_init(|| {
            modified_critical_set(&self.mask, prefix_end).expect("prefix validated by index")
        })
    }
}
