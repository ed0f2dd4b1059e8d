//! Set-partition combinatorics over subsystem indices.
//!
//! Subsystem indices are 1-based. A [`Partition`] is kept in canonical form:
//! members of each block ascending, blocks ordered by their smallest member.
//! Bipartitions are canonicalized by anchoring the smallest member of the
//! parent block in the left part, which removes the (Y,Z)/(Z,Y) duplicates.
//!
//! Counting functions ([`bell_number`], [`stirling2`]) use checked 128-bit
//! arithmetic; they are exact up to `B(42)` and return
//! [`Error::CountOverflow`] beyond that. Native 64-bit width would already
//! cover every register size this crate targets (`B(25) < 2^63`).

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap for full-partition enumeration. `B(12) = 4_213_597` is the
/// last value that is comfortable to materialize on a desk machine.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// A non-empty set of subsystem indices (1-based, strictly increasing).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexBlock {
    members: Vec<usize>,
}

impl IndexBlock {
    /// Builds a block from arbitrary member order; members are sorted.
    /// Rejects empty input, duplicates and the non-member index 0.
    pub fn new(members: impl Into<Vec<usize>>) -> Result<Self> {
        let mut members = members.into();
        members.sort_unstable();
        if members.is_empty() {
            return Err(Error::InvalidBlock("empty block".into()));
        }
        if members[0] == 0 {
            return Err(Error::InvalidBlock("indices are 1-based".into()));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBlock("duplicate member".into()));
        }
        Ok(Self { members })
    }

    pub fn singleton(member: usize) -> Self {
        assert!(member >= 1, "indices are 1-based");
        Self {
            members: vec![member],
        }
    }

    /// The full index set `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            members: (1..=n).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_member(&self) -> usize {
        self.members[0]
    }

    pub fn contains(&self, member: usize) -> bool {
        self.members.binary_search(&member).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexBlock) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }

    /// Members of `ambient` not in `self`; `None` when nothing is left.
    pub fn complement_within(&self, ambient: &IndexBlock) -> Option<IndexBlock> {
        let rest: Vec<usize> = ambient
            .members
            .iter()
            .copied()
            .filter(|m| !self.contains(*m))
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(IndexBlock { members: rest })
        }
    }
}

impl fmt::Display for IndexBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IndexBlock {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexBlock {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(deserializer)?;
        IndexBlock::new(members).map_err(D::Error::custom)
    }
}

/// A two-part split of an index block. Canonical: the smallest member of
/// the parent block sits in `left`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: IndexBlock,
    right: IndexBlock,
}

impl Bipartition {
    pub fn new(left: IndexBlock, right: IndexBlock) -> Result<Self> {
        if left.members.iter().any(|m| right.contains(*m)) {
            return Err(Error::InvalidBlock(
                "bipartition parts must be disjoint".into(),
            ));
        }
        if right.min_member() < left.min_member() {
            return Err(Error::InvalidBlock(
                "smallest member of the parent block must sit in the left part".into(),
            ));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &IndexBlock {
        &self.left
    }

    pub fn right(&self) -> &IndexBlock {
        &self.right
    }

    /// The block this bipartition splits.
    pub fn parent(&self) -> IndexBlock {
        let mut members = self.left.members.clone();
        members.extend_from_slice(&self.right.members);
        members.sort_unstable();
        IndexBlock { members }
    }

    /// Re-expresses this bipartition of `block` in local 1-based
    /// positions within the block (position of the i-th smallest member
    /// is i).
    pub fn relative_to(&self, block: &IndexBlock) -> Result<Bipartition> {
        let local = |side: &IndexBlock| -> Result<IndexBlock> {
            IndexBlock::new(
                side.members
                    .iter()
                    .map(|m| {
                        block
                            .members
                            .binary_search(m)
                            .map(|pos| pos + 1)
                            .map_err(|_| {
                                Error::InvalidBlock(format!("{m} is not a member of {block}"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        Bipartition::new(local(&self.left)?, local(&self.right)?)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.left, self.right)
    }
}

/// Streaming enumeration of the `2^(m-1) - 1` bipartitions of a block.
///
/// Order is a binary counter over the non-anchor members: counter bit `i`
/// set sends member `i+1` to the left part next to the anchor. The
/// consumer may stop at the first hit without paying for the rest.
#[derive(Debug)]
pub struct BipartitionIter {
    members: Vec<usize>,
    mask: u128,
    end: u128,
}

impl Iterator for BipartitionIter {
    type Item = Bipartition;

    fn next(&mut self) -> Option<Bipartition> {
        if self.mask >= self.end {
            return None;
        }
        let mask = self.mask;
        self.mask += 1;
        let mut left = vec![self.members[0]];
        let mut right = Vec::new();
        for (i, m) in self.members[1..].iter().enumerate() {
            if mask >> i & 1 == 1 {
                left.push(*m);
            } else {
                right.push(*m);
            }
        }
        Some(Bipartition {
            left: IndexBlock { members: left },
            right: IndexBlock { members: right },
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.end - self.mask) as usize;
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for BipartitionIter {}

/// All 2-partitions of `block`, lazily, in deterministic canonical order.
pub fn enumerate_bipartitions(block: &IndexBlock) -> Result<BipartitionIter> {
    let m = block.len();
    if m < 2 {
        return Err(Error::BlockTooSmall { members: m });
    }
    if m > 120 {
        return Err(Error::InvalidBlock(format!(
            "cannot enumerate bipartitions of a {m}-member block"
        )));
    }
    Ok(BipartitionIter {
        members: block.members.clone(),
        mask: 0,
        end: (1u128 << (m - 1)) - 1,
    })
}

/// A set partition in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<IndexBlock>,
}

impl Partition {
    /// Builds a partition from blocks, canonicalizing their order.
    /// Rejects overlapping blocks.
    pub fn new(blocks: Vec<IndexBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.min_member());
        let mut seen = std::collections::BTreeSet::new();
        for b in &blocks {
            for m in b.members() {
                if !seen.insert(*m) {
                    return Err(Error::InvalidPartition(format!(
                        "member {m} appears in two blocks"
                    )));
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn from_nested(nested: Vec<Vec<usize>>) -> Result<Self> {
        let blocks = nested
            .into_iter()
            .map(IndexBlock::new)
            .collect::<Result<Vec<_>>>()?;
        Partition::new(blocks)
    }

    /// The all-singletons partition of `{1..n}` (the finest one).
    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            blocks: (1..=n).map(IndexBlock::singleton).collect(),
        }
    }

    /// The single-block partition of `{1..n}` (the coarsest one).
    pub fn single_block(n: usize) -> Self {
        Self {
            blocks: vec![IndexBlock::full(n)],
        }
    }

    pub fn blocks(&self) -> &[IndexBlock] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Sorted union of all blocks.
    pub fn ambient(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .blocks
            .iter()
            .flat_map(|b| b.members().iter().copied())
            .collect();
        all.sort_unstable();
        all
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn to_nested(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.members.clone()).collect()
    }

    /// Relabels every member through `f` and re-canonicalizes. The map must
    /// stay injective on the ambient set.
    pub fn map_members(&self, f: impl Fn(usize) -> usize) -> Result<Partition> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| IndexBlock::new(b.members().iter().map(|m| f(*m)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let nested = Vec::<Vec<usize>>::deserialize(deserializer)?;
        Partition::from_nested(nested).map_err(D::Error::custom)
    }
}

/// Lazy enumeration of all partitions of `{1..n}` via restricted-growth
/// strings in lexicographic order. The first partition emitted is the
/// single block, the last the all-singletons one.
pub struct PartitionIter {
    rgs: Vec<usize>,
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl PartitionIter {
    fn new(n: usize) -> Self {
        Self {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            started: false,
            done: false,
        }
    }

    fn emit(&self) -> Partition {
        let nblocks = self.rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); nblocks];
        for (i, b) in self.rgs.iter().enumerate() {
            blocks[*b].push(i + 1);
        }
        Partition {
            blocks: blocks
                .into_iter()
                .map(|members| IndexBlock { members })
                .collect(),
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.emit());
        }
        if self.advance() {
            Some(self.emit())
        } else {
            self.done = true;
            None
        }
    }
}

/// All `B(n)` partitions of `{1..n}` under the default enumeration cap.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

/// All `B(n)` partitions of `{1..n}`, with an explicit cap on `n`.
pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    Ok(partition_iter_capped(n, cap)?.collect())
}

/// Streaming variant of [`enumerate_partitions`].
pub fn partition_iter(n: usize) -> Result<PartitionIter> {
    partition_iter_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn partition_iter_capped(n: usize, cap: usize) -> Result<PartitionIter> {
    if n == 0 {
        return Err(Error::InvalidPartition("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(PartitionIter::new(n))
}

/// Bell number `B(n)`, the number of partitions of an n-set, via the Bell
/// triangle. `B(0) = 1` by convention. Exact through `B(42)`.
pub fn bell_number(n: usize) -> Result<u128> {
    if n == 0 {
        return Ok(1);
    }
    // B(n) is the last entry of triangle row n-1, so nothing larger than
    // B(n) itself is ever touched.
    let mut row: Vec<u128> = vec![1];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let sum = next
                .last()
                .unwrap()
                .checked_add(*v)
                .ok_or(Error::CountOverflow { n })?;
            next.push(sum);
        }
        row = next;
    }
    Ok(*row.last().unwrap())
}

/// Stirling number of the second kind `S(n,k)`: partitions of an n-set into
/// exactly k blocks. `k > n` yields 0.
pub fn stirling2(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    if n == 0 {
        return Ok(1);
    }
    if k == 0 {
        return Ok(0);
    }
    // S(n,k) = k*S(n-1,k) + S(n-1,k-1), rolled row by row.
    let mut prev: Vec<u128> = vec![0; k + 1];
    prev[0] = 1;
    for i in 1..=n {
        let mut curr = vec![0u128; k + 1];
        for j in 1..=k.min(i) {
            let scaled = prev[j]
                .checked_mul(j as u128)
                .ok_or(Error::CountOverflow { n })?;
            curr[j] = scaled
                .checked_add(prev[j - 1])
                .ok_or(Error::CountOverflow { n })?;
        }
        prev = curr;
    }
    Ok(prev[k])
}

fn block_id_map(p: &Partition) -> std::collections::BTreeMap<usize, usize> {
    let mut map = std::collections::BTreeMap::new();
    for (id, b) in p.blocks.iter().enumerate() {
        for m in b.members() {
            map.insert(*m, id);
        }
    }
    map
}

/// Refinement order: `a` refines `b` iff every block of `a` is contained in
/// some block of `b`. Reflexive and transitive; errors when the two
/// partitions do not cover the same index set.
pub fn refines(a: &Partition, b: &Partition) -> Result<bool> {
    if a.ambient() != b.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let ids = block_id_map(b);
    Ok(a.blocks.iter().all(|block| {
        let id = ids[&block.min_member()];
        block.members().iter().all(|m| ids[m] == id)
    }))
}

/// The coarsest partition refining both `a` and `b` (blockwise
/// intersections, empties dropped).
pub fn meet(a: &Partition, b: &Partition) -> Result<Partition> {
    if a.ambient() != b.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let ids_a = block_id_map(a);
    let ids_b = block_id_map(b);
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
        std::collections::BTreeMap::new();
    for m in a.ambient() {
        groups.entry((ids_a[&m], ids_b[&m])).or_default().push(m);
    }
    Partition::new(
        groups
            .into_values()
            .map(|members| IndexBlock { members })
            .collect(),
    )
}
