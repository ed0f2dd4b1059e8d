//! The block worklist driving both localization algorithms.
//!
//! Pop a block; singletons commit straight to the output partition. For
//! larger blocks a scan callback looks for an accepted split: on a hit the
//! two halves are pushed back with their payloads, otherwise the block
//! commits as irreducible. FIFO order, at most `2n - 1` block visits.

use std::collections::VecDeque;

use crate::error::Result;
use crate::partitions::{Bipartition, IndexBlock, Partition};

/// Outcome of scanning one block's bipartitions.
pub(crate) enum Scan<P> {
    Split(Bipartition, P, P),
    Irreducible,
}

pub(crate) fn run<P>(
    root: (IndexBlock, P),
    mut scan: impl FnMut(&IndexBlock, &P) -> Result<Scan<P>>,
) -> Result<Partition> {
    let mut queue = VecDeque::from([root]);
    let mut committed = Vec::new();
    while let Some((block, payload)) = queue.pop_front() {
        if block.len() == 1 {
            committed.push(block);
            continue;
        }
        match scan(&block, &payload)? {
            Scan::Split(bp, left_payload, right_payload) => {
                queue.push_back((bp.left().clone(), left_payload));
                queue.push_back((bp.right().clone(), right_payload));
            }
            Scan::Irreducible => committed.push(block),
        }
    }
    Partition::new(committed)
}
