//! Localization of the finest factorization partition for pure states,
//! using only Schmidt decompositions across 2-partitions.
//!
//! The worklist starts with the full index set. Each block is scanned
//! across its bipartitions in canonical order; the first rank-1 hit splits
//! it and the two halves carry their Schmidt factors back into the queue
//! (any rank-1 split is safe because the finest partition of a pure state
//! is unique, and first-hit minimizes decompositions). A block with no
//! rank-1 cut commits to the output as irreducible.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::partitions::{Bipartition, IndexBlock, Partition};
use crate::states::{PureState, SubsystemDims};
use crate::worklist::{self, Scan};

/// One Schmidt test from the scan trail: which block, which cut, what
/// rank came out, and whether the block was split there.
#[derive(Debug, Clone, Serialize)]
pub struct EvidenceRecord {
    pub block: IndexBlock,
    #[serde(rename = "left")]
    pub cut_left: IndexBlock,
    #[serde(rename = "right")]
    pub cut_right: IndexBlock,
    pub schmidt_rank: usize,
    pub split: bool,
}

/// Result of localizing a pure state: the finest partition at the given
/// tolerance, per-block factor states, and the full evidence trail.
#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub partition: Partition,
    /// One factor per partition block, in canonical block order,
    /// recomputed from the input state by marginal-eigenvector extraction.
    pub factors: Vec<PureState>,
    pub evidence: Vec<EvidenceRecord>,
    pub tolerance: f64,
    pub fully_separable: bool,
    pub fully_entangled: bool,
}

impl SeparabilityReport {
    /// Number of Schmidt decompositions in the trail.
    pub fn schmidt_tests(&self) -> usize {
        self.evidence.len()
    }

    /// Tensor of the reported factors, re-permuted to the original
    /// subsystem order.
    pub fn reassemble(&self) -> Result<PureState> {
        crate::states::assemble(
            self.partition
                .blocks()
                .iter()
                .cloned()
                .zip(self.factors.iter().cloned())
                .collect(),
        )
    }
}

/// Outcome of a single product test across one bipartition.
#[derive(Debug, Clone)]
pub struct ProductCheck {
    pub split: bool,
    pub schmidt_rank: usize,
    /// Top Schmidt pair, present exactly when `split` holds.
    pub factors: Option<(PureState, PureState)>,
}

/// Tests whether `psi` factorizes across `bp` (Schmidt rank 1 at the
/// relative cut `tol`). On a split the factors are the top Schmidt pair.
pub fn is_product_across(psi: &PureState, bp: &Bipartition, tol: f64) -> Result<ProductCheck> {
    let sd = psi.schmidt(bp, tol)?;
    if sd.rank != 1 {
        return Ok(ProductCheck {
            split: false,
            schmidt_rank: sd.rank,
            factors: None,
        });
    }
    let dims = psi.dims().dims();
    let left_dims = SubsystemDims::new(linalg::sub_dims(dims, bp.left().members()))?;
    let right_dims = SubsystemDims::new(linalg::sub_dims(dims, bp.right().members()))?;
    let left = PureState::new(left_dims, sd.left_vectors.column(0))?;
    let right = PureState::new(right_dims, sd.right_vectors.column(0))?;
    Ok(ProductCheck {
        split: true,
        schmidt_rank: 1,
        factors: Some((left, right)),
    })
}

/// Finds the finest partition under which `psi` factorizes, at relative
/// Schmidt cut `tol`, together with factor states and evidence.
pub fn localize(psi: &PureState, tol: f64) -> Result<SeparabilityReport> {
    let n = psi.n_subsystems();
    let mut evidence: Vec<EvidenceRecord> = Vec::new();

    let partition = worklist::run(
        (IndexBlock::full(n), psi.clone()),
        |block, phi: &PureState| {
            for bp in crate::partitions::enumerate_bipartitions(block)? {
                let check = is_product_across(phi, &bp.relative_to(block)?, tol)?;
                evidence.push(EvidenceRecord {
                    block: block.clone(),
                    cut_left: bp.left().clone(),
                    cut_right: bp.right().clone(),
                    schmidt_rank: check.schmidt_rank,
                    split: check.split,
                });
                if let Some((left, right)) = check.factors {
                    return Ok(Scan::Split(bp, left, right));
                }
            }
            Ok(Scan::Irreducible)
        },
    )?;

    // Final factors come from the original state per terminal block
    // (marginal-eigenvector extraction), not from the recursion, so errors
    // do not accumulate across split depth.
    let mut factors = Vec::with_capacity(partition.num_blocks());
    for block in partition.blocks() {
        if block.len() == n {
            factors.push(psi.clone());
        } else {
            let rho = psi.reduced_density(block)?;
            let (_, vec) = linalg::top_eigenpair(rho.matrix())?;
            factors.push(PureState::new(rho.dims().clone(), vec)?);
        }
    }

    Ok(SeparabilityReport {
        fully_separable: partition.is_singletons(),
        fully_entangled: partition.is_single_block(),
        partition,
        factors,
        evidence,
        tolerance: tol,
    })
}

/// [`localize`] at the default tolerance.
pub fn localize_default(psi: &PureState) -> Result<SeparabilityReport> {
    localize(psi, DEFAULT_RANK_TOL)
}
