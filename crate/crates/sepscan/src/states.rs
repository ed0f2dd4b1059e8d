//! Construction and validation of pure states and density matrices with
//! declared subsystem structure.
//!
//! Reproducibility: every random constructor is driven by ChaCha12 seeded
//! from a caller-supplied 64-bit value, with amplitudes drawn from the
//! ziggurat standard-normal sampler, so corpora rebuild identically across
//! platforms and runs.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::partitions::{Bipartition, IndexBlock};

/// Hard cap on the total Hilbert dimension (25 qubits).
pub const HILBERT_CAP: usize = 1 << 25;

/// Normalization / Hermiticity / trace tolerance for validation.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Positive-semidefiniteness slack: construction noise from mixing must
/// not trip validation, so the minimum eigenvalue may dip to -1e-10.
pub const PSD_TOL: f64 = 1e-10;

/// Ordered local Hilbert-space dimensions `(k_1, ..., k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct SubsystemDims {
    dims: Vec<usize>,
}

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidBlock("need at least one subsystem".into()));
        }
        if let Some(bad) = dims.iter().find(|k| **k < 2) {
            return Err(Error::BadLocalDimension(*bad));
        }
        let mut total: usize = 1;
        for k in &dims {
            total = total
                .checked_mul(*k)
                .filter(|t| *t <= HILBERT_CAP)
                .ok_or(Error::HilbertCap { cap: HILBERT_CAP })?;
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Dimensions of the subsystems named by `block` (1-based).
    pub fn restrict(&self, block: &IndexBlock) -> Result<SubsystemDims> {
        self.check_block(block)?;
        Ok(SubsystemDims {
            dims: linalg::sub_dims(&self.dims, block.members()),
        })
    }

    pub fn check_block(&self, block: &IndexBlock) -> Result<()> {
        let n = self.len();
        if block.members().last().copied().unwrap_or(0) > n {
            return Err(Error::InvalidBlock(format!(
                "block {block} exceeds the {n} declared subsystems"
            )));
        }
        Ok(())
    }

    pub fn concat(&self, other: &SubsystemDims) -> Result<SubsystemDims> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SubsystemDims::new(dims)
    }
}

/// Normalized complex amplitude vector over a [`SubsystemDims`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: SubsystemDims,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: SubsystemDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for Hilbert dimension {}",
                amplitudes.len(),
                dims.total_dim()
            )));
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFiniteEntries);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Skips the normalization check. Structural checks (length, finite
    /// entries) still apply.
    pub fn new_unvalidated(dims: SubsystemDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for Hilbert dimension {}",
                amplitudes.len(),
                dims.total_dim()
            )));
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(
                "overlap of states with different dims".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, the phase-invariant comparison used everywhere.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    pub fn reshape(&self, bp: &Bipartition) -> Result<ComplexMatrix> {
        linalg::reshape_bipartite(&self.amplitudes, self.dims.dims(), bp)
    }

    pub fn schmidt(&self, bp: &Bipartition, tol: f64) -> Result<linalg::SchmidtData> {
        linalg::schmidt_decompose(&self.amplitudes, self.dims.dims(), bp, tol)
    }

    /// Reduced density matrix on `block`, traced over the complement.
    /// Goes through the bipartite reshape so the full projector is never
    /// materialized.
    pub fn reduced_density(&self, block: &IndexBlock) -> Result<DensityMatrix> {
        self.dims.check_block(block)?;
        let dims = self.dims.restrict(block)?;
        let full = IndexBlock::full(self.dims.len());
        let reduced = match block.complement_within(&full) {
            None => ComplexMatrix::from_fn(self.total_dim(), self.total_dim(), |r, c| {
                self.amplitudes[r] * self.amplitudes[c].conj()
            }),
            Some(rest) => {
                if block.contains(1) {
                    let m = self.reshape(&Bipartition::new(block.clone(), rest)?)?;
                    m.matmul(&m.adjoint())
                } else {
                    // rho[a,b] = sum_t psi[(t,a)] conj(psi[(t,b)]) is the
                    // transpose of M^dagger M
                    let m = self.reshape(&Bipartition::new(rest, block.clone())?)?;
                    let gram = m.adjoint().matmul(&m);
                    ComplexMatrix::from_fn(gram.rows(), gram.cols(), |a, b| gram.get(b, a))
                }
            }
        };
        Ok(DensityMatrix { dims, matrix: reduced })
    }

    /// Moves subsystem `i+1` to 1-based position `new_position[i]`.
    pub fn permute_subsystems(&self, new_position: &[usize]) -> Result<PureState> {
        let perm: Vec<usize> = new_position
            .iter()
            .map(|p| p.checked_sub(1).unwrap_or(usize::MAX))
            .collect();
        let amplitudes = linalg::permute_amplitudes(&self.amplitudes, self.dims.dims(), &perm)?;
        let mut dims = vec![0usize; self.dims.len()];
        for (i, p) in perm.iter().enumerate() {
            dims[*p] = self.dims.dims()[i];
        }
        Ok(PureState {
            dims: SubsystemDims::new(dims)?,
            amplitudes,
        })
    }
}

/// Positive semidefinite, unit-trace matrix over a [`SubsystemDims`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: SubsystemDims,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(dims: SubsystemDims, matrix: ComplexMatrix) -> Result<Self> {
        let d = dims.total_dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for Hilbert dimension {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > VALIDATION_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > VALIDATION_TOL || trace.im.abs() > VALIDATION_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?[0];
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Skips Hermiticity/trace/PSD validation; only the shape is checked.
    pub fn new_unvalidated(dims: SubsystemDims, matrix: ComplexMatrix) -> Result<Self> {
        let d = dims.total_dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for Hilbert dimension {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Internal constructor for operations that preserve the invariants
    /// mathematically (partial trace, convex mixing of valid inputs).
    pub(crate) fn trusted(dims: SubsystemDims, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total_dim());
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = ||rho||_F^2 for Hermitian rho
        let f = self.matrix.frobenius_norm();
        f * f
    }

    /// Reduces to the subsystems in `block`, tracing out the rest.
    pub fn partial_trace(&self, block: &IndexBlock) -> Result<DensityMatrix> {
        self.dims.check_block(block)?;
        let reduced = linalg::partial_trace(&self.matrix, self.dims.dims(), block.members())?;
        Ok(DensityMatrix::trusted(self.dims.restrict(block)?, reduced))
    }

    /// Reorders subsystems so the members of `bp.left` come first; returns
    /// the rearranged matrix together with the two side dimensions. This
    /// is the A-major form that the bipartite criteria consume.
    pub fn arrange_bipartite(&self, bp: &Bipartition) -> Result<(ComplexMatrix, usize, usize)> {
        let n = self.dims.len();
        let parent = bp.parent();
        if parent.members() != (1..=n).collect::<Vec<_>>() {
            return Err(Error::DimensionMismatch(format!(
                "bipartition {bp} does not cover subsystems 1..{n}"
            )));
        }
        let order: Vec<usize> = bp
            .left()
            .members()
            .iter()
            .chain(bp.right().members())
            .copied()
            .collect();
        let mut perm = vec![0usize; n];
        for (new_pos, member) in order.iter().enumerate() {
            perm[member - 1] = new_pos;
        }
        let arranged = linalg::permute_density(&self.matrix, self.dims.dims(), &perm)?;
        let d_left: usize = bp
            .left()
            .members()
            .iter()
            .map(|m| self.dims.dims()[m - 1])
            .product();
        let d_right = self.total_dim() / d_left;
        Ok((arranged, d_left, d_right))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

/// Basis state `|digits>` over `dims`, big-endian mixed radix: subsystem 1
/// is the most significant digit.
pub fn make_basis(dims: SubsystemDims, digits: &[usize]) -> Result<PureState> {
    if digits.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} digits for {} subsystems",
            digits.len(),
            dims.len()
        )));
    }
    let mut position = 0usize;
    for (digit, k) in digits.iter().zip(dims.dims()) {
        if digit >= k {
            return Err(Error::DigitOutOfRange {
                digit: *digit,
                dim: *k,
            });
        }
        position = position * k + digit;
    }
    let mut amplitudes = vec![Complex64::default(); dims.total_dim()];
    amplitudes[position] = Complex64::from(1.0);
    PureState::new(dims, amplitudes)
}

/// Tensor product with `b` minor: the combined amplitude at `(i, j)` is
/// `a_i * b_j` and the dims concatenate.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let dims = a.dims.concat(&b.dims)?;
    let mut amplitudes = Vec::with_capacity(a.total_dim() * b.total_dim());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    PureState::new(dims, amplitudes)
}

/// `(1/sqrt(d)) * sum_j |j>^(x n)` on `n` qudits of local dimension `d`.
pub fn make_ghz(n: usize, d: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidBlock(format!(
            "ghz needs at least 2 subsystems, got {n}"
        )));
    }
    let dims = SubsystemDims::new(vec![d; n])?;
    let mut amplitudes = vec![Complex64::default(); dims.total_dim()];
    // |j...j> sits at j * (1 + d + ... + d^(n-1))
    let unit: usize = (0..n).map(|t| d.pow(t as u32)).sum();
    let amp = Complex64::from(1.0 / (d as f64).sqrt());
    for j in 0..d {
        amplitudes[j * unit] = amp;
    }
    PureState::new(dims, amplitudes)
}

/// `(1/sqrt(n)) * sum_i |0..1_i..0>` on `n` qubits.
pub fn make_w(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidBlock(format!(
            "w state needs at least 2 subsystems, got {n}"
        )));
    }
    let dims = SubsystemDims::qubits(n)?;
    let mut amplitudes = vec![Complex64::default(); dims.total_dim()];
    let amp = Complex64::from(1.0 / (n as f64).sqrt());
    for i in 0..n {
        amplitudes[1 << i] = amp;
    }
    PureState::new(dims, amplitudes)
}

/// Haar-distributed pure state: i.i.d. standard complex Gaussian
/// amplitudes, normalized. Identical seeds give identical states.
pub fn random_pure(dims: SubsystemDims, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut amplitudes: Vec<Complex64> = (0..dims.total_dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::NullState);
    }
    amplitudes.iter_mut().for_each(|z| *z /= norm);
    PureState::new(dims, amplitudes)
}

/// Werner family on two qubits: `p |psi-><psi-| + (1-p)/4 * I`.
/// The partial transpose crosses zero exactly at `p = 1/3`.
pub fn werner_2qubit(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::WernerParameter(p));
    }
    let s = 1.0 / 2.0f64.sqrt();
    let singlet = [
        Complex64::default(),
        Complex64::from(s),
        Complex64::from(-s),
        Complex64::default(),
    ];
    let matrix = ComplexMatrix::from_fn(4, 4, |r, c| {
        let mut z = singlet[r] * singlet[c].conj() * Complex64::from(p);
        if r == c {
            z += Complex64::from((1.0 - p) / 4.0);
        }
        z
    });
    DensityMatrix::new(SubsystemDims::qubits(2)?, matrix)
}

/// Projector `|psi><psi|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let d = psi.total_dim();
    let matrix = ComplexMatrix::from_fn(d, d, |r, c| {
        psi.amplitudes[r] * psi.amplitudes[c].conj()
    });
    DensityMatrix::trusted(psi.dims.clone(), matrix)
}

/// Convex combination of density matrices. Weights must be nonnegative
/// and sum to 1 within 1e-12; dims must all match.
pub fn mix(terms: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    if terms.is_empty() {
        return Err(Error::BadWeights("empty mixture".into()));
    }
    if let Some((w, _)) = terms.iter().find(|(w, _)| *w < 0.0) {
        return Err(Error::BadWeights(format!("negative weight {w}")));
    }
    let total: f64 = terms.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let dims = terms[0].1.dims.clone();
    if terms.iter().any(|(_, rho)| rho.dims != dims) {
        return Err(Error::DimensionMismatch(
            "mixture terms live on different dims".into(),
        ));
    }
    let d = dims.total_dim();
    let mut matrix = ComplexMatrix::zeros(d, d);
    for (w, rho) in terms {
        matrix = matrix.add(&rho.matrix.scale(Complex64::from(*w)));
    }
    DensityMatrix::new(dims, matrix)
}

/// Builds a global state from per-block factor states: blocks are placed
/// at their subsystem indices, which together must cover `{1..n}`.
pub fn assemble(parts: Vec<(IndexBlock, PureState)>) -> Result<PureState> {
    let (blocks, states): (Vec<_>, Vec<_>) = {
        let mut parts = parts;
        parts.sort_by_key(|(b, _)| b.min_member());
        parts.into_iter().unzip()
    };
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let covered = crate::partitions::Partition::new(blocks.clone())?;
    if covered.ambient() != (1..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidPartition(format!(
            "blocks must cover 1..{n} exactly"
        )));
    }
    for (b, s) in blocks.iter().zip(&states) {
        if s.n_subsystems() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "state with {} subsystems placed on block {b}",
                s.n_subsystems()
            )));
        }
    }
    let mut iter = states.into_iter();
    let mut combined = iter.next().expect("at least one block");
    for s in iter {
        combined = tensor(&combined, &s)?;
    }
    // position t of the concatenation carries global subsystem flat[t]
    let flat: Vec<usize> = blocks
        .iter()
        .flat_map(|b| b.members().iter().copied())
        .collect();
    combined.permute_subsystems(&flat)
}

/// Density-matrix analog of [`assemble`]: kron of per-block factors,
/// permuted so each block sits at its subsystem indices.
pub fn assemble_density(parts: Vec<(IndexBlock, DensityMatrix)>) -> Result<DensityMatrix> {
    let (blocks, states): (Vec<_>, Vec<_>) = {
        let mut parts = parts;
        parts.sort_by_key(|(b, _)| b.min_member());
        parts.into_iter().unzip()
    };
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let covered = crate::partitions::Partition::new(blocks.clone())?;
    if covered.ambient() != (1..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidPartition(format!(
            "blocks must cover 1..{n} exactly"
        )));
    }
    let mut concat_dims: Vec<usize> = Vec::new();
    let mut matrix: Option<ComplexMatrix> = None;
    for (b, rho) in blocks.iter().zip(&states) {
        if rho.dims().len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix with {} subsystems placed on block {b}",
                rho.dims().len()
            )));
        }
        concat_dims.extend_from_slice(rho.dims().dims());
        matrix = Some(match matrix {
            None => rho.matrix.clone(),
            Some(m) => m.kron(&rho.matrix),
        });
    }
    let matrix = matrix.expect("at least one block");
    let flat: Vec<usize> = blocks
        .iter()
        .flat_map(|b| b.members().iter().copied())
        .collect();
    let mut perm = vec![0usize; n];
    for (t, member) in flat.iter().enumerate() {
        perm[t] = member - 1;
    }
    let permuted = linalg::permute_density(&matrix, &concat_dims, &perm)?;
    let mut dims = vec![0usize; n];
    for (t, member) in flat.iter().enumerate() {
        dims[member - 1] = concat_dims[t];
    }
    Ok(DensityMatrix::trusted(
        SubsystemDims::new(dims)?,
        permuted,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubits(n: usize) -> SubsystemDims {
        SubsystemDims::qubits(n).unwrap()
    }

    #[test]
    fn basis_positions() {
        let s = make_basis(qubits(2), &[0, 1]).unwrap();
        assert_eq!(s.amplitudes()[1], c(1., 0.));
        let s = make_basis(SubsystemDims::new(vec![3, 2]).unwrap(), &[2, 0]).unwrap();
        assert_eq!(s.amplitudes()[4], c(1., 0.));
        let s = make_basis(SubsystemDims::new(vec![2]).unwrap(), &[1]).unwrap();
        assert_eq!(s.amplitudes()[1], c(1., 0.));
    }

    #[test]
    fn basis_rejects_bad_digit() {
        assert!(matches!(
            make_basis(qubits(2), &[0, 2]),
            Err(Error::DigitOutOfRange { digit: 2, dim: 2 })
        ));
    }

    #[test]
    fn tensor_products() {
        let zero = make_basis(qubits(1), &[0]).unwrap();
        let one = make_basis(qubits(1), &[1]).unwrap();
        let zo = tensor(&zero, &one).unwrap();
        assert_eq!(zo.amplitudes()[1], c(1., 0.));

        let s = 1.0 / 2.0f64.sqrt();
        let plus = PureState::new(qubits(1), vec![c(s, 0.), c(s, 0.)]).unwrap();
        let pp = tensor(&plus, &plus).unwrap();
        for a in pp.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-12);
        }

        let bell = make_ghz(2, 2).unwrap();
        let b0 = tensor(&bell, &zero).unwrap();
        assert_abs_diff_eq!(b0.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(b0.amplitudes()[6].re, s, epsilon = 1e-12);
    }

    #[test]
    fn tensor_is_associative() {
        let a = random_pure(qubits(1), 1).unwrap();
        let b = random_pure(SubsystemDims::new(vec![3]).unwrap(), 2).unwrap();
        let cst = random_pure(qubits(1), 3).unwrap();
        let left = tensor(&tensor(&a, &b).unwrap(), &cst).unwrap();
        let right = tensor(&a, &tensor(&b, &cst).unwrap()).unwrap();
        assert_abs_diff_eq!(left.fidelity(&right).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ghz_positions() {
        let bell = make_ghz(2, 2).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(bell.amplitudes()[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.amplitudes()[3].re, s, epsilon = 1e-15);

        let ghz3 = make_ghz(3, 2).unwrap();
        assert_abs_diff_eq!(ghz3.amplitudes()[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz3.amplitudes()[7].re, s, epsilon = 1e-15);

        let qutrits = make_ghz(3, 3).unwrap();
        let t = 1.0 / 3.0f64.sqrt();
        for pos in [0usize, 13, 26] {
            assert_abs_diff_eq!(qutrits.amplitudes()[pos].re, t, epsilon = 1e-15);
        }
        let nonzero = qutrits.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn w_positions() {
        let w2 = make_w(2).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(w2.amplitudes()[1].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(w2.amplitudes()[2].re, s, epsilon = 1e-15);

        let w3 = make_w(3).unwrap();
        let t = 1.0 / 3.0f64.sqrt();
        for pos in [1usize, 2, 4] {
            assert_abs_diff_eq!(w3.amplitudes()[pos].re, t, epsilon = 1e-15);
        }

        let w4 = make_w(4).unwrap();
        for pos in [1usize, 2, 4, 8] {
            assert_abs_diff_eq!(w4.amplitudes()[pos].re, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn random_pure_is_deterministic_and_normalized() {
        let a = random_pure(qubits(3), 42).unwrap();
        let b = random_pure(qubits(3), 42).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
        let other = random_pure(qubits(3), 43).unwrap();
        assert!(a.fidelity(&other).unwrap() < 0.999);
    }

    #[test]
    fn random_pure_has_full_schmidt_rank() {
        use crate::partitions::Bipartition;
        // random (2,2,2) states have rank 2 across every cut
        for seed in 0..100u64 {
            let psi = random_pure(qubits(3), seed).unwrap();
            for bp in crate::partitions::enumerate_bipartitions(&IndexBlock::full(3)).unwrap() {
                let bp: Bipartition = bp;
                let sd = psi.schmidt(&bp, 1e-8).unwrap();
                assert_eq!(sd.rank, 2, "seed {seed} cut {bp}");
            }
        }
    }

    #[test]
    fn werner_family() {
        assert!(werner_2qubit(-0.1).is_err());
        assert!(werner_2qubit(1.1).is_err());
        let sep = werner_2qubit(0.0).unwrap();
        assert_abs_diff_eq!(sep.purity(), 0.25, epsilon = 1e-12);
        let singlet = werner_2qubit(1.0).unwrap();
        assert_abs_diff_eq!(singlet.purity(), 1.0, epsilon = 1e-12);
        // PT minimum eigenvalue is (1-3p)/4
        for p in [0.0, 0.2, 0.5, 0.9] {
            let w = werner_2qubit(p).unwrap();
            let bp = Bipartition::new(IndexBlock::singleton(1), IndexBlock::singleton(2)).unwrap();
            let (m, da, db) = w.arrange_bipartite(&bp).unwrap();
            let pt = linalg::partial_transpose(&m, da, db).unwrap();
            let min = linalg::hermitian_eigenvalues(&pt).unwrap()[0];
            assert_abs_diff_eq!(min, (1.0 - 3.0 * p) / 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn density_from_pure_examples() {
        let zero = make_basis(qubits(1), &[0]).unwrap();
        let rho = density_from_pure(&zero);
        assert_abs_diff_eq!(rho.matrix().get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix().get(1, 1).re, 0.0, epsilon = 1e-15);

        let bell = make_ghz(2, 2).unwrap();
        let rho = density_from_pure(&bell);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(rho.matrix().get(r, c).re, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn density_of_tensor_is_kron_of_densities() {
        let a = random_pure(qubits(1), 11).unwrap();
        let b = random_pure(SubsystemDims::new(vec![3]).unwrap(), 12).unwrap();
        let lhs = density_from_pure(&tensor(&a, &b).unwrap());
        let rhs = density_from_pure(&a).matrix().kron(density_from_pure(&b).matrix());
        assert!(lhs.matrix().sub(&rhs).frobenius_norm() < 1e-12);
    }

    #[test]
    fn mix_examples() {
        let z0 = density_from_pure(&make_basis(qubits(2), &[0, 0]).unwrap());
        let z3 = density_from_pure(&make_basis(qubits(2), &[1, 1]).unwrap());
        let single = mix(&[(1.0, z0.clone())]).unwrap();
        assert!(single.matrix().sub(z0.matrix()).frobenius_norm() < 1e-15);

        let half = mix(&[(0.5, z0.clone()), (0.5, z3)]).unwrap();
        assert_abs_diff_eq!(half.matrix().get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(half.matrix().get(3, 3).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(half.matrix().get(0, 3).re, 0.0, epsilon = 1e-15);

        assert!(mix(&[(0.6, z0.clone())]).is_err());
        let z0b = z0.clone();
        assert!(mix(&[(-0.1, z0), (1.1, z0b)]).is_err());
    }

    #[test]
    fn validation_catches_bad_states() {
        assert!(PureState::new(qubits(1), vec![c(1., 0.), c(1., 0.)]).is_err());
        assert!(PureState::new_unvalidated(qubits(1), vec![c(1., 0.), c(1., 0.)]).is_ok());
        assert!(SubsystemDims::new(vec![2, 1]).is_err());
        assert!(SubsystemDims::new(vec![]).is_err());

        // non-PSD but Hermitian, trace 1
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(qubits(1), m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn assemble_places_blocks_at_their_indices() {
        // Bell on {1,3}, |0> on {2}: amplitudes at 0 and 5
        let bell = make_ghz(2, 2).unwrap();
        let zero = make_basis(qubits(1), &[0]).unwrap();
        let psi = assemble(vec![
            (IndexBlock::new(vec![1, 3]).unwrap(), bell),
            (IndexBlock::singleton(2), zero),
        ])
        .unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.amplitudes()[5].re, s, epsilon = 1e-12);
    }

    #[test]
    fn reduced_density_of_w3() {
        let w3 = make_w(3).unwrap();
        let rho1 = w3.reduced_density(&IndexBlock::singleton(1)).unwrap();
        assert_abs_diff_eq!(rho1.matrix().get(0, 0).re, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho1.matrix().get(1, 1).re, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho1.purity(), 5.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn hilbert_cap_is_enforced() {
        assert!(SubsystemDims::new(vec![2; 25]).is_ok());
        assert!(matches!(
            SubsystemDims::new(vec![2; 26]),
            Err(Error::HilbertCap { .. })
        ));
    }
}
