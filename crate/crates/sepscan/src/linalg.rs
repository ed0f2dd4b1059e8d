//! Dense complex linear algebra: SVD, Hermitian eigendecomposition,
//! bipartite reshaping, partial trace, partial transpose and realignment.
//!
//! Multi-index convention: subsystem 1 is the most significant digit
//! (big-endian mixed radix), matching the ket-string reading order
//! `|q1 q2 ... qn>`. Non-contiguous bipartitions are handled by index
//! permutation inside the reshape, so no permuted copy of the state is
//! ever materialized.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::partitions::Bipartition;

/// Relative residual contract for the SVD and the eigensolver.
pub const SVD_RESIDUAL_TOL: f64 = 1e-10;

/// Default relative cut deciding the numerical Schmidt rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;


/// Dense complex matrix with row-major construction and access.
/// Entries are validated finite on construction from raw data.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self {
            data: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    pub fn row_major_entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.data[(r, c)]);
            }
        }
        out
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|r| self.data[(r, col)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        Self {
            data: &self.data * &other.data,
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        Self {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        Self {
            data: &self.data - &other.data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        Self {
            data: self.data.map(|z| z * factor),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from self-adjointness.
    pub fn hermiticity_deviation(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for r in 0..self.rows() {
            for c in r..self.cols() {
                dev = dev.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Kronecker product, `self` major.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub(crate) fn from_dmatrix(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }
}

/// Singular value decomposition `M = U diag(sigma) V^dagger` with
/// orthonormal columns in `U` and `V` and `sigma` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let (u, singular_values, v) = crate::jacobi::jacobi_svd(&m.data)?;
    Ok(Svd {
        u: ComplexMatrix::from_dmatrix(u),
        singular_values,
        v: ComplexMatrix::from_dmatrix(v),
    })
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn check_bipartition_covers(dims: &[usize], bp: &Bipartition) -> Result<()> {
    let n = dims.len();
    let parent = bp.parent();
    if parent.members() != (1..=n).collect::<Vec<_>>() {
        return Err(Error::DimensionMismatch(format!(
            "bipartition {bp} does not cover subsystems 1..{n}"
        )));
    }
    Ok(())
}

/// Sub-dimensions selected by 1-based member indices.
pub fn sub_dims(dims: &[usize], members: &[usize]) -> Vec<usize> {
    members.iter().map(|m| dims[m - 1]).collect()
}

/// Reshapes a state vector into the `(prod_Y k) x (prod_Z k)` matrix of the
/// `(Y,Z)` bipartition. Entry `(row, col)` is the amplitude whose
/// multi-index restricted to Y (ascending, big-endian) reads `row` and
/// restricted to Z reads `col`. A pure entry permutation: the l2 norm is
/// preserved exactly.
pub fn reshape_bipartite(
    amplitudes: &[Complex64],
    dims: &[usize],
    bp: &Bipartition,
) -> Result<ComplexMatrix> {
    check_bipartition_covers(dims, bp)?;
    let total: usize = dims.iter().product();
    if amplitudes.len() != total {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes but dims give {total}",
            amplitudes.len()
        )));
    }
    let left = bp.left().members();
    let right = bp.right().members();
    let d_left: usize = left.iter().map(|m| dims[m - 1]).product();
    let d_right: usize = right.iter().map(|m| dims[m - 1]).product();

    // row/col contribution of each subsystem digit
    let left_strides = strides(&sub_dims(dims, left));
    let right_strides = strides(&sub_dims(dims, right));
    let mut row_weight = vec![0usize; dims.len()];
    let mut col_weight = vec![0usize; dims.len()];
    for (t, m) in left.iter().enumerate() {
        row_weight[m - 1] = left_strides[t];
    }
    for (t, m) in right.iter().enumerate() {
        col_weight[m - 1] = right_strides[t];
    }

    let mut out = DMatrix::zeros(d_left, d_right);
    let mut digits = vec![0usize; dims.len()];
    for (g, amp) in amplitudes.iter().enumerate() {
        let mut rest = g;
        for i in (0..dims.len()).rev() {
            digits[i] = rest % dims[i];
            rest /= dims[i];
        }
        let mut row = 0;
        let mut col = 0;
        for i in 0..dims.len() {
            row += digits[i] * row_weight[i];
            col += digits[i] * col_weight[i];
        }
        out[(row, col)] = *amp;
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

/// Inverse of [`reshape_bipartite`]: scatters matrix entries back into a
/// state vector over `dims`.
pub fn unreshape_bipartite(
    m: &ComplexMatrix,
    dims: &[usize],
    bp: &Bipartition,
) -> Result<Vec<Complex64>> {
    check_bipartition_covers(dims, bp)?;
    let left = bp.left().members();
    let right = bp.right().members();
    let left_dims = sub_dims(dims, left);
    let right_dims = sub_dims(dims, right);
    let d_left: usize = left_dims.iter().product();
    let d_right: usize = right_dims.iter().product();
    if m.rows() != d_left || m.cols() != d_right {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, bipartition wants {d_left}x{d_right}",
            m.rows(),
            m.cols()
        )));
    }
    let global = strides(dims);
    let total: usize = dims.iter().product();
    let mut out = vec![Complex64::default(); total];
    let mut ldigits = vec![0usize; left.len()];
    let mut rdigits = vec![0usize; right.len()];
    for row in 0..d_left {
        let mut rest = row;
        for i in (0..left.len()).rev() {
            ldigits[i] = rest % left_dims[i];
            rest /= left_dims[i];
        }
        let row_base: usize = ldigits
            .iter()
            .zip(left)
            .map(|(d, m)| d * global[m - 1])
            .sum();
        for col in 0..d_right {
            let mut rest = col;
            for i in (0..right.len()).rev() {
                rdigits[i] = rest % right_dims[i];
                rest /= right_dims[i];
            }
            let g: usize = row_base
                + rdigits
                    .iter()
                    .zip(right)
                    .map(|(d, m)| d * global[m - 1])
                    .sum::<usize>();
            out[g] = m.get(row, col);
        }
    }
    Ok(out)
}

/// Schmidt data of a bipartite cut: descending coefficients above the rank
/// cut and the matching orthonormal factor families.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub rank: usize,
    /// Descending, strictly above the relative cut; squares sum to 1 for a
    /// normalized input.
    pub coefficients: Vec<f64>,
    /// `d_left x rank`, orthonormal columns.
    pub left_vectors: ComplexMatrix,
    /// `d_right x rank`, orthonormal columns.
    pub right_vectors: ComplexMatrix,
}

impl SchmidtData {
    /// Rebuilds the bipartite matrix `sum_i lambda_i left_i right_i^T`
    /// (the right factors are already stored conjugated, so this is a
    /// plain transpose product).
    pub fn reconstruct_matrix(&self) -> ComplexMatrix {
        let rows = self.left_vectors.rows();
        let cols = self.right_vectors.rows();
        ComplexMatrix::from_fn(rows, cols, |r, c| {
            (0..self.rank)
                .map(|i| {
                    Complex64::from(self.coefficients[i])
                        * self.left_vectors.get(r, i)
                        * self.right_vectors.get(c, i)
                })
                .sum()
        })
    }
}

/// Schmidt decomposition of `amplitudes` across the bipartition `bp`.
/// The numerical rank counts singular values above `tol * sigma_1`.
pub fn schmidt_decompose(
    amplitudes: &[Complex64],
    dims: &[usize],
    bp: &Bipartition,
    tol: f64,
) -> Result<SchmidtData> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::BadTolerance(tol));
    }
    let m = reshape_bipartite(amplitudes, dims, bp)?;
    let fact = svd(&m)?;
    let top = fact.singular_values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Err(Error::NullState);
    }
    let rank = fact
        .singular_values
        .iter()
        .take_while(|s| **s > tol * top)
        .count();
    let mut left = DMatrix::zeros(m.rows(), rank);
    let mut right = DMatrix::zeros(m.cols(), rank);
    for i in 0..rank {
        left.set_column(i, &fact.u.as_dmatrix().column(i));
        // conjugate so that sum_i lambda_i u_i (x) w_i rebuilds the state
        right.set_column(i, &fact.v.as_dmatrix().column(i).map(|z| z.conj()));
    }
    Ok(SchmidtData {
        rank,
        coefficients: fact.singular_values[..rank].to_vec(),
        left_vectors: ComplexMatrix::from_dmatrix(left),
        right_vectors: ComplexMatrix::from_dmatrix(right),
    })
}

/// Reduces a square matrix over `dims` to the subsystems in `keep`
/// (1-based, ascending), summing over the complement.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = dims.len();
    let total: usize = dims.iter().product();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, dims give {total}",
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidBlock("cannot keep an empty block".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep[0] < 1 || keep[keep.len() - 1] > n {
        return Err(Error::InvalidBlock(format!(
            "keep list must be ascending within 1..{n}"
        )));
    }
    let traced: Vec<usize> = (1..=n).filter(|i| !keep.contains(i)).collect();
    let global = strides(dims);
    let keep_dims = sub_dims(dims, keep);
    let traced_dims = sub_dims(dims, &traced);
    let d_keep: usize = keep_dims.iter().product();
    let d_traced: usize = traced_dims.iter().product();

    // global offsets contributed by each kept / traced sub-index
    let offsets = |members: &[usize], local_dims: &[usize], count: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0usize; members.len()];
        for v in 0..count {
            let mut rest = v;
            for i in (0..members.len()).rev() {
                digits[i] = rest % local_dims[i];
                rest /= local_dims[i];
            }
            out.push(
                digits
                    .iter()
                    .zip(members)
                    .map(|(d, m)| d * global[m - 1])
                    .sum(),
            );
        }
        out
    };
    let keep_off = offsets(keep, &keep_dims, d_keep);
    let traced_off = offsets(&traced, &traced_dims, d_traced);

    let mut out = DMatrix::zeros(d_keep, d_keep);
    for (a, oa) in keep_off.iter().enumerate() {
        for (b, ob) in keep_off.iter().enumerate() {
            let mut acc = Complex64::default();
            for ot in &traced_off {
                acc += m.get(oa + ot, ob + ot);
            }
            out[(a, b)] = acc;
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

/// Transposes the B factor of a bipartite `dA*dB` square matrix (A-major
/// block structure). Preserves Hermiticity and trace.
pub fn partial_transpose(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    let d = d_a * d_b;
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected {d}x{d} for dims ({d_a},{d_b})",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = DMatrix::zeros(d, d);
    for a in 0..d_a {
        for b in 0..d_a {
            for i in 0..d_b {
                for j in 0..d_b {
                    out[(a * d_b + i, b * d_b + j)] = m.get(a * d_b + j, b * d_b + i);
                }
            }
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

/// Realignment map: returns the `dA^2 x dB^2` matrix `R` with
/// `R[(i,k),(j,l)] = m[(i,j),(k,l)]` under row-major index pairing.
pub fn realign(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    let d = d_a * d_b;
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected {d}x{d} for dims ({d_a},{d_b})",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = DMatrix::zeros(d_a * d_a, d_b * d_b);
    for i in 0..d_a {
        for k in 0..d_a {
            for j in 0..d_b {
                for l in 0..d_b {
                    out[(i * d_a + k, j * d_b + l)] = m.get(i * d_b + j, k * d_b + l);
                }
            }
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

fn hermitian_part(m: &ComplexMatrix) -> Result<DMatrix<Complex64>> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok((&m.data + m.data.adjoint()).map(|z| z * Complex::from(0.5)))
}

/// Eigenvalues of a Hermitian matrix, ascending. Rejects inputs whose
/// deviation from self-adjointness exceeds `1e-10` (relative to the
/// largest entry).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (vals, _) = crate::jacobi::jacobi_hermitian_eigen(&hermitian_part(m)?)?;
    Ok(vals)
}

/// Largest eigenvalue of a Hermitian matrix together with its eigenvector.
pub fn top_eigenpair(m: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
    let (vals, vecs) = crate::jacobi::jacobi_hermitian_eigen(&hermitian_part(m)?)?;
    let best = vals.len() - 1;
    Ok((vals[best], vecs.column(best).iter().copied().collect()))
}

/// Reorders the subsystems of a square matrix over `dims`.
/// `perm[i]` is the new (0-based) position of old subsystem `i`.
pub fn permute_density(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let map = index_permutation(dims, perm)?;
    let total = map.len();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, dims give {total}",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = DMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(map[r], map[c])] = m.get(r, c);
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

/// Reorders the subsystems of a state vector over `dims`.
/// `perm[i]` is the new (0-based) position of old subsystem `i`.
pub fn permute_amplitudes(
    amplitudes: &[Complex64],
    dims: &[usize],
    perm: &[usize],
) -> Result<Vec<Complex64>> {
    let map = index_permutation(dims, perm)?;
    if amplitudes.len() != map.len() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes but dims give {}",
            amplitudes.len(),
            map.len()
        )));
    }
    let mut out = vec![Complex64::default(); amplitudes.len()];
    for (g, amp) in amplitudes.iter().enumerate() {
        out[map[g]] = *amp;
    }
    Ok(out)
}

/// Global-index map induced by a subsystem permutation.
fn index_permutation(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let n = dims.len();
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation has {} entries for {n} subsystems",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for p in perm {
        if *p >= n || seen[*p] {
            return Err(Error::DimensionMismatch(
                "invalid subsystem permutation".into(),
            ));
        }
        seen[*p] = true;
    }
    let mut new_dims = vec![0usize; n];
    for (i, p) in perm.iter().enumerate() {
        new_dims[*p] = dims[i];
    }
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    for (g, slot) in map.iter_mut().enumerate() {
        let mut rest = g;
        let mut target = 0usize;
        for i in (0..n).rev() {
            let digit = rest % dims[i];
            rest /= dims[i];
            target += digit * new_strides[perm[i]];
        }
        debug_assert_eq!(rest, 0);
        let _ = old_strides;
        *slot = target;
    }
    Ok(map)
}
