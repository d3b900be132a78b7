//! Dense complex linear algebra over labeled tensor-product factors.
//!
//! A [`DenseOperator`] is a square complex matrix together with the ordered
//! list of factor spaces its row/column indices run over (first factor most
//! significant, matching the Kronecker-product convention). Everything is
//! value-semantic and immutable after construction, so operators can be
//! shared freely across threads.
//!
//! Besides the materializing operations (`kron`, `embed`, partial trace and
//! transpose) the module provides `embed_mul`/`mul_embed`, which apply a
//! small operator to selected factors of a large one without ever forming
//! the embedded matrix. Those carry the transfer-matrix and identity sweeps
//! at desk scale.

use ndarray::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::{Error, Result, C64};

pub mod linalg;
pub mod poly;

pub use linalg::{eig, principal_angle_max, simultaneous_eigbasis, svd_rank, SimultaneousEig};
pub use poly::{chebyshev_nodes, fit_matrix_polynomial, fit_polynomial, MatPoly, PolynomialFit};

/// Default construction budget: 2^28 complex entries.
const DEFAULT_CAPACITY: u64 = 1 << 28;

static CAPACITY_CAP: AtomicU64 = AtomicU64::new(DEFAULT_CAPACITY);

/// Set the global entry-count cap for operator construction.
pub fn set_capacity_cap(entries: u64) {
    CAPACITY_CAP.store(entries, Ordering::Relaxed);
}

/// Current entry-count cap.
pub fn capacity_cap() -> u64 {
    CAPACITY_CAP.load(Ordering::Relaxed)
}

/// Refuse to allocate a `dim x dim` operator beyond the configured budget.
pub fn ensure_capacity(dim: usize) -> Result<()> {
    ensure_capacity_entries((dim as u128) * (dim as u128))
}

/// Entry-count variant for structured allocations (e.g. block families).
pub fn ensure_capacity_entries(requested: u128) -> Result<()> {
    let cap = capacity_cap() as u128;
    if requested > cap {
        return Err(Error::Capacity { requested, cap });
    }
    Ok(())
}

/// One factor of a tensor-product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Space {
    pub id: u32,
    pub dim: usize,
}

impl Space {
    pub fn new(id: u32, dim: usize) -> Self {
        assert!(dim >= 1, "factor dimension must be positive");
        Space { id, dim }
    }
}

/// Dense operator on an ordered tensor product of labeled factors.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    factors: Vec<Space>,
    mat: Array2<C64>,
}

fn product_dim(factors: &[Space]) -> usize {
    factors.iter().map(|s| s.dim).product()
}

impl DenseOperator {
    /// Wrap a matrix with its factor list. Checks shape, id uniqueness and
    /// entry finiteness.
    pub fn new(factors: Vec<Space>, mat: Array2<C64>) -> Result<Self> {
        let dim = product_dim(&factors);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, factors give {}",
                mat.nrows(),
                mat.ncols(),
                dim
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].iter().any(|g| g.id == f.id) {
                return Err(Error::ShapeMismatch(format!("duplicate factor id {}", f.id)));
            }
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite entries".into()));
        }
        Ok(DenseOperator { factors, mat })
    }

    /// Identity operator on a factor list.
    pub fn identity(factors: Vec<Space>) -> Result<Self> {
        let dim = product_dim(&factors);
        ensure_capacity(dim)?;
        Ok(DenseOperator { mat: Array2::eye(dim), factors })
    }

    pub fn factors(&self) -> &[Space] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    /// Kronecker product; factor lists concatenate.
    pub fn kron(&self, other: &DenseOperator) -> Result<DenseOperator> {
        let dim = self.dim() * other.dim();
        ensure_capacity(dim)?;
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        let mat = ndarray::linalg::kron(&self.mat, &other.mat);
        DenseOperator::new(factors, mat)
    }

    /// Embed this operator into `chain`, acting on the factors at
    /// `positions` (in this operator's slot order) and as identity
    /// elsewhere. Positions need not be adjacent or increasing.
    pub fn embed(&self, positions: &[usize], chain: &[Space]) -> Result<DenseOperator> {
        check_positions(&self.factors, positions, chain)?;
        let total = product_dim(chain);
        ensure_capacity(total)?;

        let strides = index_strides(chain);
        let k = chain.len();
        let rest: Vec<usize> = (0..k).filter(|p| !positions.contains(p)).collect();
        let m = self.dim();
        let r: usize = rest.iter().map(|&p| chain[p].dim).product();

        // Global index offsets of every selected multi-index and every
        // rest multi-index; the embedded entry layout is their sum.
        let sel_offsets = enumerate_offsets(positions, chain, &strides, m);
        let rest_offsets = enumerate_offsets(&rest, chain, &strides, r);

        let mut out = Array2::<C64>::zeros((total, total));
        for (ri, &row_sel) in sel_offsets.iter().enumerate() {
            for (ci, &col_sel) in sel_offsets.iter().enumerate() {
                let v = self.mat[[ri, ci]];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for &rest_off in &rest_offsets {
                    out[[row_sel + rest_off, col_sel + rest_off]] = v;
                }
            }
        }
        DenseOperator::new(chain.to_vec(), out)
    }

    /// Trace out one factor, producing an operator on the remaining ones.
    pub fn partial_trace(&self, factor: usize) -> Result<DenseOperator> {
        let k = self.factors.len();
        if factor >= k {
            return Err(Error::IndexOutOfRange { index: factor, count: k });
        }
        let d = self.factors[factor].dim;
        let before: usize = self.factors[..factor].iter().map(|s| s.dim).product();
        let after: usize = self.factors[factor + 1..].iter().map(|s| s.dim).product();
        let sub = before * after;
        let mut out = Array2::<C64>::zeros((sub, sub));
        // Row index decomposes as (b, t, a) with strides (d*after, after, 1).
        for rb in 0..before {
            for ra in 0..after {
                for cb in 0..before {
                    for ca in 0..after {
                        let mut acc = C64::new(0.0, 0.0);
                        for t in 0..d {
                            let ri = (rb * d + t) * after + ra;
                            let ci = (cb * d + t) * after + ca;
                            acc += self.mat[[ri, ci]];
                        }
                        out[[rb * after + ra, cb * after + ca]] = acc;
                    }
                }
            }
        }
        let mut factors = self.factors.clone();
        factors.remove(factor);
        DenseOperator::new(factors, out)
    }

    /// Transpose the matrix on a single factor only.
    pub fn partial_transpose(&self, factor: usize) -> Result<DenseOperator> {
        let k = self.factors.len();
        if factor >= k {
            return Err(Error::IndexOutOfRange { index: factor, count: k });
        }
        let d = self.factors[factor].dim;
        let before: usize = self.factors[..factor].iter().map(|s| s.dim).product();
        let after: usize = self.factors[factor + 1..].iter().map(|s| s.dim).product();
        let mut out = Array2::<C64>::zeros(self.mat.raw_dim());
        for rb in 0..before {
            for rt in 0..d {
                for ra in 0..after {
                    let ri = (rb * d + rt) * after + ra;
                    for cb in 0..before {
                        for ct in 0..d {
                            for ca in 0..after {
                                let ci = (cb * d + ct) * after + ca;
                                // swap the factor's indices
                                let ri2 = (rb * d + ct) * after + ra;
                                let ci2 = (cb * d + rt) * after + ca;
                                out[[ri2, ci2]] = self.mat[[ri, ci]];
                            }
                        }
                    }
                }
            }
        }
        DenseOperator::new(self.factors.clone(), out)
    }

    /// Full trace.
    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        fro_norm(&self.mat)
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        DenseOperator { factors: self.factors.clone(), mat: self.mat.mapv(|z| z * s) }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch("add: dims differ".into()));
        }
        DenseOperator::new(self.factors.clone(), &self.mat + &other.mat)
    }

    /// Plain matrix product (factor lists must agree in dimension).
    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch("matmul: dims differ".into()));
        }
        DenseOperator::new(self.factors.clone(), self.mat.dot(&other.mat))
    }

    /// `embed(op, positions) * self` without materializing the embedding.
    pub fn embed_mul(&self, op: &ArrayView2<C64>, op_dims: &[usize], positions: &[usize]) -> Result<DenseOperator> {
        let mat = apply_embedded_left(op, op_dims, positions, &self.factor_dims(), &self.mat)?;
        DenseOperator::new(self.factors.clone(), mat)
    }

    /// `self * embed(op, positions)` without materializing the embedding.
    pub fn mul_embed(&self, op: &ArrayView2<C64>, op_dims: &[usize], positions: &[usize]) -> Result<DenseOperator> {
        let mat = apply_embedded_right(op, op_dims, positions, &self.factor_dims(), &self.mat)?;
        DenseOperator::new(self.factors.clone(), mat)
    }

    /// Conjugate by an isometry on a contiguous leading group of factors:
    /// `(U ⊗ id)† self (U ⊗ id)`, replacing the first `group` factors by
    /// `fused`. `U` has shape (prod of first `group` dims, fused.dim).
    pub fn compress_leading(&self, group: usize, u_iso: &ArrayView2<C64>, fused: Space) -> Result<DenseOperator> {
        let lead: usize = self.factors[..group].iter().map(|s| s.dim).product();
        let rest: usize = self.factors[group..].iter().map(|s| s.dim).product();
        if u_iso.nrows() != lead || u_iso.ncols() != fused.dim {
            return Err(Error::ShapeMismatch("compress_leading: isometry shape".into()));
        }
        let w = ndarray::linalg::kron(&u_iso.view(), &Array2::<C64>::eye(rest).view());
        let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
        let out = wdag.dot(&self.mat).dot(&w);
        let mut factors = vec![fused];
        factors.extend_from_slice(&self.factors[group..]);
        DenseOperator::new(factors, out)
    }

    /// Conjugate by an isometry on a contiguous trailing group of factors:
    /// `(id ⊗ U)† self (id ⊗ U)`, replacing the last `group` factors by
    /// `fused`.
    pub fn compress_trailing(&self, group: usize, u_iso: &ArrayView2<C64>, fused: Space) -> Result<DenseOperator> {
        let k = self.factors.len();
        let tail: usize = self.factors[k - group..].iter().map(|s| s.dim).product();
        let lead: usize = self.factors[..k - group].iter().map(|s| s.dim).product();
        if u_iso.nrows() != tail || u_iso.ncols() != fused.dim {
            return Err(Error::ShapeMismatch("compress_trailing: isometry shape".into()));
        }
        let w = ndarray::linalg::kron(&Array2::<C64>::eye(lead).view(), &u_iso.view());
        let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
        let out = wdag.dot(&self.mat).dot(&w);
        let mut factors = self.factors[..k - group].to_vec();
        factors.push(fused);
        DenseOperator::new(factors, out)
    }

    /// Expand through an isometry on the leading factor: `(U ⊗ id) self (U ⊗ id)†`,
    /// replacing the leading fused factor by the group `expanded`.
    pub fn expand_leading(&self, u_iso: &ArrayView2<C64>, expanded: &[Space]) -> Result<DenseOperator> {
        let lead: usize = expanded.iter().map(|s| s.dim).product();
        let rest: usize = self.factors[1..].iter().map(|s| s.dim).product();
        if u_iso.nrows() != lead || u_iso.ncols() != self.factors[0].dim {
            return Err(Error::ShapeMismatch("expand_leading: isometry shape".into()));
        }
        ensure_capacity(lead * rest)?;
        let w = ndarray::linalg::kron(&u_iso.view(), &Array2::<C64>::eye(rest).view());
        let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
        let out = w.dot(&self.mat).dot(&wdag);
        let mut factors = expanded.to_vec();
        factors.extend_from_slice(&self.factors[1..]);
        DenseOperator::new(factors, out)
    }

    fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|s| s.dim).collect()
    }
}

/// Permutation operator on `V (x) V` with `[P]^{ij}_{kl} = d_{il} d_{jk}`.
pub fn permutation_matrix(d: usize) -> Array2<C64> {
    let mut p = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            p[[i * d + j, j * d + i]] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Relative Frobenius distance between two matrices.
pub fn rel_fro_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let denom = fro_norm(a).max(fro_norm(b)).max(1e-300);
    fro_norm(&(a - b)) / denom
}

pub fn fro_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_positions(op_factors: &[Space], positions: &[usize], chain: &[Space]) -> Result<()> {
    if positions.len() != op_factors.len() {
        return Err(Error::ShapeMismatch(format!(
            "embed: {} positions for {} factors",
            positions.len(),
            op_factors.len()
        )));
    }
    for (slot, &p) in positions.iter().enumerate() {
        if p >= chain.len() {
            return Err(Error::IndexOutOfRange { index: p, count: chain.len() });
        }
        if positions[..slot].contains(&p) {
            return Err(Error::DuplicatePosition(p));
        }
        if chain[p].dim != op_factors[slot].dim {
            return Err(Error::ShapeMismatch(format!(
                "embed: slot {} has dim {}, chain factor {} has dim {}",
                slot, op_factors[slot].dim, p, chain[p].dim
            )));
        }
    }
    Ok(())
}

fn index_strides(chain: &[Space]) -> Vec<usize> {
    let k = chain.len();
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * chain[i + 1].dim;
    }
    strides
}

/// Global offsets of all multi-indices over the chain factors listed in
/// `which` (slot order), as flat contributions to the full index.
fn enumerate_offsets(which: &[usize], chain: &[Space], strides: &[usize], count: usize) -> Vec<usize> {
    let mut offsets = vec![0usize; count];
    let mut block = count;
    for &p in which {
        let d = chain[p].dim;
        block /= d;
        let stride = strides[p];
        // digit cycling: index j's digit for this factor is (j / block) % d
        for (j, off) in offsets.iter_mut().enumerate() {
            *off += ((j / block) % d) * stride;
        }
    }
    offsets
}

/// Compute `embed(op) * target` where `op` acts on `positions` of a chain
/// with factor dimensions `dims`. `target` has `prod(dims)` rows and any
/// number of columns. Uses an axis permutation plus one GEMM.
pub fn apply_embedded_left(
    op: &ArrayView2<C64>,
    op_dims: &[usize],
    positions: &[usize],
    dims: &[usize],
    target: &Array2<C64>,
) -> Result<Array2<C64>> {
    let total: usize = dims.iter().product();
    let m: usize = op_dims.iter().product();
    let cols = target.ncols();
    if op.nrows() != m || op.ncols() != m || target.nrows() != total {
        return Err(Error::ShapeMismatch("apply_embedded_left".into()));
    }
    let k = dims.len();
    // View rows as a multi-index, columns flattened.
    let mut shape: Vec<usize> = dims.to_vec();
    shape.push(cols);
    let td = target.view().into_shape(shape)?;
    // Axis order: selected (slot order), then the rest, then columns.
    let mut order: Vec<usize> = positions.to_vec();
    order.extend((0..k).filter(|p| !positions.contains(p)));
    order.push(k);
    let perm = td.permuted_axes(order.clone());
    let permuted = perm.as_standard_layout().to_owned();
    let rest = total / m;
    let x = permuted.into_shape((m, rest * cols))?;
    let y = op.dot(&x);
    // Undo: reshape to permuted multi-index shape, then inverse-permute.
    let mut pshape: Vec<usize> = order[..k].iter().map(|&p| dims[p]).collect();
    pshape.push(cols);
    let y = y.into_shape(pshape)?;
    let mut inv = vec![0usize; k + 1];
    for (i, &o) in order.iter().enumerate() {
        inv[o] = i;
    }
    let back = y.permuted_axes(inv).as_standard_layout().to_owned();
    Ok(back.into_shape((total, cols))?)
}

/// Compute `target * embed(op)` (columns contracted with `op`); `target`
/// has `prod(dims)` columns and any number of rows.
pub fn apply_embedded_right(
    op: &ArrayView2<C64>,
    op_dims: &[usize],
    positions: &[usize],
    dims: &[usize],
    target: &Array2<C64>,
) -> Result<Array2<C64>> {
    let total: usize = dims.iter().product();
    let m: usize = op_dims.iter().product();
    let rows = target.nrows();
    if op.nrows() != m || op.ncols() != m || target.ncols() != total {
        return Err(Error::ShapeMismatch("apply_embedded_right".into()));
    }
    let k = dims.len();
    // View columns as multi-index: (rows, d0..dk-1); move selected to the end.
    let mut shape: Vec<usize> = vec![rows];
    shape.extend_from_slice(dims);
    let td = target.view().into_shape(shape)?;
    let mut order: Vec<usize> = vec![0];
    order.extend((1..=k).filter(|i| !positions.contains(&(i - 1))));
    order.extend(positions.iter().map(|&p| p + 1));
    let permuted = td.permuted_axes(order.clone()).as_standard_layout().to_owned();
    let rest = total / m;
    let x = permuted.into_shape((rows * rest, m))?;
    // columns contract with op's ROW index: X_{..,s'} op[s', s]
    let y = x.dot(op);
    let mut pshape: Vec<usize> = order.iter().map(|&o| if o == 0 { rows } else { dims[o - 1] }).collect();
    pshape[0] = rows;
    let y = y.into_shape(pshape)?;
    let mut inv = vec![0usize; k + 1];
    for (i, &o) in order.iter().enumerate() {
        inv[o] = i;
    }
    let back = y.permuted_axes(inv).as_standard_layout().to_owned();
    Ok(back.into_shape((rows, total))?)
}

#[cfg(test)]
mod tests;
