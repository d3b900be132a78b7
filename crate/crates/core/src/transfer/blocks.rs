//! Operator-valued auxiliary-space blocks.
//!
//! A monodromy matrix lives on aux (x) quantum, but transfer matrices only
//! need its aux-indexed blocks of quantum-space operators: the partial
//! trace is a block-diagonal sum and the boundary sandwich is a small sum
//! over scalar K-entries. Building the blocks site by site keeps the cost
//! at aux^3 * dim(quantum)^2 per site instead of dense products on the
//! full aux (x) quantum space.

use ndarray::prelude::*;

use crate::{Error, Result, C64};

/// aux x aux matrix of quantum-space operators, row-major blocks.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    pub aux: usize,
    pub qdim: usize,
    blocks: Vec<Array2<C64>>,
}

impl BlockMatrix {
    pub fn identity(aux: usize) -> Self {
        let blocks = (0..aux * aux)
            .map(|i| {
                if i % (aux + 1) == 0 {
                    Array2::eye(1)
                } else {
                    Array2::zeros((1, 1))
                }
            })
            .collect();
        BlockMatrix { aux, qdim: 1, blocks }
    }

    /// Slice a raw operator on aux (x) site into aux-indexed site blocks.
    pub fn from_raw(raw: &Array2<C64>, aux: usize, site: usize) -> Result<Self> {
        if raw.nrows() != aux * site {
            return Err(Error::ShapeMismatch("block slicing".into()));
        }
        let mut blocks = Vec::with_capacity(aux * aux);
        for a in 0..aux {
            for b in 0..aux {
                let mut blk = Array2::<C64>::zeros((site, site));
                for i in 0..site {
                    for j in 0..site {
                        blk[[i, j]] = raw[[a * site + i, b * site + j]];
                    }
                }
                blocks.push(blk);
            }
        }
        Ok(BlockMatrix { aux, qdim: site, blocks })
    }

    pub fn block(&self, a: usize, b: usize) -> &Array2<C64> {
        &self.blocks[a * self.aux + b]
    }

    /// Append a site: `self_new[a][b] = sum_c self[a][c] (x) other[c][b]`.
    /// This is right-multiplication by the embedded site factor, with the
    /// new quantum factor ordered last.
    pub fn fold_site(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        if other.aux != self.aux {
            return Err(Error::ShapeMismatch("fold_site aux".into()));
        }
        let q = self.qdim * other.qdim;
        crate::tensor::ensure_capacity_entries((self.aux as u128).pow(2) * (q as u128).pow(2))?;
        let mut blocks = vec![Array2::<C64>::zeros((q, q)); self.aux * self.aux];
        for a in 0..self.aux {
            for b in 0..self.aux {
                let out = &mut blocks[a * self.aux + b];
                for c in 0..self.aux {
                    kron_add(out, self.block(a, c), other.block(c, b));
                }
            }
        }
        Ok(BlockMatrix { aux: self.aux, qdim: q, blocks })
    }

    /// Prepend-order variant used for reflecting monodromies:
    /// `self_new[a][b] = sum_c other[c][b] (x) self[a][c]`... with the new
    /// site still ordered last: `sum_c self[c][b] (x) other[a][c]` would
    /// scramble roles, so this takes the accumulated matrix on the left
    /// argument of the kron: `out[a][b] = sum_c acc[c][b] (x) site[a][c]`.
    pub fn fold_site_reflected(&self, site: &BlockMatrix) -> Result<BlockMatrix> {
        if site.aux != self.aux {
            return Err(Error::ShapeMismatch("fold_site_reflected aux".into()));
        }
        let q = self.qdim * site.qdim;
        crate::tensor::ensure_capacity_entries((self.aux as u128).pow(2) * (q as u128).pow(2))?;
        let mut blocks = vec![Array2::<C64>::zeros((q, q)); self.aux * self.aux];
        for a in 0..self.aux {
            for b in 0..self.aux {
                let out = &mut blocks[a * self.aux + b];
                for c in 0..self.aux {
                    kron_add(out, self.block(c, b), site.block(a, c));
                }
            }
        }
        Ok(BlockMatrix { aux: self.aux, qdim: q, blocks })
    }

    /// Partial trace over the auxiliary index.
    pub fn trace_aux(&self) -> Array2<C64> {
        let mut out = Array2::<C64>::zeros((self.qdim, self.qdim));
        for a in 0..self.aux {
            out += self.block(a, a);
        }
        out
    }

    /// Contract with scalar aux matrices on the right: `sum_c self[a][c] k[c][b]`.
    pub fn scalar_right(&self, k: &Array2<C64>) -> BlockMatrix {
        let mut blocks = vec![Array2::<C64>::zeros((self.qdim, self.qdim)); self.aux * self.aux];
        for a in 0..self.aux {
            for b in 0..self.aux {
                let out = &mut blocks[a * self.aux + b];
                for c in 0..self.aux {
                    let w = k[[c, b]];
                    if w != C64::new(0.0, 0.0) {
                        out.scaled_add(w, self.block(a, c));
                    }
                }
            }
        }
        BlockMatrix { aux: self.aux, qdim: self.qdim, blocks }
    }

    /// `trace_aux(K+ . T . K- . That)` for the open sandwich, with the two
    /// monodromy halves given as blocks and the K's as scalar matrices.
    pub fn sandwich_trace(
        t: &BlockMatrix,
        k_minus: &Array2<C64>,
        that: &BlockMatrix,
        k_plus: &Array2<C64>,
    ) -> Array2<C64> {
        let aux = t.aux;
        let d = t.scalar_right(k_minus);
        let e = that.scalar_right(k_plus);
        let mut out = Array2::<C64>::zeros((t.qdim, t.qdim));
        for b in 0..aux {
            for dd in 0..aux {
                let lhs = d.block(b, dd);
                let rhs = e.block(dd, b);
                out += &lhs.dot(rhs);
            }
        }
        out
    }
}

/// `out += a (x) b` without allocating the Kronecker product.
pub fn kron_add(out: &mut Array2<C64>, a: &Array2<C64>, b: &Array2<C64>) {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    debug_assert_eq!(out.dim(), (ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let w = a[[ia, ja]];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..rb {
                let mut row = out.row_mut(ia * rb + ib);
                let brow = b.row(ib);
                for jb in 0..cb {
                    row[ja * cb + jb] += w * brow[jb];
                }
            }
        }
    }
}

/// Value/derivative pair of block matrices, folded with the product rule.
#[derive(Debug, Clone)]
pub struct BlockJet {
    pub val: BlockMatrix,
    pub der: BlockMatrix,
}

impl BlockJet {
    pub fn identity(aux: usize) -> Self {
        let val = BlockMatrix::identity(aux);
        let mut der = BlockMatrix::identity(aux);
        for blk in der.blocks.iter_mut() {
            blk.fill(C64::new(0.0, 0.0));
        }
        BlockJet { val, der }
    }

    pub fn fold_site(&self, site: &BlockJet) -> Result<BlockJet> {
        let val = self.val.fold_site(&site.val)?;
        let mut der = self.der.fold_site(&site.val)?;
        let d2 = self.val.fold_site(&site.der)?;
        for (o, x) in der.blocks.iter_mut().zip(d2.blocks.iter()) {
            *o += x;
        }
        Ok(BlockJet { val, der })
    }

    pub fn fold_site_reflected(&self, site: &BlockJet) -> Result<BlockJet> {
        let val = self.val.fold_site_reflected(&site.val)?;
        let mut der = self.der.fold_site_reflected(&site.val)?;
        let d2 = self.val.fold_site_reflected(&site.der)?;
        for (o, x) in der.blocks.iter_mut().zip(d2.blocks.iter()) {
            *o += x;
        }
        Ok(BlockJet { val, der })
    }
}
