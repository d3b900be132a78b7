//! Spectra of commuting transfer families and the chain Hamiltonian.
//!
//! The transfer matrices of one chain commute, so a single eigenbasis
//! (extracted from a random combination at two generic points) serves all
//! kinds; per eigenvector, the eigenvalue is reconstructed as a polynomial
//! of the known degree from diagonal values at Chebyshev nodes, with a
//! held-out node bounding the reconstruction error.

use ndarray::prelude::*;
use ndarray_linalg::Inverse;
use rand::SeedableRng;

use crate::tensor::{chebyshev_nodes, fit_polynomial, linalg::diag_in_basis, PolynomialFit};
use crate::{Error, Result, C64};

use super::{c, Boundary, ChainSpec, Transfer, TransferKind};

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub seed: u64,
    /// Tolerance on off-diagonal leakage and on the held-out fit residual.
    pub tol: f64,
    /// Real interval carrying the sampling nodes.
    pub node_interval: (f64, f64),
    /// Constant imaginary offset of the nodes. Keeps them clear of every
    /// distinguished real point and, with a symmetric interval, keeps the
    /// top coefficient of the reconstruction well conditioned.
    pub node_imag: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { seed: 7, tol: 1e-8, node_interval: (-7.2, 7.2), node_imag: 0.9 }
    }
}

/// Eigenvalue polynomials of one common eigenvector, one fit per kind.
#[derive(Debug, Clone)]
pub struct EigenTriple {
    pub fits: Vec<(TransferKind, PolynomialFit)>,
    /// Worst off-diagonal leakage over the sampled evaluations.
    pub offdiag_residual: f64,
}

impl EigenTriple {
    pub fn fit(&self, kind: TransferKind) -> &PolynomialFit {
        &self.fits.iter().find(|(k, _)| *k == kind).expect("kind present").1
    }
}

/// Simultaneously diagonalize the transfer family and reconstruct every
/// eigenvalue as a polynomial. Returns one [`EigenTriple`] per common
/// eigenvector, in the basis order of the extraction.
pub fn spectrum(transfer: &Transfer, kinds: &[TransferKind], opts: &SpectrumOptions) -> Result<Vec<EigenTriple>> {
    let chain = &transfer.chain;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let a = transfer.eval(TransferKind::Fundamental, C64::new(0.81, 0.37))?;
    let b = transfer.eval(TransferKind::Fundamental, C64::new(1.63, -0.29))?;
    let a_op = crate::tensor::DenseOperator::new(vec![crate::tensor::Space::new(0, a.nrows())], a)?;
    let b_op = crate::tensor::DenseOperator::new(vec![crate::tensor::Space::new(0, b.nrows())], b)?;
    let sim = crate::tensor::simultaneous_eigbasis(&a_op, &b_op, &mut rng, opts.tol)?;
    let dim = chain.quantum_dim();

    let mut fits_per_kind: Vec<Vec<PolynomialFit>> = Vec::new();
    let mut offdiag = sim.residual;
    for &kind in kinds {
        let degree = kind.degree(chain);
        let nodes = chebyshev_nodes(opts.node_interval.0, opts.node_interval.1, degree + 2);
        // diagonal values per node
        let mut per_vec: Vec<Vec<(C64, C64)>> = vec![Vec::with_capacity(nodes.len()); dim];
        for &x in &nodes {
            let u = C64::new(x, opts.node_imag);
            let m = transfer.eval(kind, u)?;
            let (diag, leak) = diag_in_basis(&m, &sim.vectors, &sim.inverse);
            offdiag = offdiag.max(leak);
            for (i, &d) in diag.iter().enumerate() {
                per_vec[i].push((u, d));
            }
        }
        let fits: Result<Vec<PolynomialFit>> =
            per_vec.into_iter().map(|samples| fit_polynomial(&samples, degree)).collect();
        fits_per_kind.push(fits?);
    }

    let triples = (0..dim)
        .map(|i| EigenTriple {
            fits: kinds.iter().enumerate().map(|(k, &kind)| (kind, fits_per_kind[k][i].clone())).collect(),
            offdiag_residual: offdiag,
        })
        .collect();
    Ok(triples)
}

/// `H = t'(0) t(0)^{-1}` on the homogeneous chain, built from the exact
/// entrywise derivative of every factor.
pub fn hamiltonian(transfer: &Transfer) -> Result<Array2<C64>> {
    if transfer.chain.theta.iter().any(|t| t.norm() > 1e-14) {
        return Err(Error::Config("the Hamiltonian is defined at the homogeneous point".into()));
    }
    let (t0, t0p) = transfer.eval_with_derivative(TransferKind::Fundamental, C64::new(0.0, 0.0))?;
    let inv = t0.inv().map_err(|_| Error::DegenerateSpectrum("t(0) is singular".into()))?;
    Ok(t0p.dot(&inv))
}

/// A homogeneous copy of a chain (all inhomogeneities zero), used only as
/// the Hamiltonian evaluation point.
pub fn homogeneous_chain(n: usize, sites: usize, boundary: Boundary) -> ChainSpec {
    ChainSpec { n, sites, theta: vec![C64::new(0.0, 0.0); sites], boundary }
}
