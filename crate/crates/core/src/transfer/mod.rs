//! Monodromy and transfer matrices for periodic and open chains.
//!
//! Transfer matrices are assembled from auxiliary-space blocks
//! ([`blocks::BlockMatrix`]), never materializing operators on
//! aux (x) quantum; dense monodromies are still available at small N for
//! the relation checks that genuinely live on the doubled space.

use ndarray::prelude::*;

use crate::fusion::{FusedKKind, Fusion};
use crate::model::{BoundaryParams, RMatrixFamily};
use crate::tensor::{DenseOperator, MatPoly, Space};
use crate::{Error, Result, C64};

pub mod blocks;
mod identities;
mod spectrum;

pub use identities::{
    verify_asymptotics_and_special_values, verify_monodromy_relations, verify_operator_identities,
};
pub use spectrum::{hamiltonian, spectrum, EigenTriple, SpectrumOptions};

use blocks::{BlockJet, BlockMatrix};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Boundary condition of a chain.
#[derive(Debug, Clone)]
pub enum Boundary {
    Periodic,
    Open(BoundaryParams),
}

/// A concrete chain: rank, sites, inhomogeneities, boundary.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub n: usize,
    pub sites: usize,
    pub theta: Vec<C64>,
    pub boundary: Boundary,
}

/// Shifts at which inhomogeneity differences must stay non-degenerate.
const THETA_EXCLUSIONS: [f64; 8] = [0.0, 1.0, 2.0, 3.0, 4.0, 3.5, 6.5, 5.0];

impl ChainSpec {
    pub fn new(n: usize, theta: Vec<C64>, boundary: Boundary) -> Result<Self> {
        let sites = theta.len();
        if sites == 0 {
            return Err(Error::Config("chain needs at least one site".into()));
        }
        for i in 0..sites {
            for j in 0..sites {
                if i == j {
                    continue;
                }
                let d = theta[i] - theta[j];
                for &e in &THETA_EXCLUSIONS {
                    if (d - c(e)).norm() < 1e-3 || (d + c(e)).norm() < 1e-3 {
                        return Err(Error::Config(format!(
                            "inhomogeneities {i},{j} are degenerate: difference {d} within 1e-3 of {e}"
                        )));
                    }
                }
            }
        }
        Ok(ChainSpec { n, sites, theta, boundary })
    }

    /// Distinct real inhomogeneities spread over [0.1, 0.6].
    pub fn random_thetas(sites: usize, seed: u64) -> Vec<C64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut t: Vec<f64> = (0..sites).map(|_| rng.gen_range(0.1..0.6)).collect();
            t.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if t.windows(2).all(|w| w[1] - w[0] > 0.02) {
                return t.into_iter().map(c).collect();
            }
        }
    }

    pub fn quantum_dim(&self) -> usize {
        (2 * self.n).pow(self.sites as u32)
    }

    pub fn params(&self) -> Option<&BoundaryParams> {
        match &self.boundary {
            Boundary::Periodic => None,
            Boundary::Open(p) => Some(p),
        }
    }
}

/// Which transfer matrix: the fundamental one or a fused kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferKind {
    Fundamental,
    /// 14-dimensional barred auxiliary space (rank 3 only).
    Bar,
    /// 14-dimensional triple-fused auxiliary space (rank 3 only).
    Tilde,
}

impl TransferKind {
    pub const ALL: [TransferKind; 3] = [TransferKind::Fundamental, TransferKind::Bar, TransferKind::Tilde];

    /// Degree of the transfer matrix in the spectral parameter.
    pub fn degree(&self, chain: &ChainSpec) -> usize {
        let n = chain.sites;
        match (self, &chain.boundary) {
            (TransferKind::Fundamental, Boundary::Periodic) => 2 * n,
            (TransferKind::Bar, Boundary::Periodic) => 2 * n,
            (TransferKind::Tilde, Boundary::Periodic) => n,
            (TransferKind::Fundamental, Boundary::Open(_)) => 4 * n + 2,
            (TransferKind::Bar, Boundary::Open(_)) => 4 * n + 4,
            (TransferKind::Tilde, Boundary::Open(_)) => 2 * n + 6,
        }
    }
}

/// Transfer-matrix evaluator for one chain. Fused kinds need the rank-3
/// fusion context; the fundamental kind works for any rank.
pub struct Transfer<'a> {
    pub chain: ChainSpec,
    family: RMatrixFamily,
    fusion: Option<&'a Fusion>,
    /// cached fused boundary polynomials (minus, plus) per fused kind
    k_bar: Option<(MatPoly, MatPoly)>,
    k_tilde: Option<(MatPoly, MatPoly)>,
}

impl<'a> Transfer<'a> {
    pub fn new(chain: ChainSpec, fusion: Option<&'a Fusion>) -> Result<Self> {
        let family = RMatrixFamily::new(chain.n);
        let (k_bar, k_tilde) = match (&chain.boundary, fusion) {
            (Boundary::Open(p), Some(f)) if chain.n == 3 => (
                Some((f.fused_k_poly(FusedKKind::BarMinus, p)?, f.fused_k_poly(FusedKKind::BarPlus, p)?)),
                Some((f.fused_k_poly(FusedKKind::TildeMinus, p)?, f.fused_k_poly(FusedKKind::TildePlus, p)?)),
            ),
            _ => (None, None),
        };
        Ok(Transfer { chain, family, fusion, k_bar, k_tilde })
    }

    pub fn family(&self) -> &RMatrixFamily {
        &self.family
    }

    pub fn fusion(&self) -> Option<&'a Fusion> {
        self.fusion
    }

    fn site_dim(&self) -> usize {
        2 * self.chain.n
    }

    fn aux_dim(&self, kind: TransferKind) -> usize {
        match kind {
            TransferKind::Fundamental => self.site_dim(),
            TransferKind::Bar | TransferKind::Tilde => 14,
        }
    }

    fn raw_r(&self, kind: TransferKind, u: C64) -> Result<Array2<C64>> {
        match kind {
            TransferKind::Fundamental => Ok(self.family.r_matrix(u)),
            TransferKind::Bar => Ok(self
                .fusion
                .ok_or_else(|| Error::Config("fused transfer needs the rank-3 fusion context".into()))?
                .r_bar(u)),
            TransferKind::Tilde => Ok(self
                .fusion
                .ok_or_else(|| Error::Config("fused transfer needs the rank-3 fusion context".into()))?
                .r_tilde(u)),
        }
    }

    fn raw_r_derivative(&self, kind: TransferKind, u: C64) -> Result<Array2<C64>> {
        match kind {
            TransferKind::Fundamental => Ok(self.family.r_matrix_derivative(u)),
            TransferKind::Bar => Ok(self.fusion.unwrap().r_bar_poly().derivative().eval(u)),
            TransferKind::Tilde => Ok(self.fusion.unwrap().r_tilde_poly().derivative().eval(u)),
        }
    }

    /// Monodromy blocks `R_{a,1}(u - t1) ... R_{a,N}(u - tN)`.
    pub fn monodromy_blocks(&self, kind: TransferKind, u: C64) -> Result<BlockMatrix> {
        let aux = self.aux_dim(kind);
        let site = self.site_dim();
        let mut acc = BlockMatrix::identity(aux);
        for j in 0..self.chain.sites {
            let raw = self.raw_r(kind, u - self.chain.theta[j])?;
            acc = acc.fold_site(&BlockMatrix::from_raw(&raw, aux, site)?)?;
        }
        Ok(acc)
    }

    /// Reflecting monodromy blocks `R_{N,a}(u + tN) ... R_{1,a}(u + t1)`.
    pub fn reflecting_blocks(&self, kind: TransferKind, u: C64) -> Result<BlockMatrix> {
        let aux = self.aux_dim(kind);
        let site = self.site_dim();
        let mut acc = BlockMatrix::identity(aux);
        for j in 0..self.chain.sites {
            let raw = self.raw_r(kind, u + self.chain.theta[j])?;
            acc = acc.fold_site_reflected(&BlockMatrix::from_raw(&raw, aux, site)?)?;
        }
        Ok(acc)
    }

    fn boundary_k(&self, kind: TransferKind, u: C64) -> Result<(Array2<C64>, Array2<C64>)> {
        let params = self
            .chain
            .params()
            .ok_or_else(|| Error::Config("boundary matrices requested for a periodic chain".into()))?;
        match kind {
            TransferKind::Fundamental => Ok((self.family.k_minus(params, u), self.family.k_plus(params, u))),
            TransferKind::Bar => {
                let (m, p) = self.k_bar.as_ref().expect("cached barred K");
                Ok((m.eval(u), p.eval(u)))
            }
            TransferKind::Tilde => {
                let (m, p) = self.k_tilde.as_ref().expect("cached triple-fused K");
                Ok((m.eval(u), p.eval(u)))
            }
        }
    }

    /// Transfer matrix on the quantum space.
    pub fn eval(&self, kind: TransferKind, u: C64) -> Result<Array2<C64>> {
        match &self.chain.boundary {
            Boundary::Periodic => Ok(self.monodromy_blocks(kind, u)?.trace_aux()),
            Boundary::Open(_) => {
                let t = self.monodromy_blocks(kind, u)?;
                let that = self.reflecting_blocks(kind, u)?;
                let (k_minus, k_plus) = self.boundary_k(kind, u)?;
                Ok(BlockMatrix::sandwich_trace(&t, &k_minus, &that, &k_plus))
            }
        }
    }

    /// Transfer matrix together with its exact u-derivative.
    pub fn eval_with_derivative(&self, kind: TransferKind, u: C64) -> Result<(Array2<C64>, Array2<C64>)> {
        let aux = self.aux_dim(kind);
        let site = self.site_dim();
        let site_jet = |arg: C64| -> Result<BlockJet> {
            Ok(BlockJet {
                val: BlockMatrix::from_raw(&self.raw_r(kind, arg)?, aux, site)?,
                der: BlockMatrix::from_raw(&self.raw_r_derivative(kind, arg)?, aux, site)?,
            })
        };
        let mut t = BlockJet::identity(aux);
        for j in 0..self.chain.sites {
            t = t.fold_site(&site_jet(u - self.chain.theta[j])?)?;
        }
        match &self.chain.boundary {
            Boundary::Periodic => Ok((t.val.trace_aux(), t.der.trace_aux())),
            Boundary::Open(params) => {
                let mut that = BlockJet::identity(aux);
                for j in 0..self.chain.sites {
                    that = that.fold_site_reflected(&site_jet(u + self.chain.theta[j])?)?;
                }
                let (k_minus, k_plus) = self.boundary_k(kind, u)?;
                let (k_minus_d, k_plus_d) = match kind {
                    TransferKind::Fundamental => {
                        (self.family.k_minus_derivative(params), self.family.k_plus_derivative(params))
                    }
                    TransferKind::Bar => {
                        let (m, p) = self.k_bar.as_ref().unwrap();
                        (m.derivative().eval(u), p.derivative().eval(u))
                    }
                    TransferKind::Tilde => {
                        let (m, p) = self.k_tilde.as_ref().unwrap();
                        (m.derivative().eval(u), p.derivative().eval(u))
                    }
                };
                let val = BlockMatrix::sandwich_trace(&t.val, &k_minus, &that.val, &k_plus);
                let mut der = BlockMatrix::sandwich_trace(&t.der, &k_minus, &that.val, &k_plus);
                der += &BlockMatrix::sandwich_trace(&t.val, &k_minus_d, &that.val, &k_plus);
                der += &BlockMatrix::sandwich_trace(&t.val, &k_minus, &that.der, &k_plus);
                der += &BlockMatrix::sandwich_trace(&t.val, &k_minus, &that.val, &k_plus_d);
                Ok((val, der))
            }
        }
    }

    /// Dense monodromy on (aux, q1..qN); desk-scale sizes only.
    pub fn monodromy_dense(&self, kind: TransferKind, u: C64) -> Result<DenseOperator> {
        let aux = self.aux_dim(kind);
        let site = self.site_dim();
        let mut chain_spaces = vec![Space::new(0, aux)];
        chain_spaces.extend((1..=self.chain.sites).map(|j| Space::new(j as u32, site)));
        crate::tensor::ensure_capacity(chain_spaces.iter().map(|s| s.dim).product())?;
        let mut acc = DenseOperator::identity(chain_spaces)?;
        for j in 0..self.chain.sites {
            let raw = self.raw_r(kind, u - self.chain.theta[j])?;
            acc = acc.mul_embed(&raw.view(), &[aux, site], &[0, j + 1])?;
        }
        Ok(acc)
    }

    /// Dense reflecting monodromy on (aux, q1..qN).
    pub fn reflecting_monodromy_dense(&self, kind: TransferKind, u: C64) -> Result<DenseOperator> {
        let aux = self.aux_dim(kind);
        let site = self.site_dim();
        let mut chain_spaces = vec![Space::new(0, aux)];
        chain_spaces.extend((1..=self.chain.sites).map(|j| Space::new(j as u32, site)));
        crate::tensor::ensure_capacity(chain_spaces.iter().map(|s| s.dim).product())?;
        let mut acc = DenseOperator::identity(chain_spaces)?;
        // slot 1 of each factor binds to the site space, slot 2 to aux;
        // the product runs site N down to 1
        for j in (0..self.chain.sites).rev() {
            let raw = self.raw_r(kind, u + self.chain.theta[j])?;
            acc = acc.mul_embed(&raw.view(), &[aux, site], &[0, j + 1])?;
        }
        Ok(acc)
    }
}

/// Product of a scalar function over the inhomogeneities.
pub(crate) fn product_over_sites(chain: &ChainSpec, f: impl Fn(C64) -> C64) -> C64 {
    chain.theta.iter().fold(C64::new(1.0, 0.0), |acc, &t| acc * f(t))
}

/// `varrho(u) = prod_i rho0~(u - t_i) rho0~(u + t_i)`.
pub(crate) fn varrho(family: &RMatrixFamily, chain: &ChainSpec, u: C64) -> C64 {
    product_over_sites(chain, |t| family.rho0_tilde(u - t) * family.rho0_tilde(u + t))
}
