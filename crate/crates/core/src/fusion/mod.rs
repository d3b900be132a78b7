//! Fusion of the rank-3 model: projector bases, fused R- and K-matrices,
//! and the closure identities that terminate the fusion hierarchy.
//!
//! Degenerate spectral points of the fundamental R-matrix project onto
//! invariant subspaces; sandwiching shifted R-matrix products between the
//! corresponding isometries and dividing out a scalar factor produces the
//! fused R-matrices acting on 14-dimensional auxiliary spaces. Their
//! entries are low-degree polynomials, so each fused object is fitted
//! once as a [`MatPoly`] and evaluated from its coefficients afterwards;
//! that also gives well-defined values at the zeros of the scalar
//! prefactors, where the defining sandwich itself is 0/0.
//!
//! All isometries keep the printed basis order, which is load-bearing:
//! the closure identities are operator equalities in these bases, not
//! merely similarity statements.

use ndarray::prelude::*;

use crate::model::{guard_prefactor, BoundaryParams, RMatrixFamily};
use crate::par::Parallelism;
use crate::report::{witness_u, witness_uv, Check};
use crate::tensor::{
    apply_embedded_left, chebyshev_nodes, fit_matrix_polynomial, principal_angle_max, rel_fro_diff,
    svd_rank, DenseOperator, MatPoly, Space,
};
use crate::{Error, Result, C64};

pub mod bases;

#[cfg(test)]
mod tests;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Which fused reflection matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusedKKind {
    BarMinus,
    BarPlus,
    TildeMinus,
    TildePlus,
}

/// The named projector isometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorName {
    P1,
    P14,
    P14Triple,
    P6Bar,
    P14Bar,
    P14Tilde,
}

/// A fused-subspace isometry with its provenance.
#[derive(Debug, Clone)]
pub struct Projector {
    pub name: ProjectorName,
    /// (dim_in x rank) matrix whose columns are the printed basis vectors.
    pub isometry: Array2<C64>,
    /// Degeneration point of the parent R-matrix.
    pub source_point: f64,
}

impl Projector {
    pub fn rank(&self) -> usize {
        self.isometry.ncols()
    }

    /// Projection operator `U U^dagger`.
    pub fn operator(&self) -> Array2<C64> {
        self.isometry.dot(&self.isometry.mapv(|z| z.conj()).reversed_axes())
    }
}

/// Fusion context for the rank-3 family: projectors plus the three fused
/// R-matrices as polynomials. Immutable once built.
pub struct Fusion {
    family: RMatrixFamily,
    pub psi0: Array2<C64>,
    pub psi14: Array2<C64>,
    pub psi6_bar: Array2<C64>,
    pub psi14_bar: Array2<C64>,
    pub phi14: Array2<C64>,
    pub phi14_tilde: Array2<C64>,
    /// `R_bar(u)` on V_bar (x) V, degree 2.
    r_bar: MatPoly,
    /// `R_tilde(u)` on V_tilde (x) V, degree 1.
    r_tilde: MatPoly,
    /// `R_tilde-bar(u)` on V_tilde (x) V_bar, degree 2.
    r_bar_tilde: MatPoly,
}

pub const DIM_V: usize = 6;
pub const DIM_FUSED: usize = 14;

fn spaces(dims: &[usize]) -> Vec<Space> {
    dims.iter().enumerate().map(|(i, &d)| Space::new(i as u32, d)).collect()
}

impl Fusion {
    pub fn new() -> Result<Self> {
        let family = RMatrixFamily::new(3);
        let psi0 = bases::psi0();
        let psi14 = bases::psi14();
        let psi6_bar = bases::psi6_bar();
        let phi14 = bases::phi14();
        let phi14_tilde = bases::phi14_tilde();

        // Basis of the barred image at -3/2, derived by compressing the
        // three-site vectors through the two-site isometry. The two
        // descriptions span the same subspace, so the compressed columns
        // stay orthonormal; the reference table `psi14_bar_printed` is
        // incomplete (see its doc) and is not used here.
        let psi14_bar = {
            let w = ndarray::linalg::kron(&psi14.view(), &Array2::<C64>::eye(6).view());
            let cols = w.mapv(|z| z.conj()).reversed_axes().dot(&phi14);
            debug_assert!(bases::gram_defect(&cols) < 1e-10, "derived barred basis not orthonormal");
            cols
        };

        // R_bar(u) = rho0~(u+1/2)^-1 . U+ R13(u+1/2) R23(u-1/2) U on the
        // first two factors of V x V x V.
        let r_bar = {
            let nodes = chebyshev_nodes(0.7, 2.1, 4);
            let dims = [6usize, 6, 6];
            let w = ndarray::linalg::kron(&psi14.view(), &Array2::<C64>::eye(6).view());
            let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
            let samples: Result<Vec<(C64, Array2<C64>)>> = nodes
                .iter()
                .map(|&x| {
                    let u = c(x);
                    let m = apply_embedded_left(&family.r_matrix(u - 0.5).view(), &[6, 6], &[1, 2], &dims, &w)?;
                    let m = apply_embedded_left(&family.r_matrix(u + 0.5).view(), &[6, 6], &[0, 2], &dims, &m)?;
                    let scale = family.rho0_tilde(u + 0.5);
                    Ok((u, wdag.dot(&m).mapv(|z| z / scale)))
                })
                .collect();
            let (poly, residual) = fit_matrix_polynomial(&samples?, 2)?;
            debug_assert!(residual < 1e-9, "barred R fit residual {residual}");
            poly
        };

        // R_tilde(u) = [rho0~(u+1) rho0~(u)(u+2)]^-1 .
        //              U+ R14(u+1) R24(u) R34(u-1) U on V x V x V x V.
        let r_tilde = {
            let nodes = chebyshev_nodes(0.2, 0.8, 3);
            let dims = [6usize, 6, 6, 6];
            let w = ndarray::linalg::kron(&phi14.view(), &Array2::<C64>::eye(6).view());
            let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
            let samples: Result<Vec<(C64, Array2<C64>)>> = nodes
                .iter()
                .map(|&x| {
                    let u = c(x);
                    let m = apply_embedded_left(&family.r_matrix(u - 1.0).view(), &[6, 6], &[2, 3], &dims, &w)?;
                    let m = apply_embedded_left(&family.r_matrix(u).view(), &[6, 6], &[1, 3], &dims, &m)?;
                    let m = apply_embedded_left(&family.r_matrix(u + 1.0).view(), &[6, 6], &[0, 3], &dims, &m)?;
                    let scale = family.rho0_tilde(u + 1.0) * family.rho0_tilde(u) * (u + 2.0);
                    Ok((u, wdag.dot(&m).mapv(|z| z / scale)))
                })
                .collect();
            let (poly, residual) = fit_matrix_polynomial(&samples?, 1)?;
            debug_assert!(residual < 1e-9, "triple-fused R fit residual {residual}");
            poly
        };

        // R_tilde-bar(u) = U+_23 R_tilde,2(u+1/2) R_tilde,3(u-1/2) U_23 on
        // V_tilde x V x V (quantum-space fusion; no scalar prefactor).
        let r_bar_tilde = {
            let nodes = chebyshev_nodes(0.3, 1.5, 4);
            let dims = [14usize, 6, 6];
            let w = ndarray::linalg::kron(&Array2::<C64>::eye(14).view(), &psi14.view());
            let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
            let samples: Result<Vec<(C64, Array2<C64>)>> = nodes
                .iter()
                .map(|&x| {
                    let u = c(x);
                    let m = apply_embedded_left(&r_tilde.eval(u - 0.5).view(), &[14, 6], &[0, 2], &dims, &w)?;
                    let m = apply_embedded_left(&r_tilde.eval(u + 0.5).view(), &[14, 6], &[0, 1], &dims, &m)?;
                    Ok((u, wdag.dot(&m)))
                })
                .collect();
            let (poly, residual) = fit_matrix_polynomial(&samples?, 2)?;
            debug_assert!(residual < 1e-9, "bar-tilde R fit residual {residual}");
            poly
        };

        Ok(Fusion {
            family,
            psi0,
            psi14,
            psi6_bar,
            psi14_bar,
            phi14,
            phi14_tilde,
            r_bar,
            r_tilde,
            r_bar_tilde,
        })
    }

    pub fn family(&self) -> &RMatrixFamily {
        &self.family
    }

    pub fn projector(&self, name: ProjectorName) -> Projector {
        let (isometry, source_point) = match name {
            ProjectorName::P1 => (self.psi0.clone(), -4.0),
            ProjectorName::P14 => (self.psi14.clone(), -1.0),
            ProjectorName::P14Triple => (self.phi14.clone(), -1.0),
            ProjectorName::P6Bar => (self.psi6_bar.clone(), -3.5),
            ProjectorName::P14Bar => (self.psi14_bar.clone(), -1.5),
            ProjectorName::P14Tilde => (self.phi14_tilde.clone(), -3.0),
        };
        Projector { name, isometry, source_point }
    }

    /// Barred fused R-matrix on V_bar (x) V.
    pub fn r_bar(&self, u: C64) -> Array2<C64> {
        self.r_bar.eval(u)
    }

    /// Triple-fused R-matrix on V_tilde (x) V.
    pub fn r_tilde(&self, u: C64) -> Array2<C64> {
        self.r_tilde.eval(u)
    }

    /// Mixed fused R-matrix on V_tilde (x) V_bar.
    pub fn r_bar_tilde(&self, u: C64) -> Array2<C64> {
        self.r_bar_tilde.eval(u)
    }

    pub fn r_bar_poly(&self) -> &MatPoly {
        &self.r_bar
    }

    pub fn r_tilde_poly(&self) -> &MatPoly {
        &self.r_tilde
    }

    pub fn r_bar_tilde_poly(&self) -> &MatPoly {
        &self.r_bar_tilde
    }

    /// Unitarity normalizer of the barred R-matrix.
    pub fn rho_v_bar(&self, u: C64) -> C64 {
        (u + 3.5) * (u - 3.5) * (u + 1.5) * (u - 1.5)
    }

    /// Crossing normalizer of the barred R-matrix.
    pub fn rho_v_bar_tilde(&self, u: C64) -> C64 {
        (u + 0.5) * (u + 2.5) * (u + 5.5) * (u + 7.5)
    }

    /// Unitarity normalizer of the triple-fused R-matrix.
    pub fn rho_v_tilde(&self, u: C64) -> C64 {
        -(u + 3.0) * (u - 3.0)
    }

    /// Crossing normalizer of the triple-fused R-matrix.
    pub fn rho_v_tilde_tilde(&self, u: C64) -> C64 {
        -(u + 1.0) * (u + 7.0)
    }

    /// Unitarity normalizer of the mixed fused R-matrix.
    pub fn rho_v_bar_v_tilde(&self, u: C64) -> C64 {
        (u + 2.5) * (u - 2.5) * (u + 3.5) * (u - 3.5)
    }

    /// Crossing normalizer of the mixed fused R-matrix.
    pub fn rho_v_bar_v_tilde_crossing(&self, u: C64) -> C64 {
        (u + 0.5) * (u + 1.5) * (u + 6.5) * (u + 7.5)
    }

    /// Direct sandwich evaluation of a fused K-matrix. Errors at the
    /// zeros of the scalar prefactor; use [`Fusion::fused_k_poly`] for
    /// values there.
    pub fn fused_k(&self, kind: FusedKKind, params: &BoundaryParams, u: C64) -> Result<Array2<C64>> {
        let fam = &self.family;
        match kind {
            FusedKKind::BarMinus => {
                let pref = guard_prefactor("bar- K prefactor", u, (u - 0.5) * (u + 2.0) * 2.0)?;
                let id = Array2::<C64>::eye(6);
                let m = ndarray::linalg::kron(&fam.k_minus(params, u + 0.5), &id)
                    .dot(&fam.r_matrix_swapped(u * 2.0))
                    .dot(&ndarray::linalg::kron(&id, &fam.k_minus(params, u - 0.5)));
                Ok(compress(&m, &self.psi14).mapv(|z| z / pref))
            }
            FusedKKind::BarPlus => {
                let pref = guard_prefactor("bar+ K prefactor", u, (u + 2.0) * (u + 4.5) * 2.0)?;
                let id = Array2::<C64>::eye(6);
                let m = ndarray::linalg::kron(&id, &fam.k_plus(params, u - 0.5))
                    .dot(&fam.r_matrix(-u * 2.0 - 8.0))
                    .dot(&ndarray::linalg::kron(&fam.k_plus(params, u + 0.5), &id));
                Ok(compress(&m, &self.psi14).mapv(|z| z / pref))
            }
            FusedKKind::TildeMinus => {
                let pref = guard_prefactor(
                    "tilde- K prefactor",
                    u,
                    (u + 2.5) * (u + 1.5) * (u - 0.5) * u * (u - 1.0) * (u + 2.0) * 8.0,
                )?;
                let dims = [6usize, 6, 6];
                let chain = spaces(&dims);
                let acc = DenseOperator::identity(chain.clone())?;
                let acc = acc.mul_embed(&fam.k_minus(params, u + 1.0).view(), &[6], &[0])?;
                let acc = acc.mul_embed(&fam.r_matrix(u * 2.0 + 1.0).view(), &[6, 6], &[1, 0])?;
                let acc = acc.mul_embed(&fam.r_matrix(u * 2.0).view(), &[6, 6], &[2, 0])?;
                let acc = acc.mul_embed(&fam.k_minus(params, u).view(), &[6], &[1])?;
                let acc = acc.mul_embed(&fam.r_matrix(u * 2.0 - 1.0).view(), &[6, 6], &[2, 1])?;
                let acc = acc.mul_embed(&fam.k_minus(params, u - 1.0).view(), &[6], &[2])?;
                Ok(compress(acc.matrix(), &self.phi14).mapv(|z| z / pref))
            }
            FusedKKind::TildePlus => {
                let pref = guard_prefactor(
                    "tilde+ K prefactor",
                    u,
                    (u + 1.5) * (u + 2.5) * (u + 4.5) * (u + 2.0) * (u + 4.0) * (u + 5.0) * 8.0,
                )?;
                let dims = [6usize, 6, 6];
                let chain = spaces(&dims);
                let acc = DenseOperator::identity(chain.clone())?;
                let acc = acc.mul_embed(&fam.k_plus(params, u - 1.0).view(), &[6], &[2])?;
                let acc = acc.mul_embed(&fam.r_matrix(-u * 2.0 - 7.0).view(), &[6, 6], &[1, 2])?;
                let acc = acc.mul_embed(&fam.r_matrix(-u * 2.0 - 8.0).view(), &[6, 6], &[0, 2])?;
                let acc = acc.mul_embed(&fam.k_plus(params, u).view(), &[6], &[1])?;
                let acc = acc.mul_embed(&fam.r_matrix(-u * 2.0 - 9.0).view(), &[6, 6], &[0, 1])?;
                let acc = acc.mul_embed(&fam.k_plus(params, u + 1.0).view(), &[6], &[0])?;
                Ok(compress(acc.matrix(), &self.phi14).mapv(|z| z / pref))
            }
        }
    }

    /// Fused K-matrix as a polynomial (degree 2 for the barred kinds,
    /// 3 for the triple-fused ones), valid at every spectral point.
    pub fn fused_k_poly(&self, kind: FusedKKind, params: &BoundaryParams) -> Result<MatPoly> {
        let (degree, lo, hi) = match kind {
            FusedKKind::BarMinus | FusedKKind::BarPlus => (2usize, 0.8, 2.2),
            FusedKKind::TildeMinus | FusedKKind::TildePlus => (3usize, 1.2, 3.0),
        };
        let nodes = chebyshev_nodes(lo, hi, degree + 2);
        let samples: Result<Vec<(C64, Array2<C64>)>> =
            nodes.iter().map(|&x| Ok((c(x), self.fused_k(kind, params, c(x))?))).collect();
        let (poly, residual) = fit_matrix_polynomial(&samples?, degree)?;
        if residual > 1e-8 {
            return Err(Error::DegenerateSpectrum(format!(
                "fused K fit residual {residual:.2e}; entries not polynomial as expected"
            )));
        }
        Ok(poly)
    }

    /// Measured scalar values of the fused K-matrices at the points where
    /// they are proportional to the identity (or where only the trace is
    /// scalar-valued). These are pinned by the consistency-return
    /// identities; published intermediate tables differ by overall signs
    /// for the barred kinds and by the zeta-power in the combination for
    /// the triple-fused kinds.
    pub fn expected_fused_k_scalars(&self, params: &BoundaryParams) -> FusedKScalars {
        let qd = params.qdet_combo();
        let qd_t = params.qdet_combo_t();
        let one = C64::new(1.0, 0.0);
        let q = one + params.c1 * params.c2 - params.zeta * params.zeta;
        let q_t = one + params.c1_t * params.c2_t - params.zeta_t * params.zeta_t;
        FusedKScalars {
            bar_minus_at_0: qd * -0.5,
            bar_minus_trace_at_m4: qd * -7.0,
            bar_plus_at_m4: qd_t * -0.5,
            bar_plus_trace_at_0: qd_t * -7.0,
            tilde_minus_at_0: params.zeta * q * -8.0,
            tilde_minus_trace_at_m4: params.zeta * q * -112.0,
            tilde_plus_at_m4: params.zeta_t * q_t * -8.0,
            tilde_plus_trace_at_0: params.zeta_t * q_t * -112.0,
        }
    }

    /// Quantum determinant of K^-:
    /// `(u - 3/2)(u - 4) h1(u) h2(u)`.
    pub fn quantum_det_k_minus(&self, params: &BoundaryParams, u: C64) -> C64 {
        (u - 1.5) * (u - 4.0) * params.h1(u) * params.h2(u)
    }

    /// Quantum determinant of K^+:
    /// `(u + 3/2)(u + 4) h~1(u) h~2(u)`.
    pub fn quantum_det_k_plus(&self, params: &BoundaryParams, u: C64) -> C64 {
        (u + 1.5) * (u + 4.0) * params.h1_t(u) * params.h2_t(u)
    }

    /// Residuals of the singlet-projected sandwich identities defining
    /// the two quantum determinants, at one spectral point.
    ///
    /// The measured sandwich equals the *negative* of the determinant
    /// formulas for every u and parameter set (constant ratio -1); the
    /// residual reported here is against that measured convention, and
    /// report notes carry the sign.
    pub fn quantum_det_sandwich_residuals(&self, params: &BoundaryParams, u: C64) -> (f64, f64) {
        let fam = &self.family;
        let id = Array2::<C64>::eye(6);
        let p1 = self.psi0.dot(&self.psi0.mapv(|z| z.conj()).reversed_axes());

        let m = ndarray::linalg::kron(&fam.k_minus(params, u), &id)
            .dot(&fam.r_matrix_swapped(u * 2.0 - 4.0))
            .dot(&ndarray::linalg::kron(&id, &fam.k_minus(params, u - 4.0)));
        let lhs = p1.dot(&m).dot(&p1);
        let minus = rel_fro_diff(&lhs, &p1.mapv(|z| z * -self.quantum_det_k_minus(params, u)));

        let m = ndarray::linalg::kron(&id, &fam.k_plus(params, u - 4.0))
            .dot(&fam.r_matrix(-u * 2.0 - 4.0))
            .dot(&ndarray::linalg::kron(&fam.k_plus(params, u), &id));
        let lhs = p1.dot(&m).dot(&p1);
        let plus = rel_fro_diff(&lhs, &p1.mapv(|z| z * -self.quantum_det_k_plus(params, u)));
        (minus, plus)
    }
}

/// Scalar values taken by the fused K-matrices at distinguished points.
#[derive(Debug, Clone, Copy)]
pub struct FusedKScalars {
    pub bar_minus_at_0: C64,
    pub bar_minus_trace_at_m4: C64,
    pub bar_plus_at_m4: C64,
    pub bar_plus_trace_at_0: C64,
    pub tilde_minus_at_0: C64,
    pub tilde_minus_trace_at_m4: C64,
    pub tilde_plus_at_m4: C64,
    pub tilde_plus_trace_at_0: C64,
}

/// `U^dagger M U`.
fn compress(m: &Array2<C64>, iso: &Array2<C64>) -> Array2<C64> {
    iso.mapv(|z| z.conj()).reversed_axes().as_standard_layout().dot(m).dot(iso)
}

/// Degeneration-rank and subspace checks: each special point must
/// reproduce the printed projector rank and span its basis.
pub fn verify_degenerations(fusion: &Fusion, tol_angle: f64) -> Result<Vec<Check>> {
    let fam = fusion.family();
    let mut checks = Vec::new();
    let mut push = |anchor: &str, name: String, rank_expected: usize, mat: Array2<C64>, basis: &Array2<C64>| -> Result<()> {
        let (rank, iso) = svd_rank(&mat, 1e-10)?;
        let rank_ok = rank == rank_expected;
        let angle = if rank_ok { principal_angle_max(&iso, basis)? } else { f64::INFINITY };
        checks.push(
            Check::from_samples(
                format!("fusion.degeneration.{anchor}"),
                name,
                tol_angle,
                [(if rank_ok { angle } else { f64::INFINITY }, serde_json::json!({ "rank": rank }))],
            )
            .with_note(format!("rank {rank}, expected {rank_expected}")),
        );
        Ok(())
    };

    push("r_minus4", "R(-4) projects on the singlet".into(), 1, fam.r_matrix(c(-4.0)), &fusion.psi0)?;
    push("r_minus1", "R(-1) projects on the 14-dim subspace".into(), 14, fam.r_matrix(c(-1.0)), &fusion.psi14)?;
    push(
        "r_bar_minus_7_2",
        "barred R at -7/2 projects on the 6-dim subspace".into(),
        6,
        fusion.r_bar(c(-3.5)),
        &fusion.psi6_bar,
    )?;
    push(
        "r_bar_minus_3_2",
        "barred R at -3/2 projects on the 14-dim subspace".into(),
        14,
        fusion.r_bar(c(-1.5)),
        &fusion.psi14_bar,
    )?;
    push(
        "r_tilde_minus3",
        "triple-fused R at -3 projects on the 14-dim subspace".into(),
        14,
        fusion.r_tilde(c(-3.0)),
        &fusion.phi14_tilde,
    )?;

    // triple product R12(-1) R13(-2) R23(-1) spans the same subspace as
    // the three-site basis
    let dims = [6usize, 6, 6];
    let chain = spaces(&dims);
    let acc = DenseOperator::identity(chain)?;
    let acc = acc.mul_embed(&fam.r_matrix(c(-1.0)).view(), &[6, 6], &[1, 2])?;
    let acc = acc.mul_embed(&fam.r_matrix(c(-2.0)).view(), &[6, 6], &[0, 2])?;
    let acc = acc.mul_embed(&fam.r_matrix(c(-1.0)).view(), &[6, 6], &[0, 1])?;
    push(
        "triple_product",
        "R12(-1) R13(-2) R23(-1) spans the three-site 14-dim subspace".into(),
        14,
        acc.matrix().clone(),
        &fusion.phi14,
    )?;

    // the two 14-dim descriptions coincide: expanding the barred-space
    // basis through psi14 gives the three-site subspace
    let expanded = ndarray::linalg::kron(&fusion.psi14.view(), &Array2::<C64>::eye(6).view()).dot(&fusion.psi14_bar);
    let angle = principal_angle_max(&expanded, &fusion.phi14)?;
    checks.push(Check::from_samples(
        "fusion.degeneration.bar14_equals_triple14",
        "barred 14-dim subspace expanded to three sites coincides with the triple-product one",
        tol_angle,
        [(angle, serde_json::Value::Null)],
    ));

    Ok(checks)
}

/// Closure identities: the fusion process terminates by reproducing
/// earlier R-matrices, the six-factor product vanishes, the singlet
/// fusion is scalar, and projectors absorb.
pub fn verify_closure(fusion: &Fusion, points: usize, tol: f64, seed: u64, mode: Parallelism) -> Result<Vec<Check>> {
    use rand::SeedableRng;
    let fam = fusion.family();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let us: Vec<C64> = (0..points).map(|_| crate::model::random_spectral_point(&mut rng)).collect();

    let per_point: Vec<Result<(f64, f64, f64)>> = crate::par::map_indexed(mode, us.len(), |i| {
        let u = us[i];
        // (i) compress(R23(u+3) Rbar13(u-1/2)) / rho0~(u+3) = R(u)
        let dims = [14usize, 6, 6];
        let w = ndarray::linalg::kron(&fusion.psi6_bar.view(), &Array2::<C64>::eye(6).view());
        let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
        let m = apply_embedded_left(&fusion.r_bar(u - 0.5).view(), &[14, 6], &[0, 2], &dims, &w)?;
        let m = apply_embedded_left(&fam.r_matrix(u + 3.0).view(), &[6, 6], &[1, 2], &dims, &m)?;
        let lhs = wdag.dot(&m).mapv(|z| z / fam.rho0_tilde(u + 3.0));
        let ident1 = rel_fro_diff(&lhs, &fam.r_matrix(u));

        // (ii) compress(R23(u+5/2) Rtilde13(u-1/2)) / (u+13/2) = Rbar(u)
        let w = ndarray::linalg::kron(&fusion.phi14_tilde.view(), &Array2::<C64>::eye(6).view());
        let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
        let m = apply_embedded_left(&fusion.r_tilde(u - 0.5).view(), &[14, 6], &[0, 2], &dims, &w)?;
        let m = apply_embedded_left(&fam.r_matrix(u + 2.5).view(), &[6, 6], &[1, 2], &dims, &m)?;
        let lhs = wdag.dot(&m).mapv(|z| z / (u + 6.5));
        let ident2 = rel_fro_diff(&lhs, &fusion.r_bar(u));

        // (iv) singlet fusion: P1_21 R13(u) R23(u-4) P1_21 = a(u) e(u-4) P1 (x) id
        let dims3 = [6usize, 6, 6];
        let p1 = fusion.psi0.dot(&fusion.psi0.mapv(|z| z.conj()).reversed_axes());
        let chain = spaces(&dims3);
        let acc = DenseOperator::identity(chain)?;
        let acc = acc.mul_embed(&p1.view(), &[6, 6], &[0, 1])?;
        let acc = acc.mul_embed(&fam.r_matrix(u).view(), &[6, 6], &[0, 2])?;
        let acc = acc.mul_embed(&fam.r_matrix(u - 4.0).view(), &[6, 6], &[1, 2])?;
        let acc = acc.mul_embed(&p1.view(), &[6, 6], &[0, 1])?;
        let scale = fam.a(u) * fam.e(u - 4.0);
        let p1_emb = DenseOperator::new(spaces(&[6, 6]), p1.clone())?
            .embed(&[0, 1], &spaces(&dims3))?
            .into_matrix()
            .mapv(|z| z * scale);
        let singlet = rel_fro_diff(acc.matrix(), &p1_emb);
        Ok((ident1, ident2, singlet))
    });

    let mut id1_samples = Vec::new();
    let mut id2_samples = Vec::new();
    let mut singlet_samples = Vec::new();
    for (i, r) in per_point.into_iter().enumerate() {
        let (a, b, s) = r?;
        id1_samples.push((a, witness_u(us[i])));
        id2_samples.push((b, witness_u(us[i])));
        singlet_samples.push((s, witness_u(us[i])));
    }

    // (iii) six-factor vanishing product on V x V x V x V
    let dims4 = [6usize, 6, 6, 6];
    let chain4 = spaces(&dims4);
    let factors: [( [usize; 2], f64); 6] = [
        ([0, 1], -1.0),
        ([0, 2], -2.0),
        ([0, 3], -3.0),
        ([1, 2], -1.0),
        ([1, 3], -2.0),
        ([2, 3], -1.0),
    ];
    let mut acc = DenseOperator::identity(chain4)?;
    let mut norm_product = 1.0f64;
    for (pos, point) in factors {
        let r = fam.r_matrix(c(point));
        norm_product *= crate::tensor::fro_norm(&r);
        acc = acc.mul_embed(&r.view(), &[6, 6], &pos)?;
    }
    // norms of embedded factors carry the identity blocks; scale modestly
    let six_res = acc.fro_norm() / norm_product;

    // (v) projector absorption: P14_32 P14_321 = P14_321
    let p14 = fusion.psi14.dot(&fusion.psi14.mapv(|z| z.conj()).reversed_axes());
    let p123 = fusion.phi14.dot(&fusion.phi14.mapv(|z| z.conj()).reversed_axes());
    let chain3 = spaces(&[6, 6, 6]);
    let p14_23 = DenseOperator::new(spaces(&[6, 6]), p14)?.embed(&[1, 2], &chain3)?;
    let absorbed = p14_23.matrix().dot(&p123);
    let absorb_res = rel_fro_diff(&absorbed, &p123);

    Ok(vec![
        Check::from_samples(
            "fusion.closure.bar_returns_fundamental",
            "refusing the barred auxiliary space reproduces the fundamental R",
            tol,
            id1_samples,
        ),
        Check::from_samples(
            "fusion.closure.tilde_returns_bar",
            "refusing the triple-fused auxiliary space reproduces the barred R",
            tol,
            id2_samples,
        ),
        Check::from_samples(
            "fusion.closure.six_factor_zero",
            "the six-factor product of degenerate R-matrices vanishes",
            1e-9,
            [(six_res, serde_json::Value::Null)],
        ),
        Check::from_samples(
            "fusion.closure.singlet_fusion_scalar",
            "singlet-projected R13 R23 fusion is scalar",
            tol,
            singlet_samples,
        ),
        Check::from_samples(
            "fusion.closure.projector_absorption",
            "two-site projector absorbs into the three-site one",
            tol,
            [(absorb_res, serde_json::Value::Null)],
        ),
    ])
}

/// Reflection equations for the fused K-matrices: the barred and
/// triple-fused kinds against the fundamental space, and the
/// triple-fused kind against the barred space.
pub fn verify_fused_k_reflection(
    fusion: &Fusion,
    params: &BoundaryParams,
    samples: usize,
    tol: f64,
    seed: u64,
    mode: Parallelism,
) -> Result<Vec<Check>> {
    use rand::SeedableRng;
    let fam = fusion.family();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(C64, C64)> = (0..samples)
        .map(|_| (crate::model::random_spectral_point(&mut rng), crate::model::random_spectral_point(&mut rng)))
        .collect();

    let k_bar_m = fusion.fused_k_poly(FusedKKind::BarMinus, params)?;
    let k_bar_p = fusion.fused_k_poly(FusedKKind::BarPlus, params)?;
    let k_til_m = fusion.fused_k_poly(FusedKKind::TildeMinus, params)?;
    let k_til_p = fusion.fused_k_poly(FusedKKind::TildePlus, params)?;

    // generic fused reflection-equation residual on (V_fused, V_second)
    let re_minus = |rf: &dyn Fn(C64) -> Array2<C64>,
                    kf: &MatPoly,
                    k2: &dyn Fn(C64) -> Array2<C64>,
                    dims: &[usize; 2],
                    u: C64,
                    v: C64|
     -> Result<f64> {
        let chain = spaces(dims);
        let prod = |first: &Array2<C64>, kfu: &Array2<C64>, second: &Array2<C64>, k2v: &Array2<C64>| -> Result<Array2<C64>> {
            let acc = DenseOperator::identity(chain.clone())?;
            let acc = acc.mul_embed(&first.view(), dims, &[0, 1])?;
            let acc = acc.mul_embed(&kfu.view(), &[dims[0]], &[0])?;
            let acc = acc.mul_embed(&second.view(), dims, &[0, 1])?;
            let acc = acc.mul_embed(&k2v.view(), &[dims[1]], &[1])?;
            Ok(acc.into_matrix())
        };
        let lhs = prod(&rf(u - v), &kf.eval(u), &rf(u + v), &k2(v))?;
        // right side: K2(v) R(u+v) Kf(u) R(u-v)
        let acc = DenseOperator::identity(chain.clone())?;
        let acc = acc.mul_embed(&k2(v).view(), &[dims[1]], &[1])?;
        let acc = acc.mul_embed(&rf(u + v).view(), dims, &[0, 1])?;
        let acc = acc.mul_embed(&kf.eval(u).view(), &[dims[0]], &[0])?;
        let acc = acc.mul_embed(&rf(u - v).view(), dims, &[0, 1])?;
        Ok(rel_fro_diff(&lhs, acc.matrix()))
    };
    let re_plus = |rf: &dyn Fn(C64) -> Array2<C64>,
                   kf: &MatPoly,
                   k2: &dyn Fn(C64) -> Array2<C64>,
                   dims: &[usize; 2],
                   u: C64,
                   v: C64|
     -> Result<f64> {
        let chain = spaces(dims);
        let shift = -u - v - 8.0;
        let acc = DenseOperator::identity(chain.clone())?;
        let acc = acc.mul_embed(&rf(-u + v).view(), dims, &[0, 1])?;
        let acc = acc.mul_embed(&kf.eval(u).view(), &[dims[0]], &[0])?;
        let acc = acc.mul_embed(&rf(shift).view(), dims, &[0, 1])?;
        let acc = acc.mul_embed(&k2(v).view(), &[dims[1]], &[1])?;
        let lhs = acc.into_matrix();
        let acc = DenseOperator::identity(chain.clone())?;
        let acc = acc.mul_embed(&k2(v).view(), &[dims[1]], &[1])?;
        let acc = acc.mul_embed(&rf(shift).view(), dims, &[0, 1])?;
        let acc = acc.mul_embed(&kf.eval(u).view(), &[dims[0]], &[0])?;
        let acc = acc.mul_embed(&rf(-u + v).view(), dims, &[0, 1])?;
        Ok(rel_fro_diff(&lhs, acc.matrix()))
    };

    let r_bar_fn = |w: C64| fusion.r_bar(w);
    let r_til_fn = |w: C64| fusion.r_tilde(w);
    let r_bt_fn = |w: C64| fusion.r_bar_tilde(w);
    let k_minus_fn = |w: C64| fam.k_minus(params, w);
    let k_plus_fn = |w: C64| fam.k_plus(params, w);
    let k_bar_m_fn = |w: C64| k_bar_m.eval(w);
    let k_bar_p_fn = |w: C64| k_bar_p.eval(w);

    let results: Vec<Result<[f64; 6]>> = crate::par::map_indexed(mode, points.len(), |i| {
        let (u, v) = points[i];
        Ok([
            re_minus(&r_bar_fn, &k_bar_m, &k_minus_fn, &[14, 6], u, v)?,
            re_plus(&r_bar_fn, &k_bar_p, &k_plus_fn, &[14, 6], u, v)?,
            re_minus(&r_til_fn, &k_til_m, &k_minus_fn, &[14, 6], u, v)?,
            re_plus(&r_til_fn, &k_til_p, &k_plus_fn, &[14, 6], u, v)?,
            re_minus(&r_bt_fn, &k_til_m, &k_bar_m_fn, &[14, 14], u, v)?,
            re_plus(&r_bt_fn, &k_til_p, &k_bar_p_fn, &[14, 14], u, v)?,
        ])
    });

    let anchors = [
        ("fusion.k.re_bar_minus", "reflection equation for the barred K-"),
        ("fusion.k.re_bar_plus", "dual reflection equation for the barred K+"),
        ("fusion.k.re_tilde_minus", "reflection equation for the triple-fused K-"),
        ("fusion.k.re_tilde_plus", "dual reflection equation for the triple-fused K+"),
        ("fusion.k.re_tilde_bar_minus", "reflection equation for the triple-fused K- against the barred space"),
        ("fusion.k.re_tilde_bar_plus", "dual reflection equation for the triple-fused K+ against the barred space"),
    ];
    let mut buckets: Vec<Vec<(f64, serde_json::Value)>> = vec![Vec::new(); 6];
    for (i, r) in results.into_iter().enumerate() {
        let arr = r?;
        let (u, v) = points[i];
        for (b, &res) in arr.iter().enumerate() {
            buckets[b].push((res, witness_uv(u, v)));
        }
    }
    Ok(anchors
        .iter()
        .zip(buckets)
        .map(|((anchor, name), samples)| Check::from_samples(*anchor, *name, tol, samples))
        .collect())
}

/// The fused K-matrices reproduce the fundamental / barred ones when the
/// fusion is undone (consistency returns), at one spectral point.
///
/// The triple-fused returns hold with the stated prefactors (including
/// the explicit minus sign of the K- variant); the barred returns hold
/// with an extra overall sign, which is folded into the prefactors here
/// (measured constant ratio -1 against the unsigned form).
pub fn fused_k_return_residuals(fusion: &Fusion, params: &BoundaryParams, u: C64) -> Result<[f64; 4]> {
    let fam = fusion.family();
    let k_bar_m = fusion.fused_k_poly(FusedKKind::BarMinus, params)?;
    let k_bar_p = fusion.fused_k_poly(FusedKKind::BarPlus, params)?;
    let k_til_m = fusion.fused_k_poly(FusedKKind::TildeMinus, params)?;
    let k_til_p = fusion.fused_k_poly(FusedKKind::TildePlus, params)?;
    let dims = [14usize, 6];
    let chain = spaces(&dims);

    // K-_(bar 1 2)(u+3) = U6+ [K2-(u+3) Rbar(2u+5/2) Kbar-(u-1/2)] U6
    //                     / (2 (u+2)(u-1/2) h1(u+3) h2(u+3))
    let acc = DenseOperator::identity(chain.clone())?;
    let acc = acc.mul_embed(&fam.k_minus(params, u + 3.0).view(), &[6], &[1])?;
    let acc = acc.mul_embed(&fusion.r_bar(u * 2.0 + 2.5).view(), &[14, 6], &[0, 1])?;
    let acc = acc.mul_embed(&k_bar_m.eval(u - 0.5).view(), &[14], &[0])?;
    let pref = (u + 2.0) * (u - 0.5) * params.h1(u + 3.0) * params.h2(u + 3.0) * -2.0;
    let got = compress(acc.matrix(), &fusion.psi6_bar).mapv(|z| z / pref);
    let r0 = rel_fro_diff(&got, &fam.k_minus(params, u));

    // K+_(bar 1 2)(u+3) = U6+ [Kbar+(u-1/2) Rbar(-2u-21/2) K2+(u+3)] U6
    //                     / (2 (u+7)(u+9/2) h~1(u+3) h~2(u+3))
    let acc = DenseOperator::identity(chain.clone())?;
    let acc = acc.mul_embed(&k_bar_p.eval(u - 0.5).view(), &[14], &[0])?;
    let acc = acc.mul_embed(&fusion.r_bar(-u * 2.0 - 10.5).view(), &[14, 6], &[0, 1])?;
    let acc = acc.mul_embed(&fam.k_plus(params, u + 3.0).view(), &[6], &[1])?;
    let pref = (u + 7.0) * (u + 4.5) * params.h1_t(u + 3.0) * params.h2_t(u + 3.0) * -2.0;
    let got = compress(acc.matrix(), &fusion.psi6_bar).mapv(|z| z / pref);
    let r1 = rel_fro_diff(&got, &fam.k_plus(params, u));

    // K-_(tilde 1 2)(u+5/2) = -U14+ [K2-(u+5/2) Rtilde(2u+2) Ktilde-(u-1/2)] U14
    //                          / (2 (u-1/2) h1(u+5/2) h2(u+5/2))
    let acc = DenseOperator::identity(chain.clone())?;
    let acc = acc.mul_embed(&fam.k_minus(params, u + 2.5).view(), &[6], &[1])?;
    let acc = acc.mul_embed(&fusion.r_tilde(u * 2.0 + 2.0).view(), &[14, 6], &[0, 1])?;
    let acc = acc.mul_embed(&k_til_m.eval(u - 0.5).view(), &[14], &[0])?;
    let pref = (u - 0.5) * params.h1(u + 2.5) * params.h2(u + 2.5) * -2.0;
    let got = compress(acc.matrix(), &fusion.phi14_tilde).mapv(|z| z / pref);
    let r2 = rel_fro_diff(&got, &k_bar_m.eval(u));

    // K+_(tilde 1 2)(u+5/2) = U14+ [Ktilde+(u-1/2) Rtilde(-2u-10) K2+(u+5/2)] U14
    //                          / (2 (u+13/2) h~1(u+5/2) h~2(u+5/2))
    let acc = DenseOperator::identity(chain)?;
    let acc = acc.mul_embed(&k_til_p.eval(u - 0.5).view(), &[14], &[0])?;
    let acc = acc.mul_embed(&fusion.r_tilde(-u * 2.0 - 10.0).view(), &[14, 6], &[0, 1])?;
    let acc = acc.mul_embed(&fam.k_plus(params, u + 2.5).view(), &[6], &[1])?;
    let pref = (u + 6.5) * params.h1_t(u + 2.5) * params.h2_t(u + 2.5) * 2.0;
    let got = compress(acc.matrix(), &fusion.phi14_tilde).mapv(|z| z / pref);
    let r3 = rel_fro_diff(&got, &k_bar_p.eval(u));

    Ok([r0, r1, r2, r3])
}
