//! The C_n R-matrix family and boundary reflection matrices.
//!
//! The rank-n trigonometric-free (rational) R-matrix acts on two copies of
//! the 2n-dimensional fundamental space. Entries are quadratic polynomials
//! in the spectral parameter, so the whole family is stored as the three
//! constant structure matrices of `R(u) = u^2 I + u (k I + P - W) + k P`,
//! with `k = n + 1` the crossing parameter. The index pairing is
//! `i + bar(i) = 2n + 1` with signature `xi_i = +1` on the first half and
//! `-1` on the second.
//!
//! Boundary reflections enter through `K^-(u) = zeta + M u` with an
//! off-diagonal two-block `M`, and the dual matrix
//! `K^+(u) = K^-(-u - k)` with independent (tilded) parameters.

use ndarray::prelude::*;

use crate::tensor::permutation_matrix;
use crate::{Error, Result, C64};

mod kmatrix;
mod verify;

pub use kmatrix::BoundaryParams;
pub use verify::{verify_r_properties, verify_reflection_equations, RPropertyOptions, ReflectionOptions};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The rank-n R-matrix family with its scalar functions and normalizers.
#[derive(Debug, Clone)]
pub struct RMatrixFamily {
    n: usize,
    /// u^1 structure matrix `k I + P - W`.
    c1: Array2<C64>,
    /// u^0 structure matrix `k P`.
    c0: Array2<C64>,
    perm: Array2<C64>,
}

impl RMatrixFamily {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "rank must be at least 2");
        let d = 2 * n;
        let kappa = (n + 1) as f64;
        let perm = permutation_matrix(d);
        // W^{ij}_{kl} = xi_i xi_k delta_{j, bar i} delta_{k, bar l}
        let mut w = Array2::<C64>::zeros((d * d, d * d));
        let bar = |i: usize| d - 1 - i;
        let xi = |i: usize| if i < n { 1.0 } else { -1.0 };
        for i in 0..d {
            for l in 0..d {
                let row = i * d + bar(i);
                let col = bar(l) * d + l;
                w[[row, col]] = c(xi(i) * xi(bar(l)));
            }
        }
        let mut c1 = Array2::<C64>::eye(d * d).mapv(|z| z * c(kappa));
        c1 += &perm;
        c1 -= &w;
        let c0 = perm.mapv(|z| z * c(kappa));
        RMatrixFamily { n, c1, c0, perm }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Local space dimension 2n.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Crossing parameter n + 1.
    pub fn kappa(&self) -> f64 {
        (self.n + 1) as f64
    }

    /// R-matrix on V (x) V at spectral point `u`.
    pub fn r_matrix(&self, u: C64) -> Array2<C64> {
        let d2 = self.dim() * self.dim();
        let mut m = Array2::<C64>::eye(d2).mapv(|z| z * (u * u));
        m.scaled_add(u, &self.c1);
        m += &self.c0;
        m
    }

    /// d/du of the R-matrix at `u`.
    pub fn r_matrix_derivative(&self, u: C64) -> Array2<C64> {
        let d2 = self.dim() * self.dim();
        let mut m = Array2::<C64>::eye(d2).mapv(|z| z * (u * 2.0));
        m += &self.c1;
        m
    }

    /// `R_{21}(u) = P R_{12}(u) P`.
    pub fn r_matrix_swapped(&self, u: C64) -> Array2<C64> {
        self.perm.dot(&self.r_matrix(u)).dot(&self.perm)
    }

    pub fn permutation(&self) -> &Array2<C64> {
        &self.perm
    }

    // Scalar entry functions. For n = 3 these are the named diagonal and
    // exchange amplitudes; the general-n forms use kappa = n + 1.

    /// `R^{ii}_{ii}`.
    pub fn a(&self, u: C64) -> C64 {
        (u + 1.0) * (u + self.kappa())
    }

    /// `R^{ij}_{ij}` for j distinct from i and bar(i).
    pub fn b(&self, u: C64) -> C64 {
        u * (u + self.kappa())
    }

    /// `R^{i bar(i)}_{bar(i) i}`.
    pub fn c_fn(&self, u: C64) -> C64 {
        u * 2.0 + self.kappa()
    }

    /// `xi_i xi_j R^{i bar(i)}_{j bar(j)}`.
    pub fn d_fn(&self, u: C64) -> C64 {
        -u
    }

    /// `R^{i bar(i)}_{i bar(i)}`.
    pub fn e(&self, u: C64) -> C64 {
        u * (u + self.kappa() - 1.0)
    }

    /// `R^{ij}_{ji}` for j distinct from i and bar(i).
    pub fn g(&self, u: C64) -> C64 {
        u + self.kappa()
    }

    /// Unitarity normalizer `rho_v(u) = a(u) a(-u)`.
    pub fn rho_v(&self, u: C64) -> C64 {
        self.a(u) * self.a(-u)
    }

    /// Crossing-unitarity normalizer `rho_v(u + kappa)`.
    pub fn rho_v_tilde(&self, u: C64) -> C64 {
        self.rho_v(u + self.kappa())
    }

    /// Fusion normalizer `(u - 1)(u + kappa)`.
    pub fn rho0_tilde(&self, u: C64) -> C64 {
        (u - 1.0) * (u + self.kappa())
    }

    /// `K^-(u) = zeta + M u`.
    pub fn k_minus(&self, params: &BoundaryParams, u: C64) -> Array2<C64> {
        let d = self.dim();
        let mut m = Array2::<C64>::zeros((d, d));
        for i in 0..d {
            m[[i, i]] = params.zeta + u * if i < self.n { -1.0 } else { 1.0 };
        }
        for i in 0..self.n {
            m[[i, self.n + i]] = params.c1 * u;
            m[[self.n + i, i]] = params.c2 * u;
        }
        m
    }

    /// `K^+(u) = K^-(-u - kappa)` with the tilded parameter set.
    pub fn k_plus(&self, params: &BoundaryParams, u: C64) -> Array2<C64> {
        self.k_minus(&params.dual(), -u - self.kappa())
    }

    pub fn k_minus_derivative(&self, params: &BoundaryParams) -> Array2<C64> {
        let d = self.dim();
        let mut m = Array2::<C64>::zeros((d, d));
        for i in 0..d {
            m[[i, i]] = c(if i < self.n { -1.0 } else { 1.0 });
        }
        for i in 0..self.n {
            m[[i, self.n + i]] = params.c1;
            m[[self.n + i, i]] = params.c2;
        }
        m
    }

    pub fn k_plus_derivative(&self, params: &BoundaryParams) -> Array2<C64> {
        self.k_minus_derivative(&params.dual()).mapv(|z| -z)
    }
}

/// Spectral points where R-matrices (fundamental and fused) degenerate or
/// normalizers vanish; random sampling stays clear of these.
pub const DEGENERATION_POINTS: [f64; 5] = [-4.0, -1.0, -3.5, -3.0, 0.0];

/// Draw a complex number with re/im uniform in [-2, 2], outside balls of
/// radius 1e-3 around the degeneration points and their negatives.
pub fn random_spectral_point<R: rand::Rng>(rng: &mut R) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if spectral_point_ok(z) {
            return z;
        }
    }
}

pub fn spectral_point_ok(z: C64) -> bool {
    DEGENERATION_POINTS
        .iter()
        .flat_map(|&p| [p, -p])
        .all(|p| (z - c(p)).norm() > 1e-3)
}

/// Guard a scalar prefactor against evaluation at its zero.
pub fn guard_prefactor(what: &'static str, u: C64, value: C64) -> Result<C64> {
    if value.norm() < 1e-8 {
        return Err(Error::Singularity { what, u });
    }
    Ok(value)
}

#[cfg(test)]
mod tests;
