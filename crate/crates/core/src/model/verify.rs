//! Randomized verification sweeps for the defining R- and K-matrix
//! identities: regularity, unitarity, crossing-unitarity, the Yang-Baxter
//! equation, and the (dual) reflection equations.

use ndarray::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::par::{map_indexed, Parallelism};
use crate::report::{witness_u, witness_uv, Check};
use crate::tensor::{apply_embedded_left, rel_fro_diff};
use crate::{Result, C64};

use super::{random_spectral_point, BoundaryParams, RMatrixFamily};

#[derive(Debug, Clone, Copy)]
pub struct RPropertyOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub mode: Parallelism,
}

impl Default for RPropertyOptions {
    fn default() -> Self {
        RPropertyOptions { samples: 100, tol: 1e-10, seed: 7, mode: Parallelism::default() }
    }
}

/// Precomputed embeddings of the R-matrix structure parts on a 3-site
/// chain, so the Yang-Baxter sweep assembles each factor by scale-add.
struct YbeWorkspace {
    /// [pair][power] with pair in {01, 02, 12} and power in {0, 1}.
    structures: [[Array2<C64>; 2]; 3],
    dims: [usize; 3],
}

impl YbeWorkspace {
    fn new(family: &RMatrixFamily) -> Result<Self> {
        let d = family.dim();
        let chain: Vec<crate::tensor::Space> =
            (0..3).map(|i| crate::tensor::Space::new(i as u32, d)).collect();
        let mk = |mat: &Array2<C64>, pos: &[usize]| -> Result<Array2<C64>> {
            let op = crate::tensor::DenseOperator::new(
                vec![crate::tensor::Space::new(90, d), crate::tensor::Space::new(91, d)],
                mat.clone(),
            )?;
            Ok(op.embed(pos, &chain)?.into_matrix())
        };
        let pairs: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
        let mut structures: Vec<[Array2<C64>; 2]> = Vec::with_capacity(3);
        for pair in pairs {
            structures.push([mk(&family.c0, &pair)?, mk(&family.c1, &pair)?]);
        }
        Ok(YbeWorkspace {
            structures: structures.try_into().map_err(|_| crate::Error::Config("ybe workspace".into())).unwrap(),
            dims: [d, d, d],
        })
    }

    /// Materialize `R_pair(u)` embedded on the 3-site chain.
    fn embedded(&self, pair: usize, u: C64) -> Array2<C64> {
        let total: usize = self.dims.iter().product();
        let mut m = Array2::<C64>::eye(total).mapv(|z| z * (u * u));
        m.scaled_add(u, &self.structures[pair][1]);
        m += &self.structures[pair][0];
        m
    }
}

/// Yang-Baxter residual at one (u, v): relative Frobenius distance of the
/// two triple products on V (x) V (x) V.
fn ybe_residual(family: &RMatrixFamily, ws: &YbeWorkspace, u: C64, v: C64) -> Result<f64> {
    let d = family.dim();
    let dims2 = [d, d];
    let r12 = family.r_matrix(u - v);
    let r13 = family.r_matrix(u);
    let r23 = family.r_matrix(v);
    // LHS = R12(u-v) R13(u) [R23(v)]
    let m = ws.embedded(2, v);
    let m = apply_embedded_left(&r13.view(), &dims2, &[0, 2], &ws.dims, &m)?;
    let lhs = apply_embedded_left(&r12.view(), &dims2, &[0, 1], &ws.dims, &m)?;
    // RHS = R23(v) R13(u) [R12(u-v)]
    let m = ws.embedded(0, u - v);
    let m = apply_embedded_left(&r13.view(), &dims2, &[0, 2], &ws.dims, &m)?;
    let rhs = apply_embedded_left(&r23.view(), &dims2, &[1, 2], &ws.dims, &m)?;
    Ok(rel_fro_diff(&lhs, &rhs))
}

/// Check regularity, unitarity, crossing-unitarity and the Yang-Baxter
/// equation on random complex points. Returns one record per identity
/// with the worst witness.
pub fn verify_r_properties(family: &RMatrixFamily, opts: &RPropertyOptions) -> Result<Vec<Check>> {
    let d = family.dim();
    let id = Array2::<C64>::eye(d * d);

    // regularity: R(0) = rho_v(0)^{1/2} P
    let r0 = family.r_matrix(C64::new(0.0, 0.0));
    let scale = family.rho_v(C64::new(0.0, 0.0)).sqrt();
    let reg = rel_fro_diff(&r0, &family.permutation().mapv(|z| z * scale));
    let regularity = Check::from_samples(
        "r.regularity",
        format!("R(0) equals rho_v(0)^(1/2) P for n={}", family.rank()),
        opts.tol,
        [(reg, witness_u(C64::new(0.0, 0.0)))],
    );

    // sample points drawn up front so parallel and sequential runs agree
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<(C64, C64)> = (0..opts.samples)
        .map(|_| {
            loop {
                let u = random_spectral_point(&mut rng);
                let v = random_spectral_point(&mut rng);
                if super::spectral_point_ok(u - v) && super::spectral_point_ok(u + v) {
                    return (u, v);
                }
            }
        })
        .collect();

    let ws = YbeWorkspace::new(family)?;
    let per_sample: Vec<Result<(f64, f64, f64)>> = map_indexed(opts.mode, points.len(), |i| {
        let (u, v) = points[i];
        // unitarity: R12(u) R21(-u) = rho_v(u) id
        let lhs = family.r_matrix(u).dot(&family.r_matrix_swapped(-u));
        let unit = rel_fro_diff(&lhs, &id.mapv(|z| z * family.rho_v(u)));
        // crossing-unitarity: R12(u)^{t1} R21(-u-2k)^{t1} = rho_v(u+k) id
        let t1 = |m: &Array2<C64>| -> Array2<C64> {
            let mut out = Array2::<C64>::zeros((d * d, d * d));
            for i1 in 0..d {
                for j1 in 0..d {
                    for k1 in 0..d {
                        for l1 in 0..d {
                            out[[k1 * d + j1, i1 * d + l1]] = m[[i1 * d + j1, k1 * d + l1]];
                        }
                    }
                }
            }
            out
        };
        let arg = -u - 2.0 * family.kappa();
        let lhs = t1(&family.r_matrix(u)).dot(&t1(&family.r_matrix_swapped(arg)));
        let cross = rel_fro_diff(&lhs, &id.mapv(|z| z * family.rho_v_tilde(u)));
        let ybe = ybe_residual(family, &ws, u, v)?;
        Ok((unit, cross, ybe))
    });

    let mut unit_samples = Vec::with_capacity(points.len());
    let mut cross_samples = Vec::with_capacity(points.len());
    let mut ybe_samples = Vec::with_capacity(points.len());
    for (i, r) in per_sample.into_iter().enumerate() {
        let (unit, cross, ybe) = r?;
        let (u, v) = points[i];
        unit_samples.push((unit, witness_u(u)));
        cross_samples.push((cross, witness_u(u)));
        ybe_samples.push((ybe, witness_uv(u, v)));
    }

    Ok(vec![
        regularity,
        Check::from_samples(
            "r.unitarity",
            format!("R12(u) R21(-u) = rho_v(u) id, n={}", family.rank()),
            opts.tol,
            unit_samples,
        ),
        Check::from_samples(
            "r.crossing_unitarity",
            format!("R12(u)^t1 R21(-u-2k)^t1 = rho_v(u+k) id, n={}", family.rank()),
            opts.tol,
            cross_samples,
        ),
        Check::from_samples(
            "r.yang_baxter",
            format!("R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v), n={}", family.rank()),
            opts.tol,
            ybe_samples,
        ),
    ])
}

#[derive(Debug, Clone, Copy)]
pub struct ReflectionOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub mode: Parallelism,
}

impl Default for ReflectionOptions {
    fn default() -> Self {
        ReflectionOptions { samples: 20, tol: 1e-10, seed: 7, mode: Parallelism::default() }
    }
}

/// Residuals of the reflection equation and its dual for one (u, v).
pub fn reflection_residuals(
    family: &RMatrixFamily,
    params: &BoundaryParams,
    u: C64,
    v: C64,
) -> (f64, f64) {
    let d = family.dim();
    let id = Array2::<C64>::eye(d);
    let k1 = |m: &Array2<C64>| ndarray::linalg::kron(m, &id);
    let k2 = |m: &Array2<C64>| ndarray::linalg::kron(&id, m);

    let km_u = family.k_minus(params, u);
    let km_v = family.k_minus(params, v);
    let lhs = family
        .r_matrix(u - v)
        .dot(&k1(&km_u))
        .dot(&family.r_matrix_swapped(u + v))
        .dot(&k2(&km_v));
    let rhs = k2(&km_v)
        .dot(&family.r_matrix(u + v))
        .dot(&k1(&km_u))
        .dot(&family.r_matrix_swapped(u - v));
    let re = rel_fro_diff(&lhs, &rhs);

    let shift = -u - v - 2.0 * family.kappa();
    let kp_u = family.k_plus(params, u);
    let kp_v = family.k_plus(params, v);
    let lhs = family
        .r_matrix(-u + v)
        .dot(&k1(&kp_u))
        .dot(&family.r_matrix_swapped(shift))
        .dot(&k2(&kp_v));
    let rhs = k2(&kp_v)
        .dot(&family.r_matrix(shift))
        .dot(&k1(&kp_u))
        .dot(&family.r_matrix_swapped(-u + v));
    let dual = rel_fro_diff(&lhs, &rhs);
    (re, dual)
}

/// Random-sample sweep of the reflection equation and its dual.
pub fn verify_reflection_equations(
    family: &RMatrixFamily,
    params: &BoundaryParams,
    opts: &ReflectionOptions,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<(C64, C64)> = (0..opts.samples)
        .map(|_| (random_spectral_point(&mut rng), random_spectral_point(&mut rng)))
        .collect();
    let residuals: Vec<(f64, f64)> = map_indexed(opts.mode, points.len(), |i| {
        let (u, v) = points[i];
        reflection_residuals(family, params, u, v)
    });
    let mut re_samples = Vec::with_capacity(points.len());
    let mut dual_samples = Vec::with_capacity(points.len());
    for (i, (re, dual)) in residuals.into_iter().enumerate() {
        let (u, v) = points[i];
        re_samples.push((re, witness_uv(u, v)));
        dual_samples.push((dual, witness_uv(u, v)));
    }
    Ok(vec![
        Check::from_samples(
            "k.reflection",
            format!("reflection equation for K-, n={}", family.rank()),
            opts.tol,
            re_samples,
        ),
        Check::from_samples(
            "k.dual_reflection",
            format!("dual reflection equation for K+, n={}", family.rank()),
            opts.tol,
            dual_samples,
        ),
    ])
}
