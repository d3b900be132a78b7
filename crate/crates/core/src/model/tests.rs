use super::*;
use crate::tensor::{fit_matrix_polynomial, rel_fro_diff, svd_rank};


fn cc(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Independent entrywise construction of the n=3 R-matrix from the named
/// scalar amplitudes and their index cases. Used as an oracle against the
/// structural build.
fn r_c3_by_cases(fam: &RMatrixFamily, u: C64) -> Array2<C64> {
    let d = 6usize;
    let bar = |i: usize| d - 1 - i;
    let xi = |i: usize| if i < 3 { 1.0 } else { -1.0 };
    let mut m = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let entry = if i == k && j == l {
                        if i == j {
                            fam.a(u)
                        } else if j == bar(i) {
                            fam.e(u)
                        } else {
                            fam.b(u)
                        }
                    } else if i == l && j == k {
                        // exchange; the (i, bar i) column pair overlaps the
                        // pair-creation term below, so exclude it here
                        if j == bar(i) {
                            fam.c_fn(u)
                        } else {
                            fam.g(u)
                        }
                    } else if j == bar(i) && k == bar(l) && i != l {
                        xi(i) * xi(k) * fam.d_fn(u)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    if entry != C64::new(0.0, 0.0) {
                        m[[i * d + j, k * d + l]] = entry;
                    }
                }
            }
        }
    }
    m
}

#[test]
fn scalar_values_at_zero() {
    let fam = RMatrixFamily::new(3);
    let z = C64::new(0.0, 0.0);
    assert_eq!(fam.a(z), cc(4.0, 0.0));
    assert_eq!(fam.c_fn(z), cc(4.0, 0.0));
    assert_eq!(fam.g(z), cc(4.0, 0.0));
    assert_eq!(fam.b(z), cc(0.0, 0.0));
    assert_eq!(fam.d_fn(z), cc(0.0, 0.0));
    assert_eq!(fam.e(z), cc(0.0, 0.0));
}

#[test]
fn diagonal_entry_at_one() {
    let fam = RMatrixFamily::new(3);
    let r = fam.r_matrix(cc(1.0, 0.0));
    for i in 0..6 {
        assert!((r[[i * 6 + i, i * 6 + i]] - cc(10.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn regularity_is_four_p() {
    let fam = RMatrixFamily::new(3);
    let r0 = fam.r_matrix(cc(0.0, 0.0));
    assert_eq!(rel_fro_diff(&r0, &fam.permutation().mapv(|z| z * 4.0)), 0.0);
}

#[test]
fn rank_two_is_sixteen_dim() {
    let fam = RMatrixFamily::new(2);
    assert_eq!(fam.r_matrix(cc(0.3, 0.1)).nrows(), 16);
}

#[test]
fn unitarity_at_zero_is_exact() {
    let fam = RMatrixFamily::new(3);
    let r0 = fam.r_matrix(cc(0.0, 0.0));
    let prod = r0.dot(&r0);
    assert_eq!(rel_fro_diff(&prod, &Array2::eye(36).mapv(|z: C64| z * 16.0)), 0.0);
}

#[test]
fn crossing_normalizer_value() {
    let fam = RMatrixFamily::new(3);
    // rho~_v(1) = rho_v(5) = a(5) a(-5) = 54 * 4
    assert!((fam.rho_v_tilde(cc(1.0, 0.0)) - cc(216.0, 0.0)).norm() < 1e-12);
}

#[test]
fn structural_build_matches_entry_cases() {
    let fam = RMatrixFamily::new(3);
    for &(re, im) in &[(0.37, 0.21), (-1.4, 0.6), (2.0, -0.8)] {
        let u = cc(re, im);
        let direct = r_c3_by_cases(&fam, u);
        assert!(rel_fro_diff(&fam.r_matrix(u), &direct) < 1e-15, "entry cases disagree at {u}");
    }
}

#[test]
fn entries_are_degree_two_polynomials() {
    for n in [2usize, 3, 4] {
        let fam = RMatrixFamily::new(n);
        let nodes = crate::tensor::poly::chebyshev_nodes(0.5, 2.0, 5);
        let samples: Vec<(C64, Array2<C64>)> =
            nodes.iter().map(|&x| (cc(x, 0.0), fam.r_matrix(cc(x, 0.0)))).collect();
        let (_, residual) = fit_matrix_polynomial(&samples, 2).unwrap();
        assert!(residual < 1e-12, "n={n} degree-2 fit residual {residual}");
    }
}

#[test]
fn degeneration_ranks_for_c3() {
    let fam = RMatrixFamily::new(3);
    let (rank_m4, _) = svd_rank(&fam.r_matrix(cc(-4.0, 0.0)), 1e-10).unwrap();
    assert_eq!(rank_m4, 1);
    let (rank_m1, _) = svd_rank(&fam.r_matrix(cc(-1.0, 0.0)), 1e-10).unwrap();
    assert_eq!(rank_m1, 14);
}

#[test]
fn r_property_sweep_passes() {
    for n in [2usize, 3] {
        let fam = RMatrixFamily::new(n);
        let opts = RPropertyOptions { samples: 12, ..Default::default() };
        let checks = verify_r_properties(&fam, &opts).unwrap();
        assert_eq!(checks.len(), 4);
        for ch in &checks {
            assert!(ch.passed, "{} failed: {} (witness {})", ch.anchor, ch.max_residual, ch.witness);
        }
    }
}

#[test]
fn k_minus_matches_printed_block_matrix() {
    // The 6x6 coefficient matrix with -1 on the first three diagonal
    // slots, +1 on the last three, c1 at (i, i+3) and c2 at (i+3, i).
    let fam = RMatrixFamily::new(3);
    let p = BoundaryParams::generic_preset();
    let u = cc(0.83, -0.4);
    let mut m = Array2::<C64>::zeros((6, 6));
    for i in 0..3 {
        m[[i, i]] = cc(-1.0, 0.0);
        m[[i + 3, i + 3]] = cc(1.0, 0.0);
        m[[i, i + 3]] = p.c1;
        m[[i + 3, i]] = p.c2;
    }
    let expect = Array2::<C64>::eye(6).mapv(|z| z * p.zeta) + m.mapv(|z| z * u);
    assert_eq!(rel_fro_diff(&fam.k_minus(&p, u), &expect), 0.0);
}

#[test]
fn k_special_values() {
    let fam = RMatrixFamily::new(3);
    let p = BoundaryParams::generic_preset();
    let k0 = fam.k_minus(&p, cc(0.0, 0.0));
    assert_eq!(rel_fro_diff(&k0, &Array2::eye(6).mapv(|z: C64| z * p.zeta)), 0.0);
    let kp4 = fam.k_plus(&p, cc(-4.0, 0.0));
    assert_eq!(rel_fro_diff(&kp4, &Array2::eye(6).mapv(|z: C64| z * p.zeta_t)), 0.0);
}

#[test]
fn k_plus_is_shifted_swapped_k_minus() {
    let fam = RMatrixFamily::new(4);
    let p = BoundaryParams::generic_preset();
    let u = cc(0.6, 0.3);
    let lhs = fam.k_plus(&p, u);
    let rhs = fam.k_minus(&p.dual(), -u - fam.kappa());
    assert_eq!(rel_fro_diff(&lhs, &rhs), 0.0);
}

#[test]
fn reflection_sweep_passes_generic_and_diagonal() {
    for n in [2usize, 3] {
        let fam = RMatrixFamily::new(n);
        let opts = ReflectionOptions { samples: 8, ..Default::default() };
        for params in [BoundaryParams::generic_preset(), BoundaryParams::diagonal(cc(0.9, 0.0), cc(1.1, 0.0))] {
            let checks = verify_reflection_equations(&fam, &params, &opts).unwrap();
            for ch in &checks {
                assert!(ch.passed, "n={n} {}: {}", ch.anchor, ch.max_residual);
            }
        }
    }
}

#[test]
fn spectral_sampling_avoids_degenerations() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let z = random_spectral_point(&mut rng);
        assert!(spectral_point_ok(z));
        assert!(z.re.abs() <= 2.0 && z.im.abs() <= 2.0);
    }
}
