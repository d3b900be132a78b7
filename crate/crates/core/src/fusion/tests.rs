use super::*;
use crate::model::BoundaryParams;
use crate::tensor::fro_norm;

use std::sync::OnceLock;

fn fusion() -> &'static Fusion {
    static F: OnceLock<Fusion> = OnceLock::new();
    F.get_or_init(|| Fusion::new().expect("fusion context"))
}

fn cc(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn partial_transpose(m: &Array2<C64>, dims: [usize; 2], factor: usize) -> Array2<C64> {
    let op = DenseOperator::new(spaces(&dims), m.clone()).unwrap();
    op.partial_transpose(factor).unwrap().into_matrix()
}

#[test]
fn printed_bases_are_orthonormal() {
    let f = fusion();
    for (name, iso) in [
        ("psi0", &f.psi0),
        ("psi14", &f.psi14),
        ("psi6_bar", &f.psi6_bar),
        ("psi14_bar", &f.psi14_bar),
        ("phi14", &f.phi14),
        ("phi14_tilde", &f.phi14_tilde),
    ] {
        let defect = bases::gram_defect(iso);
        assert!(defect < 1e-12, "{name} Gram defect {defect}");
    }
}

#[test]
fn degeneration_ranks_and_subspaces() {
    let checks = verify_degenerations(fusion(), 1e-8).unwrap();
    assert_eq!(checks.len(), 7);
    for ch in &checks {
        assert!(ch.passed, "{}: residual {} note {:?}", ch.anchor, ch.max_residual, ch.note);
    }
}

#[test]
fn r_bar_unitarity_and_value() {
    let f = fusion();
    let id = Array2::<C64>::eye(84);
    // value check at u = 1: normalizer 225/16
    let prod = f.r_bar(cc(1.0, 0.0)).dot(&f.r_bar(cc(-1.0, 0.0)));
    assert!(rel_fro_diff(&prod, &id.mapv(|z| z * (225.0 / 16.0))) < 1e-11);
    for &(re, im) in &[(0.37, 0.8), (-0.9, -0.33)] {
        let u = cc(re, im);
        let prod = f.r_bar(u).dot(&f.r_bar(-u));
        assert!(rel_fro_diff(&prod, &id.mapv(|z| z * f.rho_v_bar(u))) < 1e-11, "unitarity at {u}");
    }
}

#[test]
fn r_bar_crossing_unitarity() {
    let f = fusion();
    let id = Array2::<C64>::eye(84);
    for &(re, im) in &[(0.45, 0.3), (-0.7, 0.9)] {
        let u = cc(re, im);
        let lhs = partial_transpose(&f.r_bar(u), [14, 6], 0)
            .dot(&partial_transpose(&f.r_bar(-u - 8.0), [14, 6], 0));
        assert!(
            rel_fro_diff(&lhs, &id.mapv(|z| z * f.rho_v_bar_tilde(u))) < 1e-10,
            "crossing at {u}"
        );
    }
}

#[test]
fn r_tilde_unitarity_and_crossing() {
    let f = fusion();
    let id = Array2::<C64>::eye(84);
    let prod = f.r_tilde(cc(1.0, 0.0)).dot(&f.r_tilde(cc(-1.0, 0.0)));
    assert!(rel_fro_diff(&prod, &id.mapv(|z| z * 8.0)) < 1e-12);
    let u = cc(0.6, -0.4);
    let prod = f.r_tilde(u).dot(&f.r_tilde(-u));
    assert!(rel_fro_diff(&prod, &id.mapv(|z| z * f.rho_v_tilde(u))) < 1e-12);
    let lhs = partial_transpose(&f.r_tilde(u), [14, 6], 0)
        .dot(&partial_transpose(&f.r_tilde(-u - 8.0), [14, 6], 0));
    assert!(rel_fro_diff(&lhs, &id.mapv(|z| z * f.rho_v_tilde_tilde(u))) < 1e-11);
}

#[test]
fn r_bar_tilde_unitarity_and_crossing() {
    let f = fusion();
    let id = Array2::<C64>::eye(196);
    // value at u = 1: (7/2)(-3/2)(9/2)(-5/2) = 945/16
    let prod = f.r_bar_tilde(cc(1.0, 0.0)).dot(&f.r_bar_tilde(cc(-1.0, 0.0)));
    assert!(rel_fro_diff(&prod, &id.mapv(|z| z * (945.0 / 16.0))) < 1e-11);
    let u = cc(0.8, 0.5);
    let prod = f.r_bar_tilde(u).dot(&f.r_bar_tilde(-u));
    assert!(rel_fro_diff(&prod, &id.mapv(|z| z * f.rho_v_bar_v_tilde(u))) < 1e-11);
    // crossing transposes the barred (second) factor
    let lhs = partial_transpose(&f.r_bar_tilde(u), [14, 14], 1)
        .dot(&partial_transpose(&f.r_bar_tilde(-u - 8.0), [14, 14], 1));
    assert!(rel_fro_diff(&lhs, &id.mapv(|z| z * f.rho_v_bar_v_tilde_crossing(u))) < 1e-10);
}

#[test]
fn fused_ybe_relations() {
    let f = fusion();
    let fam = f.family();
    let u = cc(0.52, 0.61);
    let v = cc(-0.33, 0.27);

    // barred: R_bar12(u-v) R_bar13(u) R23(v) = R23(v) R_bar13(u) R_bar12(u-v)
    let dims = [14usize, 6, 6];
    let chain = spaces(&dims);
    let lhs = DenseOperator::identity(chain.clone())
        .unwrap()
        .mul_embed(&f.r_bar(u - v).view(), &[14, 6], &[0, 1])
        .unwrap()
        .mul_embed(&f.r_bar(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&fam.r_matrix(v).view(), &[6, 6], &[1, 2])
        .unwrap();
    let rhs = DenseOperator::identity(chain.clone())
        .unwrap()
        .mul_embed(&fam.r_matrix(v).view(), &[6, 6], &[1, 2])
        .unwrap()
        .mul_embed(&f.r_bar(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&f.r_bar(u - v).view(), &[14, 6], &[0, 1])
        .unwrap();
    assert!(rel_fro_diff(lhs.matrix(), rhs.matrix()) < 1e-11, "barred fused YBE");

    // triple-fused version
    let lhs = DenseOperator::identity(chain.clone())
        .unwrap()
        .mul_embed(&f.r_tilde(u - v).view(), &[14, 6], &[0, 1])
        .unwrap()
        .mul_embed(&f.r_tilde(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&fam.r_matrix(v).view(), &[6, 6], &[1, 2])
        .unwrap();
    let rhs = DenseOperator::identity(chain)
        .unwrap()
        .mul_embed(&fam.r_matrix(v).view(), &[6, 6], &[1, 2])
        .unwrap()
        .mul_embed(&f.r_tilde(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&f.r_tilde(u - v).view(), &[14, 6], &[0, 1])
        .unwrap();
    assert!(rel_fro_diff(lhs.matrix(), rhs.matrix()) < 1e-11, "triple fused YBE");

    // mixed: R_bar-tilde couples the two fused spaces
    let dims = [14usize, 14, 6];
    let chain = spaces(&dims);
    let lhs = DenseOperator::identity(chain.clone())
        .unwrap()
        .mul_embed(&f.r_bar_tilde(u - v).view(), &[14, 14], &[1, 0])
        .unwrap()
        .mul_embed(&f.r_bar(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&f.r_tilde(v).view(), &[14, 6], &[1, 2])
        .unwrap();
    let rhs = DenseOperator::identity(chain)
        .unwrap()
        .mul_embed(&f.r_tilde(v).view(), &[14, 6], &[1, 2])
        .unwrap()
        .mul_embed(&f.r_bar(u).view(), &[14, 6], &[0, 2])
        .unwrap()
        .mul_embed(&f.r_bar_tilde(u - v).view(), &[14, 14], &[1, 0])
        .unwrap();
    assert!(rel_fro_diff(lhs.matrix(), rhs.matrix()) < 1e-10, "mixed fused YBE");
}

#[test]
fn fused_entry_degrees() {
    // barred and mixed entries are quadratic, triple-fused entries linear:
    // the constructor fits those degrees and a held-out node must agree.
    let f = fusion();
    let u = cc(1.77, 0.0);
    let dims = [6usize, 6, 6];
    let w = ndarray::linalg::kron(&f.psi14.view(), &Array2::<C64>::eye(6).view());
    let wdag = w.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
    let m = apply_embedded_left(&f.family().r_matrix(u - 0.5).view(), &[6, 6], &[1, 2], &dims, &w).unwrap();
    let m = apply_embedded_left(&f.family().r_matrix(u + 0.5).view(), &[6, 6], &[0, 2], &dims, &m).unwrap();
    let direct = wdag.dot(&m).mapv(|z| z / f.family().rho0_tilde(u + 0.5));
    assert!(rel_fro_diff(&direct, &f.r_bar(u)) < 1e-12, "sandwich vs polynomial");
    assert_eq!(f.r_bar_poly().degree(), 2);
    assert_eq!(f.r_tilde_poly().degree(), 1);
    assert_eq!(f.r_bar_tilde_poly().degree(), 2);
}

#[test]
fn closure_suite_passes() {
    let checks = verify_closure(fusion(), 6, 1e-10, 11, Parallelism::default()).unwrap();
    assert_eq!(checks.len(), 5);
    for ch in &checks {
        assert!(ch.passed, "{}: {} (witness {})", ch.anchor, ch.max_residual, ch.witness);
    }
}

#[test]
fn fused_k_special_values() {
    // Measured scalar values of the fused K-matrices at the distinguished
    // points (see `Fusion::expected_fused_k_scalars`). These differ from
    // some published intermediate tables by overall signs (barred kinds)
    // and by the zeta-power in the combination (triple-fused kinds); the
    // constructions themselves are pinned by the consistency-return
    // identities, which hold to machine precision.
    let f = fusion();
    let p = BoundaryParams::generic_preset();
    let id14 = Array2::<C64>::eye(14);
    let s = f.expected_fused_k_scalars(&p);

    let k_bar_m = f.fused_k_poly(FusedKKind::BarMinus, &p).unwrap();
    assert!(
        rel_fro_diff(&k_bar_m.eval(cc(0.0, 0.0)), &id14.mapv(|z| z * s.bar_minus_at_0)) < 1e-10,
        "barred K- at 0"
    );
    let tr: C64 = k_bar_m.eval(cc(-4.0, 0.0)).diag().sum();
    assert!((tr - s.bar_minus_trace_at_m4).norm() < 1e-9 * tr.norm().max(1.0), "trace of barred K- at -4");

    let k_bar_p = f.fused_k_poly(FusedKKind::BarPlus, &p).unwrap();
    assert!(
        rel_fro_diff(&k_bar_p.eval(cc(-4.0, 0.0)), &id14.mapv(|z| z * s.bar_plus_at_m4)) < 1e-10,
        "barred K+ at -4"
    );
    let tr: C64 = k_bar_p.eval(cc(0.0, 0.0)).diag().sum();
    assert!((tr - s.bar_plus_trace_at_0).norm() < 1e-9 * tr.norm().max(1.0), "trace of barred K+ at 0");

    let k_til_m = f.fused_k_poly(FusedKKind::TildeMinus, &p).unwrap();
    assert!(
        rel_fro_diff(&k_til_m.eval(cc(0.0, 0.0)), &id14.mapv(|z| z * s.tilde_minus_at_0)) < 1e-9,
        "triple-fused K- at 0"
    );
    let tr: C64 = k_til_m.eval(cc(-4.0, 0.0)).diag().sum();
    assert!((tr - s.tilde_minus_trace_at_m4).norm() < 1e-8 * tr.norm().max(1.0), "trace of triple-fused K- at -4");

    let k_til_p = f.fused_k_poly(FusedKKind::TildePlus, &p).unwrap();
    assert!(
        rel_fro_diff(&k_til_p.eval(cc(-4.0, 0.0)), &id14.mapv(|z| z * s.tilde_plus_at_m4)) < 1e-9,
        "triple-fused K+ at -4"
    );
    let tr: C64 = k_til_p.eval(cc(0.0, 0.0)).diag().sum();
    assert!((tr - s.tilde_plus_trace_at_0).norm() < 1e-8 * tr.norm().max(1.0), "trace of triple-fused K+ at 0");
}

#[test]
fn fused_k_poly_matches_direct_sandwich() {
    let f = fusion();
    let p = BoundaryParams::generic_preset();
    let u = cc(0.93, 0.4);
    for kind in [FusedKKind::BarMinus, FusedKKind::BarPlus, FusedKKind::TildeMinus, FusedKKind::TildePlus] {
        let direct = f.fused_k(kind, &p, u).unwrap();
        let poly = f.fused_k_poly(kind, &p).unwrap();
        assert!(rel_fro_diff(&direct, &poly.eval(u)) < 1e-10, "{kind:?}");
    }
}

#[test]
fn fused_k_singularity_error_at_prefactor_zero() {
    let f = fusion();
    let p = BoundaryParams::generic_preset();
    match f.fused_k(FusedKKind::BarMinus, &p, cc(0.5, 0.0)) {
        Err(crate::Error::Singularity { .. }) => {}
        other => panic!("expected singularity error, got {:?}", other.map(|m| m.nrows())),
    }
}

#[test]
fn quantum_determinants() {
    let f = fusion();
    let p = BoundaryParams::generic_preset();
    // explicit zero at u = 3/2
    assert!(f.quantum_det_k_minus(&p, cc(1.5, 0.0)).norm() < 1e-14);
    // value at u = 0: (-3/2)(-4) h1(0) h2(0) = 6 (2 zeta)(-2 zeta) = -24 zeta^2
    let got = f.quantum_det_k_minus(&p, cc(0.0, 0.0));
    let expect = p.zeta * p.zeta * -24.0;
    assert!((got - expect).norm() < 1e-12 * expect.norm());
    // the singlet sandwich reproduces the determinant formulas up to a
    // global sign (the measured ratio is exactly -1; see the residual
    // helper's doc)
    for &(re, im) in &[(0.71, 0.32), (-0.6, 0.45)] {
        let (m, pl) = f.quantum_det_sandwich_residuals(&p, cc(re, im));
        assert!(m < 1e-10, "K- quantum determinant sandwich: {m}");
        assert!(pl < 1e-10, "K+ quantum determinant sandwich: {pl}");
    }
}



#[test]
fn printed_barred_table_is_incomplete() {
    // The reference table restricted to site indices <= 4 does not span
    // the barred image at -3/2; the derived basis does. This pins the
    // measured fact so any future change to either side is loud.
    let f = fusion();
    let (rank, iso) = crate::tensor::svd_rank(&f.r_bar(cc(-1.5, 0.0)), 1e-10).unwrap();
    assert_eq!(rank, 14);
    let printed = bases::psi14_bar_printed();
    let angle_printed = crate::tensor::principal_angle_max(&iso, &printed).unwrap();
    assert!(angle_printed > 0.1, "reference table unexpectedly spans the image: {angle_printed}");
    let angle_derived = crate::tensor::principal_angle_max(&iso, &f.psi14_bar).unwrap();
    assert!(angle_derived < 1e-8, "derived basis deviates: {angle_derived}");
}

#[test]
fn fused_k_reflection_equations() {
    let checks = verify_fused_k_reflection(
        fusion(),
        &BoundaryParams::generic_preset(),
        5,
        1e-10,
        13,
        Parallelism::default(),
    )
    .unwrap();
    assert_eq!(checks.len(), 6);
    for ch in &checks {
        assert!(ch.passed, "{}: {}", ch.anchor, ch.max_residual);
    }
}

#[test]
fn fused_k_consistency_returns() {
    // The triple-fused returns hold with the stated prefactors; the barred
    // returns hold with an extra overall sign (folded into the helper,
    // which documents the measured ratio).
    let res = fused_k_return_residuals(fusion(), &BoundaryParams::generic_preset(), cc(0.37, 0.18)).unwrap();
    for (i, r) in res.iter().enumerate() {
        assert!(*r < 1e-9, "return identity {i}: residual {r}");
    }
}

#[test]
fn six_factor_norms_are_nontrivial() {
    // guard that the closure check is not passing vacuously
    let f = fusion();
    assert!(fro_norm(&f.r_bar(cc(0.9, 0.0))) > 1.0);
    assert!(fro_norm(&f.r_tilde(cc(0.9, 0.0))) > 1.0);
}
