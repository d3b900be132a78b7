use super::*;
use ndarray::array;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sp(id: u32, dim: usize) -> Space {
    Space::new(id, dim)
}

fn op(dims: &[usize], mat: Array2<C64>) -> DenseOperator {
    use std::sync::atomic::{AtomicU32, Ordering};
    static NEXT_ID: AtomicU32 = AtomicU32::new(1000);
    let factors: Vec<Space> = dims
        .iter()
        .map(|&d| sp(NEXT_ID.fetch_add(1, Ordering::Relaxed), d))
        .collect();
    DenseOperator::new(factors, mat).unwrap()
}

fn random_op<R: Rng>(rng: &mut R, dims: &[usize]) -> DenseOperator {
    let d: usize = dims.iter().product();
    let mat = Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    op(dims, mat)
}

#[test]
fn kron_identity_case() {
    let i2 = DenseOperator::identity(vec![sp(0, 2)]).unwrap();
    let i3 = DenseOperator::identity(vec![sp(1, 3)]).unwrap();
    let k = i2.kron(&i3).unwrap();
    assert_eq!(rel_fro_diff(k.matrix(), &Array2::eye(6)), 0.0);
}

#[test]
fn kron_diagonal_case() {
    let a = op(&[2], Array2::from_diag(&array![c(1.), c(2.)]));
    let b = op(&[2], Array2::from_diag(&array![c(3.), c(4.)]));
    let k = a.kron(&b).unwrap();
    let expect = Array2::from_diag(&array![c(3.), c(4.), c(6.), c(8.)]);
    assert_eq!(rel_fro_diff(k.matrix(), &expect), 0.0);
}

#[test]
fn kron_trace_multiplicativity_oracle() {
    // Oracle: brute-force traces of the factors, product rule checked on
    // the assembled operator. P6 is the permutation on V (x) V, d = 6.
    let p6 = op(&[6, 6], permutation_matrix(6));
    let tr_p6: C64 = (0..36).map(|i| p6.matrix()[[i, i]]).sum();
    assert_eq!(tr_p6, c(6.0));
    let i6 = DenseOperator::identity(vec![sp(9, 6)]).unwrap();
    let k = p6.kron(&i6).unwrap();
    assert_eq!(k.dim(), 216);
    assert_eq!(k.trace(), tr_p6 * c(6.0));
    assert_eq!(k.trace(), c(36.0));
}

#[test]
fn kron_capacity_error() {
    let big = DenseOperator::identity(vec![sp(0, 1 << 12)]).unwrap();
    let big2 = DenseOperator::identity(vec![sp(1, 1 << 12)]).unwrap();
    match big.kron(&big2) {
        Err(Error::Capacity { .. }) => {}
        other => panic!("expected capacity error, got {:?}", other.map(|o| o.dim())),
    }
}

#[test]
fn embed_leading_is_kron() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = random_op(&mut rng, &[3]);
    let chain = [sp(0, 3), sp(1, 4)];
    let embedded = x.embed(&[0], &chain).unwrap();
    let i4 = DenseOperator::identity(vec![sp(1, 4)]).unwrap();
    let kron = x.kron(&i4).unwrap();
    assert!(rel_fro_diff(embedded.matrix(), kron.matrix()) == 0.0);
}

#[test]
fn embed_identity_is_identity() {
    let i2 = DenseOperator::identity(vec![sp(7, 2)]).unwrap();
    let chain = [sp(0, 3), sp(7, 2), sp(2, 2)];
    let e = i2.embed(&[1], &chain).unwrap();
    assert_eq!(rel_fro_diff(e.matrix(), &Array2::eye(12)), 0.0);
}

#[test]
fn embed_swap_on_outer_factors_oracle() {
    // Oracle: enumerate all 8 basis states of a 3-qubit chain. The swap
    // embedded on factors {0, 2} must send |abc> to |cba>.
    let p = op(&[2, 2], permutation_matrix(2));
    let chain = [sp(0, 2), sp(1, 2), sp(2, 2)];
    let e = p.embed(&[0, 2], &chain).unwrap();
    for a in 0..2usize {
        for b in 0..2usize {
            for cidx in 0..2usize {
                let src = (a * 2 + b) * 2 + cidx;
                let dst = (cidx * 2 + b) * 2 + a;
                for row in 0..8 {
                    let expect = if row == dst { 1.0 } else { 0.0 };
                    assert_eq!(e.matrix()[[row, src]], c(expect), "row {row} src {src}");
                }
            }
        }
    }
}

#[test]
fn embed_rejects_bad_positions() {
    let x = random_op(&mut ChaCha8Rng::seed_from_u64(2), &[2]);
    let chain = [sp(0, 2), sp(1, 3)];
    assert!(matches!(x.embed(&[5], &chain), Err(Error::IndexOutOfRange { .. })));
    assert!(matches!(x.embed(&[1], &chain), Err(Error::ShapeMismatch(_))));
    let xx = random_op(&mut ChaCha8Rng::seed_from_u64(3), &[2, 2]);
    let chain2 = [sp(0, 2), sp(1, 2)];
    assert!(matches!(xx.embed(&[0, 0], &chain2), Err(Error::DuplicatePosition(0))));
}

#[test]
fn partial_trace_of_kron_is_exact() {
    // Exact-integer inputs: equality must hold with zero tolerance.
    let a = op(&[2], array![[c(2.), c(1.)], [c(0.), c(3.)]]);
    let b = op(&[3], Array2::from_shape_fn((3, 3), |(i, j)| c((2 * i + j) as f64)));
    let k = a.kron(&b).unwrap();
    let traced = k.partial_trace(0).unwrap();
    let expect = b.matrix().mapv(|z| z * c(5.0));
    assert_eq!(rel_fro_diff(traced.matrix(), &expect), 0.0);
    assert_eq!(traced.factors().len(), 1);
}

#[test]
fn partial_trace_permutation_gives_identity() {
    // Oracle: matrix-unit enumeration. tr_0 P = sum_i <i|.|i> blocks = I.
    let p = op(&[6, 6], permutation_matrix(6));
    let traced = p.partial_trace(0).unwrap();
    assert!(rel_fro_diff(traced.matrix(), &Array2::eye(6)) == 0.0);
}

#[test]
fn partial_transpose_is_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_op(&mut rng, &[2, 3, 2]);
    for f in 0..3 {
        let once = x.partial_transpose(f).unwrap();
        let twice = once.partial_transpose(f).unwrap();
        assert_eq!(rel_fro_diff(twice.matrix(), x.matrix()), 0.0);
    }
}

#[test]
fn partial_transpose_single_factor_is_full_transpose() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_op(&mut rng, &[4]);
    let t = x.partial_transpose(0).unwrap();
    let expect = x.matrix().t().to_owned();
    assert_eq!(rel_fro_diff(t.matrix(), &expect), 0.0);
}

#[test]
fn svd_rank_identity_and_zero() {
    let (rank, iso) = svd_rank(&Array2::<C64>::eye(6), 1e-10).unwrap();
    assert_eq!(rank, 6);
    assert_eq!(iso.ncols(), 6);
    let (rank0, iso0) = svd_rank(&Array2::<C64>::zeros((4, 4)), 1e-10).unwrap();
    assert_eq!(rank0, 0);
    assert_eq!(iso0.ncols(), 0);
}

#[test]
fn svd_rank_monotone_in_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let m = random_op(&mut rng, &[5]).matrix().to_owned();
    let mut prev = usize::MAX;
    for t in [1e-12, 1e-6, 1e-2, 0.5, 0.99] {
        let (rank, _) = svd_rank(&m, t).unwrap();
        assert!(rank <= prev, "rank must not increase with threshold");
        prev = rank;
    }
}

#[test]
fn eig_diagonal_case() {
    let d = op(&[3], Array2::from_diag(&array![c(1.), c(2.), c(3.)]));
    let (vals, _) = eig(&d).unwrap();
    let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((re[0] - 1.0).abs() < 1e-12 && (re[1] - 2.0).abs() < 1e-12 && (re[2] - 3.0).abs() < 1e-12);
}

#[test]
fn eig_permutation_multiplicities() {
    // Oracle: dim of symmetric / antisymmetric subspaces of V (x) V for
    // d = 6 is 21 / 15.
    let p = op(&[6, 6], permutation_matrix(6));
    let (vals, _) = eig(&p).unwrap();
    let plus = vals.iter().filter(|z| (*z - c(1.0)).norm() < 1e-9).count();
    let minus = vals.iter().filter(|z| (*z + c(1.0)).norm() < 1e-9).count();
    assert_eq!((plus, minus), (21, 15));
}

#[test]
fn simultaneous_eigbasis_on_commuting_pair() {
    // Two matrices diagonal in the same random basis.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 8;
    let g = Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let ginv = ndarray_linalg::Inverse::inv(&g).unwrap();
    let da = Array2::from_diag(&Array1::from_iter((0..d).map(|i| c(1.0 + i as f64))));
    let db = Array2::from_diag(&Array1::from_iter((0..d).map(|i| c(2.0 - 0.3 * i as f64))));
    let a = op(&[d], g.dot(&da).dot(&ginv));
    let b = op(&[d], g.dot(&db).dot(&ginv));
    let sim = simultaneous_eigbasis(&a, &b, &mut rng, 1e-9).unwrap();
    assert!(sim.residual < 1e-9);
    // eigenvalues recovered as pairs
    for i in 0..d {
        let va = sim.values.0[i];
        let vb = sim.values.1[i];
        let expect_b = 2.0 - 0.3 * (va.re - 1.0);
        assert!((vb.re - expect_b).abs() < 1e-7, "paired eigenvalues mismatch");
    }
}

#[test]
fn fit_quadratic_exactly() {
    let samples: Vec<(C64, C64)> = [0.5, 1.0, 2.0].iter().map(|&x| (c(x), c(x * x))).collect();
    let fit = fit_polynomial(&samples, 2).unwrap();
    assert!((fit.coefficients[0]).norm() < 1e-12);
    assert!((fit.coefficients[1]).norm() < 1e-12);
    assert!((fit.coefficients[2] - c(1.0)).norm() < 1e-12);
}

#[test]
fn fit_degree_overestimation_leaves_tiny_top_coeffs() {
    let nodes = chebyshev_nodes(-1.0, 1.0, 5);
    let samples: Vec<(C64, C64)> = nodes.iter().map(|&x| (c(x), c(x * x))).collect();
    let fit = fit_polynomial(&samples, 4).unwrap();
    assert!(fit.coefficients[3].norm() < 1e-12);
    assert!(fit.coefficients[4].norm() < 1e-12);
    assert!((fit.coefficients[2] - c(1.0)).norm() < 1e-10);
}

#[test]
fn fit_holdout_residual_reported() {
    let nodes = chebyshev_nodes(0.5, 2.5, 8);
    let f = |x: f64| 3.0 * x * x * x - x + 0.25;
    let samples: Vec<(C64, C64)> = nodes.iter().map(|&x| (c(x), c(f(x)))).collect();
    let fit = fit_polynomial(&samples, 3).unwrap();
    assert!(fit.residual < 1e-12, "cubic reproduced, residual {}", fit.residual);
    assert!((fit.leading() - c(3.0)).norm() < 1e-9);
    // a wrong degree shows up in the held-out residual
    let bad = fit_polynomial(&samples, 2).unwrap();
    assert!(bad.residual > 1e-3);
}

#[test]
fn fit_needs_enough_samples() {
    let samples = vec![(c(0.0), c(0.0)), (c(1.0), c(1.0))];
    assert!(fit_polynomial(&samples, 2).is_err());
}

#[test]
fn matrix_fit_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coeffs: Vec<Array2<C64>> = (0..4)
        .map(|_| Array2::from_shape_fn((3, 3), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let poly = MatPoly { coeffs };
    let nodes = chebyshev_nodes(1.0, 3.0, 6);
    let samples: Vec<(C64, Array2<C64>)> = nodes.iter().map(|&x| (c(x), poly.eval(c(x)))).collect();
    let (fit, residual) = fit_matrix_polynomial(&samples, 3).unwrap();
    assert!(residual < 1e-11, "holdout residual {residual}");
    for k in 0..4 {
        assert!(rel_fro_diff(&fit.coeffs[k], &poly.coeffs[k]) < 1e-10);
    }
    // derivative consistency at a point
    let u = c(1.7);
    let h = 1e-6;
    let fd = (poly.eval(c(1.7 + h)) - poly.eval(c(1.7 - h))).mapv(|z| z / c(2.0 * h));
    assert!(rel_fro_diff(&fit.derivative().eval(u), &fd) < 1e-7);
}

#[test]
fn apply_embedded_matches_materialized() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dims = [2usize, 3, 2, 2];
    let chain: Vec<Space> = dims.iter().enumerate().map(|(i, &d)| sp(i as u32, d)).collect();
    let target = random_op(&mut rng, &dims);
    for positions in [vec![1usize], vec![0, 2], vec![2, 0], vec![3, 1]] {
        let od: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
        let small = random_op(&mut rng, &od);
        let emb = small.embed(&positions, &chain).unwrap();
        let want_left = emb.matmul(&target).unwrap();
        let got_left = target.embed_mul(&small.matrix().view(), &od, &positions).unwrap();
        assert!(rel_fro_diff(want_left.matrix(), got_left.matrix()) < 1e-13, "left {positions:?}");
        let want_right = target.matmul(&emb).unwrap();
        let got_right = target.mul_embed(&small.matrix().view(), &od, &positions).unwrap();
        assert!(rel_fro_diff(want_right.matrix(), got_right.matrix()) < 1e-13, "right {positions:?}");
    }
}

#[test]
fn compress_leading_matches_explicit_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let dims = [2usize, 3, 2];
    let target = random_op(&mut rng, &dims);
    // isometry from a thin SVD of a random 6x2 block
    let g = Array2::from_shape_fn((6, 2), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let (u, _s, _) = ndarray_linalg::SVD::svd(&g, true, false).unwrap();
    let u = u.unwrap().slice(ndarray::s![.., ..2]).to_owned();
    let fused = sp(77, 2);
    let got = target.compress_leading(2, &u.view(), fused).unwrap();
    let w = ndarray::linalg::kron(&u.view(), &Array2::<C64>::eye(2).view());
    let expect = w.mapv(|z| z.conj()).reversed_axes().dot(target.matrix()).dot(&w);
    assert!(rel_fro_diff(got.matrix(), &expect) < 1e-13);
    assert_eq!(got.factors()[0], fused);
    assert_eq!(got.factors().len(), 2);
    assert_eq!(got.factors()[1].dim, 2);
    // expand is the adjoint construction
    let back = got.expand_leading(&u.view(), &[sp(0, 2), sp(1, 3)]).unwrap();
    let expect_back = w.dot(got.matrix()).dot(&w.mapv(|z| z.conj()).reversed_axes());
    assert!(rel_fro_diff(back.matrix(), &expect_back) < 1e-13);
}

#[test]
fn embeds_on_disjoint_positions_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dims = [2usize, 2, 3, 2];
    let chain: Vec<Space> = dims.iter().enumerate().map(|(i, &d)| sp(i as u32, d)).collect();
    for _ in 0..5 {
        let a = random_op(&mut rng, &[2, 3]);
        let b = random_op(&mut rng, &[2, 2]);
        let ea = a.embed(&[0, 2], &chain).unwrap();
        let eb = b.embed(&[1, 3], &chain).unwrap();
        let ab = ea.matmul(&eb).unwrap();
        let ba = eb.matmul(&ea).unwrap();
        let comm = fro_norm(&(ab.matrix() - ba.matrix()));
        assert!(comm <= 1e-12 * ea.fro_norm() * eb.fro_norm());
    }
}

#[test]
fn kron_associativity_exact_for_integer_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut int_op = |dim: usize, id: u32| {
        let mat = Array2::from_shape_fn((dim, dim), |_| c(rng.gen_range(-3..4) as f64));
        DenseOperator::new(vec![sp(id, dim)], mat).unwrap()
    };
    let a = int_op(2, 0);
    let b = int_op(3, 1);
    let d = int_op(2, 2);
    let left = a.kron(&b).unwrap().kron(&d).unwrap();
    let right = a.kron(&b.kron(&d).unwrap()).unwrap();
    assert_eq!(rel_fro_diff(left.matrix(), right.matrix()), 0.0);
}

#[test]
fn rejects_nonfinite_entries() {
    let mat = array![[C64::new(f64::NAN, 0.0)]];
    assert!(DenseOperator::new(vec![sp(0, 1)], mat).is_err());
}
