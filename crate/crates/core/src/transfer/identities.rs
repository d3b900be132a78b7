//! Operator-level verification: closed product identities among transfer
//! matrices at the inhomogeneity points, asymptotic leading coefficients,
//! special-value relations, and the monodromy-level fusion/exchange
//! relations on the doubled auxiliary space.

use ndarray::prelude::*;

use crate::report::{cjson, witness_u, Check};
use crate::tensor::{chebyshev_nodes, fit_matrix_polynomial, fro_norm, rel_fro_diff, DenseOperator, Space};
use crate::{Result, C64};

use super::{c, product_over_sites, varrho, Boundary, ChainSpec, Transfer, TransferKind};

/// Compare two operators; when they disagree, test whether a single
/// complex scale aligns them and record that measured ratio in the note.
/// Constant-ratio disagreements point at a typographical constant in the
/// stated relation rather than at a construction bug.
fn check_with_ratio(
    anchor: impl Into<String>,
    name: impl Into<String>,
    tol: f64,
    lhs: &Array2<C64>,
    rhs: &Array2<C64>,
    witness: serde_json::Value,
) -> Check {
    let residual = rel_fro_diff(lhs, rhs);
    let mut check = Check::from_samples(anchor, name, tol, [(residual, witness)]);
    if !check.passed {
        let denom: C64 = rhs.iter().map(|z| z.conj() * z).sum();
        if denom.norm() > 1e-300 {
            let ratio: C64 = rhs.iter().zip(lhs.iter()).map(|(r, l)| r.conj() * l).sum::<C64>() / denom;
            let aligned = rel_fro_diff(lhs, &rhs.mapv(|z| z * ratio));
            if aligned <= tol {
                check = check.with_note(format!(
                    "holds up to the constant factor {:+.12}{:+.12}i (measured ratio lhs/rhs)",
                    ratio.re, ratio.im
                ));
            }
        }
    }
    check
}

/// The five closed operator product identities evaluated at every
/// inhomogeneity point (both signs for open chains).
pub fn verify_operator_identities(transfer: &Transfer, tol: f64) -> Result<Vec<Check>> {
    match &transfer.chain.boundary {
        Boundary::Periodic => periodic_identities(transfer, tol),
        Boundary::Open(_) => open_identities(transfer, tol),
    }
}

fn periodic_identities(transfer: &Transfer, tol: f64) -> Result<Vec<Check>> {
    let fam = transfer.family();
    let chain = &transfer.chain;
    let qdim = chain.quantum_dim();
    let id = Array2::<C64>::eye(qdim);
    let mut buckets: Vec<Vec<(f64, serde_json::Value)>> = vec![Vec::new(); 5];

    for &x in &chain.theta {
        let t_x = transfer.eval(TransferKind::Fundamental, x)?;
        // 1: t(x) t(x-4) = prod_i a(x-ti) e(x-ti-4) id
        let lhs = t_x.dot(&transfer.eval(TransferKind::Fundamental, x - 4.0)?);
        let scale = product_over_sites(chain, |t| fam.a(x - t) * fam.e(x - t - 4.0));
        buckets[0].push((rel_fro_diff(&lhs, &id.mapv(|z| z * scale)), witness_u(x)));
        // 2: t(x) t(x-1) = prod_i rho0~(x-ti) t2(x-1/2)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Fundamental, x - 1.0)?);
        let scale = product_over_sites(chain, |t| fam.rho0_tilde(x - t));
        let rhs = transfer.eval(TransferKind::Bar, x - 0.5)?.mapv(|z| z * scale);
        buckets[1].push((rel_fro_diff(&lhs, &rhs), witness_u(x)));
        // 3: t(x) t2(x-3/2) = prod_i rho0~(x-ti)(x-ti+1) t3(x-1)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Bar, x - 1.5)?);
        let scale = product_over_sites(chain, |t| fam.rho0_tilde(x - t) * (x - t + 1.0));
        let rhs = transfer.eval(TransferKind::Tilde, x - 1.0)?.mapv(|z| z * scale);
        buckets[2].push((rel_fro_diff(&lhs, &rhs), witness_u(x)));
        // 4: t(x) t2(x-7/2) = prod_i rho0~(x-ti) t(x-3)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Bar, x - 3.5)?);
        let scale = product_over_sites(chain, |t| fam.rho0_tilde(x - t));
        let rhs = transfer.eval(TransferKind::Fundamental, x - 3.0)?.mapv(|z| z * scale);
        buckets[3].push((rel_fro_diff(&lhs, &rhs), witness_u(x)));
        // 5: t(x) t3(x-3) = prod_i (x-ti+4) t2(x-5/2)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Tilde, x - 3.0)?);
        let scale = product_over_sites(chain, |t| x - t + 4.0);
        let rhs = transfer.eval(TransferKind::Bar, x - 2.5)?.mapv(|z| z * scale);
        buckets[4].push((rel_fro_diff(&lhs, &rhs), witness_u(x)));
    }

    let names = [
        "t(x) t(x-4) is scalar at inhomogeneity points",
        "t(x) t(x-1) reduces to the barred transfer matrix",
        "t(x) t2(x-3/2) reduces to the triple-fused transfer matrix",
        "t(x) t2(x-7/2) returns the fundamental transfer matrix",
        "t(x) t3(x-3) reduces to the barred transfer matrix",
    ];
    Ok(buckets
        .into_iter()
        .zip(names)
        .enumerate()
        .map(|(i, (samples, name))| {
            Check::from_samples(format!("periodic.identity.{}", i + 1), name, tol, samples)
        })
        .collect())
}

fn open_identities(transfer: &Transfer, tol: f64) -> Result<Vec<Check>> {
    let fam = transfer.family();
    let chain = &transfer.chain;
    let params = chain.params().unwrap();
    let mut buckets: Vec<Vec<(f64, serde_json::Value)>> = vec![Vec::new(); 5];
    let mut degenerate_notes: Vec<String> = Vec::new();

    let points: Vec<C64> = chain.theta.iter().flat_map(|&t| [t, -t]).collect();
    for &x in &points {
        let t_x = transfer.eval(TransferKind::Fundamental, x)?;
        let hh = params.hh1(x) * params.hh2(x);
        let vr = varrho(fam, chain, x);

        // 1: t(x) t(x-4) = (1/16) [(x-3/2)(x+3/2)(x-4)(x+4)] /
        //    [(x-1/2)(x+1/2)(x-2)(x+2)] H1 H2 varrho(x) varrho(-x) id
        let lhs = t_x.dot(&transfer.eval(TransferKind::Fundamental, x - 4.0)?);
        let pref = (x - 1.5) * (x + 1.5) * (x - 4.0) * (x + 4.0)
            / ((x - 0.5) * (x + 0.5) * (x - 2.0) * (x + 2.0))
            / 16.0;
        let scale = pref * hh * vr * varrho(fam, chain, -x);
        let rhs = Array2::<C64>::eye(chain.quantum_dim()).mapv(|z| z * scale);
        push_or_skip(&mut buckets[0], &mut degenerate_notes, 1, x, &lhs, &rhs);

        // 2: t(x) t(x-1) = (1/4) [(x-1)(x+3/2)^2(x+4)] /
        //    [(x-1/2)(x+7/2)(x+1)(x+2)] varrho(x) t2(x-1/2)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Fundamental, x - 1.0)?);
        let pref = (x - 1.0) * (x + 1.5) * (x + 1.5) * (x + 4.0)
            / ((x - 0.5) * (x + 3.5) * (x + 1.0) * (x + 2.0))
            / 4.0;
        let rhs = transfer.eval(TransferKind::Bar, x - 0.5)?.mapv(|z| z * (pref * vr));
        push_or_skip(&mut buckets[1], &mut degenerate_notes, 2, x, &lhs, &rhs);

        // 3: t(x) t2(x-3/2) = (1/16) [(x-3/2)(x+3/2)(x+1)(x+4)] /
        //    [(x-1/2)(x+1/2)(x+2)(x+3)] varrho(x)
        //    prod_i (x-ti+1)(x+ti+1) t3(x-1)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Bar, x - 1.5)?);
        let pref = (x - 1.5) * (x + 1.5) * (x + 1.0) * (x + 4.0)
            / ((x - 0.5) * (x + 0.5) * (x + 2.0) * (x + 3.0))
            / 16.0;
        let prod = product_over_sites(chain, |t| (x - t + 1.0) * (x + t + 1.0));
        let rhs = transfer.eval(TransferKind::Tilde, x - 1.0)?.mapv(|z| z * (pref * vr * prod));
        push_or_skip(&mut buckets[2], &mut degenerate_notes, 3, x, &lhs, &rhs);

        // 4: t(x) t2(x-7/2) = (1/4) [(x-1)(x-7/2)(x+3/2)(x+4)] /
        //    [(x-1/2)(x-3/2)(x+1)(x+2)] H1 H2 varrho(x) t(x-3)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Bar, x - 3.5)?);
        let pref = (x - 1.0) * (x - 3.5) * (x + 1.5) * (x + 4.0)
            / ((x - 0.5) * (x - 1.5) * (x + 1.0) * (x + 2.0))
            / 4.0;
        let rhs = transfer.eval(TransferKind::Fundamental, x - 3.0)?.mapv(|z| z * (pref * hh * vr));
        push_or_skip(&mut buckets[3], &mut degenerate_notes, 4, x, &lhs, &rhs);

        // 5: t(x) t3(x-3) = [(x-3)(x+4)] / [(x-1)(x+2)]
        //    prod_i (x-ti+4)(x+ti+4) H1 H2 t2(x-5/2)
        let lhs = t_x.dot(&transfer.eval(TransferKind::Tilde, x - 3.0)?);
        let pref = (x - 3.0) * (x + 4.0) / ((x - 1.0) * (x + 2.0));
        let prod = product_over_sites(chain, |t| (x - t + 4.0) * (x + t + 4.0));
        let rhs = transfer.eval(TransferKind::Bar, x - 2.5)?.mapv(|z| z * (pref * prod * hh));
        push_or_skip(&mut buckets[4], &mut degenerate_notes, 5, x, &lhs, &rhs);
    }

    let names = [
        "open t(x) t(x-4) is scalar at inhomogeneity points",
        "open t(x) t(x-1) reduces to the barred transfer matrix",
        "open t(x) t2(x-3/2) reduces to the triple-fused transfer matrix",
        "open t(x) t2(x-7/2) returns the fundamental transfer matrix",
        "open t(x) t3(x-3) reduces to the barred transfer matrix",
    ];
    Ok(buckets
        .into_iter()
        .zip(names)
        .enumerate()
        .map(|(i, (samples, name))| {
            let mut ch = Check::from_samples(format!("open.identity.{}", i + 1), name, tol, samples);
            let notes: Vec<&String> =
                degenerate_notes.iter().filter(|n| n.starts_with(&format!("{}@", i + 1))).collect();
            if !notes.is_empty() {
                ch = ch.with_note(format!("degenerate points skipped: {notes:?}"));
            }
            ch
        })
        .collect())
}

/// Record the residual unless both sides vanish identically (a
/// zero-prefactor point), which is reported as skipped.
fn push_or_skip(
    bucket: &mut Vec<(f64, serde_json::Value)>,
    notes: &mut Vec<String>,
    ident: usize,
    x: C64,
    lhs: &Array2<C64>,
    rhs: &Array2<C64>,
) {
    let scale = fro_norm(lhs).max(fro_norm(rhs));
    if scale < 1e-8 {
        notes.push(format!("{ident}@{x}"));
        return;
    }
    bucket.push((rel_fro_diff(lhs, rhs), witness_u(x)));
}

/// Asymptotic leading coefficients and, for open chains, the special-value
/// relations. Constant-ratio mismatches are measured and recorded.
pub fn verify_asymptotics_and_special_values(transfer: &Transfer, tol: f64) -> Result<Vec<Check>> {
    let chain = &transfer.chain;
    let mut checks = Vec::new();
    let kinds: &[TransferKind] =
        if chain.n == 3 { &TransferKind::ALL } else { &[TransferKind::Fundamental] };

    // Leading coefficients by matrix-polynomial fit. Nodes sit on a
    // symmetric real interval lifted off the axis, which keeps the
    // centered-to-monomial conversion well conditioned for the top
    // coefficient and stays clear of every real degeneration point.
    for &kind in kinds {
        let degree = kind.degree(chain);
        let nodes = chebyshev_nodes(-7.2, 7.2, degree + 2);
        let samples: Result<Vec<(C64, Array2<C64>)>> = nodes
            .iter()
            .map(|&x| {
                let u = C64::new(x, 1.3);
                Ok((u, transfer.eval(kind, u)?))
            })
            .collect();
        let (poly, fit_residual) = fit_matrix_polynomial(&samples?, degree)?;
        let expected = expected_leading(transfer, kind);
        let id = Array2::<C64>::eye(chain.quantum_dim());
        let check = check_with_ratio(
            format!("{}.asymptotic.{}", boundary_tag(chain), kind_tag(kind)),
            format!("leading coefficient of the {} transfer matrix", kind_tag(kind)),
            tol,
            poly.leading(),
            &id.mapv(|z| z * expected),
            serde_json::json!({ "degree": degree, "fit_residual": fit_residual }),
        );
        checks.push(check);
    }

    if let Boundary::Open(params) = &chain.boundary {
        let fam = transfer.family();
        let fusion = transfer.fusion().expect("open special values need the fusion context");
        let zz = params.zeta * params.zeta_t;
        let qq = params.qdet_combo() * params.qdet_combo_t();
        let id = Array2::<C64>::eye(chain.quantum_dim());

        let t = |u: f64| transfer.eval(TransferKind::Fundamental, c(u));
        let t2 = |u: f64| transfer.eval(TransferKind::Bar, c(u));
        let t3 = |u: f64| transfer.eval(TransferKind::Tilde, c(u));

        // 1-2: t at 0 and -4 (site normalizer taken as rho_v = a(u)a(-u))
        let scale = zz * 6.0 * product_over_sites(chain, |th| fam.rho_v(-th));
        for (i, u) in [(1usize, 0.0), (2, -4.0)] {
            let ch = check_with_ratio(
                format!("open.special.{i}"),
                format!("t({u}) is the scalar boundary value"),
                tol,
                &t(u)?,
                &id.mapv(|z| z * scale),
                witness_u(c(u)),
            )
            .with_note("site normalizer taken as rho_v(u) = a(u) a(-u)".to_string());
            checks.push(ch);
        }
        // 3-4: t2 at 0 and -4
        let scale = qq * 3.5 * product_over_sites(chain, |th| fusion.rho_v_bar(-th));
        for (i, u) in [(3usize, 0.0), (4, -4.0)] {
            checks.push(check_with_ratio(
                format!("open.special.{i}"),
                format!("t2({u}) is the scalar boundary value"),
                tol,
                &t2(u)?,
                &id.mapv(|z| z * scale),
                witness_u(c(u)),
            ));
        }
        // 5-6: t2(-1/2) = 28/3 zz t(-1); t2(-7/2) = 28/3 zz t(-3)
        for (i, (ul, ur)) in [(5usize, (-0.5, -1.0)), (6, (-3.5, -3.0))] {
            checks.push(check_with_ratio(
                format!("open.special.{i}"),
                format!("t2({ul}) reduces to t({ur})"),
                tol,
                &t2(ul)?,
                &t(ur)?.mapv(|z| z * (zz * 28.0 / 3.0)),
                witness_u(c(ul)),
            ));
        }
        // 7-8: t3 at 0 and -4
        let scale = zz * qq * 896.0 * product_over_sites(chain, |th| fusion.rho_v_tilde(-th));
        for (i, u) in [(7usize, 0.0), (8, -4.0)] {
            checks.push(check_with_ratio(
                format!("open.special.{i}"),
                format!("t3({u}) is the scalar boundary value"),
                tol,
                &t3(u)?,
                &id.mapv(|z| z * scale),
                witness_u(c(u)),
            ));
        }
        // 9-10: t3(-1) and t3(-3) reduce to t2
        let denom = product_over_sites(chain, |th| (c(1.0) - th) * (c(1.0) + th));
        for (i, (ul, ur)) in [(9usize, (-1.0, -1.5)), (10, (-3.0, -2.5))] {
            checks.push(check_with_ratio(
                format!("open.special.{i}"),
                format!("t3({ul}) reduces to t2({ur})"),
                tol,
                &t3(ul)?,
                &t2(ur)?.mapv(|z| z * (zz * 16.0 / denom)),
                witness_u(c(ul)),
            ));
        }
        // 11-12: t3(-1/2) and t3(-7/2) reduce to t
        let denom = product_over_sites(chain, |th| (c(1.5) - th) * (c(1.5) + th));
        for (i, (ul, ur)) in [(11usize, (-0.5, -1.5)), (12, (-3.5, -2.5))] {
            checks.push(check_with_ratio(
                format!("open.special.{i}"),
                format!("t3({ul}) reduces to t({ur})"),
                tol,
                &t3(ul)?,
                &t(ur)?.mapv(|z| z * (qq * -28.0 / denom)),
                witness_u(c(ul)),
            ));
        }
    }

    Ok(checks)
}

fn boundary_tag(chain: &ChainSpec) -> &'static str {
    match chain.boundary {
        Boundary::Periodic => "periodic",
        Boundary::Open(_) => "open",
    }
}

fn kind_tag(kind: TransferKind) -> &'static str {
    match kind {
        TransferKind::Fundamental => "t",
        TransferKind::Bar => "t2",
        TransferKind::Tilde => "t3",
    }
}

fn expected_leading(transfer: &Transfer, kind: TransferKind) -> C64 {
    let chain = &transfer.chain;
    match &chain.boundary {
        Boundary::Periodic => match kind {
            TransferKind::Fundamental => c(2.0 * chain.n as f64),
            TransferKind::Bar => c(14.0),
            TransferKind::Tilde => c(14.0),
        },
        Boundary::Open(p) => {
            let combo = p.asym_combo();
            let cc = (C64::new(1.0, 0.0) + p.c1 * p.c2) * (C64::new(1.0, 0.0) + p.c1_t * p.c2_t);
            match kind {
                TransferKind::Fundamental => combo * c(-(chain.n as f64)),
                TransferKind::Bar => (combo * combo * 3.0 + cc * 2.0) * 4.0,
                TransferKind::Tilde => combo * (combo * combo + cc * 3.0) * -64.0,
            }
        }
    }
}

/// Monodromy-level relations on the doubled auxiliary space: exchange
/// relations with the appropriate R-matrix, fusion reductions at the
/// degenerate shifts, and projector absorption at the inhomogeneity
/// points. Desk scale: sites <= 2 (the heaviest pair only at one site).
pub fn verify_monodromy_relations(transfer: &Transfer, tol: f64, seed: u64) -> Result<Vec<Check>> {
    use rand::SeedableRng;
    let chain = &transfer.chain;
    if chain.n != 3 {
        return Err(crate::Error::Config("monodromy relation suite targets rank 3".into()));
    }
    if chain.sites > 2 {
        return Err(crate::Error::Config("monodromy relation suite runs at sites <= 2".into()));
    }
    let fusion = transfer.fusion().expect("fusion context required");
    let fam = transfer.family();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = crate::model::random_spectral_point(&mut rng);
    let v = crate::model::random_spectral_point(&mut rng);
    let mut checks: Vec<Check> = Vec::new();


    let site_positions: Vec<usize> = (0..chain.sites).map(|j| j + 2).collect();

    // doubled-aux monodromy: aux at ambient slot `aux_pos` in {0, 1}
    let doubled = |kind: TransferKind, u: C64, aux_pos: usize, other_aux: usize, reflecting: bool| -> Result<DenseOperator> {
        let aux = match kind {
            TransferKind::Fundamental => 6,
            _ => 14,
        };
        let mut spaces = vec![Space::new(0, if aux_pos == 0 { aux } else { other_aux })];
        spaces.push(Space::new(1, if aux_pos == 1 { aux } else { other_aux }));
        spaces.extend(site_positions.iter().map(|&p| Space::new(p as u32, 6)));
        let mut acc = DenseOperator::identity(spaces)?;
        let js: Vec<usize> =
            if reflecting { (0..chain.sites).rev().collect() } else { (0..chain.sites).collect() };
        for j in js {
            let arg = if reflecting { u + chain.theta[j] } else { u - chain.theta[j] };
            let raw = match kind {
                TransferKind::Fundamental => fam.r_matrix(arg),
                TransferKind::Bar => fusion.r_bar(arg),
                TransferKind::Tilde => fusion.r_tilde(arg),
            };
            acc = acc.mul_embed(&raw.view(), &[aux, 6], &[aux_pos, j + 2])?;
        }
        Ok(acc)
    };

    // exchange residual for R12 T1 T2 = T2 T1 R12, with the exchange
    // R-matrix bound to the two aux slots in the given slot order
    fn exchange_residual(
        r12: &Array2<C64>,
        r12_dims: &[usize],
        slot_order: &[usize],
        t1: &DenseOperator,
        t2: &DenseOperator,
    ) -> Result<f64> {
        let lhs = t1.matmul(t2)?.embed_mul(&r12.view(), r12_dims, slot_order)?;
        let rhs = t2.matmul(t1)?.mul_embed(&r12.view(), r12_dims, slot_order)?;
        Ok(rel_fro_diff(lhs.matrix(), rhs.matrix()))
    }

    // exchange relations R12 T1 T2 = T2 T1 R12 for the three aux pairs,
    // forward and reflecting
    for reflecting in [false, true] {
        let tag = if reflecting { "reflecting_" } else { "" };
        let t1 = doubled(TransferKind::Fundamental, u, 0, 6, reflecting)?;
        let t2 = doubled(TransferKind::Fundamental, v, 1, 6, reflecting)?;
        let res = exchange_residual(&fam.r_matrix(u - v), &[6, 6], &[0, 1], &t1, &t2)?;
        checks.push(Check::from_samples(
            format!("monodromy.{tag}exchange.fund_fund"),
            format!("{tag}monodromy exchange relation on the fundamental pair"),
            tol,
            [(res, crate::report::witness_uv(u, v))],
        ));
        // fundamental at slot 0, barred at slot 1; the exchange matrix is
        // the barred R with its slots bound in reverse
        let t1b = doubled(TransferKind::Fundamental, u, 0, 14, reflecting)?;
        let tb = doubled(TransferKind::Bar, v, 1, 6, reflecting)?;
        let res = exchange_residual(&fusion.r_bar(u - v), &[14, 6], &[1, 0], &t1b, &tb)?;
        checks.push(Check::from_samples(
            format!("monodromy.{tag}exchange.fund_bar"),
            format!("{tag}monodromy exchange relation on the fundamental/barred pair"),
            tol,
            [(res, crate::report::witness_uv(u, v))],
        ));
        if chain.sites == 1 {
            let tbar = doubled(TransferKind::Bar, u, 0, 14, reflecting)?;
            let ttil = doubled(TransferKind::Tilde, v, 1, 14, reflecting)?;
            let res =
                exchange_residual(&fusion.r_bar_tilde(u - v), &[14, 14], &[1, 0], &tbar, &ttil)?;
            checks.push(Check::from_samples(
                format!("monodromy.{tag}exchange.bar_tilde"),
                format!("{tag}monodromy exchange relation on the barred/triple-fused pair"),
                tol,
                [(res, crate::report::witness_uv(u, v))],
            ));
        }
    }

    // fusion reductions of monodromy products (forward and reflecting)
    for reflecting in [false, true] {
        let tag = if reflecting { "reflecting_" } else { "" };
        let sgn = if reflecting { -1.0 } else { 1.0 };
        // singlet: P1 T1(u) T2(u-4) P1 = prod_i a e * P1
        let t1 = doubled(TransferKind::Fundamental, u, 0, 6, reflecting)?;
        let t2 = doubled(TransferKind::Fundamental, u - 4.0, 1, 6, reflecting)?;
        let p1 = fusion.psi0.dot(&fusion.psi0.mapv(|z| z.conj()).reversed_axes());
        let prod = t1.matmul(&t2)?;
        let sandwiched = prod
            .embed_mul(&p1.view(), &[6, 6], &[0, 1])?
            .mul_embed(&p1.view(), &[6, 6], &[0, 1])?;
        let scale = product_over_sites(chain, |t| fam.a(u - sgn * t) * fam.e(u - sgn * t - 4.0));
        let p1_emb = {
            let mut spaces = vec![Space::new(0, 6), Space::new(1, 6)];
            spaces.extend(site_positions.iter().map(|&p| Space::new(p as u32, 6)));
            DenseOperator::new(vec![Space::new(90, 6), Space::new(91, 6)], p1.clone())?
                .embed(&[0, 1], &spaces)?
        };
        checks.push(Check::from_samples(
            format!("monodromy.{tag}fusion.singlet"),
            format!("{tag}monodromy pair at shift -4 projects on the singlet"),
            tol,
            [(
                rel_fro_diff(sandwiched.matrix(), &p1_emb.matrix().mapv(|z| z * scale)),
                witness_u(u),
            )],
        ));
        // absorption at the first inhomogeneity point: T1 T2 = P1 T1 T2
        let x = if reflecting { -chain.theta[0] } else { chain.theta[0] };
        let a1 = doubled(TransferKind::Fundamental, x, 0, 6, reflecting)?;
        let a2 = doubled(TransferKind::Fundamental, x - 4.0, 1, 6, reflecting)?;
        let prod = a1.matmul(&a2)?;
        let projected = prod.embed_mul(&p1.view(), &[6, 6], &[0, 1])?;
        checks.push(Check::from_samples(
            format!("monodromy.{tag}absorb.singlet"),
            format!("{tag}monodromy pair at an inhomogeneity point is singlet-absorbed"),
            tol,
            [(rel_fro_diff(prod.matrix(), projected.matrix()), witness_u(x))],
        ));
        // 14-dim: compress(T1(u) T2(u-1)) = prod_i rho0~ * T_bar(u-1/2)
        let t2m1 = doubled(TransferKind::Fundamental, u - 1.0, 1, 6, reflecting)?;
        let prod = t1.matmul(&t2m1)?;
        let fused = prod.compress_leading(2, &fusion.psi14.view(), Space::new(70, 14))?;
        let scale = product_over_sites(chain, |t| fam.rho0_tilde(u - sgn * t));
        let tbar = if reflecting {
            transfer.reflecting_monodromy_dense(TransferKind::Bar, u - 0.5)?
        } else {
            transfer.monodromy_dense(TransferKind::Bar, u - 0.5)?
        };
        checks.push(Check::from_samples(
            format!("monodromy.{tag}fusion.pair14"),
            format!("{tag}monodromy pair at shift -1 compresses to the barred monodromy"),
            tol,
            [(
                rel_fro_diff(fused.matrix(), &tbar.matrix().mapv(|z| z * scale)),
                witness_u(u),
            )],
        ));
        // absorption for the 14-dim projector at an inhomogeneity point
        let b1 = doubled(TransferKind::Fundamental, x, 0, 6, reflecting)?;
        let b2 = doubled(TransferKind::Fundamental, x - 1.0, 1, 6, reflecting)?;
        let p14 = fusion.psi14.dot(&fusion.psi14.mapv(|z| z.conj()).reversed_axes());
        let prod = b1.matmul(&b2)?;
        let projected = prod.embed_mul(&p14.view(), &[6, 6], &[0, 1])?;
        checks.push(Check::from_samples(
            format!("monodromy.{tag}absorb.pair14"),
            format!("{tag}monodromy pair at shift -1 is 14-projector absorbed at inhomogeneity points"),
            tol,
            [(rel_fro_diff(prod.matrix(), projected.matrix()), witness_u(x))],
        ));
        // barred reduction: compress(T2(u) Tbar(u-7/2), psi6) = prod rho0~ T(u-3)
        let tfund_slot1 = doubled(TransferKind::Fundamental, u, 1, 14, reflecting)?;
        let tbar_slot0 = doubled(TransferKind::Bar, u - 3.5, 0, 6, reflecting)?;
        let prod = tfund_slot1.matmul(&tbar_slot0)?;
        let fused = prod.compress_leading(2, &fusion.psi6_bar.view(), Space::new(71, 6))?;
        let scale = product_over_sites(chain, |t| fam.rho0_tilde(u - sgn * t));
        let tf = if reflecting {
            transfer.reflecting_monodromy_dense(TransferKind::Fundamental, u - 3.0)?
        } else {
            transfer.monodromy_dense(TransferKind::Fundamental, u - 3.0)?
        };
        checks.push(Check::from_samples(
            format!("monodromy.{tag}fusion.bar_to_fund"),
            format!("{tag}barred pair at shift -7/2 compresses to the fundamental monodromy"),
            tol,
            [(rel_fro_diff(fused.matrix(), &tf.matrix().mapv(|z| z * scale)), witness_u(u))],
        ));
        // triple reduction: compress(T2(u) Ttilde(u-3), phi14_tilde) = prod (u -+ ti + 4) Tbar(u-5/2)
        let ttil_slot0 = doubled(TransferKind::Tilde, u - 3.0, 0, 6, reflecting)?;
        let prod = tfund_slot1.matmul(&ttil_slot0)?;
        let fused = prod.compress_leading(2, &fusion.phi14_tilde.view(), Space::new(72, 14))?;
        let scale = product_over_sites(chain, |t| u - sgn * t + 4.0);
        let tb = if reflecting {
            transfer.reflecting_monodromy_dense(TransferKind::Bar, u - 2.5)?
        } else {
            transfer.monodromy_dense(TransferKind::Bar, u - 2.5)?
        };
        checks.push(Check::from_samples(
            format!("monodromy.{tag}fusion.tilde_to_bar"),
            format!("{tag}triple-fused pair at shift -3 compresses to the barred monodromy"),
            tol,
            [(rel_fro_diff(fused.matrix(), &tb.matrix().mapv(|z| z * scale)), witness_u(u))],
        ));
    }

    // three-factor fusion at one site count: compress(T1(u) T2(u-1) T3(u-2), phi14)
    if chain.sites == 1 {
        let dims = [6usize, 6, 6, 6];
        let spaces: Vec<Space> = dims.iter().enumerate().map(|(i, &d)| Space::new(i as u32, d)).collect();
        for reflecting in [false, true] {
            let tag = if reflecting { "reflecting_" } else { "" };
            let sgn = if reflecting { -1.0 } else { 1.0 };
            let mut acc = DenseOperator::identity(spaces.clone())?;
            for (slot, shift) in [(0usize, 0.0), (1, -1.0), (2, -2.0)] {
                let arg = u + shift - sgn * chain.theta[0];
                acc = acc.mul_embed(&fam.r_matrix(arg).view(), &[6, 6], &[slot, 3])?;
            }
            let fused = acc.compress_leading(3, &fusion.phi14.view(), Space::new(73, 14))?;
            let scale = product_over_sites(chain, |t| {
                fam.rho0_tilde(u - sgn * t) * fam.rho0_tilde(u - sgn * t - 1.0) * (u - sgn * t + 1.0)
            });
            let ttil = if reflecting {
                transfer.reflecting_monodromy_dense(TransferKind::Tilde, u - 1.0)?
            } else {
                transfer.monodromy_dense(TransferKind::Tilde, u - 1.0)?
            };
            checks.push(Check::from_samples(
                format!("monodromy.{tag}fusion.triple"),
                format!("{tag}three-factor product compresses to the triple-fused monodromy"),
                tol,
                [(rel_fro_diff(fused.matrix(), &ttil.matrix().mapv(|z| z * scale)), witness_u(u))],
            ));
        }
    }

    let _ = cjson(v);
    Ok(checks)
}
