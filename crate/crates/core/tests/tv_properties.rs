//! Model-level properties of the TV machinery: norm equivalences, IRN
//! descent, null-space hygiene, and the reduced-problem identity.

use quatkrylov_core::imaging::{
    add_gaussian_noise, build_blur_operator, image_to_qvec, stock_image, BlurModel, StockImage,
};
use quatkrylov_core::instances::random_quaternion;
use quatkrylov_core::krylov::{arnoldi, PrecondSide, SolverConfig};
use quatkrylov_core::linalg::dense;
use quatkrylov_core::realrep::{deinterleave_vec, interleave_vec, interleaved_counterpart};
use quatkrylov_core::tv::{
    build_weights, ctv_norm, gradient_tensor, mgs_qr, qtv, qtv_fqgmres_improved, solve_reduced,
    DifferenceStack, IrnWeights, LambdaRule, QtvConfig,
};
use quatkrylov_core::{QMatrix, QVector, Quaternion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_image_vector(rng: &mut ChaCha8Rng, n: usize) -> QVector {
    QVector::from_fn(n * n, |_| random_quaternion(rng))
}

#[test]
fn collaborative_221_norm_equals_total_variation() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for n in [4usize, 8, 16] {
        let stack = DifferenceStack::image(n).unwrap();
        for _ in 0..20 {
            let x = random_image_vector(&mut rng, n);
            let tensor = gradient_tensor(&stack, &x).unwrap();
            let c = ctv_norm(&tensor, 2.0, 2.0, 1.0).unwrap();
            let tv = qtv(&x, n).unwrap();
            assert!((c - tv).abs() <= 1e-10 * tv, "n {n}: {c} vs {tv}");
        }
    }
}

#[test]
fn reweighted_quadratic_reproduces_tv() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let n = 12;
    let stack = DifferenceStack::image(n).unwrap();
    for _ in 0..20 {
        let x = random_image_vector(&mut rng, n);
        let mags = stack.gradient_magnitudes(&x).unwrap();
        assert!(mags.iter().all(|&g| g >= 1e-3), "degenerate draw");
        let w = build_weights(&x, &stack, 1e-8).unwrap();
        let quad = w.reweighted_norm_sq(&stack, &x).unwrap();
        let tv = stack.total_variation(&x).unwrap();
        assert!((quad - tv).abs() / tv <= 1e-4, "{quad} vs {tv}");
    }
}

#[test]
fn irn_objective_descends_across_sweeps() {
    // Well-conditioned restoration problem; the penalized objective
    // ||Ax - b||^2 + lambda qtv(x) may not increase across outer sweeps
    // beyond the inexact-solve slack.
    let n = 16;
    let model = BlurModel {
        size: 3,
        sigma: 0.8,
        ..Default::default()
    };
    let a = build_blur_operator(&model, n, n).unwrap();
    let clean = stock_image(StockImage::Blocks, n);
    let b = add_gaussian_noise(&a.matvec(&image_to_qvec(&clean)).unwrap(), 0.05, 9).unwrap();
    let stack = DifferenceStack::image(n).unwrap();
    let lambda = 5e-2;

    let objective = |x: &QVector| -> f64 {
        let r = b.sub(&a.matvec(x).unwrap()).unwrap().norm2();
        r * r + lambda * stack.total_variation(x).unwrap()
    };

    // One report per sweep count: each run extends the previous Krylov space,
    // so consecutive iterates play the role of successive IRN sweeps.
    let mut values = Vec::new();
    for sweeps in [4usize, 8, 12, 16, 20] {
        let cfg = QtvConfig {
            lambda: LambdaRule::Fixed(lambda),
            inner: SolverConfig {
                tol: 1e-10,
                max_iter: sweeps,
                ..Default::default()
            },
            ..Default::default()
        };
        let rep = qtv_fqgmres_improved(&a, &b, &stack, &cfg).unwrap();
        values.push(objective(&rep.x));
    }
    for w in values.windows(2) {
        assert!(
            w[1] <= w[0] * (1.0 + 1e-8),
            "objective rose: {} -> {}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn difference_stack_annihilates_constants_and_restoration_keeps_mean() {
    let n = 12;
    let stack = DifferenceStack::image(n).unwrap();
    let constant = QVector::from_fn(n * n, |_| Quaternion::pure(0.3, 0.5, 0.7));
    assert_eq!(stack.apply(&constant).unwrap().norm2(), 0.0);

    // Restored images keep the mean intensity of the data-consistent
    // component: compare per-channel means against the unregularized
    // (lambda -> 0) baseline within the noise scale.
    let model = BlurModel {
        size: 3,
        sigma: 0.8,
        ..Default::default()
    };
    let a = build_blur_operator(&model, n, n).unwrap();
    let clean = stock_image(StockImage::Blobs, n);
    let noise = 0.02;
    let b = add_gaussian_noise(&a.matvec(&image_to_qvec(&clean)).unwrap(), noise, 4).unwrap();
    let cfg = QtvConfig {
        lambda: LambdaRule::Fixed(1e-2),
        inner: SolverConfig {
            tol: 1e-8,
            max_iter: 30,
            ..Default::default()
        },
        ..Default::default()
    };
    let reg = qtv_fqgmres_improved(&a, &b, &stack, &cfg).unwrap();
    let base_cfg = QtvConfig {
        lambda: LambdaRule::Fixed(0.0),
        inner: SolverConfig {
            tol: 1e-8,
            max_iter: 30,
            ..Default::default()
        },
        ..Default::default()
    };
    let base = qtv_fqgmres_improved(&a, &b, &stack, &base_cfg).unwrap();
    for c in 1..4 {
        let mean_reg: f64 = reg.x.component(c).iter().sum::<f64>() / (n * n) as f64;
        let mean_base: f64 = base.x.component(c).iter().sum::<f64>() / (n * n) as f64;
        assert!(
            (mean_reg - mean_base).abs() <= noise,
            "channel {c}: {mean_reg} vs {mean_base}"
        );
    }
}

#[test]
fn reduced_problem_equivalence_with_triangular_factor() {
    // Minimizers of the direct stacked problem (with P V_m) and the
    // compressed one (with the triangular QR factor) coincide.
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    for trial in 0..5 {
        let n = 5;
        let big_n = n * n;
        let stack = DifferenceStack::image(n).unwrap();
        let a = QMatrix::from_fn(big_n, big_n, |i, j| {
            let q = random_quaternion(&mut rng).scale(0.2);
            if i == j {
                q + Quaternion::from_real(2.0)
            } else {
                q
            }
        });
        let b = QVector::from_fn(big_n, |_| random_quaternion(&mut rng));
        let m = 4 + (trial % 4);
        let dec = arnoldi(&a, &b, m, None, PrecondSide::None, 1e-300).unwrap();
        let hess = dec.hessenberg();
        let beta = dec.beta();
        let lambda = 10f64.powf(rng.random::<f64>() * 3.0 - 3.0);

        // Weighted stack from a random reference point.
        let xref = QVector::from_fn(big_n, |_| random_quaternion(&mut rng));
        let weights = build_weights(&xref, &stack, 1e-6).unwrap();
        let pv: Vec<QVector> = dec.basis()[..m]
            .iter()
            .map(|v| {
                let mut u = stack.apply(v).unwrap();
                weights.scale_stacked(&mut u);
                u
            })
            .collect();

        // Route 1: stack [H; sqrt(lambda) P V_m] explicitly.
        let rows = (m + 1) + stack.stacked_rows();
        let mut s = QMatrix::dense_zeros(rows, m);
        hess.for_each_entry(|i, j, q| s.set(i, j, q));
        for (j, col) in pv.iter().enumerate() {
            for i in 0..col.len() {
                s.set(m + 1 + i, j, col.get(i).scale(lambda.sqrt()));
            }
        }
        let mat = interleaved_counterpart(&s);
        let mut rhs = vec![0.0; mat.nrows()];
        rhs[0] = beta;
        let (sol, _) = dense::min_norm_least_squares(&mat, &rhs, 1e-13).unwrap();
        let y_direct = deinterleave_vec(&sol).unwrap();

        // Route 2: triangular compression.
        let (_, rfac) = mgs_qr(&pv).unwrap();
        let (y_compressed, _) = solve_reduced(&hess, &rfac, lambda, beta, None).unwrap();

        let diff = y_direct.sub(&y_compressed).unwrap().norm2();
        assert!(
            diff <= 1e-9 * y_direct.norm2().max(1.0),
            "trial {trial}: minimizers differ by {diff}"
        );
        let _ = interleave_vec(&y_direct);
    }
}

#[test]
fn weights_identity_matches_unit() {
    let w = IrnWeights::identity(10);
    assert!(w.values().iter().all(|&v| v == 1.0));
}

#[test]
fn restoration_reduces_total_variation_of_noisy_image() {
    // Piecewise-constant scene, blur and noise: the TV of the restored
    // image drops below the TV of the observation.
    let n = 16;
    let model = BlurModel {
        size: 3,
        sigma: 0.8,
        ..Default::default()
    };
    let a = build_blur_operator(&model, n, n).unwrap();
    let clean = stock_image(StockImage::Blocks, n);
    let sigma = 0.1;
    let b = add_gaussian_noise(&a.matvec(&image_to_qvec(&clean)).unwrap(), sigma, 11).unwrap();
    let stack = DifferenceStack::image(n).unwrap();
    let cfg = QtvConfig {
        lambda: LambdaRule::Discrepancy {
            target_residual: sigma * (3.0 * (n * n) as f64).sqrt(),
        },
        inner: SolverConfig {
            tol: 1e-6,
            max_iter: 60,
            restart: Some(20),
            ..Default::default()
        },
        ..Default::default()
    };
    let rep = qtv_fqgmres_improved(&a, &b, &stack, &cfg).unwrap();
    let tv_restored = stack.total_variation(&rep.x).unwrap();
    let tv_observed = stack.total_variation(&b).unwrap();
    assert!(
        tv_restored < tv_observed,
        "restored TV {tv_restored} vs observed {tv_observed}"
    );
}
