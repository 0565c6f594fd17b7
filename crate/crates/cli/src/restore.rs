//! `quatkrylov restore-image`: degrade and restore color images.

use crate::common::{
    check_readable, exit_code_for, maybe_write_log, print_report, LambdaFlag, StoppingArgs,
};
use anyhow::{bail, Context, Result};
use quatkrylov_core::imaging::{
    add_gaussian_noise, build_blur_operator, image_to_qvec, psnr, qvec_to_image, snr, ssim,
    BlurKind, BlurModel, Boundary, ColorImage,
};
use quatkrylov_core::io::{ConfigEcho, MetricBlock, RunLog};
use quatkrylov_core::krylov::{fqgmres, jacobi_sqrt_residual, SolveReport};
use quatkrylov_core::tv::{
    qtv_fqgmres, qtv_fqgmres_improved, DifferenceStack, LambdaRule, QtvConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RestoreSolver {
    #[value(name = "qtv-fqgmres-improved")]
    QtvFqgmresImproved,
    #[value(name = "qtv-fqgmres")]
    QtvFqgmres,
    Fqgmres,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BoundaryFlag {
    Zero,
    Periodic,
    Reflexive,
}

#[derive(clap::Args, Debug)]
pub struct RestoreArgs {
    /// Reference image (PNG); degraded internally unless --observed is given.
    #[arg(long)]
    pub input: PathBuf,
    /// Pre-degraded observation (PNG); skips the simulated degradation.
    #[arg(long)]
    pub observed: Option<PathBuf>,
    /// Gaussian PSF side (odd).
    #[arg(long, default_value_t = 3)]
    pub blur_size: usize,
    /// Gaussian PSF standard deviation.
    #[arg(long, default_value_t = 0.8)]
    pub blur_sigma: f64,
    #[arg(long, value_enum, default_value_t = BoundaryFlag::Periodic)]
    pub boundary: BoundaryFlag,
    /// Noise standard deviation on the unit scale (30/255 by default).
    #[arg(long, default_value_t = 30.0 / 255.0)]
    pub noise: f64,
    /// Noise seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Regularization parameter: a float or `auto` (discrepancy principle
    /// from --noise).
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaFlag,
    /// Weight smoothing floor.
    #[arg(long, default_value_t = 1e-8)]
    pub eps_irn: f64,
    #[arg(long, value_enum, default_value_t = RestoreSolver::QtvFqgmresImproved)]
    pub solver: RestoreSolver,
    #[command(flatten)]
    pub stopping: StoppingArgs,
    /// Restored image output (PNG).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the observed (degraded) image here.
    #[arg(long)]
    pub observed_out: Option<PathBuf>,
    /// Write a JSON run log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

pub fn run(mut args: RestoreArgs) -> Result<ExitCode> {
    // Image stopping defaults are tighter than the generic solver defaults.
    if args.stopping.max_iter == 500 {
        args.stopping.max_iter = 150;
    }
    if args.stopping.restart.is_none() {
        args.stopping.restart = Some(30);
    }

    check_readable(&args.input)?;
    let reference = ColorImage::read_png(&args.input).context("reading --input")?;
    let (h, w) = (reference.height(), reference.width());
    if h != w {
        bail!("restoration expects a square image, got {h}x{w}");
    }
    let model = BlurModel {
        kind: BlurKind::Gaussian,
        size: args.blur_size,
        sigma: args.blur_sigma,
        boundary: match args.boundary {
            BoundaryFlag::Zero => Boundary::Zero,
            BoundaryFlag::Periodic => Boundary::Periodic,
            BoundaryFlag::Reflexive => Boundary::Reflexive,
        },
    };
    let a = build_blur_operator(&model, h, w)?;

    let b = match &args.observed {
        Some(path) => {
            check_readable(path)?;
            let obs = ColorImage::read_png(path).context("reading --observed")?;
            if obs.height() != h || obs.width() != w {
                bail!("observed image size differs from the reference");
            }
            image_to_qvec(&obs)
        }
        None => {
            let blurred = a.matvec(&image_to_qvec(&reference))?;
            add_gaussian_noise(&blurred, args.noise, args.seed)?
        }
    };
    let observed_img = qvec_to_image(&b, h, w)?;
    if let Some(path) = &args.observed_out {
        observed_img
            .write_png(path)
            .context("writing --observed-out")?;
    }

    let lambda_rule = match args.lambda {
        LambdaFlag::Fixed(l) => LambdaRule::Fixed(l),
        LambdaFlag::Auto => {
            if !(args.noise > 0.0) {
                bail!("--lambda auto needs a positive --noise level");
            }
            LambdaRule::Discrepancy {
                target_residual: args.noise * (3.0 * (h * w) as f64).sqrt(),
            }
        }
    };
    let cfg = QtvConfig {
        lambda: lambda_rule,
        eps_irn: args.eps_irn,
        inner: args.stopping.to_config(),
        ..Default::default()
    };

    let stack = DifferenceStack::image(h)?;
    let (name, report): (&str, SolveReport) = match args.solver {
        RestoreSolver::QtvFqgmresImproved => (
            "qtv-fqgmres-improved",
            qtv_fqgmres_improved(&a, &b, &stack, &cfg)?,
        ),
        RestoreSolver::QtvFqgmres => ("qtv-fqgmres", qtv_fqgmres(&a, &b, &stack, &cfg)?),
        RestoreSolver::Fqgmres => (
            "fqgmres",
            fqgmres(&a, &b, None, &jacobi_sqrt_residual(), &cfg.inner)?,
        ),
    };
    let restored = qvec_to_image(&report.x, h, w)?;
    restored.write_png(&args.out).context("writing --out")?;
    print_report(name, &report);

    let metrics = MetricBlock {
        psnr: psnr(&reference, &restored)?,
        snr: snr(&reference, &restored)?,
        ssim: ssim(&reference, &restored)?,
    };
    println!(
        "observed : PSNR {:.4} dB  SNR {:.4} dB  SSIM {:.4}",
        psnr(&reference, &observed_img)?,
        snr(&reference, &observed_img)?,
        ssim(&reference, &observed_img)?
    );
    println!(
        "restored : PSNR {:.4} dB  SNR {:.4} dB  SSIM {:.4}",
        metrics.psnr, metrics.snr, metrics.ssim
    );

    let mut log = RunLog::from_report(
        name,
        ConfigEcho {
            tol: cfg.inner.tol,
            max_iter: cfg.inner.max_iter,
            restart: cfg.inner.restart,
            precond: None,
            lambda: match args.lambda {
                LambdaFlag::Fixed(l) => Some(l),
                LambdaFlag::Auto => None,
            },
            eps_irn: Some(args.eps_irn),
            seed: Some(args.seed),
        },
        &report,
    );
    log.metrics = Some(metrics);
    maybe_write_log(&log, args.log.as_ref())?;
    Ok(exit_code_for(&report))
}
