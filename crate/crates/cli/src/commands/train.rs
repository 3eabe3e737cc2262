use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use relaxround::dataset::Dataset;
use relaxround::proxy::{
    train_proxy, train_proxy_warm, Checkpoint, LossKind, ProxyArch, TrainConfig,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchArg {
    /// Entry-wise affine head
    Aff,
    /// Concave head (nonnegative weights over rectified latents)
    Con,
    /// Higher-order multiplicative architecture
    Higher,
}

impl From<ArchArg> for ProxyArch {
    fn from(a: ArchArg) -> ProxyArch {
        match a {
            ArchArg::Aff => ProxyArch::Aff,
            ArchArg::Con => ProxyArch::Con,
            ArchArg::Higher => ProxyArch::Higher,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Squared,
    Huber,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Dataset directory written by the `dataset` command
    #[arg(long)]
    dataset: PathBuf,
    /// Architecture (required unless resuming)
    #[arg(long, value_enum)]
    arch: Option<ArchArg>,
    /// Continue training the model in this checkpoint; its normalization is kept
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long, default_value_t = 4000)]
    steps: usize,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 1e-2)]
    step_size: f64,
    /// Latent width of the proxy
    #[arg(long, default_value_t = 8)]
    width: usize,
    /// One-hidden-layer rectified feature maps instead of linear ones
    #[arg(long)]
    rectified: bool,
    /// Hidden units of the rectified feature maps
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    /// Drop the nonnegativity projection of the concave head (surrenders the
    /// rounding guarantee)
    #[arg(long)]
    no_projection: bool,
    /// Train on raw attribute and label scales
    #[arg(long)]
    no_standardize: bool,
    /// Skip the per-dimension attribute products when lifting edge variables
    #[arg(long)]
    no_lift_products: bool,
    #[arg(long, value_enum, default_value_t = LossArg::Squared)]
    loss: LossArg,
    #[arg(long, default_value_t = 1.0)]
    huber_delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint path (default: $RELAXROUND_OUT_DIR/checkpoint.json)
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: TrainArgs) -> anyhow::Result<u8> {
    let dataset = Dataset::load_dir(&args.dataset)
        .with_context(|| format!("loading dataset from {}", args.dataset.display()))?;
    let config = TrainConfig {
        loss: match args.loss {
            LossArg::Squared => LossKind::Squared,
            LossArg::Huber => LossKind::Huber { delta: args.huber_delta },
        },
        step_size: args.step_size,
        steps: args.steps,
        batch: args.batch,
        seed: args.seed,
        projection: !args.no_projection,
        width: args.width,
        rectified: args.rectified,
        hidden: args.hidden,
        standardize: !args.no_standardize,
        lift_products: !args.no_lift_products,
    };

    let (arch, model, report) = match &args.resume {
        Some(path) => {
            let cp = Checkpoint::load(path)
                .with_context(|| format!("loading checkpoint {}", path.display()))?;
            if let Some(a) = args.arch {
                if ProxyArch::from(a) != cp.arch {
                    bail!("--arch disagrees with the checkpoint's architecture");
                }
            }
            let arch = cp.arch;
            let (model, report) =
                train_proxy_warm(cp.model, &dataset, &config).context("resuming training")?;
            (arch, model, report)
        }
        None => {
            let Some(a) = args.arch else {
                bail!("--arch is required when not resuming");
            };
            let arch = ProxyArch::from(a);
            let (model, report) =
                train_proxy(&dataset, arch, &config).context("training")?;
            (arch, model, report)
        }
    };

    let path = args.out.unwrap_or_else(|| super::default_out_dir().join("checkpoint.json"));
    Checkpoint::new(arch, model, config)
        .save(&path)
        .with_context(|| format!("writing checkpoint {}", path.display()))?;
    println!(
        "trained {arch:?} proxy on {} samples over {} steps",
        dataset.len(),
        args.steps
    );
    println!(
        "loss first {} final {}",
        report.loss_curve.first().copied().unwrap_or(report.final_loss),
        report.final_loss
    );
    println!("checkpoint {}", path.display());
    Ok(0)
}
