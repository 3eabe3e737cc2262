use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use relaxround::dataset::{sample_dataset, DatasetConfig, Family};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Single-edge instances labeled by the two-variable benchmark cost
    Toy,
    /// Grid instances labeled by the covering weight rule
    Covering,
    /// Grid instances labeled by the matching weight rule
    Matching,
    /// Queries of one hidden random cost table
    Table,
}

#[derive(Args)]
pub struct DatasetArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Grid rows (covering/matching families)
    #[arg(long, default_value_t = 3)]
    rows: usize,
    /// Grid columns (covering/matching families)
    #[arg(long, default_value_t = 3)]
    cols: usize,
    /// Largest integer node attribute (covering/matching families)
    #[arg(long, default_value_t = 100)]
    attr_max: u32,
    /// Largest configuration value (toy family)
    #[arg(long, default_value_t = 60.0)]
    config_max: f64,
    /// Variable count of the hidden table (table family)
    #[arg(long, default_value_t = 6)]
    arity: usize,
    /// Number of labeled samples to draw
    #[arg(long, default_value_t = 256)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (default: $RELAXROUND_OUT_DIR/dataset)
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: DatasetArgs) -> anyhow::Result<u8> {
    let family = match args.family {
        FamilyArg::Toy => Family::Toy { config_max: args.config_max },
        FamilyArg::Covering => {
            Family::Covering { rows: args.rows, cols: args.cols, attr_max: args.attr_max }
        }
        FamilyArg::Matching => {
            Family::Matching { rows: args.rows, cols: args.cols, attr_max: args.attr_max }
        }
        FamilyArg::Table => Family::Table { arity: args.arity },
    };
    let config = DatasetConfig { family, count: args.count, seed: args.seed };
    let dataset = sample_dataset(&config).context("sampling dataset")?;
    let dir = args.out.unwrap_or_else(|| super::default_out_dir().join("dataset"));
    dataset
        .save_dir(&dir)
        .with_context(|| format!("writing dataset to {}", dir.display()))?;
    println!("dataset {} samples -> {}", dataset.len(), dir.display());
    Ok(0)
}
