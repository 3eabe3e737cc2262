pub mod bench;
pub mod dataset;
pub mod solve;
pub mod train;

use std::path::PathBuf;

/// Directory outputs land in when no `--out` is given: `$RELAXROUND_OUT_DIR`,
/// falling back to the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("RELAXROUND_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
