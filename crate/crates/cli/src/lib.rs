//! Manifest-driven batch runner over `rigidlab-core`.

pub mod manifest;
pub mod run;

use std::path::Path;

pub use manifest::{parse_manifest, parse_manifest_in, ExperimentManifest, ManifestError};
pub use run::{run_experiment, OracleMode, Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", render_errors(.0))]
    Manifest(Vec<ManifestError>),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] rigidlab_core::Error),
}

fn render_errors(errs: &[ManifestError]) -> String {
    errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(rigidlab_core::Error::Resource(_)) => 4,
            _ => 3,
        }
    }
}

/// Reads a manifest file; table paths resolve against its directory.
pub fn load_manifest(path: &Path) -> Result<ExperimentManifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_manifest_in(&text, dir).map_err(CliError::Manifest)
}

/// Manifest for the dyadic odometer and its Rudin-Shapiro extension:
/// rigidity along `2^n` on both (with the halving check), the residual
/// table, and the cocycle verification.
pub const DEMO_MANIFEST: &str = "\
# dyadic odometer, Rudin-Shapiro extension over Z_2
[system]
kind = adic
radices = 2
depth = 24

[extension]
cocycle = RUDIN_SHAPIRO
fiber = 2

[sequence]
name = pow2
kind = explicit
values = 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536

[sequence]
name = pow2_late
kind = explicit
values = 256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536

[analysis]
type = rigidity
sequence = pow2
depths = 1..4
tol = 1/100
halving_tol = 1/100

[analysis]
type = verify-theorem
sequence = pow2_late
depth = 4
tol = 1/50

[analysis]
type = verify-cocycles
k_max = 65536
";
