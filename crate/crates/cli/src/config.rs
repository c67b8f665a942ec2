//! Run configuration: built-in defaults, then the TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

macro_rules! section {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[arg(allow_negative_numbers = true)]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Fields set in `over` win.
            pub fn merge(self, over: Self) -> Self {
                Self { $($field: over.$field.or(self.$field),)* }
            }
        }
    };
}

section!(GridSection {
    /// Spatial points
    #[arg(long)]
    nx: usize,
    /// Time levels, including t = 0
    #[arg(long)]
    nt: usize,
    /// Right end of the spatial window (whole-line runs use [-x_max, x_max))
    #[arg(long = "x-max")]
    x_max: f64,
});

section!(PhysicsSection {
    /// Half-width L of the interval or box
    #[arg(long = "L")]
    #[serde(rename = "L")]
    big_l: f64,
    /// Horizon T
    #[arg(long = "T")]
    #[serde(rename = "T")]
    horizon: f64,
    /// Observation half-window l
    #[arg(long = "l")]
    l: f64,
    /// Carleman parameter s (defaults to twice the positivity threshold)
    #[arg(long)]
    s: f64,
    #[arg(long)]
    epsilon: f64,
    /// Target weight e^{-2 beta x}
    #[arg(long)]
    beta: f64,
    /// Plateau width of the steering cutoff
    #[arg(long)]
    tau: f64,
    /// Control window [t1, t2]
    #[arg(long)]
    t1: f64,
    #[arg(long)]
    t2: f64,
    /// Mode parameters, strictly decreasing
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    a: Vec<f64>,
    /// Largest Fourier mode
    #[arg(long = "n-max")]
    n_max: usize,
    /// Coefficient decay exponent of random periodic data
    #[arg(long)]
    decay: f64,
});

section!(DataSection {
    /// Scale of the initial datum (or of the HUM forcing)
    #[arg(long)]
    amplitude: f64,
    #[arg(long)]
    center: f64,
    #[arg(long)]
    width: f64,
    /// Peak of the Dirichlet datum h
    #[arg(long = "h-amp")]
    h_amp: f64,
    /// Peak of the Neumann datum g
    #[arg(long = "g-amp")]
    g_amp: f64,
});

section!(SolverSection {
    #[arg(long)]
    tol: f64,
    #[arg(long = "max-iter")]
    max_iter: usize,
    /// Random draws for ensembles
    #[arg(long)]
    draws: usize,
    /// carleman: derived | printed; steer: backward | forward
    #[arg(long)]
    variant: String,
    /// observability: analytic | quadrature
    #[arg(long)]
    route: String,
});

section!(RunSection {
    #[arg(long)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
});

/// Every section of a run, as flags or as a parsed file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[command(flatten)]
    pub grid: GridSection,
    #[command(flatten)]
    pub physics: PhysicsSection,
    #[command(flatten)]
    pub data: DataSection,
    #[command(flatten)]
    pub solver: SolverSection,
    #[command(flatten)]
    pub run: RunSection,
}

impl RunConfig {
    pub fn merge(self, over: Self) -> Self {
        Self {
            grid: self.grid.merge(over.grid),
            physics: self.physics.merge(over.physics),
            data: self.data.merge(over.data),
            solver: self.solver.merge(over.solver),
            run: self.run.merge(over.run),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    physics: PhysicsSection,
    #[serde(default)]
    data: DataSection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    run: RunSection,
}

pub fn load(path: &Path, command: &str) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ConfigFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(c) = file.command {
        if c != command {
            bail!("{} is a `{c}` config but the command is `{command}`", path.display());
        }
    }
    Ok(RunConfig { grid: file.grid, physics: file.physics, data: file.data, solver: file.solver, run: file.run })
}

/// Pull a field that the command's defaults always fill.
pub fn need<T: Clone>(v: &Option<T>, key: &str) -> anyhow::Result<T> {
    v.clone().with_context(|| format!("missing configuration value `{key}`"))
}
