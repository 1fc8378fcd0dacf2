use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;

use liftgraph::eval::MethodSpec;
use liftgraph::solver::SolverOptions;
use liftgraph::superpixel::SlicParams;

use crate::error::{CliError, CliResult};

/// Flags shared by every subcommand. Any value can also come from the
/// `--config` file (same keys, `snake_case`); explicit flags win.
#[derive(Debug, Args, Default)]
pub struct StageArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem family: cartoon | scribble | stereo.
    #[arg(long)]
    pub task: Option<String>,
    /// Input image (PNG or binary PGM/PPM). Left image for stereo.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Right image of a stereo pair.
    #[arg(long)]
    pub right: Option<PathBuf>,
    /// Scribble mask image: 0 = unmarked, value v = class v − 1.
    #[arg(long)]
    pub scribbles: Option<PathBuf>,
    /// Number of labels (cartoon palette size).
    #[arg(long)]
    pub labels: Option<usize>,
    /// Maximum disparity for stereo; the label count is dmax + 1.
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Graph construction: grid | slic | l0cp.
    #[arg(long)]
    pub method: Option<String>,
    /// Block side length for method=grid.
    #[arg(long)]
    pub factor: Option<usize>,
    /// Cluster count for method=slic.
    #[arg(long)]
    pub k: Option<usize>,
    /// Spatial compactness for method=slic.
    #[arg(long)]
    pub compactness: Option<f64>,
    /// Per-edge cut penalty for method=l0cp.
    #[arg(long = "alpha-c")]
    pub alpha_c: Option<f64>,
    /// Boundary-length weight of the energy.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Solver iteration cap.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Solver relative-gap tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Thread policy, recorded for reproducibility (execution is
    /// sequential either way).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for the seeded constructions (palette initialization).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for all artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Partition file for `solve`; defaults to the full pixel grid.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Precomputed potentials (.lpot) replacing the task model.
    #[arg(long)]
    pub unaries: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Cartoon,
    Scribble,
    Stereo,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Cartoon => "cartoon",
            Task::Scribble => "scribble",
            Task::Stereo => "stereo",
        }
    }
}

impl FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cartoon" => Ok(Task::Cartoon),
            "scribble" => Ok(Task::Scribble),
            "stereo" => Ok(Task::Stereo),
            other => Err(format!(
                "unknown task '{other}' (expected cartoon, scribble, or stereo)"
            )),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid,
    Slic,
    L0cp,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grid" => Ok(Method::Grid),
            "slic" => Ok(Method::Slic),
            "l0cp" => Ok(Method::L0cp),
            other => Err(format!(
                "unknown method '{other}' (expected grid, slic, or l0cp)"
            )),
        }
    }
}

/// Fully resolved settings: defaults, then config file, then flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub task: Option<Task>,
    pub input: Option<PathBuf>,
    pub right: Option<PathBuf>,
    pub scribbles: Option<PathBuf>,
    pub labels: Option<usize>,
    pub dmax: Option<usize>,
    pub method: Method,
    pub factor: usize,
    pub k: usize,
    pub compactness: f64,
    pub alpha_c: f64,
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub threads: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub partition: Option<PathBuf>,
    pub unaries: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            task: None,
            input: None,
            right: None,
            scribbles: None,
            labels: None,
            dmax: None,
            method: Method::L0cp,
            factor: 2,
            k: 256,
            compactness: 10.0,
            alpha_c: 0.1,
            lambda: 1.0,
            max_iters: 10_000,
            tol: 1e-5,
            threads: 1,
            seed: 0,
            out: None,
            partition: None,
            unaries: None,
        }
    }
}

/// Outer refinement rounds used by the pursuit construction.
pub const PURSUIT_ROUNDS: usize = 10;
/// Lloyd iterations used when fitting the cartoon palette.
pub const PALETTE_ITERS: usize = 20;
/// Matching window side for the stereo cost volume.
pub const STEREO_WINDOW: usize = 5;

impl Settings {
    /// Required-field accessors with config-class errors.
    pub fn task(&self) -> CliResult<Task> {
        self.task
            .ok_or_else(|| CliError::config("a task is required (cartoon, scribble, or stereo)"))
    }

    pub fn input(&self) -> CliResult<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::config("an input image is required"))
    }

    pub fn out(&self) -> CliResult<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::config("an output directory is required"))
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            max_iters: self.max_iters,
            tolerance: self.tol,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }

    pub fn method_spec(&self) -> MethodSpec {
        match self.method {
            Method::Grid => MethodSpec::Grid { factor: self.factor },
            Method::Slic => MethodSpec::Slic(SlicParams {
                k: self.k,
                compactness: self.compactness,
                ..SlicParams::default()
            }),
            Method::L0cp => MethodSpec::L0cp {
                alpha_c: self.alpha_c,
                max_iters: PURSUIT_ROUNDS,
            },
        }
    }

    fn validate(&self) -> CliResult<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(CliError::config("lambda must be a finite non-negative number"));
        }
        if let Some(task) = self.task {
            match task {
                Task::Cartoon => {
                    if self.labels.is_none() && self.unaries.is_none() {
                        return Err(CliError::config(
                            "the cartoon task needs `labels` (palette size)",
                        ));
                    }
                }
                Task::Scribble => {
                    if self.scribbles.is_none() {
                        return Err(CliError::config(
                            "the scribble task needs a `scribbles` mask image",
                        ));
                    }
                }
                Task::Stereo => {
                    if self.right.is_none() {
                        return Err(CliError::config("the stereo task needs a `right` image"));
                    }
                    if self.dmax.is_none() && self.unaries.is_none() {
                        return Err(CliError::config("the stereo task needs `dmax`"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_value<T>(key: &str, value: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("bad value for `{key}`: {e}")))
}

/// Parses the flat `key = value` config format: one pair per line,
/// `#` comments, blank lines ignored.
fn parse_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!(
                "config line {} is not `key = value`: {line:?}",
                number + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolves settings with precedence: defaults < config file < flags.
pub fn resolve(args: &StageArgs) -> CliResult<Settings> {
    let mut settings = Settings::default();
    if let Some(config_path) = &args.config {
        let map = parse_config_file(config_path)?;
        for (key, value) in &map {
            match key.as_str() {
                "task" => settings.task = Some(parse_value(key, value)?),
                "input" => settings.input = Some(PathBuf::from(value)),
                "right" => settings.right = Some(PathBuf::from(value)),
                "scribbles" => settings.scribbles = Some(PathBuf::from(value)),
                "labels" => settings.labels = Some(parse_value(key, value)?),
                "dmax" => settings.dmax = Some(parse_value(key, value)?),
                "method" => settings.method = parse_value(key, value)?,
                "factor" => settings.factor = parse_value(key, value)?,
                "k" => settings.k = parse_value(key, value)?,
                "compactness" => settings.compactness = parse_value(key, value)?,
                "alpha_c" => settings.alpha_c = parse_value(key, value)?,
                "lambda" => settings.lambda = parse_value(key, value)?,
                "max_iters" => settings.max_iters = parse_value(key, value)?,
                "tol" => settings.tol = parse_value(key, value)?,
                "threads" => settings.threads = parse_value(key, value)?,
                "seed" => settings.seed = parse_value(key, value)?,
                "out" => settings.out = Some(PathBuf::from(value)),
                "partition" => settings.partition = Some(PathBuf::from(value)),
                "unaries" => settings.unaries = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::config(format!("unknown config key `{other}`")));
                }
            }
        }
    }

    if let Some(task) = &args.task {
        settings.task = Some(
            task.parse()
                .map_err(|e: String| CliError::config(e))?,
        );
    }
    if let Some(method) = &args.method {
        settings.method = method
            .parse()
            .map_err(|e: String| CliError::config(e))?;
    }
    macro_rules! override_with {
        ($($field:ident),*) => {
            $(if let Some(v) = &args.$field { settings.$field = Some(v.clone()); })*
        };
    }
    override_with!(input, right, scribbles, out, partition, unaries);
    if let Some(v) = args.labels {
        settings.labels = Some(v);
    }
    if let Some(v) = args.dmax {
        settings.dmax = Some(v);
    }
    if let Some(v) = args.factor {
        settings.factor = v;
    }
    if let Some(v) = args.k {
        settings.k = v;
    }
    if let Some(v) = args.compactness {
        settings.compactness = v;
    }
    if let Some(v) = args.alpha_c {
        settings.alpha_c = v;
    }
    if let Some(v) = args.lambda {
        settings.lambda = v;
    }
    if let Some(v) = args.max_iters {
        settings.max_iters = v;
    }
    if let Some(v) = args.tol {
        settings.tol = v;
    }
    if let Some(v) = args.threads {
        settings.threads = v;
    }
    if let Some(v) = args.seed {
        settings.seed = v;
    }

    settings.validate()?;
    Ok(settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(content: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        let mut file = std::fs::File::create(&path).unwrap();
        file.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn config_file_fills_fields_and_flags_win() {
        let (_dir, path) = write_config(
            "# experiment\ntask = cartoon\ninput = in.png\nlabels = 4\n\
             lambda = 0.25\nmethod = grid\nfactor = 3\nout = results\n",
        );
        let args = StageArgs {
            config: Some(path),
            lambda: Some(0.5),
            ..StageArgs::default()
        };
        let settings = resolve(&args).unwrap();
        assert_eq!(settings.task.unwrap(), Task::Cartoon);
        assert_eq!(settings.labels, Some(4));
        assert_eq!(settings.method, Method::Grid);
        assert_eq!(settings.factor, 3);
        assert_eq!(settings.lambda, 0.5, "the flag must beat the file");
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let (_dir, path) = write_config("probably = wrong\n");
        let args = StageArgs { config: Some(path), ..StageArgs::default() };
        assert_eq!(resolve(&args).unwrap_err().exit_code(), 2);

        let (_dir2, path2) = write_config("labels = many\n");
        let args = StageArgs { config: Some(path2), ..StageArgs::default() };
        assert_eq!(resolve(&args).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn task_consistency_is_enforced() {
        let args = StageArgs {
            task: Some("stereo".into()),
            dmax: Some(8),
            ..StageArgs::default()
        };
        let err = resolve(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("right"));

        let args = StageArgs { task: Some("cartoon".into()), ..StageArgs::default() };
        assert!(resolve(&args).unwrap_err().to_string().contains("labels"));
    }

    #[test]
    fn missing_config_file_is_an_io_error() {
        let args = StageArgs {
            config: Some(PathBuf::from("/definitely/not/here.conf")),
            ..StageArgs::default()
        };
        assert_eq!(resolve(&args).unwrap_err().exit_code(), 3);
    }
}
