//! Command-line flags, `key=value` config files and their validation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fredholm_core::assembly::{DetOrder, GridSpec};
use fredholm_core::Complex64;

use crate::error::{CliError, CliResult};

pub const DEFAULT_L: f64 = 7.32;
pub const DEFAULT_DX: f64 = 0.03;
pub const DEFAULT_RATIO: f64 = 8.0;
/// A quarter of the sech kernel's decay rate `a = 1`.
pub const DEFAULT_GROWTH: f64 = 0.25;

/// Fredholm determinants of Birman-Schwinger kernels, with error bounds.
#[derive(Parser, Debug)]
#[command(name = "fredholm", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Determinant for each lambda.
    Det,
    /// Determinant at a fixed grid spacing for a list of half-widths L (--values).
    SweepL,
    /// Determinant at fixed L for a list of spacings (--values) or node counts (--nodes).
    SweepDx,
    /// Truncation and quadrature error bounds for a list of L (--values, default --L).
    Bounds,
    /// Closed-form Evans function of the sech soliton for each lambda.
    Evans,
}

/// Every option can also be given in the `--config` file as `key = value`;
/// flags win over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct Options {
    /// Kernel to use.
    #[arg(long, global = true, value_name = "NAME")]
    pub kernel: Option<String>,

    /// Spectral parameters, `re:im` pairs separated by commas.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LIST")]
    pub lambda: Option<String>,

    /// File with one `re:im` pair per line.
    #[arg(long = "lambda-file", global = true, value_name = "PATH")]
    pub lambda_file: Option<String>,

    /// Half-width of the truncated domain [-L, L].
    #[arg(long = "L", global = true, allow_hyphen_values = true, value_name = "REAL")]
    pub l: Option<String>,

    /// Uniform distance between quadrature nodes.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "REAL")]
    pub dx: Option<String>,

    /// Graded grid, `hmin=<r>[,growth=<r>][,ratio=<r>]`.
    #[arg(long, global = true, value_name = "SPEC")]
    pub graded: Option<String>,

    /// Coupling constant, `re:im`.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "COMPLEX")]
    pub z: Option<String>,

    /// 1 for det(I + zK), 2 for the regularised determinant.
    #[arg(long, global = true, value_name = "1|2")]
    pub p: Option<String>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,

    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Size of the worker pool.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<String>,

    /// Sweep values: L for sweep-l and bounds, dx (or graded hmin) for sweep-dx.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LIST")]
    pub values: Option<String>,

    /// Node counts for a uniform sweep-dx.
    #[arg(long, global = true, value_name = "LIST")]
    pub nodes: Option<String>,

    /// Grid family for sweep-dx.
    #[arg(long, global = true, value_name = "MODE")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelChoice {
    SechNls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Uniform,
    Graded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridChoice {
    Uniform { dx: f64 },
    Graded { h_min: f64, growth: f64, ratio: f64 },
}

impl GridChoice {
    pub fn spec(&self) -> GridSpec {
        match *self {
            GridChoice::Uniform { dx } => GridSpec::Uniform { node_spacing: dx },
            GridChoice::Graded { h_min, growth, ratio } => GridSpec::Graded {
                h_min,
                growth,
                ratio_max: ratio,
            },
        }
    }
}

/// Validated settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kernel: KernelChoice,
    pub lambdas: Vec<Complex64>,
    pub l: f64,
    pub grid: GridChoice,
    pub z: Complex64,
    pub order: DetOrder,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub values: Option<Vec<f64>>,
    pub nodes: Option<Vec<usize>>,
    pub mode: SweepMode,
}

const KEYS: [&str; 13] = [
    "kernel",
    "lambda",
    "lambda-file",
    "L",
    "dx",
    "graded",
    "z",
    "p",
    "out",
    "threads",
    "values",
    "nodes",
    "mode",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value, got {raw:?}", no + 1)))?;
        let key = key.trim().replace('_', "-");
        let key = if key.eq_ignore_ascii_case("l") {
            "L".to_string()
        } else {
            key
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!("config line {}: unknown key {key:?}", no + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn field<T>(name: &str, raw: &str, parsed: Option<T>) -> CliResult<T> {
    parsed.ok_or_else(|| CliError::usage(format!("invalid value for {name}: {raw:?}")))
}

fn parse_real(name: &str, raw: &str) -> CliResult<f64> {
    field(name, raw, raw.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
}

fn parse_positive(name: &str, raw: &str) -> CliResult<f64> {
    let v = parse_real(name, raw)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{name} must be positive, got {v}")))
    }
}

/// `re:im`, or a bare real number.
pub fn parse_complex(name: &str, raw: &str) -> CliResult<Complex64> {
    let s = raw.trim();
    let parsed = match s.split_once(':') {
        Some((re, im)) => re.trim().parse::<f64>().ok().zip(im.trim().parse::<f64>().ok()),
        None => s.parse::<f64>().ok().map(|re| (re, 0.0)),
    };
    let (re, im) = field(name, raw, parsed.filter(|(a, b)| a.is_finite() && b.is_finite()))?;
    Ok(Complex64::new(re, im))
}

fn parse_list<T>(name: &str, raw: &str, mut item: impl FnMut(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let out = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(&mut item)
        .collect::<CliResult<Vec<T>>>()?;
    if out.is_empty() {
        return Err(CliError::usage(format!("{name} needs at least one value")));
    }
    Ok(out)
}

fn read_lambda_file(path: &Path) -> CliResult<Vec<Complex64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read lambda-file {}: {e}", path.display())))?;
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_complex("lambda-file", l))
        .collect::<CliResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::usage(format!(
            "lambda-file {} lists no values",
            path.display()
        )));
    }
    Ok(values)
}

fn parse_graded(raw: &str) -> CliResult<GridChoice> {
    let mut h_min = None;
    let mut growth = DEFAULT_GROWTH;
    let mut ratio = DEFAULT_RATIO;
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("graded: expected key=value, got {part:?}")))?;
        match k.trim() {
            "hmin" | "h_min" => h_min = Some(parse_positive("graded.hmin", v)?),
            "growth" => {
                let g = parse_real("graded.growth", v)?;
                if g < 0.0 {
                    return Err(CliError::usage(format!("graded.growth must be >= 0, got {g}")));
                }
                growth = g;
            }
            "ratio" => {
                ratio = parse_real("graded.ratio", v)?;
                if ratio < 1.0 {
                    return Err(CliError::usage(format!("graded.ratio must be >= 1, got {ratio}")));
                }
            }
            other => return Err(CliError::usage(format!("graded: unknown key {other:?}"))),
        }
    }
    let h_min = h_min.ok_or_else(|| CliError::usage("graded needs hmin=<r>"))?;
    Ok(GridChoice::Graded { h_min, growth, ratio })
}

impl Options {
    fn flag_map(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("kernel", &self.kernel),
            ("lambda", &self.lambda),
            ("lambda-file", &self.lambda_file),
            ("L", &self.l),
            ("dx", &self.dx),
            ("graded", &self.graded),
            ("z", &self.z),
            ("p", &self.p),
            ("out", &self.out),
            ("threads", &self.threads),
            ("values", &self.values),
            ("nodes", &self.nodes),
            ("mode", &self.mode),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect()
    }

    /// Merges the config file (if any) under the flags and validates the result.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let flags = self.flag_map();
        if flags.contains_key("dx") && flags.contains_key("graded") {
            return Err(CliError::usage("--dx and --graded are mutually exclusive"));
        }
        // The grid is one setting: a grid flag replaces whichever grid the file chose.
        let grid_keys = ["dx", "graded"];
        let mut merged: BTreeMap<String, String> = file
            .into_iter()
            .filter(|(k, _)| !(grid_keys.contains(&k.as_str()) && grid_keys.iter().any(|g| flags.contains_key(*g))))
            .collect();
        // Same for the two ways of giving lambdas.
        let lambda_keys = ["lambda", "lambda-file"];
        if lambda_keys.iter().any(|g| flags.contains_key(*g)) {
            merged.retain(|k, _| !lambda_keys.contains(&k.as_str()));
        }
        merged.extend(flags);
        RunConfig::from_map(&merged)
    }
}

impl RunConfig {
    pub fn from_map(m: &BTreeMap<String, String>) -> CliResult<Self> {
        let get = |k: &str| m.get(k).map(String::as_str);

        let kernel = match get("kernel") {
            None => KernelChoice::SechNls,
            Some(raw) => KernelChoice::from_str(raw.trim(), true)
                .map_err(|_| CliError::usage(format!("invalid value for kernel: {raw:?} (available: sech-nls)")))?,
        };

        if get("lambda").is_some() && get("lambda-file").is_some() {
            return Err(CliError::usage("lambda and lambda-file are mutually exclusive"));
        }
        let lambdas = match (get("lambda"), get("lambda-file")) {
            (Some(raw), _) => parse_list("lambda", raw, |s| parse_complex("lambda", s))?,
            (None, Some(path)) => read_lambda_file(Path::new(path))?,
            (None, None) => vec![Complex64::new(0.0, 0.0)],
        };

        let l = match get("L") {
            Some(raw) => parse_positive("L", raw)?,
            None => DEFAULT_L,
        };

        if get("dx").is_some() && get("graded").is_some() {
            return Err(CliError::usage("dx and graded are mutually exclusive"));
        }
        let grid = match (get("dx"), get("graded")) {
            (Some(raw), _) => GridChoice::Uniform {
                dx: parse_positive("dx", raw)?,
            },
            (None, Some(raw)) => parse_graded(raw)?,
            (None, None) => GridChoice::Uniform { dx: DEFAULT_DX },
        };

        let z = match get("z") {
            Some(raw) => parse_complex("z", raw)?,
            None => Complex64::new(1.0, 0.0),
        };

        let order = match get("p").map(str::trim) {
            None | Some("1") => DetOrder::One,
            Some("2") => DetOrder::Two,
            Some(raw) => {
                return Err(CliError::usage(format!(
                    "invalid value for p: {raw:?} (expected 1 or 2)"
                )))
            }
        };

        let threads = match get("threads") {
            Some(raw) => Some(field(
                "threads",
                raw,
                raw.trim().parse::<usize>().ok().filter(|&n| n > 0),
            )?),
            None => None,
        };

        let values = match get("values") {
            Some(raw) => Some(parse_list("values", raw, |s| parse_positive("values", s))?),
            None => None,
        };
        let nodes = match get("nodes") {
            Some(raw) => Some(parse_list("nodes", raw, |s| {
                field("nodes", s, s.parse::<usize>().ok().filter(|&n| n >= 3 && n % 2 == 1))
                    .map_err(|_| CliError::usage(format!("nodes must be odd integers >= 3, got {s:?}")))
            })?),
            None => None,
        };
        let mode = match get("mode").map(str::trim) {
            None | Some("uniform") => SweepMode::Uniform,
            Some("graded") => SweepMode::Graded,
            Some(raw) => {
                return Err(CliError::usage(format!(
                    "invalid value for mode: {raw:?} (expected uniform or graded)"
                )))
            }
        };

        Ok(RunConfig {
            kernel,
            lambdas,
            l,
            grid,
            z,
            order,
            out: get("out").map(PathBuf::from),
            threads,
            values,
            nodes,
            mode,
        })
    }
}
