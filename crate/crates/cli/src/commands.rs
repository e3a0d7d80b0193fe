use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use omega_core::games::{nash_equilibrium, GameSample, StochasticGame};
use omega_core::harness::{run_experiment, summarize, sweep_many};
use omega_core::{ExperimentConfig, Game, SweepAxis, Trajectory};
use serde::Deserialize;

use crate::config::{parse_config, parse_game_spec, Override};
use crate::error::{CliError, Result};
use crate::plot::{render, PlotOptions, Series};
use crate::presets;

/// Where configurations come from: files, presets, then overrides.
#[derive(Clone, Debug, Default)]
pub struct Source {
    pub configs: Vec<PathBuf>,
    pub presets: Vec<String>,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
}

impl Source {
    fn overrides(&self) -> Result<Vec<Override>> {
        let mut out = self
            .overrides
            .iter()
            .map(|s| s.parse::<Override>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(seed) = self.seed {
            for section in ["game", "run"] {
                out.push(format!("{section}.seed={seed}").parse()?);
            }
        }
        Ok(out)
    }

    /// `(label, text)` for every file and preset; a single unnamed empty
    /// document when neither is given.
    fn documents(&self) -> Result<Vec<(Option<String>, String)>> {
        let mut docs = Vec::new();
        for path in &self.configs {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            docs.push((Some(stem(path)), text));
        }
        for name in &self.presets {
            let text = presets::preset(name).ok_or_else(|| {
                let known: Vec<&str> = presets::names().collect();
                CliError::Usage(format!("unknown preset `{name}` (available: {})", known.join(", ")))
            })?;
            docs.push((Some(name.clone()), text.to_string()));
        }
        if docs.is_empty() {
            docs.push((None, String::new()));
        }
        Ok(docs)
    }

    fn single(&self) -> Result<String> {
        let mut docs = self.documents()?;
        if docs.len() > 1 {
            return Err(CliError::Usage("expected at most one --config or --preset".into()));
        }
        Ok(docs.remove(0).1)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        Ok(parse_config(&self.single()?, &self.overrides()?)?)
    }

    pub fn experiments(&self) -> Result<Vec<(String, ExperimentConfig)>> {
        let overrides = self.overrides()?;
        self.documents()?
            .into_iter()
            .map(|(label, text)| {
                let cfg = parse_config(&text, &overrides)?;
                Ok((label.unwrap_or_else(|| cfg.method_label()), cfg))
            })
            .collect()
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed write leaves nothing at `path`.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    {
        let mut out = BufWriter::new(tmp.as_file());
        write(&mut out)?;
        out.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn core_io(path: &Path, e: omega_core::Error) -> CliError {
    match e {
        omega_core::Error::Io(message) => CliError::io(path, std::io::Error::other(message)),
        other => other.into(),
    }
}

pub fn run(source: &Source, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let config = source.experiment()?;
    let trajectory = run_experiment::<f64>(&config)?;
    let summary = format!(
        "method {}: final distance {} at step {}, diverged: {}",
        config.method_label(),
        trajectory.final_distance,
        trajectory.last_step(),
        trajectory.diverged
    );
    match out {
        Some(path) => {
            write_atomic(path, |w| trajectory.write_csv(w).map_err(|e| core_io(path, e)))?;
            let _ = writeln!(stdout, "{summary}");
        }
        None => {
            trajectory
                .write_csv(&mut *stdout)
                .map_err(|e| core_io(Path::new("<stdout>"), e))?;
            let _ = writeln!(stderr, "{summary}");
        }
    }
    Ok(())
}

pub struct SweepArgs<'a> {
    pub axis: &'a str,
    pub values: &'a [String],
    pub at_step: Option<usize>,
    pub jobs: Option<usize>,
}

pub fn sweep(source: &Source, args: &SweepArgs, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let axis: SweepAxis = args
        .axis
        .parse()
        .map_err(|e: omega_core::Error| CliError::Usage(e.to_string()))?;
    let values: Vec<String> = args
        .values
        .iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage("--values needs at least one value".into()));
    }
    let bases = source.experiments()?;
    let at_step = args.at_step.unwrap_or(bases[0].1.steps);
    let compute = || sweep_many::<f64>(&bases, axis, &values, at_step);
    let result = match args.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(compute)?,
        None => compute()?,
    };
    let _ = write!(stdout, "{result}");
    if let Some(path) = out {
        write_atomic(path, |w| result.write_csv(w).map_err(|e| core_io(path, e)))?;
    }
    Ok(())
}

/// Explicit game samples; every matrix is a list of rows.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameJson {
    samples: Vec<SampleJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleJson {
    #[serde(default)]
    quad_x: Option<Vec<Vec<f64>>>,
    coupling: Vec<Vec<f64>>,
    #[serde(default)]
    quad_y: Option<Vec<Vec<f64>>>,
    lin_x: Vec<f64>,
    lin_y: Vec<f64>,
}

fn matrix(rows: Vec<Vec<f64>>) -> std::result::Result<Array2<f64>, String> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err("matrix rows differ in length".into());
    }
    let n = rows.len();
    Array2::from_shape_vec((n, cols), rows.into_iter().flatten().collect()).map_err(|e| e.to_string())
}

pub fn read_game_json(path: &Path) -> Result<Game> {
    let malformed = |message: String| CliError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let parsed: GameJson = serde_json::from_reader(BufReader::new(file)).map_err(|e| malformed(e.to_string()))?;
    let samples = parsed
        .samples
        .into_iter()
        .map(|s| {
            Ok(GameSample {
                quad_x: s.quad_x.map(matrix).transpose()?,
                coupling: matrix(s.coupling)?,
                quad_y: s.quad_y.map(matrix).transpose()?,
                lin_x: Array1::from(s.lin_x),
                lin_y: Array1::from(s.lin_y),
            })
        })
        .collect::<std::result::Result<Vec<_>, String>>()
        .map_err(malformed)?;
    StochasticGame::from_samples(samples).map_err(|e| malformed(e.to_string()))
}

fn format_vector(v: ndarray::ArrayView1<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn nash(source: &Source, game_json: Option<&Path>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let game = match game_json {
        Some(path) => {
            if !source.configs.is_empty() || !source.presets.is_empty() || !source.overrides.is_empty() {
                return Err(CliError::Usage(
                    "--game-json cannot be combined with other game sources".into(),
                ));
            }
            read_game_json(path)?
        }
        None => Game::generate(&parse_game_spec(&source.single()?, &source.overrides()?)?)?,
    };
    let solution = nash_equilibrium(&game)?;
    let w = &solution.w_star;
    let norm = |v: ndarray::ArrayView1<f64>| v.dot(&v).sqrt();
    let _ = writeln!(
        stdout,
        "kind: {}, d_x = {}, d_y = {}, n = {}",
        game.kind(),
        game.d_x(),
        game.d_y(),
        game.n()
    );
    let _ = writeln!(stdout, "|x*| = {}", norm(w.x()));
    let _ = writeln!(stdout, "|y*| = {}", norm(w.y()));
    if w.len() <= 8 {
        let _ = writeln!(stdout, "x* = {}", format_vector(w.x()));
        let _ = writeln!(stdout, "y* = {}", format_vector(w.y()));
    }
    let _ = writeln!(stdout, "residual = {:e}", solution.residual);
    if let Some(path) = out {
        write_atomic(path, |f| {
            let io = |e| CliError::io(path, e);
            writeln!(f, "block,index,value").map_err(io)?;
            for (block, values) in [("x", w.x()), ("y", w.y())] {
                for (i, v) in values.iter().enumerate() {
                    writeln!(f, "{block},{i},{}", omega_core::harness::format_decimal(*v)).map_err(io)?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Trajectory::read_csv(BufReader::new(file), &stem(path)).map_err(|e| match e {
        omega_core::Error::MalformedCsv { row, reason } => CliError::Malformed {
            path: path.to_path_buf(),
            message: format!("row {row}: {reason}"),
        },
        other => core_io(path, other),
    })
}

/// Distance of each trajectory at `at_step` (default: the earliest final
/// step among them), one column per file.
pub fn table(files: &[PathBuf], at_step: Option<usize>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let trajectories = files.iter().map(|p| read_trajectory(p)).collect::<Result<Vec<_>>>()?;
    let at_step = at_step.unwrap_or_else(|| trajectories.iter().map(Trajectory::last_step).min().unwrap_or(0));
    let result = summarize(&trajectories, at_step)?;
    let _ = write!(stdout, "{result}");
    if let Some(path) = out {
        write_atomic(path, |w| result.write_csv(w).map_err(|e| core_io(path, e)))?;
    }
    Ok(())
}

pub fn plot(
    files: &[PathBuf],
    options: &PlotOptions,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let trajectories = files.iter().map(|p| read_trajectory(p)).collect::<Result<Vec<_>>>()?;
    let series: Vec<Series> = files
        .iter()
        .zip(&trajectories)
        .map(|(path, trajectory)| Series {
            label: stem(path),
            trajectory,
        })
        .collect();
    let plot = render(&series, options);
    for warning in &plot.warnings {
        let _ = writeln!(stderr, "warning: {warning}");
    }
    match out {
        Some(path) => write_atomic(path, |w| {
            w.write_all(plot.svg.as_bytes()).map_err(|e| CliError::io(path, e))
        }),
        None => stdout
            .write_all(plot.svg.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
