//! TOML experiment configuration.
//!
//! ```toml
//! [game]
//! kind = "quadratic"     # bilinear | quadratic | quadratic_linear
//! d_x = 100
//! d_y = 100
//! n = 100
//! seed = 0
//! mu_a = 1.0             # band of A; also l_a, mu_b, l_b, mu_c, l_c
//!
//! [optimizer_x]
//! kind = "omega"
//! eta = 0.01
//! alpha = 1.0
//! beta = 0.9
//!
//! [optimizer_y]          # optional; missing keys inherit from optimizer_x
//! kind = "isog"
//!
//! [run]
//! steps = 5000
//! batch_size = 1
//! log_every = 10
//! seed = 0
//! ```

use std::str::FromStr;

use omega_core::{Band, ExperimentConfig, GameKind, GameSpec, OptimizerConfig, OptimizerKind};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown section `{0}`")]
    UnknownSection(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("missing key `{0}`")]
    Missing(String),

    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("invalid override `{0}`: expected section.key=value")]
    Override(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

const GAME_KEYS: &[&str] = &[
    "kind", "d_x", "d_y", "n", "seed", "mu_a", "l_a", "mu_b", "l_b", "mu_c", "l_c",
];
const OPTIMIZER_KEYS: &[&str] = &["kind", "eta", "alpha", "beta", "gamma", "epsilon"];
const RUN_KEYS: &[&str] = &["steps", "batch_size", "log_every", "seed"];

/// A `--set section.key=value` override. The value is read as a TOML value
/// and falls back to a bare string, so `optimizer_x.kind=omega` needs no
/// quotes.
#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub section: String,
    pub key: String,
    pub value: Value,
}

impl FromStr for Override {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ConfigError::Override(s.to_string());
        let (path, raw) = s.split_once('=').ok_or_else(bad)?;
        let (section, key) = path.trim().split_once('.').ok_or_else(bad)?;
        if section.is_empty() || key.is_empty() {
            return Err(bad());
        }
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        Ok(Override {
            section: section.to_string(),
            key: key.to_string(),
            value,
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_document(text: &str, overrides: &[Override]) -> Result<Table> {
    let mut doc = text.parse::<Table>().map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |span| line_of(text, span.start)),
        message: e.message().trim().to_string(),
    })?;
    for o in overrides {
        let section = doc
            .entry(o.section.clone())
            .or_insert_with(|| Value::Table(Table::new()));
        match section {
            Value::Table(t) => {
                t.insert(o.key.clone(), o.value.clone());
            }
            _ => return Err(ConfigError::UnknownSection(o.section.clone())),
        }
    }
    Ok(doc)
}

/// The four sections in order: game, optimizer_x, optimizer_y, run.
fn sections(doc: &Table) -> Result<[Section<'_>; 4]> {
    static EMPTY: std::sync::OnceLock<Table> = std::sync::OnceLock::new();
    let empty = EMPTY.get_or_init(Table::new);
    let mut found = [
        ("game", None),
        ("optimizer_x", None),
        ("optimizer_y", None),
        ("run", None),
    ];
    for (name, value) in doc {
        let slot = found
            .iter_mut()
            .find(|(n, _)| n == name)
            .ok_or_else(|| ConfigError::UnknownSection(name.clone()))?;
        match value {
            Value::Table(t) => slot.1 = Some(t),
            _ => return Err(ConfigError::UnknownSection(name.clone())),
        }
    }
    let sections = found.map(|(name, t)| Section {
        name,
        table: t.unwrap_or(empty),
    });
    let [game, opt_x, opt_y, run] = &sections;
    game.check_keys(GAME_KEYS)?;
    opt_x.check_keys(OPTIMIZER_KEYS)?;
    opt_y.check_keys(OPTIMIZER_KEYS)?;
    run.check_keys(RUN_KEYS)?;
    Ok(sections)
}

/// Parses `text`, applies `overrides` in order and validates the result.
pub fn parse_config(text: &str, overrides: &[Override]) -> Result<ExperimentConfig> {
    let doc = parse_document(text, overrides)?;
    let [game, opt_x, opt_y, run] = sections(&doc)?;
    let game_spec = read_game(&game)?;
    let optimizer_x = read_optimizer(&opt_x, None)?;
    let optimizer_y = read_optimizer(&opt_y, Some(optimizer_x))?;
    let defaults = ExperimentConfig::new(game_spec.clone(), optimizer_x);
    let config = ExperimentConfig {
        game: game_spec,
        optimizer_x,
        optimizer_y,
        steps: run.usize("steps")?.unwrap_or(defaults.steps),
        batch_size: run.usize("batch_size")?.unwrap_or(defaults.batch_size),
        log_every: run.usize("log_every")?.unwrap_or(defaults.log_every),
        seed: run.u64("seed")?.unwrap_or(0),
    };
    config.validate().map_err(|e| qualify(e, "run"))?;
    Ok(config)
}

/// Like [`parse_config`] but reads only the game; the other sections are
/// checked for unknown keys and otherwise ignored.
pub fn parse_game_spec(text: &str, overrides: &[Override]) -> Result<GameSpec> {
    let doc = parse_document(text, overrides)?;
    let [game, ..] = sections(&doc)?;
    read_game(&game)
}

/// Turns a core validation error into one naming the config key.
fn qualify(e: omega_core::Error, section: &str) -> ConfigError {
    match e {
        omega_core::Error::InvalidParameter { name, reason } => {
            let section = match name {
                "d_x" | "d_y" | "n" => "game",
                "steps" | "batch_size" | "log_every" => "run",
                _ => section,
            };
            ConfigError::Invalid {
                key: format!("{section}.{name}"),
                reason,
            }
        }
        other => ConfigError::Invalid {
            key: section.to_string(),
            reason: other.to_string(),
        },
    }
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl Section<'_> {
    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self, known: &[&str]) -> Result<()> {
        match self.table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::UnknownKey(self.key(k))),
            None => Ok(()),
        }
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: self.key(key),
            reason: reason.into(),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(self.invalid(key, format!("expected a number, found {}", other.type_str()))),
        }
    }

    fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) => u64::try_from(*v)
                .map(Some)
                .map_err(|_| self.invalid(key, "must not be negative")),
            // integers above i64::MAX do not fit a TOML integer
            Some(Value::String(s)) => s.parse().map(Some).map_err(|e| self.invalid(key, format!("{e}"))),
            Some(other) => Err(self.invalid(key, format!("expected an integer, found {}", other.type_str()))),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.u64(key)?
            .map(|v| usize::try_from(v).map_err(|_| self.invalid(key, "too large")))
            .transpose()
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.invalid(key, format!("expected a string, found {}", other.type_str()))),
        }
    }

    fn band(&self, which: char, default: Option<Band>, kind: GameKind) -> Result<Option<Band>> {
        let (mu_key, l_key) = (format!("mu_{which}"), format!("l_{which}"));
        let (mu, l) = (self.f64(&mu_key)?, self.f64(&l_key)?);
        let Some(default) = default else {
            if let Some(key) = [(&mu_key, mu), (&l_key, l)].into_iter().find_map(|(k, v)| v.map(|_| k)) {
                return Err(self.invalid(key, format!("{kind} games have no {} term", which.to_ascii_uppercase())));
            }
            return Ok(None);
        };
        let lower = mu.unwrap_or(default.lower);
        let upper = l.unwrap_or(default.upper);
        Band::new(lower, upper).map(Some).map_err(|_| {
            let key = if lower > 0.0 { l_key } else { mu_key };
            self.invalid(&key, format!("band [{lower}, {upper}] needs 0 < mu <= l"))
        })
    }
}

pub fn parse_game_kind(s: &str) -> Option<GameKind> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "bilinear" => Some(GameKind::Bilinear),
        "quadratic" => Some(GameKind::Quadratic),
        "quadratic_linear" | "quadlin" => Some(GameKind::QuadraticLinear),
        _ => None,
    }
}

fn read_game(s: &Section) -> Result<GameSpec> {
    let name = s.str("kind")?.ok_or_else(|| ConfigError::Missing(s.key("kind")))?;
    let kind = parse_game_kind(name).ok_or_else(|| {
        s.invalid(
            "kind",
            format!("unknown game kind `{name}` (bilinear, quadratic, quadratic_linear)"),
        )
    })?;
    let defaults = GameSpec::defaults(kind);
    let spec = GameSpec {
        d_x: s.usize("d_x")?.unwrap_or(defaults.d_x),
        d_y: s.usize("d_y")?.unwrap_or(defaults.d_y),
        n: s.usize("n")?.unwrap_or(defaults.n),
        band_a: s.band('a', defaults.band_a, kind)?,
        band_b: s
            .band('b', Some(defaults.band_b), kind)?
            .expect("coupling band always present"),
        band_c: s.band('c', defaults.band_c, kind)?,
        seed: s.u64("seed")?.unwrap_or(defaults.seed),
    };
    spec.validate().map_err(|e| qualify(e, "game"))?;
    Ok(spec)
}

fn read_optimizer(s: &Section, inherit: Option<OptimizerConfig>) -> Result<OptimizerConfig> {
    let kind = match s.str("kind")? {
        Some(name) => Some(OptimizerKind::from_str(name).map_err(|_| {
            let known: Vec<&str> = OptimizerKind::ALL.iter().map(|k| k.name()).collect();
            s.invalid("kind", format!("unknown optimizer `{name}` ({})", known.join(", ")))
        })?),
        None => None,
    };
    let base = match (inherit, kind) {
        (Some(parent), kind) => OptimizerConfig {
            kind: kind.unwrap_or(parent.kind),
            ..parent
        },
        (None, Some(kind)) => {
            let eta = s.f64("eta")?.ok_or_else(|| ConfigError::Missing(s.key("eta")))?;
            OptimizerConfig::new(kind, eta)
        }
        (None, None) => return Err(ConfigError::Missing(s.key("kind"))),
    };
    let config = OptimizerConfig {
        kind: base.kind,
        eta: s.f64("eta")?.unwrap_or(base.eta),
        alpha: s.f64("alpha")?.unwrap_or(base.alpha),
        beta: s.f64("beta")?.unwrap_or(base.beta),
        gamma: s.f64("gamma")?.unwrap_or(base.gamma),
        epsilon: s.f64("epsilon")?.unwrap_or(base.epsilon),
    };
    config.validate().map_err(|e| qualify(e, s.name))?;
    Ok(config)
}

fn integer(v: u64) -> Value {
    i64::try_from(v).map_or_else(|_| Value::String(v.to_string()), Value::Integer)
}

fn optimizer_table(o: &OptimizerConfig) -> Table {
    let mut t = Table::new();
    t.insert("kind".into(), Value::String(o.kind.name().into()));
    for (key, v) in [
        ("eta", o.eta),
        ("alpha", o.alpha),
        ("beta", o.beta),
        ("gamma", o.gamma),
        ("epsilon", o.epsilon),
    ] {
        t.insert(key.into(), Value::Float(v));
    }
    t
}

/// Writes every key explicitly, so the text does not depend on defaults.
pub fn serialize_config(config: &ExperimentConfig) -> String {
    let g = &config.game;
    let mut game = Table::new();
    game.insert("kind".into(), Value::String(g.kind().name().into()));
    game.insert("d_x".into(), integer(g.d_x as u64));
    game.insert("d_y".into(), integer(g.d_y as u64));
    game.insert("n".into(), integer(g.n as u64));
    game.insert("seed".into(), integer(g.seed));
    for (which, band) in [("a", g.band_a), ("b", Some(g.band_b)), ("c", g.band_c)] {
        if let Some(band) = band {
            game.insert(format!("mu_{which}"), Value::Float(band.lower));
            game.insert(format!("l_{which}"), Value::Float(band.upper));
        }
    }
    let mut run = Table::new();
    run.insert("steps".into(), integer(config.steps as u64));
    run.insert("batch_size".into(), integer(config.batch_size as u64));
    run.insert("log_every".into(), integer(config.log_every as u64));
    run.insert("seed".into(), integer(config.seed));

    let mut doc = Table::new();
    doc.insert("game".into(), Value::Table(game));
    doc.insert("optimizer_x".into(), Value::Table(optimizer_table(&config.optimizer_x)));
    doc.insert("optimizer_y".into(), Value::Table(optimizer_table(&config.optimizer_y)));
    doc.insert("run".into(), Value::Table(run));
    toml::to_string(&doc).expect("plain tables serialize")
}
