//! Configuration resolution: flat `key = value` files with one `[section]`
//! per mode, overridden by command-line flags, resolved into typed per-mode
//! parameter structs. Run manifests are emitted in exactly this format, so
//! a manifest can be fed back through `--config` to reproduce a run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use phasewalk_core::presets;
use phasewalk_core::{CoinKind, CoinSpec, InitialCoin};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Execution modes, named as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    IdealWalk,
    NoisyWalk,
    Afd,
    SynthCheck,
    ClassicalBaseline,
    Sweep,
    PresetTable1,
    PresetFig2,
    PresetFig3,
}

impl Mode {
    pub const ALL: [Mode; 9] = [
        Mode::IdealWalk,
        Mode::NoisyWalk,
        Mode::Afd,
        Mode::SynthCheck,
        Mode::ClassicalBaseline,
        Mode::Sweep,
        Mode::PresetTable1,
        Mode::PresetFig2,
        Mode::PresetFig3,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Mode::IdealWalk => "ideal-walk",
            Mode::NoisyWalk => "noisy-walk",
            Mode::Afd => "afd",
            Mode::SynthCheck => "synth-check",
            Mode::ClassicalBaseline => "classical-baseline",
            Mode::Sweep => "sweep",
            Mode::PresetTable1 => "preset-table1",
            Mode::PresetFig2 => "preset-fig2",
            Mode::PresetFig3 => "preset-fig3",
        }
    }

    pub fn parse(label: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.label() == label)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Raw command-line overrides, all optional; the subcommand fixes the mode.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub out: Option<PathBuf>,
    pub coin: Option<String>,
    pub init: Option<String>,
    pub delta: Option<f64>,
    pub steps: Option<usize>,
    pub fock_dim: Option<usize>,
    /// Scalar in most modes; a comma-separated list in sweep mode.
    pub kappa: Option<String>,
    pub gamma: Option<String>,
    pub fit_window: Option<String>,
    /// Repeated `key=v1,v2,...` grid specifications (sweep mode).
    pub grid: Vec<String>,
}

/// A parsed config file: global keys plus per-section keys, with the line
/// number of each entry for error reporting.
#[derive(Debug, Default)]
pub struct RawConfig {
    pub globals: BTreeMap<String, String>,
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut out = RawConfig::default();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unterminated section header `{trimmed}`"),
                    });
                };
                let name = name.trim();
                if Mode::parse(name).is_none() {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!(
                            "unknown section `[{name}]`; sections must name a mode \
                             ({})",
                            mode_list()
                        ),
                    });
                }
                section = Some(name.to_string());
                out.sections.entry(name.to_string()).or_default();
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected `key = value`, got `{trimmed}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let map = match &section {
                Some(name) => out.sections.get_mut(name).expect("section registered"),
                None => &mut out.globals,
            };
            if map.insert(key.clone(), value).is_some() {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<RawConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RawConfig::parse(&text)
    }
}

fn mode_list() -> String {
    Mode::ALL.map(|m| m.label()).join(", ")
}

/// Ideal-walk parameters (also used by the classical baseline, which
/// ignores the coin fields).
#[derive(Debug, Clone, PartialEq)]
pub struct IdealParams {
    pub coin: CoinSpec,
    pub init: InitialCoin,
    pub delta: f64,
    pub steps: usize,
    pub fit_window: (usize, usize),
}

/// Open-system run parameters; rates are in units of the dispersive
/// coupling χ (the engine is run at χ = 1, which fixes the time unit).
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyParams {
    pub coin: CoinSpec,
    pub init: InitialCoin,
    pub delta: f64,
    pub steps: usize,
    pub fock_dim: usize,
    pub kappa: f64,
    pub gamma: f64,
    /// Phase-state levels of the initial cavity profile.
    pub levels: usize,
    /// RK4 time step (capped by the engine).
    pub dt: f64,
    /// Angular grid of the phase-profile extraction.
    pub phase_grid: usize,
    /// Present iff the mode fits a scaling exponent.
    pub fit_window: Option<(usize, usize)>,
}

/// Sweep parameters: the cross product of the four grids is executed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub kappas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub coins: Vec<CoinKind>,
    pub inits: Vec<InitialCoin>,
    pub delta: f64,
    pub steps: usize,
    pub fock_dim: usize,
    pub levels: usize,
    pub dt: f64,
    pub phase_grid: usize,
    pub fit_window: (usize, usize),
}

/// Scaling-table preset parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TableParams {
    pub delta: f64,
    pub steps: usize,
    pub fit_window: (usize, usize),
}

/// A fully resolved run: mode-specific parameters plus the output
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolved {
    IdealWalk(IdealParams),
    ClassicalBaseline(IdealParams),
    NoisyWalk(NoisyParams),
    Afd(NoisyParams),
    SynthCheck,
    Sweep(SweepParams),
    PresetTable1(TableParams),
    PresetFig2,
    PresetFig3,
}

impl Resolved {
    pub fn mode(&self) -> Mode {
        match self {
            Resolved::IdealWalk(_) => Mode::IdealWalk,
            Resolved::ClassicalBaseline(_) => Mode::ClassicalBaseline,
            Resolved::NoisyWalk(_) => Mode::NoisyWalk,
            Resolved::Afd(_) => Mode::Afd,
            Resolved::SynthCheck => Mode::SynthCheck,
            Resolved::Sweep(_) => Mode::Sweep,
            Resolved::PresetTable1(_) => Mode::PresetTable1,
            Resolved::PresetFig2 => Mode::PresetFig2,
            Resolved::PresetFig3 => Mode::PresetFig3,
        }
    }
}

/// The run plan: resolved parameters plus output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub resolved: Resolved,
    pub out: PathBuf,
}

/// Merges defaults, the config file (if any) and flag overrides into a
/// validated plan for `mode`.
pub fn resolve(
    mode: Mode,
    file: Option<&RawConfig>,
    flags: &FlagOverrides,
) -> Result<Plan, ConfigError> {
    // The file's `mode` key, when present, must agree with the subcommand.
    if let Some(file) = file {
        if let Some(file_mode) = file.globals.get("mode") {
            if Mode::parse(file_mode) != Some(mode) {
                return Err(invalid(format!(
                    "config sets mode = {file_mode} but the `{mode}` subcommand was invoked"
                )));
            }
        }
        for key in file.globals.keys() {
            if key != "mode" && key != "out" {
                return Err(invalid(format!(
                    "unknown global key `{key}` (only `mode` and `out` may appear \
                     outside a section)"
                )));
            }
        }
    }

    let out = flags
        .out
        .clone()
        .or_else(|| file.and_then(|f| f.globals.get("out").map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from("."));

    let section = file.and_then(|f| f.sections.get(mode.label()));
    let mut keys = KeyBag::new(mode, section, flags);
    let resolved = match mode {
        Mode::IdealWalk => Resolved::IdealWalk(resolve_ideal(&mut keys, true)?),
        Mode::ClassicalBaseline => Resolved::ClassicalBaseline(resolve_ideal(&mut keys, false)?),
        Mode::NoisyWalk => Resolved::NoisyWalk(resolve_noisy(&mut keys, true)?),
        Mode::Afd => Resolved::Afd(resolve_noisy(&mut keys, false)?),
        Mode::SynthCheck => Resolved::SynthCheck,
        Mode::Sweep => Resolved::Sweep(resolve_sweep(&mut keys)?),
        Mode::PresetTable1 => Resolved::PresetTable1(resolve_table(&mut keys)?),
        Mode::PresetFig2 => Resolved::PresetFig2,
        Mode::PresetFig3 => Resolved::PresetFig3,
    };
    keys.finish()?;
    Ok(Plan { resolved, out })
}

/// One mode's key lookups, tracking which section keys and flags were
/// consumed so that leftovers can be rejected.
struct KeyBag<'a> {
    mode: Mode,
    section: BTreeMap<&'a str, &'a str>,
    flags: &'a FlagOverrides,
    used_flags: Vec<&'static str>,
}

impl<'a> KeyBag<'a> {
    fn new(
        mode: Mode,
        section: Option<&'a BTreeMap<String, String>>,
        flags: &'a FlagOverrides,
    ) -> Self {
        let section = section
            .map(|s| s.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect())
            .unwrap_or_default();
        KeyBag { mode, section, flags, used_flags: Vec::new() }
    }

    /// Takes `key` from the flag override (preferred) or the config
    /// section.
    fn take(&mut self, key: &'static str, flag: Option<String>) -> Option<String> {
        self.used_flags.push(key);
        let from_file = self.section.remove(key).map(str::to_string);
        flag.or(from_file)
    }

    fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &'static str,
        flag: Option<String>,
    ) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.take(key, flag) {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|e| invalid(format!("key `{key}`: cannot parse `{text}`: {e}"))),
        }
    }

    /// Rejects unconsumed section keys and flags that the mode ignores.
    fn finish(self) -> Result<(), ConfigError> {
        if let Some(key) = self.section.keys().next() {
            return Err(invalid(format!(
                "unknown key `{key}` in section [{}]",
                self.mode.label()
            )));
        }
        let flag_set = |name: &str, set: bool| -> Result<(), ConfigError> {
            if set && !self.used_flags.contains(&name) {
                return Err(invalid(format!(
                    "--{} does not apply to the `{}` mode",
                    name.replace('_', "-"),
                    self.mode.label()
                )));
            }
            Ok(())
        };
        flag_set("coin", self.flags.coin.is_some())?;
        flag_set("init", self.flags.init.is_some())?;
        flag_set("delta", self.flags.delta.is_some())?;
        flag_set("steps", self.flags.steps.is_some())?;
        flag_set("fock_dim", self.flags.fock_dim.is_some())?;
        flag_set("kappa", self.flags.kappa.is_some())?;
        flag_set("gamma", self.flags.gamma.is_some())?;
        flag_set("fit_window", self.flags.fit_window.is_some())?;
        flag_set("grid", !self.flags.grid.is_empty())?;
        Ok(())
    }
}

fn parse_window(text: &str) -> Result<(usize, usize), ConfigError> {
    let err = || {
        invalid(format!(
            "fit window must be `a:b` with positive integers a < b, got `{text}`"
        ))
    };
    let (a, b) = text.split_once(':').ok_or_else(err)?;
    let a: usize = a.trim().parse().map_err(|_| err())?;
    let b: usize = b.trim().parse().map_err(|_| err())?;
    if a == 0 || a >= b {
        return Err(err());
    }
    Ok((a, b))
}

fn parse_coin(label: &str) -> Result<CoinKind, ConfigError> {
    CoinKind::parse(label).ok_or_else(|| {
        invalid(format!(
            "unknown coin `{label}` (expected hadamard, hh, iswap, dft or grover)"
        ))
    })
}

fn parse_init(label: &str) -> Result<InitialCoin, ConfigError> {
    InitialCoin::parse(label)
        .ok_or_else(|| invalid(format!("unknown initial coin `{label}` (expected c1, c2 or c3)")))
}

fn parse_list<T>(
    key: &str,
    text: &str,
    parse: impl Fn(&str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(invalid(format!("key `{key}`: empty list")));
    }
    items.into_iter().map(parse).collect()
}

fn parse_scalar_f64(key: &str, text: &str) -> Result<f64, ConfigError> {
    text.parse()
        .map_err(|e| invalid(format!("key `{key}`: cannot parse `{text}`: {e}")))
}

fn resolve_ideal(keys: &mut KeyBag, with_coin: bool) -> Result<IdealParams, ConfigError> {
    let (coin, init) = if with_coin {
        let kind = match keys.take("coin", keys.flags.coin.clone()) {
            Some(label) => parse_coin(&label)?,
            None => CoinKind::Dft,
        };
        let init = match keys.take("init", keys.flags.init.clone()) {
            Some(label) => parse_init(&label)?,
            None => InitialCoin::Uniform,
        };
        (CoinSpec::new(kind), init)
    } else {
        (CoinSpec::new(CoinKind::SingleHadamard), InitialCoin::Uniform)
    };
    let delta = keys
        .take_parsed("delta", keys.flags.delta.map(|v| v.to_string()))?
        .unwrap_or(presets::PRESET_DELTA);
    let steps = keys
        .take_parsed("steps", keys.flags.steps.map(|v| v.to_string()))?
        .unwrap_or(presets::IDEAL_STEPS);
    let fit_window = match keys.take("fit_window", keys.flags.fit_window.clone()) {
        Some(text) => parse_window(&text)?,
        None => presets::IDEAL_FIT_WINDOW,
    };
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive and finite, got {delta}")));
    }
    if steps == 0 {
        return Err(invalid("steps must be at least 1"));
    }
    Ok(IdealParams { coin, init, delta, steps, fit_window })
}

fn resolve_noisy(keys: &mut KeyBag, with_fit: bool) -> Result<NoisyParams, ConfigError> {
    let kind = match keys.take("coin", keys.flags.coin.clone()) {
        Some(label) => parse_coin(&label)?,
        None => CoinKind::Dft,
    };
    if kind == CoinKind::SingleHadamard {
        return Err(invalid(
            "the open-system walk drives two coin qubits; pick a two-walker coin \
             (hh, iswap, dft, grover)",
        ));
    }
    let init = match keys.take("init", keys.flags.init.clone()) {
        Some(label) => parse_init(&label)?,
        None => InitialCoin::Circular,
    };
    let delta = keys
        .take_parsed("delta", keys.flags.delta.map(|v| v.to_string()))?
        .unwrap_or(presets::PRESET_DELTA);
    let steps = keys
        .take_parsed("steps", keys.flags.steps.map(|v| v.to_string()))?
        .unwrap_or(presets::OPEN_STEPS);
    let fock_dim = keys
        .take_parsed("fock_dim", keys.flags.fock_dim.map(|v| v.to_string()))?
        .unwrap_or(presets::OPEN_FOCK_DIM);
    let kappa = match keys.take("kappa", keys.flags.kappa.clone()) {
        Some(text) => parse_scalar_f64("kappa", &text)?,
        None => 0.0,
    };
    let gamma = match keys.take("gamma", keys.flags.gamma.clone()) {
        Some(text) => parse_scalar_f64("gamma", &text)?,
        None => 0.0,
    };
    let levels = keys
        .take_parsed("levels", None)?
        .unwrap_or_else(|| fock_dim.saturating_sub(2).max(1));
    let dt = keys.take_parsed("dt", None)?.unwrap_or(DEFAULT_DT);
    let phase_grid = keys
        .take_parsed("phase_grid", None)?
        .unwrap_or(phasewalk_core::open::DEFAULT_PHASE_GRID);
    let fit_window = if with_fit {
        Some(match keys.take("fit_window", keys.flags.fit_window.clone()) {
            Some(text) => parse_window(&text)?,
            None => presets::DEPHASING_LADDER_WINDOW,
        })
    } else {
        None
    };
    Ok(NoisyParams {
        coin: CoinSpec::new(kind),
        init,
        delta,
        steps,
        fock_dim,
        kappa,
        gamma,
        levels,
        dt,
        phase_grid,
        fit_window,
    })
}

/// Default RK4 step of CLI runs, in units of 1/χ (the engine caps the step
/// at `0.01·max(1, Δθ)/χ`, so this default is always admissible).
pub const DEFAULT_DT: f64 = 0.01;

fn resolve_sweep(keys: &mut KeyBag) -> Result<SweepParams, ConfigError> {
    // Start from the scalar-shaped keys, which in sweep mode hold lists.
    let mut kappas = match keys.take("kappa", keys.flags.kappa.clone()) {
        Some(text) => parse_list("kappa", &text, |s| parse_scalar_f64("kappa", s))?,
        None => vec![0.0],
    };
    let mut gammas = match keys.take("gamma", keys.flags.gamma.clone()) {
        Some(text) => parse_list("gamma", &text, |s| parse_scalar_f64("gamma", s))?,
        None => vec![0.0],
    };
    let mut coins = match keys.take("coin", keys.flags.coin.clone()) {
        Some(text) => parse_list("coin", &text, parse_coin)?,
        None => vec![CoinKind::Dft],
    };
    let mut inits = match keys.take("init", keys.flags.init.clone()) {
        Some(text) => parse_list("init", &text, parse_init)?,
        None => vec![InitialCoin::Circular],
    };
    // `--grid key=v1,v2,...` overrides take precedence over the plain keys.
    keys.used_flags.push("grid");
    for spec in &keys.flags.grid {
        let Some((key, list)) = spec.split_once('=') else {
            return Err(invalid(format!(
                "--grid expects `key=v1,v2,...`, got `{spec}`"
            )));
        };
        match key.trim() {
            "kappa" => kappas = parse_list("kappa", list, |s| parse_scalar_f64("kappa", s))?,
            "gamma" => gammas = parse_list("gamma", list, |s| parse_scalar_f64("gamma", s))?,
            "coin" => coins = parse_list("coin", list, parse_coin)?,
            "init" => inits = parse_list("init", list, parse_init)?,
            other => {
                return Err(invalid(format!(
                    "--grid key must be kappa, gamma, coin or init, got `{other}`"
                )))
            }
        }
    }
    if coins.contains(&CoinKind::SingleHadamard) {
        return Err(invalid(
            "the open-system walk drives two coin qubits; pick two-walker coins \
             (hh, iswap, dft, grover)",
        ));
    }
    let delta = keys
        .take_parsed("delta", keys.flags.delta.map(|v| v.to_string()))?
        .unwrap_or(presets::PRESET_DELTA);
    let steps = keys
        .take_parsed("steps", keys.flags.steps.map(|v| v.to_string()))?
        .unwrap_or(presets::OPEN_STEPS);
    let fock_dim = keys
        .take_parsed("fock_dim", keys.flags.fock_dim.map(|v| v.to_string()))?
        .unwrap_or(presets::OPEN_FOCK_DIM);
    let levels = keys
        .take_parsed("levels", None)?
        .unwrap_or_else(|| fock_dim.saturating_sub(2).max(1));
    let dt = keys.take_parsed("dt", None)?.unwrap_or(DEFAULT_DT);
    let phase_grid = keys
        .take_parsed("phase_grid", None)?
        .unwrap_or(phasewalk_core::open::DEFAULT_PHASE_GRID);
    let fit_window = match keys.take("fit_window", keys.flags.fit_window.clone()) {
        Some(text) => parse_window(&text)?,
        None => presets::DEPHASING_LADDER_WINDOW,
    };
    Ok(SweepParams {
        kappas,
        gammas,
        coins,
        inits,
        delta,
        steps,
        fock_dim,
        levels,
        dt,
        phase_grid,
        fit_window,
    })
}

fn resolve_table(keys: &mut KeyBag) -> Result<TableParams, ConfigError> {
    let delta = keys
        .take_parsed("delta", keys.flags.delta.map(|v| v.to_string()))?
        .unwrap_or(presets::PRESET_DELTA);
    let steps = keys
        .take_parsed("steps", keys.flags.steps.map(|v| v.to_string()))?
        .unwrap_or(presets::IDEAL_STEPS);
    let fit_window = match keys.take("fit_window", keys.flags.fit_window.clone()) {
        Some(text) => parse_window(&text)?,
        None => presets::IDEAL_FIT_WINDOW,
    };
    Ok(TableParams { delta, steps, fit_window })
}

/// Renders the manifest: a complete, re-loadable config describing the run.
pub fn manifest(plan: &Plan) -> String {
    use std::fmt::Write;

    let mode = plan.resolved.mode();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# phasewalk {} (engine {})",
        env!("CARGO_PKG_VERSION"),
        phasewalk_core::VERSION
    );
    let _ = writeln!(text, "mode = {mode}");
    let _ = writeln!(text, "out = {}", plan.out.display());
    let _ = writeln!(text);
    let _ = writeln!(text, "[{mode}]");
    let mut kv = |key: &str, value: String| {
        let _ = writeln!(text, "{key} = {value}");
    };
    match &plan.resolved {
        Resolved::IdealWalk(p) => {
            kv("coin", p.coin.kind.label().to_string());
            kv("init", p.init.label().to_string());
            kv("delta", p.delta.to_string());
            kv("steps", p.steps.to_string());
            kv("fit_window", format!("{}:{}", p.fit_window.0, p.fit_window.1));
        }
        Resolved::ClassicalBaseline(p) => {
            kv("delta", p.delta.to_string());
            kv("steps", p.steps.to_string());
            kv("fit_window", format!("{}:{}", p.fit_window.0, p.fit_window.1));
        }
        Resolved::NoisyWalk(p) | Resolved::Afd(p) => {
            kv("coin", p.coin.kind.label().to_string());
            kv("init", p.init.label().to_string());
            kv("delta", p.delta.to_string());
            kv("steps", p.steps.to_string());
            kv("fock_dim", p.fock_dim.to_string());
            kv("kappa", p.kappa.to_string());
            kv("gamma", p.gamma.to_string());
            kv("levels", p.levels.to_string());
            kv("dt", p.dt.to_string());
            kv("phase_grid", p.phase_grid.to_string());
            if let Some(w) = p.fit_window {
                kv("fit_window", format!("{}:{}", w.0, w.1));
            }
        }
        Resolved::SynthCheck => {}
        Resolved::Sweep(p) => {
            kv("kappa", join_f64(&p.kappas));
            kv("gamma", join_f64(&p.gammas));
            kv(
                "coin",
                p.coins.iter().map(|c| c.label()).collect::<Vec<_>>().join(","),
            );
            kv(
                "init",
                p.inits.iter().map(|i| i.label()).collect::<Vec<_>>().join(","),
            );
            kv("delta", p.delta.to_string());
            kv("steps", p.steps.to_string());
            kv("fock_dim", p.fock_dim.to_string());
            kv("levels", p.levels.to_string());
            kv("dt", p.dt.to_string());
            kv("phase_grid", p.phase_grid.to_string());
            kv("fit_window", format!("{}:{}", p.fit_window.0, p.fit_window.1));
        }
        Resolved::PresetTable1(p) => {
            kv("delta", p.delta.to_string());
            kv("steps", p.steps.to_string());
            kv("fit_window", format!("{}:{}", p.fit_window.0, p.fit_window.1));
        }
        Resolved::PresetFig2 | Resolved::PresetFig3 => {}
    }
    text
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_flags() -> FlagOverrides {
        FlagOverrides::default()
    }

    #[test]
    fn defaults_resolve_without_any_input() {
        let plan = resolve(Mode::IdealWalk, None, &no_flags()).unwrap();
        let Resolved::IdealWalk(p) = &plan.resolved else { panic!() };
        assert_eq!(p.coin.kind, CoinKind::Dft);
        assert_eq!(p.init, InitialCoin::Uniform);
        assert_eq!(p.delta, presets::PRESET_DELTA);
        assert_eq!(p.steps, presets::IDEAL_STEPS);
        assert_eq!(p.fit_window, presets::IDEAL_FIT_WINDOW);
        assert_eq!(plan.out, PathBuf::from("."));
    }

    #[test]
    fn file_keys_apply_and_flags_override_them() {
        let file = RawConfig::parse(
            "mode = noisy-walk\nout = runs\n\n[noisy-walk]\ncoin = grover\nkappa = 0.05\n",
        )
        .unwrap();
        let mut flags = no_flags();
        flags.kappa = Some("0.1".into());
        let plan = resolve(Mode::NoisyWalk, Some(&file), &flags).unwrap();
        let Resolved::NoisyWalk(p) = &plan.resolved else { panic!() };
        assert_eq!(p.coin.kind, CoinKind::Grover);
        assert_eq!(p.kappa, 0.1);
        assert_eq!(plan.out, PathBuf::from("runs"));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let file = RawConfig::parse("mode = sweep\n").unwrap();
        let err = resolve(Mode::IdealWalk, Some(&file), &no_flags()).unwrap_err();
        assert!(err.to_string().contains("mode = sweep"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let file = RawConfig::parse("[ideal-walk]\nstep_count = 3\n").unwrap();
        let err = resolve(Mode::IdealWalk, Some(&file), &no_flags()).unwrap_err();
        assert!(err.to_string().contains("step_count"));
    }

    #[test]
    fn unknown_sections_are_rejected_at_parse_time() {
        let err = RawConfig::parse("[walks]\nsteps = 3\n").unwrap_err();
        assert!(err.to_string().contains("unknown section"));
    }

    #[test]
    fn inactive_mode_sections_are_ignored() {
        let file =
            RawConfig::parse("[sweep]\nkappa = 0,0.1\n\n[ideal-walk]\nsteps = 7\n").unwrap();
        let plan = resolve(Mode::IdealWalk, Some(&file), &no_flags()).unwrap();
        let Resolved::IdealWalk(p) = &plan.resolved else { panic!() };
        assert_eq!(p.steps, 7);
    }

    #[test]
    fn flags_that_a_mode_ignores_are_rejected() {
        let mut flags = no_flags();
        flags.kappa = Some("0.1".into());
        let err = resolve(Mode::IdealWalk, None, &flags).unwrap_err();
        assert!(err.to_string().contains("--kappa"));
    }

    #[test]
    fn fit_window_syntax_is_validated() {
        for bad in ["4", "0:9", "9:4", "4:4", "a:b"] {
            let mut flags = no_flags();
            flags.fit_window = Some(bad.into());
            assert!(resolve(Mode::IdealWalk, None, &flags).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn sweep_grids_parse_from_lists_and_grid_flags_take_precedence() {
        let file = RawConfig::parse(
            "[sweep]\nkappa = 0, 0.02, 0.05\ngamma = 0.06\ncoin = dft,grover\ninit = c3\n",
        )
        .unwrap();
        let mut flags = no_flags();
        flags.grid = vec!["kappa=0,0.1".into()];
        let plan = resolve(Mode::Sweep, Some(&file), &flags).unwrap();
        let Resolved::Sweep(p) = &plan.resolved else { panic!() };
        assert_eq!(p.kappas, vec![0.0, 0.1]);
        assert_eq!(p.gammas, vec![0.06]);
        assert_eq!(p.coins, vec![CoinKind::Dft, CoinKind::Grover]);
        assert_eq!(p.inits, vec![InitialCoin::Circular]);
    }

    #[test]
    fn manifest_round_trips_through_the_parser() {
        let mut flags = no_flags();
        flags.kappa = Some("0.01".into());
        flags.gamma = Some("0.02".into());
        flags.steps = Some(6);
        let plan = resolve(Mode::NoisyWalk, None, &flags).unwrap();
        let text = manifest(&plan);
        let reparsed = RawConfig::parse(&text).unwrap();
        let replan = resolve(Mode::NoisyWalk, Some(&reparsed), &no_flags()).unwrap();
        assert_eq!(replan, plan);
    }

    #[test]
    fn single_hadamard_is_rejected_for_open_runs() {
        let mut flags = no_flags();
        flags.coin = Some("hadamard".into());
        assert!(resolve(Mode::NoisyWalk, None, &flags).is_err());
        assert!(resolve(Mode::IdealWalk, None, &flags).is_ok());
    }
}
