//! `key=value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Lists are comma-separated.
//! Defaults depend on the scenario, so the `scenario` key is resolved first
//! and the remaining keys are applied on top of that scenario's defaults.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::propagate::KineticScheme;
use crate::rotor::InertiaMode;
use crate::scenario::ScenarioKind;

/// Which engines an aspect scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Both,
    Staged,
    Lattice,
}

impl EngineChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            EngineChoice::Both => "both",
            EngineChoice::Staged => "staged",
            EngineChoice::Lattice => "lattice",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "both" => Some(EngineChoice::Both),
            "staged" => Some(EngineChoice::Staged),
            "lattice" => Some(EngineChoice::Lattice),
            _ => None,
        }
    }

    pub fn staged(&self) -> bool {
        matches!(self, EngineChoice::Both | EngineChoice::Staged)
    }

    pub fn lattice(&self) -> bool {
        matches!(self, EngineChoice::Both | EngineChoice::Lattice)
    }
}

/// Fully resolved scenario settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,

    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,

    /// Density standard deviation of each packet.
    pub sigma: f64,
    /// Initial `y` of the packet centroids.
    pub packet_y: f64,
    /// Horizontal distance between the two packets.
    pub separation: f64,
    pub kx: f64,
    pub ky: f64,
    /// Translation length of the modular-momentum observable.
    pub modular_length: f64,
    pub alpha: Vec<f64>,
    pub k_max: usize,
    /// Hard-wall radius around the flux; 0 disables the mask.
    pub core_radius: f64,
    pub engine: EngineChoice,
    pub skip_gauge_transform: bool,

    pub beta: Vec<f64>,
    pub bump_radius: f64,

    pub line_n: usize,
    pub line_dy: f64,
    pub line_y0: f64,
    pub d: f64,
    pub mu: f64,
    pub inertia_c: f64,
    pub n0: i64,
    pub n1: i64,

    pub inertia_e: f64,
    pub lambda: f64,
    pub delta_m: f64,
    pub phi0: f64,
    pub truncation: usize,
    pub inertia_mode: InertiaMode,

    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    pub scheme: KineticScheme,
    pub norm_tolerance: f64,
    pub solver_tolerance: f64,
    pub boundary_tolerance: f64,

    pub out: String,
}

impl ScenarioConfig {
    /// Defaults for `scenario`.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let (nx, dx) = (512, 0.125);
        let mut c = Self {
            scenario,
            nx,
            ny: nx,
            dx,
            dy: dx,
            x0: centred_origin(nx, dx),
            y0: centred_origin(nx, dx),
            sigma: 1.5,
            packet_y: 12.0,
            separation: 16.0,
            kx: 0.0,
            ky: -2.0,
            modular_length: 16.0,
            alpha: vec![FRAC_PI_2],
            k_max: 3,
            core_radius: 0.0,
            engine: EngineChoice::Both,
            skip_gauge_transform: false,
            beta: vec![0.0, PI],
            bump_radius: 1.0,
            line_n: 2048,
            line_dy: 1.0 / 32.0,
            line_y0: -32.0,
            d: 2.0,
            mu: 0.05,
            inertia_c: 50.0,
            n0: 10,
            n1: 11,
            inertia_e: 1.0,
            lambda: 0.1,
            delta_m: 8.0,
            phi0: 0.0,
            truncation: 128,
            inertia_mode: InertiaMode::Bare,
            dt: 0.004,
            t_end: 12.0,
            record_every: 5,
            snapshot_times: Vec::new(),
            scheme: KineticScheme::default(),
            norm_tolerance: 1e-10,
            solver_tolerance: 1e-10,
            boundary_tolerance: 1e-6,
            out: "out".to_string(),
        };
        match scenario {
            ScenarioKind::MadelungDemo => {
                c.separation = 2.5;
                c.t_end = 1.0;
                c.dt = 0.01;
                c.record_every = 10;
            }
            ScenarioKind::ContinuousAspect => {
                c.sigma = 2.0;
                c.packet_y = 8.0;
                c.dt = 0.002;
                c.t_end = 8.0;
                c.record_every = 1;
            }
            ScenarioKind::InstantaneousAspect | ScenarioKind::FluxQuantizationSweep => {
                // The packets spread to σ≈4.3 by t_end; ±48 in x keeps the
                // tails seen by the L-shift below 1e-14.
                c.nx = 768;
                c.x0 = centred_origin(c.nx, dx);
            }
            ScenarioKind::GaugeInvariance => {
                c.alpha = vec![1.3];
                c.core_radius = 4.0 * dx;
                c.snapshot_times = vec![3.0, 6.0, 9.0, 12.0];
                c.record_every = 25;
            }
        }
        c
    }

    /// `key=value` lines reproducing this configuration exactly.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("scenario", self.scenario.name().to_string()),
            ("nx", self.nx.to_string()),
            ("ny", self.ny.to_string()),
            ("dx", fmt_f(self.dx)),
            ("dy", fmt_f(self.dy)),
            ("x0", fmt_f(self.x0)),
            ("y0", fmt_f(self.y0)),
            ("sigma", fmt_f(self.sigma)),
            ("packet_y", fmt_f(self.packet_y)),
            ("separation", fmt_f(self.separation)),
            ("kx", fmt_f(self.kx)),
            ("ky", fmt_f(self.ky)),
            ("modular_length", fmt_f(self.modular_length)),
            ("alpha", fmt_list(&self.alpha)),
            ("k_max", self.k_max.to_string()),
            ("core_radius", fmt_f(self.core_radius)),
            ("engine", self.engine.as_str().to_string()),
            ("skip_gauge_transform", self.skip_gauge_transform.to_string()),
            ("beta", fmt_list(&self.beta)),
            ("bump_radius", fmt_f(self.bump_radius)),
            ("line_n", self.line_n.to_string()),
            ("line_dy", fmt_f(self.line_dy)),
            ("line_y0", fmt_f(self.line_y0)),
            ("d", fmt_f(self.d)),
            ("mu", fmt_f(self.mu)),
            ("inertia_c", fmt_f(self.inertia_c)),
            ("n0", self.n0.to_string()),
            ("n1", self.n1.to_string()),
            ("inertia_e", fmt_f(self.inertia_e)),
            ("lambda", fmt_f(self.lambda)),
            ("delta_m", fmt_f(self.delta_m)),
            ("phi0", fmt_f(self.phi0)),
            ("truncation", self.truncation.to_string()),
            (
                "inertia_mode",
                match self.inertia_mode {
                    InertiaMode::Bare => "bare",
                    InertiaMode::Renormalized => "renormalized",
                }
                .to_string(),
            ),
            ("dt", fmt_f(self.dt)),
            ("t_end", fmt_f(self.t_end)),
            ("record_every", self.record_every.to_string()),
            ("snapshot_times", fmt_list(&self.snapshot_times)),
            ("scheme", self.scheme.as_str().to_string()),
            ("norm_tolerance", fmt_f(self.norm_tolerance)),
            ("solver_tolerance", fmt_f(self.solver_tolerance)),
            ("boundary_tolerance", fmt_f(self.boundary_tolerance)),
            ("out", self.out.clone()),
        ]
    }

    /// Resolved parameters as a sorted map, for reports.
    pub fn parameter_record(&self) -> BTreeMap<String, String> {
        self.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "scenario" => {}
            "nx" => self.nx = parse_usize(value)?,
            "ny" => self.ny = parse_usize(value)?,
            "dx" => self.dx = parse_f(value)?,
            "dy" => self.dy = parse_f(value)?,
            "x0" => self.x0 = parse_f(value)?,
            "y0" => self.y0 = parse_f(value)?,
            "sigma" => self.sigma = parse_f(value)?,
            "packet_y" => self.packet_y = parse_f(value)?,
            "separation" => self.separation = parse_f(value)?,
            "kx" => self.kx = parse_f(value)?,
            "ky" => self.ky = parse_f(value)?,
            "modular_length" => self.modular_length = parse_f(value)?,
            "alpha" => self.alpha = parse_list(value)?,
            "k_max" => self.k_max = parse_usize(value)?,
            "core_radius" => self.core_radius = parse_f(value)?,
            "engine" => self.engine = EngineChoice::parse(value).ok_or_else(|| format!("unknown engine '{value}'"))?,
            "skip_gauge_transform" => self.skip_gauge_transform = parse_bool(value)?,
            "beta" => self.beta = parse_list(value)?,
            "bump_radius" => self.bump_radius = parse_f(value)?,
            "line_n" => self.line_n = parse_usize(value)?,
            "line_dy" => self.line_dy = parse_f(value)?,
            "line_y0" => self.line_y0 = parse_f(value)?,
            "d" => self.d = parse_f(value)?,
            "mu" => self.mu = parse_f(value)?,
            "inertia_c" => self.inertia_c = parse_f(value)?,
            "n0" => self.n0 = parse_i(value)?,
            "n1" => self.n1 = parse_i(value)?,
            "inertia_e" => self.inertia_e = parse_f(value)?,
            "lambda" => self.lambda = parse_f(value)?,
            "delta_m" => self.delta_m = parse_f(value)?,
            "phi0" => self.phi0 = parse_f(value)?,
            "truncation" => self.truncation = parse_usize(value)?,
            "inertia_mode" => {
                self.inertia_mode = match value {
                    "bare" => InertiaMode::Bare,
                    "renormalized" => InertiaMode::Renormalized,
                    _ => return Err(format!("unknown inertia mode '{value}'")),
                }
            }
            "dt" => self.dt = parse_f(value)?,
            "t_end" => self.t_end = parse_f(value)?,
            "record_every" => self.record_every = parse_usize(value)?,
            "snapshot_times" => self.snapshot_times = parse_list(value)?,
            "scheme" => self.scheme = KineticScheme::parse(value).ok_or_else(|| format!("unknown scheme '{value}'"))?,
            "norm_tolerance" => self.norm_tolerance = parse_f(value)?,
            "solver_tolerance" => self.solver_tolerance = parse_f(value)?,
            "boundary_tolerance" => self.boundary_tolerance = parse_f(value)?,
            "out" => {
                if value.is_empty() {
                    return Err("output directory is empty".into());
                }
                self.out = value.to_string()
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Range checks; returns the offending key and message.
    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        fn pos(key: &'static str, v: f64) -> std::result::Result<(), (&'static str, String)> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("{key} must be positive and finite, got {v}")))
            }
        }
        fn fin(key: &'static str, v: f64) -> std::result::Result<(), (&'static str, String)> {
            if v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("{key} must be finite")))
            }
        }
        if self.nx < 16 {
            return Err(("nx", format!("nx must be at least 16, got {}", self.nx)));
        }
        if self.ny < 16 {
            return Err(("ny", format!("ny must be at least 16, got {}", self.ny)));
        }
        pos("dx", self.dx)?;
        pos("dy", self.dy)?;
        fin("x0", self.x0)?;
        fin("y0", self.y0)?;
        pos("sigma", self.sigma)?;
        fin("packet_y", self.packet_y)?;
        pos("separation", self.separation)?;
        fin("kx", self.kx)?;
        fin("ky", self.ky)?;
        pos("modular_length", self.modular_length)?;
        if self.alpha.is_empty() {
            return Err(("alpha", "alpha needs at least one value".into()));
        }
        for &a in &self.alpha {
            fin("alpha", a)?;
        }
        if !(self.core_radius >= 0.0) || !self.core_radius.is_finite() {
            return Err(("core_radius", format!("core_radius must be non-negative, got {}", self.core_radius)));
        }
        for &b in &self.beta {
            fin("beta", b)?;
        }
        pos("bump_radius", self.bump_radius)?;
        if self.line_n < 16 {
            return Err(("line_n", format!("line_n must be at least 16, got {}", self.line_n)));
        }
        pos("line_dy", self.line_dy)?;
        fin("line_y0", self.line_y0)?;
        pos("d", self.d)?;
        fin("mu", self.mu)?;
        pos("inertia_c", self.inertia_c)?;
        pos("inertia_e", self.inertia_e)?;
        fin("lambda", self.lambda)?;
        if !(self.inertia_c * self.lambda * self.lambda < self.inertia_e) {
            return Err(("lambda", "inertia_c·lambda² must be below inertia_e".into()));
        }
        pos("delta_m", self.delta_m)?;
        fin("phi0", self.phi0)?;
        if self.truncation < 4 {
            return Err(("truncation", "truncation must be at least 4".into()));
        }
        pos("dt", self.dt)?;
        pos("t_end", self.t_end)?;
        if self.record_every == 0 {
            return Err(("record_every", "record_every must be at least 1".into()));
        }
        let mut last = 0.0;
        for &t in &self.snapshot_times {
            if !(t >= last) || t > self.t_end {
                return Err((
                    "snapshot_times",
                    format!("snapshot times must be non-decreasing in [0, t_end], got {t}"),
                ));
            }
            last = t;
        }
        if !(self.norm_tolerance > 0.0 && self.norm_tolerance <= 1e-10) {
            return Err((
                "norm_tolerance",
                format!("norm_tolerance must lie in (0, 1e-10], got {}", self.norm_tolerance),
            ));
        }
        if !(self.solver_tolerance > 0.0 && self.solver_tolerance <= 1e-10) {
            return Err((
                "solver_tolerance",
                format!("solver_tolerance must lie in (0, 1e-10], got {}", self.solver_tolerance),
            ));
        }
        pos("boundary_tolerance", self.boundary_tolerance)?;
        Ok(())
    }

    /// Validates ranges on a programmatically built configuration.
    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(_, m)| Error::config(m))
    }
}

/// `x0` placing the origin at the centre of a cell.
pub fn centred_origin(n: usize, h: f64) -> f64 {
    -(n as f64) * h / 2.0 + h / 2.0
}

fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(",")
}

/// A float, or a multiple of π written `[a]pi[/b]`, e.g. `pi/2`, `-3pi/2`.
fn parse_f(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("'{s}' is not a number");
    let v = match s.split_once("pi") {
        Some((a, b)) => {
            let a = match a {
                "" => 1.0,
                "-" => -1.0,
                _ => a.parse::<f64>().map_err(|_| bad())?,
            };
            let b = match b {
                "" => 1.0,
                _ => b.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
            };
            a * PI / b
        }
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn parse_i(s: &str) -> std::result::Result<i64, String> {
    s.parse().map_err(|_| format!("'{s}' is not an integer"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("'{s}' is not a boolean")),
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_f(p.trim())).collect()
}

/// Splits non-comment lines into `(line number, key, value)`.
fn lex(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::ConfigLine { line, message: format!("expected key=value, got '{body}'") })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::ConfigLine { line, message: "empty key".into() });
        }
        if out.iter().any(|(_, k, _): &(usize, String, String)| k == key) {
            return Err(Error::ConfigLine { line, message: format!("duplicate key '{key}'") });
        }
        out.push((line, key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Parses and validates a scenario configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let entries = lex(text)?;
    let (line, _, name) =
        entries.iter().find(|(_, k, _)| k == "scenario").ok_or_else(|| Error::config("scenario key required"))?;
    let kind = ScenarioKind::parse(name)
        .ok_or_else(|| Error::ConfigLine { line: *line, message: format!("unknown scenario '{name}'") })?;
    let mut cfg = ScenarioConfig::defaults(kind);
    let grid_keys = ["nx", "ny", "dx", "dy"];
    for (line, key, value) in &entries {
        cfg.set(key, value).map_err(|message| Error::ConfigLine { line: *line, message })?;
    }
    // keep the grid centred unless an origin is given explicitly
    let has = |k: &str| entries.iter().any(|(_, key, _)| key == k);
    if !has("dy") && has("dx") {
        cfg.dy = cfg.dx;
    }
    if !has("ny") && has("nx") {
        cfg.ny = cfg.nx;
    }
    if grid_keys.iter().any(|k| has(k)) {
        if !has("x0") {
            cfg.x0 = centred_origin(cfg.nx, cfg.dx);
        }
        if !has("y0") {
            cfg.y0 = centred_origin(cfg.ny, cfg.dy);
        }
    }
    if !has("core_radius") && has("dx") && kind == ScenarioKind::GaugeInvariance {
        cfg.core_radius = 4.0 * cfg.dx;
    }
    cfg.check().map_err(|(key, message)| match entries.iter().find(|(_, k, _)| k == key) {
        Some((line, _, _)) => Error::ConfigLine { line: *line, message },
        None => Error::config(message),
    })?;
    Ok(cfg)
}

/// Rotor settings for the `rotor` command: the rotor keys of
/// [`ScenarioConfig`] plus `t_end`, `dt` and `out`. No scenario key is needed.
pub fn parse_rotor_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::MadelungDemo);
    cfg.t_end = 200.0;
    cfg.dt = 1.0;
    cfg.out = "out".into();
    let allowed = [
        "inertia_c",
        "inertia_e",
        "lambda",
        "delta_m",
        "phi0",
        "truncation",
        "inertia_mode",
        "n0",
        "n1",
        "dt",
        "t_end",
        "out",
    ];
    let entries = lex(text)?;
    for (line, key, value) in &entries {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::ConfigLine { line: *line, message: format!("unknown rotor key '{key}'") });
        }
        cfg.set(key, value).map_err(|message| Error::ConfigLine { line: *line, message })?;
    }
    cfg.check().map_err(|(key, message)| match entries.iter().find(|(_, k, _)| k == key) {
        Some((line, _, _)) => Error::ConfigLine { line: *line, message },
        None => Error::config(message),
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiples_of_pi() {
        assert_eq!(parse_f("pi"), Ok(PI));
        assert_eq!(parse_f("pi/2"), Ok(PI / 2.0));
        assert_eq!(parse_f("3pi/2"), Ok(3.0 * PI / 2.0));
        assert_eq!(parse_f("-pi"), Ok(-PI));
        assert_eq!(parse_f("0.5pi"), Ok(0.5 * PI));
        for bad in ["pix", "pi2", "api", "1e400", "nan"] {
            assert!(parse_f(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("scenario=instantaneous-aspect\nalpha=1.25").unwrap();
        assert_eq!(c.alpha, vec![1.25]);
        let mut d = ScenarioConfig::defaults(ScenarioKind::InstantaneousAspect);
        d.alpha = vec![1.25];
        assert_eq!(c, d);
        assert_eq!((c.x0, c.y0), (-47.9375, -31.9375));
    }

    #[test]
    fn malformed_value_names_its_line() {
        let e = parse_config("alpha=abc\nscenario=madelung-demo").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 1, .. }), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn empty_file_needs_scenario() {
        let e = parse_config("").unwrap_err();
        assert!(e.to_string().contains("scenario key required"));
        assert!(parse_config("# only a comment\n\n").is_err());
    }

    #[test]
    fn unknown_keys_and_ranges_are_rejected() {
        let e = parse_config("scenario=madelung-demo\nfoo=1").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 2, .. }));
        let e = parse_config("scenario=madelung-demo\n\ndt=0").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 3, .. }), "{e}");
        assert!(parse_config("scenario=nope").is_err());
        assert!(parse_config("scenario=gauge-invariance\nnorm_tolerance=1e-6").is_err());
        assert!(parse_config("scenario=gauge-invariance\ndx=0.1\ndx=0.2").is_err());
    }

    #[test]
    fn echo_roundtrips_bit_exactly() {
        for kind in ScenarioKind::ALL {
            let mut c = ScenarioConfig::defaults(kind);
            c.dx = 0.1 + 0.2;
            c.alpha = vec![PI / 3.0, -0.0];
            let back = parse_config(&c.echo()).unwrap();
            assert_eq!(back.echo(), c.echo());
            assert_eq!(back.dx.to_bits(), c.dx.to_bits());
        }
    }

    #[test]
    fn grid_keys_recentre_the_origin() {
        let c = parse_config("scenario=gauge-invariance\nnx=256\ndx=0.25").unwrap();
        assert_eq!((c.ny, c.dy), (256, 0.25));
        assert_eq!(c.x0, -31.875);
        assert_eq!(c.core_radius, 1.0);
    }

    #[test]
    fn rotor_config() {
        let c = parse_rotor_config("lambda=0.05\ntruncation=64").unwrap();
        assert_eq!((c.lambda, c.truncation), (0.05, 64));
        assert!(parse_rotor_config("alpha=1").is_err());
        assert!(parse_rotor_config("lambda=1").is_err());
    }
}
