//! Run configuration. A TOML file with one table per subcommand plus shared
//! `[noise]` and `[output]` tables; every key is optional. A JSON file with
//! the same structure (as echoed into outputs) is accepted too.

use crate::CliError;
use qroutesim_gates::{RouterParams, Scheme, SqrtCzParams};
use qroutesim_noise::DecayRates;
use qroutesim_protocols::delta_theta_for_leakage;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    NonEraser,
    Eraser,
}

impl SchemeName {
    pub fn scheme(self) -> Scheme {
        match self {
            SchemeName::NonEraser => Scheme::NonEraser,
            SchemeName::Eraser => Scheme::Eraser,
        }
    }
}

impl std::str::FromStr for SchemeName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "non-eraser" | "tcg-non-eraser" => Ok(SchemeName::NonEraser),
            "eraser" | "tcg-eraser" => Ok(SchemeName::Eraser),
            _ => Err(format!("unknown scheme {s:?} (non-eraser | eraser)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub seed: u64,
    pub noise: NoiseConfig,
    pub output: OutputConfig,
    pub theta_scan: ThetaScanConfig,
    pub phi_scan: PhiScanConfig,
    pub qst: QstConfig,
    pub rat: RatSection,
    pub rat2: RatSection,
    pub floquet: FloquetConfig,
    pub compile: CompileConfig,
    pub layout: LayoutConfig,
    pub noise_curves: NoiseCurvesConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: "default".into(),
            seed: 1,
            noise: NoiseConfig::default(),
            output: OutputConfig::default(),
            theta_scan: ThetaScanConfig::default(),
            phi_scan: PhiScanConfig::default(),
            qst: QstConfig::default(),
            rat: RatSection::default(),
            rat2: RatSection { n_max: 10, trials: 30, ..RatSection::default() },
            floquet: FloquetConfig::default(),
            compile: CompileConfig::default(),
            layout: LayoutConfig::default(),
            noise_curves: NoiseCurvesConfig::default(),
        }
    }
}

/// Rates in 1/μs, durations in ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// false runs every simulation noiselessly.
    pub enabled: bool,
    pub g10: f64,
    pub g21: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub excitation: f64,
    pub sqrt_cz_ns: f64,
    pub single_ns: f64,
    /// Population each √CZ leaves unexchanged (sets ϑ = π − δϑ).
    pub leakage: f64,
    /// Leakage rate ε (1/μs) of the rate-equation curves.
    pub epsilon: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let r = DecayRates::default();
        NoiseConfig {
            enabled: true,
            g10: r.g10,
            g21: r.g21,
            g2: r.g2,
            g3: r.g3,
            g4: r.g4,
            excitation: r.excitation,
            sqrt_cz_ns: qroutesim_gates::DEFAULT_SQRT_CZ_NS,
            single_ns: qroutesim_gates::DEFAULT_SINGLE_NS,
            leakage: 0.0,
            epsilon: 0.0,
        }
    }
}

impl NoiseConfig {
    pub fn decay(&self) -> DecayRates {
        DecayRates { g10: self.g10, g21: self.g21, g2: self.g2, g3: self.g3, g4: self.g4, excitation: self.excitation }
    }

    pub fn rates(&self) -> Option<DecayRates> {
        self.enabled.then(|| self.decay())
    }

    pub fn delta_theta(&self) -> f64 {
        delta_theta_for_leakage(self.leakage)
    }

    /// Router timing with ideal (fully exchanging) √CZ pulses.
    pub fn router(&self) -> RouterParams {
        RouterParams {
            sqrt_cz: SqrtCzParams { duration_ns: self.sqrt_cz_ns, ..SqrtCzParams::default() },
            single_ns: self.single_ns,
            ..RouterParams::default()
        }
    }

    /// Router whose √CZ pulses carry the configured leakage.
    pub fn leaky_router(&self) -> RouterParams {
        let mut p = self.router();
        p.sqrt_cz.theta = PI - self.delta_theta();
        p
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThetaScanConfig {
    pub scheme: SchemeName,
    /// Grid over θ ∈ [0, π].
    pub points: usize,
}

impl Default for ThetaScanConfig {
    fn default() -> Self {
        ThetaScanConfig { scheme: SchemeName::Eraser, points: 101 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiScanConfig {
    pub scheme: SchemeName,
    /// Grid over φ ∈ [0, 2π].
    pub points: usize,
}

impl Default for PhiScanConfig {
    fn default() -> Self {
        PhiScanConfig { scheme: SchemeName::Eraser, points: 41 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QstConfig {
    pub scheme: SchemeName,
    pub theta: f64,
    pub phi: f64,
    pub shots: u64,
}

impl Default for QstConfig {
    fn default() -> Self {
        QstConfig { scheme: SchemeName::Eraser, theta: PI / 4.0, phi: 0.0, shots: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatSection {
    pub scheme: SchemeName,
    pub n_max: usize,
    pub trials: usize,
    /// 0 = exact expectation values.
    pub shots: u64,
    /// Defaults to on for the eraser scheme, off otherwise.
    pub postselect: Option<bool>,
}

impl Default for RatSection {
    fn default() -> Self {
        RatSection { scheme: SchemeName::Eraser, n_max: 30, trials: 100, shots: 0, postselect: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloquetConfig {
    pub theta: f64,
    pub eta: f64,
    pub zeta: f64,
    /// Periods tabulated: 0..=n_max.
    pub n_max: usize,
    /// Cost window C^m.
    pub m: usize,
    /// Start point of the ϑ calibration; none skips it.
    pub calibrate_from: Option<f64>,
}

impl Default for FloquetConfig {
    fn default() -> Self {
        FloquetConfig { theta: PI, eta: 0.0, zeta: 0.0, n_max: 20, m: 10, calibrate_from: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    pub layers: usize,
    /// full | read-only | write-only
    pub mode: String,
    /// clifford | tcg-non-eraser | tcg-eraser | sp-tcg
    pub scheme: String,
    pub memory: Vec<bool>,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig { layers: 2, mode: "full".into(), scheme: "tcg-eraser".into(), memory: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub rows: usize,
    pub cols: usize,
    pub layers: usize,
    /// [row, col] pairs.
    pub dead_qubits: Vec<[usize; 2]>,
    /// [[row, col], [row, col]] pairs.
    pub dead_couplers: Vec<[[usize; 2]; 2]>,
    /// Search expansions per seed.
    pub budget: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            rows: 12,
            cols: 6,
            layers: 4,
            dead_qubits: Vec::new(),
            dead_couplers: Vec::new(),
            budget: qroutesim_layout::DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseCurvesConfig {
    pub t_max_us: f64,
    pub points: usize,
}

impl Default for NoiseCurvesConfig {
    fn default() -> Self {
        NoiseCurvesConfig { t_max_us: 60.0, points: 601 }
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        Ok(cfg)
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        let n = &self.noise;
        for (k, v) in [("g10", n.g10), ("g21", n.g21), ("g2", n.g2), ("g3", n.g3), ("g4", n.g4), ("excitation", n.excitation)] {
            if !v.is_finite() || v < 0.0 {
                return Err(bad(&format!("noise.{k}"), format!("rate {v} must be finite and ≥ 0")));
            }
        }
        for (k, v) in [("sqrt_cz_ns", n.sqrt_cz_ns), ("single_ns", n.single_ns)] {
            if !v.is_finite() || v < 0.0 {
                return Err(bad(&format!("noise.{k}"), format!("duration {v} must be finite and ≥ 0")));
            }
        }
        if !(0.0..1.0).contains(&n.leakage) {
            return Err(bad("noise.leakage", format!("{} outside [0, 1)", n.leakage)));
        }
        if !n.epsilon.is_finite() || n.epsilon < 0.0 {
            return Err(bad("noise.epsilon", format!("{} must be ≥ 0", n.epsilon)));
        }
        if self.theta_scan.points < 2 {
            return Err(bad("theta_scan.points", "need at least 2"));
        }
        if self.phi_scan.points < 3 {
            return Err(bad("phi_scan.points", "need at least 3"));
        }
        for (k, s) in [("rat", &self.rat), ("rat2", &self.rat2)] {
            if s.trials == 0 {
                return Err(bad(&format!("{k}.trials"), "need at least 1"));
            }
            if s.n_max < 2 {
                return Err(bad(&format!("{k}.n_max"), "the fit needs depths 0..=2 at least"));
            }
        }
        if self.floquet.m == 0 {
            return Err(bad("floquet.m", "need at least 1"));
        }
        if self.noise_curves.points < 2 || !(self.noise_curves.t_max_us > 0.0) {
            return Err(bad("noise_curves", "need points ≥ 2 and t_max_us > 0"));
        }
        if self.layout.layers == 0 {
            return Err(bad("layout.layers", "need at least 1"));
        }
        if self.compile.layers == 0 {
            return Err(bad("compile.layers", "need at least 1"));
        }
        Ok(())
    }
}

/// `12x6` → (12, 6).
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X', '×']).ok_or_else(|| format!("grid {s:?} is not ROWSxCOLS"))?;
    let r = r.trim().parse().map_err(|_| format!("bad row count in {s:?}"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column count in {s:?}"))?;
    Ok((r, c))
}
