//! Experiment configuration: JSON parsing, defaults and validation.
//!
//! A config document has the shape
//!
//! ```json
//! { "experiment": "doublewell_flea", "parameters": { "hbars": [0.5, 0.1] },
//!   "output_dir": "out", "emit_svg": true }
//! ```
//!
//! Every key is optional except `experiment`; unknown keys are rejected at
//! every level. See `docs/config.md` for the per-experiment parameters.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use ssb_core::lattice::{Boundary, Grid, Grid1D, Grid2D};
use ssb_core::potentials::{validate_flea, Bump1D, FleaSpec, GaussianLattice, PotentialSpec};
use ssb_core::spin::{ChainBoundary, SpinFlea, MAX_CHAIN};

/// Output directory used when the config names none.
pub const DEFAULT_OUTPUT_DIR: &str = "ssb-out";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    /// The document is not well-formed JSON.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed but unacceptable: unknown key, wrong type or out-of-range value.
    Semantic {
        field: String,
        message: String,
    },
    Io {
        path: PathBuf,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse {
                line,
                column,
                message,
            } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Semantic { field, message } => {
                write!(f, "invalid config field `{field}`: {message}")
            }
            ConfigError::Io { path, message } => {
                write!(f, "cannot read {}: {message}", path.display())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

fn semantic(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Semantic {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DoublewellFlea,
    GapScaling,
    AndersonPair,
    MexicanTower,
    Metal2dFlea,
    CwScan,
    IsingLimits,
    HarmonicOracle,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::DoublewellFlea,
        ExperimentKind::GapScaling,
        ExperimentKind::AndersonPair,
        ExperimentKind::MexicanTower,
        ExperimentKind::Metal2dFlea,
        ExperimentKind::CwScan,
        ExperimentKind::IsingLimits,
        ExperimentKind::HarmonicOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DoublewellFlea => "doublewell_flea",
            ExperimentKind::GapScaling => "gap_scaling",
            ExperimentKind::AndersonPair => "anderson_pair",
            ExperimentKind::MexicanTower => "mexican_tower",
            ExperimentKind::Metal2dFlea => "metal2d_flea",
            ExperimentKind::CwScan => "cw_scan",
            ExperimentKind::IsingLimits => "ising_limits",
            ExperimentKind::HarmonicOracle => "harmonic_oracle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid1DParams {
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
}

impl Default for Grid1DParams {
    fn default() -> Self {
        Self {
            x_min: -2.0,
            x_max: 2.0,
            nodes: 2001,
        }
    }
}

impl Grid1DParams {
    pub fn build(&self) -> ssb_core::Result<Grid> {
        Ok(Grid::One(Grid1D::new(
            self.x_min,
            self.x_max,
            self.nodes,
            Boundary::Dirichlet,
        )?))
    }
}

/// Parameters of the one-dimensional bump flea `d * bump(x - b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FleaParams {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for FleaParams {
    fn default() -> Self {
        let f = Bump1D::default();
        Self {
            b: f.b,
            c: f.c,
            d: f.d,
        }
    }
}

impl FleaParams {
    pub fn spec(&self) -> FleaSpec {
        FleaSpec::Bump1D(Bump1D {
            b: self.b,
            c: self.c,
            d: self.d,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoublewellParams {
    pub hbars: Vec<f64>,
    pub grid: Grid1DParams,
    /// `null` runs the unperturbed double well.
    pub flea: Option<FleaParams>,
    pub phase_nodes: usize,
    pub tol: f64,
}

impl Default for DoublewellParams {
    fn default() -> Self {
        Self {
            hbars: vec![0.5, 0.1, 0.05, 0.01],
            grid: Grid1DParams::default(),
            flea: Some(FleaParams::default()),
            phase_nodes: 201,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapParams {
    pub hbars: Vec<f64>,
    pub grid: Grid1DParams,
    pub tol: f64,
}

impl Default for GapParams {
    fn default() -> Self {
        Self {
            hbars: (0..8).map(|i| 0.3 - 0.25 * i as f64 / 7.0).collect(),
            grid: Grid1DParams::default(),
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AndersonParams {
    pub hbar: f64,
    pub grid: Grid1DParams,
    pub phase_nodes: usize,
    pub tol: f64,
}

impl Default for AndersonParams {
    fn default() -> Self {
        Self {
            hbar: 0.05,
            grid: Grid1DParams::default(),
            phase_nodes: 201,
            tol: 1e-12,
        }
    }
}

/// Disk-supported flea `d * bump(|q - center|)` for the Mexican hat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialFleaParams {
    pub center: [f64; 2],
    pub c: f64,
    pub d: f64,
}

impl Default for RadialFleaParams {
    fn default() -> Self {
        Self {
            center: [0.65, 0.0],
            c: 0.2,
            d: -0.1,
        }
    }
}

impl RadialFleaParams {
    pub fn spec(&self) -> FleaSpec {
        FleaSpec::RadialBump2D {
            center: self.center,
            c: self.c,
            d: self.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MexicanParams {
    pub hbars: Vec<f64>,
    /// Tower sizes `N`; each tower uses sectors `-N..=N`.
    pub tower_sizes: Vec<usize>,
    pub theta: f64,
    pub radial_nodes: usize,
    pub r_max: f64,
    pub angular_bins: usize,
    /// `null` skips the perturbed two-dimensional solve.
    pub flea: Option<RadialFleaParams>,
    /// Nodes per axis of the `[-r_max, r_max]^2` grid of the perturbed solve and the trace.
    pub grid_nodes: usize,
    /// Nodes per phase axis of the classical-limit trace; 0 disables it.
    pub trace_phase_nodes: usize,
    pub tol: f64,
}

impl Default for MexicanParams {
    fn default() -> Self {
        Self {
            hbars: vec![0.1, 0.05],
            tower_sizes: vec![0, 1, 2, 3],
            theta: 0.0,
            radial_nodes: 800,
            r_max: 2.0,
            angular_bins: 360,
            flea: Some(RadialFleaParams::default()),
            grid_nodes: 201,
            trace_phase_nodes: 21,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeParams {
    pub v0: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub a: f64,
    pub cells: usize,
    pub lattice_const: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        let l = GaussianLattice::default();
        Self {
            v0: l.v0,
            alpha_x: l.alpha_x,
            alpha_y: l.alpha_y,
            a: l.a,
            cells: l.cells,
            lattice_const: l.lattice_const,
        }
    }
}

impl LatticeParams {
    pub fn lattice(&self) -> GaussianLattice {
        GaussianLattice {
            v0: self.v0,
            alpha_x: self.alpha_x,
            alpha_y: self.alpha_y,
            a: self.a,
            cells: self.cells,
            lattice_const: self.lattice_const,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetalParams {
    pub hbars: Vec<f64>,
    pub lattice: LatticeParams,
    pub nodes_per_cell: usize,
    /// Height of each grid-point flea.
    pub delta: f64,
    /// Distance, in grid spacings along `x`, of each flea from its cell center.
    pub flea_offset: usize,
    pub tol: f64,
}

impl Default for MetalParams {
    fn default() -> Self {
        Self {
            hbars: vec![0.1, 0.025],
            lattice: LatticeParams::default(),
            nodes_per_cell: 40,
            delta: 0.1,
            flea_offset: 3,
            tol: 1e-12,
        }
    }
}

impl MetalParams {
    pub fn grid(&self) -> ssb_core::Result<Grid2D> {
        self.lattice.lattice().grid(self.nodes_per_cell)
    }

    /// One flea node in every cell except the central one.
    pub fn flea_points(&self, grid: &Grid2D) -> Vec<usize> {
        let cells = self.lattice.cells;
        let center = cells / 2;
        let half = self.nodes_per_cell / 2;
        let mut points = Vec::new();
        for cx in 0..cells {
            for cy in 0..cells {
                if cx == center && cy == center {
                    continue;
                }
                let ix = cx * self.nodes_per_cell + half + self.flea_offset;
                let iy = cy * self.nodes_per_cell + half;
                points.push(grid.index(ix % grid.nx(), iy));
            }
        }
        points
    }

    pub fn flea_spec(&self, grid: &Grid2D) -> FleaSpec {
        FleaSpec::GridPoints2D {
            points: self.flea_points(grid),
            delta: self.delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinFleaParams {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub odd: bool,
}

impl Default for SpinFleaParams {
    fn default() -> Self {
        let f = SpinFlea::default();
        Self {
            b: f.b,
            c: f.c,
            d: f.d,
            odd: f.odd,
        }
    }
}

impl SpinFleaParams {
    pub fn flea(&self) -> SpinFlea {
        SpinFlea {
            b: self.b,
            c: self.c,
            d: self.d,
            odd: self.odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CwParams {
    pub sizes: Vec<usize>,
    pub j: f64,
    pub b: f64,
    /// `null` runs the symmetric model only.
    pub flea: Option<SpinFleaParams>,
}

impl Default for CwParams {
    fn default() -> Self {
        Self {
            sizes: vec![10, 25, 50, 100, 200],
            j: 1.0,
            b: 0.5,
            flea: Some(SpinFleaParams::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryParam {
    #[default]
    Periodic,
    Open,
}

impl From<BoundaryParam> for ChainBoundary {
    fn from(b: BoundaryParam) -> Self {
        match b {
            BoundaryParam::Periodic => ChainBoundary::Periodic,
            BoundaryParam::Open => ChainBoundary::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsingParams {
    pub sizes: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub j: f64,
    pub b: f64,
    pub boundary: BoundaryParam,
    /// Also solve at `-epsilon` for every field.
    pub mirror: bool,
}

impl Default for IsingParams {
    fn default() -> Self {
        Self {
            sizes: (4..=12).collect(),
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            j: 1.0,
            b: 0.5,
            boundary: BoundaryParam::Periodic,
            mirror: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicParams {
    pub hbar: f64,
    pub omega: f64,
    pub grid: Grid1DParams,
    pub phase_min: f64,
    pub phase_max: f64,
    pub phase_nodes: usize,
    pub tol: f64,
}

impl Default for HarmonicParams {
    fn default() -> Self {
        Self {
            hbar: 0.1,
            omega: 1.0,
            grid: Grid1DParams {
                x_min: -8.0,
                x_max: 8.0,
                nodes: 2001,
            },
            phase_min: -2.0,
            phase_max: 2.0,
            phase_nodes: 201,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", content = "parameters", rename_all = "snake_case")]
pub enum Experiment {
    DoublewellFlea(DoublewellParams),
    GapScaling(GapParams),
    AndersonPair(AndersonParams),
    MexicanTower(MexicanParams),
    #[serde(rename = "metal2d_flea")]
    Metal2dFlea(MetalParams),
    CwScan(CwParams),
    IsingLimits(IsingParams),
    HarmonicOracle(HarmonicParams),
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::DoublewellFlea(_) => ExperimentKind::DoublewellFlea,
            Experiment::GapScaling(_) => ExperimentKind::GapScaling,
            Experiment::AndersonPair(_) => ExperimentKind::AndersonPair,
            Experiment::MexicanTower(_) => ExperimentKind::MexicanTower,
            Experiment::Metal2dFlea(_) => ExperimentKind::Metal2dFlea,
            Experiment::CwScan(_) => ExperimentKind::CwScan,
            Experiment::IsingLimits(_) => ExperimentKind::IsingLimits,
            Experiment::HarmonicOracle(_) => ExperimentKind::HarmonicOracle,
        }
    }

    /// The experiment with all parameters at their defaults.
    pub fn defaults(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::DoublewellFlea => Experiment::DoublewellFlea(Default::default()),
            ExperimentKind::GapScaling => Experiment::GapScaling(Default::default()),
            ExperimentKind::AndersonPair => Experiment::AndersonPair(Default::default()),
            ExperimentKind::MexicanTower => Experiment::MexicanTower(Default::default()),
            ExperimentKind::Metal2dFlea => Experiment::Metal2dFlea(Default::default()),
            ExperimentKind::CwScan => Experiment::CwScan(Default::default()),
            ExperimentKind::IsingLimits => Experiment::IsingLimits(Default::default()),
            ExperimentKind::HarmonicOracle => Experiment::HarmonicOracle(Default::default()),
        }
    }
}

/// A fully defaulted, range-checked experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            emit_svg: true,
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        self.experiment.kind()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<String>,
    parameters: Option<Value>,
    output_dir: Option<PathBuf>,
    emit_svg: Option<bool>,
}

fn from_serde(err: serde_json::Error, field: &str) -> ConfigError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ConfigError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => semantic(field, err.to_string()),
    }
}

fn params<T: DeserializeOwned + Default>(value: Option<Value>) -> Result<T, ConfigError> {
    match value {
        None | Some(Value::Null) => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(|e| from_serde(e, "parameters")),
    }
}

/// Parses, defaults and validates a JSON config document.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    let doc: RawConfig = serde_json::from_str(raw).map_err(|e| from_serde(e, "config"))?;
    let name = doc.experiment.unwrap_or_default();
    if name.trim().is_empty() {
        return Err(semantic(
            "experiment",
            "missing or empty; expected one of the experiment names",
        ));
    }
    let kind = ExperimentKind::from_name(name.trim()).ok_or_else(|| {
        let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
        semantic(
            "experiment",
            format!(
                "unknown experiment `{name}`; expected one of {}",
                names.join(", ")
            ),
        )
    })?;
    let p = doc.parameters;
    let experiment = match kind {
        ExperimentKind::DoublewellFlea => Experiment::DoublewellFlea(params(p)?),
        ExperimentKind::GapScaling => Experiment::GapScaling(params(p)?),
        ExperimentKind::AndersonPair => Experiment::AndersonPair(params(p)?),
        ExperimentKind::MexicanTower => Experiment::MexicanTower(params(p)?),
        ExperimentKind::Metal2dFlea => Experiment::Metal2dFlea(params(p)?),
        ExperimentKind::CwScan => Experiment::CwScan(params(p)?),
        ExperimentKind::IsingLimits => Experiment::IsingLimits(params(p)?),
        ExperimentKind::HarmonicOracle => Experiment::HarmonicOracle(params(p)?),
    };
    let config = ExperimentConfig {
        experiment,
        output_dir: doc
            .output_dir
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        emit_svg: doc.emit_svg.unwrap_or(true),
    };
    check(&config)?;
    Ok(config)
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    validate_config(&raw)
}

fn check_hbars(field: &str, hbars: &[f64]) -> Result<(), ConfigError> {
    if hbars.is_empty() {
        return Err(semantic(field, "list must not be empty"));
    }
    for (i, h) in hbars.iter().enumerate() {
        check_hbar(&format!("{field}[{i}]"), *h)?;
    }
    let mut sorted = hbars.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(semantic(field, "values must be distinct"));
    }
    Ok(())
}

fn check_hbar(field: &str, h: f64) -> Result<(), ConfigError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(semantic(
            field,
            format!("hbar must be positive and finite, got {h}"),
        ));
    }
    Ok(())
}

fn check_positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(semantic(
            field,
            format!("must be positive and finite, got {v}"),
        ));
    }
    Ok(())
}

fn check_finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if !v.is_finite() {
        return Err(semantic(field, format!("must be finite, got {v}")));
    }
    Ok(())
}

fn check_grid(field: &str, g: &Grid1DParams) -> Result<Grid, ConfigError> {
    g.build().map_err(|e| semantic(field, e.to_string()))
}

fn check_resolution(field: &str, grid: &Grid, hbars: &[f64]) -> Result<(), ConfigError> {
    let h = grid.max_spacing();
    for &hb in hbars {
        let per_width = hb.sqrt() / h;
        if per_width < ssb_core::semiclassics::MIN_NODES_PER_WIDTH {
            return Err(semantic(
                field,
                format!(
                    "grid spacing {h} resolves sqrt(hbar) = {} with only {per_width:.2} nodes at hbar = {hb}; need {}",
                    hb.sqrt(),
                    ssb_core::semiclassics::MIN_NODES_PER_WIDTH
                ),
            ));
        }
    }
    Ok(())
}

fn check_flea_width(field: &str, c: f64) -> Result<(), ConfigError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(semantic(
            field,
            format!(
                "flea half-width c must be positive, got {c}; flea condition (i) needs a nonempty compact support disjoint from the classical minima"
            ),
        ));
    }
    Ok(())
}

fn check_flea(
    field: &str,
    potential: &PotentialSpec,
    flea: &FleaSpec,
    grid: &Grid,
) -> Result<(), ConfigError> {
    let report =
        validate_flea(potential, flea, grid).map_err(|e| semantic(field, e.to_string()))?;
    if !report.is_valid() {
        return Err(semantic(field, report.describe()));
    }
    Ok(())
}

fn check_nodes(field: &str, n: usize, min: usize) -> Result<(), ConfigError> {
    if n < min {
        return Err(semantic(field, format!("need at least {min}, got {n}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), ConfigError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(semantic(
            "parameters.tol",
            format!("must lie in (0, 1), got {tol}"),
        ));
    }
    Ok(())
}

/// Applies the module preconditions to every parameter.
pub fn check(config: &ExperimentConfig) -> Result<(), ConfigError> {
    match &config.experiment {
        Experiment::DoublewellFlea(p) => {
            check_hbars("parameters.hbars", &p.hbars)?;
            check_tol(p.tol)?;
            check_nodes("parameters.phase_nodes", p.phase_nodes, 2)?;
            let grid = check_grid("parameters.grid", &p.grid)?;
            check_resolution("parameters.grid", &grid, &p.hbars)?;
            if let Some(f) = &p.flea {
                check_flea_width("parameters.flea.c", f.c)?;
                check_finite("parameters.flea.b", f.b)?;
                check_finite("parameters.flea.d", f.d)?;
                check_flea(
                    "parameters.flea",
                    &PotentialSpec::DoubleWell,
                    &f.spec(),
                    &grid,
                )?;
            }
        }
        Experiment::GapScaling(p) => {
            check_hbars("parameters.hbars", &p.hbars)?;
            if p.hbars.len() < 2 {
                return Err(semantic(
                    "parameters.hbars",
                    "a fit needs at least two values",
                ));
            }
            check_tol(p.tol)?;
            check_grid("parameters.grid", &p.grid)?;
        }
        Experiment::AndersonPair(p) => {
            check_hbar("parameters.hbar", p.hbar)?;
            check_tol(p.tol)?;
            check_nodes("parameters.phase_nodes", p.phase_nodes, 2)?;
            let grid = check_grid("parameters.grid", &p.grid)?;
            check_resolution("parameters.grid", &grid, &[p.hbar])?;
        }
        Experiment::MexicanTower(p) => {
            check_hbars("parameters.hbars", &p.hbars)?;
            check_tol(p.tol)?;
            check_finite("parameters.theta", p.theta)?;
            check_positive("parameters.r_max", p.r_max)?;
            check_nodes("parameters.radial_nodes", p.radial_nodes, 3)?;
            check_nodes("parameters.angular_bins", p.angular_bins, 4)?;
            check_nodes("parameters.grid_nodes", p.grid_nodes, 3)?;
            if p.tower_sizes.is_empty() {
                return Err(semantic("parameters.tower_sizes", "list must not be empty"));
            }
            if p.tower_sizes.iter().any(|&n| n > 64) {
                return Err(semantic(
                    "parameters.tower_sizes",
                    "tower sizes above 64 are not supported",
                ));
            }
            if p.trace_phase_nodes == 1 {
                return Err(semantic(
                    "parameters.trace_phase_nodes",
                    "use 0 to disable or at least 2",
                ));
            }
            let grid: Grid = Grid2D::square(-p.r_max, p.r_max, p.grid_nodes, Boundary::Dirichlet)
                .map_err(|e| semantic("parameters.grid_nodes", e.to_string()))?
                .into();
            if p.trace_phase_nodes > 0 {
                check_resolution("parameters.grid_nodes", &grid, &p.hbars)?;
            }
            if let Some(f) = &p.flea {
                check_flea_width("parameters.flea.c", f.c)?;
                check_finite("parameters.flea.d", f.d)?;
                check_finite("parameters.flea.center", f.center[0] + f.center[1])?;
                check_flea(
                    "parameters.flea",
                    &PotentialSpec::MexicanHat,
                    &f.spec(),
                    &grid,
                )?;
            }
        }
        Experiment::Metal2dFlea(p) => {
            check_hbars("parameters.hbars", &p.hbars)?;
            check_tol(p.tol)?;
            let lattice = p.lattice.lattice();
            lattice
                .validate()
                .map_err(|e| semantic("parameters.lattice", e.to_string()))?;
            check_nodes("parameters.nodes_per_cell", p.nodes_per_cell, 4)?;
            check_finite("parameters.delta", p.delta)?;
            if 2 * p.flea_offset >= p.nodes_per_cell {
                return Err(semantic(
                    "parameters.flea_offset",
                    "flea must stay inside its cell",
                ));
            }
            let g2 = p
                .grid()
                .map_err(|e| semantic("parameters.nodes_per_cell", e.to_string()))?;
            let grid: Grid = g2.clone().into();
            check_flea(
                "parameters.flea_offset",
                &PotentialSpec::GaussianLattice(lattice),
                &p.flea_spec(&g2),
                &grid,
            )?;
        }
        Experiment::CwScan(p) => {
            if p.sizes.is_empty() || p.sizes.contains(&0) {
                return Err(semantic(
                    "parameters.sizes",
                    "need a nonempty list of positive sizes",
                ));
            }
            check_positive("parameters.j", p.j)?;
            if !(p.b >= 0.0 && p.b.is_finite()) {
                return Err(semantic(
                    "parameters.b",
                    format!("must be nonnegative, got {}", p.b),
                ));
            }
            if let Some(f) = &p.flea {
                check_flea_width("parameters.flea.c", f.c)?;
                f.flea()
                    .validate(p.j, p.b)
                    .map_err(|e| semantic("parameters.flea", e.to_string()))?;
            }
        }
        Experiment::IsingLimits(p) => {
            if p.sizes.is_empty() || p.sizes.iter().any(|&n| n == 0 || n > MAX_CHAIN) {
                return Err(semantic(
                    "parameters.sizes",
                    format!("need a nonempty list of chain lengths in 1..={MAX_CHAIN}"),
                ));
            }
            if p.epsilons.is_empty() {
                return Err(semantic("parameters.epsilons", "list must not be empty"));
            }
            for (i, e) in p.epsilons.iter().enumerate() {
                check_finite(&format!("parameters.epsilons[{i}]"), *e)?;
            }
            check_finite("parameters.j", p.j)?;
            check_finite("parameters.b", p.b)?;
        }
        Experiment::HarmonicOracle(p) => {
            check_hbar("parameters.hbar", p.hbar)?;
            check_positive("parameters.omega", p.omega)?;
            check_tol(p.tol)?;
            let grid = check_grid("parameters.grid", &p.grid)?;
            check_resolution("parameters.grid", &grid, &[p.hbar])?;
            if p.phase_min >= p.phase_max || !p.phase_min.is_finite() || !p.phase_max.is_finite() {
                return Err(semantic(
                    "parameters.phase_min",
                    "phase window must be a finite interval",
                ));
            }
            check_nodes("parameters.phase_nodes", p.phase_nodes, 2)?;
        }
    }
    Ok(())
}
