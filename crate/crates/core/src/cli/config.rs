//! JSON run configuration.
//!
//! The file is parsed into `Raw*` mirrors of the documented schema and then
//! resolved into a [`RunConfig`] with every grid expanded and every physical
//! quantity converted to internal units (frequencies in units of omega0).
//! All validation failures become [`Error::Config`] carrying the JSON path of
//! the offending field.

use std::path::Path;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Deserialize;

use crate::dynamics::Method;
use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, DensityMatrix};
use crate::qdphonon::{self, DimensionlessParams, Material, ModePoint, QdGeometry, Threshold};
use crate::rates::Scheme;
use crate::twolevel::TwoLevelParams;
use crate::units::{ps_to_omega0_time, ELECTRON_MASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Spectrum,
    Evolve,
    Partition,
    RatesDump,
    Compare,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Evolve => "evolve",
            Mode::Partition => "partition",
            Mode::RatesDump => "rates-dump",
            Mode::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum RawScheme {
    #[serde(rename = "CM")]
    Cm,
    #[serde(rename = "SYM")]
    Sym,
    #[serde(rename = "BOTH")]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum RawMethod {
    #[serde(rename = "EXPM")]
    Expm,
    #[serde(rename = "RK4")]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    SigmaRatio,
    Sigma,
    #[serde(rename = "N_tilde")]
    NTilde,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::SigmaRatio => "sigma_ratio",
            SweepParam::Sigma => "sigma",
            SweepParam::NTilde => "N_tilde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    Omega0,
    Ps,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    scheme: Option<RawScheme>,
    dimensionless: Option<RawDimensionless>,
    physical: Option<RawPhysical>,
    sweep: Option<RawSweep>,
    time: Option<RawTime>,
    method: Option<RawMethod>,
    initial_state: Option<RawInitial>,
    omega_bar: Option<f64>,
    partition: Option<RawPartition>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawDimensionless {
    omega0_meV: Option<f64>,
    eta2: f64,
    #[serde(default)]
    zeta: f64,
    sigma: f64,
    N_tilde: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawMaterial {
    eps_def_meV: Option<f64>,
    rho_kg_m3: Option<f64>,
    c_s_m_s: Option<f64>,
    V_nm3: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawGeometry {
    d_nm: Option<f64>,
    a_per_nm: Option<f64>,
    E_loc_meV: Option<f64>,
    m_eff_me: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawDrive {
    hbar_omega0_meV: f64,
    N_tilde: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    #[serde(default)]
    material: RawMaterial,
    #[serde(default)]
    geometry: RawGeometry,
    drive: Option<RawDrive>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
    #[serde(default)]
    scale: Scale,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_max: f64,
    points: usize,
    #[serde(default)]
    unit: TimeUnit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    from: f64,
    to: f64,
    points: usize,
    #[serde(default)]
    scale: Scale,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawTableRow {
    hbar_omega0_meV: f64,
    eta2: f64,
    sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawPartition {
    N_tilde: RawRange,
    hbar_omega0_meV: Option<RawRange>,
    table: Option<Vec<RawTableRow>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExplicit {
    re: Vec<Vec<f64>>,
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawInitial {
    Named(String),
    Explicit { explicit: RawExplicit },
}

/// The two-level model in internal units (omega0 = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub params: TwoLevelParams,
    /// hbar omega0 in meV, when known; needed for picosecond time axes.
    pub hbar_omega0_mev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub unit: TimeUnit,
    /// Grid in the configured unit, as written to the output.
    pub values: Vec<f64>,
    /// Same grid in units of 1/omega0.
    pub internal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Ground,
    Steady,
    Random,
    Explicit(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyAxis {
    /// Energies for the physical closed forms.
    Physical {
        material: Material,
        geometry: QdGeometry,
        energies: Vec<f64>,
    },
    /// Precomputed (eta^2, sigma) per energy.
    Table(Vec<ModePoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    pub n_grid: Vec<f64>,
    pub energies: EnergyAxis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub schemes: Vec<Scheme>,
    pub model: Option<Model>,
    pub sweep: Option<Sweep>,
    pub time: Option<TimeGrid>,
    pub method: Method,
    pub initial_state: InitialState,
    /// Coarse-graining width in units of omega0.
    pub omega_bar: f64,
    pub partition: Option<PartitionSpec>,
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path, mode: Mode, seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, mode, seed)
    }

    /// `seed` overrides the seed in the document.
    pub fn from_json(text: &str, mode: Mode, seed: Option<u64>) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })?;
        resolve(raw, mode, seed)
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(path, format!("must be > 0, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(path, format!("must be >= 0, got {v}")))
    }
}

fn grid(path: &str, from: f64, to: f64, points: usize, scale: Scale) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::config(format!("{path}.points"), format!("must be >= 2, got {points}")));
    }
    if !from.is_finite() || !to.is_finite() || to <= from {
        return Err(Error::config(path, format!("need finite from < to, got [{from}, {to}]")));
    }
    let last = (points - 1) as f64;
    let values = match scale {
        Scale::Linear => (0..points).map(|i| from + (to - from) * i as f64 / last).collect::<Vec<_>>(),
        Scale::Log => {
            if from <= 0.0 {
                return Err(Error::config(format!("{path}.from"), "log scale needs from > 0"));
            }
            let (a, b) = (from.ln(), to.ln());
            (0..points).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
        }
    };
    let mut values = values;
    values[0] = from;
    values[points - 1] = to;
    Ok(values)
}

fn resolve_model(raw: &RawConfig) -> Result<Option<Model>> {
    match (&raw.dimensionless, &raw.physical) {
        (Some(_), Some(_)) => Err(Error::config(
            "<root>",
            "exactly one of `dimensionless` and `physical` may be given",
        )),
        (None, None) => Err(Error::config("<root>", "one of `dimensionless` or `physical` is required")),
        (Some(d), None) => {
            let eta2 = non_negative("dimensionless.eta2", d.eta2)?;
            let sigma = non_negative("dimensionless.sigma", d.sigma)?;
            let n = non_negative("dimensionless.N_tilde", d.N_tilde)?;
            if !d.zeta.is_finite() {
                return Err(Error::config("dimensionless.zeta", "must be finite"));
            }
            let hbar_omega0_mev = d.omega0_meV.map(|e| positive("dimensionless.omega0_meV", e)).transpose()?;
            let params = TwoLevelParams::dimensionless(eta2.sqrt(), d.zeta, sigma, n)
                .map_err(|e| Error::config("dimensionless", e.to_string()))?;
            Ok(Some(Model {
                params,
                hbar_omega0_mev,
            }))
        }
        (None, Some(p)) => {
            let Some(drive) = &p.drive else {
                return Ok(None);
            };
            let (material, geometry) = resolve_physical(p)?;
            let e = positive("physical.drive.hbar_omega0_meV", drive.hbar_omega0_meV)?;
            let n = non_negative("physical.drive.N_tilde", drive.N_tilde)?;
            let d = qdphonon::dispersion(&material, &geometry, e, n)
                .and_then(|d| DimensionlessParams::from_physical(&material, &geometry, &d))
                .map_err(|err| Error::config("physical.drive.hbar_omega0_meV", err.to_string()))?;
            let params = d.two_level().map_err(|err| Error::config("physical", err.to_string()))?;
            Ok(Some(Model {
                params,
                hbar_omega0_mev: Some(e),
            }))
        }
    }
}

fn resolve_physical(p: &RawPhysical) -> Result<(Material, QdGeometry)> {
    let dm = Material::default();
    let m = &p.material;
    let material = Material {
        eps_def_mev: positive("physical.material.eps_def_meV", m.eps_def_meV.unwrap_or(dm.eps_def_mev))?,
        rho_mass: positive("physical.material.rho_kg_m3", m.rho_kg_m3.unwrap_or(dm.rho_mass))?,
        c_s: positive("physical.material.c_s_m_s", m.c_s_m_s.unwrap_or(dm.c_s))?,
        volume: positive("physical.material.V_nm3", m.V_nm3.map_or(dm.volume, |v| v * 1e-27))?,
    };
    let dg = QdGeometry::default();
    let g = &p.geometry;
    let geometry = QdGeometry {
        d: positive("physical.geometry.d_nm", g.d_nm.map_or(dg.d, |v| v * 1e-9))?,
        a: positive("physical.geometry.a_per_nm", g.a_per_nm.map_or(dg.a, |v| v * 1e9))?,
        e_loc_mev: positive("physical.geometry.E_loc_meV", g.E_loc_meV.unwrap_or(dg.e_loc_mev))?,
        m_eff: positive("physical.geometry.m_eff_me", g.m_eff_me.map_or(dg.m_eff, |v| v * ELECTRON_MASS))?,
    };
    Ok((material, geometry))
}

fn resolve_sweep(s: &RawSweep, model: &Model) -> Result<Sweep> {
    let values = grid("sweep", s.from, s.to, s.points, s.scale)?;
    if values[0] < 0.0 {
        return Err(Error::config("sweep.from", "sweep values must be >= 0"));
    }
    if s.param == SweepParam::SigmaRatio {
        let p = &model.params;
        if qdphonon::sigma_crit(p.eta, p.n_tilde) == Threshold::Unbounded {
            return Err(Error::config(
                "sweep.param",
                "sigma_bar is unbounded for |eta| <= 1; sweep `sigma` instead",
            ));
        }
    }
    Ok(Sweep {
        param: s.param,
        values,
    })
}

fn resolve_time(t: &RawTime, model: &Model) -> Result<TimeGrid> {
    let t_max = positive("time.t_max", t.t_max)?;
    let values = grid("time", 0.0, t_max, t.points, Scale::Linear)?;
    let internal = match t.unit {
        TimeUnit::Omega0 => values.clone(),
        TimeUnit::Ps => {
            let Some(e) = model.hbar_omega0_mev else {
                return Err(Error::config("time.unit", "`ps` needs a phonon energy (dimensionless.omega0_meV)"));
            };
            values.iter().map(|&t| ps_to_omega0_time(t, e)).collect()
        }
    };
    Ok(TimeGrid {
        unit: t.unit,
        values,
        internal,
    })
}

fn resolve_initial(raw: &Option<RawInitial>) -> Result<InitialState> {
    match raw {
        None => Ok(InitialState::Ground),
        Some(RawInitial::Named(name)) => match name.as_str() {
            "ground" => Ok(InitialState::Ground),
            "steady" => Ok(InitialState::Steady),
            "random" => Ok(InitialState::Random),
            other => Err(Error::config(
                "initial_state",
                format!("unknown state `{other}`; expected ground, steady, random or {{\"explicit\": ...}}"),
            )),
        },
        Some(RawInitial::Explicit { explicit }) => {
            let path = "initial_state.explicit";
            let shape_ok = |m: &Vec<Vec<f64>>| m.len() == 2 && m.iter().all(|r| r.len() == 2);
            let zero = vec![vec![0.0; 2]; 2];
            let im = explicit.im.as_ref().unwrap_or(&zero);
            if !shape_ok(&explicit.re) || !shape_ok(im) {
                return Err(Error::config(path, "re and im must be 2x2"));
            }
            let m = CMatrix::from_fn(2, 2, |r, c| Complex64::new(explicit.re[r][c], im[r][c]));
            DensityMatrix::new(m)
                .map(InitialState::Explicit)
                .map_err(|e| Error::config(path, e.to_string()))
        }
    }
}

fn resolve_partition(raw: &RawConfig, model: &Option<Model>) -> Result<PartitionSpec> {
    let Some(p) = &raw.partition else {
        return Err(Error::config("partition", "required for partition runs"));
    };
    let n_grid = grid("partition.N_tilde", p.N_tilde.from, p.N_tilde.to, p.N_tilde.points, p.N_tilde.scale)?;
    if n_grid[0] < 0.0 {
        return Err(Error::config("partition.N_tilde.from", "must be >= 0"));
    }
    let energies = if let Some(phys) = &raw.physical {
        let Some(r) = &p.hbar_omega0_meV else {
            return Err(Error::config("partition.hbar_omega0_meV", "required with a physical model"));
        };
        let (material, geometry) = resolve_physical(phys)?;
        let energies = grid("partition.hbar_omega0_meV", r.from, r.to, r.points, r.scale)?;
        if energies[0] <= geometry.e_loc_mev {
            return Err(Error::config(
                "partition.hbar_omega0_meV.from",
                format!("must exceed the localization energy {} meV", geometry.e_loc_mev),
            ));
        }
        EnergyAxis::Physical {
            material,
            geometry,
            energies,
        }
    } else if let Some(table) = &p.table {
        if table.is_empty() {
            return Err(Error::config("partition.table", "must not be empty"));
        }
        let mut rows = Vec::with_capacity(table.len());
        for (i, row) in table.iter().enumerate() {
            rows.push(ModePoint {
                hbar_omega0_mev: positive(&format!("partition.table[{i}].hbar_omega0_meV"), row.hbar_omega0_meV)?,
                eta2: non_negative(&format!("partition.table[{i}].eta2"), row.eta2)?,
                sigma: non_negative(&format!("partition.table[{i}].sigma"), row.sigma)?,
            });
        }
        EnergyAxis::Table(rows)
    } else {
        let m = model.as_ref().expect("dimensionless model resolved");
        let Some(e) = m.hbar_omega0_mev else {
            return Err(Error::config(
                "dimensionless.omega0_meV",
                "required for a partition without `partition.table`",
            ));
        };
        EnergyAxis::Table(vec![ModePoint {
            hbar_omega0_mev: e,
            eta2: m.params.eta.norm_sqr(),
            sigma: m.params.sigma,
        }])
    };
    Ok(PartitionSpec { n_grid, energies })
}

fn resolve(raw: RawConfig, mode: Mode, seed: Option<u64>) -> Result<RunConfig> {
    if let Some(m) = raw.mode {
        if m != mode {
            return Err(Error::config(
                "mode",
                format!("config says `{}` but `{}` was requested", m.as_str(), mode.as_str()),
            ));
        }
    }
    let model = resolve_model(&raw)?;
    let need_model = || {
        model.ok_or_else(|| Error::config("physical.drive", format!("required for {} runs", mode.as_str())))
    };
    let schemes = match raw.scheme.unwrap_or(RawScheme::Both) {
        RawScheme::Cm => vec![Scheme::Cm],
        RawScheme::Sym => vec![Scheme::Sym],
        RawScheme::Both => vec![Scheme::Cm, Scheme::Sym],
    };
    let omega_bar = positive("omega_bar", raw.omega_bar.unwrap_or(1e-3))?;
    let method = match raw.method.unwrap_or(RawMethod::Expm) {
        RawMethod::Expm => Method::Expm,
        RawMethod::Rk4 => Method::Rk4,
    };
    let initial_state = resolve_initial(&raw.initial_state)?;

    let mut sweep = None;
    let mut time = None;
    let mut partition = None;
    match mode {
        Mode::Spectrum => {
            let m = need_model()?;
            let s = raw.sweep.as_ref().ok_or_else(|| Error::config("sweep", "required for spectrum runs"))?;
            sweep = Some(resolve_sweep(s, &m)?);
        }
        Mode::Evolve | Mode::Compare => {
            let m = need_model()?;
            let t = raw.time.as_ref().ok_or_else(|| Error::config("time", "required for time evolution"))?;
            time = Some(resolve_time(t, &m)?);
            if mode == Mode::Compare && schemes.len() != 2 {
                return Err(Error::config("scheme", "compare runs need `BOTH`"));
            }
        }
        Mode::RatesDump => {
            need_model()?;
        }
        Mode::Partition => {
            partition = Some(resolve_partition(&raw, &model)?);
        }
    }
    Ok(RunConfig {
        mode,
        schemes,
        model,
        sweep,
        time,
        method,
        initial_state,
        omega_bar,
        partition,
        seed: seed.or(raw.seed).unwrap_or(0),
    })
}
