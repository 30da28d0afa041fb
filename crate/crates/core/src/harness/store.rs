//! JSON solution files.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::helium::HeliumState;
use crate::hooke::{EnergyComponents, HookeState};
use crate::ksinv::{self, KsSystem};
use crate::numerics::{RadialField, RadialGrid};
use crate::state::CorrelatedState;
use crate::system::{Family, Flavour, SystemRecord, SystemSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Uniform grid `[0, r_max]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub r_max: f64,
    pub n: usize,
}

impl UniformGrid {
    fn of(grid: &RadialGrid) -> Result<Self> {
        grid.spacing().ok_or_else(|| Error::Contract("only uniform grids can be stored".into()))?;
        Ok(Self { r_max: grid.r_max(), n: grid.len() })
    }

    fn build(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::uniform(self.r_max, self.n)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    pub e_total: f64,
    pub ionization: f64,
    pub components: EnergyComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub density: UniformGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<UniformGrid>,
}

/// Kohn-Sham block: potential sampled on the density grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsBlock {
    pub eps_ks: f64,
    pub valid_r_max: f64,
    pub v_ks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tolerances: BTreeMap<String, f64>,
    pub quadrature: String,
    pub build: String,
}

impl Provenance {
    pub fn current(quadrature: String) -> Self {
        let tolerances = [
            ("hooke_richardson", crate::hooke::RICHARDSON_TOL),
            ("hooke_leakage", crate::hooke::LEAKAGE_TOL),
            ("density_norm", crate::hooke::DENSITY_NORM_TOL),
            ("helium_overlap", crate::helium::OVERLAP_TOL),
            ("ks_density_floor", ksinv::DENSITY_FLOOR),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self { tolerances, quadrature, build: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")) }
    }
}

/// On-disk form of a solved many-body system and, optionally, its KS inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub kind: Family,
    pub spec: SystemSpec,
    pub energies: Energies,
    pub grids: Grids,
    pub density: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_orbital: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<KsBlock>,
    pub provenance: Provenance,
    /// Fields written by other tools, kept verbatim.
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl SolutionFile {
    pub fn from_record(rec: &SystemRecord) -> Result<Self> {
        if rec.flavour != Flavour::ManyBody {
            return Err(Error::Contract("solution files hold many-body systems".into()));
        }
        let (coefficients, omega_used, relative_orbital, relative, quadrature) = match &rec.state {
            CorrelatedState::Hooke(s) => {
                let chi = s.relative_orbital();
                let g = UniformGrid::of(chi.grid())?;
                (
                    None,
                    None,
                    Some(chi.values().to_vec()),
                    Some(g),
                    format!("finite differences, {} relative nodes", g.n),
                )
            }
            CorrelatedState::Helium(s) => (
                Some(s.coeffs().to_vec()),
                Some(s.omega()),
                None,
                None,
                format!("Gauss-Laguerre one-body rules, {}-point ratio rule", crate::helium::RATIO_POINTS),
            ),
            CorrelatedState::Product(_) => return Err(Error::Contract("product states are not stored".into())),
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            kind: rec.family(),
            spec: rec.spec,
            energies: Energies { e_total: rec.e_total, ionization: rec.ionization, components: rec.components },
            grids: Grids { density: UniformGrid::of(rec.density.grid())?, relative },
            density: rec.density.values().to_vec(),
            coefficients,
            omega_used,
            relative_orbital,
            ks: None,
            provenance: Provenance::current(quadrature),
            extra: Map::new(),
        })
    }

    pub fn with_ks(mut self, ks: &KsSystem) -> Self {
        self.ks = Some(KsBlock { eps_ks: ks.eps_ks, valid_r_max: ks.valid_r_max, v_ks: ks.v_ks.values().to_vec() });
        self
    }

    /// Rebuild the many-body record without re-solving.
    pub fn record(&self) -> Result<SystemRecord> {
        if self.kind != self.spec.family() {
            return Err(Error::Schema(format!("kind '{}' disagrees with spec family", self.kind.name())));
        }
        let grid = self.grids.density.build()?;
        let density = RadialField::new(grid, self.density.clone())?;
        let state = match self.spec {
            SystemSpec::Hooke(spec) => {
                let (Some(g), Some(chi)) = (&self.grids.relative, &self.relative_orbital) else {
                    return Err(Error::Schema("hooke file lacks the relative orbital".into()));
                };
                CorrelatedState::Hooke(HookeState::new(spec, RadialField::new(g.build()?, chi.clone())?)?)
            }
            SystemSpec::Helium(spec) => {
                let Some(c) = &self.coefficients else {
                    return Err(Error::Schema("helium file lacks coefficients".into()));
                };
                let omega = self.omega_used.unwrap_or(spec.effective_omega());
                CorrelatedState::Helium(HeliumState::new(spec.z, omega, c.clone())?)
            }
        };
        Ok(SystemRecord {
            spec: self.spec,
            flavour: Flavour::ManyBody,
            e_total: self.energies.e_total,
            ionization: self.energies.ionization,
            density,
            state,
            potential: self.spec.external_potential(),
            interaction: self.spec.lambda(),
            components: self.energies.components,
        })
    }

    /// The stored KS inversion, if any, as a system and its record.
    pub fn ks_record(&self, mb: &SystemRecord) -> Result<Option<(KsSystem, SystemRecord)>> {
        let Some(block) = &self.ks else { return Ok(None) };
        let orbital = ksinv::ks_orbital(&mb.density)?;
        let v = RadialField::new(mb.density.grid().clone(), block.v_ks.clone())?;
        let ks = ksinv::ks_two_electron(
            orbital,
            v,
            block.eps_ks,
            mb.density.clone(),
            block.valid_r_max,
            mb.state.length_scale(),
        )?;
        let rec = mb.kohn_sham(&ks);
        Ok(Some((ks, rec)))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Schema(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Parse with the schema gate applied before the typed decode.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let parse = |e: serde_json::Error| Error::Parse { path: origin.to_string(), message: e.to_string() };
        let value: Value = serde_json::from_str(text).map_err(parse)?;
        let version = value
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Schema(format!("{origin}: missing schema_version")))?;
        if version > SCHEMA_VERSION as u64 {
            return Err(Error::Schema(format!(
                "{origin}: schema_version {version} is newer than the supported {SCHEMA_VERSION}; upgrade the tool"
            )));
        }
        if version < SCHEMA_VERSION as u64 {
            return Err(Error::Schema(format!("{origin}: no migration from schema_version {version}")));
        }
        serde_json::from_value(value).map_err(parse)
    }
}

pub fn store(file: &SolutionFile, path: &Path) -> Result<()> {
    std::fs::write(path, file.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<SolutionFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SolutionFile::from_json(&text, &path.display().to_string())
}
