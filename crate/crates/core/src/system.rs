//! A solved two-electron system in the form consumed by the metrics.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::helium::{self, HeliumSolution, HeliumSpec};
use crate::hooke::{self, EnergyComponents, HookeSolution, HookeSpec};
use crate::ksinv::{self, KsSystem};
use crate::numerics::RadialField;
use crate::state::CorrelatedState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Hooke,
    Helium,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hooke => "hooke",
            Family::Helium => "helium",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hooke" => Ok(Family::Hooke),
            "helium" => Ok(Family::Helium),
            _ => Err(crate::Error::Contract(format!("unknown family '{s}' (expected hooke or helium)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum SystemSpec {
    Hooke(HookeSpec),
    Helium(HeliumSpec),
}

impl SystemSpec {
    pub fn family(&self) -> Family {
        match self {
            SystemSpec::Hooke(_) => Family::Hooke,
            SystemSpec::Helium(_) => Family::Helium,
        }
    }

    /// ω or Z.
    pub fn param(&self) -> f64 {
        match self {
            SystemSpec::Hooke(s) => s.omega,
            SystemSpec::Helium(s) => s.z,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            SystemSpec::Hooke(s) => s.lambda,
            SystemSpec::Helium(s) => s.lambda,
        }
    }

    /// Ground energy of the one-electron remnant.
    pub fn remnant_energy(&self) -> f64 {
        match self {
            SystemSpec::Hooke(s) => 1.5 * s.omega,
            SystemSpec::Helium(s) => -0.5 * s.z * s.z,
        }
    }

    pub fn external_potential(&self) -> Potential {
        match self {
            SystemSpec::Hooke(s) => Potential::Harmonic { omega: s.omega },
            SystemSpec::Helium(s) => Potential::Coulomb { z: s.z },
        }
    }
}

/// One-body potential of a system.
#[derive(Debug, Clone)]
pub enum Potential {
    Harmonic { omega: f64 },
    Coulomb { z: f64 },
    Tabulated(RadialField),
}

impl Potential {
    pub fn at(&self, r: f64) -> f64 {
        match self {
            Potential::Harmonic { omega } => 0.5 * omega * omega * r * r,
            Potential::Coulomb { z } => -z / r,
            Potential::Tabulated(f) => {
                let s = f.spline();
                match s.eval(r) {
                    Some(v) => v,
                    None => *f.values().last().unwrap_or(&0.0),
                }
            }
        }
    }

    pub fn sample(&self, radii: &[f64]) -> Vec<f64> {
        match self {
            Potential::Tabulated(f) => {
                let s = f.spline();
                let last = *f.values().last().unwrap_or(&0.0);
                radii.iter().map(|&r| s.eval(r).unwrap_or(last)).collect()
            }
            _ => radii.iter().map(|&r| self.at(r)).collect(),
        }
    }
}

/// Many-body or Kohn-Sham flavour of a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavour {
    ManyBody,
    KohnSham,
}

/// Everything the metrics need about one solved system.
#[derive(Debug, Clone)]
pub struct SystemRecord {
    pub spec: SystemSpec,
    pub flavour: Flavour,
    pub e_total: f64,
    pub ionization: f64,
    pub density: RadialField,
    pub state: CorrelatedState,
    pub potential: Potential,
    /// Interaction strength multiplying `1/r12` (0 for Kohn-Sham systems).
    pub interaction: f64,
    pub components: EnergyComponents,
}

impl SystemRecord {
    pub fn family(&self) -> Family {
        self.spec.family()
    }

    pub fn param(&self) -> f64 {
        self.spec.param()
    }

    pub fn remnant_energy(&self) -> f64 {
        self.spec.remnant_energy()
    }

    pub fn from_hooke(s: &HookeSolution) -> Self {
        let spec = SystemSpec::Hooke(s.spec);
        Self {
            spec,
            flavour: Flavour::ManyBody,
            e_total: s.e_total,
            ionization: s.ionization,
            density: s.density.clone(),
            state: s.state.clone(),
            potential: spec.external_potential(),
            interaction: s.spec.lambda,
            components: s.components,
        }
    }

    pub fn from_helium(s: &HeliumSolution) -> Self {
        let spec = SystemSpec::Helium(s.spec);
        Self {
            spec,
            flavour: Flavour::ManyBody,
            e_total: s.e_total,
            ionization: s.ionization,
            density: s.density.clone(),
            state: s.state.clone(),
            potential: spec.external_potential(),
            interaction: s.spec.lambda,
            components: s.components,
        }
    }

    /// Solve a many-body system from its spec.
    pub fn solve(spec: &SystemSpec, exec: Execution) -> Result<Self> {
        match spec {
            SystemSpec::Hooke(h) => Ok(Self::from_hooke(&hooke::assemble_solution(h, hooke::DEFAULT_GRID_N, exec)?)),
            SystemSpec::Helium(h) => Ok(Self::from_helium(&helium::solve(h, exec)?)),
        }
    }

    /// Kohn-Sham record built from this system's inversion.
    pub fn kohn_sham(&self, ks: &KsSystem) -> Self {
        Self {
            spec: self.spec,
            flavour: Flavour::KohnSham,
            e_total: ks.e_ks_total,
            ionization: ks.eps_ks,
            density: ks.density.clone(),
            state: ks.state.clone(),
            potential: Potential::Tabulated(ks.v_ks.clone()),
            interaction: 0.0,
            components: EnergyComponents { t: f64::NAN, u: 0.0, v: f64::NAN },
        }
    }

    pub fn invert(&self) -> Result<(KsSystem, SystemRecord)> {
        let ks = ksinv::invert(self)?;
        let rec = self.kohn_sham(&ks);
        Ok((ks, rec))
    }
}
