//! Experiment configuration files.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use specflow::cf_arith::CfContext;
use specflow::hamlab::{HamiltonianSystem, Mode, TrigPoly2, Weight};
use specflow::roof::{presets, RoofPC};
use specflow::symreal::{Basis, SymReal};
use specflow::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: Option<AlphaSpec>,
    #[serde(default)]
    pub basis: Option<BasisSpec>,
    #[serde(default)]
    pub alpha_action: BTreeMap<String, Literal>,
    #[serde(default)]
    pub products: Vec<ProductSpec>,
    pub roof: Option<RoofSpec>,
    pub hamiltonian: Option<HamSpec>,
    /// Subcommand parameters; each subcommand reads its own fields.
    #[serde(default)]
    pub params: serde_json::Value,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Preset { preset: String },
    Digits {
        #[serde(default)]
        cf_prefix: Vec<u32>,
        cf_period: Vec<u32>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    /// `"standard"`: `1, α, b = √3, αb, γ = √5 − 2, bγ`.
    Named(String),
    Symbols(Vec<SymbolSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub name: String,
    pub eval: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub a: String,
    pub b: String,
    pub value: Literal,
}

/// Exact value: a linear expression such as `"1 + b"` or a map from basis
/// names to fraction strings.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Expr(String),
    Int(i64),
    Coords(BTreeMap<String, String>),
}

impl Literal {
    pub fn resolve(&self, basis: &Basis) -> Result<SymReal> {
        match self {
            Literal::Expr(s) => basis.parse_literal(s),
            Literal::Int(n) => Ok(SymReal::int(*n)),
            Literal::Coords(m) => basis.from_named_coords(m.iter().map(|(k, v)| (k.as_str(), v.as_str()))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RoofSpec {
    Preset(String),
    Named { preset: String },
    Explicit { xi: Vec<Literal>, d: Vec<Literal>, v1: Literal },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum HamSpec {
    /// `"trap"` with the frequencies of `alpha`, or an explicit system.
    Preset(String),
    Named {
        preset: String,
        alpha1: f64,
        alpha2: f64,
    },
    Explicit {
        alpha1: f64,
        alpha2: f64,
        #[serde(rename = "P", default)]
        p: Vec<Mode>,
        g: WeightSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Modes(Vec<Mode>),
    Full {
        modes: Vec<Mode>,
        #[serde(default)]
        vertices: Vec<(f64, f64)>,
    },
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }

    pub fn context(&self) -> Result<Arc<CfContext>> {
        let spec = self.alpha.as_ref().ok_or_else(|| Error::Config("missing \"alpha\"".into()))?;
        let ctx = match spec {
            AlphaSpec::Preset { preset } => CfContext::preset(preset).map_err(|e| Error::Config(e.to_string()))?,
            AlphaSpec::Digits { cf_prefix, cf_period } => CfContext::periodic(cf_prefix.clone(), cf_period.clone())
                .map_err(|e| Error::Config(e.to_string()))?,
        };
        Ok(Arc::new(ctx))
    }

    pub fn basis(&self) -> Result<Arc<Basis>> {
        let ctx = self.context()?;
        let mut basis = match &self.basis {
            None => presets::standard_basis(ctx)?,
            Some(BasisSpec::Named(n)) if n == "standard" => presets::standard_basis(ctx)?,
            Some(BasisSpec::Named(n)) => return Err(Error::Config(format!("unknown basis {n:?}"))),
            Some(BasisSpec::Symbols(syms)) => {
                let mut b = Basis::new(ctx);
                for s in syms {
                    b.add_symbol(&s.name, &s.eval).map_err(as_config)?;
                }
                b
            }
        };
        for (name, lit) in &self.alpha_action {
            let v = lit.resolve(&basis)?;
            basis.set_alpha_action(name, v).map_err(as_config)?;
        }
        for p in &self.products {
            let v = p.value.resolve(&basis)?;
            basis.set_product(&p.a, &p.b, v).map_err(as_config)?;
        }
        Ok(Arc::new(basis))
    }

    pub fn roof(&self) -> Result<RoofPC> {
        let spec = self.roof.as_ref().ok_or_else(|| Error::Config("missing \"roof\"".into()))?;
        let basis = self.basis()?;
        match spec {
            RoofSpec::Preset(name) | RoofSpec::Named { preset: name } => presets::by_name(name, basis),
            RoofSpec::Explicit { xi, d, v1 } => {
                let xi = xi.iter().map(|l| l.resolve(&basis)).collect::<Result<Vec<_>>>()?;
                let d = d.iter().map(|l| l.resolve(&basis)).collect::<Result<Vec<_>>>()?;
                let v1 = v1.resolve(&basis)?;
                RoofPC::new(basis, xi, d, v1)
            }
        }
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSystem> {
        let spec = self.hamiltonian.as_ref().ok_or_else(|| Error::Config("missing \"hamiltonian\"".into()))?;
        let trap = |a1: f64, a2: f64| HamiltonianSystem::trap_fixture(a1, a2);
        match spec {
            HamSpec::Preset(name) if name == "trap" => trap(self.context()?.alpha_f64(), 1.0),
            HamSpec::Named { preset, alpha1, alpha2 } if preset == "trap" => trap(*alpha1, *alpha2),
            HamSpec::Preset(name) | HamSpec::Named { preset: name, .. } => {
                Err(Error::Config(format!("unknown hamiltonian preset {name:?}")))
            }
            HamSpec::Explicit { alpha1, alpha2, p, g } => {
                let g = match g {
                    WeightSpec::Modes(m) => Weight { poly: TrigPoly2::new(m.clone()), vertices: Vec::new() },
                    WeightSpec::Full { modes, vertices } => {
                        Weight { poly: TrigPoly2::new(modes.clone()), vertices: vertices.clone() }
                    }
                };
                HamiltonianSystem::new(*alpha1, *alpha2, TrigPoly2::new(p.clone()), g)
            }
        }
    }

    /// Subcommand parameters deserialized into `T`.
    pub fn params<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        let v = if self.params.is_null() { serde_json::json!({}) } else { self.params.clone() };
        serde_json::from_value(v).map_err(|e| Error::Config(format!("bad params: {e}")))
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
