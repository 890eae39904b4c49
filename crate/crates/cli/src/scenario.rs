//! Scenario files: a domain, an experiment kind with its parameters, a seed.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lineal_core::catalog::builtin_domains;
use lineal_core::{Domain, DomainConfig, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Contact,
    Slice,
    SupportVerify,
    TauScan,
    Basis,
    Dist,
    Props,
    Holder,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Contact => "contact",
            ExperimentKind::Slice => "slice",
            ExperimentKind::SupportVerify => "support-verify",
            ExperimentKind::TauScan => "tau-scan",
            ExperimentKind::Basis => "basis",
            ExperimentKind::Dist => "dist",
            ExperimentKind::Props => "props",
            ExperimentKind::Holder => "holder",
        }
    }

    /// Kinds whose results depend on random sampling.
    pub fn needs_seed(self) -> bool {
        matches!(
            self,
            ExperimentKind::SupportVerify
                | ExperimentKind::Basis
                | ExperimentKind::Dist
                | ExperimentKind::Props
                | ExperimentKind::Holder
        )
    }
}

/// A built-in name, an inline configuration, or a path to a TOML/JSON file
/// holding one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainRef {
    Builtin(String),
    File { file: PathBuf },
    Inline(DomainConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    domain: DomainRef,
    kind: ExperimentKind,
    #[serde(default)]
    params: Option<serde_json::Value>,
    #[serde(default)]
    output: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Complex vectors are written as lists of `[re, im]` pairs.
pub type PointSpec = Vec<[f64; 2]>;

pub fn to_point(p: &PointSpec) -> Point {
    p.iter().map(|[a, b]| Complex64::new(*a, *b)).collect()
}

pub fn from_point(p: &[Complex64]) -> PointSpec {
    p.iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    /// Defaults to the coordinate axes `e2, ..., en`.
    #[serde(default)]
    pub directions: Option<Vec<PointSpec>>,
    #[serde(default = "default_steps")]
    pub exceptional_steps: usize,
    #[serde(default = "yes")]
    pub linear_type: bool,
    #[serde(default = "default_multistart")]
    pub multistart: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    pub t: PointSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SignSpec {
    Named(String),
    Explicit(Vec<i8>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    #[serde(default = "default_eps_corr")]
    pub eps_corr: f64,
    /// Sign choices tried in order; `"standard"`, `"opposite"` or explicit lists.
    #[serde(default = "default_signs")]
    pub signs: Vec<SignSpec>,
    #[serde(default)]
    pub tangents: Option<Vec<PointSpec>>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_support_samples")]
    pub nsamples: usize,
    /// Scales for the two support-function lemmas; empty skips them.
    #[serde(default)]
    pub lemma_eps: Vec<f64>,
    #[serde(default = "default_lemma_points")]
    pub lemma_points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauScanParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    pub gamma: PointSpec,
    #[serde(default = "default_eps_min")]
    pub eps_min: f64,
    #[serde(default = "default_eps_max")]
    pub eps_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    pub eps: f64,
    #[serde(default = "default_basis_multistart")]
    pub multistart: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistParams {
    #[serde(default)]
    pub zeta: Option<PointSpec>,
    pub points: Vec<PointSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsParams {
    #[serde(default = "default_props_samples")]
    pub nsamples: usize,
    /// Subset of `"i"`..`"v"`; all by default.
    #[serde(default)]
    pub properties: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderParams {
    /// Polynomial expression in `z`, `conj(z)`, `x`, `y`.
    pub function: String,
    pub mu: f64,
    #[serde(default = "default_eps_h")]
    pub eps_h: f64,
    #[serde(default = "default_npairs")]
    pub npairs: usize,
    #[serde(default = "default_anchors")]
    pub anchors: usize,
    #[serde(default)]
    pub direction: Option<PointSpec>,
    #[serde(default)]
    pub csv: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Params {
    Contact(ContactParams),
    Slice(SliceParams),
    SupportVerify(SupportParams),
    TauScan(TauScanParams),
    Basis(BasisParams),
    Dist(DistParams),
    Props(PropsParams),
    Holder(HolderParams),
}

fn yes() -> bool {
    true
}
fn default_steps() -> usize {
    720
}
fn default_multistart() -> usize {
    8
}
fn default_eps_corr() -> f64 {
    0.1
}
fn default_signs() -> Vec<SignSpec> {
    vec![SignSpec::Named("standard".into()), SignSpec::Named("opposite".into())]
}
fn default_radius() -> f64 {
    0.3
}
fn default_support_samples() -> usize {
    10_000
}
fn default_lemma_points() -> usize {
    8
}
fn default_eps_min() -> f64 {
    1e-8
}
fn default_eps_max() -> f64 {
    1e-2
}
fn default_points() -> usize {
    13
}
fn default_basis_multistart() -> usize {
    64
}
fn default_props_samples() -> usize {
    200
}
fn default_eps_h() -> f64 {
    0.1
}
fn default_npairs() -> usize {
    10_000
}
fn default_anchors() -> usize {
    16
}

/// A parsed, fully resolved scenario.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub name: String,
    pub domain: DomainConfig,
    pub kind: ExperimentKind,
    pub params: Params,
    pub output: Option<String>,
    pub seed: u64,
}

impl Scenario {
    pub fn domain(&self) -> Result<Domain> {
        Domain::from_config(&self.domain).map_err(|e| anyhow!("domain load failed: {e}"))
    }
}

fn parse_document(text: &str, json: bool, what: &Path) -> Result<serde_json::Value> {
    if json {
        serde_json::from_str(text).with_context(|| format!("{}: invalid JSON", what.display()))
    } else {
        let v: toml::Value = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| format!(" at byte offset {}", s.start))
                .unwrap_or_default();
            anyhow!("{}: invalid TOML{at}: {}", what.display(), e.message())
        })?;
        Ok(serde_json::to_value(v)?)
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => true,
        Some("toml") => false,
        _ => text.trim_start().starts_with('{'),
    }
}

fn resolve_domain(r: &DomainRef, base: &Path) -> Result<DomainConfig> {
    match r {
        DomainRef::Builtin(name) => builtin_domains()
            .into_iter()
            .find(|b| b.name == name)
            .map(|b| b.config)
            .ok_or_else(|| anyhow!("unknown built-in domain '{name}'")),
        DomainRef::Inline(cfg) => Ok(cfg.clone()),
        DomainRef::File { file } => {
            let path = if file.is_absolute() { file.clone() } else { base.join(file) };
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let v = parse_document(&text, is_json(&path, &text), &path)?;
            serde_json::from_value(v).with_context(|| format!("{}: invalid domain config", path.display()))
        }
    }
}

fn typed<T: serde::de::DeserializeOwned>(kind: ExperimentKind, v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| anyhow!("params for '{}': {e}", kind.name()))
}

/// Parses a scenario from text. `origin` names the source in messages and
/// anchors relative domain paths.
pub fn parse_scenario(text: &str, origin: &Path, seed_override: Option<u64>) -> Result<Scenario> {
    let value = parse_document(text, is_json(origin, text), origin)?;
    let raw: RawScenario =
        serde_json::from_value(value).map_err(|e| anyhow!("{}: invalid scenario: {e}", origin.display()))?;
    let base = origin.parent().unwrap_or(Path::new("."));
    let domain = resolve_domain(&raw.domain, base)?;
    let p = raw.params.unwrap_or_else(|| serde_json::json!({}));
    let kind = raw.kind;
    let params = match kind {
        ExperimentKind::Contact => Params::Contact(typed(kind, p)?),
        ExperimentKind::Slice => Params::Slice(typed(kind, p)?),
        ExperimentKind::SupportVerify => Params::SupportVerify(typed(kind, p)?),
        ExperimentKind::TauScan => Params::TauScan(typed(kind, p)?),
        ExperimentKind::Basis => Params::Basis(typed(kind, p)?),
        ExperimentKind::Dist => Params::Dist(typed(kind, p)?),
        ExperimentKind::Props => Params::Props(typed(kind, p)?),
        ExperimentKind::Holder => Params::Holder(typed(kind, p)?),
    };
    let seed = match (seed_override.or(raw.seed), kind.needs_seed()) {
        (Some(s), _) => s,
        (None, false) => 0,
        (None, true) => bail!("{}: experiment '{}' samples randomly and needs a seed", origin.display(), kind.name()),
    };
    let name = origin
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(kind.name())
        .to_string();
    Ok(Scenario {
        name,
        domain,
        kind,
        params,
        output: raw.output,
        seed,
    })
}

pub fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario(&text, path, seed_override)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, Path::new("t.toml"), None)
    }

    #[test]
    fn builtin_and_inline_domains() {
        let s = parse("domain = \"half-space\"\nkind = \"contact\"\n").unwrap();
        assert_eq!(s.domain.defining, "y1");
        assert_eq!(s.seed, 0);
        let s = parse(
            "kind = \"tau-scan\"\n[domain]\ndefining = \"y1 + x2^4\"\nm = 2\n[params]\ngamma = [[0,0],[1,0]]\n",
        )
        .unwrap();
        assert_eq!(s.domain.m, 2);
        assert!(matches!(s.params, Params::TauScan(ref p) if p.points == 13));
    }

    #[test]
    fn unknown_kind_rejected_at_parse() {
        let e = parse("domain = \"half-space\"\nkind = \"teleport\"\n").unwrap_err();
        assert!(format!("{e:#}").contains("teleport"), "{e:#}");
    }

    #[test]
    fn unknown_param_rejected() {
        assert!(parse("domain = \"ball\"\nkind = \"contact\"\n[params]\nbogus = 1\n").is_err());
    }

    #[test]
    fn sampling_kinds_need_seed() {
        let text = "domain = \"model\"\nkind = \"props\"\n";
        assert!(parse(text).is_err());
        assert_eq!(parse_scenario(text, Path::new("t.toml"), Some(7)).unwrap().seed, 7);
    }

    #[test]
    fn toml_errors_carry_offsets() {
        let e = parse("domain = \"ball\"\nkind = = 3\n").unwrap_err();
        assert!(e.to_string().contains("byte offset"), "{e}");
    }

    #[test]
    fn json_accepted() {
        let s = parse_scenario(
            r#"{"domain": "ball", "kind": "basis", "seed": 3, "params": {"eps": 1e-3}}"#,
            Path::new("s.json"),
            None,
        )
        .unwrap();
        assert_eq!(s.kind, ExperimentKind::Basis);
        assert_eq!(s.seed, 3);
    }
}
