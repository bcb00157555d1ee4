//! Experiment configuration: a single TOML key-value tree per run, with
//! dotted-path overrides applied before deserialization.

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::growth::{GrowthFunction, GrowthSpec};
use crate::kernels::{planar_cauchy_field, riesz_field, Poly, PolyKernel};
use crate::operators::{OperatorKind, Side};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// The named studies the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    T1Check,
    JumpCheck,
    InvolutionCheck,
    ReproducingCheck,
    SingleLayerIdentity,
    RieszCharacterization,
    GrowthAnalysis,
    HolderFixtures,
    AhlforsProfile,
    Hourglass,
}

impl ExperimentKind {
    pub fn all() -> [ExperimentKind; 10] {
        use ExperimentKind::*;
        [
            T1Check,
            JumpCheck,
            InvolutionCheck,
            ReproducingCheck,
            SingleLayerIdentity,
            RieszCharacterization,
            GrowthAnalysis,
            HolderFixtures,
            AhlforsProfile,
            Hourglass,
        ]
    }

    /// The snake_case name used in configs, report files, and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::T1Check => "t1_check",
            ExperimentKind::JumpCheck => "jump_check",
            ExperimentKind::InvolutionCheck => "involution_check",
            ExperimentKind::ReproducingCheck => "reproducing_check",
            ExperimentKind::SingleLayerIdentity => "single_layer_identity",
            ExperimentKind::RieszCharacterization => "riesz_characterization",
            ExperimentKind::GrowthAnalysis => "growth_analysis",
            ExperimentKind::HolderFixtures => "holder_fixtures",
            ExperimentKind::AhlforsProfile => "ahlfors_profile",
            ExperimentKind::Hourglass => "hourglass",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentKind::T1Check => {
                "action of a jump operator on the constant 1, both sides, plus the domain potential"
            }
            ExperimentKind::JumpCheck => {
                "nontangential trace along a tied h/N ladder against the jump-formula target"
            }
            ExperimentKind::InvolutionCheck => "residual of C^2 f = f/4 across resolutions",
            ExperimentKind::ReproducingCheck => {
                "Cauchy reproducing formula at random interior probes"
            }
            ExperimentKind::SingleLayerIdentity => {
                "grad S1 = -C nu compared probe by probe in the domain"
            }
            ExperimentKind::RieszCharacterization => {
                "generalized Holder seminorm of R_j 1 across resolutions"
            }
            ExperimentKind::GrowthAnalysis => {
                "dilation indices and summary constants of a growth function"
            }
            ExperimentKind::HolderFixtures => {
                "sharpness fixtures: subadditive modulus field and two divergent companions"
            }
            ExperimentKind::AhlforsProfile => "empirical Ahlfors regularity profile of a mesh",
            ExperimentKind::Hourglass => "two-sided hourglass condition over all mesh nodes",
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// Operator selector inside a config. `P` holds a polynomial literal such as
/// "x^3 - 3*x*y^2".
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorConfig {
    Riesz {
        j: u32,
    },
    PolyKernel {
        n: u32,
        #[serde(rename = "P")]
        p: String,
    },
    DoubleLayer {
        n: u32,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    PlanarCauchy,
    CauchyClifford,
    SingleLayer,
}

impl OperatorConfig {
    /// Builds the runtime operator kind; polynomial literals are parsed here.
    pub fn to_kind(&self) -> Result<OperatorKind> {
        Ok(match self {
            OperatorConfig::Riesz { j } => OperatorKind::Riesz { j: *j },
            OperatorConfig::PolyKernel { n, p } => {
                OperatorKind::PolyKernel(PolyKernel::new(*n, Poly::parse(p)?)?)
            }
            OperatorConfig::DoubleLayer { n, scale } => {
                if !(*n == 2 || *n == 3) {
                    return Err(Error::Config(format!("double_layer needs n in {{2, 3}}, got {n}")));
                }
                OperatorKind::DoubleLayer(riesz_field(*n).scaled(*scale))
            }
            OperatorConfig::PlanarCauchy => OperatorKind::DoubleLayer(planar_cauchy_field()),
            OperatorConfig::CauchyClifford => OperatorKind::CauchyClifford,
            OperatorConfig::SingleLayer => OperatorKind::SingleLayer,
        })
    }

    /// Ambient dimension the kernel pins down, if any.
    fn kernel_dim(&self) -> Option<usize> {
        match self {
            OperatorConfig::Riesz { .. }
            | OperatorConfig::CauchyClifford
            | OperatorConfig::SingleLayer => None,
            OperatorConfig::PolyKernel { n, .. } | OperatorConfig::DoubleLayer { n, .. } => {
                Some(*n as usize)
            }
            OperatorConfig::PlanarCauchy => Some(2),
        }
    }

    /// True for kinds with a jump relation (the trace experiments need one).
    fn has_jump(&self) -> bool {
        matches!(
            self,
            OperatorConfig::DoubleLayer { .. }
                | OperatorConfig::PlanarCauchy
                | OperatorConfig::CauchyClifford
        )
    }
}

fn default_side() -> Side {
    Side::Interior
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("siolab-out")
}

/// One experiment run, fully determined by this tree plus the seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<GrowthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorConfig>,
    #[serde(default = "default_side")]
    pub side: Side,
    /// Mesh sizes, strictly increasing. jump_check derives its own meshes
    /// from the height ladder and requires this to stay empty.
    #[serde(default)]
    pub resolutions: Vec<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// Parses a config document without validating it.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    /// Reads a config file, applies `path=value` overrides, and validates.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("read {}: {e}", path.display())))?;
        let mut tree: toml::Value = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("config parse ({}): {e}", path.display())))?;
        for spec in overrides {
            apply_override(&mut tree, spec)?;
        }
        let config: ExperimentConfig = tree
            .try_into()
            .map_err(|e| Error::Config(format!("config shape: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// The domain table, or a config error naming the experiment.
    pub fn domain(&self) -> Result<&DomainSpec> {
        self.domain.as_ref().ok_or_else(|| {
            Error::Config(format!("{} needs a [domain] table", self.experiment.name()))
        })
    }

    /// The growth function built from the omega table.
    pub fn omega_fn(&self) -> Result<GrowthFunction> {
        let spec = self.omega.clone().ok_or_else(|| {
            Error::Config(format!("{} needs an [omega] table", self.experiment.name()))
        })?;
        GrowthFunction::new(spec)
    }

    /// The configured operator kind, if an operator table is present.
    pub fn operator_kind(&self) -> Result<Option<OperatorKind>> {
        self.operator.as_ref().map(|op| op.to_kind()).transpose()
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if let Some(domain) = &self.domain {
            domain.validate()?;
        }
        if let Some(omega) = &self.omega {
            GrowthFunction::new(omega.clone())?;
        }
        if let Some(op) = &self.operator {
            op.to_kind()?;
            if let (Some(kd), Some(domain)) = (op.kernel_dim(), &self.domain) {
                if kd != domain.dim() {
                    return Err(Error::Config(format!(
                        "operator lives in dimension {kd} but the domain has dimension {}",
                        domain.dim()
                    )));
                }
            }
            if let (OperatorConfig::Riesz { j }, Some(domain)) = (op, &self.domain) {
                if *j == 0 || *j as usize > domain.dim() {
                    return Err(Error::Config(format!(
                        "riesz component j={j} outside 1..={}",
                        domain.dim()
                    )));
                }
            }
        }
        for pair in self.resolutions.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config(format!(
                    "resolutions must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(&n) = self.resolutions.first() {
            if n < 16 {
                return Err(Error::Config(format!("resolutions must be >= 16, got {n}")));
            }
        }

        let needs_domain = !matches!(self.experiment, GrowthAnalysis);
        if needs_domain {
            self.domain()?;
        }
        let needs_omega = matches!(
            self.experiment,
            RieszCharacterization | GrowthAnalysis | HolderFixtures | Hourglass
        );
        if needs_omega {
            self.omega_fn()?;
        }
        let needs_resolutions = !matches!(self.experiment, JumpCheck | GrowthAnalysis);
        if needs_resolutions && self.resolutions.is_empty() {
            return Err(Error::Config(format!(
                "{} needs a nonempty resolutions list",
                self.experiment.name()
            )));
        }
        if self.experiment == JumpCheck && !self.resolutions.is_empty() {
            return Err(Error::Config(
                "jump_check ties N to the heights ladder; leave resolutions empty".into(),
            ));
        }
        if self.experiment == JumpCheck {
            let domain = self.domain()?;
            if domain.dim() != 2 {
                return Err(Error::Config("jump_check runs on curve domains only".into()));
            }
        }

        if let Some(op) = &self.operator {
            let allowed = match self.experiment {
                T1Check | JumpCheck => op.has_jump(),
                InvolutionCheck | ReproducingCheck => {
                    matches!(op, OperatorConfig::CauchyClifford)
                }
                SingleLayerIdentity => matches!(op, OperatorConfig::SingleLayer),
                RieszCharacterization => matches!(op, OperatorConfig::Riesz { .. }),
                GrowthAnalysis | HolderFixtures | AhlforsProfile | Hourglass => false,
            };
            if !allowed {
                return Err(Error::Config(format!(
                    "operator kind incompatible with {}",
                    self.experiment.name()
                )));
            }
        }
        Ok(())
    }
}

/// Applies one `dotted.path=value` override to a parsed config tree.
/// Intermediate tables are created on demand; the literal is parsed as a
/// TOML value, falling back to a bare string.
pub fn apply_override(tree: &mut toml::Value, spec: &str) -> Result<()> {
    let Some((path, literal)) = spec.split_once('=') else {
        return Err(Error::Config(format!("override '{spec}' is not of the form path=value")));
    };
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::Config(format!("override '{spec}' has an empty path")));
    }
    let mut cursor = tree;
    let segments: Vec<&str> = path.split('.').collect();
    for (k, segment) in segments.iter().enumerate() {
        if segment.is_empty() {
            return Err(Error::Config(format!("override '{spec}' has an empty path segment")));
        }
        let table = cursor.as_table_mut().ok_or_else(|| {
            Error::Config(format!("override '{spec}': '{}' is not a table", segments[..k].join(".")))
        })?;
        if k + 1 == segments.len() {
            table.insert((*segment).to_string(), parse_literal(literal.trim()));
            return Ok(());
        }
        cursor = table
            .entry((*segment).to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    unreachable!("override paths have at least one segment")
}

fn parse_literal(text: &str) -> toml::Value {
    let doc = format!("v = {text}");
    match toml::from_str::<toml::Value>(&doc) {
        Ok(toml::Value::Table(mut t)) => t.remove("v").expect("literal document has key v"),
        _ => toml::Value::String(text.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ExperimentConfig {
        let config = ExperimentConfig::from_toml_str(text).unwrap();
        config.validate().unwrap();
        config
    }

    #[test]
    fn minimal_configs_parse_and_validate() {
        let config = parse(
            r#"
            experiment = "t1_check"
            resolutions = [64, 128]
            domain = { kind = "ellipse", a = 2.0, b = 1.0 }
            "#,
        );
        assert_eq!(config.experiment, ExperimentKind::T1Check);
        assert_eq!(config.side, Side::Interior);
        assert!(config.operator.is_none());
        assert_eq!(config.output_dir, PathBuf::from("siolab-out"));

        let config = parse(
            r#"
            experiment = "growth_analysis"
            omega = { kind = "power", alpha = 0.5, D = 1.0 }
            "#,
        );
        assert!(matches!(config.omega, Some(GrowthSpec::Power { .. })));
    }

    #[test]
    fn operator_table_builds_kinds() {
        let config = parse(
            r#"
            experiment = "t1_check"
            resolutions = [64]
            domain = { kind = "disk", r = 1.0 }
            operator = { kind = "double_layer", n = 2, scale = 2.5 }
            "#,
        );
        assert!(matches!(
            config.operator_kind().unwrap(),
            Some(OperatorKind::DoubleLayer(_))
        ));

        let config = parse(
            r#"
            experiment = "t1_check"
            resolutions = [64]
            side = "exterior"
            domain = { kind = "disk", r = 1.0 }
            operator = { kind = "planar_cauchy" }
            "#,
        );
        assert_eq!(config.side, Side::Exterior);
        assert!(matches!(
            config.operator_kind().unwrap(),
            Some(OperatorKind::DoubleLayer(_))
        ));
    }

    #[test]
    fn polynomial_literal_round_trips() {
        let config = ExperimentConfig::from_toml_str(
            r#"
            experiment = "t1_check"
            resolutions = [64]
            domain = { kind = "disk", r = 1.0 }
            operator = { kind = "poly_kernel", n = 2, P = "x^3 - 3*x*y^2" }
            "#,
        )
        .unwrap();
        let Some(OperatorKind::PolyKernel(pk)) = config.operator_kind().unwrap() else {
            panic!("expected a polynomial kernel");
        };
        assert_eq!(pk.ell(), 3);
        // A poly kernel has no jump relation, so t1_check must reject it.
        assert!(matches!(config.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_and_type_mismatches_are_rejected() {
        assert!(matches!(
            ExperimentConfig::from_toml_str("experiment = \"t1_check\"\nbogus = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_toml_str("experiment = \"t1_check\"\nresolutions = \"many\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_toml_str("experiment = \"no_such_study\""),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn validation_rules_fire() {
        let base = r#"
            experiment = "t1_check"
            domain = { kind = "disk", r = 1.0 }
        "#;
        let config =
            ExperimentConfig::from_toml_str(&format!("{base}resolutions = [64, 64]")).unwrap();
        assert!(matches!(config.validate(), Err(Error::Config(_))));
        let config = ExperimentConfig::from_toml_str(base).unwrap();
        assert!(matches!(config.validate(), Err(Error::Config(_))));

        let config = ExperimentConfig::from_toml_str(
            r#"
            experiment = "jump_check"
            resolutions = [64]
            domain = { kind = "disk", r = 1.0 }
            "#,
        )
        .unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("heights ladder"), "{err}");

        let config = ExperimentConfig::from_toml_str(
            r#"
            experiment = "riesz_characterization"
            resolutions = [64]
            domain = { kind = "disk", r = 1.0 }
            omega = { kind = "power", alpha = 0.5, D = 1.0 }
            operator = { kind = "riesz", j = 3 }
            "#,
        )
        .unwrap();
        assert!(matches!(config.validate(), Err(Error::Config(_))));

        let config = ExperimentConfig::from_toml_str(
            r#"
            experiment = "t1_check"
            resolutions = [64]
            domain = { kind = "sphere3", r = 1.0 }
            operator = { kind = "planar_cauchy" }
            "#,
        )
        .unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");
    }

    #[test]
    fn overrides_replace_leaves_and_create_tables() {
        let mut tree: toml::Value = toml::from_str(
            r#"
            experiment = "growth_analysis"
            omega = { kind = "power", alpha = 0.5, D = 1.0 }
            "#,
        )
        .unwrap();
        apply_override(&mut tree, "omega.alpha=0.7").unwrap();
        apply_override(&mut tree, "seed=9").unwrap();
        apply_override(&mut tree, "output_dir=out/run1").unwrap();
        let config: ExperimentConfig = tree.try_into().unwrap();
        let Some(GrowthSpec::Power { alpha, .. }) = config.omega else {
            panic!("omega survived overrides");
        };
        assert_eq!(alpha, 0.7);
        assert_eq!(config.seed, 9);
        // Bare paths fall back to strings.
        assert_eq!(config.output_dir, PathBuf::from("out/run1"));
    }

    #[test]
    fn override_rejects_malformed_specs() {
        let mut tree: toml::Value = toml::from_str("experiment = \"t1_check\"").unwrap();
        assert!(apply_override(&mut tree, "no_equals").is_err());
        assert!(apply_override(&mut tree, "=3").is_err());
        assert!(apply_override(&mut tree, "experiment.inner=3").is_err());
    }
}
