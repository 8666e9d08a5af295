//! JSON pipeline configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::arrangement::{ArrangementSpec, ColorMap};
use crate::error::{Error, Result};
use crate::polynomial::{parse_rational, Polynomial};
use crate::scenarios::{Preset, ScenarioParams, Variant};
use crate::validator::BoundingBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Validate,
    Slice,
    Double,
    Reeb,
    Singular,
    FiberSurvey,
}

impl Action {
    pub const ALL: [Action; 6] =
        [Action::Validate, Action::Slice, Action::Double, Action::Reeb, Action::Singular, Action::FiberSurvey];
}

/// A preset with optional overrides. Rationals are strings such as `"3/2"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub preset: String,
    pub l: Option<usize>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub s1: Option<String>,
    pub s2: Option<String>,
    pub p: Option<Vec<String>>,
    pub variant: Option<Variant>,
    pub density: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioOverrides {
    pub fn to_params(&self) -> Result<ScenarioParams> {
        let preset = Preset::from_name(&self.preset)?;
        let mut p = ScenarioParams::new(preset);
        if let Some(l) = self.l {
            p.l = l;
        }
        if let Some(a) = &self.a {
            p.a = parse_rational(a)?;
        }
        if let Some(b) = &self.b {
            p.b = parse_rational(b)?;
        }
        p.s1 = self.s1.as_deref().map(parse_rational).transpose()?;
        p.s2 = self.s2.as_deref().map(parse_rational).transpose()?;
        p.p = self.p.as_ref().map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()).transpose()?;
        if let Some(v) = self.variant {
            p.variant = v;
        }
        if let Some(d) = self.density {
            p.density = d;
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineHypersurface {
    /// `(coefficient, exponents)` pairs.
    pub terms: Vec<(String, Vec<u32>)>,
    pub color: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineArrangement {
    pub n: usize,
    pub hypersurfaces: Vec<InlineHypersurface>,
    /// One entry per color; only zeros are supported.
    #[serde(default)]
    pub sphere_dims: Option<Vec<u32>>,
    /// Sampling box for validation, `[lo, hi]` per coordinate.
    #[serde(default)]
    pub bbox: Option<Vec<[f64; 2]>>,
}

impl InlineArrangement {
    pub fn to_spec(&self) -> Result<ArrangementSpec> {
        let polys = self
            .hypersurfaces
            .iter()
            .map(|h| {
                let terms = h.terms.iter().map(|(c, e)| Ok((parse_rational(c)?, e.clone()))).collect::<Result<Vec<_>>>()?;
                Polynomial::from_terms(self.n, terms)
            })
            .collect::<Result<Vec<_>>>()?;
        let colors: Vec<usize> = self.hypersurfaces.iter().map(|h| h.color).collect();
        let l2 = colors.iter().copied().max().unwrap_or(0);
        let dims = self.sphere_dims.clone().unwrap_or_else(|| vec![0; l2]);
        ArrangementSpec::new(self.n, polys, ColorMap::new(colors, dims)?)
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        self.bbox.as_ref().map(|b| BoundingBox::new(b.iter().map(|r| r[0]).collect(), b.iter().map(|r| r[1]).collect()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    pub samples: Option<usize>,
    /// Rank tolerance of the validator.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub density: Option<f64>,
    /// Fixed `(axis, value)` pairs of the reference slice.
    pub slice: Option<Vec<(usize, f64)>>,
    pub reeb_axis: Option<usize>,
    pub singular_axis: Option<usize>,
    /// Keep `x_singular_axis >= clip`.
    pub clip: Option<f64>,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl OutputPaths {
    fn all(&self) -> Vec<&PathBuf> {
        [&self.report, &self.mesh, &self.dot, &self.svg].into_iter().flatten().collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub scenario: Option<ScenarioOverrides>,
    #[serde(default)]
    pub arrangement: Option<InlineArrangement>,
    pub actions: Vec<Action>,
    #[serde(default)]
    pub options: RunOptions,
    #[serde(default)]
    pub outputs: OutputPaths,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if self.scenario.is_some() == self.arrangement.is_some() {
            return Err(Error::Config("give exactly one of \"scenario\" and \"arrangement\"".into()));
        }
        if self.actions.is_empty() {
            return Err(Error::Config("at least one action is required".into()));
        }
        let paths = self.outputs.all();
        for (i, p) in paths.iter().enumerate() {
            if paths[..i].contains(p) {
                return Err(Error::Config(format!("output path {} used twice", p.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_disk() {
        let text = r#"{
            "arrangement": {"n": 2, "hypersurfaces": [
                {"terms": [["1", [0, 0]], ["-1", [2, 0]], ["-1", [0, 2]]], "color": 1}
            ], "bbox": [[-2, 2], [-2, 2]]},
            "actions": ["validate"]
        }"#;
        let cfg = PipelineConfig::from_json(text).unwrap();
        let spec = cfg.arrangement.as_ref().unwrap().to_spec().unwrap();
        assert_eq!(spec.l2(), 1);
        assert!(spec.in_closure(&[0.5, 0.5], 0.0));
        assert!(!spec.in_closure(&[1.0, 1.0], 0.0));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(PipelineConfig::from_json(r#"{"scenario": {"preset": "thm2"}, "actions": []}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"actions": ["slice"]}"#).is_err());
        let dup = r#"{"scenario": {"preset": "thm2"}, "actions": ["slice"],
                      "outputs": {"report": "x", "svg": "x"}}"#;
        assert!(PipelineConfig::from_json(dup).is_err());
        let p = PipelineConfig::from_json(r#"{"scenario": {"preset": "caseB", "a": "1/2", "b": "5/2"}, "actions": ["slice"]}"#)
            .unwrap();
        let params = p.scenario.unwrap().to_params().unwrap();
        assert_eq!(params.a, crate::polynomial::rat(1, 2));
    }
}
