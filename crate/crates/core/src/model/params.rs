use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::levy::LevyMeasure;
use super::trawl::{TabulatedTrawl, TrawlFamily, TrawlSpec};
use crate::error::{invalid, Error, Result};

/// Full parameter vector: Lévy measure plus squashed trawl.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelParamsDoc", into = "ModelParamsDoc")]
pub struct ModelParams {
    pub levy: LevyMeasure,
    pub trawl: TrawlSpec,
}

impl ModelParams {
    pub fn new(levy: LevyMeasure, trawl: TrawlSpec) -> Self {
        Self { levy, trawl }
    }

    pub fn b(&self) -> f64 {
        self.trawl.b()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// On-disk shape:
/// `{"b": .., "trawl": {"family": .., "params": {..}}, "levy": {"<y>": rate}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ModelParamsDoc {
    b: f64,
    trawl: TrawlDoc,
    levy: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
enum TrawlDoc {
    Exponential {
        lambda: f64,
    },
    SupGamma {
        alpha: f64,
        #[serde(rename = "H")]
        h: f64,
    },
    SupGig {
        gamma: f64,
        delta: f64,
        nu: f64,
    },
    Tabulated {
        s: Vec<f64>,
        d_tilde: Vec<f64>,
    },
}

impl TryFrom<ModelParamsDoc> for ModelParams {
    type Error = Error;

    fn try_from(doc: ModelParamsDoc) -> Result<Self> {
        let family = match doc.trawl {
            TrawlDoc::Exponential { lambda } => TrawlFamily::Exponential { lambda },
            TrawlDoc::SupGamma { alpha, h } => TrawlFamily::SupGamma { alpha, h },
            TrawlDoc::SupGig { gamma, delta, nu } => TrawlFamily::SupGig { gamma, delta, nu },
            TrawlDoc::Tabulated { s, d_tilde } => {
                if s.len() != d_tilde.len() {
                    return Err(invalid("tabulated trawl: 's' and 'd_tilde' differ in length"));
                }
                let pts: Vec<(f64, f64)> = s.into_iter().zip(d_tilde).collect();
                TrawlFamily::Tabulated(TabulatedTrawl::new(&pts)?)
            }
        };
        let trawl = TrawlSpec::new(doc.b, family)?;
        let mut entries = Vec::with_capacity(doc.levy.len());
        for (key, rate) in doc.levy {
            let y: i64 = key
                .trim()
                .parse()
                .map_err(|_| invalid(format!("Lévy measure key '{key}' is not an integer")))?;
            entries.push((y, rate));
        }
        Ok(ModelParams { levy: LevyMeasure::new(entries)?, trawl })
    }
}

impl From<ModelParams> for ModelParamsDoc {
    fn from(p: ModelParams) -> Self {
        let trawl = match p.trawl.family() {
            &TrawlFamily::Exponential { lambda } => TrawlDoc::Exponential { lambda },
            &TrawlFamily::SupGamma { alpha, h } => TrawlDoc::SupGamma { alpha, h },
            &TrawlFamily::SupGig { gamma, delta, nu } => TrawlDoc::SupGig { gamma, delta, nu },
            TrawlFamily::Tabulated(tab) => {
                let (s, d_tilde) = tab.points().into_iter().unzip();
                TrawlDoc::Tabulated { s, d_tilde }
            }
        };
        let levy = p.levy.entries().iter().map(|(y, v)| (y.to_string(), *v)).collect();
        ModelParamsDoc { b: p.trawl.b(), trawl, levy }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_schema() {
        let text = r#"{"b": 0.396, "trawl": {"family": "exponential", "params": {"lambda": 0.681}},
                       "levy": {"1": 0.0138, "-1": 0.0131}}"#;
        let p = ModelParams::from_json(text).unwrap();
        assert_eq!(p.b(), 0.396);
        assert_eq!(p.levy.intensity(-1), 0.0131);
        let back = ModelParams::from_json(&p.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn every_family_round_trips() {
        let levy = LevyMeasure::skellam(0.1, 0.2).unwrap();
        let specs = [
            TrawlSpec::sup_gamma(0.3, 1.1, 2.0).unwrap(),
            TrawlSpec::sup_gig(0.2, 0.0, 0.45, -0.6).unwrap(),
            TrawlSpec::tabulated(0.5, &[(-2.0, 0.0), (-1.0, 0.5), (0.0, 1.0)]).unwrap(),
        ];
        for trawl in specs {
            let p = ModelParams::new(levy.clone(), trawl);
            let json = p.to_json_pretty().unwrap();
            assert_eq!(ModelParams::from_json(&json).unwrap(), p, "{json}");
        }
        let v: serde_json::Value =
            serde_json::to_value(ModelParams::new(levy, TrawlSpec::sup_gamma(0.3, 1.1, 2.0).unwrap()))
                .unwrap();
        assert_eq!(v["trawl"]["family"], "sup-gamma");
        assert_eq!(v["trawl"]["params"]["H"], 2.0);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_key = r#"{"b": 0.5, "trawl": {"family": "exponential", "params": {"lambda": 1}}, "levy": {"x": 1}}"#;
        assert!(ModelParams::from_json(bad_key).is_err());
        let bad_b = r#"{"b": 1.5, "trawl": {"family": "exponential", "params": {"lambda": 1}}, "levy": {"1": 1}}"#;
        assert!(ModelParams::from_json(bad_b).is_err());
        let bad_family = r#"{"b": 0.5, "trawl": {"family": "weird", "params": {}}, "levy": {"1": 1}}"#;
        assert!(ModelParams::from_json(bad_family).is_err());
    }
}
