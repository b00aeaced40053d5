use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_scalar, Scalar};
use crate::centers::{AffineMap, CenterSpec, Family, LinearCenterParams, PiecewiseSystem};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{side}: unknown family {family:?}")]
    UnknownFamily { side: &'static str, family: String },
    #[error("{side}: missing parameter {field}")]
    MissingField { side: &'static str, field: &'static str },
    #[error("{side}: unexpected parameter {field}")]
    UnknownField { side: &'static str, field: String },
    #[error("{side}.{field}: {message}")]
    InvalidValue { side: &'static str, field: String, message: String },
    #[error("{side}: affine map is singular (b*alpha - a*beta = 0)")]
    SingularMap { side: &'static str },
    #[error("box must be x0,x1,y0,y1 with x0 < x1 and y0 < y1")]
    InvalidBox,
}

/// A scalar as written in a config: a string literal or a bare JSON number,
/// both read with the exact decimal rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Number(serde_json::Number),
}

impl ScalarText {
    fn literal(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Number(n) => n.to_string(),
        }
    }
}

impl From<&Scalar> for ScalarText {
    fn from(s: &Scalar) -> Self {
        ScalarText::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideConfig {
    pub family: String,
    pub params: BTreeMap<String, ScalarText>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    pub plus: SideConfig,
    pub minus: SideConfig,
    /// Plot and scan window `[x0, x1, y0, y1]`.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

const LINEAR_FIELDS: [&str; 5] = ["A", "B", "C", "D", "omega"];
const AFFINE_FIELDS: [&str; 6] = ["a", "b", "c", "alpha", "beta", "gamma"];

impl SystemConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SystemConfig = serde_json::from_str(text)?;
        cfg.system()?;
        cfg.window()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn window(&self) -> Result<Option<[f64; 4]>, ConfigError> {
        match self.window {
            Some(b) if !(b[0] < b[1] && b[2] < b[3]) => Err(ConfigError::InvalidBox),
            w => Ok(w),
        }
    }

    /// Validated piecewise system.
    pub fn system(&self) -> Result<PiecewiseSystem, ConfigError> {
        Ok(PiecewiseSystem::new(
            side_spec("plus", &self.plus)?,
            side_spec("minus", &self.minus)?,
        ))
    }

    pub fn from_system(name: &str, pw: &PiecewiseSystem) -> Self {
        Self {
            name: name.to_string(),
            plus: side_config(&pw.plus),
            minus: side_config(&pw.minus),
            window: None,
            tol: None,
        }
    }
}

fn side_spec(side: &'static str, cfg: &SideConfig) -> Result<CenterSpec, ConfigError> {
    let family: Family = cfg
        .family
        .parse()
        .map_err(|_| ConfigError::UnknownFamily { side, family: cfg.family.clone() })?;
    let fields: &[&'static str] = if family == Family::Lc { &LINEAR_FIELDS } else { &AFFINE_FIELDS };
    if let Some(extra) = cfg.params.keys().find(|k| !fields.contains(&k.as_str())) {
        return Err(ConfigError::UnknownField { side, field: extra.clone() });
    }
    let mut vals = Vec::with_capacity(fields.len());
    for &field in fields {
        let raw = cfg.params.get(field).ok_or(ConfigError::MissingField { side, field })?;
        let v = parse_scalar(&raw.literal()).map_err(|e| ConfigError::InvalidValue {
            side,
            field: field.to_string(),
            message: e.to_string(),
        })?;
        vals.push(v);
    }
    let mut it = vals.into_iter();
    let mut next = || it.next().expect("one value per field");
    if family == Family::Lc {
        let (a, b, c, d, w) = (next(), next(), next(), next(), next());
        for (field, v) in [("D", &d), ("omega", &w)] {
            if !v.is_positive() {
                let message = "must be positive".into();
                return Err(ConfigError::InvalidValue { side, field: field.into(), message });
            }
        }
        let p = LinearCenterParams::new(a, b, c, d, w).expect("checked above");
        Ok(CenterSpec::Linear(p))
    } else {
        let map = AffineMap::new(next(), next(), next(), next(), next(), next())
            .map_err(|_| ConfigError::SingularMap { side })?;
        Ok(CenterSpec::Cubic { family, map })
    }
}

fn side_config(spec: &CenterSpec) -> SideConfig {
    let mut params = BTreeMap::new();
    match spec {
        CenterSpec::Linear(p) => {
            for (k, v) in LINEAR_FIELDS.iter().zip([&p.a, &p.b, &p.c, &p.d, &p.omega]) {
                params.insert(k.to_string(), v.into());
            }
        }
        CenterSpec::Cubic { map, .. } => {
            let vals = [&map.a, &map.b, &map.c, &map.alpha, &map.beta, &map.gamma];
            for (k, v) in AFFINE_FIELDS.iter().zip(vals) {
                params.insert(k.to_string(), v.into());
            }
        }
    }
    SideConfig { family: spec.family().to_string(), params }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY_S1: &str = r#"{
        "name": "id",
        "plus": {"family": "S1", "params": {"a": 1, "b": 0, "c": 0, "alpha": 0, "beta": 1, "gamma": 0}},
        "minus": {"family": "Lc", "params": {"A": "0", "B": 0.5, "C": "-1/3", "D": "1", "omega": 2}}
    }"#;

    #[test]
    fn bare_numbers_are_exact_decimals() {
        let cfg = SystemConfig::from_json(IDENTITY_S1).unwrap();
        let pw = cfg.system().unwrap();
        match &pw.minus {
            CenterSpec::Linear(p) => {
                assert_eq!(p.b, parse_scalar("1/2").unwrap());
                assert_eq!(p.c, parse_scalar("-1/3").unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let cfg = SystemConfig::from_json(IDENTITY_S1).unwrap();
        let pw = cfg.system().unwrap();
        let again = SystemConfig::from_json(&SystemConfig::from_system("id", &pw).to_json()).unwrap();
        assert_eq!(again.system().unwrap(), pw);
    }

    #[test]
    fn validation_names_the_field() {
        let singular = IDENTITY_S1.replace(r#""beta": 1"#, r#""beta": 0"#);
        let e = SystemConfig::from_json(&singular).unwrap_err();
        assert!(e.to_string().contains("plus"), "{e}");
        let bad_d = IDENTITY_S1.replace(r#""D": "1""#, r#""D": "-1""#);
        let e = SystemConfig::from_json(&bad_d).unwrap_err();
        assert!(e.to_string().contains("minus.D"), "{e}");
        let missing = IDENTITY_S1.replace(r#""gamma": 0"#, r#""delta": 0"#);
        assert!(SystemConfig::from_json(&missing).is_err());
        let fam = IDENTITY_S1.replace(r#""S1""#, r#""S7""#);
        assert!(matches!(SystemConfig::from_json(&fam), Err(ConfigError::UnknownFamily { .. })));
        let garbage = IDENTITY_S1.replace(r#""-1/3""#, r#""x""#);
        assert!(SystemConfig::from_json(&garbage).is_err());
    }
}
