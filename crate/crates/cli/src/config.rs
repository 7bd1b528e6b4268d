//! Option resolution: command-line flag, then config file, then default.
//!
//! Config files hold one `key = value` per line, where keys are the long flag
//! names without dashes. Blank lines and lines starting with `#` are ignored.
//! A run manifest (JSON) is also accepted; its `parameters` table is used.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use hullwalk::io::RunManifest;
use hullwalk::walks::Covariance;
use hullwalk::Point2;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Resolver {
    file: BTreeMap<String, (usize, String)>,
    source: String,
    resolved: BTreeMap<String, String>,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, (usize, String)>, CliError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`, found `{line}`",
                idx + 1
            )));
        };
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", idx + 1)));
        }
        out.insert(key, (idx + 1, v.trim().to_string()));
    }
    Ok(out)
}

impl Resolver {
    /// `allowed` lists the keys the command understands.
    pub fn new(config: Option<&Path>, allowed: &[&str]) -> Result<Self, CliError> {
        let Some(path) = config else {
            return Ok(Resolver::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let file = if text.trim_start().starts_with('{') {
            let m: RunManifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{} is not a run manifest: {e}", path.display())))?;
            m.parameters.into_iter().map(|(k, v)| (k, (0, v))).collect()
        } else {
            parse_config(&text)?
        };
        if let Some((k, (line, _))) = file.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(CliError::Usage(format!(
                "{}: unknown key `{k}`{}",
                path.display(),
                if *line > 0 { format!(" on line {line}") } else { String::new() }
            )));
        }
        Ok(Resolver {
            file,
            source: path.display().to_string(),
            resolved: BTreeMap::new(),
        })
    }

    fn raw(&self, key: &str, flag: Option<&str>) -> Option<(String, String)> {
        if let Some(v) = flag {
            return Some((v.to_string(), format!("--{key}")));
        }
        self.file.get(key).map(|(line, v)| {
            let origin = if *line > 0 {
                format!("`{key}` on line {line} of {}", self.source)
            } else {
                format!("`{key}` in {}", self.source)
            };
            (v.clone(), origin)
        })
    }

    /// Resolve `key`; `default = None` makes it required.
    pub fn get<T>(&mut self, key: &str, flag: Option<&str>, default: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match self.raw(key, flag) {
            Some((text, origin)) => text
                .parse::<T>()
                .map_err(|e| CliError::Usage(format!("invalid value `{text}` for {origin}: {e}")))?,
            None => default.ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))?,
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Like [`Resolver::get`] for values that stay absent when unset.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<&str>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        if self.raw(key, flag).is_none() {
            return Ok(None);
        }
        self.get(key, flag, None).map(Some)
    }

    /// Config-file value of `key`, without recording it.
    pub fn peek(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(|(_, v)| v.as_str())
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.clone()
    }
}

/// `x,y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointArg(pub Point2);

impl FromStr for PointArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = FloatList::from_str(s)?.0;
        match v.as_slice() {
            [x, y] => Ok(PointArg(Point2::new(*x, *y))),
            _ => Err(format!("expected `x,y`, got {} numbers", v.len())),
        }
    }
}

impl Display for PointArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?},{:?}", self.0.x, self.0.y)
    }
}

/// `xx,xy,yy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovArg(pub Covariance);

impl FromStr for CovArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = FloatList::from_str(s)?.0;
        match v.as_slice() {
            [xx, xy, yy] => Ok(CovArg(Covariance::new(*xx, *xy, *yy))),
            _ => Err(format!("expected `xx,xy,yy`, got {} numbers", v.len())),
        }
    }
}

impl Display for CovArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?},{:?},{:?}", self.0.xx, self.0.xy, self.0.yy)
    }
}

/// Comma-separated finite numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("`{t}` is not a finite number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

impl Display for FloatList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v:?}")).collect();
        write!(f, "{}", parts.join(","))
    }
}
