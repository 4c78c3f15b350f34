//! Run configuration: a flat table of `section.key` settings read from an
//! optional TOML file, with `--set key=value` overrides applied on top.
//!
//! Values are stored as the strings the user wrote so the report can echo
//! the configuration verbatim; typed accessors parse on demand and name the
//! offending key when something does not parse.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use whlab_core::grid::Grid;
use whlab_core::operators::{Kernel, OperatorSpec};
use whlab_core::weights::Weight;
use whlab_core::{io, Error, Result};

/// every key the driver understands; anything else is rejected up front so
/// typos cannot silently fall back to defaults
const KNOWN_KEYS: &[&str] = &[
    "weight.family",
    "weight.rate",
    "weight.exponent",
    "weight.gamma",
    "grid.extent",
    "grid.count",
    "operator.variant",
    "operator.t",
    "operator.kernel",
    "operator.allow_large",
    "spectra.ts",
    "spectra.n_schedule",
    "spectra.re_min",
    "spectra.re_max",
    "spectra.im_min",
    "spectra.im_max",
    "spectra.per_side",
    "spectra.inside_tol",
    "spectra.outside_factor",
    "spectra.boundary_band",
    "spectra.inclusion_tol",
    "symbol.tilts",
    "symbol.a",
    "symbol.eta0",
    "symbol.b",
    "symbol.t0",
    "symbol.epsilon",
    "symbol.delta",
    "symbol.witness_extent",
    "symbol.witness_count",
    "output.dir",
];

fn bad(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, String>) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out)?,
            toml::Value::Array(items) => {
                let mut parts = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        toml::Value::Integer(i) => parts.push(i.to_string()),
                        toml::Value::Float(x) => parts.push(format!("{x}")),
                        _ => {
                            return Err(bad(format!(
                                "config key {key}: arrays may hold only numbers"
                            )))
                        }
                    }
                }
                out.insert(key, parts.join(","));
            }
            toml::Value::String(s) => {
                out.insert(key, s.clone());
            }
            toml::Value::Integer(i) => {
                out.insert(key, i.to_string());
            }
            toml::Value::Float(x) => {
                out.insert(key, format!("{x}"));
            }
            toml::Value::Boolean(b) => {
                out.insert(key, b.to_string());
            }
            _ => return Err(bad(format!("config key {key}: unsupported value type"))),
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn load(file: Option<&Path>, sets: &[String]) -> Result<RunConfig> {
        let mut values = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| bad(format!("cannot parse {}: {e}", path.display())))?;
            flatten("", &table, &mut values)?;
        }
        for s in sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| bad(format!("--set wants key=value, got '{s}'")))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        for key in values.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(bad(format!("unknown configuration key '{key}'")));
            }
        }
        Ok(RunConfig { values })
    }

    /// effective settings, exactly as written; defaults are not materialized
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.clone()
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| bad(format!("config key {key}: expected a number, got '{s}'")))?;
                if !v.is_finite() {
                    return Err(bad(format!("config key {key}: value must be finite")));
                }
                Ok(v)
            }
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(_) => self.f64_or(key, 0.0).map(Some),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| {
                bad(format!(
                    "config key {key}: expected an unsigned integer, got '{s}'"
                ))
            }),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| {
                bad(format!(
                    "config key {key}: expected true or false, got '{s}'"
                ))
            }),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(s) = self.raw(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let v: f64 = part.parse().map_err(|_| {
                bad(format!(
                    "config key {key}: expected comma-separated numbers, got '{part}'"
                ))
            })?;
            if !v.is_finite() {
                return Err(bad(format!("config key {key}: entries must be finite")));
            }
            out.push(v);
        }
        Ok(Some(out))
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(bad(format!("config key {key}: value must be positive")))
        }
    }

    pub fn weight(&self) -> Result<Weight> {
        let family = self.raw("weight.family").unwrap_or("constant");
        match family {
            "constant" => Ok(Weight::Constant),
            "exponential" => Ok(Weight::Exponential {
                rate: self.f64_or("weight.rate", 1.0)?,
            }),
            "polynomial" => Ok(Weight::Polynomial {
                exponent: self.f64_or("weight.exponent", 2.0)?,
            }),
            "oscillatory" => Ok(Weight::Oscillatory {
                gamma: self.f64_or("weight.gamma", 1.0)?,
            }),
            other => Err(bad(format!(
                "weight.family '{other}' is not one of constant, exponential, \
                 polynomial, oscillatory"
            ))),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let extent = self.f64_or("grid.extent", 20.0)?;
        let count = self.usize_or("grid.count", 400)?;
        Grid::new(extent, count)
    }

    pub fn shift_t(&self) -> Result<f64> {
        let t = self.f64_or("operator.t", 1.0)?;
        self.positive("operator.t", t)
    }

    pub fn allow_large(&self) -> Result<bool> {
        self.bool_or("operator.allow_large", false)
    }

    /// the convolution kernel at the requested spacing: a user-supplied
    /// sample file, or the built-in narrow bump on [-1, 1]
    pub fn kernel(&self, spacing: f64) -> Result<Kernel> {
        match self.raw("operator.kernel") {
            Some(path) => io::read_kernel(Path::new(path), spacing),
            None => Kernel::gaussian_bump(spacing, 0.0, 2.0 / 17.2, -1.0, 1.0),
        }
    }

    pub fn operator_spec(&self, spacing: f64) -> Result<OperatorSpec> {
        let variant = self.raw("operator.variant").unwrap_or("right-shift");
        match variant {
            "right-shift" => Ok(OperatorSpec::RightShift { t: self.shift_t()? }),
            "left-shift" => Ok(OperatorSpec::LeftShift { t: self.shift_t()? }),
            "convolution" => Ok(OperatorSpec::Convolution {
                kernel: self.kernel(spacing)?,
            }),
            other => Err(bad(format!(
                "operator.variant '{other}' is not one of right-shift, \
                 left-shift, convolution"
            ))),
        }
    }

    /// shift lengths for the growth regressions; defaults to the first
    /// eight multiples of the base shift, clipped to half the window
    pub fn growth_ts(&self, grid: &Grid) -> Result<Vec<f64>> {
        let ts = match self.f64_list("spectra.ts")? {
            Some(ts) => ts,
            None => {
                let t = self.shift_t()?;
                (1..=8)
                    .map(|k| k as f64 * t)
                    .filter(|&s| s <= grid.extent() / 2.0)
                    .collect()
            }
        };
        if ts.len() < 3 {
            return Err(bad(format!(
                "spectra.ts: need at least 3 shift lengths inside half the \
                 window, got {}",
                ts.len()
            )));
        }
        Ok(ts)
    }

    pub fn n_schedule(&self, default: &[usize]) -> Result<Vec<usize>> {
        match self.f64_list("spectra.n_schedule")? {
            None => Ok(default.to_vec()),
            Some(vals) => vals
                .into_iter()
                .map(|v| {
                    if v > 0.0 && v.fract() == 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(bad(
                            "config key spectra.n_schedule: entries must be positive integers"
                                .into(),
                        ))
                    }
                })
                .collect(),
        }
    }

    pub fn scan_tolerance(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        self.positive(key, v)
    }

    pub fn tilts(&self) -> Result<Option<Vec<f64>>> {
        self.f64_list("symbol.tilts")
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("output.dir").unwrap_or("runs"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(sets: &[&str]) -> Result<RunConfig> {
        let owned: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        RunConfig::load(None, &owned)
    }

    #[test]
    fn defaults_build_the_standard_setup() {
        let c = cfg(&[]).unwrap();
        assert_eq!(c.weight().unwrap(), Weight::Constant);
        let g = c.grid().unwrap();
        assert_eq!(g.count(), 400);
        assert_eq!(g.extent(), 20.0);
        assert_eq!(c.growth_ts(&g).unwrap(), (1..=8).map(f64::from).collect::<Vec<_>>());
        assert!(matches!(
            c.operator_spec(g.spacing()).unwrap(),
            OperatorSpec::RightShift { t } if t == 1.0
        ));
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = cfg(&["grid.spacing=0.1"]).unwrap_err().to_string();
        assert!(err.contains("grid.spacing"), "{err}");
    }

    #[test]
    fn overrides_beat_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[grid]\nextent = 10.0\ncount = 200\n").unwrap();
        let c = RunConfig::load(Some(&path), &["grid.count=100".into()]).unwrap();
        let g = c.grid().unwrap();
        assert_eq!(g.extent(), 10.0);
        assert_eq!(g.count(), 100);
    }

    #[test]
    fn lists_parse_from_toml_arrays_and_set_strings() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[spectra]\nts = [0.5, 1.0, 1.5]\n").unwrap();
        let c = RunConfig::load(Some(&path), &[]).unwrap();
        let g = c.grid().unwrap();
        assert_eq!(c.growth_ts(&g).unwrap(), vec![0.5, 1.0, 1.5]);
        let c = cfg(&["spectra.ts=0.25,0.5,0.75"]).unwrap();
        assert_eq!(c.growth_ts(&g).unwrap(), vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn weight_family_typo_names_the_choices() {
        let err = cfg(&["weight.family=exp"])
            .unwrap()
            .weight()
            .unwrap_err()
            .to_string();
        assert!(err.contains("exponential"), "{err}");
    }

    #[test]
    fn nonpositive_tolerance_is_rejected() {
        let c = cfg(&["spectra.inside_tol=0"]).unwrap();
        let err = c
            .scan_tolerance("spectra.inside_tol", 1e-4)
            .unwrap_err()
            .to_string();
        assert!(err.contains("positive"), "{err}");
    }
}
