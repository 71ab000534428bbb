//! Surrogate configuration files.
//!
//! One `key = value` pair per line; blank lines and `#` comments are
//! ignored. Recognised keys:
//!
//! ```text
//! nx = 101
//! ny = 101
//! m = 1000
//! dt = 0.125
//! f0 = 0.125
//! harmonics = 2
//! a1 = 0.5                      # amplitudes a1 * 4^-(k-1)
//! amplitudes = 0.5, 0.125, 0.03125   # overrides a1
//! wavelength = 4
//! envelope_width = 1.5
//! mean_level = -0.5
//! antisymmetric = false
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use pmssa_core::{default_amplitudes, WakeConfig};

use crate::error::{Error, Result};

const KEYS: [&str; 12] = [
    "nx",
    "ny",
    "m",
    "dt",
    "f0",
    "harmonics",
    "a1",
    "amplitudes",
    "wavelength",
    "envelope_width",
    "mean_level",
    "antisymmetric",
];

pub fn parse_config(text: &str) -> Result<WakeConfig> {
    let mut entries = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::argument("config", format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::argument(
                "config",
                format!("line {}: unknown key `{key}`", n + 1),
            ));
        }
        entries.insert(key, value.trim());
    }

    fn num<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| Error::argument("config", format!("`{key}`: cannot parse `{v}`")))
    }

    let mut cfg = WakeConfig::default();
    for (&key, &v) in &entries {
        match key {
            "nx" => cfg.nx = num("nx", v)?,
            "ny" => cfg.ny = num("ny", v)?,
            "m" => cfg.m = num("m", v)?,
            "dt" => cfg.dt = num("dt", v)?,
            "f0" => cfg.f0 = num("f0", v)?,
            "wavelength" => cfg.wavelength = num("wavelength", v)?,
            "envelope_width" => cfg.envelope_width = num("envelope_width", v)?,
            "mean_level" => cfg.mean_level = num("mean_level", v)?,
            "antisymmetric" => cfg.antisymmetric = num("antisymmetric", v)?,
            _ => {}
        }
    }
    if let Some(v) = entries.get("harmonics") {
        cfg.n_harmonics = num("harmonics", v)?;
    }
    let a1 = match entries.get("a1") {
        Some(v) => num("a1", v)?,
        None => cfg.amplitudes[0],
    };
    cfg.amplitudes = match entries.get("amplitudes") {
        Some(list) => list
            .split(',')
            .map(|a| num("amplitudes", a.trim()))
            .collect::<Result<Vec<f64>>>()?,
        None => default_amplitudes(a1, cfg.n_harmonics),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<WakeConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(parse_config("# nothing\n\n").unwrap(), WakeConfig::default());
    }

    #[test]
    fn overrides_and_amplitudes() {
        let cfg = parse_config("nx = 21\nharmonics = 1 # fundamental + one\na1 = 2\n").unwrap();
        assert_eq!(cfg.nx, 21);
        assert_eq!(cfg.amplitudes, vec![2.0, 0.5]);
        let cfg = parse_config("harmonics=0\namplitudes=0.7").unwrap();
        assert_eq!(cfg.amplitudes, vec![0.7]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("nx").is_err());
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("m = -3").is_err());
        assert!(parse_config("harmonics = 2\namplitudes = 1, 2").is_err());
    }
}
