//! key=value scenario configuration.
//!
//! Settings come from a config file, positional `key=value` arguments and
//! dedicated flags, in that order of precedence (later wins). Unknown keys
//! are rejected by name. Grids use `start:step:stop` (inclusive); a bare
//! number is a one-point grid.

use anyhow::{anyhow, bail, Context, Result};
use lcitgsm::{BoundMethod, ConstellationKind, DetectorKind, Scenario, Scheme};

const KNOWN_KEYS: &[&str] = &[
    "scheme", "nt", "nr", "na", "mod", "detector", "tmld_c", "snr", "seed", "errors", "max_bits",
    "method", "beta",
];

/// Ordered key=value settings; the last occurrence of a key wins.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<(String, String)>,
}

impl Config {
    /// Parse whitespace/newline-separated `key=value` tokens. `#` starts a
    /// comment running to the end of the line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split_whitespace() {
                let (key, value) = token
                    .split_once('=')
                    .ok_or_else(|| anyhow!("expected key=value, got `{token}`"))?;
                cfg.set(key, value)?;
            }
        }
        Ok(cfg)
    }

    /// Append one setting, validating the key name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.to_ascii_lowercase().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!(
                "unknown key `{key}` (known keys: {})",
                KNOWN_KEYS.join(", ")
            );
        }
        self.entries.push((key, value.to_string()));
        Ok(())
    }

    pub fn merge(&mut self, other: Config) {
        self.entries.extend(other.entries);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.require("scheme")?.to_ascii_lowercase().as_str() {
            "dtaar" | "dtaa-r" => Ok(Scheme::DtaaR),
            "dtaad" | "dtaa-d" => Ok(Scheme::DtaaD),
            "lut" => Ok(Scheme::Lut),
            "gsm" => Ok(Scheme::Gsm),
            "sm" => Ok(Scheme::Sm),
            other => bail!("key `scheme`: unknown scheme `{other}`"),
        }
    }

    pub fn modulation(&self) -> Result<(ConstellationKind, usize)> {
        let text = self.require("mod")?.to_ascii_lowercase();
        let (kind, rest) = if let Some(rest) = text.strip_prefix("psk") {
            (ConstellationKind::Psk, rest)
        } else if let Some(rest) = text.strip_prefix("qam") {
            (ConstellationKind::Qam, rest)
        } else {
            bail!("key `mod`: expected pskM or qamM, got `{text}`");
        };
        let order: usize = rest
            .parse()
            .with_context(|| format!("key `mod`: bad order in `{text}`"))?;
        Ok((kind, order))
    }

    pub fn nt(&self) -> Result<usize> {
        parse_int(self.require("nt")?).context("key `nt`")
    }

    /// `nt` as a grid for complexity tables: either a scalar or
    /// start:step:stop.
    pub fn nt_grid(&self) -> Result<Vec<usize>> {
        let raw = self.require("nt")?;
        if raw.contains(':') {
            let grid = parse_grid(raw).context("key `nt`")?;
            grid.iter()
                .map(|&x| {
                    if x.fract() != 0.0 || x < 1.0 {
                        bail!("key `nt`: grid value {x} is not a positive integer")
                    } else {
                        Ok(x as usize)
                    }
                })
                .collect()
        } else {
            Ok(vec![self.nt()?])
        }
    }

    pub fn nr(&self) -> Result<usize> {
        parse_int(self.require("nr")?).context("key `nr`")
    }

    pub fn na(&self) -> Result<Option<usize>> {
        self.get("na")
            .map(|v| parse_int(v).context("key `na`"))
            .transpose()
    }

    pub fn detector(&self) -> Result<DetectorKind> {
        match self.get("detector").unwrap_or("mld") {
            "mld" => Ok(DetectorKind::Mld),
            "tmld" => Ok(DetectorKind::Tmld),
            "dmld" => Ok(DetectorKind::Dmld),
            other => bail!("key `detector`: unknown detector `{other}`"),
        }
    }

    pub fn tmld_c(&self) -> Result<f64> {
        self.get("tmld_c")
            .map(|v| v.parse::<f64>().context("key `tmld_c`"))
            .transpose()
            .map(|v| v.unwrap_or(Scenario::DEFAULT_TMLD_C))
    }

    pub fn snr_grid(&self) -> Result<Vec<f64>> {
        parse_grid(self.require("snr")?).context("key `snr`")
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed")
            .map(|v| v.parse::<u64>().context("key `seed`"))
            .transpose()
            .map(|v| v.unwrap_or(0))
    }

    pub fn target_errors(&self) -> Result<u64> {
        self.get("errors")
            .map(|v| parse_count(v).context("key `errors`"))
            .transpose()
            .map(|v| v.unwrap_or(Scenario::DEFAULT_TARGET_ERRORS))
    }

    pub fn max_bits(&self) -> Result<u64> {
        self.get("max_bits")
            .map(|v| parse_count(v).context("key `max_bits`"))
            .transpose()
            .map(|v| v.unwrap_or(Scenario::DEFAULT_MAX_BITS))
    }

    pub fn method(&self) -> Result<BoundMethod> {
        match self.get("method").unwrap_or("quadrature") {
            "quadrature" => Ok(BoundMethod::Quadrature),
            "chernoff" => Ok(BoundMethod::Chernoff),
            other => bail!("key `method`: unknown method `{other}`"),
        }
    }

    pub fn beta(&self) -> Result<Option<f64>> {
        self.get("beta")
            .map(|v| v.parse::<f64>().context("key `beta`"))
            .transpose()
    }

    /// Assemble and validate a full simulation scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let (modulation, order) = self.modulation()?;
        let scenario = Scenario {
            scheme: self.scheme()?,
            nt: self.nt()?,
            nr: self.nr()?,
            na: self.na()?,
            modulation,
            order,
            detector: self.detector()?,
            tmld_c: self.tmld_c()?,
            snr_db: self.snr_grid()?,
            target_errors: self.target_errors()?,
            max_bits: self.max_bits()?,
            seed: self.seed()?,
        };
        if scenario.scheme == Scheme::Gsm && scenario.na.is_none() {
            bail!("key `na` is required for scheme=gsm");
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

fn parse_int(raw: &str) -> Result<usize> {
    raw.parse::<usize>()
        .map_err(|e| anyhow!("`{raw}`: {e}"))
}

/// Counts accept scientific notation (2e7) for convenience.
fn parse_count(raw: &str) -> Result<u64> {
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = raw.parse().map_err(|e| anyhow!("`{raw}`: {e}"))?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        bail!("`{raw}` is not a nonnegative integer");
    }
    Ok(v as u64)
}

/// A bare number, or inclusive `start:step:stop`.
fn parse_grid(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single
            .parse::<f64>()
            .map_err(|e| anyhow!("`{raw}`: {e}"))?]),
        [start, step, stop] => {
            let start: f64 = start.parse().map_err(|e| anyhow!("`{raw}`: {e}"))?;
            let step: f64 = step.parse().map_err(|e| anyhow!("`{raw}`: {e}"))?;
            let stop: f64 = stop.parse().map_err(|e| anyhow!("`{raw}`: {e}"))?;
            if step <= 0.0 {
                bail!("`{raw}`: step must be positive");
            }
            if stop < start {
                bail!("`{raw}`: stop below start");
            }
            let mut grid = Vec::new();
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            for i in 0..=count {
                grid.push(start + i as f64 * step);
            }
            Ok(grid)
        }
        _ => bail!("`{raw}`: expected a number or start:step:stop"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scenario_round_trip() {
        let cfg =
            Config::from_text("scheme=lut nt=4 nr=4 mod=qam16 detector=dmld snr=0:2:20").unwrap();
        let sc = cfg.scenario().unwrap();
        assert_eq!(sc.scheme, Scheme::Lut);
        assert_eq!(sc.detector, DetectorKind::Dmld);
        assert_eq!(sc.snr_db.len(), 11);
        assert_eq!(sc.target_errors, 200);
        assert_eq!(sc.max_bits, 20_000_000);
        assert_eq!(sc.seed, 0);
        // Throughput m = 3 + 4.
        assert_eq!(sc.throughput().unwrap(), 7);
    }

    #[test]
    fn gsm_without_na_names_the_key() {
        let cfg = Config::from_text("scheme=gsm nt=5 nr=4 mod=qam8 snr=0:2:10").unwrap();
        let err = cfg.scenario().unwrap_err().to_string();
        assert!(err.contains("`na`"), "{err}");
    }

    #[test]
    fn dtaar_table_scenario_throughput() {
        let cfg = Config::from_text("scheme=dtaar nt=3 nr=1 mod=psk2 snr=0").unwrap();
        assert_eq!(cfg.scenario().unwrap().throughput().unwrap(), 4);
    }

    #[test]
    fn unknown_keys_rejected_by_name() {
        let err = Config::from_text("schem=lut").unwrap_err().to_string();
        assert!(err.contains("`schem`"), "{err}");
    }

    #[test]
    fn later_settings_override_earlier() {
        let mut cfg = Config::from_text("seed=1 seed=2").unwrap();
        assert_eq!(cfg.seed().unwrap(), 2);
        cfg.set("seed", "9").unwrap();
        assert_eq!(cfg.seed().unwrap(), 9);
    }

    #[test]
    fn comments_and_newlines() {
        let cfg = Config::from_text("# a recipe\nscheme=lut # trailing\nnt=4\n").unwrap();
        assert_eq!(cfg.scheme().unwrap(), Scheme::Lut);
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
        assert_eq!(parse_grid("0:2:6").unwrap(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(parse_grid("-2:1:0").unwrap(), vec![-2.0, -1.0, 0.0]);
        assert!(parse_grid("0:0:6").is_err());
        assert!(parse_grid("0:2").is_err());
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("2e7").unwrap(), 20_000_000);
        assert_eq!(parse_count("200").unwrap(), 200);
        assert!(parse_count("2.5").is_err());
    }
}
