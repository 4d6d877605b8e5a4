use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::io::parse_key_values;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    FigA1,
    Sandwich,
    Bounds,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Fig1a,
        ExperimentId::Fig1b,
        ExperimentId::Fig2a,
        ExperimentId::Fig2b,
        ExperimentId::FigA1,
        ExperimentId::Sandwich,
        ExperimentId::Bounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Fig1a => "fig1a",
            ExperimentId::Fig1b => "fig1b",
            ExperimentId::Fig2a => "fig2a",
            ExperimentId::Fig2b => "fig2b",
            ExperimentId::FigA1 => "figA1",
            ExperimentId::Sandwich => "sandwich",
            ExperimentId::Bounds => "bounds",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| invalid("experiment", format!("unknown id `{s}`")))
    }
}

/// Fully resolved settings of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub d: usize,
    pub d_list: Vec<usize>,
    pub n: usize,
    pub n_list: Vec<usize>,
    /// Fixed width; `None` means `m = m_multiple · n`.
    pub m: Option<usize>,
    pub m_multiple: usize,
    pub eta: f64,
    /// `None` means `ν = 1/√n`.
    pub nu: Option<f64>,
    pub steps: usize,
    pub delta: f64,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub biased: bool,
    pub target_degree: u8,
    pub ell_max: usize,
    pub outdir: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(id: ExperimentId) -> Self {
        let mut c = Self {
            id,
            d: 10,
            d_list: vec![10],
            n: 500,
            n_list: vec![100, 200, 400, 800],
            m: None,
            m_multiple: 2,
            eta: 1.0,
            nu: None,
            steps: 200,
            delta: 0.05,
            seed: 1,
            seeds: vec![1, 2, 3],
            biased: true,
            target_degree: 1,
            ell_max: 10,
            outdir: PathBuf::from("results"),
        };
        match id {
            ExperimentId::Fig1a => {
                c.d_list = vec![5, 10, 20];
                c.biased = false;
            }
            ExperimentId::FigA1 => c.biased = false,
            ExperimentId::Fig1b => c.ell_max = 0,
            ExperimentId::Fig2a => c.d_list = vec![5, 10, 20],
            ExperimentId::Fig2b => {
                c.n = 1000;
                c.m = Some(2000);
            }
            ExperimentId::Sandwich => {
                c.d = 5;
                c.n = 50;
                c.m = Some(500);
                c.eta = 0.5;
                c.steps = 20;
                c.biased = false;
            }
            ExperimentId::Bounds => {
                c.n = 1000;
                c.m = Some(2000);
                c.n_list = vec![1000, 10000];
                c.ell_max = 4;
            }
        }
        c
    }

    /// Defaults, then the `key=value` file, then `overrides` in order.
    pub fn resolve(
        id: ExperimentId,
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut c = Self::defaults(id);
        if let Some(path) = file {
            for (k, v) in parse_key_values(&std::fs::read_to_string(path)?)? {
                c.set(&k, &v)?;
            }
        }
        for (k, v) in overrides {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn width(&self, n: usize) -> usize {
        self.m.unwrap_or(self.m_multiple * n)
    }

    pub fn nu_for(&self, n: usize) -> f64 {
        self.nu.unwrap_or(1.0 / (n as f64).sqrt())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("`{key}`: cannot parse `{v}`")))
        }
        fn list<T: FromStr>(key: &'static str, v: &str) -> Result<Vec<T>> {
            v.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| num(key, s))
                .collect()
        }
        match key {
            "d" => self.d = num("d", value)?,
            "d_list" => self.d_list = list("d_list", value)?,
            "n" => self.n = num("n", value)?,
            "n_list" => self.n_list = list("n_list", value)?,
            "m" => {
                self.m = match value.trim() {
                    "auto" => None,
                    v => Some(num("m", v)?),
                }
            }
            "m_rule" => {
                let v = value.trim();
                let k = v.strip_suffix('n').unwrap_or(v);
                self.m_multiple = num("m_rule", k)?;
                self.m = None;
            }
            "eta" => self.eta = num("eta", value)?,
            "nu" => {
                self.nu = match value.trim() {
                    "auto" => None,
                    v => Some(num("nu", v)?),
                }
            }
            "T" | "steps" => self.steps = num("T", value)?,
            "delta" => self.delta = num("delta", value)?,
            "seed" => self.seed = num("seed", value)?,
            "seeds" => self.seeds = list("seeds", value)?,
            "kernel" => {
                self.biased = match value.trim() {
                    "biased" => true,
                    "unbiased" => false,
                    v => {
                        return Err(invalid(
                            "kernel",
                            format!("expected biased|unbiased, got `{v}`"),
                        ))
                    }
                }
            }
            "target_degree" => self.target_degree = num("target_degree", value)?,
            "ell_max" => self.ell_max = num("ell_max", value)?,
            "outdir" => self.outdir = PathBuf::from(value.trim()),
            other => return Err(invalid("config", format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(invalid(name, "must be positive"))
            }
        };
        positive("d", self.d >= 3)?;
        positive(
            "d_list",
            !self.d_list.is_empty() && self.d_list.iter().all(|&d| d >= 3),
        )?;
        positive("n", self.n > 0)?;
        positive(
            "n_list",
            !self.n_list.is_empty() && self.n_list.iter().all(|&n| n > 0),
        )?;
        positive("m", self.m != Some(0) && self.m_multiple > 0)?;
        positive("eta", self.eta >= 0.0 && self.eta.is_finite())?;
        positive("nu", self.nu.is_none_or(|v| v > 0.0 && v <= 1.0))?;
        positive("seeds", !self.seeds.is_empty())?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", "must lie in (0, 1)"));
        }
        if !(1..=2).contains(&self.target_degree) {
            return Err(invalid("target_degree", "must be 1 or 2"));
        }
        Ok(())
    }

    /// Config echo, one `key=value` per line.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("id", self.id.to_string()),
            ("d", self.d.to_string()),
            ("d_list", join(&self.d_list)),
            ("n", self.n.to_string()),
            ("n_list", join(&self.n_list)),
            ("m", self.m.map_or_else(|| "auto".into(), |m| m.to_string())),
            ("m_rule", format!("{}n", self.m_multiple)),
            ("eta", self.eta.to_string()),
            (
                "nu",
                self.nu.map_or_else(|| "auto".into(), |v| v.to_string()),
            ),
            ("T", self.steps.to_string()),
            ("delta", self.delta.to_string()),
            ("seed", self.seed.to_string()),
            (
                "seeds",
                self.seeds
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "kernel",
                if self.biased { "biased" } else { "unbiased" }.into(),
            ),
            ("target_degree", self.target_degree.to_string()),
            ("ell_max", self.ell_max.to_string()),
            ("outdir", self.outdir.display().to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("fig3".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "# comment\nn = 40\nseeds=4,5\nkernel=unbiased\n").unwrap();
        let c = ExperimentConfig::resolve(
            ExperimentId::Sandwich,
            Some(&path),
            &[("n".into(), "60".into()), ("T".into(), "3".into())],
        )
        .unwrap();
        assert_eq!(c.n, 60);
        assert_eq!(c.steps, 3);
        assert_eq!(c.seeds, vec![4, 5]);
        assert!(!c.biased);
        assert_eq!(c.width(60), 500);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |k: &str, v: &str| {
            ExperimentConfig::resolve(ExperimentId::Fig2b, None, &[(k.into(), v.into())]).is_err()
        };
        assert!(bad("n", "0"));
        assert!(bad("eta", "-1"));
        assert!(bad("delta", "1.5"));
        assert!(bad("kernel", "other"));
        assert!(bad("colour", "red"));
        assert!(bad("d", "2"));
    }

    #[test]
    fn width_rules() {
        let mut c = ExperimentConfig::defaults(ExperimentId::Fig1a);
        assert_eq!(c.width(100), 200);
        c.set("m_rule", "3n").unwrap();
        assert_eq!(c.width(100), 300);
        c.set("m", "7").unwrap();
        assert_eq!(c.width(100), 7);
        assert!((c.nu_for(400) - 0.05).abs() < 1e-15);
    }
}
