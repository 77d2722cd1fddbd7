//! Builds the problem instance from a JSON file and command-line overrides.

use std::fs;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use vertex_pde::config::SpectralConfig;
use vertex_pde::rng::LabRng;
use vertex_pde::scalar::cx;
use vertex_pde::Config;

use crate::args::Global;

#[derive(Debug, Deserialize, Clone, Copy)]
pub struct JsonComplex {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub gamma: Option<JsonComplex>,
    pub mu: Option<Vec<JsonComplex>>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load(g: &Global) -> anyhow::Result<Config> {
    let file = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let l = g.l.or(file.l).ok_or_else(|| anyhow!("L is required (--L or the config file)"))?;
    let n = g.n.or(file.n).unwrap_or(0);
    let seed = g.seed.or(file.seed).unwrap_or(1);

    let mut rng = LabRng::new(seed);
    let drawn_gamma = rng.anisotropy::<f64>(0.2);
    let gamma = match (file.gamma, g.gamma_re, g.gamma_im) {
        (_, Some(re), Some(im)) => cx(re, im),
        (Some(fg), re, im) => cx(re.unwrap_or(fg.re), im.unwrap_or(fg.im)),
        (None, None, None) => drawn_gamma,
        (None, re, im) => cx(re.unwrap_or(drawn_gamma.re), im.unwrap_or(drawn_gamma.im)),
    };
    let mu = match file.mu {
        Some(mu) => {
            if mu.len() != l {
                bail!("mu: expected {l} inhomogeneities for L = {l}, got {}", mu.len());
            }
            mu.iter().map(|z| cx(z.re, z.im)).collect()
        }
        None if g.config.is_some() => bail!("mu: missing from the config file (one entry per site)"),
        None => rng.distinct::<f64>(l, 0.05),
    };

    let mut cfg = SpectralConfig {
        l,
        n,
        gamma,
        mu,
        tol: g.tol.or(file.tol).unwrap_or(1e-9),
        seed,
        max_l: vertex_pde::config::DEFAULT_MAX_L,
    };
    if let Some(cap) = g.max_l {
        cfg.max_l = cap;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn global(args: &[&str]) -> Global {
        let mut full = vec!["bpl"];
        full.extend_from_slice(args);
        full.push("fz");
        crate::args::Cli::parse_from(full).global
    }

    #[test]
    fn flags_alone_draw_a_random_instance() {
        let cfg = load(&global(&["--L", "4", "--n", "2", "--seed", "3"])).unwrap();
        assert_eq!((cfg.l, cfg.n, cfg.seed, cfg.mu.len()), (4, 2, 3, 4));
        assert_eq!(cfg, load(&global(&["--L", "4", "--n", "2", "--seed", "3"])).unwrap());
    }

    #[test]
    fn gamma_parts_override_separately() {
        let cfg = load(&global(&["--L", "2", "--gamma-re", "0.5", "--gamma-im", "-0.25"])).unwrap();
        assert_eq!((cfg.gamma.re, cfg.gamma.im), (0.5, -0.25));
    }

    #[test]
    fn l_is_required() {
        assert!(load(&global(&[])).unwrap_err().to_string().contains("L"));
    }
}
