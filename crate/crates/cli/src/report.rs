use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use vertex_pde::{Complex64, Config};

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct InstanceEcho {
    #[serde(rename = "L")]
    pub l: usize,
    pub n: usize,
    pub gamma: [f64; 2],
    pub mu: Vec<[f64; 2]>,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub instance: InstanceEcho,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    /// Tables keyed by name; BTreeMap keeps the output order stable.
    pub extras: BTreeMap<String, Value>,
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl RunReport {
    pub fn new(command: &str, cfg: &Config) -> Self {
        Self {
            command: command.to_string(),
            instance: InstanceEcho {
                l: cfg.l,
                n: cfg.n,
                gamma: pair(cfg.gamma),
                mu: cfg.mu.iter().map(|z| pair(*z)).collect(),
                tol: cfg.tol,
                seed: cfg.seed,
            },
            checks: Vec::new(),
            summary: Summary {
                checks: 0,
                passed: 0,
                failed: 0,
                pass: true,
            },
            extras: BTreeMap::new(),
        }
    }

    /// Runs `f`, timing it, and records its residual against `tol`.
    pub fn check<F>(&mut self, name: &str, tol: f64, f: F) -> Result<(), vertex_pde::LabError>
    where
        F: FnOnce(&mut BTreeMap<String, Value>) -> vertex_pde::Result<f64>,
    {
        let start = Instant::now();
        let out = f(&mut self.extras);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let (residual, error) = match out {
            Ok(r) => (r, None),
            // capacity is a property of the request, not a failed check
            Err(e @ vertex_pde::LabError::Capacity { .. }) => return Err(e),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            residual,
            tolerance: tol,
            pass: error.is_none() && residual < tol,
            wall_ms,
            error,
        });
        Ok(())
    }

    pub fn finish(&mut self) {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        self.summary = Summary {
            checks: self.checks.len(),
            passed,
            failed: self.checks.len() - passed,
            pass: passed == self.checks.len(),
        };
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "bpl {}  L={} n={} seed={}\n{:<width$}  {:>10}  {:>8}  {:>9}  result\n",
            self.command, self.instance.l, self.instance.n, self.instance.seed, "check", "residual", "tol", "ms"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<width$}  {:>10.3e}  {:>8.0e}  {:>9.2}  {}\n",
                c.name,
                c.residual,
                c.tolerance,
                c.wall_ms,
                if c.pass { "pass" } else { "FAIL" }
            ));
            if let Some(e) = &c.error {
                out.push_str(&format!("    {e}\n"));
            }
        }
        out.push_str(&format!(
            "{} of {} checks passed\n",
            self.summary.passed, self.summary.checks
        ));
        out
    }
}
