//! The checks behind each subcommand. Every check records one residual;
//! tables go into the report extras.

use serde_json::{json, Value};
use vertex_pde::dense::max_abs;
use vertex_pde::dwbc::{self, MAX_DWBC_L};
use vertex_pde::functional::{check_fz_residual, extract_fbar, lambda_bar, random_rapidities, EigenChoice, FnSampler};
use vertex_pde::omega::{check_eigk, extract_omegas, to_poly};
use vertex_pde::pde::{self, SpecialCase};
use vertex_pde::reduction::{build_psi, pde_row_equivalence, upsilon_residual, CoefficientSource, ReductionSystem};
use vertex_pde::rng::LabRng;
use vertex_pde::scalar::cabs;
use vertex_pde::yb;
use vertex_pde::{Complex64, Config, LabError};

use crate::args::{Command, Dwbc, Omega, Pde, Verify};
use crate::report::{pair, RunReport};

/// Why a command could not run at all.
#[derive(Debug)]
pub enum Refusal {
    /// The instance does not fit the command.
    Shape(String),
    Capacity(LabError),
}

impl From<LabError> for Refusal {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Capacity { .. } => Refusal::Capacity(e),
            other => Refusal::Shape(other.to_string()),
        }
    }
}

type Run = Result<(), Refusal>;

fn rapidity_draws(cfg: &Config, count: usize, salt: u64) -> Vec<Vec<Complex64>> {
    (0..3).map(|k| random_rapidities(count, cfg.seed.wrapping_mul(31) ^ (salt + k))).collect()
}

pub fn run(cmd: &Command, cfg: &Config, rep: &mut RunReport) -> Run {
    match cmd {
        Command::Verify { what } => verify(*what, cfg, rep),
        Command::Spectrum { sector } => spectrum(sector.unwrap_or(cfg.n), cfg, rep),
        Command::Fz => fz(cfg, rep),
        Command::Omega { what } => omega(*what, cfg, rep),
        Command::Pde { what: Pde::Residual } => pde_residual(cfg, rep),
        Command::Pde { what: Pde::Special } => special(cfg, rep),
        Command::Reduce => reduce(cfg, rep),
        Command::Dwbc { what } => domain_wall(*what, cfg, rep),
        Command::All => all(cfg, rep),
    }
}

fn all(cfg: &Config, rep: &mut RunReport) -> Run {
    for v in [Verify::Ybe, Verify::Rtt, Verify::Off] {
        verify(v, cfg, rep)?;
    }
    spectrum(cfg.n, cfg, rep)?;
    fz(cfg, rep)?;
    if cfg.n >= 1 {
        for o in [Omega::Extract, Omega::Eigk, Omega::Compare] {
            omega(o, cfg, rep)?;
        }
        if cfg.l >= 3 {
            reduce(cfg, rep)?;
        }
    }
    pde_residual(cfg, rep)?;
    if special_case(cfg).is_some() {
        special(cfg, rep)?;
    }
    if cfg.l <= MAX_DWBC_L {
        let dw = [Dwbc::Partition, Dwbc::Pde];
        for d in dw.into_iter().chain((cfg.l >= 3).then_some(Dwbc::Upsilon)) {
            domain_wall(d, cfg, rep)?;
        }
    }
    Ok(())
}

fn verify(what: Verify, cfg: &Config, rep: &mut RunReport) -> Run {
    let tol = cfg.tol;
    match what {
        Verify::Ybe => rep.check("verify.ybe", tol, |_| {
            let mut rng = LabRng::new(cfg.seed ^ 0x1);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                worst = worst.max(yb::check_ybe(rng.complex(), rng.complex(), cfg.gamma)?);
            }
            Ok(worst)
        })?,
        Verify::Rtt => {
            rep.check("verify.rtt", tol, |_| {
                let mut rng = LabRng::new(cfg.seed ^ 0x2);
                let mut worst: f64 = 0.0;
                for _ in 0..5 {
                    worst = worst.max(yb::check_rtt(rng.complex(), rng.complex(), cfg)?);
                }
                Ok(worst)
            })?;
            rep.check("verify.commuting", tol, |_| {
                let mut rng = LabRng::new(cfg.seed ^ 0x3);
                let mut worst: f64 = 0.0;
                for _ in 0..3 {
                    let tx = yb::transfer(rng.complex(), cfg)?.mat;
                    let ty = yb::transfer(rng.complex(), cfg)?.mat;
                    worst = worst.max(max_abs(&(&tx * &ty - &ty * &tx)) / (max_abs(&tx) * max_abs(&ty)));
                }
                Ok(worst)
            })?;
        }
        Verify::Off => {
            let n = cfg.n.max(1);
            rep.check("verify.off", tol, |_| {
                let mut worst: f64 = 0.0;
                for r in rapidity_draws(cfg, n + 1, 0x4) {
                    let res = yb::check_off_relations(r[0], &r[1..], cfg)?;
                    worst = worst.max(res.a_relation).max(res.d_relation).max(res.t_relation);
                }
                Ok(worst)
            })?;
        }
    }
    Ok(())
}

fn spectrum(sector: usize, cfg: &Config, rep: &mut RunReport) -> Run {
    if sector > cfg.l {
        return Err(Refusal::Shape(format!("sector {sector} exceeds L = {}", cfg.l)));
    }
    rep.check(&format!("spectrum.sector{sector}"), cfg.tol, |extras| {
        let probes = yb::default_probes::<f64>();
        let mut worst: f64 = 0.0;
        let mut table = Vec::new();
        for eig in EigenChoice::all(cfg, sector)? {
            worst = worst.max(eig.consistency(cfg, &probes)?);
            let lb = lambda_bar(&eig, cfg)?;
            table.push(json!({
                "index": eig.index,
                "probe_values": eig.pair.probe_values.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                "delta": lb.poly.coeffs().iter().map(|z| pair(*z)).collect::<Vec<_>>(),
            }));
        }
        extras.insert(format!("spectrum.sector{sector}"), Value::Array(table));
        Ok(worst)
    })?;
    Ok(())
}

fn fz(cfg: &Config, rep: &mut RunReport) -> Run {
    rep.check("fz", cfg.tol, |_| {
        let mut worst: f64 = 0.0;
        for eig in EigenChoice::all(cfg, cfg.n)? {
            let s = FnSampler::new(cfg.clone(), eig);
            for r in rapidity_draws(cfg, cfg.n + 1, 0x5) {
                worst = worst.max(check_fz_residual(&s, r[0], &r[1..])?);
            }
        }
        Ok(worst)
    })?;
    Ok(())
}

fn need_excitations(cfg: &Config, what: &str) -> Run {
    if cfg.n == 0 {
        return Err(Refusal::Shape(format!("{what} needs n ≥ 1")));
    }
    Ok(())
}

fn omega(what: Omega, cfg: &Config, rep: &mut RunReport) -> Run {
    need_excitations(cfg, "omega")?;
    let family = extract_omegas(cfg)?;
    let tol = cfg.tol;
    match what {
        Omega::Extract => {
            rep.check("omega.fit", tol, |_| {
                let lb = &family.lbar;
                Ok(lb.x0_excess.max(lb.x_excess).max(lb.symmetry_defect).max(lb.held_out))
            })?;
            rep.check("omega.commutators", tol, |extras| {
                extras.insert("omega.commutators".into(), json!(family.commutator_norms));
                Ok(family.max_commutator())
            })?;
            rep.check("omega.top_scalar", tol, |_| Ok(family.top_scalar_residual))?;
            rep.check("omega.joint", tol, |extras| {
                let j = &family.joint;
                let deltas: Vec<Vec<[f64; 2]>> = j.deltas.iter().map(|d| d.iter().map(|z| pair(*z)).collect()).collect();
                extras.insert("omega.joint_deltas".into(), json!(deltas));
                extras.insert("omega.defect".into(), json!(j.defect));
                Ok(if j.defect > 0 { f64::INFINITY } else { j.residual })
            })?;
        }
        Omega::Eigk => {
            let report = check_eigk(&family)?;
            rep.check("omega.eigk", tol, |extras| {
                extras.insert("omega.surplus".into(), json!(report.surplus));
                extras.insert(
                    "omega.eigk".into(),
                    json!(report
                        .entries
                        .iter()
                        .map(|e| json!({
                            "index": e.index,
                            "vanishing": e.vanishing,
                            "matched": e.matched,
                            "residual": e.residual,
                            "containment": e.containment,
                        }))
                        .collect::<Vec<_>>()),
                );
                Ok(report.max_residual.max(report.max_fit_error))
            })?;
            rep.check("omega.containment", tol, |_| Ok(report.max_containment))?;
        }
        Omega::Compare => {
            rep.check("omega.closedform", tol, |_| Ok(pde::compare_with_family(&family)?.difference))?;
        }
    }
    Ok(())
}

fn pde_residual(cfg: &Config, rep: &mut RunReport) -> Run {
    rep.check("pde.residual", cfg.tol, |_| {
        let mut worst: f64 = 0.0;
        for eig in EigenChoice::all(cfg, cfg.n)? {
            let fit = extract_fbar(&FnSampler::new(cfg.clone(), eig.clone()))?;
            if fit.poly.max_abs_coeff() < 1e-10 {
                continue;
            }
            let delta = lambda_bar(&eig, cfg)?.poly.coeffs()[cfg.l - 1];
            worst = worst.max(pde::closedform_residual(cfg, &fit.poly, delta)?);
        }
        Ok(worst)
    })?;
    Ok(())
}

fn special_case(cfg: &Config) -> Option<SpecialCase> {
    match (cfg.n, cfg.l) {
        (0, _) => Some(SpecialCase::N0),
        (1, 2) => Some(SpecialCase::N1L2),
        (2, 2) => Some(SpecialCase::N2L2),
        _ => None,
    }
}

fn special(cfg: &Config, rep: &mut RunReport) -> Run {
    let case = special_case(cfg)
        .ok_or_else(|| Refusal::Shape(format!("no closed-form case for n = {}, L = {}", cfg.n, cfg.l)))?;
    let sols = pde::special_solutions(case, cfg)?;
    rep.check("pde.special", cfg.tol, |extras| {
        let mut worst: f64 = 0.0;
        let mut table = Vec::new();
        for sol in &sols {
            worst = worst.max(pde::closedform_residual(cfg, &sol.fbar, sol.delta)?);
            table.push(json!({ "delta": pair(sol.delta) }));
        }
        extras.insert("pde.special".into(), Value::Array(table));
        Ok(worst)
    })?;
    rep.check("pde.special_in_spectrum", cfg.tol, |_| {
        let mut worst: f64 = 0.0;
        if case == SpecialCase::N0 {
            let vac = EigenChoice::all(cfg, 0)?.remove(0);
            let d = lambda_bar(&vac, cfg)?.poly.coeffs()[cfg.l - 1];
            worst = cabs(d - sols[0].delta) / cabs(sols[0].delta);
        } else {
            let family = extract_omegas(cfg)?;
            for sol in &sols {
                worst = worst.max(pde::nearest_joint_delta(&family, sol.delta).1);
            }
        }
        Ok(worst)
    })?;
    Ok(())
}

fn reduce(cfg: &Config, rep: &mut RunReport) -> Run {
    need_excitations(cfg, "reduce")?;
    if cfg.l < 3 {
        return Err(Refusal::Shape(format!("the reduction needs L ≥ 3, got L = {}", cfg.l)));
    }
    let family = extract_omegas(cfg)?;
    let report = check_eigk(&family)?;
    let l = cfg.l;
    let mut equiv: f64 = 0.0;
    rep.check("reduce.upsilon", cfg.tol, |extras| {
        let mut rng = LabRng::new(cfg.seed ^ 0x6);
        let mut worst: f64 = 0.0;
        let mut dim = 0;
        for e in report.entries.iter().filter(|e| !e.vanishing) {
            let f = to_poly(&family.lbar.basis, &e.fbar);
            let sys = ReductionSystem::new(CoefficientSource::Transfer {
                cfg: cfg.clone(),
                delta: e.deltas[l - 1],
            })?;
            dim = sys.dim;
            let psi = build_psi(&f, l)?;
            for _ in 0..5 {
                let pt = rng.spread_point::<f64>(cfg.n, 1.1, 0.15);
                worst = worst.max(upsilon_residual(&sys, &psi, &pt)?.max_relative());
                equiv = equiv.max(pde_row_equivalence(&sys, &f, &pt)?);
            }
        }
        extras.insert("reduce.dim".into(), json!(dim));
        Ok(worst)
    })?;
    rep.check("reduce.row0", cfg.tol, |_| Ok(equiv))?;
    Ok(())
}

fn domain_wall(what: Dwbc, cfg: &Config, rep: &mut RunReport) -> Run {
    let tol = cfg.tol;
    match what {
        Dwbc::Partition => {
            let r: Vec<Complex64> = random_rapidities(cfg.l, cfg.seed ^ 0x7);
            rep.check("dwbc.sz", tol, |extras| {
                let z = dwbc::dwbc_partition(&r, cfg)?;
                extras.insert("dwbc.z".into(), json!(pair(z)));
                dwbc::off_target_weight(&r, cfg)
            })?;
            if cfg.l <= 5 {
                rep.check("dwbc.lattice_sum", tol, |_| {
                    let z = dwbc::dwbc_partition(&r, cfg)?;
                    Ok(cabs(dwbc::configuration_sum(&r, cfg)? - z) / cabs(z))
                })?;
            }
        }
        Dwbc::Pde => {
            let fit = dwbc::extract_zbar(cfg)?;
            rep.check("dwbc.fit", tol, |_| Ok(fit.excess.max(fit.held_out).max(fit.poly.symmetry_defect())))?;
            rep.check("dwbc.pde", tol, |_| dwbc::dwbc_pde_residual(cfg, &fit.poly, 10))?;
        }
        Dwbc::Upsilon => {
            if cfg.l < 3 {
                return Err(Refusal::Shape(format!("the reduction needs L ≥ 3, got L = {}", cfg.l)));
            }
            let fit = dwbc::extract_zbar(cfg)?;
            rep.check("dwbc.upsilon", tol, |_| dwbc::dwbc_upsilon_residual(cfg, &fit.poly, 10))?;
        }
    }
    Ok(())
}
