//! The experiments behind each subcommand. Each returns its artifacts as
//! bytes together with the seeds it consumed; nothing here touches the disk.

use dtasep_core::coupling::{audit_path_bound, audit_z_distribution};
use dtasep_core::lpp::{replica_seeds, scaled_point, tau_estimate};
use dtasep_core::seed::derive_seed;
use dtasep_core::shape::flux_hom;
use dtasep_core::sim::{curve_seeds, flux_curve, CurvePoint, Realizations};
use dtasep_core::{DisorderLaw, Environment, MeasureParams, ShapeModel};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    CouplingAuditParams, EnvSampleParams, FluxCurveParams, LppTauParams, Params, PlateauParams, RunConfig,
};
use crate::output::{json_bytes, Csv};

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub seeds: Value,
    /// Short human-readable lines for the terminal.
    pub summary: Vec<String>,
}

fn artifact(name: &str, bytes: Vec<u8>) -> Artifact {
    Artifact {
        name: name.to_string(),
        bytes,
    }
}

/// Compact law descriptor safe to put in a CSV cell.
pub fn law_label(law: &DisorderLaw) -> String {
    match law {
        DisorderLaw::PointMass { rate } => format!("point(r={rate})"),
        DisorderLaw::TwoPoint { slow, fast, p_slow } => format!("twopoint(r={slow} b={fast} p={p_slow})"),
        DisorderLaw::Uniform { lo, hi } => format!("uniform(r={lo} b={hi})"),
        DisorderLaw::Mixture { base, epsilon, slow } => {
            format!("mixture(base={base} epsilon={epsilon} slow={})", law_label(slow))
        }
    }
}

pub fn execute(config: &RunConfig) -> anyhow::Result<Outcome> {
    let seed = |stream: &str| derive_seed(config.master_seed, config.experiment.label(), 0, stream);
    match &config.params {
        Params::EnvSample(p) => env_sample(&config.law, p, seed("env")),
        Params::LppTau(p) => lpp_tau(&config.law, p, config.master_seed),
        Params::CouplingAudit(p) => coupling_audit(&config.law, p, seed("z"), seed("path")),
        Params::Plateau(p) => plateau(&config.law, p),
        Params::FluxCurve(p) => {
            let (curve, seeds, params) = simulate(&config.law, p, seed("root"))?;
            let mut out = curve_artifacts(&config.law, p, &params, &curve);
            out.seeds = seeds;
            Ok(out)
        }
        Params::FundamentalDiagram(p) => fundamental_diagram(&config.law, p, seed("root")),
    }
}

fn env_sample(law: &DisorderLaw, p: &EnvSampleParams, env_seed: u64) -> anyhow::Result<Outcome> {
    let env = Environment::sample(law, env_seed, p.i_min, p.i_max)?;
    let mut csv = Csv::new(&["i", "alpha"]);
    for (k, &a) in env.rates().iter().enumerate() {
        csv.row(vec![(p.i_min + k as i64).into(), a.into()]);
    }
    let n = env.len() as f64;
    let sample_inverse = env.rates().iter().map(|a| 1.0 / a).sum::<f64>() / n;
    let sample_min = env.rates().iter().copied().fold(f64::INFINITY, f64::min);
    let summary = json!({
        "law": law,
        "i_min": p.i_min,
        "i_max": p.i_max,
        "essential_infimum": law.essential_infimum()?,
        "mean_inverse_rate": law.mean_inverse_rate()?,
        "mu": law.mu()?,
        "sample_mean_inverse_rate": sample_inverse,
        "sample_min": sample_min,
    });
    Ok(Outcome {
        summary: vec![format!(
            "{} sites: min alpha {sample_min}, mean 1/alpha {sample_inverse:.6} (law {:.6}), mu {:.6}",
            env.len(),
            law.mean_inverse_rate()?,
            law.mu()?
        )],
        artifacts: vec![artifact("env.csv", csv.into_bytes()), artifact("env.json", json_bytes(&summary))],
        seeds: json!({ "env": env_seed }),
    })
}

fn lpp_tau(law: &DisorderLaw, p: &LppTauParams, master_seed: u64) -> anyhow::Result<Outcome> {
    let model = ShapeModel::from_law(law)?;
    let mut csv = Csv::new(&["x", "y", "n", "i", "j", "replicas", "mean", "sem", "tau_bound"]);
    let mut points = Vec::new();
    let mut seeds = Vec::new();
    let mut summary = Vec::new();
    for (k, (&x, &y)) in p.x.iter().zip(&p.y).enumerate() {
        let point_seed = derive_seed(master_seed, "lpp-tau", k as u64, "root");
        let est = tau_estimate(law, x, y, &p.sizes, p.replicas, point_seed)?;
        let bound = model.tilde_tau(x, y)?;
        for s in &est.per_size {
            let t = scaled_point(x, y, s.n);
            csv.row(vec![
                x.into(),
                y.into(),
                s.n.into(),
                t.i.into(),
                t.j.into(),
                p.replicas.into(),
                s.mean.into(),
                s.sem.into(),
                bound.into(),
            ]);
        }
        summary.push(format!(
            "({x}, {y}): T/n = {:.5} at n = {}, bound {bound:.5}",
            est.point_estimate,
            p.sizes.last().unwrap()
        ));
        let replica: Vec<Value> = (0..p.replicas as u64)
            .map(|q| {
                let (env, y) = replica_seeds(point_seed, q);
                json!({ "replica": q, "env": env, "Y": y })
            })
            .collect();
        seeds.push(json!({ "point": k, "root": point_seed, "replicas": replica }));
        points.push(json!({ "estimate": est, "tau_bound": bound }));
    }
    let report = json!({ "law": law, "r": model.r, "mu": model.mu, "points": points });
    Ok(Outcome {
        artifacts: vec![artifact("tau.csv", csv.into_bytes()), artifact("tau.json", json_bytes(&report))],
        seeds: Value::Array(seeds),
        summary,
    })
}

fn coupling_audit(law: &DisorderLaw, p: &CouplingAuditParams, z_seed: u64, path_seed: u64) -> anyhow::Result<Outcome> {
    let z = audit_z_distribution(law, p.samples, z_seed)?;
    let path = audit_path_bound(law, p.path_x, p.path_y, p.path_n, p.path_replicas, path_seed)?;
    let mut csv = Csv::new(&["replica", "conditional_sum", "coverage_bound", "sampled_sum", "columns_covered"]);
    for r in &path.replicas {
        csv.row(vec![
            r.replica.into(),
            r.conditional_sum.into(),
            r.coverage_bound.into(),
            r.sampled_sum.into(),
            r.columns_covered.into(),
        ]);
    }
    let summary = vec![
        format!(
            "Z audit: KS D = {:.5}, p = {:.4} -> {}",
            z.ks.statistic,
            z.ks.p_value,
            if z.pass { "PASS" } else { "FAIL" }
        ),
        format!(
            "path audit: mean {:.5} +- {:.5} against mu x = {:.5} -> {}",
            path.mean,
            path.sem,
            path.mu * path.x,
            if path.bound_holds { "PASS" } else { "FAIL" }
        ),
    ];
    let report = json!({ "z_audit": z, "path_audit": path });
    Ok(Outcome {
        artifacts: vec![
            artifact("coupling.json", json_bytes(&report)),
            artifact("coupling_paths.csv", csv.into_bytes()),
        ],
        seeds: json!({ "z_audit": z_seed, "path_audit": path_seed }),
        summary,
    })
}

#[derive(Serialize)]
struct PlateauRow {
    rho: f64,
    flux: f64,
    on_plateau_by_flux: bool,
    profile_max: f64,
    profile_argmax: f64,
    status: &'static str,
    consistent: bool,
}

fn plateau_rows(model: &ShapeModel, grid: &[f64]) -> anyhow::Result<Vec<PlateauRow>> {
    let quarter = model.r / 4.0;
    grid.iter()
        .map(|&rho| {
            let flux = model.flux_tilde(rho)?.value;
            let check = model.plateau_check(rho)?;
            let by_flux = flux >= quarter - 1e-6;
            Ok(PlateauRow {
                rho,
                flux,
                on_plateau_by_flux: by_flux,
                profile_max: check.max_value,
                profile_argmax: check.argmax,
                status: if check.pass { "PASS" } else { "FAIL" },
                consistent: by_flux == check.pass,
            })
        })
        .collect()
}

fn plateau(law: &DisorderLaw, p: &PlateauParams) -> anyhow::Result<Outcome> {
    let model = ShapeModel::from_law(law)?;
    let (lo, hi) = model.plateau_interval();
    let rows = plateau_rows(&model, &p.grid())?;
    let mut csv = Csv::new(&["rho", "flux", "on_plateau_by_flux", "profile_max", "profile_argmax", "status"]);
    for row in &rows {
        csv.row(vec![
            row.rho.into(),
            row.flux.into(),
            row.on_plateau_by_flux.into(),
            row.profile_max.into(),
            row.profile_argmax.into(),
            row.status.into(),
        ]);
    }
    let consistent = rows.iter().all(|r| r.consistent);
    let on = rows.iter().filter(|r| r.status == "PASS").count();
    let report = json!({
        "law": law,
        "r": model.r,
        "mu": model.mu,
        "plateau_interval": [lo, hi],
        "plateau_value": model.r / 4.0,
        "all_consistent": consistent,
        "points": rows,
    });
    Ok(Outcome {
        artifacts: vec![
            artifact("plateau.json", json_bytes(&report)),
            artifact("plateau.csv", csv.into_bytes()),
        ],
        seeds: json!({}),
        summary: vec![format!(
            "plateau [{lo}, {hi}] at flux {}: {on} of {} grid densities on it, routes consistent: {consistent}",
            model.r / 4.0,
            rows.len()
        )],
    })
}

fn simulate(law: &DisorderLaw, p: &FluxCurveParams, root: u64) -> anyhow::Result<(Vec<CurvePoint>, Value, MeasureParams)> {
    let r = law.essential_infimum()?;
    let params = MeasureParams {
        burn_in: p.burn_in.unwrap_or_else(|| MeasureParams::default_burn_in(p.sites, r)),
        window: p.window,
        batches: p.batches,
    };
    let realizations = if p.realizations == 1 {
        Realizations::Fixed
    } else {
        Realizations::Across(p.realizations)
    };
    let curve = flux_curve(law, p.sites, &p.rho, params, root, realizations)?;
    let tasks: Vec<Value> = (0..p.rho.len())
        .flat_map(|g| (0..p.realizations).map(move |q| (g, q)))
        .map(|(g, q)| {
            let (env, placement, dynamics) = curve_seeds(root, g, q);
            json!({ "rho_index": g, "realization": q, "env": env, "placement": placement, "dynamics": dynamics })
        })
        .collect();
    Ok((curve, json!({ "root": root, "tasks": tasks }), params))
}

fn curve_artifacts(law: &DisorderLaw, p: &FluxCurveParams, params: &MeasureParams, curve: &[CurvePoint]) -> Outcome {
    let label = law_label(law);
    let mut csv = Csv::new(&[
        "law",
        "L",
        "rho",
        "particles",
        "burn_in",
        "window",
        "batches",
        "realizations",
        "estimate",
        "sem",
        "first_half",
        "second_half",
    ]);
    let mut summary = Vec::new();
    for point in curve {
        let m = &point.measurements[0];
        let k = point.measurements.len() as f64;
        let first = point.measurements.iter().map(|m| m.first_half).sum::<f64>() / k;
        let second = point.measurements.iter().map(|m| m.second_half).sum::<f64>() / k;
        csv.row(vec![
            label.clone().into(),
            p.sites.into(),
            point.estimate.rho.into(),
            m.particles.into(),
            params.burn_in.into(),
            params.window.into(),
            params.batches.into(),
            p.realizations.into(),
            point.estimate.value.into(),
            point.estimate.sem.into(),
            first.into(),
            second.into(),
        ]);
        summary.push(format!(
            "rho {:.4}: flux {:.6} +- {:.6}",
            point.estimate.rho, point.estimate.value, point.estimate.sem
        ));
    }
    let report = json!({ "law": law, "sites": p.sites, "params": params, "points": curve });
    Outcome {
        artifacts: vec![
            artifact("flux_curve.csv", csv.into_bytes()),
            artifact("flux_curve.json", json_bytes(&report)),
        ],
        seeds: Value::Null,
        summary,
    }
}

fn fundamental_diagram(law: &DisorderLaw, p: &FluxCurveParams, root: u64) -> anyhow::Result<Outcome> {
    let model = ShapeModel::from_law(law)?;
    let (lo, hi) = model.plateau_interval();
    let (curve, seeds, params) = simulate(law, p, root)?;
    let rows = plateau_rows(&model, &p.rho)?;
    let mut out = curve_artifacts(law, p, &params, &curve);
    let mut csv = Csv::new(&[
        "rho",
        "simulated",
        "sem",
        "variational",
        "homogeneous_at_r",
        "plateau_status",
    ]);
    let mut joined = Vec::new();
    for (point, row) in curve.iter().zip(&rows) {
        let hom = flux_hom(model.r, row.rho);
        csv.row(vec![
            row.rho.into(),
            point.estimate.value.into(),
            point.estimate.sem.into(),
            row.flux.into(),
            hom.into(),
            row.status.into(),
        ]);
        joined.push(json!({
            "rho": row.rho,
            "simulated": point.estimate,
            "variational": row.flux,
            "homogeneous_at_r": hom,
            "plateau": row,
        }));
    }
    let report = json!({
        "law": law,
        "r": model.r,
        "mu": model.mu,
        "plateau_interval": [lo, hi],
        "plateau_value": model.r / 4.0,
        "sites": p.sites,
        "params": params,
        "points": joined,
    });
    out.artifacts.push(artifact("fundamental_diagram.csv", csv.into_bytes()));
    out.artifacts.push(artifact("fundamental_diagram.json", json_bytes(&report)));
    out.summary.insert(0, format!("plateau [{lo}, {hi}] at flux {}", model.r / 4.0));
    out.seeds = seeds;
    Ok(out)
}
