use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ncx_core::numfmt::csv_number;
use ncx_core::scenarios::{self, MesdParams, TABLE_COLS, TABLE_ROWS};
use ncx_core::{
    apply_noise_to_effects, build_mesd, compute_inclusion_maps, embedding::fragment_facets,
    min_noise_for_embedding, EmbeddingSolution, EmbeddingStatus, GptFragment, NoiseKind,
    NoiseMap,
};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{parse_grid, NoiseArgs, NoiseChoice, PointArgs, Scenario, ScenarioArgs};
use crate::error::CliError;

pub type CmdResult = Result<(), CliError>;

fn solve(f: &GptFragment, noise: &NoiseMap, tol: f64) -> Result<EmbeddingSolution, CliError> {
    Ok(min_noise_for_embedding(f, noise, tol)?)
}

fn emit(text: &str, output: Option<&PathBuf>) -> CmdResult {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Also print the noncontextual model at the optimum.
    #[arg(long)]
    pub model: bool,
}

pub fn robustness(a: &RobustnessArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let noise = a.noise.map(&f, a.point.scenario.eta(), tol)?;
    let sol = solve(&f, &noise, tol)?;
    let mut out = format!("r_min={} status={}\n", csv_number(sol.r_min), sol.status.name());
    if a.model {
        match &sol.model {
            Some(m) => out.push_str(&pretty(json!(m))),
            None => out.push_str("null\n"),
        }
    }
    emit(&out, None)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "depolarizing")]
    pub noise: NoiseChoice,
    /// Grid as `start:stop:step` (inclusive) or `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Worker threads; rows keep grid order.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

struct Row {
    params: Option<MesdParams>,
    r_min: f64,
    status: EmbeddingStatus,
    analytic: Option<f64>,
}

const SWEEP_HEADER: &str = "scenario,noise,eta,theta,alpha,p,r_min,status,analytic_r_min";

pub fn sweep(a: &SweepArgs, tol: f64) -> CmdResult {
    if a.noise == NoiseChoice::Custom {
        return Err(CliError::user("sweeps support depolarizing and dephasing noise"));
    }
    if a.jobs == 0 {
        return Err(CliError::user("--jobs must be at least 1"));
    }
    let s = &a.scenario;
    let eta = s.eta();
    let kind = match a.noise {
        NoiseChoice::Dephasing => NoiseKind::Dephasing { eta },
        _ => NoiseKind::Depolarizing,
    };
    let grid = |g: &Option<String>, angle: bool| -> Result<Option<Vec<f64>>, CliError> {
        g.as_ref()
            .map(|spec| {
                let v = parse_grid(spec).map_err(CliError::user)?;
                Ok(if angle { v.into_iter().map(|x| s.angle(x)).collect() } else { v })
            })
            .transpose()
    };

    let points: Vec<Option<MesdParams>> = if s.scenario == Scenario::CustomJson {
        vec![None]
    } else {
        let Some(thetas) = grid(&a.theta, true)? else {
            return Err(CliError::user("--theta GRID is required for built-in scenarios"));
        };
        let alphas: Vec<Option<f64>> = grid(&a.alpha, true)?.map_or(vec![None], |v| v.into_iter().map(Some).collect());
        let ps: Vec<Option<f64>> = grid(&a.p, false)?.map_or(vec![None], |v| v.into_iter().map(Some).collect());
        let mut pts = Vec::new();
        for &t in &thetas {
            for &al in &alphas {
                for &p in &ps {
                    pts.push(Some(s.params(t, al, p)?));
                }
            }
        }
        pts
    };
    let custom = match s.scenario {
        Scenario::CustomJson => Some(s.custom_fragment(tol)?),
        _ => None,
    };

    let eval = |pt: &Option<MesdParams>| -> Result<Row, CliError> {
        let f = match (pt, &custom) {
            (Some(p), _) => build_mesd(p)?,
            (None, Some(f)) => f.clone(),
            (None, None) => unreachable!("custom fragment loaded above"),
        };
        let noise = match kind {
            NoiseKind::Dephasing { eta } => NoiseMap::dephasing(eta),
            _ => NoiseMap::depolarizing(&f, tol).map_err(CliError::user)?,
        };
        let sol = solve(&f, &noise, tol)?;
        Ok(Row {
            params: *pt,
            r_min: sol.r_min,
            status: sol.status,
            analytic: pt.and_then(|p| scenarios::analytic_r_min(&p, kind)),
        })
    };
    let rows: Vec<Result<Row, CliError>> = if a.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(a.jobs)
            .build()
            .map_err(CliError::user)?;
        pool.install(|| points.par_iter().map(eval).collect())
    } else {
        points.iter().map(eval).collect()
    };

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map_or(String::new(), csv_number);
    for row in rows {
        let row = row?;
        let eta_cell = match kind {
            NoiseKind::Dephasing { eta } => csv_number(eta),
            _ => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.scenario.name(),
            a.noise.name(),
            eta_cell,
            opt(row.params.map(|p| p.theta)),
            opt(row.params.map(|p| p.alpha)),
            opt(row.params.map(|p| p.p)),
            csv_number(row.r_min),
            row.status.name(),
            opt(row.analytic),
        )
        .expect("write to string");
    }
    emit(&out, a.output.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    States,
    Effects,
}

#[derive(Debug, Args)]
pub struct FacetsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value = "states")]
    pub side: Side,
}

/// Facet normals in ambient coordinates, one CSV row each.
pub fn facets(a: &FacetsArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let maps = compute_inclusion_maps(&f, tol);
    let (hs, he) = fragment_facets(&f, &maps, tol)?;
    let (h, basis) = match a.side {
        Side::States => (&hs, &maps.state_basis),
        Side::Effects => (&he, &maps.effect_basis),
    };
    let d = f.ambient_dim();
    let mut out = (0..d).map(|i| format!("h{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    let ambient = &h.normals * h.basis.transpose() * basis.transpose();
    for row in ambient.row_iter() {
        let cells: Vec<String> = row.iter().map(|&x| csv_number(clean(x, tol))).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    emit(&out, None)
}

/// Rounds residue below `tol` to zero so signs of zero do not flicker.
fn clean(x: f64, tol: f64) -> f64 {
    if x.abs() <= tol {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn embed(a: &EmbedArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let noise = a.noise.map(&f, a.point.scenario.eta(), tol)?;
    let sol = solve(&f, &noise, tol)?;
    let sigma = sol.sigma.as_ref().map(|s| {
        s.row_iter()
            .map(|r| r.iter().copied().collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    });
    let value = json!({
        "r_min": sol.r_min,
        "status": sol.status.name(),
        "model": sol.model,
        "state_facets": sol.state_facets.n_facets(),
        "effect_facets": sol.effect_facets.n_facets(),
        "sigma": sigma,
    });
    emit(&pretty(value), a.output.as_ref())
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Noise weight applied to the effects.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
}

pub fn table(a: &TableArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let noise = a.noise.map(&f, a.point.scenario.eta(), tol)?;
    let noisy = apply_noise_to_effects(&f, &noise, a.r, tol).map_err(CliError::user)?;
    let t = scenarios::data_table(&noisy)?;
    let mut out = format!("measurement,{}\n", TABLE_COLS.join(","));
    for (name, row) in TABLE_ROWS.iter().zip(t.probabilities.iter()) {
        let cells: Vec<String> = row.iter().map(|&x| csv_number(clean(x, tol))).collect();
        writeln!(out, "{name},{}", cells.join(",")).expect("write to string");
    }
    emit(&out, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    RDepolMin,
    RDephMin,
    PThreshold,
    CoherenceBound,
    /// Coherence of the tilted state, `sin(theta)`.
    Coherence,
    SceDepol,
    SceDeph,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub name: OracleName,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long)]
    pub deg: bool,
}

pub fn oracle(a: &OracleArgs) -> CmdResult {
    let theta = || -> Result<f64, CliError> {
        let t = a.theta.ok_or_else(|| CliError::user("--theta is required"))?;
        let t = if a.deg { t.to_radians() } else { t };
        MesdParams::new(t).validate()?;
        Ok(t)
    };
    let unit = |name: &str, v: Option<f64>| -> Result<f64, CliError> {
        let v = v.ok_or_else(|| CliError::user(format!("--{name} is required")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::user(format!("--{name} must lie in [0, 1]")));
        }
        Ok(v)
    };
    let sce = |(s, c, e): (f64, f64, f64)| format!("s,c,epsilon\n{},{},{}\n", csv_number(s), csv_number(c), csv_number(e));
    let out = match a.name {
        OracleName::RDepolMin => format!("{}\n", csv_number(scenarios::r_depol_min_analytic(theta()?))),
        OracleName::RDephMin => format!("{}\n", csv_number(scenarios::r_deph_min_analytic(theta()?))),
        OracleName::PThreshold => format!("{}\n", csv_number(scenarios::p_threshold(theta()?))),
        OracleName::CoherenceBound => format!("{}\n", csv_number(scenarios::coherence_bound(unit("p", a.p)?))),
        OracleName::Coherence => {
            let f = build_mesd(&MesdParams::new(theta()?))?;
            format!("{}\n", csv_number(scenarios::coherence(f.state(scenarios::PSI).expect("psi"))))
        }
        OracleName::SceDepol => sce(scenarios::depolarized_sce(theta()?, unit("r", a.r)?)),
        OracleName::SceDeph => sce(scenarios::dephased_sce(theta()?, unit("r", a.r)?)),
    };
    emit(&out, None)
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Read the model off the Z basis instead of solving; states must be
    /// incoherent.
    #[arg(long)]
    pub incoherent: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn model(a: &ModelArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let model = if a.incoherent {
        scenarios::incoherent_model(f.states(), f.effects(), tol)?
    } else {
        let noise = a.noise.map(&f, a.point.scenario.eta(), tol)?;
        let sol = solve(&f, &noise, tol)?;
        sol.model
            .ok_or_else(|| CliError::user(format!("no embedding exists ({})", sol.status.name())))?
    };
    emit(&pretty(json!(model)), a.output.as_ref())
}

#[derive(Debug, Args)]
pub struct FragmentArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn fragment(a: &FragmentArgs, tol: f64) -> CmdResult {
    let f = a.point.fragment(tol)?;
    let mut text = f.to_json_string();
    text.push('\n');
    emit(&text, a.output.as_ref())
}
