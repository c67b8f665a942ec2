//! One function per subcommand. Each reads the resolved config and writes its artifacts.

use std::f64::consts::PI;

use anyhow::bail;
use kdvb_core::carleman::{
    default_ladder, fd_cross_check, positivity_scan, verify_inequality, AdmissibleTest, CarlemanQuadrature,
    CarlemanWeight, Expansion, ExpansionVariant, MarginGrid,
};
use kdvb_core::control::{hum_solve, noncontrol_scan, steer_pipeline, ControlProblem, SteerParams, SteerVariant, SteeringPlan};
use kdvb_core::io::Table;
use kdvb_core::linear::{trace_extract, whole_line_propagate, BoundaryData, WholeLine};
use kdvb_core::nonlinear::{energy_audit, solve_fixed_point, IbvpProblem, SolveReport};
use kdvb_core::numerics::{ComplexField, Grid1D};
use kdvb_core::periodic::{ensemble_ratios, ingham_params, single_mode_ratio, spectrum, RatioRoute};
use kdvb_core::{Error, State};
use ndarray::Array2;
use num_complex::Complex;
use serde_json::json;

use crate::config::{need, DataSection, GridSection, PhysicsSection, RunConfig, RunSection, SolverSection};
use crate::output::Artifacts;

pub const COMMANDS: [&str; 10] = [
    "solve-ivp",
    "solve-ibvp",
    "solve-nonlinear",
    "spectrum",
    "observability",
    "carleman",
    "hum",
    "modes",
    "steer",
    "energy-audit",
];

/// Built-in values for the keys a command reads; everything else stays unset.
pub fn defaults(command: &str) -> RunConfig {
    let run = RunSection { seed: Some(0), out: Some(format!("out/{command}").into()) };
    let halfline = RunConfig {
        grid: GridSection { nx: Some(256), nt: Some(33), x_max: Some(30.0) },
        physics: PhysicsSection { horizon: Some(1.0), ..Default::default() },
        data: DataSection { amplitude: Some(0.2), center: Some(3.0), width: Some(1.0), h_amp: Some(0.0), g_amp: Some(0.0) },
        solver: SolverSection { tol: Some(1e-10), max_iter: Some(60), ..Default::default() },
        run: run.clone(),
    };
    match command {
        "solve-ivp" => RunConfig {
            grid: GridSection { nx: Some(512), nt: Some(11), x_max: Some(20.0) },
            physics: PhysicsSection { horizon: Some(1.0), ..Default::default() },
            data: DataSection { amplitude: Some(1.0), center: Some(0.0), width: Some(1.0), ..Default::default() },
            run,
            ..Default::default()
        },
        "solve-ibvp" | "solve-nonlinear" | "energy-audit" => halfline,
        "spectrum" => RunConfig {
            physics: PhysicsSection { big_l: Some(PI), n_max: Some(64), ..Default::default() },
            run,
            ..Default::default()
        },
        "observability" => RunConfig {
            grid: GridSection { nx: Some(129), nt: Some(129), x_max: None },
            physics: PhysicsSection {
                big_l: Some(PI),
                l: Some(PI / 2.0),
                horizon: Some(4.0),
                n_max: Some(8),
                decay: Some(2.0),
                ..Default::default()
            },
            solver: SolverSection { draws: Some(100), route: Some("analytic".into()), ..Default::default() },
            run,
            ..Default::default()
        },
        "carleman" => RunConfig {
            physics: PhysicsSection { big_l: Some(1.0), horizon: Some(2.0), epsilon: Some(0.1), ..Default::default() },
            solver: SolverSection { draws: Some(50), variant: Some("derived".into()), ..Default::default() },
            run,
            ..Default::default()
        },
        "hum" => RunConfig {
            grid: GridSection { nx: Some(48), nt: Some(48), x_max: None },
            physics: PhysicsSection {
                big_l: Some(1.0),
                horizon: Some(1.0),
                t1: Some(0.3),
                t2: Some(0.7),
                epsilon: Some(0.1),
                ..Default::default()
            },
            data: DataSection { amplitude: Some(1.0), center: Some(0.0), width: Some(0.3), ..Default::default() },
            run,
            ..Default::default()
        },
        "modes" => RunConfig {
            grid: GridSection { nx: Some(4001), nt: None, x_max: Some(20.0) },
            physics: PhysicsSection {
                horizon: Some(1.0),
                a: Some(vec![0.5, 0.2, 0.1, 0.05, 0.02]),
                ..Default::default()
            },
            run,
            ..Default::default()
        },
        "steer" => {
            let p = SteerParams::<f64>::desk();
            RunConfig {
                grid: GridSection { nx: Some(p.hum_nx), nt: Some(p.hum_nt), x_max: Some(p.x_max) },
                physics: PhysicsSection {
                    horizon: Some(p.horizon),
                    tau: Some(p.tau),
                    epsilon: Some(p.epsilon),
                    beta: Some(p.beta),
                    ..Default::default()
                },
                solver: SolverSection { variant: Some("backward".into()), ..Default::default() },
                run,
                ..Default::default()
            }
        }
        _ => RunConfig { run, ..Default::default() },
    }
}

pub fn dispatch(command: &str, cfg: &RunConfig) -> anyhow::Result<std::path::PathBuf> {
    let mut art = Artifacts::new(command, cfg)?;
    let (status, summary) = match command {
        "solve-ivp" => solve_ivp(cfg, &mut art)?,
        "solve-ibvp" => solve_ibvp(cfg, &mut art)?,
        "solve-nonlinear" => solve_nonlinear(cfg, &mut art)?,
        "spectrum" => run_spectrum(cfg, &mut art)?,
        "observability" => observability(cfg, &mut art)?,
        "carleman" => carleman(cfg, &mut art)?,
        "hum" => hum(cfg, &mut art)?,
        "modes" => modes(cfg, &mut art)?,
        "steer" => steer(cfg, &mut art)?,
        "energy-audit" => audit(cfg, &mut art)?,
        other => bail!("unknown command `{other}`"),
    };
    let failure = summary.get("failure").and_then(|v| v.as_str()).map(str::to_string);
    let path = art.finish(status, summary)?;
    match failure {
        Some(msg) => Err(Error::Numerical(msg).into()),
        None => Ok(path),
    }
}

type Ran = (&'static str, serde_json::Value);

/// `e^{4 - 1/(s(1-s))}` on `0 < s < 1`: smooth, compactly supported, peak 1 at `s = 1/2`.
fn window(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        (4.0 - 1.0 / (s * (1.0 - s))).exp()
    } else {
        0.0
    }
}

fn solve_ivp(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let (nx, nt, x_max) = (need(&cfg.grid.nx, "grid.nx")?, need(&cfg.grid.nt, "grid.nt")?, need(&cfg.grid.x_max, "grid.x_max")?);
    let horizon = need(&cfg.physics.horizon, "physics.T")?;
    let (amp, c, w) = (need(&cfg.data.amplitude, "data.amplitude")?, need(&cfg.data.center, "data.center")?, need(&cfg.data.width, "data.width")?);
    let wl = WholeLine::symmetric(x_max, nx)?;
    let u0 = ComplexField::from_fn(*wl.grid(), |x| Complex::new(amp * (-(x - c) * (x - c) / (2.0 * w * w)).exp(), 0.0));
    let tg = Grid1D::new(0.0, horizon, nt)?;
    let mut sol = Table::new(&["t", "x", "re", "im"]);
    let mut norms = Table::new(&["t", "l2"]);
    let xs = wl.grid().nodes();
    let mut last = 0.0;
    for t in tg.nodes() {
        let u = whole_line_propagate(&u0, t)?;
        for (x, v) in xs.iter().zip(&u.values) {
            sol.push(vec![t, *x, v.re, v.im])?;
        }
        last = u.l2_norm();
        norms.push(vec![t, last])?;
    }
    art.table("solution", sol)?;
    art.table("norms", norms)?;
    Ok(("ok", json!({ "initial_l2": u0.l2_norm(), "final_l2": last })))
}

fn halfline_problem(cfg: &RunConfig) -> anyhow::Result<IbvpProblem<f64>> {
    let (nx, nt, x_max) = (need(&cfg.grid.nx, "grid.nx")?, need(&cfg.grid.nt, "grid.nt")?, need(&cfg.grid.x_max, "grid.x_max")?);
    let horizon = need(&cfg.physics.horizon, "physics.T")?;
    let d = &cfg.data;
    let (amp, c, w) = (need(&d.amplitude, "data.amplitude")?, need(&d.center, "data.center")?, need(&d.width, "data.width")?);
    let (h_amp, g_amp) = (need(&d.h_amp, "data.h_amp")?, need(&d.g_amp, "data.g_amp")?);
    if nx < 4 {
        return Err(Error::Grid(format!("need at least 4 spatial points, got {nx}")).into());
    }
    let xg = Grid1D::with_spacing(0.0, x_max / nx as f64, nx)?;
    let tg = Grid1D::new(0.0, horizon, nt)?;
    let u0 = xg.nodes().iter().map(|&x| amp * x * x * (-(x - c) * (x - c) / (2.0 * w * w)).exp()).collect();
    let data = BoundaryData::from_fns(tg, |t| h_amp * window(t / horizon), |t| g_amp * window(t / horizon));
    Ok(IbvpProblem::new(u0, xg, data)?)
}

fn solution_table(u: &State) -> anyhow::Result<Table> {
    let mut sol = Table::new(&["t", "x", "u"]);
    let xs = u.space_grid.nodes();
    for (j, t) in u.time_grid.nodes().into_iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            sol.push(vec![t, x, u.values[[i, j]]])?;
        }
    }
    Ok(sol)
}

/// Traces of the solution next to the prescribed data.
fn trace_table(u: &State, data: &BoundaryData<f64>) -> anyhow::Result<(Table, f64, f64)> {
    let tr = trace_extract(u)?;
    let mut t = Table::new(&["t", "u", "u_x", "u_xx", "h", "g"]);
    let (mut eh, mut eg) = (0.0f64, 0.0f64);
    for (j, time) in u.time_grid.nodes().into_iter().enumerate() {
        t.push(vec![time, tr.value[j], tr.dx[j], tr.dxx[j], data.h[j], data.g[j]])?;
        eh = eh.max((tr.value[j] - data.h[j]).abs());
        eg = eg.max((tr.dx[j] - data.g[j]).abs());
    }
    Ok((t, eh, eg))
}

fn solve_ibvp(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let p = halfline_problem(cfg)?.linear();
    let rep = solve_fixed_point(&p, need(&cfg.solver.tol, "solver.tol")?, 2)?;
    let (traces, eh, eg) = trace_table(&rep.solution, &p.boundary)?;
    art.table("solution", solution_table(&rep.solution)?)?;
    art.table("traces", traces)?;
    Ok(("ok", json!({ "l2": rep.solution.l2_norm(), "max_trace_error_h": eh, "max_trace_error_g": eg })))
}

fn nonlinear_summary(rep: &SolveReport<f64>) -> serde_json::Value {
    json!({
        "iterations": rep.iterations,
        "converged": rep.converged,
        "contraction_ratio": rep.contraction_ratio,
        "max_step_ratio": rep.max_step_ratio(),
        "final_residual": rep.residual_history.last(),
    })
}

fn solve_nonlinear(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let p = halfline_problem(cfg)?;
    let rep = solve_fixed_point(&p, need(&cfg.solver.tol, "solver.tol")?, need(&cfg.solver.max_iter, "solver.max_iter")?)?;
    let mut res = Table::new(&["iteration", "residual"]);
    for (k, r) in rep.residual_history.iter().enumerate() {
        res.push(vec![(k + 1) as f64, *r])?;
    }
    let (traces, _, _) = trace_table(&rep.solution, &p.boundary)?;
    art.table("solution", solution_table(&rep.solution)?)?;
    art.table("residuals", res)?;
    art.table("traces", traces)?;
    let mut summary = nonlinear_summary(&rep);
    if !rep.converged {
        summary["failure"] = json!(format!("Picard iteration did not reach tol in {} iterations", rep.iterations));
        return Ok(("not converged", summary));
    }
    Ok(("ok", summary))
}

fn audit(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let p = halfline_problem(cfg)?.linear();
    let rep = solve_fixed_point(&p, need(&cfg.solver.tol, "solver.tol")?, 2)?;
    let ledger = energy_audit(&rep.solution, &p.boundary)?;
    let ts = p.time_grid().nodes();
    let mut e = Table::new(&["t", "energy", "rhs"]);
    for (j, &t) in ts.iter().enumerate() {
        e.push(vec![t, ledger.energy[j], ledger.rhs[j]])?;
    }
    let mut r = Table::new(&["t_mid", "residual"]);
    for (j, res) in ledger.residual.iter().enumerate() {
        r.push(vec![0.5 * (ts[j] + ts[j + 1]), *res])?;
    }
    art.table("energy", e)?;
    art.table("residual", r)?;
    let quiet = p.boundary.h.iter().chain(&p.boundary.g).all(|v| *v == 0.0);
    let nonincreasing = ledger.is_nonincreasing();
    if quiet && !nonincreasing {
        art.warn("energy increased although h = g = 0");
    }
    Ok(("ok", json!({ "max_residual": ledger.max_residual(), "nonincreasing": nonincreasing })))
}

fn run_spectrum(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let l = need(&cfg.physics.big_l, "physics.L")?;
    let s = spectrum(l, need(&cfg.physics.n_max, "physics.n_max")?)?;
    let mut t = Table::new(&["n", "re", "im"]);
    for n in s.modes() {
        let z = s.lambda(n);
        t.push(vec![n as f64, z.re, z.im])?;
    }
    art.table("eigenvalues", t)?;
    let (ingham_gap, ingham_time) = ingham_params(l)?;
    Ok((
        "ok",
        json!({
            "gamma": s.gap,
            "min_sorted_gap": s.min_gap(),
            "min_gap_off_origin": s.min_gap_off_origin(),
            "ingham_gap": ingham_gap,
            "ingham_time": ingham_time,
        }),
    ))
}

fn observability(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let ph = &cfg.physics;
    let (l, sub, horizon) = (need(&ph.big_l, "physics.L")?, need(&ph.l, "physics.l")?, need(&ph.horizon, "physics.T")?);
    let route = match need(&cfg.solver.route, "solver.route")?.as_str() {
        "analytic" => RatioRoute::Analytic,
        "quadrature" => RatioRoute::Quadrature { nx: need(&cfg.grid.nx, "grid.nx")?, nt: need(&cfg.grid.nt, "grid.nt")? },
        other => return Err(Error::Precondition(format!("route must be analytic or quadrature, got {other:?}")).into()),
    };
    let rep = ensemble_ratios(
        l,
        sub,
        horizon,
        need(&ph.n_max, "physics.n_max")?,
        need(&cfg.solver.draws, "solver.draws")?,
        need(&cfg.run.seed, "run.seed")?,
        need(&ph.decay, "physics.decay")?,
        route,
    )?;
    let mut t = Table::new(&["seed", "ratio"]);
    for (s, r) in rep.seeds.iter().zip(&rep.ratios) {
        t.push(vec![*s as f64, *r])?;
    }
    art.table("ratios", t)?;
    Ok((
        "ok",
        json!({
            "max_ratio": rep.max_ratio,
            "argmax_seed": rep.argmax_seed,
            "single_mode_ratio_n1": single_mode_ratio(1, l, sub, horizon),
        }),
    ))
}

fn carleman(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let ph = &cfg.physics;
    let (l, horizon, eps) = (need(&ph.big_l, "physics.L")?, need(&ph.horizon, "physics.T")?, need(&ph.epsilon, "physics.epsilon")?);
    let variant = match need(&cfg.solver.variant, "solver.variant")?.as_str() {
        "derived" => ExpansionVariant::Derived,
        "printed" => ExpansionVariant::Printed,
        other => return Err(Error::Precondition(format!("variant must be derived or printed, got {other:?}")).into()),
    };
    let scan = positivity_scan(l, horizon, variant, eps, &default_ladder(), MarginGrid::default())?;
    let mut rungs = Table::new(&["s", "min_d", "min_e", "min_f"]);
    for r in &scan.rungs {
        rungs.push(vec![r.s, r.min_d, r.min_e, r.min_f])?;
    }
    art.table("scan", rungs)?;

    let s = ph.s.unwrap_or(2.0 * scan.s0);
    if s < scan.s0 {
        art.warn(format!("s = {s} is below the positivity threshold {}", scan.s0));
    }
    let w = CarlemanWeight::new(l, horizon, s)?.with_variant(variant);
    let quad = CarlemanQuadrature::default();
    let seed = need(&cfg.run.seed, "run.seed")?;
    let mut t = Table::new(&["seed", "lhs", "rhs", "ratio", "ratio_refined", "log_scale"]);
    let (mut c_fit, mut c_refined) = (0.0f64, 0.0f64);
    for d in 0..need(&cfg.solver.draws, "solver.draws")? as u64 {
        let q = AdmissibleTest::random(l, horizon, 4, seed + d)?;
        let r = verify_inequality(&w, &q, &quad)?;
        let fine = verify_inequality(&w, &q, &quad.refined())?;
        c_fit = c_fit.max(1.05 * r.ratio);
        c_refined = c_refined.max(1.05 * fine.ratio);
        t.push(vec![(seed + d) as f64, r.lhs, r.rhs_raw, r.ratio, fine.ratio, r.log_scale])?;
    }
    art.table("ratios", t)?;
    let fd = fd_cross_check(&Expansion::new(l, horizon, variant, eps), s, l);
    Ok((
        "ok",
        json!({
            "s0": scan.s0,
            "s": s,
            "c_fit": c_fit,
            "c_fit_refined": c_refined,
            "c_fit_drift": (c_fit - c_refined).abs() / c_refined,
            "fd_max_rel_err": fd.max_rel_err,
        }),
    ))
}

fn hum(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let ph = &cfg.physics;
    let (nx, nt) = (need(&cfg.grid.nx, "grid.nx")?, need(&cfg.grid.nt, "grid.nt")?);
    let (l, horizon) = (need(&ph.big_l, "physics.L")?, need(&ph.horizon, "physics.T")?);
    let (t1, t2, eps) = (need(&ph.t1, "physics.t1")?, need(&ph.t2, "physics.t2")?, need(&ph.epsilon, "physics.epsilon")?);
    let (amp, c, w) = (need(&cfg.data.amplitude, "data.amplitude")?, need(&cfg.data.center, "data.center")?, need(&cfg.data.width, "data.width")?);
    if nx < 8 || nt < 4 {
        return Err(Error::Grid(format!("control grid {nx}×{nt} is too coarse; need at least 8×4")).into());
    }
    // bump in x vanishing on the two outer rows, bump in t supported in [t1, t2]
    let f = Array2::from_shape_fn((nx, nt), |(i, j)| {
        let y = -1.0 + 2.0 * i as f64 / (nx - 1) as f64;
        let t = horizon * j as f64 / (nt - 1) as f64;
        if i < 2 || i + 2 >= nx {
            return 0.0;
        }
        amp * (-(y / w).powi(2)).exp() * (1.0 - y * y).powi(4) * window((t - t1) / (t2 - t1))
    });
    let p = ControlProblem::new(c, l, horizon, t1, t2, eps, f)?;
    let sol = hum_solve(&p)?;
    let (xs, ts) = (p.x_grid()?.nodes(), p.t_grid()?.nodes());
    let mut t = Table::new(&["x", "t", "v"]);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &time) in ts.iter().enumerate() {
            t.push(vec![x, time, sol.v[[i, j]]])?;
        }
    }
    art.table("control", t)?;
    let d = sol.diagnostics();
    Ok(("ok", json!({ "diagnostics": d, "window": sol.window })))
}

fn modes(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let a = need(&cfg.physics.a, "physics.a")?;
    let rows = noncontrol_scan(
        &a,
        need(&cfg.grid.x_max, "grid.x_max")?,
        need(&cfg.physics.horizon, "physics.T")?,
        need(&cfg.grid.nx, "grid.nx")?,
    )?;
    let mut t = Table::new(&[
        "a",
        "b",
        "lambda",
        "lambda_printed",
        "numerator",
        "denominator",
        "ratio",
        "ratio_quadrature",
        "cubic_residual",
    ]);
    for r in &rows {
        t.push(vec![r.a, r.b, r.lambda, r.lambda_printed, r.numerator, r.denominator, r.ratio, r.ratio_quadrature, r.cubic_residual])?;
    }
    art.table("modes", t)?;
    let increasing = rows.windows(2).all(|p| p[1].ratio > p[0].ratio);
    Ok(("ok", json!({ "rows": rows, "ratio_strictly_increasing": increasing })))
}

fn steer(cfg: &RunConfig, art: &mut Artifacts) -> anyhow::Result<Ran> {
    let ph = &cfg.physics;
    let mut p = SteerParams::<f64>::desk();
    p.horizon = need(&ph.horizon, "physics.T")?;
    p.tau = need(&ph.tau, "physics.tau")?;
    p.epsilon = need(&ph.epsilon, "physics.epsilon")?;
    p.beta = need(&ph.beta, "physics.beta")?;
    p.x_max = need(&cfg.grid.x_max, "grid.x_max")?;
    p.hum_nx = need(&cfg.grid.nx, "grid.nx")?;
    p.hum_nt = need(&cfg.grid.nt, "grid.nt")?;
    p.variant = match need(&cfg.solver.variant, "solver.variant")?.as_str() {
        "backward" => SteerVariant::BackwardFlow,
        "forward" => SteerVariant::Forward,
        other => return Err(Error::Precondition(format!("variant must be backward or forward, got {other:?}")).into()),
    };
    let plan = SteeringPlan::from_fns(p, |x| (-(x - 5.0) * (x - 5.0)).exp(), |x| (-(x - 10.0) * (x - 10.0) / 12.0).exp())?;
    let rep = steer_pipeline(&plan)?;
    let mut t = Table::new(&["t", "nu1", "nu2", "omega", "nu"]);
    for s in &rep.stage_norms {
        t.push(vec![s.t, s.nu1, s.nu2, s.omega, s.nu])?;
    }
    art.table("stages", t)?;
    if rep.dropped_target_modes > 0 {
        art.warn(format!("{} target modes were dropped from the backward flow", rep.dropped_target_modes));
    }
    Ok((
        "ok",
        json!({
            "err_initial": rep.err_initial,
            "err_final": rep.err_final,
            "hum": rep.hum_diagnostics(),
            "dropped_target_modes": rep.dropped_target_modes,
        }),
    ))
}
