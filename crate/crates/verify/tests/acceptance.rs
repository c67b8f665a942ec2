//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kdvb_core::carleman::*;
use kdvb_core::control::*;
use kdvb_core::linear::*;
use kdvb_core::nonlinear::*;
use kdvb_core::numerics::{ComplexField, Grid1D};
use kdvb_core::periodic::*;
use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn root_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..100 {
        let tau = Complex::new(rng.random_range(1e-3..20.0), rng.random_range(-100.0..100.0));
        let r = characteristic_roots(tau);
        worst = worst.max(r.residual());
        if r.decaying.len() != 2 {
            bad += 1;
        }
    }
    outcome(bad == 0 && worst <= 1e-10, format!("100 draws, wrong count {bad}, max residual {worst:.2e}"))
}

/// `W_D h`: value-trace error plus derivative trace; `W_N g`: derivative-trace error plus value trace.
fn boundary_defects(profile: &dyn Fn(f64) -> f64, n: usize) -> (f64, f64) {
    let tg = Grid1D::new(0.0, 4.0, n).unwrap();
    let eval = Grid1D::new(0.0, 5.0, n).unwrap();
    let quad = BoundaryQuadrature::default();
    let d = BoundaryData::from_fns(tg, profile, |_| 0.0);
    let tr = trace_extract(&boundary_operator(&d, &eval, &quad).unwrap().0).unwrap();
    let dirichlet = sup_diff(&tr.value, &d.h) + sup(&tr.dx);
    let g = BoundaryData::from_fns(tg, |_| 0.0, profile);
    let tr = trace_extract(&boundary_operator(&g, &eval, &quad).unwrap().0).unwrap();
    let neumann = sup_diff(&tr.dx, &g.g) + sup(&tr.value);
    (dirichlet, neumann)
}

fn boundary_reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut min_gain) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let (c, w, om) = (rng.random_range(1.6..2.4), rng.random_range(0.25..0.45), rng.random_range(0.0..3.0));
        let h = move |t: f64| (-((t - c) / w).powi(2)).exp() * (1.0 + 0.3 * (om * t).sin());
        let (d1, n1) = boundary_defects(&h, 512);
        let (d2, n2) = boundary_defects(&h, 1024);
        worst = worst.max(d1).max(n1);
        min_gain = min_gain.min(d1 / d2).min(n1 / n2);
    }
    outcome(worst <= 1e-3 && min_gain >= 3.0, format!("max defect at 512 {worst:.2e}, min refinement gain {min_gain:.2}"))
}

fn semigroup_dissipation() -> Outcome {
    let wl = WholeLine::symmetric(15.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut split, mut growth) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..20 {
        let (x0, a, b) = (rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let u0 = ComplexField::from_fn(*wl.grid(), |x: f64| Complex::new(a, b) * (-(x - x0) * (x - x0)).exp());
        let (t, s) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let direct = whole_line_propagate(&u0, t + s).unwrap();
        let composed = whole_line_propagate(&whole_line_propagate(&u0, s).unwrap(), t).unwrap();
        let diff = ComplexField::new(*wl.grid(), direct.values.iter().zip(&composed.values).map(|(p, q)| p - q).collect()).unwrap();
        split = split.max(diff.l2_norm());
        growth = growth.max(direct.l2_norm() - u0.l2_norm());
    }
    outcome(split <= 1e-10 && growth <= 0.0, format!("max split error {split:.2e}, max norm change {growth:.2e}"))
}

fn gaussian_problem(amp: f64) -> IbvpProblem<f64> {
    let n = 128;
    let xg = Grid1D::with_spacing(0.0, 30.0 / n as f64, n).unwrap();
    let tg = Grid1D::new(0.0, 1.0, 17).unwrap();
    let u0 = xg.nodes().iter().map(|&x| amp * x * x * (-(x - 3.0) * (x - 3.0) / 2.0).exp()).collect();
    IbvpProblem::new(u0, xg, BoundaryData::zeros(tg)).unwrap()
}

fn mms_error(nt: usize) -> f64 {
    let exact = |x: f64, t: f64| (-t).exp() * x * x * (-x).exp();
    let forcing = |x: f64, t: f64| {
        let e = (-x).exp();
        let (q, q1) = (x * x * e, (2.0 * x - x * x) * e);
        let (q2, q3) = ((2.0 - 4.0 * x + x * x) * e, (-6.0 + 6.0 * x - x * x) * e);
        (-t).exp() * (-q - q3 - q2) - (-2.0 * t).exp() * q * q1
    };
    let n = 512;
    let xg = Grid1D::with_spacing(0.0, 30.0 / n as f64, n).unwrap();
    let tg = Grid1D::new(0.0, 1.0, nt).unwrap();
    let (xs, ts) = (xg.nodes(), tg.nodes());
    let u0 = xs.iter().map(|&x| exact(x, 0.0)).collect();
    let f = Array2::from_shape_fn((n, nt), |(i, j)| forcing(xs[i], ts[j]));
    let p = IbvpProblem::new(u0, xg, BoundaryData::zeros(tg)).unwrap().with_forcing(f).unwrap();
    let rep = solve_fixed_point(&p, 1e-11, 60).unwrap();
    rep.solution.distance(&HalfLineState::from_fn(xg, tg, exact))
}

fn contraction_regime() -> Outcome {
    let base = gaussian_problem(1.0);
    let radius = contraction_radius(&base, 0.05, 50.0, 6, 0.9, 1e-10, 40).unwrap().radius;
    let mut worst = 0.0f64;
    for frac in [0.25, 0.5, 0.9] {
        let rep = solve_fixed_point(&base.scaled(radius * frac), 1e-10, 40).unwrap();
        worst = worst.max(if rep.converged { rep.max_step_ratio() } else { f64::INFINITY });
    }
    let (e1, e2) = (mms_error(33), mms_error(65));
    let order = (e1 / e2).log2();
    outcome(
        radius > 0.0 && worst < 1.0 && order >= 1.9,
        format!("radius {radius:.3}, max residual ratio below it {worst:.3}, manufactured-solution order {order:.2}"),
    )
}

fn decaying_modes(x: f64, t: f64) -> (f64, f64) {
    [(-0.5, 1.0), (-1.0, -0.7), (-1.5, 0.4)].iter().fold((0.0, 0.0), |(u, ux), &(k, a): &(f64, f64)| {
        let v = a * (k * x + (k * k * k + k * k) * t).exp();
        (u + v, ux + k * v)
    })
}

fn audit_residual(n: usize) -> f64 {
    let xg = Grid1D::new(0.0, 40.0, 40 * n + 1).unwrap();
    let tg = Grid1D::new(0.0, 1.0, n + 1).unwrap();
    let state = HalfLineState::from_fn(xg, tg, |x, t| decaying_modes(x, t).0);
    let data = BoundaryData::from_fns(tg, |t| decaying_modes(0.0, t).0, |t| decaying_modes(0.0, t).1);
    energy_audit(&state, &data).unwrap().max_residual()
}

fn energy_ledger() -> Outcome {
    let (r1, r2) = (audit_residual(32), audit_residual(64));
    let order = (r1 / r2).log2();
    let xg = Grid1D::new(0.0, 20.0, 1601).unwrap();
    let tg = Grid1D::new(0.0, 0.5, 101).unwrap();
    let u0: Vec<f64> = xg.nodes().iter().map(|&x: &f64| (-(x - 5.0) * (x - 5.0) * 2.0).exp()).collect();
    let u = halfline_semigroup(&u0, &xg, &tg).unwrap();
    let mono = energy_audit(&u, &BoundaryData::zeros(tg)).unwrap().is_nonincreasing();
    outcome(order >= 1.9 && mono, format!("identity residual order {order:.2}, energy nonincreasing with h = g = 0: {mono}"))
}

fn spectrum_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut gaps_ok = true;
    for l in [1.0, PI, 2.0 * PI] {
        let s = spectrum(l, 64).unwrap();
        for n in -64i64..=64 {
            let k = n as f64 * PI / l;
            let direct = Complex::new(-k * k, -k * k * k);
            worst = worst.max((s.lambda(n) - direct).norm() / direct.norm().max(1.0));
        }
        let gamma = 2.0 * PI.powi(3) / l.powi(3);
        gaps_ok &= (s.gap - gamma).abs() <= 1e-14 * gamma;
        gaps_ok &= s.min_gap_off_origin() >= gamma * (1.0 - 1e-12);
        gaps_ok &= (1..=64).all(|n| -s.lambda(n).im + s.lambda(-n).im >= gamma * (1.0 - 1e-12));
    }
    outcome(worst <= 4.0 * f64::EPSILON && gaps_ok, format!("max relative eigenvalue error {worst:.2e}, gap checks {gaps_ok}"))
}

fn observability() -> Outcome {
    let (l, sub, horizon) = (PI, PI / 2.0, 4.0);
    let single = observability_ratio(&ModeCoeffs::<f64>::single(8, 1), l, sub, horizon).unwrap();
    let closed = 1.0 / ((sub / l) * (1.0 - (-2.0 * horizon).exp()) / 2.0);
    let single_err = (single - closed).abs() / closed;
    let run = |n_max, route| ensemble_ratios(l, sub, horizon, n_max, 100, 7, 2.0, route).unwrap().max_ratio;
    let q1 = run(8, RatioRoute::Quadrature { nx: 129, nt: 129 });
    let q2 = run(8, RatioRoute::Quadrature { nx: 257, nt: 257 });
    let m16 = run(16, RatioRoute::Analytic);
    let quad_change = (q1 - q2).abs() / q2;
    let mode_change = (q2 - m16).abs() / m16;
    outcome(
        single_err <= 1e-8 && quad_change < 0.05 && mode_change < 0.10,
        format!(
            "single-mode error {single_err:.1e}; max ratio {q2:.4}, quadrature change {:.2}%, n_max 16 change {:.2}%",
            100.0 * quad_change,
            100.0 * mode_change
        ),
    )
}

fn carleman_verification() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (l, horizon) in [(1.0, 2.0), (2.0, 1.0)] {
        let scan = match positivity_scan(l, horizon, ExpansionVariant::Derived, 0.1, &default_ladder(), MarginGrid::default()) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("(L, T) = ({l}, {horizon}): {e}")),
        };
        let ex = Expansion::new(l, horizon, ExpansionVariant::Derived, 0.1);
        let fd = fd_cross_check(&ex, 2.0 * scan.s0, l).max_rel_err;
        let w = CarlemanWeight::new(l, horizon, 2.0 * scan.s0).unwrap();
        let quad = CarlemanQuadrature::default();
        let (mut c_fit, mut c_fine) = (0.0f64, 0.0f64);
        let mut reports = Vec::new();
        for seed in 0..50 {
            let q = AdmissibleTest::random(l, horizon, 4, seed).unwrap();
            let r = verify_inequality(&w, &q, &quad).unwrap();
            c_fit = c_fit.max(1.05 * r.ratio);
            c_fine = c_fine.max(1.05 * verify_inequality(&w, &q, &quad.refined()).unwrap().ratio);
            reports.push(r);
        }
        let all_hold = reports.iter().all(|r| r.lhs <= c_fit * r.rhs_raw);
        let drift = (c_fit - c_fine).abs() / c_fine;
        pass &= scan.s0.is_finite() && all_hold && drift <= 0.1 && fd <= 1e-6;
        parts.push(format!("(L,T)=({l},{horizon}) s0 {:.4} C_fit {c_fit:.3e} drift {drift:.1e} fd {fd:.1e}", scan.s0));
    }
    outcome(pass, parts.join("; "))
}

fn noncontrol_signature() -> Outcome {
    let a_values = [0.5, 0.2, 0.1, 0.05, 0.02];
    let rows = noncontrol_scan(&a_values, 20.0, 1.0, 4001).unwrap();
    let cubic = rows.iter().fold(0.0f64, |m, r| m.max(r.cubic_residual));
    let m = mode_construct(1.0f64).unwrap();
    let res: Vec<f64> = [128usize, 256, 512]
        .iter()
        .map(|&n| mode_residual(&m, &Grid1D::new(0.0, 2.0, n + 1).unwrap(), &Grid1D::new(0.0, 0.1, n + 1).unwrap()).unwrap())
        .collect();
    let order = res.windows(2).map(|p| (p[0] / p[1]).log2()).fold(f64::INFINITY, f64::min);
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let increasing = ratios.windows(2).all(|p| p[1] > p[0]);
    outcome(
        cubic <= 1e-12 && order >= 1.9 && increasing,
        format!(
            "cubic residual {cubic:.1e}, residual order {order:.2}, N/D along a = {a_values:?}: {:?} (strictly increasing: {increasing})",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn control_synthesis() -> Outcome {
    let (nx, nt) = (48, 48);
    let f = Array2::from_shape_fn((nx, nt), |(i, j)| {
        let x = -1.0 + 2.0 * i as f64 / (nx - 1) as f64;
        let s = (j as f64 / (nt - 1) as f64 - 0.3) / 0.4;
        let bt = if s > 0.0 && s < 1.0 { (-1.0 / (s * (1.0 - s))).exp() } else { 0.0 };
        if i < 2 || i + 2 >= nx {
            0.0
        } else {
            (-(x / 0.3f64).powi(2)).exp() * (1.0 - x * x).powi(4) * bt
        }
    });
    let hum = hum_solve(&ControlProblem::new(0.0, 1.0, 1.0, 0.3, 0.7, 0.1, f).unwrap()).unwrap().diagnostics();
    let steer = steer_pipeline(&SteeringPlan::<f64>::desk().unwrap()).unwrap();
    let pass = hum.forward_residual <= 1e-6
        && hum.support_leakage <= 1e-10
        && steer.err_initial <= 5e-2
        && steer.err_final <= 5e-2;
    outcome(
        pass,
        format!(
            "HUM residual {:.1e}, leakage {:.1e}; steering endpoint errors {:.1e} (L2, t = 0), {:.1e} (L2_beta, t = T)",
            hum.forward_residual, hum.support_leakage, steer.err_initial, steer.err_final
        ),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("root structure", 1, root_structure),
        ("boundary reproduction", 60, boundary_reproduction),
        ("semigroup and dissipation", 1, semigroup_dissipation),
        ("contraction regime", 120, contraction_regime),
        ("energy ledger", 30, energy_ledger),
        ("spectrum exactness", 1, spectrum_exactness),
        ("observability boundedness", 60, observability),
        ("Carleman verification", 300, carleman_verification),
        ("non-controllability signature", 30, noncontrol_signature),
        ("control synthesis", 180, control_synthesis),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_budget = took <= Duration::from_secs(*budget);
        let pass = out.pass && in_budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.2} s of {budget} s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
