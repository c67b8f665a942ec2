use kdvb_core::linear::*;
use kdvb_core::numerics::*;
use kdvb_core::Error;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn has_root(t: &CubicRootTriple<f64>, z: Complex<f64>) -> bool {
    t.roots.iter().any(|r| (r - z).norm() < 1e-9)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn window(t: f64, center: f64) -> f64 {
    (-(t - center).powi(2) * 16.0).exp()
}

#[test]
fn roots_worked_examples() {
    let z = characteristic_roots(c(0.0, 0.0));
    assert!(z.degenerate);
    assert!(has_root(&z, c(0.0, 0.0)) && has_root(&z, c(-1.0, 0.0)));

    let two = characteristic_roots(c(2.0, 0.0));
    for r in [c(1.0, 0.0), c(-1.0, 1.0), c(-1.0, -1.0)] {
        assert!(has_root(&two, r));
    }
    let (a, b) = two.decaying_pair().unwrap();
    assert!((a.re + 1.0).abs() < 1e-10 && (b.re + 1.0).abs() < 1e-10);
    assert!((a.im + b.im).abs() < 1e-10 && a.im.abs() > 0.99);

    let m18 = characteristic_roots(c(-18.0, 0.0));
    for r in [c(-3.0, 0.0), c(1.0, 5f64.sqrt()), c(1.0, -(5f64.sqrt()))] {
        assert!(has_root(&m18, r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_decaying_roots_for_right_half_plane(re in 1e-3f64..50.0, im in -200.0f64..200.0) {
        let t = characteristic_roots(c(re, im));
        prop_assert!(t.residual() <= 1e-10 * (1.0 + c(re, im).norm()));
        prop_assert_eq!(t.decaying.len(), 2);
        prop_assert!(!t.degenerate);
    }
}

#[test]
fn root_split_signs_and_growth() {
    let mut last = 0.0;
    for k in 0..12 {
        let lambda = 0.5 * 2f64.powi(k);
        let s = root_split(lambda).unwrap();
        assert!(s.mu1.re <= 0.0 && s.mu2.re <= 0.0);
        let m = s.mu1.norm().max(s.mu2.norm());
        assert!(m >= last);
        last = m;
        if lambda > 50.0 {
            // the leading-order root shift is linear in λ
            let r = m / lambda;
            assert!((0.5..=3.0).contains(&r), "λ = {lambda}: |μ|/λ = {r}");
        }
    }
}

fn gaussian_field(grid: Grid1D<f64>, center: f64, width: f64) -> ComplexField<f64> {
    ComplexField::from_fn(grid, |x| c((-((x - center) / width).powi(2)).exp(), 0.0))
}

#[test]
fn whole_line_identity_and_single_mode() {
    let grid = Grid1D::with_spacing(-std::f64::consts::PI, 2.0 * std::f64::consts::PI / 64.0, 64).unwrap();
    let u0 = gaussian_field(grid, 0.3, 0.7);
    let same = whole_line_propagate(&u0, 0.0).unwrap();
    for (a, b) in same.values.iter().zip(&u0.values) {
        assert!((a - b).norm() < 1e-14);
    }

    let mode = ComplexField::from_fn(grid, |x| Complex::from_polar(1.0, x));
    let out = whole_line_propagate(&mode, 1.0).unwrap();
    let factor = (-c(1.0, 1.0)).exp();
    for (a, b) in out.values.iter().zip(&mode.values) {
        assert!((a - b * factor).norm() < 1e-13);
    }

    assert!(matches!(whole_line_propagate(&u0, -0.1), Err(Error::Precondition(_))));
}

#[test]
fn whole_line_norm_matches_refined_grid() {
    let run = |n: usize| {
        let wl = WholeLine::symmetric(20.0, n).unwrap();
        let u0 = gaussian_field(*wl.grid(), 1.0, 1.0);
        whole_line_propagate(&u0, 0.5).unwrap().l2_norm()
    };
    let (coarse, fine) = (run(256), run(1024));
    assert!((coarse - fine).abs() / fine < 1e-6, "{coarse} vs {fine}");
}

fn random_field(grid: Grid1D<f64>, seed: u64) -> ComplexField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexField::from_fn(grid, |x| {
        bumps.iter().fold(c(0.0, 0.0), |acc, &(x0, w, a, b)| acc + c(a, b) * (-((x - x0) / w).powi(2)).exp())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn semigroup_law(t in 0.0f64..2.0, s in 0.0f64..2.0, seed in any::<u64>()) {
        let wl = WholeLine::symmetric(15.0, 128).unwrap();
        let u0 = random_field(*wl.grid(), seed);
        let direct = whole_line_propagate(&u0, t + s).unwrap();
        let split = whole_line_propagate(&whole_line_propagate(&u0, s).unwrap(), t).unwrap();
        let err = direct.values.iter().zip(&split.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
            * wl.grid().spacing().sqrt();
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn propagation_contracts(t in 0.0f64..5.0, seed in any::<u64>()) {
        let wl = WholeLine::symmetric(15.0, 128).unwrap();
        let u0 = random_field(*wl.grid(), seed);
        let out = whole_line_propagate(&u0, t).unwrap();
        prop_assert!(out.l2_norm() <= u0.l2_norm() * (1.0 + 1e-12));
    }
}

fn desk_time() -> Grid1D<f64> {
    Grid1D::new(0.0, 4.0, 512).unwrap()
}

#[test]
fn boundary_operators_of_zero_data() {
    let tg = desk_time();
    let eval = Grid1D::new(0.0, 5.0, 64).unwrap();
    let d = boundary_dirichlet(&BoundaryData::zeros(tg), &eval).unwrap();
    let n = boundary_neumann(&BoundaryData::zeros(tg), &eval).unwrap();
    assert_eq!(d.max_abs(), 0.0);
    assert_eq!(n.max_abs(), 0.0);
}

#[test]
fn dirichlet_reproduces_window_and_decays() {
    let tg = desk_time();
    let eval = Grid1D::new(0.0, 12.0, 481).unwrap();
    let data = BoundaryData::from_fns(tg, |t| window(t, 2.0), |_| 0.0);
    let (u, report) = boundary_operator(&data, &eval, &BoundaryQuadrature::default()).unwrap();
    let tr = trace_extract(&u).unwrap();
    let value_err = tr.value.iter().zip(&data.h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(value_err <= 1e-3, "value trace error {value_err}");
    assert!(sup(&tr.dx) <= 1e-2 * sup(&data.h), "derivative trace {}", sup(&tr.dx));
    assert!(report.cutoff > 0.0);

    let row_norm = |x: f64| {
        let i = (x / eval.spacing()).round() as usize;
        u.snapshot_row(i)
    };
    let (near, far) = (row_norm(1.0), row_norm(10.0));
    assert!(far <= 0.1 * near, "‖u(10)‖ = {far}, ‖u(1)‖ = {near}");
}

trait RowNorm {
    fn snapshot_row(&self, i: usize) -> f64;
}

impl RowNorm for HalfLineState<f64> {
    fn snapshot_row(&self, i: usize) -> f64 {
        let dt = self.time_grid.spacing();
        (self.values.row(i).iter().map(|v| v * v).sum::<f64>() * dt).sqrt()
    }
}

#[test]
fn neumann_reproduces_window() {
    let tg = desk_time();
    let eval = Grid1D::new(0.0, 5.0, 513).unwrap();
    let data = BoundaryData::from_fns(tg, |_| 0.0, |t| window(t, 2.0));
    let (u, _) = boundary_operator(&data, &eval, &BoundaryQuadrature::default()).unwrap();
    let tr = trace_extract(&u).unwrap();
    let dx_err = tr.dx.iter().zip(&data.g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dx_err <= 1e-3, "derivative trace error {dx_err}");
    assert!(sup(&tr.value) <= 1e-3, "value trace {}", sup(&tr.value));
}

#[test]
fn neumann_kernel_decay_exponent() {
    let xs: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect();
    let pts: Vec<(f64, f64)> = (0..24)
        .map(|k| {
            let sigma = 10f64.powf(1.0 + 3.0 * k as f64 / 23.0);
            (sigma.ln(), neumann_kernel_sup(sigma, &xs).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((-0.5..=-0.2).contains(&slope), "fitted exponent {slope}");
    assert_eq!(neumann_kernel_sup(50.0, &[0.0]), 0.0);
}

fn bump_at_five(x: f64) -> f64 {
    (-(x - 5.0).powi(2) * 2.0).exp()
}

#[test]
fn halfline_semigroup_identity_at_zero() {
    let sg = Grid1D::new(0.0, 20.0, 401).unwrap();
    let tg = Grid1D::new(0.0, 0.1, 11).unwrap();
    let u0: Vec<f64> = sg.nodes().iter().map(|&x| bump_at_five(x)).collect();
    let u = halfline_semigroup(&u0, &sg, &tg).unwrap();
    let first = u.snapshot(0);
    let err = first.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn halfline_semigroup_matches_whole_line_away_from_boundary() {
    let sg = Grid1D::new(0.0, 20.0, 401).unwrap();
    let tg = Grid1D::new(0.0, 0.1, 65).unwrap();
    let u0: Vec<f64> = sg.nodes().iter().map(|&x| bump_at_five(x)).collect();
    let setup = HalfLineSetup::new(sg, ExtensionRule::default()).unwrap();
    let (u, report) = halfline_semigroup_with(&u0, &setup, &tg, &BoundaryQuadrature::default()).unwrap();
    assert!(report.trace_residual <= 1e-3, "trace residual {}", report.trace_residual);
    assert!(report.compatibility_defect.0.abs() < 1e-10);

    let dx = sg.spacing();
    let wl = WholeLine::new(Grid1D::with_spacing(-20.0, dx, 800).unwrap());
    let full = ComplexField::from_fn(*wl.grid(), |x| c(bump_at_five(x), 0.0));
    let reference = whole_line_propagate(&full, 0.1).unwrap();
    let last = u.snapshot(tg.len() - 1);
    let mut worst = 0.0f64;
    for (i, &x) in sg.nodes().iter().enumerate() {
        if (3.0..=7.0).contains(&x) {
            worst = worst.max((last[i] - reference.values[i + 400].re).abs());
        }
    }
    assert!(worst <= 1e-4, "{worst}");
}

#[test]
fn incompatible_data_is_reported_not_rejected() {
    let sg = Grid1D::new(0.0f64, 20.0, 201).unwrap();
    let tg = Grid1D::new(0.0, 0.1, 17).unwrap();
    let u0: Vec<f64> = sg.nodes().iter().map(|&x| (-x * x / 4.0).exp()).collect();
    let setup = HalfLineSetup::new(sg, ExtensionRule::default()).unwrap();
    let (_, report) = halfline_semigroup_with(&u0, &setup, &tg, &BoundaryQuadrature::default()).unwrap();
    assert!((report.compatibility_defect.0 - 1.0).abs() < 1e-12);
}

#[test]
fn duhamel_zero_and_single_mode() {
    let n = 64;
    let period = 2.0 * std::f64::consts::PI;
    let wl = WholeLine::new(Grid1D::with_spacing(-std::f64::consts::PI, period / n as f64, n).unwrap());
    let tg = Grid1D::new(0.0, 1.0, 201).unwrap();
    let zero = ndarray::Array2::<f64>::zeros((n, tg.len()));
    let z = duhamel_forced(&wl, &zero, &tg, 1.0).unwrap();
    assert!(z.values.iter().all(|v| v.norm() == 0.0));

    let xi0 = 2.0f64;
    let xs = wl.grid().nodes();
    let f = ndarray::Array2::from_shape_fn((n, tg.len()), |(i, _)| (xi0 * xs[i]).cos());
    let out = duhamel_forced(&wl, &f, &tg, 0.75).unwrap();
    let m = -c(xi0 * xi0, xi0.powi(3));
    let mb = -c(xi0 * xi0, -xi0.powi(3));
    let gain = |m: Complex<f64>| ((m * 0.75).exp() - 1.0) / m;
    for (i, &x) in xs.iter().enumerate() {
        let expected = (Complex::from_polar(0.5, xi0 * x) * gain(m) + Complex::from_polar(0.5, -xi0 * x) * gain(mb)).re;
        assert!((out.values[i].re - expected).abs() < 1e-6);
    }
}

#[test]
fn duhamel_splits_over_time() {
    let wl = WholeLine::symmetric(15.0f64, 128).unwrap();
    let xs = wl.grid().nodes();
    let tg = Grid1D::new(0.0f64, 1.0, 401).unwrap();
    let ts = tg.nodes();
    let f = ndarray::Array2::from_shape_fn((xs.len(), ts.len()), |(i, j)| {
        (-(xs[i] - 1.0).powi(2)).exp() * (3.0 * ts[j]).sin()
    });
    let (t1, t2) = (0.4f64, 0.6f64);
    let whole = duhamel_forced(&wl, &f, &tg, t1 + t2).unwrap();
    let first = duhamel_forced(&wl, &f, &tg, t1).unwrap();
    let carried = whole_line_propagate(&first, t2).unwrap();
    let k0 = (t1 / tg.spacing()).round() as usize;
    let shifted_grid = Grid1D::new(0.0, t2, ts.len() - k0).unwrap();
    let tail = f.slice(ndarray::s![.., k0..]).to_owned();
    let second = duhamel_forced(&wl, &tail, &shifted_grid, t2).unwrap();
    let err = whole
        .values
        .iter()
        .zip(carried.values.iter().zip(&second.values))
        .map(|(w, (a, b))| (w - a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn duhamel_rejects_mismatched_grids() {
    let wl = WholeLine::symmetric(5.0, 32).unwrap();
    let tg = Grid1D::new(0.0, 1.0, 11).unwrap();
    let f = ndarray::Array2::<f64>::zeros((31, 11));
    assert!(duhamel_forced(&wl, &f, &tg, 0.5).is_err());
}

#[test]
fn trace_extract_examples() {
    let tg = Grid1D::new(0.0, 1.0, 11).unwrap();
    let sg = Grid1D::new(0.0, 1.0, 21).unwrap();
    let h = |t: f64| (2.0 * t).cos();
    let lin = HalfLineState::from_fn(sg, tg, |x, t| h(t) * (1.0 + x));
    let tr = trace_extract(&lin).unwrap();
    for (j, &t) in tg.nodes().iter().enumerate() {
        assert!((tr.value[j] - h(t)).abs() < 1e-12);
        assert!((tr.dx[j] - h(t)).abs() < 1e-11);
        assert!(tr.dxx[j].abs() < 1e-9);
    }

    let err_at = |n: usize| {
        let sg = Grid1D::new(0.0, 1.0, n).unwrap();
        let s = HalfLineState::from_fn(sg, tg, |x, t| x.sin() * (-t).exp());
        let tr = trace_extract(&s).unwrap();
        tg.nodes().iter().enumerate().fold(0.0f64, |m, (j, &t)| {
            m.max((tr.dx[j] - (-t).exp()).abs()).max(tr.value[j].abs())
        })
    };
    let (e1, e2) = (err_at(21), err_at(41));
    assert!(e1 < 1e-3 && (e1 / e2).log2() > 1.8, "{e1} {e2}");

    let zero = HalfLineState::zeros(sg, tg);
    let tr = trace_extract(&zero).unwrap();
    assert!(tr.value.iter().chain(&tr.dx).chain(&tr.dxx).all(|&v| v == 0.0));

    assert!(Grid1D::new(0.0, 1.0, 3).is_err());
}

fn random_window(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 {
    let c0 = rng.random_range(1.6..2.4);
    let w = rng.random_range(0.25..0.45);
    let om = rng.random_range(0.0..4.0);
    let ph = rng.random_range(0.0..6.0);
    move |t: f64| (-((t - c0) / w).powi(2)).exp() * (om * t + ph).cos()
}

fn trace_norm_ratio(h: &dyn Fn(f64) -> f64, nt: usize, nx: usize, alpha: f64) -> f64 {
    let tg = Grid1D::new(0.0, 4.0, nt).unwrap();
    let eval = Grid1D::new(0.0, 3.0, nx).unwrap();
    let data = BoundaryData::from_fns(tg, h, |_| 0.0);
    let u = boundary_dirichlet(&data, &eval).unwrap();
    let periodic = Grid1D::with_spacing(0.0, tg.spacing(), nt).unwrap();
    let norm = |v: Vec<f64>| sobolev_norm_physical(&ComplexField::from_real(periodic, &v).unwrap(), alpha).unwrap();
    let top = (0..nx).map(|i| norm(u.values.row(i).to_vec())).fold(0.0, f64::max);
    top / norm(data.h.clone())
}

#[test]
fn trace_norm_ratio_is_stable_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = 1.0 / 3.0;
    let mut coarse_max = 0.0f64;
    let mut fine_max = 0.0f64;
    for _ in 0..30 {
        let h = random_window(&mut rng);
        coarse_max = coarse_max.max(trace_norm_ratio(&h, 256, 31, alpha));
        fine_max = fine_max.max(trace_norm_ratio(&h, 512, 61, alpha));
    }
    let drift = (coarse_max - fine_max).abs() / fine_max;
    assert!(drift <= 0.2, "coarse {coarse_max}, fine {fine_max}");
    assert!(fine_max.is_finite() && fine_max > 0.0);
}
