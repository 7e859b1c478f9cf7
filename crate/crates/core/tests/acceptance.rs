//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rbfw::checks::{orthogonality, pde_residuals, specfun_fidelity};
use rbfw::kernels::{convdiff_kernel, convdiff_mu, ClassicRbfKind, ClassicRbfSpec, ConvDiffKind, ConvDiffSpec, TimeSpaceDiffusionSpec};
use rbfw::rbffit::{convergence_study, evaluate_fit, fit, ridgelet_fit, RidgeletOptions};
use rbfw::series::{analyze, reconstruction_error, ErrorNorm, SeriesMode};
use rbfw::transforms::{
    b_forward_with, b_inverse_with, calibrate, default_k_lambda_grid, default_lambda_grid,
    eigen_check, k_forward_with, k_inverse_with, propagator_weight, ts_forward, ts_inverse,
    InputDecay, Spectrum, TransformCalibration, TransformKind, TransformOptions,
};
use rbfw::Complex64;

fn gauss(r: f64) -> f64 {
    (-0.5 * r * r).exp()
}

fn gauss_opts() -> TransformOptions {
    TransformOptions {
        decay: InputDecay::Gaussian,
        ..Default::default()
    }
}

fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Print the verdict line and fail the test when `pass` is false.
fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!("{} [{id:02}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

#[test]
fn criterion_01_orthogonality() {
    let start = Instant::now();
    let mut off = 0.0_f64;
    let mut diag = 0.0_f64;
    for &nu in &[0.0, 0.5, 1.0] {
        let rep = orthogonality(nu, 10, 512).unwrap();
        off = off.max(rep.max_off_diagonal);
        diag = diag.max(rep.max_diagonal_error);
    }
    let t = start.elapsed();
    verdict(
        1,
        "orthogonality",
        off < 1e-10 && diag < 1e-10 && within(t, 2.0),
        format!("max off-diagonal {off:.2e}, max diagonal rel err {diag:.2e}, {:.2}s", t.as_secs_f64()),
    );
}

#[test]
fn criterion_02_special_functions() {
    let rep = specfun_fidelity(200, 20).unwrap();
    let pass = rep.j_half_error < 1e-12
        && rep.k_half_error < 1e-12
        && rep.recurrence_error < 1e-9
        && rep.wronskian_error < 1e-9
        && rep.max_zero_residual() < 1e-12
        && rep.all_interlaced();
    verdict(
        2,
        "special-function fidelity",
        pass,
        format!(
            "J1/2 {:.2e}, K1/2 {:.2e}, recurrence {:.2e}, Wronskian {:.2e}, zeros {:.2e}, interlaced {}",
            rep.j_half_error,
            rep.k_half_error,
            rep.recurrence_error,
            rep.wronskian_error,
            rep.max_zero_residual(),
            rep.all_interlaced()
        ),
    );
}

#[test]
fn criterion_03_dbt_reconstruction() {
    let start = Instant::now();
    let f = |r: f64| 1.0 - r * r;
    let mut l2 = Vec::new();
    let mut linf = f64::NAN;
    for &terms in &[5, 10, 20, 50] {
        let s = analyze(f, 2.0, 1.0, terms, SeriesMode::Orthogonal).unwrap();
        l2.push(reconstruction_error(&s, f, ErrorNorm::L2Weighted).unwrap());
        if terms == 50 {
            linf = reconstruction_error(&s, f, ErrorNorm::LinfInner).unwrap();
        }
    }
    let t = start.elapsed();
    let monotone = l2.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        3,
        "DBT reconstruction",
        linf < 1e-3 && monotone && within(t, 5.0),
        format!("Linf(50) {linf:.2e}, weighted L2 [{}], {:.2}s", sci(&l2), t.as_secs_f64()),
    );
}

#[test]
fn criterion_04_b_roundtrip() {
    let start = Instant::now();
    let opts = gauss_opts();
    let lambdas = grid(0.0, 4.0, 41);
    let fw = b_forward_with(gauss, 2.0, &lambdas, &opts).unwrap();
    let fwd_err = lambdas
        .iter()
        .zip(fw.values())
        .map(|(&l, v)| (v.re - gauss(l)).abs())
        .fold(0.0, f64::max);
    let radii = grid(0.0, 3.0, 31);
    let mut rt = Vec::new();
    for &n in &[2.0, 3.0] {
        let cal = calibrate(n, TransformKind::B).unwrap();
        let spec = b_forward_with(gauss, n, &default_lambda_grid(), &opts).unwrap();
        let rec = b_inverse_with(&spec, &cal, &radii, &opts).unwrap();
        rt.push(
            radii
                .iter()
                .zip(rec.values())
                .map(|(&r, &v)| (v - gauss(r)).abs())
                .fold(0.0, f64::max),
        );
    }
    let t = start.elapsed();
    let worst = rt.iter().cloned().fold(0.0, f64::max);
    verdict(
        4,
        "B-transform round trip",
        fwd_err < 1e-6 && worst < 1e-5 && within(t, 10.0),
        format!(
            "forward err {fwd_err:.2e}, round trip n=2 {:.2e}, n=3 {:.2e}, {:.2}s",
            rt[0],
            rt[1],
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_05_calibration_constants() {
    let c2 = calibrate(2.0, TransformKind::B).unwrap();
    let c3 = calibrate(3.0, TransformKind::B).unwrap();
    let pass = c2.m() == 1.0
        && (c2.c() - 1.0).abs() < 1e-15
        && c3.m() == 0.0
        && (c3.c() - 1.0 / (2.0 * PI)).abs() < 1e-15
        && c2.discrepancy().unwrap() < 1e-5
        && c3.discrepancy().unwrap() < 1e-5;
    verdict(
        5,
        "calibration constants",
        pass,
        format!(
            "n=2: m={}, C={}, disc {:.2e}; n=3: m={}, C={:.15}, disc {:.2e}",
            c2.m(),
            c2.c(),
            c2.discrepancy().unwrap(),
            c3.m(),
            c3.c(),
            c3.discrepancy().unwrap()
        ),
    );
}

#[test]
fn criterion_06_eigenrelation() {
    let f = |r: f64| (-r * r).exp();
    let lap = |r: f64| (4.0 * r * r - 4.0) * (-r * r).exp();
    let lambdas = [0.5, 1.0, 2.0];
    let opts = gauss_opts();
    let b = eigen_check(f, lap, 2.0, &lambdas, TransformKind::B, &opts).unwrap();
    let k = eigen_check(f, lap, 2.0, &lambdas, TransformKind::K, &opts).unwrap();
    let ratios: Vec<String> = k.ratios.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
    verdict(
        6,
        "Laplacian eigenrelation",
        b.max_residual() < 1e-6 && k.max_residual() < 1e-4,
        format!(
            "B residual {:.2e}; K residual {:.2e} (measured sign {:.4}, ratios K[lap f]/(l^2 K[f]) = [{}])",
            b.max_residual(),
            k.max_residual(),
            k.measured_sign(),
            ratios.join(", ")
        ),
    );
}

#[test]
fn criterion_07_k_roundtrip() {
    let opts = gauss_opts();
    let cal = match calibrate(2.0, TransformKind::K) {
        Ok(c) => c,
        Err(e) => {
            println!("       calibrate(2, K): {e}");
            TransformCalibration::derived(2.0, TransformKind::K).unwrap()
        }
    };
    let spec = k_forward_with(gauss, 2.0, &default_k_lambda_grid(), &opts).unwrap();
    let radii = grid(0.25, 3.0, 12);
    let rec = k_inverse_with(&spec, &cal, &radii, &opts).unwrap();
    let err = radii
        .iter()
        .zip(rec.values())
        .map(|(&r, v)| (v.re - gauss(r)).abs())
        .fold(0.0, f64::max);
    let imag = rec.max_abs_imag();
    verdict(
        7,
        "K-transform round trip",
        err < 1e-4 && imag < 1e-4,
        format!("real-part error {err:.3e}, max imaginary residue {imag:.3e} (C_g = {:.6})", cal.c()),
    );
}

#[test]
fn criterion_08_pde_residuals() {
    let lines = pde_residuals(1e-3, 1e-5).unwrap();
    let detail: Vec<String> = lines.iter().map(|l| format!("{} {:.2e}", l.name, l.value)).collect();
    verdict(8, "kernel PDE residuals", lines.iter().all(|l| l.passed()), detail.join(", "));
}

#[test]
fn criterion_09_mu_formula() {
    let cases = [((0.0, 1.0, 0.0), 0.0), ((2.0, 1.0, 0.0), 1.0), ((2.0, 1.0, 3.0), 2.0)];
    let mut worst = 0.0_f64;
    for ((speed, d, k), mu) in cases {
        let spec = ConvDiffSpec::new(2.0, vec![speed, 0.0], d, k).unwrap();
        worst = worst.max((convdiff_mu(&spec) - mu).abs());
    }
    verdict(9, "mu formula", worst <= 1e-15, format!("max error {worst:.2e}"));
}

#[test]
fn criterion_10_time_space_transform() {
    let opts = gauss_opts();
    let ts = TimeSpaceDiffusionSpec::new(2.0, 1.0, 1.0).unwrap();
    let lambdas = grid(0.25, 4.0, 16);
    let fw = ts_forward(|r, t| (-t).exp() * gauss(r), &ts, &lambdas, &opts).unwrap();
    let fwd_err = lambdas
        .iter()
        .zip(fw.values())
        .map(|(&l, v)| (v.re - gauss(l)).abs())
        .fold(0.0, f64::max);

    // Grid starting at 0.025 and t = 5e4 give a^2 l^2 t >= 31 everywhere.
    let lgrid = default_lambda_grid()[1..].to_vec();
    let vals = lgrid.iter().map(|&l| Complex64::new(gauss(l), 0.0)).collect();
    let spec = Spectrum::new(2.0, TransformKind::TsDiffusion, lgrid.clone(), vals).unwrap();
    let cal = calibrate(2.0, TransformKind::B).unwrap();
    let radii = grid(0.0, 3.0, 7);
    let t_big = 5e4;
    assert!(lgrid[0].powi(2) * t_big >= 30.0);
    let b = b_inverse_with(&spec, &cal, &radii, &opts).unwrap();
    let st = ts_inverse(&spec, &ts, &cal, &radii, &[t_big], &opts).unwrap();
    let limit_err = st.values[0]
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut prop_err = 0.0_f64;
    for &(a, l, t) in &[(1.0_f64, 1.0_f64, 0.5_f64), (0.5, 2.0, 3.0), (2.0, 0.1, 7.0), (1.0, 3.0, 100.0)] {
        let exact = 1.0 - (-(a * l) * (a * l) * t).exp();
        prop_err = prop_err.max((propagator_weight(a, l, t).unwrap() - exact).abs());
    }
    verdict(
        10,
        "time-space transform",
        fwd_err < 1e-6 && limit_err < 1e-6 && prop_err < 1e-12,
        format!("forward err {fwd_err:.2e}, large-t limit err {limit_err:.2e}, propagator err {prop_err:.2e}"),
    );
}

#[test]
fn criterion_11_classic_rbf_study() {
    let start = Instant::now();
    let target = |x: f64| (PI * x).sin();
    let ns = [8, 16, 32];
    let mut interp_worst = 0.0_f64;
    for kind in [ClassicRbfKind::Multiquadric, ClassicRbfKind::PreWaveletTps] {
        let spec = ClassicRbfSpec::new(kind, 0.5).unwrap();
        for &n in &ns {
            let xs = grid(-1.0, 1.0, n);
            let centers: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
            let samples: Vec<(Vec<f64>, f64)> = xs.iter().map(|&x| (vec![x], target(x))).collect();
            let f = fit(&[spec], &centers, &samples, false).unwrap();
            if f.condition_estimate() < 1e12 {
                for (p, v) in &samples {
                    interp_worst = interp_worst.max((evaluate_fit(&f, p) - v).abs());
                }
            }
        }
    }
    let mut rows = Vec::new();
    let mut decreasing = true;
    for kind in [ClassicRbfKind::Multiquadric, ClassicRbfKind::PreWaveletTps] {
        let study = convergence_study(target, kind, |_| 0.5, &ns, (-1.0, 1.0), false).unwrap();
        let errs: Vec<f64> = study.iter().map(|r| r.linf_error.unwrap_or(f64::NAN)).collect();
        decreasing &= errs.windows(2).all(|w| w[1] < w[0]);
        rows.push(format!("{kind:?} [{}]", sci(&errs)));
    }
    let t = start.elapsed();
    verdict(
        11,
        "classic RBF study",
        interp_worst < 1e-8 && decreasing && within(t, 10.0),
        format!(
            "node residual {interp_worst:.2e}; {}; {:.2}s",
            rows.join("; "),
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_12_ridgelet_recognition() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let centers = vec![vec![-0.5, 0.0], vec![0.4, 0.3], vec![0.0, -0.6]];
    let weights = [1.0, -0.6, 0.8];
    let mut detail = Vec::new();
    let mut pass = true;
    // k = 1 is the stated case (mu = sqrt 2); k = 3 is the case with mu = 2.
    for &k in &[1.0, 3.0] {
        let truth = ConvDiffSpec::new(2.0, vec![2.0, 0.0], 1.0, k).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let samples: Vec<(Vec<f64>, f64)> = (0..80)
            .map(|_| {
                let p = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let u: f64 = centers
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| w * convdiff_kernel(&truth, &p, c, ConvDiffKind::General).unwrap().re)
                    .sum();
                (p, u)
            })
            .collect();
        let init = ConvDiffSpec::new(2.0, vec![1.8, 0.0], 1.1, 1.1 * k).unwrap();
        let fit = ridgelet_fit(&samples, &centers, &init, true, &RidgeletOptions::default()).unwrap();
        let mu_true = truth.mu();
        let rel = (fit.mu() - mu_true).abs() / mu_true;
        let monotone = fit.loss_history.windows(2).all(|w| w[1] <= w[0]);
        pass &= rel < 0.05 && monotone;
        detail.push(format!(
            "k={k}: mu {:.6} (true {mu_true:.6}, rel err {rel:.1e}), loss {:.1e}, {} iterations, monotone {monotone}",
            fit.mu(),
            fit.loss,
            fit.iterations
        ));
    }
    let t = start.elapsed();
    verdict(
        12,
        "ridgelet parameter recognition",
        pass && within(t, 30.0),
        format!("{}; {:.2}s", detail.join("; "), t.as_secs_f64()),
    );
}
