//! Acceptance checks for the whole pipeline. Prints one `[PASS]`/`[FAIL]`
//! line per criterion and exits nonzero if any fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rn_spectra::cli::{EV_RN_INTERPOLATED, RN_INTERPOLATED, SPECTRUM_FILES};
use rn_spectra::models::{
    gen_multistage_exp, gen_runge, gen_two_stage, runge, StageKind, StageSpec,
};
use rn_spectra::{Analysis, BasisSpec, DomainMap, DxMode, Family, Matrix, PairKind, Timeserie};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn two_stage(lengths: [f64; 2]) -> Timeserie {
    let spec =
        StageSpec::with_default_step(vec![-0.01, -0.1], lengths.to_vec(), StageKind::LinearDecay)
            .unwrap();
    gen_two_stage(&spec).unwrap()
}

fn multi_exp(lengths: [f64; 3]) -> Timeserie {
    let spec = StageSpec::with_default_step(
        vec![-0.4, -0.2, -0.1],
        lengths.to_vec(),
        StageKind::ExponentialDecay,
    )
    .unwrap();
    gen_multistage_exp(&spec).unwrap()
}

/// `[r - 20%, r + 20%]` for a negative rate `r`.
fn window(rate: f64) -> (f64, f64) {
    (1.2 * rate, 0.8 * rate)
}

fn ac1_two_stage() -> Outcome {
    let mut notes = Vec::new();
    for (lengths, expected) in [([10.0, 10.0], 1.0), ([15.0, 5.0], 3.0)] {
        let (analysis, elapsed) = timed(|| {
            let ts = two_stage(lengths);
            Analysis::new(&ts, Family::Chebyshev, 50, DxMode::SampleDX).unwrap()
        });
        let s = &analysis.derivative;
        ensure(s.min() >= -0.1 - 1e-3 && s.max() <= -0.01 + 1e-3, || {
            format!(
                "{lengths:?}: eigenvalues span [{:.5}, {:.5}]",
                s.min(),
                s.max()
            )
        })?;
        let lq = analysis.lebesgue(PairKind::Derivative).unwrap();
        let (a, b) = (window(-0.01), window(-0.1));
        let ratio = lq.mass_in(a.0, a.1) / lq.mass_in(b.0, b.1);
        ensure((ratio / expected - 1.0).abs() <= 0.1, || {
            format!("{lengths:?}: mass ratio {ratio:.4}, expected {expected}")
        })?;
        ensure(elapsed < Duration::from_secs(5), || {
            format!("{lengths:?}: took {elapsed:?}")
        })?;
        notes.push(format!("{}:{} ratio {ratio:.3}", lengths[0], lengths[1]));
    }
    Ok(notes.join(", "))
}

/// Lebesgue-weighted mean eigenvalue inside the window around each rate.
fn cluster_centers(analysis: &Analysis, kind: PairKind, rates: &[f64]) -> Vec<f64> {
    let lq = analysis.lebesgue(kind).unwrap();
    rates
        .iter()
        .map(|&r| {
            let (lo, hi) = window(r);
            let (mut num, mut den) = (0.0, 0.0);
            for (g, w) in lq.value_nodes.iter().zip(&lq.weights) {
                if (lo..=hi).contains(g) {
                    num += g * w;
                    den += w;
                }
            }
            num / den
        })
        .collect()
}

fn ac2_three_stage() -> Outcome {
    let rates = [-0.4, -0.2, -0.1];
    let mut notes = Vec::new();
    for lengths in [[7.0, 7.0, 7.0], [3.5, 7.0, 10.5]] {
        let (analysis, elapsed) = timed(|| {
            let ts = multi_exp(lengths);
            Analysis::new(&ts, Family::Chebyshev, 50, DxMode::SampleDX).unwrap()
        });
        let relax = cluster_centers(&analysis, PairKind::RelaxRate, &rates);
        let log = cluster_centers(&analysis, PairKind::LogDerivative, &rates);
        for i in 0..3 {
            ensure((relax[i] - rates[i]).abs() <= 0.01, || {
                format!("{lengths:?}: f'/f center {:.5} vs {}", relax[i], rates[i])
            })?;
            ensure((log[i] - rates[i]).abs() <= 0.01, || {
                format!("{lengths:?}: (ln f)' center {:.5} vs {}", log[i], rates[i])
            })?;
            ensure((relax[i] - log[i]).abs() <= 0.02, || {
                format!(
                    "{lengths:?}: pair centers {:.5} and {:.5}",
                    relax[i], log[i]
                )
            })?;
        }
        ensure(elapsed < Duration::from_secs(5), || {
            format!("{lengths:?}: took {elapsed:?}")
        })?;
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|c| format!("{c:.4}"))
                .collect::<Vec<_>>()
                .join("/")
        };
        notes.push(format!(
            "{lengths:?} f'/f {} (ln f)' {}",
            fmt(&relax),
            fmt(&log)
        ));
    }
    Ok(notes.join("; "))
}

fn ac3_gauss() -> Outcome {
    let start = Instant::now();
    let ts = Timeserie::new(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
    let mut worst_node = 0.0f64;
    let mut worst_moment = 0.0f64;
    for n in 1..=10 {
        let analysis = Analysis::new(&ts, Family::Chebyshev, n, DxMode::AnalyticalDX).unwrap();
        let g = analysis.gauss().unwrap();
        let (nodes, weights) = common::gauss_legendre(n);
        for i in 0..n {
            let err = (g.nodes[i] - nodes[i])
                .abs()
                .max((g.weights[i] - weights[i]).abs());
            ensure(err <= 1e-6, || {
                format!(
                    "n={n} node {i}: ({}, {}) vs ({}, {})",
                    g.nodes[i], g.weights[i], nodes[i], weights[i]
                )
            })?;
            worst_node = worst_node.max(err);
        }
        for k in 0..=2 * n - 2 {
            let exact = if k % 2 == 0 {
                2.0 / (k + 1) as f64
            } else {
                0.0
            };
            let got = g.integrate(|x| x.powi(k as i32));
            let err = if exact == 0.0 {
                got.abs()
            } else {
                ((got - exact) / exact).abs()
            };
            ensure(err <= 1e-8, || format!("n={n} x^{k}: {got} vs {exact}"))?;
            worst_moment = worst_moment.max(err);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "node/weight error {worst_node:.1e}, moment error {worst_moment:.1e}"
    ))
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// `(max |RN - f| on [-0.9, 0.9], max |LS - f| there, RN range on [-2, 2], LS range there)`.
fn runge_errors(
    rn: impl Fn(f64) -> f64,
    ls: impl Fn(f64) -> f64,
) -> (f64, f64, (f64, f64), (f64, f64)) {
    let inner = grid(-0.9, 0.9, 1801);
    let err = |g: &dyn Fn(f64) -> f64| {
        inner
            .iter()
            .fold(0.0f64, |m, &y| m.max((g(y) - runge(y)).abs()))
    };
    let outer = grid(-2.0, 2.0, 4001);
    let range = |g: &dyn Fn(f64) -> f64| {
        outer
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| {
                let v = g(y);
                (a.min(v), b.max(v))
            })
    };
    (err(&rn), err(&ls), range(&rn), range(&ls))
}

fn ac4_runge() -> Outcome {
    let n = 7;
    let spec = BasisSpec::new(Family::Chebyshev, n, DomainMap::canonical()).unwrap();
    let df = |x: f64| -50.0 * x / (1.0 + 25.0 * x * x).powi(2);
    let analysis = Analysis::from_moments(common::continuous_moments(&spec, runge, df)).unwrap();

    let gram = common::quadrature_matrix(&spec, |_| 1.0);
    let fmat = common::quadrature_matrix(&spec, runge);
    let fvec = DVector::from_fn(n, |k, _| {
        common::integrate(
            |x| common::basis_vector(&spec, x, n)[k] * runge(x),
            -1.0,
            1.0,
            200,
        )
    });
    let mut oracle_gap = 0.0f64;
    for y in grid(-2.0, 2.0, 401) {
        let (rn, ls) = common::rn_ls_oracle(&spec, &gram, &fmat, &fvec, y);
        let r = analysis.interpolate_direct(y);
        oracle_gap = oracle_gap.max((r.f_rn - rn).abs()).max((r.f_ls - ls).abs());
    }
    ensure(oracle_gap <= 1e-6, || {
        format!("oracle gap {oracle_gap:.2e}")
    })?;

    // f over [-1, 1] spans [1/26, 1]; on [-2, 2] the samples stop at |x| = 1
    let bounds = (1.0 / 26.0, 1.0);
    let mut failures = Vec::new();
    let mut notes = vec![format!("oracle gap {oracle_gap:.1e}")];
    let sampled = Analysis::new(
        &gen_runge(2001).unwrap(),
        Family::Chebyshev,
        n,
        DxMode::SampleDX,
    )
    .unwrap();
    for (label, a) in [("continuum", &analysis), ("sampled", &sampled)] {
        let (rn_err, ls_err, rn_range, ls_range) = runge_errors(
            |y| a.interpolate_direct(y).f_rn,
            |y| a.interpolate_direct(y).f_ls,
        );
        if rn_err >= ls_err {
            failures.push(format!(
                "{label}: max |RN - f| {rn_err:.4} not below max |LS - f| {ls_err:.4}"
            ));
        }
        if rn_range.0 < bounds.0 - 1e-12 || rn_range.1 > bounds.1 + 1e-12 {
            failures.push(format!("{label}: RN range {rn_range:?} leaves [1/26, 1]"));
        }
        if ls_range.0 >= bounds.0 && ls_range.1 <= bounds.1 {
            failures.push(format!(
                "{label}: LS range {ls_range:?} stays inside [1/26, 1]"
            ));
        }
        notes.push(format!(
            "{label} max err RN {rn_err:.4} LS {ls_err:.4}, RN range [{:.4}, {:.4}], LS range [{:.2}, {:.2}]",
            rn_range.0, rn_range.1, ls_range.0, ls_range.1
        ));
    }
    let notes = notes.join("; ");
    if failures.is_empty() {
        Ok(notes)
    } else {
        Err(format!("{}; {notes}", failures.join("; ")))
    }
}

fn fixtures() -> Vec<(&'static str, Timeserie)> {
    vec![
        ("two-stage 10:10", two_stage([10.0, 10.0])),
        ("two-stage 15:5", two_stage([15.0, 5.0])),
        ("multi-exp 7:7:7", multi_exp([7.0, 7.0, 7.0])),
        ("multi-exp 3.5:7:10.5", multi_exp([3.5, 7.0, 10.5])),
        ("runge 2001", gen_runge(2001).unwrap()),
    ]
}

fn ac5_dual_form() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for (name, ts) in fixtures() {
        for n in [1, 7, 20, 35, 50] {
            let analysis = Analysis::new(&ts, Family::Chebyshev, n, DxMode::SampleDX).unwrap();
            let gap = analysis.dual_form_discrepancy(ts.xs());
            ensure(gap <= 1e-8, || format!("{name} n={n}: gap {gap:.2e}"))?;
            if gap >= worst.0 {
                worst = (gap, format!("{name} n={n}"));
            }
        }
    }
    Ok(format!("worst gap {:.1e} ({})", worst.0, worst.1))
}

fn ac6_basis_invariance() -> Outcome {
    let ts = two_stage([10.0, 10.0]);
    let cheb = Analysis::new(&ts, Family::Chebyshev, 30, DxMode::SampleDX).unwrap();
    let leg = Analysis::new(&ts, Family::Legendre, 30, DxMode::SampleDX).unwrap();
    let mut worst = 0.0f64;
    for (kind, _) in SPECTRUM_FILES {
        let (a, b) = (cheb.spectrum(kind).unwrap(), leg.spectrum(kind).unwrap());
        ensure(a.defective == b.defective, || {
            format!("{kind:?}: defective flags differ")
        })?;
        if a.defective {
            continue;
        }
        for (i, (x, y)) in a.lambdas.iter().zip(&b.lambdas).enumerate() {
            let d = (x - y).abs();
            ensure(d <= 1e-6, || format!("{kind:?} λ[{i}]: {x} vs {y}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("max eigenvalue difference {worst:.1e}"))
}

/// Random piecewise signal: 1 to 4 linear or exponential stages.
fn random_signal(rng: &mut ChaCha8Rng) -> Timeserie {
    let stages = rng.random_range(1..=4);
    let kind = if rng.random_bool(0.5) {
        StageKind::LinearDecay
    } else {
        StageKind::ExponentialDecay
    };
    let rates = (0..stages).map(|_| rng.random_range(-0.5..0.2)).collect();
    let lengths: Vec<f64> = (0..stages).map(|_| rng.random_range(0.5..5.0)).collect();
    let step = rng.random_range(0.005..0.05);
    let spec = StageSpec::new(rates, lengths, step, kind).unwrap();
    rn_spectra::models::gen_stages(&spec).unwrap()
}

/// `|R(α + δ) - λ|` against `10 |δ|² (|M^L|_F + |λ| |M^R|_F)` for `|δ| = 1e-6 |α|`.
fn rayleigh_stationary(
    left: &Matrix,
    right: &Matrix,
    lambda: f64,
    alpha: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut delta: Vec<f64> = alpha.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let dn = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
    for d in &mut delta {
        *d *= 1e-6 * norm / dn;
    }
    let p: Vec<f64> = alpha.iter().zip(&delta).map(|(a, d)| a + d).collect();
    let r = left.quad_form(&p, &p) / right.quad_form(&p, &p);
    let d2 = (1e-6 * norm).powi(2);
    let bound = 10.0 * d2 * (left.frobenius_norm() + lambda.abs() * right.frobenius_norm());
    ensure((r - lambda).abs() <= bound, || {
        format!(
            "Rayleigh quotient moved {:.2e} > {bound:.2e}",
            (r - lambda).abs()
        )
    })
}

fn ac7_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut worst_total = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut pairs = 0usize;
    let mut sign_changes = 0usize;
    for case in 0..100 {
        let ts = random_signal(&mut rng);
        let n = rng.random_range(3..=20);
        let analysis = Analysis::new(&ts, Family::Chebyshev, n, DxMode::SampleDX).unwrap();
        let m = &analysis.moments;
        let positive = ts.fs().iter().all(|&f| f > 0.0);
        let crosses = ts.fs().iter().any(|&f| f > 0.0) && ts.fs().iter().any(|&f| f < 0.0);

        let mut kinds = vec![
            (
                PairKind::Value,
                m.q[0],
                m.fq[0],
                &analysis.f_matrix,
                &analysis.gram,
            ),
            (
                PairKind::Derivative,
                m.q[0],
                m.dfq[0],
                &analysis.df_matrix,
                &analysis.gram,
            ),
        ];
        if positive {
            kinds.push((
                PairKind::RelaxRate,
                m.fq[0],
                m.dfq[0],
                &analysis.df_matrix,
                &analysis.f_matrix,
            ));
        }
        for (kind, total, mean, left, right) in kinds {
            let lq = analysis.lebesgue(kind).unwrap();
            let e_total = ((lq.total_weight() - total) / total).abs();
            let scale: f64 = lq
                .value_nodes
                .iter()
                .zip(&lq.weights)
                .map(|(g, w)| g.abs() * w)
                .sum();
            let e_mean = (lq.integral() - mean).abs() / scale.max(f64::MIN_POSITIVE);
            ensure(e_total <= 1e-8 && e_mean <= 1e-8, || {
                format!(
                    "case {case} {kind:?} n={n}: Σw error {e_total:.1e}, Σλw error {e_mean:.1e}"
                )
            })?;
            worst_total = worst_total.max(e_total);
            worst_mean = worst_mean.max(e_mean);
            let s = analysis.spectrum(kind).unwrap();
            for i in 0..s.dim() {
                rayleigh_stationary(left, right, s.lambdas[i], s.alpha(i), &mut rng)
                    .map_err(|e| format!("case {case} {kind:?} n={n} pair {i}: {e}"))?;
                pairs += 1;
            }
        }
        if crosses {
            sign_changes += 1;
            let table = analysis.spectrum_table(PairKind::RelaxRate);
            ensure(
                table.iter().all(|(_, l, x)| l.is_nan() && x.is_nan()),
                || format!("case {case}: sign-changing f gave a finite relaxation spectrum"),
            )?;
        }
    }

    // Guaranteed sign change: 1 - 0.2 x on [0, 10]
    let xs: Vec<f64> = (0..=1000).map(|l| l as f64 * 0.01).collect();
    let fs = xs.iter().map(|x| 1.0 - 0.2 * x).collect();
    let ts = Timeserie::new(xs, fs).unwrap();
    let analysis = Analysis::new(&ts, Family::Chebyshev, 10, DxMode::SampleDX).unwrap();
    ensure(
        analysis.relax_rate.defective && analysis.relax_rate.lambdas.iter().all(|l| l.is_nan()),
        || "sign-changing f gave a finite relaxation spectrum".into(),
    )?;
    ensure(!analysis.derivative.defective, || {
        "derivative pencil marked defective".into()
    })?;

    Ok(format!(
        "Σw error {worst_total:.1e}, Σλw error {worst_mean:.1e}, {pairs} eigenpairs stationary, {} NaN spectra",
        sign_changes + 1
    ))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rn-spectra"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn ac8_golden() -> Outcome {
    let data = data_dir();
    let input = data.join("two_stage.dat");
    let golden = data.join("golden");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;

    let regenerated = tmp.path().join("two_stage.dat");
    run_cli(&[
        "gen",
        "two-stage",
        "--step",
        "0.05",
        "--out",
        regenerated.to_str().unwrap(),
    ])?;
    ensure(fs::read(&regenerated).ok() == fs::read(&input).ok(), || {
        "regenerated fixture differs from the committed one".into()
    })?;

    let names: Vec<&str> = [RN_INTERPOLATED, EV_RN_INTERPOLATED]
        .into_iter()
        .chain(SPECTRUM_FILES.iter().map(|(_, name)| *name))
        .collect();
    for run in 0..2 {
        let out = tmp.path().join(format!("run{run}"));
        run_cli(&[
            "analyze",
            input.to_str().unwrap(),
            "--n",
            "30",
            "--dx",
            "sample",
            "--out",
            out.to_str().unwrap(),
        ])?;
        for name in &names {
            let got = fs::read(out.join(name)).map_err(|e| format!("{name}: {e}"))?;
            let want = fs::read(golden.join(name)).map_err(|e| format!("golden {name}: {e}"))?;
            ensure(got == want, || {
                format!("run {run}: {name} differs from golden")
            })?;
        }
    }
    Ok(format!("{} files byte-identical over 2 runs", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "two-stage derivative spectrum", ac1_two_stage),
        ("AC2", "three-stage relaxation rates", ac2_three_stage),
        ("AC3", "Gauss quadrature", ac3_gauss),
        ("AC4", "Runge interpolation", ac4_runge),
        ("AC5", "dual-form identity", ac5_dual_form),
        ("AC6", "basis invariance", ac6_basis_invariance),
        ("AC7", "property suites", ac7_properties),
        ("AC8", "CLI golden files", ac8_golden),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
