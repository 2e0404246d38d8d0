//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one PASS/FAIL line, including after an
//! earlier failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use bai_core::complexity::{c_star_fb, c_star_fc, g_alpha, i_star_fb, i_star_fc, optimal_alpha};
use bai_core::dists::bernoulli_kl;
use bai_core::fc_algos::{AlphaChoice, ExplorationRate, SprtStatistic};
use bai_core::harness::{
    deviation_bound, empirical_lil_crossing, run_experiment, Algorithm, AllocationRule, ExperimentConfig,
    ExperimentRecord, Grid,
};
use bai_core::{BanditInstance, ExpFamily, InstanceSpec, RngState};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bai(args: &[&str]) -> std::result::Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bai"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot launch bai: {e}"))?;
    if !out.status.success() {
        return Err(format!("bai {args:?} failed: {}", String::from_utf8_lossy(&out.stderr).trim()));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn csv_field(csv: &str, column: &str) -> std::result::Result<String, String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().ok_or("empty output")?.split(',').collect();
    let row: Vec<&str> = lines.next().ok_or("missing data row")?.split(',').collect();
    let i = header.iter().position(|&h| h == column).ok_or(format!("no column {column}"))?;
    Ok(row[i].to_string())
}

fn spec(family: &str, means: [f64; 2], variances: Option<[f64; 2]>) -> InstanceSpec {
    InstanceSpec {
        family: family.into(),
        means: means.to_vec(),
        variances: variances.map(|v| v.to_vec()),
        m: 1,
    }
}

fn easy_gaussian() -> InstanceSpec {
    spec("gaussian", [0.5, 0.0], Some([0.25, 0.25]))
}

fn run(instance: InstanceSpec, algorithm: Algorithm, grid: Grid, replications: u64, seed: u64) -> Vec<ExperimentRecord> {
    let cfg = ExperimentConfig {
        instance,
        algorithm,
        grid,
        replications,
        master_seed: seed,
    };
    run_experiment(&cfg, None).expect("valid experiment")
}

/// Monte Carlo allowance for an error rate at level `delta` over `n` runs.
fn pac_limit(delta: f64, n: u64) -> f64 {
    delta + 3.0 * (delta / n as f64).sqrt()
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bernoulli pair with means in (0.02, 0.98) at least 0.01 apart.
fn random_bernoulli_pair(rng: &mut RngState) -> (f64, f64) {
    loop {
        let x = 0.02 + 0.96 * rng.uniform();
        let y = 0.02 + 0.96 * rng.uniform();
        if (x - y).abs() >= 0.01 {
            return (x, y);
        }
    }
}

fn complexity_constants() -> Check {
    let common = ["complexity", "--family", "gaussian", "--variances", "0.25,0.25", "--means"];
    let mut seen = Vec::new();
    for (means, want) in [("0.5,0", "8"), ("0.01,0", "20000")] {
        let mut args = common.to_vec();
        args.push(means);
        let out = bai(&args)?;
        let kappa = csv_field(&out, "kappa_c_lower")?;
        seen.push(format!("kappa({means}) = {kappa}"));
        if kappa != want {
            return Err(format!("{}; expected {want}", seen.join(", ")));
        }
    }
    Ok(seen.join(", "))
}

fn chernoff_oracles() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let mu1 = 0.05 + 0.3 * i as f64;
            let (v1, v2) = (0.1 + 0.2 * j as f64, 2.0 - 0.15 * j as f64);
            let nu = BanditInstance::gaussian(&[mu1, 0.0], &[v1, v2], 1).map_err(|e| e.to_string())?;
            let fb = c_star_fb(&nu).map_err(|e| e.to_string())?.0;
            let fc = c_star_fc(&nu).map_err(|e| e.to_string())?.0;
            worst = worst.max((fb - fc).abs());
        }
    }
    if worst > 1e-10 {
        return Err(format!("Gaussian grid: max |c_fb - c_fc| = {worst:.3e}"));
    }

    let (x, y) = (0.2, 0.1);
    let nu = BanditInstance::bernoulli(&[x, y], 1).map_err(|e| e.to_string())?;
    let lib_lower = c_star_fc(&nu).map_err(|e| e.to_string())?.0;
    let lib_upper = c_star_fb(&nu).map_err(|e| e.to_string())?.0;
    let m_lower = bisect(y, x, |m| bernoulli_kl(x, m) - bernoulli_kl(y, m));
    let m_upper = bisect(y, x, |m| bernoulli_kl(m, x) - bernoulli_kl(m, y));
    let oracle_lower = bernoulli_kl(x, m_lower);
    let oracle_upper = bernoulli_kl(m_upper, x);
    let detail = format!(
        "Gaussian grid max diff {worst:.1e}; Bernoulli c^* = {lib_upper:.6} (oracle {oracle_upper:.6}), \
         c_* = {lib_lower:.6} (oracle {oracle_lower:.6})"
    );
    ensure(
        lib_upper > lib_lower
            && lib_lower > 0.0
            && (lib_upper - oracle_upper).abs() <= 1e-5
            && (lib_lower - oracle_lower).abs() <= 1e-5
            && (oracle_upper - 0.01012).abs() <= 1e-5
            && (oracle_lower - 0.00999).abs() <= 1e-5,
        detail,
    )
}

fn ordering_invariants() -> Check {
    // Relative slack for floating-point rounding in exact inequalities.
    const ROUNDING: f64 = 1e-9;
    let mut rng = RngState::new(20_240_301);
    for _ in 0..100 {
        let (x, y) = random_bernoulli_pair(&mut rng);
        let nu = BanditInstance::bernoulli(&[x, y], 1).map_err(|e| e.to_string())?;
        let c_lower = c_star_fc(&nu).map_err(|e| e.to_string())?.0;
        let c_upper = c_star_fb(&nu).map_err(|e| e.to_string())?.0;
        let i_lower = i_star_fc(&nu).map_err(|e| e.to_string())?;
        let i_upper = i_star_fb(&nu).map_err(|e| e.to_string())?;
        let harmonic = 1.0 / bernoulli_kl(x, y) + 1.0 / bernoulli_kl(y, x);
        if i_lower > c_lower * (1.0 + ROUNDING)
            || i_upper > c_upper * (1.0 + ROUNDING)
            || 1.0 / c_lower < harmonic * (1.0 - ROUNDING)
        {
            return Err(format!(
                "violated at ({x}, {y}): I_* {i_lower}, c_* {c_lower}, I^* {i_upper}, c^* {c_upper}"
            ));
        }
    }

    let (mut gap_lower, mut gap_upper) = (0.0f64, 0.0f64);
    let mut at = (0.0, 0.0);
    for mu2 in [0.1, 0.5] {
        for k in 5..=95 {
            let mu1 = k as f64 / 100.0;
            if (mu1 - mu2).abs() < 1e-9 {
                continue;
            }
            let nu = BanditInstance::bernoulli(&[mu1, mu2], 1).map_err(|e| e.to_string())?;
            let lower = c_star_fc(&nu).unwrap().0 / i_star_fc(&nu).unwrap() - 1.0;
            let upper = c_star_fb(&nu).unwrap().0 / i_star_fb(&nu).unwrap() - 1.0;
            if lower.max(upper) > gap_lower.max(gap_upper) {
                at = (mu1, mu2);
            }
            gap_lower = gap_lower.max(lower.abs());
            gap_upper = gap_upper.max(upper.abs());
        }
    }
    ensure(
        gap_lower <= 0.025 && gap_upper <= 0.025,
        format!(
            "100 random pairs ordered; sweep mu1 in [0.05, 0.95]: max rel gap c_*/I_* {:.2}%, c^*/I^* {:.2}% (worst at {at:?})",
            100.0 * gap_lower,
            100.0 * gap_upper
        ),
    )
}

fn delta_pac_suite() -> Check {
    const N: u64 = 10_000;
    let deltas = vec![0.1, 0.01];
    let cases = [
        (
            easy_gaussian(),
            Algorithm::Elimination {
                rate: ExplorationRate::RobbinsLogT,
                tau_max: None,
            },
        ),
        (
            easy_gaussian(),
            Algorithm::Elimination {
                rate: ExplorationRate::IteratedLog,
                tau_max: None,
            },
        ),
        (
            spec("gaussian", [1.0, 0.0], Some([1.0, 0.25])),
            Algorithm::AlphaElimination {
                rate: ExplorationRate::AlphaElimRate,
                alpha: AlphaChoice::Auto,
                tau_max: None,
            },
        ),
        (
            spec("bernoulli", [0.2, 0.1], None),
            Algorithm::Sglrt {
                rate: ExplorationRate::SglrtRate,
                tau_max: None,
            },
        ),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (seed, (instance, algorithm)) in cases.into_iter().enumerate() {
        for r in run(instance, algorithm, Grid::Delta(deltas.clone()), N, 100 + seed as u64) {
            let limit = pac_limit(r.metric_grid_value, N);
            ok &= r.error_rate <= limit;
            parts.push(format!(
                "{} d={}: err {} (limit {:.4}, exhausted {})",
                r.algorithm, r.metric_grid_value, r.error_rate, limit, r.exhausted_count
            ));
        }
    }
    ensure(ok, parts.join("; "))
}

fn fixed_budget_slope() -> Check {
    const N: u64 = 100_000;
    const TARGET: f64 = -0.125;
    let records = run(
        easy_gaussian(),
        Algorithm::Static {
            allocation: AllocationRule::Uniform,
        },
        Grid::Budget(vec![40, 80, 120, 160, 200]),
        N,
        5,
    );
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.metric_grid_value, r.error_rate)).collect();
    let listing = points
        .iter()
        .map(|(t, p)| format!("p({t}) = {p:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    let zeros: Vec<f64> = points.iter().filter(|(_, p)| *p == 0.0).map(|(t, _)| *t).collect();
    if !zeros.is_empty() {
        return Err(format!(
            "log p_t undefined: no errors in {N} runs at budgets {zeros:?}; {listing}"
        ));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (t, p)| (a + t, b + p.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), (t, p)| {
        (a + (t - mx) * (p.ln() - my), b + (t - mx).powi(2))
    });
    let slope = sxy / sxx;
    ensure(
        (slope - TARGET).abs() <= 0.2 * TARGET.abs(),
        format!("slope {slope:.4} vs {TARGET} +/- 20%; {listing}"),
    )
}

fn sprt_oracle() -> Check {
    const N: u64 = 10_000;
    let delta: f64 = 0.001;
    let (gap, sigma) = (1.0f64, 0.5f64);
    let theory = 2.0 * sigma * sigma / (gap * gap) * (1.0 / delta).ln();
    let r = &run(
        spec("gaussian", [gap, 0.0], Some([sigma * sigma; 2])),
        Algorithm::Sprt {
            statistic: SprtStatistic::ExactLlr,
            tau_max: None,
        },
        Grid::Delta(vec![delta]),
        N,
        6,
    )[0];
    let limit = pac_limit(delta, N);
    ensure(
        r.mean_tau >= theory && r.mean_tau <= 2.5 * theory && r.error_rate <= limit,
        format!(
            "mean tau {:.3} in [{theory:.3}, {:.3}]; err {} (limit {limit:.5})",
            r.mean_tau,
            2.5 * theory,
            r.error_rate
        ),
    )
}

fn optimal_allocation_identity() -> Check {
    let fam = ExpFamily::Bernoulli;
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let mut rng = RngState::new(7_777);
    let (mut worst_cross, mut worst_value) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (x, y) = random_bernoulli_pair(&mut rng);
        let (t1, t2) = (logit(x), logit(y));
        let opt = optimal_alpha(&fam, t1, t2).map_err(|e| e.to_string())?;
        let theta_star = bisect(t1.min(t2), t1.max(t2), |t| fam.divergence(t, t1) - fam.divergence(t, t2));
        let chernoff = fam.divergence(theta_star, t1);
        let g = g_alpha(&fam, t1, t2, opt.alpha).map_err(|e| e.to_string())?;
        worst_cross = worst_cross.max((opt.alpha * t1 + (1.0 - opt.alpha) * t2 - theta_star).abs());
        worst_value = worst_value.max((g - chernoff).abs());
    }
    ensure(
        worst_cross <= 1e-8 && worst_value <= 1e-8,
        format!("max crossing error {worst_cross:.2e}, max value error {worst_value:.2e}"),
    )
}

fn deviation_bound_check() -> Check {
    const PATHS: u64 = 10_000;
    let mut parts = Vec::new();
    let mut ok = true;
    for x in [3.0, 5.0] {
        for beta in [1.5, 2.0] {
            let freq = empirical_lil_crossing(1.0, x, beta, 10_000, PATHS, 8, None).map_err(|e| e.to_string())?;
            let bound = deviation_bound(x, beta).map_err(|e| e.to_string())?;
            let se = (freq * (1.0 - freq) / PATHS as f64).sqrt();
            ok &= freq <= bound + 3.0 * se;
            parts.push(format!("x={x} b={beta}: {freq:.4} <= {bound:.4} + 3*{se:.4}"));
        }
    }
    ensure(ok, parts.join("; "))
}

fn determinism() -> Check {
    let base = ["reproduce-figure", "fig4-left", "--reps", "1000", "--seed", "42", "--workers"];
    let with = |w: &'static str| {
        let mut args = base.to_vec();
        args.push(w);
        bai(&args)
    };
    let first = with("1")?;
    let second = with("1")?;
    let four = with("4")?;
    ensure(
        first == second && first == four && first.lines().count() > 1,
        format!("{} bytes, {} lines; identical across runs and workers 1/4", first.len(), first.lines().count()),
    )
}

fn rate_comparison() -> Check {
    const N: u64 = 10_000;
    let delta = 0.01;
    let run_rate = |rate| {
        run(
            easy_gaussian(),
            Algorithm::Elimination { rate, tau_max: None },
            Grid::Delta(vec![delta]),
            N,
            10,
        )
        .remove(0)
    };
    let robbins = run_rate(ExplorationRate::RobbinsLogT);
    let iterated = run_rate(ExplorationRate::IteratedLog);
    let plain = run_rate(ExplorationRate::PlainLog);
    let limit = pac_limit(delta, N);
    ensure(
        iterated.mean_tau < robbins.mean_tau
            && plain.mean_tau < iterated.mean_tau
            && robbins.error_rate <= limit
            && iterated.error_rate <= limit,
        format!(
            "mean tau plain-log {:.2} < iterated-log {:.2} < robbins-log-t {:.2}; err iterated {} robbins {} (limit {limit:.4})",
            plain.mean_tau, iterated.mean_tau, robbins.mean_tau, iterated.error_rate, robbins.error_rate
        ),
    )
}

fn main() -> ExitCode {
    let checks: [Criterion; 10] = [
        ("complexity constants", complexity_constants),
        ("Chernoff solver oracles", chernoff_oracles),
        ("ordering invariants", ordering_invariants),
        ("delta-PAC suite", delta_pac_suite),
        ("fixed-budget slope", fixed_budget_slope),
        ("SPRT oracle", sprt_oracle),
        ("optimal allocation identity", optimal_allocation_identity),
        ("deviation bound", deviation_bound_check),
        ("determinism", determinism),
        ("exploration-rate comparison", rate_comparison),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
