//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use bai_core::bounds::{
    fb_error_lower_bounds, fc_lower_bound_eps_relaxed, fc_lower_bound_general, fc_two_armed_bounds, gap_profile,
};
use bai_core::complexity::complexity_report;
use bai_core::harness::{
    deviation_bound, empirical_lil_crossing, run_experiment, validate_fc, Algorithm, ExperimentRecord, Grid,
};
use bai_core::{ExpFamily, Family};

use crate::args::{BoundArgs, Cli, Command, FigureArgs, InstanceArgs, LilArgs};
use crate::figures::preset;
use crate::records::{fmt_sig, write_records, SIG_DIGITS};

fn sig(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

/// Runs one parsed invocation, writing results to `out` unless the command
/// has its own `--out` file.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Complexity(args) => complexity(&args, out),
        Command::Bound(args) => bound(&args, out),
        Command::SimulateFc(args) => {
            let cfg = args.to_config()?;
            validate_fc(&cfg)?;
            warn_outside_guarantee(&cfg.algorithm, &cfg.grid);
            let records = run_experiment(&cfg, args.run.workers)?;
            emit(&records, args.run.out.as_deref(), out)
        }
        Command::SimulateFb(args) => {
            let cfg = args.to_config()?;
            let records = run_experiment(&cfg, args.run.workers)?;
            emit(&records, args.run.out.as_deref(), out)
        }
        Command::LilCheck(args) => lil_check(&args, out),
        Command::ReproduceFigure(args) => reproduce(&args, out),
    }
}

fn warn_outside_guarantee(alg: &Algorithm, grid: &Grid) {
    let rate = match alg {
        Algorithm::Elimination { rate, .. }
        | Algorithm::AlphaElimination { rate, .. }
        | Algorithm::Sglrt { rate, .. } => *rate,
        _ => return,
    };
    if let Grid::Delta(deltas) = grid {
        if let Some(d) = deltas.iter().find(|&&d| rate.warns_at(d)) {
            eprintln!("warning: {rate} is only guaranteed for small δ; δ = {d} relies on simulation evidence");
        }
    }
}

fn emit(records: &[ExperimentRecord], path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            write_records(&mut w, records)?;
            w.flush()?;
            Ok(())
        }
        None => write_records(out, records),
    }
}

fn complexity(args: &InstanceArgs, out: &mut dyn Write) -> Result<()> {
    let nu = args.merge(None)?.build()?;
    let r = complexity_report(&nu)?;
    writeln!(
        out,
        "instance,c_star_fc,i_star_fc,c_star_fb,i_star_fb,mu_star_reversed,mu_star_chernoff,kappa_c_lower,kappa_b"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        nu.label(),
        sig(r.c_star_fc),
        sig(r.i_star_fc),
        sig(r.c_star_fb),
        sig(r.i_star_fb),
        sig(r.theta_star_reversed.mean),
        sig(r.theta_star_chernoff.mean),
        sig(r.kappa_c_lower),
        sig(r.kappa_b),
    )?;
    Ok(())
}

fn is_bernoulli(family: Family) -> bool {
    matches!(family, Family::Bernoulli | Family::ExpFamily(ExpFamily::Bernoulli))
}

fn bound(args: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    let nu = args.instance.merge(None)?.build()?;
    let mut rows: Vec<(&str, f64)> = vec![("fc_lower_bound", fc_lower_bound_general(&nu, args.delta)?)];
    if nu.k() == 2 {
        let (general, uniform) = fc_two_armed_bounds(&nu, args.delta)?;
        rows.push(("fc_two_armed_lower_bound", general));
        rows.push(("fc_uniform_sampling_lower_bound", uniform));
    }
    if let Some(eps) = args.eps {
        if is_bernoulli(nu.family()) {
            rows.push(("fc_eps_relaxed_lower_bound", fc_lower_bound_eps_relaxed(&nu, eps, args.delta)?));
        }
    }
    let profile = gap_profile(&nu);
    rows.push(("h", profile.h));
    rows.push(("h2", profile.h2));
    if let Some(g) = profile.gaussian {
        rows.push(("h_prime", g.h_prime));
        rows.push(("h_plus", g.h_plus));
        rows.push(("h_minus", g.h_minus));
        rows.push(("h_tilde", g.h_tilde));
        if let Some(t) = args.budget {
            let (single, pair) = fb_error_lower_bounds(&profile, t)?;
            rows.push(("fb_error_lower_bound", single));
            rows.push(("fb_error_lower_bound_m", pair));
        }
    }
    writeln!(out, "quantity,value")?;
    for (name, value) in rows {
        writeln!(out, "{name},{}", sig(value))?;
    }
    Ok(())
}

fn lil_check(args: &LilArgs, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "x,beta,horizon,paths,deviation_bound,frequency,std_error,holds")?;
    for &x in &args.x.0 {
        for &beta in &args.beta.0 {
            let bound = deviation_bound(x, beta)?;
            let freq = empirical_lil_crossing(args.sigma, x, beta, args.horizon, args.paths, args.seed, args.workers)?;
            let se = (freq * (1.0 - freq) / args.paths as f64).sqrt();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                sig(x),
                sig(beta),
                args.horizon,
                args.paths,
                sig(bound),
                sig(freq),
                sig(se),
                freq <= bound + 3.0 * se
            )?;
        }
    }
    Ok(())
}

fn reproduce(args: &FigureArgs, out: &mut dyn Write) -> Result<()> {
    let mut records = Vec::new();
    for cfg in preset(args.figure, args.reps, args.seed) {
        records.extend(run_experiment(&cfg, args.workers)?);
    }
    emit(&records, args.out.as_deref(), out)
}

/// Parses `argv`, runs it and maps failures to exit code 2 with a
/// one-line diagnostic on stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock).and_then(|()| lock.flush().map_err(Into::into)) {
        Ok(()) => 0,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            2
        }
    }
}
