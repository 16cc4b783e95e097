//! `properscore`: batch scoring, expected scores, properization tables and propriety probes.

mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use properscore::propriety::{check_proper, find_violation, DEFAULT_TOLERANCE};
use properscore::quad::mc_expect;
use properscore::rules::{entropy_s_tilde, expected_score, p_tilde_star, properize_map_bg, score, shannon_entropy};
use properscore::{DistributionFunction, Error, QuadConfig, RuleSpec, ScoreValue};

use input::AnyDistribution;
use report::{csv_string, emit, jnum, json_string, num};

#[derive(Parser)]
#[command(name = "properscore", version, about = "Proper scoring rules for real-valued forecasts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Rule name (crps, wcrps, s_alpha, s_alpha_star, s_tilde, s_tilde_star, log_score,
    /// remark_first, remark_second) or a rule JSON object.
    #[arg(long, global = true)]
    rule: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Weight JSON, inline or as a file path.
    #[arg(long, global = true)]
    weight: Option<String>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Also estimate `expected` by Monte Carlo with this many draws.
    #[arg(long, global = true)]
    mc_n: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "PROPERSCORE_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Exit with status 2 if any reported score diverged.
    #[arg(long, global = true)]
    strict_finite: bool,
    #[arg(long, global = true, value_enum, default_value_t = Pairing::Zip)]
    pairing: Pairing,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Pairing {
    /// i-th forecast line with i-th observation.
    Zip,
    /// A single forecast against every observation.
    Broadcast,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MapKind {
    Tilde,
    Bg,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Score forecasts (JSONL) against observations (CSV).
    Score {
        #[arg(long)]
        forecasts: PathBuf,
        #[arg(long)]
        observations: PathBuf,
    },
    /// Expected score of a forecast under a true distribution.
    Expected {
        #[arg(long)]
        forecast: String,
        #[arg(long)]
        truth: String,
    },
    /// Tabulate the properization maps on an x grid.
    Properize {
        #[arg(long)]
        dist: String,
        /// lo:hi:n
        #[arg(long, default_value = "-5:5:101")]
        grid: String,
        #[arg(long, value_enum, default_value_t = MapKind::Both)]
        map: MapKind,
    },
    /// Check propriety of a rule on a grid of distributions.
    Probe {
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Also write the score matrix as CSV here.
        #[arg(long)]
        matrix_csv: Option<PathBuf>,
    },
    /// Entropy of the properized rule, or Shannon entropy (bits) of a discrete distribution.
    Entropy {
        #[arg(long)]
        dist: String,
    },
}

/// What a successful run found out, for the exit code.
struct Outcome {
    diverged: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(o) if cli.common.strict_finite && o.diverged > 0 => {
            eprintln!("error: {} value(s) diverged", o.diverged);
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    if let Some(n) = c.threads.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring threads")?;
    }
    let mut cfg = QuadConfig::default();
    if let Some(r) = c.rel_tol {
        cfg = cfg.with_rel_tol(r);
    }
    if let Some(a) = c.abs_tol {
        cfg = cfg.with_abs_tol(a);
    }
    cfg.validate()?;
    match &cli.command {
        Command::Score { forecasts, observations } => cmd_score(c, &cfg, forecasts, observations),
        Command::Expected { forecast, truth } => cmd_expected(c, &cfg, forecast, truth),
        Command::Properize { dist, grid, map } => cmd_properize(c, dist, grid, *map),
        Command::Probe { grid, tolerance, matrix_csv } => cmd_probe(c, &cfg, grid, *tolerance, matrix_csv.as_deref()),
        Command::Entropy { dist } => cmd_entropy(c, &cfg, dist),
    }
}

fn rule(c: &Common) -> Result<RuleSpec> {
    let r = c.rule.as_deref().ok_or_else(|| anyhow!("--rule is required"))?;
    input::rule(r, c.alpha, c.weight.as_deref())
}

fn config_echo(c: &Common, cfg: &QuadConfig) -> Value {
    json!({
        "quad": cfg,
        "seed": c.seed,
        "mc_n": c.mc_n,
        "pairing": match c.pairing { Pairing::Zip => "zip", Pairing::Broadcast => "broadcast" },
    })
}

fn score_fields(s: &ScoreValue) -> [String; 4] {
    [num(s.value), num(s.error_estimate), s.converged.to_string(), s.divergent.to_string()]
}

fn cmd_score(c: &Common, cfg: &QuadConfig, forecasts: &Path, observations: &Path) -> Result<Outcome> {
    let rule = rule(c)?;
    let fc = input::forecasts_jsonl(forecasts)?;
    let obs = input::observations_csv(observations)?;
    let pairs: Vec<usize> = match c.pairing {
        Pairing::Zip => {
            if fc.len() != obs.len() {
                bail!("{} forecasts but {} observations; use --pairing broadcast for a single forecast", fc.len(), obs.len());
            }
            (0..obs.len()).collect()
        }
        Pairing::Broadcast => {
            if fc.len() != 1 {
                bail!("broadcast pairing needs exactly one forecast, got {}", fc.len());
            }
            vec![0; obs.len()]
        }
    };
    let scores: Vec<ScoreValue> = pairs
        .par_iter()
        .zip(obs.par_iter())
        .enumerate()
        .map(|(i, (&f, &y))| score(&rule, &fc[f], y, cfg).with_context(|| format!("row {}: forecast line {}", i + 1, f + 1)))
        .collect::<Result<_>>()?;

    let finite: Vec<f64> = scores.iter().filter(|s| s.is_finite()).map(|s| s.value).collect();
    let diverged = scores.len() - finite.len();
    let mean = if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 };

    let text = match c.format {
        Format::Csv => {
            let header = ["index", "observation", "forecast", "value", "error_estimate", "converged", "divergent"];
            let rows: Vec<Vec<String>> = scores
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut r = vec![(i + 1).to_string(), num(obs[i]), (pairs[i] + 1).to_string()];
                    r.extend(score_fields(s));
                    r
                })
                .collect();
            eprintln!("count={} finite={} divergent={} mean={}", scores.len(), finite.len(), diverged, num(mean));
            csv_string(&header.map(String::from), &rows)?
        }
        Format::Json => {
            let rows: Vec<Value> = scores
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "index": i + 1,
                        "observation": jnum(obs[i]),
                        "forecast": pairs[i] + 1,
                        "value": jnum(s.value),
                        "error_estimate": jnum(s.error_estimate),
                        "converged": s.converged,
                        "divergent": s.divergent,
                    })
                })
                .collect();
            json_string(&json!({
                "rule": rule,
                "config": config_echo(c, cfg),
                "rows": rows,
                "summary": {
                    "count": scores.len(),
                    "finite_count": finite.len(),
                    "divergent_count": diverged,
                    "mean": jnum(mean),
                },
            }))?
        }
    };
    emit(c.output.as_deref(), &text)?;
    Ok(Outcome { diverged })
}

fn cmd_expected(c: &Common, cfg: &QuadConfig, forecast: &str, truth: &str) -> Result<Outcome> {
    let rule = rule(c)?;
    let f = input::distribution(forecast)?;
    let g = input::distribution(truth)?;
    let v = expected_score(&rule, &f, &g, cfg)?;
    let mc = match c.mc_n {
        Some(n) => Some(mc_expect(&g, |y| score(&rule, &f, y, cfg).map_or(f64::NAN, |s| s.value), n, c.seed)?),
        None => None,
    };
    let text = match c.format {
        Format::Csv => {
            let mut header: Vec<String> = ["value", "error_estimate", "converged", "divergent"].map(String::from).into();
            let mut row: Vec<String> = score_fields(&v).into();
            if let Some(m) = &mc {
                header.extend(["mc_mean", "mc_std_error", "mc_n"].map(String::from));
                row.extend([num(m.mean), num(m.std_error), m.n.to_string()]);
            }
            csv_string(&header, &[row])?
        }
        Format::Json => {
            let mut out = json!({
                "rule": rule,
                "config": config_echo(c, cfg),
                "value": jnum(v.value),
                "error_estimate": jnum(v.error_estimate),
                "converged": v.converged,
                "divergent": v.divergent,
            });
            if let Some(m) = &mc {
                out["monte_carlo"] = json!({ "mean": jnum(m.mean), "std_error": jnum(m.std_error), "n": m.n });
            }
            json_string(&out)?
        }
    };
    emit(c.output.as_deref(), &text)?;
    Ok(Outcome { diverged: usize::from(v.divergent) })
}

fn cmd_properize(c: &Common, dist: &str, grid: &str, map: MapKind) -> Result<Outcome> {
    let alpha = c.alpha.ok_or_else(|| anyhow!("--alpha is required"))?;
    let d = input::distribution(dist)?;
    let xs = input::x_grid(grid)?;
    let tilde = match map {
        MapKind::Bg => None,
        _ => {
            if !d.in_p01() {
                return Err(Error::NotInP01.into());
            }
            Some(p_tilde_star(&d, alpha)?)
        }
    };
    let bg = match map {
        MapKind::Tilde => None,
        _ => Some(properize_map_bg(&d, alpha)?),
    };
    let mut header = vec!["x".to_string(), "cdf".to_string()];
    if tilde.is_some() {
        header.push("tilde_star".into());
    }
    if bg.is_some() {
        header.push("bg_star".into());
    }
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            let mut r = vec![x, d.cdf(x)];
            r.extend(tilde.as_ref().map(|t| t.cdf(x)));
            r.extend(bg.as_ref().map(|b| b.cdf(x)));
            r
        })
        .collect();
    let text = match c.format {
        Format::Csv => csv_string(&header, &rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect::<Vec<_>>())?,
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().cloned().zip(r.iter().map(|&v| jnum(v))).collect()))
                .collect();
            json_string(&json!({ "distribution": d, "alpha": jnum(alpha), "rows": rows }))?
        }
    };
    emit(c.output.as_deref(), &text)?;
    Ok(Outcome { diverged: 0 })
}

fn cmd_probe(c: &Common, cfg: &QuadConfig, grid: &str, tolerance: f64, matrix_csv: Option<&Path>) -> Result<Outcome> {
    let rule = rule(c)?;
    let grid = input::grid(grid)?;
    let report = check_proper(&rule, &grid, cfg, tolerance)?;
    let diverged = report.matrix.iter().flatten().filter(|e| e.score.is_some_and(|s| s.divergent)).count();

    let matrix_text = || -> Result<String> {
        let mut header = vec!["forecast\\truth".to_string()];
        header.extend(report.labels.iter().cloned());
        let rows: Vec<Vec<String>> = report
            .matrix
            .iter()
            .zip(&report.labels)
            .map(|(row, label)| {
                let mut r = vec![label.clone()];
                r.extend(row.iter().map(|e| e.value().map_or_else(|| "error".to_string(), num)));
                r
            })
            .collect();
        csv_string(&header, &rows)
    };
    if let Some(p) = matrix_csv {
        emit(Some(p), &matrix_text()?)?;
    }
    eprintln!(
        "proper={} worst_margin={} inconclusive_columns={}",
        report.proper,
        num(report.worst_margin),
        report.inconclusive_columns.len()
    );
    let text = match c.format {
        Format::Csv => matrix_text()?,
        Format::Json => {
            let mut out = json!({ "config": config_echo(c, cfg), "report": report });
            if matches!(rule, RuleSpec::STilde { .. }) {
                let witnesses: Vec<Value> = grid
                    .members
                    .iter()
                    .zip(&report.labels)
                    .enumerate()
                    .map(|(j, (g, label))| match find_violation(&rule, g, cfg) {
                        Ok(Some(w)) => json!({
                            "truth": j,
                            "label": label,
                            "challenger": format!("tilde_star({label}, alpha={})", num(rule.alpha().unwrap_or(f64::NAN))),
                            "truthful_score": w.truthful_score,
                            "challenger_score": w.challenger_score,
                            "margin": jnum(w.margin),
                            "violation": w.margin > tolerance,
                        }),
                        Ok(None) => json!({ "truth": j, "label": label, "inconclusive": true }),
                        Err(e) => json!({ "truth": j, "label": label, "error": e.to_string() }),
                    })
                    .collect();
                out["witnesses"] = Value::Array(witnesses);
            }
            json_string(&out)?
        }
    };
    emit(c.output.as_deref(), &text)?;
    Ok(Outcome { diverged })
}

fn cmd_entropy(c: &Common, cfg: &QuadConfig, dist: &str) -> Result<Outcome> {
    let (kind, v) = match input::any_distribution(dist)? {
        AnyDistribution::Discrete(d) => ("shannon_bits", ScoreValue::exact(shannon_entropy(&d))),
        AnyDistribution::Real(d) => {
            let w = input::weight(c.weight.as_deref())?.unwrap_or_default();
            ("s_tilde_entropy", entropy_s_tilde(&d, &w, cfg)?)
        }
    };
    let text = match c.format {
        Format::Csv => {
            let header = ["kind", "value", "error_estimate", "converged", "divergent"].map(String::from);
            let mut row = vec![kind.to_string()];
            row.extend(score_fields(&v));
            csv_string(&header, &[row])?
        }
        Format::Json => json_string(&json!({
            "kind": kind,
            "config": config_echo(c, cfg),
            "value": jnum(v.value),
            "error_estimate": jnum(v.error_estimate),
            "converged": v.converged,
            "divergent": v.divergent,
        }))?,
    };
    emit(c.output.as_deref(), &text)?;
    Ok(Outcome { diverged: usize::from(v.divergent) })
}
