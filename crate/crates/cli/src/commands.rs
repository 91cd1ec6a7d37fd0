//! The five subcommands. Every artifact lands inside the configured output
//! directory, and identical (config, seed) pairs produce byte-identical
//! files.

use crate::config::RunConfig;
use crate::CliError;
use anyhow::Context;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stit_core::mixing::tail::birth_chain_tail;
use stit_core::mixing::{
    beta_upper_bound, beta_upper_bound_raw, beta_upper_bound_simplified, decay_experiment,
    summarize, BetaBoundInputs,
};
use stit_core::rng::{labels, Streams};
use stit_core::snapshot::{render_svg, Snapshot};
use stit_core::stit::simulate as run_process;
use stit_core::verify::{run_battery, CheckKind, VerifyConfig};
use stit_core::{SeparatingFamily, Window};

/// Resolves an artifact path inside the output directory, creating the
/// directory on first use. No command writes anywhere else.
fn artifact(cfg: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&cfg.output_dir).with_context(|| {
        format!("creating output directory {}", cfg.output_dir.display())
    })?;
    Ok(cfg.output_dir.join(name))
}

fn write_artifact(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn simulate(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let measure = cfg.build_measure()?;
    let window = Window::new(cfg.window.inner_half, measure.dim())?;
    let streams = Streams::new(cfg.seed);
    let mut rng = streams.stream(labels::SIMULATE, 0);
    let state = run_process(&measure, &window, cfg.time.t, &mut rng)?;
    let snap = Snapshot::from_state(&state, Some(cfg.seed));

    let json_path = artifact(cfg, &format!("{}.json", cfg.experiment))?;
    write_artifact(&json_path, snap.to_json().as_bytes())?;
    let mut rendered = String::new();
    if measure.dim() == 2 {
        let svg_path = artifact(cfg, &format!("{}.svg", cfg.experiment))?;
        write_artifact(&svg_path, render_svg(&snap)?.as_bytes())?;
        rendered = format!(", render {}", svg_path.display());
    }
    println!(
        "simulate: {} cells after {} divisions at t = {} (seed {}); snapshot {}{}",
        state.live_count(),
        state.jump_count(),
        cfg.time.t,
        cfg.seed,
        json_path.display(),
        rendered,
    );
    Ok(ExitCode::SUCCESS)
}

pub fn bound(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let measure = cfg.build_measure()?;
    let dim = measure.dim();
    let a = cfg.window.inner_half;
    let t = cfg.time.t;
    let lambda_inner = measure.lambda_hit(&Window::new(a, dim)?.to_polytope());

    let path = artifact(cfg, &format!("{}_bounds.csv", cfg.experiment))?;
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    w.write_record([
        "b",
        "u",
        "v",
        "s",
        "m_cap",
        "p_tail",
        "lambda_inner",
        "big_l",
        "bound_raw",
        "bound",
        "bound_simplified",
    ])
    .context("writing CSV header")?;

    let mut rows = 0usize;
    for b in cfg.b_grid() {
        let family = SeparatingFamily::new(a, b, dim)?;
        let big_l = family.min_class_measure(&measure)?;
        for &u in &cfg.mixing.u_grid {
            for &v in &cfg.mixing.v_grid {
                let s = b.powf(-u);
                if s >= t {
                    continue; // horizon would exceed the observation time
                }
                let m_cap = b.powf(v);
                // Tail of the division rate: either the configured constant
                // or the analytic birth-chain bound at the cap.
                let p_tail = cfg.bound.p_tail.unwrap_or_else(|| {
                    birth_chain_tail(lambda_inner, t, m_cap / lambda_inner)
                });
                let inputs = BetaBoundInputs {
                    s,
                    m_cap,
                    p_tail,
                    lambda_inner,
                    big_l,
                    classes: family.class_count(),
                };
                inputs.validate()?;
                w.write_record([
                    b.to_string(),
                    u.to_string(),
                    v.to_string(),
                    s.to_string(),
                    m_cap.to_string(),
                    p_tail.to_string(),
                    lambda_inner.to_string(),
                    big_l.to_string(),
                    beta_upper_bound_raw(&inputs).to_string(),
                    beta_upper_bound(&inputs).to_string(),
                    beta_upper_bound_simplified(&inputs).to_string(),
                ])
                .context("writing CSV row")?;
                rows += 1;
            }
        }
    }
    w.flush().context("flushing CSV")?;
    if rows == 0 {
        return Err(CliError::Config(
            "no grid point satisfies s = b^{-u} < t; lower u or raise time.t".into(),
        ));
    }
    println!("bound: {rows} grid rows -> {}", path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn estimate_beta(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let measure = cfg.build_measure()?;
    if measure.dim() != 2 {
        return Err(CliError::Config(
            "estimate-beta requires a planar (dimension 2) measure".into(),
        ));
    }
    let decay_cfg = cfg.decay_config();
    let streams = Streams::new(cfg.seed);
    let points = decay_experiment(&measure, &decay_cfg, &streams)?;
    let summary = summarize(&points);

    let path = artifact(cfg, &format!("{}_decay.csv", cfg.experiment))?;
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    w.write_record(["b", "estimator", "value", "stderr"])
        .context("writing CSV header")?;
    for p in &points {
        for (name, value, stderr) in [
            ("beta_hat", p.beta.value, p.beta.stderr),
            ("bound", p.bound, 0.0),
            ("bound_raw", p.bound_raw, 0.0),
        ] {
            w.write_record([
                p.b.to_string(),
                name.to_string(),
                value.to_string(),
                stderr.to_string(),
            ])
            .context("writing CSV row")?;
        }
    }
    w.flush().context("flushing CSV")?;

    println!(
        "estimate-beta: {} scales -> {}",
        points.len(),
        path.display()
    );
    for p in &points {
        println!(
            "  b = {:>7.2}: beta_hat = {:.5} ± {:.5}, bound = {:.5} (raw {:.3}, s = {:.4}, M = {:.2}, p_tail = {:.3})",
            p.b, p.beta.value, p.beta.stderr, p.bound, p.bound_raw, p.s_opt, p.m_opt, p.p_tail_opt
        );
    }
    if points.len() >= 2 {
        println!(
            "  summary: bound slope {:.3}, beta slope {:.3}, beta-vs-b Spearman {:.3}, bound non-increasing: {}",
            summary.bound_slope, summary.beta_slope, summary.beta_spearman, summary.bound_monotone
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let vc = VerifyConfig {
        seed: cfg.seed,
        replicates: cfg.replicates,
    };
    let results = run_battery(&vc);
    let mut failures = 0usize;
    for r in &results {
        let kind = match r.kind {
            CheckKind::Hard => "HARD",
            CheckKind::Soft => "SOFT",
        };
        let status = if r.skipped {
            "SKIP"
        } else if r.passed {
            "PASS"
        } else {
            failures += 1;
            "FAIL"
        };
        let stat = r
            .statistic
            .map(|s| format!(" stat={s:.4}"))
            .unwrap_or_default();
        let pv = r
            .p_value
            .map(|p| format!(" p={p:.4}"))
            .unwrap_or_default();
        println!("{status} [{kind}] {}{stat}{pv} — {}", r.name, r.detail);
    }
    println!(
        "verify: {} checks, {} failed, seed {}, N = {}",
        results.len(),
        failures,
        cfg.seed,
        vc.replicates
    );
    if failures > 0 {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

pub fn render(cfg: &RunConfig, input: &Path, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading snapshot {}", input.display()))?;
    let snap = Snapshot::from_json(&text)?;
    let svg = render_svg(&snap)?;
    // --out names the file directly; otherwise render next to nothing
    // outside the output directory, deriving the name from the input.
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "snapshot".into());
            artifact(cfg, &format!("{stem}.svg"))?
        }
    };
    write_artifact(&path, svg.as_bytes())?;
    println!(
        "render: {} divisions -> {}",
        snap.jumps.len(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}
