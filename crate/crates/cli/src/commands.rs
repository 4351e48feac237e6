use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use uqscore_core::active::{make_epistemic_gap_with, GapConfig};
use uqscore_core::verify::{self, Fault, Suite, VerifyOptions};
use uqscore_core::{
    run_active_learning, run_ood, run_selective_prediction, AcquisitionStrategy, Component,
    DataSplit, SecondOrderSample,
};

use crate::config::{Settings, Task};
use crate::error::{CliError, Result};
use crate::io::{format_real, parse_predictions, JsonLine, PredictionRecord};

/// Offset added by the hidden fault-injection hook.
const FAULT_DELTA: f64 = 1e-6;

pub fn run(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    match settings.task {
        Task::Decompose => decompose(settings, out),
        Task::Selective => selective(settings, out),
        Task::Ood => ood(settings, out),
        Task::Active => active(settings, out),
        Task::Verify => verify(settings, out),
    }
}

fn load(path: Option<&Path>, flag: &str, renormalize: bool) -> Result<Vec<PredictionRecord>> {
    let path = path.ok_or_else(|| CliError::Usage(format!("{flag} is required")))?;
    let records = parse_predictions(path, renormalize)?;
    if records.is_empty() {
        return Err(CliError::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    Ok(records)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

/// `--out-dir`, defaulting to the working directory.
fn out_dir(settings: &Settings) -> Result<PathBuf> {
    let dir = settings
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut (dyn Write + Send), lines: &[String]) -> Result<()> {
    let stdout = || PathBuf::from("<stdout>");
    for line in lines {
        writeln!(out, "{line}").map_err(|source| CliError::Output {
            path: stdout(),
            source,
        })?;
    }
    out.flush().map_err(|source| CliError::Output {
        path: stdout(),
        source,
    })
}

fn joined(lines: &[String]) -> String {
    lines.iter().flat_map(|l| [l.as_str(), "\n"]).collect()
}

pub fn decompose(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    let records = load(settings.input.as_deref(), "--input", settings.renormalize)?;
    let lines: Vec<String> = records
        .par_iter()
        .flat_map_iter(|r| {
            settings.rules.iter().map(move |&rule| {
                let t = uqscore_core::decompose(rule, &r.sample);
                JsonLine::new()
                    .str("id", &r.id)
                    .str("rule", rule.name())
                    .real("total", t.total)
                    .real("aleatoric", t.aleatoric)
                    .real("epistemic", t.epistemic)
                    .finish()
            })
        })
        .collect();
    if let Some(dir) = &settings.out_dir {
        ensure_dir(dir)?;
        write_file(&dir.join("decompose.jsonl"), &joined(&lines))?;
    }
    emit(out, &lines)
}

pub fn selective(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    let records = load(settings.input.as_deref(), "--input", settings.renormalize)?;
    let predictions = records
        .iter()
        .map(|r| match r.class_index() {
            Some(y) => Ok((r.sample.clone(), y)),
            None => Err(CliError::MissingLabels {
                id: r.id.clone(),
                line: r.line,
            }),
        })
        .collect::<Result<Vec<(SecondOrderSample, usize)>>>()?;
    let component = settings.component_or(Component::Total);
    let dir = out_dir(settings)?;
    let n = predictions.len();

    let mut summary = Vec::with_capacity(settings.rules.len());
    for &rule in &settings.rules {
        let result = run_selective_prediction(
            &predictions,
            settings.task_rule,
            rule,
            component,
            settings.direction,
        )?;
        let name = format!("selective_{}_{}_curve.csv", rule.name(), component.name());
        let mut csv = String::from("retained_k,coverage,mean_loss\n");
        for p in &result.curve {
            csv.push_str(&format!(
                "{},{},{}\n",
                p.retained,
                format_real(p.coverage(n)),
                format_real(p.mean_loss)
            ));
        }
        write_file(&dir.join(&name), &csv)?;
        summary.push(
            JsonLine::new()
                .str("rule", rule.name())
                .str("component", component.name())
                .str("direction", &settings.direction.to_string())
                .str("task_rule", settings.task_rule.name())
                .int("n", n as u64)
                .real("aulc", result.aulc)
                .str("curve", &name)
                .finish(),
        );
    }
    write_file(&dir.join("selective_summary.jsonl"), &joined(&summary))?;
    emit(out, &summary)
}

pub fn ood(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    let id = load(settings.input.as_deref(), "--input", settings.renormalize)?;
    let ood = load(
        settings.input_ood.as_deref(),
        "--input-ood",
        settings.renormalize,
    )?;
    let id: Vec<SecondOrderSample> = id.into_iter().map(|r| r.sample).collect();
    let ood: Vec<SecondOrderSample> = ood.into_iter().map(|r| r.sample).collect();
    let component = settings.component_or(Component::Epistemic);

    let lines = settings
        .rules
        .iter()
        .map(|&rule| {
            let r = run_ood(&id, &ood, rule, component)?;
            Ok(JsonLine::new()
                .real("auroc", r.auroc)
                .int("n_id", r.n_id as u64)
                .int("n_ood", r.n_ood as u64)
                .str("rule", rule.name())
                .str("component", component.name())
                .finish())
        })
        .collect::<Result<Vec<String>>>()?;
    if let Some(dir) = &settings.out_dir {
        ensure_dir(dir)?;
        write_file(&dir.join("ood.jsonl"), &joined(&lines))?;
    }
    emit(out, &lines)
}

fn strategies(settings: &Settings) -> Vec<AcquisitionStrategy> {
    let mut list = settings.active.strategies.clone().unwrap_or_else(|| {
        let component = settings.component_or(Component::Epistemic);
        std::iter::once(AcquisitionStrategy::Random)
            .chain(
                settings
                    .rules
                    .iter()
                    .map(|&rule| AcquisitionStrategy::Uncertainty { rule, component }),
            )
            .collect()
    });
    let mut seen = Vec::with_capacity(list.len());
    list.retain(|s| {
        let fresh = !seen.contains(s);
        seen.push(*s);
        fresh
    });
    list
}

pub fn active(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    let seed = settings
        .seed
        .ok_or_else(|| CliError::Usage("--seed is required for `active`".into()))?;
    let a = &settings.active;
    let gap = make_epistemic_gap_with(&GapConfig::new(a.n_labeled, a.n_gap, seed))?;
    let split = DataSplit::from(&gap);
    let dir = out_dir(settings)?;

    let mut summary = Vec::new();
    for strategy in strategies(settings) {
        let trace = run_active_learning(
            &gap.data, &split, &a.learner, strategy, a.rounds, a.batch, seed,
        )?;
        let name = format!("trace_{strategy}.csv");
        let mut csv = String::from("round,labeled_count,test_zero_one_loss\n");
        for r in &trace.rounds {
            csv.push_str(&format!(
                "{},{},{}\n",
                r.round,
                r.labeled_count,
                format_real(r.test_loss)
            ));
        }
        write_file(&dir.join(&name), &csv)?;
        summary.push(
            JsonLine::new()
                .str("strategy", &strategy.to_string())
                .int("seed", seed)
                .int("rounds", a.rounds as u64)
                .int("batch", a.batch as u64)
                .real("final_test_zero_one_loss", trace.final_loss())
                .str("trace", &name)
                .finish(),
        );
    }
    emit(out, &summary)
}

pub fn verify(settings: &Settings, out: &mut (dyn Write + Send)) -> Result<()> {
    let suites = if settings.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        settings.suites.clone()
    };
    let options = VerifyOptions {
        seed: settings.seed.unwrap_or(verify::DEFAULT_SEED),
        fault: settings.fault.map(|rule| Fault::EpistemicOffset {
            rule,
            delta: FAULT_DELTA,
        }),
    };
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for report in verify::run_suites(&suites, &options) {
        let status = if report.passed() { "PASS" } else { "FAIL" };
        lines.push(format!("{status} {}", report.suite));
        for c in &report.checks {
            lines.push(format!(
                "  {} {}: worst {:e} (tolerance {:e}, {} cases)",
                if c.passed() { "ok  " } else { "FAIL" },
                c.name,
                c.worst,
                c.tolerance,
                c.cases
            ));
        }
        if !report.passed() {
            failed.push(report.suite.name());
        }
    }
    emit(out, &lines)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failed.join(", ")))
    }
}
