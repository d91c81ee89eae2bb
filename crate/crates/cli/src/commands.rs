use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use lowrank_scatter::contrast::ContrastSpec;
use lowrank_scatter::far_field::{add_noise, synthesize_born, FarFieldMatrix};
use lowrank_scatter::io::{default_range, read_farfield, write_coefficients, write_farfield, write_grid_csv, write_pgm};
use lowrank_scatter::pswf::PswfBasis;
use lowrank_scatter::reconstruction::{relative_l2_error, truth_coefficients, Pipeline, RunOutput, Truth};
use lowrank_scatter::Error;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{CommandKind, RunConfig, Summary, SweepAxis};

pub const EXIT_ARGUMENT: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn argument(message: impl Into<String>) -> Self {
        Self { code: EXIT_ARGUMENT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Numerical(_) => EXIT_NUMERICAL,
            Error::Argument(_) | Error::Domain(..) | Error::Io(_) => EXIT_ARGUMENT,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Relative errors against the analytic truth and its projection.
type Scores = (Option<f64>, Option<f64>);

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::argument(format!("{}: {e}", path.display()))
}

/// Creates `dir/name`, runs `body` on it and records the name in `files`.
fn emit<F>(dir: &Path, name: &str, files: &mut Vec<String>, body: F) -> Outcome<()>
where
    F: FnOnce(&mut BufWriter<File>) -> lowrank_scatter::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| match e {
        Error::Io(io) => io_failure(&path, io),
        other => other.into(),
    })?;
    w.flush().map_err(|e| io_failure(&path, e))?;
    files.push(name.to_string());
    Ok(())
}

fn prepare_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn write_summary(dir: &Path, summary: &mut Summary) -> Outcome<()> {
    summary.files.push("summary.json".into());
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary).map_err(|e| Failure::argument(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))
}

pub fn run(config: &RunConfig) -> Outcome<()> {
    match config.command {
        CommandKind::Eig => eig(config),
        CommandKind::Synth => synth(config),
        CommandKind::Reconstruct => reconstruct(config),
        CommandKind::Sweep => sweep(config),
    }
}

fn eig(config: &RunConfig) -> Outcome<()> {
    let c = config.c.ok_or_else(|| Failure::argument("eig needs --c"))?;
    let basis = match config.overrides.max_order {
        Some(n) => PswfBasis::assemble(c, n)?,
        None => PswfBasis::with_default_order(c)?,
    };
    if config.decay_step == 0 {
        return Err(Failure::argument("--decay-step must be positive"));
    }
    prepare_dir(&config.out)?;
    let mut summary = Summary::new(config);
    emit(&config.out, "eigenvalues.csv", &mut summary.files, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["m", "n", "chi", "lambda"]).map_err(csv_err)?;
        for order in &basis.orders {
            for n in 0..order.retained() {
                out.serialize((order.m, n, order.chi[n], order.lambda(n))).map_err(csv_err)?;
            }
        }
        Ok(out.flush()?)
    })?;
    let lambda00 = basis.lambda(0, 0)?;
    emit(&config.out, "decay.csv", &mut summary.files, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["m", "n", "lambda", "lambda_over_lambda00"]).map_err(csv_err)?;
        for order in basis.orders.iter().step_by(config.decay_step) {
            for n in 0..order.retained() {
                let l = order.lambda(n);
                out.serialize((order.m, n, l, l / lambda00)).map_err(csv_err)?;
            }
        }
        Ok(out.flush()?)
    })?;
    summary.resolved = json!({
        "c": c,
        "max_order": basis.max_order,
        "indices": basis.all_indices().len(),
        "lambda00": lambda00,
        "hilbert_schmidt_sum": basis.hilbert_schmidt_sum(),
    });
    write_summary(&config.out, &mut summary)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numerical(format!("{other:?}")),
    }
}

fn wave_number(config: &RunConfig) -> Outcome<f64> {
    let k = config.k.unwrap_or(15.0);
    if !(k.is_finite() && k > 0.0) {
        return Err(Failure::argument(format!("--k must be positive, got {k}")));
    }
    Ok(k)
}

fn contrast(config: &RunConfig) -> Outcome<&ContrastSpec> {
    let spec = config.contrast.as_ref().ok_or_else(|| Failure::argument("--contrast is required"))?;
    spec.validate()?;
    Ok(spec)
}

/// Noisy Born data for `config`, using `basis` for PSWF-mode contrasts.
fn synthesize(config: &RunConfig, k: f64, basis: Option<&PswfBasis>) -> Outcome<FarFieldMatrix> {
    let spec = contrast(config)?;
    let clean = synthesize_born(spec, k, config.n1, config.n2, basis.filter(|_| spec.needs_basis()))?;
    Ok(add_noise(&clean, config.delta, config.seed)?)
}

fn synth(config: &RunConfig) -> Outcome<()> {
    let k = wave_number(config)?;
    let spec = contrast(config)?;
    let basis = if spec.needs_basis() { Some(basis_for(config, 2.0 * k)?) } else { None };
    let f = synthesize(config, k, basis.as_deref())?;
    prepare_dir(&config.out)?;
    let mut summary = Summary::new(config);
    emit(&config.out, "farfield.csv", &mut summary.files, |w| write_farfield(w, &f))?;
    summary.resolved = json!({
        "k": k,
        "c": f.c(),
        "n1": f.n1,
        "n2": f.n2,
        "delta": config.delta,
        "seed": config.seed,
    });
    write_summary(&config.out, &mut summary)
}

fn basis_for(config: &RunConfig, c: f64) -> Outcome<Arc<PswfBasis>> {
    Ok(Pipeline::new(c, config.overrides.max_order)?.basis)
}

fn load_farfield(path: &Path) -> Outcome<FarFieldMatrix> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    read_farfield(BufReader::new(file)).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn reconstruct(config: &RunConfig) -> Outcome<()> {
    let (f, pipeline) = match &config.input_farfield {
        Some(path) => {
            let f = load_farfield(path)?;
            if let Some(k) = config.k {
                if k != f.k {
                    return Err(Failure::argument(format!("--k {k} disagrees with k = {} in {}", f.k, path.display())));
                }
            }
            let pipeline = Pipeline::new(f.c(), config.overrides.max_order)?;
            (f, pipeline)
        }
        None => {
            let k = wave_number(config)?;
            let pipeline = Pipeline::new(2.0 * k, config.overrides.max_order)?;
            (synthesize(config, k, Some(&pipeline.basis))?, pipeline)
        }
    };
    prepare_dir(&config.out)?;
    let mut summary = Summary::new(config);
    let out = pipeline.reconstruct(&f, config.resolved_mode(), config.delta, &config.overrides)?;
    write_run(config, &config.out, &f, &pipeline, &out, &mut summary)?;
    write_summary(&config.out, &mut summary)
}

/// Relative errors against the analytic contrast and its projection onto the
/// retained indices; `None` without a known contrast.
fn score(config: &RunConfig, pipeline: &Pipeline, out: &RunOutput) -> Outcome<Scores> {
    let Some(spec) = &config.contrast else { return Ok((None, None)) };
    let analytic = match relative_l2_error(&out.reconstruction, Truth::Spec(spec)) {
        Ok(e) => Some(e),
        Err(Error::Argument(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let truth = truth_coefficients(spec, &pipeline.basis, &out.plan.cutoff)?;
    let projected = if truth.l2_norm() > 0.0 {
        Some(relative_l2_error(&out.reconstruction, Truth::Coefficients(&truth))?)
    } else {
        None
    };
    Ok((analytic, projected))
}

fn write_run(
    config: &RunConfig,
    dir: &Path,
    f: &FarFieldMatrix,
    pipeline: &Pipeline,
    out: &RunOutput,
    summary: &mut Summary,
) -> Outcome<()> {
    let rec = &out.reconstruction;
    if config.grid == 0 {
        return Err(Failure::argument("--grid must be positive"));
    }
    emit(dir, "coefficients.csv", &mut summary.files, |w| {
        write_coefficients(w, &out.data_coefficients, &rec.coefficients, &pipeline.basis)
    })?;
    let grid = rec.evaluate_grid(config.grid)?;
    emit(dir, "grid.csv", &mut summary.files, |w| write_grid_csv(w, &grid))?;
    let range = default_range(&grid);
    emit(dir, "reconstruction.pgm", &mut summary.files, |w| write_pgm(w, &grid, range))?;
    let (analytic, projected) = score(config, pipeline, out)?;
    let lambda00 = pipeline.basis.lambda(0, 0)?;
    summary.resolved = json!({
        "c": f.c(),
        "k": f.k,
        "n1": f.n1,
        "n2": f.n2,
        "mode": config.resolved_mode(),
        "delta": config.delta,
        "seed": config.seed,
        "max_order": pipeline.basis.max_order,
        "T": out.plan.t(),
        "M": out.plan.m(),
        "epsilon": out.plan.epsilon,
        "epsilon_over_lambda00": out.plan.epsilon / lambda00,
        "cutoff_size": out.plan.cutoff.len(),
        "grid": config.grid,
        "image_range": [range.0, range.1],
    });
    summary.metrics = json!({
        "relative_l2_error": analytic,
        "relative_l2_error_projected": projected,
        "coefficient_norm": rec.coefficients.l2_norm(),
        "imaginary_fraction": out.plan.quadrature.as_ref().map(|q| rec.imaginary_fraction(q)),
        "mock_max_distance": out.mock_max_distance,
    });
    summary.warnings.extend(out.warnings.iter().cloned());
    Ok(())
}

struct SweepRow {
    value: f64,
    c: f64,
    n: (usize, usize),
    delta: f64,
    t: usize,
    m: usize,
    epsilon: f64,
    cutoff_size: usize,
    error: Option<f64>,
    projected: Option<f64>,
}

fn sweep(config: &RunConfig) -> Outcome<()> {
    let sweep = config.sweep.as_ref().ok_or_else(|| Failure::argument("sweep needs --axis and --values"))?;
    if sweep.values.len() < 2 {
        return Err(Failure::argument("a sweep needs at least two values"));
    }
    if sweep.seeds == 0 {
        return Err(Failure::argument("--seeds must be positive"));
    }
    if config.input_farfield.is_some() {
        return Err(Failure::argument("sweeps synthesize their own data; drop --input-farfield"));
    }
    contrast(config)?;
    let runs: Vec<RunConfig> = sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut run = config.clone();
            run.command = CommandKind::Reconstruct;
            run.sweep = None;
            run.out = config.out.join(format!("{}-{i}", axis_name(sweep.axis)));
            match sweep.axis {
                SweepAxis::K => run.k = Some(v),
                SweepAxis::Delta => run.delta = v,
                SweepAxis::N => {
                    if !(v >= 1.0 && v.fract() == 0.0) {
                        return Err(Failure::argument(format!("N values must be positive integers, got {v}")));
                    }
                    run.n1 = v as usize;
                    run.n2 = v as usize;
                }
            }
            Ok(run)
        })
        .collect::<Outcome<_>>()?;
    prepare_dir(&config.out)?;
    // the basis depends only on k, so other axes share one
    let shared = match sweep.axis {
        SweepAxis::K => None,
        _ => Some(Pipeline::new(2.0 * wave_number(config)?, config.overrides.max_order)?),
    };
    let rows = runs
        .par_iter()
        .zip(&sweep.values)
        .map(|(run, &value)| {
            let own;
            let pipeline = match &shared {
                Some(p) => p,
                None => {
                    own = Pipeline::new(2.0 * wave_number(run)?, run.overrides.max_order)?;
                    &own
                }
            };
            sweep_point(run, value, sweep.seeds, pipeline)
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut summary = Summary::new(config);
    emit(&config.out, "errors.csv", &mut summary.files, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "axis",
            "value",
            "c",
            "n1",
            "n2",
            "delta",
            "T",
            "M",
            "epsilon",
            "cutoff_size",
            "mean_relative_l2_error",
            "mean_relative_l2_error_projected",
        ])
        .map_err(csv_err)?;
        for r in &rows {
            out.serialize((
                axis_name(sweep.axis),
                r.value,
                r.c, r.n.0, r.n.1, r.delta, r.t, r.m, r.epsilon, r.cutoff_size, r.error, r.projected,
            ))
            .map_err(csv_err)?;
        }
        Ok(out.flush()?)
    })?;
    summary.files.extend(runs.iter().map(|r| format!("{}/", r.out.strip_prefix(&config.out).unwrap().display())));
    summary.resolved = json!({
        "axis": sweep.axis,
        "values": sweep.values,
        "seeds": (config.seed..config.seed + sweep.seeds).collect::<Vec<_>>(),
    });
    summary.metrics = json!({
        "mean_relative_l2_error": rows.iter().map(|r| r.error).collect::<Vec<_>>(),
        "mean_relative_l2_error_projected": rows.iter().map(|r| r.projected).collect::<Vec<_>>(),
    });
    write_summary(&config.out, &mut summary)
}

fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::K => "k",
        SweepAxis::Delta => "delta",
        SweepAxis::N => "N",
    }
}

/// Averages errors over the seed block and writes the first realization's
/// reconstruction into `run.out`.
fn sweep_point(run: &RunConfig, value: f64, seeds: u64, pipeline: &Pipeline) -> Outcome<SweepRow> {
    let k = wave_number(run)?;
    let spec = contrast(run)?;
    let clean = synthesize_born(spec, k, run.n1, run.n2, spec.needs_basis().then_some(&*pipeline.basis))?;
    let mode = run.resolved_mode();
    let mut errors = Vec::new();
    let mut first = None;
    for seed in run.seed..run.seed + seeds {
        let f = add_noise(&clean, run.delta, seed)?;
        let out = pipeline.reconstruct(&f, mode, run.delta, &run.overrides)?;
        let cfg = RunConfig { seed, ..run.clone() };
        errors.push(score(&cfg, pipeline, &out)?);
        first.get_or_insert((f, out));
    }
    let (f, out) = first.expect("at least one seed");
    prepare_dir(&run.out)?;
    let mut summary = Summary::new(run);
    write_run(run, &run.out, &f, pipeline, &out, &mut summary)?;
    write_summary(&run.out, &mut summary)?;
    let mean = |pick: fn(&Scores) -> Option<f64>| -> Option<f64> {
        let v: Option<Vec<f64>> = errors.iter().map(pick).collect();
        v.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    };
    Ok(SweepRow {
        value,
        c: f.c(),
        n: (f.n1, f.n2),
        delta: run.delta,
        t: out.plan.t(),
        m: out.plan.m(),
        epsilon: out.plan.epsilon,
        cutoff_size: out.plan.cutoff.len(),
        error: mean(|e| e.0),
        projected: mean(|e| e.1),
    })
}
