use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::{CliError, OutputFormat, RunConfig, Subcommand};
use crate::activation::ActivationMode;
use crate::density::SymmetrizedDensity;
use crate::moduli;
use crate::operator::NetworkOperator;
use crate::study::{self, linspace};

/// Half-width of the interval on which `density` samples W.
const DENSITY_SAMPLE_SPAN: f64 = 10.0;
const MOMENT_TOL: f64 = 1e-8;
const PARTITION_OFFSETS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// 17 significant digits, '.' decimal point.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn json_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializing a JSON value cannot fail") + "\n"
}

/// Run one subcommand: write its file, return the stdout summary line.
pub fn run_subcommand(command: Subcommand, cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let (contents, summary) = match command {
        Subcommand::Density => density(cfg)?,
        Subcommand::Approx => approx(cfg)?,
        Subcommand::Moduli => moduli_table(cfg)?,
        Subcommand::Converge => converge(cfg)?,
        Subcommand::Stability => stability(cfg)?,
    };
    let path = cfg.output_path(command.name());
    write_output(&path, &contents)?;
    Ok(format!("{summary} -> {}", path.display()))
}

fn density(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let d = SymmetrizedDensity::new(cfg.activation()?);
    let samples: Vec<(f64, f64)> = linspace(-DENSITY_SAMPLE_SPAN, DENSITY_SAMPLE_SPAN, cfg.grid)
        .into_iter()
        .map(|x| (x, d.w(x)))
        .collect();
    let moments = (0..=2)
        .map(|k| d.continuous_moment(k, MOMENT_TOL))
        .collect::<Result<Vec<_>, _>>()?;
    let partition = PARTITION_OFFSETS
        .iter()
        .map(|&u| d.partition_sum(u, cfg.eps).map(|s| (u, s)))
        .collect::<Result<Vec<_>, _>>()?;

    if d.mode() == ActivationMode::Literal {
        eprintln!(
            "warning: literal-mode kernel: ∫W = {:.3e} and Σ_k W(u − k) = {:.3e}; the kernel is odd and \
             its integral and lattice sums vanish instead of equalling 1",
            moments[0].value, partition[0].1
        );
    }

    let contents = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("section,x,value,error_estimate\n");
            for (x, w) in &samples {
                writeln!(s, "sample,{},{},{}", num(*x), num(*w), num(0.0)).unwrap();
            }
            for m in &moments {
                writeln!(s, "moment,{},{},{}", m.order, num(m.value), num(m.quadrature_error_estimate)).unwrap();
            }
            for (u, p) in &partition {
                writeln!(s, "partition,{},{},{}", num(*u), num(*p), num(cfg.eps)).unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(&json!({
            "mode": d.mode().to_string(),
            "samples": samples.iter().map(|(x, w)| json!({"x": x, "w": w})).collect::<Vec<_>>(),
            "moments": moments.iter().map(|m| json!({
                "order": m.order,
                "value": m.value,
                "error_estimate": m.quadrature_error_estimate,
            })).collect::<Vec<_>>(),
            "partition": partition.iter().map(|(u, p)| json!({"u": u, "value": p})).collect::<Vec<_>>(),
        })),
    };
    let summary = format!(
        "density ({}): integral={:.10e} M1={:.3e} M2={:.10}",
        d.mode(),
        moments[0].value,
        moments[1].value,
        moments[2].value
    );
    Ok((contents, summary))
}

fn approx(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let f = cfg.function()?;
    let op = NetworkOperator::new(cfg.operator()?, SymmetrizedDensity::new(cfg.activation()?));
    if !op.is_normalized() {
        eprintln!("warning: literal-mode kernel is not normalized; S_n values do not approximate f");
    }
    let grid = linspace(-cfg.half_width, cfg.half_width, cfg.grid);
    let values = op.apply_grid(&f, &grid)?;
    let rows: Vec<(f64, f64, f64, f64)> = grid
        .iter()
        .zip(&values)
        .map(|(&x, &s)| {
            let fx = f.eval(x);
            (x, fx, s, (s - fx).abs())
        })
        .collect();
    let sup = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let contents = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("x,f,s_n,abs_error\n");
            for (x, fx, sx, e) in &rows {
                writeln!(s, "{},{},{},{}", num(*x), num(*fx), num(*sx), num(*e)).unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(&json!({
            "function": f.to_string(),
            "n": cfg.n,
            "normalized": op.is_normalized(),
            "rows": rows.iter().map(|(x, fx, sx, e)| json!({"x": x, "f": fx, "s_n": sx, "abs_error": e})).collect::<Vec<_>>(),
        })),
    };
    Ok((contents, format!("approx: fn={f} n={} sup_error={sup:.6e}", cfg.n)))
}

fn moduli_table(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let f = cfg.function()?;
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let t = 1.0 / n as f64;
        let step = study::modulus_step(cfg.half_width, t);
        let w1 = moduli::modulus(&f, t, step)?;
        let w2 = moduli::modulus2(&f, t, step)?;
        rows.push((t, w1.value, w2.value, w1.grid_step));
    }
    let contents = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("t,omega,omega2,grid_step\n");
            for (t, w1, w2, h) in &rows {
                writeln!(s, "{},{},{},{}", num(*t), num(*w1), num(*w2), num(*h)).unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(&json!({
            "function": f.to_string(),
            "rows": rows.iter().map(|(t, w1, w2, h)| json!({"t": t, "omega": w1, "omega2": w2, "grid_step": h})).collect::<Vec<_>>(),
        })),
    };
    let last = rows.last().expect("n list is nonempty");
    Ok((
        contents,
        format!("moduli: fn={f} t={:.4e} omega={:.6e} omega2={:.6e}", last.0, last.1, last.2),
    ))
}

fn converge(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let f = cfg.function()?;
    let d = SymmetrizedDensity::new(cfg.activation()?);
    let grid = study::interior_grid(cfg.half_width, cfg.grid);
    let records = study::convergence_sweep(&f, &d, &cfg.operator()?, &cfg.n_list, &grid)?;
    let fit = study::fit_loglog_slope(&records).ok();
    let wall_ms = |r: &study::ConvergenceRecord| if cfg.timing { r.wall_time.as_secs_f64() * 1e3 } else { 0.0 };
    let fit_json = match &fit {
        Some(fit) => json!({"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}),
        None => json!({"slope": null, "intercept": null, "r_squared": null}),
    };
    let contents = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("n,sup_error,omega_bound,omega2_bound,second_moment_scaled,wall_time_ms\n");
            for r in &records {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.n,
                    num(r.sup_error),
                    num(r.omega_bound),
                    num(r.omega2_bound),
                    num(r.second_moment_scaled),
                    num(wall_ms(r))
                )
                .unwrap();
            }
            writeln!(s, "# {}", serde_json::to_string(&fit_json).expect("serializable")).unwrap();
            s
        }
        OutputFormat::Json => json_text(&json!({
            "records": records.iter().map(|r| json!({
                "n": r.n,
                "sup_error": r.sup_error,
                "omega_bound": r.omega_bound,
                "omega2_bound": r.omega2_bound,
                "second_moment_scaled": r.second_moment_scaled,
                "wall_time_ms": wall_ms(r),
            })).collect::<Vec<_>>(),
            "fit": fit_json,
        })),
    };
    let ratio = records
        .iter()
        .filter(|r| r.omega2_bound > 0.0)
        .map(|r| r.sup_error / r.omega2_bound)
        .fold(0.0, f64::max);
    let summary = match fit {
        Some(fit) => format!(
            "converge: fn={f} slope={:.4} r_squared={:.5} max sup_error/omega2={ratio:.4}",
            fit.slope, fit.r_squared
        ),
        None => format!("converge: fn={f} slope unavailable (fewer than 3 positive errors)"),
    };
    Ok((contents, summary))
}

fn stability(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let d = SymmetrizedDensity::new(cfg.activation()?);
    let pairs = study::pwlin_pairs(cfg.pairs, cfg.half_width, cfg.extension)?;
    let grid = linspace(-cfg.half_width, cfg.half_width, cfg.grid);
    let outcomes = study::stability_suite(&d, &cfg.operator()?, &pairs, &grid)?;
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let contents = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("pair,f,g,gap,bound,pass\n");
            for (i, ((f, g), o)) in pairs.iter().zip(&outcomes).enumerate() {
                writeln!(s, "{i},{f},{g},{},{},{}", num(o.gap), num(o.bound), o.pass).unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(&json!({
            "n": cfg.n,
            "pairs": pairs.iter().zip(&outcomes).map(|((f, g), o)| json!({
                "f": f.to_string(), "g": g.to_string(), "gap": o.gap, "bound": o.bound, "pass": o.pass,
            })).collect::<Vec<_>>(),
        })),
    };
    Ok((contents, format!("stability: {passed}/{} pass", outcomes.len())))
}
