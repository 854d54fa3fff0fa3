use std::io::Write;
use std::process::ExitCode;

use baskakov_core::analytic::parse_function;
use baskakov_core::engine::{format_float, order_estimate, OrderEstimate};
use baskakov_core::ratpoly::parse_rational;
use baskakov_core::suites::{run_suite, Suite, SuiteGrid, BOUND_SLACK};
use baskakov_core::{generate_t, AnalyticFunction, ApproxEngine, Error, SamplingConfig};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, TableFormat};
use crate::grid::{parse_grid, parse_real_list};
use crate::{CliError, MomentFormat, MomentsArgs, SuiteArg, VerifyArgs};

fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Runtime(format!("writing output: {e}")))
}

pub fn moments(args: &MomentsArgs) -> Result<ExitCode, CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("requires n >= 1; got 0".into()));
    }
    let table = generate_t(args.n, args.k)?;
    let text = match args.format {
        MomentFormat::Json => format!("{}\n", table.to_json()),
        MomentFormat::Exact | MomentFormat::Dec => {
            let mut s = String::new();
            for (k, t) in table.polys().iter().enumerate() {
                let body = if args.format == MomentFormat::Exact {
                    t.to_string()
                } else {
                    t.to_decimal_string()
                };
                s.push_str(&format!("{k}: {body}\n"));
            }
            s
        }
    };
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let ints = |s: &Option<String>| s.as_deref().map(parse_grid).transpose().map_err(CliError::Usage);
    let reals = |s: &Option<String>| s.as_deref().map(parse_real_list).transpose().map_err(CliError::Usage);
    let grid = SuiteGrid {
        n: ints(&args.n)?,
        k: ints(&args.k)?.map(|k| k.into_iter().map(|k| k as usize).collect()),
        r: reals(&args.r)?,
        rho: reals(&args.rho)?,
    };
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::LemmaBound => vec![Suite::LemmaBound],
        SuiteArg::Remainder => vec![Suite::Remainder],
        SuiteArg::BasisIdentity => vec![Suite::BasisIdentity],
        SuiteArg::Oracle => vec![Suite::Oracle],
        SuiteArg::TailInequality => vec![Suite::TailInequality],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let sampling = SamplingConfig::default();
    let mut failed_total = 0;
    let mut text = String::new();
    for suite in suites {
        let cases = run_suite(suite, &grid, &sampling)?;
        let failed = cases.iter().filter(|c| !c.passed).count();
        for c in cases.iter().filter(|c| !args.failures_only || !c.passed) {
            text.push_str(&format!("{c}\n"));
        }
        let verdict = if failed == 0 { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{verdict} {}: {} cases, {failed} failed\n",
            suite.name(),
            cases.len()
        ));
        failed_total += failed;
    }
    write_stdout(&text)?;
    Ok(if failed_total == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_function(cfg: &ExperimentConfig) -> Result<AnalyticFunction, CliError> {
    let rate = parse_rational(&cfg.poly_rate)?;
    Ok(parse_function(&cfg.function, &rate)?)
}

/// Summary entries, kept in insertion order for the text rendering.
struct Summary(Vec<(&'static str, Value, String)>);

impl Summary {
    fn push(&mut self, key: &'static str, value: Value, text: String) {
        self.0.push((key, value, text));
    }

    fn order(&mut self, fit: Result<OrderEstimate, Error>, what: &'static str) {
        match fit {
            Ok(OrderEstimate::Fit {
                slope,
                r_squared,
                points,
            }) => self.push(
                what,
                json!({"slope": slope, "r_squared": r_squared, "points": points}),
                format!(
                    "{} (r^2 = {}, {points} points)",
                    format_float(slope),
                    format_float(r_squared)
                ),
            ),
            Ok(OrderEstimate::ExactReproduction) => self.push(
                what,
                json!("exact_reproduction"),
                "exact reproduction: an error vanishes identically, slope undefined".into(),
            ),
            Err(e) => self.push(what, Value::Null, format!("unavailable ({e})")),
        }
    }

    fn verdict(&mut self, pass: bool, relation: &str) {
        let v = if pass { "PASS" } else { "FAIL" };
        self.push("verdict", json!(v), format!("{v} ({relation} for every n)"));
    }

    fn lines(&self) -> String {
        self.0.iter().map(|(k, _, t)| format!("# {k}: {t}\n")).collect()
    }

    fn value(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v, _)| (k.to_string(), v.clone())).collect())
    }
}

fn emit(
    cfg: &ExperimentConfig,
    csv: String,
    plot: String,
    table_json: Value,
    summary: &Summary,
) -> Result<(), CliError> {
    let body = match cfg.format {
        TableFormat::Csv => csv,
        TableFormat::Plot => plot,
        TableFormat::Json => {
            let mut doc = table_json;
            if let Some(obj) = doc.as_object_mut() {
                obj.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
                obj.insert("summary".into(), summary.value());
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json serializes"))
        }
    };
    let trailer = if cfg.format == TableFormat::Json {
        String::new()
    } else {
        summary.lines()
    };
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
            write_stdout(&summary.lines())
        }
        None => write_stdout(&format!(
            "{body}{}{trailer}",
            if trailer.is_empty() { "" } else { "\n" }
        )),
    }
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + BOUND_SLACK)
}

pub fn converge(cfg: &ExperimentConfig) -> Result<ExitCode, CliError> {
    let f = load_function(cfg)?;
    let engine = ApproxEngine::new(cfg.engine.clone());
    let table = engine.convergence_study(&f, cfg.r, &cfg.n)?;
    let mut summary = Summary(Vec::new());
    summary.order(
        order_estimate(&table.error_points(), cfg.exclude_preasymptotic.then_some(cfg.r)),
        "slope",
    );
    let n_max = table.rows.last().map(|r| r.n).unwrap_or(0);
    match engine.limit_check(&f, n_max, cfg.r) {
        Ok(lc) => summary.push(
            "limit_ratio",
            json!({"n": n_max, "ratio": lc.ratio, "limit_norm": lc.limit_norm}),
            format!(
                "{} at n = {n_max} (limit norm {})",
                format_float(lc.ratio),
                format_float(lc.limit_norm)
            ),
        ),
        Err(Error::Degenerate(msg)) => summary.push("limit_ratio", Value::Null, format!("not applicable ({msg})")),
        Err(e) => return Err(e.into()),
    }
    let pass = table.rows.iter().all(|r| within(r.sup_error, r.bound_thm1));
    summary.verdict(pass, "sup_error <= C1/n");
    let json = serde_json::to_value(&table).expect("table serializes");
    emit(cfg, table.to_csv(), table.to_plot(), json, &summary)?;
    Ok(ExitCode::SUCCESS)
}

pub fn voronovskaja(cfg: &ExperimentConfig) -> Result<ExitCode, CliError> {
    let f = load_function(cfg)?;
    let v = f.envelope().a() * (cfg.r + 1.0);
    if !(v < 1.0) {
        return Err(CliError::Usage(format!("requires A(r+1) < 1; got {v}")));
    }
    let engine = ApproxEngine::new(cfg.engine.clone());
    let table = engine.convergence_study(&f, cfg.r, &cfg.n)?;
    let c2 = table.meta.c2.unwrap_or(f64::NAN);
    let mut summary = Summary(Vec::new());
    summary.push("C2", json!(c2), format_float(c2));
    summary.order(order_estimate(&table.residual_points(), None), "residual_slope");
    let pass = table.rows.iter().all(|r| within(r.n2_resid, c2));
    summary.verdict(pass, "n^2 * resid <= C2");
    let json = serde_json::to_value(&table).expect("table serializes");
    emit(cfg, table.to_csv(), table.to_plot(), json, &summary)?;
    Ok(ExitCode::SUCCESS)
}

pub fn derivative(cfg: &ExperimentConfig) -> Result<ExitCode, CliError> {
    let f = load_function(cfg)?;
    let engine = ApproxEngine::new(cfg.engine.clone());
    let table = engine.derivative_study(&f, cfg.p, cfg.r, cfg.r1, &cfg.n)?;
    let cderiv = table.meta.cderiv.unwrap_or(f64::NAN);
    let mut summary = Summary(Vec::new());
    summary.push("Cderiv", json!(cderiv), format_float(cderiv));
    summary.order(
        order_estimate(&table.error_points(), cfg.exclude_preasymptotic.then_some(cfg.r)),
        "slope",
    );
    let pass = table.rows.iter().all(|r| within(r.deriv_error, r.bound));
    summary.verdict(pass, "deriv_error <= Cderiv/n");
    let json = serde_json::to_value(&table).expect("table serializes");
    emit(cfg, table.to_csv(), table.to_plot(), json, &summary)?;
    Ok(ExitCode::SUCCESS)
}
