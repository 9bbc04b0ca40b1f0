use gramheight::charpoly::{
    gen_charpoly_direct, gen_charpoly_subset, quadform_lambda, LambdaWeights,
};
use gramheight::engine::{
    boundedness_report, l2_escape_probe, ratio_series, shifted_ratio_series, EngineConfig,
    RatioSeries, Sampling,
};
use gramheight::family::VectorFamily;
use gramheight::hyperplane::{distance_squared_with, residual_inner_products};
use gramheight::linalg::spd_solve_with;
use gramheight::scalar::dot;
use gramheight::verify::{run_identity_suites, VerifyConfig};
use gramheight::{Rational, Scalar, SymMatrix};

use crate::config::{CommandKind, FamilyKind, Mode, RunConfig};
use crate::error::{exit, CliError, CliResult};
use crate::ingest::ingest_csv;
use crate::output::{write_file, Document, Field, Record};

/// Rendered output, a one-line summary and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub summary: String,
    pub code: i32,
}

/// Exact values print as `p/q`, floats with 17 significant digits.
fn num<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_string()
    } else {
        v.to_decimal_string()
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn list<S: Scalar>(v: &[S]) -> Field {
    Field::List(v.iter().map(num).collect())
}

fn with_value<S: Scalar>(r: Record, v: &S) -> Record {
    let r = r.with("value", v.to_decimal_string());
    match v.exact_parts() {
        Some((n, d)) => r.with("value_num", n).with("value_den", d),
        None => r,
    }
}

pub fn build_family<S: Scalar>(cfg: &RunConfig) -> CliResult<VectorFamily<S>> {
    let spec = cfg
        .family
        .as_ref()
        .ok_or_else(|| CliError::MissingFamily(format!("{} needs --family", cfg.command.as_str())))?;
    let fam = match spec.kind {
        FamilyKind::Monomial => VectorFamily::monomial(spec.m.expect("validated")),
        FamilyKind::LogPower => VectorFamily::log_power(spec.m.expect("validated"))?,
        FamilyKind::Csv | FamilyKind::Custom => {
            let path = spec.csv.as_ref().expect("validated");
            let table = ingest_csv::<S>(path)?;
            let label = path.display().to_string();
            if spec.kind == FamilyKind::Csv {
                VectorFamily::from_table(table, label)?
            } else {
                VectorFamily::padded(table, spec.pad.expect("validated").into(), label)?
            }
        }
    };
    if let Some(m) = spec.m {
        if m != fam.m() {
            return Err(CliError::InvalidValue(format!(
                "--m {m} does not match the table, which has m = {}",
                fam.m()
            )));
        }
    }
    if cfg.drop > fam.m() {
        return Err(CliError::InvalidValue(format!(
            "--drop {} exceeds m = {}",
            cfg.drop,
            fam.m()
        )));
    }
    Ok(fam)
}

fn engine_config(cfg: &RunConfig) -> EngineConfig {
    EngineConfig {
        tol: cfg.tolerance(),
        reanchor_every: cfg.reanchor,
    }
}

fn series_records<S: Scalar>(s: &RatioSeries<S>) -> Vec<Record> {
    s.entries
        .iter()
        .map(|e| {
            let r = with_value(Record::new().with("n", e.n), &e.ratio)
                .with("gram_full", num(&e.numerator))
                .with("gram_reduced", num(&e.denominator));
            if s.shifted {
                r
            } else {
                r.with("t0_norm", e.t0_norm().map(float))
            }
        })
        .collect()
}

fn series_summary<S: Scalar>(name: &str, s: &RatioSeries<S>, tol: &gramheight::Tolerance) -> String {
    let mut out = match s.last() {
        Some(e) => format!("{name}: n={} R={}", e.n, e.ratio.to_decimal_string()),
        None => format!("{name}: no entries"),
    };
    if let Some((p, q)) = s.last().and_then(|e| e.ratio.exact_parts()) {
        out.push_str(&format!(" ({p}/{q})"));
    }
    let violations = s.monotonicity_violations(tol).len();
    out.push_str(&format!(", monotonicity violations={violations}"));
    if !s.zero_denominator.is_empty() {
        out.push_str(&format!(", skipped {} n with zero denominator", s.zero_denominator.len()));
    }
    out
}

fn run_typed<S: Scalar>(cfg: &RunConfig) -> CliResult<(Vec<Record>, String, i32)> {
    let tol = cfg.tolerance();
    match cfg.command {
        CommandKind::Ratio | CommandKind::ShiftedRatio => {
            let fam = build_family::<S>(cfg)?;
            let n_max = cfg.n_max.expect("validated");
            let shifted = cfg.command == CommandKind::ShiftedRatio;
            let s = if shifted {
                shifted_ratio_series(&fam, n_max, cfg.drop, engine_config(cfg))?
            } else {
                ratio_series(&fam, n_max, cfg.drop, engine_config(cfg))?
            };
            Ok((series_records(&s), series_summary(cfg.command.as_str(), &s, &tol), exit::OK))
        }
        CommandKind::Bounds => {
            let fam = build_family::<S>(cfg)?;
            let sampling = cfg.sample_every.map_or(Sampling::Geometric, Sampling::Every);
            let rep = boundedness_report(&fam, cfg.n_max.expect("validated"), &sampling, engine_config(cfg))?;
            let records = rep
                .rows
                .iter()
                .map(|r| {
                    Record::new()
                        .with("n", r.n)
                        .with("singular", r.singular())
                        .with("t0_norm_sq", r.t0_norm_sq.as_ref().map(num))
                        .with("envelope", r.envelope.as_ref().map(num))
                        .with("t0", r.t0.as_deref().map_or(Field::Null, list))
                        .with("observed_c", r.observed_c.as_deref().map_or(Field::Null, list))
                        .with("cauchy_schwarz_ok", r.cauchy_schwarz_ok)
                        .with("envelope_ok", r.envelope_ok)
                })
                .collect();
            let ok = rep.all_ok();
            let summary = format!(
                "bounds: {} sampled n, checks {}, {} singular",
                rep.rows.len(),
                if ok { "passed" } else { "FAILED" },
                rep.flagged().len()
            );
            Ok((records, summary, if ok { exit::OK } else { exit::FAILURE }))
        }
        CommandKind::Distance => {
            let fam = build_family::<S>(cfg)?;
            let n = cfg.n_max.expect("validated");
            let mut rows = fam.truncations(n)?;
            let target = rows.remove(cfg.drop);
            let d = distance_squared_with(&target, &rows, &tol)?;
            let residual = residual_inner_products(&target, &rows, &d.minimizer)?;
            let scale = S::one() + dot(&target, &target);
            let orthogonal = residual.iter().all(|v| v.is_negligible(&scale, &tol));
            let agree = d.routes_agree(&tol);
            let record = Record::new()
                .with("n", n)
                .with("target", cfg.drop)
                .with("d_squared", num(&d.d_squared))
                .with("d_squared_normal", num(&d.d_squared_normal))
                .with("gram_full", num(&d.gram_full))
                .with("gram_basis", num(&d.gram_basis))
                .with("minimizer", list(&d.minimizer))
                .with("routes_agree", agree)
                .with("residual_orthogonal", orthogonal);
            let summary = format!("distance: n={n} d^2={}", d.d_squared.to_decimal_string());
            let ok = agree && orthogonal;
            Ok((vec![record], summary, if ok { exit::OK } else { exit::FAILURE }))
        }
        CommandKind::Charpoly => {
            let c = ingest_csv::<S>(cfg.matrix.as_ref().expect("validated"))?;
            let parse_all = |v: &[String]| -> CliResult<Vec<S>> {
                v.iter().map(|t| S::parse_scalar(t).map_err(CliError::from)).collect()
            };
            let lambda = LambdaWeights::new(parse_all(cfg.lambda.as_ref().expect("validated"))?);
            let direct = gen_charpoly_direct(&c, &lambda)?;
            let subset = gen_charpoly_subset(&c, &lambda)?;
            let mut agree = direct.approx_eq(&subset, &tol);
            let mut record = Record::new()
                .with("order", c.rows())
                .with("direct", num(&direct))
                .with("subset_expansion", num(&subset))
                .with("agree", agree);
            if let Some(v) = &cfg.vector {
                let a = parse_all(v)?;
                let sym = SymMatrix::new(c.clone(), &tol)?;
                let q = quadform_lambda(&sym, &lambda, &a)?;
                let solved = dot(&spd_solve_with(&sym.shifted(lambda.values())?, &a, &tol)?, &a);
                let q_agree = q.approx_eq(&solved, &tol);
                agree &= q_agree;
                record = record
                    .with("quadform", num(&q))
                    .with("quadform_direct", num(&solved))
                    .with("quadform_agree", q_agree);
            }
            let summary = format!("charpoly: order {} P={} agree={agree}", c.rows(), direct.to_decimal_string());
            Ok((vec![record], summary, if agree { exit::OK } else { exit::FAILURE }))
        }
        CommandKind::Verify => {
            let rep = run_identity_suites(&VerifyConfig {
                seed: cfg.seed,
                max_order: cfg.max_order,
                cases: cfg.cases,
                ..VerifyConfig::default()
            })?;
            let records = rep
                .suites
                .iter()
                .map(|s| {
                    Record::new()
                        .with("suite", s.name)
                        .with("cases", s.cases)
                        .with("passed", s.passed)
                        .with("failed", s.failed)
                        .with("description", s.description)
                        .with("failures", Field::List(s.failures.clone()))
                })
                .collect();
            let summary = format!(
                "verify: {} passed, {} failed (seed {}, {} suites)",
                rep.passed(),
                rep.failed(),
                cfg.seed,
                rep.suites.len()
            );
            Ok((records, summary, if rep.all_passed() { exit::OK } else { exit::FAILURE }))
        }
        CommandKind::Probe => {
            let fam = build_family::<S>(cfg)?;
            let n = cfg.n_max.expect("validated");
            let rep = l2_escape_probe(&fam, cfg.samples, n, cfg.seed)?;
            let records = rep
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Record::new()
                        .with("direction", i)
                        .with("kernel_candidate", s.kernel_candidate)
                        .with("coefficients", Field::List(s.coefficients.iter().map(|&c| float(c)).collect()))
                        .with("partial_sum", s.partial_sums.last().map(|p| float(p.1)))
                        .with("growth_exponent", s.growth_exponent.map(float))
                        .with("looks_bounded", s.looks_bounded)
                })
                .collect();
            let summary = format!(
                "probe (heuristic): {} of {} directions look square-summable up to n={n}",
                rep.flagged(),
                rep.samples.len()
            );
            Ok((records, summary, exit::OK))
        }
    }
}

/// Runs the command without touching the filesystem beyond reading inputs.
pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    let (records, summary, code) = match cfg.mode {
        Mode::Exact => run_typed::<Rational>(cfg)?,
        Mode::Float => run_typed::<f64>(cfg)?,
    };
    let doc = Document {
        config: cfg,
        scalar_mode: gramheight::ScalarMode::from(cfg.mode).as_str(),
        records,
    };
    Ok(Outcome {
        text: doc.render(cfg.format),
        summary,
        code,
    })
}

/// Runs the command and writes the document to `--output` (summary on
/// stdout) or to stdout (summary on stderr). Returns the exit code.
pub fn execute(cfg: &RunConfig) -> CliResult<i32> {
    let out = run(cfg)?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &out.text)?;
            println!("{}", out.summary);
        }
        None => {
            print!("{}", out.text);
            eprintln!("{}", out.summary);
        }
    }
    Ok(out.code)
}
