use cr_constancy::constancy::{
    reality_defect, verify_lemma, ConstancyCertificate, Outcome, Ratio, SeriesPair, StepKind,
    Subject, WronskianIdentity,
};
use cr_constancy::manifold::{
    finite_type_check, FiniteTypeOutcome, FiniteTypeReport, ManifoldModel,
};
use cr_constancy::{Error, Exponent, GaussianRational, TruncatedSeries, VariableFrame, Witness};
use serde_json::{json, Map, Value};
use thiserror::Error as ThisError;

use crate::expr::{complex_pair, print_series};
use crate::fuzz::{run_fuzz, FuzzMode, FuzzSettings};
use crate::oracle::run_oracle;
use crate::report::Report;
use crate::spec::{build_model, parse_t_series, parse_theta, SpecFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

/// A finished command: the report and the process exit status.
#[derive(Clone, Debug)]
pub struct Run {
    pub report: Report,
    pub exit_code: i32,
}

/// The spec file after parsing, with the effective precision order.
pub struct Input {
    pub text: String,
    pub spec: SpecFile,
    pub order: usize,
    pub theta: Vec<TruncatedSeries>,
}

impl Input {
    pub fn load(text: &str, order_override: Option<usize>) -> Result<Self, CliError> {
        let spec = SpecFile::parse(text).map_err(|e| CliError::Parse(format!("spec file {e}")))?;
        let order = order_override.unwrap_or(spec.order);
        if order < 2 {
            return Err(CliError::Usage(format!(
                "order must be at least 2, got {order}"
            )));
        }
        let theta =
            parse_theta(&spec, order).map_err(|e| CliError::Parse(format!("spec file {e}")))?;
        Ok(Self {
            text: text.to_string(),
            spec,
            order,
            theta,
        })
    }

    pub fn model(&self) -> Result<ManifoldModel, CliError> {
        build_model(&self.spec, self.theta.clone(), self.order)
            .map_err(|e| CliError::Validation(format!("invalid model: {e}")))
    }

    fn series(
        &self,
        flag: Option<&str>,
        key: &str,
        default: Option<&str>,
    ) -> Result<(String, TruncatedSeries), CliError> {
        let entry = match key {
            "f" => self.spec.f.as_ref(),
            _ => self.spec.g.as_ref(),
        };
        let (text, origin) = match (flag, entry, default) {
            (Some(t), _, _) => (t.to_string(), format!("--{key}")),
            (None, Some(e), _) => (e.text.clone(), format!("line {} ({key})", e.line)),
            (None, None, Some(t)) => (t.to_string(), format!("default {key}")),
            (None, None, None) => {
                return Err(CliError::Usage(format!(
                    "no {key} given: use --{key} or a '{key} =' line in the spec"
                )))
            }
        };
        let s = parse_t_series(&text, self.spec.options(self.order), &origin)
            .map_err(|e| CliError::Parse(e.to_string()))?;
        Ok((text, s))
    }

    pub fn pair(
        &self,
        f: Option<&str>,
        g: Option<&str>,
        g_default: Option<&str>,
    ) -> Result<(String, String, SeriesPair), CliError> {
        let (ft, fs) = self.series(f, "f", None)?;
        let (gt, gs) = self.series(g, "g", g_default)?;
        let pair = SeriesPair::new(fs, gs).map_err(|e| CliError::Validation(e.to_string()))?;
        Ok((ft, gt, pair))
    }

    fn report(&self, command: &str, mut args: Vec<(String, String)>) -> Report {
        args.insert(0, ("order".into(), self.order.to_string()));
        Report::new(command, args, &self.text)
    }
}

fn internal(e: Error) -> CliError {
    CliError::Validation(format!("pipeline error: {e}"))
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "monomial": w.monomial(),
        "coefficient": w.coefficient.to_string(),
        "degree": w.exponent.total_degree(),
    })
}

fn series_json(s: &TruncatedSeries) -> Value {
    json!({
        "series": print_series(s),
        "precision": s.precision(),
        "is_zero": s.is_zero(),
        "witness": s.witness().as_ref().map_or(Value::Null, witness_json),
    })
}

fn ranks_json(r: &FiniteTypeReport) -> Value {
    Value::Array(
        r.span_by_depth
            .iter()
            .map(|(d, k)| json!({"depth": d, "rank": k}))
            .collect(),
    )
}

fn finite_type_json(r: &FiniteTypeReport) -> Value {
    let mut m = Map::new();
    match r.outcome {
        FiniteTypeOutcome::FiniteType { type_length } => {
            m.insert("result".into(), "finite_type".into());
            m.insert("type_length".into(), type_length.into());
        }
        FiniteTypeOutcome::Undetermined { max_depth_reached } => {
            m.insert("result".into(), "undetermined".into());
            m.insert("max_depth_reached".into(), max_depth_reached.into());
        }
    }
    m.insert("dimension".into(), r.dimension.into());
    m.insert("ranks".into(), ranks_json(r));
    m.insert(
        "spanning_frame".into(),
        r.spanning_frame
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .into(),
    );
    m.insert("precision_limited".into(), r.precision_limited.into());
    Value::Object(m)
}

fn subject_name(s: &Subject, frame: VariableFrame) -> String {
    match s {
        Subject::Word(w) => w.to_string(),
        Subject::Coordinate(i) => format!(
            "d/d{}",
            frame
                .variable(*i)
                .map_or_else(|| format!("x{}", i + 1), |v| v.to_string())
        ),
    }
}

fn identity_json(id: &WronskianIdentity, frame: VariableFrame) -> Value {
    let mut m = Map::new();
    m.insert("subject".into(), subject_name(&id.subject, frame).into());
    let kind = match &id.kind {
        StepKind::FirstOrder { .. } => "first_order",
        StepKind::Trivial => "trivial",
        StepKind::Bracket { .. } => "bracket",
        StepKind::Coordinate { .. } => "coordinate",
    };
    m.insert("kind".into(), kind.into());
    m.insert("certified_precision".into(), id.certified_precision.into());
    m.insert("holds".into(), id.holds().into());
    m.insert("residual".into(), print_series(&id.residual).into());
    match &id.kind {
        StepKind::FirstOrder {
            product_residual,
            factor_order,
        } => {
            m.insert("factor_order".into(), (*factor_order).into());
            m.insert(
                "product_residual".into(),
                print_series(product_residual).into(),
            );
        }
        StepKind::Trivial => {}
        StepKind::Bracket {
            elimination_residual,
            elimination_bound,
            leibniz_residual,
        } => {
            m.insert("elimination_bound".into(), (*elimination_bound).into());
            m.insert(
                "elimination_residual".into(),
                print_series(elimination_residual).into(),
            );
            m.insert(
                "leibniz_residual".into(),
                print_series(leibniz_residual).into(),
            );
        }
        StepKind::Coordinate {
            combination_residual,
        } => {
            m.insert(
                "combination_residual".into(),
                print_series(combination_residual).into(),
            );
        }
    }
    Value::Object(m)
}

fn leading(model: &ManifoldModel, term: &(Exponent, GaussianRational)) -> String {
    Witness {
        frame: model.t_frame(),
        exponent: term.0.clone(),
        coefficient: term.1.clone(),
    }
    .to_string()
}

/// The certificate as a report payload.
pub fn certificate_payload(
    cert: &ConstancyCertificate,
    model: &ManifoldModel,
    report: &mut Report,
) {
    let frame = model.intrinsic_frame();
    report.outcome = cert.outcome.name().to_string();
    match &cert.outcome {
        Outcome::DefectNonzero(w) => report.set("witness", witness_json(w)),
        Outcome::NotFiniteType { max_depth_reached } => {
            report.set("max_depth_reached", *max_depth_reached)
        }
        Outcome::InsufficientPrecision { stage } => report.set("stage", stage.name()),
        Outcome::ConstantFound => {}
    }
    report.set(
        "constant",
        cert.constant
            .as_ref()
            .map_or(Value::Null, |c| complex_pair(c).into()),
    );
    report.set(
        "constant_parts",
        cert.constant.as_ref().map_or(Value::Null, |c| {
            json!({"re": crate::expr::rational_pair(c.re()), "im": crate::expr::rational_pair(c.im())})
        }),
    );
    let known = |b: bool| {
        if cert.constant.is_some() {
            Value::Bool(b)
        } else {
            Value::Null
        }
    };
    report.set("is_real", known(cert.is_real));
    report.set("is_nonzero", known(cert.is_nonzero));
    report.set("precision", cert.precision);
    report.set("defect", series_json(&cert.defect));
    report.set(
        "finite_type",
        cert.finite_type
            .as_ref()
            .map_or(Value::Null, finite_type_json),
    );
    let steps = |ids: &[WronskianIdentity]| {
        Value::Array(ids.iter().map(|id| identity_json(id, frame)).collect())
    };
    report.set("first_order", steps(&cert.first_order));
    report.set("bracket_closure", steps(&cert.frame_identities));
    report.set(
        "frame_inverse",
        cert.frame_inverse.as_ref().map_or(Value::Null, |inv| {
            json!({
                "words": inv.words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                "precision": inv.precision,
                "iterations": inv.iterations,
                "coefficients": inv.coefficients.iter().enumerate().map(|(i, row)| {
                    json!({
                        "coordinate": subject_name(&Subject::Coordinate(i), frame),
                        "a": row.iter().map(print_series).collect::<Vec<_>>(),
                    })
                }).collect::<Vec<_>>(),
            })
        }),
    );
    report.set("coordinate_identities", steps(&cert.coordinate_identities));
    report.set(
        "ratio",
        match (&cert.ratio_precision, &cert.trace) {
            (Some(bound), Some(trace)) => json!({
                "certified_precision": bound,
                "leading_f": leading(model, &trace.leading_f),
                "leading_g": leading(model, &trace.leading_g),
                "induction_steps": trace.steps.len(),
                "trace_agrees": matches!(trace.result, Ratio::Constant(_)),
            }),
            _ => Value::Null,
        },
    );
}

pub fn cmd_check(input: &Input) -> Run {
    let mut report = input.report("check", Vec::new());
    let theta: Vec<String> = input.theta.iter().map(print_series).collect();
    report.set("m", input.spec.m);
    report.set("d", input.spec.d);
    report.set("dimension", 2 * input.spec.m + input.spec.d);
    report.set("theta", theta);
    match input.model() {
        Ok(model) => {
            report.outcome = "pass".into();
            report.set(
                "theta_bar",
                model
                    .theta_bar()
                    .iter()
                    .map(print_series)
                    .collect::<Vec<_>>(),
            );
            let involution = model.involution_residuals().expect("validated model");
            report.set(
                "involution",
                involution
                    .iter()
                    .enumerate()
                    .map(|(j, r)| json!({"equation": j + 1, "residual": print_series(r), "precision": r.precision()}))
                    .collect::<Vec<_>>(),
            );
            let tangency = model.tangency_residuals().expect("validated model");
            let all_vanish = tangency.iter().all(|t| t.residual.is_zero());
            report.set(
                "tangency",
                tangency
                    .iter()
                    .map(|t| {
                        json!({
                            "generator": t.generator.to_string(),
                            "equation": t.equation + 1,
                            "residual": print_series(&t.residual),
                            "precision": t.residual.precision(),
                        })
                    })
                    .collect::<Vec<_>>(),
            );
            if !all_vanish {
                report.outcome = "fail".into();
                report.set("failure", json!({"check": "tangency"}));
                return Run {
                    report,
                    exit_code: EXIT_VALIDATION,
                };
            }
            Run {
                report,
                exit_code: EXIT_OK,
            }
        }
        Err(CliError::Validation(_)) => {
            let err = build_model(&input.spec, input.theta.clone(), input.order)
                .expect_err("model failed above");
            report.outcome = "fail".into();
            let failure = match &err {
                Error::InvolutionFailure { equation, witness } => {
                    json!({"check": "involution", "equation": equation, "witness": witness_json(witness), "message": err.to_string()})
                }
                Error::NormalizationFailure { equation, .. }
                | Error::OriginNotOnManifold { equation } => {
                    json!({"check": "normalization", "equation": equation, "message": err.to_string()})
                }
                _ => json!({"check": "model", "message": err.to_string()}),
            };
            report.set("failure", failure);
            Run {
                report,
                exit_code: EXIT_VALIDATION,
            }
        }
        Err(other) => unreachable!("{other}"),
    }
}

pub fn default_depth(input: &Input, max_depth: Option<usize>) -> usize {
    max_depth.unwrap_or(input.order - 1).max(1)
}

pub fn cmd_finite_type(input: &Input, max_depth: Option<usize>) -> Result<Run, CliError> {
    let depth = default_depth(input, max_depth);
    let model = input.model()?;
    let mut report = input.report("finite-type", vec![("max_depth".into(), depth.to_string())]);
    let r = finite_type_check(&model, depth).map_err(internal)?;
    report.outcome = if r.is_finite_type() {
        "finite_type"
    } else {
        "undetermined"
    }
    .into();
    if let Value::Object(m) = finite_type_json(&r) {
        for (k, v) in m {
            if k != "result" {
                report.payload.insert(k, v);
            }
        }
    }
    Ok(Run {
        report,
        exit_code: EXIT_OK,
    })
}

fn verdict_exit(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::ConstantFound => EXIT_OK,
        Outcome::DefectNonzero(_) | Outcome::NotFiniteType { .. } => EXIT_NEGATIVE,
        Outcome::InsufficientPrecision { .. } => EXIT_PRECISION,
    }
}

pub fn cmd_verify(
    input: &Input,
    f: Option<&str>,
    g: Option<&str>,
    max_depth: Option<usize>,
) -> Result<Run, CliError> {
    verify_like("verify", input, f, g, None, max_depth)
}

/// `verify` with `g = 1`: a real-valued `f` must be constant.
pub fn cmd_real(input: &Input, f: Option<&str>, max_depth: Option<usize>) -> Result<Run, CliError> {
    verify_like("real", input, f, Some("1"), Some("1"), max_depth)
}

fn verify_like(
    command: &str,
    input: &Input,
    f: Option<&str>,
    g: Option<&str>,
    g_default: Option<&str>,
    max_depth: Option<usize>,
) -> Result<Run, CliError> {
    let depth = default_depth(input, max_depth);
    let model = input.model()?;
    let (ft, gt, pair) = input.pair(f, g, g_default.or(Some("1")))?;
    let mut args = vec![
        ("max_depth".to_string(), depth.to_string()),
        ("f".to_string(), ft),
    ];
    if command == "verify" {
        args.push(("g".to_string(), gt));
    }
    let mut report = input.report(command, args);
    let cert = verify_lemma(&pair, &model, depth).map_err(internal)?;
    certificate_payload(&cert, &model, &mut report);
    Ok(Run {
        exit_code: verdict_exit(&cert.outcome),
        report,
    })
}

pub fn cmd_defect(input: &Input, f: Option<&str>, g: Option<&str>) -> Result<Run, CliError> {
    let model = input.model()?;
    let (ft, gt, pair) = input.pair(f, g, Some("1"))?;
    let mut report = input.report("defect", vec![("f".into(), ft), ("g".into(), gt)]);
    let d = reality_defect(&pair, &model).map_err(internal)?;
    report.outcome = if d.is_zero() {
        "defect_zero"
    } else {
        "defect_nonzero"
    }
    .into();
    if let Value::Object(m) = series_json(&d) {
        report.payload.extend(m);
    }
    Ok(Run {
        report,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_eval_oracle(
    input: &Input,
    f: Option<&str>,
    g: Option<&str>,
    points: usize,
    seed: u64,
) -> Result<Run, CliError> {
    let model = input.model()?;
    let default_f = crate::oracle::default_f(input.spec.m, input.spec.d);
    let f = f
        .or(input.spec.f.as_ref().map(|e| e.text.as_str()))
        .unwrap_or(&default_f);
    let (ft, gt, pair) = input.pair(Some(f), g, Some("1 + z1"))?;
    let mut report = input.report(
        "eval-oracle",
        vec![
            ("f".into(), ft),
            ("g".into(), gt),
            ("points".into(), points.to_string()),
            ("seed".into(), seed.to_string()),
        ],
    );
    let result = run_oracle(&input.spec, &input.theta, &model, &pair, points, seed)?;
    let ok = result.mismatches.is_empty();
    report.outcome = if ok { "agree" } else { "mismatch" }.into();
    result.fill(&mut report);
    Ok(Run {
        report,
        exit_code: if ok { EXIT_OK } else { EXIT_VALIDATION },
    })
}

pub fn cmd_fuzz(
    input: &Input,
    trials: usize,
    seed: u64,
    degree: u32,
    mode: FuzzMode,
    max_depth: Option<usize>,
) -> Result<Run, CliError> {
    let depth = default_depth(input, max_depth);
    let model = input.model()?;
    let mut report = input.report(
        "fuzz",
        vec![
            ("mode".into(), mode.name().into()),
            ("trials".into(), trials.to_string()),
            ("seed".into(), seed.to_string()),
            ("degree".into(), degree.to_string()),
            ("max_depth".into(), depth.to_string()),
        ],
    );
    let summary = run_fuzz(
        &model,
        &FuzzSettings {
            trials,
            seed,
            degree,
            mode,
            max_depth: depth,
        },
    )
    .map_err(internal)?;
    let failed = summary.failure.is_some();
    report.outcome = if failed { "falsified" } else { "ok" }.into();
    summary.fill(&mut report);
    Ok(Run {
        report,
        exit_code: if failed { EXIT_VALIDATION } else { EXIT_OK },
    })
}
