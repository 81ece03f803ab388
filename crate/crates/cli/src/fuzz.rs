//! Seeded random pairs against the pipeline.
//!
//! Trial `t` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, so
//! any single trial can be replayed without running the ones before it.

use std::collections::BTreeMap;

use cr_constancy::constancy::{
    ratio_constant, reality_defect, verify_lemma, Outcome, Ratio, SeriesPair,
};
use cr_constancy::manifold::{finite_type_check, ManifoldModel};
use cr_constancy::{Exponent, GaussianRational, Result, TruncatedSeries, Variable, VariableFrame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::expr::print_series;
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FuzzMode {
    /// Random non-proportional pairs; none may satisfy the reality
    /// identity on a finite-type model.
    Generic,
    /// `f = c·g` with a random real `c`, which must be recovered exactly.
    Proportional,
}

impl FuzzMode {
    pub fn name(self) -> &'static str {
        match self {
            FuzzMode::Generic => "generic",
            FuzzMode::Proportional => "proportional",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FuzzSettings {
    pub trials: usize,
    pub seed: u64,
    pub degree: u32,
    pub mode: FuzzMode,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzFailure {
    pub trial: usize,
    pub f: String,
    pub g: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzSummary {
    pub finite_type: bool,
    pub trials_run: usize,
    pub buckets: BTreeMap<&'static str, usize>,
    pub planted_recovered: usize,
    pub redraws: usize,
    pub failure: Option<FuzzFailure>,
}

impl FuzzSummary {
    pub fn fill(&self, report: &mut Report) {
        report.set("model_finite_type", self.finite_type);
        report.set("trials_run", self.trials_run);
        let mut b = serde_json::Map::new();
        for (k, v) in &self.buckets {
            b.insert((*k).into(), (*v).into());
        }
        report.set("buckets", serde_json::Value::Object(b));
        report.set("planted_recovered", self.planted_recovered);
        report.set("proportional_redraws", self.redraws);
        report.set("falsifications", usize::from(self.failure.is_some()));
        report.set(
            "failure",
            self.failure.as_ref().map_or(
                serde_json::Value::Null,
                |f| json!({"trial": f.trial, "f": f.f, "g": f.g, "reason": f.reason}),
            ),
        );
    }
}

/// Which monomials and coefficients a random series may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// All of `z, w`, Gaussian rational coefficients.
    Gaussian,
    /// Only `w`, real rational coefficients.
    RealW,
}

fn small(rng: &mut ChaCha8Rng) -> (i64, i64) {
    (rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// A nonzero random polynomial of degree ≤ `degree` in the T frame.
pub fn random_series(
    rng: &mut ChaCha8Rng,
    frame: VariableFrame,
    precision: usize,
    degree: u32,
    shape: Shape,
) -> TruncatedSeries {
    let allowed: Vec<usize> = (0..frame.arity())
        .filter(|&i| shape == Shape::Gaussian || matches!(frame.variable(i), Some(Variable::W(_))))
        .collect();
    loop {
        let n_terms = rng.gen_range(1..=4);
        let terms: Vec<(Exponent, GaussianRational)> = (0..n_terms)
            .map(|_| {
                let mut powers = vec![0u32; frame.arity()];
                for _ in 0..rng.gen_range(0..=degree) {
                    powers[allowed[rng.gen_range(0..allowed.len())]] += 1;
                }
                let re = small(rng);
                let im = if shape == Shape::Gaussian {
                    small(rng)
                } else {
                    (0, 1)
                };
                (Exponent::new(powers), GaussianRational::from_parts(re, im))
            })
            .collect();
        let s = TruncatedSeries::from_terms(frame, precision, terms).expect("frame arity");
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_real_constant(rng: &mut ChaCha8Rng) -> GaussianRational {
    let mut num = rng.gen_range(1..=9);
    if rng.gen_bool(0.5) {
        num = -num;
    }
    GaussianRational::from_ratio(num, rng.gen_range(1..=5))
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// `f = c·g` for some `c ∈ ℂ`.
pub fn proportional(f: &TruncatedSeries, g: &TruncatedSeries) -> bool {
    matches!(
        ratio_constant(f, g, f.precision().min(g.precision())),
        Ok(Ratio::Constant(_))
    )
}

pub fn run_fuzz(model: &ManifoldModel, s: &FuzzSettings) -> Result<FuzzSummary> {
    let frame = model.t_frame();
    let n = model.precision();
    let finite_type = finite_type_check(model, s.max_depth)?.is_finite_type();
    let mut summary = FuzzSummary {
        finite_type,
        trials_run: 0,
        buckets: [
            "constant_found",
            "defect_nonzero",
            "not_finite_type",
            "insufficient_precision",
            "errors",
        ]
        .into_iter()
        .map(|k| (k, 0))
        .collect(),
        planted_recovered: 0,
        redraws: 0,
        failure: None,
    };
    for trial in 0..s.trials {
        let mut rng = trial_rng(s.seed, trial);
        summary.trials_run += 1;
        let fail = |f: &TruncatedSeries, g: &TruncatedSeries, reason: String| FuzzFailure {
            trial,
            f: print_series(f),
            g: print_series(g),
            reason,
        };
        match s.mode {
            FuzzMode::Generic => {
                let shape = if trial % 2 == 0 {
                    Shape::Gaussian
                } else {
                    Shape::RealW
                };
                let (f, g) = loop {
                    let f = random_series(&mut rng, frame, n, s.degree, shape);
                    let g = random_series(&mut rng, frame, n, s.degree, shape);
                    if !proportional(&f, &g) {
                        break (f, g);
                    }
                    summary.redraws += 1;
                };
                let pair = SeriesPair::new(f.clone(), g.clone())?;
                if !reality_defect(&pair, model)?.is_zero() {
                    *summary.buckets.get_mut("defect_nonzero").expect("bucket") += 1;
                    continue;
                }
                if finite_type {
                    summary.failure = Some(fail(
                        &f,
                        &g,
                        "non-proportional pair with empty defect on a finite-type model".into(),
                    ));
                    break;
                }
                let key = match verify_lemma(&pair, model, s.max_depth) {
                    Ok(cert) => cert.outcome.name(),
                    Err(_) => "errors",
                };
                *summary.buckets.get_mut(key).expect("bucket") += 1;
            }
            FuzzMode::Proportional => {
                let g = random_series(&mut rng, frame, n, s.degree, Shape::Gaussian);
                let c = random_real_constant(&mut rng);
                let f = g.scale(&c);
                let pair = SeriesPair::new(f.clone(), g.clone())?;
                let cert = match verify_lemma(&pair, model, s.max_depth) {
                    Ok(cert) => cert,
                    Err(e) => {
                        *summary.buckets.get_mut("errors").expect("bucket") += 1;
                        summary.failure = Some(fail(&f, &g, format!("pipeline error: {e}")));
                        break;
                    }
                };
                *summary
                    .buckets
                    .get_mut(cert.outcome.name())
                    .expect("bucket") += 1;
                match &cert.outcome {
                    Outcome::ConstantFound if cert.constant.as_ref() == Some(&c) => {
                        summary.planted_recovered += 1
                    }
                    Outcome::ConstantFound => {
                        summary.failure = Some(fail(
                            &f,
                            &g,
                            format!("planted {c} but recovered {:?}", cert.constant),
                        ));
                        break;
                    }
                    Outcome::DefectNonzero(w) => {
                        summary.failure =
                            Some(fail(&f, &g, format!("real multiple has defect term {w}")));
                        break;
                    }
                    Outcome::NotFiniteType { .. } | Outcome::InsufficientPrecision { .. } => {}
                }
            }
        }
    }
    Ok(summary)
}
