//! Numeric point oracle.
//!
//! The symbolic engine is rerun at a precision high enough that nothing is
//! truncated, and its results are evaluated at random points of ℚ(i). The
//! numeric side never touches the series engine: it works on the input
//! term tables with its own conjugation, differentiation and evaluation,
//! setting `ξ := Θ(ζ, z, w)` pointwise. Both sides must agree exactly.

use cr_constancy::constancy::{reality_defect, SeriesPair};
use cr_constancy::manifold::{CrFields, FormalVectorField, ManifoldModel};
use cr_constancy::{GaussianRational, TruncatedSeries, Variable, VariableFrame};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::commands::CliError;
use crate::report::Report;
use crate::spec::SpecFile;

/// `f` used when neither the flag nor the spec provides one.
pub fn default_f(m: usize, d: usize) -> String {
    let mut parts: Vec<String> = (1..=m).map(|k| format!("z{k}")).collect();
    parts.extend((1..=d).map(|j| format!("w{j}")));
    parts.push("z1*w1".into());
    parts.join(" + ")
}

/// A polynomial as a plain list of terms.
#[derive(Clone, Debug)]
struct Poly(Vec<(Vec<(Variable, u32)>, GaussianRational)>);

impl Poly {
    fn from_series(s: &TruncatedSeries) -> Self {
        let frame = s.frame();
        Poly(
            s.terms()
                .map(|(e, c)| {
                    let mono = e
                        .powers()
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| **p > 0)
                        .map(|(i, p)| (frame.variable(i).expect("in frame"), *p))
                        .collect();
                    (mono, c.clone())
                })
                .collect(),
        )
    }

    fn bar(&self) -> Self {
        Poly(
            self.0
                .iter()
                .map(|(mono, c)| {
                    (
                        mono.iter().map(|(v, p)| (v.conjugate(), *p)).collect(),
                        c.conj(),
                    )
                })
                .collect(),
        )
    }

    fn deriv(&self, v: Variable) -> Self {
        Poly(
            self.0
                .iter()
                .filter_map(|(mono, c)| {
                    let p = mono.iter().find(|(u, _)| *u == v)?.1;
                    let rest = mono
                        .iter()
                        .filter_map(|(u, q)| match (*u == v, *q) {
                            (true, 1) => None,
                            (true, q) => Some((*u, q - 1)),
                            (false, q) => Some((*u, q)),
                        })
                        .collect();
                    Some((rest, c.scale_int(i64::from(p))))
                })
                .collect(),
        )
    }

    fn eval(&self, env: &dyn Fn(Variable) -> GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (mono, c) in &self.0 {
            let mut t = c.clone();
            for (v, p) in mono {
                let x = env(*v);
                for _ in 0..*p {
                    t = &t * &x;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    fn degree(&self) -> u32 {
        self.0
            .iter()
            .map(|(m, _)| m.iter().map(|(_, p)| p).sum::<u32>())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub quantity: String,
    pub point: usize,
    pub numeric: String,
    pub symbolic: String,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub points: Vec<Vec<GaussianRational>>,
    pub point_labels: Vec<String>,
    pub lifted_precision: usize,
    pub quantities: Vec<String>,
    pub comparisons: usize,
    pub truncation_checks: Vec<(String, bool)>,
    pub mismatches: Vec<Mismatch>,
}

impl OracleResult {
    pub fn point_digest(&self) -> String {
        let mut h = Sha256::new();
        for p in &self.points {
            for x in p {
                h.update(x.to_string().as_bytes());
                h.update(b",");
            }
            h.update(b"\n");
        }
        let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    pub fn fill(&self, report: &mut Report) {
        report.set("lifted_precision", self.lifted_precision);
        report.set("quantities", self.quantities.clone());
        report.set("comparisons", self.comparisons);
        report.set("point_digest", self.point_digest());
        report.set(
            "truncation_checks",
            self.truncation_checks
                .iter()
                .map(|(q, ok)| json!({"quantity": q, "consistent": ok}))
                .collect::<Vec<_>>(),
        );
        report.set(
            "mismatches",
            self.mismatches
                .iter()
                .map(|m| json!({"quantity": m.quantity, "point": m.point, "numeric": m.numeric, "symbolic": m.symbolic}))
                .collect::<Vec<_>>(),
        );
        report.set("point_coordinates", self.point_labels.clone());
        report.set(
            "points",
            self.points
                .iter()
                .map(|p| {
                    format!(
                        "({})",
                        p.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
                .collect::<Vec<_>>(),
        );
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> (i64, i64) {
    (rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

/// `count` points of the intrinsic frame; the first is the origin.
pub fn sample_points(arity: usize, count: usize, seed: u64) -> Vec<Vec<GaussianRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(vec![GaussianRational::zero(); arity]);
    }
    while out.len() < count {
        out.push(
            (0..arity)
                .map(|_| {
                    let re = small_rational(&mut rng);
                    let im = small_rational(&mut rng);
                    GaussianRational::from_parts(re, im)
                })
                .collect(),
        );
    }
    out
}

struct Symbolic {
    involution: Vec<TruncatedSeries>,
    defect: TruncatedSeries,
    l_coeffs: Vec<Vec<TruncatedSeries>>,
    wronskian_l: Vec<TruncatedSeries>,
    wronskian_u: Vec<TruncatedSeries>,
    product_l: Vec<TruncatedSeries>,
}

fn wronskian(
    x: &FormalVectorField,
    f: &TruncatedSeries,
    g: &TruncatedSeries,
) -> cr_constancy::Result<TruncatedSeries> {
    f.mul(&x.apply(g)?)?.sub(&g.mul(&x.apply(f)?)?)
}

fn symbolic(model: &ManifoldModel, pair: &SeriesPair) -> cr_constancy::Result<Symbolic> {
    let intrinsic = model.intrinsic_frame();
    let fields = CrFields::new(model)?;
    let f = pair.f().reframe(intrinsic)?;
    let g = pair.g().reframe(intrinsic)?;
    let g_bar = model.restrict_to_m(&pair.g().conjugate_swap()?.reframe(model.full_frame())?)?;
    let l_coeffs = fields
        .l()
        .iter()
        .map(|l| {
            (0..model.d())
                .map(|j| l.coeffs()[intrinsic.index_of(Variable::W(j)).expect("w")].clone())
                .collect()
        })
        .collect();
    let wronskian_l = fields
        .l()
        .iter()
        .map(|l| wronskian(l, &f, &g))
        .collect::<cr_constancy::Result<Vec<_>>>()?;
    let wronskian_u = fields
        .u()
        .iter()
        .map(|u| wronskian(u, &f, &g))
        .collect::<cr_constancy::Result<Vec<_>>>()?;
    let product_l = wronskian_l
        .iter()
        .map(|w| w.mul(&g_bar))
        .collect::<cr_constancy::Result<Vec<_>>>()?;
    Ok(Symbolic {
        involution: model.involution_residuals()?,
        defect: reality_defect(pair, model)?,
        l_coeffs,
        wronskian_l,
        wronskian_u,
        product_l,
    })
}

/// Runs the comparison on `points` points drawn from `seed`.
pub fn run_oracle(
    spec: &SpecFile,
    theta: &[TruncatedSeries],
    model: &ManifoldModel,
    pair: &SeriesPair,
    points: usize,
    seed: u64,
) -> Result<OracleResult, CliError> {
    let (m, d) = (spec.m, spec.d);
    let theta_p: Vec<Poly> = theta.iter().map(Poly::from_series).collect();
    let f_p = Poly::from_series(pair.f());
    let g_p = Poly::from_series(pair.g());
    let delta = theta_p.iter().map(Poly::degree).max().unwrap_or(1).max(1) as usize;
    let lifted = (f_p.degree() as usize + g_p.degree() as usize + delta + 2) * (delta + 1) + 2;

    let lift = |s: &TruncatedSeries| s.assume_exact_to(lifted);
    let model_lift = ManifoldModel::new(m, d, theta.iter().map(lift).collect(), lifted).map_err(|e| {
        CliError::Validation(format!(
            "eval-oracle needs a polynomial theta whose involution identity holds exactly; at order {lifted}: {e}"
        ))
    })?;
    let pair_lift = SeriesPair::new(lift(pair.f()), lift(pair.g()))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let internal = |e: cr_constancy::Error| CliError::Validation(format!("pipeline error: {e}"));
    let sym = symbolic(&model_lift, &pair_lift).map_err(internal)?;
    let base = symbolic(model, pair).map_err(internal)?;

    let mut truncation_checks = Vec::new();
    let mut consistent = |name: &str, low: &TruncatedSeries, high: &TruncatedSeries| {
        let ok = high
            .truncate(low.precision())
            .map(|h| &h == low)
            .unwrap_or(false);
        truncation_checks.push((name.to_string(), ok));
    };
    consistent("defect", &base.defect, &sym.defect);
    for k in 0..m {
        for j in 0..d {
            consistent(
                &format!("L{}.coefficient[w{}]", k + 1, j + 1),
                &base.l_coeffs[k][j],
                &sym.l_coeffs[k][j],
            );
        }
        consistent(
            &format!("wronskian[L{}]", k + 1),
            &base.wronskian_l[k],
            &sym.wronskian_l[k],
        );
        consistent(
            &format!("wronskian[U{}]", k + 1),
            &base.wronskian_u[k],
            &sym.wronskian_u[k],
        );
    }

    let intrinsic = VariableFrame::intrinsic(m, d);
    let theta_bar: Vec<Poly> = theta_p.iter().map(Poly::bar).collect();
    let f_bar = f_p.bar();
    let g_bar = g_p.bar();
    let pts = sample_points(intrinsic.arity(), points, seed);
    let mut mismatches = Vec::new();
    let mut comparisons = 0;
    let mut quantities = Vec::new();
    for (index, x) in pts.iter().enumerate() {
        let base_env = |v: Variable| -> GaussianRational {
            intrinsic
                .index_of(v)
                .map(|i| x[i].clone())
                .unwrap_or_else(GaussianRational::zero)
        };
        let xi: Vec<GaussianRational> = theta_p.iter().map(|t| t.eval(&base_env)).collect();
        let env = |v: Variable| -> GaussianRational {
            match v {
                Variable::Xi(j) => xi[j].clone(),
                other => base_env(other),
            }
        };
        let mut numeric: Vec<(String, GaussianRational, &TruncatedSeries)> = Vec::new();
        for j in 0..d {
            let value = &theta_bar[j].eval(&env) - &env(Variable::W(j));
            numeric.push((
                format!("involution[theta{}]", j + 1),
                value,
                &sym.involution[j],
            ));
        }
        let gb = g_bar.eval(&env);
        let defect = &(&f_p.eval(&env) * &gb) - &(&g_p.eval(&env) * &f_bar.eval(&env));
        numeric.push(("defect".into(), defect, &sym.defect));
        for k in 0..m {
            let c: Vec<GaussianRational> = (0..d)
                .map(|j| theta_bar[j].deriv(Variable::Z(k)).eval(&env))
                .collect();
            for j in 0..d {
                numeric.push((
                    format!("L{}.coefficient[w{}]", k + 1, j + 1),
                    c[j].clone(),
                    &sym.l_coeffs[k][j],
                ));
            }
            let apply_l = |h: &Poly| {
                let mut acc = h.deriv(Variable::Z(k)).eval(&env);
                for (j, cj) in c.iter().enumerate() {
                    acc = &acc + &(cj * &h.deriv(Variable::W(j)).eval(&env));
                }
                acc
            };
            let (fx, gx) = (f_p.eval(&env), g_p.eval(&env));
            let w = &(&fx * &apply_l(&g_p)) - &(&gx * &apply_l(&f_p));
            numeric.push((
                format!("wronskian[L{}]", k + 1),
                w.clone(),
                &sym.wronskian_l[k],
            ));
            numeric.push((format!("product[L{}]", k + 1), &w * &gb, &sym.product_l[k]));
            let dz = |h: &Poly| h.deriv(Variable::Zeta(k)).eval(&env);
            let wu = &(&fx * &dz(&g_p)) - &(&gx * &dz(&f_p));
            numeric.push((format!("wronskian[U{}]", k + 1), wu, &sym.wronskian_u[k]));
        }
        if index == 0 {
            quantities = numeric.iter().map(|(q, _, _)| q.clone()).collect();
        }
        for (quantity, value, series) in numeric {
            comparisons += 1;
            let s = series.evaluate(x).map_err(internal)?;
            if s != value {
                mismatches.push(Mismatch {
                    quantity,
                    point: index,
                    numeric: value.to_string(),
                    symbolic: s.to_string(),
                });
            }
        }
    }
    for (name, ok) in &truncation_checks {
        if !ok {
            mismatches.push(Mismatch {
                quantity: format!("truncation:{name}"),
                point: 0,
                numeric: "lifted result truncated".into(),
                symbolic: "order-N result".into(),
            });
        }
    }
    Ok(OracleResult {
        points: pts,
        point_labels: intrinsic.variables().map(|v| v.to_string()).collect(),
        lifted_precision: lifted,
        quantities,
        comparisons,
        truncation_checks,
        mismatches,
    })
}
