use num_traits::{One, Zero};

use super::frame::{invert_with, FrameInverse};
use super::ratio::{ratio_constant, ratio_trace, InductionTrace, Ratio};
use super::wronskian::{
    closure_with, coordinate_identities, first_order_with, reality_defect, WronskianIdentity,
};
use super::SeriesPair;
use crate::error::{Error, Result, Stage};
use crate::manifold::{
    finite_type::finite_type_check_with, CrFields, FiniteTypeOutcome, FiniteTypeReport,
    ManifoldModel,
};
use crate::number::GaussianRational;
use crate::series::{TruncatedSeries, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    ConstantFound,
    DefectNonzero(Witness),
    NotFiniteType { max_depth_reached: usize },
    InsufficientPrecision { stage: Stage },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::ConstantFound => "constant_found",
            Outcome::DefectNonzero(_) => "defect_nonzero",
            Outcome::NotFiniteType { .. } => "not_finite_type",
            Outcome::InsufficientPrecision { .. } => "insufficient_precision",
        }
    }
}

/// Everything the pipeline computed, in order. Later fields are `None` or
/// empty when an earlier stage decided the outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstancyCertificate {
    pub outcome: Outcome,
    pub constant: Option<GaussianRational>,
    pub is_real: bool,
    pub is_nonzero: bool,
    pub precision: usize,
    pub defect: TruncatedSeries,
    pub finite_type: Option<FiniteTypeReport>,
    /// First-order identities (`L_1..L_m`, `U_1..U_m`).
    pub first_order: Vec<WronskianIdentity>,
    /// One identity per spanning-frame word.
    pub frame_identities: Vec<WronskianIdentity>,
    pub frame_inverse: Option<FrameInverse>,
    pub coordinate_identities: Vec<WronskianIdentity>,
    /// Degree below which `f − c·g` is certified to vanish.
    pub ratio_precision: Option<usize>,
    pub trace: Option<InductionTrace>,
}

impl ConstancyCertificate {
    fn stopped(outcome: Outcome, precision: usize, defect: TruncatedSeries) -> Self {
        Self {
            outcome,
            constant: None,
            is_real: false,
            is_nonzero: false,
            precision,
            defect,
            finite_type: None,
            first_order: Vec::new(),
            frame_identities: Vec::new(),
            frame_inverse: None,
            coordinate_identities: Vec::new(),
            ratio_precision: None,
            trace: None,
        }
    }

    /// All Wronskian records in proof order.
    pub fn steps(&self) -> impl Iterator<Item = &WronskianIdentity> {
        self.first_order
            .iter()
            .chain(&self.frame_identities)
            .chain(&self.coordinate_identities)
    }
}

/// Runs the whole argument on `pair` and `model`.
///
/// `Err` is reserved for malformed input and for internal contradictions
/// (a step failing below its certified bound while the hypothesis holds).
pub fn verify_lemma(
    pair: &SeriesPair,
    model: &ManifoldModel,
    max_depth: usize,
) -> Result<ConstancyCertificate> {
    let defect = reality_defect(pair, model)?;
    let precision = defect.precision();
    if let Some(w) = defect.witness() {
        return Ok(ConstancyCertificate::stopped(
            Outcome::DefectNonzero(w),
            precision,
            defect,
        ));
    }
    let mut cert = ConstancyCertificate::stopped(Outcome::ConstantFound, precision, defect);
    match run_stages(pair, model, max_depth, &mut cert) {
        Ok(()) => {}
        Err(Error::InsufficientPrecision(stage)) => {
            cert.outcome = Outcome::InsufficientPrecision { stage }
        }
        Err(e) => return Err(e),
    }
    Ok(cert)
}

fn run_stages(
    pair: &SeriesPair,
    model: &ManifoldModel,
    max_depth: usize,
    cert: &mut ConstancyCertificate,
) -> Result<()> {
    let fields = CrFields::new(model)?;
    let ft = finite_type_check_with(model, &fields, max_depth)?;
    let frame = ft.spanning_frame.clone();
    let undetermined = match ft.outcome {
        FiniteTypeOutcome::FiniteType { .. } => None,
        FiniteTypeOutcome::Undetermined { max_depth_reached } => {
            Some((max_depth_reached, ft.precision_limited))
        }
    };
    cert.finite_type = Some(ft);
    match undetermined {
        Some((_, true)) => return Err(Error::InsufficientPrecision(Stage::FiniteType)),
        Some((max_depth_reached, false)) => {
            cert.outcome = Outcome::NotFiniteType { max_depth_reached };
            return Ok(());
        }
        None => {}
    }

    cert.first_order = first_order_with(pair, model, &fields)?;
    cert.frame_identities = closure_with(pair, &fields, &cert.first_order, &frame)?;
    let inverse = invert_with(&fields, &frame, model.dimension()).map_err(|e| match e {
        Error::PrecisionUnderflow | Error::ZeroPrecision => {
            Error::InsufficientPrecision(Stage::FrameInversion)
        }
        other => other,
    })?;
    let coords = coordinate_identities(pair, model, &inverse, &cert.frame_identities)?;
    cert.frame_inverse = Some(inverse);
    let coord_bound = coords
        .iter()
        .map(|id| id.certified_precision)
        .min()
        .expect("dimension ≥ 3");
    cert.coordinate_identities = coords;

    // A nonzero term of f − c·g in degree e forces a nonzero term of
    // f·∂g − g·∂f in degree e + ord g − 1.
    let g_order = pair.g().order().expect("g nonzero") as usize;
    let bound = pair
        .precision()
        .min((coord_bound + 1).saturating_sub(g_order));
    if bound <= g_order {
        return Err(Error::InsufficientPrecision(Stage::Ratio));
    }
    cert.ratio_precision = Some(bound);
    let direct = ratio_constant(pair.f(), pair.g(), bound).map_err(|e| match e {
        Error::ZeroSeries(_) => Error::InsufficientPrecision(Stage::Ratio),
        other => other,
    })?;
    let trace = ratio_trace(pair.f(), pair.g(), bound)?;
    if trace.result != direct {
        return Err(Error::Inconsistent(
            "direct and traced ratio checks disagree".into(),
        ));
    }
    cert.trace = Some(trace);
    let c = match direct {
        Ratio::Constant(c) => c,
        Ratio::NotProportional(np) => {
            return Err(Error::Inconsistent(format!(
                "coordinate identities hold but {np}"
            )));
        }
    };
    cert.is_real = c.is_real();
    cert.is_nonzero = !c.is_zero();
    if !cert.is_real || !cert.is_nonzero {
        return Err(Error::Inconsistent(format!(
            "recovered constant {c} is not a nonzero real"
        )));
    }
    cert.constant = Some(c);
    cert.outcome = Outcome::ConstantFound;
    Ok(())
}

/// [`verify_lemma`] with `g = 1`.
pub fn verify_real_constant(
    f: &TruncatedSeries,
    model: &ManifoldModel,
    max_depth: usize,
) -> Result<ConstancyCertificate> {
    let g = TruncatedSeries::constant(f.frame(), GaussianRational::one(), f.precision())?;
    verify_lemma(&SeriesPair::new(f.clone(), g)?, model, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::tests::{heisenberg, levi_flat, power_model};
    use crate::series::{Variable, VariableFrame};

    fn t(v: Variable, n: usize) -> TruncatedSeries {
        TruncatedSeries::var(VariableFrame::t(1, 1), v, n).unwrap()
    }

    fn one(n: usize) -> TruncatedSeries {
        TruncatedSeries::one(VariableFrame::t(1, 1), n).unwrap()
    }

    #[test]
    fn heisenberg_five() {
        let g = one(8)
            .add(&t(Variable::Z(0), 8))
            .unwrap()
            .add(&t(Variable::W(0), 8))
            .unwrap();
        let pair = SeriesPair::new(g.scale(&GaussianRational::from(5)), g).unwrap();
        let cert = verify_lemma(&pair, &heisenberg(8), 7).unwrap();
        assert_eq!(cert.outcome, Outcome::ConstantFound);
        assert_eq!(cert.constant, Some(GaussianRational::from(5)));
        assert!(cert.is_real && cert.is_nonzero);
        assert_eq!(cert.coordinate_identities.len(), 3);
        assert!(cert.steps().all(|s| s.residual.is_zero()));
        assert_eq!(cert.ratio_precision, Some(7));
    }

    #[test]
    fn heisenberg_w_defect() {
        let cert = verify_real_constant(&t(Variable::W(0), 8), &heisenberg(8), 7).unwrap();
        let Outcome::DefectNonzero(w) = &cert.outcome else {
            panic!("{:?}", cert.outcome)
        };
        assert_eq!(w.monomial(), "z1*zeta1");
        assert!(cert.finite_type.is_none());
    }

    #[test]
    fn levi_flat_not_finite_type() {
        let cert = verify_real_constant(&t(Variable::W(0), 8), &levi_flat(8), 7).unwrap();
        assert!(cert.defect.is_zero());
        assert_eq!(
            cert.outcome,
            Outcome::NotFiniteType {
                max_depth_reached: 7
            }
        );
    }

    #[test]
    fn constant_real_function() {
        let f = one(8).scale(&GaussianRational::from(7));
        let cert = verify_real_constant(&f, &heisenberg(8), 7).unwrap();
        assert_eq!(cert.constant, Some(GaussianRational::from(7)));
    }

    #[test]
    fn meromorphic_pair_on_k2_model() {
        let g = t(Variable::Z(0), 16)
            .add(&t(Variable::W(0), 16).pow(2).unwrap())
            .unwrap();
        let c = GaussianRational::from_ratio(-3, 4);
        let pair = SeriesPair::new(g.scale(&c), g).unwrap();
        let cert = verify_lemma(&pair, &power_model(2, 16), 15).unwrap();
        assert_eq!(cert.outcome, Outcome::ConstantFound);
        assert_eq!(cert.constant, Some(c));
    }

    #[test]
    fn low_precision_is_reported_with_stage() {
        let g = t(Variable::Z(0), 8).pow(2).unwrap();
        let pair = SeriesPair::new(g.clone(), g).unwrap();
        let cert = verify_lemma(&pair, &power_model(2, 8), 7).unwrap();
        assert!(
            matches!(cert.outcome, Outcome::InsufficientPrecision { .. }),
            "{:?}",
            cert.outcome
        );
    }
}
