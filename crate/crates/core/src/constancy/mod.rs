//! Constancy certificates for pairs satisfying the reality identity.
//!
//! Given `f, g ∈ ℂ[[t]]` with `f(t)ḡ(τ) − g(t)f̄(τ) ≡ 0` on `𝓜`, the pipeline
//! derives `f·Xg − g·Xf ≡ 0` for the generators, propagates it through Lie
//! brackets, inverts a spanning bracket frame to reach every coordinate
//! derivative, and reads off `f = c·g` by comparing grlex leading terms.
//! Every identity is computed, checked, and stored with the degree bound the
//! argument certifies.

mod frame;
mod pipeline;
mod ratio;
mod wronskian;

pub use frame::{invert_bracket_frame, solve_unit_systems, FrameInverse};
pub use pipeline::{verify_lemma, verify_real_constant, ConstancyCertificate, Outcome};
pub use ratio::{
    ratio_constant, ratio_trace, InductionStep, InductionTrace, NotProportional, Ratio,
};
pub use wronskian::{
    bracket_closure, coordinate_identities, first_order_identities, leibniz_bracket_identity,
    leibniz_residual, reality_defect, StepKind, Subject, WronskianIdentity,
};

use crate::error::{Error, Result};
use crate::series::{FrameKind, TruncatedSeries, VariableFrame};

/// The pair `(f, g)` of T-frame series, truncated to a shared precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesPair {
    f: TruncatedSeries,
    g: TruncatedSeries,
}

impl SeriesPair {
    pub fn new(f: TruncatedSeries, g: TruncatedSeries) -> Result<Self> {
        for s in [&f, &g] {
            if s.frame().kind() != FrameKind::T {
                return Err(Error::FrameMismatch(
                    VariableFrame::t(s.frame().m(), s.frame().d()),
                    s.frame(),
                ));
            }
        }
        if f.frame() != g.frame() {
            return Err(Error::FrameMismatch(f.frame(), g.frame()));
        }
        let n = f.precision().min(g.precision());
        let (f, g) = (f.truncate(n)?, g.truncate(n)?);
        if f.is_zero() {
            return Err(Error::ZeroSeries("f"));
        }
        if g.is_zero() {
            return Err(Error::ZeroSeries("g"));
        }
        Ok(Self { f, g })
    }

    pub fn f(&self) -> &TruncatedSeries {
        &self.f
    }

    pub fn g(&self) -> &TruncatedSeries {
        &self.g
    }

    pub fn precision(&self) -> usize {
        self.f.precision()
    }

    pub fn frame(&self) -> VariableFrame {
        self.f.frame()
    }

    pub(crate) fn intrinsic(&self) -> Result<(TruncatedSeries, TruncatedSeries)> {
        let fr = VariableFrame::intrinsic(self.frame().m(), self.frame().d());
        Ok((self.f.reframe(fr)?, self.g.reframe(fr)?))
    }
}
