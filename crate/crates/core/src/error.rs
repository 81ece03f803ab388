use std::fmt;

use thiserror::Error;

use crate::series::{VariableFrame, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("frame mismatch: {0} vs {1}")]
    FrameMismatch(VariableFrame, VariableFrame),
    #[error("exponent arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("precision underflow")]
    PrecisionUnderflow,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("variable index {index} out of range for frame {frame}")]
    VariableOutOfRange { index: usize, frame: VariableFrame },
    #[error("variable {name} does not exist in frame {frame}")]
    VariableNotInFrame { name: String, frame: VariableFrame },
    #[error("substitution for {name} has a nonzero constant term")]
    ConstantTermSubstitution { name: String },
    #[error("wrong number of substitutions: expected {expected}, got {got}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("conjugate_swap is not defined on frame {0}")]
    UnsupportedFrame(VariableFrame),
    #[error("degree {degree} is not below precision {precision}")]
    DegreeTooHigh { degree: u32, precision: usize },
    #[error("cancellation factor vanishes to available precision {precision}")]
    ZeroFactor { precision: usize },
    #[error("cancellation factor order {order} is not below precision {precision}")]
    FactorOrderTooLarge { order: u32, precision: usize },
    #[error("series expected to vanish has nonzero term {0}")]
    NotZero(Box<Witness>),
    #[error("invalid dimensions m = {m}, d = {d}")]
    InvalidDimensions { m: usize, d: usize },
    #[error("expected {expected} defining series, got {got}")]
    ThetaCount { expected: usize, got: usize },
    #[error("theta{equation} has a nonzero constant term: the origin is not on the manifold")]
    OriginNotOnManifold { equation: usize },
    #[error("theta{equation} is not normalized: {reason}")]
    NormalizationFailure { equation: usize, reason: String },
    #[error("involution identity fails for theta{equation}: first offending term {witness}")]
    InvolutionFailure { equation: usize, witness: Box<Witness> },
    #[error("{0} is identically zero to the available precision")]
    ZeroSeries(&'static str),
    #[error("reality identity does not hold: first offending term {0}")]
    HypothesisNotSatisfied(Box<Witness>),
    #[error("bracket frame is singular at the origin")]
    SingularFrame,
    #[error("bracket frame has {got} words, expected {expected}")]
    FrameSize { expected: usize, got: usize },
    #[error("generator index {0} out of range")]
    GeneratorOutOfRange(usize),
    #[error("insufficient precision at stage {0}")]
    InsufficientPrecision(Stage),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Stages of the constancy pipeline, used to locate precision exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Defect,
    FiniteType,
    FirstOrder,
    BracketClosure,
    FrameInversion,
    CoordinateIdentities,
    Ratio,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Defect => "defect",
            Stage::FiniteType => "finite_type",
            Stage::FirstOrder => "first_order",
            Stage::BracketClosure => "bracket_closure",
            Stage::FrameInversion => "frame_inversion",
            Stage::CoordinateIdentities => "coordinate_identities",
            Stage::Ratio => "ratio",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
