use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate vertex: all quadratic coefficients vanish")]
    DegenerateVertex,
    #[error("degenerate quadratic: leading and linear coefficients vanish")]
    DegenerateQuadratic,
    #[error("no real root: discriminant below tolerance")]
    NoRealRoot,
    #[error("cosine out of range")]
    OutOfRange,
    #[error("dependent dihedral system unsolvable")]
    Unsolvable,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("triangle inequality violated on face {0}")]
    TriangleViolation(usize),
    #[error("no valid completion for this parameter set")]
    NoCompletion,
    #[error("no valid root at recursion stage {0}")]
    RealizabilityFailure(usize),
    #[error("invalid parameter set: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("no real root at vertex {0}: flexion value outside range for this folding")]
    NoRealRoot(usize),
    #[error("degenerate configuration at vertex {0}")]
    Degenerate(usize),
    #[error("embedding does not match the sub-type coordinate model (residual {0:.3e})")]
    ModelMismatch(f64),
    #[error("sub-type has no symmetric completion rule")]
    NoSymmetryRule,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlexError {
    #[error("construction failed: {0}")]
    Construct(#[from] ConstructError),
    #[error("singular derivative at vertex {0}: flexion range endpoint")]
    SingularDerivative(usize),
    #[error("no flexion value admits this folding")]
    NotFlexible,
    #[error("trace step too coarse: dihedral jump {0:.3} rad between samples")]
    AliasWarning(f64),
}
