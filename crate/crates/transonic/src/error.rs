use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid gas model: {0}")]
    InvalidGas(String),
    #[error("vacuum bracket: B - |u|^2/2 = {bracket:e} <= 0")]
    VacuumBracket { bracket: f64 },
    #[error("no {branch} root of the branch equation at r = {r}")]
    NoBranchRoot { branch: &'static str, r: f64 },
    #[error("sonic degeneracy at r = {r} (|M - 1| = {gap:e})")]
    SonicDegeneracy { r: f64, gap: f64 },
    #[error("upstream state not supersonic (M = {mach})")]
    NotSupersonic { mach: f64 },
    #[error("exit pressure {p_e} outside the admissible interval ({p_lo}, {p_hi})")]
    ExitPressureOutOfRange { p_e: f64, p_lo: f64, p_hi: f64 },
    #[error("incompatible inlet mode: {0}")]
    IncompatibleMode(String),
    #[error("supersonic march broke down at r = {r}, theta = {theta}, x3 = {x3} (M = {mach})")]
    MarchBreakdown { r: f64, theta: f64, x3: f64, mach: f64 },
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("degenerate J = {j:e} at cross-section node ({j2}, {j3})")]
    DegenerateJ { j: f64, j2: usize, j3: usize },
    #[error("characteristic escaped the cross-section by {excess:e}")]
    CharacteristicEscape { excess: f64 },
    #[error("stagnation floor violated: U + V1 = {value} < {floor}")]
    StagnationFloor { value: f64, floor: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("div-curl solvability violated: |div G| = {residual:e} > {limit:e}")]
    SolvabilityViolation { residual: f64, limit: f64 },
    #[error("modal solve failed for mode ({k}, {l}): {reason}")]
    ModalSolveFailure { k: usize, l: usize, reason: String },
    #[error("superposition closure degenerate for mode ({k}, {l}): coefficient {coef:e}")]
    SuperpositionDegenerate { k: usize, l: usize, coef: f64 },
    #[error("no contraction: ratio above 1 for 3 consecutive iterations (last {ratio})")]
    NoContraction { ratio: f64 },
    #[error("iterate left the trust radius: {norm:e} > {radius:e}")]
    TrustRadius { norm: f64, radius: f64 },
    #[error("shock radius not strictly decreasing in the exit pressure at entry {index} (P_e = {p_e}, r_s = {r_s})")]
    NotMonotone { index: usize, p_e: f64, r_s: f64 },
    #[error("configuration error at `{path}`: {msg}")]
    Config { path: String, msg: String },
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
