use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} amplitudes for two_s = {two_s}, got {found}")]
    LengthMismatch {
        two_s: u32,
        expected: usize,
        found: usize,
    },
    #[error("amplitude vector has zero norm")]
    ZeroVector,
    #[error("spin mismatch: two_s {left} vs {right}")]
    SpinMismatch { left: u32, right: u32 },
    #[error("2m = {two_m} is not a valid projection for two_s = {two_s}")]
    ProjectionOutOfRange { two_s: u32, two_m: i32 },
    #[error("multipole order {order} outside 1..={two_s}")]
    OrderOutOfRange { order: u32, two_s: u32 },
    #[error("constellation has {found} points (plus infinity multiplicity) but two_s = {two_s}")]
    PointCount { two_s: u32, found: usize },
    #[error("state is an eigenstate of the rotation generator; sensitivity is undefined")]
    ZeroVariance,
    #[error("sensitivity ratio is 0/0 at omega = 0; use small_angle_sensitivity")]
    ZeroAngle,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
