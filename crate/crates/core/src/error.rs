use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A disk point was constructed with norm >= 1.
    #[error("point ({re}, {im}) lies outside the open unit disk")]
    PointOutsideDisk { re: f64, im: f64 },

    /// The module (a, alpha) violates the admissibility bound
    /// a > 1/(sqrt(2) * cos(alpha - pi/4)).
    #[error("inadmissible module: a = {a} must exceed {bound} for alpha = {alpha} (and alpha must lie in (0, pi/2))")]
    InadmissibleModule { a: f64, alpha: f64, bound: f64 },

    /// Requested generation count exceeds the enumeration guard.
    #[error("generation budget exceeded: n = {requested} > guard = {guard} (8*7^(n-1) walks is past the exact-enumeration ceiling)")]
    GenerationBudgetExceeded { requested: u32, guard: u32 },

    /// An index word contains an immediate backtrack |i_t - i_{t-1}| = 4.
    #[error("forbidden word: backtracking pair ({prev}, {next}) at position {position}")]
    ForbiddenWord { prev: u8, next: u8, position: usize },

    /// The Gaussian closed form needs a positive spread parameter.
    #[error("degenerate variance: s^2 = {s2} must be positive")]
    DegenerateVariance { s2: f64 },

    /// The potential is evaluated at (or numerically on top of) a sinh zero.
    #[error("singular radius: sinh(A ln r + C) vanishes near r = {r}")]
    SingularRadius { r: f64 },

    /// The q grid must be uniform, ascending, and hit q = 0 and q = 1
    /// exactly (they anchor the mass-exponent normalization).
    #[error("invalid q grid: {reason}")]
    InvalidQGrid { reason: String },

    /// A word given to the length approximation is empty.
    #[error("empty index word")]
    EmptyWord,

    /// An index word contains a symbol outside 1..=8.
    #[error("index {index} out of range 1..=8 at position {position}")]
    IndexOutOfRange { index: u8, position: usize },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
