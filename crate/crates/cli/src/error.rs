use std::fmt;

use warpgeom::catalog::CatalogError;
use warpgeom::expr::ParseError;
use warpgeom::hypersurface::HypersurfaceError;
use warpgeom::warp::WarpError;

/// Exit code when every requested check passed (or no checks ran).
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed or inconsistent input.
    Input(String),
    /// The input was well formed but evaluating it failed.
    Eval(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Eval(_) => EXIT_EVAL,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Eval(m) => write!(f, "evaluation error: {m}"),
        }
    }
}

/// Parse error message with the source and a caret under the offending character.
pub fn parse_error(what: &str, src: &str, e: &ParseError) -> CliError {
    let col = src.chars().take(e.position).map(|c| c.len_utf8()).sum::<usize>();
    let pad = " ".repeat(src[..col.min(src.len())].chars().count());
    CliError::Input(format!("{what}: {e}\n  {src}\n  {pad}^"))
}

impl From<WarpError> for CliError {
    fn from(e: WarpError) -> Self {
        match e {
            WarpError::Eval { .. } | WarpError::NonPositiveWarp { .. } => CliError::Eval(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<HypersurfaceError> for CliError {
    fn from(e: HypersurfaceError) -> Self {
        use HypersurfaceError as H;
        match e {
            H::Warp(w) => w.into(),
            H::Eval { .. } | H::LeavesInterval { .. } | H::NotSpacelike { .. } | H::Radial { .. } => {
                CliError::Eval(e.to_string())
            }
            H::NotMaximal { .. } | H::NccViolated { .. } => CliError::Eval(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Warp(w) => w.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}
