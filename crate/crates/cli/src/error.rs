//! Maps library errors onto the process exit codes.

use std::fmt;

use blockdesign::{
    BoundError, DesignError, FieldError, GeometryError, SpectralError, TriangleError,
};

/// Process exit codes.
pub mod code {
    pub const SUCCESS: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const HYPOTHESIS_UNMET: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const CEILING: u8 = 4;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: code::VALIDATION,
            message: message.into(),
        }
    }

    fn classified(code: u8, err: &impl fmt::Display) -> Self {
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn field_code(e: &FieldError) -> u8 {
    match e {
        FieldError::TooLarge { .. } => code::CEILING,
        _ => code::VALIDATION,
    }
}

fn geometry_code(e: &GeometryError) -> u8 {
    match e {
        GeometryError::TooLarge(_) | GeometryError::Overflow => code::CEILING,
        GeometryError::Field(f) => field_code(f),
        _ => code::VALIDATION,
    }
}

fn design_code(e: &DesignError) -> u8 {
    match e {
        DesignError::TooLarge(_) => code::CEILING,
        DesignError::Geometry(g) => geometry_code(g),
        _ => code::VALIDATION,
    }
}

fn bound_code(e: &BoundError) -> u8 {
    match e {
        BoundError::TooManySubsets { .. } => code::CEILING,
        BoundError::Design(d) => design_code(d),
        BoundError::Geometry(g) => geometry_code(g),
        _ => code::VALIDATION,
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::classified(field_code(&e), &e)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::classified(geometry_code(&e), &e)
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        CliError::classified(design_code(&e), &e)
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        let code = match e {
            SpectralError::TooLarge(_) => code::CEILING,
            _ => code::VALIDATION,
        };
        CliError::classified(code, &e)
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::classified(bound_code(&e), &e)
    }
}

impl From<TriangleError> for CliError {
    fn from(e: TriangleError) -> Self {
        let code = match &e {
            TriangleError::TooSmall { .. } => code::HYPOTHESIS_UNMET,
            TriangleError::Field(f) => field_code(f),
            TriangleError::Geometry(g) => geometry_code(g),
            TriangleError::Design(d) => design_code(d),
            TriangleError::Bound(b) => bound_code(b),
            _ => code::VALIDATION,
        };
        CliError::classified(code, &e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(e.to_string())
    }
}
