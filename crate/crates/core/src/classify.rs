//! Class membership detection with extracted parameters, shared by the
//! dispatcher and the report layer.

use serde::Serialize;

use crate::circulant::{detect_circulant, CirculantCoeffs};
use crate::diagnostics::structure_flags;
use crate::equalinput::{detect_equal_input, EqualInputParams};
use crate::matcore::StochasticMatrix;

/// Detected membership in the structured matrix classes.
#[derive(Debug, Clone, Serialize)]
pub struct ClassTags {
    pub equal_input: Option<EqualInputParams>,
    pub constant_input: bool,
    pub circulant: Option<CirculantCoeffs>,
    pub symmetric: bool,
    pub doubly_stochastic: bool,
}

impl ClassTags {
    /// Short tag list for report headers.
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.constant_input {
            out.push("constant_input");
        } else if self.equal_input.is_some() {
            out.push("equal_input");
        }
        if self.circulant.is_some() {
            out.push("circulant");
        }
        if self.symmetric {
            out.push("symmetric");
        }
        if self.doubly_stochastic {
            out.push("doubly_stochastic");
        }
        out
    }
}

/// Runs all detectors at the given tolerance.
pub fn classify(m: &StochasticMatrix, tol: f64) -> ClassTags {
    let equal_input = detect_equal_input(m, tol);
    let constant_input = equal_input.as_ref().is_some_and(|p| p.constant_input);
    let flags = structure_flags(m);
    ClassTags {
        equal_input,
        constant_input,
        circulant: detect_circulant(m, tol),
        symmetric: flags.symmetric,
        doubly_stochastic: flags.doubly_stochastic,
    }
}
