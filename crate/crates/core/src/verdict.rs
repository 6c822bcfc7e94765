//! Three-valued embedding verdicts with generator witnesses.

use serde::Serialize;

use crate::matcore::{expm, RateMatrix, SquareMatrix, StochasticMatrix};

/// Which solver produced a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Kendall,
    EqualInput,
    Circulant,
    Symmetric,
    DoublyStochastic,
    BranchSearch,
}

/// A rate matrix Q with exp(Q) verified against the input.
#[derive(Debug, Clone)]
pub struct GeneratorWitness {
    pub provenance: Provenance,
    pub q: RateMatrix,
    /// inf-norm of exp(Q) - M.
    pub residual: f64,
}

impl GeneratorWitness {
    /// Builds a witness, recording the round-trip residual against `m`.
    pub fn new(provenance: Provenance, q: RateMatrix, m: &StochasticMatrix) -> Self {
        let residual = expm(q.matrix(), 1.0).sub(m.matrix()).inf_norm();
        Self {
            provenance,
            q,
            residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Embeddable,
    NotEmbeddable,
    Undecided,
}

/// Result of an embedding decision: the verdict, any generators found, the
/// reasons for a negative verdict, and free-form diagnostics.
#[derive(Debug, Clone)]
pub struct EmbedVerdict {
    pub verdict: Verdict,
    pub generators: Vec<GeneratorWitness>,
    /// For NotEmbeddable: which criteria exclude the matrix.
    pub reasons: Vec<String>,
    pub notes: Vec<String>,
}

impl EmbedVerdict {
    pub fn embeddable(generators: Vec<GeneratorWitness>) -> Self {
        debug_assert!(!generators.is_empty());
        Self {
            verdict: Verdict::Embeddable,
            generators,
            reasons: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn not_embeddable(reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::NotEmbeddable,
            generators: Vec::new(),
            reasons: vec![reason.into()],
            notes: Vec::new(),
        }
    }

    pub fn undecided(note: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Undecided,
            generators: Vec::new(),
            reasons: Vec::new(),
            notes: vec![note.into()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reasons.push(reason.into());
        self
    }

    pub fn is_embeddable(&self) -> bool {
        self.verdict == Verdict::Embeddable
    }

    pub fn is_not_embeddable(&self) -> bool {
        self.verdict == Verdict::NotEmbeddable
    }

    pub fn is_undecided(&self) -> bool {
        self.verdict == Verdict::Undecided
    }

    /// The best (smallest round-trip residual) generator, if any.
    pub fn best_generator(&self) -> Option<&GeneratorWitness> {
        self.generators
            .iter()
            .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
    }
}

/// Convenience for solver code: largest residual allowed before a claimed
/// generator is downgraded.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-8;

/// Helper assembling an Embeddable verdict only when every witness
/// round-trips; otherwise returns Undecided with the failing residual.
pub fn embeddable_checked(
    provenance: Provenance,
    qs: Vec<RateMatrix>,
    m: &StochasticMatrix,
) -> EmbedVerdict {
    let witnesses: Vec<GeneratorWitness> = qs
        .into_iter()
        .map(|q| GeneratorWitness::new(provenance, q, m))
        .collect();
    match witnesses
        .iter()
        .map(|w| w.residual)
        .fold(None::<f64>, |acc, r| Some(acc.map_or(r, |a| a.max(r))))
    {
        Some(worst) if worst <= WITNESS_RESIDUAL_TOL => EmbedVerdict::embeddable(witnesses),
        Some(worst) => EmbedVerdict::undecided(format!(
            "constructed generator failed round-trip verification (residual {worst:.3e})"
        )),
        None => EmbedVerdict::undecided("solver produced no generator"),
    }
}

/// Returns exp(Q) as an unvalidated square matrix (handy in checks).
pub fn exp_of(q: &RateMatrix) -> SquareMatrix {
    expm(q.matrix(), 1.0)
}
