use serde::Serialize;

/// Outcome of a pointwise inequality check: the worst signed violation,
/// where it happened, and the verdict at the tolerance in force.
///
/// `max_violation > 0` means the inequality was broken somewhere;
/// the verdict passes iff `max_violation <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    /// Maximal signed violation across all checked nodes (positive = violated).
    pub max_violation: f64,
    /// Node index where the maximal violation occurs.
    pub argmax: usize,
    /// Tolerance actually used for the verdict (may have been degraded,
    /// e.g. under an unmet anti-aliasing precondition).
    pub tolerance: f64,
    pub pass: bool,
    pub metadata: CheckMetadata,
    /// Secondary scalar observations (e.g. mass deviation, aliasing residual),
    /// keyed by name. Purely informational.
    pub details: Vec<(String, f64)>,
}

impl InequalityReport {
    pub fn new(max_violation: f64, argmax: usize, tolerance: f64, metadata: CheckMetadata) -> Self {
        Self {
            max_violation,
            argmax,
            tolerance,
            pass: max_violation <= tolerance,
            metadata,
            details: Vec::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.push((key.to_string(), value));
        self
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

/// Identifies what was checked, for ledgers and logs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckMetadata {
    pub module: String,
    pub operation: String,
    /// Operator description, e.g. "torus multiplier" or "disk DN".
    pub operator: String,
    pub alpha: Option<f64>,
    pub phi: Option<String>,
    pub field_id: Option<String>,
    pub notes: Vec<String>,
}

impl CheckMetadata {
    pub fn new(module: &str, operation: &str) -> Self {
        Self {
            module: module.to_string(),
            operation: operation.to_string(),
            ..Self::default()
        }
    }

    pub fn operator(mut self, operator: &str) -> Self {
        self.operator = operator.to_string();
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn phi(mut self, phi: &str) -> Self {
        self.phi = Some(phi.to_string());
        self
    }

    pub fn field_id(mut self, id: &str) -> Self {
        self.field_id = Some(id.to_string());
        self
    }

    pub fn note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}
