use serde::Serialize;

/// A leading-order probability estimate clamped to `[0, 1]`, keeping the
/// unclamped value for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probability {
    pub value: f64,
    pub unclamped: f64,
}

impl Probability {
    pub fn clamp(unclamped: f64) -> Self {
        Self {
            value: unclamped.clamp(0.0, 1.0),
            unclamped,
        }
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.unclamped
    }
}
