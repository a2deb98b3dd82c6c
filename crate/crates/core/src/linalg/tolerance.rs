use super::ComplexMatrix;

/// Mixed relative/absolute comparison threshold.
///
/// Two matrices agree when `‖X − Y‖_F ≤ abs + rel · max(‖X‖_F, ‖Y‖_F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    /// Panics on negative or non-finite components.
    pub fn new(rel: f64, abs: f64) -> Self {
        assert!(rel >= 0.0 && rel.is_finite(), "rel tolerance must be finite and >= 0");
        assert!(abs >= 0.0 && abs.is_finite(), "abs tolerance must be finite and >= 0");
        Self { rel, abs }
    }

    /// Threshold a residual is compared against for data of the given scale.
    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    #[inline]
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.threshold(scale)
    }

    pub fn matrices_close(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> bool {
        if x.shape() != y.shape() {
            return false;
        }
        let scale = x.frobenius_norm().max(y.frobenius_norm());
        self.accepts(x.distance(y), scale)
    }

    pub fn scalars_close(&self, x: f64, y: f64) -> bool {
        self.accepts((x - y).abs(), x.abs().max(y.abs()))
    }

    /// Scales both components by `factor`.
    pub fn loosened(&self, factor: f64) -> Self {
        Self::new(self.rel * factor, self.abs * factor)
    }
}
