//! Neumaier compensated summation.

/// Running error-free-transformation sum. The compensation term recovers the
/// low-order bits lost on each add, which matters for the alternating
/// binomial expansions in the central-moment path.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
        self.abs += v.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Σ|vᵢ|, for rounding-error estimates.
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}
