//! Compensated summation.
//!
//! All lattice sums in this crate accumulate through [`NeumaierSum`] in a
//! canonical term order, so serial and parallel evaluations produce
//! bit-identical results once the term lists agree.

/// Kahan summation with Neumaier's correction (handles terms larger than
/// the running sum).
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Sum a slice front to back with compensation.
pub fn compensated_sum(terms: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for &t in terms {
        acc.add(t);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        let mut acc = NeumaierSum::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn beats_naive_on_small_terms() {
        let terms: Vec<f64> = (0..100_000).map(|k| 0.1 + 1e-14 * k as f64).collect();
        let naive: f64 = terms.iter().sum();
        let comp = compensated_sum(&terms);
        let exact = 0.1 * 1e5 + 1e-14 * (99_999.0 * 100_000.0 / 2.0);
        assert!((comp - exact).abs() <= (naive - exact).abs());
    }
}
