//! Compensated (Kahan–Babuška–Neumaier) accumulators.
//!
//! Every series evaluation in this crate adds terms in ascending index order
//! through one of these, so results do not depend on thread count.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Real and imaginary parts compensated independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexKahanSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `n^{-s}` for `n >= 1` given `ln n`.
#[inline]
pub(crate) fn pow_neg(ln_n: f64, s: Complex64) -> Complex64 {
    let mag = (-s.re * ln_n).exp();
    if s.im == 0.0 {
        return Complex64::new(mag, 0.0);
    }
    let (sin, cos) = (s.im * ln_n).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}
