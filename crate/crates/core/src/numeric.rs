//! Compensated summation over any `Float`.

use num_complex::Complex;
use num_traits::Float;

/// Kahan-Babuska (Neumaier) running sum.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<R> {
    sum: R,
    comp: R,
}

impl<R: Float> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Float> KahanSum<R> {
    pub fn new() -> Self {
        KahanSum { sum: R::zero(), comp: R::zero() }
    }

    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

/// Componentwise compensated sum of complex terms.
#[derive(Debug, Clone, Copy)]
pub struct ComplexSum<R> {
    re: KahanSum<R>,
    im: KahanSum<R>,
}

impl<R: Float> Default for ComplexSum<R> {
    fn default() -> Self {
        ComplexSum { re: KahanSum::new(), im: KahanSum::new() }
    }
}

impl<R: Float> ComplexSum<R> {
    pub fn add(&mut self, z: Complex<R>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex<R> {
        Complex::new(self.re.value(), self.im.value())
    }
}
