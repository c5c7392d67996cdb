//! Special functions used by the amplitude and matrix-element code: Bessel
//! functions of integer order, the drive renormalization factors Z_n, and
//! generalized Laguerre polynomials.

use num_complex::Complex64;

/// Relative size of the last series term kept.
const SERIES_CUTOFF: f64 = 1e-18;
const MAX_TERMS: usize = 200;

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Series Σ_k (−1)^k (x/2)^{2k} n!/(k!(k+n)!), i.e. J_n(x)·2ⁿn!/xⁿ.
///
/// Evaluated term by term so that x = 0 is regular.
fn reduced_series(n: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        term *= -q / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() <= SERIES_CUTOFF * sum.abs() {
            break;
        }
    }
    sum
}

/// Bessel function of the first kind J_n(x), ascending power series.
///
/// Accurate to ~1e-15 for |x| ≤ 4, which covers every drive amplitude the
/// rate formulas accept (argument a or a/2 with a < 2).
pub fn bessel_j(n: u32, x: f64) -> f64 {
    (0.5 * x).powi(n as i32) / factorial(n) * reduced_series(n, x)
}

/// Drive renormalization factor Z_n(a) = J_n(a)·2ⁿ n!/aⁿ, with Z_n(0) = 1.
pub fn z_factor(n: u32, a: f64) -> f64 {
    reduced_series(n, a)
}

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) by upward recurrence.
pub fn laguerre(n: u32, alpha: u32, x: f64) -> f64 {
    let alpha = alpha as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
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

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex terms, real and imaginary parts independently.
pub fn complex_sum<I: IntoIterator<Item = Complex64>>(terms: I) -> Complex64 {
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for z in terms {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}
