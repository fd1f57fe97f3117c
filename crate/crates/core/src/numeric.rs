//! Small numerical helpers shared by the evaluators.

/// Neumaier-compensated accumulator that also tracks `Σ |x|`, from which a
/// cancellation estimate is derived.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs
    }

    /// `Σ|x| / max(|Σx|, 1)`: the amplification of rounding errors relative
    /// to the unit scale of a probability.
    pub fn condition(&self) -> f64 {
        self.abs / self.value().abs().max(1.0)
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `Γ(a - x) / Γ(b - x)` for integers `a`, `b`, as a finite product of
/// `(q - x)` factors. Never touches the Gamma function itself, so negative
/// arguments need no reflection.
pub fn gamma_ratio(a: i64, b: i64, x: f64) -> f64 {
    if a >= b {
        (b..a).map(|q| q as f64 - x).product()
    } else {
        1.0 / (a..b).map(|q| q as f64 - x).product::<f64>()
    }
}

/// `n!` as a float.
pub fn factorial(n: u64) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
