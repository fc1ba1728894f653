//! Reference computations used to cross-check the closed-form routes.
//!
//! Nothing here calls into the fast paths it is meant to check: quadrature
//! replaces exact segment integration, a double-double accumulator replaces
//! the padded product, and the dyadic series is re-derived from the metric
//! definition term by term.

use std::f64::consts::PI;

use crate::product_measures::ParamSeq;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite quadrature over the pieces `[cuts[i], cuts[i + 1]]`.
pub fn piecewise_simpson<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], tol: f64) -> f64 {
    let pieces = cuts.len().saturating_sub(1).max(1) as f64;
    cuts.windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol / pieces, 50))
        .sum()
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        DoubleDouble {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    pub fn plus(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn negated(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn times(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `prod_{n <= terms} (1 - a_n (1 - cos(2 pi t 2^-n)))` accumulated in
/// double-double arithmetic.
pub fn char_fn_product_reference(a: &ParamSeq, t: f64, terms: usize) -> f64 {
    let one = DoubleDouble::from_f64(1.0);
    let mut acc = one;
    for n in 0..=terms {
        let u = t / 2f64.powi(n as i32);
        let cos = (2.0 * PI * u.rem_euclid(1.0)).cos();
        let gap = one.plus(DoubleDouble::from_f64(cos).negated());
        let factor = one.plus(DoubleDouble::from_f64(a.at(n)).times(gap).negated());
        acc = acc.times(factor);
    }
    acc.to_f64()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `sum_{n <= terms} a_n dist(2^(m-n), Z)^2` straight from the metric
/// definition.
pub fn dyadic_sq_reference(a: &ParamSeq, m: usize, terms: usize) -> f64 {
    compensated_sum((0..=terms).map(|n| {
        let u = 2f64.powi(m as i32 - n as i32);
        let d = (u - u.floor()).min(u.ceil() - u);
        a.at(n) * d * d
    }))
}

/// Kolmogorov-Smirnov statistic of `samples` against a continuous or
/// discrete CDF `cdf`, with `cdf_left` its left limit.
pub fn ks_statistic<F, G>(samples: &[f64], cdf: F, cdf_left: G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d
            .max((upto - cdf(x)).abs())
            .max((below - cdf_left(x)).abs());
        i = j;
    }
    d
}
