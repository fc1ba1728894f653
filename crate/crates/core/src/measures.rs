//! Finitely represented probability measures on the real line.
//!
//! A [`Measure`] is a finite list of weighted atoms plus a finite list of
//! weighted uniform pieces. That class keeps the CDF piecewise affine, so the
//! CDF, the quantile function, the `L^1` distance between CDFs and the
//! characteristic function all have closed forms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance on the total mass for measures built in code.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-12;
/// Tolerance on the total mass for measures loaded from documents.
pub const LOAD_TOLERANCE: f64 = 1e-9;

/// Below this value of `|2 pi t (hi - lo)|` the piece transform switches to a
/// Taylor expansion of `sin(z)/z`.
const SMALL_ARGUMENT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::real")]
    pub x: f64,
    #[serde(with = "crate::real")]
    pub w: f64,
}

/// Mass `w` spread uniformly over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "crate::real")]
    pub lo: f64,
    #[serde(with = "crate::real")]
    pub hi: f64,
    #[serde(with = "crate::real")]
    pub w: f64,
}

impl Piece {
    pub fn density(&self) -> f64 {
        self.w / (self.hi - self.lo)
    }
}

/// On-disk form of a measure.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MeasureDoc {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub pieces: Vec<Piece>,
}

/// Piecewise representation of `x -> mu((-inf, x])`.
///
/// Between consecutive breakpoints the CDF is affine with slope `density[i]`;
/// at a breakpoint it jumps by the atom weight located there.
#[derive(Debug, Clone)]
pub struct Cdf {
    breakpoints: Vec<f64>,
    /// Right-continuous value at each breakpoint.
    at: Vec<f64>,
    /// Left limit at each breakpoint.
    left: Vec<f64>,
    /// Slope on `(breakpoints[i], breakpoints[i + 1])`; the last entry is 0.
    density: Vec<f64>,
}

impl Cdf {
    fn build(atoms: &[Atom], pieces: &[Piece]) -> Cdf {
        let mut breakpoints: Vec<f64> = atoms
            .iter()
            .map(|a| a.x)
            .chain(pieces.iter().flat_map(|p| [p.lo, p.hi]))
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let k = breakpoints.len();
        let mut jump = vec![0.0; k];
        for a in atoms {
            let i = breakpoints.partition_point(|&b| b < a.x);
            jump[i] += a.w;
        }
        let mut density = vec![0.0; k];
        for i in 0..k.saturating_sub(1) {
            let (l, r) = (breakpoints[i], breakpoints[i + 1]);
            density[i] = pieces
                .iter()
                .filter(|p| p.lo <= l && r <= p.hi)
                .map(Piece::density)
                .sum();
        }

        let mut at = vec![0.0; k];
        let mut left = vec![0.0; k];
        for i in 0..k {
            left[i] = if i == 0 {
                0.0
            } else {
                (at[i - 1] + density[i - 1] * (breakpoints[i] - breakpoints[i - 1])).min(1.0)
            };
            at[i] = (left[i] + jump[i]).min(1.0);
        }
        if let Some(last) = at.last_mut() {
            *last = 1.0;
        }
        Cdf {
            breakpoints,
            at,
            left,
            density,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `mu((-inf, x])`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breakpoints.partition_point(|&b| b <= x);
        if n == 0 {
            return 0.0;
        }
        let i = n - 1;
        self.segment_value(i, x)
    }

    /// `mu((-inf, x))`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let n = self.breakpoints.partition_point(|&b| b < x);
        if n == 0 {
            return 0.0;
        }
        self.segment_value(n - 1, x)
    }

    fn segment_value(&self, i: usize, x: f64) -> f64 {
        if x == self.breakpoints[i] {
            return self.at[i];
        }
        let v = self.at[i] + self.density[i] * (x - self.breakpoints[i]);
        match self.left.get(i + 1) {
            Some(&cap) => v.min(cap),
            None => v.min(1.0),
        }
    }

    /// Smallest `x` with `eval(x) >= y`.
    fn quantile(&self, y: f64) -> f64 {
        let i = self.at.partition_point(|&f| f < y);
        if i == 0 {
            return self.breakpoints[0];
        }
        // y lies in (at[i-1], at[i]]
        if self.left[i] >= y && self.density[i - 1] > 0.0 {
            let (x0, x1) = (self.breakpoints[i - 1], self.breakpoints[i]);
            let mut x = (x0 + (y - self.at[i - 1]) / self.density[i - 1]).clamp(x0, x1);
            while x < x1 && self.eval(x) < y {
                x = x.next_up();
            }
            while x > x0 && self.eval(x.next_down()) >= y {
                x = x.next_down();
            }
            x
        } else {
            self.breakpoints[i]
        }
    }
}

/// A probability measure made of atoms and uniform pieces.
///
/// Components are kept in a normal form: atoms sorted by location, pieces
/// sorted lexicographically, `-0.0` replaced by `0.0`, weights renormalized to
/// sum to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc", into = "MeasureDoc")]
pub struct Measure {
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
    cdf: Cdf,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.pieces == other.pieces
    }
}

impl TryFrom<MeasureDoc> for Measure {
    type Error = Error;

    fn try_from(doc: MeasureDoc) -> Result<Measure> {
        Measure::with_tolerance(doc.atoms, doc.pieces, LOAD_TOLERANCE)
    }
}

impl From<Measure> for MeasureDoc {
    fn from(m: Measure) -> MeasureDoc {
        MeasureDoc {
            atoms: m.atoms,
            pieces: m.pieces,
        }
    }
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, pieces: Vec<Piece>) -> Result<Measure> {
        Self::with_tolerance(atoms, pieces, CONSTRUCTION_TOLERANCE)
    }

    fn with_tolerance(mut atoms: Vec<Atom>, mut pieces: Vec<Piece>, tol: f64) -> Result<Measure> {
        if atoms.is_empty() && pieces.is_empty() {
            return Err(Error::validation("measure has no atoms and no pieces"));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !a.x.is_finite() {
                return Err(Error::validation(format!("atoms[{i}].x is not finite")));
            }
            if !(a.w.is_finite() && a.w > 0.0) {
                return Err(Error::validation(format!("atoms[{i}].w must be positive")));
            }
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(Error::validation(format!(
                    "pieces[{i}] needs finite lo < hi"
                )));
            }
            if !(p.w.is_finite() && p.w > 0.0) {
                return Err(Error::validation(format!("pieces[{i}].w must be positive")));
            }
        }
        let total: f64 = atoms
            .iter()
            .map(|a| a.w)
            .chain(pieces.iter().map(|p| p.w))
            .sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::validation(format!(
                "weights sum to {total}, expected 1 within {tol:e}"
            )));
        }

        // a sum within rounding of 1 is left alone so renormalization is idempotent
        let components = (atoms.len() + pieces.len()) as f64;
        let scale = if (total - 1.0).abs() <= 2.0 * components * f64::EPSILON {
            1.0
        } else {
            total
        };
        for a in &mut atoms {
            a.x = clean_zero(a.x);
            a.w /= scale;
        }
        for p in &mut pieces {
            p.lo = clean_zero(p.lo);
            p.hi = clean_zero(p.hi);
            p.w /= scale;
        }
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        if let Some(pair) = atoms.windows(2).find(|w| w[0].x == w[1].x) {
            return Err(Error::validation(format!(
                "duplicate atom location {}",
                pair[0].x
            )));
        }
        pieces.sort_by(|a, b| {
            a.lo.total_cmp(&b.lo)
                .then(a.hi.total_cmp(&b.hi))
                .then(a.w.total_cmp(&b.w))
        });
        let cdf = Cdf::build(&atoms, &pieces);
        Ok(Measure { atoms, pieces, cdf })
    }

    /// Dirac mass at `x`.
    pub fn dirac(x: f64) -> Measure {
        Measure::new(vec![Atom { x, w: 1.0 }], vec![]).expect("finite location")
    }

    /// Uniform probability on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Measure {
        Measure::new(vec![], vec![Piece { lo, hi, w: 1.0 }]).expect("finite lo < hi")
    }

    /// Lebesgue measure on `[0, 1]`.
    pub fn lebesgue() -> Measure {
        Measure::uniform(0.0, 1.0)
    }

    pub fn from_json_str(s: &str) -> Result<Measure> {
        let doc: MeasureDoc = serde_json::from_str(s)
            .map_err(|e| Error::validation(format!("measure document: {e}")))?;
        Measure::try_from(doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure serializes")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn cdf_table(&self) -> &Cdf {
        &self.cdf
    }

    /// Smallest interval containing the support.
    pub fn support_hull(&self) -> (f64, f64) {
        let b = self.cdf.breakpoints();
        (b[0], b[b.len() - 1])
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum::<f64>() + self.pieces.iter().map(|p| p.w).sum::<f64>()
    }

    /// `mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf.eval(x)
    }

    /// Generalized inverse `min { x : cdf(x) >= y }`.
    ///
    /// For `y = 0` this returns the left end of the support hull.
    pub fn quantile(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::domain(format!("quantile level {y} outside [0, 1]")));
        }
        Ok(self.cdf.quantile(y))
    }

    /// `mu^(t) = integral of exp(2 pi i x t) d mu(x)`.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.w * unit_phase(a.x * t);
        }
        for p in &self.pieces {
            let mid = 0.5 * (p.lo + p.hi);
            let z = PI * t * (p.hi - p.lo);
            acc += p.w * sinc(z) * unit_phase(mid * t);
        }
        acc
    }

    /// Reflection through the origin.
    pub fn opposite(&self) -> Measure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { x: -a.x, w: a.w })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: -p.hi,
                hi: -p.lo,
                w: p.w,
            })
            .collect();
        Measure::new(atoms, pieces).expect("reflection preserves validity")
    }

    /// `(mu + mu^op + delta_{log q} + delta_{-log q}) / 4`.
    pub fn symmetrize(&self, q: f64) -> Result<Measure> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("q = {q} outside (0, 1)")));
        }
        let l = q.ln();
        mix(
            &[0.25; 4],
            &[
                self.clone(),
                self.opposite(),
                Measure::dirac(l),
                Measure::dirac(-l),
            ],
        )
    }

    /// `n` draws `quantile(u_i)` with `u_i` uniform on `[0, 1)` from a
    /// ChaCha8 stream seeded by `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.cdf.quantile(rng.gen::<f64>()))
            .collect()
    }

    /// Grid suprema of `|mu^|` over each band.
    ///
    /// These are lower estimates of the true suprema. The default grid step is
    /// `1 / (64 * width)` for a band of width `width`.
    pub fn decay_profile(&self, bands: &[(f64, f64)], step: Option<f64>) -> Result<Vec<f64>> {
        if bands.is_empty() {
            return Err(Error::validation("decay profile needs at least one band"));
        }
        bands
            .iter()
            .map(|&(lo, hi)| {
                if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
                    return Err(Error::validation(format!("invalid band ({lo}, {hi})")));
                }
                let h = step.unwrap_or(1.0 / (64.0 * (hi - lo)));
                if !(h.is_finite() && h > 0.0) {
                    return Err(Error::validation(format!("invalid grid step {h}")));
                }
                let n = ((hi - lo) / h).ceil() as usize;
                Ok((0..=n)
                    .map(|k| (lo + k as f64 * h).min(hi))
                    .map(|t| self.char_fn(t).norm())
                    .fold(0.0, f64::max))
            })
            .collect()
    }
}

/// `exp(2 pi i u)` with `u` first reduced modulo 1.
pub(crate) fn unit_phase(u: f64) -> Complex64 {
    let frac = u - u.round();
    let (s, c) = (2.0 * PI * frac).sin_cos();
    Complex64::new(c, s)
}

/// `sin(z)/z`.
fn sinc(z: f64) -> f64 {
    if (2.0 * z).abs() < SMALL_ARGUMENT {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0))
    } else {
        z.sin() / z
    }
}

/// Exact `integral |F_mu - F_eta|`, equal to `||phi_mu - phi_eta||_1`.
///
/// Both CDFs are affine between merged breakpoints, so each segment is
/// integrated in closed form, splitting at a sign change.
pub fn l1_quantile_distance(mu: &Measure, eta: &Measure) -> f64 {
    let mut pts: Vec<f64> = mu
        .cdf
        .breakpoints()
        .iter()
        .chain(eta.cdf.breakpoints())
        .copied()
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let g0 = mu.cdf(a) - eta.cdf(a);
            let g1 = mu.cdf.eval_left(b) - eta.cdf.eval_left(b);
            abs_affine_integral(g0, g1, b - a)
        })
        .sum()
}

/// `integral_0^h |g|` for `g` affine from `g0` to `g1`.
fn abs_affine_integral(g0: f64, g1: f64, h: f64) -> f64 {
    if g0 * g1 >= 0.0 {
        0.5 * (g0.abs() + g1.abs()) * h
    } else {
        0.5 * h * (g0 * g0 + g1 * g1) / (g0.abs() + g1.abs())
    }
}

/// Convex combination `sum_i weights[i] * parts[i]`.
pub fn mix(weights: &[f64], parts: &[Measure]) -> Result<Measure> {
    if weights.len() != parts.len() {
        return Err(Error::validation(format!(
            "{} weights for {} measures",
            weights.len(),
            parts.len()
        )));
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::validation(format!(
            "weight {i} must be non-negative"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > CONSTRUCTION_TOLERANCE {
        return Err(Error::validation(format!("mixture weights sum to {total}")));
    }
    let mut atoms: Vec<Atom> = Vec::new();
    let mut pieces = Vec::new();
    for (&c, m) in weights.iter().zip(parts) {
        if c == 0.0 {
            continue;
        }
        atoms.extend(m.atoms.iter().map(|a| Atom { x: a.x, w: c * a.w }));
        pieces.extend(m.pieces.iter().map(|p| Piece { w: c * p.w, ..*p }));
    }
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    atoms.dedup_by(|next, kept| {
        if next.x == kept.x {
            kept.w += next.w;
            true
        } else {
            false
        }
    });
    Measure::new(atoms, pieces)
}
