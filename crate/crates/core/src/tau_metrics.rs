//! The translation-invariant metrics
//! `d_a(t, s) = (sum_{n >= 0} a_n d_Z(2^-n (t - s))^2)^(1/2)`
//! with certified enclosures, the dyadic-argument series, and the searches
//! that separate the topologies of two such metrics.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bracket::{Bracket, Decision};
use crate::product_measures::{ParamSeq, TailRule, PARAM_MAX};
use crate::slack::pad;

pub const DYADIC_NULL_SCHEMA: &str = "taulab/dyadic-null-report/v1";
pub const SEPARATION_SCHEMA: &str = "taulab/separation-witness/v1";

/// Series terms used for dyadic arguments, i.e. truncation `m + 40` of `d_a`.
pub const DEFAULT_DYADIC_TERMS: usize = 40;
/// Truncation for general arguments.
pub const DEFAULT_TRUNCATION: usize = 60;

/// Distance from `u` to the nearest integer.
pub fn d_z(u: f64) -> f64 {
    (u - u.round()).abs()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Enclosure of `d_a(t, s)` from the terms `n <= N`.
///
/// The neglected terms add at most `(t - s)^2 4^-N / 12` to the square. If
/// `t - s` is not exactly representable the bracket is widened by
/// `|rounding error| / sqrt(3)`, a Lipschitz bound for `d_a`.
pub fn d_a(a: &ParamSeq, t: f64, s: f64, n: usize) -> Bracket {
    let (diff, err) = two_sum(t, -s);
    let sum: f64 = (0..=n)
        .map(|k| {
            let d = d_z(diff * (-(k as f64)).exp2());
            a.at(k) * d * d
        })
        .sum();
    let tail = diff * diff * (-2.0 * n as f64).exp2() / 12.0;
    let p = pad(n);
    let sq = Bracket::new(sum * (1.0 - p), (sum + tail) * (1.0 + p));
    let root = sq.sqrt();
    if err == 0.0 {
        root
    } else {
        let e = err.abs() / 3f64.sqrt();
        Bracket::new((root.lo - e).max(0.0), root.hi + e)
    }
}

/// Enclosure of `d_a(2^m, 0)^2 = sum_{k >= 1} a_{m+k} 4^-k` from `k <= terms`.
pub fn d_a_dyadic_sq(a: &ParamSeq, m: usize, terms: usize) -> Bracket {
    let sum: f64 = (1..=terms)
        .map(|k| a.at(m + k) * (-2.0 * k as f64).exp2())
        .sum();
    let tail = (-2.0 * (terms + 1) as f64).exp2() / 3.0;
    let p = pad(terms);
    Bracket::new(sum * (1.0 - p), (sum + tail) * (1.0 + p))
}

/// Two-sided bounds on `d_a(2^m, 0)^2`, next to the alternative forms
/// `a_{m+1} / 2` and `2^(-n-2) + sum_{k <= n} a_{m+k} 2^-k`.
///
/// The alternative lower bound is not valid for the squared-distance metric:
/// for `a = 1/8` constant it gives `1/16` against the exact `1/24`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicBounds {
    pub m: usize,
    pub n: usize,
    /// Enclosure of the series itself.
    pub series: Bracket,
    /// `a_{m+1} / 4`.
    #[serde(with = "crate::real")]
    pub lower: f64,
    /// `sum_{k <= n} a_{m+k} 4^-k + 4^(-n-1) / 3`.
    #[serde(with = "crate::real")]
    pub upper: f64,
    #[serde(with = "crate::real")]
    pub alt_lower: f64,
    #[serde(with = "crate::real")]
    pub alt_upper: f64,
    /// `alt_lower` certified above the series.
    pub alt_lower_violated: bool,
    /// `alt_upper` certified below the series.
    pub alt_upper_violated: bool,
}

pub fn two_sided_bounds(a: &ParamSeq, m: usize, n: usize) -> DyadicBounds {
    let series = d_a_dyadic_sq(a, m, n.max(DEFAULT_DYADIC_TERMS));
    let lower = a.at(m + 1) / 4.0;
    let upper = (1..=n)
        .map(|k| a.at(m + k) * (-2.0 * k as f64).exp2())
        .sum::<f64>()
        + (-2.0 * (n + 1) as f64).exp2() / 3.0;
    let alt_lower = a.at(m + 1) / 2.0;
    let alt_upper = (-(n as f64) - 2.0).exp2()
        + (1..=n)
            .map(|k| a.at(m + k) * (-(k as f64)).exp2())
            .sum::<f64>();
    DyadicBounds {
        m,
        n,
        series,
        lower,
        upper,
        alt_lower,
        alt_upper,
        alt_lower_violated: alt_lower > series.hi,
        alt_upper_violated: alt_upper < series.lo,
    }
}

/// `d_a(2^m, 0)` with one doubling of the series length if the first bracket
/// straddles `epsilon`.
pub fn dyadic_distance(a: &ParamSeq, m: usize, epsilon: f64) -> Bracket {
    let b = d_a_dyadic_sq(a, m, DEFAULT_DYADIC_TERMS).sqrt();
    if b.compare(epsilon) == Decision::Undecided {
        d_a_dyadic_sq(a, m, 2 * DEFAULT_DYADIC_TERMS).sqrt()
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicHit {
    pub m: usize,
    /// Enclosure of `d_a(2^m, 0)`.
    pub value: Bracket,
}

/// Indices `m` with `d_a(2^m, 0)` certified below `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicNullReport {
    pub schema: String,
    pub a: ParamSeq,
    #[serde(with = "crate::real")]
    pub epsilon: f64,
    pub m_max: usize,
    pub hits: Vec<DyadicHit>,
    /// Brackets that still contain `epsilon` after refinement.
    pub undecided: Vec<DyadicHit>,
}

impl DyadicNullReport {
    pub fn first_hit(&self) -> Option<usize> {
        self.hits.first().map(|h| h.m)
    }
}

pub fn find_null_dyadic(a: &ParamSeq, epsilon: f64, m_max: usize) -> DyadicNullReport {
    let mut hits = Vec::new();
    let mut undecided = Vec::new();
    for m in 0..=m_max {
        let value = dyadic_distance(a, m, epsilon);
        match value.compare(epsilon) {
            Decision::Below => hits.push(DyadicHit { m, value }),
            Decision::Undecided => undecided.push(DyadicHit { m, value }),
            Decision::Above => {}
        }
    }
    DyadicNullReport {
        schema: DYADIC_NULL_SCHEMA.to_string(),
        a: a.clone(),
        epsilon,
        m_max,
        hits,
        undecided,
    }
}

/// Which of the two sequences has the small distance in a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullSide {
    A,
    B,
}

/// A dyadic point `2^m` that is `epsilon`-close to 0 for one metric and
/// certified `epsilon`-far for the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub schema: String,
    pub m: usize,
    pub d_a_value: Bracket,
    pub d_b_value: Bracket,
    #[serde(with = "crate::real")]
    pub epsilon: f64,
    pub null_side: NullSide,
}

/// Full scan result: the first witness plus any `m` that stayed undecided
/// before it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationScan {
    pub witness: Option<SeparationWitness>,
    pub undecided: Vec<usize>,
}

pub fn separation_scan(a: &ParamSeq, b: &ParamSeq, epsilon: f64, m_max: usize) -> SeparationScan {
    let mut undecided = Vec::new();
    for m in 0..=m_max {
        let da = dyadic_distance(a, m, epsilon);
        let db = dyadic_distance(b, m, epsilon);
        let side = match (da.compare(epsilon), db.compare(epsilon)) {
            (Decision::Below, Decision::Above) => Some(NullSide::A),
            (Decision::Above, Decision::Below) => Some(NullSide::B),
            (Decision::Below, Decision::Below) | (Decision::Above, Decision::Above) => None,
            _ => {
                undecided.push(m);
                None
            }
        };
        if let Some(null_side) = side {
            return SeparationScan {
                witness: Some(SeparationWitness {
                    schema: SEPARATION_SCHEMA.to_string(),
                    m,
                    d_a_value: da,
                    d_b_value: db,
                    epsilon,
                    null_side,
                }),
                undecided,
            };
        }
    }
    SeparationScan {
        witness: None,
        undecided,
    }
}

/// First `m <= m_max` separating `d_a` and `d_b` at scale `epsilon`.
pub fn separation_witness(
    a: &ParamSeq,
    b: &ParamSeq,
    epsilon: f64,
    m_max: usize,
) -> Option<SeparationWitness> {
    separation_scan(a, b, epsilon, m_max).witness
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum L1Verdict {
    /// `a - b` is summable, hence `d_a` and `d_b` induce the same topology.
    Ell1Close,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Comparison {
    /// `sum_{n <= N} |a_n - b_n|`.
    #[serde(with = "crate::real")]
    pub partial: f64,
    /// Upper bound on `sum_{n > N} |a_n - b_n|` when finite.
    #[serde(with = "crate::real::opt")]
    pub tail_bound: Option<f64>,
    pub verdict: L1Verdict,
}

pub fn l1_param_distance(a: &ParamSeq, b: &ParamSeq, n: usize) -> L1Comparison {
    let gap = |k: usize| (a.at(k) - b.at(k)).abs();
    let partial: f64 = (0..=n).map(gap).sum();
    let rule_start = a.prefix().len().max(b.prefix().len()).max(n + 1);
    let explicit: f64 = (n + 1..rule_start).map(gap).sum();

    let (ta, tb) = (a.tail().canonical(), b.tail().canonical());
    let rest = if ta == tb {
        Some(0.0)
    } else {
        match (ta.tail_sum_bound(rule_start), tb.tail_sum_bound(rule_start)) {
            (Some(x), Some(y)) => Some(x + y),
            // a summable rule against a non-summable one, or two distinct
            // non-summable rules: the gap is eventually of the order of a
            // non-summable term
            _ => None,
        }
    };
    match rest {
        Some(r) => {
            let tail = explicit + r;
            if tail.is_finite() {
                L1Comparison {
                    partial,
                    tail_bound: Some(tail),
                    verdict: L1Verdict::Ell1Close,
                }
            } else {
                L1Comparison {
                    partial,
                    tail_bound: None,
                    verdict: L1Verdict::Inconclusive,
                }
            }
        }
        None => L1Comparison {
            partial,
            tail_bound: None,
            verdict: L1Verdict::Divergent,
        },
    }
}

/// `1/8 + arctan(y) / (4 pi)`, a contraction of the real line onto `(0, 1/4)`.
///
/// Saturating arguments are clamped to the open interval, since `arctan`
/// rounds to `+-pi/2` for large `|y|`.
pub fn phi0(y: f64) -> f64 {
    (0.125 + y.atan() / (4.0 * PI)).clamp(f64::MIN_POSITIVE, PARAM_MAX.next_down())
}

/// Parameter sequence `phi0(x_n)` for the given prefix, continued by
/// `phi0(0) = 1/8`.
pub fn phi_param_seq(xs: &[f64]) -> ParamSeq {
    ParamSeq::new(
        xs.iter().map(|&x| phi0(x)).collect(),
        TailRule::Constant { c: 0.125 },
    )
    .expect("phi0 maps into (0, 1/4)")
}
