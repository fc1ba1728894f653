//! Product measures on the Cantor set `K = {-1, 0, 1}^N` and their pushforward
//! to the real line through the dyadic map `theta(x) = sum_n x_n 2^-n`.
//!
//! Indexing starts at `n = 0` everywhere: coordinate `n` of `nu_a` takes the
//! value 0 with probability `1 - a_n` and each of `-1`, `+1` with probability
//! `a_n / 2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bracket::Bracket;
use crate::error::{Error, Result};
use crate::slack::pad;

/// Upper end (excluded) of the parameter range.
pub const PARAM_MAX: f64 = 0.25;

/// Default sampling depth.
pub const DEFAULT_DEPTH: usize = 40;

/// Closed-form rule for the entries past the explicit prefix, evaluated at the
/// absolute index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRule {
    /// `c`
    Constant {
        #[serde(with = "crate::real")]
        c: f64,
    },
    /// `c * r^n`
    Geometric {
        #[serde(with = "crate::real")]
        c: f64,
        #[serde(with = "crate::real")]
        r: f64,
    },
    /// `c * (n + 1)^-p`
    Power {
        #[serde(with = "crate::real")]
        c: f64,
        #[serde(with = "crate::real")]
        p: f64,
    },
}

impl TailRule {
    pub fn eval(&self, n: usize) -> f64 {
        match *self {
            TailRule::Constant { c } => c,
            TailRule::Geometric { c, r } => c * r.powi(n as i32),
            TailRule::Power { c, p } => c * ((n + 1) as f64).powf(-p),
        }
    }

    /// Same rule with degenerate parameters folded into `Constant`.
    pub fn canonical(&self) -> TailRule {
        match *self {
            TailRule::Geometric { c, r: 1.0 } => TailRule::Constant { c },
            TailRule::Power { c, p: 0.0 } => TailRule::Constant { c },
            other => other,
        }
    }

    /// Upper bound on `sum_{n >= start} eval(n)`, or `None` when the series
    /// diverges.
    pub fn tail_sum_bound(&self, start: usize) -> Option<f64> {
        match self.canonical() {
            TailRule::Constant { .. } => None,
            TailRule::Geometric { c, r } => Some(c * r.powi(start as i32) / (1.0 - r)),
            TailRule::Power { c, p } if p > 1.0 => {
                let m = (start + 1) as f64;
                Some(c * (m.powf(-p) + m.powf(1.0 - p) / (p - 1.0)))
            }
            TailRule::Power { .. } => None,
        }
    }

    /// First index `n >= start` where the rule leaves `(0, 1/4)`, if any.
    /// Positive parameters keep geometric and power rules positive even where
    /// the float value underflows.
    fn first_invalid(&self, start: usize) -> Option<usize> {
        let in_range = |v: f64| v > 0.0 && v < PARAM_MAX;
        match *self {
            TailRule::Constant { c } => (!in_range(c)).then_some(start),
            TailRule::Geometric { c, r } => {
                if !(c.is_finite() && r.is_finite() && c > 0.0 && r > 0.0) {
                    return Some(start);
                }
                if self.eval(start) >= PARAM_MAX {
                    return Some(start);
                }
                if r > 1.0 {
                    // smallest n with c r^n >= 1/4
                    let n = ((PARAM_MAX / c).ln() / r.ln()).ceil().max(start as f64) as usize;
                    return Some(
                        (start..=n + 1)
                            .find(|&k| !in_range(self.eval(k)))
                            .unwrap_or(n),
                    );
                }
                None
            }
            TailRule::Power { c, p } => {
                if !(c.is_finite() && p.is_finite() && c > 0.0) {
                    return Some(start);
                }
                if self.eval(start) >= PARAM_MAX {
                    return Some(start);
                }
                if p < 0.0 {
                    let n = ((PARAM_MAX / c).powf(-1.0 / p) - 1.0)
                        .ceil()
                        .max(start as f64) as usize;
                    return Some(
                        (start..=n + 1)
                            .find(|&k| !in_range(self.eval(k)))
                            .unwrap_or(n),
                    );
                }
                None
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamSeqDoc {
    #[serde(default, with = "crate::real::vec")]
    prefix: Vec<f64>,
    tail: TailRule,
}

/// A sequence `a in (0, 1/4)^N`: an explicit prefix followed by a tail rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamSeqDoc", into = "ParamSeqDoc")]
pub struct ParamSeq {
    prefix: Vec<f64>,
    tail: TailRule,
}

impl TryFrom<ParamSeqDoc> for ParamSeq {
    type Error = Error;

    fn try_from(doc: ParamSeqDoc) -> Result<ParamSeq> {
        ParamSeq::new(doc.prefix, doc.tail)
    }
}

impl From<ParamSeq> for ParamSeqDoc {
    fn from(a: ParamSeq) -> ParamSeqDoc {
        ParamSeqDoc {
            prefix: a.prefix,
            tail: a.tail,
        }
    }
}

impl ParamSeq {
    /// Rejects any entry outside `(0, 1/4)`, naming the first offending index.
    pub fn new(prefix: Vec<f64>, tail: TailRule) -> Result<ParamSeq> {
        if let Some(i) = prefix.iter().position(|&v| !(v > 0.0 && v < PARAM_MAX)) {
            return Err(Error::InvalidIndex {
                index: i,
                message: format!("a_{i} = {} outside (0, 1/4)", prefix[i]),
            });
        }
        if let Some(i) = tail.first_invalid(prefix.len()) {
            return Err(Error::InvalidIndex {
                index: i,
                message: format!("tail rule gives a_{i} = {} outside (0, 1/4)", tail.eval(i)),
            });
        }
        Ok(ParamSeq { prefix, tail })
    }

    pub fn constant(c: f64) -> Result<ParamSeq> {
        ParamSeq::new(vec![], TailRule::Constant { c })
    }

    pub fn from_json_str(s: &str) -> Result<ParamSeq> {
        let doc: ParamSeqDoc = serde_json::from_str(s)
            .map_err(|e| Error::validation(format!("parameter document: {e}")))?;
        ParamSeq::try_from(doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter sequence serializes")
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// `a_n`.
    pub fn at(&self, n: usize) -> f64 {
        match self.prefix.get(n) {
            Some(&v) => v,
            None => self.tail.eval(n),
        }
    }
}

/// Truncated point of `K`: the first `depth()` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TritPrefix(Vec<i8>);

impl TritPrefix {
    pub fn new(trits: Vec<i8>) -> Result<TritPrefix> {
        if let Some(i) = trits.iter().position(|t| !(-1..=1).contains(t)) {
            return Err(Error::InvalidIndex {
                index: i,
                message: format!("trit {} not in {{-1, 0, 1}}", trits[i]),
            });
        }
        Ok(TritPrefix(trits))
    }

    pub fn trits(&self) -> &[i8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Partial sum of `theta`; exact in binary floating point for depth <= 1074.
    pub fn theta_center(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(n, &x)| x as f64 * (-(n as f64)).exp2())
            .sum()
    }

    /// Enclosure of `theta(x)` over every completion of the prefix.
    pub fn theta(&self) -> Result<Bracket> {
        if self.0.is_empty() {
            return Err(Error::validation("theta needs depth >= 1"));
        }
        let c = self.theta_center();
        let tail = (1.0 - self.depth() as f64).exp2();
        Ok(Bracket::new(c - tail, c + tail))
    }
}

fn draw_trit(rng: &mut ChaCha8Rng, a: f64) -> i8 {
    let u: f64 = rng.gen();
    if u < 0.5 * a {
        -1
    } else if u < a {
        1
    } else {
        0
    }
}

/// `n` independent draws of the first `depth` coordinates of `nu_a`.
pub fn sample_nu(a: &ParamSeq, depth: usize, seed: u64, n: usize) -> Vec<TritPrefix> {
    let probs: Vec<f64> = (0..depth).map(|k| a.at(k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| TritPrefix(probs.iter().map(|&p| draw_trit(&mut rng, p)).collect()))
        .collect()
}

/// Samples of `mu_a = theta_* nu_a`, each within `2^(1 - depth)` of an exact
/// draw.
pub fn mu_a_sample(a: &ParamSeq, depth: usize, seed: u64, n: usize) -> Vec<f64> {
    sample_nu(a, depth, seed, n)
        .iter()
        .map(TritPrefix::theta_center)
        .collect()
}

/// `pi^2 t^2 4^-N / 6`, the bound on the neglected factors past index `N`.
pub fn product_tail_bound(t: f64, n: usize) -> f64 {
    PI * PI * t * t * (-2.0 * n as f64).exp2() / 6.0
}

/// Smallest truncation making the tail bound at most `1e-12`, and at least 20.
pub fn default_truncation(t: f64) -> usize {
    let target = PI * PI * t * t / 6e-12;
    if target <= 1.0 {
        return 20;
    }
    (target.log2() / 2.0).ceil().max(20.0) as usize
}

/// Smallest `N` for which the tail bound is below 1.
pub fn min_truncation(t: f64) -> usize {
    (0..)
        .find(|&n| product_tail_bound(t, n) < 1.0)
        .unwrap_or(usize::MAX)
}

/// `1 - a (1 - cos(2 pi u))`, written with `2 sin^2(pi u)` and `u` reduced mod 1.
fn product_factor(a: f64, u: f64) -> f64 {
    let frac = u - u.round();
    let s = (PI * frac).sin();
    1.0 - 2.0 * a * s * s
}

/// Enclosure of `mu_a^(t) = prod_{n >= 0} (1 - a_n (1 - cos(2 pi t 2^-n)))`.
///
/// Every factor lies in `(1/2, 1]`. With `P_k` the partial product up to index
/// `k`, the true value lies in `[P_k (1 - eps_k), P_k]` where `eps_k` is
/// [`product_tail_bound`]. The returned bracket is the intersection of these
/// padded enclosures over all admissible `k <= N`, so brackets are nested in
/// `N`.
pub fn char_fn_product(a: &ParamSeq, t: f64, n: usize) -> Result<Bracket> {
    if n < 1 || product_tail_bound(t, n) >= 1.0 {
        return Err(Error::Enclosure {
            t,
            requested: n,
            suggested: min_truncation(t).max(default_truncation(t)),
        });
    }
    let mut partial = 1.0;
    let mut enclosure: Option<Bracket> = None;
    for k in 0..=n {
        partial *= product_factor(a.at(k), t * (-(k as f64)).exp2());
        let eps = product_tail_bound(t, k);
        if eps >= 1.0 {
            continue;
        }
        let slack = partial * pad(k);
        let here = Bracket::new(partial * (1.0 - eps) - slack, partial + slack);
        enclosure = Some(match enclosure {
            None => here,
            // both contain the true value, so they overlap
            Some(prev) => prev.intersect(&here).unwrap_or(here),
        });
    }
    Ok(enclosure.expect("k = n is admissible"))
}
