//! Invariant suite run by `taulab validate`.
//!
//! Each check draws seeded fixtures, compares the closed-form routes with the
//! references in [`crate::oracle`], and reports a named pass/fail line.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

use crate::faw_params::{build_faw_symbol, check_domain_relations, default_grid, FawSymbol};
use crate::fixtures::{quarter_geometric, random_measure, random_param_seq};
use crate::measures::{l1_quantile_distance, Measure};
use crate::oracle::{
    char_fn_product_reference, dyadic_sq_reference, ks_statistic, piecewise_simpson,
};
use crate::product_measures::{char_fn_product, ParamSeq};
use crate::tau_metrics::{d_a, d_a_dyadic_sq, find_null_dyadic};

/// Deliberate defects used to confirm that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Replace `f2` by `f1` in a symbol.
    FawSwap,
    /// Collapse the product enclosure to its upper endpoint minus a margin.
    ShrunkBracket,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Fault, String> {
        match s {
            "faw-swap" => Ok(Fault::FawSwap),
            "shrunk-bracket" => Ok(Fault::ShrunkBracket),
            other => Err(format!(
                "unknown fault {other:?} (faw-swap, shrunk-bracket)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub total_millis: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn measures(seed: u64, n: usize) -> Vec<Measure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_measure(&mut rng)).collect()
}

fn quantile_galois() -> (bool, String) {
    let mut worst = String::new();
    let mut ok = true;
    for (i, mu) in measures(1, 20).iter().enumerate() {
        let bps = mu.cdf_table().breakpoints();
        for k in 1..=200 {
            let y = k as f64 / 200.0;
            let x = mu.quantile(y).expect("level in range");
            let above = mu.cdf(x) >= y;
            let minimal = bps.iter().filter(|&&b| b < x).all(|&b| mu.cdf(b) < y);
            if !(above && minimal) {
                ok = false;
                worst = format!("fixture {i}, y = {y}");
            }
        }
    }
    (
        ok,
        if ok {
            "20 fixtures x 200 levels".into()
        } else {
            worst
        },
    )
}

fn pushforward_ks() -> (bool, String) {
    let n = 10_000;
    let threshold = 1.63 / (n as f64).sqrt();
    let mut max_d: f64 = 0.0;
    for (i, mu) in measures(2, 5).iter().enumerate() {
        let xs = mu.sample(100 + i as u64, n);
        let d = ks_statistic(&xs, |x| mu.cdf(x), |x| mu.cdf_table().eval_left(x));
        max_d = max_d.max(d);
    }
    (
        max_d < threshold,
        format!("max KS {max_d:.5} vs {threshold:.5}"),
    )
}

fn distance_identity() -> (bool, String) {
    let ms = measures(3, 20);
    let mut worst: f64 = 0.0;
    for pair in ms.chunks(2) {
        let (mu, eta) = (&pair[0], &pair[1]);
        let exact = l1_quantile_distance(mu, eta);
        let mut cuts: Vec<f64> = mu
            .cdf_table()
            .breakpoints()
            .iter()
            .chain(eta.cdf_table().breakpoints())
            .copied()
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let quad = piecewise_simpson(&|x| (mu.cdf(x) - eta.cdf(x)).abs(), &cuts, 1e-12);
        worst = worst.max((exact - quad).abs());
    }
    (worst <= 1e-9, format!("max deviation {worst:.3e}"))
}

fn product_brackets(fault: bool) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut misses = 0;
    for _ in 0..30 {
        let a = random_param_seq(&mut rng);
        let t = rand::Rng::gen_range(&mut rng, -64.0..64.0);
        let n = 10 + (1.0 + f64::abs(t)).log2().ceil() as usize;
        let mut b = char_fn_product(&a, t, n).expect("valid truncation");
        if fault {
            b = crate::bracket::Bracket::point(b.hi + 1e-6);
        }
        let reference = char_fn_product_reference(&a, t, 3 * n);
        if !b.contains(reference) {
            misses += 1;
        }
    }
    (misses == 0, format!("{misses} of 30 references outside"))
}

fn dyadic_agreement() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..30 {
        let a: ParamSeq = random_param_seq(&mut rng);
        let m = rand::Rng::gen_range(&mut rng, 0..20);
        let series = d_a_dyadic_sq(&a, m, 30);
        let direct = d_a(&a, 2f64.powi(m as i32), 0.0, m + 30).square();
        let reference = dyadic_sq_reference(&a, m, m + 80);
        if !series.intersects(&direct) || !series.contains(reference) {
            bad += 1;
        }
    }
    let report = find_null_dyadic(&quarter_geometric(), 0.01, 10);
    let first_ok = report.first_hit() == Some(4);
    (
        bad == 0 && first_ok,
        format!(
            "{bad} disagreements; first null hit {:?}",
            report.first_hit()
        ),
    )
}

fn faw_relations(fault: bool) -> (bool, String) {
    let ms = measures(6, 10);
    let mut violations = 0;
    for (i, mu) in ms.iter().enumerate() {
        let q = 0.05 + 0.09 * i as f64;
        let s = build_faw_symbol(mu, q).expect("fixture supported in [0, 1]");
        let s = if fault {
            let f1 = Arc::new({
                let s = s.clone();
                move |x| s.f1(x)
            });
            FawSymbol::from_parts(q, f1.clone(), f1, s.matrix_diag())
        } else {
            s
        };
        let report = check_domain_relations(&s, &default_grid(mu, 1000)).expect("non-empty grid");
        violations += report.violations.len();
    }
    (violations == 0, format!("{violations} violations"))
}

type Check = Box<dyn Fn() -> (bool, String)>;

/// Runs every check, applying the requested faults.
pub fn run_suite(faults: &[Fault]) -> SuiteReport {
    let start = Instant::now();
    let has = |f| faults.contains(&f);
    let checks: Vec<(&str, Check)> = vec![
        ("quantile_galois", Box::new(quantile_galois)),
        ("quantile_pushforward_ks", Box::new(pushforward_ks)),
        ("distance_identity", Box::new(distance_identity)),
        ("product_bracket_oracle", {
            let f = has(Fault::ShrunkBracket);
            Box::new(move || product_brackets(f))
        }),
        ("dyadic_series_agreement", Box::new(dyadic_agreement)),
        ("faw_domain_relations", {
            let f = has(Fault::FawSwap);
            Box::new(move || faw_relations(f))
        }),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, check)| {
            let t0 = Instant::now();
            let (passed, detail) = check();
            CheckResult {
                name: name.to_string(),
                passed,
                detail,
                millis: t0.elapsed().as_millis(),
            }
        })
        .collect();
    SuiteReport {
        checks,
        total_millis: start.elapsed().as_millis(),
    }
}
