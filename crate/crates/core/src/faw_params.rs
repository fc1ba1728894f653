//! Pointwise symbols of the pair `(J, T_mu)`.
//!
//! `T_mu` acts on `L^2[0,1] + L^2[0,1] + C^2` as multiplication by
//! `(1 + exp(phi_mu))^-1` on the first block, `(1 + exp(-phi_mu))^-1` on the
//! second, and by `diag((1+q)^-1, (1+q^-1)^-1)` on `C^2`. `J` swaps the two
//! function blocks (with complex conjugation) and swaps the basis vectors of
//! `C^2`, so `J T J` has the two symbols exchanged.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::Measure;

/// Tolerance for `T + JTJ = 1`.
pub const RELATION_TOLERANCE: f64 = 1e-12;

pub type SymbolFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Action of the involution on the symbol data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JStructure {
    /// Exchange the two function blocks with complex conjugation; `J0` swaps
    /// `e1` and `e2`.
    SwapConjugate,
}

impl fmt::Display for JStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("swap-and-conjugate the two function components; J0 swaps e1, e2")
    }
}

#[derive(Clone)]
pub struct FawSymbol {
    q: f64,
    f1: SymbolFn,
    f2: SymbolFn,
    matrix_diag: (f64, f64),
    j_structure: JStructure,
}

impl fmt::Debug for FawSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FawSymbol")
            .field("q", &self.q)
            .field("matrix_diag", &self.matrix_diag)
            .field("j_structure", &self.j_structure)
            .finish_non_exhaustive()
    }
}

/// `((1+q)^-1, (1+q^-1)^-1)`.
pub fn matrix_diag(q: f64) -> (f64, f64) {
    (1.0 / (1.0 + q), 1.0 / (1.0 + 1.0 / q))
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("q = {q} outside (0, 1)")))
    }
}

/// Symbols of `T_mu` for a measure supported in `[0, 1]`.
pub fn build_faw_symbol(mu: &Measure, q: f64) -> Result<FawSymbol> {
    check_q(q)?;
    let (lo, hi) = mu.support_hull();
    if lo < 0.0 || hi > 1.0 {
        return Err(Error::domain(format!(
            "support [{lo}, {hi}] not contained in [0, 1]"
        )));
    }
    let m1 = mu.clone();
    let m2 = mu.clone();
    // the quantile never fails on [0, 1]; clamp keeps out-of-range grids total
    let f1: SymbolFn = Arc::new(move |x| {
        let phi = m1.quantile(x.clamp(0.0, 1.0)).expect("level in [0, 1]");
        1.0 / (1.0 + phi.exp())
    });
    let f2: SymbolFn = Arc::new(move |x| {
        let phi = m2.quantile(x.clamp(0.0, 1.0)).expect("level in [0, 1]");
        1.0 / (1.0 + (-phi).exp())
    });
    Ok(FawSymbol {
        q,
        f1,
        f2,
        matrix_diag: matrix_diag(q),
        j_structure: JStructure::SwapConjugate,
    })
}

impl FawSymbol {
    /// Assembles a symbol from arbitrary parts, e.g. to test the relation
    /// checker on data that violates it.
    pub fn from_parts(q: f64, f1: SymbolFn, f2: SymbolFn, matrix_diag: (f64, f64)) -> FawSymbol {
        FawSymbol {
            q,
            f1,
            f2,
            matrix_diag,
            j_structure: JStructure::SwapConjugate,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn f1(&self, x: f64) -> f64 {
        (self.f1)(x)
    }

    pub fn f2(&self, x: f64) -> f64 {
        (self.f2)(x)
    }

    pub fn matrix_diag(&self) -> (f64, f64) {
        self.matrix_diag
    }

    pub fn j_structure(&self) -> JStructure {
        self.j_structure
    }

    /// Symbol of `J T J`: function blocks and diagonal entries exchanged.
    pub fn conjugate_by_j(&self) -> FawSymbol {
        FawSymbol {
            q: self.q,
            f1: self.f2.clone(),
            f2: self.f1.clone(),
            matrix_diag: (self.matrix_diag.1, self.matrix_diag.0),
            j_structure: self.j_structure,
        }
    }

    /// Sampled table for plotting.
    pub fn export(&self, grid: &[f64]) -> SymbolExport {
        SymbolExport {
            q: self.q,
            matrix_diag: vec![self.matrix_diag.0, self.matrix_diag.1],
            j_structure: self.j_structure.to_string(),
            table: grid
                .iter()
                .map(|&x| SymbolRow {
                    x,
                    f1: self.f1(x),
                    f2: self.f2(x),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    #[serde(with = "crate::real")]
    pub x: f64,
    #[serde(with = "crate::real")]
    pub f1: f64,
    #[serde(with = "crate::real")]
    pub f2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolExport {
    #[serde(with = "crate::real")]
    pub q: f64,
    #[serde(with = "crate::real::vec")]
    pub matrix_diag: Vec<f64>,
    pub j_structure: String,
    pub table: Vec<SymbolRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// A symbol value outside the open interval `(0, 1)`.
    OpenUnitInterval,
    /// `T + JTJ != 1`.
    ComplementSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub relation: Relation,
    /// `f1`, `f2`, `diag1`, `diag2` or `sum`.
    pub component: String,
    /// Grid point, or `None` for the matrix block.
    #[serde(with = "crate::real::opt")]
    pub x: Option<f64>,
    #[serde(with = "crate::real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub grid_points: usize,
    pub violations: Vec<Violation>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn in_open_unit(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

/// Checks `0 < T < 1` and `T + JTJ = 1` pointwise on the grid and on the
/// matrix block.
pub fn check_domain_relations(s: &FawSymbol, grid: &[f64]) -> Result<RelationReport> {
    if grid.is_empty() {
        return Err(Error::validation("relation check needs a non-empty grid"));
    }
    let j = s.conjugate_by_j();
    let mut violations = Vec::new();
    let mut flag = |relation, component: &str, x, value| {
        violations.push(Violation {
            relation,
            component: component.to_string(),
            x,
            value,
        })
    };
    for &x in grid {
        let (a, b) = (s.f1(x), s.f2(x));
        if !in_open_unit(a) {
            flag(Relation::OpenUnitInterval, "f1", Some(x), a);
        }
        if !in_open_unit(b) {
            flag(Relation::OpenUnitInterval, "f2", Some(x), b);
        }
        let sum = a + j.f1(x);
        if (sum - 1.0).abs() > RELATION_TOLERANCE {
            flag(Relation::ComplementSum, "sum", Some(x), sum);
        }
    }
    let (d1, d2) = s.matrix_diag();
    if !in_open_unit(d1) {
        flag(Relation::OpenUnitInterval, "diag1", None, d1);
    }
    if !in_open_unit(d2) {
        flag(Relation::OpenUnitInterval, "diag2", None, d2);
    }
    let sum = d1 + j.matrix_diag().0;
    if (sum - 1.0).abs() > RELATION_TOLERANCE {
        flag(Relation::ComplementSum, "diag", None, sum);
    }
    Ok(RelationReport {
        grid_points: grid.len(),
        violations,
    })
}

/// Uniform grid of `points` levels in `[0, 1]` including both ends, merged
/// with the CDF values at the breakpoints of `mu`.
pub fn default_grid(mu: &Measure, points: usize) -> Vec<f64> {
    let images: Vec<f64> = mu
        .cdf_table()
        .breakpoints()
        .iter()
        .map(|&x| mu.cdf(x))
        .collect();
    let uniform = points.max(2);
    let mut grid: Vec<f64> = (0..uniform)
        .map(|k| k as f64 / (uniform - 1) as f64)
        .chain(images)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Atom, Piece};

    #[test]
    fn lebesgue_half() {
        let s = build_faw_symbol(&Measure::lebesgue(), 0.5).unwrap();
        assert_eq!(s.f1(0.0), 0.5);
        let (d1, d2) = s.matrix_diag();
        assert!((d1 - 2.0 / 3.0).abs() < 1e-16 && (d2 - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn complementary_symbols() {
        let mu = Measure::new(
            vec![Atom { x: 0.2, w: 0.3 }],
            vec![Piece {
                lo: 0.4,
                hi: 0.9,
                w: 0.7,
            }],
        )
        .unwrap();
        let s = build_faw_symbol(&mu, 0.3).unwrap();
        for k in 0..100 {
            let x = k as f64 / 99.0;
            assert!((s.f1(x) + s.f2(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lebesgue_range() {
        let s = build_faw_symbol(&Measure::lebesgue(), 0.7).unwrap();
        let lo = 1.0 / (1.0 + std::f64::consts::E);
        for k in 0..=100 {
            let v = s.f1(k as f64 / 100.0);
            assert!(lo - 1e-16 <= v && v <= 0.5);
        }
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            build_faw_symbol(&Measure::dirac(1.5), 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            build_faw_symbol(&Measure::uniform(-0.5, 0.5), 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            build_faw_symbol(&Measure::lebesgue(), 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn relations_hold_for_built_symbols() {
        let mu = Measure::dirac(0.6);
        let s = build_faw_symbol(&mu, 0.2).unwrap();
        let r = check_domain_relations(&s, &default_grid(&mu, 1000)).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(check_domain_relations(&s, &[]).is_err());
    }

    #[test]
    fn negative_control() {
        let s = build_faw_symbol(&Measure::lebesgue(), 0.5).unwrap();
        let f1 = s.f1.clone();
        let bad = FawSymbol::from_parts(0.5, f1.clone(), f1, s.matrix_diag());
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let r = check_domain_relations(&bad, &grid).unwrap();
        let flagged: Vec<f64> = r
            .violations
            .iter()
            .filter(|v| v.relation == Relation::ComplementSum)
            .filter_map(|v| v.x)
            .collect();
        // f1(x) = 1/2 only at x = 0
        assert_eq!(flagged, grid[1..].to_vec());
    }

    #[test]
    fn q_near_one() {
        let (d1, d2) = matrix_diag(1.0 - 1e-12);
        assert!((d1 - 0.5).abs() < 1e-11 && (d2 - 0.5).abs() < 1e-11);
        assert!((d1 + d2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn export_table() {
        let s = build_faw_symbol(&Measure::lebesgue(), 0.5).unwrap();
        let e = s.export(&[0.0, 0.5, 1.0]);
        assert_eq!(e.table.len(), 3);
        let json = serde_json::to_string(&e).unwrap();
        let back: SymbolExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
