//! Seeded generators for test and validation fixtures.

use rand::Rng;

use crate::measures::{Atom, Measure, Piece};
use crate::product_measures::{ParamSeq, TailRule};

/// Random measure on `[0, 1]` with up to three atoms and three pieces.
pub fn random_measure<R: Rng>(rng: &mut R) -> Measure {
    loop {
        let n_atoms = rng.gen_range(0..=3);
        let n_pieces = rng.gen_range(0..=3);
        if n_atoms + n_pieces == 0 {
            continue;
        }
        let raw: Vec<f64> = (0..n_atoms + n_pieces)
            .map(|_| rng.gen_range(0.05..1.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let mut atoms: Vec<Atom> = Vec::new();
        for w in &raw[..n_atoms] {
            let x = rng.gen_range(0.0..=1.0);
            if atoms.iter().any(|a| a.x == x) {
                continue;
            }
            atoms.push(Atom { x, w: w / total });
        }
        let pieces: Vec<Piece> = raw[n_atoms..]
            .iter()
            .map(|w| {
                let lo: f64 = rng.gen_range(0.0..0.95);
                let hi = lo + (1.0 - lo) * rng.gen_range(0.01..=1.0);
                Piece {
                    lo,
                    hi,
                    w: w / total,
                }
            })
            .collect();
        if let Ok(m) = Measure::new(atoms, pieces) {
            return m;
        }
    }
}

/// Random element of `(0, 1/4)^N` with a short prefix and a random tail rule.
pub fn random_param_seq<R: Rng>(rng: &mut R) -> ParamSeq {
    let len = rng.gen_range(0..=6);
    let prefix: Vec<f64> = (0..len).map(|_| rng.gen_range(0.001..0.249)).collect();
    let c = rng.gen_range(0.001..0.24);
    let tail = match rng.gen_range(0..3) {
        0 => TailRule::Constant { c },
        1 => TailRule::Geometric {
            c,
            r: rng.gen_range(0.1..0.99),
        },
        _ => TailRule::Power {
            c,
            p: rng.gen_range(0.5..3.0),
        },
    };
    ParamSeq::new(prefix, tail).expect("generated parameters are in range")
}

/// `a_n = 4^(-n-1)` for `n >= 1`, with `a_0 = 1/8` so that every entry lies in
/// the open range. `a_0` does not enter `d_a(2^m, 0)` or `mu_a^(2^m)`.
pub fn quarter_geometric() -> ParamSeq {
    ParamSeq::new(vec![0.125], TailRule::Geometric { c: 0.25, r: 0.25 }).expect("valid")
}
