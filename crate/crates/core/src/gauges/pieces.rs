use num_traits::One;

use super::{Baire1Code, Region, Result, Space};
use crate::numerics::rational::pow2;
use crate::numerics::{Interval, Rational};
use crate::spaces::Cylinder;

/// Inner approximations of the first `count` closed pieces of
/// `{x : g(x) ∈ B(center, radius)}`.
///
/// Piece `k` collects the grid cells on which every term `f_m`, `m ≥ k`,
/// is verified to stay within `s_k = radius·(1 − 2^-k-1)` of `center`.
/// Terms past the checked block are controlled by the modulus when the
/// code has one; otherwise the check runs through `m = stage`. Pieces are
/// made increasing by accumulation. Unit-interval pieces are merged into
/// maximal runs.
pub fn preimage_pieces(
    g: &Baire1Code,
    center: &Rational,
    radius: &Rational,
    count: usize,
    grid: u32,
    stage: u32,
) -> Result<Vec<Vec<Region>>> {
    let cells = grid_cells(g.space(), grid);
    let mut inside = vec![false; cells.len()];
    let mut out = Vec::with_capacity(count);
    for k in 0..count as u64 {
        let s_k = radius * (Rational::one() - pow2(-(k as i64) - 1));
        let ball = Interval::new(center - &s_k, center + &s_k);
        let (last, tail) = match g.modulus() {
            Some(n_of) => {
                let j = stage;
                (k.max(n_of(j)), Some(pow2(-(j as i64))))
            }
            None => (k.max(stage as u64), None),
        };
        for (i, cell) in cells.iter().enumerate() {
            if inside[i] {
                continue;
            }
            let mut ok = true;
            for m in k..=last {
                let mut e = g.eval_term(m, cell, stage)?;
                if m == last {
                    if let Some(t) = &tail {
                        e = e.widen(t);
                    }
                }
                if !e.is_subset_of(&ball) {
                    ok = false;
                    break;
                }
            }
            inside[i] = ok;
        }
        let piece: Vec<Region> = cells
            .iter()
            .zip(&inside)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c.clone())
            .collect();
        out.push(merge_runs(piece));
    }
    Ok(out)
}

fn grid_cells(space: Space, grid: u32) -> Vec<Region> {
    let n = 1u64 << grid;
    match space {
        Space::Unit => (0..n)
            .map(|i| {
                let lo = Rational::from_integer(i.into()) * pow2(-(grid as i64));
                let hi = &lo + pow2(-(grid as i64));
                Region::Unit(Interval::new(lo, hi))
            })
            .collect(),
        Space::Cantor => (0..n)
            .map(|i| {
                let bits = (0..grid).map(|b| (i >> (grid - 1 - b)) & 1 == 1).collect();
                Region::Cantor(Cylinder::new(bits))
            })
            .collect(),
    }
}

fn merge_runs(piece: Vec<Region>) -> Vec<Region> {
    let mut out: Vec<Region> = Vec::new();
    for r in piece {
        if let (Some(Region::Unit(prev)), Region::Unit(cur)) = (out.last_mut(), &r) {
            if prev.hi() == cur.lo() {
                *prev = Interval::new(prev.lo().clone(), cur.hi().clone());
                continue;
            }
        }
        out.push(r);
    }
    out
}
