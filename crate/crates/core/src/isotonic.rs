//! Equal-weights isotonic projection onto `{x : x_1 <= ... <= x_k}` and the
//! pointwise restriction of a CIF set.

use crate::cif::CifSet;
use crate::error::{Error, Result};
use crate::step::StepFunction;

/// Least-squares projection of `values` onto the nondecreasing cone, by
/// pool-adjacent-violators.
///
/// Block means are always recomputed as a left-to-right sum over the block's
/// members, so the output depends only on the final partition and the input.
/// Equal neighbours are not violators.
pub fn isotonic_project(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    // (start, end exclusive, mean)
    let mut blocks: Vec<(usize, usize, f64)> = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        blocks.push((i, i + 1, values[i]));
        while blocks.len() > 1 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            if prev.2 <= last.2 {
                break;
            }
            blocks.pop();
            let start = prev.0;
            let end = last.1;
            *blocks.last_mut().unwrap() = (start, end, block_mean(&values[start..end]));
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (start, end, mean) in blocks {
        out.extend(std::iter::repeat_n(mean, end - start));
    }
    Ok(out)
}

fn block_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `max_{r <= i} min_{s >= i} Av[x; r, s]`, evaluated literally in O(k³).
pub fn maxmin_reference(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    let k = values.len();
    let out = (0..k)
        .map(|i| {
            (0..=i)
                .map(|r| {
                    (i..k)
                        .map(|s| block_mean(&values[r..=s]))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(out)
}

/// Max-min over a restricted window `lo..=hi` (0-based, inclusive) around each
/// index. This is the fixed-t limit functional of the restricted estimator
/// when only the causes in `lo..=hi` are tied.
pub fn windowed_maxmin(values: &[f64], lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi)
        .map(|i| {
            (lo..=i)
                .map(|r| {
                    (i..=hi)
                        .map(|s| block_mean(&values[r..=s]))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Projects the vector of CIF values at every knot of the union grid.
pub fn restrict_cifs(unrestricted: &CifSet) -> Result<CifSet> {
    if unrestricted.is_restricted() {
        return Err(Error::AlreadyRestricted);
    }
    let k = unrestricted.k();
    let grid = unrestricted.grid();
    let initial: Vec<f64> = unrestricted.cifs().iter().map(|f| f.initial()).collect();
    let initial = isotonic_project(&initial)?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); k];
    for &t in &grid {
        let projected = isotonic_project(&unrestricted.values_at(t))?;
        for (col, v) in columns.iter_mut().zip(projected) {
            col.push(v);
        }
    }
    let cifs = columns
        .into_iter()
        .zip(initial)
        .map(|(values, init)| StepFunction::new(init, grid.clone(), values))
        .collect::<Result<Vec<_>>>()?;
    Ok(CifSet::restricted_from(cifs, unrestricted.total().clone()))
}
