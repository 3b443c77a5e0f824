//! Smooth dyadic resolution of box indicator functions.
//!
//! `f0` is a smooth step with `f0(x) + f0(1 - x) = 1`; `f1` is the bump
//! assembled from it on `[1/6, 2/3]`; summing `f1(2^j x) + f1(2^j (1 - x))`
//! over `j >= 0` reproduces the indicator of the open unit interval, and the
//! product construction indexed by `(j, S)` reproduces a box indicator.

use alloc::vec::Vec;

use crate::fx;
use crate::theta::{BoxSpec, DyadicIndex};

/// Truncation depth for the dyadic partition.
#[derive(Debug, Clone, Copy)]
pub struct PartitionConfig {
    pub j_max: u32,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { j_max: 14 }
    }
}

#[inline]
fn sigma(x: f64) -> f64 {
    if x > 0.0 {
        fx::exp(-1.0 / x)
    } else {
        0.0
    }
}

/// Smooth nondecreasing step: `0` for `x <= 0`, `1` for `x >= 1`, with
/// `f0(x) + f0(1 - x) = 1`. Concretely `sigma(x) / (sigma(x) + sigma(1-x))`
/// with `sigma(x) = exp(-1/x)`.
pub fn f0(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = sigma(x);
    let b = sigma(1.0 - x);
    a / (a + b)
}

/// The smooth bump supported in `[1/6, 2/3]`:
/// `f0(6x - 1)` on `[1/6, 1/3]` and `f0(2 - 3x)` on `[1/3, 2/3]`.
pub fn f1(x: f64) -> f64 {
    if x <= 1.0 / 6.0 || x >= 2.0 / 3.0 {
        0.0
    } else if x <= 1.0 / 3.0 {
        f0(6.0 * x - 1.0)
    } else {
        f0(2.0 - 3.0 * x)
    }
}

/// Partial sum to depth `J` of the partition
/// `sum_j f1(2^j x) + f1(2^j (1 - x))`.
pub fn partition_eval(x: f64, j_max: u32) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let mut s = 0.0;
    let mut p = 1.0;
    for _ in 0..=j_max {
        s += f1(p * x) + f1(p * (1.0 - x));
        p *= 2.0;
    }
    s
}

/// Count how many `j`-terms are nonzero at `x` up to depth `J` (both tails).
pub fn partition_term_count(x: f64, j_max: u32) -> usize {
    let mut count = 0;
    let mut p = 1.0;
    for _ in 0..=j_max {
        if f1(p * x) != 0.0 {
            count += 1;
        }
        if f1(p * (1.0 - x)) != 0.0 {
            count += 1;
        }
        p *= 2.0;
    }
    count
}

/// The product bump `f_n(x) = prod_j f1(x_j)`.
pub fn f_n(x: &[f64]) -> f64 {
    x.iter().map(|&v| f1(v)).product()
}

/// One term of the box decomposition:
/// `f_n((x B^{-1} + x_S) E_S A_j)` for the dyadic index `(j, S)`.
pub fn box_term(x: &[f64], idx: &DyadicIndex, spec: &BoxSpec) -> f64 {
    let n = x.len();
    assert_eq!(idx.j.len(), n);
    assert_eq!(spec.b.len(), n);
    let mut prod = 1.0;
    for i in 0..n {
        let mut v = x[i] / spec.b[i];
        if idx.s_contains(i) {
            v = -(v - 1.0);
        }
        v *= (1u64 << idx.j[i]) as f64;
        prod *= f1(v);
        if prod == 0.0 {
            return 0.0;
        }
    }
    prod
}

/// Sum of [`box_term`] over all `S` and all `j` with `2^{j_i} <= 2^{j_max}`;
/// reproduces the box indicator away from the boundary layer.
pub fn box_partition_sum(x: &[f64], spec: &BoxSpec, j_max: u32) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    let mut j = alloc::vec![0u32; n];
    loop {
        for s_mask in 0..(1u32 << n) {
            let idx = DyadicIndex { j: j.clone(), s_mask };
            total += box_term(x, &idx, spec);
        }
        // odometer over j
        let mut axis = 0;
        loop {
            if axis == n {
                return total;
            }
            j[axis] += 1;
            if j[axis] <= j_max {
                break;
            }
            j[axis] = 0;
            axis += 1;
        }
    }
}

/// Numerical derivative bound check: central finite differences of `f1` up
/// to the requested order, maximized over a grid. Used to confirm numerical
/// smoothness of the bump.
pub fn f1_derivative_bound(order: usize, grid: usize) -> f64 {
    let h = 1e-3;
    let stencil: &[&[f64]] = &[
        &[1.0],
        &[-0.5, 0.0, 0.5],
        &[1.0, -2.0, 1.0],
        &[-0.5, 1.0, 0.0, -1.0, 0.5],
        &[1.0, -4.0, 6.0, -4.0, 1.0],
    ];
    let coef = stencil[order];
    let half = (coef.len() - 1) as f64 / 2.0;
    let mut worst = 0.0f64;
    for k in 0..=grid {
        let x = k as f64 / grid as f64;
        let mut d = 0.0;
        for (s, &c) in coef.iter().enumerate() {
            if c != 0.0 {
                d += c * f1(x + (s as f64 - half) * h);
            }
        }
        worst = worst.max(fx::abs(d) / fx::powf(h, order as f64));
    }
    worst
}

/// All dyadic indices `(j, S)` with `2^{j_i} <= cap_i`.
pub fn dyadic_indices(caps: &[u32]) -> Vec<DyadicIndex> {
    let n = caps.len();
    let mut out = Vec::new();
    let mut j = alloc::vec![0u32; n];
    loop {
        for s_mask in 0..(1u32 << n) {
            out.push(DyadicIndex { j: j.clone(), s_mask });
        }
        let mut axis = 0;
        loop {
            if axis == n {
                return out;
            }
            j[axis] += 1;
            if j[axis] <= caps[axis] {
                break;
            }
            j[axis] = 0;
            axis += 1;
        }
    }
}
