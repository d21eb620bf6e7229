//! Deterministic quadrature for the `Z^d` Green's function
//!
//! ```text
//! g(0, x) = (2 pi)^{-d} ∫_{[-pi,pi]^d} cos(theta . x) / (1 - (1/d) sum_j cos theta_j) dtheta .
//! ```
//!
//! The coordinate with the largest `|x_j|` is integrated out in closed form:
//! with `A(theta') = d - sum_{j>=2} cos theta_j >= 1`,
//!
//! ```text
//! (2 pi)^{-1} ∫ e^{i k t} / (A - cos t) dt = rho^{|k|} / sqrt(A^2 - 1),
//! rho = A - sqrt(A^2 - 1) in (0, 1],
//! ```
//!
//! which leaves a `(d-1)`-dimensional integral whose only singularity is an
//! integrable `1/|theta'|` at the origin. That integral is evaluated by a
//! tensor-product midpoint rule with dyadic refinement towards `theta' = 0`
//! (shells `[-pi 2^{-l}, pi 2^{-l}]^{d-1}` minus their inner half-box) and
//! three-level Richardson extrapolation per shell; refinement stops once a
//! shell contributes below [`SHELL_STOP_TOL`], after which the remaining box
//! is added via the exact leading asymptotics of the integrand. Near zero the
//! factor `A - 1` is accumulated as `sum_j 2 sin^2(theta_j / 2)`, which is
//! exact to rounding where the naive cosine form cancels catastrophically.
//!
//! Values are memoized on the canonical form of `x` (sorted absolute
//! coordinates), which also hard-wires the permutation and sign symmetries
//! of the walk.

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// A dyadic shell below this contribution (before the `(2 pi)^{1-d}`
/// normalization) ends the refinement.
const SHELL_STOP_TOL: f64 = 1e-9;

/// Hard cap on dyadic levels; exceeding it reports non-convergence.
const MAX_LEVELS: usize = 48;

/// Base midpoint resolution for the dyadic shells (tripled by Richardson).
const SHELL_M_BASE: usize = 16;

/// Base midpoint resolution for the outer region `[-pi,pi]^{d-1} \ B_1`.
const OUTER_M_BASE: usize = 24;

type ValueCache = Mutex<HashMap<(usize, Vec<i64>), f64>>;

fn cache() -> &'static ValueCache {
    static CACHE: OnceLock<ValueCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `g_{Z^d}(0, x)`, accurate to well under 1e-6 absolute.
pub fn green_zd(x: &LatticePoint, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::UnsupportedDimension { d });
    }
    if x.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.dimension(),
        });
    }
    let mut mags: Vec<i64> = x.coords().iter().map(|c| c.abs()).collect();
    mags.sort_unstable_by(|a, b| b.cmp(a));
    let key = (d, mags);
    if let Some(&v) = cache().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let value = green_zd_canonical(&key.1, d)?;
    cache().lock().unwrap().insert(key, value);
    Ok(value)
}

/// Convenience: `g(0, 0)` in dimension `d`.
pub fn green_zd_origin(d: usize) -> Result<f64> {
    green_zd(&LatticePoint::origin(d), d)
}

fn green_zd_canonical(mags: &[i64], d: usize) -> Result<f64> {
    let k = mags[0] as i32;
    let rest: Vec<f64> = mags[1..].iter().map(|&c| c as f64).collect();
    // Midpoint grids must resolve the cos(theta'.x') oscillation before
    // Richardson can help; scale the base resolution with the frequency.
    let freq: f64 = rest.iter().sum();
    let scale = ((freq / 2.0).ceil() as usize).max(1);

    let mut total = midpoint_richardson(d, k, &rest, std::f64::consts::PI, OUTER_M_BASE * scale);
    let mut converged = false;
    let mut half_width = std::f64::consts::PI;
    let mut last = f64::INFINITY;
    for level in 1..=MAX_LEVELS {
        half_width = std::f64::consts::PI / (1u64 << level) as f64;
        let contrib = midpoint_richardson(d, k, &rest, half_width, SHELL_M_BASE * scale);
        total += contrib;
        last = contrib.abs();
        // Past the rho^k boundary layer the shells decay geometrically, so
        // a small shell means everything deeper is smaller still.
        if last < SHELL_STOP_TOL && half_width * (k as f64 + 1.0) < 1.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::QuadratureNoConvergence {
            achieved: last,
            target: SHELL_STOP_TOL,
        });
    }
    // Remaining box [-a/2, a/2]^{d-1}: integrand ~ d / |theta'| there.
    let inner = half_width / 2.0;
    total += d as f64 * inner.powi(d as i32 - 2) * unit_inverse_norm_integral(d - 1);
    Ok(total / (2.0 * std::f64::consts::PI).powi(d as i32 - 1))
}

/// Midpoint sums at m, 2m, 4m points per axis, extrapolated to O(h^6).
fn midpoint_richardson(d: usize, k: i32, rest: &[f64], half_width: f64, m_base: usize) -> f64 {
    let i1 = midpoint_shell(d, k, rest, half_width, m_base);
    let i2 = midpoint_shell(d, k, rest, half_width, 2 * m_base);
    let i3 = midpoint_shell(d, k, rest, half_width, 4 * m_base);
    let r12 = (4.0 * i2 - i1) / 3.0;
    let r23 = (4.0 * i3 - i2) / 3.0;
    (16.0 * r23 - r12) / 15.0
}

/// Midpoint rule over `[-a, a]^{d-1}` minus the inner half-box
/// `(-a/2, a/2)^{d-1}`; `m` divisible by 4 so cells align with the hole.
fn midpoint_shell(d: usize, k: i32, rest: &[f64], a: f64, m: usize) -> f64 {
    debug_assert_eq!(m % 4, 0);
    let dim = d - 1;
    let h = 2.0 * a / m as f64;
    let nodes: Vec<f64> = (0..m).map(|i| -a + (i as f64 + 0.5) * h).collect();
    let am1_1d: Vec<f64> = nodes
        .iter()
        .map(|t| {
            let s = (0.5 * t).sin();
            2.0 * s * s
        })
        .collect();
    let q1 = m / 4;
    let q3 = 3 * m / 4;
    let mut sum = 0.0;
    let mut idx = vec![0usize; dim];
    'outer: loop {
        let inner = idx.iter().all(|&i| i >= q1 && i < q3);
        if !inner {
            let mut am1 = 0.0;
            let mut phase = 0.0;
            for (j, &i) in idx.iter().enumerate() {
                am1 += am1_1d[i];
                phase += nodes[i] * rest[j];
            }
            let s = (am1 * (am1 + 2.0)).sqrt();
            let rho = 1.0 + am1 - s;
            sum += phase.cos() * rho.powi(k) / s;
        }
        for j in (0..dim).rev() {
            idx[j] += 1;
            if idx[j] < m {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    sum * h.powi(dim as i32) * d as f64
}

/// `J_m = ∫_{[-1,1]^m} |u|^{-1} du`, by the same dyadic construction:
/// `J = S / (1 - 2^{1-m})` with `S` the one-shell integral.
fn unit_inverse_norm_integral(m_dims: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&m_dims) {
        return v;
    }
    let shell = |m: usize| -> f64 {
        let h = 2.0 / m as f64;
        let nodes: Vec<f64> = (0..m).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
        let q1 = m / 4;
        let q3 = 3 * m / 4;
        let mut sum = 0.0;
        let mut idx = vec![0usize; m_dims];
        'outer: loop {
            let inner = idx.iter().all(|&i| i >= q1 && i < q3);
            if !inner {
                let norm2: f64 = idx.iter().map(|&i| nodes[i] * nodes[i]).sum();
                sum += 1.0 / norm2.sqrt();
            }
            for j in (0..m_dims).rev() {
                idx[j] += 1;
                if idx[j] < m {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        sum * h.powi(m_dims as i32)
    };
    let i1 = shell(32);
    let i2 = shell(64);
    let i3 = shell(128);
    let r12 = (4.0 * i2 - i1) / 3.0;
    let r23 = (4.0 * i3 - i2) / 3.0;
    let s = (16.0 * r23 - r12) / 15.0;
    let value = s / (1.0 - 2f64.powi(1 - m_dims as i32));
    cache.lock().unwrap().insert(m_dims, value);
    value
}
