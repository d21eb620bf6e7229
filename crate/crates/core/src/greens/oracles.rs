//! Independent oracles for the Green's function machinery.
//!
//! Each oracle recomputes a quantity along a route disjoint from the
//! implementation it checks: the torus table against a dense
//! eigendecomposition of `I - P`, and the quadrature `g(0,0)` against the
//! return-probability series and (in `rwalk`) a Monte Carlo visit count.

use crate::error::{Error, Result};
use crate::greens::GreenTable;
use crate::lattice::{FieldConfig, LatticePoint};
use nalgebra::{DMatrix, SymmetricEigen};

/// Dense-solve cap for the pseudo-inverse oracle (cost is `N^3`).
const PSEUDO_INVERSE_CAP: usize = 4096;

/// One-step transition matrix of the simple random walk on the torus,
/// in site row-major order.
pub fn transition_matrix(cfg: &FieldConfig) -> DMatrix<f64> {
    let size = cfg.num_sites();
    let d = cfg.dimension();
    let n = cfg.side() as i64;
    let p = 1.0 / (2 * d) as f64;
    let mut m = DMatrix::<f64>::zeros(size, size);
    for idx in 0..size {
        let site = cfg.site_at(idx);
        for axis in 0..d {
            for sign in [1i64, -1] {
                let mut coords = site.coords().to_vec();
                coords[axis] = (coords[axis] + sign).rem_euclid(n);
                let nb = crate::lattice::TorusPoint::new(coords, cfg).expect("on torus");
                m[(idx, cfg.site_index(&nb))] += p;
            }
        }
    }
    m
}

/// Mean-zero pseudo-inverse of `I - P` by dense symmetric eigendecomposition:
/// eigenmodes with eigenvalue above `1e-12 * max` are inverted, the constant
/// mode is dropped.
pub fn pseudo_inverse_table(cfg: &FieldConfig) -> Result<DMatrix<f64>> {
    let size = cfg.num_sites();
    if size > PSEUDO_INVERSE_CAP {
        return Err(Error::RegionTooLarge {
            size,
            cap: PSEUDO_INVERSE_CAP,
        });
    }
    let mut m = transition_matrix(cfg);
    m.neg_mut();
    for i in 0..size {
        m[(i, i)] += 1.0;
    }
    let eigen = SymmetricEigen::new(m);
    let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * max_eig;
    let mut pinv = DMatrix::<f64>::zeros(size, size);
    for (col, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eigen.eigenvectors.column(col);
            let scale = 1.0 / lambda;
            for i in 0..size {
                for j in 0..size {
                    pinv[(i, j)] += scale * v[i] * v[j];
                }
            }
        }
    }
    Ok(pinv)
}

/// Max entrywise deviation between the spectral table (as a full matrix by
/// translation invariance) and a dense pseudo-inverse.
pub fn max_pseudo_inverse_deviation(table: &GreenTable, pinv: &DMatrix<f64>) -> f64 {
    let cfg = table.cfg();
    let size = cfg.num_sites();
    let mut worst = 0.0f64;
    for i in 0..size {
        let xi = cfg.site_at(i);
        for j in 0..size {
            let xj = cfg.site_at(j);
            worst = worst.max((table.value(&xi, &xj) - pinv[(i, j)]).abs());
        }
    }
    worst
}

/// Outcome of the return-probability route to `g(0,0)`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEstimate {
    /// Partial sum plus extrapolated tail.
    pub value: f64,
    /// `sum_{k <= k_max} P_{2k}(0,0)` computed exactly (to rounding).
    pub partial_sum: f64,
    /// Fitted tail `sum_{k > k_max}`.
    pub tail: f64,
}

/// `g(0,0) = sum_k P_k(0,0)` via exact closed-walk counts.
///
/// The count of closed `2k`-step walks obeys the coordinate-split recursion
/// `C_d(k) = sum_j C(2k, 2j) C(2j, j) C_{d-1}(k - j)` with
/// `C_1(j) = C(2j, j)`, evaluated in log space. The tail beyond `k_max` is
/// extrapolated from the local-CLT shape `P_{2k} ~ k^{-d/2} (c_0 + c_1/k)`
/// fitted on the trailing window.
pub fn return_probability_series(d: usize, k_max: usize) -> Result<SeriesEstimate> {
    if d < 3 {
        return Err(Error::UnsupportedDimension { d });
    }
    if k_max < 32 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: "need k_max >= 32 for the tail fit".into(),
        });
    }
    // ln k! for k = 0..=2*k_max
    let mut ln_fact = vec![0.0f64; 2 * k_max + 1];
    for k in 1..ln_fact.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_binom = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];

    // ln C_1(j) = ln C(2j, j)
    let mut layer: Vec<f64> = (0..=k_max).map(|j| ln_binom(2 * j, j)).collect();
    for _ in 2..=d {
        let prev = layer.clone();
        for k in (0..=k_max).rev() {
            // log-sum-exp over j of C(2k, 2j) * C(2j, j) * prev[k - j]
            let terms: Vec<f64> = (0..=k)
                .map(|j| ln_binom(2 * k, 2 * j) + ln_binom(2 * j, j) + prev[k - j])
                .collect();
            let m = terms.iter().cloned().fold(f64::MIN, f64::max);
            let sum: f64 = terms.iter().map(|t| (t - m).exp()).sum();
            layer[k] = m + sum.ln();
        }
    }

    let ln_step = (2 * d) as f64;
    let p2k: Vec<f64> = (0..=k_max)
        .map(|k| (layer[k] - 2.0 * k as f64 * ln_step.ln()).exp())
        .collect();
    let partial_sum: f64 = p2k.iter().sum();

    // least squares of P_{2k} k^{d/2} = c0 + c1/k over the trailing window
    let half_d = d as f64 / 2.0;
    let window = (k_max / 2)..=k_max;
    let (mut s0, mut s1, mut s2, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in window {
        let x = 1.0 / k as f64;
        let y = p2k[k] * (k as f64).powf(half_d);
        s0 += 1.0;
        s1 += x;
        s2 += x * x;
        sy += y;
        sxy += x * y;
    }
    let det = s0 * s2 - s1 * s1;
    let c0 = (s2 * sy - s1 * sxy) / det;
    let c1 = (s0 * sxy - s1 * sy) / det;
    let tail = c0 * zeta_tail(half_d, k_max) + c1 * zeta_tail(half_d + 1.0, k_max);

    Ok(SeriesEstimate {
        value: partial_sum + tail,
        partial_sum,
        tail,
    })
}

/// `sum_{k > k0} k^{-s}` by direct summation to 10^6 plus the
/// Euler-Maclaurin remainder.
fn zeta_tail(s: f64, k0: usize) -> f64 {
    const DIRECT_TO: usize = 1_000_000;
    let mut sum = 0.0;
    for k in (k0 + 1)..=DIRECT_TO {
        sum += (k as f64).powf(-s);
    }
    let m = DIRECT_TO as f64;
    sum + m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s)
}

/// Plain full-box dyadic midpoint quadrature of the defining `d`-dimensional
/// integral, without the residue reduction. Slower and cruder (~1e-4); used
/// only to cross-check the reduced evaluator along an independent route.
pub fn green_zd_full_box(x: &LatticePoint, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::UnsupportedDimension { d });
    }
    if x.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.dimension(),
        });
    }
    let coords: Vec<f64> = x.coords().iter().map(|&c| c as f64).collect();

    // midpoint over [-a,a]^d minus the inner half-box, m divisible by 4
    let shell = |a: f64, m: usize| -> f64 {
        let h = 2.0 * a / m as f64;
        let nodes: Vec<f64> = (0..m).map(|i| -a + (i as f64 + 0.5) * h).collect();
        let am1_1d: Vec<f64> = nodes
            .iter()
            .map(|t| {
                let s = (0.5 * t).sin();
                2.0 * s * s
            })
            .collect();
        let (q1, q3) = (m / 4, 3 * m / 4);
        let mut idx = vec![0usize; d];
        let mut sum = 0.0;
        'outer: loop {
            let inner = idx.iter().all(|&i| i >= q1 && i < q3);
            if !inner {
                let mut am1 = 0.0;
                let mut phase = 0.0;
                for (j, &i) in idx.iter().enumerate() {
                    am1 += am1_1d[i];
                    phase += nodes[i] * coords[j];
                }
                sum += phase.cos() / am1;
            }
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < m {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        sum * h.powi(d as i32) * d as f64
    };
    let richardson = |a: f64, m: usize| -> f64 {
        let i1 = shell(a, m);
        let i2 = shell(a, 2 * m);
        (4.0 * i2 - i1) / 3.0
    };

    let mut total = richardson(std::f64::consts::PI, 24);
    let mut a = std::f64::consts::PI;
    for _ in 1..=16 {
        a /= 2.0;
        total += richardson(a, 16);
    }
    // remaining box: integrand ~ 2d / |theta|^2
    let inner = a / 2.0;
    total += 2.0 * d as f64 * inner.powi(d as i32 - 2) * unit_inverse_square_integral(d);
    Ok(total / (2.0 * std::f64::consts::PI).powi(d as i32))
}

/// `K_d = ∫_{[-1,1]^d} |u|^{-2} du` by one dyadic shell and the geometric
/// identity `K = S / (1 - 2^{2-d})`.
fn unit_inverse_square_integral(d: usize) -> f64 {
    let shell = |m: usize| -> f64 {
        let h = 2.0 / m as f64;
        let nodes: Vec<f64> = (0..m).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
        let (q1, q3) = (m / 4, 3 * m / 4);
        let mut idx = vec![0usize; d];
        let mut sum = 0.0;
        'outer: loop {
            let inner = idx.iter().all(|&i| i >= q1 && i < q3);
            if !inner {
                let norm2: f64 = idx.iter().map(|&i| nodes[i] * nodes[i]).sum();
                sum += 1.0 / norm2;
            }
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < m {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        sum * h.powi(d as i32)
    };
    let i1 = shell(32);
    let i2 = shell(64);
    let s = (4.0 * i2 - i1) / 3.0;
    s / (1.0 - 2f64.powi(2 - d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::quadrature::green_zd;
    use crate::greens::zero_average_green;
    use crate::tolerances::PSEUDO_INVERSE_MAX_DEV;

    #[test]
    fn transition_matrix_is_doubly_stochastic() {
        let cfg = FieldConfig::new(3, 3).unwrap();
        let m = transition_matrix(&cfg);
        for i in 0..m.nrows() {
            assert!((m.row(i).sum() - 1.0).abs() < 1e-14);
            assert!((m.column(i).sum() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spectral_table_equals_pseudo_inverse_n4() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let table = zero_average_green(&cfg).unwrap();
        let pinv = pseudo_inverse_table(&cfg).unwrap();
        let dev = max_pseudo_inverse_deviation(&table, &pinv);
        assert!(dev <= PSEUDO_INVERSE_MAX_DEV, "deviation {dev}");
    }

    #[test]
    fn series_route_agrees_with_quadrature() {
        let est = return_probability_series(3, 600).unwrap();
        let quad = crate::greens::green_zd_origin(3).unwrap();
        assert!(
            (est.value - quad).abs() < 1e-4,
            "series {} vs quadrature {quad}",
            est.value
        );
        // tail mass beyond k = 600 is ~0.467/sqrt(600) ~ 0.019
        assert!(est.tail > 0.0 && est.tail < 0.05);
    }

    #[test]
    fn full_box_route_agrees_with_reduced_quadrature() {
        for coords in [[0i64, 0, 0], [1, 0, 0], [1, 1, 0], [2, 1, 1]] {
            let x = LatticePoint::new(coords.to_vec());
            let full = green_zd_full_box(&x, 3).unwrap();
            let reduced = green_zd(&x, 3).unwrap();
            assert!(
                (full - reduced).abs() < 5e-4,
                "x={coords:?}: full {full} vs reduced {reduced}"
            );
        }
    }
}
