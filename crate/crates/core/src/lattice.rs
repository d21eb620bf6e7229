//! Torus and `Z^d` geometry: projections, representatives, graph distance,
//! site indexing, and the bulk region `(n^beta, n - n^beta]^d`.
//!
//! All operations here are pure functions on immutable values.

use crate::error::{Error, Result};
use crate::tolerances::{DEFAULT_BULK_BETA, FIELD_SIZE_CAP};
use serde::{Deserialize, Serialize};

/// Torus geometry: dimension `d >= 3`, side `n >= 2`, size `N = n^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    d: usize,
    n: usize,
    size: usize,
}

impl FieldConfig {
    /// Validates `d >= 3`, `n >= 2`, and that `n^d` fits the addressable
    /// range (overflow-checked, capped by [`FIELD_SIZE_CAP`]).
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::UnsupportedDimension { d });
        }
        if n < 2 {
            return Err(Error::InvalidSideLength { n });
        }
        let mut size: usize = 1;
        for _ in 0..d {
            size = size.checked_mul(n).ok_or(Error::SizeOverflow { n, d })?;
        }
        if size > FIELD_SIZE_CAP {
            return Err(Error::SizeOverflow { n, d });
        }
        Ok(FieldConfig { d, n, size })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.n
    }

    /// `N = n^d`.
    pub fn num_sites(&self) -> usize {
        self.size
    }

    /// Row-major (lexicographic) index of a torus site.
    pub fn site_index(&self, x: &TorusPoint) -> usize {
        debug_assert_eq!(x.coords.len(), self.d);
        let mut idx = 0usize;
        for &c in &x.coords {
            idx = idx * self.n + c as usize;
        }
        idx
    }

    /// Inverse of [`site_index`](Self::site_index).
    pub fn site_at(&self, mut idx: usize) -> TorusPoint {
        debug_assert!(idx < self.size);
        let mut coords = vec![0i64; self.d];
        for j in (0..self.d).rev() {
            coords[j] = (idx % self.n) as i64;
            idx /= self.n;
        }
        TorusPoint { coords }
    }

    /// All sites in row-major order.
    pub fn iter_sites(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        (0..self.size).map(move |i| self.site_at(i))
    }

    /// Torus difference `x - y` as a site (componentwise mod n).
    pub fn displacement(&self, x: &TorusPoint, y: &TorusPoint) -> TorusPoint {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(&a, &b)| (a - b).rem_euclid(self.n as i64))
            .collect();
        TorusPoint { coords }
    }

    /// The origin site.
    pub fn origin(&self) -> TorusPoint {
        TorusPoint {
            coords: vec![0; self.d],
        }
    }
}

/// A point of the discrete torus; every coordinate lies in `[0, n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    coords: Vec<i64>,
}

impl TorusPoint {
    /// Builds a torus point, checking dimension and coordinate range.
    pub fn new(coords: Vec<i64>, cfg: &FieldConfig) -> Result<Self> {
        if coords.len() != cfg.d {
            return Err(Error::DimensionMismatch {
                expected: cfg.d,
                got: coords.len(),
            });
        }
        for &c in &coords {
            if c < 0 || c >= cfg.n as i64 {
                return Err(Error::InvalidParameter {
                    name: "coords",
                    reason: format!("coordinate {c} outside [0, {})", cfg.n),
                });
            }
        }
        Ok(TorusPoint { coords })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

/// A point of `Z^d` (unconstrained signed coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    coords: Vec<i64>,
}

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint { coords }
    }

    pub fn origin(d: usize) -> Self {
        LatticePoint { coords: vec![0; d] }
    }

    /// `j`-th unit vector in `d` dimensions.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut coords = vec![0; d];
        coords[j] = 1;
        LatticePoint { coords }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Componentwise sum.
    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Canonical projection `Z^d -> (Z/nZ)^d`, a group homomorphism.
pub fn project(x: &LatticePoint, cfg: &FieldConfig) -> Result<TorusPoint> {
    if x.coords.len() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: x.coords.len(),
        });
    }
    let n = cfg.n as i64;
    Ok(TorusPoint {
        coords: x.coords.iter().map(|&c| c.rem_euclid(n)).collect(),
    })
}

/// The unique preimage of `x` in `[0, n-1]^d`; inverse of [`project`]
/// restricted to that box.
pub fn representative(x: &TorusPoint) -> LatticePoint {
    LatticePoint {
        coords: x.coords.clone(),
    }
}

/// Graph distance on the torus: `sum_j min(|x_j - y_j|, n - |x_j - y_j|)`.
pub fn torus_distance(x: &TorusPoint, y: &TorusPoint, cfg: &FieldConfig) -> Result<u64> {
    if x.coords.len() != cfg.d || y.coords.len() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: x.coords.len().max(y.coords.len()),
        });
    }
    let n = cfg.n as i64;
    Ok(x.coords
        .iter()
        .zip(&y.coords)
        .map(|(&a, &b)| {
            let diff = (a - b).abs();
            diff.min(n - diff) as u64
        })
        .sum())
}

/// If `n = m^4` for an integer `m`, returns `m^3 = n^{3/4}` exactly.
fn exact_three_quarter_power(n: usize) -> Option<i64> {
    let m = (n as f64).powf(0.25).round() as i64;
    for cand in (m - 1).max(1)..=m + 1 {
        if cand.checked_pow(4) == Some(n as i64) {
            return Some(cand.pow(3));
        }
    }
    None
}

/// Whether integer coordinate `c` satisfies `t < c <= n - t` for `t = n^beta`.
///
/// For `beta = 3/4` and `n` a perfect fourth power the comparison is exact
/// integer arithmetic; otherwise `t` is irrational and a one-ulp guard around
/// the floating evaluation classifies every integer deterministically.
fn coordinate_in_bulk(c: i64, n: usize, beta: f64) -> bool {
    if beta == 0.75 {
        if let Some(t) = exact_three_quarter_power(n) {
            return c > t && c <= n as i64 - t;
        }
    }
    let t = (n as f64).powf(beta);
    let guard = 2.0 * f64::EPSILON * t.max(1.0);
    (c as f64) > t + guard && (c as f64) <= (n as f64) - t + guard
}

/// Membership in the bulk region `R_n = (n^beta, n - n^beta]^d` with the
/// default `beta = 3/4`. Expects `x` already reduced to `[0, n-1]^d`.
pub fn bulk_region_contains(x: &LatticePoint, cfg: &FieldConfig) -> bool {
    bulk_region_contains_beta(x, cfg, DEFAULT_BULK_BETA)
}

/// Membership in `(n^beta, n - n^beta]^d` for any `beta` in `(1/2, 1)`.
pub fn bulk_region_contains_beta(x: &LatticePoint, cfg: &FieldConfig, beta: f64) -> bool {
    debug_assert_eq!(x.coords.len(), cfg.d);
    x.coords.iter().all(|&c| coordinate_in_bulk(c, cfg.n, beta))
}

/// Inclusive coordinate range `{lo, ..., hi}` of the bulk box, or `None`
/// when the box is empty.
pub fn bulk_coordinate_range(cfg: &FieldConfig, beta: f64) -> Option<(i64, i64)> {
    let n = cfg.n as i64;
    let mut lo = None;
    for c in 0..n {
        if coordinate_in_bulk(c, cfg.n, beta) {
            lo = Some(c);
            break;
        }
    }
    let lo = lo?;
    let mut hi = lo;
    for c in lo..n {
        if coordinate_in_bulk(c, cfg.n, beta) {
            hi = c;
        } else {
            break;
        }
    }
    Some((lo, hi))
}

/// `|R_n|` for the given `beta`.
pub fn bulk_region_size(cfg: &FieldConfig, beta: f64) -> usize {
    match bulk_coordinate_range(cfg, beta) {
        Some((lo, hi)) => ((hi - lo + 1) as usize).pow(cfg.d as u32),
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, n: usize) -> FieldConfig {
        FieldConfig::new(d, n).unwrap()
    }

    #[test]
    fn config_guards() {
        assert!(matches!(
            FieldConfig::new(2, 10),
            Err(Error::UnsupportedDimension { d: 2 })
        ));
        assert!(matches!(
            FieldConfig::new(3, 1),
            Err(Error::InvalidSideLength { n: 1 })
        ));
        assert!(matches!(
            FieldConfig::new(8, 1 << 12),
            Err(Error::SizeOverflow { .. })
        ));
        let c = cfg(3, 4);
        assert_eq!(c.num_sites(), 64);
    }

    #[test]
    fn project_examples() {
        let c = cfg(3, 5);
        let p = project(&LatticePoint::new(vec![7, -2, 4]), &c).unwrap();
        assert_eq!(p.coords(), &[2, 3, 4]);
        let z = project(&LatticePoint::origin(3), &c).unwrap();
        assert_eq!(z.coords(), &[0, 0, 0]);
        assert!(project(&LatticePoint::origin(4), &c).is_err());
    }

    #[test]
    fn projection_representative_bijection() {
        // exhaustive over the 64 sites of n=4, d=3 and the 27 of n=3
        for n in [3usize, 4] {
            let c = cfg(3, n);
            for site in c.iter_sites() {
                let rep = representative(&site);
                assert!(rep.coords().iter().all(|&v| v >= 0 && v < n as i64));
                assert_eq!(project(&rep, &c).unwrap(), site);
            }
        }
    }

    #[test]
    fn projection_is_homomorphism_and_periodic() {
        let c = cfg(3, 6);
        let x = LatticePoint::new(vec![5, -3, 14]);
        let y = LatticePoint::new(vec![-2, 9, 1]);
        let lhs = project(&x.add(&y), &c).unwrap();
        let px = project(&x, &c).unwrap();
        let py = project(&y, &c).unwrap();
        let rhs_coords: Vec<i64> = px
            .coords()
            .iter()
            .zip(py.coords())
            .map(|(a, b)| (a + b).rem_euclid(6))
            .collect();
        assert_eq!(lhs.coords(), rhs_coords.as_slice());
        for j in 0..3 {
            let shifted = x.add(&{
                let mut u = vec![0i64; 3];
                u[j] = 6;
                LatticePoint::new(u)
            });
            assert_eq!(project(&shifted, &c).unwrap(), px);
        }
    }

    #[test]
    fn distance_examples() {
        let c = cfg(3, 6);
        let o = c.origin();
        let wrap = TorusPoint::new(vec![5, 0, 0], &c).unwrap();
        assert_eq!(torus_distance(&o, &wrap, &c).unwrap(), 1);
        let anti = TorusPoint::new(vec![3, 3, 3], &c).unwrap();
        assert_eq!(torus_distance(&o, &anti, &c).unwrap(), 9);
        assert_eq!(torus_distance(&anti, &anti, &c).unwrap(), 0);
        // symmetry and the d * floor(n/2) ceiling
        for i in 0..c.num_sites() {
            let x = c.site_at(i);
            let dxo = torus_distance(&x, &o, &c).unwrap();
            assert_eq!(dxo, torus_distance(&o, &x, &c).unwrap());
            assert!(dxo <= 3 * 3);
        }
    }

    #[test]
    fn distance_triangle_inequality() {
        let c = cfg(3, 5);
        let pts: Vec<TorusPoint> = c.iter_sites().step_by(7).collect();
        for a in &pts {
            for b in &pts {
                for m in &pts {
                    let ab = torus_distance(a, b, &c).unwrap();
                    let am = torus_distance(a, m, &c).unwrap();
                    let mb = torus_distance(m, b, &c).unwrap();
                    assert!(ab <= am + mb);
                }
            }
        }
    }

    #[test]
    fn bulk_region_perfect_fourth_power() {
        // 81^{3/4} = 27 exactly: coordinates {28, ..., 54}
        let c = cfg(3, 81);
        assert!(bulk_region_contains(
            &LatticePoint::new(vec![28, 28, 28]),
            &c
        ));
        assert!(!bulk_region_contains(
            &LatticePoint::new(vec![27, 28, 28]),
            &c
        ));
        assert!(bulk_region_contains(
            &LatticePoint::new(vec![54, 54, 54]),
            &c
        ));
        assert!(!bulk_region_contains(
            &LatticePoint::new(vec![55, 54, 54]),
            &c
        ));
        assert_eq!(bulk_coordinate_range(&c, 0.75), Some((28, 54)));
    }

    #[test]
    fn bulk_region_generic_and_empty() {
        // 100^{3/4} ~ 31.62: coordinates {32, ..., 68}
        let c = cfg(3, 100);
        assert_eq!(bulk_coordinate_range(&c, 0.75), Some((32, 68)));
        // exhaustive membership scan agrees with the range
        for coord in 0..100i64 {
            let inside = coordinate_in_bulk(coord, 100, 0.75);
            assert_eq!(inside, (32..=68).contains(&coord), "coord {coord}");
        }
        // 16^{3/4} = 8: interval (8, 8] is empty
        let c16 = cfg(3, 16);
        assert_eq!(bulk_coordinate_range(&c16, 0.75), None);
        assert_eq!(bulk_region_size(&c16, 0.75), 0);
    }

    #[test]
    fn bulk_region_size_matches_floor_formula() {
        for n in 3..=100usize {
            let c = cfg(3, n);
            let t = (n as f64).powf(0.75);
            let expected = if (t - t.round()).abs() > 1e-9 {
                let lo = t.floor() as i64;
                let hi = (n as f64 - t).floor() as i64;
                ((hi - lo).max(0) as usize).pow(3)
            } else {
                continue; // integral power handled by the exact-path test
            };
            assert_eq!(bulk_region_size(&c, 0.75), expected, "n={n}");
        }
    }

    #[test]
    fn site_indexing_round_trip() {
        let c = cfg(4, 5);
        for idx in 0..c.num_sites() {
            assert_eq!(c.site_index(&c.site_at(idx)), idx);
        }
    }
}
