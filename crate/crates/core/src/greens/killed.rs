//! Killed Green's functions by dense exact linear algebra, plus the spatial
//! Markov identity verifiers built on them.
//!
//! For a finite region the killed Green matrix is `(I - P_V)^{-1}`, where
//! `P_V` is the walk's one-step matrix restricted to the region. Everything
//! else falls out of the same inverse:
//!
//! * expected exit time: `E_x[T_V] = sum_w g^V(x, w)` (row sum);
//! * harmonic measure: `P_x[X_{T_V} = z] = sum_w g^V(x, w) p(w, z)` for `z`
//!   outside the region.
//!
//! These are oracles, where exactness matters and speed does not, so regions
//! above
//! [`DENSE_REGION_CAP`] sites are refused rather than approximated.

use crate::error::{Error, Result};
use crate::greens::quadrature::green_zd;
use crate::greens::GreenTable;
use crate::lattice::{FieldConfig, LatticePoint, TorusPoint};
use crate::region::{SiteSet, TorusSubset};
use crate::tolerances::DENSE_REGION_CAP;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

fn invert_killed_system(mut m: DMatrix<f64>) -> DMatrix<f64> {
    // I - P_V is strictly diagonally dominant after killing, hence
    // nonsingular for any proper region; failure here is a logic bug.
    let ok = m.try_inverse_mut();
    assert!(ok, "killed system (I - P_V) must be invertible");
    m
}

/// Killed Green's function on a finite subset of `Z^d`.
pub struct KilledGreenZd {
    set: SiteSet,
    inverse: DMatrix<f64>,
}

impl KilledGreenZd {
    pub fn new(set: SiteSet) -> Result<Self> {
        let size = set.len();
        if size > DENSE_REGION_CAP {
            return Err(Error::RegionTooLarge {
                size,
                cap: DENSE_REGION_CAP,
            });
        }
        let d = set.dimension();
        let degree = (2 * d) as f64;
        let mut m = DMatrix::<f64>::identity(size, size);
        let mut buf = vec![0i64; d];
        for i in 0..size {
            for (axis, sign) in neighbor_dirs(d) {
                buf.copy_from_slice(set.site(i).coords());
                buf[axis] += sign;
                if let Some(j) = position_of(&set, &buf) {
                    m[(i, j)] -= 1.0 / degree;
                }
            }
        }
        Ok(KilledGreenZd {
            set,
            inverse: invert_killed_system(m),
        })
    }

    pub fn region(&self) -> &SiteSet {
        &self.set
    }

    /// `g^V(x, y)`; zero when either argument lies outside the region.
    pub fn green(&self, x: &LatticePoint, y: &LatticePoint) -> f64 {
        match (self.set.position(x), self.set.position(y)) {
            (Some(i), Some(j)) => self.inverse[(i, j)],
            _ => 0.0,
        }
    }

    /// Full `g^V` matrix in region ordering.
    pub fn green_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// `E_x[T_V]`; zero for `x` outside the region.
    pub fn expected_exit_time(&self, x: &LatticePoint) -> f64 {
        match self.set.position(x) {
            Some(i) => self.inverse.row(i).sum(),
            None => 0.0,
        }
    }

    /// Distribution of `X_{T_V}` started from `x`, as (exterior site, mass)
    /// pairs in lexicographic site order. For `x` outside the region the
    /// exit is immediate: a point mass at `x`.
    pub fn harmonic_measure(&self, x: &LatticePoint) -> Vec<(LatticePoint, f64)> {
        let d = self.set.dimension();
        let i = match self.set.position(x) {
            Some(i) => i,
            None => return vec![(x.clone(), 1.0)],
        };
        let degree = (2 * d) as f64;
        let mut out: BTreeMap<LatticePoint, f64> = BTreeMap::new();
        let mut buf = vec![0i64; d];
        for w in 0..self.set.len() {
            let mass = self.inverse[(i, w)] / degree;
            for (axis, sign) in neighbor_dirs(d) {
                buf.copy_from_slice(self.set.site(w).coords());
                buf[axis] += sign;
                if position_of(&self.set, &buf).is_none() {
                    *out.entry(LatticePoint::new(buf.clone())).or_insert(0.0) += mass;
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Killed Green's function on a proper subset of the torus.
pub struct KilledGreenTorus {
    subset: TorusSubset,
    /// region index of each torus site, or usize::MAX outside
    slot: Vec<usize>,
    inverse: DMatrix<f64>,
}

impl KilledGreenTorus {
    pub fn new(subset: TorusSubset) -> Result<Self> {
        if subset.is_full() {
            return Err(Error::FullTorusRegion);
        }
        let size = subset.len();
        if size > DENSE_REGION_CAP {
            return Err(Error::RegionTooLarge {
                size,
                cap: DENSE_REGION_CAP,
            });
        }
        let cfg = *subset.cfg();
        let d = cfg.dimension();
        let degree = (2 * d) as f64;
        let mut slot = vec![usize::MAX; cfg.num_sites()];
        for (i, &site) in subset.site_indices().iter().enumerate() {
            slot[site] = i;
        }
        let mut m = DMatrix::<f64>::identity(size, size);
        for (i, &site) in subset.site_indices().iter().enumerate() {
            for nb in torus_neighbors(&cfg, site) {
                let j = slot[nb];
                if j != usize::MAX {
                    m[(i, j)] -= 1.0 / degree;
                }
            }
        }
        Ok(KilledGreenTorus {
            subset,
            slot,
            inverse: invert_killed_system(m),
        })
    }

    pub fn region(&self) -> &TorusSubset {
        &self.subset
    }

    pub fn green(&self, x: &TorusPoint, y: &TorusPoint) -> f64 {
        let cfg = self.subset.cfg();
        let (i, j) = (self.slot[cfg.site_index(x)], self.slot[cfg.site_index(y)]);
        if i == usize::MAX || j == usize::MAX {
            0.0
        } else {
            self.inverse[(i, j)]
        }
    }

    pub fn green_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn expected_exit_time(&self, x: &TorusPoint) -> f64 {
        let i = self.slot[self.subset.cfg().site_index(x)];
        if i == usize::MAX {
            0.0
        } else {
            self.inverse.row(i).sum()
        }
    }

    /// Exit distribution over the exterior boundary, as (site index, mass).
    pub fn harmonic_measure(&self, x: &TorusPoint) -> Vec<(usize, f64)> {
        let cfg = *self.subset.cfg();
        let xi = cfg.site_index(x);
        let i = self.slot[xi];
        if i == usize::MAX {
            return vec![(xi, 1.0)];
        }
        let degree = (2 * cfg.dimension()) as f64;
        let mut mass = vec![0.0f64; cfg.num_sites()];
        for (w, &site) in self.subset.site_indices().iter().enumerate() {
            let g = self.inverse[(i, w)] / degree;
            for nb in torus_neighbors(&cfg, site) {
                if self.slot[nb] == usize::MAX {
                    mass[nb] += g;
                }
            }
        }
        mass.into_iter()
            .enumerate()
            .filter(|(_, m)| *m > 0.0)
            .collect()
    }
}

fn neighbor_dirs(d: usize) -> impl Iterator<Item = (usize, i64)> {
    (0..d).flat_map(|axis| [(axis, 1i64), (axis, -1i64)])
}

fn torus_neighbors(cfg: &FieldConfig, site: usize) -> Vec<usize> {
    let d = cfg.dimension();
    let n = cfg.side() as i64;
    let point = cfg.site_at(site);
    let mut out = Vec::with_capacity(2 * d);
    for (axis, sign) in neighbor_dirs(d) {
        let mut coords = point.coords().to_vec();
        coords[axis] = (coords[axis] + sign).rem_euclid(n);
        let tp = TorusPoint::new(coords, cfg).expect("neighbor stays on torus");
        out.push(cfg.site_index(&tp));
    }
    out
}

fn position_of(set: &SiteSet, coords: &[i64]) -> Option<usize> {
    set.position(&LatticePoint::new(coords.to_vec()))
}

/// Residual of the spatial Markov identity on `Z^d`:
///
/// `| g(x,y) - g^V(x,y) - E_x[ g(X_{T_V}, y) ] |`,
///
/// with `g` from quadrature, `g^V` and the harmonic measure from exact
/// solves. Exit from a finite region is almost sure, so the indicator in
/// the expectation is identically one.
pub fn verify_spatial_markov_zd(
    region: &SiteSet,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<f64> {
    let d = region.dimension();
    let solver = KilledGreenZd::new(region.clone())?;
    let direct = green_zd(&difference(x, y), d)?;
    let killed = solver.green(x, y);
    let mut boundary_term = 0.0;
    for (site, mass) in solver.harmonic_measure(x) {
        boundary_term += mass * green_zd(&difference(&site, y), d)?;
    }
    Ok((direct - killed - boundary_term).abs())
}

/// Residual of the torus Markov decomposition:
///
/// `| G(x,y) - g^U(x,y) - E_x[ G(X_{T_U}, y) ] + n^{-d} E_x[T_U] |`,
///
/// with `G` from the spectral table and every expectation an exact solve.
pub fn verify_markov_decomposition_torus(
    table: &GreenTable,
    region: &TorusSubset,
    x: &TorusPoint,
    y: &TorusPoint,
) -> Result<f64> {
    let cfg = table.cfg();
    if region.cfg() != cfg {
        return Err(Error::InvalidParameter {
            name: "region",
            reason: "region and table built for different tori".into(),
        });
    }
    let solver = KilledGreenTorus::new(region.clone())?;
    let direct = table.value(x, y);
    let killed = solver.green(x, y);
    let mut boundary_term = 0.0;
    for (site, mass) in solver.harmonic_measure(x) {
        boundary_term += mass * table.value(&cfg.site_at(site), y);
    }
    let exit_time = solver.expected_exit_time(x);
    let correction = exit_time / cfg.num_sites() as f64;
    Ok((direct - killed - boundary_term + correction).abs())
}

fn difference(x: &LatticePoint, y: &LatticePoint) -> LatticePoint {
    LatticePoint::new(
        x.coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| a - b)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::zero_average_green;
    use crate::seed::rng_from_seed;
    use crate::tolerances::{MARKOV_TORUS_TOL, MARKOV_ZD_TOL};
    use rand::Rng;

    fn origin3() -> LatticePoint {
        LatticePoint::origin(3)
    }

    #[test]
    fn singleton_region_green_is_one() {
        // first step always exits; only the initial visit counts
        let set = SiteSet::from_points(3, vec![origin3()]).unwrap();
        let solver = KilledGreenZd::new(set).unwrap();
        assert!((solver.green(&origin3(), &origin3()) - 1.0).abs() < 1e-14);
        assert!((solver.expected_exit_time(&origin3()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_site_region_matches_absorbing_chain() {
        // V = {0, e1}: return probability (1/6)^2 gives g(0,0) = 36/35
        let set = SiteSet::from_points(3, vec![origin3(), LatticePoint::unit(3, 0)]).unwrap();
        let solver = KilledGreenZd::new(set).unwrap();
        let g = solver.green(&origin3(), &origin3());
        assert!((g - 36.0 / 35.0).abs() < 1e-13, "g = {g}");
    }

    #[test]
    fn killed_green_symmetric_on_random_regions() {
        let mut rng = rng_from_seed(7);
        for _ in 0..5 {
            let mut pts = vec![origin3()];
            while pts.len() < 20 {
                let base = pts[rng.random_range(0..pts.len())].clone();
                let mut coords = base.coords().to_vec();
                let axis = rng.random_range(0..3);
                coords[axis] += if rng.random_range(0..2) == 0 { 1 } else { -1 };
                pts.push(LatticePoint::new(coords));
            }
            let set = SiteSet::from_points(3, pts).unwrap();
            let solver = KilledGreenZd::new(set).unwrap();
            let m = solver.green_matrix();
            let mut asym = 0.0f64;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
                    assert!(m[(i, j)] >= -1e-14);
                }
            }
            assert!(asym <= 1e-10, "asymmetry {asym}");
        }
    }

    #[test]
    fn harmonic_measure_of_singleton_is_uniform() {
        let set = SiteSet::from_points(3, vec![origin3()]).unwrap();
        let solver = KilledGreenZd::new(set).unwrap();
        let hm = solver.harmonic_measure(&origin3());
        assert_eq!(hm.len(), 6);
        for (_, mass) in &hm {
            assert!((mass - 1.0 / 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn markov_identity_singleton() {
        let set = SiteSet::from_points(3, vec![origin3()]).unwrap();
        let res = verify_spatial_markov_zd(&set, &origin3(), &origin3()).unwrap();
        assert!(res <= MARKOV_ZD_TOL, "residual {res}");
    }

    #[test]
    fn markov_identity_outside_region_is_exact() {
        let set = SiteSet::from_points(3, vec![origin3()]).unwrap();
        let x = LatticePoint::new(vec![3, 1, 0]);
        let res = verify_spatial_markov_zd(&set, &x, &origin3()).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn markov_identity_l1_ball() {
        let set = SiteSet::l1_ball(3, 2).unwrap();
        let res = verify_spatial_markov_zd(&set, &origin3(), &LatticePoint::unit(3, 0)).unwrap();
        assert!(res <= MARKOV_ZD_TOL, "residual {res}");
    }

    #[test]
    fn torus_decomposition_box_image() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let table = zero_average_green(&cfg).unwrap();
        let region = TorusSubset::box_image(&cfg, 1, 2).unwrap();
        let x = TorusPoint::new(vec![1, 1, 1], &cfg).unwrap();
        let res = verify_markov_decomposition_torus(&table, &region, &x, &x).unwrap();
        assert!(res <= MARKOV_TORUS_TOL, "residual {res}");
    }

    #[test]
    fn torus_decomposition_complement_of_site() {
        let cfg = FieldConfig::new(3, 5).unwrap();
        let table = zero_average_green(&cfg).unwrap();
        let excluded = TorusPoint::new(vec![2, 2, 2], &cfg).unwrap();
        let region = TorusSubset::complement_of(&cfg, &excluded).unwrap();
        let mut rng = rng_from_seed(11);
        for _ in 0..4 {
            let x = cfg.site_at(rng.random_range(0..cfg.num_sites()));
            let y = cfg.site_at(rng.random_range(0..cfg.num_sites()));
            let res = verify_markov_decomposition_torus(&table, &region, &x, &y).unwrap();
            assert!(res <= MARKOV_TORUS_TOL, "x={x:?} y={y:?} residual {res}");
        }
    }

    #[test]
    fn torus_decomposition_outside_region_is_exact() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let table = zero_average_green(&cfg).unwrap();
        let region = TorusSubset::box_image(&cfg, 1, 2).unwrap();
        let x = TorusPoint::new(vec![0, 0, 0], &cfg).unwrap();
        let y = TorusPoint::new(vec![2, 1, 3], &cfg).unwrap();
        let res = verify_markov_decomposition_torus(&table, &region, &x, &y).unwrap();
        assert!(res <= 1e-12);
    }

    #[test]
    fn full_torus_region_rejected() {
        let cfg = FieldConfig::new(3, 3).unwrap();
        let all: Vec<TorusPoint> = cfg.iter_sites().collect();
        let sub = TorusSubset::from_sites(&cfg, all).unwrap();
        assert!(matches!(
            KilledGreenTorus::new(sub),
            Err(Error::FullTorusRegion)
        ));
    }
}
