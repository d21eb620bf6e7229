//! Finite regions on `Z^d` and the torus: explicit site sets, predicate
//! balls/boxes, and the membership traits the walk simulator steps against.

use crate::error::{Error, Result};
use crate::lattice::{FieldConfig, LatticePoint, TorusPoint};
use std::collections::HashMap;

/// Membership test for walks on `Z^d`. Implementations must answer for any
/// coordinate vector of the right dimension.
pub trait ZdRegion {
    fn dimension(&self) -> usize;
    fn contains(&self, coords: &[i64]) -> bool;
}

/// An explicit finite set of `Z^d` sites, stored in lexicographic order with
/// a hash index for O(1) membership.
#[derive(Debug, Clone)]
pub struct SiteSet {
    d: usize,
    sites: Vec<LatticePoint>,
    index: HashMap<Vec<i64>, usize>,
}

impl SiteSet {
    pub fn from_points(d: usize, points: Vec<LatticePoint>) -> Result<Self> {
        let mut sites = Vec::with_capacity(points.len());
        for p in points {
            if p.dimension() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dimension(),
                });
            }
            sites.push(p);
        }
        sites.sort();
        sites.dedup();
        if sites.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let index = sites
            .iter()
            .enumerate()
            .map(|(i, p)| (p.coords().to_vec(), i))
            .collect();
        Ok(SiteSet { d, sites, index })
    }

    /// `{x : |x|_1 <= radius}`.
    pub fn l1_ball(d: usize, radius: i64) -> Result<Self> {
        let pts = enumerate_box(d, -radius, radius)
            .into_iter()
            .filter(|c| c.iter().map(|v| v.abs()).sum::<i64>() <= radius)
            .map(LatticePoint::new)
            .collect();
        Self::from_points(d, pts)
    }

    /// `{x : |x|_inf <= radius}`.
    pub fn linf_ball(d: usize, radius: i64) -> Result<Self> {
        let pts = enumerate_box(d, -radius, radius)
            .into_iter()
            .map(LatticePoint::new)
            .collect();
        Self::from_points(d, pts)
    }

    /// The box `[lo, hi]^d` (inclusive on both ends).
    pub fn cube(d: usize, lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::EmptyRegion);
        }
        let pts = enumerate_box(d, lo, hi)
            .into_iter()
            .map(LatticePoint::new)
            .collect();
        Self::from_points(d, pts)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn site(&self, i: usize) -> &LatticePoint {
        &self.sites[i]
    }

    pub fn sites(&self) -> &[LatticePoint] {
        &self.sites
    }

    pub fn position(&self, p: &LatticePoint) -> Option<usize> {
        self.index.get(p.coords()).copied()
    }
}

impl ZdRegion for SiteSet {
    fn dimension(&self) -> usize {
        self.d
    }

    fn contains(&self, coords: &[i64]) -> bool {
        self.index.contains_key(coords)
    }
}

/// `{x : |x|_inf <= radius}` as a predicate region (no site storage).
#[derive(Debug, Clone, Copy)]
pub struct LinfBall {
    pub d: usize,
    pub radius: i64,
}

impl ZdRegion for LinfBall {
    fn dimension(&self) -> usize {
        self.d
    }

    fn contains(&self, coords: &[i64]) -> bool {
        coords.iter().all(|c| c.abs() <= self.radius)
    }
}

/// Inclusive box `prod_j [lo_j, hi_j]` as a predicate region.
#[derive(Debug, Clone)]
pub struct LatticeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl ZdRegion for LatticeBox {
    fn dimension(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, coords: &[i64]) -> bool {
        coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// A proper subset of the torus, with O(1) membership by site index.
#[derive(Debug, Clone)]
pub struct TorusSubset {
    cfg: FieldConfig,
    sites: Vec<usize>,
    member: Vec<bool>,
}

impl TorusSubset {
    pub fn from_sites(cfg: &FieldConfig, points: Vec<TorusPoint>) -> Result<Self> {
        let mut member = vec![false; cfg.num_sites()];
        for p in &points {
            member[cfg.site_index(p)] = true;
        }
        let sites: Vec<usize> = (0..cfg.num_sites()).filter(|&i| member[i]).collect();
        if sites.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(TorusSubset {
            cfg: *cfg,
            sites,
            member,
        })
    }

    /// Everything except one site.
    pub fn complement_of(cfg: &FieldConfig, excluded: &TorusPoint) -> Result<Self> {
        let ex = cfg.site_index(excluded);
        let mut member = vec![true; cfg.num_sites()];
        member[ex] = false;
        let sites: Vec<usize> = (0..cfg.num_sites()).filter(|&i| i != ex).collect();
        Ok(TorusSubset {
            cfg: *cfg,
            sites,
            member,
        })
    }

    /// Image under projection of the `Z^d` box `[lo, hi]^d`.
    pub fn box_image(cfg: &FieldConfig, lo: i64, hi: i64) -> Result<Self> {
        let pts: Result<Vec<TorusPoint>> = enumerate_box(cfg.dimension(), lo, hi)
            .into_iter()
            .map(|c| crate::lattice::project(&LatticePoint::new(c), cfg))
            .collect();
        Self::from_sites(cfg, pts?)
    }

    pub fn cfg(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Site indices in increasing order.
    pub fn site_indices(&self) -> &[usize] {
        &self.sites
    }

    pub fn is_full(&self) -> bool {
        self.sites.len() == self.cfg.num_sites()
    }

    pub fn contains_index(&self, site_index: usize) -> bool {
        self.member[site_index]
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.member[self.cfg.site_index(p)]
    }
}

fn enumerate_box(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let width = (hi - lo + 1) as usize;
    let total = width.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut coords = vec![lo; d];
    for _ in 0..total {
        out.push(coords.clone());
        for j in (0..d).rev() {
            coords[j] += 1;
            if coords[j] <= hi {
                break;
            }
            coords[j] = lo;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_ball_size() {
        // |{x in Z^3 : |x|_1 <= 2}| = 25
        let set = SiteSet::l1_ball(3, 2).unwrap();
        assert_eq!(set.len(), 25);
        assert!(set.contains(&[2, 0, 0]));
        assert!(!set.contains(&[2, 1, 0]));
    }

    #[test]
    fn linf_ball_and_lookup() {
        let set = SiteSet::linf_ball(3, 1).unwrap();
        assert_eq!(set.len(), 27);
        let p = LatticePoint::new(vec![1, -1, 0]);
        let i = set.position(&p).unwrap();
        assert_eq!(set.site(i), &p);
    }

    #[test]
    fn torus_subset_box_image() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let sub = TorusSubset::box_image(&cfg, 1, 2).unwrap();
        assert_eq!(sub.len(), 8);
        assert!(!sub.is_full());
        let inside = TorusPoint::new(vec![1, 2, 1], &cfg).unwrap();
        let outside = TorusPoint::new(vec![0, 2, 1], &cfg).unwrap();
        assert!(sub.contains(&inside));
        assert!(!sub.contains(&outside));
    }

    #[test]
    fn empty_region_rejected() {
        assert!(matches!(
            SiteSet::from_points(3, vec![]),
            Err(Error::EmptyRegion)
        ));
    }
}
