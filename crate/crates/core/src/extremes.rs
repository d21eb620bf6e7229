//! Normalizing constants, exceedance point patterns, and field maxima.
//!
//! The centering/scaling is the classical one for `N` i.i.d. Gaussians of
//! variance `v`:
//!
//! ```text
//! b_N = sqrt(v) [ sqrt(2 log N) - (log log N + log 4 pi) / (2 sqrt(2 log N)) ],
//! a_N = v / b_N .
//! ```
//!
//! A field maps to the point pattern `{ (alpha / n, (Psi(alpha) - b_N) / a_N) }`
//! restricted to heights above a finite storage floor; all statistics in the
//! battery use test functions supported above some level strictly over the
//! floor, so the restriction loses nothing.

use crate::error::{Error, Result};
use crate::lattice::TorusPoint;
use crate::sampler::TorusField;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// `(a_N, b_N)` for a torus of `N` sites and limit variance `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizingConstants {
    n_sites: usize,
    v: f64,
    a: f64,
    b: f64,
}

/// Builds the constants. Requires `N >= 3` (so `log log N > 0`) and `v > 0`.
pub fn normalizing_constants(n_sites: usize, v: f64) -> Result<NormalizingConstants> {
    if n_sites < 3 {
        return Err(Error::InvalidParameter {
            name: "n_sites",
            reason: format!("need N >= 3 for log log N, got {n_sites}"),
        });
    }
    if v.is_nan() || v <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "v",
            reason: format!("variance must be positive, got {v}"),
        });
    }
    let log_n = (n_sites as f64).ln();
    let root = (2.0 * log_n).sqrt();
    let b = v.sqrt() * (root - (log_n.ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * root));
    Ok(NormalizingConstants {
        n_sites,
        v,
        a: v / b,
        b,
    })
}

impl NormalizingConstants {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `u_N(delta) = a_N delta + b_N`, the raw-field threshold at rescaled
    /// level `delta`. Strictly increasing in `delta`.
    pub fn threshold(&self, delta: f64) -> f64 {
        self.a * delta + self.b
    }

    /// Inverse of [`threshold`](Self::threshold): the rescaled height of a
    /// raw field value.
    pub fn rescale(&self, raw: f64) -> f64 {
        (raw - self.b) / self.a
    }
}

/// One stored exceedance: rescaled location in `[0,1)^d` and rescaled height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternPoint {
    pub location: Vec<f64>,
    pub height: f64,
}

/// The restriction of a field's extremal point measure to heights above
/// `floor`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointPattern {
    pub d: usize,
    pub n: usize,
    pub floor: f64,
    pub field_seed: u64,
    pub constants: NormalizingConstants,
    /// Points in site lexicographic order (hence no duplicates).
    pub points: Vec<PatternPoint>,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Monotone restriction: keeps exactly the points above the new floor.
    pub fn restrict_above(&self, new_floor: f64) -> PointPattern {
        PointPattern {
            floor: new_floor.max(self.floor),
            points: self
                .points
                .iter()
                .filter(|p| p.height > new_floor)
                .cloned()
                .collect(),
            constants: self.constants,
            ..self.clone()
        }
    }

    /// Number of points with height strictly above `level`.
    pub fn count_above(&self, level: f64) -> usize {
        self.points.iter().filter(|p| p.height > level).count()
    }

    /// CSV export: `loc_1,...,loc_d,height`, sorted by height descending
    /// (location order breaks exact ties deterministically).
    pub fn export_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let header: Vec<String> = (1..=self.d)
            .map(|j| format!("loc_{j}"))
            .chain(std::iter::once("height".into()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        let mut sorted: Vec<&PatternPoint> = self.points.iter().collect();
        sorted.sort_by(|a, b| {
            b.height
                .partial_cmp(&a.height)
                .unwrap()
                .then_with(|| a.location.partial_cmp(&b.location).unwrap())
        });
        for p in sorted {
            let mut row: Vec<String> = p.location.iter().map(|c| crate::fmt_f64(*c)).collect();
            row.push(crate::fmt_f64(p.height));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Emits the pattern of sites whose rescaled height exceeds `floor`.
pub fn extract_point_pattern(
    field: &TorusField,
    constants: &NormalizingConstants,
    floor: f64,
) -> Result<PointPattern> {
    let cfg = field.cfg();
    if constants.n_sites != cfg.num_sites() {
        return Err(Error::InvalidParameter {
            name: "constants",
            reason: format!(
                "constants built for N = {}, field has N = {}",
                constants.n_sites,
                cfg.num_sites()
            ),
        });
    }
    let n = cfg.side() as f64;
    let mut points = Vec::new();
    for (idx, &raw) in field.values().iter().enumerate() {
        let height = constants.rescale(raw);
        if height > floor {
            let site = cfg.site_at(idx);
            points.push(PatternPoint {
                location: site.coords().iter().map(|&c| c as f64 / n).collect(),
                height,
            });
        }
    }
    Ok(PointPattern {
        d: cfg.dimension(),
        n: cfg.side(),
        floor,
        field_seed: field.seed(),
        constants: *constants,
        points,
    })
}

/// Argmax site (lexicographically smallest on ties), the raw maximum, and
/// the rescaled maximum.
pub fn field_maximum(
    field: &TorusField,
    constants: &NormalizingConstants,
) -> (TorusPoint, f64, f64) {
    let values = field.values();
    let mut best = 0usize;
    for (idx, &v) in values.iter().enumerate() {
        // strict inequality keeps the first (lexicographically smallest) site
        if v > values[best] {
            best = idx;
        }
    }
    let raw = values[best];
    (field.cfg().site_at(best), raw, constants.rescale(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FieldConfig;
    use crate::sampler::TorusField;

    const V: f64 = crate::tolerances::GOLDEN_G0_D3;

    #[test]
    fn constants_match_direct_evaluation() {
        // frozen against an independent high-precision re-evaluation
        let c = normalizing_constants(8000, V).unwrap();
        assert!((c.b() - 4.5342762).abs() < 1e-6, "b = {}", c.b());
        assert!((c.a() - 0.3344274).abs() < 1e-6, "a = {}", c.a());
        assert!((c.threshold(1.0) - 4.8687036).abs() < 1e-6);
        assert!((c.threshold(0.0) - c.b()).abs() == 0.0);
        let c512 = normalizing_constants(512, V).unwrap();
        assert!((c512.b() - 3.5893452).abs() < 1e-6, "b = {}", c512.b());
        assert!((c512.a() - 0.4224687).abs() < 1e-6, "a = {}", c512.a());
    }

    #[test]
    fn product_identity_holds_to_ulp() {
        for (n_sites, v) in [(8usize, 0.5f64), (512, V), (8000, 2.25), (1_000_000, 1.0)] {
            let c = normalizing_constants(n_sites, v).unwrap();
            let prod = c.a() * c.b();
            assert!(
                (prod - v).abs() <= f64::EPSILON * v,
                "a*b = {prod} vs v = {v}"
            );
            assert!(c.a() > 0.0 && c.b() > 0.0);
        }
    }

    #[test]
    fn guards() {
        assert!(normalizing_constants(2, 1.0).is_err());
        assert!(normalizing_constants(100, 0.0).is_err());
        assert!(normalizing_constants(100, -1.0).is_err());
    }

    #[test]
    fn thresholds_increase_in_delta() {
        let c = normalizing_constants(512, V).unwrap();
        let mut last = f64::NEG_INFINITY;
        for i in 0..50 {
            let delta = -5.0 + i as f64 * 0.3;
            let u = c.threshold(delta);
            assert!(u > last);
            last = u;
        }
    }

    fn synthetic_field(cfg: FieldConfig, values: Vec<f64>) -> TorusField {
        TorusField::from_values(cfg, values, 0).unwrap()
    }

    #[test]
    fn empty_and_singleton_patterns() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let low = synthetic_field(cfg, vec![0.0; 64]);
        // all rescaled values equal -b/a; a floor above that gives nothing
        let floor = constants.rescale(0.0) + 1.0;
        let pattern = extract_point_pattern(&low, &constants, floor).unwrap();
        assert!(pattern.is_empty());

        let mut values = vec![0.0; 64];
        values[17] = constants.threshold(floor) + 1.0;
        let one = synthetic_field(cfg, values);
        let pattern = extract_point_pattern(&one, &constants, floor).unwrap();
        assert_eq!(pattern.len(), 1);
        let site = cfg.site_at(17);
        let expect: Vec<f64> = site.coords().iter().map(|&c| c as f64 / 4.0).collect();
        assert_eq!(pattern.points[0].location, expect);
    }

    #[test]
    fn pattern_matches_brute_force_enumeration() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let values: Vec<f64> = (0..64)
            .map(|i| ((i * 37 % 64) as f64 - 32.0) / 4.0)
            .collect();
        let field = synthetic_field(cfg, values.clone());
        let floor = -1.0;
        let pattern = extract_point_pattern(&field, &constants, floor).unwrap();
        // brute force over all 64 sites
        let expected: Vec<usize> = (0..64)
            .filter(|&i| constants.rescale(values[i]) > floor)
            .collect();
        assert_eq!(pattern.len(), expected.len());
        for (point, &idx) in pattern.points.iter().zip(&expected) {
            let site = cfg.site_at(idx);
            let loc: Vec<f64> = site.coords().iter().map(|&c| c as f64 / 4.0).collect();
            assert_eq!(point.location, loc);
            assert!((point.height - constants.rescale(values[idx])).abs() < 1e-15);
        }
        // count equals the number of threshold exceedances at the floor level
        assert_eq!(
            pattern.len(),
            values
                .iter()
                .filter(|&&v| v > constants.threshold(floor))
                .count()
        );
    }

    #[test]
    fn raising_the_floor_is_monotone() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let field = crate::sampler::sample_field(&cfg, 12345).unwrap();
        let base = extract_point_pattern(&field, &constants, -10.0).unwrap();
        for floor in [-5.0, -2.0, 0.0, 1.0] {
            let restricted = base.restrict_above(floor);
            let direct = extract_point_pattern(&field, &constants, floor).unwrap();
            assert_eq!(restricted.points, direct.points, "floor {floor}");
        }
    }

    #[test]
    fn maximum_of_constant_field_breaks_ties_lexicographically() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let field = synthetic_field(cfg, vec![0.0; 64]);
        let (site, raw, rescaled) = field_maximum(&field, &constants);
        assert_eq!(site.coords(), &[0, 0, 0]);
        assert_eq!(raw, 0.0);
        assert!((rescaled + constants.b() / constants.a()).abs() < 1e-15);
    }

    #[test]
    fn maximum_matches_exhaustive_scan_and_pattern() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let field = crate::sampler::sample_field(&cfg, 777).unwrap();
        let (_, raw, rescaled) = field_maximum(&field, &constants);
        let brute = field.values().iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(raw, brute);
        let pattern = extract_point_pattern(&field, &constants, rescaled - 1.0).unwrap();
        let top = pattern
            .points
            .iter()
            .map(|p| p.height)
            .fold(f64::MIN, f64::max);
        assert_eq!(top, rescaled);
    }

    #[test]
    fn rescaling_round_trips() {
        let constants = normalizing_constants(512, V).unwrap();
        for raw in [-3.0f64, 0.0, 2.5, 4.7] {
            let back = constants.threshold(constants.rescale(raw));
            assert!((back - raw).abs() <= 4.0 * f64::EPSILON * raw.abs().max(1.0));
        }
    }

    #[test]
    fn csv_sorted_by_height_desc() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, V).unwrap();
        let field = crate::sampler::sample_field(&cfg, 99).unwrap();
        let pattern = extract_point_pattern(&field, &constants, -10.0).unwrap();
        let mut buf = Vec::new();
        pattern.export_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let heights: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(heights.len(), pattern.len());
        for w in heights.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}
