//! Exact sampling of the zero-average field, `O(N log N)` per realization.
//!
//! Standard circulant construction: the eigenbasis of the covariance is the
//! discrete Fourier basis, so one draws an independent complex Gaussian
//! amplitude per conjugate mode pair and inverse-transforms. Frequencies are
//! partitioned by the canonical lexicographic rule into the zero mode
//! (forced to zero, which is what makes every realization sum to zero),
//! self-conjugate modes (`2k = 0 mod n`, one real Gaussian), and
//! representative/conjugate pairs (`k` lexicographically before `-k mod n`,
//! real and imaginary parts drawn as two Gaussians). With amplitudes scaled
//! to `N / lambda_k` per mode, the inverse transform divided by `N` has
//! covariance exactly `G`.
//!
//! Draw order is the lexicographic frequency scan, so a field is a pure
//! function of `(cfg, seed)`.

use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::greens::{laplacian_eigenvalues, GreenTable};
use crate::lattice::{FieldConfig, TorusPoint};
use crate::seed::{rng_from_seed, SeedPolicy};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use std::io::{Read, Write};

/// One realization of the field: `N` heights in site row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    cfg: FieldConfig,
    values: Vec<f64>,
    seed: u64,
}

impl TorusField {
    /// Wraps raw values (used by tests and the readers); checks length and
    /// finiteness.
    pub fn from_values(cfg: FieldConfig, values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.len() != cfg.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: cfg.num_sites(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "non-finite field value".into(),
            });
        }
        Ok(TorusField { cfg, values, seed })
    }

    pub fn cfg(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: &TorusPoint) -> f64 {
        self.values[self.cfg.site_index(x)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Binary export: magic, d, n, seed, count, then count little-endian
    /// doubles. Round-trips exactly.
    pub fn write_binary<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(FIELD_MAGIC)?;
        out.write_all(&(self.cfg.dimension() as u32).to_le_bytes())?;
        out.write_all(&(self.cfg.side() as u32).to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        out.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(input: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != FIELD_MAGIC {
            return Err(Error::Format {
                what: "field binary",
                detail: "bad magic header".into(),
            });
        }
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf)?;
        let d = u32::from_le_bytes(u32buf) as usize;
        input.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        let mut u64buf = [0u8; 8];
        input.read_exact(&mut u64buf)?;
        let seed = u64::from_le_bytes(u64buf);
        input.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf) as usize;
        let cfg = FieldConfig::new(d, n)?;
        if count != cfg.num_sites() {
            return Err(Error::Format {
                what: "field binary",
                detail: format!("count {count} does not match n^d = {}", cfg.num_sites()),
            });
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            input.read_exact(&mut u64buf)?;
            values.push(f64::from_le_bytes(u64buf));
        }
        TorusField::from_values(cfg, values, seed)
    }

    /// CSV export: `x_1,...,x_d,value` in site order, full-precision floats.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let d = self.cfg.dimension();
        let header: Vec<String> = (1..=d)
            .map(|j| format!("x_{j}"))
            .chain(std::iter::once("value".into()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for idx in 0..self.values.len() {
            let site = self.cfg.site_at(idx);
            let mut row: Vec<String> = site.coords().iter().map(|c| c.to_string()).collect();
            row.push(crate::fmt_f64(self.values[idx]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a CSV produced by [`write_csv`](Self::write_csv). The seed is
    /// not part of the CSV schema and must be supplied.
    pub fn read_csv<R: Read>(input: &mut R, cfg: FieldConfig, seed: u64) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut values = vec![0.0f64; cfg.num_sites()];
        let mut seen = vec![false; cfg.num_sites()];
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cfg.dimension() + 1 {
                return Err(Error::Format {
                    what: "field csv",
                    detail: format!("line {} has {} fields", lineno + 1, fields.len()),
                });
            }
            let coords: std::result::Result<Vec<i64>, _> = fields[..cfg.dimension()]
                .iter()
                .map(|f| f.parse())
                .collect();
            let coords = coords.map_err(|e| Error::Format {
                what: "field csv",
                detail: format!("line {}: {e}", lineno + 1),
            })?;
            let site = TorusPoint::new(coords, &cfg)?;
            let value: f64 = fields[cfg.dimension()].parse().map_err(|e| Error::Format {
                what: "field csv",
                detail: format!("line {}: {e}", lineno + 1),
            })?;
            let idx = cfg.site_index(&site);
            values[idx] = value;
            seen[idx] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Format {
                what: "field csv",
                detail: "missing sites".into(),
            });
        }
        TorusField::from_values(cfg, values, seed)
    }
}

const FIELD_MAGIC: &[u8; 8] = b"ZAGFFLD1";

/// How one frequency slot consumes Gaussian draws.
#[derive(Debug, Clone, Copy)]
enum ModeDraw {
    /// Representative/conjugate pair; each component is N(0, sigma^2).
    Pair { rep: u32, conj: u32, sigma: f64 },
    /// Self-conjugate mode; one real N(0, sigma^2) amplitude.
    Real { idx: u32, sigma: f64 },
}

/// Precomputed spectral data for repeated sampling at one configuration.
pub struct SpectralSampler {
    cfg: FieldConfig,
    fft: NdFft,
    modes: Vec<ModeDraw>,
    site_variance: f64,
}

impl SpectralSampler {
    pub fn new(cfg: &FieldConfig) -> Result<Self> {
        let size = cfg.num_sites();
        if size > crate::tolerances::FIELD_SIZE_CAP {
            return Err(Error::ResourceExhausted {
                size,
                cap: crate::tolerances::FIELD_SIZE_CAP,
            });
        }
        let eigenvalues = laplacian_eigenvalues(cfg);
        let n = cfg.side() as i64;
        let n_f = size as f64;
        let mut modes = Vec::new();
        let mut inv_sum = 0.0;
        for (idx, &lambda) in eigenvalues.iter().enumerate().skip(1) {
            let k = cfg.site_at(idx);
            let conj_coords: Vec<i64> = k.coords().iter().map(|&c| (-c).rem_euclid(n)).collect();
            let conj = cfg.site_index(&TorusPoint::new(conj_coords, cfg)?);
            inv_sum += 1.0 / lambda;
            if conj == idx {
                modes.push(ModeDraw::Real {
                    idx: idx as u32,
                    sigma: (n_f / lambda).sqrt(),
                });
            } else if idx < conj {
                modes.push(ModeDraw::Pair {
                    rep: idx as u32,
                    conj: conj as u32,
                    sigma: (n_f / (2.0 * lambda)).sqrt(),
                });
            }
        }
        Ok(SpectralSampler {
            cfg: *cfg,
            fft: NdFft::inverse(cfg),
            modes,
            site_variance: inv_sum / n_f,
        })
    }

    pub fn cfg(&self) -> &FieldConfig {
        &self.cfg
    }

    /// `Var(Psi(x)) = G(0,0) = N^{-1} sum_{k != 0} 1 / lambda_k`, exact.
    pub fn site_variance(&self) -> f64 {
        self.site_variance
    }

    /// One realization; a pure function of `(cfg, seed)`.
    pub fn sample(&self, seed: u64) -> TorusField {
        let size = self.cfg.num_sites();
        let mut rng = rng_from_seed(seed);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
        for mode in &self.modes {
            match *mode {
                ModeDraw::Pair { rep, conj, sigma } => {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    spectrum[rep as usize] = Complex64::new(sigma * re, sigma * im);
                    spectrum[conj as usize] = Complex64::new(sigma * re, -sigma * im);
                }
                ModeDraw::Real { idx, sigma } => {
                    let z: f64 = rng.sample(StandardNormal);
                    spectrum[idx as usize] = Complex64::new(sigma * z, 0.0);
                }
            }
        }
        self.fft.process(&mut spectrum);
        let scale = 1.0 / size as f64;
        let values = spectrum.into_iter().map(|z| z.re * scale).collect();
        TorusField {
            cfg: self.cfg,
            values,
            seed,
        }
    }
}

/// One-shot convenience; plans the transform each call. Use
/// [`SpectralSampler`] or the batch helpers for repeated sampling.
pub fn sample_field(cfg: &FieldConfig, seed: u64) -> Result<TorusField> {
    Ok(SpectralSampler::new(cfg)?.sample(seed))
}

/// Fields for replicates `0..count` under the policy, generated in parallel.
/// The result is indexed by replicate, so it is identical for any worker
/// count or scheduling order.
pub fn sample_batch(cfg: &FieldConfig, policy: &SeedPolicy, count: u64) -> Result<Vec<TorusField>> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "need at least one replicate".into(),
        });
    }
    let sampler = SpectralSampler::new(cfg)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| sampler.sample(policy.stream_seed(i)))
        .collect())
}

/// Streams replicate fields through `f` without retaining them; the output
/// vector is indexed by replicate. This is the workhorse of the experiment
/// battery.
pub fn par_map_fields<T, F>(
    cfg: &FieldConfig,
    policy: &SeedPolicy,
    count: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &TorusField) -> T + Sync,
{
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "need at least one replicate".into(),
        });
    }
    let sampler = SpectralSampler::new(cfg)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let field = sampler.sample(policy.stream_seed(i));
            f(i, &field)
        })
        .collect())
}

/// Cap for the dense distribution-oracle sampler.
const DENSE_ORACLE_CAP: usize = 512;

/// Symmetric PSD factor `F` of the exact covariance table with
/// `F F^T = G` on the mean-zero subspace (eigenmodes below `1e-12 * max`
/// are zeroed, which removes the constant direction exactly).
pub fn dense_covariance_factor(table: &GreenTable) -> Result<DMatrix<f64>> {
    let cfg = table.cfg();
    let size = cfg.num_sites();
    if size > DENSE_ORACLE_CAP {
        return Err(Error::RegionTooLarge {
            size,
            cap: DENSE_ORACLE_CAP,
        });
    }
    let mut g = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        let xi = cfg.site_at(i);
        for j in 0..size {
            g[(i, j)] = table.value(&xi, &cfg.site_at(j));
        }
    }
    let eigen = SymmetricEigen::new(g);
    let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * max_eig;
    let mut factor = eigen.eigenvectors;
    for (col, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let scale = if lambda > cutoff { lambda.sqrt() } else { 0.0 };
        factor.column_mut(col).scale_mut(scale);
    }
    Ok(factor)
}

/// Distribution-equality oracle: samples by multiplying i.i.d. standard
/// Gaussians through the dense covariance factor. Only for validating the
/// spectral sampler's law at small `N`; never used in experiments.
pub fn dense_sample_oracle(cfg: &FieldConfig, seed: u64) -> Result<TorusField> {
    let table = crate::greens::zero_average_green(cfg)?;
    let factor = dense_covariance_factor(&table)?;
    let size = cfg.num_sites();
    let mut rng = rng_from_seed(seed);
    let z = DMatrix::<f64>::from_fn(size, 1, |_, _| rng.sample(StandardNormal));
    let values = (&factor * z).column(0).iter().cloned().collect();
    TorusField::from_values(*cfg, values, seed)
}
