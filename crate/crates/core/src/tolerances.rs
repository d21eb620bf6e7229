//! Central tolerance and cap constants.
//!
//! Everything the test suites assert against is defined here, with the basis
//! for each number, so no threshold hides inside a test body.

/// Max entrywise deviation between the spectral torus Green table and the
/// mean-zero pseudo-inverse of `I - P`. Both sides are exact linear algebra
/// at `N <= 125`; 1e-10 allows eigensolver rounding only.
pub const PSEUDO_INVERSE_MAX_DEV: f64 = 1e-10;

/// Frozen value of `g_{Z^3}(0,0)`, the simple-random-walk Green's function
/// at the origin. Frozen after quadrature, the return-probability series,
/// and the Monte Carlo visit count agreed to [`GOLDEN_AGREEMENT_TOL`].
/// It enters the normalizing constants of every extreme-value experiment.
pub const GOLDEN_G0_D3: f64 = 1.5163861;

/// Cross-route agreement required of the three `g(0,0)` evaluations above.
pub const GOLDEN_AGREEMENT_TOL: f64 = 1e-3;

/// Quadrature must reproduce the frozen golden constant this closely.
pub const QUADRATURE_GOLDEN_TOL: f64 = 1e-6;

/// Absolute accuracy contract of `green_zd` quadrature.
pub const QUADRATURE_ABS_TOL: f64 = 1e-6;

/// Residual allowed in the Z^d spatial Markov identity. The killed solve and
/// the harmonic-measure solve are exact; only quadrature error enters, once
/// per boundary site, so 1e-5 is an order above [`QUADRATURE_ABS_TOL`].
pub const MARKOV_ZD_TOL: f64 = 1e-5;

/// Residual allowed in the torus Markov decomposition. Every term is a dense
/// exact solve or a spectral table entry.
pub const MARKOV_TORUS_TOL: f64 = 1e-8;

/// A sampled field must satisfy `|sum| <= tol * N * max|value|`.
pub const FIELD_ZERO_SUM_REL: f64 = 1e-9;

/// Torus Green table row sums must satisfy `|sum| <= tol * N`.
pub const TABLE_ZERO_SUM_TOL: f64 = 1e-10;

/// Max `|F F^T - G|` entry for the dense covariance factor used by the
/// distribution oracle sampler.
pub const FACTOR_RESIDUAL_TOL: f64 = 1e-8;

/// Kolmogorov-Smirnov acceptance band for rescaled maxima against the
/// Gumbel law at n=24, d=3, M=2000.
pub const GUMBEL_KS_MAX: f64 = 0.10;

/// Allowed distance between the mean exceedance count and its n -> infinity
/// limit `e^{-delta}`.
pub const POISSON_MEAN_LIMIT_TOL: f64 = 0.15;

/// Acceptance band for the variance/mean ratio of exceedance counts.
pub const DISPERSION_BAND: (f64, f64) = (0.85, 1.15);

/// Max absolute pairwise correlation between split-cell exceedance counts.
pub const CELL_CORRELATION_MAX: f64 = 0.05;

/// `|v_32 - v|` must come in under this.
pub const CONVERGENCE_GAP_32_MAX: f64 = 0.08;

/// Relative spread allowed in `n * |v_n - v|` over n in {8, 16, 32}.
pub const CONVERGENCE_RATE_VARIATION: f64 = 0.30;

/// Largest region the dense killed-green / harmonic-measure / exit-time
/// solver accepts. These are oracles: exactness matters, speed does not,
/// but the cubic cost must stay below pain.
pub const DENSE_REGION_CAP: usize = 10_000;

/// Largest torus (in sites) the table builder and sampler will allocate.
pub const FIELD_SIZE_CAP: usize = 1 << 26;

/// Default per-walk step budget. Hitting it is an explicit error, never a
/// silent truncation.
pub const DEFAULT_STEP_CAP: u64 = 100_000_000;

/// Default exponent for the bulk region `(n^beta, n - n^beta]^d`.
pub const DEFAULT_BULK_BETA: f64 = 0.75;

/// Default storage floor for exceedance point patterns (rescaled units).
pub const DEFAULT_PATTERN_FLOOR: f64 = -10.0;
