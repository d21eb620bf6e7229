//! Separable d-dimensional FFT over the cubic torus grid, on top of rustfft.
//!
//! Arrays are row-major over `[0, n)^d`, axis 0 slowest. The transform is
//! unnormalized: the inverse direction computes `sum_k a_k e^{+2 pi i k x / n}`.

use crate::lattice::FieldConfig;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

/// A planned length-`n` transform applied along every axis of an `n^d` grid.
pub struct NdFft {
    n: usize,
    d: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub fn new(cfg: &FieldConfig, direction: FftDirection) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(cfg.side(), direction);
        NdFft {
            n: cfg.side(),
            d: cfg.dimension(),
            fft,
        }
    }

    pub fn inverse(cfg: &FieldConfig) -> Self {
        Self::new(cfg, FftDirection::Inverse)
    }

    /// Transforms `data` in place along all `d` axes. `data.len()` must be `n^d`.
    ///
    /// Thread-safe: the plan is shared read-only and the line/scratch buffers
    /// live on the caller's stack frame.
    pub fn process(&self, data: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(data.len(), n.pow(self.d as u32));
        let mut line = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        for axis in 0..self.d {
            // stride of this axis in row-major order
            let stride = n.pow((self.d - 1 - axis) as u32);
            let block = stride * n;
            let blocks = data.len() / block;
            for b in 0..blocks {
                for inner in 0..stride {
                    let base = b * block + inner;
                    for t in 0..n {
                        line[t] = data[base + t * stride];
                    }
                    self.fft.process_with_scratch(&mut line, &mut scratch);
                    for t in 0..n {
                        data[base + t * stride] = line[t];
                    }
                }
            }
        }
    }
}
