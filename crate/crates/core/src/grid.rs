//! Periodic box discretization with precomputed wavevectors.
//!
//! The box is `[-L/2, L/2)^N` with `M` uniformly spaced points per
//! dimension. Fourier modes carry wavevectors `xi_k = 2*pi*k/L` with
//! signed indices `k in {-M/2, ..., M/2-1}` stored in FFT order
//! (`0, 1, ..., M/2-1, -M/2, ..., -1`).

use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug)]
pub struct Grid {
    dim: usize,
    box_length: f64,
    modes_per_dim: usize,
    /// Per-axis wavenumbers in FFT order, length `modes_per_dim`.
    wavenumbers: Vec<f64>,
    /// `|xi|^2` per linear index, length `modes_per_dim^dim`.
    xi_sq: Vec<f64>,
    strides: [usize; MAX_DIM],
    len: usize,
}

impl Grid {
    pub fn new(dim: usize, box_length: f64, modes_per_dim: usize) -> Result<Arc<Grid>> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "grid dimension must be in 1..=3, got {dim}"
            )));
        }
        if !(box_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        if modes_per_dim < 8 || modes_per_dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "modes per dimension must be even and >= 8, got {modes_per_dim}"
            )));
        }

        let m = modes_per_dim;
        let mut wavenumbers = vec![0.0; m];
        for (j, w) in wavenumbers.iter_mut().enumerate() {
            let signed = if j < m / 2 {
                j as i64
            } else {
                j as i64 - m as i64
            };
            *w = 2.0 * std::f64::consts::PI * signed as f64 / box_length;
        }

        let len = m.pow(dim as u32);
        let mut strides = [0usize; MAX_DIM];
        for (a, s) in strides.iter_mut().enumerate().take(dim) {
            *s = m.pow((dim - 1 - a) as u32);
        }

        let mut xi_sq = vec![0.0; len];
        for (idx, v) in xi_sq.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..dim {
                let j = (idx / strides[a]) % m;
                acc += wavenumbers[j] * wavenumbers[j];
            }
            *v = acc;
        }

        Ok(Arc::new(Grid {
            dim,
            box_length,
            modes_per_dim,
            wavenumbers,
            xi_sq,
            strides,
            len,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn modes_per_dim(&self) -> usize {
        self.modes_per_dim
    }

    /// Total number of grid points / spectral modes, `M^N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `h = L/M`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.modes_per_dim as f64
    }

    /// Quadrature weight of one cell, `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Largest resolvable wavenumber magnitude along one axis, `pi*M/L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.modes_per_dim as f64 / self.box_length
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides[..self.dim]
    }

    /// Signed mode index along one axis from the FFT-ordered index.
    pub fn signed_mode(&self, axis_index: usize) -> i64 {
        let m = self.modes_per_dim;
        if axis_index < m / 2 {
            axis_index as i64
        } else {
            axis_index as i64 - m as i64
        }
    }

    /// Per-axis FFT indices of a linear index.
    pub fn axis_indices(&self, linear: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        for a in 0..self.dim {
            out[a] = (linear / self.strides[a]) % self.modes_per_dim;
        }
        out
    }

    /// Wavevector components of a linear spectral index.
    pub fn xi(&self, linear: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(linear);
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = self.wavenumbers[idx[a]];
        }
        out
    }

    /// `|xi|^2` of a linear spectral index (precomputed).
    pub fn xi_sq(&self, linear: usize) -> f64 {
        self.xi_sq[linear]
    }

    pub fn xi_sq_all(&self) -> &[f64] {
        &self.xi_sq
    }

    /// Largest `|k|` over the signed per-axis indices of a linear index.
    pub fn max_abs_mode(&self, linear: usize) -> i64 {
        let idx = self.axis_indices(linear);
        (0..self.dim)
            .map(|a| self.signed_mode(idx[a]).abs())
            .max()
            .unwrap_or(0)
    }

    /// Phase parity `(-1)^(k_1+...+k_N)` relating DFT output on the
    /// centered box to coefficients of `exp(i xi . x)`.
    pub fn parity(&self, linear: usize) -> f64 {
        let idx = self.axis_indices(linear);
        let sum: usize = idx[..self.dim].iter().sum();
        if sum % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Physical coordinates of a linear grid index.
    pub fn point(&self, linear: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(linear);
        let h = self.spacing();
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = -0.5 * self.box_length + idx[a] as f64 * h;
        }
        out
    }

    /// Distance from the box center of a linear grid index.
    pub fn radius(&self, linear: usize) -> f64 {
        let p = self.point(linear);
        p[..self.dim]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Linear spectral index of the mode with the given signed per-axis indices.
    pub fn mode_linear(&self, signed: &[i64]) -> usize {
        assert_eq!(signed.len(), self.dim);
        let m = self.modes_per_dim as i64;
        let mut linear = 0usize;
        for (a, &k) in signed.iter().enumerate() {
            debug_assert!(k >= -m / 2 && k < m / 2);
            let j = if k >= 0 { k } else { k + m } as usize;
            linear += j * self.strides[a];
        }
        linear
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(0, 1.0, 16).is_err());
        assert!(Grid::new(4, 1.0, 16).is_err());
        assert!(Grid::new(1, -1.0, 16).is_err());
        assert!(Grid::new(1, 1.0, 7).is_err());
        assert!(Grid::new(1, 1.0, 6).is_err());
    }

    #[test]
    fn zero_mode_is_exactly_zero() {
        let g = Grid::new(2, 50.0, 16).unwrap();
        let idx = g.mode_linear(&[0, 0]);
        assert_eq!(g.xi(idx)[0], 0.0);
        assert_eq!(g.xi(idx)[1], 0.0);
        assert_eq!(g.xi_sq(idx), 0.0);
    }

    #[test]
    fn total_points_and_wavevectors() {
        let g = Grid::new(3, 10.0, 8).unwrap();
        assert_eq!(g.len(), 512);
        // FFT ordering: index M/2 carries -M/2.
        assert_eq!(g.signed_mode(4), -4);
        assert_eq!(g.signed_mode(3), 3);
        let lin = g.mode_linear(&[1, -2, 3]);
        let xi = g.xi(lin);
        let w = 2.0 * std::f64::consts::PI / 10.0;
        assert!((xi[0] - w).abs() < 1e-15);
        assert!((xi[1] + 2.0 * w).abs() < 1e-15);
        assert!((xi[2] - 3.0 * w).abs() < 1e-15);
    }

    #[test]
    fn points_cover_centered_box() {
        let g = Grid::new(1, 100.0, 8);
        let g = g.unwrap();
        assert_eq!(g.point(0)[0], -50.0);
        assert!((g.point(7)[0] - 37.5).abs() < 1e-12);
    }
}
