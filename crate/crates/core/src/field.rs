//! Scalar fields on a [`Grid`] with dual real-space / spectral representations.
//!
//! A field is an immutable value: every operation returns a new field.
//! Spectral coefficients are stored with respect to the basis
//! `exp(i xi_k . x)` on the centered box, so the coefficient of a constant
//! field sits at mode zero and real fields have conjugate-symmetric
//! coefficients.

use std::sync::Arc;

use num_complex::Complex64;

use crate::fft;
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Real(Vec<f64>),
    Spectral(Vec<Complex64>),
}

#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    repr: Repr,
}

impl Field {
    /// Zero field in real representation.
    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field {
            grid: grid.clone(),
            repr: Repr::Real(vec![0.0; grid.len()]),
        }
    }

    pub fn from_real(grid: &Arc<Grid>, values: Vec<f64>) -> Field {
        assert_eq!(values.len(), grid.len(), "value buffer does not match grid");
        Field {
            grid: grid.clone(),
            repr: Repr::Real(values),
        }
    }

    /// Build from spectral coefficients. The caller is responsible for
    /// conjugate symmetry when the field is meant to be real.
    pub fn from_spectral(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Field {
        assert_eq!(coeffs.len(), grid.len(), "coefficient buffer does not match grid");
        Field {
            grid: grid.clone(),
            repr: Repr::Spectral(coeffs),
        }
    }

    /// Sample a function of the physical coordinates.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Field {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                f(&p[..dim])
            })
            .collect();
        Field::from_real(grid, values)
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Field {
        Field::from_real(grid, vec![c; grid.len()])
    }

    /// Real field `a * cos(xi_k . x)` for the mode with signed indices `k`.
    pub fn cosine_mode(grid: &Arc<Grid>, signed: &[i64], amplitude: f64) -> Field {
        let mut coeffs = vec![Complex64::default(); grid.len()];
        let plus = grid.mode_linear(signed);
        let minus: Vec<i64> = signed.iter().map(|k| -k).collect();
        let minus = grid.mode_linear(&minus);
        coeffs[plus] += Complex64::new(0.5 * amplitude, 0.0);
        coeffs[minus] += Complex64::new(0.5 * amplitude, 0.0);
        Field::from_spectral(grid, coeffs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.repr, Repr::Spectral(_))
    }

    /// Forward transform; identity if already spectral.
    pub fn to_spectral(&self) -> Field {
        match &self.repr {
            Repr::Spectral(_) => self.clone(),
            Repr::Real(values) => Field {
                grid: self.grid.clone(),
                repr: Repr::Spectral(fft::spectral_from_real(&self.grid, values)),
            },
        }
    }

    /// Inverse transform; identity if already real.
    pub fn to_real(&self) -> Field {
        match &self.repr {
            Repr::Real(_) => self.clone(),
            Repr::Spectral(coeffs) => Field {
                grid: self.grid.clone(),
                repr: Repr::Real(fft::real_from_spectral(&self.grid, coeffs)),
            },
        }
    }

    /// Real-space samples; panics if the field is in spectral representation.
    pub fn real_values(&self) -> &[f64] {
        match &self.repr {
            Repr::Real(v) => v,
            Repr::Spectral(_) => panic!("field is in spectral representation"),
        }
    }

    /// Spectral coefficients; panics if the field is in real representation.
    pub fn spectral_values(&self) -> &[Complex64] {
        match &self.repr {
            Repr::Spectral(c) => c,
            Repr::Real(_) => panic!("field is in real representation"),
        }
    }

    /// Apply a per-mode multiplier keyed by the linear spectral index.
    pub fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Field {
        let spec = self.to_spectral();
        let coeffs = spec
            .spectral_values()
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        Field::from_spectral(&self.grid, coeffs)
    }

    /// Apply a pointwise map in real space.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Field {
        let real = self.to_real();
        let values = real.real_values().iter().map(|&v| f(v)).collect();
        Field::from_real(&self.grid, values)
    }

    pub fn scaled(&self, a: f64) -> Field {
        match &self.repr {
            Repr::Real(v) => Field::from_real(&self.grid, v.iter().map(|x| a * x).collect()),
            Repr::Spectral(c) => {
                Field::from_spectral(&self.grid, c.iter().map(|x| a * x).collect())
            }
        }
    }

    /// `self + a * other`, converting `other` to the representation of `self`.
    pub fn axpy(&self, a: f64, other: &Field) -> Field {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || self.grid.len() == other.grid.len(),
            "fields live on different grids"
        );
        match &self.repr {
            Repr::Real(v) => {
                let o = other.to_real();
                let ov = o.real_values();
                Field::from_real(
                    &self.grid,
                    v.iter().zip(ov).map(|(x, y)| x + a * y).collect(),
                )
            }
            Repr::Spectral(c) => {
                let o = other.to_spectral();
                let oc = o.spectral_values();
                Field::from_spectral(
                    &self.grid,
                    c.iter().zip(oc).map(|(x, y)| x + a * y).collect(),
                )
            }
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.axpy(-1.0, other)
    }

    /// Pointwise product in real space.
    pub fn mul_pointwise(&self, other: &Field) -> Field {
        let a = self.to_real();
        let b = other.to_real();
        Field::from_real(
            &self.grid,
            a.real_values()
                .iter()
                .zip(b.real_values())
                .map(|(x, y)| x * y)
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        match &self.repr {
            Repr::Real(v) => v.iter().all(|x| x.is_finite()),
            Repr::Spectral(c) => c.iter().all(|x| x.re.is_finite() && x.im.is_finite()),
        }
    }

    /// Largest relative deviation from conjugate symmetry of the spectral
    /// coefficients; zero for exactly real fields.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let spec = self.to_spectral();
        let c = spec.spectral_values();
        let scale = c
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let grid = &self.grid;
        let m = grid.modes_per_dim() as i64;
        let mut worst = 0.0_f64;
        for (i, &z) in c.iter().enumerate() {
            let idx = grid.axis_indices(i);
            let mut neg = Vec::with_capacity(grid.dim());
            for a in 0..grid.dim() {
                let k = grid.signed_mode(idx[a]);
                // -M/2 has no mirror partner; it is its own conjugate slot.
                let nk = if k == -m / 2 { k } else { -k };
                neg.push(nk);
            }
            let j = grid.mode_linear(&neg);
            let defect = (z - c[j].conj()).norm();
            worst = worst.max(defect / scale);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn constant_field_is_pure_zero_mode() {
        let g = Grid::new(1, 100.0, 16).unwrap();
        let f = Field::constant(&g, 3.25).to_spectral();
        let c = f.spectral_values();
        assert!((c[0] - Complex64::new(3.25, 0.0)).norm() < 1e-13);
        for &z in &c[1..] {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn single_cosine_has_half_amplitude_at_plus_minus_one() {
        let g = Grid::new(1, 100.0, 32).unwrap();
        let l = 100.0;
        let f = Field::from_fn(&g, |x| (2.0 * std::f64::consts::PI * x[0] / l).cos());
        let c = f.to_spectral();
        let c = c.spectral_values();
        let plus = g.mode_linear(&[1]);
        let minus = g.mode_linear(&[-1]);
        assert!((c[plus] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((c[minus] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        let rest: f64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != plus && *i != minus)
            .map(|(_, z)| z.norm())
            .sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid::new(2, 50.0, 16).unwrap();
        let f = Field::from_fn(&g, |x| {
            (0.3 * x[0]).sin() * (0.22 * x[1]).cos() + 0.1 * (0.5 * x[0] * 0.04 * x[1]).cos()
        });
        let back = f.to_spectral().to_real();
        let max: f64 = f
            .real_values()
            .iter()
            .zip(back.real_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale: f64 = f.real_values().iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(max / scale < 1e-12, "round-trip defect {max}");
    }

    #[test]
    fn real_fields_have_conjugate_symmetric_spectra() {
        let g = Grid::new(2, 30.0, 16).unwrap();
        let f = Field::from_fn(&g, |x| (0.7 * x[0] - 0.2 * x[1]).sin() + 0.3);
        assert!(f.conjugate_symmetry_defect() < 1e-12);
    }

    #[test]
    fn cosine_mode_matches_sampled_cosine() {
        let g = Grid::new(2, 40.0, 16).unwrap();
        let w = 2.0 * std::f64::consts::PI / 40.0;
        let direct = Field::from_fn(&g, |x| 1.7 * (w * (2.0 * x[0] - x[1])).cos());
        let built = Field::cosine_mode(&g, &[2, -1], 1.7).to_real();
        let max: f64 = direct
            .real_values()
            .iter()
            .zip(built.real_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max < 1e-12);
    }
}
