//! Smooth radial low-pass operator at dyadic scale `2^l`.
//!
//! The spectral profile equals one on `|xi| <= 2^l`, vanishes for
//! `|xi| >= 2^(l+1)`, and decreases smoothly in between, so the operator
//! contracts every `H^m` norm mode-by-mode and is exactly self-adjoint
//! for the discrete `L^2` inner product.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::{h_norm, lp_norm};

/// Radial profile value at `r = |xi| / 2^l`.
///
/// The transition on `(1, 2)` is the smooth step
/// `exp(1 - 1/(1 - (r-1)^2))`, which is monotone nonincreasing with value
/// one at `r = 1` and flat contact at `r = 2`.
pub fn profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let t = r - 1.0;
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Cutoff scale `2^l` for integer (possibly negative) `l`.
pub fn scale(level: i32) -> f64 {
    2.0_f64.powi(level)
}

fn check_nyquist(f: &Field, level: i32) -> Result<()> {
    let cutoff = 2.0 * scale(level);
    let nyquist = f.grid().nyquist();
    if cutoff > nyquist {
        return Err(Error::CutoffExceedsNyquist {
            level,
            cutoff,
            nyquist,
        });
    }
    Ok(())
}

/// Apply the low-pass operator at scale `2^l`.
pub fn apply(f: &Field, level: i32) -> Result<Field> {
    check_nyquist(f, level)?;
    Ok(apply_unchecked(f, level))
}

/// Multiplier application without the Nyquist guard; used internally where
/// the level has already been validated against the grid.
pub fn apply_unchecked(f: &Field, level: i32) -> Field {
    let grid = f.grid().clone();
    let s = scale(level);
    f.map_modes(|i, c| c * profile(grid.xi_sq(i).sqrt() / s))
}

/// Multiplier values per linear mode index, for callers that fold the
/// low-pass into their own spectral loops.
pub fn multiplier(grid: &crate::grid::Grid, level: i32) -> Vec<f64> {
    let s = scale(level);
    (0..grid.len())
        .map(|i| profile(grid.xi_sq(i).sqrt() / s))
        .collect()
}

/// Normalized self-adjointness defect `|(S_l f, g) - (f, S_l g)| / (||f|| ||g||)`.
pub fn self_adjoint_defect(f: &Field, g: &Field, level: i32) -> Result<f64> {
    check_nyquist(f, level)?;
    let sf = apply_unchecked(f, level);
    let sg = apply_unchecked(g, level);
    let lhs = crate::spectral::inner_l2(&sf, g);
    let rhs = crate::spectral::inner_l2(f, &sg);
    let nf = h_norm(f, 0.0);
    let ng = h_norm(g, 0.0);
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs() / (nf * ng))
}

/// Residual curve `||S_l f - f||_{H^m}` over a range of levels.
pub fn convergence_curve(f: &Field, m: f64, levels: impl Iterator<Item = i32>) -> Vec<f64> {
    levels
        .map(|l| {
            let s = apply_unchecked(f, l);
            h_norm(&s.sub(&f.to_spectral()), m)
        })
        .collect()
}

/// Discrete `L^1` norm of the real-space kernel of the operator, the
/// constant in the `L^q` boundedness estimate.
pub fn kernel_l1_norm(grid: &std::sync::Arc<crate::grid::Grid>, level: i32) -> f64 {
    let s = scale(level);
    let vol = grid.box_length().powi(grid.dim() as i32);
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|i| Complex64::new(profile(grid.xi_sq(i).sqrt() / s) / vol, 0.0))
        .collect();
    let kernel = Field::from_spectral(grid, coeffs);
    lp_norm(&kernel, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::sampling;
    use crate::spectral::{h_norm, inner_l2, lp_norm};

    #[test]
    fn profile_plateaus() {
        assert_eq!(profile(0.0), 1.0);
        assert_eq!(profile(1.0), 1.0);
        assert_eq!(profile(2.0), 0.0);
        assert_eq!(profile(5.0), 0.0);
        let mut prev = 1.0;
        for i in 0..100 {
            let r = 1.0 + (i as f64 + 0.5) / 100.0;
            let v = profile(r);
            assert!(v <= prev + 1e-15, "profile not monotone at r={r}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn identity_below_scale() {
        let g = Grid::new(1, 100.0, 256).unwrap();
        // Band |xi| <= 2^1 = 2: modes with |k| <= 2*L/(2 pi) ~ 31.
        let f = sampling::band_limited(&g, 3, 31, 1.0);
        let s = apply(&f, 1).unwrap();
        let d = h_norm(&s.sub(&f.to_spectral()), 0.0);
        assert!(d < 1e-13, "low-pass not identity on band: {d}");
    }

    #[test]
    fn kills_modes_beyond_double_scale() {
        let g = Grid::new(1, 2.0 * std::f64::consts::PI, 64).unwrap();
        // |xi_k| = k with this box; 2^(l+1) = 8 at l = 2.
        let f = crate::field::Field::cosine_mode(&g, &[9], 1.0);
        let s = apply(&f, 2).unwrap();
        assert!(h_norm(&s, 0.0) < 1e-14);
    }

    #[test]
    fn rejects_cutoff_beyond_nyquist() {
        let g = Grid::new(1, 100.0, 64).unwrap();
        let f = sampling::band_limited(&g, 3, 8, 1.0);
        // Nyquist = pi*64/100 ~ 2.01; level 1 needs 4.
        assert!(matches!(
            apply(&f, 1),
            Err(Error::CutoffExceedsNyquist { .. })
        ));
    }

    #[test]
    fn contracts_sobolev_norms() {
        let g = Grid::new(1, 50.0, 256).unwrap();
        let f = sampling::band_limited(&g, 17, 100, 1.0);
        for &m in &[-1.0, 0.0, 1.0] {
            let s = apply(&f, 2).unwrap();
            assert!(h_norm(&s, m) <= h_norm(&f, m) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn self_adjoint_to_machine_precision() {
        let g = Grid::new(1, 50.0, 256).unwrap();
        let f = sampling::band_limited(&g, 5, 90, 1.3);
        let h = sampling::band_limited(&g, 6, 90, 0.7);
        assert!(self_adjoint_defect(&f, &h, 2).unwrap() <= 1e-12);
    }

    #[test]
    fn self_adjoint_symmetric_case() {
        let g = Grid::new(1, 50.0, 256).unwrap();
        let f = sampling::band_limited(&g, 5, 90, 1.0);
        assert_eq!(self_adjoint_defect(&f, &f, 2).unwrap(), 0.0);
    }

    #[test]
    fn low_band_pair_is_untouched() {
        let g = Grid::new(1, 2.0 * std::f64::consts::PI, 128).unwrap();
        let f = crate::field::Field::cosine_mode(&g, &[2], 1.0);
        let h = crate::field::Field::cosine_mode(&g, &[3], 1.0);
        let l = 2; // 2^l = 4 covers both modes
        let sf = apply(&f, l).unwrap();
        let sh = apply(&h, l).unwrap();
        let direct = inner_l2(&f, &h);
        assert!((inner_l2(&sf, &h) - direct).abs() < 1e-13);
        assert!((inner_l2(&f, &sh) - direct).abs() < 1e-13);
    }

    #[test]
    fn convergence_curve_hits_zero_at_band_limit() {
        let g = Grid::new(1, 2.0 * std::f64::consts::PI, 128).unwrap();
        // Band limit 2^3 = 8.
        let f = sampling::band_limited(&g, 21, 8, 1.0);
        let curve = convergence_curve(&f, 0.0, 0..=5);
        for w in curve.windows(2) {
            assert!(w[1] <= w[0] + 1e-14);
        }
        assert!(curve[3] < 1e-13 && curve[4] < 1e-13 && curve[5] < 1e-13);
        assert!(curve[0] > 1e-6);
    }

    #[test]
    fn convergence_strictly_decreasing_on_algebraic_tail() {
        let g = Grid::new(1, 2.0 * std::f64::consts::PI, 256).unwrap();
        // |c_k| = k^-2 up to Nyquist: residual after S_l is the tail norm.
        let mut coeffs = vec![num_complex::Complex64::default(); g.len()];
        for k in 1..(g.modes_per_dim() / 2) as i64 {
            let w = num_complex::Complex64::new((k as f64).powi(-2), 0.0);
            coeffs[g.mode_linear(&[k])] = w;
            coeffs[g.mode_linear(&[-k])] = w;
        }
        let f = crate::field::Field::from_spectral(&g, coeffs);
        let curve = convergence_curve(&f, 0.0, 0..=5);
        for w in curve.windows(2) {
            assert!(w[1] < w[0], "curve not strictly decreasing: {curve:?}");
        }
        // Independent check of the residual at l = 3: tail modes enter with
        // weight (1 - profile); accumulate directly.
        let l = 3;
        let mut acc = 0.0;
        for k in 1..(g.modes_per_dim() / 2) as i64 {
            let w = 1.0 - profile(k as f64 / scale(l));
            let c = (k as f64).powi(-2);
            acc += 2.0 * (w * c) * (w * c);
        }
        let expected = (g.box_length() * acc).sqrt();
        assert!((curve[3] - expected).abs() < 1e-12 * expected.max(1.0));
    }

    #[test]
    fn weaker_norm_curve_lies_below() {
        let g = Grid::new(1, 50.0, 256).unwrap();
        let f = sampling::band_limited(&g, 33, 100, 1.0);
        let c0 = convergence_curve(&f, 0.0, 0..=4);
        let cm1 = convergence_curve(&f, -1.0, 0..=4);
        for (a, b) in cm1.iter().zip(&c0) {
            assert!(a <= b);
        }
    }

    #[test]
    fn idempotent_on_low_frequencies() {
        let g = Grid::new(1, 2.0 * std::f64::consts::PI, 128).unwrap();
        let f = sampling::band_limited(&g, 8, 4, 1.0); // band 2^2
        let s_inner = apply(&f, 3).unwrap();
        let lhs = apply(&s_inner, 2).unwrap();
        let rhs = apply(&f, 2).unwrap();
        let d = h_norm(&lhs.sub(&rhs), 0.0);
        assert!(d < 1e-13);
    }

    #[test]
    fn lq_bound_with_measured_kernel_norm() {
        let g = Grid::new(1, 50.0, 256).unwrap();
        let phi0 = kernel_l1_norm(&g, 2);
        assert!(phi0 >= 1.0 - 1e-12 && phi0 < 3.0, "phi0 = {phi0}");
        for seed in 0..50 {
            let f = sampling::band_limited(&g, 100 + seed, 120, 1.0);
            for &q in &[2.0, 4.0, 6.0] {
                let s = apply(&f, 2).unwrap();
                let lhs = lp_norm(&s, q);
                let rhs = (phi0 + 1e-9) * lp_norm(&f, q);
                assert!(lhs <= rhs, "q={q} seed={seed}: {lhs} > {rhs}");
            }
        }
    }
}
