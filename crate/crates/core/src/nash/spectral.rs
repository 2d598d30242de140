//! Accurate multiplicative weights self-play as a map on
//! `(f_t, y_t, f_{t-1}, y_{t-1})`, and the spectral radius of its Jacobian at
//! an equilibrium.

use crate::error::{Error, Result};
use crate::game::MatrixGame;
use crate::nash::NashSolution;
use crate::strategy::{check_len, Strategy};

/// Finite-difference step per coordinate.
pub const FD_STEP: f64 = 1e-6;

/// Number of matrix squarings in the Gelfand estimate.
pub const GELFAND_SQUARINGS: usize = 20;

/// A state of the self-play dynamics: current strategies `f, y` and the
/// previous ones `z, w`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynPoint {
    pub f: Strategy,
    pub y: Strategy,
    pub z: Strategy,
    pub w: Strategy,
}

impl DynPoint {
    /// The point `(f, y, f, y)`.
    pub fn stationary(f: &Strategy, y: &Strategy) -> Self {
        DynPoint { f: f.clone(), y: y.clone(), z: f.clone(), w: y.clone() }
    }

    fn flatten(&self) -> Vec<f64> {
        [self.f.as_slice(), self.y.as_slice(), self.z.as_slice(), self.w.as_slice()].concat()
    }

    /// `l_1` distance between two points, summed over the four blocks.
    pub fn l1_distance(&self, other: &DynPoint) -> f64 {
        self.flatten().iter().zip(other.flatten()).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// One step of the dynamics:
///
/// ```text
/// f'_i ∝ f_i exp( eta((alpha+1)(A y)_i   - alpha (A w)_i))
/// y'_j ∝ y_j exp(-eta((alpha+1)(A^T f)_j - alpha (A^T z)_j))
/// z' = f,  w' = y
/// ```
pub fn amwu_update_map(game: &MatrixGame, point: &DynPoint, eta: f64, alpha: f64) -> Result<DynPoint> {
    check_len(game.rows(), point.f.len())?;
    check_len(game.cols(), point.y.len())?;
    check_len(game.rows(), point.z.len())?;
    check_len(game.cols(), point.w.len())?;
    let out = raw_map(game, &point.flatten(), eta, alpha);
    let (n, m) = (game.rows(), game.cols());
    Ok(DynPoint {
        f: Strategy::from_unnormalized(out[..n].to_vec())?,
        y: Strategy::from_unnormalized(out[n..n + m].to_vec())?,
        z: point.f.clone(),
        w: point.y.clone(),
    })
}

/// The map on the flat vector `(f, y, z, w)`, defined off the simplex too so
/// it can be differentiated coordinate by coordinate.
fn raw_map(game: &MatrixGame, p: &[f64], eta: f64, alpha: f64) -> Vec<f64> {
    let (n, m) = (game.rows(), game.cols());
    let (f, rest) = p.split_at(n);
    let (y, rest) = rest.split_at(m);
    let (z, w) = rest.split_at(n);

    let ay = game.apply(y);
    let aw = game.apply(w);
    let atf = game.apply_transpose(f);
    let atz = game.apply_transpose(z);

    let g1 = normalized_exp(f, ay.iter().zip(&aw).map(|(a, b)| eta * ((alpha + 1.0) * a - alpha * b)));
    let g2 = normalized_exp(y, atf.iter().zip(&atz).map(|(a, b)| -eta * ((alpha + 1.0) * a - alpha * b)));
    [g1.as_slice(), g2.as_slice(), f, y].concat()
}

fn normalized_exp(base: &[f64], exponent: impl Iterator<Item = f64>) -> Vec<f64> {
    let exps: Vec<f64> = exponent.collect();
    let max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = base.iter().zip(&exps).map(|(b, e)| b * (e - max).exp()).collect();
    let sum: f64 = w.iter().sum();
    w.into_iter().map(|v| v / sum).collect()
}

/// Central-difference Jacobian of the map at `point`, row-major, of size
/// `2(n+m)` squared.
pub fn jacobian_at(game: &MatrixGame, point: &DynPoint, eta: f64, alpha: f64) -> Result<Vec<f64>> {
    let base = point.flatten();
    let d = base.len();
    let mut jac = vec![0.0; d * d];
    let mut probe = base.clone();
    for k in 0..d {
        probe[k] = base[k] + FD_STEP;
        let plus = raw_map(game, &probe, eta, alpha);
        probe[k] = base[k] - FD_STEP;
        let minus = raw_map(game, &probe, eta, alpha);
        probe[k] = base[k];
        for i in 0..d {
            jac[i * d + k] = (plus[i] - minus[i]) / (2.0 * FD_STEP);
        }
    }
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Jacobian"));
    }
    Ok(jac)
}

/// Spectral radius by the Gelfand formula `rho = lim |J^k|^{1/k}`, using
/// [`GELFAND_SQUARINGS`] rescaled squarings. Returns 0 for a nilpotent matrix.
pub fn gelfand_spectral_radius(matrix: &[f64], d: usize) -> Result<f64> {
    check_len(d * d, matrix.len())?;
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let mut m = matrix.to_vec();
    let mut log_rho = 0.0;
    let mut weight = 1.0;
    for _ in 0..GELFAND_SQUARINGS {
        let s = frobenius(&m);
        if s == 0.0 {
            return Ok(0.0);
        }
        log_rho += weight * s.ln();
        m.iter_mut().for_each(|v| *v /= s);
        m = matmul(&m, &m, d);
        weight *= 0.5;
    }
    let s = frobenius(&m);
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok((log_rho + weight * s.ln()).exp())
}

/// Spectral radius of the dynamics' Jacobian at `(f*, y*, f*, y*)`.
pub fn spectral_radius_at_ne(game: &MatrixGame, ne: &NashSolution, eta: f64, alpha: f64) -> Result<f64> {
    if !eta.is_finite() || !alpha.is_finite() || eta < 0.0 || alpha < 0.0 {
        return Err(Error::InvalidParameter { name: "eta/alpha", reason: "must be finite and nonnegative".into() });
    }
    let point = DynPoint::stationary(&ne.f_star, &ne.y_star);
    let jac = jacobian_at(game, &point, eta, alpha)?;
    gelfand_spectral_radius(&jac, 2 * (game.rows() + game.cols()))
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nash::solve_zero_sum;

    fn pennies() -> MatrixGame {
        MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let u = Strategy::uniform(2);
        let p = DynPoint::stationary(&u, &u);
        let next = amwu_update_map(&pennies(), &p, 0.1, 10.0).unwrap();
        assert!(next.l1_distance(&p) < 1e-15);
    }

    #[test]
    fn zero_rate_copies_current_into_previous() {
        let f = Strategy::new(vec![0.3, 0.7]).unwrap();
        let y = Strategy::new(vec![0.6, 0.4]).unwrap();
        let p = DynPoint { f: f.clone(), y: y.clone(), z: Strategy::uniform(2), w: Strategy::uniform(2) };
        let next = amwu_update_map(&pennies(), &p, 0.0, 10.0).unwrap();
        assert!(next.l1_distance(&DynPoint::stationary(&f, &y)) < 1e-15);
    }

    #[test]
    fn gelfand_on_known_matrices() {
        let diag = [0.5, 0.0, 0.0, -0.8];
        assert!((gelfand_spectral_radius(&diag, 2).unwrap() - 0.8).abs() < 1e-6);
        // Rotation scaled by 0.9: complex pair of modulus 0.9.
        let (c, s) = (0.9 * 0.3f64.cos(), 0.9 * 0.3f64.sin());
        assert!((gelfand_spectral_radius(&[c, -s, s, c], 2).unwrap() - 0.9).abs() < 1e-6);
        assert_eq!(gelfand_spectral_radius(&[0.0, 1.0, 0.0, 0.0], 2).unwrap(), 0.0);
    }

    #[test]
    fn zero_rate_radius_is_one() {
        let g = pennies();
        let ne = solve_zero_sum(&g).unwrap();
        let rho = spectral_radius_at_ne(&g, &ne, 0.0, 10.0).unwrap();
        assert!((rho - 1.0).abs() < 1e-3, "rho = {rho}");
    }
}
