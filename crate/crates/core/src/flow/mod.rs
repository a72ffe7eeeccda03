//! Realization engines: superpattern filling, bifurcation of singular values and
//! liberation along tangent directions.
//!
//! All three keep iterates of the form `U·X₀·V` with orthogonal `U`, `V`, so the singular
//! values of the output are those of `X₀` up to roundoff in the factors.

pub mod solver;
mod tangent;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{expm_skew, singular_values, svd, DenseMatrix, SigmaList};
use crate::pattern::{is_superpattern, pattern_of_default, Pattern};
use crate::realize::RealizationResult;
use crate::verify::{check_ssvp, check_ssvp_wrt, CheckMode};
use solver::{ProjectedSystem, Solution};

pub use tangent::{
    liberation_direction, ssvp_via_tangent, tangent_basis, tangent_coordinates, tangent_generators, TangentSpace,
};

/// Relative distance between Σ(A) and a bifurcation target beyond which the direct solve
/// is replaced by a staged homotopy.
pub const BIFURCATION_LOCALITY: f64 = 0.1;
const HOMOTOPY_STAGES: usize = 10;
const SEED_RETRIES: usize = 6;
const LIBERATION_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Magnitude of seeded entries on new positions, relative to the smallest positive
    /// singular value.
    pub epsilon_seed: f64,
    pub max_iters: usize,
    /// Convergence threshold on `‖residual‖ / ‖X₀‖_F`.
    pub residual_tol: f64,
    /// Initial Levenberg–Marquardt parameter, relative to the largest squared singular
    /// value of the Jacobian.
    pub damping: f64,
    /// Factor applied to the liberation step length after a failed attempt.
    pub step_backtrack: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon_seed: 0.05,
            max_iters: 100,
            residual_tol: 1e-12,
            damping: 1e-3,
            step_backtrack: 0.5,
            rng_seed: 42,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon_seed > 0.0
            && self.max_iters > 0
            && self.residual_tol >= 1e-14
            && self.damping > 0.0
            && self.step_backtrack > 0.0
            && self.step_backtrack < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "solver config: all fields positive, residual_tol ≥ 1e-14, step_backtrack in (0, 1)".into(),
            ))
        }
    }
}

/// One solver iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iter: usize,
    pub residual: f64,
    pub damping: f64,
    pub step_norm: f64,
}

fn zero_positions_of(a: &DenseMatrix) -> Result<(Pattern, Vec<(usize, usize)>)> {
    let p = pattern_of_default(a)?;
    let z = p.zero_positions();
    Ok((p, z))
}

fn snap(x: &mut DenseMatrix, positions: &[(usize, usize)]) {
    for &(p, q) in positions {
        x[(p, q)] = 0.0;
    }
}

fn require_ssvp(a: &DenseMatrix) -> Result<()> {
    if check_ssvp(a, CheckMode::Numeric)?.has_ssvp() {
        Ok(())
    } else {
        Err(Error::SsvpRequired)
    }
}

fn identity_pair(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    (DenseMatrix::identity(a.rows()), DenseMatrix::identity(a.cols()))
}

/// A matrix with pattern `p` and the singular values of `a`, which must have the SSVP.
pub fn superpattern_realize(a: &DenseMatrix, p: &Pattern, cfg: &SolverConfig) -> Result<RealizationResult> {
    superpattern_realize_traced(a, p, cfg, &mut |_| {})
}

pub fn superpattern_realize_traced(
    a: &DenseMatrix,
    p: &Pattern,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&TraceEvent),
) -> Result<RealizationResult> {
    cfg.validate()?;
    if p.shape() != a.shape() {
        return Err(Error::DimensionMismatch("pattern and matrix differ in shape".into()));
    }
    let (pa, zeros) = zero_positions_of(a)?;
    if !is_superpattern(p, &pa)? {
        return Err(Error::NotASuperpattern);
    }
    let sigma = singular_values(a)?;
    if *p == pa {
        return Ok(RealizationResult::new(a.clone(), &sigma, p, "superpattern", 0, 0.0));
    }
    require_ssvp(a)?;
    let smin = sigma.min_positive().ok_or_else(|| Error::InvalidInput("zero matrix".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let signs: Vec<f64> = zeros.iter().map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let off: Vec<(usize, usize)> = zeros.iter().copied().filter(|&(i, j)| !p.get(i, j)).collect();

    let mut eps = cfg.epsilon_seed;
    let mut last_err = Error::NoConvergence { residual: f64::INFINITY };
    let mut total_iters = 0;
    for _ in 0..=SEED_RETRIES {
        let targets: Vec<f64> =
            zeros.iter().zip(&signs).map(|(&(i, j), s)| if p.get(i, j) { s * eps * smin } else { 0.0 }).collect();
        let sys = ProjectedSystem { base: a.clone(), positions: zeros.clone(), targets };
        let (u0, v0) = identity_pair(a);
        match sys.solve(u0, v0, cfg, trace) {
            Ok(Solution { mut x, iterations, residual, .. }) => {
                total_iters += iterations;
                snap(&mut x, &off);
                match pattern_of_default(&x) {
                    Ok(px) if px == *p => {
                        let mut r = RealizationResult::new(x, &sigma, p, "superpattern", total_iters, residual);
                        r.ssvp = Some(check_ssvp(&r.matrix, CheckMode::Numeric).map(|c| c.has_ssvp()).unwrap_or(false));
                        return Ok(r);
                    }
                    Ok(_) => last_err = Error::NoConvergence { residual },
                    Err(e) => last_err = e,
                }
            }
            Err(e) => last_err = e,
        }
        eps /= 2.0;
    }
    Err(last_err)
}

/// A matrix with the pattern of `a` (which must have the SSVP) and singular values
/// `target`.
pub fn bifurcate(a: &DenseMatrix, target: &SigmaList, cfg: &SolverConfig) -> Result<RealizationResult> {
    bifurcate_traced(a, target, cfg, &mut |_| {})
}

pub fn bifurcate_traced(
    a: &DenseMatrix,
    target: &SigmaList,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&TraceEvent),
) -> Result<RealizationResult> {
    cfg.validate()?;
    let k = a.rows().min(a.cols());
    if target.len() != k {
        return Err(Error::DimensionMismatch(format!("target has {} values, expected {k}", target.len())));
    }
    let (pa, zeros) = zero_positions_of(a)?;
    require_ssvp(a)?;
    let sigma = singular_values(a)?;
    let distance = target.values().iter().zip(sigma.values()).map(|(t, s)| (t - s).abs()).fold(0.0, f64::max)
        / sigma.max().max(f64::MIN_POSITIVE);

    let attempt =
        |from: &DenseMatrix, goal: &[f64], trace: &mut dyn FnMut(&TraceEvent)| -> Result<(DenseMatrix, usize, f64)> {
            let dec = svd(from)?;
            let m = dec.u.matmul(&DenseMatrix::diag(goal)).matmul(&dec.v.transpose());
            let sys = ProjectedSystem { base: m.clone(), positions: zeros.clone(), targets: vec![0.0; zeros.len()] };
            let (u0, v0) = identity_pair(&m);
            let sol = sys.solve(u0, v0, cfg, trace)?;
            let mut x = sol.x;
            snap(&mut x, &zeros);
            match pattern_of_default(&x) {
                Ok(px) if px == pa => Ok((x, sol.iterations, sol.residual)),
                Ok(_) => Err(Error::NoConvergence { residual: sol.residual }),
                Err(e) => Err(e),
            }
        };

    let direct = if distance <= BIFURCATION_LOCALITY { Some(attempt(a, target.values(), trace)) } else { None };
    let (x, iters, residual) = match direct {
        Some(Ok(found)) => found,
        _ => {
            let mut cur = a.clone();
            let mut iters = 0;
            let mut residual = 0.0;
            for stage in 1..=HOMOTOPY_STAGES {
                let s = stage as f64 / HOMOTOPY_STAGES as f64;
                let goal: Vec<f64> =
                    sigma.values().iter().zip(target.values()).map(|(a0, t)| a0 + s * (t - a0)).collect();
                match attempt(&cur, &goal, trace) {
                    Ok((x, it, r)) => {
                        cur = x;
                        iters += it;
                        residual = r;
                    }
                    Err(e) => {
                        return Err(if distance > BIFURCATION_LOCALITY { Error::TargetTooFar { distance } } else { e });
                    }
                }
            }
            (cur, iters, residual)
        }
    };
    let mut r = RealizationResult::new(x, target, &pa, "bifurcate", iters, residual);
    r.ssvp = Some(check_ssvp(&r.matrix, CheckMode::Numeric).map(|c| c.has_ssvp()).unwrap_or(false));
    Ok(r)
}

/// Liberates `a` along a tangent direction `d`: the output has the pattern of `a` in the
/// direction of `d` and the singular values of `a`.
pub fn liberate(a: &DenseMatrix, d: &DenseMatrix, cfg: &SolverConfig) -> Result<RealizationResult> {
    liberate_traced(a, d, cfg, &mut |_| {})
}

pub fn liberate_traced(
    a: &DenseMatrix,
    d: &DenseMatrix,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&TraceEvent),
) -> Result<RealizationResult> {
    if d.shape() != a.shape() {
        return Err(Error::DimensionMismatch("direction and matrix differ in shape".into()));
    }
    if d.norm_max() == 0.0 {
        let sigma = singular_values(a)?;
        let pa = pattern_of_default(a)?;
        return Ok(RealizationResult::new(a.clone(), &sigma, &pa, "liberate", 0, 0.0));
    }
    let (k, l, rel) = tangent_coordinates(a, d)?;
    if rel > 1e-10 {
        return Err(Error::InvalidInput(format!("direction is not tangent (relative residual {rel:.3e})")));
    }
    liberate_along_traced(a, &k, &l, cfg, trace)
}

/// Liberation along the tangent direction `K·A + A·L` for given skew `K`, `L`.
pub fn liberate_along(
    a: &DenseMatrix,
    k: &DenseMatrix,
    l: &DenseMatrix,
    cfg: &SolverConfig,
) -> Result<RealizationResult> {
    liberate_along_traced(a, k, l, cfg, &mut |_| {})
}

pub fn liberate_along_traced(
    a: &DenseMatrix,
    k: &DenseMatrix,
    l: &DenseMatrix,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&TraceEvent),
) -> Result<RealizationResult> {
    cfg.validate()?;
    let (m, n) = a.shape();
    if k.shape() != (m, m) || l.shape() != (n, n) {
        return Err(Error::DimensionMismatch("K must be m×m and L n×n".into()));
    }
    let tol = 1e-12 * k.norm_max().max(l.norm_max()).max(1.0);
    if !k.is_skew(tol) || !l.is_skew(tol) {
        return Err(Error::InvalidInput("K and L must be skew-symmetric".into()));
    }
    let d = k.matmul(a).add(&a.matmul(l));
    let pa = pattern_of_default(a)?;
    let sigma = singular_values(a)?;
    if d.norm_max() <= 1e-14 * a.norm_max() {
        return Ok(RealizationResult::new(a.clone(), &sigma, &pa, "liberate", 0, 0.0));
    }
    let pd = pattern_of_default(&d)?;
    let s = pa.union(&pd)?;
    if !check_ssvp_wrt(a, &s, CheckMode::Numeric)?.has_ssvp() {
        return Err(Error::SsvpWrtRequired);
    }
    let zeros = s.zero_positions();
    let mut t = 0.1 * a.norm_fro() / d.norm_fro();
    let mut best = f64::INFINITY;
    let mut iters = 0;
    for _ in 0..LIBERATION_ATTEMPTS {
        let u0 = expm_skew(&k.scale(t))?;
        let v0 = expm_skew(&l.scale(t))?;
        let sys = ProjectedSystem { base: a.clone(), positions: zeros.clone(), targets: vec![0.0; zeros.len()] };
        match sys.solve(u0, v0, cfg, trace) {
            Ok(sol) => {
                iters += sol.iterations;
                let mut x = sol.x;
                snap(&mut x, &zeros);
                if let Ok(px) = pattern_of_default(&x) {
                    if px == s {
                        let mut r = RealizationResult::new(x, &sigma, &s, "liberate", iters, sol.residual);
                        r.ssvp = Some(check_ssvp(&r.matrix, CheckMode::Numeric).map(|c| c.has_ssvp()).unwrap_or(false));
                        return Ok(r);
                    }
                }
                best = best.min(sol.residual);
            }
            Err(Error::NoConvergence { residual }) => best = best.min(residual),
            Err(e) => return Err(e),
        }
        t *= cfg.step_backtrack;
    }
    Err(Error::NoConvergence { residual: best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bordered_diag() -> DenseMatrix {
        DenseMatrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 2.0, 0.0, 0.0], [0.0, 0.0, 3.0, 0.0]])
    }

    #[test]
    fn superpattern_fills_everything() {
        let a = bordered_diag();
        let r = superpattern_realize(&a, &Pattern::ones(3, 4), &SolverConfig::default()).unwrap();
        assert!(r.pattern_ok);
        assert!(r.sigma_error < 1e-10);
        assert!(r.matrix.data().iter().all(|x| x.abs() > 1e-3));
    }

    #[test]
    fn superpattern_identity_case() {
        let a = bordered_diag();
        let p = pattern_of_default(&a).unwrap();
        let r = superpattern_realize(&a, &p, &SolverConfig::default()).unwrap();
        assert_eq!(r.matrix, a);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn superpattern_refuses_without_ssvp() {
        let a = DenseMatrix::identity(2);
        let p = Pattern::from_rows(&[[1, 1], [0, 1]]);
        assert_eq!(superpattern_realize(&a, &p, &SolverConfig::default()), Err(Error::SsvpRequired));
    }

    #[test]
    fn bifurcate_diagonal() {
        let a = DenseMatrix::diag(&[2.0, 1.0]);
        let target = SigmaList::new(vec![2.05, 0.95]).unwrap();
        let r = bifurcate(&a, &target, &SolverConfig::default()).unwrap();
        assert!(r.matrix.sub(&DenseMatrix::diag(&[2.05, 0.95])).norm_max() < 1e-12);
    }

    #[test]
    fn liberate_zero_direction() {
        let a = DenseMatrix::diag(&[2.0, 1.0]);
        let r = liberate(&a, &DenseMatrix::zeros(2, 2), &SolverConfig::default()).unwrap();
        assert_eq!(r.matrix, a);
    }

    #[test]
    fn config_validation() {
        let cfg = SolverConfig { step_backtrack: 1.5, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
        let parsed: SolverConfig = serde_json::from_str(r#"{"max_iters": 7}"#).unwrap();
        assert_eq!(parsed.max_iters, 7);
        assert_eq!(parsed.rng_seed, 42);
    }
}
