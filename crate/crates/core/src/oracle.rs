//! Reproducible Monte Carlo estimators, independent of the quadrature path.
//!
//! Two samplers: an exact tube sampler (points uniform in the body, so a cut
//! volume is C₀ times a hit fraction) and a plain box rejection sampler that
//! never references the closed-form C₀ and therefore validates it.
//!
//! Each sample derives its randomness from `(seed, index)` alone through
//! [`CounterRng`], so estimates are bit-identical across thread counts and
//! work partitions.

use rayon::prelude::*;

use crate::body::{BodySpec, CutVolumeResult, Hyperplane, Method, NormalForm, Side, total_volume};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Maximum ambient dimension supported by the fixed point buffers.
const MAX_DIM: usize = 32;

fn require_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "monte carlo needs at least one sample".into(),
        ));
    }
    Ok(())
}

fn require_dim(spec: &BodySpec) -> Result<()> {
    if spec.dim() > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "monte carlo supports n + m ≤ {MAX_DIM}, got {}",
            spec.dim()
        )));
    }
    Ok(())
}

/// Draw one point uniformly from the body: (t, y) uniform in the (m+1)-ball
/// of radius ε (rejection from the bounding cube), thinned by the radial
/// density (1+t)^{n−1}/(1+ε)^{n−1}, then a uniform direction on S^{n−1} from
/// normalized Gaussians. Writes x into `point[..n]`, y into `point[n..]`.
fn tube_point(spec: &BodySpec, rng: &mut CounterRng, point: &mut [f64]) {
    let n = spec.n() as usize;
    let m = spec.m() as usize;
    let eps = spec.eps();
    let mut ty = [0.0f64; MAX_DIM];
    let t = loop {
        // (t, y) in the (m+1)-ball of radius ε.
        let t = loop {
            let mut norm2 = 0.0;
            for slot in ty.iter_mut().take(m + 1) {
                let u = rng.uniform_in(-eps, eps);
                *slot = u;
                norm2 += u * u;
            }
            if norm2 <= eps * eps {
                break ty[0];
            }
        };
        // Accept against the radial Jacobian.
        let ratio = (1.0 + t) / (1.0 + eps);
        if rng.uniform() < ratio.powi(spec.n() as i32 - 1) {
            break t;
        }
    };
    // Uniform direction on S^{n−1}.
    let radius = 1.0 + t;
    loop {
        let mut norm2 = 0.0;
        let mut i = 0;
        while i < n {
            let (g1, g2) = rng.standard_normal_pair();
            point[i] = g1;
            norm2 += g1 * g1;
            i += 1;
            if i < n {
                point[i] = g2;
                norm2 += g2 * g2;
                i += 1;
            }
        }
        if norm2 > 1e-30 {
            let scale = radius / norm2.sqrt();
            for x in point.iter_mut().take(n) {
                *x *= scale;
            }
            break;
        }
    }
    point[n..n + m].copy_from_slice(&ty[1..=m]);
}

/// Count of predicate hits over `samples` tube points, split across the rayon
/// pool; the count depends only on `(seed, samples)`.
fn tube_hits<F>(spec: &BodySpec, samples: u64, seed: u64, on_side: F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let dim = spec.dim();
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = CounterRng::new(seed, index);
            let mut point = [0.0f64; MAX_DIM];
            tube_point(spec, &mut rng, &mut point[..dim]);
            u64::from(on_side(&point[..dim]))
        })
        .sum()
}

fn binomial_result(scale: f64, hits: u64, samples: u64) -> CutVolumeResult {
    let p = hits as f64 / samples as f64;
    CutVolumeResult {
        value: scale * p,
        error_estimate: scale * (p * (1.0 - p) / samples as f64).sqrt(),
        method: Method::MonteCarlo,
    }
}

/// Tube-sampling estimate of the cut volume of a normal-form plane:
/// C₀ · (fraction of body points on the requested side), with the binomial
/// standard error. Deterministic for fixed `(seed, samples)`.
pub fn mc_cut_volume(
    spec: &BodySpec,
    nf: &NormalForm,
    side: Side,
    samples: u64,
    seed: u64,
) -> Result<CutVolumeResult> {
    require_samples(samples)?;
    require_dim(spec)?;
    let c0 = total_volume(spec);
    let n = spec.n() as usize;
    let nf = *nf;
    let hits = tube_hits(spec, samples, seed, move |point| {
        let margin = if nf.degenerate {
            point[n] - nf.c
        } else {
            point[0] - nf.a * point[n] - nf.c
        };
        match side {
            Side::Geq => margin >= 0.0,
            Side::Leq => margin <= 0.0,
        }
    });
    Ok(binomial_result(c0, hits, samples))
}

/// Tube-sampling estimate against a full-coordinate hyperplane, without
/// reducing it first; exercises the reduction-independent geometry.
pub fn mc_cut_volume_hyperplane(
    spec: &BodySpec,
    h: &Hyperplane,
    side: Side,
    samples: u64,
    seed: u64,
) -> Result<CutVolumeResult> {
    require_samples(samples)?;
    require_dim(spec)?;
    if h.alpha().len() != spec.n() as usize || h.gamma().len() != spec.m() as usize {
        return Err(Error::InvalidArgument(
            "hyperplane dimensions do not match the body spec".into(),
        ));
    }
    let c0 = total_volume(spec);
    let hits = tube_hits(spec, samples, seed, move |point| {
        let margin = h.side_value(point);
        match side {
            Side::Geq => margin >= 0.0,
            Side::Leq => margin <= 0.0,
        }
    });
    Ok(binomial_result(c0, hits, samples))
}

/// Box rejection estimate of the total volume: uniform sampling in
/// [−(1+ε), 1+ε]^n × [−ε, ε]^m, fraction inside times the box volume. By
/// construction independent of the tube sampler and of the closed form.
pub fn mc_total_volume_box(spec: &BodySpec, samples: u64, seed: u64) -> Result<CutVolumeResult> {
    mc_cut_volume_box(spec, None, Side::Geq, samples, seed)
}

/// Box rejection estimate of a cut volume (or of the total volume when `nf`
/// is `None`).
pub fn mc_cut_volume_box(
    spec: &BodySpec,
    nf: Option<&NormalForm>,
    side: Side,
    samples: u64,
    seed: u64,
) -> Result<CutVolumeResult> {
    require_samples(samples)?;
    require_dim(spec)?;
    let n = spec.n() as usize;
    let m = spec.m() as usize;
    let eps = spec.eps();
    let eps2 = eps * eps;
    let box_volume = (2.0 * (1.0 + eps)).powi(n as i32) * (2.0 * eps).powi(m as i32);
    let nf = nf.copied();
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = CounterRng::new(seed, index);
            let mut x1 = 0.0;
            let mut y1 = 0.0;
            let mut x2 = 0.0;
            let mut y2 = 0.0;
            for i in 0..n {
                let u = rng.uniform_in(-(1.0 + eps), 1.0 + eps);
                if i == 0 {
                    x1 = u;
                }
                x2 += u * u;
            }
            for i in 0..m {
                let u = rng.uniform_in(-eps, eps);
                if i == 0 {
                    y1 = u;
                }
                y2 += u * u;
            }
            let s = x2 + y2 + 1.0 - eps2;
            if s * s - 4.0 * x2 >= 0.0 {
                return 0;
            }
            let inside_side = match nf {
                None => true,
                Some(form) => {
                    let margin = if form.degenerate {
                        y1 - form.c
                    } else {
                        x1 - form.a * y1 - form.c
                    };
                    match side {
                        Side::Geq => margin >= 0.0,
                        Side::Leq => margin <= 0.0,
                    }
                }
            };
            u64::from(inside_side)
        })
        .sum();
    Ok(binomial_result(box_volume, hits, samples))
}
