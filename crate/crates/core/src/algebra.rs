//! Reconstruction of the single-valued surfaces S(a, c) and P(a, c) as
//! weighted polynomials, and the quadratic factor
//! Φ(V, a, c) = V² − S(a, c)·V + P(a, c) used for cross-domain volume
//! prediction.
//!
//! Both surfaces are even in a and are modelled as
//! F(a, c) / (1+a²)^k with F a polynomial over even powers of a; the weight
//! exponents are k = (n+m−1)/2 for S and k = n+m for P, matching the
//! conjectured pole orders on a² + 1 = 0. S is anchored to V_geq on the
//! separating domain (the part containing the right circle); on the
//! right-circle-only domain V_geq is then a single root of Φ(·, a, c), which
//! yields P pointwise by Vieta: P = V·(S − V).
//!
//! Fits run in Chebyshev-conditioned coordinates (t = a² and c affinely
//! mapped to [−1, 1]) and are solved by column-pivoted QR; coefficients are
//! reported in original monomials.

use serde::{Deserialize, Serialize};

use crate::body::{BodySpec, total_volume};
use crate::classify::{DEFAULT_DISCRIMINANT_TOL, DomainLabel, classify};
use crate::error::{Error, Result};
use crate::lstsq::solve_least_squares;
use crate::rng::CounterRng;

/// Which surface a model represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitTarget {
    S,
    P,
}

impl std::fmt::Display for FitTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitTarget::S => "S",
            FitTarget::P => "P",
        })
    }
}

impl std::str::FromStr for FitTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(FitTarget::S),
            "P" | "p" => Ok(FitTarget::P),
            other => Err(Error::InvalidArgument(format!(
                "fit target must be S or P, got `{other}`"
            ))),
        }
    }
}

/// Weight exponent of the (1+a²) denominator for a target and body.
pub fn weight_exponent(target: FitTarget, spec: &BodySpec) -> u32 {
    match target {
        FitTarget::S => (spec.n() + spec.m() - 1) / 2,
        FitTarget::P => spec.n() + spec.m(),
    }
}

/// Rectangle of (a, c) values the samples covered.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub a: (f64, f64),
    pub c: (f64, f64),
}

/// A fitted weighted-polynomial surface: value = F(a, c) / (1+a²)^k with
/// F = Σ coeffs[i]·a^basis[i].0·c^basis[i].1 and only even a-exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialModel {
    pub n: u32,
    pub m: u32,
    pub eps: f64,
    pub target: FitTarget,
    #[serde(rename = "k")]
    pub weight_exponent: u32,
    pub degree_a: u32,
    pub degree_c: u32,
    pub basis: Vec<(u32, u32)>,
    pub coeffs: Vec<f64>,
    pub residual_rms: f64,
    pub fit_window: FitWindow,
}

impl PolynomialModel {
    /// The weighted numerator F(a, c).
    pub fn numerator(&self, a: f64, c: f64) -> f64 {
        let mut acc = 0.0;
        for ((i, j), coeff) in self.basis.iter().zip(&self.coeffs) {
            acc += coeff * a.powi(*i as i32) * c.powi(*j as i32);
        }
        acc
    }

    /// Model value F(a, c)/(1+a²)^k.
    pub fn evaluate(&self, a: f64, c: f64) -> f64 {
        self.numerator(a, c) / (1.0 + a * a).powi(self.weight_exponent as i32)
    }
}

/// Coefficient vectors (in powers of x) of T_0..T_max composed with the
/// affine map sending [lo, hi] to [−1, 1].
fn cheb_polys(max_deg: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let width = hi - lo;
    let (s, o) = if width.abs() < 1e-300 {
        (0.0, 0.0)
    } else {
        (2.0 / width, -(hi + lo) / width)
    };
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(max_deg + 1);
    polys.push(vec![1.0]);
    if max_deg >= 1 {
        polys.push(vec![o, s]);
    }
    for k in 2..=max_deg {
        // T_k = 2·(s x + o)·T_{k−1} − T_{k−2}
        let prev = &polys[k - 1];
        let mut next = vec![0.0; k + 1];
        for (i, v) in prev.iter().enumerate() {
            next[i] += 2.0 * o * v;
            next[i + 1] += 2.0 * s * v;
        }
        for (i, v) in polys[k - 2].iter().enumerate() {
            next[i] -= v;
        }
        polys.push(next);
    }
    polys
}

/// T_0..T_max evaluated at the affine image of x.
fn cheb_values(max_deg: usize, lo: f64, hi: f64, x: f64, out: &mut Vec<f64>) {
    let width = hi - lo;
    let xh = if width.abs() < 1e-300 {
        0.0
    } else {
        (2.0 * x - hi - lo) / width
    };
    out.clear();
    out.push(1.0);
    if max_deg >= 1 {
        out.push(xh);
    }
    for k in 2..=max_deg {
        let next = 2.0 * xh * out[k - 1] - out[k - 2];
        out.push(next);
    }
}

/// Shape of the even-in-a fitting basis: monomials a^i c^j with i even,
/// i ≤ degree_a, j ≤ degree_c and optionally i + j ≤ total_cap. The cap
/// matches the conjectured growth of the weighted numerators: c-degree
/// bounded by the pole order at infinity and total degree by that order plus
/// the degree of the (1+a²)^k denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisSpec {
    pub degree_a: u32,
    pub degree_c: u32,
    pub total_cap: Option<u32>,
}

impl BasisSpec {
    pub fn product(degree_a: u32, degree_c: u32) -> BasisSpec {
        BasisSpec {
            degree_a,
            degree_c,
            total_cap: None,
        }
    }

    /// The shape implied by testing pole order `d` at infinity for the given
    /// target: c-degree ≤ d and total degree ≤ d + 2k, the numerator growth
    /// allowed by the (1+a²)^k denominator.
    pub fn conjectured(target: FitTarget, spec: &BodySpec, d: u32) -> BasisSpec {
        let k = weight_exponent(target, spec);
        BasisSpec {
            degree_a: d + 2 * k,
            degree_c: d,
            total_cap: Some(d + 2 * k),
        }
    }

    /// (t-power, c-power) pairs of the included monomials, t = a².
    fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..=(self.degree_a / 2) as usize {
            for q in 0..=self.degree_c as usize {
                if self
                    .total_cap
                    .is_none_or(|cap| 2 * p + q <= cap as usize)
                {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

/// Core fit: least squares of y·(1+a²)^k against the even-in-a basis.
/// `samples` are (a, c, y) with y in target units (V for S, P for P).
pub fn fit_weighted(
    target: FitTarget,
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    degree_a: u32,
    degree_c: u32,
) -> Result<PolynomialModel> {
    fit_weighted_basis(target, spec, samples, BasisSpec::product(degree_a, degree_c))
}

/// [`fit_weighted`] with an explicit basis shape.
pub fn fit_weighted_basis(
    target: FitTarget,
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    shape: BasisSpec,
) -> Result<PolynomialModel> {
    let k = weight_exponent(target, spec);
    let ta_deg = (shape.degree_a / 2) as usize;
    let c_deg = shape.degree_c as usize;
    let pairs = shape.pairs();
    let cols = pairs.len();
    let rows = samples.len();
    if rows < cols {
        return Err(Error::TooFewSamples {
            needed: cols,
            got: rows,
        });
    }

    let mut t_lo = f64::INFINITY;
    let mut t_hi = f64::NEG_INFINITY;
    let mut a_lo = f64::INFINITY;
    let mut a_hi = f64::NEG_INFINITY;
    let mut c_lo = f64::INFINITY;
    let mut c_hi = f64::NEG_INFINITY;
    for (a, c, _) in samples {
        let t = a * a;
        t_lo = t_lo.min(t);
        t_hi = t_hi.max(t);
        a_lo = a_lo.min(*a);
        a_hi = a_hi.max(*a);
        c_lo = c_lo.min(*c);
        c_hi = c_hi.max(*c);
    }

    // Column-major design matrix of T_p(t̂)·T_q(ĉ) over the included pairs.
    let mut design = vec![0.0; rows * cols];
    let mut rhs = vec![0.0; rows];
    let mut tvals = Vec::new();
    let mut cvals = Vec::new();
    for (row, (a, c, y)) in samples.iter().enumerate() {
        cheb_values(ta_deg, t_lo, t_hi, a * a, &mut tvals);
        cheb_values(c_deg, c_lo, c_hi, *c, &mut cvals);
        for (col, (p, q)) in pairs.iter().enumerate() {
            design[col * rows + row] = tvals[*p] * cvals[*q];
        }
        rhs[row] = y * (1.0 + a * a).powi(k as i32);
    }

    let beta = solve_least_squares(rows, cols, &mut design, &mut rhs, 4e-14).map_err(|col| {
        let (p, q) = pairs[col];
        Error::RankDeficient {
            exp_a: 2 * p as u32,
            exp_c: q as u32,
        }
    })?;

    // Expand the Chebyshev products back to monomials in (a², c); since the
    // pair set is downward closed, the expansion stays inside it.
    let tpolys = cheb_polys(ta_deg, t_lo, t_hi);
    let cpolys = cheb_polys(c_deg, c_lo, c_hi);
    let mut grid = vec![0.0; (ta_deg + 1) * (c_deg + 1)];
    for (col, (p, q)) in pairs.iter().enumerate() {
        let weight = beta[col];
        if weight == 0.0 {
            continue;
        }
        for (i, tv) in tpolys[*p].iter().enumerate() {
            for (j, cv) in cpolys[*q].iter().enumerate() {
                grid[i * (c_deg + 1) + j] += weight * tv * cv;
            }
        }
    }
    let mut basis = Vec::with_capacity(pairs.len());
    let mut coeffs = Vec::with_capacity(pairs.len());
    for (p, q) in &pairs {
        basis.push((2 * *p as u32, *q as u32));
        coeffs.push(grid[p * (c_deg + 1) + q]);
    }

    let mut model = PolynomialModel {
        n: spec.n(),
        m: spec.m(),
        eps: spec.eps(),
        target,
        weight_exponent: k,
        degree_a: shape.degree_a,
        degree_c: shape.degree_c,
        basis,
        coeffs,
        residual_rms: 0.0,
        fit_window: FitWindow {
            a: (a_lo, a_hi),
            c: (c_lo, c_hi),
        },
    };
    let mut ss = 0.0;
    for (a, c, y) in samples {
        let r = model.evaluate(*a, *c) - y;
        ss += r * r;
    }
    model.residual_rms = (ss / rows as f64).sqrt();
    Ok(model)
}

fn check_domain(
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    expected: DomainLabel,
) -> Result<()> {
    for (index, (a, c, _)) in samples.iter().enumerate() {
        let found = classify(*a, *c, spec, DEFAULT_DISCRIMINANT_TOL);
        if found != expected {
            return Err(Error::WrongDomain {
                index,
                a: *a,
                c: *c,
                found,
                expected,
            });
        }
    }
    Ok(())
}

/// Fit S from (a, c, V_geq) samples taken on the separating domain.
pub fn fit_s(
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    degree_a: u32,
    degree_c: u32,
) -> Result<PolynomialModel> {
    fit_s_shaped(spec, samples, BasisSpec::product(degree_a, degree_c))
}

/// [`fit_s`] with an explicit basis shape.
pub fn fit_s_shaped(
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    shape: BasisSpec,
) -> Result<PolynomialModel> {
    check_domain(spec, samples, DomainLabel::Separating3)?;
    fit_weighted_basis(FitTarget::S, spec, samples, shape)
}

/// Convert right-circle-only volume samples (a, c, V_geq) into P samples by
/// Vieta: V is one root of Φ(·, a, c), so P = V·(S − V).
pub fn derive_p_samples(
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    s_model: &PolynomialModel,
) -> Result<Vec<(f64, f64, f64)>> {
    check_domain(spec, samples, DomainLabel::RightOnly2r)?;
    Ok(samples
        .iter()
        .map(|(a, c, v)| {
            let s = s_model.evaluate(*a, *c);
            (*a, *c, v * (s - v))
        })
        .collect())
}

/// Fit P from derived (a, c, P) samples.
pub fn fit_p(
    spec: &BodySpec,
    p_samples: &[(f64, f64, f64)],
    degree_a: u32,
    degree_c: u32,
) -> Result<PolynomialModel> {
    fit_weighted_basis(
        FitTarget::P,
        spec,
        p_samples,
        BasisSpec::product(degree_a, degree_c),
    )
}

/// The fitted quadratic factor: Φ(V, a, c) = V² − S(a, c)·V + P(a, c).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhiModel {
    pub s_model: PolynomialModel,
    pub p_model: PolynomialModel,
    pub c0: f64,
}

impl PhiModel {
    pub fn new(s_model: PolynomialModel, p_model: PolynomialModel) -> Result<PhiModel> {
        if s_model.target != FitTarget::S || p_model.target != FitTarget::P {
            return Err(Error::InvalidArgument(
                "PhiModel needs one S model and one P model".into(),
            ));
        }
        if (s_model.n, s_model.m) != (p_model.n, p_model.m) || s_model.eps != p_model.eps {
            return Err(Error::InvalidArgument(
                "S and P models were fitted for different bodies".into(),
            ));
        }
        let spec = BodySpec::new(s_model.n, s_model.m, s_model.eps)?;
        Ok(PhiModel {
            s_model,
            p_model,
            c0: total_volume(&spec),
        })
    }

    pub fn spec(&self) -> BodySpec {
        BodySpec::new(self.s_model.n, self.s_model.m, self.s_model.eps)
            .expect("validated at construction")
    }

    /// Φ(v, a, c).
    pub fn phi(&self, v: f64, a: f64, c: f64) -> f64 {
        v * v - self.s_model.evaluate(a, c) * v + self.p_model.evaluate(a, c)
    }
}

/// A possibly complex root of the quadratic factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVal {
    pub re: f64,
    pub im: f64,
}

impl ComplexVal {
    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

/// The two roots (S ± √(S² − 4P))/2 of Φ(·, a, c); complex when the
/// discriminant is negative.
pub fn phi_roots(phi: &PhiModel, a: f64, c: f64) -> [ComplexVal; 2] {
    let s = phi.s_model.evaluate(a, c);
    let p = phi.p_model.evaluate(a, c);
    let disc = s * s - 4.0 * p;
    if disc >= 0.0 {
        let root = disc.sqrt();
        [
            ComplexVal {
                re: 0.5 * (s - root),
                im: 0.0,
            },
            ComplexVal {
                re: 0.5 * (s + root),
                im: 0.0,
            },
        ]
    } else {
        let imag = 0.5 * (-disc).sqrt();
        [
            ComplexVal {
                re: 0.5 * s,
                im: -imag,
            },
            ComplexVal { re: 0.5 * s, im: imag },
        ]
    }
}

/// Candidate volumes plus a flag recording whether complex roots had to be
/// discarded.
#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub candidates: Vec<f64>,
    pub complex_discarded: bool,
}

/// Candidate values of V_geq at (a, c) given its domain:
///
/// * separating (3): {S, C₀ − S};
/// * right only (2r): the roots of Φ(·, a, c) and their C₀-complements;
/// * left only (2l): the roots of Φ(·, −a, −c) and their C₀-complements;
/// * both (4): the four sums of one root from each mirror factor.
///
/// Complex roots are discarded and flagged.
pub fn predict_candidates(
    phi: &PhiModel,
    a: f64,
    c: f64,
    label: DomainLabel,
) -> Result<Prediction> {
    let c0 = phi.c0;
    // S and P are even in a, so the mirror factor Φ(·, −a, −c) is evaluated
    // at (a, −c).
    let mut complex_discarded = false;
    let mut reals = |roots: [ComplexVal; 2]| -> Vec<f64> {
        roots
            .into_iter()
            .filter_map(|r| {
                if r.is_real() {
                    Some(r.re)
                } else {
                    complex_discarded = true;
                    None
                }
            })
            .collect()
    };
    let mut candidates = match label {
        DomainLabel::Separating3 => {
            let s = phi.s_model.evaluate(a, c);
            vec![s, c0 - s]
        }
        DomainLabel::RightOnly2r => {
            let roots = reals(phi_roots(phi, a, c));
            roots.iter().map(|r| c0 - r).chain(roots.iter().copied()).collect()
        }
        DomainLabel::LeftOnly2l => {
            let roots = reals(phi_roots(phi, a, -c));
            roots.iter().map(|r| c0 - r).chain(roots.iter().copied()).collect()
        }
        DomainLabel::Both4 => {
            let right = reals(phi_roots(phi, a, c));
            let left = reals(phi_roots(phi, a, -c));
            right
                .iter()
                .flat_map(|r| left.iter().map(move |l| r + l))
                .collect()
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "prediction is defined on domains 2l, 2r, 3 and 4, not {other}"
            )));
        }
    };
    candidates.sort_by(f64::total_cmp);
    Ok(Prediction {
        candidates,
        complex_discarded,
    })
}

/// One degree step of a sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DegreeSweepRecord {
    pub degree: u32,
    pub train_rms: f64,
    pub validation_rms: f64,
}

/// Outcome of a degree sweep with validation split.
#[derive(Clone, Debug)]
pub struct SweepSelection {
    pub chosen_degree: u32,
    pub records: Vec<DegreeSweepRecord>,
    pub model: PolynomialModel,
}

/// Sweep the tested pole order d over `degrees` (each d giving the
/// [`BasisSpec::conjectured`] shape) with a deterministic 80/20
/// train/validation split; the chosen degree is the smallest whose validation
/// RMS is within 10% of the minimum. The returned model is refitted on all
/// samples at the chosen degree.
pub fn sweep_degrees(
    target: FitTarget,
    spec: &BodySpec,
    samples: &[(f64, f64, f64)],
    degrees: std::ops::RangeInclusive<u32>,
    split_seed: u64,
) -> Result<SweepSelection> {
    if samples.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: samples.len(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut rng = CounterRng::new(split_seed, 0);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.below(i as u64 + 1) as usize);
    }
    let held = (samples.len() / 5).max(1);
    let validation: Vec<(f64, f64, f64)> = order[..held].iter().map(|&i| samples[i]).collect();
    let train: Vec<(f64, f64, f64)> = order[held..].iter().map(|&i| samples[i]).collect();

    let mut records = Vec::new();
    for degree in degrees.clone() {
        let model =
            fit_weighted_basis(target, spec, &train, BasisSpec::conjectured(target, spec, degree))?;
        let rms = |set: &[(f64, f64, f64)]| {
            let ss: f64 = set
                .iter()
                .map(|(a, c, y)| {
                    let r = model.evaluate(*a, *c) - y;
                    r * r
                })
                .sum();
            (ss / set.len() as f64).sqrt()
        };
        records.push(DegreeSweepRecord {
            degree,
            train_rms: rms(&train),
            validation_rms: rms(&validation),
        });
    }
    let best = records
        .iter()
        .map(|r| r.validation_rms)
        .fold(f64::INFINITY, f64::min);
    // An absolute floor keeps the 10% rule meaningful when every degree fits
    // to machine precision.
    let scale: f64 = (samples.iter().map(|(_, _, y)| y * y).sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    let threshold = (1.1 * best).max(1e-12 * scale);
    let chosen_degree = records
        .iter()
        .find(|r| r.validation_rms <= threshold)
        .map(|r| r.degree)
        .expect("sweep produced at least one record");
    let model = fit_weighted_basis(
        target,
        spec,
        samples,
        BasisSpec::conjectured(target, spec, chosen_degree),
    )?;
    Ok(SweepSelection {
        chosen_degree,
        records,
        model,
    })
}
