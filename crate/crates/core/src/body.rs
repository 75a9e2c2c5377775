//! The tube body: implicit function, membership, hyperplane normal form and
//! the closed-form total volume.
//!
//! `W` is the set of points of `R^{n+m} = R^n ⊕ R^m` at distance ≤ ε from the
//! unit sphere of the x-block, i.e. `(|x| − 1)² + |y|² ≤ ε²`. Squaring removes
//! the root: the boundary is the zero set of
//! `(|x|² + |y|² + 1 − ε²)² − 4|x|²`, negative inside and positive outside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ball_axial_moment, binomial, sphere_area};

/// Parameters of the tube body: x-block dimension `n` (odd, ≥ 3), y-block
/// dimension `m` (even, ≥ 2) and tube radius `eps ∈ (0, 1)`.
///
/// `n = 1` or `m = 0` would make the boundary hypersurface reducible, so both
/// are rejected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBodySpec", into = "RawBodySpec")]
pub struct BodySpec {
    n: u32,
    m: u32,
    eps: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBodySpec {
    n: u32,
    m: u32,
    eps: f64,
}

impl TryFrom<RawBodySpec> for BodySpec {
    type Error = Error;
    fn try_from(raw: RawBodySpec) -> Result<Self> {
        BodySpec::new(raw.n, raw.m, raw.eps)
    }
}

impl From<BodySpec> for RawBodySpec {
    fn from(spec: BodySpec) -> Self {
        RawBodySpec {
            n: spec.n,
            m: spec.m,
            eps: spec.eps,
        }
    }
}

impl BodySpec {
    pub fn new(n: u32, m: u32, eps: f64) -> Result<Self> {
        if n.is_multiple_of(2) || n < 3 {
            return Err(Error::InvalidSpec(format!("n must be odd and ≥ 3, got {n}")));
        }
        if m % 2 == 1 || m < 2 {
            return Err(Error::InvalidSpec(format!("m must be even and ≥ 2, got {m}")));
        }
        if !(eps > 0.0 && eps < 1.0) || !eps.is_finite() {
            return Err(Error::InvalidSpec(format!("eps must lie in (0, 1), got {eps}")));
        }
        Ok(BodySpec { n, m, eps })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Ambient dimension n + m.
    pub fn dim(&self) -> usize {
        (self.n + self.m) as usize
    }
}

/// Which closed half-space of a hyperplane a volume refers to. For the normal
/// form `x₁ = a·y₁ + c` the `Geq` part is `{x₁ − a·y₁ − c ≥ 0}`; for the
/// degenerate form `y₁ = c` it is `{y₁ − c ≥ 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Geq,
    Leq,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Geq => Side::Leq,
            Side::Leq => Side::Geq,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Geq => "geq",
            Side::Leq => "leq",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geq" => Ok(Side::Geq),
            "leq" => Ok(Side::Leq),
            other => Err(Error::InvalidArgument(format!(
                "side must be `geq` or `leq`, got `{other}`"
            ))),
        }
    }
}

/// Sign classification of a point relative to the body boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// An affine hyperplane `α·x + γ·y = β` in full coordinates. At least one of
/// α, γ must be nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    beta: f64,
}

impl Hyperplane {
    pub fn new(alpha: Vec<f64>, gamma: Vec<f64>, beta: f64) -> Result<Self> {
        let norm2: f64 = alpha.iter().chain(gamma.iter()).map(|v| v * v).sum();
        if norm2 == 0.0 {
            return Err(Error::DegenerateHyperplane);
        }
        if !alpha.iter().chain(gamma.iter()).all(|v| v.is_finite()) || !beta.is_finite() {
            return Err(Error::InvalidArgument(
                "hyperplane coefficients must be finite".into(),
            ));
        }
        Ok(Hyperplane { alpha, gamma, beta })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Signed evaluation α·x + γ·y − β at a full-coordinate point; its sign
    /// selects the side (`Geq` ⇔ value ≥ 0 after normal-form reduction).
    pub fn side_value(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.alpha.len() + self.gamma.len());
        let (x, y) = point.split_at(self.alpha.len());
        let ax: f64 = self.alpha.iter().zip(x).map(|(a, v)| a * v).sum();
        let gy: f64 = self.gamma.iter().zip(y).map(|(g, v)| g * v).sum();
        ax + gy - self.beta
    }
}

/// The O(n)×O(m)-reduced form of a hyperplane.
///
/// Non-degenerate: the plane `x₁ = a·y₁ + c` with `a = |γ|/|α| ≥ 0` and the
/// *signed* `c = β/|α|`. Keeping the sign of c (instead of |β|/|α|) lets the
/// two mirror factors Φ(·, a, c) and Φ(·, −a, −c) be tracked without
/// re-deriving orientation; scaling a hyperplane by λ < 0 flips `c` together
/// with the side labels.
///
/// Degenerate (α = 0): the plane `y₁ = c`; `a` is unused.
///
/// Reduction always produces `a ≥ 0`; constructed values may carry any finite
/// `a` so that mirror identities such as `V(a, c) = V(−a, c)` can be evaluated
/// directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub a: f64,
    pub c: f64,
    pub degenerate: bool,
}

impl NormalForm {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !a.is_finite() || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "normal form needs finite (a, c), got ({a}, {c})"
            )));
        }
        Ok(NormalForm {
            a,
            c,
            degenerate: false,
        })
    }

    /// The plane `y₁ = c` (limit of slopes a → ∞, handled explicitly).
    pub fn degenerate(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "degenerate normal form needs finite c, got {c}"
            )));
        }
        Ok(NormalForm {
            a: 0.0,
            c,
            degenerate: true,
        })
    }
}

/// How a volume value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
            Method::ClosedForm => "closed_form",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(Method::Quadrature),
            "monte_carlo" => Ok(Method::MonteCarlo),
            "closed_form" => Ok(Method::ClosedForm),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// A volume value together with its error estimate and provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutVolumeResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

/// The defining polynomial `(|x|² + |y|² + 1 − ε²)² − 4|x|²` evaluated at a
/// full-coordinate point: negative inside the body, zero on the boundary,
/// positive outside.
pub fn implicit_value(spec: &BodySpec, point: &[f64]) -> f64 {
    assert_eq!(
        point.len(),
        spec.dim(),
        "point must have n + m coordinates"
    );
    let x2: f64 = point[..spec.n as usize].iter().map(|v| v * v).sum();
    let y2: f64 = point[spec.n as usize..].iter().map(|v| v * v).sum();
    let s = x2 + y2 + 1.0 - spec.eps * spec.eps;
    s * s - 4.0 * x2
}

/// Sign classification of [`implicit_value`], with |value| ≤ tol mapped to
/// `Boundary`.
pub fn membership(spec: &BodySpec, point: &[f64], tol: f64) -> Membership {
    assert!(tol > 0.0, "membership tolerance must be positive");
    let v = implicit_value(spec, point);
    if v.abs() <= tol {
        Membership::Boundary
    } else if v < 0.0 {
        Membership::Inside
    } else {
        Membership::Outside
    }
}

/// Reduce a hyperplane to its `(a, c)` normal form.
///
/// With |α| > 0 this is the plane `x₁ = a·y₁ + c`, `a = |γ|/|α|`,
/// `c = β/|α|`; the half-space `{α·x + γ·y ≥ β}` maps onto the `Geq` side
/// `{x₁ − a·y₁ − c ≥ 0}`. With α = 0 the result is degenerate: `y₁ = c`,
/// `c = β/|γ|`.
pub fn reduce_to_normal_form(h: &Hyperplane) -> NormalForm {
    let alpha_norm = h.alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gamma_norm = h.gamma.iter().map(|v| v * v).sum::<f64>().sqrt();
    if alpha_norm > 0.0 {
        NormalForm {
            a: gamma_norm / alpha_norm,
            c: h.beta / alpha_norm,
            degenerate: false,
        }
    } else {
        NormalForm {
            a: 0.0,
            c: h.beta / gamma_norm,
            degenerate: true,
        }
    }
}

/// Total volume C₀ of the body by the tube formula
///
/// C₀ = ω_{n−1} · Σ_{j=0}^{(n−1)/2} C(n−1, 2j) · M_{2j}(m+1, ε),
///
/// where ω_k is the unit k-sphere area and M_{2j}(d, ε) the 2j-th axial
/// moment of the ε-ball in R^d. The formula integrates `(1+t)^{n−1}` over the
/// (m+1)-dimensional normal ball of the core sphere; it is cross-validated
/// against the independent box Monte Carlo estimator in the test suite.
pub fn total_volume(spec: &BodySpec) -> f64 {
    let d = spec.m + 1;
    let mut sum = 0.0;
    for j in 0..=(spec.n - 1) / 2 {
        sum += binomial(spec.n - 1, 2 * j) * ball_axial_moment(j, d, spec.eps);
    }
    sphere_area(spec.n - 1) * sum
}
