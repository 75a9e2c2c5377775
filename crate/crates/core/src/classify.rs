//! Classification of hyperplanes into the five generic regions of the reduced
//! `(a, c)` plane, and the tangency offsets where those regions meet.
//!
//! The coordinate 2-plane spanned by x₁ and y₁ meets the body boundary in two
//! circles of radius ε centered at (±1, 0). A normal-form plane traces the
//! line `u = a·v + c` there; everything is decided by the distances
//! `d± = |1 ∓ c| / √(1+a²)` from the circle centers to that line.
//!
//! Planes with a = 0 (no y-component at all) are degenerate from the
//! complex-analytic viewpoint yet perfectly transversal over the reals; they
//! classify by the same distance rules as every other slope.

use serde::{Deserialize, Serialize};

use crate::body::{BodySpec, Hyperplane, NormalForm, reduce_to_normal_form};
use crate::error::Error;

/// Labels of the four tangency offsets / Lefschetz thimbles: circle (left or
/// right) and sign of the ± ε√(1+a²) term. For `E = ε√(1+a²) < 1` the order
/// of offsets by value is L−, L+, R−, R+.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThimbleLabel {
    #[serde(rename = "L-")]
    LMinus,
    #[serde(rename = "L+")]
    LPlus,
    #[serde(rename = "R-")]
    RMinus,
    #[serde(rename = "R+")]
    RPlus,
}

impl ThimbleLabel {
    pub const ALL: [ThimbleLabel; 4] = [
        ThimbleLabel::LMinus,
        ThimbleLabel::LPlus,
        ThimbleLabel::RMinus,
        ThimbleLabel::RPlus,
    ];

    pub fn index(self) -> usize {
        match self {
            ThimbleLabel::LMinus => 0,
            ThimbleLabel::LPlus => 1,
            ThimbleLabel::RMinus => 2,
            ThimbleLabel::RPlus => 3,
        }
    }

    pub fn from_index(i: usize) -> ThimbleLabel {
        Self::ALL[i]
    }
}

impl std::fmt::Display for ThimbleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThimbleLabel::LMinus => "L-",
            ThimbleLabel::LPlus => "L+",
            ThimbleLabel::RMinus => "R-",
            ThimbleLabel::RPlus => "R+",
        })
    }
}

impl std::str::FromStr for ThimbleLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "L-" => Ok(ThimbleLabel::LMinus),
            "L+" => Ok(ThimbleLabel::LPlus),
            "R-" => Ok(ThimbleLabel::RMinus),
            "R+" => Ok(ThimbleLabel::RPlus),
            other => Err(Error::InvalidArgument(format!(
                "unknown thimble label `{other}` (expected one of L-, L+, R-, R+)"
            ))),
        }
    }
}

/// The five regions of generic normal-form hyperplanes, by how the slice line
/// meets the two circles: misses both and leaves them to one side (1), meets
/// only the left (2l) or only the right (2r), separates them (3), or meets
/// both (4). Points within tolerance of a tangency are refused as
/// `NearDiscriminant` instead of being assigned arbitrarily.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainLabel {
    #[serde(rename = "1")]
    Outside1,
    #[serde(rename = "2l")]
    LeftOnly2l,
    #[serde(rename = "2r")]
    RightOnly2r,
    #[serde(rename = "3")]
    Separating3,
    #[serde(rename = "4")]
    Both4,
    #[serde(rename = "near-discriminant")]
    NearDiscriminant,
}

impl std::fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainLabel::Outside1 => "1",
            DomainLabel::LeftOnly2l => "2l",
            DomainLabel::RightOnly2r => "2r",
            DomainLabel::Separating3 => "3",
            DomainLabel::Both4 => "4",
            DomainLabel::NearDiscriminant => "near-discriminant",
        })
    }
}

impl std::str::FromStr for DomainLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "1" => Ok(DomainLabel::Outside1),
            "2l" => Ok(DomainLabel::LeftOnly2l),
            "2r" => Ok(DomainLabel::RightOnly2r),
            "3" => Ok(DomainLabel::Separating3),
            "4" => Ok(DomainLabel::Both4),
            "near-discriminant" => Ok(DomainLabel::NearDiscriminant),
            other => Err(Error::InvalidArgument(format!(
                "unknown domain label `{other}` (expected 1, 2l, 2r, 3 or 4)"
            ))),
        }
    }
}

/// Default tolerance (in offset units) for tangency detection.
pub const DEFAULT_DISCRIMINANT_TOL: f64 = 1e-9;

/// The four tangency offsets `±1 ± E`, `E = ε√(1+a²)`, sorted ascending and
/// labelled by circle and sign. All four are distinct iff E ≠ 1; for E < 1
/// the sorted order is (L−, L+, R−, R+), for E > 1 it is (L−, R−, L+, R+).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalOffsets {
    /// Tangency half-width E = ε√(1+a²).
    pub e: f64,
    pub offsets: [f64; 4],
    pub labels: [ThimbleLabel; 4],
}

impl CriticalOffsets {
    /// Offset of a given label: L± ↦ −1 ± E, R± ↦ 1 ± E.
    pub fn offset_of(&self, label: ThimbleLabel) -> f64 {
        let i = self.labels.iter().position(|l| *l == label).unwrap();
        self.offsets[i]
    }
}

/// Tangency offsets of the slope-a family for the given body.
pub fn critical_offsets(a: f64, spec: &BodySpec) -> CriticalOffsets {
    let e = spec.eps() * a.hypot(1.0);
    let mut pairs = [
        (-1.0 - e, ThimbleLabel::LMinus),
        (-1.0 + e, ThimbleLabel::LPlus),
        (1.0 - e, ThimbleLabel::RMinus),
        (1.0 + e, ThimbleLabel::RPlus),
    ];
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    CriticalOffsets {
        e,
        offsets: [pairs[0].0, pairs[1].0, pairs[2].0, pairs[3].0],
        labels: [pairs[0].1, pairs[1].1, pairs[2].1, pairs[3].1],
    }
}

/// Classify the normal-form plane `u = a·v + c`.
///
/// With `d± = |1 ∓ c|/√(1+a²)`: both distances below ε means the line meets
/// both circles (4); exactly one below ε means 2r or 2l; neither below means
/// separating (3) when |c| < 1 and outside (1) when |c| > 1. Distances within
/// `tol` of ε (measured in offset units, i.e. scaled back by √(1+a²)) return
/// `NearDiscriminant`.
pub fn classify(a: f64, c: f64, spec: &BodySpec, tol: f64) -> DomainLabel {
    debug_assert!(tol >= 0.0);
    let eps = spec.eps();
    let scale = a.hypot(1.0);
    let d_plus = (1.0 - c).abs() / scale;
    let d_minus = (1.0 + c).abs() / scale;
    if ((d_plus - eps).abs().min((d_minus - eps).abs())) * scale <= tol {
        return DomainLabel::NearDiscriminant;
    }
    match (d_plus < eps, d_minus < eps) {
        (true, true) => DomainLabel::Both4,
        (true, false) => DomainLabel::RightOnly2r,
        (false, true) => DomainLabel::LeftOnly2l,
        (false, false) => {
            if c.abs() < 1.0 {
                DomainLabel::Separating3
            } else {
                DomainLabel::Outside1
            }
        }
    }
}

/// Classify a normal form, covering the degenerate family `y₁ = c`: a
/// horizontal slice line meets both circles when |c| < ε and neither when
/// |c| > ε (it can never separate them).
pub fn classify_normal_form(nf: &NormalForm, spec: &BodySpec, tol: f64) -> DomainLabel {
    if nf.degenerate {
        let gap = (nf.c.abs() - spec.eps()).abs();
        if gap <= tol {
            DomainLabel::NearDiscriminant
        } else if nf.c.abs() < spec.eps() {
            DomainLabel::Both4
        } else {
            DomainLabel::Outside1
        }
    } else {
        classify(nf.a, nf.c, spec, tol)
    }
}

/// Reduce, then classify.
pub fn classify_hyperplane(h: &Hyperplane, spec: &BodySpec, tol: f64) -> DomainLabel {
    classify_normal_form(&reduce_to_normal_form(h), spec, tol)
}
