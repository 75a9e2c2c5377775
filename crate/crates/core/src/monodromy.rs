//! The combinatorial monodromy representation: a Klein four-group acting on
//! the four thimble labels, and the leaf algebra connecting label subsets to
//! measurable volumes.
//!
//! Loops in the space of generic hyperplanes are specified by their linking
//! numbers with the two asymptotic discriminant strata; only the parities
//! matter. The generators are
//!
//! * g₁ = (L− L+)(R− R+) — realizable inside the reduced plane family,
//! * g₂ = (L− R+)(L+ R−) — the loop that exchanges the circle pairs,
//!
//! and their product g₁g₂ = (L− R−)(L+ R+).
//!
//! A volume leaf is a subset of labels; its value is the sum of the thimble
//! integrals, and its complement carries C₀ minus that value. The `Leq` part
//! of a cut collects exactly the labels whose tangency offset lies below c.

use serde::{Deserialize, Serialize};

use crate::body::Side;
use crate::classify::{CriticalOffsets, DomainLabel, ThimbleLabel};
use crate::error::{Error, Result};

/// A permutation of the four thimble labels, stored as images indexed by
/// [`ThimbleLabel::index`]. Every element of the monodromy image is the
/// identity or an involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm4 {
    images: [ThimbleLabel; 4],
}

impl Perm4 {
    pub fn identity() -> Perm4 {
        Perm4 {
            images: ThimbleLabel::ALL,
        }
    }

    /// Build from images in label-index order; must be a bijection.
    pub fn new(images: [ThimbleLabel; 4]) -> Result<Perm4> {
        let mut seen = [false; 4];
        for l in images {
            if seen[l.index()] {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation: label {l} repeats"
                )));
            }
            seen[l.index()] = true;
        }
        Ok(Perm4 { images })
    }

    pub fn apply(&self, label: ThimbleLabel) -> ThimbleLabel {
        self.images[label.index()]
    }

    /// Apply `other` first, then `self`.
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        let mut images = ThimbleLabel::ALL;
        for (i, slot) in images.iter_mut().enumerate() {
            *slot = self.apply(other.apply(ThimbleLabel::from_index(i)));
        }
        Perm4 { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images == ThimbleLabel::ALL
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).is_identity()
    }
}

impl std::fmt::Display for Perm4 {
    /// Cycle notation, e.g. `(L-L+)(R-R+)`; the identity prints as `id`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let mut visited = [false; 4];
        for start in 0..4 {
            if visited[start] || self.images[start].index() == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            loop {
                visited[i] = true;
                write!(f, "{}", ThimbleLabel::from_index(i))?;
                i = self.images[i].index();
                if i == start {
                    break;
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A loop specified by its linking numbers with the two asymptotic strata.
/// Only parities matter for the image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub lk3: i64,
    pub lk4: i64,
}

/// Generator realizable inside the reduced-plane family: swaps within each
/// circle pair.
pub fn gen_reduced() -> Perm4 {
    Perm4 {
        images: [
            ThimbleLabel::LPlus,
            ThimbleLabel::LMinus,
            ThimbleLabel::RPlus,
            ThimbleLabel::RMinus,
        ],
    }
}

/// Generator with linking numbers (1, 1): exchanges the circle pairs,
/// reversing the value order.
pub fn gen_cross() -> Perm4 {
    Perm4 {
        images: [
            ThimbleLabel::RPlus,
            ThimbleLabel::RMinus,
            ThimbleLabel::LPlus,
            ThimbleLabel::LMinus,
        ],
    }
}

/// The homomorphism Z² → Klein four-group: (1,0) ↦ g₁, (1,1) ↦ g₂, hence
/// (0,1) ↦ g₁g₂.
pub fn loop_to_perm(lp: LoopSpec) -> Perm4 {
    let g1 = gen_reduced();
    let g3 = g1.compose(&gen_cross()); // image of (0, 1)
    let mut out = Perm4::identity();
    if lp.lk3.rem_euclid(2) == 1 {
        out = out.compose(&g1);
    }
    if lp.lk4.rem_euclid(2) == 1 {
        out = out.compose(&g3);
    }
    out
}

/// The full monodromy image: identity, g₁, g₂ and g₁g₂.
pub fn group_closure() -> Vec<Perm4> {
    let g1 = gen_reduced();
    let g2 = gen_cross();
    vec![Perm4::identity(), g1, g2, g1.compose(&g2)]
}

/// Orbit of a label under a generating set.
pub fn orbit(generators: &[Perm4], start: ThimbleLabel) -> Vec<ThimbleLabel> {
    let mut in_orbit = [false; 4];
    in_orbit[start.index()] = true;
    let mut frontier = vec![start];
    while let Some(l) = frontier.pop() {
        for g in generators {
            let image = g.apply(l);
            if !in_orbit[image.index()] {
                in_orbit[image.index()] = true;
                frontier.push(image);
            }
        }
    }
    ThimbleLabel::ALL
        .into_iter()
        .filter(|l| in_orbit[l.index()])
        .collect()
}

/// A subset of thimble labels denoting one leaf of the volume function; the
/// leaf value is the sum of the member integrals, and the complementary
/// subset carries C₀ minus that value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ThimbleLabel>", into = "Vec<ThimbleLabel>")]
pub struct LeafSet {
    bits: u8,
}

impl LeafSet {
    pub const EMPTY: LeafSet = LeafSet { bits: 0 };
    pub const FULL: LeafSet = LeafSet { bits: 0b1111 };

    pub fn from_labels<I: IntoIterator<Item = ThimbleLabel>>(labels: I) -> LeafSet {
        let mut bits = 0u8;
        for l in labels {
            bits |= 1 << l.index();
        }
        LeafSet { bits }
    }

    pub fn contains(&self, label: ThimbleLabel) -> bool {
        self.bits & (1 << label.index()) != 0
    }

    pub fn complement(&self) -> LeafSet {
        LeafSet {
            bits: !self.bits & 0b1111,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn labels(&self) -> Vec<ThimbleLabel> {
        ThimbleLabel::ALL
            .into_iter()
            .filter(|l| self.contains(*l))
            .collect()
    }

    /// Image under a permutation.
    pub fn map(&self, perm: &Perm4) -> LeafSet {
        LeafSet::from_labels(self.labels().into_iter().map(|l| perm.apply(l)))
    }
}

impl From<LeafSet> for Vec<ThimbleLabel> {
    fn from(s: LeafSet) -> Self {
        s.labels()
    }
}

impl TryFrom<Vec<ThimbleLabel>> for LeafSet {
    type Error = Error;
    fn try_from(v: Vec<ThimbleLabel>) -> Result<Self> {
        Ok(LeafSet::from_labels(v))
    }
}

impl std::fmt::Debug for LeafSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LeafSet{{{self}}}")
    }
}

impl std::fmt::Display for LeafSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for l in self.labels() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

impl std::str::FromStr for LeafSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut set = LeafSet::EMPTY;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            set = LeafSet::from_labels(
                set.labels().into_iter().chain([part.parse::<ThimbleLabel>()?]),
            );
        }
        Ok(set)
    }
}

/// The leaf measured by a cut: the `Leq` part collects the labels with
/// tangency offset below c, the `Geq` part their complement.
///
/// `label` must agree with the geometry of `(offsets, c)`; tangent planes are
/// refused. The expected leaves by domain (leq side) are 2l → {L−},
/// 3 → {L−, L+}, 2r → {L−, L+, R−}, 4 → {L−, R−}; Outside1 gives the empty or
/// the full set depending on which side of the body c lies.
pub fn leaf_of_domain(
    label: DomainLabel,
    side: Side,
    offsets: &CriticalOffsets,
    c: f64,
) -> Result<LeafSet> {
    if label == DomainLabel::NearDiscriminant {
        return Err(Error::LeafUndefined(label));
    }
    let below = LeafSet::from_labels(
        offsets
            .offsets
            .iter()
            .zip(offsets.labels)
            .filter(|(off, _)| **off < c)
            .map(|(_, l)| l),
    );
    let consistent = match label {
        DomainLabel::LeftOnly2l => below == LeafSet::from_labels([ThimbleLabel::LMinus]),
        DomainLabel::Separating3 => {
            below == LeafSet::from_labels([ThimbleLabel::LMinus, ThimbleLabel::LPlus])
        }
        DomainLabel::RightOnly2r => {
            below
                == LeafSet::from_labels([
                    ThimbleLabel::LMinus,
                    ThimbleLabel::LPlus,
                    ThimbleLabel::RMinus,
                ])
        }
        DomainLabel::Both4 => {
            below == LeafSet::from_labels([ThimbleLabel::LMinus, ThimbleLabel::RMinus])
        }
        DomainLabel::Outside1 => below == LeafSet::EMPTY || below == LeafSet::FULL,
        DomainLabel::NearDiscriminant => unreachable!(),
    };
    if !consistent {
        return Err(Error::LeafDomainMismatch {
            label,
            got: below.len(),
        });
    }
    Ok(match side {
        Side::Leq => below,
        Side::Geq => below.complement(),
    })
}

/// Transport a leaf along a loop.
pub fn transport_leaf(leaf: LeafSet, lp: LoopSpec) -> LeafSet {
    leaf.map(&loop_to_perm(lp))
}

/// Whether some element of the full monodromy image maps one leaf onto the
/// other.
pub fn leaves_connected(a: LeafSet, b: LeafSet) -> bool {
    group_closure().iter().any(|g| a.map(g) == b)
}
