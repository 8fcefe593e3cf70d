use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::LatticePoint;
use super::set::{BBox, DiscreteSet};
use crate::error::{Error, Result};

/// Closed coordinate rectangle `[a1, b1] x [a2, b2]` with all four vertices in `(2Z)^2`.
/// Degenerate (segment or single-site) rectangles are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub a1: i64,
    pub b1: i64,
    pub a2: i64,
    pub b2: i64,
}

impl Rect {
    pub fn new(a1: i64, b1: i64, a2: i64, b2: i64) -> Result<Self> {
        let even = [a1, b1, a2, b2].iter().all(|v| v.rem_euclid(2) == 0);
        if !even || a1 > b1 || a2 > b2 {
            return Err(Error::InvalidParams(format!(
                "rectangle [{a1}, {b1}] x [{a2}, {b2}] needs even, ordered bounds"
            )));
        }
        Ok(Self { a1, b1, a2, b2 })
    }

    /// `[0, n1] x [0, n2]`.
    pub fn origin(n1: i64, n2: i64) -> Result<Self> {
        Self::new(0, n1, 0, n2)
    }

    /// Horizontal index extent `b1 - a1`.
    pub fn n1(&self) -> i64 {
        self.b1 - self.a1
    }

    /// Vertical index extent `b2 - a2`.
    pub fn n2(&self) -> i64 {
        self.b2 - self.a2
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(self.a1, self.b1, self.a2, self.b2)
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.bbox().contains(p)
    }

    pub fn area(&self) -> usize {
        self.bbox().area()
    }

    pub fn to_set(&self) -> DiscreteSet {
        DiscreteSet::rect(self.a1, self.b1, self.a2, self.b2)
    }

    pub fn is_subset(&self, other: &Rect) -> bool {
        other.a1 <= self.a1 && self.b1 <= other.b1 && other.a2 <= self.a2 && self.b2 <= other.b2
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.a1, self.b1, self.a2, self.b2)
    }
}

/// A set stored as bulky rectangle plus weak islands. Islands lie in `(2Z)^2` and outside
/// the rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectState {
    pub rect: Option<Rect>,
    pub islands: DiscreteSet,
}

impl RectState {
    /// Drops island sites covered by the rectangle and rejects odd ones.
    pub fn new(rect: Option<Rect>, islands: DiscreteSet) -> Result<Self> {
        if let Some(p) = islands.iter().find(|p| !p.is_even_site()) {
            return Err(Error::InvalidParams(format!("island site {p} is not in (2Z)^2")));
        }
        let islands = match rect {
            Some(r) => islands.filter(|p| !r.contains(p)),
            None => islands,
        };
        Ok(Self { rect, islands })
    }

    pub fn from_rect(rect: Rect) -> Self {
        Self { rect: Some(rect), islands: DiscreteSet::new() }
    }

    /// The set `rect ∪ islands`.
    pub fn materialize(&self) -> DiscreteSet {
        match self.rect {
            Some(r) => r.to_set().union(&self.islands),
            None => self.islands.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.rect.map_or(0, |r| r.area()) + self.islands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Why a set is not of the form rectangle plus weak islands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureViolation {
    pub witness: LatticePoint,
    pub reason: String,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site {}: {}", self.witness, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decomposition {
    Structured(RectState),
    Violation(StructureViolation),
}

impl Decomposition {
    pub fn is_structured(&self) -> bool {
        matches!(self, Decomposition::Structured(_))
    }
}

fn even_floor(v: i64) -> i64 {
    v - v.rem_euclid(2)
}

fn even_ceil(v: i64) -> i64 {
    v + v.rem_euclid(2)
}

/// Splits `set` into the even-vertex rectangle spanned by its sites outside `(2Z)^2` and
/// the remaining weak sites. The rectangle is the smallest even-vertex box containing every
/// odd-type site; it is unique because any larger one would contain further odd-type sites.
/// A set made only of weak sites decomposes with an empty rectangle.
pub fn decompose(set: &DiscreteSet) -> Decomposition {
    let mut odd = set.iter().filter(|p| !p.is_even_site());
    let Some(first) = odd.next() else {
        return Decomposition::Structured(RectState { rect: None, islands: set.clone() });
    };
    let span = odd.fold(BBox::of_point(first), |b, p| b.include(p));
    let rect = Rect {
        a1: even_floor(span.min1),
        b1: even_ceil(span.max1),
        a2: even_floor(span.min2),
        b2: even_ceil(span.max2),
    };
    if let Some(missing) = rect.bbox().points().find(|&p| !set.contains(p)) {
        return Decomposition::Violation(StructureViolation {
            witness: first,
            reason: format!("rectangle {rect} spanned by non-weak sites misses {missing}"),
        });
    }
    let islands = set.filter(|p| !rect.contains(p));
    debug_assert!(islands.iter().all(|p| p.is_even_site()));
    Decomposition::Structured(RectState { rect: Some(rect), islands })
}
