use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::LatticePoint;
use crate::error::{Error, Result};

/// Closed coordinate box `[min1, max1] x [min2, max2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub min1: i64,
    pub max1: i64,
    pub min2: i64,
    pub max2: i64,
}

impl BBox {
    pub fn new(min1: i64, max1: i64, min2: i64, max2: i64) -> Self {
        debug_assert!(min1 <= max1 && min2 <= max2);
        Self { min1, max1, min2, max2 }
    }

    pub fn of_point(p: LatticePoint) -> Self {
        Self::new(p.i1, p.i1, p.i2, p.i2)
    }

    /// Number of columns.
    pub fn width(&self) -> usize {
        (self.max1 - self.min1 + 1) as usize
    }

    /// Number of rows.
    pub fn height(&self) -> usize {
        (self.max2 - self.min2 + 1) as usize
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        (self.min1..=self.max1).contains(&p.i1) && (self.min2..=self.max2).contains(&p.i2)
    }

    pub fn include(&self, p: LatticePoint) -> Self {
        Self::new(
            self.min1.min(p.i1),
            self.max1.max(p.i1),
            self.min2.min(p.i2),
            self.max2.max(p.i2),
        )
    }

    pub fn union(&self, other: &BBox) -> Self {
        Self::new(
            self.min1.min(other.min1),
            self.max1.max(other.max1),
            self.min2.min(other.min2),
            self.max2.max(other.max2),
        )
    }

    pub fn expand(&self, r: i64) -> Self {
        Self::new(self.min1 - r, self.max1 + r, self.min2 - r, self.max2 + r)
    }

    /// Column-major position of `p`; `p` must lie in the box.
    #[inline]
    pub fn index(&self, p: LatticePoint) -> usize {
        (p.i1 - self.min1) as usize * self.height() + (p.i2 - self.min2) as usize
    }

    #[inline]
    pub fn point(&self, idx: usize) -> LatticePoint {
        let h = self.height();
        LatticePoint::new(self.min1 + (idx / h) as i64, self.min2 + (idx % h) as i64)
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (self.min1..=self.max1)
            .flat_map(move |i1| (self.min2..=self.max2).map(move |i2| LatticePoint::new(i1, i2)))
    }
}

/// A finite set of lattice sites, stored as a dense occupancy grid over its tight bounding box.
///
/// The box is always tight (or absent for the empty set), so structural equality is set
/// equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiscreteSet {
    bbox: Option<BBox>,
    cells: Vec<bool>,
    len: usize,
}

impl DiscreteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sites<I: IntoIterator<Item = LatticePoint>>(sites: I) -> Self {
        let sites: Vec<LatticePoint> = sites.into_iter().collect();
        let Some(first) = sites.first() else {
            return Self::new();
        };
        let bbox = sites.iter().fold(BBox::of_point(*first), |b, &p| b.include(p));
        let mut cells = vec![false; bbox.area()];
        let mut len = 0;
        for p in sites {
            let idx = bbox.index(p);
            if !cells[idx] {
                cells[idx] = true;
                len += 1;
            }
        }
        Self { bbox: Some(bbox), cells, len }
    }

    /// All sites of the closed rectangle `[a1, b1] x [a2, b2]`; empty if the bounds cross.
    pub fn rect(a1: i64, b1: i64, a2: i64, b2: i64) -> Self {
        if a1 > b1 || a2 > b2 {
            return Self::new();
        }
        let bbox = BBox::new(a1, b1, a2, b2);
        Self {
            bbox: Some(bbox),
            cells: vec![true; bbox.area()],
            len: bbox.area(),
        }
    }

    /// Sites of `region` satisfying `keep`.
    pub fn from_predicate(region: BBox, mut keep: impl FnMut(LatticePoint) -> bool) -> Self {
        let mut cells = vec![false; region.area()];
        let mut len = 0;
        for (idx, cell) in cells.iter_mut().enumerate() {
            if keep(region.point(idx)) {
                *cell = true;
                len += 1;
            }
        }
        Self { bbox: Some(region), cells, len }.tightened()
    }

    fn tightened(self) -> Self {
        let Some(bbox) = self.bbox else { return self };
        if self.len == 0 {
            return Self::new();
        }
        let mut tight: Option<BBox> = None;
        for (idx, &c) in self.cells.iter().enumerate() {
            if c {
                let p = bbox.point(idx);
                tight = Some(tight.map_or(BBox::of_point(p), |b| b.include(p)));
            }
        }
        let tight = tight.expect("nonempty");
        if tight == bbox {
            return self;
        }
        let mut cells = vec![false; tight.area()];
        for (idx, &c) in self.cells.iter().enumerate() {
            if c {
                cells[tight.index(bbox.point(idx))] = true;
            }
        }
        Self { bbox: Some(tight), cells, len: self.len }
    }

    #[inline]
    pub fn contains(&self, p: LatticePoint) -> bool {
        match &self.bbox {
            Some(b) if b.contains(p) => self.cells[b.index(p)],
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.bbox
    }

    /// Sites in lexicographic `(i1, i2)` order.
    pub fn iter(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let bbox = self.bbox;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(idx, _)| bbox.expect("occupied cell implies a box").point(idx))
    }

    pub fn to_vec(&self) -> Vec<LatticePoint> {
        self.iter().collect()
    }

    pub fn union(&self, other: &DiscreteSet) -> DiscreteSet {
        match (self.bbox, other.bbox) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => {
                DiscreteSet::from_predicate(a.union(&b), |p| self.contains(p) || other.contains(p))
            }
        }
    }

    pub fn difference(&self, other: &DiscreteSet) -> DiscreteSet {
        match self.bbox {
            None => DiscreteSet::new(),
            Some(a) => DiscreteSet::from_predicate(a, |p| self.contains(p) && !other.contains(p)),
        }
    }

    pub fn intersection(&self, other: &DiscreteSet) -> DiscreteSet {
        match self.bbox {
            None => DiscreteSet::new(),
            Some(a) => DiscreteSet::from_predicate(a, |p| self.contains(p) && other.contains(p)),
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(LatticePoint) -> bool) -> DiscreteSet {
        match self.bbox {
            None => DiscreteSet::new(),
            Some(a) => DiscreteSet::from_predicate(a, |p| self.contains(p) && keep(p)),
        }
    }

    pub fn is_subset(&self, other: &DiscreteSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn translate(&self, d1: i64, d2: i64) -> DiscreteSet {
        match self.bbox {
            None => DiscreteSet::new(),
            Some(b) => DiscreteSet {
                bbox: Some(BBox::new(b.min1 + d1, b.max1 + d1, b.min2 + d2, b.max2 + d2)),
                cells: self.cells.clone(),
                len: self.len,
            },
        }
    }

    /// Plain-text form: one `i1 i2` line per site.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len * 8);
        for p in self.iter() {
            out.push_str(&format!("{} {}\n", p.i1, p.i2));
        }
        out
    }

    /// Parses the plain-text form. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<DiscreteSet> {
        let mut sites = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<i64> {
                s.and_then(|v| v.parse().ok()).ok_or_else(|| {
                    Error::MalformedSites(format!("line {}: `{}`", lineno + 1, line))
                })
            };
            let i1 = parse(parts.next())?;
            let i2 = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::MalformedSites(format!(
                    "line {}: trailing tokens in `{}`",
                    lineno + 1,
                    line
                )));
            }
            sites.push(LatticePoint::new(i1, i2));
        }
        Ok(DiscreteSet::from_sites(sites))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("site lists always serialize")
    }

    pub fn from_json(text: &str) -> Result<DiscreteSet> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Debug for DiscreteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|p| (p.i1, p.i2)))
            .finish()
    }
}

impl FromIterator<LatticePoint> for DiscreteSet {
    fn from_iter<T: IntoIterator<Item = LatticePoint>>(iter: T) -> Self {
        DiscreteSet::from_sites(iter)
    }
}

#[derive(Serialize, Deserialize)]
struct SitesJson {
    sites: Vec<[i64; 2]>,
}

impl Serialize for DiscreteSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SitesJson {
            sites: self.iter().map(|p| [p.i1, p.i2]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SitesJson::deserialize(deserializer)?;
        Ok(DiscreteSet::from_sites(
            raw.sites.into_iter().map(|[a, b]| LatticePoint::new(a, b)),
        ))
    }
}
