//! Symbolic surfaces and the Euler characteristic bookkeeping of compression.
//!
//! A [`SymbolicSurface`] stands in for an isotopy class of closed, orientable,
//! possibly disconnected surface. Only the genus, transverse orientation and
//! location of each component are kept; components are stored sorted so that
//! equality is multiset equality.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Neg;

use crate::manifold::{EdgeId, End};

/// Transverse orientation relative to a reference side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Where a surface component sits in the ambient decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    /// Inside a region, not tied to any gluing surface.
    Interior,
    /// A parallel copy of the surface carried by `edge`, inserted next to
    /// the copies nearest `near`.
    EdgeCopy { edge: EdgeId, near: End },
    /// A component of the ambient boundary. Never compressed.
    AmbientBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceComponent {
    pub genus: u32,
    pub orientation: Sign,
    pub location: Location,
}

impl SurfaceComponent {
    pub fn new(genus: u32, orientation: Sign, location: Location) -> Self {
        Self {
            genus,
            orientation,
            location,
        }
    }

    pub fn interior(genus: u32) -> Self {
        Self::new(genus, Sign::Plus, Location::Interior)
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * i64::from(self.genus)
    }

    pub fn is_sphere(&self) -> bool {
        self.genus == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicSurface {
    components: Vec<SurfaceComponent>,
}

impl SymbolicSurface {
    pub fn new(mut components: Vec<SurfaceComponent>) -> Self {
        components.sort();
        Self { components }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Connected surface of the given genus in the interior.
    pub fn connected(genus: u32) -> Self {
        Self::new(alloc::vec![SurfaceComponent::interior(genus)])
    }

    /// Interior components with the given genera.
    pub fn from_genera(genera: &[u32]) -> Self {
        Self::new(
            genera
                .iter()
                .map(|&g| SurfaceComponent::interior(g))
                .collect(),
        )
    }

    pub fn components(&self) -> &[SurfaceComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sorted list of component genera.
    pub fn genera(&self) -> Vec<u32> {
        let mut g: Vec<u32> = self.components.iter().map(|c| c.genus).collect();
        g.sort_unstable();
        g
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components
            .iter()
            .map(SurfaceComponent::euler_characteristic)
            .sum()
    }

    pub fn total_genus(&self) -> u64 {
        self.components.iter().map(|c| u64::from(c.genus)).sum()
    }

    pub fn contains_sphere(&self) -> bool {
        self.components.iter().any(SurfaceComponent::is_sphere)
    }

    pub fn with_location(&self, location: Location) -> Self {
        Self::new(
            self.components
                .iter()
                .map(|c| SurfaceComponent { location, ..*c })
                .collect(),
        )
    }

    /// Compress one component along a disk.
    ///
    /// A non-separating compression lowers the target's genus by one; a
    /// separating one splits it into two components of genera `a` and `b`
    /// that inherit orientation and location. Either way the Euler
    /// characteristic goes up by exactly two.
    pub fn compress(&self, spec: &CompressionSpec) -> Result<Self, SurfaceError> {
        let target = *self
            .components
            .get(spec.target)
            .ok_or(SurfaceError::MissingComponent(spec.target))?;
        if target.location == Location::AmbientBoundary {
            return Err(SurfaceError::BoundaryComponent(spec.target));
        }
        spec.kind.check(target.genus)?;
        let mut out: Vec<SurfaceComponent> = Vec::with_capacity(self.components.len() + 1);
        for (i, c) in self.components.iter().enumerate() {
            if i != spec.target {
                out.push(*c);
            }
        }
        match spec.kind {
            CompressionKind::NonSeparating => out.push(SurfaceComponent {
                genus: target.genus - 1,
                ..target
            }),
            CompressionKind::Separating(a, b) => {
                out.push(SurfaceComponent { genus: a, ..target });
                out.push(SurfaceComponent { genus: b, ..target });
            }
        }
        Ok(Self::new(out))
    }

    /// Every surface obtainable by one compression of one component, with
    /// all compression kinds the genus allows (including separating curves
    /// that cut off a sphere).
    pub fn one_step(&self) -> BTreeSet<SymbolicSurface> {
        let mut out = BTreeSet::new();
        for (i, c) in self.components.iter().enumerate() {
            if c.location == Location::AmbientBoundary {
                continue;
            }
            for kind in CompressionKind::all_for(c.genus, true) {
                if let Ok(s) = self.compress(&CompressionSpec { target: i, kind }) {
                    out.insert(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for SymbolicSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "g={}", c.genus)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompressionKind {
    NonSeparating,
    Separating(u32, u32),
}

impl CompressionKind {
    fn check(self, genus: u32) -> Result<(), SurfaceError> {
        match self {
            CompressionKind::NonSeparating if genus == 0 => Err(SurfaceError::InvalidSpec(
                "non-separating compression of a sphere",
            )),
            CompressionKind::Separating(a, b) if a + b != genus => Err(SurfaceError::InvalidSpec(
                "separating genera do not sum to the target genus",
            )),
            _ => Ok(()),
        }
    }

    /// Compression kinds on a genus `genus` component, `Separating(a, b)`
    /// listed once with `a <= b`. With `allow_trivial` the separating curve
    /// may cut off a sphere (`a == 0`), which only happens for a curve that
    /// is no longer essential after an earlier surgery.
    pub fn all_for(genus: u32, allow_trivial: bool) -> Vec<CompressionKind> {
        let mut out = Vec::new();
        if genus >= 1 {
            out.push(CompressionKind::NonSeparating);
        }
        let start = if allow_trivial { 0 } else { 1 };
        let mut a = start;
        while a <= genus / 2 {
            out.push(CompressionKind::Separating(a, genus - a));
            a += 1;
        }
        out
    }

    pub fn is_separating(self) -> bool {
        matches!(self, CompressionKind::Separating(..))
    }
}

impl fmt::Display for CompressionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompressionKind::NonSeparating => f.write_str("ns"),
            CompressionKind::Separating(a, b) => write!(f, "sep:{}:{}", a, b),
        }
    }
}

/// A compression disk, given by the index of the component it meets and the
/// way its boundary sits on that component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompressionSpec {
    pub target: usize,
    pub kind: CompressionKind,
}

impl CompressionSpec {
    pub fn non_separating(target: usize) -> Self {
        Self {
            target,
            kind: CompressionKind::NonSeparating,
        }
    }

    pub fn separating(target: usize, a: u32, b: u32) -> Self {
        Self {
            target,
            kind: CompressionKind::Separating(a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceError {
    MissingComponent(usize),
    InvalidSpec(&'static str),
    BoundaryComponent(usize),
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceError::MissingComponent(i) => write!(f, "no surface component at index {}", i),
            SurfaceError::InvalidSpec(why) => write!(f, "invalid compression: {}", why),
            SurfaceError::BoundaryComponent(i) => {
                write!(f, "component {} lies on the ambient boundary", i)
            }
        }
    }
}
