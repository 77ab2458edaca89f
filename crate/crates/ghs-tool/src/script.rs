//! Move scripts: one weak reduction per line, in the form printed by
//! `WeakReductionMove`'s `Display`:
//!
//! ```text
//! move 0 below ns above sep:1:2 joint 2@0:B:+,0
//! move 1 below ns,ns@1 above ns joint 1 remove lower
//! ```
//!
//! Disks are `ns` or `sep:a:b`, optionally `@k` for the component index
//! they meet (default 0). Joint components are a genus, optionally placed as
//! `@edge:A|B:sign`; `-` is the empty surface. A trailing `remove upper` or
//! `remove lower` picks the thick level dropped by a product move.

use std::fmt;

use ghs_core::ghs::{ghs_genus, Ghs, GhsError, ThickId};
use ghs_core::manifold::{DecompositionGraph, EdgeId};
use ghs_core::rewrite::{
    apply_weak_reduction_traced, is_destabilization, ApplyOptions, ProductChoice, RewriteError,
    WeakReductionMove,
};
use ghs_core::surface::{CompressionKind, CompressionSpec};
use ghs_core::{Location, SurfaceComponent, SymbolicSurface};

use crate::scenario::{parse_end, parse_sign, records, Fields, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub line: usize,
    pub mv: WeakReductionMove,
    pub options: ApplyOptions,
}

pub fn parse_move(line: usize, text: &str) -> Result<Step, ParseError> {
    let mut f = Fields::new(line, text);
    f.keyword("move")?;
    let thick = ThickId(f.parse("thick id")?);
    f.keyword("below")?;
    let t = f.next("disks below")?;
    let disk_below = parse_disks(&f, t)?;
    f.keyword("above")?;
    let t = f.next("disks above")?;
    let disk_above = parse_disks(&f, t)?;
    f.keyword("joint")?;
    let t = f.next("joint outcome")?;
    let joint_outcome = parse_joint(&f, t)?;
    let mut options = ApplyOptions::default();
    if f.peek().is_some() {
        f.keyword("remove")?;
        options.product_choice = match f.next("upper or lower")? {
            "upper" => ProductChoice::RemoveUpper,
            "lower" => ProductChoice::RemoveLower,
            t => return Err(f.err(format!("expected upper or lower, found `{}`", t))),
        };
    }
    f.done()?;
    Ok(Step {
        line,
        mv: WeakReductionMove {
            thick,
            disk_below,
            disk_above,
            joint_outcome,
            cleanup: Vec::new(),
        },
        options,
    })
}

fn parse_disks(f: &Fields<'_>, t: &str) -> Result<Vec<CompressionSpec>, ParseError> {
    t.split(',').map(|d| parse_disk(f, d)).collect()
}

fn parse_disk(f: &Fields<'_>, t: &str) -> Result<CompressionSpec, ParseError> {
    let bad = || f.err(format!("bad disk `{}`", t));
    let (kind, target) = match t.split_once('@') {
        Some((k, n)) => (k, n.parse().map_err(|_| bad())?),
        None => (t, 0),
    };
    let kind = match kind.split(':').collect::<Vec<_>>().as_slice() {
        ["ns"] => CompressionKind::NonSeparating,
        ["sep", a, b] => CompressionKind::Separating(
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    };
    Ok(CompressionSpec { target, kind })
}

fn parse_joint(f: &Fields<'_>, t: &str) -> Result<SymbolicSurface, ParseError> {
    if t == "-" {
        return Ok(SymbolicSurface::empty());
    }
    let mut out = Vec::new();
    for c in t.split(',') {
        let bad = || f.err(format!("bad joint component `{}`", c));
        let comp = match c.split_once('@') {
            None => SurfaceComponent::interior(c.parse().map_err(|_| bad())?),
            Some((g, place)) => {
                let genus = g.parse().map_err(|_| bad())?;
                let parts: Vec<&str> = place.split(':').collect();
                let [edge, near, sign] = parts.as_slice() else {
                    return Err(bad());
                };
                let edge = EdgeId(edge.parse().map_err(|_| bad())?);
                let near = parse_end(f, near)?;
                let sign = parse_sign(f, sign)?;
                SurfaceComponent::new(genus, sign, Location::EdgeCopy { edge, near })
            }
        };
        out.push(comp);
    }
    Ok(SymbolicSurface::new(out))
}

/// Outcome of one replayed move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    /// 1-based position in the script.
    pub index: usize,
    pub destabilizing: bool,
    pub before: u32,
    pub after: u32,
    pub cleanup_steps: usize,
}

impl StepReport {
    /// Non-destabilizing moves keep the genus; destabilizing ones lower it.
    pub fn genus_law_holds(&self) -> bool {
        if self.destabilizing {
            self.after < self.before
        } else {
            self.after == self.before
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    Parse { index: usize, error: ParseError },
    Apply { index: usize, error: RewriteError },
    Genus { index: usize, error: GhsError },
}

impl ReplayError {
    pub fn index(&self) -> usize {
        match self {
            ReplayError::Parse { index, .. }
            | ReplayError::Apply { index, .. }
            | ReplayError::Genus { index, .. } => *index,
        }
    }
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::Parse { index, error } => write!(f, "move {}: {}", index, error),
            ReplayError::Apply { index, error } => write!(f, "move {}: {}", index, error),
            ReplayError::Genus { index, error } => write!(f, "move {}: {}", index, error),
        }
    }
}

impl std::error::Error for ReplayError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub ghs: Ghs,
    pub steps: Vec<StepReport>,
    /// The first failure; `ghs` is the state just before it.
    pub error: Option<ReplayError>,
}

/// Apply every move of `script` in turn, stopping at the first failure.
pub fn replay(m: &DecompositionGraph, h: &Ghs, script: &str) -> Replay {
    let mut cur = h.clone();
    let mut steps = Vec::new();
    for (i, (line, text)) in records(script).enumerate() {
        let index = i + 1;
        let fail = |cur: Ghs, steps: Vec<StepReport>, error| Replay {
            ghs: cur,
            steps,
            error: Some(error),
        };
        let step = match parse_move(line, text) {
            Ok(s) => s,
            Err(error) => return fail(cur, steps, ReplayError::Parse { index, error }),
        };
        let before = match ghs_genus(m, &cur) {
            Ok(g) => g,
            Err(error) => return fail(cur, steps, ReplayError::Genus { index, error }),
        };
        let applied = match apply_weak_reduction_traced(m, &cur, &step.mv, step.options) {
            Ok(a) => a,
            Err(error) => return fail(cur, steps, ReplayError::Apply { index, error }),
        };
        let after = match ghs_genus(m, &applied.ghs) {
            Ok(g) => g,
            Err(error) => return fail(cur, steps, ReplayError::Genus { index, error }),
        };
        steps.push(StepReport {
            index,
            destabilizing: is_destabilization(&step.mv),
            before,
            after,
            cleanup_steps: applied.cleanup.len(),
        });
        cur = applied.ghs;
    }
    Replay {
        ghs: cur,
        steps,
        error: None,
    }
}
