//! Weak reduction of a GHS along a pair of disjoint compressing disk sets,
//! followed by cleanup to exhaustion.
//!
//! A move names a thick level `G+`, a disk set `D` below it and `E` above it,
//! and the joint outcome `G+/DE` with the location of each component. The
//! two single surgeries `G+/D`, `G+/E` become thick levels and the joint
//! outcome becomes thin. Cleanup then removes
//!
//! 1. sphere components of the joint outcome,
//! 2. thick levels parallel to a boundary copy, with the copy next to them,
//! 3. thick levels cobounding a product with a thin level of equal genus,
//!    with that thin level.
//!
//! Disks on one side must leave the thick level connected: a separating
//! first compression is accepted as a move but is not representable here.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ghs::{
    canonical_key, validate_ghs, CanonicalKey, Fragment, Ghs, GhsError, Layout, ThickFlags,
    ThickId, ThickLevel, ThinId, ThinLevel,
};
use crate::manifold::{DecompositionGraph, EdgeId, End, Endpoint, Side};
use crate::surface::{
    CompressionKind, CompressionSpec, Location, Sign, SurfaceComponent, SymbolicSurface,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeakReductionMove {
    pub thick: ThickId,
    /// Disks below the thick level, applied in order.
    pub disk_below: Vec<CompressionSpec>,
    /// Disks above the thick level, applied in order.
    pub disk_above: Vec<CompressionSpec>,
    /// The declared `G+/DE`; component locations say where each component
    /// ends up and component orientations give the new thin level's sign.
    pub joint_outcome: SymbolicSurface,
    pub cleanup: Vec<CleanupStep>,
}

impl WeakReductionMove {
    /// Single-disk move with a connected placed joint outcome.
    pub fn simple(
        thick: ThickId,
        below: CompressionSpec,
        above: CompressionSpec,
        joint: SymbolicSurface,
    ) -> Self {
        Self {
            thick,
            disk_below: vec![below],
            disk_above: vec![above],
            joint_outcome: joint,
            cleanup: Vec::new(),
        }
    }
}

impl fmt::Display for WeakReductionMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "move {} below ", self.thick)?;
        write_disks(f, &self.disk_below)?;
        f.write_str(" above ")?;
        write_disks(f, &self.disk_above)?;
        f.write_str(" joint ")?;
        if self.joint_outcome.is_empty() {
            f.write_str("-")?;
        }
        for (i, c) in self.joint_outcome.components().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c.genus)?;
            if let Location::EdgeCopy { edge, near } = c.location {
                let near = if near == End::A { "A" } else { "B" };
                write!(f, "@{}:{}:{}", edge, near, c.orientation)?;
            }
        }
        Ok(())
    }
}

fn write_disks(f: &mut fmt::Formatter<'_>, disks: &[CompressionSpec]) -> fmt::Result {
    for (i, d) in disks.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", d.kind)?;
        if d.target != 0 {
            write!(f, "@{}", d.target)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CleanupKind {
    InessentialSphere,
    BoundaryParallel,
    ProductRegion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelRef {
    Thick(ThickId),
    Thin(ThinId),
    /// A component of the joint outcome, by index.
    Joint(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CleanupStep {
    pub kind: CleanupKind,
    pub removed: Vec<LevelRef>,
    /// Levels whose region swallows the removed ones.
    pub absorbed: Vec<LevelRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteError {
    UnknownThick(ThickId),
    MalformedMove(&'static str),
    CleanupIncomplete,
    InvalidResult(&'static str),
    InvalidGhs(Vec<GhsError>),
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownThick(t) => write!(f, "unknown thick level {}", t),
            Self::MalformedMove(why) => write!(f, "malformed move: {}", why),
            Self::CleanupIncomplete => f.write_str("cleanup left an applicable step"),
            Self::InvalidResult(why) => write!(f, "move does not yield a GHS: {}", why),
            Self::InvalidGhs(errs) => {
                f.write_str("invalid GHS:")?;
                for e in errs {
                    write!(f, " {};", e)?;
                }
                Ok(())
            }
        }
    }
}

/// A move is a destabilization when its joint outcome contains a sphere.
pub fn is_destabilization(mv: &WeakReductionMove) -> bool {
    mv.joint_outcome.contains_sphere()
}

/// Which of the two new thick levels is removed when the joint outcome is
/// a single unplaced surface parallel to both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProductChoice {
    #[default]
    RemoveUpper,
    RemoveLower,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ApplyOptions {
    pub product_choice: ProductChoice,
    /// Skip validating the input; the caller guarantees it.
    pub trusted_input: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub ghs: Ghs,
    pub cleanup: Vec<CleanupStep>,
}

pub fn apply_weak_reduction(
    m: &DecompositionGraph,
    h: &Ghs,
    mv: &WeakReductionMove,
) -> Result<Ghs, RewriteError> {
    apply_weak_reduction_traced(m, h, mv, ApplyOptions::default()).map(|a| a.ghs)
}

fn compress_all(genus: u32, disks: &[CompressionSpec]) -> Result<SymbolicSurface, RewriteError> {
    if disks.is_empty() {
        return Err(RewriteError::MalformedMove("empty disk set"));
    }
    let mut s = SymbolicSurface::connected(genus);
    for d in disks {
        s = s
            .compress(d)
            .map_err(|_| RewriteError::MalformedMove("disk does not fit the thick level"))?;
    }
    Ok(s)
}

/// Genera multisets reachable from `start` by exactly `k` compressions.
fn reach(start: &SymbolicSurface, k: usize) -> BTreeSet<Vec<u32>> {
    let mut layer: BTreeSet<SymbolicSurface> = BTreeSet::new();
    layer.insert(SymbolicSurface::from_genera(&start.genera()));
    for _ in 0..k {
        layer = layer.iter().flat_map(|s| s.one_step()).collect();
    }
    layer.into_iter().map(|s| s.genera()).collect()
}

fn check_joint(
    genus: u32,
    below: &SymbolicSurface,
    above: &SymbolicSurface,
    mv: &WeakReductionMove,
) -> Result<(), RewriteError> {
    let disks = (mv.disk_below.len() + mv.disk_above.len()) as i64;
    let chi = SymbolicSurface::connected(genus).euler_characteristic() + 2 * disks;
    if mv.joint_outcome.euler_characteristic() != chi {
        return Err(RewriteError::MalformedMove(
            "joint outcome has the wrong Euler characteristic",
        ));
    }
    if mv
        .joint_outcome
        .components()
        .iter()
        .any(|c| c.location == Location::AmbientBoundary)
    {
        return Err(RewriteError::MalformedMove(
            "joint outcome cannot lie on the boundary",
        ));
    }
    let joint = mv.joint_outcome.genera();
    if !reach(below, mv.disk_above.len()).contains(&joint)
        || !reach(above, mv.disk_below.len()).contains(&joint)
    {
        return Err(RewriteError::MalformedMove(
            "joint outcome is not reachable from both single surgeries",
        ));
    }
    Ok(())
}

fn next_thick_id(h: &Ghs) -> u32 {
    h.thick.iter().map(|t| t.id.0 + 1).max().unwrap_or(0)
}

fn next_thin_id(h: &Ghs) -> u32 {
    h.thin.iter().map(|t| t.id.0 + 1).max().unwrap_or(0)
}

/// Apply a move and report the cleanup steps taken.
pub fn apply_weak_reduction_traced(
    m: &DecompositionGraph,
    h: &Ghs,
    mv: &WeakReductionMove,
    opts: ApplyOptions,
) -> Result<Applied, RewriteError> {
    if !opts.trusted_input {
        validate_ghs(m, h).map_err(RewriteError::InvalidGhs)?;
    }
    let ti = h
        .thick
        .iter()
        .position(|t| t.id == mv.thick)
        .ok_or(RewriteError::UnknownThick(mv.thick))?;
    let genus = h.thick[ti].genus;
    let below = compress_all(genus, &mv.disk_below)?;
    let above = compress_all(genus, &mv.disk_above)?;
    check_joint(genus, &below, &above, mv)?;
    let layout = Layout::new(m, h).map_err(RewriteError::InvalidGhs)?;
    let region = layout.thick_region[ti].expect("validated");
    let adj = layout.adjacent(m, h, region);
    let has_above = adj.iter().any(|a| a.side == Side::Above);
    let has_below = adj.iter().any(|a| a.side == Side::Below);

    let mut steps = Vec::new();
    let mut spheres = Vec::new();
    let mut placed = Vec::new();
    let mut unplaced = Vec::new();
    for (i, c) in mv.joint_outcome.components().iter().enumerate() {
        if c.is_sphere() {
            spheres.push(LevelRef::Joint(i));
        } else if c.location == Location::Interior {
            unplaced.push((i, *c));
        } else {
            placed.push(*c);
        }
    }
    if !spheres.is_empty() && !(placed.is_empty() && unplaced.is_empty()) {
        steps.push(CleanupStep {
            kind: CleanupKind::InessentialSphere,
            removed: spheres.clone(),
            absorbed: Vec::new(),
        });
    }

    let upper_id = ThickId(next_thick_id(h));
    let old = h.thick[ti];
    let fresh = |genus: u32, id: ThickId| ThickLevel {
        id,
        genus,
        flags: ThickFlags::default(),
        ..old
    };

    let mut out = h.clone();
    if !placed.is_empty() {
        if !unplaced.is_empty() {
            return Err(RewriteError::InvalidResult(
                "joint outcome mixes placed and unplaced essential components",
            ));
        }
        out = place(
            m,
            h,
            &layout,
            ti,
            region,
            &placed,
            &below.genera(),
            &above.genera(),
        )?;
    } else {
        if below.len() != 1 || above.len() != 1 {
            return Err(RewriteError::InvalidResult(
                "a separating disk disconnects the thick level",
            ));
        }
        let (d, e) = (below.components()[0].genus, above.components()[0].genus);
        match unplaced.as_slice() {
            [] => {
                // the two surgeries are parallel once the spheres are gone;
                // the one facing the ball side goes
                let keep = if !has_above || has_below { d } else { e };
                out.thick[ti] = fresh(keep, old.id);
                let mut removed = spheres.clone();
                removed.push(LevelRef::Thick(upper_id));
                steps.push(CleanupStep {
                    kind: CleanupKind::InessentialSphere,
                    removed,
                    absorbed: vec![LevelRef::Thick(old.id)],
                });
            }
            [(yi, y)] => {
                let keep = match opts.product_choice {
                    ProductChoice::RemoveUpper if y.genus == e => d,
                    ProductChoice::RemoveLower if y.genus == d => e,
                    _ if y.genus == e => d,
                    _ if y.genus == d => e,
                    _ => {
                        return Err(RewriteError::InvalidResult(
                            "joint outcome is not carried by a gluing surface",
                        ))
                    }
                };
                out.thick[ti] = fresh(keep, old.id);
                steps.push(CleanupStep {
                    kind: CleanupKind::ProductRegion,
                    removed: vec![LevelRef::Thick(upper_id), LevelRef::Joint(*yi)],
                    absorbed: vec![LevelRef::Thick(old.id)],
                });
            }
            _ => {
                return Err(RewriteError::InvalidResult(
                    "joint outcome has several unplaced essential components",
                ))
            }
        }
    }

    cleanup_to_exhaustion(m, &mut out, &mut steps)?;
    let out = crate::ghs::derive_thick_orientations(m, &out).map_err(|e| match e {
        GhsError::InvalidGhs(errs) => RewriteError::InvalidGhs(errs),
        other => RewriteError::InvalidGhs(vec![other]),
    })?;
    if validate_ghs(m, &out).is_err() {
        return Err(RewriteError::InvalidResult("result fails GHS validation"));
    }
    Ok(Applied {
        ghs: out,
        cleanup: steps,
    })
}

/// Insert the placed joint components as new copies inside `region`, then
/// fill the pieces of the region: those above the new copies with the
/// components of the upper surgery, those below with the lower one.
/// Components go to pieces in increasing order of genus and of required
/// genus.
#[allow(clippy::too_many_arguments)]
fn place(
    m: &DecompositionGraph,
    h: &Ghs,
    layout: &Layout,
    ti: usize,
    region: usize,
    placed: &[SurfaceComponent],
    lower: &[u32],
    upper: &[u32],
) -> Result<Ghs, RewriteError> {
    let frags = &layout.regions[region];
    let gap = match frags.as_slice() {
        [Fragment::Gap { edge, after }] => Some((*edge, *after)),
        _ => None,
    };
    let scale = 2 * (placed.len() as u32 + 1);
    let mut out = h.clone();
    let edges: BTreeSet<EdgeId> = placed
        .iter()
        .filter_map(|c| match c.location {
            Location::EdgeCopy { edge, .. } => Some(edge),
            _ => None,
        })
        .collect();
    for t in out.thin.iter_mut().filter(|t| edges.contains(&t.edge)) {
        t.copy = scale * (t.copy + 1);
    }
    for t in out.thick.iter_mut() {
        if let Fragment::Gap { edge, after } = &mut t.anchor {
            if edges.contains(edge) {
                *after = scale * (*after + 1);
            }
        }
    }

    let mut used: BTreeMap<(EdgeId, u32), u32> = BTreeMap::new();
    let mut new_ids = BTreeSet::new();
    for (next_id, y) in (next_thin_id(h)..).zip(placed.iter()) {
        let Location::EdgeCopy { edge, near } = y.location else {
            unreachable!("only placed components reach here")
        };
        let ge = m.edge(edge).ok_or(RewriteError::MalformedMove(
            "joint outcome placed on an unknown edge",
        ))?;
        if ge.genus != y.genus {
            return Err(RewriteError::InvalidResult(
                "joint outcome does not match its edge genus",
            ));
        }
        let last = h
            .thin
            .iter()
            .filter(|t| t.edge == edge)
            .map(|t| t.copy)
            .max();
        let base = match gap {
            Some((ge2, after)) if ge2 == edge => scale * (after + 1),
            Some(_) => {
                return Err(RewriteError::InvalidResult(
                    "placement is not adjacent to the region",
                ))
            }
            None => match near {
                End::A if frags.contains(&Fragment::Piece(ge.a.0)) => {
                    if !ge.is_interior() && last.is_none() {
                        return Err(RewriteError::InvalidResult(
                            "boundary edge carries no boundary level",
                        ));
                    }
                    0
                }
                End::B => match ge.b {
                    Endpoint::Slot(pb, _) if frags.contains(&Fragment::Piece(pb)) => {
                        scale * (last.map_or(0, |c| c + 1) + 1)
                    }
                    _ => {
                        return Err(RewriteError::InvalidResult(
                            "placement is not adjacent to the region",
                        ))
                    }
                },
                _ => {
                    return Err(RewriteError::InvalidResult(
                        "placement is not adjacent to the region",
                    ))
                }
            },
        };
        let slot = used.entry((edge, base)).or_insert(0);
        *slot += 1;
        let id = ThinId(next_id);
        new_ids.insert(id);
        out.thin.push(ThinLevel {
            id,
            genus: y.genus,
            edge,
            copy: base + *slot,
            orientation: y.orientation,
        });
    }

    let nl = Layout::new(m, &out).map_err(RewriteError::InvalidGhs)?;
    let mut parts = BTreeSet::new();
    for (i, t) in out.thin.iter().enumerate() {
        if new_ids.contains(&t.id) {
            let (a, b) = nl.sides[i];
            let b = b.ok_or(RewriteError::InvalidResult("placement beyond the boundary"))?;
            parts.insert(nl.region_of[&a]);
            parts.insert(nl.region_of[&b]);
        }
    }
    if parts.len() < 2 {
        return Err(RewriteError::InvalidResult(
            "joint outcome does not separate its region",
        ));
    }

    let mut uppers = Vec::new();
    let mut lowers = Vec::new();
    for &r in &parts {
        let adj = nl.adjacent(m, &out, r);
        let fits = |new_side: Side, old_side: Side| {
            adj.iter().all(|a| {
                let want = if new_ids.contains(&out.thin[a.thin].id) {
                    new_side
                } else {
                    old_side
                };
                a.side == want
            })
        };
        let need = nl
            .required_genus(m, &out, r, Sign::Plus)
            .min(nl.required_genus(m, &out, r, Sign::Minus));
        if fits(Side::Below, Side::Above) {
            uppers.push((need, r));
        } else if fits(Side::Above, Side::Below) {
            lowers.push((need, r));
        } else {
            return Err(RewriteError::InvalidResult(
                "joint outcome reorders existing thin levels",
            ));
        }
    }
    if uppers.len() != upper.len() || lowers.len() != lower.len() {
        return Err(RewriteError::InvalidResult(
            "surgery components do not match the regions",
        ));
    }
    uppers.sort();
    lowers.sort();

    let old = out.thick.remove(ti);
    let mut thick_id = next_thick_id(h);
    let mut first = true;
    for (parts, genera) in [(&lowers, lower), (&uppers, upper)] {
        for (&(_, r), &genus) in parts.iter().zip(genera.iter()) {
            let id = if first {
                first = false;
                old.id
            } else {
                thick_id += 1;
                ThickId(thick_id - 1)
            };
            out.thick.push(ThickLevel {
                id,
                genus,
                anchor: nl.regions[r][0],
                flags: ThickFlags::default(),
                ..old
            });
        }
    }
    Ok(out)
}

/// An applicable cleanup: remove the thick level and the thin level on the
/// `A` side of the gap it fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingCleanup {
    pub kind: CleanupKind,
    pub thick: ThickId,
    pub thin: ThinId,
    pub absorbed_by: ThinId,
}

/// Gap regions filled by a product: both bounding copies have the same
/// sign and the thick level has the genus of the surface.
pub fn applicable_cleanups(
    m: &DecompositionGraph,
    h: &Ghs,
) -> Result<Vec<PendingCleanup>, RewriteError> {
    let layout = Layout::new(m, h).map_err(RewriteError::InvalidGhs)?;
    let mut out = Vec::new();
    for (edge, list) in &layout.per_edge {
        let ge = m.edge(*edge).expect("layout checked edges");
        for (ord, w) in list.windows(2).enumerate() {
            let (lo, hi) = (&h.thin[w[0]], &h.thin[w[1]]);
            if lo.orientation != hi.orientation
                || h.frontier.contains(&lo.id)
                || h.frontier.contains(&hi.id)
            {
                continue;
            }
            let gap = Fragment::Gap {
                edge: *edge,
                after: lo.copy,
            };
            let region = layout.region_of[&gap];
            let thicks = layout.thicks_in(region);
            let [t] = thicks.as_slice() else { continue };
            if h.thick[*t].genus != ge.genus {
                continue;
            }
            let boundary = !ge.is_interior() && ord + 2 == list.len();
            out.push(PendingCleanup {
                kind: if boundary {
                    CleanupKind::BoundaryParallel
                } else {
                    CleanupKind::ProductRegion
                },
                thick: h.thick[*t].id,
                thin: lo.id,
                absorbed_by: hi.id,
            });
        }
    }
    Ok(out)
}

pub fn apply_cleanup(h: &mut Ghs, c: &PendingCleanup) -> CleanupStep {
    h.thick.retain(|t| t.id != c.thick);
    h.thin.retain(|t| t.id != c.thin);
    h.above.retain(|(p, q)| *p != c.thin && *q != c.thin);
    h.frontier.remove(&c.thin);
    CleanupStep {
        kind: c.kind,
        removed: vec![LevelRef::Thick(c.thick), LevelRef::Thin(c.thin)],
        absorbed: vec![LevelRef::Thin(c.absorbed_by)],
    }
}

fn cleanup_to_exhaustion(
    m: &DecompositionGraph,
    h: &mut Ghs,
    steps: &mut Vec<CleanupStep>,
) -> Result<(), RewriteError> {
    // every step removes a thick level, so this terminates
    for _ in 0..=h.thick.len() {
        let pending = applicable_cleanups(m, h)?;
        let Some(c) = pending.first() else {
            return Ok(());
        };
        steps.push(apply_cleanup(h, c));
    }
    Err(RewriteError::CleanupIncomplete)
}

/// Run cleanup in every admissible order and collect the canonical keys of
/// the end results. Confluence means the set has one element.
pub fn cleanup_all_orders(
    m: &DecompositionGraph,
    h: &Ghs,
) -> Result<BTreeSet<CanonicalKey>, RewriteError> {
    let mut out = BTreeSet::new();
    let mut stack = vec![h.clone()];
    while let Some(cur) = stack.pop() {
        let pending = applicable_cleanups(m, &cur)?;
        if pending.is_empty() {
            out.insert(canonical_key(m, &cur).map_err(|e| RewriteError::InvalidGhs(vec![e]))?);
            continue;
        }
        for c in &pending {
            let mut next = cur.clone();
            apply_cleanup(&mut next, c);
            stack.push(next);
        }
    }
    Ok(out)
}

/// Enumeration knobs; the default lists single-disk moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Largest disk set on each side. Sets of more than one disk use
    /// non-separating disks only.
    pub max_disks: usize,
    /// Attach cleanup certificates by applying each move once.
    pub certify: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            max_disks: 1,
            certify: true,
        }
    }
}

pub fn enumerate_weak_reductions(
    m: &DecompositionGraph,
    h: &Ghs,
    thick: ThickId,
) -> Result<Vec<WeakReductionMove>, RewriteError> {
    enumerate_weak_reductions_with(m, h, thick, EnumerateOptions::default())
}

/// One disk sequence per distinct outcome, for every size up to `max`.
/// Every disk is essential on the component it meets.
fn disk_sets(genus: u32, max: usize) -> Vec<Vec<CompressionSpec>> {
    let mut out = Vec::new();
    let mut layer: BTreeMap<Vec<u32>, Vec<CompressionSpec>> = BTreeMap::new();
    layer.insert(vec![genus], Vec::new());
    for _ in 0..max {
        let mut next: BTreeMap<Vec<u32>, Vec<CompressionSpec>> = BTreeMap::new();
        for (genera, seq) in &layer {
            let surface = SymbolicSurface::from_genera(genera);
            for (target, c) in surface.components().iter().enumerate() {
                for kind in CompressionKind::all_for(c.genus, false) {
                    let spec = CompressionSpec { target, kind };
                    let Ok(s) = surface.compress(&spec) else {
                        continue;
                    };
                    let mut longer = seq.clone();
                    longer.push(spec);
                    next.entry(s.genera()).or_insert(longer);
                }
            }
        }
        out.extend(next.values().cloned());
        layer = next;
    }
    out
}

/// Joint outcomes with more essential components than this are listed
/// unplaced only.
const MAX_PLACED: usize = 3;

/// Placements of a single essential component of genus `y` adjacent to
/// `region`: `(edge, near)` pairs.
fn placements(
    m: &DecompositionGraph,
    layout: &Layout,
    region: usize,
    y: u32,
) -> Vec<(EdgeId, End)> {
    let frags = &layout.regions[region];
    let mut out = Vec::new();
    if let [Fragment::Gap { edge, .. }] = frags.as_slice() {
        if m.edge(*edge).is_some_and(|e| e.genus == y) {
            out.push((*edge, End::A));
        }
        return out;
    }
    for e in &m.edges {
        if e.genus != y {
            continue;
        }
        let copies = layout.per_edge.get(&e.id).map_or(0, |l| l.len());
        let a_in = frags.contains(&Fragment::Piece(e.a.0));
        let b_in = matches!(e.b, Endpoint::Slot(p, _) if frags.contains(&Fragment::Piece(p)));
        if !e.is_interior() {
            if a_in && copies > 0 {
                out.push((e.id, End::A));
            }
            continue;
        }
        if copies == 0 {
            if a_in {
                out.push((e.id, End::A));
            }
            continue;
        }
        if a_in {
            out.push((e.id, End::A));
        }
        if b_in {
            out.push((e.id, End::B));
        }
    }
    out
}

pub fn enumerate_weak_reductions_with(
    m: &DecompositionGraph,
    h: &Ghs,
    thick: ThickId,
    opts: EnumerateOptions,
) -> Result<Vec<WeakReductionMove>, RewriteError> {
    let ti = h
        .thick
        .iter()
        .position(|t| t.id == thick)
        .ok_or(RewriteError::UnknownThick(thick))?;
    let genus = h.thick[ti].genus;
    if genus == 0 {
        return Ok(Vec::new());
    }
    let layout = Layout::new(m, h).map_err(RewriteError::InvalidGhs)?;
    let region = layout.thick_region[ti].expect("layout checked anchors");
    let sets = disk_sets(genus, opts.max_disks);
    let mut by_joint: BTreeMap<(usize, usize, Vec<u32>), ()> = BTreeMap::new();
    let mut out = Vec::new();
    for (bi, below) in sets.iter().enumerate() {
        let sb = compress_all(genus, below)?;
        for (ai, above) in sets.iter().enumerate() {
            let sa = compress_all(genus, above)?;
            let joints: BTreeSet<Vec<u32>> = reach(&sb, above.len())
                .intersection(&reach(&sa, below.len()))
                .cloned()
                .collect();
            for joint in joints {
                if by_joint.insert((bi, ai, joint.clone()), ()).is_some() {
                    continue;
                }
                let base = SymbolicSurface::from_genera(&joint);
                let mut variants = BTreeSet::new();
                variants.insert(base.clone());
                let essential: Vec<usize> = (0..joint.len()).filter(|&i| joint[i] > 0).collect();
                if !essential.is_empty() && essential.len() <= MAX_PLACED {
                    let options: Vec<Vec<Location>> = essential
                        .iter()
                        .map(|&k| {
                            placements(m, &layout, region, joint[k])
                                .into_iter()
                                .map(|(edge, near)| Location::EdgeCopy { edge, near })
                                .collect()
                        })
                        .collect();
                    let mut pick = vec![0usize; essential.len()];
                    let mut signs = vec![0usize; essential.len()];
                    'outer: while options.iter().all(|o| !o.is_empty()) {
                        let mut comps: Vec<SurfaceComponent> = base.components().to_vec();
                        for (n, &k) in essential.iter().enumerate() {
                            let sign = if signs[n] == 0 {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            };
                            comps[k] = SurfaceComponent::new(joint[k], sign, options[n][pick[n]]);
                        }
                        variants.insert(SymbolicSurface::new(comps));
                        // odometer over (placement, sign) per component
                        let mut n = 0;
                        loop {
                            if n == essential.len() {
                                break 'outer;
                            }
                            signs[n] += 1;
                            if signs[n] < 2 {
                                break;
                            }
                            signs[n] = 0;
                            pick[n] += 1;
                            if pick[n] < options[n].len() {
                                break;
                            }
                            pick[n] = 0;
                            n += 1;
                        }
                    }
                }
                for joint_outcome in variants {
                    let mut mv = WeakReductionMove {
                        thick,
                        disk_below: below.clone(),
                        disk_above: above.clone(),
                        joint_outcome,
                        cleanup: Vec::new(),
                    };
                    if opts.certify {
                        let trusted = ApplyOptions {
                            trusted_input: true,
                            ..ApplyOptions::default()
                        };
                        if let Ok(a) = apply_weak_reduction_traced(m, h, &mv, trusted) {
                            mv.cleanup = a.cleanup;
                        }
                    }
                    out.push(mv);
                }
            }
        }
    }
    Ok(out)
}
