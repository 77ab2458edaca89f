//! Plain-text scenario files.
//!
//! ```text
//! SCENARIO flip 2 cap 6
//! PIECES
//! piece 1 genus 3 open
//! slot 1 0 2
//! EDGES
//! edge 0 1:0 2:0 genus 2 grade 6 ref A
//! barrier 0
//! SPLITTINGS
//! splitting 1 H1 genus 3 si 1 pattern 0:below along -
//! GHS H^1
//! thick 0 genus 3 anchor piece:1 sign + si 1 critical 0
//! thin 0 genus 2 edge 0 copy 0 sign +
//! above 0 1
//! frontier 0
//! END
//! ENDPOINTS H^1 H^*
//! ASSUMPTIONS
//! assume F is incompressible
//! ```
//!
//! One record per line, whitespace separated, `#` starts a comment. Free
//! text in `assume` lines is stored with single spaces between words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use ghs_core::bounds::{BoundConfig, Family, Scenario};
use ghs_core::ghs::{Fragment, Ghs, ThickFlags, ThickId, ThickLevel, ThinId, ThinLevel};
use ghs_core::manifold::{
    DecompositionGraph, EdgeId, End, Endpoint, GluingEdge, Piece, PieceId, Side, Slot, SlotId,
    Splitting,
};
use ghs_core::Sign;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioFile {
    pub family: Family,
    pub g: u32,
    pub config: BoundConfig,
    /// Named GHSs in file order.
    pub ghs: Vec<(String, Ghs)>,
    pub endpoints: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub const START: &str = "H^1";
pub const END: &str = "H^*";

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            family: s.family,
            g: s.g,
            config: s.config.clone(),
            ghs: vec![
                (START.to_string(), s.start.clone()),
                (END.to_string(), s.end.clone()),
            ],
            endpoints: Some((START.to_string(), END.to_string())),
        }
    }

    pub fn graph(&self) -> &DecompositionGraph {
        &self.config.graph
    }

    pub fn get(&self, name: &str) -> Option<&Ghs> {
        self.ghs.iter().find(|(n, _)| n == name).map(|(_, h)| h)
    }

    /// Insert or replace a named GHS.
    pub fn put(&mut self, name: &str, h: Ghs) {
        match self.ghs.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = h,
            None => self.ghs.push((name.to_string(), h)),
        }
    }

    /// The scenario named by the `ENDPOINTS` record.
    pub fn to_scenario(&self) -> Option<Scenario> {
        let (a, b) = self.endpoints.as_ref()?;
        Some(Scenario {
            config: self.config.clone(),
            start: self.get(a)?.clone(),
            end: self.get(b)?.clone(),
            family: self.family,
            g: self.g,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out).expect("writing to a String");
        out
    }

    fn write_to(&self, w: &mut String) -> fmt::Result {
        let c = &self.config;
        writeln!(w, "# ghs scenario")?;
        writeln!(w, "SCENARIO {} {} cap {}", self.family.tag(), self.g, c.cap)?;
        writeln!(w, "PIECES")?;
        for p in &c.graph.pieces {
            let genus = c
                .piece_genera
                .get(&p.id)
                .map_or("-".to_string(), u32::to_string);
            let closed = if p.closed { "closed" } else { "open" };
            writeln!(w, "piece {} genus {} {}", p.id, genus, closed)?;
            for s in &p.slots {
                writeln!(w, "slot {} {} {}", p.id, s.id, s.genus)?;
            }
        }
        writeln!(w, "EDGES")?;
        for e in &c.graph.edges {
            let b = match e.b {
                Endpoint::Slot(p, s) => format!("{}:{}", p, s),
                Endpoint::Boundary => "boundary".to_string(),
            };
            let grade = e.grade.map_or("-".to_string(), |g| g.to_string());
            writeln!(
                w,
                "edge {} {}:{} {} genus {} grade {} ref {}",
                e.id,
                e.a.0,
                e.a.1,
                b,
                e.genus,
                grade,
                end_str(e.reference)
            )?;
        }
        if !c.barrier_edges.is_empty() {
            let ids: Vec<String> = c.barrier_edges.iter().map(|e| e.to_string()).collect();
            writeln!(w, "barrier {}", ids.join(" "))?;
        }
        writeln!(w, "SPLITTINGS")?;
        for p in &c.graph.pieces {
            for s in &p.splittings {
                let pattern = list(
                    s.pattern
                        .iter()
                        .map(|(k, v)| format!("{}:{}", k, side_str(*v))),
                );
                let along = list(s.boundary_stabilized_along.iter().map(|k| k.to_string()));
                writeln!(
                    w,
                    "splitting {} {} genus {} si {} pattern {} along {}",
                    p.id,
                    s.name,
                    s.genus,
                    u8::from(s.strongly_irreducible),
                    pattern,
                    along
                )?;
            }
        }
        for (name, h) in &self.ghs {
            writeln!(w, "GHS {}", name)?;
            write_ghs_body(w, h)?;
            writeln!(w, "END")?;
        }
        if let Some((a, b)) = &self.endpoints {
            writeln!(w, "ENDPOINTS {} {}", a, b)?;
        }
        writeln!(w, "ASSUMPTIONS")?;
        for a in &c.graph.assumptions {
            writeln!(w, "assume {}", a)?;
        }
        Ok(())
    }
}

/// The records of a GHS block, without the `GHS`/`END` lines.
pub fn write_ghs_body(w: &mut String, h: &Ghs) -> fmt::Result {
    for t in &h.thick {
        writeln!(
            w,
            "thick {} genus {} anchor {} sign {} si {} critical {}",
            t.id,
            t.genus,
            t.anchor,
            t.orientation,
            u8::from(t.flags.strongly_irreducible),
            u8::from(t.flags.critical)
        )?;
    }
    for t in &h.thin {
        writeln!(
            w,
            "thin {} genus {} edge {} copy {} sign {}",
            t.id, t.genus, t.edge, t.copy, t.orientation
        )?;
    }
    for (a, b) in &h.above {
        writeln!(w, "above {} {}", a, b)?;
    }
    for f in &h.frontier {
        writeln!(w, "frontier {}", f)?;
    }
    Ok(())
}

/// A full `GHS name ... END` block.
pub fn ghs_block(name: &str, h: &Ghs) -> String {
    let mut out = format!("GHS {}\n", name);
    write_ghs_body(&mut out, h).expect("writing to a String");
    out.push_str("END\n");
    out
}

fn list(items: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = items.collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(",")
    }
}

fn end_str(e: End) -> &'static str {
    match e {
        End::A => "A",
        End::B => "B",
    }
}

fn side_str(s: Side) -> &'static str {
    match s {
        Side::Above => "above",
        Side::Below => "below",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Pieces,
    Edges,
    Splittings,
    Ghs,
    Assumptions,
}

/// The whitespace-separated fields of one line.
pub(crate) struct Fields<'a> {
    pub line: usize,
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Fields<'a> {
    pub fn new(line: usize, text: &'a str) -> Self {
        Self {
            line,
            toks: text.split_whitespace().collect(),
            pos: 0,
        }
    }

    pub fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            message: message.into(),
        }
    }

    pub fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(format!("missing {}", what)))?;
        self.pos += 1;
        Ok(t)
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    pub fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next(kw)?;
        if t == kw {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`, found `{}`", kw, t)))
        }
    }

    pub fn parse<T: FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| self.err(format!("bad {} `{}`", what, t)))
    }

    /// `kw value` pair.
    pub fn field<T: FromStr>(&mut self, kw: &str) -> Result<T, ParseError> {
        self.keyword(kw)?;
        self.parse(kw)
    }

    pub fn rest(&mut self) -> Vec<&'a str> {
        let r = self.toks[self.pos..].to_vec();
        self.pos = self.toks.len();
        r
    }

    pub fn done(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected `{}`", t))),
        }
    }
}

/// Strip the comment and surrounding blanks of every line, keeping line
/// numbers; blank lines are dropped.
pub(crate) fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub(crate) fn parse_sign(f: &Fields<'_>, t: &str) -> Result<Sign, ParseError> {
    match t {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(f.err(format!("bad sign `{}`", t))),
    }
}

pub(crate) fn parse_end(f: &Fields<'_>, t: &str) -> Result<End, ParseError> {
    match t {
        "A" => Ok(End::A),
        "B" => Ok(End::B),
        _ => Err(f.err(format!("bad edge end `{}`", t))),
    }
}

fn parse_flag(f: &mut Fields<'_>, kw: &str) -> Result<bool, ParseError> {
    match f.field::<u8>(kw)? {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(f.err(format!("{} must be 0 or 1", kw))),
    }
}

fn parse_pair(f: &Fields<'_>, t: &str) -> Result<(u32, u32), ParseError> {
    let bad = || f.err(format!("expected `piece:slot`, found `{}`", t));
    let (a, b) = t.split_once(':').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn parse_fragment(f: &Fields<'_>, t: &str) -> Result<Fragment, ParseError> {
    let bad = || f.err(format!("bad anchor `{}`", t));
    let parts: Vec<&str> = t.split(':').collect();
    let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
    match parts.as_slice() {
        ["piece", p] => Ok(Fragment::Piece(PieceId(num(p)?))),
        ["gap", e, c] => Ok(Fragment::Gap {
            edge: EdgeId(num(e)?),
            after: num(c)?,
        }),
        _ => Err(bad()),
    }
}

fn opt_u32(f: &mut Fields<'_>, kw: &str) -> Result<Option<u32>, ParseError> {
    f.keyword(kw)?;
    match f.next(kw)? {
        "-" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| f.err(format!("bad {} `{}`", kw, t))),
    }
}

fn parse_list<T>(
    f: &Fields<'_>,
    t: &str,
    item: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>, ParseError> {
    if t == "-" {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|s| item(s).ok_or_else(|| f.err(format!("bad list item `{}`", s))))
        .collect()
}

/// Parse one GHS record into `h`. Returns false for an unknown keyword.
pub(crate) fn parse_ghs_record(
    f: &mut Fields<'_>,
    kw: &str,
    h: &mut Ghs,
) -> Result<bool, ParseError> {
    match kw {
        "thick" => {
            let id = ThickId(f.parse("thick id")?);
            let genus = f.field("genus")?;
            f.keyword("anchor")?;
            let t = f.next("anchor")?;
            let anchor = parse_fragment(f, t)?;
            f.keyword("sign")?;
            let t = f.next("sign")?;
            let orientation = parse_sign(f, t)?;
            let strongly_irreducible = parse_flag(f, "si")?;
            let critical = parse_flag(f, "critical")?;
            h.thick.push(ThickLevel {
                id,
                genus,
                anchor,
                orientation,
                flags: ThickFlags {
                    strongly_irreducible,
                    critical,
                },
            });
        }
        "thin" => {
            let id = ThinId(f.parse("thin id")?);
            let genus = f.field("genus")?;
            let edge = EdgeId(f.field("edge")?);
            let copy = f.field("copy")?;
            f.keyword("sign")?;
            let t = f.next("sign")?;
            let orientation = parse_sign(f, t)?;
            h.thin.push(ThinLevel {
                id,
                genus,
                edge,
                copy,
                orientation,
            });
        }
        "above" => {
            let a = ThinId(f.parse("thin id")?);
            let b = ThinId(f.parse("thin id")?);
            h.above.push((a, b));
        }
        "frontier" => {
            h.frontier.insert(ThinId(f.parse("thin id")?));
        }
        _ => return Ok(false),
    }
    f.done()?;
    Ok(true)
}

impl FromStr for ScenarioFile {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        parse(text)
    }
}

pub fn parse(text: &str) -> Result<ScenarioFile, ParseError> {
    let mut section = Section::Start;
    let mut header: Option<(Family, u32, u32)> = None;
    let mut pieces: Vec<Piece> = Vec::new();
    let mut piece_genera = BTreeMap::new();
    let mut edges: Vec<GluingEdge> = Vec::new();
    let mut barrier: Option<(usize, Vec<EdgeId>)> = None;
    let mut assumptions = Vec::new();
    let mut ghs: Vec<(String, Ghs)> = Vec::new();
    let mut open: Option<(String, Ghs)> = None;
    let mut endpoints = None;
    let mut last_line = 0;

    for (line, text) in records(text) {
        last_line = line;
        let mut f = Fields::new(line, text);
        let kw = f.next("record")?;
        if let Some((_, h)) = open.as_mut() {
            if kw == "END" {
                f.done()?;
                ghs.push(open.take().expect("open block"));
            } else if !parse_ghs_record(&mut f, kw, h)? {
                return Err(f.err(format!("unknown GHS record `{}`", kw)));
            }
            continue;
        }
        let enter = |f: &Fields<'_>, section: &mut Section, next: Section| {
            if next < *section || (next == *section && next != Section::Ghs) {
                return Err(f.err(format!("section {:?} out of order", next)));
            }
            *section = next;
            Ok(())
        };
        match kw {
            "SCENARIO" => {
                if header.is_some() {
                    return Err(f.err("repeated SCENARIO"));
                }
                let tag = f.next("family")?;
                let family = Family::from_tag(tag)
                    .ok_or_else(|| f.err(format!("unknown family `{}`", tag)))?;
                let g = f.parse("g")?;
                let cap = f.field("cap")?;
                header = Some((family, g, cap));
            }
            "PIECES" => enter(&f, &mut section, Section::Pieces)?,
            "EDGES" => enter(&f, &mut section, Section::Edges)?,
            "SPLITTINGS" => enter(&f, &mut section, Section::Splittings)?,
            "ASSUMPTIONS" => enter(&f, &mut section, Section::Assumptions)?,
            "GHS" => {
                enter(&f, &mut section, Section::Ghs)?;
                let name = f.next("GHS name")?.to_string();
                if ghs.iter().any(|(n, _)| *n == name) {
                    return Err(f.err(format!("repeated GHS `{}`", name)));
                }
                open = Some((name, Ghs::default()));
            }
            "ENDPOINTS" if section == Section::Ghs => {
                let a = f.next("start name")?.to_string();
                let b = f.next("end name")?.to_string();
                endpoints = Some((a, b));
            }
            "piece" if section == Section::Pieces => {
                let id = PieceId(f.parse("piece id")?);
                if pieces.iter().any(|p| p.id == id) {
                    return Err(f.err(format!("repeated piece {}", id)));
                }
                if let Some(g) = opt_u32(&mut f, "genus")? {
                    piece_genera.insert(id, g);
                }
                let closed = match f.next("open/closed")? {
                    "open" => false,
                    "closed" => true,
                    t => return Err(f.err(format!("expected open or closed, found `{}`", t))),
                };
                pieces.push(Piece {
                    id,
                    slots: Vec::new(),
                    splittings: Vec::new(),
                    closed,
                });
            }
            "slot" if section == Section::Pieces => {
                let p = PieceId(f.parse("piece id")?);
                let id = SlotId(f.parse("slot id")?);
                let genus = f.parse("slot genus")?;
                let piece = pieces
                    .iter_mut()
                    .find(|x| x.id == p)
                    .ok_or_else(|| f.err(format!("slot of unknown piece {}", p)))?;
                piece.slots.push(Slot { id, genus });
            }
            "edge" if section == Section::Edges => {
                let id = EdgeId(f.parse("edge id")?);
                let t = f.next("end A")?;
                let (ap, asl) = parse_pair(&f, t)?;
                let b = match f.next("end B")? {
                    "boundary" => Endpoint::Boundary,
                    t => {
                        let (bp, bs) = parse_pair(&f, t)?;
                        Endpoint::Slot(PieceId(bp), SlotId(bs))
                    }
                };
                let genus = f.field("genus")?;
                let grade = opt_u32(&mut f, "grade")?;
                f.keyword("ref")?;
                let t = f.next("reference end")?;
                let reference = parse_end(&f, t)?;
                edges.push(GluingEdge {
                    id,
                    a: (PieceId(ap), SlotId(asl)),
                    b,
                    genus,
                    grade,
                    reference,
                });
            }
            "barrier" if section == Section::Edges => {
                if barrier.is_some() {
                    return Err(f.err("repeated barrier record"));
                }
                let ids = f
                    .rest()
                    .iter()
                    .map(|t| {
                        t.parse()
                            .map(EdgeId)
                            .map_err(|_| f.err(format!("bad edge id `{}`", t)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                barrier = Some((line, ids));
            }
            "splitting" if section == Section::Splittings => {
                let p = PieceId(f.parse("piece id")?);
                let name = f.next("splitting name")?.to_string();
                let genus = f.field("genus")?;
                let si = parse_flag(&mut f, "si")?;
                f.keyword("pattern")?;
                let t = f.next("pattern")?;
                let pattern = parse_list(&f, t, |s| {
                    let (k, v) = s.split_once(':')?;
                    let side = match v {
                        "above" => Side::Above,
                        "below" => Side::Below,
                        _ => return None,
                    };
                    Some((SlotId(k.parse().ok()?), side))
                })?;
                f.keyword("along")?;
                let t = f.next("along")?;
                let along = parse_list(&f, t, |s| s.parse().ok().map(SlotId))?;
                let piece = pieces
                    .iter_mut()
                    .find(|x| x.id == p)
                    .ok_or_else(|| f.err(format!("splitting of unknown piece {}", p)))?;
                piece.splittings.push(Splitting {
                    name,
                    genus,
                    pattern: pattern.into_iter().collect(),
                    strongly_irreducible: si,
                    boundary_stabilized_along: along,
                });
            }
            "assume" if section == Section::Assumptions => {
                assumptions.push(f.rest().join(" "));
            }
            _ => return Err(f.err(format!("unexpected record `{}` in {:?}", kw, section))),
        }
        f.done()?;
    }

    if let Some((name, _)) = open {
        return Err(ParseError {
            line: last_line,
            message: format!("GHS `{}` has no END", name),
        });
    }
    let (family, g, cap) = header.ok_or(ParseError {
        line: 1,
        message: "missing SCENARIO record".to_string(),
    })?;
    let graph = DecompositionGraph {
        pieces,
        edges,
        assumptions,
    };
    let (barrier_line, barrier_edges) = barrier.unwrap_or((last_line, Vec::new()));
    let set: BTreeSet<EdgeId> = barrier_edges.iter().copied().collect();
    let cut = graph.cut_along(&set).map_err(|e| ParseError {
        line: barrier_line,
        message: format!("bad barrier edges: {}", e),
    })?;
    if let Some((a, b)) = &endpoints {
        for n in [a, b] {
            if !ghs.iter().any(|(x, _)| x == n) {
                return Err(ParseError {
                    line: last_line,
                    message: format!("endpoint `{}` is not a GHS of the file", n),
                });
            }
        }
    }
    Ok(ScenarioFile {
        family,
        g,
        config: BoundConfig {
            graph,
            barrier_edges,
            piece_genera,
            n: cut.n,
            m: cut.m,
            cap,
        },
        ghs,
        endpoints,
    })
}
