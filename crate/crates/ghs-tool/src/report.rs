//! Verification reports: one block of `KEY value` lines per family member.

use std::fmt::Write as _;

use ghs_core::bounds::{
    lower_bound, lower_bound_via_product, min_common_stabilization_search, orientation_parity,
    BoundsError, Family, ParityReport, Scenario, SearchOptions, SearchOutcome,
};
use ghs_core::sog::{orientation_flip_witness, validate_sog};
use ghs_core::Sog;

/// Label attached to every search certificate: the search covers the
/// symbolic state space, not isotopy classes of surfaces.
pub const CERTIFICATE_LABEL: &str = "symbolic model";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub search: bool,
    /// Search cap; defaults to one below the lower bound.
    pub cap: Option<u32>,
    pub budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            search: false,
            cap: None,
            budget: SearchOptions::new(0).budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchLine {
    UnreachableBelow(u32),
    PathFound(u32),
    Skipped,
    BudgetExceeded,
}

impl SearchLine {
    pub fn render(&self) -> String {
        match self {
            SearchLine::UnreachableBelow(k) => format!("UNREACHABLE_BELOW {}", k),
            SearchLine::PathFound(k) => format!("PATH_FOUND genus {}", k),
            SearchLine::Skipped => "SKIPPED".to_string(),
            SearchLine::BudgetExceeded => "BUDGET_EXCEEDED".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRun {
    pub line: SearchLine,
    pub states: usize,
    pub sog: Option<Sog>,
}

/// Run the bounded search, folding a blown budget into the result.
pub fn run_search(s: &Scenario, cap: u32, budget: usize) -> Result<SearchRun, BoundsError> {
    let mut opts = SearchOptions::new(cap);
    opts.budget = budget;
    match min_common_stabilization_search(s, opts) {
        Ok(SearchOutcome::UnreachableBelow { bound, states, .. }) => Ok(SearchRun {
            line: SearchLine::UnreachableBelow(bound),
            states,
            sog: None,
        }),
        Ok(SearchOutcome::Path { sog, genus, states }) => Ok(SearchRun {
            line: SearchLine::PathFound(genus),
            states,
            sog: Some(sog),
        }),
        Err(BoundsError::StateSpaceBudgetExceeded { explored }) => Ok(SearchRun {
            line: SearchLine::BudgetExceeded,
            states: explored,
            sog: None,
        }),
        Err(e) => Err(e),
    }
}

/// Whether a search result agrees with the lower bound `lb`, and for a
/// path, whether the path is a valid SOG that flips the first barrier.
pub fn search_consistent(s: &Scenario, run: &SearchRun, lb: i64) -> bool {
    match &run.line {
        SearchLine::UnreachableBelow(k) => i64::from(*k) <= lb,
        SearchLine::PathFound(k) => {
            let m = &s.config.graph;
            let Some(sog) = &run.sog else { return false };
            let flipped = s
                .config
                .barrier_edges
                .first()
                .is_some_and(|e| orientation_flip_witness(m, sog, *e).is_ok());
            i64::from(*k) >= lb && validate_sog(m, sog).is_ok() && flipped
        }
        SearchLine::Skipped | SearchLine::BudgetExceeded => true,
    }
}

/// The closed forms the family statements give in terms of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expected {
    pub endpoint_genera: (u32, u32),
    pub splitting_genus: u32,
    pub lower_bound: i64,
    pub stab_count: i64,
}

pub fn expected(family: Family, g: u32) -> Option<Expected> {
    let gi = i64::from(g);
    let e = match family {
        Family::Flip => Expected {
            endpoint_genera: (g + 2, g + 2),
            splitting_genus: g + 2,
            lower_bound: 2 * gi + 2,
            stab_count: (gi + 2) - 2,
        },
        Family::TorusBoundary => Expected {
            endpoint_genera: (g + 2, g + 3),
            splitting_genus: g + 3,
            lower_bound: 2 * gi + 2,
            stab_count: (gi + 3) - 4,
        },
        Family::Closed => Expected {
            endpoint_genera: (2 * g + 4, 2 * g + 4),
            splitting_genus: 2 * g + 4,
            lower_bound: 3 * gi + 3,
            stab_count: (2 * gi + 4) / 2 - 3,
        },
        Family::Custom => return None,
    };
    Some(e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub family: Family,
    pub g: u32,
    pub splitting_genus: u32,
    pub endpoint_genera: (u32, u32),
    pub lower_bound: i64,
    pub stab_count: i64,
    pub search: SearchLine,
    pub states: usize,
    pub parity: Option<ParityReport>,
    pub checks: Vec<(&'static str, bool)>,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "FAMILY {}", self.family.tag());
        let _ = writeln!(w, "G {}", self.g);
        let _ = writeln!(w, "SPLITTING_GENUS {}", self.splitting_genus);
        let _ = writeln!(
            w,
            "ENDPOINT_GENERA {} {}",
            self.endpoint_genera.0, self.endpoint_genera.1
        );
        let _ = writeln!(w, "LOWER_BOUND {}", self.lower_bound);
        let _ = writeln!(w, "STAB_COUNT {}", self.stab_count);
        let _ = writeln!(w, "SEARCH_RESULT {}", self.search.render());
        let _ = writeln!(w, "STATES_EXPLORED {}", self.states);
        if matches!(self.search, SearchLine::UnreachableBelow(_)) {
            let _ = writeln!(w, "CERTIFICATE {}", CERTIFICATE_LABEL);
        }
        if let Some(p) = &self.parity {
            let _ = writeln!(
                w,
                "PARITY {} {} {}",
                p.start_orientations, p.end_orientations, p.agreeing_pairs
            );
        }
        for (name, ok) in &self.checks {
            let _ = writeln!(w, "CHECK {} {}", name, if *ok { "PASS" } else { "FAIL" });
        }
        out
    }
}

/// Build and check one family member.
pub fn verify_row(family: Family, g: u32, opts: &VerifyOptions) -> Result<Row, BoundsError> {
    let exp = expected(family, g).ok_or(BoundsError::BadParameter(
        "no closed forms for custom scenarios",
    ))?;
    let s = family.build(g)?;
    let genera = (s.start_genus()?, s.end_genus()?);
    let n = s.splitting_genus()?;
    let lb = lower_bound(&s.config)?;
    let count = s.stabilization_count()?;
    let mut checks = vec![
        ("endpoint_genera", genera == exp.endpoint_genera),
        ("splitting_genus", n == exp.splitting_genus),
        (
            "lower_bound",
            lb == exp.lower_bound && lower_bound_via_product(&s.config)? == lb,
        ),
        (
            "stab_count",
            count == exp.stab_count && s.claimed_stabilization_count()? == count,
        ),
    ];
    let parity = (family == Family::Closed).then(|| orientation_parity(&s));
    if let Some(p) = &parity {
        checks.push((
            "parity",
            p.start_orientations > 0 && p.end_orientations > 0 && p.agreeing_pairs == 0,
        ));
    }
    let searchable = matches!(family, Family::Flip | Family::TorusBoundary);
    let (search, states) = if opts.search && searchable {
        let cap = match opts.cap {
            Some(c) => c,
            None => u32::try_from(lb - 1)
                .map_err(|_| BoundsError::BadParameter("lower bound below 1"))?,
        };
        let run = run_search(&s, cap, opts.budget)?;
        checks.push(("search", search_consistent(&s, &run, lb)));
        (run.line, run.states)
    } else {
        (SearchLine::Skipped, 0)
    };
    Ok(Row {
        family,
        g,
        splitting_genus: n,
        endpoint_genera: genera,
        lower_bound: lb,
        stab_count: count,
        search,
        states,
        parity,
        checks,
    })
}

/// Rows separated by blank lines, then an overall `RESULT` line.
pub fn render_report(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&r.render());
        out.push('\n');
    }
    let ok = rows.iter().all(Row::passed);
    out.push_str(if ok { "RESULT PASS\n" } else { "RESULT FAIL\n" });
    out
}
