//! The analysis report: everything computed for one arrangement, in a
//! versioned JSON form and a human table.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementDoc, WeakCombinatorics};
use crate::combinatorics::{
    char_poly_reduced, divisional_freeness, modular_points_of, tau_max, tjurina, tjurina_from_lattice,
};
use crate::syzygy::{
    certificate_from, classify_resolution, CapStatus, Classification, FreenessCertificate, ProfileOptions,
    ResolutionProfile, SyzygyError,
};
use crate::theorems::{verify, CaseReport, TheoremError, TheoremId};

pub const SCHEMA: &str = "freelines.report/1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Syzygy(#[from] SyzygyError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct TauMaxRow {
    pub d1: i64,
    pub tau_max: i64,
    pub equals_tau: bool,
    /// The row at `d1 = mdr`.
    pub at_mdr: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharPolyReport {
    pub c1: i64,
    pub c0: i64,
    pub factored: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupersolvabilityReport {
    pub supersolvable: bool,
    pub modular_points: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisionalWitnessReport {
    pub line: usize,
    pub label: String,
    pub covector: String,
    pub r_l: i64,
    pub root: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisionalReport {
    pub divisionally_free: bool,
    pub witnesses: Vec<DivisionalWitnessReport>,
}

/// The three independent freeness verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct FreenessRoutes {
    pub certificate: bool,
    pub two_generators: bool,
    pub defect_zero: Option<bool>,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub input: ArrangementDoc,
    pub weak_combinatorics: WeakCombinatorics,
    pub tau: i64,
    pub tau_max: Vec<TauMaxRow>,
    pub char_poly: CharPolyReport,
    pub supersolvability: SupersolvabilityReport,
    pub divisional: DivisionalReport,
    pub profile: ResolutionProfile,
    pub certificate: FreenessCertificate,
    pub freeness_routes: FreenessRoutes,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<CaseReport>,
}

/// `L1, L2, …` by position.
pub fn line_label(i: usize) -> String {
    format!("L{}", i + 1)
}

pub fn analyze(
    a: &Arrangement,
    name: Option<&str>,
    opts: &ProfileOptions,
    theorems: &[TheoremId],
) -> Result<Report, ReportError> {
    let lat = a.lattice();
    let wc = lat.weak_combinatorics();
    let tau = tjurina(&wc);
    if tau != tjurina_from_lattice(&lat) {
        return Err(ReportError::Invariant("τ from the n-vector differs from the lattice sum".into()));
    }
    let profile = classify_resolution(a, *opts)?;
    let d = a.d() as i64;
    let m = wc.m as i64;
    let mdr = profile.mdr as i64;
    let mut rows: Vec<i64> = (m - 1..=m + 2).filter(|&x| x >= 0 && x < d).collect();
    if !rows.contains(&mdr) {
        rows.push(mdr);
        rows.sort_unstable();
    }
    let tau_max_rows = rows
        .into_iter()
        .map(|d1| {
            let t = tau_max(d, d1).expect("0 <= d1 < d");
            TauMaxRow {
                d1,
                tau_max: t,
                equals_tau: t == tau,
                at_mdr: d1 == mdr,
            }
        })
        .collect();
    let chi = char_poly_reduced(&wc);
    let ss = modular_points_of(a, &lat);
    let df = divisional_freeness(a);
    let certificate = certificate_from(a, mdr)?;
    let two_generators = profile.classification == Classification::Free;
    let defect_zero = profile.defect.as_ref().map(|x| x.nu == 0);
    let agree = certificate.free == two_generators && defect_zero.is_none_or(|z| z == two_generators);
    if !agree {
        return Err(ReportError::Invariant(format!(
            "freeness routes disagree: certificate {}, generators {}, ν = 0 {:?}",
            certificate.free, two_generators, defect_zero
        )));
    }
    let mut cases = Vec::new();
    for &t in theorems {
        cases.extend(verify(t, a, name.unwrap_or("input"), &[], opts)?);
    }
    let mut input = a.to_document();
    input.name = name.map(str::to_string);
    Ok(Report {
        schema: SCHEMA,
        input,
        weak_combinatorics: wc,
        tau,
        tau_max: tau_max_rows,
        char_poly: CharPolyReport {
            c1: chi.c1,
            c0: chi.c0,
            factored: chi.to_string(),
        },
        supersolvability: SupersolvabilityReport {
            supersolvable: ss.supersolvable,
            modular_points: ss.modular_points.iter().map(|p| p.to_string()).collect(),
        },
        divisional: DivisionalReport {
            divisionally_free: df.divisionally_free,
            witnesses: df
                .witnesses
                .iter()
                .map(|w| DivisionalWitnessReport {
                    line: w.line,
                    label: line_label(w.line),
                    covector: a.line(w.line).to_string(),
                    r_l: w.r_l,
                    root: w.root,
                })
                .collect(),
        },
        profile,
        certificate,
        freeness_routes: FreenessRoutes {
            certificate: certificate.free,
            two_generators,
            defect_zero,
            agree,
        },
        cases,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line: classification, exponents, `τ`, divisional freeness.
    pub fn summary(&self) -> String {
        let p = &self.profile;
        let mut s = format!("{}, exponents {}, τ={}", p.classification, p.exponents_string(), self.tau);
        if !self.divisional.witnesses.is_empty() {
            let labels: Vec<&str> = self.divisional.witnesses.iter().map(|w| w.label.as_str()).collect();
            let _ = write!(s, ", divisionally free via {}", labels.join(", "));
        } else if p.classification == Classification::Free {
            s.push_str(", not divisionally free by the root test");
        }
        if let Some(def) = &p.defect {
            let _ = write!(s, ", ν={}", def.nu);
        }
        let _ = write!(s, ", type {}", p.type_t);
        s
    }

    pub fn render_text(&self, field: &str) -> String {
        let mut out = String::new();
        let p = &self.profile;
        let wc = &self.weak_combinatorics;
        let name = self.input.name.as_deref().unwrap_or("input");
        let _ = writeln!(out, "{name}: {} lines over {field}", wc.d);
        let ns: Vec<String> = wc.n.iter().map(|(r, c)| format!("n{r}={c}")).collect();
        let _ = writeln!(out, "  weak combinatorics  {}  m={}", ns.join(" "), wc.m);
        let _ = writeln!(out, "  tau                 {}", self.tau);
        for row in &self.tau_max {
            let mark = if row.at_mdr { ">>" } else { "  " };
            let eq = if row.equals_tau { "  = τ" } else { "" };
            let _ = writeln!(
                out,
                "  {mark} tau_max({}, {}) = {}{eq}{}",
                wc.d,
                row.d1,
                row.tau_max,
                if row.at_mdr { "   <- d1 = mdr" } else { "" }
            );
        }
        let _ = writeln!(out, "  char poly / (t-1)   {}", self.char_poly.factored);
        let _ = writeln!(
            out,
            "  supersolvable       {}{}",
            yes_no(self.supersolvability.supersolvable),
            if self.supersolvability.modular_points.is_empty() {
                String::new()
            } else {
                format!(" (modular: {})", self.supersolvability.modular_points.join(", "))
            }
        );
        let ws: Vec<String> = self
            .divisional
            .witnesses
            .iter()
            .map(|w| format!("{} (r_L={})", w.label, w.r_l))
            .collect();
        let _ = writeln!(
            out,
            "  divisionally free   {}{}",
            yes_no(self.divisional.divisionally_free),
            if ws.is_empty() { String::new() } else { format!(" via {}", ws.join(", ")) }
        );
        let _ = writeln!(
            out,
            "  resolution          {} {} (mdr {}, s {}, type {})",
            p.classification,
            p.exponents_string(),
            p.mdr,
            p.s,
            p.type_t
        );
        let status = match p.cap_status {
            CapStatus::SaitoCertified { degree } => format!("complete, Saito determinant nonzero at degree {degree}"),
            CapStatus::CompleteToCap => "complete to cap".to_string(),
            CapStatus::Incomplete => "INCOMPLETE".to_string(),
        };
        let _ = writeln!(out, "  generator cap       {} ({status}), prime {}", p.cap, p.prime);
        match &p.defect {
            Some(def) => {
                let _ = writeln!(out, "  defect ν            {}", def.nu);
            }
            None => {
                let _ = writeln!(out, "  defect ν            not computed");
            }
        }
        let _ = writeln!(
            out,
            "  freeness routes     certificate {}, s = 2 {}, ν = 0 {}",
            yes_no(self.freeness_routes.certificate),
            yes_no(self.freeness_routes.two_generators),
            self.freeness_routes.defect_zero.map_or("n/a", yes_no)
        );
        for c in &self.cases {
            let _ = writeln!(out, "  {}", case_line(c));
        }
        let _ = writeln!(out, "  summary             {}", self.summary());
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// A single human-readable line for a case report.
pub fn case_line(c: &CaseReport) -> String {
    let mut s = format!("[{}] {}", c.theorem, c.arrangement);
    if let Some(i) = c.line {
        let _ = write!(s, " {}", line_label(i));
    }
    if let Some(p) = &c.point {
        let _ = write!(s, " p={p}");
    }
    if let Some(l) = &c.covector {
        let _ = write!(s, " L={l}");
    }
    if let Some(r) = c.r_l {
        let _ = write!(s, " r_L={r}");
    }
    if !c.hypothesis {
        let _ = write!(s, ": hypothesis not satisfied ({})", c.note.as_deref().unwrap_or(""));
        return s;
    }
    match c.case {
        Some(k) => {
            let _ = write!(s, ": case ({k})");
        }
        None => s.push_str(": no case applies"),
    }
    for ch in &c.checks {
        let _ = write!(s, "; {} {} [{}]", ch.subject, ch.computed, if ch.ok { "ok" } else { "MISMATCH" });
    }
    if let Some(n) = &c.note {
        let _ = write!(s, "; {n}");
    }
    let _ = write!(s, " => {}", if c.agreement { "agree" } else { "DISAGREE" });
    s
}
