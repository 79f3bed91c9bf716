//! The full verification suite, run per groupoid and rendered as a
//! deterministic machine report or a human summary.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::eqsheaf::{
    enumerate_eq_maps, enumerate_sections, enumerate_sheaves, gun_cover_check, section_to_morphism, EqMap,
};
use crate::error::Result;
use crate::galois::{dominates, dominates_by_stalks, verify_galois_laws, DominationTable};
use crate::groupoid::{replete_subsets, FinGroupoid, RepleteInclusion};
use crate::pointset::{subsets, PointSet};
use crate::restrict::Restriction;
use crate::site::{identity_tset, subobject_lattice, tset_compose, Site};

/// Largest total space enumerated by the generation check.
pub const GENERATION_BOUND: usize = 6;
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub failures: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupoidRun {
    pub name: String,
    pub objects: usize,
    pub arrows: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub passed: bool,
    pub groupoids: Vec<GroupoidRun>,
}

impl RunReport {
    pub fn new(groupoids: Vec<GroupoidRun>) -> Self {
        let passed = groupoids.iter().all(|g| g.checks.iter().all(|c| c.passed));
        RunReport { passed, groupoids }
    }

    /// Pretty JSON. Timings are left out so reruns are byte-identical.
    pub fn machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for run in &self.groupoids {
            let _ = writeln!(out, "{} ({} objects, {} arrows)", run.name, run.objects, run.arrows);
            for c in &run.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(out, "  {mark}  {:<20} {} [{:.2?}]", c.name, c.detail, c.elapsed);
                for f in &c.failures {
                    let _ = writeln!(out, "        {f}");
                }
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" });
        out
    }
}

struct Recorder {
    failures: Vec<String>,
    total: usize,
}

impl Recorder {
    fn new() -> Self {
        Recorder { failures: Vec::new(), total: 0 }
    }

    fn fail(&mut self, message: String) {
        self.total += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(message);
        }
    }

    fn finish(self, name: &str, detail: String, started: Instant) -> CheckResult {
        let mut failures = self.failures;
        if self.total > failures.len() {
            failures.push(format!("... {} more", self.total - failures.len()));
        }
        CheckResult { name: name.to_owned(), passed: self.total == 0, detail, failures, elapsed: started.elapsed() }
    }
}

fn timed(name: &str, f: impl FnOnce(&mut Recorder) -> Result<String>) -> CheckResult {
    let started = Instant::now();
    let mut rec = Recorder::new();
    let detail = match f(&mut rec) {
        Ok(d) => d,
        Err(e) => {
            rec.fail(e.to_string());
            "aborted".into()
        }
    };
    rec.finish(name, detail, started)
}

/// Open subgroupoids re-derived by filtering every arrow subset.
pub fn open_subgroupoids_by_filtering(g: &FinGroupoid) -> Vec<PointSet> {
    subsets(g.all_arrows())
        .filter(|&n| {
            g.arrows().is_open(n)
                && n.iter().all(|f| n.contains(g.inverse(f)))
                && n.iter().all(|f| n.iter().all(|h| g.compose(f, h).is_none_or(|k| n.contains(k))))
        })
        .collect()
}

pub fn check_open_subgroupoids(g: &FinGroupoid) -> CheckResult {
    timed("open-subgroupoids", |rec| {
        let found = g.open_subgroupoids()?;
        let mut listed: Vec<PointSet> = found.iter().map(|s| s.arrows).collect();
        listed.sort();
        let oracle = open_subgroupoids_by_filtering(g);
        if listed != oracle {
            rec.fail(format!("enumeration found {}, filtering found {}", listed.len(), oracle.len()));
        }
        for s in &found {
            if s.objects != g.dom_image(s.arrows) || s.objects != g.cod_image(s.arrows) {
                rec.fail(format!("{} has d(N) ≠ U or c(N) ≠ U", s.describe(g)));
            }
        }
        Ok(format!("{} open subgroupoids", found.len()))
    })
}

pub fn check_tset_bijection(site: &Site) -> CheckResult {
    timed("tset-bijection", |rec| {
        let mut pairs = 0;
        let mut morphisms = 0;
        for a in site.objects() {
            for b in site.objects() {
                pairs += 1;
                let tsets = site.hom(a, b)?;
                let mut graphs: Vec<EqMap> = tsets.iter().map(|t| t.graph()).collect::<Result<_>>()?;
                graphs.sort();
                let distinct = graphs.windows(2).all(|w| w[0] != w[1]);
                let oracle = enumerate_eq_maps(a.sheaf(), b.sheaf())?;
                morphisms += oracle.len();
                if !distinct || graphs != oracle {
                    rec.fail(format!(
                        "{} → {}: {} T-sets, {} equivariant maps",
                        a.describe(),
                        b.describe(),
                        tsets.len(),
                        oracle.len()
                    ));
                }
            }
        }
        Ok(format!("{pairs} object pairs, {morphisms} morphisms"))
    })
}

pub fn check_subobject_frames(site: &Site) -> CheckResult {
    timed("subobject-frames", |rec| {
        let mut count = 0;
        for a in site.objects() {
            let lattice = subobject_lattice(a)?;
            let sheaf = a.sheaf();
            let subs: Vec<PointSet> = lattice.opens.iter().map(|&v| lattice.sub_from_open(v)).collect();
            count += subs.len();
            // Independent oracle: action-closed opens of the total space.
            let mut oracle: Vec<PointSet> = sheaf
                .total()
                .opens()
                .into_iter()
                .filter(|&s| sheaf.is_action_closed(s))
                .collect();
            oracle.sort();
            let mut sorted = subs.clone();
            sorted.sort();
            if sorted != oracle {
                rec.fail(format!("{}: subobjects differ from the action-closed opens", a.describe()));
            }
            for (i, &v) in lattice.opens.iter().enumerate() {
                if lattice.open_from_sub(subs[i]) != v {
                    rec.fail(format!("{}: round trip fails at {:?}", a.describe(), site.groupoid().object_names(v)));
                }
                for (j, &w) in lattice.opens.iter().enumerate() {
                    let meet = lattice.sub_from_open(v.intersection(w));
                    let join = lattice.sub_from_open(v.union(w));
                    if meet != subs[i].intersection(subs[j]) || join != subs[i].union(subs[j]) {
                        rec.fail(format!("{}: meet or join not preserved", a.describe()));
                    }
                }
                let inclusion = lattice.inclusion(v)?;
                let graph = inclusion.graph()?;
                if !graph.is_injective() || graph.image() != subs[i] {
                    rec.fail(format!("{}: subobject at {:?} is not a site object", a.describe(), v));
                }
            }
            for &s in &subs {
                if lattice.sub_from_open(lattice.open_from_sub(s)) != s {
                    rec.fail(format!("{}: reverse round trip fails", a.describe()));
                }
            }
        }
        Ok(format!("{} objects, {count} subobjects", site.objects().len()))
    })
}

pub fn check_generation(site: &Site, bound: usize) -> CheckResult {
    timed("generation", |rec| {
        let g = site.groupoid();
        let sheaves = enumerate_sheaves(g, bound)?;
        for (k, r) in sheaves.iter().enumerate() {
            if !r.validate().action_open {
                rec.fail(format!("enumerated sheaf #{k} has a non-open action"));
            }
            if !gun_cover_check(r)? {
                rec.fail(format!("enumerated sheaf #{k} is not covered"));
            }
            for t in enumerate_sections(r) {
                if !section_to_morphism(r, &t)?.map.is_injective() {
                    rec.fail(format!("a lifted section of sheaf #{k} is not injective"));
                }
            }
        }
        for a in site.objects() {
            let report = a.sheaf().validate();
            if !report.is_valid() || !report.action_open || !a.gun().check_construction().is_empty() {
                rec.fail(format!("{} is not a well-formed sheaf", a.describe()));
            }
            if !gun_cover_check(a.sheaf())? {
                rec.fail(format!("{} is not covered", a.describe()));
            }
        }
        Ok(format!("{} sheaves with at most {bound} points", sheaves.len()))
    })
}

pub fn check_restriction(g: &Arc<FinGroupoid>) -> CheckResult {
    timed("restriction", |rec| {
        let mut inclusions = 0;
        let mut lifts = 0;
        for h0 in replete_subsets(g) {
            inclusions += 1;
            let restriction = Restriction::new(RepleteInclusion::new(g, h0)?)?;
            let report = restriction.verify()?;
            lifts += report.witnesses.len();
            if !report.all_ok() {
                let mut what = vec![];
                for (flag, name) in [
                    (report.pullback_iso, "pullback"),
                    (report.m_intersection, "m-intersection"),
                    (report.functorial, "functoriality"),
                    (report.comparison_gate, "comparison"),
                    (report.essentially_surjective, "I∘J"),
                    (report.essentially_full, "lifting"),
                ] {
                    if !flag {
                        what.push(name);
                    }
                }
                rec.fail(format!("H₀ = {:?}: {}", g.object_names(h0), what.join(", ")));
            }
        }
        Ok(format!("{inclusions} replete inclusions, {lifts} lifted morphisms"))
    })
}

pub fn check_domination(g: &Arc<FinGroupoid>) -> CheckResult {
    timed("domination", |rec| {
        let laws = verify_galois_laws(g)?;
        for f in &laws.failures {
            rec.fail(f.clone());
        }
        let table = DominationTable::new(g)?;
        let mut queries = 0;
        for h in subsets(g.all_objects()) {
            let closure = table.closure(h);
            for x in 0..g.num_objects() {
                queries += 1;
                let q = dominates(g, x, h)?;
                if q.result != closure.contains(x) || q.result != dominates_by_stalks(g, x, h)? {
                    rec.fail(format!("formulations disagree at {} over {:?}", g.objects().label(x), g.object_names(h)));
                }
                if let Some(w) = q.witness {
                    if !w.is_sound(g, x, h) {
                        rec.fail(format!("unsound witness at {}", g.objects().label(x)));
                    }
                }
            }
        }
        Ok(format!("{} subsets, {queries} queries", laws.subsets_scanned))
    })
}

pub fn check_derived_laws(site: &Site) -> CheckResult {
    timed("derived-laws", |rec| {
        let g = site.groupoid();
        let objects = site.objects();
        let homs: Vec<Vec<Vec<_>>> = objects
            .iter()
            .map(|a| objects.iter().map(|b| site.hom(a, b)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let mut composites = 0;
        for (i, a) in objects.iter().enumerate() {
            let id = identity_tset(a);
            if id.graph()? != EqMap::identity(a.sheaf()) {
                rec.fail(format!("identity of {} is not the identity map", a.describe()));
            }
            for j in 0..objects.len() {
                for t1 in &homs[i][j] {
                    if tset_compose(&id, t1)? != *t1 || tset_compose(t1, &identity_tset(&objects[j]))? != *t1 {
                        rec.fail(format!("identity is not neutral for {:?}", t1.arrow_names()));
                    }
                    for t2 in homs[j].iter().flatten() {
                        composites += 1;
                        let composite = tset_compose(t1, t2);
                        let expected = t1.graph()?.compose(&t2.graph()?);
                        match composite {
                            Ok(c) if c.graph()? == expected => {}
                            _ => rec.fail(format!(
                                "composite of {:?} and {:?} fails",
                                t1.arrow_names(),
                                t2.arrow_names()
                            )),
                        }
                    }
                }
            }
        }
        let mut comparisons = 0;
        for h0 in replete_subsets(g) {
            let restriction = Restriction::new(RepleteInclusion::new(g, h0)?)?;
            for a in restriction.ambient().objects() {
                comparisons += 1;
                let vhat = restriction.comparison_vhat(a)?;
                if restriction.comparison_oracle(a, &vhat.target) != Some(vhat.graph()?) {
                    rec.fail(format!("v̂ at {} over {:?} disagrees with [f] ↦ [f]", a.describe(), g.object_names(h0)));
                }
            }
        }
        Ok(format!("{composites} composites, {comparisons} comparisons"))
    })
}

/// Every check on one groupoid. A groupoid failing its axioms or openness
/// gets a single failed `validate` check.
pub fn run_suite(name: &str, g: FinGroupoid) -> GroupoidRun {
    let g = Arc::new(g);
    let mut checks = Vec::new();
    let validate = timed("validate", |rec| {
        let report = g.validate();
        for f in &report.failures {
            rec.fail(f.clone());
        }
        Ok(if report.all_ok() { "open groupoid".into() } else { "invalid".into() })
    });
    let valid = validate.passed;
    checks.push(validate);
    if valid {
        match Site::new(Arc::clone(&g)) {
            Ok(site) => {
                checks.push(check_open_subgroupoids(&g));
                checks.push(check_tset_bijection(&site));
                checks.push(check_subobject_frames(&site));
                checks.push(check_generation(&site, GENERATION_BOUND));
                checks.push(check_restriction(&g));
                checks.push(check_domination(&g));
                checks.push(check_derived_laws(&site));
            }
            Err(e) => checks.push(timed("site", |_| Err(e))),
        }
    }
    GroupoidRun { name: name.to_owned(), objects: g.num_objects(), arrows: g.num_arrows(), checks }
}
