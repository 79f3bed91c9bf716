//! Geometric domination and the closure operator it induces on sets of
//! objects.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{FinGroupoid, OpenSubgroupoid};
use crate::pointset::{subsets, PointSet};
use crate::site::{subobject_lattice, SiteObject};

/// Above this many objects, [`verify_galois_laws`] samples subsets.
pub const EXHAUSTIVE_OBJECTS: usize = 12;
pub const SAMPLED_SUBSETS: usize = 512;
pub const SAMPLE_SEED: u64 = 0x5eed;

/// `((U, N), V, W, f)`: the points of `H₀` satisfy `V ⇒ W` over `(U, N)`
/// but the arrow `f` into `x` starts in `V` and not in `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub sub: OpenSubgroupoid,
    pub v: PointSet,
    pub w: PointSet,
    pub arrow: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationQuery {
    pub x: usize,
    pub h0: PointSet,
    pub result: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessView {
    pub subgroupoid: String,
    pub v: Vec<String>,
    pub w: Vec<String>,
    pub arrow: String,
}

impl Witness {
    pub fn view(&self, g: &FinGroupoid) -> WitnessView {
        WitnessView {
            subgroupoid: self.sub.describe(g),
            v: g.object_names(self.v),
            w: g.object_names(self.w),
            arrow: g.arrows().label(self.arrow).to_owned(),
        }
    }

    /// Re-checks every clause of the witness from scratch.
    pub fn is_sound(&self, g: &FinGroupoid, x: usize, h0: PointSet) -> bool {
        let objects = g.objects();
        let sub_ok = OpenSubgroupoid::new(g, self.sub.arrows).is_ok_and(|s| s == self.sub);
        let vw_ok = [self.v, self.w]
            .iter()
            .all(|&s| objects.is_open(s) && s.is_subset(self.sub.objects) && self.sub.closes(g, s));
        let premise = g
            .cod_preimage(h0)
            .intersection(g.dom_preimage(self.v))
            .is_subset(g.dom_preimage(self.w));
        let f = self.arrow;
        let violates = g.cod(f) == x && self.v.contains(g.dom(f)) && !self.w.contains(g.dom(f));
        sub_ok && vw_ok && premise && violates
    }
}

/// `y` satisfies `V ⇒ W`: every arrow into `y` starting in `V` starts in `W`.
fn satisfies(g: &FinGroupoid, y: usize, v: PointSet, w: PointSet) -> bool {
    g.arrows_into(y).intersection(g.dom_preimage(v)).is_subset(g.dom_preimage(w))
}

fn check_point(g: &FinGroupoid, x: usize) -> Result<()> {
    if x >= g.num_objects() {
        return Err(Error::UnknownPoint(x.to_string()));
    }
    Ok(())
}

fn check_subset(g: &FinGroupoid, h0: PointSet) -> Result<()> {
    if !h0.is_subset(g.all_objects()) {
        return Err(Error::InvalidSubset);
    }
    Ok(())
}

/// Scans every `(U, N)` and every pair of `N`-closed opens `V, W ⊆ U`, in
/// order, and stops at the first violation.
pub fn dominates(g: &FinGroupoid, x: usize, h0: PointSet) -> Result<DominationQuery> {
    check_point(g, x)?;
    check_subset(g, h0)?;
    for sub in g.open_subgroupoids()? {
        let opens = sub.closed_opens(g);
        for &v in &opens {
            for &w in &opens {
                if !h0.iter().all(|y| satisfies(g, y, v, w)) {
                    continue;
                }
                let bad = g.arrows_into(x).intersection(g.dom_preimage(v)).difference(g.dom_preimage(w));
                if let Some(arrow) = bad.first() {
                    let witness = Witness { sub, v, w, arrow };
                    return Ok(DominationQuery { x, h0, result: false, witness: Some(witness) });
                }
            }
        }
    }
    Ok(DominationQuery { x, h0, result: true, witness: None })
}

/// The same question asked of stalks: for all site objects `A` and
/// subobjects `P, Q ≤ A`, if `P_y ⊆ Q_y` for every `y ∈ H₀` then
/// `P_x ⊆ Q_x`.
pub fn dominates_by_stalks(g: &Arc<FinGroupoid>, x: usize, h0: PointSet) -> Result<bool> {
    check_point(g, x)?;
    check_subset(g, h0)?;
    for sub in g.open_subgroupoids()? {
        let a = SiteObject::new(g, sub)?;
        let lattice = subobject_lattice(&a)?;
        let subs: Vec<PointSet> = lattice.opens.iter().map(|&v| lattice.sub_from_open(v)).collect();
        let sheaf = a.sheaf();
        let stalk_le = |p: PointSet, q: PointSet, y: usize| {
            let s = sheaf.stalk(y);
            p.intersection(s).is_subset(q.intersection(s))
        };
        for &p in &subs {
            for &q in &subs {
                if h0.iter().all(|y| stalk_le(p, q, y)) && !stalk_le(p, q, x) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// For each `(U, N, V, W)`, the set of objects satisfying `V ⇒ W`,
/// deduplicated. The closure of `H₀` is the intersection of those that
/// contain it.
#[derive(Clone, Debug)]
pub struct DominationTable {
    all: PointSet,
    satisfying: Vec<PointSet>,
}

impl DominationTable {
    pub fn new(g: &FinGroupoid) -> Result<Self> {
        let mut satisfying = Vec::new();
        for sub in g.open_subgroupoids()? {
            let opens = sub.closed_opens(g);
            for &v in &opens {
                for &w in &opens {
                    satisfying.push((0..g.num_objects()).filter(|&y| satisfies(g, y, v, w)).collect());
                }
            }
        }
        satisfying.sort();
        satisfying.dedup();
        Ok(DominationTable { all: g.all_objects(), satisfying })
    }

    pub fn closure(&self, h0: PointSet) -> PointSet {
        self.satisfying
            .iter()
            .filter(|s| h0.is_subset(**s))
            .fold(self.all, |acc, &s| acc.intersection(s))
    }
}

/// `{x : x dominates H₀}`.
pub fn gd_closure(g: &FinGroupoid, h0: PointSet) -> Result<PointSet> {
    check_subset(g, h0)?;
    Ok(DominationTable::new(g)?.closure(h0))
}

/// A replete `H₀` is definable when it is closed under domination.
pub fn is_definable(g: &FinGroupoid, h0: PointSet) -> Result<bool> {
    check_subset(g, h0)?;
    if let Some(arrow) = g.crossing_arrow(h0) {
        return Err(Error::NotReplete { arrow: g.arrows().label(arrow).to_owned() });
    }
    Ok(gd_closure(g, h0)? == h0)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GaloisReport {
    pub subsets_scanned: usize,
    pub sampled: bool,
    pub extensive: bool,
    pub monotone: bool,
    pub idempotent: bool,
    pub replete: bool,
    pub open_replete_closed: bool,
    pub closed_replete_closed: bool,
    pub failures: Vec<String>,
}

impl GaloisReport {
    pub fn all_ok(&self) -> bool {
        self.extensive
            && self.monotone
            && self.idempotent
            && self.replete
            && self.open_replete_closed
            && self.closed_replete_closed
    }
}

/// The subsets the laws are checked on: all of them, or a fixed-seed
/// sample above [`EXHAUSTIVE_OBJECTS`] objects.
pub fn law_subsets(g: &FinGroupoid) -> (Vec<PointSet>, bool) {
    let n = g.num_objects();
    if n <= EXHAUSTIVE_OBJECTS {
        return (subsets(g.all_objects()).collect(), false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let sample = (0..SAMPLED_SUBSETS)
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    (sample, true)
}

pub fn verify_galois_laws(g: &FinGroupoid) -> Result<GaloisReport> {
    let table = DominationTable::new(g)?;
    let (family, sampled) = law_subsets(g);
    let names = |s: PointSet| format!("{{{}}}", g.object_names(s).join(","));
    let mut report = GaloisReport {
        subsets_scanned: family.len(),
        sampled,
        extensive: true,
        monotone: true,
        idempotent: true,
        replete: true,
        open_replete_closed: true,
        closed_replete_closed: true,
        failures: Vec::new(),
    };
    for &h in &family {
        let closure = table.closure(h);
        if !h.is_subset(closure) {
            report.extensive = false;
            report.failures.push(format!("closure of {} is not extensive", names(h)));
        }
        if table.closure(closure) != closure {
            report.idempotent = false;
            report.failures.push(format!("closure of {} is not idempotent", names(h)));
        }
        if !g.is_replete(closure) {
            report.replete = false;
            report.failures.push(format!("closure of {} is not replete", names(h)));
        }
        // Monotonicity along single-point extensions implies it for all
        // nested pairs.
        for x in g.all_objects().difference(h).iter() {
            if !closure.is_subset(table.closure(h.with(x))) {
                report.monotone = false;
                report.failures.push(format!("closure is not monotone at {} + {}", names(h), g.objects().label(x)));
            }
        }
        if g.is_replete(h) {
            let open = g.objects().is_open(h);
            let closed = g.objects().is_closed(h);
            if open && closure != h {
                report.open_replete_closed = false;
                report.failures.push(format!("open replete {} is not domination-closed", names(h)));
            }
            if closed && closure != h {
                report.closed_replete_closed = false;
                report.failures.push(format!("closed replete {} is not domination-closed", names(h)));
            }
        }
    }
    Ok(report)
}
