//! Equivariant sheaves `⟨r: R → G₀, ρ⟩` over a finite groupoid, the
//! sheaves `⟨G, U, N⟩`, stalks, section lifting and brute-force
//! enumeration of equivariant maps and of small equivariant sheaves.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fintop::{self, CtsMap, FinSpace};
use crate::groupoid::{FinGroupoid, GroupoidMorphism, OpenSubgroupoid};
use crate::pointset::PointSet;

#[derive(Clone, Debug)]
pub struct EqSheaf {
    groupoid: Arc<FinGroupoid>,
    total: FinSpace,
    proj: Vec<usize>,
    /// `action[g * |R| + p] = ρ(g, p)`, defined when `d(g) = r(p)`.
    action: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SheafReport {
    pub local_homeo: bool,
    pub action_defined: bool,
    pub action_fibers: bool,
    pub unit_law: bool,
    pub composition_law: bool,
    pub action_continuous: bool,
    pub action_open: bool,
    pub failures: Vec<String>,
}

impl SheafReport {
    /// Every equivariant-sheaf axiom. Openness of the action is a
    /// consequence for open groupoids and is reported separately.
    pub fn is_valid(&self) -> bool {
        self.local_homeo
            && self.action_defined
            && self.action_fibers
            && self.unit_law
            && self.composition_law
            && self.action_continuous
    }
}

pub fn same_groupoid(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl EqSheaf {
    /// Wraps raw data; `action` lists `((g, p), ρ(g, p))`. Only ranges are
    /// checked here; see [`EqSheaf::validate`].
    pub fn new(
        groupoid: Arc<FinGroupoid>,
        total: FinSpace,
        proj: Vec<usize>,
        action: impl IntoIterator<Item = ((usize, usize), usize)>,
    ) -> Result<Self> {
        let n = total.len();
        if proj.len() != n || proj.iter().any(|&x| x >= groupoid.num_objects()) {
            return Err(Error::InvalidMap("projection is not a map into G₀".into()));
        }
        let mut table = vec![None; groupoid.num_arrows() * n];
        for ((g, p), q) in action {
            if g >= groupoid.num_arrows() || p >= n || q >= n {
                return Err(Error::InvalidInput("action entry out of range".into()));
            }
            table[g * n + p] = Some(q);
        }
        Ok(EqSheaf { groupoid, total, proj, action: table })
    }

    /// The sheaf with no elements.
    pub fn empty(groupoid: Arc<FinGroupoid>) -> Self {
        EqSheaf { groupoid, total: FinSpace::discrete::<&str>(&[]), proj: vec![], action: vec![] }
    }

    pub fn groupoid(&self) -> &Arc<FinGroupoid> {
        &self.groupoid
    }

    pub fn total(&self) -> &FinSpace {
        &self.total
    }

    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }

    pub fn proj(&self, p: usize) -> usize {
        self.proj[p]
    }

    pub fn proj_map(&self) -> &[usize] {
        &self.proj
    }

    /// `ρ(g, p)` when defined.
    pub fn act(&self, g: usize, p: usize) -> Option<usize> {
        self.action[g * self.len() + p]
    }

    /// `((g, p), ρ(g, p))` for every defined entry.
    pub fn action_entries(&self) -> Vec<((usize, usize), usize)> {
        let n = self.len();
        self.action
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|q| ((k / n.max(1), k % n.max(1)), q)))
            .collect()
    }

    /// The fibre `r⁻¹(x)`.
    pub fn stalk(&self, x: usize) -> PointSet {
        fintop::preimage(&self.proj, PointSet::singleton(x))
    }

    pub fn stalk_of(&self, object: &str) -> Result<PointSet> {
        let x = self
            .groupoid
            .objects()
            .index_of(object)
            .ok_or_else(|| Error::UnknownPoint(object.to_owned()))?;
        Ok(self.stalk(x))
    }

    /// Points `(g, p)` of `G₁ ×_{G₀} R` with `d(g) = r(p)`.
    pub fn action_domain(&self) -> Result<(FinSpace, Vec<(usize, usize)>)> {
        let g = &*self.groupoid;
        fintop::fiber_product_raw(g.arrows(), g.dom_map(), &self.total, &self.proj)
    }

    /// Whether `s` is closed under the action.
    pub fn is_action_closed(&self, s: PointSet) -> bool {
        s.iter().all(|p| {
            self.groupoid
                .arrows_out_of(self.proj[p])
                .iter()
                .all(|g| self.act(g, p).is_some_and(|q| s.contains(q)))
        })
    }

    pub fn validate(&self) -> SheafReport {
        let g = &*self.groupoid;
        let mut failures = Vec::new();
        let local_homeo = fintop::map_report(&self.total, g.objects(), &self.proj).local_homeo;
        if !local_homeo {
            failures.push("projection is not a local homeomorphism".into());
        }
        let plabel = |p: usize| self.total.label(p).to_owned();
        let glabel = |a: usize| g.arrows().label(a).to_owned();

        let mut action_defined = true;
        for a in 0..g.num_arrows() {
            for p in 0..self.len() {
                if self.act(a, p).is_some() != (g.dom(a) == self.proj[p]) {
                    action_defined = false;
                    failures.push(format!("action at ({}, {}) is defined off the fibre product", glabel(a), plabel(p)));
                }
            }
        }
        let defined = |a: usize, p: usize| self.act(a, p);
        let mut action_fibers = true;
        let mut unit_law = true;
        let mut composition_law = true;
        for p in 0..self.len() {
            let x = self.proj[p];
            if defined(g.unit(x), p) != Some(p) {
                unit_law = false;
                failures.push(format!("unit law fails at {}", plabel(p)));
            }
            for a in g.arrows_out_of(x).iter() {
                let Some(q) = defined(a, p) else { continue };
                if self.proj[q] != g.cod(a) {
                    action_fibers = false;
                    failures.push(format!("ρ({}, {}) lies over the wrong object", glabel(a), plabel(p)));
                    continue;
                }
                for b in g.arrows_out_of(g.cod(a)).iter() {
                    let lhs = defined(b, q);
                    let rhs = g.compose(b, a).and_then(|ba| defined(ba, p));
                    if lhs != rhs {
                        composition_law = false;
                        failures.push(format!(
                            "composition law fails at ({}, {}, {})",
                            glabel(b),
                            glabel(a),
                            plabel(p)
                        ));
                    }
                }
            }
        }
        let (mut action_continuous, mut action_open) = (false, false);
        if action_defined {
            match self.action_domain() {
                Ok((space, pairs)) => {
                    let rho: Vec<usize> = pairs.iter().map(|&(a, p)| self.act(a, p).unwrap()).collect();
                    action_continuous = fintop::is_continuous(&space, &self.total, &rho);
                    action_open = fintop::is_open_map(&space, &self.total, &rho);
                }
                Err(e) => failures.push(e.to_string()),
            }
        }
        if !action_continuous {
            failures.push("action is not continuous".into());
        }
        SheafReport {
            local_homeo,
            action_defined,
            action_fibers,
            unit_law,
            composition_law,
            action_continuous,
            action_open,
            failures,
        }
    }

    /// `f*(R)` for a functor `f: H → G`: the fibre product `H₀ ×_{G₀} R`
    /// acted on through `f₁`. Points are `(y, p)` in lexicographic order.
    pub fn pullback(&self, f: &GroupoidMorphism) -> Result<(EqSheaf, Vec<(usize, usize)>)> {
        if !same_groupoid(&f.target, &self.groupoid) {
            return Err(Error::AmbientMismatch);
        }
        let h = &f.source;
        let (space, pairs) = fintop::fiber_product_raw(h.objects(), &f.on_objects, &self.total, &self.proj)?;
        let proj = pairs.iter().map(|&(y, _)| y).collect();
        let mut action = Vec::new();
        for (k, &(y, p)) in pairs.iter().enumerate() {
            for a in h.arrows_out_of(y).iter() {
                if let Some(q) = self.act(f.on_arrows[a], p) {
                    let target = (h.cod(a), q);
                    if let Some(j) = pairs.iter().position(|&pq| pq == target) {
                        action.push(((a, k), j));
                    }
                }
            }
        }
        Ok((EqSheaf::new(Arc::clone(h), space, proj, action)?, pairs))
    }
}

/// A map of total spaces between two sheaves over the same groupoid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EqMap {
    pub graph: Vec<usize>,
}

impl EqMap {
    pub fn identity(a: &EqSheaf) -> Self {
        EqMap { graph: (0..a.len()).collect() }
    }

    /// Continuous, fibre-preserving and commuting with the actions.
    pub fn is_valid(&self, a: &EqSheaf, b: &EqSheaf) -> bool {
        let g = &*a.groupoid;
        self.graph.len() == a.len()
            && self.graph.iter().all(|&q| q < b.len())
            && (0..a.len()).all(|p| b.proj[self.graph[p]] == a.proj[p])
            && (0..a.len()).all(|p| {
                g.arrows_out_of(a.proj[p]).iter().all(|h| {
                    let left = a.act(h, p).map(|q| self.graph[q]);
                    let right = b.act(h, self.graph[p]);
                    left == right
                })
            })
            && fintop::is_continuous(&a.total, &b.total, &self.graph)
    }

    pub fn is_injective(&self) -> bool {
        let image: PointSet = self.graph.iter().copied().collect();
        image.len() == self.graph.len()
    }

    pub fn image(&self) -> PointSet {
        self.graph.iter().copied().collect()
    }

    pub fn compose(&self, after: &EqMap) -> EqMap {
        EqMap { graph: self.graph.iter().map(|&q| after.graph[q]).collect() }
    }

    /// The inverse, when this is an isomorphism `a → b` of sheaves.
    pub fn inverse(&self, a: &EqSheaf, b: &EqSheaf) -> Option<EqMap> {
        if self.graph.len() != a.len() || a.len() != b.len() || !self.is_injective() {
            return None;
        }
        let mut inv = vec![0; b.len()];
        for (p, &q) in self.graph.iter().enumerate() {
            inv[q] = p;
        }
        let inv = EqMap { graph: inv };
        (self.is_valid(a, b) && inv.is_valid(b, a)).then_some(inv)
    }
}

/// Every equivariant map `a → b`, in lexicographic order of graphs.
pub fn enumerate_eq_maps(a: &EqSheaf, b: &EqSheaf) -> Result<Vec<EqMap>> {
    if !same_groupoid(&a.groupoid, &b.groupoid) {
        return Err(Error::AmbientMismatch);
    }
    let g = &*a.groupoid;
    let mut out = Vec::new();
    let mut graph: Vec<Option<usize>> = vec![None; a.len()];

    // Assigning one point forces its whole orbit; propagate and report
    // whether the forced values are consistent.
    fn propagate(g: &FinGroupoid, a: &EqSheaf, b: &EqSheaf, graph: &mut [Option<usize>], start: usize) -> bool {
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            let fp = graph[p].unwrap();
            for h in g.arrows_out_of(a.proj[p]).iter() {
                let (Some(q), Some(fq)) = (a.act(h, p), b.act(h, fp)) else {
                    return false;
                };
                match graph[q] {
                    Some(existing) if existing != fq => return false,
                    Some(_) => {}
                    None => {
                        graph[q] = Some(fq);
                        stack.push(q);
                    }
                }
            }
        }
        true
    }

    fn search(g: &FinGroupoid, a: &EqSheaf, b: &EqSheaf, graph: &mut [Option<usize>], out: &mut Vec<EqMap>) {
        let Some(p) = graph.iter().position(Option::is_none) else {
            let map = EqMap { graph: graph.iter().map(|v| v.unwrap()).collect() };
            if map.is_valid(a, b) {
                out.push(map);
            }
            return;
        };
        for q in b.stalk(a.proj[p]).iter() {
            let mut trial = graph.to_vec();
            trial[p] = Some(q);
            if propagate(g, a, b, &mut trial, p) {
                search(g, a, b, &mut trial, out);
            }
        }
    }

    search(g, a, b, &mut graph, &mut out);
    out.sort();
    Ok(out)
}

/// The sheaf `⟨G, U, N⟩ = d⁻¹(U)/∼_N` with codomain projection and action
/// by composition.
#[derive(Clone, Debug)]
pub struct GunSheaf {
    base: OpenSubgroupoid,
    sheaf: EqSheaf,
    /// Arrow classes; class `k` is point `k` of the total space.
    classes: Vec<PointSet>,
    class_of: Vec<Option<usize>>,
    quotient: CtsMap,
}

/// `f ∼_N g` iff `c(f) = c(g)` and `g⁻¹ ∘ f ∈ N`.
pub fn related(g: &FinGroupoid, n: PointSet, f: usize, h: usize) -> bool {
    g.cod(f) == g.cod(h) && g.compose(g.inverse(h), f).is_some_and(|k| n.contains(k))
}

impl GunSheaf {
    pub fn build(g: &Arc<FinGroupoid>, sub: OpenSubgroupoid) -> Result<Self> {
        if !g.is_open() {
            return Err(Error::NotOpenGroupoid);
        }
        let checked = OpenSubgroupoid::new(g, sub.arrows)?;
        if checked.objects != sub.objects {
            return Err(Error::InvalidSubgroupoid("objects differ from d(N)".into()));
        }
        let carrier = g.dom_preimage(sub.objects);
        // Classes in order of their smallest-label member.
        let mut members: Vec<usize> = carrier.iter().collect();
        members.sort_by(|&a, &b| g.arrows().label(a).cmp(g.arrows().label(b)));
        let mut classes: Vec<PointSet> = Vec::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut class_of = vec![None; g.num_arrows()];
        for &f in &members {
            if class_of[f].is_some() {
                continue;
            }
            let class: PointSet = members.iter().copied().filter(|&h| related(g, sub.arrows, h, f)).collect();
            for h in class.iter() {
                class_of[h] = Some(classes.len());
            }
            classes.push(class);
            reps.push(f);
        }
        let domain = g.arrows().subspace(carrier)?;
        let local: Vec<usize> = carrier.iter().collect();
        let local_classes: Vec<PointSet> = classes
            .iter()
            .map(|c| local.iter().enumerate().filter(|(_, &h)| c.contains(h)).map(|(i, _)| i).collect())
            .collect();
        let labels = reps.iter().map(|&f| format!("[{}]", g.arrows().label(f))).collect();
        let (total, quotient) = domain.quotient_labelled(&local_classes, labels)?;
        let proj = reps.iter().map(|&f| g.cod(f)).collect();
        let mut action = Vec::new();
        for (k, &f) in reps.iter().enumerate() {
            for h in g.arrows_out_of(g.cod(f)).iter() {
                let hf = g.comp(h, f);
                action.push(((h, k), class_of[hf].expect("d⁻¹(U) is closed under postcomposition")));
            }
        }
        let sheaf = EqSheaf::new(Arc::clone(g), total, proj, action)?;
        Ok(GunSheaf { base: sub, sheaf, classes, class_of, quotient })
    }

    pub fn base(&self) -> OpenSubgroupoid {
        self.base
    }

    pub fn sheaf(&self) -> &EqSheaf {
        &self.sheaf
    }

    pub fn classes(&self) -> &[PointSet] {
        &self.classes
    }

    /// The class `[f]`, for `f ∈ d⁻¹(U)`.
    pub fn class_of(&self, f: usize) -> Option<usize> {
        self.class_of[f]
    }

    /// The quotient map `d⁻¹(U) → d⁻¹(U)/∼_N`.
    pub fn quotient_map(&self) -> &CtsMap {
        &self.quotient
    }

    /// `x ↦ [1ₓ]` on `U`, as a section indexed by object.
    pub fn canonical_section(&self) -> Section {
        let g = self.sheaf.groupoid();
        let values = (0..g.num_objects())
            .map(|x| self.base.objects.contains(x).then(|| self.class_of[g.unit(x)].unwrap()))
            .collect();
        Section { domain: self.base.objects, values }
    }

    /// Checks the invariants specific to `⟨G, U, N⟩`: the classes are the
    /// `∼_N` classes, the quotient map is an open surjection and the action
    /// is composition. Sheaf axioms are in [`EqSheaf::validate`].
    pub fn check_construction(&self) -> Vec<String> {
        let g = self.sheaf.groupoid();
        let mut failures = Vec::new();
        let carrier = g.dom_preimage(self.base.objects);
        for f in carrier.iter() {
            for h in carrier.iter() {
                let same = self.class_of[f] == self.class_of[h];
                if same != related(g, self.base.arrows, f, h) {
                    failures.push(format!("class of {} disagrees with ∼_N", g.arrows().label(f)));
                }
            }
        }
        let report = self.quotient.check();
        let surjective = self.quotient.image(self.quotient.source().all()) == self.sheaf.total().all();
        if !(report.continuous && report.open_map && surjective) {
            failures.push("quotient map is not an open surjection".into());
        }
        for f in carrier.iter() {
            for h in g.arrows_out_of(g.cod(f)).iter() {
                let expect = self.class_of[g.comp(h, f)];
                if self.sheaf.act(h, self.class_of[f].unwrap()) != expect {
                    failures.push("action is not composition".into());
                }
            }
        }
        failures
    }
}

/// A partial section `t: U → R` of a sheaf projection, indexed by object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub domain: PointSet,
    pub values: Vec<Option<usize>>,
}

impl Section {
    fn value(&self, x: usize) -> usize {
        self.values[x].expect("section defined on its domain")
    }
}

/// `N_t` and the lifted morphism `t̂: ⟨G, U, N_t⟩ → R`.
#[derive(Clone, Debug)]
pub struct SectionLift {
    pub base: OpenSubgroupoid,
    pub source: GunSheaf,
    pub map: EqMap,
}

/// Lifts a continuous section `t: U → R` over an open `U` to the morphism
/// `t̂([f]) = ρ(f, t(d(f)))` out of `⟨G, U, N_t⟩`, where `N_t` is the set of
/// arrows of `U` fixing `t`.
pub fn section_to_morphism(r: &EqSheaf, t: &Section) -> Result<SectionLift> {
    let g = r.groupoid();
    let u = t.domain;
    if !g.objects().is_open(u) {
        return Err(Error::InvalidInput("section domain is not open".into()));
    }
    for x in 0..g.num_objects() {
        match t.values[x] {
            Some(p) if !u.contains(x) || p >= r.len() || r.proj(p) != x => return Err(Error::NotASection),
            None if u.contains(x) => return Err(Error::NotASection),
            _ => {}
        }
    }
    if !section_is_continuous(r, t) {
        return Err(Error::NotContinuous);
    }
    let candidates = g.dom_preimage(u).intersection(g.cod_preimage(u));
    let n_t: PointSet = candidates
        .iter()
        .filter(|&f| r.act(f, t.value(g.dom(f))) == Some(t.value(g.cod(f))))
        .collect();
    let base = OpenSubgroupoid::new(g, n_t)?;
    let source = GunSheaf::build(g, base)?;
    let graph = source
        .classes()
        .iter()
        .map(|c| {
            let f = c.first().unwrap();
            r.act(f, t.value(g.dom(f))).expect("action defined on d⁻¹(U)")
        })
        .collect();
    Ok(SectionLift { base, source, map: EqMap { graph } })
}

/// Continuity of `t: U → R` on the subspace `U` of `G₀`.
pub fn section_is_continuous(r: &EqSheaf, t: &Section) -> bool {
    let objects = r.groupoid().objects();
    t.domain.iter().all(|x| {
        let near = objects.nbhd(x).intersection(t.domain);
        near.iter().all(|y| r.total().nbhd(t.value(x)).contains(t.value(y)))
    })
}

/// Every continuous section over every open subset of `G₀`.
pub fn enumerate_sections(r: &EqSheaf) -> Vec<Section> {
    let g = r.groupoid();
    let mut out = Vec::new();
    for u in g.objects().opens() {
        let points: Vec<usize> = u.iter().collect();
        let mut values = vec![None; g.num_objects()];
        fn fill(r: &EqSheaf, u: PointSet, points: &[usize], i: usize, values: &mut Vec<Option<usize>>, out: &mut Vec<Section>) {
            if i == points.len() {
                let t = Section { domain: u, values: values.clone() };
                if section_is_continuous(r, &t) {
                    out.push(t);
                }
                return;
            }
            for p in r.stalk(points[i]).iter() {
                values[points[i]] = Some(p);
                fill(r, u, points, i + 1, values, out);
            }
            values[points[i]] = None;
        }
        fill(r, u, &points, 0, &mut values, &mut out);
    }
    out
}

/// Whether the images of all lifted sections `t̂` jointly cover `R`.
pub fn gun_cover_check(r: &EqSheaf) -> Result<bool> {
    let mut covered = PointSet::EMPTY;
    for t in enumerate_sections(r) {
        let lift = section_to_morphism(r, &t)?;
        covered = covered.union(lift.map.image());
    }
    Ok(covered == r.total().all())
}

/// Every equivariant sheaf over `g` whose total space has at most
/// `max_total` points, up to the labelling of points within each stalk
/// being fixed as `x.0, x.1, ...`.
///
/// A sheaf on a finite space is a stalk per point plus restriction maps
/// `stalk(x) → stalk(y)` for `y` in the minimal neighbourhood of `x`,
/// functorial in the specialisation order. The action then assigns a
/// bijection of stalks to every arrow.
pub fn enumerate_sheaves(g: &Arc<FinGroupoid>, max_total: usize) -> Result<Vec<EqSheaf>> {
    let n0 = g.num_objects();
    let mut out = Vec::new();
    let mut sizes = vec![0usize; n0];
    loop {
        if sizes.iter().sum::<usize>() <= max_total {
            sheaves_with_sizes(g, &sizes, &mut out)?;
        }
        // odometer over stalk sizes
        let mut i = 0;
        loop {
            if i == n0 {
                return Ok(out);
            }
            sizes[i] += 1;
            if sizes.iter().sum::<usize>() <= max_total {
                break;
            }
            sizes[i] = 0;
            i += 1;
        }
    }
}

fn sheaves_with_sizes(g: &Arc<FinGroupoid>, sizes: &[usize], out: &mut Vec<EqSheaf>) -> Result<()> {
    let objects = g.objects();
    let n0 = g.num_objects();
    let mut offset = vec![0; n0 + 1];
    for x in 0..n0 {
        offset[x + 1] = offset[x] + sizes[x];
    }
    let total_len = offset[n0];
    let labels: Vec<String> = (0..n0)
        .flat_map(|x| (0..sizes[x]).map(move |k| (x, k)))
        .map(|(x, k)| format!("{}.{}", objects.label(x), k))
        .collect();
    let proj: Vec<usize> = (0..n0).flat_map(|x| std::iter::repeat_n(x, sizes[x])).collect();

    // Restriction pairs (x, y), y ≠ x in the minimal neighbourhood of x.
    let pairs: Vec<(usize, usize)> = (0..n0)
        .flat_map(|x| objects.nbhd(x).iter().filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let actions = enumerate_actions(g, sizes);
    if actions.is_empty() {
        return Ok(());
    }
    let mut restrictions: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut current = vec![vec![]; pairs.len()];
    collect_functions(sizes, &pairs, 0, &mut current, &mut restrictions);

    for res in restrictions {
        let lookup = |x: usize, y: usize, k: usize| -> usize {
            if x == y {
                k
            } else {
                res[pairs.iter().position(|&p| p == (x, y)).unwrap()][k]
            }
        };
        // Functoriality along z ∈ U_y ⊆ U_x.
        let functorial = pairs.iter().all(|&(x, y)| {
            objects.nbhd(y).iter().all(|z| {
                (0..sizes[x]).all(|k| lookup(y, z, lookup(x, y, k)) == lookup(x, z, k))
            })
        });
        if !functorial {
            continue;
        }
        let nbhd: Vec<PointSet> = (0..n0)
            .flat_map(|x| (0..sizes[x]).map(move |k| (x, k)))
            .map(|(x, k)| objects.nbhd(x).iter().map(|y| offset[y] + lookup(x, y, k)).collect())
            .collect();
        let total = FinSpace::from_neighbourhoods(labels.clone(), nbhd)?;
        if !fintop::map_report(&total, objects, &proj).local_homeo {
            continue;
        }
        let shell = EqSheaf::new(Arc::clone(g), total, proj.clone(), std::iter::empty())?;
        for action in &actions {
            let mut sheaf = shell.clone();
            for a in 0..g.num_arrows() {
                let (d, c) = (g.dom(a), g.cod(a));
                for k in 0..sizes[d] {
                    sheaf.action[a * total_len + offset[d] + k] = Some(offset[c] + action[a][k]);
                }
            }
            if sheaf.validate().is_valid() {
                out.push(sheaf);
            }
        }
    }
    Ok(())
}

fn collect_functions(
    sizes: &[usize],
    pairs: &[(usize, usize)],
    i: usize,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if i == pairs.len() {
        out.push(current.clone());
        return;
    }
    let (x, y) = pairs[i];
    if sizes[x] > 0 && sizes[y] == 0 {
        return;
    }
    let mut f = vec![0; sizes[x]];
    loop {
        current[i] = f.clone();
        collect_functions(sizes, pairs, i + 1, current, out);
        let mut j = 0;
        loop {
            if j == f.len() {
                return;
            }
            f[j] += 1;
            if f[j] < sizes[y] {
                break;
            }
            f[j] = 0;
            j += 1;
        }
    }
}

/// Groupoid actions on stalks of the given sizes: one bijection per arrow,
/// identities fixed, and every composite of assigned arrows propagated
/// before the next choice.
fn enumerate_actions(g: &FinGroupoid, sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if (0..g.num_arrows()).any(|a| sizes[g.dom(a)] != sizes[g.cod(a)]) {
        return Vec::new();
    }
    let pairs = g.composable_pairs();
    let mut out = Vec::new();
    let mut assigned: Vec<Option<Vec<usize>>> = vec![None; g.num_arrows()];
    for x in 0..g.num_objects() {
        assigned[g.unit(x)] = Some((0..sizes[x]).collect());
    }

    fn close(g: &FinGroupoid, pairs: &[(usize, usize)], assigned: &mut [Option<Vec<usize>>]) -> bool {
        loop {
            let mut changed = false;
            for &(b, a) in pairs {
                let (Some(fb), Some(fa)) = (&assigned[b], &assigned[a]) else { continue };
                let product: Vec<usize> = fa.iter().map(|&k| fb[k]).collect();
                let h = g.comp(b, a);
                match &assigned[h] {
                    Some(fh) if *fh != product => return false,
                    Some(_) => {}
                    None => {
                        assigned[h] = Some(product);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(
        g: &FinGroupoid,
        pairs: &[(usize, usize)],
        sizes: &[usize],
        assigned: &[Option<Vec<usize>>],
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let Some(a) = assigned.iter().position(Option::is_none) else {
            out.push(assigned.iter().map(|v| v.clone().unwrap()).collect());
            return;
        };
        for perm in permutations(sizes[g.dom(a)]) {
            let mut trial = assigned.to_vec();
            trial[a] = Some(perm);
            if close(g, pairs, &mut trial) {
                search(g, pairs, sizes, &trial, out);
            }
        }
    }

    if close(g, &pairs, &mut assigned) {
        search(g, &pairs, sizes, &assigned, &mut out);
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::preset;

    fn arc(name: &str) -> Arc<FinGroupoid> {
        Arc::new(preset(name).unwrap())
    }

    fn sub(g: &FinGroupoid, arrows: &[&str]) -> OpenSubgroupoid {
        OpenSubgroupoid::from_names(g, arrows).unwrap()
    }

    fn labels(r: &EqSheaf, s: PointSet) -> Vec<String> {
        r.total().names(s)
    }

    #[test]
    fn regular_z2_sheaf() {
        let z2 = arc("Z2");
        let gun = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        let r = gun.sheaf();
        assert_eq!(r.total().labels(), ["[1]", "[s]"]);
        let s = z2.arrows().index_of("s").unwrap();
        assert_eq!(r.act(s, 0), Some(1));
        assert!(r.validate().is_valid());
        assert!(gun.check_construction().is_empty());
        assert_eq!(labels(r, r.stalk(0)), ["[1]", "[s]"]);
    }

    #[test]
    fn pair_groupoid_total_sheaf() {
        let p2 = arc("P2");
        let gun = GunSheaf::build(&p2, OpenSubgroupoid::total(&p2)).unwrap();
        assert_eq!(gun.classes().len(), 2);
        let r = gun.sheaf();
        assert_eq!(r.stalk_of("a").unwrap().len(), 1);
        assert_eq!(r.stalk_of("b").unwrap().len(), 1);
        assert!(r.validate().is_valid());
    }

    #[test]
    fn stalk_of_pair_groupoid_identity_subgroupoid() {
        let p2 = arc("P2");
        let gun = GunSheaf::build(&p2, sub(&p2, &["1a", "1b"])).unwrap();
        let r = gun.sheaf();
        assert_eq!(labels(r, r.stalk_of("a").unwrap()), ["[1a]", "[g]"]);
        assert_eq!(r.stalk_of("c"), Err(Error::UnknownPoint("c".into())));
    }

    #[test]
    fn empty_sheaf() {
        for name in ["Z2", "D2", "I2", "P2"] {
            let g = arc(name);
            let gun = GunSheaf::build(&g, OpenSubgroupoid::EMPTY).unwrap();
            assert!(gun.sheaf().is_empty());
            assert!(gun.sheaf().validate().is_valid());
            assert_eq!(gun.sheaf().stalk(0), PointSet::EMPTY);
            assert!(gun_cover_check(gun.sheaf()).unwrap());
        }
    }

    #[test]
    fn broken_action_fails_composition_law() {
        let z2 = arc("Z2");
        let gun = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        let r = gun.sheaf();
        let s = z2.arrows().index_of("s").unwrap();
        let entries = r
            .action_entries()
            .into_iter()
            .map(|((g, p), q)| if (g, p) == (s, 0) { ((g, p), 0) } else { ((g, p), q) });
        let broken = EqSheaf::new(Arc::clone(&z2), r.total().clone(), r.proj_map().to_vec(), entries).unwrap();
        let report = broken.validate();
        assert!(!report.composition_law);
        assert!(report.local_homeo && report.unit_law);
    }

    #[test]
    fn indiscrete_total_space_is_not_local_homeo() {
        let z2 = arc("Z2");
        let total = FinSpace::indiscrete(&["p", "q"]);
        let one = z2.arrows().index_of("1").unwrap();
        let s = z2.arrows().index_of("s").unwrap();
        let action = [((one, 0), 0), ((one, 1), 1), ((s, 0), 0), ((s, 1), 1)];
        let r = EqSheaf::new(z2, total, vec![0, 0], action).unwrap();
        let report = r.validate();
        assert!(!report.local_homeo);
        assert!(report.unit_law && report.composition_law);
    }

    #[test]
    fn hom_counts_between_z2_sheaves() {
        let z2 = arc("Z2");
        let regular = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        let point = GunSheaf::build(&z2, sub(&z2, &["1", "s"])).unwrap();
        assert_eq!(enumerate_eq_maps(regular.sheaf(), point.sheaf()).unwrap().len(), 1);
        assert_eq!(enumerate_eq_maps(point.sheaf(), regular.sheaf()).unwrap().len(), 0);
        let endos = enumerate_eq_maps(regular.sheaf(), regular.sheaf()).unwrap();
        assert_eq!(endos.len(), 2);
        assert!(endos.contains(&EqMap::identity(regular.sheaf())));
    }

    #[test]
    fn eq_maps_need_a_common_groupoid() {
        let a = GunSheaf::build(&arc("Z2"), OpenSubgroupoid::EMPTY).unwrap();
        let b = GunSheaf::build(&arc("D2"), OpenSubgroupoid::EMPTY).unwrap();
        assert_eq!(enumerate_eq_maps(a.sheaf(), b.sheaf()).unwrap_err(), Error::AmbientMismatch);
    }

    #[test]
    fn canonical_section_lifts_to_identity() {
        for name in ["Z2", "D2", "I2", "P2"] {
            let g = arc(name);
            for s in g.open_subgroupoids().unwrap() {
                let gun = GunSheaf::build(&g, s).unwrap();
                let lift = section_to_morphism(gun.sheaf(), &gun.canonical_section()).unwrap();
                assert_eq!(lift.base, s);
                assert_eq!(lift.map, EqMap::identity(gun.sheaf()));
            }
        }
    }

    #[test]
    fn twisted_section_of_regular_sheaf() {
        let z2 = arc("Z2");
        let gun = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        let t = Section { domain: PointSet::singleton(0), values: vec![Some(1)] };
        let lift = section_to_morphism(gun.sheaf(), &t).unwrap();
        assert_eq!(z2.arrow_names(lift.base.arrows), ["1"]);
        assert_eq!(lift.map.graph, vec![1, 0]);
        assert!(lift.map.is_valid(lift.source.sheaf(), gun.sheaf()));
    }

    #[test]
    fn section_of_pair_groupoid_total_sheaf() {
        let p2 = arc("P2");
        let gun = GunSheaf::build(&p2, OpenSubgroupoid::total(&p2)).unwrap();
        let lift = section_to_morphism(gun.sheaf(), &gun.canonical_section()).unwrap();
        assert_eq!(lift.base.arrows, p2.all_arrows());
    }

    #[test]
    fn section_errors() {
        let z2 = arc("Z2");
        let gun = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        let bad = Section { domain: PointSet::EMPTY, values: vec![Some(0)] };
        assert_eq!(section_to_morphism(gun.sheaf(), &bad).unwrap_err(), Error::NotASection);

        let s2 = FinSpace::make_space(&["a", "b"], &[vec!["a"]]).unwrap();
        let objects = s2.clone();
        let arrows = FinSpace::make_space(&["1a", "1b"], &[vec!["1a"]]).unwrap();
        let g = Arc::new(
            FinGroupoid::new(objects, arrows, vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1], [((0, 0), 0), ((1, 1), 1)])
                .unwrap(),
        );
        // Two copies of the Sierpiński space glued nowhere, and a section that
        // jumps between the copies.
        let total = FinSpace::from_neighbourhoods(
            vec!["a0".into(), "a1".into(), "b0".into(), "b1".into()],
            vec![PointSet::singleton(0), PointSet::singleton(1), [0, 2].into_iter().collect(), [1, 3].into_iter().collect()],
        )
        .unwrap();
        let action = [((0, 0), 0), ((0, 1), 1), ((1, 2), 2), ((1, 3), 3)];
        let r = EqSheaf::new(g, total, vec![0, 0, 1, 1], action).unwrap();
        assert!(r.validate().is_valid());
        let jump = Section { domain: PointSet::full(2), values: vec![Some(0), Some(3)] };
        assert_eq!(section_to_morphism(&r, &jump).unwrap_err(), Error::NotContinuous);
        let straight = Section { domain: PointSet::full(2), values: vec![Some(0), Some(2)] };
        assert!(section_to_morphism(&r, &straight).is_ok());
    }

    #[test]
    fn covers_of_small_examples() {
        let z2 = arc("Z2");
        let regular = GunSheaf::build(&z2, sub(&z2, &["1"])).unwrap();
        assert!(gun_cover_check(regular.sheaf()).unwrap());
        let p2 = arc("P2");
        let ids = GunSheaf::build(&p2, sub(&p2, &["1a", "1b"])).unwrap();
        assert!(gun_cover_check(ids.sheaf()).unwrap());
    }

    #[test]
    fn enumerated_z2_sheaves_match_involution_counts() {
        // Z2-sets of size n are involutions on n points: 1, 1, 2, 4, 10.
        let z2 = arc("Z2");
        let sheaves = enumerate_sheaves(&z2, 4).unwrap();
        let mut by_size = [0usize; 5];
        for r in &sheaves {
            by_size[r.len()] += 1;
        }
        assert_eq!(by_size, [1, 1, 2, 4, 10]);
    }

    #[test]
    fn enumerated_sheaves_over_sierpinski_match_presheaf_count() {
        // Sheaves on the Sierpiński space with stalks of size (m, n) are maps
        // from the open point's stalk... rather from the closed point's stalk
        // b to a: n^m... counted by brute force below.
        let objects = FinSpace::make_space(&["a", "b"], &[vec!["a"]]).unwrap();
        let arrows = FinSpace::make_space(&["1a", "1b"], &[vec!["1a"]]).unwrap();
        let g = Arc::new(
            FinGroupoid::new(objects, arrows, vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1], [((0, 0), 0), ((1, 1), 1)])
                .unwrap(),
        );
        assert!(g.validate().all_ok());
        let sheaves = enumerate_sheaves(&g, 3).unwrap();
        // One restriction map stalk(b) → stalk(a) per sheaf.
        let expected: usize = (0..=3usize)
            .flat_map(|m| (0..=3 - m).map(move |n| (m, n)))
            .map(|(a, b)| a.pow(b as u32))
            .sum();
        assert_eq!(sheaves.len(), expected);
    }
}
