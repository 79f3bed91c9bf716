//! Groupoid objects in finite spaces, their open subgroupoids, functors
//! between them and replete subgroupoid inclusions.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fintop::{self, FinSpace};
use crate::pointset::{subsets, PointSet};

/// A groupoid `(G₀, G₁, d, c, e, i, m)` whose object and arrow sets carry
/// finite topologies. Construction only checks that indices are in range;
/// use [`FinGroupoid::validate`] for the axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroupoid {
    objects: FinSpace,
    arrows: FinSpace,
    dom: Vec<usize>,
    cod: Vec<usize>,
    unit: Vec<usize>,
    inv: Vec<usize>,
    /// `comp[g2 * |G₁| + g1] = g2 ∘ g1`.
    comp: Vec<Option<usize>>,
    into: Vec<PointSet>,
    out_of: Vec<PointSet>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroupoidReport {
    pub axioms_ok: bool,
    pub continuity_ok: bool,
    pub is_open: bool,
    pub composition_open: bool,
    pub failures: Vec<String>,
}

impl GroupoidReport {
    pub fn all_ok(&self) -> bool {
        self.axioms_ok && self.continuity_ok && self.is_open && self.composition_open
    }
}

impl FinGroupoid {
    pub fn new(
        objects: FinSpace,
        arrows: FinSpace,
        dom: Vec<usize>,
        cod: Vec<usize>,
        unit: Vec<usize>,
        inv: Vec<usize>,
        compositions: impl IntoIterator<Item = ((usize, usize), usize)>,
    ) -> Result<Self> {
        let (n0, n1) = (objects.len(), arrows.len());
        let bad = |what: &str| Err(Error::InvalidInput(format!("{what} out of range")));
        if dom.len() != n1 || cod.len() != n1 || inv.len() != n1 || unit.len() != n0 {
            return Err(Error::InvalidInput("structure map has the wrong length".into()));
        }
        if dom.iter().chain(&cod).any(|&x| x >= n0) {
            return bad("domain/codomain");
        }
        if unit.iter().chain(&inv).any(|&g| g >= n1) {
            return bad("identity/inverse");
        }
        let mut comp = vec![None; n1 * n1];
        for ((g2, g1), h) in compositions {
            if g2 >= n1 || g1 >= n1 || h >= n1 {
                return bad("composition entry");
            }
            let slot = &mut comp[g2 * n1 + g1];
            if slot.is_some_and(|old| old != h) {
                return Err(Error::InvalidInput(format!(
                    "conflicting composites for {} . {}",
                    arrows.label(g2),
                    arrows.label(g1)
                )));
            }
            *slot = Some(h);
        }
        let into = (0..n0).map(|y| (0..n1).filter(|&g| cod[g] == y).collect()).collect();
        let out_of = (0..n0).map(|x| (0..n1).filter(|&g| dom[g] == x).collect()).collect();
        Ok(FinGroupoid { objects, arrows, dom, cod, unit, inv, comp, into, out_of })
    }

    pub fn objects(&self) -> &FinSpace {
        &self.objects
    }

    pub fn arrows(&self) -> &FinSpace {
        &self.arrows
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn all_objects(&self) -> PointSet {
        self.objects.all()
    }

    pub fn all_arrows(&self) -> PointSet {
        self.arrows.all()
    }

    pub fn dom(&self, g: usize) -> usize {
        self.dom[g]
    }

    pub fn cod(&self, g: usize) -> usize {
        self.cod[g]
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn dom_map(&self) -> &[usize] {
        &self.dom
    }

    pub fn cod_map(&self) -> &[usize] {
        &self.cod
    }

    pub fn unit_map(&self) -> &[usize] {
        &self.unit
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inv
    }

    /// `g2 ∘ g1`, when the table defines it.
    pub fn compose(&self, g2: usize, g1: usize) -> Option<usize> {
        self.comp[g2 * self.num_arrows() + g1]
    }

    /// Composite of a pair known to be composable in a validated groupoid.
    pub fn comp(&self, g2: usize, g1: usize) -> usize {
        self.compose(g2, g1)
            .unwrap_or_else(|| panic!("{} . {} is undefined", self.arrows.label(g2), self.arrows.label(g1)))
    }

    /// Arrows with codomain `y`.
    pub fn arrows_into(&self, y: usize) -> PointSet {
        self.into[y]
    }

    /// Arrows with domain `x`.
    pub fn arrows_out_of(&self, x: usize) -> PointSet {
        self.out_of[x]
    }

    /// Composable pairs `(g2, g1)` with `d(g2) = c(g1)`, lexicographically.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.num_arrows())
            .flat_map(|g2| self.into[self.dom[g2]].iter().map(move |g1| (g2, g1)))
            .collect()
    }

    /// The space `G₁ ×_{G₀} G₁` of composable pairs `(g2, g1)`.
    pub fn composable_space(&self) -> Result<(FinSpace, Vec<(usize, usize)>)> {
        fintop::fiber_product_raw(&self.arrows, &self.dom, &self.arrows, &self.cod)
    }

    pub fn dom_image(&self, s: PointSet) -> PointSet {
        fintop::image(&self.dom, s)
    }

    pub fn cod_image(&self, s: PointSet) -> PointSet {
        fintop::image(&self.cod, s)
    }

    /// `d⁻¹(V)`.
    pub fn dom_preimage(&self, v: PointSet) -> PointSet {
        v.iter().fold(PointSet::EMPTY, |acc, x| acc.union(self.out_of[x]))
    }

    /// `c⁻¹(V)`.
    pub fn cod_preimage(&self, v: PointSet) -> PointSet {
        v.iter().fold(PointSet::EMPTY, |acc, y| acc.union(self.into[y]))
    }

    pub fn inverse_set(&self, s: PointSet) -> PointSet {
        fintop::image(&self.inv, s)
    }

    pub fn units(&self, v: PointSet) -> PointSet {
        fintop::image(&self.unit, v)
    }

    /// `m(A ×_{G₀} B) = { a ∘ b : a ∈ A, b ∈ B, d(a) = c(b) }`.
    pub fn compose_sets(&self, a: PointSet, b: PointSet) -> PointSet {
        let mut out = PointSet::EMPTY;
        for g2 in a.iter() {
            for g1 in b.intersection(self.into[self.dom[g2]]).iter() {
                if let Some(h) = self.compose(g2, g1) {
                    out.insert(h);
                }
            }
        }
        out
    }

    /// Sorted arrow labels of `s`.
    pub fn arrow_names(&self, s: PointSet) -> Vec<String> {
        self.arrows.names(s)
    }

    /// Sorted object labels of `s`.
    pub fn object_names(&self, s: PointSet) -> Vec<String> {
        self.objects.names(s)
    }

    /// Checks the groupoid axioms, continuity of the structure maps and
    /// openness of `d`, `c` and `m`.
    pub fn validate(&self) -> GroupoidReport {
        let mut failures = Vec::new();
        let n1 = self.num_arrows();
        let lbl = |g: usize| self.arrows.label(g).to_owned();

        for x in 0..self.num_objects() {
            let e = self.unit[x];
            if self.dom[e] != x || self.cod[e] != x {
                failures.push(format!("identity of {} has wrong endpoints", self.objects.label(x)));
            }
        }
        for g2 in 0..n1 {
            for g1 in 0..n1 {
                let composable = self.dom[g2] == self.cod[g1];
                match (composable, self.compose(g2, g1)) {
                    (true, None) => failures.push(format!("{} . {} is missing", lbl(g2), lbl(g1))),
                    (false, Some(_)) => {
                        failures.push(format!("{} . {} is defined but not composable", lbl(g2), lbl(g1)))
                    }
                    (true, Some(h)) if self.dom[h] != self.dom[g1] || self.cod[h] != self.cod[g2] => {
                        failures.push(format!("{} . {} has wrong endpoints", lbl(g2), lbl(g1)))
                    }
                    _ => {}
                }
            }
        }
        let total = failures.is_empty();
        if total {
            for g in 0..n1 {
                if self.compose(self.unit[self.cod[g]], g) != Some(g)
                    || self.compose(g, self.unit[self.dom[g]]) != Some(g)
                {
                    failures.push(format!("unit law fails at {}", lbl(g)));
                }
                let i = self.inv[g];
                if self.dom[i] != self.cod[g] || self.cod[i] != self.dom[g] {
                    failures.push(format!("inverse of {} has wrong endpoints", lbl(g)));
                    continue;
                }
                if self.compose(i, g) != Some(self.unit[self.dom[g]])
                    || self.compose(g, i) != Some(self.unit[self.cod[g]])
                {
                    failures.push(format!("inverse law fails at {}", lbl(g)));
                }
                if self.inv[i] != g {
                    failures.push(format!("inverse is not an involution at {}", lbl(g)));
                }
            }
            'assoc: for (g3, g2) in self.composable_pairs() {
                for g1 in self.into[self.dom[g2]].iter() {
                    let left = self.comp(self.comp(g3, g2), g1);
                    let right = self.comp(g3, self.comp(g2, g1));
                    if left != right {
                        failures.push(format!("associativity fails at ({}, {}, {})", lbl(g3), lbl(g2), lbl(g1)));
                        break 'assoc;
                    }
                }
            }
        }
        let axioms_ok = failures.is_empty();

        let (obj, arr) = (&self.objects, &self.arrows);
        let mut continuity_ok = fintop::is_continuous(arr, obj, &self.dom)
            && fintop::is_continuous(arr, obj, &self.cod)
            && fintop::is_continuous(obj, arr, &self.unit)
            && fintop::is_continuous(arr, arr, &self.inv);
        let is_open = fintop::is_open_map(arr, obj, &self.dom) && fintop::is_open_map(arr, obj, &self.cod);
        let mut composition_open = false;
        if total {
            match self.composable_space() {
                Ok((pairs_space, pairs)) => {
                    let m: Vec<usize> = pairs.iter().map(|&(g2, g1)| self.comp(g2, g1)).collect();
                    continuity_ok &= fintop::is_continuous(&pairs_space, arr, &m);
                    composition_open = fintop::is_open_map(&pairs_space, arr, &m);
                }
                Err(e) => failures.push(e.to_string()),
            }
        } else {
            continuity_ok = false;
        }
        if !continuity_ok {
            failures.push("a structure map is not continuous".into());
        }
        if !is_open {
            failures.push("domain or codomain map is not open".into());
        }
        GroupoidReport { axioms_ok, continuity_ok, is_open, composition_open, failures }
    }

    pub fn is_open(&self) -> bool {
        fintop::is_open_map(&self.arrows, &self.objects, &self.dom)
            && fintop::is_open_map(&self.arrows, &self.objects, &self.cod)
    }

    /// Fails unless the groupoid satisfies every axiom and is open.
    pub fn require_open(&self) -> Result<()> {
        let report = self.validate();
        if !report.axioms_ok || !report.continuity_ok {
            return Err(Error::InvalidGroupoid(report.failures.join("; ")));
        }
        if !report.is_open {
            return Err(Error::NotOpenGroupoid);
        }
        Ok(())
    }

    /// Whether `n` is open, closed under composition and under inverses.
    pub fn is_open_subgroupoid(&self, n: PointSet) -> bool {
        n.is_subset(self.all_arrows())
            && self.arrows.is_open(n)
            && self.inverse_set(n).is_subset(n)
            && self.compose_sets(n, n).is_subset(n)
    }

    /// Every open subgroupoid `(U, N)`, ordered by the sorted labels of
    /// `U` and then `N`.
    pub fn open_subgroupoids(&self) -> Result<Vec<OpenSubgroupoid>> {
        if !self.is_open() {
            return Err(Error::NotOpenGroupoid);
        }
        let mut found: Vec<OpenSubgroupoid> = self
            .arrows
            .opens()
            .into_iter()
            .filter(|&n| self.is_open_subgroupoid(n))
            .map(|n| OpenSubgroupoid { objects: self.dom_image(n), arrows: n })
            .collect();
        found.sort_by(|a, b| self.cmp_subgroupoids(a, b));
        Ok(found)
    }

    pub fn cmp_subgroupoids(&self, a: &OpenSubgroupoid, b: &OpenSubgroupoid) -> Ordering {
        (self.object_names(a.objects), self.arrow_names(a.arrows))
            .cmp(&(self.object_names(b.objects), self.arrow_names(b.arrows)))
    }

    /// Whether `s` is closed under isomorphism.
    pub fn is_replete(&self, s: PointSet) -> bool {
        self.crossing_arrow(s).is_none()
    }

    /// First arrow with exactly one endpoint in `s`.
    pub(crate) fn crossing_arrow(&self, s: PointSet) -> Option<usize> {
        (0..self.num_arrows()).find(|&g| s.contains(self.dom[g]) != s.contains(self.cod[g]))
    }

    /// Least replete superset of `s`.
    pub fn replete_closure(&self, s: PointSet) -> PointSet {
        let mut cur = s;
        loop {
            let next = cur.union(self.cod_image(self.dom_preimage(cur)));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// The full subgroupoid on `h0` with subspace topologies, and its
    /// inclusion functor. No repleteness is required.
    pub fn full_subgroupoid(self: &Arc<Self>, h0: PointSet) -> Result<GroupoidMorphism> {
        if !h0.is_subset(self.all_objects()) {
            return Err(Error::InvalidSubset);
        }
        let h1 = self.dom_preimage(h0).intersection(self.cod_preimage(h0));
        let obj_embed: Vec<usize> = h0.iter().collect();
        let arr_embed: Vec<usize> = h1.iter().collect();
        let obj_index = index_of(&obj_embed, self.num_objects());
        let arr_index = index_of(&arr_embed, self.num_arrows());
        let objects = self.objects.subspace(h0)?;
        let arrows = self.arrows.subspace(h1)?;
        let dom = arr_embed.iter().map(|&g| obj_index[self.dom[g]].unwrap()).collect();
        let cod = arr_embed.iter().map(|&g| obj_index[self.cod[g]].unwrap()).collect();
        let unit = obj_embed.iter().map(|&x| arr_index[self.unit[x]].unwrap()).collect();
        // Inverses of arrows inside the full subgroupoid stay inside.
        let inv = arr_embed
            .iter()
            .map(|&g| arr_index[self.inv[g]].unwrap_or(0))
            .collect();
        let mut compositions = Vec::new();
        for (k2, &g2) in arr_embed.iter().enumerate() {
            for (k1, &g1) in arr_embed.iter().enumerate() {
                if let Some(h) = self.compose(g2, g1) {
                    if let Some(kh) = arr_index[h] {
                        compositions.push(((k2, k1), kh));
                    }
                }
            }
        }
        let sub = FinGroupoid::new(objects, arrows, dom, cod, unit, inv, compositions)?;
        Ok(GroupoidMorphism {
            source: Arc::new(sub),
            target: Arc::clone(self),
            on_objects: obj_embed,
            on_arrows: arr_embed,
        })
    }
}

fn index_of(embed: &[usize], n: usize) -> Vec<Option<usize>> {
    let mut idx = vec![None; n];
    for (k, &p) in embed.iter().enumerate() {
        idx[p] = Some(k);
    }
    idx
}

/// An open subgroupoid `(U, N)`: `N` open, closed under composition and
/// inverse, with `U = d(N) = c(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenSubgroupoid {
    pub objects: PointSet,
    pub arrows: PointSet,
}

impl OpenSubgroupoid {
    pub const EMPTY: OpenSubgroupoid = OpenSubgroupoid { objects: PointSet::EMPTY, arrows: PointSet::EMPTY };

    pub fn new(g: &FinGroupoid, arrows: PointSet) -> Result<Self> {
        if !arrows.is_subset(g.all_arrows()) {
            return Err(Error::InvalidSubset);
        }
        if !g.arrows().is_open(arrows) {
            return Err(Error::InvalidSubgroupoid("arrow set is not open".into()));
        }
        if !g.inverse_set(arrows).is_subset(arrows) {
            return Err(Error::InvalidSubgroupoid("not closed under inverses".into()));
        }
        if !g.compose_sets(arrows, arrows).is_subset(arrows) {
            return Err(Error::InvalidSubgroupoid("not closed under composition".into()));
        }
        Ok(OpenSubgroupoid { objects: g.dom_image(arrows), arrows })
    }

    /// Looks up `N` by arrow labels.
    pub fn from_names<S: AsRef<str>>(g: &FinGroupoid, names: &[S]) -> Result<Self> {
        Self::new(g, g.arrows().set_of(names)?)
    }

    /// The whole groupoid `(G₀, G₁)`.
    pub fn total(g: &FinGroupoid) -> Self {
        OpenSubgroupoid { objects: g.all_objects(), arrows: g.all_arrows() }
    }

    /// `N↾V`: the arrows of `N` with domain in `V`.
    pub fn restrict_to(&self, g: &FinGroupoid, v: PointSet) -> OpenSubgroupoid {
        let arrows = self.arrows.intersection(g.dom_preimage(v)).intersection(g.cod_preimage(v));
        OpenSubgroupoid { objects: g.dom_image(arrows), arrows }
    }

    /// Whether `V` is closed under `N`: `x ∈ V` and `f: x → y` in `N` give `y ∈ V`.
    pub fn closes(&self, g: &FinGroupoid, v: PointSet) -> bool {
        g.cod_image(self.arrows.intersection(g.dom_preimage(v))).is_subset(v)
    }

    /// Open subsets of `U` closed under `N`, in shortlex order.
    pub fn closed_opens(&self, g: &FinGroupoid) -> Vec<PointSet> {
        g.objects()
            .opens()
            .into_iter()
            .filter(|&v| v.is_subset(self.objects) && self.closes(g, v))
            .collect()
    }

    pub fn describe(&self, g: &FinGroupoid) -> String {
        format!(
            "({{{}}}, {{{}}})",
            g.object_names(self.objects).join(","),
            g.arrow_names(self.arrows).join(",")
        )
    }
}

/// A continuous functor `f: H → G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidMorphism {
    pub source: Arc<FinGroupoid>,
    pub target: Arc<FinGroupoid>,
    pub on_objects: Vec<usize>,
    pub on_arrows: Vec<usize>,
}

/// An ambient arrow `h: x → f₀(y)` with no lift ending at `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftFailure {
    pub object: usize,
    pub arrow: usize,
}

impl GroupoidMorphism {
    pub fn identity(g: Arc<FinGroupoid>) -> Self {
        GroupoidMorphism {
            on_objects: (0..g.num_objects()).collect(),
            on_arrows: (0..g.num_arrows()).collect(),
            source: Arc::clone(&g),
            target: g,
        }
    }

    /// Continuity of both components and commutation with `d, c, e, i, m`.
    pub fn check_functor(&self) -> Result<()> {
        let (h, g) = (&*self.source, &*self.target);
        let (f0, f1) = (&self.on_objects, &self.on_arrows);
        if f0.len() != h.num_objects() || f1.len() != h.num_arrows() {
            return Err(Error::InvalidInput("functor components have the wrong length".into()));
        }
        if f0.iter().any(|&x| x >= g.num_objects()) || f1.iter().any(|&a| a >= g.num_arrows()) {
            return Err(Error::InvalidInput("functor component out of range".into()));
        }
        if !fintop::is_continuous(h.objects(), g.objects(), f0) || !fintop::is_continuous(h.arrows(), g.arrows(), f1) {
            return Err(Error::NotContinuous);
        }
        let fail = |what: &str| Err(Error::InvalidInput(format!("functor does not preserve {what}")));
        for a in 0..h.num_arrows() {
            if g.dom(f1[a]) != f0[h.dom(a)] || g.cod(f1[a]) != f0[h.cod(a)] {
                return fail("endpoints");
            }
            if g.inverse(f1[a]) != f1[h.inverse(a)] {
                return fail("inverses");
            }
        }
        for x in 0..h.num_objects() {
            if g.unit(f0[x]) != f1[h.unit(x)] {
                return fail("identities");
            }
        }
        for (a2, a1) in h.composable_pairs() {
            if g.compose(f1[a2], f1[a1]) != h.compose(a2, a1).map(|k| f1[k]) {
                return fail("composition");
            }
        }
        Ok(())
    }

    /// For every `y` in the source and every target arrow `h: x → f₀(y)`
    /// there must be a source arrow `g` with `c(g) = y` and `f₁(g) = h`.
    pub fn is_fibration(&self) -> std::result::Result<(), LiftFailure> {
        let (h, g) = (&*self.source, &*self.target);
        for y in 0..h.num_objects() {
            let lifts: PointSet = h.arrows_into(y).iter().map(|a| self.on_arrows[a]).collect();
            for arrow in g.arrows_into(self.on_objects[y]).iter() {
                if !lifts.contains(arrow) {
                    return Err(LiftFailure { object: y, arrow });
                }
            }
        }
        Ok(())
    }

    /// `(f₀⁻¹(U), f₁⁻¹(N))`.
    pub fn pullback_subgroupoid(&self, sub: &OpenSubgroupoid) -> OpenSubgroupoid {
        OpenSubgroupoid {
            objects: fintop::preimage(&self.on_objects, sub.objects),
            arrows: fintop::preimage(&self.on_arrows, sub.arrows),
        }
    }
}

/// A replete subgroupoid `ι: H ↪ G`: the full subgroupoid on an
/// isomorphism-closed set of objects, with subspace topologies.
#[derive(Clone, Debug)]
pub struct RepleteInclusion {
    morphism: GroupoidMorphism,
    objects: PointSet,
    arrows: PointSet,
    obj_index: Vec<Option<usize>>,
    arr_index: Vec<Option<usize>>,
}

impl RepleteInclusion {
    pub fn new(g: &Arc<FinGroupoid>, h0: PointSet) -> Result<Self> {
        if !h0.is_subset(g.all_objects()) {
            return Err(Error::InvalidSubset);
        }
        if let Some(arrow) = g.crossing_arrow(h0) {
            return Err(Error::NotReplete { arrow: g.arrows().label(arrow).to_owned() });
        }
        let morphism = g.full_subgroupoid(h0)?;
        let arrows: PointSet = morphism.on_arrows.iter().copied().collect();
        Ok(RepleteInclusion {
            obj_index: index_of(&morphism.on_objects, g.num_objects()),
            arr_index: index_of(&morphism.on_arrows, g.num_arrows()),
            morphism,
            objects: h0,
            arrows,
        })
    }

    pub fn from_names<S: AsRef<str>>(g: &Arc<FinGroupoid>, h0: &[S]) -> Result<Self> {
        Self::new(g, g.objects().set_of(h0)?)
    }

    pub fn ambient(&self) -> &Arc<FinGroupoid> {
        &self.morphism.target
    }

    pub fn sub(&self) -> &Arc<FinGroupoid> {
        &self.morphism.source
    }

    pub fn morphism(&self) -> &GroupoidMorphism {
        &self.morphism
    }

    /// `H₀` as a subset of `G₀`.
    pub fn carrier(&self) -> PointSet {
        self.objects
    }

    /// `H₁ = d⁻¹(H₀) ∩ c⁻¹(H₀)` as a subset of `G₁`.
    pub fn arrow_carrier(&self) -> PointSet {
        self.arrows
    }

    /// `S ∩ H₀`, reindexed into `H`.
    pub fn restrict_objects(&self, s: PointSet) -> PointSet {
        s.iter().filter_map(|x| self.obj_index[x]).collect()
    }

    /// `S ∩ H₁`, reindexed into `H`.
    pub fn restrict_arrows(&self, s: PointSet) -> PointSet {
        s.iter().filter_map(|g| self.arr_index[g]).collect()
    }

    pub fn embed_objects(&self, s: PointSet) -> PointSet {
        s.iter().map(|x| self.morphism.on_objects[x]).collect()
    }

    pub fn embed_arrows(&self, s: PointSet) -> PointSet {
        s.iter().map(|a| self.morphism.on_arrows[a]).collect()
    }

    pub fn embed_arrow(&self, a: usize) -> usize {
        self.morphism.on_arrows[a]
    }

    pub fn embed_object(&self, x: usize) -> usize {
        self.morphism.on_objects[x]
    }
}

/// Every replete subset of `G₀`, in bit order.
pub fn replete_subsets(g: &FinGroupoid) -> Vec<PointSet> {
    subsets(g.all_objects()).filter(|&s| g.is_replete(s)).collect()
}
