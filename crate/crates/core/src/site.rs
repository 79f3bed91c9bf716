//! The Moerdijk site of an open groupoid: objects are open subgroupoids
//! `(U, N)` carrying the sheaf `⟨G, U, N⟩`, morphisms are T-sets.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::eqsheaf::{EqMap, EqSheaf, GunSheaf};
use crate::error::{Error, Result};
use crate::groupoid::{FinGroupoid, OpenSubgroupoid};
use crate::pointset::PointSet;

/// A condition a T-set `T: (U, N) → (V, M)` can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TsetCondition {
    /// `T` is not open in `G₁`.
    Open,
    /// `T ⊄ d⁻¹(V)`.
    DomainInTarget,
    /// `m(T ×_{G₀} M) ⊄ T`.
    I,
    /// `c(T) ≠ U` (for partial maps, `c(T) ⊄ U`).
    II,
    /// `m(T⁻¹ ×_{G₀} T) ⊄ M`.
    III,
    /// `m(N ×_{G₀} T) ⊄ T`.
    IV,
}

impl fmt::Display for TsetCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TsetCondition::Open => "open",
            TsetCondition::DomainInTarget => "inside d⁻¹(V)",
            TsetCondition::I => "i",
            TsetCondition::II => "ii",
            TsetCondition::III => "iii",
            TsetCondition::IV => "iv",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct SiteObject {
    sub: OpenSubgroupoid,
    gun: GunSheaf,
}

impl PartialEq for SiteObject {
    fn eq(&self, other: &Self) -> bool {
        self.sub == other.sub && crate::eqsheaf::same_groupoid(self.groupoid(), other.groupoid())
    }
}

impl Eq for SiteObject {}

impl SiteObject {
    pub fn new(g: &Arc<FinGroupoid>, sub: OpenSubgroupoid) -> Result<Arc<Self>> {
        let gun = GunSheaf::build(g, sub)?;
        Ok(Arc::new(SiteObject { sub, gun }))
    }

    pub fn groupoid(&self) -> &Arc<FinGroupoid> {
        self.gun.sheaf().groupoid()
    }

    pub fn sub(&self) -> OpenSubgroupoid {
        self.sub
    }

    pub fn gun(&self) -> &GunSheaf {
        &self.gun
    }

    pub fn sheaf(&self) -> &EqSheaf {
        self.gun.sheaf()
    }

    pub fn describe(&self) -> String {
        self.sub.describe(self.groupoid())
    }
}

/// A site morphism, stored as its arrow set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSet {
    pub source: Arc<SiteObject>,
    pub target: Arc<SiteObject>,
    pub arrows: PointSet,
}

impl TSet {
    pub fn groupoid(&self) -> &Arc<FinGroupoid> {
        self.source.groupoid()
    }

    pub fn arrow_names(&self) -> Vec<String> {
        self.groupoid().arrow_names(self.arrows)
    }

    /// The induced map `[f]_N ↦ [f ∘ g]_M` on total spaces.
    pub fn graph(&self) -> Result<EqMap> {
        let classes = self.source.gun().classes().len();
        let graph = (0..classes).map(|k| tset_apply(self, k)).collect::<Result<_>>()?;
        Ok(EqMap { graph })
    }
}

/// Every violated condition, in declaration order; empty means valid.
pub fn is_valid_tset(src: &SiteObject, tgt: &SiteObject, t: PointSet) -> Vec<TsetCondition> {
    let mut failed = conditions_except_ii(src, tgt, t);
    let g = src.groupoid();
    if g.cod_image(t) != src.sub.objects {
        failed.push(TsetCondition::II);
    }
    failed.sort();
    failed
}

fn conditions_except_ii(src: &SiteObject, tgt: &SiteObject, t: PointSet) -> Vec<TsetCondition> {
    let g = src.groupoid();
    let (n, m) = (src.sub.arrows, tgt.sub.arrows);
    let mut failed = Vec::new();
    if !t.is_subset(g.all_arrows()) || !g.arrows().is_open(t) {
        failed.push(TsetCondition::Open);
    }
    if !t.is_subset(g.dom_preimage(tgt.sub.objects)) {
        failed.push(TsetCondition::DomainInTarget);
    }
    if !g.compose_sets(t, m).is_subset(t) {
        failed.push(TsetCondition::I);
    }
    if !g.compose_sets(g.inverse_set(t), t).is_subset(m) {
        failed.push(TsetCondition::III);
    }
    if !g.compose_sets(n, t).is_subset(t) {
        failed.push(TsetCondition::IV);
    }
    failed
}

/// Validates and wraps a T-set.
pub fn tset(src: &Arc<SiteObject>, tgt: &Arc<SiteObject>, t: PointSet) -> Result<TSet> {
    if !crate::eqsheaf::same_groupoid(src.groupoid(), tgt.groupoid()) {
        return Err(Error::AmbientMismatch);
    }
    let failed = is_valid_tset(src, tgt, t);
    if !failed.is_empty() {
        return Err(Error::ConditionViolated(failed));
    }
    Ok(TSet { source: Arc::clone(src), target: Arc::clone(tgt), arrows: t })
}

/// Orders arrow sets by their sorted label lists.
pub fn cmp_arrow_sets(g: &FinGroupoid, a: PointSet, b: PointSet) -> Ordering {
    g.arrow_names(a).cmp(&g.arrow_names(b))
}

/// Every valid T-set `src → tgt`, ordered by sorted arrow labels.
pub fn enumerate_tsets(src: &Arc<SiteObject>, tgt: &Arc<SiteObject>) -> Result<Vec<TSet>> {
    let g = src.groupoid();
    g.require_open()?;
    tsets_among(src, tgt, &g.arrows().opens())
}

fn tsets_among(src: &Arc<SiteObject>, tgt: &Arc<SiteObject>, opens: &[PointSet]) -> Result<Vec<TSet>> {
    let g = src.groupoid();
    if !crate::eqsheaf::same_groupoid(g, tgt.groupoid()) {
        return Err(Error::AmbientMismatch);
    }
    let bound = g.dom_preimage(tgt.sub.objects).intersection(g.cod_preimage(src.sub.objects));
    let mut found: Vec<PointSet> = opens
        .iter()
        .copied()
        .filter(|&t| t.is_subset(bound) && is_valid_tset(src, tgt, t).is_empty())
        .collect();
    found.sort_by(|&a, &b| cmp_arrow_sets(g, a, b));
    Ok(found
        .into_iter()
        .map(|arrows| TSet { source: Arc::clone(src), target: Arc::clone(tgt), arrows })
        .collect())
}

/// `[f]_N ↦ [f ∘ g]_M` for `g ∈ T` with `c(g) = d(f)`. Every choice of
/// representative and witness is tried; they agree for valid T-sets.
pub fn tset_apply(t: &TSet, class: usize) -> Result<usize> {
    let g = t.groupoid();
    let members = t
        .source
        .gun()
        .classes()
        .get(class)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("no class {class} in the source sheaf")))?;
    let mut result = None;
    for f in members.iter() {
        for w in t.arrows.intersection(g.arrows_into(g.dom(f))).iter() {
            let image = t
                .target
                .gun()
                .class_of(g.comp(f, w))
                .ok_or_else(|| Error::InvalidInput("composite leaves d⁻¹(V)".into()))?;
            match result {
                None => result = Some(image),
                Some(r) if r != image => {
                    return Err(Error::InvalidInput(format!(
                        "image of {} depends on the chosen representative",
                        t.source.sheaf().total().label(class)
                    )))
                }
                _ => {}
            }
        }
    }
    result.ok_or_else(|| Error::NoComposableWitness(g.arrows().label(members.first().unwrap()).to_owned()))
}

/// The composite `A → C` of `t1: A → B` and `t2: B → C`:
/// `{g₁ ∘ g₂ : g₁ ∈ T₁, g₂ ∈ T₂, d(g₁) = c(g₂)}`.
pub fn tset_compose(t1: &TSet, t2: &TSet) -> Result<TSet> {
    if *t1.target != *t2.source {
        return Err(Error::ObjectMismatch);
    }
    let g = t1.groupoid();
    tset(&t1.source, &t2.target, g.compose_sets(t1.arrows, t2.arrows))
}

/// `T = N`.
pub fn identity_tset(a: &Arc<SiteObject>) -> TSet {
    TSet { source: Arc::clone(a), target: Arc::clone(a), arrows: a.sub.arrows }
}

/// The frame of subobjects of a site object, as the `N`-closed opens of `U`.
#[derive(Clone, Debug)]
pub struct SubobjectLattice {
    pub object: Arc<SiteObject>,
    /// In shortlex order.
    pub opens: Vec<PointSet>,
}

pub fn subobject_lattice(a: &Arc<SiteObject>) -> Result<SubobjectLattice> {
    let g = a.groupoid();
    g.require_open()?;
    Ok(SubobjectLattice { object: Arc::clone(a), opens: a.sub.closed_opens(g) })
}

impl SubobjectLattice {
    /// `d⁻¹(V)/∼`: the classes whose domain lies in `V`.
    pub fn sub_from_open(&self, v: PointSet) -> PointSet {
        let g = self.object.groupoid();
        let gun = self.object.gun();
        gun.classes()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|f| v.contains(g.dom(f))))
            .map(|(k, _)| k)
            .collect()
    }

    /// Pulls a subobject back along the canonical section `x ↦ [1ₓ]`.
    pub fn open_from_sub(&self, s: PointSet) -> PointSet {
        let g = self.object.groupoid();
        let gun = self.object.gun();
        self.object
            .sub
            .objects
            .iter()
            .filter(|&x| gun.class_of(g.unit(x)).is_some_and(|k| s.contains(k)))
            .collect()
    }

    /// The site object `(V, N↾V)` presenting the subobject at `V`.
    pub fn object_at(&self, v: PointSet) -> Result<Arc<SiteObject>> {
        let g = self.object.groupoid();
        let restricted = self.object.sub.restrict_to(g, v);
        SiteObject::new(g, OpenSubgroupoid { objects: v, arrows: restricted.arrows })
    }

    /// The inclusion of the subobject at `V`, as the T-set `N ∩ c⁻¹(V)`.
    pub fn inclusion(&self, v: PointSet) -> Result<TSet> {
        let g = self.object.groupoid();
        let sub = self.object_at(v)?;
        tset(&sub, &self.object, self.object.sub.arrows.intersection(g.cod_preimage(v)))
    }
}

/// The morphism from the subobject `(c(T), N↾c(T))` of `src` determined
/// by `T`, when `T` meets conditions (i), (iii), (iv) and `c(T) ⊆ U`.
pub fn partial_tset(src: &Arc<SiteObject>, tgt: &Arc<SiteObject>, t: PointSet) -> Result<TSet> {
    let g = src.groupoid();
    let mut failed = conditions_except_ii(src, tgt, t);
    if !g.cod_image(t).is_subset(src.sub.objects) {
        failed.push(TsetCondition::II);
    }
    if !failed.is_empty() {
        failed.sort();
        return Err(Error::ConditionViolated(failed));
    }
    let lattice = SubobjectLattice { object: Arc::clone(src), opens: vec![] };
    let sub = lattice.object_at(g.cod_image(t))?;
    tset(&sub, tgt, t)
}

/// All site objects of an open groupoid, with the opens of `G₁` cached
/// for hom-set enumeration.
#[derive(Clone, Debug)]
pub struct Site {
    groupoid: Arc<FinGroupoid>,
    objects: Vec<Arc<SiteObject>>,
    arrow_opens: Vec<PointSet>,
}

impl Site {
    pub fn new(g: Arc<FinGroupoid>) -> Result<Self> {
        let subs = g.open_subgroupoids()?;
        let objects = subs.into_iter().map(|s| SiteObject::new(&g, s)).collect::<Result<_>>()?;
        let arrow_opens = g.arrows().opens();
        Ok(Site { groupoid: g, objects, arrow_opens })
    }

    pub fn groupoid(&self) -> &Arc<FinGroupoid> {
        &self.groupoid
    }

    pub fn objects(&self) -> &[Arc<SiteObject>] {
        &self.objects
    }

    pub fn object(&self, sub: OpenSubgroupoid) -> Option<&Arc<SiteObject>> {
        self.objects.iter().find(|o| o.sub == sub)
    }

    /// Looks up the object with `N` given by arrow labels.
    pub fn object_named<S: AsRef<str>>(&self, arrows: &[S]) -> Result<&Arc<SiteObject>> {
        let sub = OpenSubgroupoid::from_names(&self.groupoid, arrows)?;
        self.object(sub).ok_or_else(|| Error::InvalidSubgroupoid(sub.describe(&self.groupoid)))
    }

    pub fn hom(&self, a: &Arc<SiteObject>, b: &Arc<SiteObject>) -> Result<Vec<TSet>> {
        tsets_among(a, b, &self.arrow_opens)
    }

    pub fn arrow_opens(&self) -> &[PointSet] {
        &self.arrow_opens
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsheaf::enumerate_eq_maps;
    use crate::generate::preset;

    fn site(name: &str) -> Site {
        Site::new(Arc::new(preset(name).unwrap())).unwrap()
    }

    fn arrows(s: &Site, names: &[&str]) -> PointSet {
        s.groupoid().arrows().set_of(names).unwrap()
    }

    #[test]
    fn z2_conditions() {
        let s = site("Z2");
        let regular = s.object_named(&["1"]).unwrap();
        let point = s.object_named(&["1", "s"]).unwrap();
        assert!(is_valid_tset(regular, point, arrows(&s, &["1", "s"])).is_empty());
        assert_eq!(is_valid_tset(point, regular, arrows(&s, &["s"])), vec![TsetCondition::IV]);
        assert!(is_valid_tset(regular, regular, arrows(&s, &["1"])).is_empty());
    }

    #[test]
    fn z2_hom_counts() {
        let s = site("Z2");
        let regular = s.object_named(&["1"]).unwrap();
        let point = s.object_named(&["1", "s"]).unwrap();
        assert_eq!(s.hom(regular, point).unwrap().len(), 1);
        assert_eq!(s.hom(point, regular).unwrap().len(), 0);
        let endos = s.hom(regular, regular).unwrap();
        let names: Vec<_> = endos.iter().map(TSet::arrow_names).collect();
        assert_eq!(names, [vec!["1"], vec!["s"]]);
    }

    #[test]
    fn apply_and_compose_in_z2() {
        let s = site("Z2");
        let regular = s.object_named(&["1"]).unwrap();
        let swap = tset(regular, regular, arrows(&s, &["s"])).unwrap();
        assert_eq!(swap.graph().unwrap().graph, vec![1, 0]);
        let square = tset_compose(&swap, &swap).unwrap();
        assert_eq!(square, identity_tset(regular));
        assert_eq!(identity_tset(regular).graph().unwrap(), EqMap::identity(regular.sheaf()));
    }

    #[test]
    fn compose_checks_objects() {
        let s = site("Z2");
        let regular = s.object_named(&["1"]).unwrap();
        let point = s.object_named(&["1", "s"]).unwrap();
        let to_point = tset(regular, point, arrows(&s, &["1", "s"])).unwrap();
        assert_eq!(tset_compose(&to_point, &to_point).unwrap_err(), Error::ObjectMismatch);
    }

    #[test]
    fn identities() {
        let p2 = site("P2");
        let total = p2.object(OpenSubgroupoid::total(p2.groupoid())).unwrap();
        assert_eq!(identity_tset(total).arrows, p2.groupoid().all_arrows());
        let d2 = site("D2");
        let a = d2.object_named(&["1a"]).unwrap();
        assert_eq!(identity_tset(a).arrow_names(), ["1a"]);
    }

    #[test]
    fn p2_map_into_total_object() {
        let s = site("P2");
        let total = s.object(OpenSubgroupoid::total(s.groupoid())).unwrap();
        let ids = s.object_named(&["1a", "1b"]).unwrap();
        let hom = s.hom(ids, total).unwrap();
        assert_eq!(hom.len(), 1);
        let g = s.groupoid();
        let graph = hom[0].graph().unwrap();
        for (k, class) in ids.gun().classes().iter().enumerate() {
            let f = class.first().unwrap();
            assert_eq!(total.sheaf().proj(graph.graph[k]), g.cod(f));
        }
    }

    #[test]
    fn hom_sets_match_equivariant_maps_on_presets() {
        for name in ["Z2", "D2", "I2", "P2"] {
            let s = site(name);
            for a in s.objects() {
                for b in s.objects() {
                    let tsets = s.hom(a, b).unwrap();
                    let mut graphs: Vec<EqMap> = tsets.iter().map(|t| t.graph().unwrap()).collect();
                    graphs.sort();
                    assert_eq!(graphs, enumerate_eq_maps(a.sheaf(), b.sheaf()).unwrap(), "{name}");
                }
            }
        }
    }

    #[test]
    fn subobject_frames() {
        let p2 = site("P2");
        let ids = p2.object_named(&["1a", "1b"]).unwrap();
        assert_eq!(subobject_lattice(ids).unwrap().opens.len(), 4);
        let z2 = site("Z2");
        let regular = z2.object_named(&["1"]).unwrap();
        let lattice = subobject_lattice(regular).unwrap();
        assert_eq!(lattice.opens.len(), 2);
        assert_eq!(lattice.sub_from_open(regular.sub().objects), regular.sheaf().total().all());
        assert_eq!(lattice.sub_from_open(PointSet::EMPTY), PointSet::EMPTY);
    }

    #[test]
    fn partial_maps() {
        let s = site("D2");
        let total = s.object_named(&["1a", "1b"]).unwrap();
        let a = s.object_named(&["1a"]).unwrap();
        let t = partial_tset(total, a, arrows(&s, &["1a"])).unwrap();
        assert_eq!(t.source.describe(), "({a}, {1a})");
        let empty = partial_tset(total, a, PointSet::EMPTY).unwrap();
        assert_eq!(empty.source.sub(), OpenSubgroupoid::EMPTY);
        let full = partial_tset(total, total, total.sub().arrows).unwrap();
        assert_eq!(full, identity_tset(total));
        assert_eq!(
            partial_tset(a, total, arrows(&s, &["1b"])).unwrap_err(),
            Error::ConditionViolated(vec![TsetCondition::II])
        );
    }
}
