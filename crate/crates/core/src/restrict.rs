//! Restriction of the Moerdijk site along a replete inclusion `ι: H ↪ G`:
//! the functor `I`, its object-level right inverse `J`, the comparison
//! morphisms `v̂` and the lifting of morphisms through `I`.

use std::sync::Arc;

use serde::Serialize;

use crate::eqsheaf::EqMap;
use crate::error::{Error, Result};
use crate::groupoid::{OpenSubgroupoid, RepleteInclusion};
use crate::pointset::PointSet;
use crate::site::{identity_tset, partial_tset, tset, tset_compose, Site, SiteObject, SubobjectLattice, TSet};

/// The two sites of a replete inclusion, built once.
#[derive(Clone, Debug)]
pub struct Restriction {
    inclusion: RepleteInclusion,
    ambient: Site,
    sub: Site,
}

/// A morphism `A → B` of `S_G` lifted from `t_H: I(A) → I(B)`.
#[derive(Clone, Debug)]
pub struct Lift {
    /// The arrow set `S`.
    pub arrows: PointSet,
    /// `ŝ`, out of the subobject `(c(S), N↾c(S))` of `A`, into `J(I(B))`.
    pub lifted: TSet,
    /// The subobject inclusion into `A`.
    pub inclusion: TSet,
    /// `v̂: B → J(I(B))`.
    pub comparison: TSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftWitness {
    pub source: String,
    pub target: String,
    pub restricted: Vec<String>,
    pub lifted: Vec<String>,
    pub lifted_source: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SiteFunctorReport {
    pub carrier: Vec<String>,
    pub object_map: Vec<(String, String)>,
    pub morphisms_checked: usize,
    pub pullback_iso: bool,
    pub m_intersection: bool,
    pub functorial: bool,
    pub comparison_gate: bool,
    pub essentially_surjective: bool,
    pub essentially_full: bool,
    pub witnesses: Vec<LiftWitness>,
    pub failures: Vec<String>,
}

impl SiteFunctorReport {
    pub fn all_ok(&self) -> bool {
        self.pullback_iso
            && self.m_intersection
            && self.functorial
            && self.comparison_gate
            && self.essentially_surjective
            && self.essentially_full
            && self.failures.is_empty()
    }
}

impl Restriction {
    pub fn new(inclusion: RepleteInclusion) -> Result<Self> {
        let ambient = Site::new(Arc::clone(inclusion.ambient()))?;
        let sub = Site::new(Arc::clone(inclusion.sub()))?;
        Ok(Restriction { inclusion, ambient, sub })
    }

    pub fn inclusion(&self) -> &RepleteInclusion {
        &self.inclusion
    }

    pub fn ambient(&self) -> &Site {
        &self.ambient
    }

    pub fn sub(&self) -> &Site {
        &self.sub
    }

    fn sub_object(&self, sub: OpenSubgroupoid) -> Result<&Arc<SiteObject>> {
        self.sub
            .object(sub)
            .ok_or_else(|| Error::InvalidSubgroupoid(sub.describe(self.sub.groupoid())))
    }

    fn ambient_object(&self, sub: OpenSubgroupoid) -> Result<&Arc<SiteObject>> {
        self.ambient
            .object(sub)
            .ok_or_else(|| Error::InvalidSubgroupoid(sub.describe(self.ambient.groupoid())))
    }

    /// `I(U, N) = (U ∩ H₀, N ∩ H₁)`.
    pub fn restrict_object(&self, a: &SiteObject) -> Result<&Arc<SiteObject>> {
        let s = a.sub();
        let sub = OpenSubgroupoid {
            objects: self.inclusion.restrict_objects(s.objects),
            arrows: self.inclusion.restrict_arrows(s.arrows),
        };
        self.sub_object(sub)
    }

    /// The isomorphism `⟨H, U ∩ H₀, N ∩ H₁⟩ → ι*⟨G, U, N⟩`,
    /// `[h] ↦ (c(h), [ι(h)]_N)`, checked to be invertible.
    pub fn pullback_iso(&self, a: &SiteObject) -> Result<EqMap> {
        let restricted = self.restrict_object(a)?;
        let (pulled, pairs) = a.sheaf().pullback(self.inclusion.morphism())?;
        let h = self.sub.groupoid();
        let graph = restricted
            .gun()
            .classes()
            .iter()
            .map(|class| {
                let arrow = class.first().unwrap();
                let image = a.gun().class_of(self.inclusion.embed_arrow(arrow))?;
                pairs.iter().position(|&pq| pq == (h.cod(arrow), image))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidSheaf("restricted class has no image in the pullback".into()))?;
        let map = EqMap { graph };
        map.inverse(restricted.sheaf(), &pulled)
            .map(|_| map)
            .ok_or_else(|| Error::InvalidSheaf("restriction is not isomorphic to the pullback".into()))
    }

    /// `T ∩ H₁` between the restricted objects.
    pub fn restrict_tset(&self, t: &TSet) -> Result<TSet> {
        let source = self.restrict_object(&t.source)?;
        let target = self.restrict_object(&t.target)?;
        tset(source, target, self.inclusion.restrict_arrows(t.arrows))
    }

    /// `J(V, M)`: `N = ⋃{K open in G₁ : K ∩ H₁ ⊆ M}`, `U = d(N) ∪ c(N)`.
    pub fn saturate_object(&self, b: &SiteObject) -> Result<&Arc<SiteObject>> {
        let g = self.ambient.groupoid();
        let m = self.inclusion.embed_arrows(b.sub().arrows);
        let h1 = self.inclusion.arrow_carrier();
        let n = self
            .ambient
            .arrow_opens()
            .iter()
            .filter(|k| k.intersection(h1).is_subset(m))
            .fold(PointSet::EMPTY, |acc, &k| acc.union(k));
        let u = g.dom_image(n).union(g.cod_image(n));
        let sub = OpenSubgroupoid::new(g, n)?;
        if sub.objects != u {
            return Err(Error::InvalidSubgroupoid("saturation has d(N) ≠ c(N)".into()));
        }
        self.ambient_object(sub)
    }

    /// `v̂: A → J(I(A))`, realised as the T-set `N̄ ∩ c⁻¹(U)`.
    pub fn comparison_vhat(&self, a: &Arc<SiteObject>) -> Result<TSet> {
        let g = self.ambient.groupoid();
        let saturated = self.saturate_object(self.restrict_object(a)?)?;
        let t = saturated.sub().arrows.intersection(g.cod_preimage(a.sub().objects));
        tset(a, saturated, t)
    }

    /// The lift of `t_H: I(A) → I(B)`:
    /// `S = c⁻¹(U) ∩ ⋃{P open in G₁ : P ∩ H₁ ⊆ T}`.
    pub fn lift_tset(&self, a: &Arc<SiteObject>, b: &Arc<SiteObject>, t_h: &TSet) -> Result<Lift> {
        if *t_h.source != **self.restrict_object(a)? || *t_h.target != **self.restrict_object(b)? {
            return Err(Error::InvalidInput("morphism is not between the restricted objects".into()));
        }
        let g = self.ambient.groupoid();
        let t = self.inclusion.embed_arrows(t_h.arrows);
        let h1 = self.inclusion.arrow_carrier();
        let union = self
            .ambient
            .arrow_opens()
            .iter()
            .filter(|p| p.intersection(h1).is_subset(t))
            .fold(PointSet::EMPTY, |acc, &p| acc.union(p));
        let s = g.cod_preimage(a.sub().objects).intersection(union);
        let comparison = self.comparison_vhat(b)?;
        let lifted = partial_tset(a, &comparison.target, s)?;
        let lattice = SubobjectLattice { object: Arc::clone(a), opens: vec![] };
        let inclusion = lattice.inclusion(lifted.source.sub().objects)?;
        Ok(Lift { arrows: s, lifted, inclusion, comparison })
    }

    /// Checks `S ∩ H₁ = T`, that `I` sends both zig-zag legs to identities
    /// and that `I(ŝ) = t_H`.
    pub fn check_lift(&self, lift: &Lift, t_h: &TSet) -> Result<bool> {
        let restricted_s = self.inclusion.restrict_arrows(lift.arrows);
        let legs_identity = self.restrict_tset(&lift.inclusion)? == identity_tset(&t_h.source)
            && self.restrict_tset(&lift.comparison)? == identity_tset(&t_h.target);
        let square = self.restrict_tset(&lift.lifted)? == *t_h
            && self.restrict_tset(&lift.lifted)?.graph()? == t_h.graph()?;
        Ok(restricted_s == t_h.arrows && legs_identity && square)
    }

    /// `m(V × W) ∩ H₁ = m((V ∩ H₁) × (W ∩ H₁))` for all opens `V, W` of
    /// `G₁`; returns the first failing pair.
    pub fn m_intersection(&self) -> Option<(PointSet, PointSet)> {
        let g = self.ambient.groupoid();
        let h1 = self.inclusion.arrow_carrier();
        let opens = self.ambient.arrow_opens();
        for &v in opens {
            for &w in opens {
                let lhs = g.compose_sets(v, w).intersection(h1);
                let rhs = g.compose_sets(v.intersection(h1), w.intersection(h1));
                if lhs != rhs {
                    return Some((v, w));
                }
            }
        }
        None
    }

    /// Graph of `[f]_N ↦ [f]_N̄`, computed from classes directly.
    pub fn comparison_oracle(&self, a: &SiteObject, saturated: &SiteObject) -> Option<EqMap> {
        let graph = a
            .gun()
            .classes()
            .iter()
            .map(|c| saturated.gun().class_of(c.first().unwrap()))
            .collect::<Option<Vec<_>>>()?;
        Some(EqMap { graph })
    }

    pub fn verify(&self) -> Result<SiteFunctorReport> {
        let g = self.ambient.groupoid();
        let mut report = SiteFunctorReport {
            carrier: g.object_names(self.inclusion.carrier()),
            pullback_iso: true,
            m_intersection: true,
            functorial: true,
            comparison_gate: true,
            essentially_surjective: true,
            essentially_full: true,
            ..Default::default()
        };

        for b in self.sub.objects() {
            let saturated = self.saturate_object(b)?;
            if **self.restrict_object(saturated)? != **b {
                report.essentially_surjective = false;
                report.failures.push(format!("I(J{}) ≠ {}", b.describe(), b.describe()));
            }
        }

        if let Some((v, w)) = self.m_intersection() {
            report.m_intersection = false;
            report.failures.push(format!(
                "m-intersection fails for V = {:?}, W = {:?}",
                g.arrow_names(v),
                g.arrow_names(w)
            ));
        }

        for a in self.ambient.objects() {
            let ia = self.restrict_object(a)?;
            report.object_map.push((a.describe(), ia.describe()));
            if self.pullback_iso(a).is_err() {
                report.pullback_iso = false;
                report.failures.push(format!("pullback isomorphism fails at {}", a.describe()));
            }
            let vhat = self.comparison_vhat(a)?;
            let oracle = self.comparison_oracle(a, &vhat.target);
            if oracle.as_ref() != Some(&vhat.graph()?) || self.restrict_tset(&vhat)? != identity_tset(ia) {
                report.comparison_gate = false;
                report.failures.push(format!("comparison v̂ fails at {}", a.describe()));
            }
            if self.restrict_tset(&identity_tset(a))? != identity_tset(ia) {
                report.functorial = false;
                report.failures.push(format!("I does not preserve the identity of {}", a.describe()));
            }
        }

        let objects = self.ambient.objects();
        let homs: Vec<Vec<Vec<TSet>>> = objects
            .iter()
            .map(|a| objects.iter().map(|b| self.ambient.hom(a, b)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                for t in &homs[i][j] {
                    report.morphisms_checked += 1;
                    if !self.restriction_matches_graph(t)? {
                        report.functorial = false;
                        report.failures.push(format!("I({:?}) disagrees with the restricted graph", t.arrow_names()));
                    }
                    for t2 in homs[j].iter().flatten() {
                        let composite = tset_compose(t, t2)?;
                        let restricted = tset_compose(&self.restrict_tset(t)?, &self.restrict_tset(t2)?)?;
                        if self.restrict_tset(&composite)? != restricted {
                            report.functorial = false;
                            report.failures.push(format!(
                                "I does not preserve the composite of {:?} and {:?}",
                                t.arrow_names(),
                                t2.arrow_names()
                            ));
                        }
                    }
                }
                let (ia, ib) = (self.restrict_object(a)?, self.restrict_object(b)?);
                for t_h in self.sub.hom(ia, ib)? {
                    let lift = self.lift_tset(a, b, &t_h);
                    let (verified, lifted, lifted_source) = match &lift {
                        Ok(l) => (self.check_lift(l, &t_h)?, g.arrow_names(l.arrows), l.lifted.source.describe()),
                        Err(e) => (false, vec![], e.to_string()),
                    };
                    if !verified {
                        report.essentially_full = false;
                    }
                    report.witnesses.push(LiftWitness {
                        source: a.describe(),
                        target: b.describe(),
                        restricted: t_h.arrow_names(),
                        lifted,
                        lifted_source,
                        verified,
                    });
                }
            }
        }
        Ok(report)
    }

    /// `I(t)` maps `[h]` to the class of `t([ι(h)])`.
    fn restriction_matches_graph(&self, t: &TSet) -> Result<bool> {
        let restricted = self.restrict_tset(t)?;
        let big = t.graph()?;
        let small = restricted.graph()?;
        for (k, class) in restricted.source.gun().classes().iter().enumerate() {
            let h = class.first().unwrap();
            let Some(up) = t.source.gun().class_of(self.inclusion.embed_arrow(h)) else {
                return Ok(false);
            };
            let image = restricted.target.gun().classes()[small.graph[k]].first().unwrap();
            if t.target.gun().class_of(self.inclusion.embed_arrow(image)) != Some(big.graph[up]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::preset;

    fn restriction(name: &str, h0: &[&str]) -> Restriction {
        let g = Arc::new(preset(name).unwrap());
        Restriction::new(RepleteInclusion::from_names(&g, h0).unwrap()).unwrap()
    }

    fn object<'a>(site: &'a Site, arrows: &[&str]) -> &'a Arc<SiteObject> {
        site.object_named(arrows).unwrap()
    }

    #[test]
    fn restrict_objects() {
        let d2 = restriction("D2", &["a"]);
        let a = object(d2.ambient(), &["1a", "1b"]);
        assert_eq!(d2.restrict_object(a).unwrap().describe(), "({a}, {1a})");
        let i2 = restriction("I2", &["a"]);
        let total = i2.ambient().object(OpenSubgroupoid::total(i2.ambient().groupoid())).unwrap();
        assert_eq!(i2.restrict_object(total).unwrap().describe(), "({a}, {1a})");
        let empty = i2.ambient().object(OpenSubgroupoid::EMPTY).unwrap();
        assert_eq!(i2.restrict_object(empty).unwrap().sub(), OpenSubgroupoid::EMPTY);
    }

    #[test]
    fn restrict_identity_and_tset() {
        let d2 = restriction("D2", &["a"]);
        let a = object(d2.ambient(), &["1a", "1b"]);
        let restricted = d2.restrict_tset(&identity_tset(a)).unwrap();
        assert_eq!(restricted.arrow_names(), ["1a"]);
        assert_eq!(restricted, identity_tset(d2.restrict_object(a).unwrap()));
    }

    #[test]
    fn saturation_examples() {
        let i2 = restriction("I2", &["a"]);
        let b = object(i2.sub(), &["1a"]);
        assert_eq!(i2.saturate_object(b).unwrap().describe(), "({a,b}, {1a,1b})");
        let d2 = restriction("D2", &["a"]);
        let b = object(d2.sub(), &["1a"]);
        assert_eq!(d2.saturate_object(b).unwrap().describe(), "({a,b}, {1a,1b})");
        let p2 = restriction("P2", &["a", "b"]);
        let total = p2.sub().object(OpenSubgroupoid::total(p2.sub().groupoid())).unwrap();
        assert_eq!(p2.saturate_object(total).unwrap().sub(), OpenSubgroupoid::total(p2.ambient().groupoid()));
    }

    #[test]
    fn comparison_examples() {
        let d2 = restriction("D2", &["a"]);
        let a = object(d2.ambient(), &["1a"]);
        let vhat = d2.comparison_vhat(a).unwrap();
        assert_eq!(vhat.arrow_names(), ["1a"]);
        assert_eq!(vhat.target.describe(), "({a,b}, {1a,1b})");

        let i2 = restriction("I2", &["a"]);
        let total = i2.ambient().object(OpenSubgroupoid::total(i2.ambient().groupoid())).unwrap();
        assert_eq!(i2.comparison_vhat(total).unwrap(), identity_tset(total));
    }

    #[test]
    fn lift_examples() {
        let d2 = restriction("D2", &["a"]);
        let a = object(d2.ambient(), &["1a", "1b"]);
        let ia = d2.restrict_object(a).unwrap();
        let t_h = identity_tset(ia);
        let lift = d2.lift_tset(a, a, &t_h).unwrap();
        assert_eq!(d2.inclusion().restrict_arrows(lift.arrows), t_h.arrows);
        assert!(d2.check_lift(&lift, &t_h).unwrap());

        let i2 = restriction("I2", &["a"]);
        let total = i2.ambient().object(OpenSubgroupoid::total(i2.ambient().groupoid())).unwrap();
        let t_h = identity_tset(i2.restrict_object(total).unwrap());
        let lift = i2.lift_tset(total, total, &t_h).unwrap();
        assert_eq!(lift.arrows, i2.ambient().groupoid().all_arrows());
    }

    #[test]
    fn verification_on_presets() {
        for (name, h0) in [("D2", &["a"][..]), ("I2", &["a"]), ("P2", &["a", "b"]), ("Z2", &["*"])] {
            let report = restriction(name, h0).verify().unwrap();
            assert!(report.all_ok(), "{name}: {:?}", report.failures);
            assert!(report.witnesses.iter().all(|w| w.verified));
        }
    }
}
