//! Finite topological spaces and continuous maps.
//!
//! A finite topology is determined by the minimal open neighbourhood of each
//! point, so that is what [`FinSpace`] stores. The full frame of opens is
//! available through [`FinSpace::opens`] and is enumerated on demand.

use crate::error::{Error, Result};
use crate::pointset::{PointSet, MAX_POINTS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSpace {
    labels: Vec<String>,
    nbhd: Vec<PointSet>,
}

impl FinSpace {
    /// Builds the least topology on `points` containing every member of
    /// `subbasis`. Atoms are sorted and deduplicated.
    pub fn make_space<S: AsRef<str>>(points: &[S], subbasis: &[Vec<S>]) -> Result<Self> {
        let mut labels: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
        labels.sort();
        labels.dedup();
        let mut sets = Vec::with_capacity(subbasis.len());
        for member in subbasis {
            let mut s = PointSet::EMPTY;
            for atom in member {
                match labels.binary_search_by(|l| l.as_str().cmp(atom.as_ref())) {
                    Ok(i) => s.insert(i),
                    Err(_) => {
                        return Err(Error::InvalidSubbasis(
                            member.iter().map(|a| a.as_ref().to_owned()).collect(),
                        ))
                    }
                }
            }
            sets.push(s);
        }
        Self::from_subbasis(labels, &sets)
    }

    /// Builds the topology generated by `subbasis` over indexed points.
    pub fn from_subbasis(labels: Vec<String>, subbasis: &[PointSet]) -> Result<Self> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n));
        }
        let all = PointSet::full(n);
        if subbasis.iter().any(|s| !s.is_subset(all)) {
            return Err(Error::InvalidSubset);
        }
        let nbhd = (0..n)
            .map(|p| {
                subbasis
                    .iter()
                    .filter(|s| s.contains(p))
                    .fold(all, |acc, s| acc.intersection(*s))
            })
            .collect();
        Ok(FinSpace { labels, nbhd })
    }

    /// Builds a space directly from minimal neighbourhoods. The family is
    /// closed up (each neighbourhood absorbs the neighbourhoods of its points)
    /// so the result is always a valid topology.
    pub fn from_neighbourhoods(labels: Vec<String>, nbhd: Vec<PointSet>) -> Result<Self> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n));
        }
        if nbhd.len() != n {
            return Err(Error::InvalidInput("one neighbourhood per point".into()));
        }
        let all = PointSet::full(n);
        if nbhd.iter().any(|s| !s.is_subset(all)) {
            return Err(Error::InvalidSubset);
        }
        let mut nbhd: Vec<PointSet> = nbhd.into_iter().enumerate().map(|(p, s)| s.with(p)).collect();
        // Transitive closure of the specialisation preorder.
        loop {
            let mut changed = false;
            for p in 0..n {
                let grown = nbhd[p].iter().fold(nbhd[p], |acc, q| acc.union(nbhd[q]));
                if grown != nbhd[p] {
                    nbhd[p] = grown;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(FinSpace { labels, nbhd })
    }

    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Self {
        let mut labels: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
        labels.sort();
        labels.dedup();
        let nbhd = (0..labels.len()).map(PointSet::singleton).collect();
        FinSpace { labels, nbhd }
    }

    pub fn indiscrete<S: AsRef<str>>(points: &[S]) -> Self {
        let mut labels: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
        labels.sort();
        labels.dedup();
        let all = PointSet::full(labels.len());
        FinSpace { nbhd: vec![all; labels.len()], labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn all(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| Error::UnknownPoint(l.as_ref().to_owned()))
            })
            .collect()
    }

    /// Labels of the members of `s`, sorted.
    pub fn names(&self, s: PointSet) -> Vec<String> {
        let mut v: Vec<String> = s.iter().map(|p| self.labels[p].clone()).collect();
        v.sort();
        v
    }

    /// Minimal open neighbourhood of `p`.
    pub fn nbhd(&self, p: usize) -> PointSet {
        self.nbhd[p]
    }

    pub fn neighbourhoods(&self) -> &[PointSet] {
        &self.nbhd
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        s.is_subset(self.all()) && s.iter().all(|p| self.nbhd[p].is_subset(s))
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        self.is_open(self.all().difference(s))
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, p| acc.union(self.nbhd[p]))
    }

    /// Largest open set contained in `s`.
    pub fn interior(&self, s: PointSet) -> PointSet {
        s.iter().filter(|&p| self.nbhd[p].is_subset(s)).collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.nbhd.iter().all(|s| s.len() == 1)
    }

    pub fn is_indiscrete(&self) -> bool {
        self.nbhd.iter().all(|&s| s == self.all())
    }

    /// Every open set, in shortlex order of their sorted member lists.
    pub fn opens(&self) -> Vec<PointSet> {
        let mut found = vec![PointSet::EMPTY];
        let mut seen = std::collections::HashSet::from([PointSet::EMPTY]);
        let mut i = 0;
        while i < found.len() {
            let cur = found[i];
            for p in self.all().difference(cur).iter() {
                let next = cur.union(self.nbhd[p]);
                if seen.insert(next) {
                    found.push(next);
                }
            }
            i += 1;
        }
        sort_shortlex(&mut found);
        found
    }

    /// Subspace on `s`; the points keep their relative order.
    pub fn subspace(&self, s: PointSet) -> Result<FinSpace> {
        if !s.is_subset(self.all()) {
            return Err(Error::InvalidSubset);
        }
        let members: Vec<usize> = s.iter().collect();
        let reindex = |set: PointSet| -> PointSet {
            members
                .iter()
                .enumerate()
                .filter(|(_, &p)| set.contains(p))
                .map(|(i, _)| i)
                .collect()
        };
        Ok(FinSpace {
            labels: members.iter().map(|&p| self.labels[p].clone()).collect(),
            nbhd: members.iter().map(|&p| reindex(self.nbhd[p])).collect(),
        })
    }

    /// Quotient by a partition. Class `k` becomes point `k`, labelled by
    /// `labels[k]`.
    pub fn quotient_labelled(&self, classes: &[PointSet], labels: Vec<String>) -> Result<(FinSpace, CtsMap)> {
        let mut covered = PointSet::EMPTY;
        for c in classes {
            if c.is_empty() {
                return Err(Error::InvalidPartition("empty class".into()));
            }
            if !c.is_disjoint(covered) {
                return Err(Error::InvalidPartition("classes overlap".into()));
            }
            covered = covered.union(*c);
        }
        if covered != self.all() {
            return Err(Error::InvalidPartition("classes do not cover the space".into()));
        }
        if classes.len() != labels.len() {
            return Err(Error::InvalidInput("one label per class".into()));
        }
        let mut proj = vec![0; self.len()];
        for (k, c) in classes.iter().enumerate() {
            for p in c.iter() {
                proj[p] = k;
            }
        }
        let preimage = |s: PointSet| -> PointSet {
            s.iter().fold(PointSet::EMPTY, |acc, k| acc.union(classes[k]))
        };
        let image = |s: PointSet| -> PointSet { s.iter().map(|p| proj[p]).collect() };
        // The minimal saturated open set around a class.
        let nbhd = (0..classes.len())
            .map(|k| {
                let mut cur = PointSet::singleton(k);
                loop {
                    let next = image(self.open_hull(preimage(cur)));
                    if next == cur {
                        break cur;
                    }
                    cur = next;
                }
            })
            .collect();
        let q = FinSpace { labels, nbhd };
        let map = CtsMap::new(self.clone(), q.clone(), proj)?;
        Ok((q, map))
    }

    /// Quotient by a partition; class labels are `[x]` for the first member `x`.
    pub fn quotient(&self, classes: &[PointSet]) -> Result<(FinSpace, CtsMap)> {
        let labels = classes
            .iter()
            .map(|c| format!("[{}]", c.first().map(|p| self.labels[p].as_str()).unwrap_or("")))
            .collect();
        self.quotient_labelled(classes, labels)
    }
}

/// Sorts sets by size, then by their member lists.
pub fn sort_shortlex(sets: &mut [PointSet]) {
    sets.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtsMap {
    source: FinSpace,
    target: FinSpace,
    graph: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MapReport {
    pub continuous: bool,
    pub open_map: bool,
    pub local_homeo: bool,
}

impl CtsMap {
    /// Wraps a total function. Continuity is not required here; see
    /// [`CtsMap::check`].
    pub fn new(source: FinSpace, target: FinSpace, graph: Vec<usize>) -> Result<Self> {
        if graph.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "graph has {} entries for {} points",
                graph.len(),
                source.len()
            )));
        }
        if let Some(&bad) = graph.iter().find(|&&y| y >= target.len()) {
            return Err(Error::InvalidMap(format!("value {bad} outside target")));
        }
        Ok(CtsMap { source, target, graph })
    }

    pub fn identity(space: FinSpace) -> Self {
        let graph = (0..space.len()).collect();
        CtsMap { source: space.clone(), target: space, graph }
    }

    pub fn source(&self) -> &FinSpace {
        &self.source
    }

    pub fn target(&self) -> &FinSpace {
        &self.target
    }

    pub fn graph(&self) -> &[usize] {
        &self.graph
    }

    pub fn apply(&self, p: usize) -> usize {
        self.graph[p]
    }

    pub fn image(&self, s: PointSet) -> PointSet {
        image(&self.graph, s)
    }

    pub fn preimage(&self, s: PointSet) -> PointSet {
        preimage(&self.graph, s)
    }

    pub fn is_continuous(&self) -> bool {
        is_continuous(&self.source, &self.target, &self.graph)
    }

    pub fn check(&self) -> MapReport {
        map_report(&self.source, &self.target, &self.graph)
    }

    pub fn compose(&self, after: &CtsMap) -> Result<CtsMap> {
        if self.target != after.source {
            return Err(Error::TargetMismatch);
        }
        let graph = self.graph.iter().map(|&y| after.graph[y]).collect();
        CtsMap::new(self.source.clone(), after.target.clone(), graph)
    }
}

pub fn image(graph: &[usize], s: PointSet) -> PointSet {
    s.iter().map(|p| graph[p]).collect()
}

pub fn preimage(graph: &[usize], s: PointSet) -> PointSet {
    graph
        .iter()
        .enumerate()
        .filter(|(_, &y)| s.contains(y))
        .map(|(p, _)| p)
        .collect()
}

/// A map between finite spaces is continuous iff it carries each minimal
/// neighbourhood into the minimal neighbourhood of the image point.
pub fn is_continuous(source: &FinSpace, target: &FinSpace, graph: &[usize]) -> bool {
    (0..source.len()).all(|p| image(graph, source.nbhd(p)).is_subset(target.nbhd(graph[p])))
}

/// Images of unions are unions of images, so checking minimal
/// neighbourhoods suffices.
pub fn is_open_map(source: &FinSpace, target: &FinSpace, graph: &[usize]) -> bool {
    (0..source.len()).all(|p| target.is_open(image(graph, source.nbhd(p))))
}

/// Continuity, openness and the local-homeomorphism property. A map of
/// finite spaces is a local homeomorphism iff it is continuous, open and
/// injective on every minimal neighbourhood.
pub fn map_report(source: &FinSpace, target: &FinSpace, graph: &[usize]) -> MapReport {
    let continuous = is_continuous(source, target, graph);
    let open_map = is_open_map(source, target, graph);
    let locally_injective = (0..source.len()).all(|p| {
        let u = source.nbhd(p);
        image(graph, u).len() == u.len()
    });
    MapReport {
        continuous,
        open_map,
        local_homeo: continuous && open_map && locally_injective,
    }
}

/// Fibre product `X ×_Z Y` of `f: X → Z` and `g: Y → Z` with the subspace
/// topology of the product. Returns the space and the two projections.
pub fn fiber_product(f: &CtsMap, g: &CtsMap) -> Result<(FinSpace, CtsMap, CtsMap)> {
    if f.target != g.target {
        return Err(Error::TargetMismatch);
    }
    let (space, pairs) = fiber_product_raw(&f.source, &f.graph, &g.source, &g.graph)?;
    let p1 = CtsMap::new(space.clone(), f.source.clone(), pairs.iter().map(|&(x, _)| x).collect())?;
    let p2 = CtsMap::new(space.clone(), g.source.clone(), pairs.iter().map(|&(_, y)| y).collect())?;
    Ok((space, p1, p2))
}

/// Fibre product over raw graphs. Points are the pairs `(x, y)` with
/// `fx[x] == gy[y]`, in lexicographic order of `(x, y)`.
pub fn fiber_product_raw(
    x: &FinSpace,
    fx: &[usize],
    y: &FinSpace,
    gy: &[usize],
) -> Result<(FinSpace, Vec<(usize, usize)>)> {
    let pairs: Vec<(usize, usize)> = (0..x.len())
        .flat_map(|a| (0..y.len()).filter(move |&b| fx[a] == gy[b]).map(move |b| (a, b)))
        .collect();
    if pairs.len() > MAX_POINTS {
        return Err(Error::TooManyPoints(pairs.len()));
    }
    let nbhd = pairs
        .iter()
        .map(|&(a, b)| {
            let (ua, ub) = (x.nbhd(a), y.nbhd(b));
            pairs
                .iter()
                .enumerate()
                .filter(|(_, &(a2, b2))| ua.contains(a2) && ub.contains(b2))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let labels = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", x.label(a), y.label(b)))
        .collect();
    Ok((FinSpace { labels, nbhd }, pairs))
}
