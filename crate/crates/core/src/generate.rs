//! Preset groupoids, parametrised families and a seeded random generator.
//!
//! Families:
//! - `Z2`, `D2`, `I2`, `P2`: the four desk instances;
//! - `cyclic:N`: the cyclic group of order `N` as a one-object groupoid;
//! - `discrete:N:TOP`: `N` objects with identity arrows only;
//! - `pair:N:TOP`: the pair groupoid on `N` objects;
//! - `action:GROUP:N:TOP`: `cK` rotates `N` objects, `klein`/`s3` act trivially;
//! - `random`: an action groupoid drawn from a seed;
//! - `SPEC+SPEC`: disjoint union.
//!
//! `TOP` is `discrete` or `indiscrete`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fintop::FinSpace;
use crate::groupoid::FinGroupoid;
use crate::pointset::PointSet;

/// Largest arrow count the random generator produces.
pub const RANDOM_MAX_ARROWS: usize = 10;
const RANDOM_RETRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Discrete,
    Indiscrete,
}

impl Topology {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Topology::Discrete),
            "indiscrete" => Ok(Topology::Indiscrete),
            _ => Err(Error::UnknownPreset(s.to_owned())),
        }
    }

    fn space(self, labels: &[String]) -> FinSpace {
        match self {
            Topology::Discrete => FinSpace::discrete(labels),
            Topology::Indiscrete => FinSpace::indiscrete(labels),
        }
    }
}

/// A finite group given by its multiplication table; element 0 is the unit.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    /// `table[a][b] = a * b`.
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|k| match k {
                0 => "e".to_owned(),
                _ => format!("r{k}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup { names, table }
    }

    pub fn klein() -> Self {
        let names = ["e", "s", "t", "st"].map(String::from).to_vec();
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        FiniteGroup { names, table }
    }

    /// Permutations of three letters, composed right to left.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
        let names = ["e", "r", "rr", "s", "sr", "srr"].map(String::from).to_vec();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        FiniteGroup { names, table }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "klein" => Ok(Self::klein()),
            "s3" => Ok(Self::symmetric3()),
            _ => match s.strip_prefix('c').and_then(|n| n.parse().ok()) {
                Some(n) if n >= 1 => Ok(Self::cyclic(n)),
                _ => Err(Error::UnknownPreset(s.to_owned())),
            },
        }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).unwrap()
    }
}

/// Object labels `a, b, c, ...`.
fn object_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|k| {
            if k < 26 {
                ((b'a' + k as u8) as char).to_string()
            } else {
                format!("x{k}")
            }
        })
        .collect()
}

/// Labelled structure data over already-built object and arrow spaces.
pub struct Labelled<'a> {
    pub objects: &'a FinSpace,
    pub arrows: &'a FinSpace,
    /// `(arrow, dom, cod)`.
    pub ends: Vec<(String, String, String)>,
    pub identities: Vec<(String, String)>,
    pub inverses: Vec<(String, String)>,
    /// `(g2, g1, g2 ∘ g1)`.
    pub compositions: Vec<(String, String, String)>,
}

impl Labelled<'_> {
    pub fn build(&self) -> Result<FinGroupoid> {
        let (objects, arrows) = (self.objects, self.arrows);
        let obj = |s: &str| objects.index_of(s).ok_or_else(|| Error::UnknownPoint(s.to_owned()));
        let arr = |s: &str| arrows.index_of(s).ok_or_else(|| Error::UnknownPoint(s.to_owned()));
        let n1 = arrows.len();
        let mut dom = vec![usize::MAX; n1];
        let mut cod = vec![usize::MAX; n1];
        for (a, d, c) in &self.ends {
            let k = arr(a)?;
            dom[k] = obj(d)?;
            cod[k] = obj(c)?;
        }
        if let Some(k) = dom.iter().position(|&d| d == usize::MAX) {
            return Err(Error::InvalidInput(format!("arrow {} has no endpoints", arrows.label(k))));
        }
        let mut unit = vec![usize::MAX; objects.len()];
        for (x, e) in &self.identities {
            unit[obj(x)?] = arr(e)?;
        }
        if let Some(x) = unit.iter().position(|&e| e == usize::MAX) {
            return Err(Error::InvalidInput(format!("object {} has no identity", objects.label(x))));
        }
        let mut inv = vec![usize::MAX; n1];
        for (a, b) in &self.inverses {
            let (a, b) = (arr(a)?, arr(b)?);
            inv[a] = b;
            inv[b] = a;
        }
        if let Some(k) = inv.iter().position(|&i| i == usize::MAX) {
            return Err(Error::InvalidInput(format!("arrow {} has no inverse", arrows.label(k))));
        }
        let comps = self
            .compositions
            .iter()
            .map(|(g2, g1, h)| Ok(((arr(g2)?, arr(g1)?), arr(h)?)))
            .collect::<Result<Vec<_>>>()?;
        FinGroupoid::new(objects.clone(), arrows.clone(), dom, cod, unit, inv, comps)
    }
}

/// The group `K` as a one-object groupoid on `*`, discrete.
pub fn group_groupoid(group: &FiniteGroup, identity_label: &str) -> Result<FinGroupoid> {
    let label = |k: usize| if k == 0 { identity_label.to_owned() } else { group.names[k].clone() };
    let labels: Vec<String> = (0..group.order()).map(label).collect();
    let objects = FinSpace::discrete(&["*"]);
    let arrows = FinSpace::discrete(&labels);
    let star = "*".to_owned();
    Labelled {
        objects: &objects,
        arrows: &arrows,
        ends: labels.iter().map(|l| (l.clone(), star.clone(), star.clone())).collect(),
        identities: vec![(star.clone(), label(0))],
        inverses: (0..group.order()).map(|k| (label(k), label(group.inverse(k)))).collect(),
        compositions: (0..group.order())
            .flat_map(|a| (0..group.order()).map(move |b| (a, b)))
            .map(|(a, b)| (label(a), label(b), label(group.table[a][b])))
            .collect(),
    }
    .build()
}

pub fn discrete_groupoid(n: usize, top: Topology) -> Result<FinGroupoid> {
    let objs = object_labels(n);
    let arrs: Vec<String> = objs.iter().map(|x| format!("1{x}")).collect();
    let objects = top.space(&objs);
    let arrows = top.space(&arrs);
    Labelled {
        objects: &objects,
        arrows: &arrows,
        ends: objs.iter().zip(&arrs).map(|(x, a)| (a.clone(), x.clone(), x.clone())).collect(),
        identities: objs.iter().cloned().zip(arrs.iter().cloned()).collect(),
        inverses: arrs.iter().map(|a| (a.clone(), a.clone())).collect(),
        compositions: arrs.iter().map(|a| (a.clone(), a.clone(), a.clone())).collect(),
    }
    .build()
}

/// Pair groupoid on `n` objects: one arrow `x → y` for every pair. Identities
/// are `1x`; the two non-identity arrows of the two-object case are `f: a → b`
/// and `g: b → a`, otherwise `xy` names the arrow `x → y`.
pub fn pair_groupoid(n: usize, top: Topology) -> Result<FinGroupoid> {
    let objs = object_labels(n);
    let name = |x: usize, y: usize| -> String {
        match (n, x, y) {
            (_, x, y) if x == y => format!("1{}", objs[x]),
            (2, 0, 1) => "f".into(),
            (2, 1, 0) => "g".into(),
            _ => format!("{}{}", objs[x], objs[y]),
        }
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let arrs: Vec<String> = pairs.iter().map(|&(x, y)| name(x, y)).collect();
    let objects = top.space(&objs);
    let arrows = top.space(&arrs);
    let mut compositions = Vec::new();
    for &(x, y) in &pairs {
        for z in 0..n {
            // (y → z) ∘ (x → y) = x → z
            compositions.push((name(y, z), name(x, y), name(x, z)));
        }
    }
    Labelled {
        objects: &objects,
        arrows: &arrows,
        ends: pairs.iter().map(|&(x, y)| (name(x, y), objs[x].clone(), objs[y].clone())).collect(),
        identities: (0..n).map(|x| (objs[x].clone(), name(x, x))).collect(),
        inverses: pairs.iter().map(|&(x, y)| (name(x, y), name(y, x))).collect(),
        compositions,
    }
    .build()
}

/// Action groupoid `X ⋊ K`: arrows `k_x: x → k·x`, topologised as the
/// product of discrete `K` with `X`. `action[k][x] = k·x`.
pub fn action_groupoid(group: &FiniteGroup, space: &FinSpace, action: &[Vec<usize>]) -> Result<FinGroupoid> {
    let n = space.len();
    let k = group.order();
    let arrow = |g: usize, x: usize| g * n + x;
    let arrow_label = |g: usize, x: usize| format!("{}_{}", group.names[g], space.label(x));
    let mut labels = Vec::with_capacity(k * n);
    let mut nbhd = Vec::with_capacity(k * n);
    for g in 0..k {
        for x in 0..n {
            labels.push(arrow_label(g, x));
            nbhd.push(space.nbhd(x).iter().map(|x2| arrow(g, x2)).collect::<PointSet>());
        }
    }
    // Arrow labels need not sort in construction order, so permute into
    // label order before building.
    let mut order: Vec<usize> = (0..k * n).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut rank = vec![0; k * n];
    for (r, &a) in order.iter().enumerate() {
        rank[a] = r;
    }
    let relabel = |s: PointSet| s.iter().map(|a| rank[a]).collect::<PointSet>();
    let arrows = FinSpace::from_neighbourhoods(
        order.iter().map(|&a| labels[a].clone()).collect(),
        order.iter().map(|&a| relabel(nbhd[a])).collect(),
    )?;
    let mut dom = vec![0; k * n];
    let mut cod = vec![0; k * n];
    let mut inv = vec![0; k * n];
    let mut comps = Vec::new();
    for g in 0..k {
        for x in 0..n {
            let a = rank[arrow(g, x)];
            let y = action[g][x];
            dom[a] = x;
            cod[a] = y;
            inv[a] = rank[arrow(group.inverse(g), y)];
            for h in 0..k {
                comps.push(((rank[arrow(h, y)], a), rank[arrow(group.table[h][g], x)]));
            }
        }
    }
    let unit = (0..n).map(|x| rank[arrow(0, x)]).collect();
    FinGroupoid::new(space.clone(), arrows, dom, cod, unit, inv, comps)
}

/// Disjoint union; labels of the right summand are primed until distinct.
pub fn disjoint_union(left: &FinGroupoid, right: &FinGroupoid) -> Result<FinGroupoid> {
    let fresh = |taken: &[String], label: &str| -> String {
        let mut l = label.to_owned();
        while taken.contains(&l) {
            l.push('\'');
        }
        l
    };
    let obj_r: Vec<String> = right.objects().labels().iter().map(|l| fresh(left.objects().labels(), l)).collect();
    let arr_r: Vec<String> = right.arrows().labels().iter().map(|l| fresh(left.arrows().labels(), l)).collect();
    let sum_space = |a: &FinSpace, b: &FinSpace, b_labels: &[String]| -> Result<FinSpace> {
        let mut labels = a.labels().to_vec();
        labels.extend_from_slice(b_labels);
        let shift = a.len();
        let mut nbhd = a.neighbourhoods().to_vec();
        nbhd.extend(b.neighbourhoods().iter().map(|s| s.iter().map(|p| p + shift).collect::<PointSet>()));
        FinSpace::from_neighbourhoods(labels, nbhd)
    };
    let objects = sort_space(&sum_space(left.objects(), right.objects(), &obj_r)?)?;
    let arrows = sort_space(&sum_space(left.arrows(), right.arrows(), &arr_r)?)?;
    let mut data = Labelled {
        objects: &objects,
        arrows: &arrows,
        ends: vec![],
        identities: vec![],
        inverses: vec![],
        compositions: vec![],
    };
    for (g, primed) in [(left, false), (right, true)] {
        let obj = |x: usize| if primed { obj_r[x].clone() } else { g.objects().label(x).to_owned() };
        let arr = |a: usize| if primed { arr_r[a].clone() } else { g.arrows().label(a).to_owned() };
        for a in 0..g.num_arrows() {
            data.ends.push((arr(a), obj(g.dom(a)), obj(g.cod(a))));
            data.inverses.push((arr(a), arr(g.inverse(a))));
        }
        for x in 0..g.num_objects() {
            data.identities.push((obj(x), arr(g.unit(x))));
        }
        for (a2, a1) in g.composable_pairs() {
            if let Some(h) = g.compose(a2, a1) {
                data.compositions.push((arr(a2), arr(a1), arr(h)));
            }
        }
    }
    data.build()
}

/// Reorders the points of a space so labels are sorted.
pub fn sort_space(space: &FinSpace) -> Result<FinSpace> {
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| space.label(a).cmp(space.label(b)));
    let mut rank = vec![0; space.len()];
    for (r, &p) in order.iter().enumerate() {
        rank[p] = r;
    }
    FinSpace::from_neighbourhoods(
        order.iter().map(|&p| space.label(p).to_owned()).collect(),
        order
            .iter()
            .map(|&p| space.nbhd(p).iter().map(|q| rank[q]).collect())
            .collect(),
    )
}

/// One of the four named desk instances.
pub fn preset(name: &str) -> Result<FinGroupoid> {
    match name {
        "Z2" => group_groupoid(&FiniteGroup { names: vec!["1".into(), "s".into()], table: vec![vec![0, 1], vec![1, 0]] }, "1"),
        "D2" => discrete_groupoid(2, Topology::Discrete),
        "I2" => discrete_groupoid(2, Topology::Indiscrete),
        "P2" => pair_groupoid(2, Topology::Discrete),
        _ => Err(Error::UnknownPreset(name.to_owned())),
    }
}

pub const PRESETS: [&str; 4] = ["Z2", "D2", "I2", "P2"];

/// Parameters for the random family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub seed: u64,
    pub max_objects: usize,
    pub max_arrows: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { seed: 0, max_objects: 3, max_arrows: RANDOM_MAX_ARROWS }
    }
}

/// Builds the groupoid named by `spec`; `random` consults `params`.
pub fn generate(spec: &str, params: RandomParams) -> Result<FinGroupoid> {
    if let Some((l, r)) = spec.split_once('+') {
        return disjoint_union(&generate(l, params)?, &generate(r, params)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let unknown = || Error::UnknownPreset(spec.to_owned());
    let count = |s: &str| s.parse::<usize>().ok().filter(|&n| (1..=26).contains(&n)).ok_or_else(unknown);
    match parts.as_slice() {
        [name] if PRESETS.contains(name) => preset(name),
        ["random"] => random_groupoid(params),
        ["cyclic", n] => group_groupoid(&FiniteGroup::cyclic(count(n)?), "1"),
        ["discrete", n, top] => discrete_groupoid(count(n)?, Topology::parse(top)?),
        ["pair", n, top] => pair_groupoid(count(n)?, Topology::parse(top)?),
        ["action", group, n, top] => {
            let cyclic = group.starts_with('c');
            let group = FiniteGroup::parse(group)?;
            let n = count(n)?;
            let space = Topology::parse(top)?.space(&object_labels(n));
            // Cyclic groups act by rotation (r^k moves x to x + k mod n);
            // other groups act trivially.
            let action: Vec<Vec<usize>> = (0..group.order())
                .map(|k| (0..n).map(|x| if cyclic { (x + k) % n } else { x }).collect())
                .collect();
            let g = action_groupoid(&group, &space, &action)?;
            let report = g.validate();
            if !report.axioms_ok {
                return Err(Error::InvalidGroupoid(report.failures.join("; ")));
            }
            Ok(g)
        }
        _ => Err(unknown()),
    }
}

/// All homomorphisms `K → Sym(n)` whose permutations preserve `space`.
fn homeomorphic_actions(group: &FiniteGroup, space: &FinSpace) -> Vec<Vec<Vec<usize>>> {
    let n = space.len();
    let perms = permutations(n);
    let homeo: Vec<&Vec<usize>> = perms
        .iter()
        .filter(|p| (0..n).all(|x| space.nbhd(x).iter().map(|y| p[y]).collect::<PointSet>() == space.nbhd(p[x])))
        .collect();
    // Choose an image for each element and keep the multiplicative ones;
    // the groups in play are tiny.
    let k = group.order();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; k];
    loop {
        let action: Vec<Vec<usize>> = assignment.iter().map(|&i| homeo[i].clone()).collect();
        let hom = (0..k).all(|a| {
            (0..k).all(|b| {
                let ab = group.table[a][b];
                (0..n).all(|x| action[ab][x] == action[a][action[b][x]])
            })
        });
        if hom {
            out.push(action);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < homeo.len() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
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
    out.sort();
    out
}

fn random_space(rng: &mut ChaCha8Rng, labels: &[String]) -> Result<FinSpace> {
    let n = labels.len();
    let members = rng.gen_range(0..=n + 1);
    let subbasis: Vec<PointSet> = (0..members)
        .map(|_| PointSet::from_bits(rng.gen_range(0..1u128 << n)))
        .collect();
    FinSpace::from_subbasis(labels.to_vec(), &subbasis)
}

/// A random action groupoid (or a disjoint union of two) with at most
/// `max_objects` objects and `max_arrows` arrows. Same parameters give the
/// same groupoid.
pub fn random_groupoid(params: RandomParams) -> Result<FinGroupoid> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let max_objects = params.max_objects.clamp(1, 6);
    for _ in 0..RANDOM_RETRIES {
        let n = rng.gen_range(1..=max_objects);
        let split = if n >= 2 && rng.gen_bool(0.3) { rng.gen_range(1..n) } else { n };
        let sizes: Vec<usize> = if split == n { vec![n] } else { vec![split, n - split] };
        let labels = object_labels(n);
        let mut budget = params.max_arrows;
        let mut pieces = Vec::new();
        let mut offset = 0;
        for (i, &size) in sizes.iter().enumerate() {
            let remaining_objects: usize = sizes[i + 1..].iter().sum();
            let room = budget.saturating_sub(remaining_objects) / size;
            let candidates: Vec<FiniteGroup> = [
                FiniteGroup::cyclic(1),
                FiniteGroup::cyclic(2),
                FiniteGroup::cyclic(3),
                FiniteGroup::klein(),
                FiniteGroup::symmetric3(),
            ]
            .into_iter()
            .filter(|grp| grp.order() <= room)
            .collect();
            let Some(group) = candidates.choose(&mut rng).cloned() else {
                break;
            };
            let space = random_space(&mut rng, &labels[offset..offset + size])?;
            let actions = homeomorphic_actions(&group, &space);
            let action = actions.choose(&mut rng).expect("trivial action always exists");
            pieces.push(action_groupoid(&group, &space, action)?);
            budget -= group.order() * size;
            offset += size;
        }
        if pieces.len() != sizes.len() {
            continue;
        }
        let g = match pieces.as_slice() {
            [one] => one.clone(),
            [a, b] => disjoint_union(a, b)?,
            _ => unreachable!(),
        };
        if g.num_arrows() <= params.max_arrows && g.validate().all_ok() {
            return Ok(g);
        }
    }
    Err(Error::InvalidInput(format!("no open groupoid found for seed {}", params.seed)))
}

/// Presets followed by `random_count` random groupoids with consecutive
/// seeds starting at `first_seed`.
pub fn corpus(random_count: usize, first_seed: u64) -> Result<Vec<(String, FinGroupoid)>> {
    let mut out: Vec<(String, FinGroupoid)> =
        PRESETS.iter().map(|&n| Ok((n.to_owned(), preset(n)?))).collect::<Result<_>>()?;
    for k in 0..random_count as u64 {
        let seed = first_seed + k;
        let params = RandomParams { seed, ..RandomParams::default() };
        out.push((format!("random-{seed}"), random_groupoid(params)?));
    }
    Ok(out)
}
