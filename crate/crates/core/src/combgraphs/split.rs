use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{GraphError, TopType};

/// Largest `|Γ|` the enumerator accepts by default.
pub const DEFAULT_ENUM_BOUND: i64 = 6;

/// A connected piece of one component group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Piece {
    pub genus: u32,
    pub degree: u32,
    /// Labels of the marked points on the piece.
    #[serde(default)]
    pub marks: Vec<u32>,
    /// Sorted contact weights towards the previous group.
    #[serde(default)]
    pub left: Vec<u32>,
    /// Sorted contact weights towards the next group.
    #[serde(default)]
    pub right: Vec<u32>,
}

impl Piece {
    pub fn new(genus: u32, degree: u32, marks: Vec<u32>) -> Self {
        Piece { genus, degree, marks, left: Vec::new(), right: Vec::new() }
    }

    pub fn nodes(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// `d + 2g - 2 + #marks + #nodes`.
    pub fn weight(&self) -> i64 {
        self.degree as i64 + 2 * self.genus as i64 - 2 + self.marks.len() as i64 + self.nodes() as i64
    }

    /// A rational bridge with one node on each side and nothing else.
    pub fn is_trivial(&self) -> bool {
        self.genus == 0 && self.degree == 0 && self.marks.is_empty() && self.left.len() == 1 && self.right.len() == 1
    }

    fn ordinary_stable(&self) -> bool {
        if self.degree > 0 {
            return true;
        }
        let special = self.marks.len() + self.nodes();
        match self.genus {
            0 => special >= 3,
            1 => special >= 1,
            _ => true,
        }
    }
}

/// A node on an interface, joining piece `left` of the group before it to
/// piece `right` of the group after it (0-based within each group).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub left: usize,
    pub right: usize,
    pub weight: u32,
}

pub(super) struct Dsu(Vec<usize>);

impl Dsu {
    pub(super) fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub(super) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    pub(super) fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }

    pub(super) fn components(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// A map to `W[n]_0`, recorded as pieces per component group and the nodes on
/// each interface `Σ_1, .., Σ_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SplitMap {
    groups: Vec<Vec<Piece>>,
    interfaces: Vec<Vec<Node>>,
}

/// Input form: contact multisets may be left out and are then derived from the nodes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitMapJson {
    pub groups: Vec<Vec<PieceJson>>,
    pub interfaces: Vec<Vec<Node>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceJson {
    pub genus: u32,
    pub degree: u32,
    #[serde(default)]
    pub marks: Vec<u32>,
    #[serde(default)]
    pub left: Option<Vec<u32>>,
    #[serde(default)]
    pub right: Option<Vec<u32>>,
}

impl SplitMapJson {
    pub fn build(&self) -> Result<SplitMap, GraphError> {
        let derived = derive_contacts(
            &self.groups.iter().map(|g| g.iter().map(|p| Piece::new(p.genus, p.degree, p.marks.clone())).collect()).collect::<Vec<_>>(),
            &self.interfaces,
        )?;
        let groups = self
            .groups
            .iter()
            .zip(derived)
            .map(|(g, d)| {
                g.iter()
                    .zip(d)
                    .map(|(p, q)| {
                        let mut out = Piece::new(p.genus, p.degree, p.marks.clone());
                        out.left = p.left.clone().map(sorted).unwrap_or(q.left);
                        out.right = p.right.clone().map(sorted).unwrap_or(q.right);
                        out
                    })
                    .collect()
            })
            .collect();
        SplitMap::new(groups, self.interfaces.clone())
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

fn check_shape(groups: &[Vec<Piece>], interfaces: &[Vec<Node>]) -> Result<(), GraphError> {
    if groups.len() < 2 {
        return Err(GraphError::TooFewGroups(groups.len()));
    }
    if interfaces.len() + 1 != groups.len() {
        return Err(GraphError::InterfaceCount { groups: groups.len(), expected: groups.len() - 1, got: interfaces.len() });
    }
    for (i, iface) in interfaces.iter().enumerate() {
        for (j, x) in iface.iter().enumerate() {
            if x.weight == 0 {
                return Err(GraphError::ZeroWeight);
            }
            if x.left >= groups[i].len() || x.right >= groups[i + 1].len() {
                return Err(GraphError::DanglingNode { interface: i + 1, node: j + 1 });
            }
        }
    }
    Ok(())
}

/// Copies of the pieces with contact multisets read off from the nodes.
fn derive_contacts(groups: &[Vec<Piece>], interfaces: &[Vec<Node>]) -> Result<Vec<Vec<Piece>>, GraphError> {
    check_shape(groups, interfaces)?;
    let mut out: Vec<Vec<Piece>> = groups
        .iter()
        .map(|g| g.iter().map(|p| Piece { left: Vec::new(), right: Vec::new(), ..p.clone() }).collect())
        .collect();
    for (i, iface) in interfaces.iter().enumerate() {
        for x in iface {
            out[i][x.left].right.push(x.weight);
            out[i + 1][x.right].left.push(x.weight);
        }
    }
    for p in out.iter_mut().flatten() {
        p.left.sort_unstable();
        p.right.sort_unstable();
    }
    Ok(out)
}

impl SplitMap {
    /// Validates stored contacts against the nodes, connectivity and mark labels.
    pub fn new(groups: Vec<Vec<Piece>>, interfaces: Vec<Vec<Node>>) -> Result<Self, GraphError> {
        let derived = derive_contacts(&groups, &interfaces)?;
        for (gi, (g, d)) in groups.iter().zip(&derived).enumerate() {
            for (pi, (p, q)) in g.iter().zip(d).enumerate() {
                if sorted(p.left.clone()) != q.left {
                    return Err(GraphError::ContactMismatch { group: gi + 1, piece: pi + 1, side: "left", stored: p.left.clone(), actual: q.left.clone() });
                }
                if sorted(p.right.clone()) != q.right {
                    return Err(GraphError::ContactMismatch { group: gi + 1, piece: pi + 1, side: "right", stored: p.right.clone(), actual: q.right.clone() });
                }
            }
        }
        let m = SplitMap { groups: derived, interfaces };
        let total: usize = m.groups.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(GraphError::Empty);
        }
        if m.dsu().components() != 1 {
            return Err(GraphError::Disconnected);
        }
        let mut labels: Vec<u32> = m.groups.iter().flatten().flat_map(|p| p.marks.iter().copied()).collect();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(GraphError::BadMarks { k: labels.len(), got: labels });
        }
        Ok(m)
    }

    /// Like [`SplitMap::new`], deriving the contact multisets from the nodes.
    pub fn build(groups: Vec<Vec<Piece>>, interfaces: Vec<Vec<Node>>) -> Result<Self, GraphError> {
        let groups = derive_contacts(&groups, &interfaces)?;
        Self::new(groups, interfaces)
    }

    pub fn n(&self) -> usize {
        self.groups.len() - 2
    }

    pub fn groups(&self) -> &[Vec<Piece>] {
        &self.groups
    }

    pub fn interfaces(&self) -> &[Vec<Node>] {
        &self.interfaces
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for g in &self.groups {
            off.push(off.last().unwrap() + g.len());
        }
        off
    }

    fn dsu(&self) -> Dsu {
        let off = self.offsets();
        let mut d = Dsu::new(*off.last().unwrap());
        for (i, iface) in self.interfaces.iter().enumerate() {
            for x in iface {
                d.union(off[i] + x.left, off[i + 1] + x.right);
            }
        }
        d
    }

    pub fn piece_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn node_count(&self) -> usize {
        self.interfaces.iter().map(Vec::len).sum()
    }

    /// `Σ g + #nodes - #pieces + 1`.
    pub fn arithmetic_genus(&self) -> i64 {
        let g: i64 = self.groups.iter().flatten().map(|p| p.genus as i64).sum();
        g + self.node_count() as i64 - self.piece_count() as i64 + 1
    }

    pub fn total_type(&self) -> TopType {
        let b = self.groups.iter().flatten().map(|p| p.degree).sum();
        let k = self.groups.iter().flatten().map(|p| p.marks.len() as u32).sum();
        TopType { b, g: self.arithmetic_genus() as u32, k }
    }

    pub fn to_json(&self) -> SplitMapJson {
        SplitMapJson {
            groups: self
                .groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|p| PieceJson { genus: p.genus, degree: p.degree, marks: p.marks.clone(), left: Some(p.left.clone()), right: Some(p.right.clone()) })
                        .collect()
                })
                .collect(),
            interfaces: self.interfaces.clone(),
        }
    }
}

/// `ω(X_i)` for `1 <= i <= n + 2`.
pub fn weight(m: &SplitMap, i: usize) -> Result<i64, GraphError> {
    let max = m.groups.len();
    if i == 0 || i > max {
        return Err(GraphError::IndexOutOfRange { index: i, max });
    }
    Ok(m.groups[i - 1].iter().map(Piece::weight).sum())
}

fn weights(m: &SplitMap) -> Vec<i64> {
    m.groups.iter().map(|g| g.iter().map(Piece::weight).sum()).collect()
}

/// Positive weight on every middle group and ordinary stability at both ends.
pub fn is_stable(m: &SplitMap) -> bool {
    let w = weights(m);
    let last = m.groups.len() - 1;
    w[1..last].iter().all(|&x| x > 0) && m.groups[0].iter().chain(&m.groups[last]).all(Piece::ordinary_stable)
}

pub fn verify_norm_identity(m: &SplitMap) -> bool {
    m.total_type().norm() == weights(m).iter().sum::<i64>()
}

/// Partial sums `a_i = ω(X_1) + .. + ω(X_i)` for `i = 1..=n+1`.
pub fn ample_weights(m: &SplitMap) -> Result<Vec<i64>, GraphError> {
    if !is_stable(m) {
        return Err(GraphError::NotStable);
    }
    let w = weights(m);
    let mut acc = 0;
    let out: Vec<i64> = w[..w.len() - 1]
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    assert!(out.windows(2).all(|p| p[0] < p[1]), "partial weights of a stable map must increase strictly");
    Ok(out)
}

/// Upper bound `|Γ|` on the length `n` of the expansion of a stable map of type `t`.
pub fn max_length_bound(t: TopType) -> Result<u32, GraphError> {
    match t.norm() {
        x if x >= 1 => Ok(x as u32),
        x => Err(GraphError::NonPositiveNorm(x)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Y1,
    Y2,
}

/// One half of a split map cut at an interface. Roots are the cut nodes, kept
/// in interface order as `(piece in the boundary group, weight)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelSplit {
    pub side: Side,
    pub groups: Vec<Vec<Piece>>,
    pub interfaces: Vec<Vec<Node>>,
    pub roots: Vec<(usize, u32)>,
}

impl RelSplit {
    /// Index of the group that carries the roots.
    pub fn boundary(&self) -> usize {
        match self.side {
            Side::Y1 => self.groups.len() - 1,
            Side::Y2 => 0,
        }
    }
}

/// Cuts `m` at `Σ_l`: groups `1..=l` go to the `Y1` half, the rest to `Y2`.
pub fn decompose(m: &SplitMap, l: usize) -> Result<(RelSplit, RelSplit, Vec<u32>), GraphError> {
    let max = m.n() + 1;
    if l == 0 || l > max {
        return Err(GraphError::IndexOutOfRange { index: l, max });
    }
    let cut = &m.interfaces[l - 1];
    let h1 = RelSplit {
        side: Side::Y1,
        groups: m.groups[..l].to_vec(),
        interfaces: m.interfaces[..l - 1].to_vec(),
        roots: cut.iter().map(|x| (x.left, x.weight)).collect(),
    };
    let h2 = RelSplit {
        side: Side::Y2,
        groups: m.groups[l..].to_vec(),
        interfaces: m.interfaces[l..].to_vec(),
        roots: cut.iter().map(|x| (x.right, x.weight)).collect(),
    };
    Ok((h1, h2, cut.iter().map(|x| x.weight).collect()))
}

/// Joins root `i` of `h1` to root `i` of `h2`.
pub fn glue_halves(h1: &RelSplit, h2: &RelSplit) -> Result<SplitMap, GraphError> {
    if h1.roots.len() != h2.roots.len() {
        return Err(GraphError::RootCount(h1.roots.len(), h2.roots.len()));
    }
    let mut cut = Vec::new();
    for (i, (a, b)) in h1.roots.iter().zip(&h2.roots).enumerate() {
        if a.1 != b.1 {
            return Err(GraphError::WeightMismatch { index: i + 1, left: a.1, right: b.1 });
        }
        cut.push(Node { left: a.0, right: b.0, weight: a.1 });
    }
    let mut groups = h1.groups.clone();
    groups.extend(h2.groups.iter().cloned());
    let mut interfaces = h1.interfaces.clone();
    interfaces.push(cut);
    interfaces.extend(h2.interfaces.iter().cloned());
    SplitMap::new(groups, interfaces)
}

fn check_assignment(fine_groups: usize, coarse_groups: usize, a: &[usize]) -> Result<(), GraphError> {
    if a.len() != fine_groups {
        return Err(GraphError::BadAssignment(format!("{} entries for {} groups", a.len(), fine_groups)));
    }
    if a[0] != 1 || *a.last().unwrap() != coarse_groups {
        return Err(GraphError::BadAssignment(format!("must run from 1 to {coarse_groups}")));
    }
    if a.windows(2).any(|w| w[1] < w[0] || w[1] > w[0] + 1) {
        return Err(GraphError::BadAssignment(format!("{a:?}")));
    }
    Ok(())
}

/// Smooths every node between fine groups sent to the same coarse group.
/// `assignment[i]` is the (1-based) coarse group of fine group `i + 1`.
pub fn collapse(fine: &SplitMap, assignment: &[usize]) -> Result<SplitMap, GraphError> {
    let coarse_groups = assignment.last().copied().unwrap_or(0);
    check_assignment(fine.groups.len(), coarse_groups, assignment)?;
    if coarse_groups < 2 {
        return Err(GraphError::BadAssignment("at least two coarse groups are needed".into()));
    }
    let off = fine.offsets();
    let mut dsu = Dsu::new(*off.last().unwrap());
    for (i, iface) in fine.interfaces.iter().enumerate() {
        if assignment[i] == assignment[i + 1] {
            for x in iface {
                dsu.union(off[i] + x.left, off[i + 1] + x.right);
            }
        }
    }
    // coarse (group, index) of each fine piece
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut place = vec![(0, 0); *off.last().unwrap()];
    let mut groups: Vec<Vec<Piece>> = vec![Vec::new(); coarse_groups];
    let mut internal: Vec<Vec<i64>> = vec![Vec::new(); coarse_groups];
    for (i, g) in fine.groups.iter().enumerate() {
        let j = assignment[i] - 1;
        for (p, piece) in g.iter().enumerate() {
            let root = dsu.find(off[i] + p);
            let idx = *comp.entry(root).or_insert_with(|| {
                groups[j].push(Piece::new(0, 0, Vec::new()));
                internal[j].push(1);
                groups[j].len() - 1
            });
            let c = &mut groups[j][idx];
            c.genus += piece.genus;
            c.degree += piece.degree;
            c.marks.extend(piece.marks.iter().copied());
            internal[j][idx] -= 1;
            place[off[i] + p] = (j, idx);
        }
    }
    let mut interfaces = vec![Vec::new(); coarse_groups - 1];
    for (i, iface) in fine.interfaces.iter().enumerate() {
        for x in iface {
            let (j, a) = place[off[i] + x.left];
            let (_, b) = place[off[i + 1] + x.right];
            if assignment[i] == assignment[i + 1] {
                internal[j][a] += 1;
            } else {
                interfaces[j].push(Node { left: a, right: b, weight: x.weight });
            }
        }
    }
    for (g, extra) in groups.iter_mut().zip(&internal) {
        for (p, &e) in g.iter_mut().zip(extra) {
            // arithmetic genus of the smoothed component: Σg + #internal nodes - #pieces + 1
            p.genus = (p.genus as i64 + e) as u32;
            p.marks.sort_unstable();
        }
    }
    SplitMap::build(groups, interfaces)
}

/// Checks `ω(coarse, X_j) = Σ_{assignment(i) = j} ω(fine, X_i)` for every `j`.
pub fn specialization_sum_check(coarse: &SplitMap, fine: &SplitMap, assignment: &[usize]) -> Result<bool, GraphError> {
    check_assignment(fine.groups.len(), coarse.groups.len(), assignment)?;
    let wf = weights(fine);
    let wc = weights(coarse);
    let mut sums = vec![0i64; wc.len()];
    for (i, w) in wf.iter().enumerate() {
        sums[assignment[i] - 1] += w;
    }
    Ok(sums == wc)
}

/// Caps that keep the enumeration finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumCaps {
    /// Largest contact weight of a node.
    pub max_weight: u32,
    pub max_pieces_per_group: usize,
    pub max_nodes_per_interface: usize,
    /// Largest `|Γ|` accepted.
    pub bound: i64,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps { max_weight: 2, max_pieces_per_group: 3, max_nodes_per_interface: 3, bound: DEFAULT_ENUM_BOUND }
    }
}

type Attr = (u32, u32, u32);

// Label-free canonical form: pieces as (g, d, #marks, left, right), nodes as
// (left, right, weight) under the chosen piece order.
type Key = (Vec<Vec<(u32, u32, u32, Vec<u32>, Vec<u32>)>>, Vec<Vec<(usize, usize, u32)>>);

struct Gen {
    t: TopType,
    caps: EnumCaps,
    n: usize,
    stable_only: bool,
    // node sets per (left pieces, right pieces), already left-sorted
    sets: BTreeMap<(usize, usize), std::rc::Rc<Vec<Vec<Node>>>>,
    seen: HashSet<Key>,
    out: Vec<SplitMap>,
}

/// Multisets of `1..=max` nodes between `pa` and `pb` pieces covering every piece on both sides.
fn node_sets(pa: usize, pb: usize, caps: &EnumCaps) -> Vec<Vec<Node>> {
    let mut kinds = Vec::new();
    for left in 0..pa {
        for right in 0..pb {
            for weight in 1..=caps.max_weight {
                kinds.push(Node { left, right, weight });
            }
        }
    }
    fn go(kinds: &[Node], start: usize, left: usize, cur: &mut Vec<Node>, out: &mut Vec<Vec<Node>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..kinds.len() {
            cur.push(kinds[i]);
            go(kinds, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    go(&kinds, 0, caps.max_nodes_per_interface, &mut Vec::new(), &mut all);
    all.retain(|s| (0..pa).all(|a| s.iter().any(|x| x.left == a)) && (0..pb).all(|b| s.iter().any(|x| x.right == b)));
    all
}

/// The pieces of a new group are interchangeable, so only sorted left sides are kept.
fn left_sorted(set: &[Node], p: usize) -> bool {
    let sig = |j: usize| {
        let mut v: Vec<(usize, u32)> = set.iter().filter(|x| x.right == j).map(|x| (x.left, x.weight)).collect();
        v.sort_unstable();
        v
    };
    (1..p).all(|j| sig(j - 1) <= sig(j))
}

struct Slot {
    end: bool,
    nodes: usize,
    balanced: bool,
}

impl Slot {
    fn admits(&self, g: u32, d: u32, m: u32) -> bool {
        if self.end {
            let special = m as usize + self.nodes;
            d > 0 || g >= 2 || (g == 1 && special >= 1) || (g == 0 && special >= 3)
        } else {
            d > 0 || self.balanced
        }
    }
}

impl Gen {
    /// First pass: piece counts and interface nodes, group by group. `need`
    /// counts finished pieces that must receive degree (middle pieces off
    /// balance) or some attribute (end pieces with fewer than three nodes).
    fn skeleton(&mut self, counts: &mut Vec<usize>, ifaces: &mut Vec<Vec<Node>>, pieces: i64, nodes: i64, need: (u32, u32)) {
        let i = counts.len();
        let last = self.n + 1;
        if i == last + 1 {
            self.attributes(counts, ifaces);
            return;
        }
        let min_p = usize::from(self.n > 0);
        for p in min_p..=self.caps.max_pieces_per_group {
            if self.n == 0 && i == 1 && p == 0 && counts[0] == 0 {
                continue;
            }
            let prev = if i == 0 { 0 } else { counts[i - 1] };
            let sets = if i == 0 || prev == 0 || p == 0 {
                std::rc::Rc::new(vec![Vec::new()])
            } else {
                let caps = self.caps;
                self.sets
                    .entry((prev, p))
                    .or_insert_with(|| std::rc::Rc::new(node_sets(prev, p, &caps).into_iter().filter(|s| left_sorted(s, p)).collect()))
                    .clone()
            };
            for set in sets.iter() {
                let set = set.clone();
                let (pieces2, nodes2) = (pieces + p as i64, nodes + set.len() as i64);
                let cycles = if pieces2 == 0 { 0 } else { nodes2 - pieces2 + 1 };
                if !set.is_empty() && cycles > self.t.g as i64 {
                    continue;
                }
                let mut need2 = need;
                if i >= 1 && !set.is_empty() {
                    let before = if i >= 2 { &ifaces[i - 2][..] } else { &[][..] };
                    let mut excess = 0i64;
                    for a in 0..prev {
                        let r: Vec<u32> = set.iter().filter(|x| x.left == a).map(|x| x.weight).collect();
                        let l: Vec<u32> = before.iter().filter(|x| x.right == a).map(|x| x.weight).collect();
                        excess += (l.len() + r.len()) as i64 - 2;
                        if i == 1 {
                            need2.1 += u32::from(r.len() < 3);
                        } else if l.iter().sum::<u32>() != r.iter().sum::<u32>() {
                            need2.0 += 1;
                        }
                    }
                    // a middle group of balanced bare bridges needs some attribute to be stable
                    if self.stable_only && i >= 2 && excess == 0 && need2.0 == need.0 {
                        need2.1 += 1;
                    }
                }
                if i == last && !set.is_empty() {
                    need2.1 += (0..p).filter(|&b| set.iter().filter(|x| x.right == b).count() < 3).count() as u32;
                }
                let units = (self.t.b + self.t.k) as i64 + 2 * (self.t.g as i64 - cycles.max(0));
                if need2.0 > self.t.b || (need2.0 + need2.1) as i64 > units {
                    continue;
                }
                counts.push(p);
                if i > 0 {
                    ifaces.push(set);
                }
                self.skeleton(counts, ifaces, pieces2, nodes2, need2);
                counts.pop();
                if i > 0 {
                    ifaces.pop();
                }
            }
        }
    }

    /// Second pass: genus, degree and marks on each piece of a connected skeleton.
    fn attributes(&mut self, counts: &[usize], ifaces: &[Vec<Node>]) {
        let mut off = vec![0];
        for c in counts {
            off.push(off.last().unwrap() + c);
        }
        let total = *off.last().unwrap();
        let mut dsu = Dsu::new(total);
        for (i, iface) in ifaces.iter().enumerate() {
            for x in iface {
                dsu.union(off[i] + x.left, off[i + 1] + x.right);
            }
        }
        let nodes: usize = ifaces.iter().map(Vec::len).sum();
        let cycles = nodes as i64 - total as i64 + 1;
        if total == 0 || dsu.components() != 1 || cycles > self.t.g as i64 {
            return;
        }
        let last = counts.len() - 1;
        let mut slots = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            for p in 0..c {
                let lw: Vec<u32> = if i > 0 { ifaces[i - 1].iter().filter(|x| x.right == p).map(|x| x.weight).collect() } else { vec![] };
                let rw: Vec<u32> = if i < last { ifaces[i].iter().filter(|x| x.left == p).map(|x| x.weight).collect() } else { vec![] };
                slots.push(Slot {
                    end: i == 0 || i == last,
                    nodes: lw.len() + rw.len(),
                    balanced: lw.iter().sum::<u32>() == rw.iter().sum::<u32>(),
                });
            }
        }
        let budget = (self.t.g - cycles as u32, self.t.b, self.t.k);
        let mut attrs = Vec::with_capacity(total);
        self.assign(&slots, &mut attrs, budget, counts, ifaces);
    }

    fn assign(&mut self, slots: &[Slot], attrs: &mut Vec<Attr>, rem: Attr, counts: &[usize], ifaces: &[Vec<Node>]) {
        let j = attrs.len();
        if j == slots.len() {
            if rem == (0, 0, 0) {
                self.finish(attrs, counts, ifaces);
            }
            return;
        }
        // middle pieces off balance need degree; short end pieces need something
        let need_d = slots[j..].iter().filter(|s| !s.end && !s.balanced).count() as u32;
        let need_any = slots[j..].iter().filter(|s| s.end && s.nodes < 3).count() as u32;
        if rem.1 < need_d || rem.1 + rem.2 + 2 * rem.0 < need_any {
            return;
        }
        let final_slot = j + 1 == slots.len();
        for g in 0..=rem.0 {
            for d in 0..=rem.1 {
                for m in 0..=rem.2 {
                    if final_slot && (g, d, m) != rem {
                        continue;
                    }
                    if !slots[j].admits(g, d, m) {
                        continue;
                    }
                    attrs.push((g, d, m));
                    self.assign(slots, attrs, (rem.0 - g, rem.1 - d, rem.2 - m), counts, ifaces);
                    attrs.pop();
                }
            }
        }
    }

    fn finish(&mut self, attrs: &[Attr], counts: &[usize], ifaces: &[Vec<Node>]) {
        let mut label = 0;
        let mut it = attrs.iter();
        let groups: Vec<Vec<Piece>> = counts
            .iter()
            .map(|&c| {
                (0..c)
                    .map(|_| {
                        let &(genus, degree, k) = it.next().unwrap();
                        let marks = (label + 1..=label + k).collect();
                        label += k;
                        Piece::new(genus, degree, marks)
                    })
                    .collect()
            })
            .collect();
        let m = SplitMap::build(groups, ifaces.to_vec()).expect("skeleton is valid");
        debug_assert_eq!(m.total_type(), self.t);
        if self.stable_only && !is_stable(&m) {
            return;
        }
        let (key, order) = canonical(&m);
        if self.seen.insert(key) {
            self.out.push(relabel(&m, &order));
        }
    }
}

fn rank_of<K: Ord + Clone>(keys: &[Vec<K>]) -> Vec<Vec<usize>> {
    keys.iter()
        .map(|g| {
            let mut uniq = g.clone();
            uniq.sort();
            uniq.dedup();
            g.iter().map(|k| uniq.binary_search(k).unwrap()).collect()
        })
        .collect()
}

/// Refined piece ranks per group; isomorphism-invariant.
fn ranks(m: &SplitMap) -> Vec<Vec<usize>> {
    let base: Vec<Vec<_>> = m
        .groups
        .iter()
        .map(|g| g.iter().map(|p| (p.genus, p.degree, p.marks.len(), p.left.clone(), p.right.clone())).collect())
        .collect();
    let mut r = rank_of(&base);
    for _ in 0..m.groups.len() {
        let keys: Vec<Vec<(usize, Vec<(u8, usize, u32)>)>> = m
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                (0..g.len())
                    .map(|p| {
                        let mut nb = Vec::new();
                        if i > 0 {
                            nb.extend(m.interfaces[i - 1].iter().filter(|x| x.right == p).map(|x| (0, r[i - 1][x.left], x.weight)));
                        }
                        if i < m.interfaces.len() {
                            nb.extend(m.interfaces[i].iter().filter(|x| x.left == p).map(|x| (1, r[i + 1][x.right], x.weight)));
                        }
                        nb.sort_unstable();
                        (r[i][p], nb)
                    })
                    .collect()
            })
            .collect();
        let next = rank_of(&keys);
        if next == r {
            break;
        }
        r = next;
    }
    r
}

fn key_for(m: &SplitMap, order: &[Vec<usize>]) -> Key {
    let inv: Vec<Vec<usize>> = order
        .iter()
        .map(|o| {
            let mut v = vec![0; o.len()];
            for (new, &old) in o.iter().enumerate() {
                v[old] = new;
            }
            v
        })
        .collect();
    let groups = m
        .groups
        .iter()
        .zip(order)
        .map(|(g, o)| o.iter().map(|&p| (g[p].genus, g[p].degree, g[p].marks.len() as u32, g[p].left.clone(), g[p].right.clone())).collect())
        .collect();
    let interfaces = m
        .interfaces
        .iter()
        .enumerate()
        .map(|(i, iface)| {
            let mut v: Vec<(usize, usize, u32)> = iface.iter().map(|x| (inv[i][x.left], inv[i + 1][x.right], x.weight)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    (groups, interfaces)
}

/// All orderings of `0..n` that are nondecreasing in `rank`.
pub(super) fn rank_orders(rank: &[usize]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..rank.len()).collect();
    idx.sort_by_key(|&i| (rank[i], i));
    let mut out = vec![Vec::new()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && rank[idx[end]] == rank[idx[start]] {
            end += 1;
        }
        let block = permutations(&idx[start..end]);
        out = out.into_iter().flat_map(|o| block.iter().map(move |b| [o.clone(), b.clone()].concat())).collect();
        start = end;
    }
    out
}

pub(super) fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Lexicographically least label-free key over piece reorderings, and the order achieving it.
fn canonical(m: &SplitMap) -> (Key, Vec<Vec<usize>>) {
    let r = ranks(m);
    let per_group: Vec<Vec<Vec<usize>>> = r.iter().map(|g| rank_orders(g)).collect();
    let mut best: Option<(Key, Vec<Vec<usize>>)> = None;
    let mut choice = vec![0usize; per_group.len()];
    loop {
        let order: Vec<Vec<usize>> = choice.iter().zip(&per_group).map(|(&c, g)| g[c].clone()).collect();
        let key = key_for(m, &order);
        if best.as_ref().map_or(true, |b| key < b.0) {
            best = Some((key, order));
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return best.unwrap();
            }
            choice[i] += 1;
            if choice[i] < per_group[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Reorders pieces and renumbers marks in reading order.
fn relabel(m: &SplitMap, order: &[Vec<usize>]) -> SplitMap {
    let mut label = 0;
    let groups: Vec<Vec<Piece>> = m
        .groups
        .iter()
        .zip(order)
        .map(|(g, o)| {
            o.iter()
                .map(|&p| {
                    let k = g[p].marks.len() as u32;
                    let piece = Piece { marks: (label + 1..=label + k).collect(), ..g[p].clone() };
                    label += k;
                    piece
                })
                .collect()
        })
        .collect();
    let (_, ifaces) = key_for(m, order);
    let interfaces = ifaces.into_iter().map(|v| v.into_iter().map(|(left, right, weight)| Node { left, right, weight }).collect()).collect();
    SplitMap::new(groups, interfaces).expect("reordering preserves validity")
}

/// All split maps of type `t` with `n <= max(|Γ|, 0)` within the caps, up to
/// reordering pieces and relabelling marks. End pieces are ordinarily stable,
/// middle pieces meet both neighbouring groups; middle groups may be unstable.
pub fn enumerate_split_maps(t: TopType, caps: &EnumCaps) -> Result<Vec<SplitMap>, GraphError> {
    enumerate(t, caps, false)
}

/// The stable members of [`enumerate_split_maps`], pruned during the search.
pub fn enumerate_stable_types(t: TopType, caps: &EnumCaps) -> Result<Vec<SplitMap>, GraphError> {
    enumerate(t, caps, true)
}

fn enumerate(t: TopType, caps: &EnumCaps, stable_only: bool) -> Result<Vec<SplitMap>, GraphError> {
    let norm = t.norm();
    if norm > caps.bound {
        return Err(GraphError::BoundExceeded { norm, bound: caps.bound });
    }
    let bound = norm.max(0) as usize;
    let mut out = Vec::new();
    for n in 0..=bound {
        let mut g = Gen { t, caps: *caps, n, stable_only, sets: BTreeMap::new(), seen: HashSet::new(), out: Vec::new() };
        g.skeleton(&mut Vec::new(), &mut Vec::new(), 0, 0, (0, 0));
        out.extend(g.out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridge() -> Piece {
        Piece::new(0, 0, vec![])
    }

    fn chain(middle: Vec<Piece>, cut1: Vec<Node>, cut2: Vec<Node>) -> SplitMap {
        SplitMap::build(vec![vec![Piece::new(0, 1, vec![1, 2])], middle, vec![Piece::new(0, 1, vec![3])]], vec![cut1, cut2]).unwrap()
    }

    #[test]
    fn piece_weights() {
        let mut p = bridge();
        p.left = vec![1];
        p.right = vec![1];
        assert_eq!(p.weight(), 0);
        let mut q = Piece::new(0, 2, vec![1]);
        q.left = vec![1];
        q.right = vec![2];
        assert_eq!(q.weight(), 3);
    }

    #[test]
    fn empty_group_has_zero_weight() {
        let m = SplitMap::build(vec![vec![Piece::new(0, 3, vec![1, 2, 3])], vec![]], vec![vec![]]).unwrap();
        assert_eq!(weight(&m, 2).unwrap(), 0);
        assert!(is_stable(&m));
        assert!(weight(&m, 3).is_err());
    }

    #[test]
    fn trivial_middle_group_is_unstable() {
        let one = |l, r| vec![Node { left: l, right: r, weight: 1 }];
        let m = chain(vec![bridge()], one(0, 0), one(0, 0));
        assert!(!is_stable(&m));
        let m = chain(
            vec![bridge(), Piece::new(0, 1, vec![])],
            vec![Node { left: 0, right: 0, weight: 1 }, Node { left: 0, right: 1, weight: 1 }],
            vec![Node { left: 0, right: 0, weight: 1 }, Node { left: 1, right: 0, weight: 1 }],
        );
        assert_eq!(weight(&m, 2).unwrap(), 1);
        assert!(is_stable(&m));
        assert!(verify_norm_identity(&m));
    }

    #[test]
    fn norm_of_single_piece() {
        let m = SplitMap::build(vec![vec![Piece::new(1, 3, vec![1, 2])], vec![]], vec![vec![]]).unwrap();
        assert_eq!(m.total_type().norm(), 5);
        assert!(verify_norm_identity(&m));
        assert_eq!(ample_weights(&m).unwrap(), vec![5]);
    }

    #[test]
    fn one_sided_node_is_rejected() {
        let m = chain(vec![Piece::new(0, 1, vec![])], vec![Node { left: 0, right: 0, weight: 1 }], vec![Node { left: 0, right: 0, weight: 1 }]);
        let mut groups = m.groups().to_vec();
        groups[1][0].left.clear();
        assert!(matches!(SplitMap::new(groups, m.interfaces().to_vec()), Err(GraphError::ContactMismatch { .. })));
    }

    #[test]
    fn ample_weights_partial_sums() {
        // ω = (2, 1, 3)
        let m = SplitMap::build(
            vec![vec![Piece::new(0, 1, vec![1, 2])], vec![Piece::new(0, 1, vec![])], vec![Piece::new(1, 1, vec![3])]],
            vec![vec![Node { left: 0, right: 0, weight: 1 }], vec![Node { left: 0, right: 0, weight: 1 }]],
        )
        .unwrap();
        assert_eq!(weights(&m), vec![2, 1, 3]);
        assert_eq!(ample_weights(&m).unwrap(), vec![2, 3]);
    }

    #[test]
    fn length_bound() {
        assert_eq!(max_length_bound(TopType::new(1, 0, 2)), Ok(1));
        assert_eq!(max_length_bound(TopType::new(3, 1, 2)), Ok(5));
        assert!(max_length_bound(TopType::new(0, 0, 0)).is_err());
    }

    #[test]
    fn decompose_round_trip() {
        let m = chain(
            vec![Piece::new(0, 1, vec![])],
            vec![Node { left: 0, right: 0, weight: 1 }, Node { left: 0, right: 0, weight: 2 }],
            vec![Node { left: 0, right: 0, weight: 3 }],
        );
        for l in 1..=2 {
            let (h1, h2, sigma) = decompose(&m, l).unwrap();
            assert_eq!(glue_halves(&h1, &h2).unwrap(), m);
            let w: Vec<u32> = h1.roots.iter().map(|r| r.1).collect();
            assert_eq!(w, sigma);
        }
        assert!(decompose(&m, 3).is_err());
    }

    #[test]
    fn collapse_adds_weights() {
        let m = chain(vec![Piece::new(0, 1, vec![])], vec![Node { left: 0, right: 0, weight: 1 }], vec![Node { left: 0, right: 0, weight: 1 }]);
        for a in [vec![1, 1, 2], vec![1, 2, 2], vec![1, 2, 3]] {
            let c = collapse(&m, &a).unwrap();
            assert!(specialization_sum_check(&c, &m, &a).unwrap());
            assert_eq!(c.total_type(), m.total_type());
        }
        assert!(collapse(&m, &[1, 3, 3]).is_err());
        assert!(specialization_sum_check(&m, &m, &[2, 1, 3]).is_err());
    }

    #[test]
    fn enumeration_small() {
        let caps = EnumCaps::default();
        let maps = enumerate_stable_types(TopType::new(1, 0, 0), &caps).unwrap();
        // one piece on either side of W[0]_0
        assert_eq!(maps.len(), 2);
        assert!(maps.iter().all(|m| m.n() == 0 && m.piece_count() == 1));
        assert!(maps.iter().all(verify_norm_identity));
        assert!(enumerate_split_maps(TopType::new(9, 0, 0), &caps).is_err());
        let maps = enumerate_stable_types(TopType::new(1, 0, 2), &caps).unwrap();
        assert!(maps.iter().any(|m| m.n() == 0 && m.piece_count() == 1));
        assert!(maps.iter().all(verify_norm_identity));
    }
}
