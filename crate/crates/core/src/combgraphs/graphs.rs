use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::split::{permutations, Dsu};
use super::{GraphError, TopType};

/// Largest root count `eq_group` will brute-force by default.
pub const DEFAULT_EQ_BOUND: usize = 8;

/// The group in which degree classes live: `Z^rank` with two functionals,
/// the degree against `H` and the intersection number with `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeLattice {
    pub deg_h: Vec<i64>,
    pub deg_d: Vec<i64>,
}

impl Default for DegreeLattice {
    /// Rank two, a class being `(deg_H, deg_D)` itself.
    fn default() -> Self {
        DegreeLattice { deg_h: vec![1, 0], deg_d: vec![0, 1] }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl DegreeLattice {
    pub fn rank(&self) -> usize {
        self.deg_h.len()
    }

    pub fn h(&self, class: &[i64]) -> i64 {
        dot(&self.deg_h, class)
    }

    pub fn d(&self, class: &[i64]) -> i64 {
        dot(&self.deg_d, class)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    pub class: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Root {
    pub vertex: usize,
    pub weight: u32,
}

/// An edge-free graph with vertex genera and degree classes, ordered legs and
/// ordered weighted roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibleGraph {
    lattice: DegreeLattice,
    vertices: Vec<Vertex>,
    legs: Vec<usize>,
    roots: Vec<Root>,
}

impl AdmissibleGraph {
    pub fn new(lattice: DegreeLattice, vertices: Vec<Vertex>, legs: Vec<usize>, roots: Vec<Root>) -> Result<Self, GraphError> {
        if lattice.deg_d.len() != lattice.deg_h.len() {
            return Err(GraphError::LatticeShape);
        }
        for (v, x) in vertices.iter().enumerate() {
            if x.class.len() != lattice.rank() {
                return Err(GraphError::ClassRank { vertex: v, got: x.class.len(), rank: lattice.rank() });
            }
        }
        if vertices.is_empty() && !(legs.is_empty() && roots.is_empty()) {
            return Err(GraphError::EmptyWithData);
        }
        for (i, &v) in legs.iter().enumerate() {
            if v >= vertices.len() {
                return Err(GraphError::DanglingAttachment { what: "leg", index: i + 1, vertex: v });
            }
        }
        for (i, r) in roots.iter().enumerate() {
            if r.vertex >= vertices.len() {
                return Err(GraphError::DanglingAttachment { what: "root", index: i + 1, vertex: r.vertex });
            }
            if r.weight == 0 {
                return Err(GraphError::ZeroWeight);
            }
        }
        let mut sums = vec![0i64; vertices.len()];
        let mut has = vec![false; vertices.len()];
        for r in &roots {
            sums[r.vertex] += r.weight as i64;
            has[r.vertex] = true;
        }
        if vertices.len() > 1 {
            if let Some(v) = has.iter().position(|h| !h) {
                return Err(GraphError::RootlessVertex(v));
            }
        }
        for (v, x) in vertices.iter().enumerate() {
            let deg_d = lattice.d(&x.class);
            if deg_d != sums[v] {
                return Err(GraphError::ContactConstraint { vertex: v, roots: sums[v], deg_d });
            }
        }
        Ok(AdmissibleGraph { lattice, vertices, legs, roots })
    }

    /// The empty graph, one side of a gluing with no roots.
    pub fn empty(lattice: DegreeLattice) -> Self {
        AdmissibleGraph { lattice, vertices: Vec::new(), legs: Vec::new(), roots: Vec::new() }
    }

    pub fn lattice(&self) -> &DegreeLattice {
        &self.lattice
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn r(&self) -> usize {
        self.roots.len()
    }

    pub fn k(&self) -> usize {
        self.legs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `Γ^σ`: its `j`-th root is the `σ^{-1}(j)`-th root of `Γ`. `sigma[i]` is the image of `i`.
    pub fn reorder(&self, sigma: &[usize]) -> AdmissibleGraph {
        let mut roots = self.roots.clone();
        for (i, &s) in sigma.iter().enumerate() {
            roots[s] = self.roots[i];
        }
        AdmissibleGraph { roots, ..self.clone() }
    }

    /// Isomorphism: a vertex bijection preserving genus and class, carrying
    /// legs and roots to legs and roots with the same index and weight.
    pub fn isomorphic(&self, other: &AdmissibleGraph) -> bool {
        if self.lattice != other.lattice
            || self.vertices.len() != other.vertices.len()
            || self.legs.len() != other.legs.len()
            || self.roots.len() != other.roots.len()
        {
            return false;
        }
        let nv = self.vertices.len();
        let mut pi: Vec<Option<usize>> = vec![None; nv];
        let mut pairs: Vec<(usize, usize)> = self.legs.iter().copied().zip(other.legs.iter().copied()).collect();
        for (a, b) in self.roots.iter().zip(&other.roots) {
            if a.weight != b.weight {
                return false;
            }
            pairs.push((a.vertex, b.vertex));
        }
        if nv == 1 {
            pairs.push((0, 0));
        }
        for (a, b) in pairs {
            match pi[a] {
                Some(x) if x != b => return false,
                _ => pi[a] = Some(b),
            }
        }
        let mut hit = vec![false; nv];
        for (a, p) in pi.iter().enumerate() {
            let Some(b) = *p else { return false };
            if hit[b] || self.vertices[a] != other.vertices[b] {
                return false;
            }
            hit[b] = true;
        }
        true
    }

    pub fn to_json(&self) -> AdmissibleGraphJson {
        let mut vertices: Vec<VertexJson> = self
            .vertices
            .iter()
            .map(|v| VertexJson { g: v.genus, b: v.class.clone(), roots: Vec::new(), legs: 0 })
            .collect();
        let mut root_order = Vec::new();
        for r in &self.roots {
            let list = &mut vertices[r.vertex].roots;
            root_order.push([r.vertex, list.len()]);
            list.push(RootJson { weight: r.weight });
        }
        let mut leg_order = Vec::new();
        for &v in &self.legs {
            leg_order.push([v, vertices[v].legs]);
            vertices[v].legs += 1;
        }
        AdmissibleGraphJson { lattice: Some(self.lattice.clone()), vertices, root_order: Some(root_order), leg_order: Some(leg_order) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootJson {
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub g: u32,
    pub b: Vec<i64>,
    #[serde(default)]
    pub roots: Vec<RootJson>,
    #[serde(default)]
    pub legs: usize,
}

/// Roots and legs are listed per vertex; `root_order` and `leg_order` give the
/// global order as `[vertex, position at that vertex]` pairs and default to
/// reading order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleGraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<DegreeLattice>,
    pub vertices: Vec<VertexJson>,
    #[serde(default)]
    pub root_order: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub leg_order: Option<Vec<[usize; 2]>>,
}

fn resolve_order(counts: &[usize], order: &Option<Vec<[usize; 2]>>, what: &str) -> Result<Vec<usize>, GraphError> {
    let total: usize = counts.iter().sum();
    let Some(order) = order else {
        return Ok(counts.iter().enumerate().flat_map(|(v, &c)| std::iter::repeat(v).take(c)).collect());
    };
    if order.len() != total {
        return Err(GraphError::Malformed(format!("{what}_order has {} entries, the vertices carry {total}", order.len())));
    }
    let mut seen = std::collections::HashSet::new();
    for &[v, j] in order {
        if v >= counts.len() || j >= counts[v] || !seen.insert((v, j)) {
            return Err(GraphError::Malformed(format!("{what}_order entry [{v}, {j}] is invalid or repeated")));
        }
    }
    Ok(order.iter().map(|p| p[0]).collect())
}

impl AdmissibleGraphJson {
    pub fn build(&self) -> Result<AdmissibleGraph, GraphError> {
        let lattice = self.lattice.clone().unwrap_or_default();
        let root_counts: Vec<usize> = self.vertices.iter().map(|v| v.roots.len()).collect();
        let leg_counts: Vec<usize> = self.vertices.iter().map(|v| v.legs).collect();
        let root_vertices = resolve_order(&root_counts, &self.root_order, "root")?;
        let legs = resolve_order(&leg_counts, &self.leg_order, "leg")?;
        let roots: Vec<Root> = match &self.root_order {
            Some(order) => order.iter().map(|&[v, j]| Root { vertex: v, weight: self.vertices[v].roots[j].weight }).collect(),
            None => self.vertices.iter().enumerate().flat_map(|(v, x)| x.roots.iter().map(move |r| Root { vertex: v, weight: r.weight })).collect(),
        };
        debug_assert_eq!(root_vertices, roots.iter().map(|r| r.vertex).collect::<Vec<_>>());
        let vertices = self.vertices.iter().map(|v| Vertex { genus: v.g, class: v.b.clone() }).collect();
        AdmissibleGraph::new(lattice, vertices, legs, roots)
    }
}

/// Gluing data `η = (Γ1, Γ2, I)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibleTriple {
    g1: AdmissibleGraph,
    g2: AdmissibleGraph,
    subset: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleJson {
    pub graph1: AdmissibleGraphJson,
    pub graph2: AdmissibleGraphJson,
    /// 1-based positions of the legs of the first graph among all legs.
    #[serde(default)]
    pub subset: Option<Vec<usize>>,
}

impl TripleJson {
    pub fn build(&self) -> Result<AdmissibleTriple, GraphError> {
        let g1 = self.graph1.build()?;
        let g2 = self.graph2.build()?;
        let subset = self.subset.clone().unwrap_or_else(|| (1..=g1.k()).collect());
        AdmissibleTriple::new(g1, g2, subset)
    }
}

impl AdmissibleTriple {
    pub fn new(g1: AdmissibleGraph, g2: AdmissibleGraph, mut subset: Vec<usize>) -> Result<Self, GraphError> {
        if g1.r() != g2.r() {
            return Err(GraphError::RootCount(g1.r(), g2.r()));
        }
        for (i, (a, b)) in g1.roots.iter().zip(&g2.roots).enumerate() {
            if a.weight != b.weight {
                return Err(GraphError::WeightMismatch { index: i + 1, left: a.weight, right: b.weight });
            }
        }
        let k = g1.k() + g2.k();
        let orig = subset.clone();
        subset.sort_unstable();
        subset.dedup();
        if subset.len() != g1.k() || orig.len() != g1.k() || subset.iter().any(|&i| i == 0 || i > k) {
            return Err(GraphError::BadSubset(orig, g1.k(), k));
        }
        let t = AdmissibleTriple { g1, g2, subset };
        if !t.glue().is_connected() {
            return Err(GraphError::GluedDisconnected);
        }
        Ok(t)
    }

    pub fn graph1(&self) -> &AdmissibleGraph {
        &self.g1
    }

    pub fn graph2(&self) -> &AdmissibleGraph {
        &self.g2
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn r(&self) -> usize {
        self.g1.r()
    }

    pub fn k(&self) -> usize {
        self.g1.k() + self.g2.k()
    }

    pub fn reorder(&self, sigma: &[usize]) -> AdmissibleTriple {
        AdmissibleTriple { g1: self.g1.reorder(sigma), g2: self.g2.reorder(sigma), subset: self.subset.clone() }
    }

    pub fn isomorphic(&self, other: &AdmissibleTriple) -> bool {
        self.subset == other.subset && self.g1.isomorphic(&other.g1) && self.g2.isomorphic(&other.g2)
    }

    /// `η1 ~ η2` when `η1 ≅ η2^σ` for some `σ`.
    pub fn equivalent(&self, other: &AdmissibleTriple) -> bool {
        self.r() == other.r() && permutations(&(0..self.r()).collect::<Vec<_>>()).iter().any(|s| self.isomorphic(&other.reorder(s)))
    }

    pub fn glue(&self) -> GluedGraph {
        let mut vertices = Vec::new();
        for (side, g) in [(1u8, &self.g1), (2u8, &self.g2)] {
            for (index, v) in g.vertices.iter().enumerate() {
                vertices.push(GluedVertex { side, index, genus: v.genus, degree_h: g.lattice.h(&v.class) });
            }
        }
        let off = self.g1.vertices.len();
        let edges = self.g1.roots.iter().zip(&self.g2.roots).map(|(a, b)| (a.vertex, off + b.vertex, a.weight)).collect();
        let mut legs = vec![0; self.k()];
        let mut it1 = self.g1.legs.iter();
        let mut it2 = self.g2.legs.iter();
        for (pos, slot) in legs.iter_mut().enumerate() {
            *slot = if self.subset.binary_search(&(pos + 1)).is_ok() { *it1.next().unwrap() } else { off + *it2.next().unwrap() };
        }
        GluedGraph { vertices, edges, legs }
    }

    pub fn to_json(&self) -> TripleJson {
        TripleJson { graph1: self.g1.to_json(), graph2: self.g2.to_json(), subset: Some(self.subset.clone()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluedVertex {
    pub side: u8,
    pub index: usize,
    pub genus: u32,
    pub degree_h: i64,
}

/// Both vertex sets, with root `i` of one side joined to root `i` of the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluedGraph {
    pub vertices: Vec<GluedVertex>,
    /// `(vertex, vertex, weight)`.
    pub edges: Vec<(usize, usize, u32)>,
    /// Vertex of each leg, in the glued order.
    pub legs: Vec<usize>,
}

impl GluedGraph {
    fn dsu(&self) -> Dsu {
        let mut d = Dsu::new(self.vertices.len());
        for &(a, b, _) in &self.edges {
            d.union(a, b);
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        !self.vertices.is_empty() && self.dsu().components() == 1
    }

    /// First Betti number `#E - #V + #components`.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + self.dsu().components() as i64
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph glued {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"Y{} g={} b={}\"];", v.side, v.genus, v.degree_h);
        }
        for (j, &v) in self.legs.iter().enumerate() {
            let _ = writeln!(s, "  leg{} [shape=plaintext, label=\"{}\"];", j + 1, j + 1);
            let _ = writeln!(s, "  v{v} -- leg{} [style=dashed];", j + 1);
        }
        for &(a, b, w) in &self.edges {
            let _ = writeln!(s, "  v{a} -- v{b} [label=\"{w}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// `g(η) = r + 1 - |V| + Σ g(v)`.
pub fn genus(eta: &AdmissibleTriple) -> i64 {
    let nv = eta.g1.vertices.len() + eta.g2.vertices.len();
    let sg: i64 = eta.g1.vertices.iter().chain(&eta.g2.vertices).map(|v| v.genus as i64).sum();
    eta.r() as i64 + 1 - nv as i64 + sg
}

/// Sum of `deg_H` over the vertices of both graphs.
pub fn degree(eta: &AdmissibleTriple) -> i64 {
    let side = |g: &AdmissibleGraph| g.vertices.iter().map(|v| g.lattice.h(&v.class)).sum::<i64>();
    side(&eta.g1) + side(&eta.g2)
}

/// `(b, g, k)` of the glued curve; `None` if the degree is negative.
pub fn topo_type(eta: &AdmissibleTriple) -> Option<TopType> {
    let b = u32::try_from(degree(eta)).ok()?;
    let g = u32::try_from(genus(eta)).ok()?;
    Some(TopType { b, g, k: eta.k() as u32 })
}

/// `Eq(η) = {σ : η ≅ η^σ}` by exhaustive search, in lexicographic order.
pub fn eq_group(eta: &AdmissibleTriple, bound: usize) -> Result<Vec<Vec<usize>>, GraphError> {
    let r = eta.r();
    if r > bound {
        return Err(GraphError::TooManyRoots { r, bound });
    }
    Ok(permutations(&(0..r).collect::<Vec<_>>()).into_iter().filter(|s| eta.isomorphic(&eta.reorder(s))).collect())
}

/// `|Eq(η)|`, the degree of the gluing map.
pub fn phi_degree(eta: &AdmissibleTriple) -> Result<usize, GraphError> {
    Ok(eq_group(eta, DEFAULT_EQ_BOUND)?.len())
}

/// `a ∘ b`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

pub fn invert(a: &[usize]) -> Vec<usize> {
    let mut v = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        v[x] = i;
    }
    v
}

/// Contains the identity and is closed under composition and inverses.
pub fn is_subgroup(perms: &[Vec<usize>], r: usize) -> bool {
    let set: std::collections::HashSet<&Vec<usize>> = perms.iter().collect();
    let id: Vec<usize> = (0..r).collect();
    set.contains(&id)
        && perms.iter().all(|a| a.len() == r && set.contains(&invert(a)))
        && perms.iter().all(|a| perms.iter().all(|b| set.contains(&compose(a, b))))
}

/// Cycle notation with 1-based points, `id` for the identity.
pub fn render_perm(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for i in 0..p.len() {
        if seen[i] || p[i] == i {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            cyc.push((j + 1).to_string());
            j = p[j];
        }
        let _ = write!(out, "({})", cyc.join(" "));
    }
    if out.is_empty() {
        "id".into()
    } else {
        out
    }
}

/// Vertex decorations `(g, deg_H)` used by [`alphabet_triples`].
pub const ALPHABET_VERTICES: [(u32, i64); 3] = [(0, 0), (1, 0), (0, 1)];

/// Root weights used by [`alphabet_triples`].
pub const ALPHABET_WEIGHTS: [u32; 2] = [1, 2];

/// One side: `nv` vertices with decorations `deco`, roots placed by `at`.
fn alphabet_side(nv: usize, deco: &[usize], at: &[usize], weights: &[u32], legs: Vec<usize>) -> Option<AdmissibleGraph> {
    let mut d = vec![0i64; nv];
    for (&v, &w) in at.iter().zip(weights) {
        d[v] += w as i64;
    }
    let vertices = (0..nv)
        .map(|v| {
            let (genus, h) = ALPHABET_VERTICES[deco[v]];
            Vertex { genus, class: vec![h, d[v]] }
        })
        .collect();
    let roots = at.iter().zip(weights).map(|(&vertex, &weight)| Root { vertex, weight }).collect();
    AdmissibleGraph::new(DegreeLattice::default(), vertices, legs, roots).ok()
}

/// Root placements on `nv` vertices with the first root on vertex 0 and
/// every vertex hit.
fn placements(r: usize, nv: usize) -> Vec<Vec<usize>> {
    if nv == 0 {
        return if r == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let total = nv.pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let at: Vec<usize> = (0..r)
            .map(|_| {
                let v = c % nv;
                c /= nv;
                v
            })
            .collect();
        if at.first().is_some_and(|&v| v != 0) {
            continue;
        }
        if (0..nv).all(|v| at.contains(&v)) || (r == 0 && nv == 1) {
            out.push(at);
        }
    }
    out
}

/// Every connected admissible triple with `r <= max_r` roots of weight in
/// [`ALPHABET_WEIGHTS`], at most two vertices per side decorated from
/// [`ALPHABET_VERTICES`], and at most one leg. With no roots, exactly one
/// side is a single vertex.
pub fn alphabet_triples(max_r: usize) -> Vec<AdmissibleTriple> {
    let mut out = Vec::new();
    let sides = |r: usize| -> Vec<(usize, Vec<usize>, Vec<usize>)> {
        let mut v = Vec::new();
        for nv in 0..=2usize {
            let ndeco = ALPHABET_VERTICES.len().pow(nv as u32);
            for at in placements(r, nv) {
                for code in 0..ndeco {
                    let deco: Vec<usize> = (0..nv).map(|i| code / ALPHABET_VERTICES.len().pow(i as u32) % ALPHABET_VERTICES.len()).collect();
                    v.push((nv, deco, at.clone()));
                }
            }
        }
        v
    };
    for r in 0..=max_r {
        let side_list = sides(r);
        let nw = ALPHABET_WEIGHTS.len().pow(r as u32);
        for wcode in 0..nw {
            let weights: Vec<u32> = (0..r).map(|i| ALPHABET_WEIGHTS[wcode / ALPHABET_WEIGHTS.len().pow(i as u32) % ALPHABET_WEIGHTS.len()]).collect();
            for (n1, d1, a1) in &side_list {
                for (n2, d2, a2) in &side_list {
                    if n1 + n2 == 0 || (r == 0 && n1 * n2 != 0) {
                        continue;
                    }
                    // no leg, or one leg on some vertex of either side
                    let mut legs: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
                    legs.extend((0..*n1).map(|v| (vec![v], Vec::new())));
                    legs.extend((0..*n2).map(|v| (Vec::new(), vec![v])));
                    for (l1, l2) in legs {
                        let subset: Vec<usize> = if l1.is_empty() { Vec::new() } else { vec![1] };
                        let (Some(g1), Some(g2)) = (alphabet_side(*n1, d1, a1, &weights, l1), alphabet_side(*n2, d2, a2, &weights, l2)) else {
                            continue;
                        };
                        if let Ok(t) = AdmissibleTriple::new(g1, g2, subset) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex(genus: u32, h: i64, d: i64) -> Vertex {
        Vertex { genus, class: vec![h, d] }
    }

    fn single(weights: &[u32], legs: usize) -> AdmissibleGraph {
        let d = weights.iter().map(|&w| w as i64).sum();
        AdmissibleGraph::new(
            DegreeLattice::default(),
            vec![vertex(0, 1, d)],
            vec![0; legs],
            weights.iter().map(|&weight| Root { vertex: 0, weight }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn genus_of_simple_gluings() {
        let one = AdmissibleTriple::new(single(&[1], 0), single(&[1], 0), vec![]).unwrap();
        assert_eq!(genus(&one), 0);
        let two = AdmissibleTriple::new(single(&[1, 1], 0), single(&[1, 1], 0), vec![]).unwrap();
        assert_eq!(genus(&two), 1);
        assert_eq!(two.glue().betti(), 1);
        assert_eq!(degree(&two), 2);
    }

    #[test]
    fn eq_group_examples() {
        let one = AdmissibleTriple::new(single(&[1], 0), single(&[1], 0), vec![]).unwrap();
        assert_eq!(phi_degree(&one).unwrap(), 1);
        let two = AdmissibleTriple::new(single(&[1, 1], 0), single(&[1, 1], 0), vec![]).unwrap();
        let g = eq_group(&two, DEFAULT_EQ_BOUND).unwrap();
        assert_eq!(g.iter().map(|p| render_perm(p)).collect::<Vec<_>>(), vec!["id", "(1 2)"]);
        assert!(is_subgroup(&g, 2));
        let mixed = AdmissibleTriple::new(single(&[1, 2], 0), single(&[1, 2], 0), vec![]).unwrap();
        assert_eq!(phi_degree(&mixed).unwrap(), 1);
    }

    #[test]
    fn swap_needs_matching_vertices() {
        // Γ1 has the two roots on different vertices, Γ2 on one vertex
        let lat = DegreeLattice::default();
        let g1 = AdmissibleGraph::new(
            lat.clone(),
            vec![vertex(0, 1, 1), vertex(0, 1, 1)],
            vec![],
            vec![Root { vertex: 0, weight: 1 }, Root { vertex: 1, weight: 1 }],
        )
        .unwrap();
        let eta = AdmissibleTriple::new(g1.clone(), single(&[1, 1], 0), vec![]).unwrap();
        assert_eq!(phi_degree(&eta).unwrap(), 2);
        let g1b = AdmissibleGraph::new(
            lat,
            vec![vertex(1, 1, 1), vertex(0, 1, 1)],
            vec![],
            vec![Root { vertex: 0, weight: 1 }, Root { vertex: 1, weight: 1 }],
        )
        .unwrap();
        let eta = AdmissibleTriple::new(g1b, single(&[1, 1], 0), vec![]).unwrap();
        assert_eq!(phi_degree(&eta).unwrap(), 1);
    }

    #[test]
    fn invalid_graphs() {
        let lat = DegreeLattice::default();
        assert!(matches!(
            AdmissibleGraph::new(lat.clone(), vec![vertex(0, 1, 2)], vec![], vec![Root { vertex: 0, weight: 1 }]),
            Err(GraphError::ContactConstraint { .. })
        ));
        assert!(matches!(
            AdmissibleGraph::new(lat.clone(), vec![vertex(0, 1, 1), vertex(0, 1, 0)], vec![], vec![Root { vertex: 0, weight: 1 }]),
            Err(GraphError::RootlessVertex(1))
        ));
        assert!(matches!(AdmissibleTriple::new(single(&[1], 0), single(&[2], 0), vec![]), Err(GraphError::WeightMismatch { .. })));
        let empty = AdmissibleGraph::empty(lat.clone());
        let lone = AdmissibleGraph::new(lat, vec![vertex(2, 0, 0)], vec![], vec![]).unwrap();
        let eta = AdmissibleTriple::new(lone, empty.clone(), vec![]).unwrap();
        assert_eq!(genus(&eta), 2);
        assert_eq!(phi_degree(&eta).unwrap(), 1);
        assert!(matches!(AdmissibleTriple::new(empty.clone(), empty, vec![]), Err(GraphError::GluedDisconnected)));
    }

    #[test]
    fn legs_follow_subset() {
        let eta = AdmissibleTriple::new(single(&[1], 1), single(&[1], 2), vec![2]).unwrap();
        assert_eq!(eta.glue().legs, vec![1, 0, 1]);
        assert!(AdmissibleTriple::new(single(&[1], 1), single(&[1], 2), vec![4]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let lat = DegreeLattice::default();
        let g = AdmissibleGraph::new(
            lat,
            vec![vertex(0, 1, 1), vertex(1, 0, 3)],
            vec![1, 0],
            vec![Root { vertex: 1, weight: 2 }, Root { vertex: 0, weight: 1 }, Root { vertex: 1, weight: 1 }],
        )
        .unwrap();
        let j = g.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: AdmissibleGraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }

    #[test]
    fn dot_labels_edges_with_weights() {
        let eta = AdmissibleTriple::new(single(&[1, 2], 0), single(&[1, 2], 0), vec![]).unwrap();
        let dot = eta.glue().to_dot();
        assert!(dot.contains("v0 -- v1 [label=\"2\"]"));
    }
}
