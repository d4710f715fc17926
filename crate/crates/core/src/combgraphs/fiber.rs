use std::collections::BTreeSet;

use serde::Serialize;

use super::graphs::{eq_group, AdmissibleGraph, AdmissibleTriple, DegreeLattice, Root, Vertex, DEFAULT_EQ_BOUND};
use super::split::{decompose, permutations, Dsu, Node, Piece, RelSplit, SplitMap};
use super::GraphError;

/// Topological type of one half: a vertex per connected component.
fn half_graph(h: &RelSplit) -> AdmissibleGraph {
    let mut off = vec![0];
    for g in &h.groups {
        off.push(off.last().unwrap() + g.len());
    }
    let total = *off.last().unwrap();
    let mut dsu = Dsu::new(total);
    for (i, iface) in h.interfaces.iter().enumerate() {
        for x in iface {
            dsu.union(off[i] + x.left, off[i + 1] + x.right);
        }
    }
    let mut comp = vec![usize::MAX; total];
    let mut roots_of: Vec<usize> = Vec::new();
    for p in 0..total {
        let r = dsu.find(p);
        if comp[r] == usize::MAX {
            comp[r] = roots_of.len();
            roots_of.push(r);
        }
        comp[p] = comp[r];
    }
    let mut genus = vec![1i64; roots_of.len()];
    let mut deg_h = vec![0i64; roots_of.len()];
    let mut deg_d = vec![0i64; roots_of.len()];
    let mut marks: Vec<(u32, usize)> = Vec::new();
    for (i, g) in h.groups.iter().enumerate() {
        for (p, piece) in g.iter().enumerate() {
            let c = comp[off[i] + p];
            genus[c] += piece.genus as i64 - 1;
            deg_h[c] += piece.degree as i64;
            marks.extend(piece.marks.iter().map(|&l| (l, c)));
        }
    }
    for (i, iface) in h.interfaces.iter().enumerate() {
        for x in iface {
            genus[comp[off[i] + x.left]] += 1;
        }
    }
    let b = h.boundary();
    let roots: Vec<Root> = h
        .roots
        .iter()
        .map(|&(p, weight)| {
            let vertex = comp[off[b] + p];
            deg_d[vertex] += weight as i64;
            Root { vertex, weight }
        })
        .collect();
    marks.sort_unstable();
    let vertices = (0..roots_of.len()).map(|c| Vertex { genus: genus[c] as u32, class: vec![deg_h[c], deg_d[c]] }).collect();
    AdmissibleGraph::new(DegreeLattice::default(), vertices, marks.iter().map(|m| m.1).collect(), roots)
        .expect("halves of a valid split map are admissible")
}

/// The triple obtained by cutting `m` at `Σ_l`, roots in interface order.
pub fn half_types(m: &SplitMap, l: usize) -> Result<AdmissibleTriple, GraphError> {
    let (h1, h2, _) = decompose(m, l)?;
    let g1 = half_graph(&h1);
    let g2 = half_graph(&h2);
    let subset: Vec<usize> = {
        let mut v: Vec<usize> = h1.groups.iter().flatten().flat_map(|p| p.marks.iter().map(|&x| x as usize)).collect();
        v.sort_unstable();
        v
    };
    AdmissibleTriple::new(g1, g2, subset)
}

/// A split map over `W[0]` whose cut at `Σ_1` has type `η`. Needs the
/// default lattice and nonnegative `H`-degrees.
pub fn realize(eta: &AdmissibleTriple) -> Result<SplitMap, GraphError> {
    let std = DegreeLattice::default();
    if eta.graph1().lattice() != &std || eta.graph2().lattice() != &std {
        return Err(GraphError::Malformed("only triples over the default lattice can be realized".into()));
    }
    let k = eta.k();
    let comp: Vec<usize> = (1..=k).filter(|i| eta.subset().binary_search(i).is_err()).collect();
    let side = |g: &AdmissibleGraph, labels: &[usize]| -> Result<Vec<Piece>, GraphError> {
        let mut pieces = Vec::new();
        for v in g.vertices() {
            let d = u32::try_from(v.class[0]).map_err(|_| GraphError::Malformed("negative degree".into()))?;
            pieces.push(Piece::new(v.genus, d, Vec::new()));
        }
        for (&v, &l) in g.legs().iter().zip(labels) {
            pieces[v].marks.push(l as u32);
        }
        Ok(pieces)
    };
    let x1 = side(eta.graph1(), eta.subset())?;
    let x2 = side(eta.graph2(), &comp)?;
    let cut = eta
        .graph1()
        .roots()
        .iter()
        .zip(eta.graph2().roots())
        .map(|(a, b)| Node { left: a.vertex, right: b.vertex, weight: a.weight })
        .collect();
    SplitMap::build(vec![x1, x2], vec![cut])
}

/// Automorphisms of a chain of groups: piece permutations within groups and
/// node permutations within interfaces, fixing the listed `(group, piece)`s.
/// Returns the total count and the distinct permutations induced on the
/// nodes of interface `focus`.
fn chain_automorphisms(groups: &[Vec<Piece>], interfaces: &[Vec<Node>], fixed: &[(usize, usize)], focus: Option<usize>) -> (u64, BTreeSet<Vec<usize>>) {
    let per_group: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            permutations(&(0..g.len()).collect::<Vec<_>>())
                .into_iter()
                .filter(|p| p.iter().enumerate().all(|(i, &j)| g[i] == g[j] && (i == j || !fixed.contains(&(gi, i)))))
                .collect()
        })
        .collect();
    let mut total = 0u64;
    let mut image = BTreeSet::new();
    let mut choice = vec![0usize; groups.len()];
    'outer: loop {
        let pi: Vec<&Vec<usize>> = choice.iter().zip(&per_group).map(|(&c, g)| &g[c]).collect();
        let mut count = 1u64;
        let mut focus_maps: Vec<Vec<usize>> = vec![Vec::new()];
        for (i, iface) in interfaces.iter().enumerate() {
            let moved: Vec<Node> = iface.iter().map(|x| Node { left: pi[i][x.left], right: pi[i + 1][x.right], weight: x.weight }).collect();
            let mut a = iface.clone();
            let mut b = moved.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                count = 0;
                break;
            }
            // nodes with the same endpoints and weight can be exchanged freely
            let mut classes: Vec<(Node, usize)> = Vec::new();
            for x in &a {
                match classes.last_mut() {
                    Some((y, c)) if y == x => *c += 1,
                    _ => classes.push((*x, 1)),
                }
            }
            count *= classes.iter().map(|&(_, c)| (1..=c as u64).product::<u64>()).product::<u64>();
            if Some(i) == focus {
                focus_maps = node_bijections(&moved, iface);
            }
        }
        if count > 0 {
            total += count;
            if focus.is_some() {
                image.extend(focus_maps);
            }
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                break 'outer;
            }
            choice[i] += 1;
            if choice[i] < per_group[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    (total, image)
}

/// All `τ` with `iface[τ(x)] = moved[x]`.
fn node_bijections(moved: &[Node], iface: &[Node]) -> Vec<Vec<usize>> {
    fn go(x: usize, moved: &[Node], iface: &[Node], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if x == moved.len() {
            out.push(cur.clone());
            return;
        }
        for y in 0..iface.len() {
            if !used[y] && iface[y] == moved[x] {
                used[y] = true;
                cur.push(y);
                go(x + 1, moved, iface, used, cur, out);
                cur.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, moved, iface, &mut vec![false; iface.len()], &mut Vec::new(), &mut out);
    out
}

/// `|Aut(m)|` of the combinatorial shadow, parallel nodes included.
pub fn automorphism_count(m: &SplitMap) -> u64 {
    chain_automorphisms(m.groups(), m.interfaces(), &[], None).0
}

/// Permutations of `Σ_l` induced by automorphisms of `m`.
pub fn aut_image(m: &SplitMap, l: usize) -> Result<BTreeSet<Vec<usize>>, GraphError> {
    let max = m.n() + 1;
    if l == 0 || l > max {
        return Err(GraphError::IndexOutOfRange { index: l, max });
    }
    Ok(chain_automorphisms(m.groups(), m.interfaces(), &[], Some(l - 1)).1)
}

/// Automorphisms of a half fixing every root.
pub fn relative_aut_count(h: &RelSplit) -> u64 {
    let b = h.boundary();
    let fixed: Vec<(usize, usize)> = h.roots.iter().map(|&(p, _)| (b, p)).collect();
    chain_automorphisms(&h.groups, &h.interfaces, &fixed, None).0
}

/// `#{orderings of Σ_l whose cut type is ≅ η} / |image(h)|`.
pub fn fiber_count(eta: &AdmissibleTriple, m: &SplitMap, l: usize) -> Result<usize, GraphError> {
    Ok(DegreeCheck::compute(eta, m, l)?.fiber)
}

/// Every number entering the degree identity for one `(η, m, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub r: usize,
    /// Orderings of `Σ_l` giving a type isomorphic to `η`.
    pub orderings: usize,
    /// `|image(h)|`, automorphisms of `m` acting on `Σ_l`.
    pub image: usize,
    pub fiber: usize,
    pub eq_order: usize,
    pub aut_total: u64,
    /// `|Aut|` of the two halves with roots fixed.
    pub aut_halves: (u64, u64),
}

impl DegreeCheck {
    pub fn compute(eta: &AdmissibleTriple, m: &SplitMap, l: usize) -> Result<Self, GraphError> {
        let (h1, h2, sigma) = decompose(m, l)?;
        if sigma.len() != eta.r() {
            return Err(GraphError::RootCount(sigma.len(), eta.r()));
        }
        let base = half_types(m, l)?;
        let r = sigma.len();
        let orderings = permutations(&(0..r).collect::<Vec<_>>()).iter().filter(|s| base.reorder(s).isomorphic(eta)).count();
        let image = aut_image(m, l)?.len();
        let eq_order = eq_group(eta, DEFAULT_EQ_BOUND.max(r))?.len();
        Ok(DegreeCheck {
            r,
            orderings,
            image,
            fiber: orderings / image,
            eq_order,
            aut_total: automorphism_count(m),
            aut_halves: (relative_aut_count(&h1), relative_aut_count(&h2)),
        })
    }

    /// `fiber · |Aut(m)| / (|Aut ξ1| |Aut ξ2|) = |Eq(η)|`, with the kernel of
    /// `Aut(m) → S_r` equal to the product of the half automorphism groups.
    pub fn holds(&self) -> bool {
        let kernel = self.aut_halves.0 * self.aut_halves.1;
        self.orderings % self.image == 0
            && self.aut_total == kernel * self.image as u64
            && self.fiber as u64 * self.aut_total == self.eq_order as u64 * kernel
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(weights: &[u32], h: i64) -> AdmissibleGraph {
        let d = weights.iter().map(|&w| w as i64).sum();
        AdmissibleGraph::new(
            DegreeLattice::default(),
            vec![Vertex { genus: 0, class: vec![h, d] }],
            vec![],
            weights.iter().map(|&weight| Root { vertex: 0, weight }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn asymmetric_fiber_is_one() {
        let eta = AdmissibleTriple::new(single(&[1, 2], 1), single(&[1, 2], 2), vec![]).unwrap();
        let m = realize(&eta).unwrap();
        let c = DegreeCheck::compute(&eta, &m, 1).unwrap();
        assert_eq!(c.fiber, 1);
        assert!(c.holds());
    }

    #[test]
    fn symmetric_fiber_is_weighted() {
        let eta = AdmissibleTriple::new(single(&[1, 1], 1), single(&[1, 1], 1), vec![]).unwrap();
        let m = realize(&eta).unwrap();
        let c = DegreeCheck::compute(&eta, &m, 1).unwrap();
        assert_eq!(c.eq_order, 2);
        // the two parallel nodes can be exchanged
        assert_eq!(c.image, 2);
        assert_eq!(c.fiber, 1);
        assert!(c.holds());
    }

    #[test]
    fn zero_roots() {
        let lone = AdmissibleGraph::new(DegreeLattice::default(), vec![Vertex { genus: 1, class: vec![2, 0] }], vec![0], vec![]).unwrap();
        let eta = AdmissibleTriple::new(AdmissibleGraph::empty(DegreeLattice::default()), lone, vec![]).unwrap();
        let m = realize(&eta).unwrap();
        assert_eq!(fiber_count(&eta, &m, 1).unwrap(), 1);
    }

    #[test]
    fn realize_then_cut_recovers_type() {
        let eta = AdmissibleTriple::new(single(&[2, 1, 1], 0), single(&[2, 1, 1], 3), vec![]).unwrap();
        let m = realize(&eta).unwrap();
        assert!(half_types(&m, 1).unwrap().isomorphic(&eta));
    }

    #[test]
    fn mismatched_root_count() {
        let eta = AdmissibleTriple::new(single(&[1], 1), single(&[1], 1), vec![]).unwrap();
        let other = AdmissibleTriple::new(single(&[1, 1], 1), single(&[1, 1], 1), vec![]).unwrap();
        let m = realize(&other).unwrap();
        assert!(fiber_count(&eta, &m, 1).is_err());
    }
}
