use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::essential::essential_fill;
use super::relation::{BoxSet, Relation, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Trivial,
    Nontrivial,
}

/// A connected component under single-coordinate-difference adjacency.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    /// Canonical tuple indices, ascending.
    pub members: Vec<usize>,
    pub coord_sets: Vec<Vec<u8>>,
    pub is_product: bool,
    pub kind: BlockKind,
}

impl Block {
    pub fn bounding_box(&self) -> BoxSet {
        BoxSet::new(self.coord_sets.clone())
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn to_relation(&self, k: usize, arity: usize) -> Relation {
        Relation::from_indices(k, arity, self.members.iter().copied())
            .expect("block shape matches its parent relation")
    }

    pub fn tuples(&self, k: usize, arity: usize) -> Vec<Tuple> {
        let shape = Relation::empty(k, arity).expect("block shape matches its parent relation");
        self.members.iter().map(|&i| shape.tuple_at(i)).collect()
    }
}

/// Connected components of `graph`, classified trivial when every member
/// lies in `base`. Ordered by smallest member index.
pub fn components(graph: &Relation, base: &Relation) -> Vec<Block> {
    let members: Vec<usize> = graph.member_indices().collect();
    let n = graph.arity();
    let k = graph.domain_size() as u8;
    let mut uf = UnionFind::<usize>::new(members.len());
    let mut buf = vec![0u8; n];
    for (pos, &idx) in members.iter().enumerate() {
        graph.decode_into(idx, &mut buf);
        for i in 0..n {
            let keep = buf[i];
            // Only look forward: each edge is found from its smaller endpoint.
            for c in keep + 1..k {
                buf[i] = c;
                let other = graph.index_of(&buf);
                if graph.contains_index(other) {
                    let opos = members.binary_search(&other).expect("member present");
                    uf.union(pos, opos);
                }
            }
            buf[i] = keep;
        }
    }
    let labels = uf.into_labeling();
    let mut order: Vec<usize> = Vec::new();
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for (pos, &root) in labels.iter().enumerate() {
        groups
            .entry(root)
            .or_insert_with(|| {
                order.push(root);
                Vec::new()
            })
            .push(members[pos]);
    }
    order
        .into_iter()
        .map(|root| {
            let members = groups.remove(&root).unwrap_or_default();
            let mut seen = vec![vec![false; k as usize]; n];
            for &idx in &members {
                graph.decode_into(idx, &mut buf);
                for (i, &x) in buf.iter().enumerate() {
                    seen[i][x as usize] = true;
                }
            }
            let coord_sets: Vec<Vec<u8>> = seen
                .into_iter()
                .map(|s| (0..k).filter(|&c| s[c as usize]).collect())
                .collect();
            let product: usize = coord_sets.iter().map(Vec::len).product();
            let kind = if members.iter().all(|&m| base.contains_index(m)) {
                BlockKind::Trivial
            } else {
                BlockKind::Nontrivial
            };
            Block {
                is_product: product == members.len(),
                members,
                coord_sets,
                kind,
            }
        })
        .collect()
}

/// Blocks of `ρ`: the connected components of `ρ̃`.
pub fn blocks(rel: &Relation) -> Vec<Block> {
    components(&essential_fill(rel), rel)
}
