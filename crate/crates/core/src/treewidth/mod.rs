//! Tree decompositions and the dynamic program over nice decompositions.

mod dp;
mod pattern;

use thiserror::Error;

use crate::graph::{Vertex, WeightedDag};

pub use dp::{dp_forget, dp_introduce, dp_join, dp_leaf, dp_tables, solve_treewidth, BagArc, DpTable, TreewidthSolution};
pub use pattern::Pattern;

pub const DEFAULT_WIDTH_CAP: usize = 6;
/// Patterns index their vertices with 32-bit masks, so `2(t + 1) <= 32`.
pub const MAX_WIDTH: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("decomposition has no bags")]
    NoBags,
    #[error("decomposition is for {td} vertices but the graph has {graph}")]
    VertexCountMismatch { td: usize, graph: usize },
    #[error("bag {bag} contains vertex {vertex}, which is out of range")]
    VertexOutOfRange { bag: usize, vertex: Vertex },
    #[error("tree edges do not form a tree over the bags")]
    NotATree,
    #[error("vertex {0} is in no bag")]
    VertexNotCovered(Vertex),
    #[error("arc ({0}, {1}) is in no bag")]
    ArcNotCovered(Vertex, Vertex),
    #[error("connectivity: the bags containing vertex {0} do not form a subtree")]
    Disconnected(Vertex),
    #[error("width {width} exceeds the cap of {cap}")]
    WidthAboveCap { width: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    n: usize,
    bags: Vec<Vec<Vertex>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; nothing else is checked until [`validate_td`].
    pub fn new(n: usize, mut bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        TreeDecomposition { n, bags, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Largest bag size minus one (0 when all bags are empty).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Tree adjacency, or `None` if the edges do not form a spanning tree.
    fn tree(&self) -> Option<Vec<Vec<usize>>> {
        let b = self.bags.len();
        if b == 0 || self.edges.len() != b - 1 {
            return None;
        }
        let mut adj = vec![Vec::new(); b];
        for &(i, j) in &self.edges {
            if i >= b || j >= b || i == j {
                return None;
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; b];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        (count == b).then_some(adj)
    }
}

pub fn validate_td(g: &WeightedDag, td: &TreeDecomposition) -> Result<usize, TdError> {
    let n = g.vertex_count();
    if td.n != n {
        return Err(TdError::VertexCountMismatch { td: td.n, graph: n });
    }
    if td.bags.is_empty() {
        return Err(TdError::NoBags);
    }
    for (i, bag) in td.bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return Err(TdError::VertexOutOfRange { bag: i, vertex: v });
        }
    }
    td.tree().ok_or(TdError::NotATree)?;
    let mut bags_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            bags_of[v].push(i);
        }
    }
    if let Some(v) = (0..n).find(|&v| bags_of[v].is_empty()) {
        return Err(TdError::VertexNotCovered(v));
    }
    for (u, v, _) in g.arcs() {
        let (x, y) = if bags_of[u].len() <= bags_of[v].len() { (u, v) } else { (v, u) };
        if !bags_of[x].iter().any(|&b| td.bags[b].binary_search(&y).is_ok()) {
            return Err(TdError::ArcNotCovered(u, v));
        }
    }
    let mut shared_edges = vec![0usize; n];
    for &(i, j) in &td.edges {
        for &v in &td.bags[i] {
            if td.bags[j].binary_search(&v).is_ok() {
                shared_edges[v] += 1;
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| shared_edges[v] + 1 != bags_of[v].len()) {
        return Err(TdError::Disconnected(v));
    }
    Ok(td.width())
}

/// Width-1 decomposition of a graph whose underlying undirected graph is a forest.
pub fn forest_decomposition(g: &WeightedDag) -> Option<TreeDecomposition> {
    let n = g.vertex_count();
    if g.arc_count() + g.weak_components(&[]).ok()?.len() != n {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for (u, v, _) in g.arcs() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut bags = Vec::with_capacity(n.max(1));
    let mut edges = Vec::new();
    let mut bag_of = vec![usize::MAX; n];
    let mut previous_root: Option<usize> = None;
    for r in 0..n {
        if bag_of[r] != usize::MAX {
            continue;
        }
        bag_of[r] = bags.len();
        bags.push(vec![r]);
        if let Some(p) = previous_root {
            edges.push((p, bag_of[r]));
        }
        previous_root = Some(bag_of[r]);
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if bag_of[y] == usize::MAX {
                    bag_of[y] = bags.len();
                    bags.push(vec![x, y]);
                    edges.push((bag_of[x], bag_of[y]));
                    stack.push(y);
                }
            }
        }
    }
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    Some(TreeDecomposition::new(n, bags, edges))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub children: Vec<usize>,
    pub bag: Vec<Vertex>,
}

/// Nodes are stored children-first; the root is the last node and has an empty bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    width: usize,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn push(&mut self, kind: NiceKind, children: Vec<usize>, bag: Vec<Vertex>) -> usize {
        self.nodes.push(NiceNode { kind, children, bag });
        self.nodes.len() - 1
    }

    fn chain(&mut self, mut top: usize, target: &[Vertex]) -> usize {
        let current = self.nodes[top].bag.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            let bag: Vec<Vertex> = self.nodes[top].bag.iter().copied().filter(|&x| x != v).collect();
            top = self.push(NiceKind::Forget(v), vec![top], bag);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let mut bag = self.nodes[top].bag.clone();
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            top = self.push(NiceKind::Introduce(v), vec![top], bag);
        }
        top
    }

    /// Union of the bags in the subtree rooted at `x`, sorted.
    pub fn subtree_vertices(&self, x: usize) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            out.extend_from_slice(&self.nodes[y].bag);
            stack.extend_from_slice(&self.nodes[y].children);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every node's bag differs from its children's exactly as its kind says.
    pub fn is_well_typed(&self) -> bool {
        let root_ok = self.nodes.last().is_some_and(|r| r.bag.is_empty());
        root_ok
            && self.nodes.iter().enumerate().all(|(i, x)| {
                if x.children.iter().any(|&c| c >= i) || x.bag.windows(2).any(|p| p[0] >= p[1]) {
                    return false;
                }
                let child = |k: usize| &self.nodes[x.children[k]].bag;
                match (x.kind, x.children.len()) {
                    (NiceKind::Leaf, 0) => x.bag.is_empty(),
                    (NiceKind::Introduce(v), 1) => {
                        child(0).binary_search(&v).is_err()
                            && x.bag.len() == child(0).len() + 1
                            && x.bag.iter().all(|&u| u == v || child(0).binary_search(&u).is_ok())
                    }
                    (NiceKind::Forget(v), 1) => {
                        x.bag.binary_search(&v).is_err()
                            && child(0).len() == x.bag.len() + 1
                            && child(0).iter().all(|&u| u == v || x.bag.binary_search(&u).is_ok())
                    }
                    (NiceKind::Join, 2) => child(0) == &x.bag && child(1) == &x.bag,
                    _ => false,
                }
            })
    }
}

/// Roots the tree at bag 0. Along each tree edge the vertices leaving are
/// forgotten first, then the new ones introduced, each phase in ascending
/// vertex order; `r` children are combined by `r - 1` joins.
///
/// With `b` bags of width `t`, the result has at most `(3t + 5) b + t + 1` nodes.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition, TdError> {
    let adj = td.tree().ok_or(TdError::NotATree)?;
    let b = td.bags.len();
    let mut parent = vec![usize::MAX; b];
    let mut order = Vec::with_capacity(b);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut nice = NiceTreeDecomposition {
        nodes: Vec::new(),
        width: td.width(),
    };
    let mut top = vec![usize::MAX; b];
    for &x in order.iter().rev() {
        let mut children: Vec<usize> = adj[x].iter().copied().filter(|&y| y != x && parent[y] == x).collect();
        children.sort_unstable();
        let branches: Vec<usize> = if children.is_empty() {
            let leaf = nice.push(NiceKind::Leaf, Vec::new(), Vec::new());
            vec![nice.chain(leaf, &td.bags[x])]
        } else {
            children.iter().map(|&c| nice.chain(top[c], &td.bags[x])).collect()
        };
        let mut acc = branches[0];
        for &other in &branches[1..] {
            acc = nice.push(NiceKind::Join, vec![acc, other], td.bags[x].clone());
        }
        top[x] = acc;
    }
    nice.chain(top[0], &[]);
    if nice.nodes.last().is_some_and(|r| !r.bag.is_empty()) {
        unreachable!("root chain ends with an empty bag");
    }
    Ok(nice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedDag {
        WeightedDag::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    #[test]
    fn validation() {
        let g = path3();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert_eq!(validate_td(&g, &td), Ok(1));
        let single = TreeDecomposition::new(3, vec![vec![0, 1, 2]], vec![]);
        assert_eq!(validate_td(&g, &single), Ok(2));
        let broken = TreeDecomposition::new(3, vec![vec![0, 1], vec![2], vec![1, 2]], vec![(0, 1), (1, 2)]);
        assert_eq!(validate_td(&g, &broken), Err(TdError::Disconnected(1)));
        assert!(TdError::Disconnected(1).to_string().starts_with("connectivity"));
        let uncovered = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        assert_eq!(validate_td(&g, &uncovered), Err(TdError::ArcNotCovered(1, 2)));
        let missing = TreeDecomposition::new(3, vec![vec![0, 1]], vec![]);
        assert_eq!(validate_td(&g, &missing), Err(TdError::VertexNotCovered(2)));
        let forest = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![]);
        assert_eq!(validate_td(&g, &forest), Err(TdError::NotATree));
    }

    #[test]
    fn nice_chain_for_two_bags() {
        let td = TreeDecomposition::new(2, vec![vec![0], vec![0, 1]], vec![(0, 1)]);
        let nice = make_nice(&td).unwrap();
        let kinds: Vec<NiceKind> = nice.nodes().iter().map(|x| x.kind).collect();
        assert_eq!(
            kinds,
            vec![NiceKind::Leaf, NiceKind::Introduce(0), NiceKind::Introduce(1), NiceKind::Forget(1), NiceKind::Forget(0)]
        );
        assert!(nice.is_well_typed());
    }

    #[test]
    fn single_empty_bag() {
        let td = TreeDecomposition::new(0, vec![vec![]], vec![]);
        let nice = make_nice(&td).unwrap();
        assert_eq!(nice.nodes().len(), 1);
        assert_eq!(nice.nodes()[0].kind, NiceKind::Leaf);
        assert_eq!(nice.root(), 0);
    }

    #[test]
    fn joins_for_branching_bags() {
        let td = TreeDecomposition::new(
            4,
            vec![vec![0, 1], vec![1, 2], vec![0, 3], vec![0, 1]],
            vec![(0, 1), (0, 2), (0, 3)],
        );
        let nice = make_nice(&td).unwrap();
        assert!(nice.is_well_typed());
        assert_eq!(nice.nodes().iter().filter(|x| x.kind == NiceKind::Join).count(), 2);
        assert_eq!(nice.subtree_vertices(nice.root()), vec![0, 1, 2, 3]);
        let t = td.width();
        assert!(nice.nodes().len() <= (3 * t + 5) * td.bags().len() + t + 1);
    }

    #[test]
    fn forest_decompositions() {
        let g = WeightedDag::new(5, [(1, 0, 1), (2, 0, 1), (4, 3, 1)]).unwrap();
        let td = forest_decomposition(&g).unwrap();
        assert_eq!(validate_td(&g, &td), Ok(1));
        let cyclic = WeightedDag::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(forest_decomposition(&cyclic).is_none());
    }
}
