use crate::graph::Vertex;

/// A DP state `(R, G, P)` at a tree-decomposition node.
///
/// `verts` lists the vertices of `G` in ascending order and every mask below is
/// over positions in `verts`: `bag` marks the bag vertices, `kept[i]` and
/// `reach[i]` are the out-neighbourhoods of vertex `i` in `R` and `G`, and
/// `parts` holds the blocks of `P` in ascending mask order. Sorting both lists
/// makes structural equality coincide with equality of patterns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub(crate) verts: Vec<u32>,
    pub(crate) bag: u32,
    pub(crate) kept: Vec<u32>,
    pub(crate) reach: Vec<u32>,
    pub(crate) parts: Vec<u32>,
}

pub(crate) fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            i
        })
    })
}

/// Packs the bits of `mask` found at the positions set in `keep`.
pub(crate) fn squeeze(mask: u32, keep: u32) -> u32 {
    bits(keep)
        .enumerate()
        .fold(0, |acc, (j, i)| acc | ((mask >> i & 1) << j))
}

/// Opens a zero bit at position `at`.
pub(crate) fn spread(mask: u32, at: usize) -> u32 {
    let low = (1u32 << at) - 1;
    (mask & low) | ((mask & !low) << 1)
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern {
            verts: Vec::new(),
            bag: 0,
            kept: Vec::new(),
            reach: Vec::new(),
            parts: Vec::new(),
        }
    }

    /// Builds a pattern from explicit vertex lists. `reach_arcs` must already
    /// be transitively closed.
    pub fn from_parts(
        bag: &[Vertex],
        external: &[Vertex],
        kept_arcs: &[(Vertex, Vertex)],
        reach_arcs: &[(Vertex, Vertex)],
        partition: &[Vec<Vertex>],
    ) -> Self {
        let mut verts: Vec<u32> = bag.iter().chain(external).map(|&v| v as u32).collect();
        verts.sort_unstable();
        verts.dedup();
        let pos = |v: Vertex| verts.binary_search(&(v as u32)).expect("vertex of the pattern");
        let mut p = Pattern {
            bag: bag.iter().fold(0, |m, &v| m | 1 << pos(v)),
            kept: vec![0; verts.len()],
            reach: vec![0; verts.len()],
            parts: partition.iter().map(|b| b.iter().fold(0, |m, &v| m | 1 << pos(v))).collect(),
            verts: verts.clone(),
        };
        for &(u, v) in kept_arcs {
            p.kept[pos(u)] |= 1 << pos(v);
        }
        for &(u, v) in reach_arcs {
            p.reach[pos(u)] |= 1 << pos(v);
        }
        p.parts.sort_unstable();
        p
    }

    pub(crate) fn all(&self) -> u32 {
        ((1u64 << self.verts.len()) - 1) as u32
    }

    pub(crate) fn external(&self) -> u32 {
        self.all() & !self.bag
    }

    pub(crate) fn index(&self, v: Vertex) -> Option<usize> {
        self.verts.binary_search(&(v as u32)).ok()
    }

    pub(crate) fn in_neighbours(&self, i: usize) -> u32 {
        self.reach
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >> i & 1 == 1)
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    pub(crate) fn part_of(&self, i: usize) -> usize {
        self.parts
            .iter()
            .position(|&p| p >> i & 1 == 1)
            .expect("every vertex lies in a part")
    }

    /// Removes the vertices in `drop`, re-indexing all masks; empty parts vanish.
    pub(crate) fn without(&self, drop: u32) -> Pattern {
        let keep = self.all() & !drop;
        let rows = |rows: &[u32]| -> Vec<u32> { bits(keep).map(|i| squeeze(rows[i], keep)).collect() };
        let mut parts: Vec<u32> = self
            .parts
            .iter()
            .map(|&p| squeeze(p, keep))
            .filter(|&p| p != 0)
            .collect();
        parts.sort_unstable();
        Pattern {
            verts: bits(keep).map(|i| self.verts[i]).collect(),
            bag: squeeze(self.bag, keep),
            kept: rows(&self.kept),
            reach: rows(&self.reach),
            parts,
        }
    }

    /// Adds `v` as an isolated bag vertex outside every part; returns its position.
    pub(crate) fn with_vertex(&self, v: Vertex) -> (Pattern, usize) {
        let at = self.verts.binary_search(&(v as u32)).expect_err("vertex already present");
        let mut verts = self.verts.clone();
        verts.insert(at, v as u32);
        let rows = |rows: &[u32]| -> Vec<u32> {
            let mut out: Vec<u32> = rows.iter().map(|&r| spread(r, at)).collect();
            out.insert(at, 0);
            out
        };
        let p = Pattern {
            verts,
            bag: spread(self.bag, at) | 1 << at,
            kept: rows(&self.kept),
            reach: rows(&self.reach),
            parts: self.parts.iter().map(|&p| spread(p, at)).collect(),
        };
        (p, at)
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.verts.iter().map(|&v| v as usize).collect()
    }

    pub fn bag_vertices(&self) -> Vec<Vertex> {
        bits(self.bag).map(|i| self.verts[i] as usize).collect()
    }

    pub fn external_vertices(&self) -> Vec<Vertex> {
        bits(self.external()).map(|i| self.verts[i] as usize).collect()
    }

    fn arcs_of(&self, rows: &[u32]) -> Vec<(Vertex, Vertex)> {
        rows.iter()
            .enumerate()
            .flat_map(|(i, &r)| bits(r).map(move |j| (self.verts[i] as usize, self.verts[j] as usize)))
            .collect()
    }

    /// Arcs of `R`, sorted.
    pub fn kept_arcs(&self) -> Vec<(Vertex, Vertex)> {
        self.arcs_of(&self.kept)
    }

    /// Arcs of `G`, sorted.
    pub fn reach_arcs(&self) -> Vec<(Vertex, Vertex)> {
        self.arcs_of(&self.reach)
    }

    /// Blocks of `P`, each sorted, ordered by smallest member.
    pub fn partition(&self) -> Vec<Vec<Vertex>> {
        let mut out: Vec<Vec<Vertex>> = self
            .parts
            .iter()
            .map(|&p| bits(p).map(|i| self.verts[i] as usize).collect())
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks the structural requirements on `(R, G, P)`.
    pub fn is_well_formed(&self) -> bool {
        let all = self.all();
        let ext = self.external();
        let r_inside_bag = bits(all).all(|i| self.kept[i] & !self.bag == 0 && (self.bag >> i & 1 == 1 || self.kept[i] == 0));
        let closed = bits(all).all(|i| {
            self.reach[i] >> i & 1 == 0 && bits(self.reach[i]).all(|j| self.reach[j] & !self.reach[i] == 0)
        });
        let ext_ok = bits(ext).all(|i| self.reach[i] == 0 && self.in_neighbours(i) != 0) && ext.count_ones() <= self.bag.count_ones();
        let cover = self.parts.iter().fold(0u32, |m, &p| m | p);
        let disjoint = self.parts.iter().map(|p| p.count_ones()).sum::<u32>() == all.count_ones();
        let parts_ok = cover == all
            && disjoint
            && self.parts.iter().all(|&p| p != 0 && (p & ext).count_ones() <= 1)
            && bits(all).all(|i| {
                let p = self.parts[self.part_of(i)];
                self.reach[i] & !p == 0
            });
        r_inside_bag && closed && ext_ok && parts_ok
    }
}
