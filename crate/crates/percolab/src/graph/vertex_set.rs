/// Fixed-universe bitset over vertices 0..n with a cached cardinality.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
    n: usize,
    card: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            blocks: vec![0; n.div_ceil(64)],
            n,
            card: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet::new(n);
        for b in &mut s.blocks {
            *b = !0;
        }
        s.clear_tail();
        s.card = n;
        s
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(n: usize, vs: I) -> Self {
        let mut s = VertexSet::new(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    /// Size of the universe, not of the set.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        debug_assert!((v as usize) < self.n);
        self.blocks[v as usize >> 6] >> (v & 63) & 1 == 1
    }

    /// Returns true if `v` was newly inserted.
    #[inline]
    pub fn insert(&mut self, v: u32) -> bool {
        debug_assert!((v as usize) < self.n);
        let block = &mut self.blocks[v as usize >> 6];
        let bit = 1u64 << (v & 63);
        let fresh = *block & bit == 0;
        *block |= bit;
        self.card += fresh as usize;
        fresh
    }

    /// Returns true if `v` was present.
    #[inline]
    pub fn remove(&mut self, v: u32) -> bool {
        debug_assert!((v as usize) < self.n);
        let block = &mut self.blocks[v as usize >> 6];
        let bit = 1u64 << (v & 63);
        let present = *block & bit != 0;
        *block &= !bit;
        self.card -= present as usize;
        present
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        assert_eq!(self.n, other.n, "universe mismatch");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
        self.recount();
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = VertexSet {
            blocks: self.blocks.iter().map(|b| !b).collect(),
            n: self.n,
            card: 0,
        };
        out.clear_tail();
        out.card = self.n - self.card;
        out
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        assert_eq!(self.n, other.n, "universe mismatch");
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &VertexSet) -> bool {
        assert_eq!(self.n, other.n, "universe mismatch");
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let base = (i * 64) as u32;
            BitIter { block }.map(move |b| base + b)
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    fn clear_tail(&mut self) {
        let tail = self.n & 63;
        if tail != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    fn recount(&mut self) {
        self.card = self.blocks.iter().map(|b| b.count_ones() as usize).sum();
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct BitIter {
    block: u64,
}

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.block == 0 {
            return None;
        }
        let b = self.block.trailing_zeros();
        self.block &= self.block - 1;
        Some(b)
    }
}
