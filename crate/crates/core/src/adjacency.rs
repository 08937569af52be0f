use crate::corpus::Corpus;

/// Daily directed adjacency `a[i, j, t]` stored as a dense bitset.
///
/// The diagonal is never set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyTensor {
    n_nodes: usize,
    horizon: u32,
    bits: Vec<u64>,
    n_edges: usize,
}

impl AdjacencyTensor {
    pub fn new(n_nodes: usize, horizon: u32) -> Self {
        let len = n_nodes * n_nodes * horizon as usize;
        AdjacencyTensor {
            n_nodes,
            horizon,
            bits: vec![0; len.div_ceil(64)],
            n_edges: 0,
        }
    }

    /// Collapses the out-links of every post into blog-to-blog daily links.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut adj = Self::new(corpus.n_blogs(), corpus.horizon());
        for post in corpus.posts() {
            for &j in &post.out_links {
                adj.set(post.blog, j, post.day);
            }
        }
        adj
    }

    #[inline]
    fn slot(&self, sender: usize, receiver: usize, day: u32) -> usize {
        debug_assert!(day >= 1 && day <= self.horizon);
        ((day as usize - 1) * self.n_nodes + sender) * self.n_nodes + receiver
    }

    #[inline]
    pub fn get(&self, sender: usize, receiver: usize, day: u32) -> bool {
        let s = self.slot(sender, receiver, day);
        self.bits[s / 64] >> (s % 64) & 1 == 1
    }

    /// Sets a link; self-links are ignored.
    pub fn set(&mut self, sender: usize, receiver: usize, day: u32) {
        if sender == receiver {
            return;
        }
        let s = self.slot(sender, receiver, day);
        let mask = 1u64 << (s % 64);
        if self.bits[s / 64] & mask == 0 {
            self.bits[s / 64] |= mask;
            self.n_edges += 1;
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// All links ordered by `(day, sender, receiver)`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, usize, usize)> + '_ {
        let n = self.n_nodes;
        self.bits.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                let s = wi * 64 + b;
                let receiver = s % n;
                let sender = (s / n) % n;
                let day = (s / (n * n)) as u32 + 1;
                Some((day, sender, receiver))
            })
        })
    }
}
