/// State of the sampler at one retained iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    /// Topic of every post.
    pub z: Vec<usize>,
    /// Block of every blog.
    pub b: Vec<usize>,
    /// Topic-interest proportions, one row per blog.
    pub pi: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// `events[k][t - 1]`
    pub events: Vec<Vec<bool>>,
    pub psi: Vec<f64>,
    pub theta: [f64; 5],
}

impl Snapshot {
    /// Checks the internal-consistency invariants of a snapshot.
    pub fn check(&self, n_topics: usize) -> Result<(), String> {
        for (i, row) in self.pi.iter().enumerate() {
            if row.len() != n_topics {
                return Err(format!("pi[{i}] has {} entries", row.len()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 || row.iter().any(|p| *p < 0.0) {
                return Err(format!("pi[{i}] is not on the simplex (sum {s})"));
            }
        }
        if self.events.len() != n_topics || self.psi.len() != n_topics {
            return Err("event state has wrong topic count".into());
        }
        if self.z.iter().any(|&k| k >= n_topics) {
            return Err("topic label out of range".into());
        }
        Ok(())
    }
}

/// Retained snapshots of one chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PosteriorDraws {
    pub n_topics: usize,
    pub snapshots: Vec<Snapshot>,
}

impl PosteriorDraws {
    pub fn new(n_topics: usize) -> Self {
        PosteriorDraws {
            n_topics,
            snapshots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}
