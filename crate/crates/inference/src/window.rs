//! Sliding-window topic count tables.
//!
//! Per-day tables hold, for every `(day, topic)`, the number of posts, the
//! number of tokens and the sparse per-token counts. A dense aggregate over
//! the window `max(1, t - ell) ..= t` of a focus day `t` is maintained
//! incrementally so that scoring a post is a plain array lookup.

use std::collections::HashMap;

use dtn_core::{Corpus, Post};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowCounts {
    n_topics: usize,
    vocab_size: usize,
    ell: u32,
    horizon: u32,
    day_posts: Vec<u32>,
    day_tokens: Vec<u64>,
    day_words: Vec<HashMap<u32, u32>>,
    focus: Option<u32>,
    win_posts: Vec<u32>,
    win_tokens: Vec<u64>,
    win_words: Vec<u32>,
}

impl WindowCounts {
    pub fn new(n_topics: usize, vocab_size: usize, ell: u32, horizon: u32) -> Self {
        let cells = n_topics * horizon as usize;
        WindowCounts {
            n_topics,
            vocab_size,
            ell,
            horizon,
            day_posts: vec![0; cells],
            day_tokens: vec![0; cells],
            day_words: vec![HashMap::new(); cells],
            focus: None,
            win_posts: vec![0; n_topics],
            win_tokens: vec![0; n_topics],
            win_words: vec![0; n_topics * vocab_size],
        }
    }

    /// Counts rebuilt from scratch for the assignments `z` (`None` means the
    /// post is unassigned), focused on `focus`.
    pub fn recount(
        corpus: &Corpus,
        z: &[Option<usize>],
        n_topics: usize,
        ell: u32,
        focus: Option<u32>,
    ) -> Self {
        let mut counts = WindowCounts::new(n_topics, corpus.vocabulary().len(), ell, corpus.horizon());
        for (post, k) in corpus.posts().iter().zip(z) {
            if let Some(k) = *k {
                counts.add(post, k);
            }
        }
        if let Some(t) = focus {
            counts.focus(t);
        }
        counts
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[inline]
    fn cell(&self, day: u32, k: usize) -> usize {
        (day as usize - 1) * self.n_topics + k
    }

    /// Days covered by the window of day `t`.
    pub fn window_of(&self, t: u32) -> (u32, u32) {
        (t.saturating_sub(self.ell).max(1), t)
    }

    fn in_window(&self, day: u32) -> bool {
        match self.focus {
            Some(t) => {
                let (lo, hi) = self.window_of(t);
                (lo..=hi).contains(&day)
            }
            None => false,
        }
    }

    pub fn add(&mut self, post: &Post, k: usize) {
        let c = self.cell(post.day, k);
        self.day_posts[c] += 1;
        self.day_tokens[c] += post.total_tokens as u64;
        let words = &mut self.day_words[c];
        for &(w, n) in &post.tokens {
            *words.entry(w).or_insert(0) += n;
        }
        if self.in_window(post.day) {
            self.win_posts[k] += 1;
            self.win_tokens[k] += post.total_tokens as u64;
            let row = &mut self.win_words[k * self.vocab_size..(k + 1) * self.vocab_size];
            for &(w, n) in &post.tokens {
                row[w as usize] += n;
            }
        }
    }

    /// Removes a post previously added under topic `k`.
    ///
    /// Panics if the counts would go negative; that can only happen when the
    /// caller's bookkeeping is broken.
    pub fn remove(&mut self, post: &Post, k: usize) {
        let c = self.cell(post.day, k);
        self.day_posts[c] = self.day_posts[c]
            .checked_sub(1)
            .expect("post count underflow");
        self.day_tokens[c] = self.day_tokens[c]
            .checked_sub(post.total_tokens as u64)
            .expect("token count underflow");
        let words = &mut self.day_words[c];
        for &(w, n) in &post.tokens {
            let entry = words.get_mut(&w).expect("token count underflow");
            *entry = entry.checked_sub(n).expect("token count underflow");
            if *entry == 0 {
                words.remove(&w);
            }
        }
        if self.in_window(post.day) {
            self.win_posts[k] -= 1;
            self.win_tokens[k] -= post.total_tokens as u64;
            let row = &mut self.win_words[k * self.vocab_size..(k + 1) * self.vocab_size];
            for &(w, n) in &post.tokens {
                row[w as usize] -= n;
            }
        }
    }

    fn apply_day(&mut self, day: u32, sign: i64) {
        for k in 0..self.n_topics {
            let c = self.cell(day, k);
            let posts = self.day_posts[c] as i64 * sign;
            let tokens = self.day_tokens[c] as i64 * sign;
            self.win_posts[k] = (self.win_posts[k] as i64 + posts) as u32;
            self.win_tokens[k] = (self.win_tokens[k] as i64 + tokens) as u64;
            let base = k * self.vocab_size;
            for (&w, &n) in &self.day_words[c] {
                let slot = &mut self.win_words[base + w as usize];
                *slot = (*slot as i64 + n as i64 * sign) as u32;
            }
        }
    }

    /// Moves the dense window to day `t`, adding and dropping only the days
    /// that enter or leave it.
    pub fn focus(&mut self, t: u32) {
        assert!(t >= 1 && t <= self.horizon, "focus day {t} outside 1..={}", self.horizon);
        let (new_lo, new_hi) = self.window_of(t);
        match self.focus {
            Some(old) if old == t => return,
            Some(old) => {
                let (old_lo, old_hi) = self.window_of(old);
                for d in old_lo..=old_hi {
                    if d < new_lo || d > new_hi {
                        self.apply_day(d, -1);
                    }
                }
                for d in new_lo..=new_hi {
                    if d < old_lo || d > old_hi {
                        self.apply_day(d, 1);
                    }
                }
            }
            None => {
                for d in new_lo..=new_hi {
                    self.apply_day(d, 1);
                }
            }
        }
        self.focus = Some(t);
    }

    pub fn focused_day(&self) -> Option<u32> {
        self.focus
    }

    /// `m*_k`: posts on topic `k` within the focus window.
    #[inline]
    pub fn window_posts(&self, k: usize) -> u32 {
        self.win_posts[k]
    }

    /// `N*_k`: tokens on topic `k` within the focus window.
    #[inline]
    pub fn window_tokens(&self, k: usize) -> u64 {
        self.win_tokens[k]
    }

    /// `N*^w_k`
    #[inline]
    pub fn window_word(&self, k: usize, w: u32) -> u32 {
        self.win_words[k * self.vocab_size + w as usize]
    }

    /// Dense row of `N*^w_k` over the vocabulary.
    pub fn window_row(&self, k: usize) -> &[u32] {
        &self.win_words[k * self.vocab_size..(k + 1) * self.vocab_size]
    }

    /// Assigned posts within the focus window, over all topics.
    pub fn window_total_posts(&self) -> u32 {
        self.win_posts.iter().sum()
    }

    pub fn day_posts(&self, day: u32, k: usize) -> u32 {
        self.day_posts[self.cell(day, k)]
    }

    pub fn day_tokens(&self, day: u32, k: usize) -> u64 {
        self.day_tokens[self.cell(day, k)]
    }

    pub fn day_word(&self, day: u32, k: usize, w: u32) -> u32 {
        self.day_words[self.cell(day, k)].get(&w).copied().unwrap_or(0)
    }

    /// Compares against a recount from `z`; returns a description of the
    /// first mismatch.
    pub fn audit(&self, corpus: &Corpus, z: &[Option<usize>]) -> Result<(), String> {
        let fresh = WindowCounts::recount(corpus, z, self.n_topics, self.ell, self.focus);
        if fresh == *self {
            return Ok(());
        }
        for t in 1..=self.horizon {
            for k in 0..self.n_topics {
                let c = self.cell(t, k);
                if self.day_posts[c] != fresh.day_posts[c]
                    || self.day_tokens[c] != fresh.day_tokens[c]
                    || self.day_words[c] != fresh.day_words[c]
                {
                    return Err(format!(
                        "day {t} topic {k}: have {} posts / {} tokens, recount gives {} / {}",
                        self.day_posts[c], self.day_tokens[c], fresh.day_posts[c], fresh.day_tokens[c]
                    ));
                }
            }
        }
        Err(format!("window aggregate for focus {:?} differs from recount", self.focus))
    }
}
