use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::vocab::{BlogIndex, Vocabulary};

/// A single time-stamped post.
#[derive(Debug, Clone, PartialEq)]
pub struct Post {
    pub blog: usize,
    /// 1-based day.
    pub day: u32,
    /// Ground-truth or assigned topic, when known.
    pub topic: Option<usize>,
    /// `(token id, count)` pairs sorted by token id, counts ≥ 1.
    pub tokens: Vec<(u32, u32)>,
    pub total_tokens: u32,
    pub out_links: BTreeSet<usize>,
}

impl Post {
    /// Builds a post from unsorted `(token, count)` pairs, merging repeats and
    /// dropping zero counts.
    pub fn new(blog: usize, day: u32, counts: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut tokens: Vec<(u32, u32)> = counts.into_iter().filter(|c| c.1 > 0).collect();
        tokens.sort_unstable_by_key(|c| c.0);
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(tokens.len());
        for (w, c) in tokens {
            match merged.last_mut() {
                Some(last) if last.0 == w => last.1 += c,
                _ => merged.push((w, c)),
            }
        }
        let total_tokens = merged.iter().map(|c| c.1).sum();
        Post {
            blog,
            day,
            topic: None,
            tokens: merged,
            total_tokens,
            out_links: BTreeSet::new(),
        }
    }

    pub fn with_links(mut self, links: impl IntoIterator<Item = usize>) -> Self {
        self.out_links = links.into_iter().collect();
        self
    }

    pub fn with_topic(mut self, topic: usize) -> Self {
        self.topic = Some(topic);
        self
    }
}

/// Validated collection of posts over a fixed vocabulary, blog set and
/// horizon. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    posts: Vec<Post>,
    vocabulary: Vocabulary,
    blogs: BlogIndex,
    horizon: u32,
    /// `daily_counts[(day - 1) * n_blogs + blog]`
    daily_counts: Vec<u32>,
    zero_post: Vec<bool>,
}

impl Corpus {
    pub fn new(
        posts: Vec<Post>,
        vocabulary: Vocabulary,
        blogs: BlogIndex,
        horizon: u32,
    ) -> Result<Self> {
        let n_blogs = blogs.len();
        let mut daily_counts = vec![0u32; horizon as usize * n_blogs];
        let mut zero_post = vec![true; n_blogs];
        for (d, post) in posts.iter().enumerate() {
            if post.day == 0 || post.day > horizon {
                return Err(Error::Invalid(format!(
                    "post {d}: day out of range ({} not in 1..={horizon})",
                    post.day
                )));
            }
            if post.blog >= n_blogs {
                return Err(Error::Invalid(format!("post {d}: unknown blog {}", post.blog)));
            }
            if post.out_links.contains(&post.blog) {
                return Err(Error::Invalid(format!("post {d}: self-link")));
            }
            if let Some(&j) = post.out_links.iter().find(|&&j| j >= n_blogs) {
                return Err(Error::Invalid(format!("post {d}: link to unknown blog {j}")));
            }
            let sum: u32 = post.tokens.iter().map(|c| c.1).sum();
            if sum != post.total_tokens {
                return Err(Error::Invalid(format!("post {d}: token counts do not sum to total")));
            }
            if post.tokens.iter().any(|&(w, c)| w as usize >= vocabulary.len() || c == 0) {
                return Err(Error::Invalid(format!("post {d}: bad token entry")));
            }
            if post.tokens.windows(2).any(|p| p[0].0 >= p[1].0) {
                return Err(Error::Invalid(format!("post {d}: tokens not sorted by id")));
            }
            daily_counts[(post.day as usize - 1) * n_blogs + post.blog] += 1;
            zero_post[post.blog] = false;
        }
        Ok(Corpus {
            posts,
            vocabulary,
            blogs,
            horizon,
            daily_counts,
            zero_post,
        })
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn blogs(&self) -> &BlogIndex {
        &self.blogs
    }

    pub fn n_blogs(&self) -> usize {
        self.blogs.len()
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// `D_ti`: number of posts by `blog` on `day`.
    pub fn daily_count(&self, day: u32, blog: usize) -> u32 {
        self.daily_counts[(day as usize - 1) * self.n_blogs() + blog]
    }

    /// True for blogs that are nodes of the network but never post.
    pub fn is_zero_post(&self, blog: usize) -> bool {
        self.zero_post[blog]
    }

    /// Post indices grouped by day (index `day - 1`), in stored order.
    pub fn posts_by_day(&self) -> Vec<Vec<usize>> {
        let mut by_day = vec![Vec::new(); self.horizon as usize];
        for (d, post) in self.posts.iter().enumerate() {
            by_day[post.day as usize - 1].push(d);
        }
        by_day
    }

    pub fn total_tokens(&self) -> u64 {
        self.posts.iter().map(|p| p.total_tokens as u64).sum()
    }

    /// Ground-truth topics when every post carries one.
    pub fn topics(&self) -> Option<Vec<usize>> {
        self.posts.iter().map(|p| p.topic).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Corpus {
        let vocab = Vocabulary::from_tokens(["a", "b"]).unwrap();
        let blogs = BlogIndex::numbered(3);
        let posts = vec![
            Post::new(0, 1, [(0, 2)]).with_links([1]),
            Post::new(0, 1, [(1, 1), (0, 1)]),
            Post::new(2, 3, []),
        ];
        Corpus::new(posts, vocab, blogs, 3).unwrap()
    }

    #[test]
    fn daily_counts_sum_to_posts() {
        let c = tiny();
        let mut total = 0;
        for t in 1..=c.horizon() {
            for i in 0..c.n_blogs() {
                total += c.daily_count(t, i);
            }
        }
        assert_eq!(total as usize, c.posts().len());
        assert_eq!(c.daily_count(1, 0), 2);
        assert!(c.is_zero_post(1));
    }

    #[test]
    fn post_merges_repeats() {
        let p = Post::new(0, 1, [(3, 1), (1, 2), (3, 4), (2, 0)]);
        assert_eq!(p.tokens, vec![(1, 2), (3, 5)]);
        assert_eq!(p.total_tokens, 7);
    }

    #[test]
    fn rejects_self_link_and_bad_day() {
        let vocab = Vocabulary::from_tokens(["a"]).unwrap();
        let p = Post::new(0, 1, [(0, 1)]).with_links([0]);
        assert!(Corpus::new(vec![p], vocab.clone(), BlogIndex::numbered(1), 1).is_err());
        let p = Post::new(0, 2, [(0, 1)]);
        assert!(Corpus::new(vec![p], vocab, BlogIndex::numbered(1), 1).is_err());
    }
}
