use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordered set of unique tokens; a token's id is its position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from tokens in id order. Rejects empty and
    /// duplicate tokens.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::new();
        for (line, token) in tokens.into_iter().enumerate() {
            let token = token.into();
            if token.is_empty() {
                return Err(Error::Malformed {
                    line: line + 1,
                    message: "empty token".into(),
                });
            }
            if vocab.index.contains_key(&token) {
                return Err(Error::Malformed {
                    line: line + 1,
                    message: format!("duplicate token {token:?}"),
                });
            }
            vocab.intern(&token);
        }
        Ok(vocab)
    }

    /// Returns the id of `token`, adding it if unseen.
    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_owned());
        self.index.insert(token.to_owned(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Dense blog ids in first-seen order, with the original identifiers kept
/// alongside.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlogIndex {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl BlogIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut blogs = Self::new();
        for (line, name) in names.into_iter().enumerate() {
            let name = name.into();
            if name.is_empty() || blogs.index.contains_key(&name) {
                return Err(Error::Malformed {
                    line: line + 1,
                    message: format!("empty or duplicate blog id {name:?}"),
                });
            }
            blogs.intern(&name);
        }
        Ok(blogs)
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Ids `0..n` named by their decimal representation.
    pub fn numbered(n: usize) -> Self {
        let mut blogs = Self::new();
        for i in 0..n {
            blogs.intern(&i.to_string());
        }
        blogs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_dense_and_bijective() {
        let v = Vocabulary::from_tokens(["a", "b", "c"]).unwrap();
        for (i, t) in v.tokens().iter().enumerate() {
            assert_eq!(v.id(t), Some(i as u32));
            assert_eq!(v.token(i as u32), t);
        }
    }

    #[test]
    fn rejects_empty_and_duplicate() {
        assert!(Vocabulary::from_tokens(["a", ""]).is_err());
        assert!(Vocabulary::from_tokens(["a", "a"]).is_err());
        assert!(BlogIndex::from_names(["x", "x"]).is_err());
    }
}
