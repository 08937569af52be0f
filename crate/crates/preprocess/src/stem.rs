/// Pre-hook applied to every raw token before counting.
pub trait Stemmer: Send + Sync {
    fn name(&self) -> &'static str;

    fn stem(&self, token: &str) -> String;
}

pub struct Identity;

impl Stemmer for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn stem(&self, token: &str) -> String {
        token.to_string()
    }
}

pub struct Lowercase;

impl Stemmer for Lowercase {
    fn name(&self) -> &'static str {
        "lowercase"
    }

    fn stem(&self, token: &str) -> String {
        token.to_lowercase()
    }
}

type StemmerCtor = fn() -> Box<dyn Stemmer>;

pub const STEMMERS: &[(&str, StemmerCtor)] = &[
    ("identity", || Box::new(Identity)),
    ("lowercase", || Box::new(Lowercase)),
];

pub fn stemmer(name: &str) -> Option<Box<dyn Stemmer>> {
    STEMMERS.iter().find(|(n, _)| *n == name).map(|(_, ctor)| ctor())
}

pub fn known_stemmers() -> String {
    STEMMERS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
}
