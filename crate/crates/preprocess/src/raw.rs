use crate::error::{PreprocessError, Result};

/// One line of raw input: `day<TAB>blog<TAB>space-separated tokens<TAB>links`.
/// Days and blog ids are kept verbatim; the links field is comma-separated
/// and may be absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPost {
    pub line: usize,
    pub day: String,
    pub blog: String,
    pub tokens: Vec<String>,
    pub links: Vec<String>,
}

pub fn parse_raw(text: &str) -> Result<Vec<RawPost>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(PreprocessError::Malformed {
                line,
                message: format!("expected 3 or 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let (day, blog) = (fields[0].trim(), fields[1].trim());
        if day.is_empty() || blog.is_empty() {
            return Err(PreprocessError::Malformed {
                line,
                message: "empty day or blog id".into(),
            });
        }
        let tokens: Vec<String> = fields[2].split_whitespace().map(String::from).collect();
        if let Some(bad) = tokens.iter().find(|t| t.contains(',')) {
            return Err(PreprocessError::Malformed {
                line,
                message: format!("token {bad:?} contains a comma"),
            });
        }
        let links = fields
            .get(3)
            .map(|f| {
                f.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default();
        out.push(RawPost {
            line,
            day: day.to_string(),
            blog: blog.to_string(),
            tokens,
            links,
        });
    }
    Ok(out)
}
