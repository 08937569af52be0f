//! Text formats.
//!
//! * corpus: `day<TAB>blog<TAB>tok:count,tok:count,...<TAB>link,link,...`
//! * links: `day<TAB>sender<TAB>receiver`
//! * vocabulary / blog list: one entry per line, line number = id
//! * posterior draws: one wide CSV per parameter family
//!
//! Days are positive ordinals or ISO dates (`2012-03-23`). Dates are mapped
//! to ordinals with the earliest date across corpus and links as day 1.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::adjacency::AdjacencyTensor;
use crate::corpus::{Corpus, Post};
use crate::draws::{PosteriorDraws, Snapshot};
use crate::error::{Error, Result};
use crate::vocab::{BlogIndex, Vocabulary};

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// When given, tokens outside it are rejected and ids follow it.
    pub vocabulary: Option<Vocabulary>,
    /// Pre-seeded blog ids; new blogs are appended.
    pub blogs: Option<BlogIndex>,
    /// When given, days beyond it are rejected; otherwise the largest day
    /// seen becomes the horizon.
    pub horizon: Option<u32>,
}

#[derive(Debug, Clone, Copy)]
enum RawDay {
    Ordinal(i64),
    Date(NaiveDate),
}

fn parse_day(field: &str, line: usize) -> Result<RawDay> {
    let field = field.trim();
    if let Ok(n) = field.parse::<i64>() {
        return Ok(RawDay::Ordinal(n));
    }
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .map(RawDay::Date)
        .map_err(|_| Error::Malformed {
            line,
            message: format!("bad day {field:?}"),
        })
}

struct RawPost {
    line: usize,
    day: RawDay,
    blog: String,
    tokens: Vec<(String, u32)>,
    links: Vec<String>,
}

struct RawLink {
    line: usize,
    day: RawDay,
    sender: String,
    receiver: String,
}

fn parse_corpus_lines(text: &str) -> Result<Vec<RawPost>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(Error::Malformed {
                line,
                message: format!("expected 3 or 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let day = parse_day(fields[0], line)?;
        let blog = fields[1].trim().to_string();
        if blog.is_empty() {
            return Err(Error::Malformed {
                line,
                message: "empty blog id".into(),
            });
        }
        let mut tokens = Vec::new();
        for item in fields[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (tok, count) = item.rsplit_once(':').ok_or_else(|| Error::Malformed {
                line,
                message: format!("token entry {item:?} is not token:count"),
            })?;
            let count: u32 = count.parse().map_err(|_| Error::Malformed {
                line,
                message: format!("bad count in {item:?}"),
            })?;
            if tok.is_empty() || count == 0 {
                return Err(Error::Malformed {
                    line,
                    message: format!("bad token entry {item:?}"),
                });
            }
            tokens.push((tok.to_string(), count));
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
            day,
            blog,
            tokens,
            links,
        });
    }
    Ok(out)
}

fn parse_link_lines(text: &str) -> Result<Vec<RawLink>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Malformed {
                line,
                message: format!("expected day<TAB>sender<TAB>receiver, got {} fields", fields.len()),
            });
        }
        out.push(RawLink {
            line,
            day: parse_day(fields[0], line)?,
            sender: fields[1].trim().to_string(),
            receiver: fields[2].trim().to_string(),
        });
    }
    Ok(out)
}

/// Maps raw days to ordinals; all days must use the same notation.
fn resolve_days(days: &[(usize, RawDay)]) -> Result<Vec<i64>> {
    let origin = days
        .iter()
        .filter_map(|(_, d)| match d {
            RawDay::Date(x) => Some(*x),
            _ => None,
        })
        .min();
    days.iter()
        .map(|&(line, d)| match (d, origin) {
            (RawDay::Ordinal(n), None) => Ok(n),
            (RawDay::Date(x), Some(o)) => Ok((x - o).num_days() + 1),
            _ => Err(Error::Malformed {
                line,
                message: "mixed date and ordinal day notation".into(),
            }),
        })
        .collect()
}

/// Parses a corpus and, optionally, a links file sharing its blog ids.
///
/// Blogs get dense ids in first-seen order (corpus first, then links);
/// linked-to blogs that never post become zero-post nodes.
pub fn parse_dataset(
    corpus_text: &str,
    links_text: Option<&str>,
    opts: &LoadOptions,
) -> Result<(Corpus, Option<AdjacencyTensor>)> {
    let raw_posts = parse_corpus_lines(corpus_text)?;
    let raw_links = links_text.map(parse_link_lines).transpose()?;

    let mut all_days: Vec<(usize, RawDay)> = raw_posts.iter().map(|p| (p.line, p.day)).collect();
    if let Some(links) = &raw_links {
        all_days.extend(links.iter().map(|l| (l.line, l.day)));
    }
    let days = resolve_days(&all_days)?;
    let max_day = days.iter().copied().max().unwrap_or(0).max(0);
    let horizon = match opts.horizon {
        Some(h) => h,
        None => u32::try_from(max_day).map_err(|_| Error::Invalid("horizon too large".into()))?,
    };
    for (&(line, _), &day) in all_days.iter().zip(&days) {
        if day < 1 || day > horizon as i64 {
            return Err(Error::DayOutOfRange { line, day, horizon });
        }
    }

    let fixed_vocab = opts.vocabulary.is_some();
    let mut vocab = opts.vocabulary.clone().unwrap_or_default();
    let mut blogs = opts.blogs.clone().unwrap_or_default();

    let mut posts = Vec::with_capacity(raw_posts.len());
    for (raw, &day) in raw_posts.iter().zip(&days) {
        let blog = blogs.intern(&raw.blog);
        let mut counts = Vec::with_capacity(raw.tokens.len());
        for (tok, c) in &raw.tokens {
            let id = if fixed_vocab {
                vocab.id(tok).ok_or_else(|| Error::UnknownToken {
                    line: raw.line,
                    token: tok.clone(),
                })?
            } else {
                vocab.intern(tok)
            };
            counts.push((id, *c));
        }
        let mut links = Vec::with_capacity(raw.links.len());
        for l in &raw.links {
            let j = blogs.intern(l);
            if j == blog {
                return Err(Error::SelfLink {
                    line: raw.line,
                    blog: raw.blog.clone(),
                });
            }
            links.push(j);
        }
        posts.push(Post::new(blog, day as u32, counts).with_links(links));
    }

    let mut link_triples = Vec::new();
    if let Some(raw_links) = &raw_links {
        let offset = raw_posts.len();
        for (k, l) in raw_links.iter().enumerate() {
            let i = blogs.intern(&l.sender);
            let j = blogs.intern(&l.receiver);
            if i == j {
                return Err(Error::SelfLink {
                    line: l.line,
                    blog: l.sender.clone(),
                });
            }
            link_triples.push((days[offset + k] as u32, i, j));
        }
    }

    let corpus = Corpus::new(posts, vocab, blogs, horizon)?;
    let adjacency = raw_links.map(|_| {
        let mut adj = AdjacencyTensor::new(corpus.n_blogs(), horizon);
        for &(t, i, j) in &link_triples {
            adj.set(i, j, t);
        }
        adj
    });
    Ok((corpus, adjacency))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<Corpus> {
    parse_dataset(&read(path)?, None, opts).map(|(c, _)| c)
}

/// Loads a corpus together with a links file. Without a links file the
/// adjacency is derived from the posts' out-links.
pub fn load_dataset(
    corpus: &Path,
    links: Option<&Path>,
    opts: &LoadOptions,
) -> Result<(Corpus, AdjacencyTensor)> {
    let links_text = links.map(read).transpose()?;
    let (corpus, adj) = parse_dataset(&read(corpus)?, links_text.as_deref(), opts)?;
    let adj = adj.unwrap_or_else(|| AdjacencyTensor::from_corpus(&corpus));
    Ok((corpus, adj))
}

pub fn parse_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

pub fn load_vocabulary(path: &Path) -> Result<Vocabulary> {
    Vocabulary::from_tokens(parse_lines(&read(path)?))
}

pub fn load_blogs(path: &Path) -> Result<BlogIndex> {
    BlogIndex::from_names(parse_lines(&read(path)?))
}

pub fn format_list(items: &[String]) -> String {
    let mut s = String::new();
    for it in items {
        s.push_str(it);
        s.push('\n');
    }
    s
}

/// Serializes a corpus; tokens are written in id order.
pub fn format_corpus(corpus: &Corpus) -> String {
    let mut s = String::new();
    let vocab = corpus.vocabulary();
    let blogs = corpus.blogs();
    for post in corpus.posts() {
        let toks: Vec<String> = post
            .tokens
            .iter()
            .map(|&(w, c)| format!("{}:{c}", vocab.token(w)))
            .collect();
        let links: Vec<&str> = post.out_links.iter().map(|&j| blogs.name(j)).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}",
            post.day,
            blogs.name(post.blog),
            toks.join(","),
            links.join(",")
        );
    }
    s
}

pub fn format_links(adj: &AdjacencyTensor, blogs: &BlogIndex) -> String {
    let mut s = String::new();
    for (t, i, j) in adj.edges() {
        let _ = writeln!(s, "{t}\t{}\t{}", blogs.name(i), blogs.name(j));
    }
    s
}

const DRAW_FILES: [&str; 7] = ["z", "b", "pi", "rho", "events", "psi", "theta"];

fn write_table(
    path: &Path,
    header: Vec<String>,
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut h = vec!["iteration".to_string()];
    h.extend(header);
    w.write_record(&h)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn row<T: ToString>(it: usize, xs: impl IntoIterator<Item = T>) -> Vec<String> {
    std::iter::once(it.to_string())
        .chain(xs.into_iter().map(|x| x.to_string()))
        .collect()
}

/// Writes one CSV per parameter family into `dir`.
pub fn write_draws(dir: &Path, draws: &PosteriorDraws) -> Result<()> {
    let snaps = &draws.snapshots;
    let first = snaps.first();
    let n_posts = first.map_or(0, |s| s.z.len());
    let n_blogs = first.map_or(0, |s| s.b.len());
    let k = draws.n_topics;
    let horizon = first.and_then(|s| s.events.first()).map_or(0, |e| e.len());

    write_table(
        &dir.join("z.csv"),
        (0..n_posts).map(|d| format!("d{d}")).collect(),
        snaps.iter().map(|s| row(s.iteration, &s.z)),
    )?;
    write_table(
        &dir.join("b.csv"),
        (0..n_blogs).map(|i| format!("i{i}")).collect(),
        snaps.iter().map(|s| row(s.iteration, &s.b)),
    )?;
    write_table(
        &dir.join("pi.csv"),
        (0..n_blogs)
            .flat_map(|i| (0..k).map(move |c| format!("i{i}_k{c}")))
            .collect(),
        snaps.iter().map(|s| row(s.iteration, s.pi.iter().flatten())),
    )?;
    write_table(
        &dir.join("rho.csv"),
        (0..n_blogs).map(|i| format!("i{i}")).collect(),
        snaps.iter().map(|s| row(s.iteration, &s.rho)),
    )?;
    write_table(
        &dir.join("events.csv"),
        (0..k)
            .flat_map(|c| (1..=horizon).map(move |t| format!("k{c}_t{t}")))
            .collect(),
        snaps
            .iter()
            .map(|s| row(s.iteration, s.events.iter().flatten().map(|&e| e as u8))),
    )?;
    write_table(
        &dir.join("psi.csv"),
        (0..k).map(|c| format!("k{c}")).collect(),
        snaps.iter().map(|s| row(s.iteration, &s.psi)),
    )?;
    write_table(
        &dir.join("theta.csv"),
        (0..5).map(|c| format!("theta{c}")).collect(),
        snaps.iter().map(|s| row(s.iteration, s.theta)),
    )?;
    Ok(())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(Table { header, rows })
}

fn parse_cell<T: std::str::FromStr>(cell: &str, file: &str) -> Result<T> {
    cell.parse().map_err(|_| Error::Invalid(format!("{file}.csv: bad cell {cell:?}")))
}

/// Reads draws written by [`write_draws`].
pub fn read_draws(dir: &Path) -> Result<PosteriorDraws> {
    let mut tables = Vec::new();
    for name in DRAW_FILES {
        tables.push(read_table(&dir.join(format!("{name}.csv")))?);
    }
    let [z, b, pi, rho, events, psi, theta]: [Table; 7] = tables
        .try_into()
        .unwrap_or_else(|_| unreachable!("seven draw files"));
    let k = psi.header.len() - 1;
    let n_rows = theta.rows.len();
    if [&z, &b, &pi, &rho, &events, &psi]
        .iter()
        .any(|t| t.rows.len() != n_rows)
    {
        return Err(Error::Invalid("draw files disagree on snapshot count".into()));
    }
    let horizon = if k == 0 { 0 } else { (events.header.len() - 1) / k };
    let mut draws = PosteriorDraws::new(k);
    for r in 0..n_rows {
        let iteration = parse_cell(&theta.rows[r][0], "theta")?;
        let cells = |t: &Table| t.rows[r][1..].to_vec();
        let parse_vec = |t: &Table, f: &str| -> Result<Vec<f64>> {
            cells(t).iter().map(|c| parse_cell(c, f)).collect()
        };
        let zs: Vec<usize> = cells(&z).iter().map(|c| parse_cell(c, "z")).collect::<Result<_>>()?;
        let bs: Vec<usize> = cells(&b).iter().map(|c| parse_cell(c, "b")).collect::<Result<_>>()?;
        let flat_pi = parse_vec(&pi, "pi")?;
        let ev: Vec<u8> = cells(&events)
            .iter()
            .map(|c| parse_cell(c, "events"))
            .collect::<Result<_>>()?;
        let th = parse_vec(&theta, "theta")?;
        if th.len() != 5 {
            return Err(Error::Invalid("theta.csv must have 5 coefficients".into()));
        }
        draws.snapshots.push(Snapshot {
            iteration,
            z: zs,
            b: bs,
            pi: if k == 0 {
                Vec::new()
            } else {
                flat_pi.chunks(k).map(<[f64]>::to_vec).collect()
            },
            rho: parse_vec(&rho, "rho")?,
            events: if horizon == 0 {
                vec![Vec::new(); k]
            } else {
                ev.chunks(horizon).map(|c| c.iter().map(|&e| e == 1).collect()).collect()
            },
            psi: parse_vec(&psi, "psi")?,
            theta: [th[0], th[1], th[2], th[3], th[4]],
        });
    }
    Ok(draws)
}
