//! Tweet archives to retweet networks, role coding, descriptive tables and
//! inter-coder reliability.
//!
//! Tweet input is JSON lines (one object per line with `id`, `created_at`,
//! `author`, `followers`, `text`) or CSV with header
//! `id,created_at,author,followers,text`. Timestamps may be RFC 3339,
//! `YYYY-MM-DD HH:MM:SS` (UTC) or the classic API form
//! `Tue Jun 28 14:03:11 +0000 2011`.
//!
//! Edges point from the retweeting account to the original author.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, NodeTable, Role};
use crate::io::{create, open, IoError};

/// Longest screen name accepted after a retweet marker.
pub const MAX_SCREEN_NAME: usize = 15;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: unrecognized timestamp {value:?}")]
    UnknownTimestampFormat { line: usize, value: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("role file line {line}: {message}")]
    Role { line: usize, message: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line() as usize);
        IngestError::Parse {
            line,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub author: String,
    pub followers: u64,
    pub text: String,
}

#[derive(Deserialize)]
struct RawTweet {
    #[serde(deserialize_with = "id_string")]
    id: String,
    created_at: String,
    author: String,
    #[serde(default)]
    followers: u64,
    text: String,
}

// ids appear both as strings and as bare numbers in archives
fn id_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        S(String),
        N(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::S(s) => s,
        Id::N(n) => n.to_string(),
    })
}

/// Parses a timestamp in any accepted format.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        return Some(t.and_utc());
    }
    DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y")
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

fn finish(raw: RawTweet, line: usize) -> Result<TweetRecord, IngestError> {
    let created_at =
        parse_timestamp(&raw.created_at).ok_or_else(|| IngestError::UnknownTimestampFormat {
            line,
            value: raw.created_at.clone(),
        })?;
    Ok(TweetRecord {
        id: raw.id,
        created_at,
        author: raw.author,
        followers: raw.followers,
        text: raw.text,
    })
}

/// Reads JSON-lines tweets. Blank lines are skipped; line numbers are 1-based.
pub fn parse_tweets_jsonl<R: Read>(reader: R) -> Result<Vec<TweetRecord>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(IoError::from)?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawTweet = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push(finish(raw, line_no)?);
    }
    Ok(out)
}

/// Reads CSV tweets; line numbers count the header as line 1.
pub fn parse_tweets_csv<R: Read>(reader: R) -> Result<Vec<TweetRecord>, IngestError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let raw: RawTweet = rec.deserialize(Some(&headers)).map_err(|e| IngestError::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(finish(raw, line)?);
    }
    Ok(out)
}

/// Reads tweets from a file: `.csv` as CSV, anything else as JSON lines.
pub fn read_tweets(path: &Path) -> Result<Vec<TweetRecord>, IngestError> {
    let file = open(path)?;
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_tweets_csv(file)
    } else {
        parse_tweets_jsonl(file)
    }
}

/// Sorts by timestamp, then id.
pub fn sort_records(records: &mut [TweetRecord]) {
    records.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
}

/// Tweet ids to exclude, one per line; `#` starts a comment.
pub fn read_exclusions(path: &Path) -> Result<HashSet<String>, IngestError> {
    let file = open(path)?;
    let mut out = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(IoError::from)?;
        let id = line.split('#').next().unwrap_or("").trim();
        if !id.is_empty() {
            out.insert(id.to_string());
        }
    }
    Ok(out)
}

/// Valid screen name: 1 to 15 ASCII letters, digits or underscores.
pub fn is_valid_screen_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= MAX_SCREEN_NAME
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

const MARKERS: [&str; 3] = ["rt @", "mt @", "retweet @"];

/// Screen name credited by the first retweet marker (`RT @`, `MT @`,
/// `retweet @`, any case) in `text`. A marker counts only at the start of the
/// text or after a non-alphanumeric character. Returns `None` without a
/// marker or when the name after it is empty or longer than 15 characters.
pub fn parse_retweet(text: &str) -> Option<String> {
    let lower = text.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut best: Option<(usize, usize)> = None;
    for m in MARKERS {
        let mut from = 0;
        while let Some(off) = lower[from..].find(m) {
            let pos = from + off;
            let boundary = pos == 0 || !bytes[pos - 1].is_ascii_alphanumeric();
            if boundary {
                if best.is_none_or(|(p, _)| pos < p) {
                    best = Some((pos, m.len()));
                }
                break;
            }
            from = pos + 1;
        }
    }
    let (pos, len) = best?;
    let rest = &text[pos + len..];
    let end = rest
        .bytes()
        .position(|b| !(b.is_ascii_alphanumeric() || b == b'_'))
        .unwrap_or(rest.len());
    let name = &rest[..end];
    is_valid_screen_name(name).then(|| name.to_string())
}

/// One retained retweet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRetweet {
    pub tweet_id: String,
    pub created_at: DateTime<Utc>,
    pub retweeter: String,
    pub author: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetweetNetwork {
    pub graph: DirectedGraph,
    pub nodes: NodeTable,
    pub log: Vec<RawRetweet>,
}

/// Builds the network from the first `limit` retweets of time-ordered
/// `records`. Self-retweets and excluded ids are skipped and do not count
/// toward the limit. Screen names match case-insensitively; a user's
/// follower count comes from their earliest record, or 0 if they never
/// posted one.
pub fn build_network(records: &[TweetRecord], limit: usize, exclude: &HashSet<String>) -> RetweetNetwork {
    let mut first_followers: HashMap<String, u64> = HashMap::new();
    for r in records {
        first_followers
            .entry(r.author.to_ascii_lowercase())
            .or_insert(r.followers);
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut nodes = NodeTable::default();
    let mut log = Vec::new();
    let mut edges = Vec::new();
    let mut node_of = |name: &str, nodes: &mut NodeTable| -> usize {
        let key = name.to_ascii_lowercase();
        if let Some(&v) = index.get(&key) {
            return v;
        }
        let followers = first_followers.get(&key).copied().unwrap_or(0);
        let v = nodes.push(name.to_string(), Role::Ordinary, followers);
        index.insert(key, v);
        v
    };
    for r in records {
        if log.len() >= limit {
            break;
        }
        if exclude.contains(&r.id) {
            continue;
        }
        let Some(author) = parse_retweet(&r.text) else {
            continue;
        };
        if author.eq_ignore_ascii_case(&r.author) {
            continue;
        }
        let source = node_of(&r.author, &mut nodes);
        let target = node_of(&author, &mut nodes);
        edges.push((source, target));
        log.push(RawRetweet {
            tweet_id: r.id.clone(),
            created_at: r.created_at,
            retweeter: nodes.screen_names[source].clone(),
            author: nodes.screen_names[target].clone(),
            source,
            target,
        });
    }
    let graph = DirectedGraph::from_edge_list(&edges, nodes.len())
        .expect("self-retweets are filtered and ids are dense");
    RetweetNetwork { graph, nodes, log }
}

/// Writes the raw edge log as CSV.
pub fn write_edge_log<W: Write>(log: &[RawRetweet], writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in log {
        w.serialize(r)?;
    }
    w.flush().map_err(IoError::from)?;
    Ok(())
}

pub fn save_edge_log(log: &[RawRetweet], path: &Path) -> Result<(), IngestError> {
    write_edge_log(log, create(path)?)
}

/// Role codings from CSV `screen_name,role`, keyed by lower-case name.
pub fn parse_roles<R: Read>(reader: R) -> Result<HashMap<String, Role>, IngestError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let (Some(name_col), Some(role_col)) = (col("screen_name"), col("role")) else {
        return Err(IngestError::Role {
            line: 1,
            message: "header must contain screen_name and role".into(),
        });
    };
    let mut out = HashMap::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = idx + 2;
        let name = rec.get(name_col).unwrap_or("").trim();
        let role: Role = rec
            .get(role_col)
            .unwrap_or("")
            .parse()
            .map_err(|e: crate::graph::UnknownRole| IngestError::Role {
                line,
                message: e.to_string(),
            })?;
        out.insert(name.to_ascii_lowercase(), role);
    }
    Ok(out)
}

pub fn read_roles(path: &Path) -> Result<HashMap<String, Role>, IngestError> {
    parse_roles(open(path)?)
}

/// Assigns coded roles; accounts missing from `roles` stay ordinary. Returns
/// the screen names that had no coding.
pub fn apply_roles(nodes: &mut NodeTable, roles: &HashMap<String, Role>) -> Vec<String> {
    let mut missing = Vec::new();
    for (name, role) in nodes.screen_names.iter().zip(nodes.roles.iter_mut()) {
        match roles.get(&name.to_ascii_lowercase()) {
            Some(r) => *role = *r,
            None => {
                *role = Role::Ordinary;
                missing.push(name.clone());
            }
        }
    }
    if !missing.is_empty() {
        log::warn!("{} accounts have no role coding; treated as ordinary", missing.len());
    }
    missing
}

/// Mean and sample standard deviation (n − 1 denominator).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// `None` with fewer than two values.
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.len() > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        });
        Some(Self { mean, sd })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoleDegrees {
    pub role: Role,
    pub count: usize,
    pub indegree: Option<MeanSd>,
    pub outdegree: Option<MeanSd>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    /// Raw retweets, duplicates included.
    pub edges: usize,
    pub unique_dyads: usize,
    pub users: usize,
    pub role_counts: BTreeMap<Role, usize>,
    pub centralization: f64,
    pub max_indegree: usize,
    pub max_outdegree: usize,
    pub degrees_by_role: Vec<RoleDegrees>,
    pub sd_convention: String,
}

/// Table-style descriptives. `raw_edges` is the raw retweet count (the edge
/// log length); pass the graph's edge count when no log exists.
pub fn describe(g: &DirectedGraph, nodes: &NodeTable, raw_edges: usize) -> DescriptiveStats {
    let n = g.node_count();
    let role_counts: BTreeMap<Role, usize> = Role::ALL.iter().map(|r| (*r, nodes.role_count(*r))).collect();
    let degrees_by_role = [Role::Organization, Role::Leader, Role::Influential, Role::Ordinary]
        .iter()
        .map(|&role| {
            let members: Vec<usize> = (0..n).filter(|&v| nodes.roles[v] == role).collect();
            let ins: Vec<f64> = members.iter().map(|&v| g.in_degree(v) as f64).collect();
            let outs: Vec<f64> = members.iter().map(|&v| g.out_degree(v) as f64).collect();
            RoleDegrees {
                role,
                count: members.len(),
                indegree: MeanSd::of(&ins),
                outdegree: MeanSd::of(&outs),
            }
        })
        .collect();
    DescriptiveStats {
        edges: raw_edges,
        unique_dyads: g.edge_count(),
        users: n,
        role_counts,
        centralization: g.degree_centralization().unwrap_or(0.0),
        max_indegree: g.max_in_degree(),
        max_outdegree: g.max_out_degree(),
        degrees_by_role,
        sd_convention: "sample standard deviation (n - 1 denominator)".into(),
    }
}

fn thousands(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn mean_sd_cell(m: &Option<MeanSd>) -> String {
    match m {
        None => "N/A".into(),
        Some(MeanSd { mean, sd: Some(sd) }) => format!("{mean:.2} ({sd:.2})"),
        Some(MeanSd { mean, sd: None }) => format!("{mean:.2} (NA)"),
    }
}

impl DescriptiveStats {
    /// Text rendering: network descriptives, then per-role mean (SD) degrees.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let count = |r: Role| match self.role_counts.get(&r).copied().unwrap_or(0) {
            0 => "N/A".to_string(),
            c => thousands(c),
        };
        let rows: Vec<(String, String)> = vec![
            ("Edges".into(), thousands(self.edges)),
            ("Unique dyads".into(), thousands(self.unique_dyads)),
            ("Users".into(), thousands(self.users)),
            ("Number of accounts".into(), String::new()),
            ("  Organizations".into(), count(Role::Organization)),
            ("  Leaders".into(), count(Role::Leader)),
            ("  Ordinary users".into(), count(Role::Ordinary)),
            ("  Influential users".into(), count(Role::Influential)),
            ("Centralization (degree)".into(), format!("{:.3}", self.centralization)),
            ("Max. indegree".into(), self.max_indegree.to_string()),
            ("Max. outdegree".into(), self.max_outdegree.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<30}{v:>12}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "Average degree by role, mean (SD)");
        for rd in &self.degrees_by_role {
            let label = rd.role.plural_label();
            let (ind, outd) = if rd.count == 0 {
                ("N/A".to_string(), "N/A".to_string())
            } else {
                (mean_sd_cell(&rd.indegree), mean_sd_cell(&rd.outdegree))
            };
            let _ = writeln!(s, "{:<30}{:>16}", format!("{label}' indegree"), ind);
            let _ = writeln!(s, "{:<30}{:>16}", format!("{label}' outdegree"), outd);
        }
        let _ = writeln!(s, "SD: {}", self.sd_convention);
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptives serialize")
    }
}

/// Nominal Krippendorff's alpha for two coders. Items with a missing code
/// from either coder are not pairable and are ignored. May be negative.
pub fn krippendorff_alpha<K: Ord + Clone>(coder_a: &[Option<K>], coder_b: &[Option<K>]) -> Result<f64, IngestError> {
    if coder_a.len() != coder_b.len() {
        return Err(IngestError::InsufficientData(format!(
            "coders rated {} and {} items",
            coder_a.len(),
            coder_b.len()
        )));
    }
    let pairs: Vec<(&K, &K)> = coder_a
        .iter()
        .zip(coder_b)
        .filter_map(|(a, b)| Some((a.as_ref()?, b.as_ref()?)))
        .collect();
    if pairs.len() < 2 {
        return Err(IngestError::InsufficientData(format!(
            "{} pairable items; at least 2 needed",
            pairs.len()
        )));
    }
    // coincidence matrix: each unit with two values contributes both orderings
    let mut coincidences: BTreeMap<(&K, &K), f64> = BTreeMap::new();
    let mut marginals: BTreeMap<&K, f64> = BTreeMap::new();
    for &(a, b) in &pairs {
        *coincidences.entry((a, b)).or_default() += 1.0;
        *coincidences.entry((b, a)).or_default() += 1.0;
        *marginals.entry(a).or_default() += 1.0;
        *marginals.entry(b).or_default() += 1.0;
    }
    let total = 2.0 * pairs.len() as f64;
    let observed: f64 = coincidences
        .iter()
        .filter(|((c, k), _)| c != k)
        .map(|(_, v)| *v)
        .sum();
    let sum_sq: f64 = marginals.values().map(|v| v * v).sum();
    let expected_pairs = total * total - sum_sq;
    if expected_pairs == 0.0 {
        return Err(IngestError::InsufficientData(
            "all codes fall in one category; alpha is undefined".into(),
        ));
    }
    Ok(1.0 - (total - 1.0) * observed / expected_pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retweet_markers() {
        assert_eq!(parse_retweet("RT @confech: todos a la marcha #YoMarchoEl28").as_deref(), Some("confech"));
        assert_eq!(parse_retweet("gran marcha hoy #FuerzaEstudiantes"), None);
        assert_eq!(parse_retweet("MT @User_123 fuerza!").as_deref(), Some("User_123"));
        assert_eq!(parse_retweet("vamos retweet @camila_v ahora").as_deref(), Some("camila_v"));
        assert_eq!(parse_retweet("rt @a rt @b").as_deref(), Some("a"));
        // earliest marker wins regardless of kind
        assert_eq!(parse_retweet("MT @first RT @second").as_deref(), Some("first"));
        // no boundary: "smart @x" is not a marker
        assert_eq!(parse_retweet("smart @x"), None);
        assert_eq!(parse_retweet("RT @"), None);
        assert_eq!(parse_retweet("RT @abcdefghijklmnop long"), None);
        assert_eq!(parse_retweet("RT @abcdefghijklmno").as_deref(), Some("abcdefghijklmno"));
        assert_eq!(parse_retweet("(RT @x)").as_deref(), Some("x"));
    }

    #[test]
    fn timestamps() {
        let a = parse_timestamp("2011-06-28T14:03:11Z").unwrap();
        let b = parse_timestamp("2011-06-28 14:03:11").unwrap();
        let c = parse_timestamp("Tue Jun 28 14:03:11 +0000 2011").unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(parse_timestamp("28/06/2011").is_none());
    }

    #[test]
    fn bad_timestamp_reports_line() {
        let src = "{\"id\":\"1\",\"created_at\":\"2011-06-28 10:00:00\",\"author\":\"a\",\"followers\":1,\"text\":\"x\"}\n\n{\"id\":2,\"created_at\":\"yesterday\",\"author\":\"b\",\"followers\":1,\"text\":\"y\"}\n";
        match parse_tweets_jsonl(src.as_bytes()) {
            Err(IngestError::UnknownTimestampFormat { line, value }) => {
                assert_eq!(line, 3);
                assert_eq!(value, "yesterday");
            }
            other => panic!("{other:?}"),
        }
        let csv = "id,created_at,author,followers,text\n1,2011-06-28 10:00:00,a,1,x\n2,bad,b,1,y\n";
        assert!(matches!(
            parse_tweets_csv(csv.as_bytes()),
            Err(IngestError::UnknownTimestampFormat { line: 3, .. })
        ));
    }

    fn rec(id: &str, sec: u32, author: &str, followers: u64, text: &str) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            created_at: parse_timestamp(&format!("2011-08-04 10:00:{sec:02}")).unwrap(),
            author: author.into(),
            followers,
            text: text.into(),
        }
    }

    #[test]
    fn network_limit_and_self_retweets() {
        let records = vec![
            rec("1", 0, "org", 500, "marcha hoy"),
            rec("2", 1, "ana", 10, "RT @org: marcha hoy"),
            rec("3", 2, "ana", 11, "RT @ana: me"),
            rec("4", 3, "Bob", 20, "RT @ORG: marcha"),
            rec("5", 4, "ana", 12, "RT @org: again"),
            rec("6", 5, "carl", 30, "RT @bob: x"),
        ];
        let net = build_network(&records, 3, &HashSet::new());
        assert_eq!(net.log.len(), 3);
        assert_eq!(net.graph.edge_count(), 2);
        assert_eq!(net.nodes.screen_names, vec!["ana", "org", "Bob"]);
        assert_eq!(net.nodes.followers, vec![10, 500, 20]);
        assert!(net.graph.has_edge(0, 1) && net.graph.has_edge(2, 1));
        let empty = build_network(&records, 0, &HashSet::new());
        assert_eq!(empty.graph.node_count(), 0);
        let excl: HashSet<String> = ["2".to_string()].into();
        let net = build_network(&records, 10, &excl);
        assert_eq!(net.log[0].tweet_id, "4");
    }

    #[test]
    fn roles_join() {
        let roles = parse_roles("screen_name,role\nORG,organization\nana,leader\n".as_bytes()).unwrap();
        let mut nodes = NodeTable::default();
        nodes.push("org".into(), Role::Ordinary, 0);
        nodes.push("Ana".into(), Role::Ordinary, 0);
        nodes.push("zed".into(), Role::Ordinary, 0);
        let missing = apply_roles(&mut nodes, &roles);
        assert_eq!(nodes.roles, vec![Role::Organization, Role::Leader, Role::Ordinary]);
        assert_eq!(missing, vec!["zed".to_string()]);
        assert!(matches!(
            parse_roles("screen_name,role\nx,bot\n".as_bytes()),
            Err(IngestError::Role { line: 2, .. })
        ));
    }

    #[test]
    fn star_descriptives() {
        // ten ordinary users each retweet one organization once
        let mut nodes = NodeTable::default();
        nodes.push("org".into(), Role::Organization, 0);
        for i in 0..10 {
            nodes.push(format!("u{i}"), Role::Ordinary, 0);
        }
        let edges: Vec<_> = (1..=10).map(|v| (v, 0)).collect();
        let g = DirectedGraph::from_edge_list(&edges, 11).unwrap();
        let d = describe(&g, &nodes, 10);
        let org = &d.degrees_by_role[0];
        assert_eq!(org.role, Role::Organization);
        assert_eq!(org.indegree.unwrap().mean, 10.0);
        let ord = &d.degrees_by_role[3];
        assert_eq!(ord.outdegree.unwrap().mean, 1.0);
        assert_eq!(ord.outdegree.unwrap().sd, Some(0.0));
        assert_eq!(d.max_indegree, 10);
        assert_eq!(d.role_counts[&Role::Influential], 0);
        let text = d.render_text();
        assert!(text.contains("Organizations' indegree"));
        assert!(text.contains("10.00 (NA)"));
        assert!(text.contains("Influential users' indegree") && text.contains("N/A"));
    }

    #[test]
    fn single_edge() {
        let g = DirectedGraph::from_edge_list(&[(0, 1)], 2).unwrap();
        let d = describe(&g, &NodeTable::ordinary(2), 1);
        assert_eq!((d.max_indegree, d.max_outdegree), (1, 1));
    }

    #[test]
    fn alpha_fixtures() {
        let a: Vec<Option<u8>> = [0, 1, 2, 0, 1, 2, 0, 1, 2, 0].iter().map(|v| Some(*v)).collect();
        assert_eq!(krippendorff_alpha(&a, &a).unwrap(), 1.0);
        let a: Vec<Option<u8>> = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1].iter().map(|v| Some(*v)).collect();
        let b: Vec<Option<u8>> = [0, 0, 0, 0, 1, 1, 1, 1, 1, 0].iter().map(|v| Some(*v)).collect();
        assert!((krippendorff_alpha(&a, &b).unwrap() - 0.62).abs() < 1e-12);
        // constant coder against a varied one
        let c: Vec<Option<u8>> = vec![Some(0); 10];
        assert!(krippendorff_alpha(&c, &a).unwrap() <= 0.0);
        assert!(krippendorff_alpha(&c, &c).is_err());
        assert!(krippendorff_alpha(&[Some(1), None], &[Some(1), Some(0)]).is_err());
    }
}
