//! Input corpus: user records, retweet edges, media endorsements, and the
//! preprocessing filters that produce the clean working set.
//!
//! File formats:
//! - `users.jsonl` — one JSON object per line with keys `user_id`,
//!   `description`, `verified`, `in_us`, `tweet_count`, and optional
//!   `bot_score`.
//! - `edges.csv` — header `src,dst,count`; one row per (retweeter, retweeted)
//!   pair with the retweet count.
//! - `endorsements.csv` — header `user_id,media_handle,count`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque user key. Ordering is lexicographic and is the tiebreaker used
/// everywhere the crate promises deterministic output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        UserId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId(s.to_owned())
    }
}

impl From<String> for UserId {
    fn from(s: String) -> Self {
        UserId(s)
    }
}

impl std::borrow::Borrow<str> for UserId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for UserId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One user's profile and activity metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: UserId,
    pub description: String,
    pub verified: bool,
    pub in_us: bool,
    pub tweet_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot_score: Option<f64>,
}

/// A directed retweet edge: `src` retweeted `dst` `count` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub src: UserId,
    pub dst: UserId,
    pub count: u64,
}

/// A user's endorsement of a media outlet (retweet or link share).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndorsementRecord {
    pub user_id: UserId,
    pub media_handle: String,
    pub count: u64,
}

/// Load users from a JSONL file.
///
/// Malformed lines are skipped with the line number logged. Duplicate
/// `user_id`s keep the first occurrence and log a warning. Output is sorted
/// by `user_id`.
pub fn load_users(path: impl AsRef<Path>) -> Result<Vec<UserRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut users: Vec<UserRecord> = Vec::new();
    let mut seen: BTreeSet<UserId> = BTreeSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<UserRecord>(&line) {
            Ok(rec) => {
                if let Some(score) = rec.bot_score {
                    if !(0.0..=1.0).contains(&score) {
                        log::warn!(
                            "{}:{}: bot_score {} outside [0,1], record skipped",
                            path.display(),
                            lineno + 1,
                            score
                        );
                        continue;
                    }
                }
                if seen.insert(rec.user_id.clone()) {
                    users.push(rec);
                } else {
                    log::warn!(
                        "{}:{}: duplicate user_id {}, keeping first occurrence",
                        path.display(),
                        lineno + 1,
                        rec.user_id
                    );
                }
            }
            Err(e) => {
                log::warn!("{}:{}: malformed line skipped: {}", path.display(), lineno + 1, e);
            }
        }
    }
    users.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    Ok(users)
}

/// Write users as JSONL, one record per line, sorted by `user_id`.
pub fn save_users(path: impl AsRef<Path>, users: &[UserRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&UserRecord> = users.iter().collect();
    sorted.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let mut out = File::create(path).map_err(|e| Error::io(path, e))?;
    for user in sorted {
        let line = serde_json::to_string(user).expect("user record serializes");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Load retweet edges from a CSV file with header `src,dst,count`.
///
/// Self-retweets and rows with `count = 0` are dropped at parse.
pub fn load_edges(path: impl AsRef<Path>) -> Result<Vec<RawEdge>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut edges = Vec::new();
    for (rowno, row) in reader.deserialize::<RawEdge>().enumerate() {
        match row {
            Ok(edge) => {
                if edge.src == edge.dst {
                    log::debug!("{}: row {}: self-retweet dropped", path.display(), rowno + 2);
                    continue;
                }
                if edge.count == 0 {
                    log::warn!("{}: row {}: zero count dropped", path.display(), rowno + 2);
                    continue;
                }
                edges.push(edge);
            }
            Err(e) => {
                log::warn!("{}: row {}: malformed row skipped: {}", path.display(), rowno + 2, e);
            }
        }
    }
    Ok(edges)
}

/// Write edges as CSV with header `src,dst,count`.
pub fn save_edges(path: impl AsRef<Path>, edges: &[RawEdge]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for edge in edges {
        writer.serialize(edge).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Load endorsements from a CSV file with header `user_id,media_handle,count`.
pub fn load_endorsements(path: impl AsRef<Path>) -> Result<Vec<EndorsementRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut records = Vec::new();
    for (rowno, row) in reader.deserialize::<EndorsementRecord>().enumerate() {
        match row {
            Ok(rec) if rec.count > 0 => records.push(rec),
            Ok(_) => log::warn!("{}: row {}: zero count dropped", path.display(), rowno + 2),
            Err(e) => {
                log::warn!("{}: row {}: malformed row skipped: {}", path.display(), rowno + 2, e);
            }
        }
    }
    Ok(records)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

/// Thresholds applied by [`preprocess`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Keep users with at least this many tweets.
    pub min_tweets: u64,
    /// Drop this fraction of scored users, highest bot score first.
    pub drop_bot_quantile: f64,
    /// Edge weight threshold used when computing degrees (and later when
    /// building the graph).
    pub min_weight: u64,
    /// Users below this total degree (in + out) are removed, cascading to a
    /// fixpoint.
    pub min_degree: u64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_tweets: 2,
            drop_bot_quantile: 0.10,
            min_weight: 2,
            min_degree: 10,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.drop_bot_quantile) {
            return Err(Error::config(
                "filter.drop_bot_quantile",
                format!("{} not in [0,1)", self.drop_bot_quantile),
            ));
        }
        Ok(())
    }
}

/// Apply the preprocessing filters and return the surviving users and edges.
///
/// In order: users outside the US, users with fewer than `min_tweets` tweets,
/// users with an empty profile description, and the top `drop_bot_quantile`
/// of scored users by bot score are removed. Edges incident to removed users
/// go with them. Then users whose total degree (in + out, counted on edges
/// that meet `min_weight` after summing duplicate pairs) falls below
/// `min_degree` are removed, cascading until no such user remains.
///
/// Users without a bot score are never removed by the bot filter. Output is
/// sorted by `user_id` (users) and input order (edges); the result is
/// independent of input order up to that sorting.
pub fn preprocess(
    users: &[UserRecord],
    edges: &[RawEdge],
    cfg: &FilterConfig,
) -> (Vec<UserRecord>, Vec<RawEdge>) {
    // Attribute filters.
    let mut surviving: BTreeSet<UserId> = users
        .iter()
        .filter(|u| u.in_us && u.tweet_count >= cfg.min_tweets && !u.description.trim().is_empty())
        .map(|u| u.user_id.clone())
        .collect();

    // Bot filter: drop the top quantile among users that have scores.
    let mut scored: Vec<(&UserId, f64)> = users
        .iter()
        .filter_map(|u| u.bot_score.map(|s| (&u.user_id, s)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("bot scores are finite")
            .then_with(|| a.0.cmp(b.0))
    });
    let n_dropped = (cfg.drop_bot_quantile * scored.len() as f64).floor() as usize;
    for (id, _) in scored.iter().take(n_dropped) {
        surviving.remove(*id);
    }

    // Degree filter on the weight-thresholded graph, cascading to fixpoint.
    let kept_edges: Vec<&RawEdge> = edges
        .iter()
        .filter(|e| surviving.contains(&e.src) && surviving.contains(&e.dst))
        .collect();
    let mut merged: std::collections::BTreeMap<(&UserId, &UserId), u64> =
        std::collections::BTreeMap::new();
    for e in &kept_edges {
        *merged.entry((&e.src, &e.dst)).or_insert(0) += e.count;
    }
    let heavy: Vec<(&UserId, &UserId)> = merged
        .iter()
        .filter(|(_, &w)| w >= cfg.min_weight)
        .map(|(&k, _)| k)
        .collect();

    let mut degree: std::collections::BTreeMap<&UserId, u64> = std::collections::BTreeMap::new();
    for &(src, dst) in &heavy {
        *degree.entry(src).or_insert(0) += 1;
        *degree.entry(dst).or_insert(0) += 1;
    }

    let mut queue: Vec<&UserId> = surviving
        .iter()
        .filter(|id| degree.get(*id).copied().unwrap_or(0) < cfg.min_degree)
        .collect();
    let mut removed: BTreeSet<&UserId> = queue.iter().copied().collect();
    while let Some(victim) = queue.pop() {
        for &(src, dst) in &heavy {
            let other = if src == victim {
                dst
            } else if dst == victim {
                src
            } else {
                continue;
            };
            if removed.contains(other) {
                continue;
            }
            let d = degree.get_mut(other).expect("endpoint has a degree entry");
            *d -= 1;
            if *d < cfg.min_degree {
                removed.insert(other);
                queue.push(other);
            }
        }
    }
    let removed: BTreeSet<UserId> = removed.into_iter().cloned().collect();
    surviving.retain(|id| !removed.contains(id));

    let users_out: Vec<UserRecord> = users
        .iter()
        .filter(|u| surviving.contains(&u.user_id))
        .cloned()
        .collect();
    let mut users_out = users_out;
    users_out.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let edges_out: Vec<RawEdge> = edges
        .iter()
        .filter(|e| surviving.contains(&e.src) && surviving.contains(&e.dst))
        .cloned()
        .collect();
    (users_out, edges_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn user(id: &str, description: &str) -> UserRecord {
        UserRecord {
            user_id: id.into(),
            description: description.to_owned(),
            verified: false,
            in_us: true,
            tweet_count: 5,
            bot_score: None,
        }
    }

    fn edge(src: &str, dst: &str, count: u64) -> RawEdge {
        RawEdge {
            src: src.into(),
            dst: dst.into(),
            count,
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_users_empty_file() {
        let f = write_temp("");
        assert!(load_users(f.path()).unwrap().is_empty());
    }

    #[test]
    fn load_users_three_lines() {
        let f = write_temp(concat!(
            "{\"user_id\":\"a\",\"description\":\"x\",\"verified\":false,\"in_us\":true,\"tweet_count\":3}\n",
            "{\"user_id\":\"b\",\"description\":\"y\",\"verified\":true,\"in_us\":true,\"tweet_count\":4,\"bot_score\":0.2}\n",
            "{\"user_id\":\"c\",\"description\":\"z\",\"verified\":false,\"in_us\":false,\"tweet_count\":9}\n",
        ));
        let users = load_users(f.path()).unwrap();
        assert_eq!(users.len(), 3);
        assert_eq!(users[1].bot_score, Some(0.2));
    }

    #[test]
    fn load_users_duplicate_keeps_first() {
        let f = write_temp(concat!(
            "{\"user_id\":\"u1\",\"description\":\"first\",\"verified\":false,\"in_us\":true,\"tweet_count\":3}\n",
            "{\"user_id\":\"u1\",\"description\":\"second\",\"verified\":false,\"in_us\":true,\"tweet_count\":3}\n",
        ));
        let users = load_users(f.path()).unwrap();
        assert_eq!(users.len(), 1);
        assert_eq!(users[0].description, "first");
    }

    #[test]
    fn load_users_skips_malformed_line() {
        let f = write_temp(concat!(
            "not json\n",
            "{\"user_id\":\"a\",\"description\":\"x\",\"verified\":false,\"in_us\":true,\"tweet_count\":3}\n",
        ));
        let users = load_users(f.path()).unwrap();
        assert_eq!(users.len(), 1);
    }

    #[test]
    fn load_users_missing_file_is_fatal() {
        assert!(load_users("/nonexistent/users.jsonl").is_err());
    }

    #[test]
    fn load_edges_drops_self_retweets() {
        let f = write_temp("src,dst,count\na,a,3\na,b,2\n");
        let edges = load_edges(f.path()).unwrap();
        assert_eq!(edges, vec![edge("a", "b", 2)]);
    }

    #[test]
    fn preprocess_removes_empty_description() {
        let users = vec![user("a", ""), user("b", "hello")];
        let cfg = FilterConfig {
            min_degree: 0,
            ..FilterConfig::default()
        };
        let (kept, _) = preprocess(&users, &[], &cfg);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].user_id.as_str(), "b");
    }

    #[test]
    fn preprocess_drops_top_bot_decile() {
        // Ten users scored 0.0..=0.9; at q=0.10 exactly the 0.9 user goes.
        let users: Vec<UserRecord> = (0..10)
            .map(|i| UserRecord {
                bot_score: Some(i as f64 / 10.0),
                ..user(&format!("u{i}"), "profile")
            })
            .collect();
        let cfg = FilterConfig {
            min_degree: 0,
            ..FilterConfig::default()
        };
        let (kept, _) = preprocess(&users, &[], &cfg);
        assert_eq!(kept.len(), 9);
        assert!(kept.iter().all(|u| u.user_id.as_str() != "u9"));
    }

    #[test]
    fn preprocess_never_drops_unscored_users_by_bot_filter() {
        let mut users = vec![user("plain", "profile")];
        users.extend((0..9).map(|i| UserRecord {
            bot_score: Some(0.5),
            ..user(&format!("u{i}"), "profile")
        }));
        let cfg = FilterConfig {
            min_degree: 0,
            ..FilterConfig::default()
        };
        let (kept, _) = preprocess(&users, &[], &cfg);
        assert!(kept.iter().any(|u| u.user_id.as_str() == "plain"));
    }

    #[test]
    fn preprocess_removes_isolated_users_under_degree_threshold() {
        let users = vec![user("a", "x"), user("b", "y")];
        let (kept, _) = preprocess(&users, &[], &FilterConfig::default());
        assert!(kept.is_empty());
    }

    #[test]
    fn preprocess_degree_filter_cascades_to_fixpoint() {
        // Chain a->b->c with min_degree 2: endpoints a and c have degree 1,
        // their removal leaves b isolated, so everything goes.
        let users = vec![user("a", "x"), user("b", "y"), user("c", "z")];
        let edges = vec![edge("a", "b", 5), edge("b", "c", 5)];
        let cfg = FilterConfig {
            min_degree: 2,
            ..FilterConfig::default()
        };
        let (kept, kept_edges) = preprocess(&users, &edges, &cfg);
        assert!(kept.is_empty());
        assert!(kept_edges.is_empty());
    }

    #[test]
    fn preprocess_counts_degree_on_weight_filtered_edges() {
        // The a->b edge is below min_weight, so it contributes no degree.
        let users = vec![user("a", "x"), user("b", "y")];
        let edges = vec![edge("a", "b", 1)];
        let cfg = FilterConfig {
            min_degree: 1,
            ..FilterConfig::default()
        };
        let (kept, _) = preprocess(&users, &edges, &cfg);
        assert!(kept.is_empty());
    }

    #[test]
    fn preprocess_sums_duplicate_pairs_before_weight_threshold() {
        let users = vec![user("a", "x"), user("b", "y")];
        let edges = vec![edge("a", "b", 1), edge("a", "b", 1)];
        let cfg = FilterConfig {
            min_degree: 1,
            ..FilterConfig::default()
        };
        let (kept, kept_edges) = preprocess(&users, &edges, &cfg);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept_edges.len(), 2);
    }

    #[test]
    fn preprocess_is_idempotent() {
        let users: Vec<UserRecord> = (0..20)
            .map(|i| UserRecord {
                bot_score: if i % 3 == 0 { Some(i as f64 / 20.0) } else { None },
                tweet_count: i,
                ..user(&format!("u{i:02}"), if i % 7 == 0 { "" } else { "text" })
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..20u64 {
            for j in 1..=3u64 {
                edges.push(edge(
                    &format!("u{i:02}"),
                    &format!("u{:02}", (i + j) % 20),
                    1 + (i + j) % 4,
                ));
            }
        }
        let cfg = FilterConfig {
            min_degree: 3,
            ..FilterConfig::default()
        };
        let (u1, e1) = preprocess(&users, &edges, &cfg);
        let (u2, e2) = preprocess(&u1, &e1, &cfg);
        assert_eq!(u1, u2);
        assert_eq!(e1, e2);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_corpus() -> impl Strategy<Value = (Vec<UserRecord>, Vec<RawEdge>)> {
            let users = prop::collection::vec(
                (0..30u32, any::<bool>(), 0..6u64, prop::option::of(0.0..=1.0f64)),
                1..25,
            )
            .prop_map(|rows| {
                let mut seen = BTreeSet::new();
                rows.into_iter()
                    .filter_map(|(id, in_us, tweets, bot)| {
                        let id = format!("u{id:02}");
                        seen.insert(id.clone()).then(|| UserRecord {
                            user_id: id.into(),
                            description: if tweets % 2 == 0 { String::new() } else { "t".into() },
                            verified: false,
                            in_us,
                            tweet_count: tweets,
                            bot_score: bot,
                        })
                    })
                    .collect::<Vec<_>>()
            });
            let edges =
                prop::collection::vec((0..30u32, 0..30u32, 1..5u64), 0..60).prop_map(|rows| {
                    rows.into_iter()
                        .filter(|(s, d, _)| s != d)
                        .map(|(s, d, c)| RawEdge {
                            src: format!("u{s:02}").into(),
                            dst: format!("u{d:02}").into(),
                            count: c,
                        })
                        .collect::<Vec<_>>()
                });
            (users, edges)
        }

        proptest! {
            #[test]
            fn idempotent((users, edges) in arb_corpus(), min_degree in 0..4u64) {
                let cfg = FilterConfig { min_degree, ..FilterConfig::default() };
                let (u1, e1) = preprocess(&users, &edges, &cfg);
                let (u2, e2) = preprocess(&u1, &e1, &cfg);
                prop_assert_eq!(u1, u2);
                prop_assert_eq!(e1, e2);
            }

            #[test]
            fn edges_reference_surviving_users((users, edges) in arb_corpus()) {
                let cfg = FilterConfig { min_degree: 1, ..FilterConfig::default() };
                let (kept_users, kept_edges) = preprocess(&users, &edges, &cfg);
                let ids: BTreeSet<_> = kept_users.iter().map(|u| u.user_id.clone()).collect();
                for e in kept_edges {
                    prop_assert!(ids.contains(&e.src) && ids.contains(&e.dst));
                }
            }

            #[test]
            fn survivor_count_monotone_in_min_degree((users, edges) in arb_corpus(), t in 0..4u64) {
                let lo = FilterConfig { min_degree: t, ..FilterConfig::default() };
                let hi = FilterConfig { min_degree: t + 1, ..FilterConfig::default() };
                let (u_lo, _) = preprocess(&users, &edges, &lo);
                let (u_hi, _) = preprocess(&users, &edges, &hi);
                prop_assert!(u_hi.len() <= u_lo.len());
            }
        }
    }
}
