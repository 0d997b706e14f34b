//! Case-study machinery over trained polarity scores: quantile partitions
//! into far-left / middle / far-right, per-group most-retweeted accounts,
//! and audience (unique retweeter) composition reports.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::corpus::UserId;
use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::siamese::PolarityScore;

/// Score-quantile bucket. The extremes each hold exactly `floor(q * N)`
/// users; everyone else is `Middle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionTag {
    FarLeft,
    Middle,
    FarRight,
}

impl PartitionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionTag::FarLeft => "far-left",
            PartitionTag::Middle => "middle",
            PartitionTag::FarRight => "far-right",
        }
    }
}

/// Partition users by polarity score: the bottom `floor(qN)` by `p_right`
/// are `FarLeft`, the top `floor(qN)` are `FarRight`. Boundary ties are
/// broken by `user_id`, so the cut is reproducible.
pub fn partition(scores: &[PolarityScore], q: f64) -> Result<BTreeMap<UserId, PartitionTag>> {
    if !(0.0..0.5).contains(&q) || q == 0.0 {
        return Err(Error::config("analysis.q", format!("{q} not in (0, 0.5)")));
    }
    if (scores.len() as f64) < 2.0 / q {
        return Err(Error::PartitionTooSmall(scores.len(), q));
    }
    let mut order: Vec<&PolarityScore> = scores.iter().collect();
    order.sort_by(|a, b| {
        a.p_right
            .partial_cmp(&b.p_right)
            .expect("finite scores")
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    let m = (q * scores.len() as f64).floor() as usize;
    let mut tags = BTreeMap::new();
    for (i, score) in order.iter().enumerate() {
        let tag = if i < m {
            PartitionTag::FarLeft
        } else if i >= order.len() - m {
            PartitionTag::FarRight
        } else {
            PartitionTag::Middle
        };
        tags.insert(score.user_id.clone(), tag);
    }
    Ok(tags)
}

/// Unique-retweeter counts per target: total and per partition tag.
struct RetweeterCounts {
    total: usize,
    far_left: usize,
    middle: usize,
    far_right: usize,
}

fn retweeter_counts(
    g: &RetweetGraph,
    tags: &BTreeMap<UserId, PartitionTag>,
    target: usize,
) -> Result<RetweeterCounts> {
    let mut counts = RetweeterCounts {
        total: 0,
        far_left: 0,
        middle: 0,
        far_right: 0,
    };
    for &(retweeter, _) in g.in_neighbors(target) {
        let id = g.user_id(retweeter);
        let tag = tags
            .get(id)
            .ok_or_else(|| Error::UnknownUser(id.to_string()))?;
        counts.total += 1;
        match tag {
            PartitionTag::FarLeft => counts.far_left += 1,
            PartitionTag::Middle => counts.middle += 1,
            PartitionTag::FarRight => counts.far_right += 1,
        }
    }
    Ok(counts)
}

/// 1-based rank of every node by total unique retweeters, descending; ties
/// break by `user_id`.
fn overall_ranks(g: &RetweetGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        g.in_neighbors(b)
            .len()
            .cmp(&g.in_neighbors(a).len())
            .then_with(|| g.user_id(a).cmp(g.user_id(b)))
    });
    let mut ranks = vec![0; g.node_count()];
    for (position, &node) in order.iter().enumerate() {
        ranks[node] = position + 1;
    }
    ranks
}

/// The accounts most retweeted by one partition group: targets ranked by
/// how many distinct group members retweet them (zero-count targets are
/// dropped), ties broken by total unique retweeters then `user_id`.
pub fn top_retweeted(
    g: &RetweetGraph,
    tags: &BTreeMap<UserId, PartitionTag>,
    group: PartitionTag,
    n: usize,
) -> Result<Vec<(UserId, usize)>> {
    let mut scored: Vec<(usize, usize, usize)> = Vec::new();
    for target in 0..g.node_count() {
        let mut group_count = 0;
        for &(retweeter, _) in g.in_neighbors(target) {
            let id = g.user_id(retweeter);
            let tag = tags
                .get(id)
                .ok_or_else(|| Error::UnknownUser(id.to_string()))?;
            if *tag == group {
                group_count += 1;
            }
        }
        if group_count > 0 {
            scored.push((target, group_count, g.in_neighbors(target).len()));
        }
    }
    scored.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| g.user_id(a.0).cmp(g.user_id(b.0)))
    });
    Ok(scored
        .into_iter()
        .take(n)
        .map(|(target, count, _)| (g.user_id(target).clone(), count))
        .collect())
}

/// Composition of one account's audience (unique in-neighbors) by tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AudienceProfile {
    pub target: UserId,
    pub n_retweeters: usize,
    /// Overall popularity rank by total unique retweeters (1 = most).
    pub rank: usize,
    /// `(far_left, middle, far_right)` fractions summing to one; absent for
    /// accounts with no retweeters.
    pub fractions: Option<AudienceFractions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AudienceFractions {
    pub far_left: f64,
    pub middle: f64,
    pub far_right: f64,
}

pub fn audience_profile(
    g: &RetweetGraph,
    tags: &BTreeMap<UserId, PartitionTag>,
    target: &UserId,
) -> Result<AudienceProfile> {
    let node = g
        .index_of(target)
        .ok_or_else(|| Error::UnknownUser(target.to_string()))?;
    let ranks = overall_ranks(g);
    audience_profile_at(g, tags, node, &ranks)
}

fn audience_profile_at(
    g: &RetweetGraph,
    tags: &BTreeMap<UserId, PartitionTag>,
    node: usize,
    ranks: &[usize],
) -> Result<AudienceProfile> {
    let counts = retweeter_counts(g, tags, node)?;
    let fractions = (counts.total > 0).then(|| {
        let total = counts.total as f64;
        AudienceFractions {
            far_left: counts.far_left as f64 / total,
            middle: counts.middle as f64 / total,
            far_right: counts.far_right as f64 / total,
        }
    });
    Ok(AudienceProfile {
        target: g.user_id(node).clone(),
        n_retweeters: counts.total,
        rank: ranks[node],
        fractions,
    })
}

/// One row of the echo-chamber report: an account popular within a group,
/// with its audience composition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoAccount {
    pub account: UserId,
    /// Distinct retweeters from the group this account ranked under.
    pub group_retweeters: usize,
    pub rank: usize,
    pub n_retweeters: usize,
    pub frac_left: f64,
    pub frac_middle: f64,
    pub frac_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoGroup {
    pub group: PartitionTag,
    pub accounts: Vec<EchoAccount>,
}

impl EchoGroup {
    /// Mean fraction of the audience that carries the group's own tag.
    pub fn mean_own_group_fraction(&self) -> f64 {
        if self.accounts.is_empty() {
            return 0.0;
        }
        let own = |a: &EchoAccount| match self.group {
            PartitionTag::FarLeft => a.frac_left,
            PartitionTag::Middle => a.frac_middle,
            PartitionTag::FarRight => a.frac_right,
        };
        self.accounts.iter().map(own).sum::<f64>() / self.accounts.len() as f64
    }

    pub fn mean_fraction(&self, tag: PartitionTag) -> f64 {
        if self.accounts.is_empty() {
            return 0.0;
        }
        let pick = |a: &EchoAccount| match tag {
            PartitionTag::FarLeft => a.frac_left,
            PartitionTag::Middle => a.frac_middle,
            PartitionTag::FarRight => a.frac_right,
        };
        self.accounts.iter().map(pick).sum::<f64>() / self.accounts.len() as f64
    }
}

/// The data behind an audience-distribution chart: for each extreme, the
/// top-`n` accounts by in-group retweeters plus their audience breakdown.
/// A pure function of `(graph, scores, q, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoReport {
    pub q: f64,
    pub top_n: usize,
    pub far_left: EchoGroup,
    pub far_right: EchoGroup,
}

pub fn echo_report(
    g: &RetweetGraph,
    scores: &[PolarityScore],
    q: f64,
    n: usize,
) -> Result<EchoReport> {
    let tags = partition(scores, q)?;
    let ranks = overall_ranks(g);
    let mut groups = Vec::new();
    for group in [PartitionTag::FarLeft, PartitionTag::FarRight] {
        let mut accounts = Vec::new();
        for (account, group_retweeters) in top_retweeted(g, &tags, group, n)? {
            let node = g.index_of(&account).expect("top account is in the graph");
            let profile = audience_profile_at(g, &tags, node, &ranks)?;
            let fractions = profile
                .fractions
                .expect("top-retweeted accounts have at least one retweeter");
            accounts.push(EchoAccount {
                account,
                group_retweeters,
                rank: profile.rank,
                n_retweeters: profile.n_retweeters,
                frac_left: fractions.far_left,
                frac_middle: fractions.middle,
                frac_right: fractions.far_right,
            });
        }
        groups.push(EchoGroup { group, accounts });
    }
    let far_right = groups.pop().expect("two groups");
    let far_left = groups.pop().expect("two groups");
    Ok(EchoReport {
        q,
        top_n: n,
        far_left,
        far_right,
    })
}

impl EchoReport {
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::format(path, e.to_string()))
    }

    /// Flat CSV with header
    /// `account,group,rank,n_retweeters,frac_left,frac_middle,frac_right`.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer =
            csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
        writer
            .write_record([
                "account",
                "group",
                "rank",
                "n_retweeters",
                "frac_left",
                "frac_middle",
                "frac_right",
            ])
            .map_err(|e| Error::format(path, e.to_string()))?;
        for group in [&self.far_left, &self.far_right] {
            for account in &group.accounts {
                writer
                    .write_record([
                        account.account.as_str(),
                        group.group.as_str(),
                        &account.rank.to_string(),
                        &account.n_retweeters.to_string(),
                        &account.frac_left.to_string(),
                        &account.frac_middle.to_string(),
                        &account.frac_right.to_string(),
                    ])
                    .map_err(|e| Error::format(path, e.to_string()))?;
            }
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}
