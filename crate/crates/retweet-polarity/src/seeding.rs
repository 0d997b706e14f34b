//! Weak-supervision pseudo-labels ("seed users") from two heuristic rules:
//! partisan hashtags in the profile description, and the bias ratings of
//! media outlets a user has endorsed (retweeted or link-shared).
//!
//! When both rules fire and disagree, the hashtag rule wins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{EndorsementRecord, UserId, UserRecord};
use crate::error::{Error, Result};

/// Binary political leaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Left,
    Right,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Left => "left",
            Polarity::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Some(Polarity::Left),
            "right" => Some(Polarity::Right),
            _ => None,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Polarity::Left => Polarity::Right,
            Polarity::Right => Polarity::Left,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which rule produced a seed label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Hashtag,
    Media,
    Both,
}

impl SeedSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedSource::Hashtag => "hashtag",
            SeedSource::Media => "media",
            SeedSource::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hashtag" => Some(SeedSource::Hashtag),
            "media" => Some(SeedSource::Media),
            "both" => Some(SeedSource::Both),
            _ => None,
        }
    }
}

/// A pseudo-labeled user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLabel {
    pub user_id: UserId,
    pub polarity: Polarity,
    pub source: SeedSource,
}

/// Case-insensitive sets of left- and right-leaning profile hashtags.
#[derive(Debug, Clone, PartialEq)]
pub struct HashtagLexicon {
    left: BTreeSet<String>,
    right: BTreeSet<String>,
}

impl HashtagLexicon {
    /// Build from hashtag lists (leading `#` optional, case ignored).
    /// The two sides must be disjoint.
    pub fn new<L, R, S>(left: L, right: R) -> Result<Self>
    where
        L: IntoIterator<Item = S>,
        R: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let norm = |s: &str| s.trim_start_matches('#').to_lowercase();
        let left: BTreeSet<String> = left.into_iter().map(|s| norm(s.as_ref())).collect();
        let right: BTreeSet<String> = right.into_iter().map(|s| norm(s.as_ref())).collect();
        if let Some(shared) = left.intersection(&right).next() {
            return Err(Error::config(
                "lexicon",
                format!("hashtag #{shared} appears on both sides"),
            ));
        }
        Ok(HashtagLexicon { left, right })
    }

    /// The default lexicon: partisan hashtags drawn from the most popular
    /// hashtags in US-politics Twitter profile descriptions.
    pub fn builtin() -> Self {
        let left = [
            "Resist",
            "FBR",
            "TheResistance",
            "Resistance",
            "Biden2020",
            "VoteBlue",
            "VoteBlueNoMatterWho",
            "Bernie2020",
            "BlueWave",
            "BackTheBlue",
            "NotMyPresident",
            "NeverTrump",
            "Resister",
            "VoteBlue2020",
            "ImpeachTrump",
            "BlueWave2020",
            "YangGang",
        ];
        let right = [
            "MAGA",
            "KAG",
            "Trump2020",
            "WWG1WGA",
            "QAnon",
            "Trump",
            "KAG2020",
            "Conservative",
            "BuildTheWall",
            "AmericaFirst",
            "TheGreatAwakening",
            "TrumpTrain",
        ];
        Self::new(left, right).expect("builtin lexicon sides are disjoint")
    }

    /// Load from a CSV file with header `hashtag,side` where side is
    /// `left` or `right`.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::format(path, e.to_string()))?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for row in reader.deserialize::<(String, String)>() {
            let (hashtag, side) = row.map_err(|e| Error::format(path, e.to_string()))?;
            match side.to_ascii_lowercase().as_str() {
                "left" => left.push(hashtag),
                "right" => right.push(hashtag),
                other => {
                    return Err(Error::format(path, format!("unknown side `{other}`")));
                }
            }
        }
        Self::new(left, right)
    }

    pub fn side_of(&self, hashtag_lowercase: &str) -> Option<Polarity> {
        if self.left.contains(hashtag_lowercase) {
            Some(Polarity::Left)
        } else if self.right.contains(hashtag_lowercase) {
            Some(Polarity::Right)
        } else {
            None
        }
    }

    pub fn left(&self) -> &BTreeSet<String> {
        &self.left
    }

    pub fn right(&self) -> &BTreeSet<String> {
        &self.right
    }
}

/// One media outlet's Twitter handle, site, and bias rating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaOutlet {
    pub handle: String,
    pub url: String,
    /// 1 = left, 2 = center-left, 3 = neutral, 4 = center-right, 5 = right
    /// (the AllSides five-point scale).
    pub rating: u8,
}

/// Media outlets keyed by normalized handle (lowercase, no leading `@`).
#[derive(Debug, Clone, PartialEq)]
pub struct MediaTable {
    entries: BTreeMap<String, MediaOutlet>,
}

impl MediaTable {
    pub fn new(outlets: impl IntoIterator<Item = MediaOutlet>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for outlet in outlets {
            if !(1..=5).contains(&outlet.rating) {
                return Err(Error::config(
                    "media",
                    format!("{}: rating {} not in 1..=5", outlet.handle, outlet.rating),
                ));
            }
            entries.insert(normalize_handle(&outlet.handle), outlet);
        }
        Ok(MediaTable { entries })
    }

    /// The default table: 29 prominent outlets with AllSides bias ratings.
    pub fn builtin() -> Self {
        const ROWS: [(&str, &str, u8); 29] = [
            ("@ABC", "abcnews.go.com", 2),
            ("@BBCWorld", "bbc.com", 3),
            ("@BreitbartNews", "breitbart.com", 5),
            ("@BostonGlobe", "bostonglobe.com", 2),
            ("@businessinsider", "businessinsider.com", 3),
            ("@BuzzFeedNews", "buzzfeednews.com", 1),
            ("@CBSNews", "cbsnews.com", 2),
            ("@chicagotribune", "chicagotribune.com", 3),
            ("@CNBC", "cnbc.com", 3),
            ("@CNN", "cnn.com", 2),
            ("@DailyCaller", "dailycaller.com", 5),
            ("@DailyMail", "dailymail.co.uk", 5),
            ("@FoxNews", "foxnews.com", 4),
            ("@HuffPost", "huffpost.com", 1),
            ("InfoWars", "infowars.com", 5),
            ("@latimes", "latimes.com", 2),
            ("@MSNBC", "msnbc.com", 1),
            ("@NBCNews", "nbcnews.com", 2),
            ("@nytimes", "nytimes.com", 2),
            ("@NPR", "npr.org", 3),
            ("@OANN", "oann.com", 4),
            ("@PBS", "pbs.org", 3),
            ("@Reuters", "reuters.com", 3),
            ("@guardian", "theguardian.com", 2),
            ("@USATODAY", "usatoday.com", 3),
            ("@YahooNews", "yahoo.com", 2),
            ("@VICE", "vice.com", 1),
            ("@washingtonpost", "washingtonpost.com", 2),
            ("@WSJ", "wsj.com", 3),
        ];
        Self::new(ROWS.iter().map(|&(handle, url, rating)| MediaOutlet {
            handle: handle.to_owned(),
            url: url.to_owned(),
            rating,
        }))
        .expect("builtin media ratings are in range")
    }

    /// Load from a CSV file with header `handle,url,rating`.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::format(path, e.to_string()))?;
        let mut outlets = Vec::new();
        for row in reader.deserialize::<MediaOutlet>() {
            outlets.push(row.map_err(|e| Error::format(path, e.to_string()))?);
        }
        Self::new(outlets)
    }

    /// Bias rating for a handle (leading `@` and case ignored).
    pub fn rating(&self, handle: &str) -> Option<u8> {
        self.entries.get(&normalize_handle(handle)).map(|o| o.rating)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn outlets(&self) -> impl Iterator<Item = &MediaOutlet> {
        self.entries.values()
    }
}

fn normalize_handle(handle: &str) -> String {
    handle.trim().trim_start_matches('@').to_lowercase()
}

/// Extract `#`-prefixed tokens from a profile description, lowercased.
/// A hashtag token is the maximal run of alphanumerics or `_` after `#`,
/// so `#MAGA2024` is the token `maga2024`, not `maga`.
pub fn profile_hashtags(description: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut chars = description.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&next) = chars.peek() {
            if next.is_alphanumeric() || next == '_' {
                tag.extend(next.to_lowercase());
                chars.next();
            } else {
                break;
            }
        }
        if !tag.is_empty() {
            tags.push(tag);
        }
    }
    tags
}

/// Label a profile by hashtag majority: `Left` when it contains more
/// left-leaning than right-leaning hashtags, `Right` for the reverse, and
/// no label on a tie (including zero matches on both sides).
pub fn hashtag_label(description: &str, lexicon: &HashtagLexicon) -> Option<Polarity> {
    let mut left = 0usize;
    let mut right = 0usize;
    for tag in profile_hashtags(description) {
        match lexicon.side_of(&tag) {
            Some(Polarity::Left) => left += 1,
            Some(Polarity::Right) => right += 1,
            None => {}
        }
    }
    match left.cmp(&right) {
        std::cmp::Ordering::Greater => Some(Polarity::Left),
        std::cmp::Ordering::Less => Some(Polarity::Right),
        std::cmp::Ordering::Equal => None,
    }
}

/// How to average outlet ratings in [`media_score`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediaMeanMode {
    /// Each endorsement counts once: a user endorsing FoxNews 3x and CNN 1x
    /// scores (4*3 + 2*1) / 4.
    #[default]
    CountWeighted,
    /// Each distinct outlet counts once regardless of how often it was
    /// endorsed.
    PerOutlet,
}

/// Media bias score for one user's endorsements: the mean rating of the
/// outlets they endorsed, or `None` when the total endorsement count over
/// known outlets is below `min_endorsements`. Unknown handles are ignored.
pub fn media_score(
    endorsements: &[EndorsementRecord],
    media: &MediaTable,
    min_endorsements: u64,
    mode: MediaMeanMode,
) -> Option<f64> {
    let mut total_count = 0u64;
    let mut weighted_sum = 0.0;
    let mut per_outlet: BTreeMap<String, u8> = BTreeMap::new();
    for rec in endorsements {
        let Some(rating) = media.rating(&rec.media_handle) else {
            continue;
        };
        total_count += rec.count;
        weighted_sum += rating as f64 * rec.count as f64;
        per_outlet.insert(normalize_handle(&rec.media_handle), rating);
    }
    if total_count < min_endorsements {
        return None;
    }
    Some(match mode {
        MediaMeanMode::CountWeighted => weighted_sum / total_count as f64,
        MediaMeanMode::PerOutlet => {
            per_outlet.values().map(|&r| r as f64).sum::<f64>() / per_outlet.len() as f64
        }
    })
}

/// Map a media bias score to a leaning: `<= 2` is Left, `>= 4` is Right,
/// anything strictly between is unlabeled.
pub fn media_label(score: f64) -> Option<Polarity> {
    if score <= 2.0 {
        Some(Polarity::Left)
    } else if score >= 4.0 {
        Some(Polarity::Right)
    } else {
        None
    }
}

/// Merge the two rules. When both fire and agree the source is `Both`; when
/// they disagree the hashtag rule wins.
pub fn combine(
    hashtag: Option<Polarity>,
    media: Option<Polarity>,
) -> Option<(Polarity, SeedSource)> {
    match (hashtag, media) {
        (None, None) => None,
        (Some(h), None) => Some((h, SeedSource::Hashtag)),
        (None, Some(m)) => Some((m, SeedSource::Media)),
        (Some(h), Some(m)) if h == m => Some((h, SeedSource::Both)),
        (Some(h), Some(_)) => Some((h, SeedSource::Hashtag)),
    }
}

/// Bookkeeping over one seed-generation run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SeedSummary {
    /// Users labeled by the hashtag rule (regardless of the media rule).
    pub n_hashtag: usize,
    /// Users labeled by the media rule (regardless of the hashtag rule).
    pub n_media: usize,
    /// Users labeled by both rules.
    pub n_overlap: usize,
    /// Users where the two rules disagreed (hashtag wins).
    pub n_conflict: usize,
    /// Total seeds.
    pub n_seeds: usize,
    /// Fraction of seeds labeled Left (0 when there are no seeds).
    pub left_fraction: f64,
}

/// Options for [`generate_seeds`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedingConfig {
    pub min_endorsements: u64,
    pub media_mean: MediaMeanMode,
}

impl Default for SeedingConfig {
    fn default() -> Self {
        SeedingConfig {
            min_endorsements: 2,
            media_mean: MediaMeanMode::CountWeighted,
        }
    }
}

/// Run both rules over every user and combine the results. Output is sorted
/// by `user_id`.
pub fn generate_seeds(
    users: &[UserRecord],
    endorsements: &[EndorsementRecord],
    lexicon: &HashtagLexicon,
    media: &MediaTable,
    cfg: &SeedingConfig,
) -> (Vec<SeedLabel>, SeedSummary) {
    let mut by_user: BTreeMap<&UserId, Vec<EndorsementRecord>> = BTreeMap::new();
    for rec in endorsements {
        by_user.entry(&rec.user_id).or_default().push(rec.clone());
    }

    let mut sorted: Vec<&UserRecord> = users.iter().collect();
    sorted.sort_by(|a, b| a.user_id.cmp(&b.user_id));

    let mut seeds = Vec::new();
    let mut summary = SeedSummary::default();
    let mut n_left = 0usize;
    for user in sorted {
        let h = hashtag_label(&user.description, lexicon);
        let m = by_user
            .get(&user.user_id)
            .and_then(|recs| media_score(recs, media, cfg.min_endorsements, cfg.media_mean))
            .and_then(media_label);
        if h.is_some() {
            summary.n_hashtag += 1;
        }
        if m.is_some() {
            summary.n_media += 1;
        }
        if let (Some(hv), Some(mv)) = (h, m) {
            summary.n_overlap += 1;
            if hv != mv {
                summary.n_conflict += 1;
            }
        }
        if let Some((polarity, source)) = combine(h, m) {
            if polarity == Polarity::Left {
                n_left += 1;
            }
            seeds.push(SeedLabel {
                user_id: user.user_id.clone(),
                polarity,
                source,
            });
        }
    }
    summary.n_seeds = seeds.len();
    summary.left_fraction = if seeds.is_empty() {
        0.0
    } else {
        n_left as f64 / seeds.len() as f64
    };
    (seeds, summary)
}

/// Write seeds as CSV with header `user_id,polarity,source`.
pub fn save_seeds(path: impl AsRef<Path>, seeds: &[SeedLabel]) -> Result<()> {
    let path = path.as_ref();
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    writer
        .write_record(["user_id", "polarity", "source"])
        .map_err(|e| Error::format(path, e.to_string()))?;
    for seed in seeds {
        writer
            .write_record([
                seed.user_id.as_str(),
                seed.polarity.as_str(),
                seed.source.as_str(),
            ])
            .map_err(|e| Error::format(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read seeds written by [`save_seeds`].
pub fn load_seeds(path: impl AsRef<Path>) -> Result<Vec<SeedLabel>> {
    let path = path.as_ref();
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let mut seeds = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::format(path, e.to_string()))?;
        let polarity = row
            .get(1)
            .and_then(Polarity::parse)
            .ok_or_else(|| Error::format(path, format!("bad polarity in row {row:?}")))?;
        let source = row
            .get(2)
            .and_then(SeedSource::parse)
            .ok_or_else(|| Error::format(path, format!("bad source in row {row:?}")))?;
        seeds.push(SeedLabel {
            user_id: row.get(0).unwrap_or_default().into(),
            polarity,
            source,
        });
    }
    Ok(seeds)
}
