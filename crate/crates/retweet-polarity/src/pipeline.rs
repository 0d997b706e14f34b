//! File-based pipeline: the stages behind the CLI subcommands, each reading
//! and writing declared files under the output directory.
//!
//! Stage randomness is split from one master seed, so every stage is
//! independently reproducible and `run-all` twice with the same seed writes
//! byte-identical outputs.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::echo_report;
use crate::baselines::{ExternalVectors, WalkConfig, WeightMode};
use crate::corpus::{self, FilterConfig, UserRecord};
use crate::derive_seed;
use crate::encoder::{EncoderConfig, EncoderParams};
use crate::error::{Error, Result};
use crate::eval::{cross_validate, CrossValReport, EvalConfig, EvalDataset, ModelId};
use crate::graph::RetweetGraph;
use crate::seeding::{
    generate_seeds, load_seeds, save_seeds, HashtagLexicon, MediaTable, SeedingConfig,
};
use crate::siamese::{fit_head, load_scores, predict, save_scores, train_unsupervised, TripletConfig};
use crate::synth::{self, SynthConfig};

pub const FILTERED_USERS: &str = "users_filtered.jsonl";
pub const FILTERED_EDGES: &str = "edges_filtered.csv";
pub const GRAPH_FILE: &str = "graph.csv";
pub const SEEDS_FILE: &str = "seeds.csv";
pub const ENCODER_FILE: &str = "encoder.bin";
pub const METRICS_FILE: &str = "metrics.json";
pub const HEAD_FILE: &str = "head.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

/// Optional input overrides; anything unset resolves to the conventional
/// file name inside the output directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct InputPaths {
    pub users: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub endorsements: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    /// Hashtag lexicon CSV; the builtin table when unset.
    pub lexicon: Option<PathBuf>,
    /// Media ratings CSV; the builtin table when unset.
    pub media: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSection {
    pub k: usize,
    pub c_grid: Vec<f64>,
    pub models: Vec<String>,
    pub prop_max_iter: usize,
    pub prop_weighting: WeightMode,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            k: 5,
            c_grid: vec![1.0, 10.0, 100.0, 1000.0],
            models: ModelId::ALL.iter().map(|m| m.as_str().to_owned()).collect(),
            prop_max_iter: 100,
            prop_weighting: WeightMode::Weighted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeadSection {
    /// Inverse regularization strength used by `predict`'s final head fit.
    pub c: f64,
}

impl Default for HeadSection {
    fn default() -> Self {
        HeadSection { c: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisSection {
    /// Extreme-quantile size for the partition.
    pub q: f64,
    /// Accounts reported per group.
    pub top_n: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { q: 0.2, top_n: 20 }
    }
}

/// The whole pipeline configuration, loadable from one TOML file. Every
/// section has defaults, so an empty file (or no `--config` at all) runs the
/// full synthetic pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub out_dir: PathBuf,
    pub master_seed: u64,
    /// Accepted for compatibility with scripted runs; this implementation is
    /// deterministic in both modes.
    pub deterministic: bool,
    pub paths: InputPaths,
    pub filter: FilterConfig,
    pub seeding: SeedingConfig,
    pub encoder: EncoderConfig,
    pub triplet: TripletConfig,
    pub walk: WalkConfig,
    pub eval: EvalSection,
    pub head: HeadSection,
    pub analysis: AnalysisSection,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            out_dir: PathBuf::from("out"),
            master_seed: 42,
            deterministic: true,
            paths: InputPaths::default(),
            filter: FilterConfig::default(),
            seeding: SeedingConfig::default(),
            encoder: EncoderConfig::default(),
            triplet: TripletConfig::default(),
            walk: WalkConfig::default(),
            eval: EvalSection::default(),
            head: HeadSection::default(),
            analysis: AnalysisSection::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingInput(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        self.triplet.validate()?;
        self.walk.validate()?;
        self.synth.validate()?;
        if self.eval.k < 1 {
            return Err(Error::config("eval.k", "must be at least 1"));
        }
        if self.eval.c_grid.is_empty() || self.eval.c_grid.iter().any(|&c| c <= 0.0) {
            return Err(Error::config("eval.c_grid", "must be non-empty and positive"));
        }
        for model in &self.eval.models {
            ModelId::parse(model)?;
        }
        if !(0.0..0.5).contains(&self.analysis.q) || self.analysis.q == 0.0 {
            return Err(Error::config("analysis.q", "must be in (0, 0.5)"));
        }
        if self.analysis.top_n == 0 {
            return Err(Error::config("analysis.top_n", "must be at least 1"));
        }
        if self.head.c <= 0.0 {
            return Err(Error::config("head.c", "must be positive"));
        }
        Ok(())
    }

    /// Triplet settings with the stage seed spliced in.
    pub fn triplet_seeded(&self) -> TripletConfig {
        TripletConfig {
            rng_seed: derive_seed(self.master_seed, "triplet"),
            ..self.triplet.clone()
        }
    }

    pub fn walk_seeded(&self) -> WalkConfig {
        WalkConfig {
            rng_seed: derive_seed(self.master_seed, "walk"),
            ..self.walk.clone()
        }
    }

    pub fn synth_seeded(&self) -> SynthConfig {
        SynthConfig {
            rng_seed: derive_seed(self.master_seed, "synth"),
            ..self.synth.clone()
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            k: self.eval.k,
            rng_seed: derive_seed(self.master_seed, "folds"),
            c_grid: self.eval.c_grid.clone(),
            encoder: self.encoder,
            triplet: self.triplet_seeded(),
            walk: self.walk_seeded(),
            prop_max_iter: self.eval.prop_max_iter,
            prop_weighting: self.eval.prop_weighting,
        }
    }
}

/// Stage runner over one output directory.
pub struct Pipeline {
    cfg: PipelineConfig,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Pipeline { cfg })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn input(&self, explicit: &Option<PathBuf>, default_name: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.out(default_name))
    }

    fn require(path: PathBuf) -> Result<PathBuf> {
        if path.exists() {
            Ok(path)
        } else {
            Err(Error::MissingInput(path))
        }
    }

    fn ensure_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.cfg.out_dir)
            .map_err(|e| Error::io(&self.cfg.out_dir, e))
    }

    /// Generate the synthetic corpus files.
    pub fn synth(&self) -> Result<()> {
        self.ensure_out_dir()?;
        let cfg = self.cfg.synth_seeded();
        let corpus = synth::generate(&cfg)?;
        synth::write_corpus(&self.cfg.out_dir, &corpus)?;
        log::info!(
            target: "synth",
            "wrote {} users, {} edges, {} endorsements to {}",
            corpus.users.len(),
            corpus.edges.len(),
            corpus.endorsements.len(),
            self.cfg.out_dir.display()
        );
        Ok(())
    }

    /// Load raw users and edges, apply the preprocessing filters, and write
    /// the filtered working set.
    pub fn ingest(&self) -> Result<()> {
        self.ensure_out_dir()?;
        let users_path = Self::require(self.input(&self.cfg.paths.users, "users.jsonl"))?;
        let edges_path = Self::require(self.input(&self.cfg.paths.edges, "edges.csv"))?;
        let users = corpus::load_users(&users_path)?;
        let edges = corpus::load_edges(&edges_path)?;
        let (kept_users, kept_edges) = corpus::preprocess(&users, &edges, &self.cfg.filter);
        log::info!(
            target: "ingest",
            "{} of {} users and {} of {} edges survive filtering",
            kept_users.len(),
            users.len(),
            kept_edges.len(),
            edges.len()
        );
        corpus::save_users(self.out(FILTERED_USERS), &kept_users)?;
        corpus::save_edges(self.out(FILTERED_EDGES), &kept_edges)?;
        Ok(())
    }

    fn load_working_set(&self) -> Result<(Vec<UserRecord>, RetweetGraph)> {
        let users = corpus::load_users(Self::require(self.out(FILTERED_USERS))?)?;
        let edges = corpus::load_edges(Self::require(self.out(GRAPH_FILE))?)?;
        let graph = RetweetGraph::build_with_nodes(
            users.iter().map(|u| &u.user_id),
            &edges,
            self.cfg.filter.min_weight,
        );
        Ok((users, graph))
    }

    /// Build the weighted retweet graph from the filtered working set and
    /// dump it as an edge-list CSV.
    pub fn build_graph(&self) -> Result<()> {
        let users = corpus::load_users(Self::require(self.out(FILTERED_USERS))?)?;
        let edges = corpus::load_edges(Self::require(self.out(FILTERED_EDGES))?)?;
        let graph = RetweetGraph::build_with_nodes(
            users.iter().map(|u| &u.user_id),
            &edges,
            self.cfg.filter.min_weight,
        );
        let stats = graph.degree_stats();
        log::info!(
            target: "build-graph",
            "{} nodes, {} edges, mean total degree {:.2}",
            stats.node_count,
            stats.edge_count,
            stats.mean_total_degree
        );
        graph.save_csv(self.out(GRAPH_FILE))?;
        Ok(())
    }

    /// Pseudo-label seed users and write `seeds.csv`.
    pub fn seed(&self) -> Result<()> {
        let users = corpus::load_users(Self::require(self.out(FILTERED_USERS))?)?;
        let endorsements_path =
            Self::require(self.input(&self.cfg.paths.endorsements, "endorsements.csv"))?;
        let endorsements = corpus::load_endorsements(&endorsements_path)?;
        let lexicon = match &self.cfg.paths.lexicon {
            Some(path) => HashtagLexicon::load_csv(Self::require(path.clone())?)?,
            None => HashtagLexicon::builtin(),
        };
        let media = match &self.cfg.paths.media {
            Some(path) => MediaTable::load_csv(Self::require(path.clone())?)?,
            None => MediaTable::builtin(),
        };
        let (seeds, summary) = generate_seeds(&users, &endorsements, &lexicon, &media, &self.cfg.seeding);
        log::info!(
            target: "seed",
            "{} seeds (hashtag {}, media {}, overlap {}, conflicts {}), left fraction {:.3}",
            summary.n_seeds,
            summary.n_hashtag,
            summary.n_media,
            summary.n_overlap,
            summary.n_conflict,
            summary.left_fraction
        );
        save_seeds(self.out(SEEDS_FILE), &seeds)?;
        Ok(())
    }

    /// Unsupervised Siamese training over the retweet graph; writes the
    /// encoder checkpoint.
    pub fn train(&self) -> Result<()> {
        let (users, graph) = self.load_working_set()?;
        let triplet = self.cfg.triplet_seeded();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(triplet.rng_seed, "enc-init"));
        let params = self.cfg.encoder.init_params(&mut rng);
        let (params, report) = train_unsupervised(&graph, &users, params, &triplet)?;
        if let Some(last) = report.epoch_mean_loss.last() {
            log::info!(
                target: "train",
                "finished {} epochs, final mean loss {:.6}",
                report.epoch_mean_loss.len(),
                last
            );
        }
        params.save(self.out(ENCODER_FILE))?;
        Ok(())
    }

    /// Cross-validate the configured models and write `metrics.json`.
    pub fn evaluate(&self, model_override: Option<&str>) -> Result<Vec<CrossValReport>> {
        let (users, graph) = self.load_working_set()?;
        let seeds = load_seeds(Self::require(self.out(SEEDS_FILE))?)?;
        let model_names: Vec<String> = match model_override {
            Some(name) => vec![name.to_owned()],
            None => self.cfg.eval.models.clone(),
        };
        let models: Vec<ModelId> = model_names
            .iter()
            .map(|name| ModelId::parse(name))
            .collect::<Result<_>>()?;

        let vectors = if models.contains(&ModelId::AvgVectors) {
            let path = Self::require(self.input(&self.cfg.paths.vectors, "vectors.txt"))?;
            Some(ExternalVectors::load(path)?)
        } else {
            None
        };
        let data = EvalDataset {
            users: &users,
            graph: &graph,
            seeds: &seeds,
            vectors: vectors.as_ref(),
        };
        let eval_cfg = self.cfg.eval_config();

        let mut reports = Vec::new();
        for model in models {
            let report = cross_validate(model, &data, &eval_cfg)?;
            log::info!(
                target: "evaluate",
                "{}: acc {:.3}, auc {}, macro-F1 {:.3}{}",
                report.model,
                report.mean.acc,
                report
                    .mean
                    .auc
                    .map_or_else(|| "n/a".to_owned(), |a| format!("{a:.3}")),
                report.mean.f1,
                report
                    .best_c
                    .map_or_else(String::new, |c| format!(" (C = {c})"))
            );
            reports.push(report);
        }

        let path = self.out(METRICS_FILE);
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &reports)
            .map_err(|e| Error::format(&path, e.to_string()))?;
        Ok(reports)
    }

    /// Fit the final head on all seeds and score every user.
    pub fn predict(&self) -> Result<()> {
        let users = corpus::load_users(Self::require(self.out(FILTERED_USERS))?)?;
        let seeds = load_seeds(Self::require(self.out(SEEDS_FILE))?)?;
        let params = EncoderParams::load(Self::require(self.out(ENCODER_FILE))?)?;
        let head = fit_head(&params, &users, &seeds, self.cfg.head.c)?;
        head.save(self.out(HEAD_FILE))?;
        let scores: Vec<_> = users.iter().map(|u| predict(&params, &head, u)).collect();
        save_scores(self.out(SCORES_FILE), &scores)?;
        log::info!(target: "predict", "scored {} users", scores.len());
        Ok(())
    }

    /// Partition scored users and write the echo-chamber report.
    pub fn analyze(&self) -> Result<()> {
        let (_, graph) = self.load_working_set()?;
        let scores = load_scores(Self::require(self.out(SCORES_FILE))?)?;
        let report = echo_report(&graph, &scores, self.cfg.analysis.q, self.cfg.analysis.top_n)?;
        log::info!(
            target: "analyze",
            "own-group audience fraction: far-right {:.3}, far-left {:.3}",
            report.far_right.mean_own_group_fraction(),
            report.far_left.mean_own_group_fraction()
        );
        report.save_json(self.out(REPORT_JSON))?;
        report.save_csv(self.out(REPORT_CSV))?;
        Ok(())
    }

    /// Chain every stage after corpus generation.
    pub fn run_all(&self) -> Result<()> {
        self.ingest()?;
        self.build_graph()?;
        self.seed()?;
        self.train()?;
        self.evaluate(None)?;
        self.predict()?;
        self.analyze()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = PipelineConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: PipelineConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn empty_config_file_is_all_defaults() {
        let parsed: PipelineConfig = toml::from_str("").unwrap();
        assert_eq!(parsed, PipelineConfig::default());
    }

    #[test]
    fn unknown_section_is_a_schema_violation() {
        let err = toml::from_str::<PipelineConfig>("[not_a_section]\nx = 1\n").unwrap_err();
        assert!(err.to_string().contains("not_a_section"));
    }

    #[test]
    fn bad_field_value_names_the_field() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "[analysis]\nq = 0.9\n").unwrap();
        let err = PipelineConfig::load(f.path()).unwrap_err();
        assert!(err.to_string().contains("analysis.q"), "{err}");
    }

    #[test]
    fn missing_config_file_is_reported() {
        assert!(matches!(
            PipelineConfig::load("/nonexistent/config.toml"),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn stage_seeds_differ_but_are_stable() {
        let cfg = PipelineConfig::default();
        assert_ne!(cfg.triplet_seeded().rng_seed, cfg.walk_seeded().rng_seed);
        assert_eq!(cfg.triplet_seeded(), cfg.triplet_seeded());
    }

    #[test]
    fn missing_inputs_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            out_dir: dir.path().join("out"),
            ..PipelineConfig::default()
        };
        let pipeline = Pipeline::new(cfg).unwrap();
        let err = pipeline.ingest().unwrap_err();
        match err {
            Error::MissingInput(path) => {
                assert!(path.ends_with("users.jsonl"), "{}", path.display())
            }
            other => panic!("expected MissingInput, got {other}"),
        }
    }
}
