//! Stage orchestration over an artifact directory.
//!
//! Each stage records a fingerprint of its parameters, its input files and
//! the fingerprints of the stages it reads from. A stage whose fingerprint
//! and outputs are already on disk is skipped unless the pipeline is forced.

mod config;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::{load_config, AudioConfig, PipelineConfig};

use crate::audio::{
    histogram_vectors, load_training_dir, represent_audio, svm_train, AudioHistograms, AudioModels, ClassTaxonomy,
    SvmModel, TaxonomyKind,
};
use crate::corpus::{load_manifest, load_tags, ArtifactStore, AudioInputKind, CorpusManifest, MovieRecord};
use crate::error::{Error, Result};
use crate::eval::{evaluate, ground_truth, EvalReport, ReportTable};
use crate::similarity::{
    fuse, metadata_vectors, search_weights, similarity_matrix, FusionWeights, Modality, ModalityVectors,
    SimilarityMatrix, WeightSearch,
};
use crate::text::{bundled_stopwords, ingest_text, load_stopwords, BowCorpus, IngestStats, Lemmatizer};
use crate::topics::{
    lda_doc_topics, lda_fit, lsi_fit, tfidf, topic_top_words, LdaModel, LsiModel, TfidfMatrix, TopicSummary,
};

/// Artifact names shared by the pipeline, the service and the tests.
pub mod names {
    pub const MOVIES: &str = "movies";
    pub const BOW: &str = "bow";
    pub const INGEST_STATS: &str = "ingest_stats";
    pub const TFIDF: &str = "tfidf";
    pub const LSI: &str = "lsi";
    pub const LDA: &str = "lda";
    pub const AUDIO: &str = "audio_histograms";
    pub const GROUND_TRUTH: &str = "ground_truth";
    pub const GROUND_TRUTH_INFO: &str = "ground_truth_info";
    pub const SEARCH: &str = "search";
    pub const FUSED_BEST: &str = "fused_best";
    pub const FUSED: &str = "fused";
    pub const REPORT: &str = "report";

    pub fn svm(kind: crate::audio::TaxonomyKind) -> String {
        format!("svm_{kind}")
    }

    pub fn similarity(m: crate::similarity::Modality) -> String {
        format!("sim_{m}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ran,
    Cached,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: String,
    pub status: StageStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StageStamp {
    stage: String,
    fingerprint: String,
}

#[derive(Debug, Clone, Copy)]
enum Output<'a> {
    Json(&'a str),
    Matrix(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthInfo {
    pub tag_space_size: usize,
    pub movies: usize,
}

/// Best weights for one set of modalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionResult {
    pub label: String,
    pub modalities: Vec<Modality>,
    pub search: WeightSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub step: f64,
    /// Search over every usable fusion modality.
    pub best: FusionResult,
    /// Every subset of two or more usable modalities.
    pub subsets: Vec<FusionResult>,
    /// Requested modalities left out because no movie has data for them.
    pub unusable: Vec<Modality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub table: ReportTable,
    pub best_weights: Option<FusionWeights>,
    pub tag_space_size: usize,
    /// Modalities with no rankable movie, absent from the table.
    pub unrankable: Vec<Modality>,
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha_hex(&bytes))
}

/// Which CLI command produces a stage, for error hints.
fn producing_command(stage: &str) -> &str {
    match stage {
        "ingest" => "ingest-text",
        "tfidf" => "train-tfidf",
        "lsi" => "train-lsi",
        "lda" => "train-lda",
        "svm_genre" | "svm_event" => "audio-train",
        "audio" => "audio-represent",
        "ground_truth" => "evaluate",
        "search" => "search-weights",
        s if s.starts_with("sim_") => "similarity",
        _ => "run-all",
    }
}

pub struct Pipeline {
    cfg: PipelineConfig,
    store: ArtifactStore,
    force: bool,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, force: bool) -> Result<Self> {
        let store = ArtifactStore::open(&cfg.artifacts)?;
        Ok(Pipeline { cfg, store, force })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn store(&self) -> &ArtifactStore {
        &self.store
    }

    pub fn manifest(&self) -> Result<CorpusManifest> {
        load_manifest(self.cfg.manifest_path()?)
    }

    fn stamp_name(stage: &str) -> String {
        format!("stamp_{stage}")
    }

    fn stamp(&self, stage: &str) -> Option<String> {
        self.store
            .load_json::<StageStamp>(&Self::stamp_name(stage))
            .ok()
            .map(|s| s.fingerprint)
    }

    fn upstream(&self, stage: &str, needs: &str) -> Result<String> {
        self.stamp(needs).ok_or_else(|| {
            Error::Parameter(format!(
                "stage `{stage}` needs the output of `{needs}`; run `{}` first",
                producing_command(needs)
            ))
        })
    }

    fn fingerprint(stage: &str, params: serde_json::Value, upstream: &[String]) -> String {
        let doc = json!({ "stage": stage, "params": params, "upstream": upstream });
        sha_hex(doc.to_string().as_bytes())
    }

    fn outputs_present(&self, outputs: &[Output<'_>]) -> bool {
        outputs.iter().all(|o| match o {
            Output::Json(n) => self.store.has_json(n),
            Output::Matrix(n) => self.store.has_matrix(n),
        })
    }

    fn run_stage(
        &self,
        stage: &str,
        fingerprint: String,
        outputs: &[Output<'_>],
        body: impl FnOnce() -> Result<()>,
    ) -> Result<StageOutcome> {
        if !self.force && self.stamp(stage).as_deref() == Some(fingerprint.as_str()) && self.outputs_present(outputs) {
            tracing::info!(stage, "up to date");
            return Ok(StageOutcome {
                stage: stage.to_string(),
                status: StageStatus::Cached,
            });
        }
        let wrap = |e: Error| Error::Stage {
            stage: stage.to_string(),
            source: Box::new(e),
        };
        self.store.remove(&Self::stamp_name(stage)).map_err(wrap)?;
        tracing::info!(stage, "running");
        if let Err(e) = body() {
            for o in outputs {
                let (Output::Json(n) | Output::Matrix(n)) = o;
                if let Err(cleanup) = self.store.remove(n) {
                    tracing::warn!(stage, artifact = n, error = %cleanup, "could not remove partial artifact");
                }
            }
            return Err(wrap(e));
        }
        self.store
            .save_json(
                &Self::stamp_name(stage),
                &StageStamp {
                    stage: stage.to_string(),
                    fingerprint,
                },
            )
            .map_err(wrap)?;
        Ok(StageOutcome {
            stage: stage.to_string(),
            status: StageStatus::Ran,
        })
    }

    fn stopwords(&self) -> Result<HashSet<String>> {
        let mut set = bundled_stopwords();
        if let Some(p) = &self.cfg.stopwords {
            set.extend(load_stopwords(p)?);
        }
        Ok(set)
    }

    pub fn ingest(&self) -> Result<StageOutcome> {
        let stage = "ingest";
        let manifest_path = self.cfg.manifest_path()?;
        let manifest = self.manifest().map_err(|e| Error::Stage {
            stage: stage.into(),
            source: Box::new(e),
        })?;
        let mut inputs = BTreeMap::new();
        inputs.insert("manifest".to_string(), file_digest(manifest_path)?);
        for (id, p) in &manifest.subtitle_paths {
            inputs.insert(format!("subtitle:{id}"), file_digest(p)?);
        }
        if let Some(p) = &self.cfg.stopwords {
            inputs.insert("stopwords".into(), file_digest(p)?);
        }
        let params = json!({ "filter": self.cfg.filter, "inputs": inputs });
        let fp = Self::fingerprint(stage, params, &[]);
        let outputs = [
            Output::Json(names::MOVIES),
            Output::Json(names::BOW),
            Output::Json(names::INGEST_STATS),
        ];
        self.run_stage(stage, fp, &outputs, || {
            let ingest = ingest_text(&manifest, &Lemmatizer::bundled(), &self.stopwords()?, &self.cfg.filter)?;
            self.store.save_json(names::MOVIES, &manifest.movies)?;
            self.store.save_json(names::BOW, &ingest.bow)?;
            self.store.save_json(names::INGEST_STATS, &ingest.stats)?;
            Ok(())
        })
    }

    pub fn train_tfidf(&self) -> Result<StageOutcome> {
        let stage = "tfidf";
        let fp = Self::fingerprint(stage, json!({}), &[self.upstream(stage, "ingest")?]);
        self.run_stage(stage, fp, &[Output::Json(names::TFIDF)], || {
            let bow: BowCorpus = self.store.load_json(names::BOW)?;
            self.store.save_json(names::TFIDF, &tfidf(&bow)?)?;
            Ok(())
        })
    }

    pub fn train_lsi(&self) -> Result<StageOutcome> {
        let stage = "lsi";
        let fp = Self::fingerprint(stage, json!({ "k": self.cfg.k }), &[self.upstream(stage, "tfidf")?]);
        self.run_stage(stage, fp, &[Output::Json(names::LSI)], || {
            let tf: TfidfMatrix = self.store.load_json(names::TFIDF)?;
            self.store.save_json(names::LSI, &lsi_fit(&tf, self.cfg.k)?)?;
            Ok(())
        })
    }

    pub fn train_lda(&self) -> Result<StageOutcome> {
        let stage = "lda";
        let lda_cfg = self.cfg.lda();
        let fp = Self::fingerprint(stage, json!(lda_cfg), &[self.upstream(stage, "ingest")?]);
        self.run_stage(stage, fp, &[Output::Json(names::LDA)], || {
            let bow: BowCorpus = self.store.load_json(names::BOW)?;
            self.store.save_json(names::LDA, &lda_fit(&bow, &lda_cfg)?)?;
            Ok(())
        })
    }

    /// Trains one audio classifier from a directory of `<label>.csv` files.
    pub fn audio_train(&self, kind: TaxonomyKind, data: &Path) -> Result<StageOutcome> {
        let stage = names::svm(kind);
        let mut files = BTreeMap::new();
        let entries = std::fs::read_dir(data).map_err(|e| Error::io(data, e))?;
        for entry in entries {
            let p = entry.map_err(|e| Error::io(data, e))?.path();
            if p.extension().and_then(|e| e.to_str()) == Some("csv") {
                files.insert(p.display().to_string(), file_digest(&p)?);
            }
        }
        let fp = Self::fingerprint(&stage, json!({ "svm": self.cfg.audio.svm, "files": files }), &[]);
        self.run_stage(&stage, fp, &[Output::Json(&stage)], || {
            let taxonomy = ClassTaxonomy::of(kind);
            let examples = load_training_dir(data, &taxonomy)?;
            let model = svm_train(&examples, &taxonomy, &self.cfg.audio.svm)?;
            self.store.save_json(&names::svm(kind), &model)?;
            Ok(())
        })
    }

    pub fn audio_represent(&self) -> Result<StageOutcome> {
        let stage = "audio";
        let manifest = self.manifest()?;
        let mut inputs = BTreeMap::new();
        for (id, input) in &manifest.audio_input {
            inputs.insert(id.clone(), (input.kind, file_digest(&input.path)?));
        }
        let needs_models = manifest
            .audio_input
            .values()
            .any(|i| i.kind == AudioInputKind::Features);
        let mut upstream = vec![self.upstream(stage, "ingest")?];
        if needs_models {
            for kind in TaxonomyKind::ALL {
                upstream.push(self.upstream(stage, &names::svm(kind))?);
            }
        }
        let params = json!({ "features": self.cfg.audio.features, "inputs": inputs });
        let fp = Self::fingerprint(stage, params, &upstream);
        self.run_stage(stage, fp, &[Output::Json(names::AUDIO)], || {
            let (genre, event) = if needs_models {
                (
                    Some(self.store.load_json::<SvmModel>(&names::svm(TaxonomyKind::Genre))?),
                    Some(self.store.load_json::<SvmModel>(&names::svm(TaxonomyKind::Event))?),
                )
            } else {
                (None, None)
            };
            let models = AudioModels {
                genre: genre.as_ref(),
                event: event.as_ref(),
            };
            let hists = represent_audio(&manifest, models, &self.cfg.audio.features)?;
            self.store.save_json(names::AUDIO, &hists)?;
            Ok(())
        })
    }

    fn modality_source(m: Modality) -> &'static str {
        match m {
            Modality::Tfidf => "tfidf",
            Modality::Lsi => "lsi",
            Modality::Lda => "lda",
            Modality::AudioEvent | Modality::AudioGenre => "audio",
            Modality::Metadata => "ingest",
        }
    }

    /// Dense movie vectors of one modality, from stored artifacts.
    pub fn modality_vectors(&self, m: Modality) -> Result<ModalityVectors> {
        let movies: Vec<MovieRecord> = self.store.load_json(names::MOVIES)?;
        let order: Vec<String> = movies.iter().map(|r| r.id.clone()).collect();
        let vectors = match m {
            Modality::Tfidf => {
                let tf: TfidfMatrix = self.store.load_json(names::TFIDF)?;
                ModalityVectors::new(m, tf.movie_order, tf.rows)?
            }
            Modality::Lsi => {
                let lsi: LsiModel = self.store.load_json(names::LSI)?;
                ModalityVectors::new(m, lsi.movie_order, lsi.doc_vectors)?
            }
            Modality::Lda => {
                let lda: LdaModel = self.store.load_json(names::LDA)?;
                let theta = lda_doc_topics(&lda);
                ModalityVectors::new(m, lda.movie_order, theta)?
            }
            Modality::AudioEvent | Modality::AudioGenre => {
                let hists: AudioHistograms = self.store.load_json(names::AUDIO)?;
                let kind = if m == Modality::AudioEvent {
                    TaxonomyKind::Event
                } else {
                    TaxonomyKind::Genre
                };
                histogram_vectors(&hists, kind)?
            }
            Modality::Metadata => metadata_vectors(&movies)?,
        };
        if vectors.movie_order != order {
            return Err(Error::Validation(format!(
                "{m} artifacts use a different movie order than the ingested corpus; rerun with --force"
            )));
        }
        Ok(vectors)
    }

    pub fn similarity(&self, m: Modality) -> Result<StageOutcome> {
        let stage = names::similarity(m);
        let fp = Self::fingerprint(
            &stage,
            json!({}),
            &[
                self.upstream(&stage, "ingest")?,
                self.upstream(&stage, Self::modality_source(m))?,
            ],
        );
        self.run_stage(&stage, fp, &[Output::Matrix(&stage)], || {
            let matrix = similarity_matrix(&self.modality_vectors(m)?)?;
            self.store.save_matrix(&stage, &matrix)?;
            Ok(())
        })
    }

    pub fn matrix(&self, m: Modality) -> Result<SimilarityMatrix> {
        self.store.load_matrix(&names::similarity(m))
    }

    pub fn ground_truth(&self) -> Result<StageOutcome> {
        let stage = "ground_truth";
        let manifest = self.manifest()?;
        let tags_path = manifest
            .tags_path
            .clone()
            .ok_or_else(|| Error::NoGroundTruth("the manifest lists no tags file".into()))?;
        let fp = Self::fingerprint(
            stage,
            json!({ "tags": file_digest(&tags_path)? }),
            &[self.upstream(stage, "ingest")?],
        );
        let outputs = [
            Output::Matrix(names::GROUND_TRUTH),
            Output::Json(names::GROUND_TRUTH_INFO),
        ];
        self.run_stage(stage, fp, &outputs, || {
            let tags = load_tags(&tags_path)?;
            let gt = ground_truth(&tags, &manifest.movie_order())?;
            self.store.save_matrix(names::GROUND_TRUTH, &gt.matrix)?;
            self.store.save_json(
                names::GROUND_TRUTH_INFO,
                &GroundTruthInfo {
                    tag_space_size: gt.tag_space_size,
                    movies: gt.matrix.len(),
                },
            )?;
            Ok(())
        })
    }

    fn load_ground_truth(&self) -> Result<SimilarityMatrix> {
        if !self.store.has_matrix(names::GROUND_TRUTH) {
            return Err(Error::NoGroundTruth(
                "no ground-truth matrix in the artifact directory; the manifest needs a tags file".into(),
            ));
        }
        self.store.load_matrix(names::GROUND_TRUTH)
    }

    pub fn search(&self) -> Result<StageOutcome> {
        let stage = "search";
        let mut upstream = vec![self.upstream(stage, "ground_truth")?];
        for &m in &self.cfg.fusion_modalities {
            upstream.push(self.upstream(stage, &names::similarity(m))?);
        }
        let params = json!({ "step": self.cfg.step, "modalities": self.cfg.fusion_modalities });
        let fp = Self::fingerprint(stage, params, &upstream);
        let outputs = [Output::Json(names::SEARCH), Output::Matrix(names::FUSED_BEST)];
        self.run_stage(stage, fp, &outputs, || {
            let gt = self.load_ground_truth()?;
            let summary = self.search_all(&gt)?;
            let all: BTreeMap<Modality, SimilarityMatrix> = summary
                .best
                .modalities
                .iter()
                .map(|&m| self.matrix(m).map(|x| (m, x)))
                .collect::<Result<_>>()?;
            self.store
                .save_matrix(names::FUSED_BEST, &fuse(&all, &summary.best.search.weights)?)?;
            self.store.save_json(names::SEARCH, &summary)?;
            Ok(())
        })
    }

    fn search_all(&self, gt: &SimilarityMatrix) -> Result<SearchSummary> {
        let mut usable = Vec::new();
        let mut unusable = Vec::new();
        let mut matrices = BTreeMap::new();
        let mut requested = self.cfg.fusion_modalities.clone();
        requested.sort();
        requested.dedup();
        for m in requested {
            let matrix = self.matrix(m)?;
            if matrix.flagged().iter().all(|&f| f) {
                tracing::warn!(modality = %m, "no movie has data; left out of the weight search");
                unusable.push(m);
            } else {
                usable.push(m);
                matrices.insert(m, matrix);
            }
        }
        if usable.is_empty() {
            return Err(Error::Validation("no fusion modality has any data".into()));
        }
        let run = |subset: &[Modality]| -> Result<FusionResult> {
            let mats: BTreeMap<Modality, SimilarityMatrix> = subset.iter().map(|m| (*m, matrices[m].clone())).collect();
            let mut search = search_weights(&mats, Some(gt), self.cfg.step)?;
            let label = subset_label(subset)?;
            search.report.model = label.clone();
            Ok(FusionResult {
                label,
                modalities: subset.to_vec(),
                search,
            })
        };
        let best = run(&usable)?;
        let mut subsets = Vec::new();
        for size in 2..=usable.len() {
            for subset in combinations(&usable, size) {
                subsets.push(run(&subset)?);
            }
        }
        Ok(SearchSummary {
            step: self.cfg.step,
            best,
            subsets,
            unusable,
        })
    }

    pub fn report(&self) -> Result<StageOutcome> {
        let stage = "report";
        let mut upstream = vec![self.upstream(stage, "ground_truth")?, self.upstream(stage, "search")?];
        for m in Modality::ALL {
            upstream.push(self.upstream(stage, &names::similarity(m))?);
        }
        let fp = Self::fingerprint(stage, json!({}), &upstream);
        self.run_stage(stage, fp, &[Output::Json(names::REPORT)], || {
            let report = self.build_report()?;
            self.store.save_json(names::REPORT, &report)?;
            Ok(())
        })
    }

    fn build_report(&self) -> Result<PipelineReport> {
        let gt = self.load_ground_truth()?;
        let info: GroundTruthInfo = self.store.load_json(names::GROUND_TRUTH_INFO)?;
        let mut singular = Vec::new();
        let mut unrankable = Vec::new();
        for m in Modality::ALL {
            let matrix = self.matrix(m)?;
            if matrix.flagged().iter().all(|&f| f) {
                unrankable.push(m);
                continue;
            }
            singular.push(evaluate(m.display_name(), &matrix, &gt)?);
        }
        let summary: SearchSummary = self.store.load_json(names::SEARCH)?;
        let fusion = if summary.subsets.is_empty() {
            vec![summary.best.search.report.clone()]
        } else {
            summary.subsets.iter().map(|r| r.search.report.clone()).collect()
        };
        Ok(PipelineReport {
            table: ReportTable { singular, fusion },
            best_weights: Some(summary.best.search.weights),
            tag_space_size: info.tag_space_size,
            unrankable,
        })
    }

    /// Metrics of stored modality matrices against the ground truth.
    pub fn evaluate_models(&self, models: &[Modality]) -> Result<Vec<EvalReport>> {
        let gt = self.load_ground_truth()?;
        models
            .iter()
            .map(|&m| evaluate(m.display_name(), &self.matrix(m)?, &gt))
            .collect()
    }

    pub fn evaluate_fused(&self, weights: &FusionWeights) -> Result<EvalReport> {
        let gt = self.load_ground_truth()?;
        evaluate(&weights.label(), &self.fuse(weights)?, &gt)
    }

    /// Fuses stored modality matrices; does not persist.
    pub fn fuse(&self, weights: &FusionWeights) -> Result<SimilarityMatrix> {
        let mats: BTreeMap<Modality, SimilarityMatrix> = weights
            .iter()
            .map(|(m, _)| self.matrix(m).map(|x| (m, x)))
            .collect::<Result<_>>()?;
        fuse(&mats, weights)
    }

    pub fn export_topics(&self, n: usize) -> Result<Vec<TopicSummary>> {
        let lda: LdaModel = self.store.load_json(names::LDA)?;
        (0..lda.num_topics).map(|t| topic_top_words(&lda, t, n)).collect()
    }

    pub fn ingest_stats(&self) -> Result<Vec<IngestStats>> {
        self.store.load_json(names::INGEST_STATS)
    }

    pub fn load_report(&self) -> Result<PipelineReport> {
        self.store.load_json(names::REPORT)
    }

    /// Every stage in dependency order. Evaluation stages are skipped when
    /// the manifest has no tags file.
    pub fn run_all(&self) -> Result<Vec<StageOutcome>> {
        let mut out = vec![
            self.ingest()?,
            self.train_tfidf()?,
            self.train_lsi()?,
            self.train_lda()?,
        ];
        let audio = &self.cfg.audio;
        for (kind, dir) in [
            (TaxonomyKind::Genre, &audio.genre_data),
            (TaxonomyKind::Event, &audio.event_data),
        ] {
            if let Some(dir) = dir {
                out.push(self.audio_train(kind, dir)?);
            }
        }
        out.push(self.audio_represent()?);
        for m in Modality::ALL {
            out.push(self.similarity(m)?);
        }
        if self.manifest()?.tags_path.is_none() {
            tracing::warn!("manifest lists no tags file; skipping ground truth, weight search and report");
            for stage in ["ground_truth", "search", "report"] {
                out.push(StageOutcome {
                    stage: stage.into(),
                    status: StageStatus::Skipped,
                });
            }
            return Ok(out);
        }
        out.push(self.ground_truth()?);
        out.push(self.search()?);
        out.push(self.report()?);
        Ok(out)
    }
}

fn subset_label(subset: &[Modality]) -> Result<String> {
    Ok(FusionWeights::normalized(subset.iter().map(|&m| (m, 1.0)).collect())?.label())
}

fn combinations(items: &[Modality], size: usize) -> Vec<Vec<Modality>> {
    fn go(items: &[Modality], size: usize, start: usize, cur: &mut Vec<Modality>, out: &mut Vec<Vec<Modality>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        let m = [
            Modality::Lda,
            Modality::AudioEvent,
            Modality::AudioGenre,
            Modality::Metadata,
        ];
        let total: usize = (2..=4).map(|k| combinations(&m, k).len()).sum();
        assert_eq!(total, 11);
        assert_eq!(combinations(&m, 2)[0], vec![Modality::Lda, Modality::AudioEvent]);
    }

    #[test]
    fn subset_labels_lead_with_metadata() {
        assert_eq!(
            subset_label(&[Modality::Lda, Modality::AudioEvent, Modality::Metadata]).unwrap(),
            "MD + T + A"
        );
    }

    #[test]
    fn stage_needs_upstream() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            artifacts: dir.path().to_path_buf(),
            ..PipelineConfig::default()
        };
        let p = Pipeline::new(cfg, false).unwrap();
        let err = p.train_lsi().unwrap_err().to_string();
        assert!(err.contains("train-tfidf"), "{err}");
        assert!(matches!(p.ingest(), Err(Error::Parameter(_))));
    }
}
