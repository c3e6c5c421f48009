use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio::{FeatureConfig, SvmConfig};
use crate::error::{Error, Result};
use crate::similarity::Modality;
use crate::text::FilterConfig;
use crate::topics::LdaConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AudioConfig {
    pub features: FeatureConfig,
    pub svm: SvmConfig,
    /// Training directories (`<label>.csv` per class) for the two classifiers.
    pub genre_data: Option<PathBuf>,
    pub event_data: Option<PathBuf>,
}

/// Everything a pipeline run needs. Field names match the CLI flags that
/// override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub manifest: Option<PathBuf>,
    pub artifacts: PathBuf,
    pub filter: FilterConfig,
    /// Extra stopword list added to the bundled ones.
    pub stopwords: Option<PathBuf>,
    /// LDA topic count.
    pub t: usize,
    /// Defaults to 50 / t.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iters: usize,
    pub seed: u64,
    pub average_last: usize,
    /// LSI dimensions.
    pub k: usize,
    pub audio: AudioConfig,
    /// Grid step of the weight search.
    pub step: f64,
    pub fusion_modalities: Vec<Modality>,
    pub port: u16,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            manifest: None,
            artifacts: PathBuf::from("artifacts"),
            filter: FilterConfig::default(),
            stopwords: None,
            t: 55,
            alpha: None,
            beta: 0.01,
            iters: 1000,
            seed: 0,
            average_last: 0,
            k: 35,
            audio: AudioConfig::default(),
            step: 0.05,
            fusion_modalities: vec![
                Modality::Lda,
                Modality::AudioEvent,
                Modality::AudioGenre,
                Modality::Metadata,
            ],
            port: 8080,
        }
    }
}

impl PipelineConfig {
    pub fn lda(&self) -> LdaConfig {
        LdaConfig {
            topics: self.t,
            alpha: self.alpha.unwrap_or(50.0 / self.t.max(1) as f64),
            beta: self.beta,
            iterations: self.iters,
            seed: self.seed,
            average_last: self.average_last,
        }
    }

    pub fn manifest_path(&self) -> Result<&Path> {
        self.manifest
            .as_deref()
            .ok_or_else(|| Error::Parameter("no manifest given (set `manifest` or pass --manifest)".into()))
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.manifest.as_mut() {
            fix(p);
        }
        fix(&mut self.artifacts);
        if let Some(p) = self.stopwords.as_mut() {
            fix(p);
        }
        if let Some(p) = self.audio.genre_data.as_mut() {
            fix(p);
        }
        if let Some(p) = self.audio.event_data.as_mut() {
            fix(p);
        }
    }
}

/// Reads a JSON config; relative paths inside it are taken relative to the
/// file's directory.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut cfg: PipelineConfig =
        serde_json::from_slice(&bytes).map_err(|e| Error::parse(path.display(), e.to_string()))?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}
