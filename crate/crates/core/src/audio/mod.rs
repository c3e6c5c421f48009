//! Audio representations: per-movie histograms of classified segment labels
//! over the music-genre and audio-event taxonomies.

mod features;
mod histogram;
mod ingest;
mod svm;
mod taxonomy;
mod wav;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use features::{
    extract_features, short_term_features, FeatureConfig, Pcm, SegmentFeatures, SEGMENT_DIM, SHORT_TERM_FEATURES,
};
pub use histogram::{class_histogram, ClassHistogram};
pub use ingest::{
    load_feature_csv, load_label_file, load_training_dir, parse_feature_csv, parse_label_file, parse_mixed_labels,
};
pub use svm::{
    classify_segments, svm_objective, svm_train, svm_train_classes, LabeledSegment, Standardizer, SvmConfig, SvmModel,
};
pub use taxonomy::{taxonomy_of_label, ClassTaxonomy, TaxonomyKind, EVENT_LABELS, GENRE_LABELS};
pub use wav::read_wav;

use crate::corpus::{AudioInput, AudioInputKind, CorpusManifest};
use crate::error::{Error, Result};
use crate::similarity::{Modality, ModalityVectors};

/// Histograms for every manifest movie, in manifest order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioHistograms {
    pub genre: Vec<ClassHistogram>,
    pub event: Vec<ClassHistogram>,
}

impl AudioHistograms {
    pub fn of_kind(&self, kind: TaxonomyKind) -> &[ClassHistogram] {
        match kind {
            TaxonomyKind::Genre => &self.genre,
            TaxonomyKind::Event => &self.event,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AudioModels<'a> {
    pub genre: Option<&'a SvmModel>,
    pub event: Option<&'a SvmModel>,
}

/// Segment features for a `features` input: WAV files are analysed, anything
/// else is read as a feature CSV.
pub fn input_features(movie_id: &str, input: &AudioInput, cfg: &FeatureConfig) -> Result<SegmentFeatures> {
    let is_wav = input
        .path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        extract_features(movie_id, &read_wav(&input.path)?, cfg)
    } else {
        load_feature_csv(&input.path, movie_id)
    }
}

fn movie_histograms(
    movie_id: &str,
    input: Option<&AudioInput>,
    models: AudioModels<'_>,
    cfg: &FeatureConfig,
) -> Result<(ClassHistogram, ClassHistogram)> {
    let genre_t = ClassTaxonomy::genre();
    let event_t = ClassTaxonomy::event();
    let Some(input) = input else {
        return Ok((
            ClassHistogram::empty(movie_id, TaxonomyKind::Genre),
            ClassHistogram::empty(movie_id, TaxonomyKind::Event),
        ));
    };
    let (genre, event) = match input.kind {
        AudioInputKind::Labels => {
            let bytes = std::fs::read(&input.path).map_err(|e| Error::io(&input.path, e))?;
            parse_mixed_labels(&bytes, &input.path.display().to_string())?
        }
        AudioInputKind::Features => {
            let feats = input_features(movie_id, input, cfg)?;
            let classify = |model: Option<&SvmModel>, kind: TaxonomyKind| {
                let model = model.ok_or_else(|| {
                    Error::Parameter(format!(
                        "{movie_id} has audio features but no {kind} classifier is trained (run audio-train --kind {kind})"
                    ))
                })?;
                if model.kind() != Some(kind) {
                    return Err(Error::Validation(format!(
                        "classifier supplied for {kind} was trained on another taxonomy"
                    )));
                }
                classify_segments(model, &feats)
            };
            (
                classify(models.genre, TaxonomyKind::Genre)?,
                classify(models.event, TaxonomyKind::Event)?,
            )
        }
    };
    Ok((
        class_histogram(movie_id, &genre, &genre_t)?,
        class_histogram(movie_id, &event, &event_t)?,
    ))
}

/// Builds both histograms for every movie. Movies without audio input get
/// flagged all-zero histograms.
pub fn represent_audio(
    manifest: &CorpusManifest,
    models: AudioModels<'_>,
    cfg: &FeatureConfig,
) -> Result<AudioHistograms> {
    let pairs = manifest
        .movies
        .par_iter()
        .map(|m| movie_histograms(&m.id, manifest.audio_input.get(&m.id), models, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (genre, event) = pairs.into_iter().unzip();
    Ok(AudioHistograms { genre, event })
}

pub fn histogram_vectors(hists: &AudioHistograms, kind: TaxonomyKind) -> Result<ModalityVectors> {
    let h = hists.of_kind(kind);
    let modality = match kind {
        TaxonomyKind::Genre => Modality::AudioGenre,
        TaxonomyKind::Event => Modality::AudioEvent,
    };
    ModalityVectors::new(
        modality,
        h.iter().map(|x| x.movie_id.clone()).collect(),
        h.iter().map(|x| x.proportions.clone()).collect(),
    )
}
