//! Text representations built from a bag-of-words corpus.

mod lda;
mod lsi;
mod svd;
mod tfidf;

pub use lda::{lda_doc_topics, lda_fit, lda_fit_with, topic_top_words, LdaConfig, LdaModel, TopWord, TopicSummary};
pub use lsi::{lsi_fit, LsiModel};
pub use svd::{thin_svd, ThinSvd};
pub use tfidf::{tfidf, TfidfMatrix};
