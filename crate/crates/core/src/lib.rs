//! Batch toolkit for acoustic analysis of aggression in speech.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`corpus`] — parse WAV audio and Praat TextGrid annotations into
//!    class-labeled [`corpus::Segment`]s.
//! 2. [`dsp`] — extract per-frame low-level descriptors (F0, intensity,
//!    spectral flux, voice quality, and the extended spectral set) and
//!    summarize them into per-segment feature vectors.
//! 3. [`stats`] — one-way ANOVA plus Tukey HSD pairwise tests over the
//!    study features, per class.
//! 4. [`classifier`] / [`ablation`] — one-vs-one SVM (SMO) with grid
//!    search on a stratified 80:10:10 split, evaluation reports, and the
//!    cumulative feature-ablation protocol.
//!
//! All operations are pure functions of their inputs plus an explicit
//! seed; repeated runs produce identical outputs regardless of worker
//! count.

pub mod ablation;
pub mod classifier;
pub mod corpus;
pub mod dsp;
pub mod stats;
pub mod store;

pub use corpus::{AudioClip, CoarseClass, Language, Segment};
pub use dsp::{FeatureRegistry, FeatureVector};
