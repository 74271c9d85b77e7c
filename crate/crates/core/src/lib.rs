//! Annotation transfer between sister lexical units of a frame.
//!
//! Lexical units of one frame tend to share an annotation structure. This
//! crate fills lexical units that have no annotated sentences by copying the
//! annotation sets of the best-annotated lexical unit of the same frame and
//! part of speech, swapping the target word for a correctly inflected form
//! and shifting every frame-element span to match.
//!
//! Around that core it provides:
//!
//! * [`model`]: the frame lexicon and annotation corpus, with validation.
//! * [`ingest`]: JSONL, CoNLL and FrameNet `lu/*.xml` readers and writers.
//! * [`morphology`]: feature analysis and inflection of English words.
//! * [`augment`]: sister selection, span rebasing and corpus augmentation.
//! * [`splits`]: seeded hold-out experiments that avoid test leakage.
//! * [`scorer`]: frame identification and argument identification metrics.
//!
//! ```
//! use frame_augment::morphology::Morphology;
//! use frame_augment::model::Pos;
//!
//! let morph = Morphology::bundled().with_irregulars(false);
//! let (form, _) = morph.match_form("stamped", "stamp", "bend", &Pos::Verb).unwrap();
//! assert_eq!(form, "bended");
//! ```

pub mod augment;
pub mod cli;
pub mod ingest;
pub mod model;
pub mod morphology;
pub mod scorer;
pub mod splits;
pub mod text;

pub use model::{AnnotationSet, Corpus, Lexicon, Pos, Span};
pub use morphology::{FeatureBundle, Morphology};
