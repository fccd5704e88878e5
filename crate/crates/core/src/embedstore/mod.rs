//! Frozen encoder features: binary storage, projection, pooling, synthetic
//! generation and the remote encoder boundary.

mod checkpoint;
mod fvce;
mod project;
mod remote;
mod store;
mod synth;
mod synth_text;

pub use checkpoint::{meta_path, read_checkpoint, write_checkpoint, ProjectionWeights, Side};
pub use fvce::{read_fvce, write_fvce, EmbeddingKind, EmbeddingMatrix};
pub use project::{mean_pool, project, project_rows};
pub use remote::{encode_remote, EncodeKind, EncoderClient, EncoderConfig, EncoderDims};
pub use store::EmbeddingStore;
pub use synth::{synth_embeddings, ConceptId, ConceptSpace, SynthEmbeddings, SynthSpec, NOISE};
pub use synth_text::{SynthTextEncoder, FUNCTION_CONCEPT, REDUNDANT_CONCEPT, UNK_CONCEPT};
