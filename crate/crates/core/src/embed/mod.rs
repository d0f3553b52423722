//! Minor embedding onto Chimera hardware graphs.

mod chains;
mod chimera;
mod embedding;

pub use chains::{embed_ising, unembed, EmbeddedIsing, Unembedded, DEFAULT_CHAIN_STRENGTH};
pub use chimera::{chimera, ChimeraShape, HardwareGraph};
pub use embedding::{find_embedding, Embedding, EmbeddingDocument, DEFAULT_TRIES};
