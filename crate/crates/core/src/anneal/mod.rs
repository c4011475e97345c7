//! Chimera hardware model, embeddings and a simulated-annealing sampler.

mod chimera;
mod embed;
mod noise;
mod sampler;
mod unembed;

pub use chimera::{build_chimera, ChimeraTopology, QubitSite};
pub use embed::{embed_1d_chain, embed_2d_unit_cells, embed_qubo, long_path, ChainStrength, Embedding};
pub use noise::{apply_hardware_noise, normalize, HardwareNoise, NoiseScope};
pub use sampler::{anneal, AnnealParams, Sample, SampleSet, SamplerInfo};
pub use unembed::unembed;
