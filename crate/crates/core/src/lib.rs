//! Tournament connectivity toolkit: exact strong k-connectivity testing,
//! seeded generators, brute-force oracles and a randomized pipeline that
//! partitions highly connected tournaments into strongly k-connected parts.

pub mod assemble;
pub mod bits;
pub mod bounds;
pub mod complete;
pub mod connectivity;
pub mod error;
pub mod experiment;
mod flow;
pub mod gadgets;
pub mod generators;
pub mod oracle;
pub mod paths;
pub mod predicates;
pub mod profile;
pub mod refine;
pub mod rng;
pub mod stage;
pub mod tournament;

pub use bits::VertexSet;
pub use connectivity::{
    check_k_connected, connectivity, is_k_connected, is_strongly_connected, local_connectivity,
    verify_partition, CutWitness, PartitionReport, WitnessKind,
};
pub use error::{InputError, TournamentError};
pub use tournament::Tournament;
