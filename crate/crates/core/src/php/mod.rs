pub mod arcs;
pub mod construct;
pub mod sets;
pub mod verify;
pub mod witness;

pub use arcs::{max_multiplicity_arcs, Arc, ArcSet};
pub use construct::{build_neighborhoods, construct_witness, search_generic_tuple, Anchor, Neighborhoods};
pub use sets::{max_multiplicity, SetDescriptor};
pub use verify::{pullback_hat, verify_witness, VerificationReport};
pub use witness::{choose_n, PhpInstance, PhpWitness};
