//! Hypergraphs and the supply-chain evolutionary game over `Z_m`:
//! profile codes, evolution, feedback synthesis by Smith normal form and
//! cycle detection.

mod game;
mod hypergraph;
mod snf;

pub use game::*;
pub use hypergraph::{Hypergraph, HypergraphReport};
pub use snf::*;
