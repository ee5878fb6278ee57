//! Coherent transport through a triple quantum dot with balanced gain and
//! loss, attached to two semi-infinite tight-binding leads.

pub mod linalg;
pub mod model;
pub mod leads;
pub mod negf;
pub mod closedform;
pub mod spectra;
pub mod cli;
