//! Monodromy data and algebraic solutions of the Painlevé VI family PVIμ.
//!
//! The crate is organised bottom-up: exact arithmetic in real cyclotomic
//! fields ([`exactnum`]), monodromy triples and the braid action
//! ([`triples`]), classification of finite orbits ([`classify`]),
//! reflection groups ([`reflect`]), monodromy matrices ([`monodromy`]),
//! connection formulas ([`connection`]), the algebraic solutions
//! ([`solutions`]), numerical integration ([`pvi`]) and the command-line
//! front end ([`cli`]).

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod connection;
pub mod exactnum;
pub mod monodromy;
pub mod poly;
pub mod pvi;
pub mod reflect;
pub mod solutions;
pub mod triples;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
