//! Exact computation of colored HOMFLY polynomials of links from braid
//! presentations via trivalent web calculus, together with discovery and
//! specialization of the q-holonomic recursion operators they satisfy.

pub mod holonomy;
pub mod link;
pub mod poly;
pub mod qweyl;
pub mod web;
