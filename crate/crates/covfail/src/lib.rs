//! Coverage verification for planar sensor networks from connectivity data.
//!
//! A network is modelled as a communication graph whose Rips 2-skeleton is
//! checked for a homological coverage certificate: the criterion passes when
//! some 2-chain of triangles has the fence cycle as its boundary. On top of
//! that check the crate provides enumeration of minimal failure sets
//! ([`deathsets`]), failure-probability evaluation over time ([`probability`]),
//! live monitoring with local link flags ([`monitor`]), and a reduction from
//! two-terminal network reliability used as a test generator ([`reduction`]).

pub mod complex;
pub mod deathsets;
pub mod fixtures;
pub mod monitor;
pub mod persistence;
pub mod probability;
pub mod reduction;
#[cfg(test)]
pub(crate) mod testutil;
pub mod z2;
