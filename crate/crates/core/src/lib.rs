//! Two-sorted labelled formulas over neighbourhood (sphere) models: parsing,
//! evaluation, natural-deduction proof checking, normalization and a
//! decision procedure.

pub mod checker;
pub mod cli;
pub mod corpus;
pub mod decider;
pub mod model;
pub mod normalizer;
pub mod parser;
pub mod proof;
pub mod syntax;
pub mod semantics;
