pub mod cli;
pub mod corpus;
pub mod dsl;
pub mod fs;
pub mod tag;
pub mod ug;
