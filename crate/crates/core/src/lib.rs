pub mod ast;
pub mod eval;
pub mod kleene;
pub mod normform;
pub mod parser;
pub mod verify;
pub mod ltlsem;
pub mod witness;
pub mod lts;
pub mod corpus;
pub mod cli;
