pub mod bratteli;
pub mod citation;
pub mod ck;
pub mod classify;
pub mod cli;
pub mod families;
pub mod graph;
pub mod ideals;
pub mod io;
pub mod matrix;
pub mod report;
pub mod staged;
