//! Static analysis and execution for a pi-calculus with binary sessions.
//!
//! The pipeline is [`surface`] parsing, [`typing`], [`depgraph`] for
//! dependency graphs and transparency, [`semantics`] for reduction, and
//! [`progress`] for partner construction and certificates. The guide in
//! `book/` walks through each stage.

pub mod congruence;
pub mod depgraph;
pub mod gen;
pub mod golden;
pub mod progress;
pub mod semantics;
pub mod surface;
pub mod syntax;
pub mod typing;

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            struct $name;
        };
    }
    chapter!(Introduction, "introduction.md");
    chapter!(Processes, "processes.md");
    chapter!(Typing, "typing.md");
    chapter!(Graphs, "graphs.md");
    chapter!(Reduction, "reduction.md");
    chapter!(Progress, "progress.md");
    chapter!(Cli, "cli.md");

    #[doc = include_str!("../../../README.md")]
    struct Readme;
}
