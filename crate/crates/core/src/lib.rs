//! Mining taint sink specifications for JavaScript libraries from the code
//! that calls them.
//!
//! Projects are parsed into program elements ([`frontend`]), connected by a
//! data-flow graph from which (source, sanitizer, sink) triples are drawn
//! ([`propagation`]). Elements are named by their canonical access path
//! ([`representations`]), a linear program scores every representation per
//! project ([`inference`]), and averaged sink scores rank candidate call
//! arguments ([`predictor`]). Predictions can be rescored by code similarity
//! against known sinks ([`similarity`]) and reviewed interactively
//! ([`triage`]). [`pipeline`] wires the stages together over a corpus on
//! disk and [`cli`] exposes them as subcommands.
//!
//! ```no_run
//! use taintmine::pipeline::{run_in_memory, PipelineConfig};
//!
//! let cfg = PipelineConfig::parse("corpus = corpus/\nseeds = seeds.jsonl\n").unwrap();
//! let artifacts = run_in_memory(&cfg).unwrap();
//! for p in artifacts.refined.iter().take(10) {
//!     println!("{:.3} {} {}", p.score, p.rep, p.stmt);
//! }
//! ```

pub mod cli;
pub mod frontend;
pub mod ids;
pub mod inference;
pub mod pipeline;
pub mod predictor;
pub mod propagation;
pub mod representations;
pub mod similarity;
pub mod specs;
pub mod triage;
