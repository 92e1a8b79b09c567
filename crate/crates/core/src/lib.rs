//! Model checker for strategic abilities of asynchronous multi-agent systems.
//!
//! A system is a set of *modules* — finite-state machines with labeled states
//! (each module owns a set of variables whose values its states publish) that
//! read each other's variables through input letters. Modules compose
//! asynchronously by interleaving, synchronizing implicitly through the
//! shared variables. On top of the composed state space the crate answers
//! strategic questions of the form "does this coalition have a joint strategy
//! enforcing a linear-time objective on every run?", under imperfect
//! information: an agent's strategy picks, per local state, one choice from
//! its *repertoire* of transition sets and sticks with it.
//!
//! The crate also implements an assume-guarantee verification scheme, so the
//! question above can be decomposed: each coalition member is verified
//! against a small Büchi *assumption* about its neighborhood instead of the
//! full composition, and the rest of the system is separately shown to
//! *guarantee* that assumption up to stuttering.
//!
//! Crate layout:
//!
//! * [`values`], [`module`], [`system`], [`compose`] — the basic model:
//!   variables, modules, repertoires, asynchronous composition;
//! * [`logic`] — objective formulas (parsing, classification, evaluation);
//! * [`omega`] — Büchi automata: translation from formulas, products,
//!   complementation, emptiness, stutter closure;
//! * [`strategy`] — strategy enumeration and the core verification loop;
//! * [`guarantee`] — checking that a module guarantees an assumption modulo
//!   stuttering;
//! * [`agv`] — the assume-guarantee rules themselves;
//! * [`generators`] — built-in benchmark families;
//! * [`textfmt`] — the plain-text model format used by the CLI.

pub mod compose;
pub mod generators;
pub mod agv;
pub mod guarantee;
pub mod logic;
pub mod module;
pub mod omega;
pub mod strategy;
pub mod system;
pub mod textfmt;
pub mod values;
