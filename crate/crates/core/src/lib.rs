//! Constituent and dependency parsing cast as sequence labeling.
//!
//! Trees are linearized into one atomic label per word ([`const_codec`],
//! [`dep_codec`]), a single linear-softmax layer over word vectors learns to
//! predict those labels ([`tagger`]), predicted label sequences are decoded
//! and repaired back into well-formed trees, and the result is scored with
//! bracketing and attachment metrics ([`metrics`]).

pub mod const_codec;
pub mod dep_codec;
pub mod dependency;
pub mod io;
pub mod metrics;
pub mod parallel;
pub mod synth;
pub mod tagger;
pub mod tree;

pub use crate::dependency::{DependencySentence, Token};
pub use crate::parallel::Execution;
pub use crate::tree::Tree;

use std::fmt;
use std::str::FromStr;

/// Which kind of tree a label sequence encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formalism {
    Constituent,
    Dependency,
}

impl FromStr for Formalism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "const" | "constituent" => Ok(Formalism::Constituent),
            "dep" | "dependency" => Ok(Formalism::Dependency),
            other => Err(format!("unknown formalism {:?} (expected const or dep)", other)),
        }
    }
}

impl fmt::Display for Formalism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formalism::Constituent => "const",
            Formalism::Dependency => "dep",
        })
    }
}
