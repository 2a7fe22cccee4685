//! Wire representation shared by deterministic and parity trees.
//!
//! A node is `{"leaf":0|1}` or
//! `{"q":{"kind":"var","i":1},"0":<node>,"1":<node>}`; parity trees also use
//! `{"kind":"parity","i":1,"j":2}`. Indices are one-based.

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub(crate) enum NodeRepr {
    Leaf {
        leaf: u8,
    },
    Query {
        q: QueryRepr,
        #[serde(rename = "0")]
        zero: Box<NodeRepr>,
        #[serde(rename = "1")]
        one: Box<NodeRepr>,
    },
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub(crate) enum QueryRepr {
    Var { i: usize },
    Parity { i: usize, j: usize },
}
