//! Boolean-function representations: packed truth tables, GF(2) algebraic
//! normal form, the real multilinear extension and the Walsh spectrum.

mod anf;
mod pnp;
mod spectral;
mod truth_table;

pub use anf::{anf_from_tt, tt_from_anf, Anf};
pub use pnp::{pnp_equivalent, PnpWitness, PNP_MAX_VARS};
pub use spectral::{
    nonlinearity, real_degree, real_multilinear, walsh_transform, RealPoly, WalshSpectrum,
    REAL_POLY_MAX_VARS, WALSH_MAX_VARS,
};
pub use truth_table::{index_point, point_index, TruthTable, MAX_VARS};

use crate::error::Result;

/// A function on fewer variables obtained by restriction, together with the
/// original (zero-based) index of each remaining variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subfunction {
    pub function: TruthTable,
    pub origin: Vec<usize>,
}

pub fn algebraic_degree(f: &TruthTable) -> usize {
    anf_from_tt(f).degree()
}

/// Zero-based indices of the influencing variables, ascending.
pub fn influencing_variables(f: &TruthTable) -> Vec<usize> {
    let s = f.support();
    (0..f.num_vars()).filter(|v| s >> v & 1 == 1).collect()
}

fn drop_var(f: &TruthTable, var: usize) -> Subfunction {
    let n = f.num_vars();
    let keep = ((1u32 << n) - 1) & !(1 << var);
    Subfunction {
        function: f.compact(keep),
        origin: (0..n).filter(|&v| v != var).collect(),
    }
}

/// `f` with `x_var := value`, remaining variables compacted in ascending order.
pub fn restrict_var(f: &TruthTable, var: usize, value: bool) -> Result<Subfunction> {
    Ok(drop_var(&f.fix(var, value)?, var))
}

/// `f` with `x_j := x_i xor value`; `x_j` is removed and the rest compacted.
pub fn restrict_parity(f: &TruthTable, i: usize, j: usize, value: bool) -> Result<Subfunction> {
    Ok(drop_var(&f.substitute_parity(i, j, value)?, j))
}

/// Truth table or ANF, for operations that accept either.
#[derive(Clone, Debug)]
pub enum BooleanFunction {
    Table(TruthTable),
    Anf(Anf),
}

impl BooleanFunction {
    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        match self {
            Self::Table(t) => t.evaluate(x),
            Self::Anf(a) => a.evaluate(x),
        }
    }

    pub fn to_table(&self) -> TruthTable {
        match self {
            Self::Table(t) => t.clone(),
            Self::Anf(a) => tt_from_anf(a),
        }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            Self::Table(t) => t.num_vars(),
            Self::Anf(a) => a.num_vars(),
        }
    }
}

/// Parses either format: a leading `n=` selects the truth-table file,
/// anything else is read as ANF text.
pub fn parse_function(text: &str) -> Result<TruthTable> {
    if text.trim_start().starts_with("n=") {
        TruthTable::parse_file(text)
    } else {
        Ok(tt_from_anf(&text.parse::<Anf>()?))
    }
}
