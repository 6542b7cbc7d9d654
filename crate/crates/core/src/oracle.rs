//! Ground truth by enumeration: a string is accepted iff the root predicate
//! conjoined with its selected rows is feasible.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::bdd::{suffix_paths, VariableOrder};
use crate::error::{Error, Result};
use crate::lp;
use crate::reach::PropagatedPredicates;

pub const MAX_ORACLE_K: usize = 16;

/// Accepted strings, bits by level of `order`. The default walks a prefix
/// tree and skips completions of infeasible prefixes; `naive` solves one LP
/// for each of the `2^k` strings.
pub fn brute_force(
    pp: &PropagatedPredicates,
    order: &VariableOrder,
    naive: bool,
) -> Result<BTreeSet<Vec<bool>>> {
    let k = pp.k();
    if k > MAX_ORACLE_K {
        return Err(Error::OracleLimit {
            k,
            limit: MAX_ORACLE_K,
        });
    }
    if order.len() != k {
        return Err(Error::mismatch("ordering length", k, order.len()));
    }
    if !naive {
        return suffix_paths(pp, pp.root(), order.as_slice());
    }
    let hits: Vec<Option<Vec<bool>>> = (0..1u32 << k)
        .into_par_iter()
        .map(|mask| -> Result<Option<Vec<bool>>> {
            let bits: Vec<bool> = (0..k).map(|j| mask >> (k - 1 - j) & 1 == 1).collect();
            let pred = pp.conjunction(bits.iter().enumerate().map(|(j, &b)| (order.at(j), b)));
            Ok(lp::check_feasible(&pred)?.map(|_| bits))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}
