//! Selective families of dimension subsets: each dimension `q` is the
//! intersection of the members containing it. The smallest such family has
//! `n` members for the least `n` with `C(n, ⌊n/2⌋) ≥ |Q|`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::DimSubset;
use crate::witness::Witness;

/// A family verified selective for `{0, .., n_dims-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectiveFamily {
    n_dims: usize,
    members: Vec<DimSubset>,
    index_sets: Vec<Vec<usize>>,
}

impl SelectiveFamily {
    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn members(&self) -> &[DimSubset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `I(q)`: indices of every member containing `q`.
    pub fn index_sets(&self, q: usize) -> Result<&[usize]> {
        self.index_sets
            .get(q)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownDimension(q.to_string()))
    }

    /// The members indexed by `I(q)`.
    pub fn members_containing(&self, q: usize) -> Result<Vec<DimSubset>> {
        Ok(self.index_sets(q)?.iter().map(|&i| self.members[i]).collect())
    }

    /// The family of all singletons.
    pub fn singletons(n_dims: usize) -> Self {
        match is_selective(&(0..n_dims).map(DimSubset::singleton).collect::<Vec<_>>(), n_dims) {
            Ok(Selectivity::Selective(f)) => f,
            _ => unreachable!("singletons are always selective"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selectivity {
    Selective(SelectiveFamily),
    NotSelective(Witness),
}

impl Selectivity {
    pub fn into_family(self) -> Result<SelectiveFamily> {
        match self {
            Selectivity::Selective(f) => Ok(f),
            Selectivity::NotSelective(Witness::Selectivity { dimension, intersection }) => {
                Err(Error::FamilyNotSelective(match intersection {
                    Some(s) => format!("dimension {dimension} is only isolated down to {s:?}"),
                    None => format!("no member contains dimension {dimension}"),
                }))
            }
            Selectivity::NotSelective(w) => Err(Error::FamilyNotSelective(format!("{w:?}"))),
        }
    }
}

/// Intersection of every member containing `q`, or `None` when no member
/// contains it.
pub(crate) fn maximal_intersection(members: &[DimSubset], q: usize) -> Option<DimSubset> {
    members
        .iter()
        .filter(|s| s.contains(q))
        .copied()
        .reduce(DimSubset::intersection)
}

/// Decides selectivity using the maximal index sets: if any subfamily of
/// members containing `q` intersects to `{q}`, so does the family of all of
/// them.
pub fn is_selective(members: &[DimSubset], n_dims: usize) -> Result<Selectivity> {
    let full = DimSubset::full(n_dims);
    let mut seen = HashSet::new();
    for (i, s) in members.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptyMember(i));
        }
        if !s.is_subset_of(full) {
            return Err(Error::ScopeError(format!(
                "member #{i} {s:?} is not contained in a {n_dims}-dimensional index set"
            )));
        }
        if !seen.insert(*s) {
            return Err(Error::DuplicateMember(i));
        }
    }
    let mut index_sets = Vec::with_capacity(n_dims);
    for q in 0..n_dims {
        let meet = maximal_intersection(members, q);
        if meet != Some(DimSubset::singleton(q)) {
            return Ok(Selectivity::NotSelective(Witness::Selectivity {
                dimension: q,
                intersection: meet,
            }));
        }
        index_sets.push(
            members
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(q))
                .map(|(i, _)| i)
                .collect(),
        );
    }
    Ok(Selectivity::Selective(SelectiveFamily {
        n_dims,
        members: members.to_vec(),
        index_sets,
    }))
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Least `n` with `C(n, ⌊n/2⌋) ≥ n_dims`.
pub fn sel_size(n_dims: usize) -> usize {
    assert!(n_dims >= 1, "sel_size needs at least one dimension");
    let mut n = 1u64;
    while binomial(n, n / 2) < n_dims as u128 {
        n += 1;
    }
    n as usize
}

/// The first `count` subsets of `{0, .., n-1}` of size `k` in colexicographic
/// order, as bitmasks.
fn colex_subsets(n: usize, k: usize, count: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0; count.min(1)];
    }
    let mut out = Vec::with_capacity(count);
    let mut x: u64 = (1u64 << k) - 1;
    while out.len() < count && x < (1u64 << n) {
        out.push(x);
        // Gosper's hack: next integer with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Builds a selective family of size `sel_size(n_dims)` by assigning each
/// dimension a distinct `⌊n/2⌋`-subset of `{0, .., n-1}` and collecting, for
/// each `p`, the dimensions whose subset contains `p`.
pub fn minimal_selective_family(n_dims: usize) -> Result<SelectiveFamily> {
    if n_dims == 0 {
        return Err(Error::NoDimensions);
    }
    let n = sel_size(n_dims);
    let half = n / 2;
    let members: Vec<DimSubset> = if half == 0 {
        vec![DimSubset::singleton(0)]
    } else {
        let codes = colex_subsets(n, half, n_dims);
        (0..n)
            .map(|p| {
                DimSubset::from_indices(
                    codes
                        .iter()
                        .enumerate()
                        .filter(|(_, &code)| code & (1u64 << p) != 0)
                        .map(|(q, _)| q),
                )
            })
            .filter(|s| !s.is_empty())
            .collect()
    };
    match is_selective(&members, n_dims)? {
        Selectivity::Selective(f) => Ok(f),
        Selectivity::NotSelective(_) => Err(Error::InternalSelectivityFailure),
    }
}
