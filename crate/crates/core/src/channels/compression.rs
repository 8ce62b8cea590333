use itertools::Itertools;
use serde::Serialize;

use super::JointPmf;
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::pmf::{Pmf, SortedPmf};

/// Exhaustive searches are limited to alphabets up to this many `x` values.
pub const BRUTE_FORCE_MAX_ROWS: usize = 5;
/// ... and this many `y` values.
pub const BRUTE_FORCE_MAX_COLS: usize = 4;

const TIE_SEARCH_LIMIT: u128 = 1 << 22;

/// How to order `x` values with equal conditional probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Smaller `x` gets the smaller rank.
    AscendingIndex,
    /// Try every reordering of tied values and keep the labeling with the
    /// smallest `H(X|U)`; small alphabets only.
    ExhaustiveSearch,
}

/// A conditional compression `U` of `X` given `Y`: `U` is the rank of `x`
/// within `p_{X|Y}(·|y)`, so `X` is recoverable from `(Y, U)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionResult {
    rows: usize,
    cols: usize,
    /// `rank_map[x * cols + y]`, 0-based (rank 0 is the most likely `x`).
    rank_map: Vec<usize>,
    u_pmf: Pmf,
    tie_policy: TiePolicy,
}

impl CompressionResult {
    pub fn rank(&self, x: usize, y: usize) -> usize {
        self.rank_map[x * self.cols + y]
    }

    /// The `x` holding rank `u` under `y`.
    pub fn symbol(&self, u: usize, y: usize) -> Option<usize> {
        (0..self.rows).find(|&x| self.rank(x, y) == u)
    }

    pub fn u_pmf(&self) -> &Pmf {
        &self.u_pmf
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    /// Joint pmf of `(X, U)`.
    pub fn x_u_joint(&self, j: &JointPmf) -> Vec<f64> {
        x_u_joint(j, &self.rank_map)
    }

    /// `H(X|U) = H(X, U) − H(U)`.
    pub fn cond_entropy_x_given_u(&self, j: &JointPmf) -> f64 {
        shannon_entropy(&self.x_u_joint(j)) - shannon_entropy(&self.u_pmf)
    }
}

fn x_u_joint(j: &JointPmf, rank_map: &[usize]) -> Vec<f64> {
    let n = j.rows();
    let mut q = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..j.cols() {
            q[x * n + rank_map[x * j.cols() + y]] += j.get(x, y);
        }
    }
    q
}

fn u_marginal(j: &JointPmf, rank_map: &[usize]) -> Vec<f64> {
    let mut u = vec![0.0; j.rows()];
    for x in 0..j.rows() {
        for y in 0..j.cols() {
            u[rank_map[x * j.cols() + y]] += j.get(x, y);
        }
    }
    u
}

/// Source indices of column `y` ordered by descending probability, ties by
/// ascending index.
fn column_order(j: &JointPmf, y: usize) -> Vec<usize> {
    let col = j.column(y);
    let mut order: Vec<usize> = (0..j.rows()).collect();
    order.sort_by(|&a, &b| col[b].total_cmp(&col[a]));
    order
}

/// Ranks `x` within each conditional pmf.
pub fn conditional_compression(j: &JointPmf, tie_policy: TiePolicy) -> Result<CompressionResult> {
    let orders: Vec<Vec<usize>> = (0..j.cols()).map(|y| column_order(j, y)).collect();
    let rank_map = match tie_policy {
        TiePolicy::AscendingIndex => rank_map_from_orders(j, &orders),
        TiePolicy::ExhaustiveSearch => search_ties(j, orders)?,
    };
    let u_pmf = Pmf::normalized(u_marginal(j, &rank_map))?;
    Ok(CompressionResult {
        rows: j.rows(),
        cols: j.cols(),
        rank_map,
        u_pmf,
        tie_policy,
    })
}

fn rank_map_from_orders(j: &JointPmf, orders: &[Vec<usize>]) -> Vec<usize> {
    let mut rank_map = vec![0; j.rows() * j.cols()];
    for (y, order) in orders.iter().enumerate() {
        for (rank, &x) in order.iter().enumerate() {
            rank_map[x * j.cols() + y] = rank;
        }
    }
    rank_map
}

/// Maximal runs of equal positive probability within one column order, as
/// `(start, len)` position ranges.
fn tie_groups(j: &JointPmf, y: usize, order: &[usize]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let v = j.get(order[start], y);
        let mut end = start + 1;
        while end < order.len() && j.get(order[end], y) == v {
            end += 1;
        }
        if v > 0.0 && end - start > 1 {
            groups.push((start, end - start));
        }
        start = end;
    }
    groups
}

fn search_ties(j: &JointPmf, orders: Vec<Vec<usize>>) -> Result<Vec<usize>> {
    check_small(j)?;
    // One candidate list of column orders per y, covering every reordering
    // of its tie groups.
    let per_column: Vec<Vec<Vec<usize>>> = orders
        .iter()
        .enumerate()
        .map(|(y, order)| column_variants(j, y, order))
        .collect();
    let total: u128 = per_column.iter().map(|v| v.len() as u128).product();
    if total > TIE_SEARCH_LIMIT {
        return Err(Error::TieSearchTooLarge(total));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for choice in per_column
        .iter()
        .map(|v| v.iter())
        .multi_cartesian_product()
    {
        let orders: Vec<Vec<usize>> = choice.into_iter().cloned().collect();
        let rank_map = rank_map_from_orders(j, &orders);
        let h = shannon_entropy(&x_u_joint(j, &rank_map));
        if !matches!(&best, Some((b, _)) if *b <= h) {
            best = Some((h, rank_map));
        }
    }
    Ok(best.expect("at least one labeling").1)
}

fn column_variants(j: &JointPmf, y: usize, order: &[usize]) -> Vec<Vec<usize>> {
    let mut variants = vec![order.to_vec()];
    for (start, len) in tie_groups(j, y, order) {
        let members = &order[start..start + len];
        variants = variants
            .into_iter()
            .flat_map(|base| {
                members.iter().copied().permutations(len).map(move |perm| {
                    let mut v = base.clone();
                    v[start..start + len].copy_from_slice(&perm);
                    v
                })
            })
            .collect();
    }
    variants
}

fn check_small(j: &JointPmf) -> Result<()> {
    if j.rows() > BRUTE_FORCE_MAX_ROWS || j.cols() > BRUTE_FORCE_MAX_COLS {
        return Err(Error::SearchTooLarge {
            rows: j.rows(),
            cols: j.cols(),
            max_rows: BRUTE_FORCE_MAX_ROWS,
            max_cols: BRUTE_FORCE_MAX_COLS,
        });
    }
    Ok(())
}

/// `p↓_U(i) = E_Y[p↓_{X|Y}(i|Y)]`, the pmf shared by every conditional
/// compression.
pub fn compression_pmf(j: &JointPmf) -> SortedPmf {
    let mut acc = vec![0.0; j.rows()];
    for (py, mut cond) in j.conditionals() {
        cond.sort_by(|a, b| b.total_cmp(a));
        for (a, c) in acc.iter_mut().zip(cond) {
            *a += py * c;
        }
    }
    SortedPmf::from_nonincreasing(acc).expect("average of sorted pmfs is a sorted pmf")
}

/// Minimum of `H(U)` over every `U` built by injectively labeling the
/// support of each conditional pmf with values in `{0..|X|-1}`.
///
/// Exhaustive; the first column's labeling is fixed since relabeling `U`
/// does not change `H(U)`.
pub fn brute_force_min_entropy(j: &JointPmf) -> Result<f64> {
    check_small(j)?;
    let n = j.rows();
    let columns: Vec<Vec<(usize, f64)>> = (0..j.cols())
        .map(|y| {
            (0..n)
                .filter(|&x| j.get(x, y) > 0.0)
                .map(|x| (x, j.get(x, y)))
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect();
    let mut u = vec![0.0; n];
    let (first, rest) = columns.split_first().expect("joint has positive mass");
    for (slot, &(_, p)) in first.iter().enumerate() {
        u[slot] += p;
    }
    let injections: Vec<Vec<Vec<usize>>> = rest
        .iter()
        .map(|c| (0..n).permutations(c.len()).collect())
        .collect();
    let mut best = f64::INFINITY;
    descend(rest, &injections, 0, &mut u, &mut best);
    Ok(best)
}

fn descend(
    columns: &[Vec<(usize, f64)>],
    injections: &[Vec<Vec<usize>>],
    depth: usize,
    u: &mut [f64],
    best: &mut f64,
) {
    if depth == columns.len() {
        *best = best.min(shannon_entropy(&*u));
        return;
    }
    for inj in &injections[depth] {
        for (&slot, &(_, p)) in inj.iter().zip(&columns[depth]) {
            u[slot] += p;
        }
        descend(columns, injections, depth + 1, u, best);
        for (&slot, &(_, p)) in inj.iter().zip(&columns[depth]) {
            u[slot] -= p;
        }
    }
}
