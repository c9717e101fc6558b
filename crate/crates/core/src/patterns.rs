//! Zero-pattern structure of square matrices.

use std::ops::Range;

use num::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{dims, Result};
use crate::matrix::RMatrix;

/// Nonnegative with a nonzero entry in every row.
pub fn is_row_positive(a: &RMatrix) -> bool {
    a.is_nonnegative() && (0..a.rows()).all(|i| a.row(i).iter().any(|v| !v.is_zero()))
}

/// Nonnegative with exactly one nonzero entry in each row and column.
pub fn is_monomial(a: &RMatrix) -> Result<bool> {
    require_square(a)?;
    let n = a.rows();
    let support = support(a);
    let rows_ok = support.iter().all(|r| r.iter().filter(|&&b| b).count() == 1);
    let cols_ok = (0..n).all(|j| support.iter().filter(|r| r[j]).count() == 1);
    Ok(a.is_nonnegative() && rows_ok && cols_ok)
}

fn require_square(a: &RMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(dims(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

fn support(a: &RMatrix) -> Vec<Vec<bool>> {
    (0..a.rows()).map(|i| a.row(i).iter().map(|v| !v.is_zero()).collect()).collect()
}

/// Whether the digraph on the off-diagonal support fails to be strongly
/// connected. A 1×1 matrix is reducible exactly when it is zero.
pub fn is_reducible(a: &RMatrix) -> Result<bool> {
    require_square(a)?;
    let n = a.rows();
    if n == 1 {
        return Ok(a[(0, 0)].is_zero());
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && !a[(i, j)].is_zero() {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    Ok(tarjan_scc(&g).len() > 1)
}

/// Whether no `k×(n−k)` submatrix is zero for `1 ≤ k ≤ n−1`. A 1×1 matrix
/// is fully indecomposable exactly when it is nonzero.
pub fn is_fully_indecomposable(a: &RMatrix) -> Result<bool> {
    require_square(a)?;
    let s = support(a);
    if s.len() == 1 {
        return Ok(s[0][0]);
    }
    Ok(zero_block(&s).is_none())
}

/// Maximum bipartite matching on a row/column support, rows tried in
/// index order. Returns the column matched to each row.
fn max_matching(s: &[Vec<bool>], cols: usize) -> Vec<Option<usize>> {
    fn augment(s: &[Vec<bool>], r: usize, seen: &mut [bool], col_match: &mut [Option<usize>]) -> bool {
        for c in 0..seen.len() {
            if s[r][c] && !seen[c] {
                seen[c] = true;
                if col_match[c].is_none_or(|r2| augment(s, r2, seen, col_match)) {
                    col_match[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    let mut col_match = vec![None; cols];
    for r in 0..s.len() {
        augment(s, r, &mut vec![false; cols], &mut col_match);
    }
    let mut row_match = vec![None; s.len()];
    for (c, r) in col_match.iter().enumerate() {
        if let Some(r) = r {
            row_match[*r] = Some(c);
        }
    }
    row_match
}

/// Finds rows `R` and columns `C` with `|R| + |C| = n`, both nonempty,
/// and `A[R, C] = 0`. Scans deleted positions `(i, j)` in order; the first
/// minor without a perfect matching yields the block via König's theorem.
fn zero_block(s: &[Vec<bool>]) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor: Vec<Vec<bool>> = rows.iter().map(|&r| cols.iter().map(|&c| s[r][c]).collect()).collect();
            let matching = max_matching(&minor, n - 1);
            if matching.iter().all(Option::is_some) {
                continue;
            }
            // Alternating reachability from unmatched rows.
            let mut col_match = vec![None; n - 1];
            for (r, c) in matching.iter().enumerate() {
                if let Some(c) = c {
                    col_match[*c] = Some(r);
                }
            }
            let mut row_seen = vec![false; n - 1];
            let mut col_seen = vec![false; n - 1];
            let mut stack: Vec<usize> = (0..n - 1).filter(|&r| matching[r].is_none()).collect();
            for &r in &stack {
                row_seen[r] = true;
            }
            while let Some(r) = stack.pop() {
                for c in 0..n - 1 {
                    if minor[r][c] && !col_seen[c] {
                        col_seen[c] = true;
                        if let Some(r2) = col_match[c] {
                            if !row_seen[r2] {
                                row_seen[r2] = true;
                                stack.push(r2);
                            }
                        }
                    }
                }
            }
            // Reached rows only see reached columns and outnumber them by
            // the unmatched rows, so reached rows against unreached columns
            // form a zero block of total size at least n. Trim it to n.
            let mut zr: Vec<usize> = (0..n - 1).filter(|&r| row_seen[r]).map(|r| rows[r]).collect();
            let mut zc: Vec<usize> = (0..n - 1).filter(|&c| !col_seen[c]).map(|c| cols[c]).collect();
            while zr.len() + zc.len() > n {
                if zr.len() > 1 {
                    zr.pop();
                } else {
                    zc.pop();
                }
            }
            debug_assert!(zr.iter().all(|&r| zc.iter().all(|&c| !s[r][c])));
            if zr.len() + zc.len() == n && !zr.is_empty() && !zc.is_empty() {
                return Some((zr, zc));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    FullyIndecomposable,
    ZeroOneByOne,
}

/// Row and column permutations bringing a matrix to block upper-triangular
/// form whose diagonal blocks are fully indecomposable or 1×1 zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockForm {
    /// Row `i` of the permuted matrix is row `row_perm[i]` of the input.
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub diagonal_blocks: Vec<Range<usize>>,
    pub block_kinds: Vec<BlockKind>,
}

impl BlockForm {
    pub fn apply(&self, a: &RMatrix) -> RMatrix {
        a.submatrix(&self.row_perm, &self.col_perm)
    }

    pub fn num_blocks(&self) -> usize {
        self.diagonal_blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.diagonal_blocks.iter().map(|r| r.len()).collect()
    }
}

/// Splits along zero blocks until every diagonal block is fully
/// indecomposable or a 1×1 zero.
pub fn block_triangularize(a: &RMatrix) -> Result<BlockForm> {
    require_square(a)?;
    let s = support(a);
    let n = a.rows();
    let mut blocks = Vec::new();
    split(&s, (0..n).collect(), (0..n).collect(), &mut blocks);
    let mut form = BlockForm { row_perm: vec![], col_perm: vec![], diagonal_blocks: vec![], block_kinds: vec![] };
    for (rows, cols) in blocks {
        let start = form.row_perm.len();
        let kind = if rows.len() == 1 && !s[rows[0]][cols[0]] {
            BlockKind::ZeroOneByOne
        } else {
            BlockKind::FullyIndecomposable
        };
        form.row_perm.extend(rows);
        form.col_perm.extend(cols);
        form.diagonal_blocks.push(start..form.row_perm.len());
        form.block_kinds.push(kind);
    }
    Ok(form)
}

fn split(s: &[Vec<bool>], rows: Vec<usize>, cols: Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
    if rows.len() == 1 {
        out.push((rows, cols));
        return;
    }
    let local: Vec<Vec<bool>> = rows.iter().map(|&r| cols.iter().map(|&c| s[r][c]).collect()).collect();
    let Some((zr, zc)) = zero_block(&local) else {
        out.push((rows, cols));
        return;
    };
    // Zero rows go to the bottom, zero columns to the left.
    let top_rows: Vec<usize> = (0..rows.len()).filter(|r| !zr.contains(r)).map(|r| rows[r]).collect();
    let bottom_rows: Vec<usize> = zr.iter().map(|&r| rows[r]).collect();
    let left_cols: Vec<usize> = zc.iter().map(|&c| cols[c]).collect();
    let right_cols: Vec<usize> = (0..cols.len()).filter(|c| !zc.contains(c)).map(|c| cols[c]).collect();
    split(s, top_rows, left_cols, out);
    split(s, bottom_rows, right_cols, out);
}

/// Structural necessary conditions for inverse nonnegativity: every
/// diagonal block of the block form is invertible with a nonnegative
/// inverse, and no strip `[B_{i,i+1} … B_{i,j}]` or `[B_{i,j}; …; B_{j-1,j}]`
/// above the diagonal is nonnegative and nonzero.
pub fn check_pattern_inv_nonneg(a: &RMatrix) -> Result<bool> {
    let form = block_triangularize(a)?;
    let b = form.apply(a);
    let idx = |r: Range<usize>| r.collect::<Vec<usize>>();
    for (range, kind) in form.diagonal_blocks.iter().zip(&form.block_kinds) {
        if *kind == BlockKind::ZeroOneByOne {
            return Ok(false);
        }
        let block = b.submatrix(&idx(range.clone()), &idx(range.clone()));
        match block.inverse() {
            Ok(inv) if inv.is_nonnegative() => {}
            _ => return Ok(false),
        }
    }
    let blocks = &form.diagonal_blocks;
    let nonneg_nonzero = |m: &RMatrix| m.is_nonnegative() && !m.is_zero();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let row_strip = b.submatrix(&idx(blocks[i].clone()), &idx(blocks[i + 1].start..blocks[j].end));
            let col_strip = b.submatrix(&idx(blocks[i].start..blocks[j - 1].end), &idx(blocks[j].clone()));
            if nonneg_nonzero(&row_strip) || nonneg_nonzero(&col_strip) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
