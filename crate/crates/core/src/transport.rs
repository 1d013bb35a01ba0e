//! Transportation simplex for small dense transport problems.
//!
//! The basis is a spanning tree over `rows + cols` nodes with exactly
//! `rows + cols - 1` basic cells, degenerate (zero-flow) cells included.
//! Entering and leaving cells are picked by Bland's smallest-index rule, so
//! degenerate pivots cannot cycle.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Reduced costs above `-OPTIMALITY_TOL` certify optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct Solution {
    /// Row-major `rows × cols` flows.
    pub flow: Vec<f64>,
    pub cost: f64,
    /// Row potentials.
    pub u: Vec<f64>,
    /// Column potentials.
    pub v: Vec<f64>,
    pub pivots: usize,
}

struct Basis {
    rows: usize,
    cols: usize,
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
}

impl Basis {
    fn northwest(supply: &[f64], demand: &[f64]) -> Self {
        let (rows, cols) = (supply.len(), demand.len());
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let mut cells = Vec::with_capacity(rows + cols - 1);
        let mut flow = vec![0.0; rows * cols];
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            cells.push((i, j));
            flow[i * cols + j] = x;
            s[i] -= x;
            d[j] -= x;
            if i + 1 == rows && j + 1 == cols {
                break;
            }
            if j + 1 == cols || (i + 1 < rows && s[i] <= d[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        // leftover rounding from mismatched totals lands on the last cell
        let last = (rows - 1) * cols + cols - 1;
        flow[last] += s[rows - 1].min(d[cols - 1]).max(0.0);
        Self { rows, cols, cells, flow }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.rows + self.cols];
        for (b, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push((self.rows + j, b));
            adj[self.rows + j].push((i, b));
        }
        adj
    }

    fn potentials(&self, cost: &[f64], adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let mut pot = vec![f64::NAN; self.rows + self.cols];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for &(next, b) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j) = self.cells[b];
                    pot[next] = cost[i * self.cols + j] - pot[node];
                    queue.push_back(next);
                }
            }
        }
        let v = pot.split_off(self.rows);
        (pot, v)
    }

    /// Basic cells on the tree path from row `i` to column `j`, in order.
    fn path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let target = self.rows + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.rows + self.cols];
        let mut seen = vec![false; self.rows + self.cols];
        seen[i] = true;
        let mut queue = VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &(next, b) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, b));
                    queue.push_back(next);
                }
            }
        }
        let mut edges = Vec::new();
        let mut node = target;
        while let Some((prev, b)) = parent[node] {
            edges.push(b);
            node = prev;
        }
        edges.reverse();
        edges
    }
}

/// Minimizes `Σ cost_ij · flow_ij` subject to row sums `supply` and column
/// sums `demand`. Both marginals must be positive and have equal totals.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<Solution> {
    let (rows, cols) = (supply.len(), demand.len());
    if rows == 0 || cols == 0 {
        return Err(Error::Empty("transport problem needs nonempty marginals"));
    }
    if cost.len() != rows * cols {
        return Err(Error::LengthMismatch(cost.len(), rows * cols));
    }
    let mut basis = Basis::northwest(supply, demand);
    let scale = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let enter_tol = 1e-13 * (1.0 + scale);

    let mut pivots = 0;
    loop {
        let adj = basis.adjacency();
        let (u, v) = basis.potentials(cost, &adj);
        let entering = (0..rows * cols).find(|&idx| {
            let (i, j) = (idx / cols, idx % cols);
            cost[idx] - u[i] - v[j] < -enter_tol
        });
        let Some(idx) = entering else {
            let min_reduced = (0..rows * cols)
                .map(|idx| cost[idx] - u[idx / cols] - v[idx % cols])
                .fold(f64::INFINITY, f64::min);
            if min_reduced < -OPTIMALITY_TOL {
                return Err(Error::Solver(format!("dual infeasible at termination: {min_reduced}")));
            }
            let flow: Vec<f64> = basis.flow.iter().map(|&x| x.max(0.0)).collect();
            let total = crate::measure::neumaier(flow.iter().zip(cost).map(|(f, c)| f * c));
            return Ok(Solution { flow, cost: total, u, v, pivots });
        };
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Solver("pivot limit reached".into()));
        }

        let (ei, ej) = (idx / cols, idx % cols);
        let path = basis.path(&adj, ei, ej);
        // cells at even positions on the path lose flow, odd ones gain
        let mut theta = f64::INFINITY;
        let mut leave: Option<usize> = None;
        for &b in path.iter().step_by(2) {
            let (i, j) = basis.cells[b];
            let x = basis.flow[i * cols + j];
            let cell = i * cols + j;
            let better = match leave {
                None => true,
                Some(l) => {
                    let (li, lj) = basis.cells[l];
                    x < theta || (x == theta && cell < li * cols + lj)
                }
            };
            if better {
                theta = x;
                leave = Some(b);
            }
        }
        let leave = leave.ok_or_else(|| Error::Solver("degenerate cycle".into()))?;
        for (pos, &b) in path.iter().enumerate() {
            let (i, j) = basis.cells[b];
            let f = &mut basis.flow[i * cols + j];
            if pos % 2 == 0 {
                *f -= theta;
            } else {
                *f += theta;
            }
        }
        let (li, lj) = basis.cells[leave];
        basis.flow[li * cols + lj] = 0.0;
        basis.flow[idx] = theta;
        basis.cells[leave] = (ei, ej);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_swap() {
        let s = solve(&[0.5, 0.5], &[0.5, 0.5], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.cost, 0.0);
        assert_eq!(s.flow, vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn rectangular_problem_matches_brute_force() {
        // 2x3 has one free parameter after the marginals; scan it.
        let supply = [0.4, 0.6];
        let demand = [0.2, 0.5, 0.3];
        let cost = [3.0, 1.0, 4.0, 2.0, 5.0, 1.5];
        let s = solve(&supply, &demand, &cost).unwrap();
        let mut best = f64::INFINITY;
        let steps = 4000;
        for a in 0..=steps {
            for b in 0..=steps / 10 {
                let x00 = 0.2 * a as f64 / steps as f64;
                let x01 = (0.4 - x00).min(0.5) * b as f64 / (steps / 10) as f64;
                let x02 = 0.4 - x00 - x01;
                if !(-1e-15..=0.3 + 1e-15).contains(&x02) {
                    continue;
                }
                let row2 = [0.2 - x00, 0.5 - x01, 0.3 - x02];
                let c = x00 * 3.0 + x01 * 1.0 + x02 * 4.0 + row2[0] * 2.0 + row2[1] * 5.0 + row2[2] * 1.5;
                best = best.min(c);
            }
        }
        assert!(s.cost <= best + 1e-12);
        assert!(best - s.cost < 1e-3);
    }

    #[test]
    fn degenerate_marginals_terminate() {
        let supply = [0.25; 4];
        let demand = [0.25; 4];
        let mut cost = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                cost[i * 4 + j] = ((i as f64) - (3 - j) as f64).powi(2);
            }
        }
        let s = solve(&supply, &demand, &cost).unwrap();
        // reversing a 4-point line optimally costs pairing sorted with sorted
        assert!(s.cost.abs() < 1e-15);
    }
}
