//! Dense two-phase simplex with Bland's rule, and the path-formulation LP
//! for two-hop routing built on top of it. Test-only: this is the exact
//! reference the iterative routing solver is measured against.

use tro_core::{enumerate_two_hop_paths, Error, Network, Topology, TrafficMatrix};

const EPS: f64 = 1e-10;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f.abs() > 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.rows)
            .map(|(&b, row)| cost[b] * row[self.rhs])
            .sum()
    }

    /// Minimizes `cost` letting only columns `< allowed` enter the basis.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Result<(), &'static str> {
        for _ in 0..100_000 {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| cost[b] * row[j])
                        .sum::<f64>();
                if reduced < -EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[self.rhs] / row[c];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else { return Err("unbounded") };
            self.pivot(r, c);
        }
        Err("iteration limit")
    }
}

/// `min c^T x` subject to `A x = b`, `x >= 0`, with `b >= 0`.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = c.len();
    let rhs = n + m;
    let mut rows = vec![vec![0.0; rhs + 1]; m];
    for i in 0..m {
        assert!(b[i] >= 0.0);
        rows[i][..n].copy_from_slice(&a[i]);
        rows[i][n + i] = 1.0;
        rows[i][rhs] = b[i];
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        rhs,
    };
    let mut phase1 = vec![0.0; n + m];
    phase1[n..].fill(1.0);
    t.run(&phase1, n + m).ok()?;
    if t.objective(&phase1) > 1e-7 {
        return None;
    }
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| t.rows[r][j].abs() > 1e-9) {
                t.pivot(r, c);
            }
        }
    }
    let mut phase2 = vec![0.0; n + m];
    phase2[..n].copy_from_slice(c);
    t.run(&phase2, n).ok()?;
    Some(t.objective(&phase2))
}

/// Exact optimal MLU of two-hop routing on a fixed topology.
pub fn reference_lp_oracle(
    demand: &TrafficMatrix,
    topo: &Topology,
    net: &Network,
) -> Result<f64, Error> {
    let n = net.n_pods();
    assert!(n <= 8, "oracle is for tiny instances");
    let paths = enumerate_two_hop_paths(topo, net)?;

    // variables: per (pair, path) fraction y_p, then u last
    let mut vars: Vec<(usize, usize, usize)> = Vec::new();
    let mut pairs = Vec::new();
    for (s, d, &v) in demand.matrix().off_diagonal() {
        if v <= 0.0 {
            continue;
        }
        if paths.paths(s, d).is_empty() {
            return Err(Error::Unroutable { src: s, dst: d });
        }
        pairs.push((s, d));
        for &k in paths.paths(s, d) {
            vars.push((s, d, k));
        }
    }
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let scale = demand.matrix().as_slice().iter().cloned().fold(0.0, f64::max);
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && topo.get(i, j) > 0 {
                links.push((i, j));
            }
        }
    }
    let nv = vars.len() + 1 + links.len();
    let u_col = vars.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &(s, d) in &pairs {
        let mut row = vec![0.0; nv];
        for (idx, &(vs, vd, _)) in vars.iter().enumerate() {
            if (vs, vd) == (s, d) {
                row[idx] = 1.0;
            }
        }
        a.push(row);
        b.push(1.0);
    }
    for (li, &(i, j)) in links.iter().enumerate() {
        let mut row = vec![0.0; nv];
        for (idx, &(s, d, k)) in vars.iter().enumerate() {
            let on = if k == d {
                (s, d) == (i, j)
            } else {
                (s, k) == (i, j) || (k, d) == (i, j)
            };
            if on {
                row[idx] = demand.get(s, d) / scale;
            }
        }
        row[u_col] = -f64::from(topo.get(i, j)) * net.link_capacity(i, j) / scale;
        row[u_col + 1 + li] = 1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut c = vec![0.0; nv];
    c[u_col] = 1.0;
    minimize(&c, &a, &b).ok_or(Error::Infeasible("LP oracle failed".into()))
}
