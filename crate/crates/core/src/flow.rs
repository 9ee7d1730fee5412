//! Edmonds-Karp maximum flow over [`Weight`] capacities.

use std::collections::VecDeque;

use crate::weight::Weight;

#[derive(Debug, Clone)]
struct Edge<W> {
    to: usize,
    cap: W,
    flow: W,
}

/// Directed network; every edge is stored with its reverse at `index ^ 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<W: Weight> {
    edges: Vec<Edge<W>>,
    adj: Vec<Vec<usize>>,
}

impl<W: Weight> FlowNetwork<W> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u -> v` with capacity `cap` and returns its edge id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: W) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            to: v,
            cap,
            flow: W::zero(),
        });
        self.edges.push(Edge {
            to: u,
            cap: W::zero(),
            flow: W::zero(),
        });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow(&self, edge: usize) -> W {
        self.edges[edge].flow.clone()
    }

    fn residual(&self, e: usize) -> W {
        self.edges[e].cap.clone() - self.edges[e].flow.clone()
    }

    fn has_residual(&self, e: usize) -> bool {
        let r = self.residual(e);
        r > W::zero() && !r.is_negligible()
    }

    /// Breadth-first predecessor edges from `s` through residual edges.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut pred = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if !seen[v] && self.has_residual(e) {
                    seen[v] = true;
                    pred[v] = Some(e);
                    queue.push_back(v);
                }
            }
        }
        pred
    }

    /// Saturates shortest augmenting paths and returns the flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> W {
        let mut total = W::zero();
        loop {
            let pred = self.bfs(s);
            if pred[t].is_none() {
                return total;
            }
            let mut bottleneck: Option<W> = None;
            let mut v = t;
            while v != s {
                let e = pred[v].expect("path edge");
                let r = self.residual(e);
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = self.edges[e ^ 1].to;
            }
            let b = bottleneck.expect("nonempty path");
            let mut v = t;
            while v != s {
                let e = pred[v].expect("path edge");
                self.edges[e].flow = self.edges[e].flow.clone() + b.clone();
                self.edges[e ^ 1].flow = self.edges[e ^ 1].flow.clone() - b.clone();
                v = self.edges[e ^ 1].to;
            }
            total = total + b;
        }
    }

    /// Nodes reachable from `s` in the residual graph: the source side of
    /// the minimum cut with the fewest nodes.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if !seen[v] && self.has_residual(e) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
