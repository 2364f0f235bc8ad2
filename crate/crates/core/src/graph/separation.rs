use std::collections::VecDeque;

use super::{BidirectedGraph, Dag, SeparationQuery};
use crate::Result;

impl BidirectedGraph {
    /// m-separation of `q.a()` and `q.b()` given `q.given()`.
    ///
    /// In a bi-directed graph every non-endpoint vertex of a path is a
    /// collider, so a path m-connects exactly when all its interior vertices
    /// are conditioned on. This is a breadth-first search that may only
    /// continue through vertices of the conditioning set.
    pub fn m_separated(&self, q: &SeparationQuery) -> Result<bool> {
        Ok(self.m_connecting_path(q)?.is_none())
    }

    /// A shortest m-connecting path from some vertex of `a` to some vertex of
    /// `b`, or `None` when the sets are m-separated.
    pub fn m_connecting_path(&self, q: &SeparationQuery) -> Result<Option<Vec<usize>>> {
        let p = self.len();
        q.check_range(p)?;
        let mut in_given = vec![false; p];
        q.given().iter().for_each(|&v| in_given[v] = true);
        let mut in_b = vec![false; p];
        q.b().iter().for_each(|&v| in_b[v] = true);

        let mut parent = vec![usize::MAX; p];
        let mut visited = vec![false; p];
        let mut queue = VecDeque::new();
        for &a in q.a() {
            visited[a] = true;
            queue.push_back(a);
        }
        while let Some(v) = queue.pop_front() {
            for w in 0..p {
                if !self.adjacent(v, w) || visited[w] {
                    continue;
                }
                if in_b[w] {
                    let mut path = vec![w, v];
                    let mut cur = v;
                    while parent[cur] != usize::MAX {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Ok(Some(path));
                }
                if in_given[w] {
                    visited[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// Arrived at the vertex from one of its children.
    Up,
    /// Arrived at the vertex from one of its parents.
    Down,
}

impl Dag {
    /// d-separation by the reachability ("Bayes ball") formulation: a
    /// non-collider blocks when conditioned on, a collider blocks unless it
    /// or one of its descendants is conditioned on.
    pub fn d_separated(&self, q: &SeparationQuery) -> Result<bool> {
        let p = self.len();
        q.check_range(p)?;
        let mut in_given = vec![false; p];
        q.given().iter().for_each(|&v| in_given[v] = true);
        let mut in_b = vec![false; p];
        q.b().iter().for_each(|&v| in_b[v] = true);
        let opens_collider = self.ancestors_of_set(q.given());

        let slot = |v: usize, d: Direction| 2 * v + usize::from(d == Direction::Down);
        let mut visited = vec![false; 2 * p];
        let mut stack: Vec<(usize, Direction)> = q.a().iter().map(|&a| (a, Direction::Up)).collect();
        while let Some((v, dir)) = stack.pop() {
            if std::mem::replace(&mut visited[slot(v, dir)], true) {
                continue;
            }
            if in_b[v] {
                return Ok(false);
            }
            match dir {
                Direction::Up if !in_given[v] => {
                    stack.extend(self.parents(v).iter().map(|&u| (u, Direction::Up)));
                    stack.extend(self.children(v).iter().map(|&c| (c, Direction::Down)));
                }
                Direction::Up => {}
                Direction::Down => {
                    if !in_given[v] {
                        stack.extend(self.children(v).iter().map(|&c| (c, Direction::Down)));
                    }
                    if opens_collider[v] {
                        stack.extend(self.parents(v).iter().map(|&u| (u, Direction::Up)));
                    }
                }
            }
        }
        Ok(true)
    }
}
