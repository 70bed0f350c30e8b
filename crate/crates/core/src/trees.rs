//! Rooted unlabeled trees: canonical codes, Poisson Galton–Watson
//! probabilities, sampling and exhaustive enumeration.
//!
//! A tree is encoded by nested parentheses, each vertex being `(` followed by
//! the codes of its children in lexicographic order and `)`. Two rooted
//! trees are isomorphic exactly when their codes agree.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::forest::ComponentGraph;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RootedTree {
    code: String,
}

impl RootedTree {
    pub fn single_vertex() -> Self {
        Self { code: "()".into() }
    }

    /// Parses any balanced encoding and returns its canonical form.
    pub fn from_code(code: &str) -> Result<Self> {
        let parents = parse_parents(code)?;
        Ok(Self::from_parents(&parents))
    }

    /// Tree given by `parents[v]` for every non-root vertex `v >= 1`, rooted
    /// at vertex 0 (`parents[0]` is ignored).
    pub fn from_parents(parents: &[usize]) -> Self {
        let mut children = vec![Vec::new(); parents.len()];
        for (v, &p) in parents.iter().enumerate().skip(1) {
            children[p].push(v as u32);
        }
        Self {
            code: code_from_children(&children, 0),
        }
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn size(&self) -> usize {
        self.code.len() / 2
    }

    /// Codes of the subtrees hanging from the root, in canonical order.
    pub fn root_children(&self) -> Vec<&str> {
        top_level(&self.code[1..self.code.len() - 1])
    }
}

impl TryFrom<String> for RootedTree {
    type Error = Error;

    fn try_from(code: String) -> Result<Self> {
        RootedTree::from_code(&code)
    }
}

impl From<RootedTree> for String {
    fn from(t: RootedTree) -> String {
        t.code
    }
}

impl std::fmt::Display for RootedTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.code)
    }
}

/// Splits a concatenation of balanced codes into its top-level pieces.
fn top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, b) in s.bytes().enumerate() {
        if b == b'(' {
            if depth == 0 {
                start = i;
            }
            depth += 1;
        } else {
            depth -= 1;
            if depth == 0 {
                out.push(&s[start..=i]);
            }
        }
    }
    out
}

fn parse_parents(code: &str) -> Result<Vec<usize>> {
    let bad = || Error::BadTreeCode(code.to_string());
    let mut parents = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut closed_root = false;
    for b in code.bytes() {
        if closed_root {
            return Err(bad());
        }
        match b {
            b'(' => {
                let v = parents.len();
                parents.push(stack.last().copied().unwrap_or(0));
                stack.push(v);
            }
            b')' => {
                stack.pop().ok_or_else(bad)?;
                closed_root = stack.is_empty();
            }
            _ => return Err(bad()),
        }
    }
    if !closed_root {
        return Err(bad());
    }
    Ok(parents)
}

/// Canonical code of the subtree at `root`, computed bottom-up without
/// recursion.
fn code_from_children(children: &[Vec<u32>], root: usize) -> String {
    let mut order = vec![root as u32];
    let mut i = 0;
    while i < order.len() {
        let v = order[i] as usize;
        order.extend_from_slice(&children[v]);
        i += 1;
    }
    let mut codes: Vec<Option<String>> = vec![None; children.len()];
    for &v in order.iter().rev() {
        let v = v as usize;
        let mut kids: Vec<String> = children[v].iter().map(|&c| codes[c as usize].take().expect("child done")).collect();
        kids.sort_unstable();
        let len = 2 + kids.iter().map(String::len).sum::<usize>();
        let mut s = String::with_capacity(len);
        s.push('(');
        for k in &kids {
            s.push_str(k);
        }
        s.push(')');
        codes[v] = Some(s);
    }
    codes[root].take().expect("root done")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Canonical {
    Tree(RootedTree),
    /// The component has a cycle.
    NotATree,
}

/// Canonical code of a connected component rooted at local vertex `root`.
pub fn canonicalize(graph: &ComponentGraph, root: usize) -> Result<Canonical> {
    let n = graph.vertices.len();
    if root >= n {
        return Err(Error::ParticleOutOfRange { particle: root, n });
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &graph.edges {
        if u as usize >= n || v as usize >= n {
            return Err(Error::ParticleOutOfRange {
                particle: u.max(v) as usize,
                n,
            });
        }
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    // orient away from the root
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = vec![root as u32];
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i] as usize;
        i += 1;
        for &w in &adjacency[v] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                children[v].push(w);
                queue.push(w);
            }
        }
    }
    if queue.len() != n {
        return Err(Error::Disconnected);
    }
    if graph.edges.len() + 1 != n {
        return Ok(Canonical::NotATree);
    }
    Ok(Canonical::Tree(RootedTree {
        code: code_from_children(&children, root),
    }))
}

/// Probability that a Galton–Watson tree with Poisson(`lambda`) offspring is
/// isomorphic to `tree`.
pub fn gw_tree_prob(lambda: f64, tree: &RootedTree) -> f64 {
    let mut memo = HashMap::new();
    ln_gw_prob(lambda, tree.code(), &mut memo).exp()
}

/// Log of `gw_tree_prob`, `-inf` for impossible trees.
pub fn ln_gw_tree_prob(lambda: f64, tree: &RootedTree) -> f64 {
    let mut memo = HashMap::new();
    ln_gw_prob(lambda, tree.code(), &mut memo)
}

fn ln_gw_prob<'a>(lambda: f64, code: &'a str, memo: &mut HashMap<&'a str, f64>) -> f64 {
    if let Some(&v) = memo.get(code) {
        return v;
    }
    let kids = top_level(&code[1..code.len() - 1]);
    let c = kids.len();
    let mut total = -lambda;
    if c > 0 {
        total += c as f64 * lambda.ln();
        // multiplicities of equal subtrees (codes are sorted, so runs)
        let mut i = 0;
        while i < c {
            let mut j = i;
            while j < c && kids[j] == kids[i] {
                j += 1;
            }
            let mult = (j - i) as f64;
            total += mult * ln_gw_prob(lambda, kids[i], memo) - ln_gamma(mult + 1.0);
            i = j;
        }
    }
    memo.insert(code, total);
    total
}

/// Largest size accepted by `enumerate_rooted_trees`.
pub const MAX_ENUMERATION_SIZE: usize = 12;

/// All rooted unlabeled trees with 1..=`max_size` vertices; entry `k - 1`
/// holds the trees of size `k`, sorted by code.
pub fn enumerate_rooted_trees(max_size: usize) -> Result<Vec<Vec<RootedTree>>> {
    if max_size > MAX_ENUMERATION_SIZE {
        return Err(Error::TooLarge(max_size));
    }
    // every tree so far with its size, in a fixed global order
    let mut all: Vec<(usize, String)> = Vec::new();
    let mut by_size: Vec<Vec<RootedTree>> = Vec::new();
    for n in 1..=max_size {
        let mut codes = Vec::new();
        let mut chosen = Vec::new();
        children_multisets(&all, n - 1, all.len(), &mut chosen, &mut codes);
        codes.sort_unstable();
        all.extend(codes.iter().map(|c| (n, c.clone())));
        by_size.push(codes.into_iter().map(|code| RootedTree { code }).collect());
    }
    Ok(by_size)
}

/// Emits `(` + children + `)` for every multiset of trees from `all[..limit]`
/// whose sizes add up to `remaining`, choosing indices in nonincreasing order.
fn children_multisets(all: &[(usize, String)], remaining: usize, limit: usize, chosen: &mut Vec<usize>, out: &mut Vec<String>) {
    if remaining == 0 {
        let mut kids: Vec<&str> = chosen.iter().map(|&i| all[i].1.as_str()).collect();
        kids.sort_unstable();
        let mut s = String::from("(");
        for k in kids {
            s.push_str(k);
        }
        s.push(')');
        out.push(s);
        return;
    }
    for i in (0..limit).rev() {
        if all[i].0 <= remaining {
            chosen.push(i);
            children_multisets(all, remaining - all[i].0, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GwSample {
    Tree(RootedTree),
    /// The tree grew past the size cap.
    Overflow,
}

/// Breadth-first Galton–Watson tree with Poisson(`lambda`) offspring,
/// abandoned once it exceeds `size_cap` vertices.
pub fn sample_gw_tree<R: Rng + ?Sized>(lambda: f64, size_cap: usize, rng: &mut R) -> Result<GwSample> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(crate::error::invalid("lambda", format!("{lambda} must be finite and nonnegative")));
    }
    let poisson = if lambda > 0.0 {
        Some(Poisson::new(lambda).map_err(|e| crate::error::invalid("lambda", e.to_string()))?)
    } else {
        None
    };
    let mut parents = vec![0usize];
    let mut next = 0;
    while next < parents.len() {
        let kids = poisson.map_or(0, |p| p.sample(rng) as usize);
        if parents.len() + kids > size_cap {
            return Ok(GwSample::Overflow);
        }
        parents.extend(std::iter::repeat_n(next, kids));
        next += 1;
    }
    Ok(GwSample::Tree(RootedTree::from_parents(&parents)))
}

/// Law of a Poisson(`lambda`) Galton–Watson tree restricted to trees of at
/// most `max_size` vertices, keyed by code. The missing mass is the
/// probability of a larger (or infinite) tree.
pub fn gw_distribution(lambda: f64, max_size: usize) -> Result<BTreeMap<RootedTree, f64>> {
    Ok(enumerate_rooted_trees(max_size)?
        .into_iter()
        .flatten()
        .map(|t| {
            let p = gw_tree_prob(lambda, &t);
            (t, p)
        })
        .collect())
}
