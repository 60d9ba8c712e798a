//! Prime packings and the filtered packing closure of a weighted basket.
//!
//! A prime packing replaces two entries `(b1,r1)`, `(b2,r2)` with
//! `|b1·r2 − b2·r1| = 1` by their mediant `(b1+b2, r1+r2)`. `P2` and `χ` are
//! unchanged, `K³` drops by `b1²/r1 + b2²/r2 − (b1+b2)²/(r1+r2) > 0`, and no
//! plurigenus `χ_m` ever increases.
//!
//! [`descendants`] walks every basket reachable by zero or more packings and
//! keeps those passing a [`DescendantFilter`]. The `K³` floor prunes whole
//! subtrees. So does a plurigenus that has dropped below every value it is
//! allowed to take, since descendants can only lower it further; this can be
//! switched off with [`SearchOptions::prune_on_pm_deficit`], in which case the
//! plurigenus predicates only drop nodes and their subtrees are still walked.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basket::{normalize_pair, Basket, Pair, WeightedBasket};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PackingStep {
    pub left: Pair,
    pub right: Pair,
    pub merged: Pair,
}

impl PackingStep {
    /// `None` unless the two pairs are Farey neighbours.
    pub fn new(left: Pair, right: Pair) -> Option<PackingStep> {
        if left.det(&right).abs() != 1 {
            return None;
        }
        let merged = normalize_pair(
            (left.b() + right.b()) as i64,
            (left.r() + right.r()) as i64,
        )
        .expect("determinant ±1 forces a coprime mediant");
        debug_assert_eq!(merged.b(), left.b() + right.b());
        Some(PackingStep {
            left,
            right,
            merged,
        })
    }

    /// `b1²/r1 + b2²/r2 − (b1+b2)²/(r1+r2)`, the drop in `K³`.
    pub fn k3_drop(&self) -> Rational {
        let sq = |p: Pair| Rational::new(p.b() as i64 * p.b() as i64, p.r() as i64);
        sq(self.left) + sq(self.right) - sq(self.merged)
    }

    pub fn apply(&self, basket: &Basket) -> Basket {
        let mut out = basket.clone();
        assert!(out.remove_one(&self.left) && out.remove_one(&self.right));
        out.add(self.merged, 1);
        out
    }
}

/// Every basket one prime packing away, deduplicated, in canonical order.
pub fn one_step_packings(basket: &Basket) -> Vec<(PackingStep, Basket)> {
    let pairs: Vec<Pair> = basket.pairs().collect();
    let mut out: BTreeMap<Basket, PackingStep> = BTreeMap::new();
    for (i, &left) in pairs.iter().enumerate() {
        for &right in &pairs[i + 1..] {
            if let Some(step) = PackingStep::new(left, right) {
                out.entry(step.apply(basket)).or_insert(step);
            }
        }
    }
    out.into_iter().map(|(b, s)| (s, b)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescendantFilter {
    /// Keep (and descend from) only baskets with `K³ ≥ floor`.
    pub k3_floor: Option<Rational>,
    /// Require `χ_m` equal to the root's value for `3 ≤ m ≤ M`.
    pub preserve_pm_upto: Option<u32>,
    /// Allowed values of `χ_m` for specific `m`; overrides the root value.
    #[serde(default)]
    pub pm_pins: BTreeMap<u32, BTreeSet<i64>>,
    /// Require `d | r_X`.
    pub rx_divisor: Option<u64>,
    /// Require `χ_m` to be a non-negative integer for `2 ≤ m ≤ n`.
    pub integrality_upto: Option<u32>,
}

impl DescendantFilter {
    fn targets(&self, root: &WeightedBasket) -> BTreeMap<u32, BTreeSet<Rational>> {
        let mut out = BTreeMap::new();
        if let Some(upto) = self.preserve_pm_upto {
            let k3 = root.k3();
            for m in 3..=upto {
                let v = root.plurigenus_with_k3(m, &k3);
                out.insert(m, BTreeSet::from([v]));
            }
        }
        for (&m, vals) in &self.pm_pins {
            out.insert(m, vals.iter().map(|&v| Rational::from_int(v)).collect());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traversal {
    #[default]
    BreadthFirst,
    DepthFirst,
    /// Level-synchronous breadth-first search with each level expanded on
    /// the rayon pool.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub max_depth: Option<u32>,
    pub traversal: Traversal,
    pub prune_on_pm_deficit: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_depth: None,
            traversal: Traversal::BreadthFirst,
            prune_on_pm_deficit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Search {
    /// Accepted baskets in canonical order.
    pub accepted: Vec<WeightedBasket>,
    /// Distinct baskets examined.
    pub visited: usize,
    /// Edges among the examined baskets that survived the `K³` floor, for
    /// DAG rendering.
    pub edges: Vec<(Basket, PackingStep, Basket)>,
}

enum Verdict {
    /// Below the `K³` floor or an unreachable plurigenus target.
    Pruned,
    Rejected,
    Accepted,
}

struct Evaluator<'a> {
    p2: i64,
    chi: i64,
    filter: &'a DescendantFilter,
    targets: BTreeMap<u32, BTreeSet<Rational>>,
    prune_on_pm_deficit: bool,
}

impl Evaluator<'_> {
    fn judge(&self, basket: &Basket) -> Verdict {
        let wb = WeightedBasket::new(basket.clone(), self.p2, self.chi);
        let k3 = wb.k3();
        if let Some(floor) = &self.filter.k3_floor {
            if &k3 < floor {
                return Verdict::Pruned;
            }
        }
        let mut ok = true;
        for (&m, allowed) in &self.targets {
            let v = wb.plurigenus_with_k3(m, &k3);
            if !allowed.contains(&v) {
                ok = false;
                if self.prune_on_pm_deficit && allowed.iter().all(|a| &v < a) {
                    return Verdict::Pruned;
                }
            }
        }
        if !ok {
            return Verdict::Rejected;
        }
        if let Some(d) = self.filter.rx_divisor {
            if d == 0 || !wb.cartier_index().is_multiple_of(d) {
                return Verdict::Rejected;
            }
        }
        if let Some(upto) = self.filter.integrality_upto {
            for m in 2..=upto {
                let v = wb.plurigenus_with_k3(m, &k3);
                if !v.is_integer() || v.is_negative() {
                    return Verdict::Rejected;
                }
            }
        }
        Verdict::Accepted
    }
}

/// Filtered packing closure; result sorted canonically.
pub fn descendants(
    wb: &WeightedBasket,
    filter: &DescendantFilter,
    max_depth: Option<u32>,
) -> Vec<WeightedBasket> {
    let opts = SearchOptions {
        max_depth,
        ..SearchOptions::default()
    };
    search(wb, filter, &opts).accepted
}

pub fn search(wb: &WeightedBasket, filter: &DescendantFilter, opts: &SearchOptions) -> Search {
    let ev = Evaluator {
        p2: wb.p2,
        chi: wb.chi,
        filter,
        targets: filter.targets(wb),
        prune_on_pm_deficit: opts.prune_on_pm_deficit,
    };
    let depth_ok = |d: u32| opts.max_depth.is_none_or(|max| d < max);

    let mut visited: HashSet<Basket> = HashSet::new();
    let mut accepted: BTreeSet<Basket> = BTreeSet::new();
    let mut edges = Vec::new();

    // Expands one node: returns its verdict and, unless pruned, its children.
    let expand = |b: &Basket, depth: u32| -> (Verdict, Vec<(PackingStep, Basket)>) {
        let verdict = ev.judge(b);
        let children = match verdict {
            Verdict::Pruned => Vec::new(),
            _ if depth_ok(depth) => one_step_packings(b),
            _ => Vec::new(),
        };
        (verdict, children)
    };

    match opts.traversal {
        Traversal::BreadthFirst | Traversal::DepthFirst => {
            let mut work: VecDeque<(Basket, u32)> = VecDeque::new();
            work.push_back((wb.basket.clone(), 0));
            visited.insert(wb.basket.clone());
            while let Some((b, depth)) = match opts.traversal {
                Traversal::DepthFirst => work.pop_back(),
                _ => work.pop_front(),
            } {
                let (verdict, children) = expand(&b, depth);
                if let Verdict::Accepted = verdict {
                    accepted.insert(b.clone());
                }
                for (step, child) in children {
                    edges.push((b.clone(), step, child.clone()));
                    if visited.insert(child.clone()) {
                        work.push_back((child, depth + 1));
                    }
                }
            }
        }
        Traversal::Parallel => {
            let mut frontier = vec![wb.basket.clone()];
            visited.insert(wb.basket.clone());
            let mut depth = 0;
            while !frontier.is_empty() {
                let results: Vec<_> = frontier
                    .par_iter()
                    .map(|b| {
                        let (v, c) = expand(b, depth);
                        (b, v, c)
                    })
                    .collect();
                let mut next = Vec::new();
                for (b, verdict, children) in results {
                    if let Verdict::Accepted = verdict {
                        accepted.insert(b.clone());
                    }
                    for (step, child) in children {
                        edges.push((b.clone(), step, child.clone()));
                        if visited.insert(child.clone()) {
                            next.push(child);
                        }
                    }
                }
                frontier = next;
                depth += 1;
            }
        }
    }

    // Edges into pruned nodes are dropped so the DAG shows only survivors.
    let survivors: HashSet<&Basket> = visited
        .iter()
        .filter(|b| !matches!(ev.judge(b), Verdict::Pruned))
        .collect();
    edges.retain(|(_, _, to)| survivors.contains(to));
    edges.sort();

    Search {
        accepted: accepted
            .into_iter()
            .map(|b| WeightedBasket::new(b, wb.p2, wb.chi))
            .collect(),
        visited: visited.len(),
        edges,
    }
}

/// Graphviz rendering of the packing DAG, nodes labelled with `K³`.
/// Accepted nodes are drawn with a double border.
pub fn packing_dag_dot(wb: &WeightedBasket, filter: &DescendantFilter, opts: &SearchOptions) -> String {
    let s = search(wb, filter, opts);
    let accepted: HashSet<&Basket> = s.accepted.iter().map(|w| &w.basket).collect();
    let mut nodes: BTreeSet<&Basket> = BTreeSet::new();
    nodes.insert(&wb.basket);
    for (from, _, to) in &s.edges {
        nodes.insert(from);
        nodes.insert(to);
    }
    let ids: BTreeMap<&Basket, usize> = nodes.iter().enumerate().map(|(i, b)| (*b, i)).collect();

    let mut out = String::from("digraph packing {\n  node [shape=box];\n");
    for (b, id) in &ids {
        let k3 = WeightedBasket::new((*b).clone(), wb.p2, wb.chi).k3();
        let periph = if accepted.contains(b) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  n{id} [label=\"{{{b}}}\\nK3={k3}\"{periph}];");
    }
    for (from, step, to) in &s.edges {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}+{}\"];",
            ids[from], ids[to], step.left, step.right
        );
    }
    out.push_str("}\n");
    out
}
