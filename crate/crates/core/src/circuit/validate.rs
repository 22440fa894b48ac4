use fixedbitset::FixedBitSet;

use super::{Circuit, Node};

/// Number of units of each kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnitCounts {
    pub sums: usize,
    pub products: usize,
    pub leaves: usize,
}

impl UnitCounts {
    pub fn total(&self) -> usize {
        self.sums + self.products + self.leaves
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Sum children with different scopes.
    NotSmooth,
    /// Product children with overlapping scopes.
    NotDecomposable,
    /// Sum children whose supports could not be shown disjoint.
    NotDeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determinism {
    Deterministic,
    /// The first sum whose children's supports were not shown disjoint.
    NotProven { node: usize },
    /// The circuit has non-indicator leaves; no structural check applies.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub smooth: bool,
    pub decomposable: bool,
    pub deterministic: Determinism,
    pub counts: UnitCounts,
    pub violations: Vec<Violation>,
}

impl StructureReport {
    pub fn is_deterministic(&self) -> bool {
        self.deterministic == Determinism::Deterministic
    }
}

pub(crate) fn compute_scopes(var_count: usize, nodes: &[Node]) -> Vec<FixedBitSet> {
    let mut scopes: Vec<FixedBitSet> = Vec::with_capacity(nodes.len());
    for node in nodes {
        let mut scope = FixedBitSet::with_capacity(var_count);
        match node {
            Node::Leaf { var, .. } => scope.insert(*var),
            Node::Sum { children, .. } | Node::Product { children } => {
                for &c in children {
                    scope.union_with(&scopes[c]);
                }
            }
        }
        scopes.push(scope);
    }
    scopes
}

/// Variable scope of every node, in one pass over the arena.
pub fn scope_of(c: &Circuit) -> Vec<FixedBitSet> {
    compute_scopes(c.var_count(), c.nodes())
}

/// Checks smoothness, decomposability and (for indicator-leaf circuits)
/// determinism.
///
/// Determinism is proven per sum unit from the literals each child forces:
/// two children have disjoint supports when one forces `x = 0` and the other
/// `x = 1` for some variable. Zero-weight children are ignored.
pub fn validate(c: &Circuit) -> StructureReport {
    let scopes = c.scopes();
    let mut counts = UnitCounts::default();
    let mut violations = Vec::new();
    for (id, node) in c.nodes().iter().enumerate() {
        match node {
            Node::Sum { children, .. } => {
                counts.sums += 1;
                let first = &scopes[children[0]];
                if children.iter().any(|&ch| scopes[ch] != *first) {
                    violations.push(Violation {
                        node: id,
                        kind: ViolationKind::NotSmooth,
                    });
                }
            }
            Node::Product { children } => {
                counts.products += 1;
                let mut seen = FixedBitSet::with_capacity(c.var_count());
                let mut overlap = false;
                for &ch in children {
                    overlap |= !seen.is_disjoint(&scopes[ch]);
                    seen.union_with(&scopes[ch]);
                }
                if overlap {
                    violations.push(Violation {
                        node: id,
                        kind: ViolationKind::NotDecomposable,
                    });
                }
            }
            Node::Leaf { .. } => counts.leaves += 1,
        }
    }
    let smooth = !violations.iter().any(|v| v.kind == ViolationKind::NotSmooth);
    let decomposable = !violations.iter().any(|v| v.kind == ViolationKind::NotDecomposable);
    let deterministic = check_determinism(c, &mut violations);
    StructureReport {
        smooth,
        decomposable,
        deterministic,
        counts,
        violations,
    }
}

fn check_determinism(c: &Circuit, violations: &mut Vec<Violation>) -> Determinism {
    let all_indicators = c
        .nodes()
        .iter()
        .all(|n| !matches!(n, Node::Leaf { .. }) || n.indicator_value().is_some());
    if !all_indicators {
        return Determinism::Unknown;
    }
    let v = c.var_count();
    // forced[n] = (variables forced to 0, variables forced to 1) on n's support.
    let mut forced: Vec<[FixedBitSet; 2]> = Vec::with_capacity(c.len());
    let mut first_failure = None;
    for (id, node) in c.nodes().iter().enumerate() {
        let mut f = [FixedBitSet::with_capacity(v), FixedBitSet::with_capacity(v)];
        match node {
            Node::Leaf { .. } => {
                let (var, value) = node.indicator_value().expect("checked above");
                f[value as usize].insert(var);
            }
            Node::Product { children } => {
                for &ch in children {
                    f[0].union_with(&forced[ch][0]);
                    f[1].union_with(&forced[ch][1]);
                }
            }
            Node::Sum {
                children,
                log_weights,
            } => {
                let live: Vec<usize> = children
                    .iter()
                    .zip(log_weights)
                    .filter(|(_, w)| **w > f64::NEG_INFINITY)
                    .map(|(&ch, _)| ch)
                    .collect();
                f = forced[live[0]].clone();
                for &ch in &live[1..] {
                    f[0].intersect_with(&forced[ch][0]);
                    f[1].intersect_with(&forced[ch][1]);
                }
                let disjoint = |a: usize, b: usize| {
                    !forced[a][0].is_disjoint(&forced[b][1]) || !forced[a][1].is_disjoint(&forced[b][0])
                };
                let proven = live
                    .iter()
                    .enumerate()
                    .all(|(k, &a)| live[k + 1..].iter().all(|&b| disjoint(a, b)));
                if !proven {
                    violations.push(Violation {
                        node: id,
                        kind: ViolationKind::NotDeterministic,
                    });
                    first_failure.get_or_insert(id);
                }
            }
        }
        forced.push(f);
    }
    match first_failure {
        None => Determinism::Deterministic,
        Some(node) => Determinism::NotProven { node },
    }
}
