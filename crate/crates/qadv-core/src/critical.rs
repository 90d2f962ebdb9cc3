//! Critical inputs of a read-once formula and the neighbor relation on them.
//!
//! An input is critical when every AND node has at most one child evaluating
//! to 0 and every OR node at most one child evaluating to 1. Critical zeros
//! of an AND-rooted formula carry a *type*: the index of the unique child
//! that evaluates to 0 (dually, critical ones of an OR root). A critical
//! zero and a critical one are neighbors when they agree outside one child
//! block and the restrictions to that block are neighbors recursively; two
//! neighbors always differ in exactly one variable.
//!
//! The enumerator works structurally on the normalized tree. Its output is
//! cross-checked elsewhere against [`is_critical`], which re-tests the
//! defining predicate node by node and shares no code with the enumerator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::formula::{FormulaTree, Gate};

/// Enumeration limits.
#[derive(Clone, Copy, Debug)]
pub struct CriticalConfig {
    /// Cap on `|X| + |Y|`, the total number of critical inputs.
    pub max_critical: usize,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self { max_critical: 1 << 20 }
    }
}

/// The critical zeros `X` and critical ones `Y` of a formula.
///
/// `types` maps each input of the typed side to the 1-based root-child index
/// it decomposes through: the zeros when the root is an AND, the ones when
/// it is an OR. A single-leaf formula has no decomposition and an empty map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalInputSet {
    pub zeros: BTreeSet<BitString>,
    pub ones: BTreeSet<BitString>,
    pub types: BTreeMap<BitString, usize>,
    pub root_gate: Option<Gate>,
    pub n: u32,
}

/// Neighbor pairs, stored one-sided on `X x Y`, with the flipped variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborRelation {
    /// `(x, y) -> i` where `x` and `y` differ exactly on variable `i`.
    pub pairs: BTreeMap<(BitString, BitString), u32>,
    pub n: u32,
}

impl NeighborRelation {
    /// All inputs that appear in some pair.
    pub fn vertices(&self) -> BTreeSet<BitString> {
        self.pairs
            .keys()
            .flat_map(|(x, y)| [*x, *y])
            .collect()
    }

    /// Neighbors of `w` on the other side of the relation.
    pub fn neighbors_of(&self, w: &BitString) -> Vec<BitString> {
        let mut out: Vec<BitString> = self
            .pairs
            .keys()
            .filter_map(|(x, y)| {
                if x == w {
                    Some(*y)
                } else if y == w {
                    Some(*x)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Whether the undirected neighbor graph on `X ∪ Y` is connected.
    pub fn is_connected(&self) -> bool {
        let vertices = self.vertices();
        let Some(start) = vertices.iter().next().copied() else {
            return true;
        };
        let mut adjacency: BTreeMap<BitString, Vec<BitString>> = BTreeMap::new();
        for (x, y) in self.pairs.keys() {
            adjacency.entry(*x).or_default().push(*y);
            adjacency.entry(*y).or_default().push(*x);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in adjacency.get(&v).into_iter().flatten() {
                if seen.insert(*w) {
                    queue.push_back(*w);
                }
            }
        }
        seen.len() == vertices.len()
    }
}

/// Tests the criticality predicate directly: at every AND node at most one
/// child evaluates to 0, at every OR node at most one child evaluates to 1.
pub fn is_critical(tree: &FormulaTree, input: BitString) -> Result<bool> {
    let n = tree.leaf_count() as u32;
    if input.len() != n || tree.variables().iter().any(|&v| v > input.len()) {
        return Err(Error::LengthMismatch { expected: n, got: input.len() });
    }
    fn walk(t: &FormulaTree, input: BitString) -> (bool, bool) {
        match t {
            FormulaTree::Leaf { var, negated } => (input.get(*var) != *negated, true),
            FormulaTree::Node { gate, children } => {
                let mut value = *gate == Gate::And;
                let mut critical = true;
                let mut minority = 0usize;
                for c in children {
                    let (v, crit) = walk(c, input);
                    critical &= crit;
                    match gate {
                        Gate::And => {
                            value &= v;
                            minority += usize::from(!v);
                        }
                        Gate::Or => {
                            value |= v;
                            minority += usize::from(v);
                        }
                    }
                }
                (value, critical && minority <= 1)
            }
        }
    }
    Ok(walk(tree, input).1)
}

/// Enumerates the critical inputs of a normalized tree.
pub fn critical_inputs(tree: &FormulaTree, config: &CriticalConfig) -> Result<CriticalInputSet> {
    Ok(structure(tree, config)?.0)
}

/// Builds the neighbor relation for a critical set previously produced from
/// the same tree.
pub fn neighbor_relation(
    tree: &FormulaTree,
    cs: &CriticalInputSet,
    config: &CriticalConfig,
) -> Result<NeighborRelation> {
    let (recomputed, rel) = structure(tree, config)?;
    debug_assert_eq!(&recomputed, cs, "critical set does not belong to this tree");
    Ok(rel)
}

/// Critical set and neighbor relation in one pass. Enumeration fans out
/// over the root-child groups when the `parallel` feature is on.
pub fn structure(
    tree: &FormulaTree,
    config: &CriticalConfig,
) -> Result<(CriticalInputSet, NeighborRelation)> {
    structure_with(tree, config, true)
}

/// Sequential enumeration regardless of features; same output as
/// [`structure`].
pub fn structure_seq(
    tree: &FormulaTree,
    config: &CriticalConfig,
) -> Result<(CriticalInputSet, NeighborRelation)> {
    structure_with(tree, config, false)
}

fn structure_with(
    tree: &FormulaTree,
    config: &CriticalConfig,
    parallel: bool,
) -> Result<(CriticalInputSet, NeighborRelation)> {
    tree.check_normalized()?;
    let n = tree.leaf_count();
    if n > 64 {
        return Err(Error::TooManyVariables { n });
    }
    let (zeros_count, ones_count) = counts(tree);
    let needed = zeros_count.saturating_add(ones_count);
    if needed > config.max_critical as u128 {
        return Err(Error::SizeLimit { needed, cap: config.max_critical });
    }

    let node = enumerate(tree, parallel);
    let zeros: BTreeSet<BitString> = node.zeros.iter().copied().collect();
    let ones: BTreeSet<BitString> = node.ones.iter().copied().collect();

    let (types, root_gate) = match tree {
        FormulaTree::Leaf { .. } => (BTreeMap::new(), None),
        FormulaTree::Node { gate, children } => {
            let typed: Vec<BitString> = match gate {
                Gate::And => zeros.iter().copied().collect(),
                Gate::Or => ones.iter().copied().collect(),
            };
            let mut types = BTreeMap::new();
            for w in typed {
                types.insert(w, decomposition_type(children, *gate, w));
            }
            (types, Some(*gate))
        }
    };

    let cs = CriticalInputSet {
        zeros,
        ones,
        types,
        root_gate,
        n: n as u32,
    };
    let rel = NeighborRelation {
        pairs: node.pairs.into_iter().map(|(x, y, i)| ((x, y), i)).collect(),
        n: n as u32,
    };
    Ok((cs, rel))
}

/// Index (1-based) of the unique child taking the minority value on `w`.
fn decomposition_type(children: &[FormulaTree], gate: Gate, w: BitString) -> usize {
    let minority = gate == Gate::Or;
    children
        .iter()
        .position(|c| c.eval_global(w) == minority)
        .map(|p| p + 1)
        .expect("typed critical input must have a minority child")
}

/// `(|X|, |Y|)` without enumerating, saturating on overflow.
pub(crate) fn counts_for(tree: &FormulaTree) -> (u128, u128) {
    counts(tree)
}

fn counts(tree: &FormulaTree) -> (u128, u128) {
    match tree {
        FormulaTree::Leaf { .. } => (1, 1),
        FormulaTree::Node { gate, children } => {
            let sub: Vec<(u128, u128)> = children.iter().map(counts).collect();
            // product side and typed side, in (majority, minority) roles
            let (majority, minority): (Vec<u128>, Vec<u128>) = match gate {
                Gate::And => sub.iter().map(|&(z, o)| (o, z)).unzip(),
                Gate::Or => sub.iter().map(|&(z, o)| (z, o)).unzip(),
            };
            let product: u128 = majority.iter().fold(1u128, |a, &b| a.saturating_mul(b));
            let mut typed = 0u128;
            for (i, &min_i) in minority.iter().enumerate() {
                let mut term = min_i;
                for (j, &m) in majority.iter().enumerate() {
                    if j != i {
                        term = term.saturating_mul(m);
                    }
                }
                typed = typed.saturating_add(term);
            }
            match gate {
                Gate::And => (typed, product),
                Gate::Or => (product, typed),
            }
        }
    }
}

struct NodeCritical {
    zeros: Vec<BitString>,
    ones: Vec<BitString>,
    pairs: Vec<(BitString, BitString, u32)>,
}

fn enumerate(tree: &FormulaTree, parallel: bool) -> NodeCritical {
    match tree {
        FormulaTree::Leaf { .. } => NodeCritical {
            zeros: vec![BitString::new(1, 0)],
            ones: vec![BitString::new(1, 1)],
            pairs: vec![(BitString::new(1, 0), BitString::new(1, 1), 1)],
        },
        FormulaTree::Node { gate, children } => {
            // fan out over root-child combinations only; deeper levels run
            // sequentially inside their task
            let sub: Vec<NodeCritical> =
                map_indexed(children.len(), parallel, |i| enumerate(&children[i], false));

            let widths: Vec<u32> = children.iter().map(|c| c.leaf_count() as u32).collect();
            let offsets: Vec<u32> = widths
                .iter()
                .scan(0, |acc, w| {
                    let o = *acc;
                    *acc += w;
                    Some(o)
                })
                .collect();

            // Blocks repeated across the other children: critical ones for an
            // AND, critical zeros for an OR.
            let context: Vec<&[BitString]> = sub
                .iter()
                .map(|s| match gate {
                    Gate::And => s.ones.as_slice(),
                    Gate::Or => s.zeros.as_slice(),
                })
                .collect();
            let product_side = cartesian(&context);

            let r = children.len();
            let group = |i: usize| -> (Vec<BitString>, Vec<(BitString, BitString, u32)>) {
                let prefixes = cartesian(&context[..i]);
                let suffixes = cartesian(&context[i + 1..]);
                let minority = match gate {
                    Gate::And => &sub[i].zeros,
                    Gate::Or => &sub[i].ones,
                };
                let mut typed =
                    Vec::with_capacity(prefixes.len() * minority.len() * suffixes.len());
                let mut pairs =
                    Vec::with_capacity(prefixes.len() * sub[i].pairs.len() * suffixes.len());
                for p in &prefixes {
                    for m in minority {
                        for s in &suffixes {
                            typed.push(p.concat(m).concat(s));
                        }
                    }
                    for (x, y, flip) in &sub[i].pairs {
                        for s in &suffixes {
                            pairs.push((
                                p.concat(x).concat(s),
                                p.concat(y).concat(s),
                                offsets[i] + flip,
                            ));
                        }
                    }
                }
                (typed, pairs)
            };

            let groups: Vec<_> = map_indexed(r, parallel, group);

            let mut typed_side = Vec::new();
            let mut pairs = Vec::new();
            for (t, p) in groups {
                typed_side.extend(t);
                pairs.extend(p);
            }
            typed_side.sort_unstable();
            pairs.sort_unstable();

            match gate {
                Gate::And => NodeCritical { zeros: typed_side, ones: product_side, pairs },
                Gate::Or => NodeCritical { zeros: product_side, ones: typed_side, pairs },
            }
        }
    }
}

/// Concatenation of one block from each list, last block varying fastest.
/// The empty product is the single empty string.
fn cartesian(lists: &[&[BitString]]) -> Vec<BitString> {
    let mut out = vec![BitString::zeros(0)];
    for list in lists {
        out = out
            .iter()
            .flat_map(|prefix| list.iter().map(move |block| prefix.concat(block)))
            .collect();
    }
    out
}
