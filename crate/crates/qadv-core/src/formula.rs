//! Read-once AND/OR formulas: parsing, normalization, evaluation.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! formula := term { "|" term }
//! term    := factor { "&" factor }
//! factor  := ["!"] ( "x" integer | "(" formula ")" )
//! ```
//!
//! A formula is read-once when every variable index appears in exactly one
//! leaf. Negations are pushed down to the leaves during parsing (De Morgan),
//! so internal nodes never carry a negation flag. [`normalize`] then flattens
//! same-kind nesting, collapses single-child nodes, remaps variable indices
//! to the contiguous range `1..=n` in order of first appearance, and strips
//! the leaf negation flags into a side set. The normalized tree is monotone
//! and alternates AND/OR levels; consumers downstream assume exactly that
//! shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    And,
    Or,
}

impl Gate {
    pub fn dual(self) -> Gate {
        match self {
            Gate::And => Gate::Or,
            Gate::Or => Gate::And,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaTree {
    Leaf { var: u32, negated: bool },
    Node { gate: Gate, children: Vec<FormulaTree> },
}

impl FormulaTree {
    pub fn leaf(var: u32) -> Self {
        FormulaTree::Leaf { var, negated: false }
    }

    pub fn node(gate: Gate, children: Vec<FormulaTree>) -> Self {
        FormulaTree::Node { gate, children }
    }

    /// Number of leaves (= number of variables, by the read-once property).
    pub fn leaf_count(&self) -> usize {
        match self {
            FormulaTree::Leaf { .. } => 1,
            FormulaTree::Node { children, .. } => children.iter().map(Self::leaf_count).sum(),
        }
    }

    /// Variable indices in left-to-right leaf order.
    pub fn variables(&self) -> Vec<u32> {
        fn walk(t: &FormulaTree, out: &mut Vec<u32>) {
            match t {
                FormulaTree::Leaf { var, .. } => out.push(*var),
                FormulaTree::Node { children, .. } => children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn leftmost_leaf(&self) -> u32 {
        match self {
            FormulaTree::Leaf { var, .. } => *var,
            FormulaTree::Node { children, .. } => children[0].leftmost_leaf(),
        }
    }

    /// Evaluates the formula on an input of exactly `leaf_count` bits,
    /// where leaf `x_i` reads bit `i` of the input.
    pub fn evaluate(&self, input: BitString) -> Result<bool> {
        let n = self.leaf_count() as u32;
        if input.len() != n || self.variables().iter().any(|&v| v > input.len()) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: input.len(),
            });
        }
        Ok(self.eval_unchecked(input))
    }

    /// Evaluation of a subtree whose leaves index into the full input of the
    /// enclosing tree. No length check; leaf indexing panics if out of range.
    pub(crate) fn eval_global(&self, input: BitString) -> bool {
        self.eval_unchecked(input)
    }

    fn eval_unchecked(&self, input: BitString) -> bool {
        match self {
            FormulaTree::Leaf { var, negated } => input.get(*var) != *negated,
            FormulaTree::Node { gate: Gate::And, children } => {
                children.iter().all(|c| c.eval_unchecked(input))
            }
            FormulaTree::Node { gate: Gate::Or, children } => {
                children.iter().any(|c| c.eval_unchecked(input))
            }
        }
    }

    /// Evaluator over inputs of the tree's variable count. Panics on
    /// mismatched input lengths, so callers must pass well-formed inputs.
    pub fn evaluator(&self) -> impl Fn(BitString) -> bool + '_ {
        move |w| self.evaluate(w).expect("input length must match variable count")
    }

    /// Checks the shape produced by [`normalize`]: contiguous variables in
    /// first-appearance order, no negations, alternating gates, and at least
    /// two children per internal node.
    pub fn check_normalized(&self) -> Result<()> {
        let vars = self.variables();
        for (pos, &v) in vars.iter().enumerate() {
            if v != pos as u32 + 1 {
                return Err(Error::NotNormalized {
                    reason: format!("leaf {} holds x{v}, expected x{}", pos + 1, pos + 1),
                });
            }
        }
        fn walk(t: &FormulaTree, parent: Option<Gate>) -> Result<()> {
            match t {
                FormulaTree::Leaf { negated: true, var } => Err(Error::NotNormalized {
                    reason: format!("leaf x{var} is negated"),
                }),
                FormulaTree::Leaf { .. } => Ok(()),
                FormulaTree::Node { gate, children } => {
                    if children.len() < 2 {
                        return Err(Error::NotNormalized {
                            reason: "internal node with fewer than 2 children".into(),
                        });
                    }
                    if parent == Some(*gate) {
                        return Err(Error::NotNormalized {
                            reason: "same-kind nested nodes".into(),
                        });
                    }
                    children.iter().try_for_each(|c| walk(c, Some(*gate)))
                }
            }
        }
        walk(self, None)
    }
}

/// Serialization is fully parenthesized, with children ordered by the
/// variable index of their leftmost leaf.
impl fmt::Display for FormulaTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaTree::Leaf { var, negated } => {
                if *negated {
                    write!(f, "!x{var}")
                } else {
                    write!(f, "x{var}")
                }
            }
            FormulaTree::Node { gate, children } => {
                let op = match gate {
                    Gate::And => " & ",
                    Gate::Or => " | ",
                };
                let mut order: Vec<&FormulaTree> = children.iter().collect();
                order.sort_by_key(|c| c.leftmost_leaf());
                write!(f, "(")?;
                for (k, child) in order.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{op}")?;
                    }
                    write!(f, "{child}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Result of [`normalize`]: the monotone alternating tree plus the data
/// needed to translate inputs written against the original formula.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedFormula {
    pub tree: FormulaTree,
    /// Variable count of the normalized tree.
    pub n: u32,
    /// Original variable index -> normalized index (1-based on both sides).
    pub var_map: BTreeMap<u32, u32>,
    /// Normalized indices whose original leaf carried a negation.
    pub negations: BTreeSet<u32>,
}

impl NormalizedFormula {
    /// Translates an input indexed by original variables into the input the
    /// normalized tree reads: permuted by `var_map` and flipped on negated
    /// leaves. `original` must assign one bit per original variable, in
    /// increasing original-index order.
    pub fn map_input(&self, original: BitString) -> Result<BitString> {
        if original.len() as usize != self.var_map.len() {
            return Err(Error::LengthMismatch {
                expected: self.var_map.len() as u32,
                got: original.len(),
            });
        }
        let mut mapped = BitString::zeros(self.n);
        for (pos, (_, &new)) in self.var_map.iter().enumerate() {
            let bit = original.get(pos as u32 + 1) != self.negations.contains(&new);
            mapped = mapped.with_bit(new, bit);
        }
        Ok(mapped)
    }
}

/// Parses a formula and verifies the read-once property. Negations written
/// on parenthesized subformulas are pushed to the leaves.
pub fn parse(text: &str) -> Result<FormulaTree> {
    let mut p = Parser {
        input: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let tree = p.formula(false)?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("unexpected trailing input"));
    }
    let mut seen = BTreeSet::new();
    for v in tree.variables() {
        if !seen.insert(v) {
            return Err(Error::ReadOnceViolation { var: v });
        }
    }
    Ok(tree)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    depth: usize,
}

const MAX_DEPTH: usize = 4096;

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `negated` carries a pending negation down the tree (De Morgan).
    fn formula(&mut self, negated: bool) -> Result<FormulaTree> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut terms = vec![self.term(negated)?];
        while self.eat(b'|') {
            terms.push(self.term(negated)?);
        }
        self.depth -= 1;
        // !(a | b) = !a & !b
        let gate = if negated { Gate::And } else { Gate::Or };
        Ok(collapse(gate, terms))
    }

    fn term(&mut self, negated: bool) -> Result<FormulaTree> {
        let mut factors = vec![self.factor(negated)?];
        while self.eat(b'&') {
            factors.push(self.factor(negated)?);
        }
        let gate = if negated { Gate::Or } else { Gate::And };
        Ok(collapse(gate, factors))
    }

    fn factor(&mut self, negated: bool) -> Result<FormulaTree> {
        let negated = negated ^ self.eat(b'!');
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.formula(negated)?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let var = self.integer()?;
                Ok(FormulaTree::Leaf { var, negated })
            }
            Some(c) => Err(self.err(&format!("expected '!', '(' or 'x', found {:?}", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a variable index after 'x'"));
        }
        let digits = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let var: u32 = digits.parse().map_err(|_| Error::Syntax {
            pos: start,
            message: "variable index does not fit in 32 bits".into(),
        })?;
        if var == 0 {
            return Err(Error::Syntax {
                pos: start,
                message: "variable indices are 1-based".into(),
            });
        }
        Ok(var)
    }
}

fn collapse(gate: Gate, mut children: Vec<FormulaTree>) -> FormulaTree {
    if children.len() == 1 {
        children.pop().unwrap()
    } else {
        FormulaTree::Node { gate, children }
    }
}

/// Normalizes a parsed tree: flattens same-kind nesting, collapses
/// single-child nodes, remaps variables to `1..=n` by first appearance,
/// and moves leaf negations into a side set.
pub fn normalize(tree: &FormulaTree) -> NormalizedFormula {
    let flat = flatten(tree.clone());

    let mut var_map = BTreeMap::new();
    let mut negations = BTreeSet::new();
    let mut next = 0u32;
    let tree = remap(flat, &mut var_map, &mut negations, &mut next);

    NormalizedFormula {
        tree,
        n: next,
        var_map,
        negations,
    }
}

fn flatten(tree: FormulaTree) -> FormulaTree {
    match tree {
        leaf @ FormulaTree::Leaf { .. } => leaf,
        FormulaTree::Node { gate, children } => {
            let mut merged = Vec::with_capacity(children.len());
            for child in children {
                match flatten(child) {
                    FormulaTree::Node { gate: g, children: gc } if g == gate => merged.extend(gc),
                    other => merged.push(other),
                }
            }
            collapse(gate, merged)
        }
    }
}

fn remap(
    tree: FormulaTree,
    var_map: &mut BTreeMap<u32, u32>,
    negations: &mut BTreeSet<u32>,
    next: &mut u32,
) -> FormulaTree {
    match tree {
        FormulaTree::Leaf { var, negated } => {
            *next += 1;
            var_map.insert(var, *next);
            if negated {
                negations.insert(*next);
            }
            FormulaTree::Leaf { var: *next, negated: false }
        }
        FormulaTree::Node { gate, children } => FormulaTree::Node {
            gate,
            children: children
                .into_iter()
                .map(|c| remap(c, var_map, negations, next))
                .collect(),
        },
    }
}
