//! First-kind Schur operators and the recursive bisection criterion for
//! positive definiteness.
//!
//! A block matrix of order `n ≥ 2` is split at `⌊n/2⌋` into units
//! `B¹¹, B¹², B²¹, B²²`. The four operators are
//!
//! ```text
//! Δ¹₁(B) = B¹¹              Δ¹₂(B) = B¹¹ − B¹²(B²²)⁻¹B²¹
//! Δ²₂(B) = B²²              Δ²₁(B) = B²² − B²¹(B¹¹)⁻¹B¹²
//! ```
//!
//! and `B ≫ 0` iff each of them is `≫ 0`. Applying the split again to every
//! result until order 1 yields the leaf system: `V_n = 2ᵏ(3n − 2ᵏ⁺¹)` checks
//! for `2ᵏ ≤ n ≤ 2ᵏ⁺¹`, each labelled by the chain of operators that produced it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{invert, is_pd_leaf, DenseMatrix, Tolerances};
use crate::scalar::Scalar;

/// One first-kind operator `Δ^upper_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchurStep {
    pub upper: u8,
    pub lower: u8,
}

impl SchurStep {
    pub const D11: Self = Self { upper: 1, lower: 1 };
    pub const D22: Self = Self { upper: 2, lower: 2 };
    pub const D21: Self = Self { upper: 2, lower: 1 };
    pub const D12: Self = Self { upper: 1, lower: 2 };

    /// Canonical evaluation order: diagonal units before complements.
    pub const CANONICAL: [Self; 4] = [Self::D11, Self::D22, Self::D21, Self::D12];

    pub fn new(upper: u8, lower: u8) -> Result<Self> {
        if !(1..=2).contains(&upper) || !(1..=2).contains(&lower) {
            return Err(Error::InvalidArgument(format!(
                "Schur operator indices must be 1 or 2, got ({upper}, {lower})"
            )));
        }
        Ok(Self { upper, lower })
    }

    pub fn is_complement(&self) -> bool {
        self.upper != self.lower
    }

    pub fn code(&self) -> String {
        format!("D{}{}", self.upper, self.lower)
    }

    pub fn notation(&self) -> String {
        format!("Δ{}{}", superscript(self.upper), subscript(self.lower))
    }
}

fn superscript(d: u8) -> char {
    match d {
        1 => '¹',
        2 => '²',
        3 => '³',
        _ => '?',
    }
}

fn subscript(d: u8) -> char {
    match d {
        1 => '₁',
        2 => '₂',
        3 => '₃',
        _ => '?',
    }
}

/// Composition `Δ^{i_m}_{j_m} … Δ^{i_1}_{j_1}`; `steps[0]` is applied first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchurChain {
    steps: Vec<SchurStep>,
}

impl SchurChain {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<SchurStep>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[SchurStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The chain extended by one more (outer) operator.
    pub fn then(&self, step: SchurStep) -> Self {
        let mut steps = self.steps.clone();
        steps.push(step);
        Self { steps }
    }

    /// Outermost operator first, dot separated: `"D12.D21"` is `Δ¹₂Δ²₁(B)`.
    pub fn code(&self) -> String {
        self.steps
            .iter()
            .rev()
            .map(SchurStep::code)
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse(code: &str) -> Result<Self> {
        if code.is_empty() {
            return Ok(Self::empty());
        }
        let mut steps = Vec::new();
        for part in code.split('.').rev() {
            let b = part.as_bytes();
            if b.len() != 3 || b[0] != b'D' {
                return Err(Error::InvalidArgument(format!("bad chain element {part:?}")));
            }
            steps.push(SchurStep::new(b[1].wrapping_sub(b'0'), b[2].wrapping_sub(b'0'))?);
        }
        Ok(Self { steps })
    }

    /// `"Δ¹₂Δ²₁(B)"`, or `"B"` for the empty chain.
    pub fn notation(&self) -> String {
        if self.steps.is_empty() {
            return "B".into();
        }
        let ops: String = self.steps.iter().rev().map(SchurStep::notation).collect();
        format!("{ops}(B)")
    }
}

impl fmt::Display for SchurChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdVerdict {
    PositiveDefinite,
    NotPositiveDefinite,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeVerdict {
    Pass,
    Fail,
    /// A unit that had to be inverted failed the invertibility gate.
    Singular,
    /// A numeric routine failed; the subtree is undecided.
    Error,
}

/// Whether [`check_pd`] stops at the first violated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    EarlyExit,
    FullTree,
}

/// One node of the certificate tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertNode<T> {
    pub chain: String,
    pub notation: String,
    /// Block order of the matrix this node judged.
    pub order: usize,
    /// Scalar dimension of that matrix.
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<T>,
    pub verdict: NodeVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default = "Vec::new")]
    pub children: Vec<CertNode<T>>,
}

impl<T: Scalar> CertNode<T> {
    pub(crate) fn leaf(label: &str, notation: String, m: &DenseMatrix<T>, order: usize, tol: &Tolerances<T>) -> Self {
        let (lambda_min, verdict, detail) = match is_pd_leaf(m, tol) {
            Ok(c) => (
                Some(c.lambda_min),
                if c.verdict {
                    NodeVerdict::Pass
                } else {
                    NodeVerdict::Fail
                },
                None,
            ),
            Err(e) => (None, NodeVerdict::Error, Some(e.to_string())),
        };
        Self {
            chain: label.to_string(),
            notation,
            order,
            dim: m.rows(),
            lambda_min,
            verdict,
            detail,
            children: Vec::new(),
        }
    }

    pub(crate) fn singular(label: &str, notation: String, order: usize, dim: usize, detail: String) -> Self {
        Self {
            chain: label.to_string(),
            notation,
            order,
            dim,
            lambda_min: None,
            verdict: NodeVerdict::Singular,
            detail: Some(detail),
            children: Vec::new(),
        }
    }

    /// Evaluated order-1 checks in this subtree.
    pub fn leaves(&self) -> Vec<&CertNode<T>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a CertNode<T>>) {
        if self.children.is_empty() {
            if self.verdict != NodeVerdict::Singular {
                out.push(self);
            }
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    fn first_violation(&self) -> Option<&CertNode<T>> {
        if self.children.is_empty() {
            return matches!(self.verdict, NodeVerdict::Fail | NodeVerdict::Singular).then_some(self);
        }
        self.children.iter().find_map(|c| c.first_violation())
    }
}

fn aggregate(children: &[NodeVerdict]) -> NodeVerdict {
    if children
        .iter()
        .any(|v| matches!(v, NodeVerdict::Fail | NodeVerdict::Singular))
    {
        NodeVerdict::Fail
    } else if children.contains(&NodeVerdict::Error) {
        NodeVerdict::Error
    } else {
        NodeVerdict::Pass
    }
}

/// Audit trail of a positive definiteness decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate<T> {
    pub verdict: PdVerdict,
    pub leaf_count: usize,
    /// Chain code of the first violated check, in canonical order.
    pub failure: Option<String>,
    pub root: CertNode<T>,
}

impl<T: Scalar> SignCertificate<T> {
    pub(crate) fn from_root(root: CertNode<T>) -> Self {
        let verdict = match root.verdict {
            NodeVerdict::Pass => PdVerdict::PositiveDefinite,
            NodeVerdict::Fail | NodeVerdict::Singular => PdVerdict::NotPositiveDefinite,
            NodeVerdict::Error => PdVerdict::Indeterminate,
        };
        Self {
            verdict,
            leaf_count: root.leaves().len(),
            failure: root.first_violation().map(|n| n.chain.clone()),
            root,
        }
    }

    /// Flat certificate whose root holds the given checks as children.
    pub(crate) fn from_checks(label: &str, order: usize, dim: usize, checks: Vec<CertNode<T>>) -> Self {
        let verdicts: Vec<NodeVerdict> = checks.iter().map(|c| c.verdict).collect();
        Self::from_root(CertNode {
            chain: label.to_string(),
            notation: "B".into(),
            order,
            dim,
            lambda_min: None,
            verdict: aggregate(&verdicts),
            detail: None,
            children: checks,
        })
    }

    pub fn is_positive_definite(&self) -> bool {
        self.verdict == PdVerdict::PositiveDefinite
    }

    pub fn leaves(&self) -> Vec<&CertNode<T>> {
        self.root.leaves()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

impl<T: Scalar> fmt::Display for SignCertificate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {:?} ({} leaf checks)", self.verdict, self.leaf_count)?;
        if let Some(chain) = &self.failure {
            writeln!(f, "first violation: {chain}")?;
        }
        write_node(f, &self.root, 0)
    }
}

fn write_node<T: Scalar>(f: &mut fmt::Formatter<'_>, node: &CertNode<T>, depth: usize) -> fmt::Result {
    let mark = match node.verdict {
        NodeVerdict::Pass => "ok",
        NodeVerdict::Fail => "FAIL",
        NodeVerdict::Singular => "SINGULAR",
        NodeVerdict::Error => "ERROR",
    };
    write!(
        f,
        "{:indent$}{} [order {}, dim {}] {mark}",
        "",
        node.notation,
        node.order,
        node.dim,
        indent = depth * 2
    )?;
    if let Some(l) = node.lambda_min {
        write!(f, "  λ_min = {l:.6e}")?;
    }
    if let Some(d) = &node.detail {
        write!(f, "  ({d})")?;
    }
    writeln!(f)?;
    for c in &node.children {
        write_node(f, c, depth + 1)?;
    }
    Ok(())
}

/// Applies one first-kind operator `Δ^i_j`.
///
/// Complements require the opposite diagonal unit to pass the invertibility
/// gate. The result carries the dims of the side it lives on and is
/// re-symmetrized when `B` is self-adjoint.
pub fn schur_first<T: Scalar>(b: &BlockMatrix<T>, i: u8, j: u8, tol: &Tolerances<T>) -> Result<BlockMatrix<T>> {
    let step = SchurStep::new(i, j)?;
    let p = b.partition_first()?;
    match (step.upper, step.lower) {
        (1, 1) => Ok(p.diagonal_unit(1)),
        (2, 2) => Ok(p.diagonal_unit(2)),
        (2, 1) => {
            let inv = invert(&p.unit(1, 1), tol).map_err(|e| e.singular_as("B¹¹"))?;
            complement(
                &p.unit(2, 2),
                &p.unit(2, 1),
                &inv,
                &p.unit(1, 2),
                p.side_dims(2),
                b.is_self_adjoint(),
            )
        }
        _ => {
            let inv = invert(&p.unit(2, 2), tol).map_err(|e| e.singular_as("B²²"))?;
            complement(
                &p.unit(1, 1),
                &p.unit(1, 2),
                &inv,
                &p.unit(2, 1),
                p.side_dims(1),
                b.is_self_adjoint(),
            )
        }
    }
}

/// `keep − left · inv · right`, re-blocked with `dims`.
pub(crate) fn complement<T: Scalar>(
    keep: &DenseMatrix<T>,
    left: &DenseMatrix<T>,
    inv: &DenseMatrix<T>,
    right: &DenseMatrix<T>,
    dims: &[usize],
    symmetrize: bool,
) -> Result<BlockMatrix<T>> {
    let mut s = keep.subtract(&left.multiply(inv)?.multiply(right)?)?;
    if symmetrize {
        s = s.symmetrized();
    }
    BlockMatrix::assemble(&s, dims)
}

/// Decides `B ≫ 0` by the recursive first-kind system and records every check.
///
/// At each node of order ≥ 2 the diagonal units `Δ¹₁`, `Δ²₂` are examined
/// first; the complements `Δ²₁`, `Δ¹₂` follow. In [`CheckMode::EarlyExit`]
/// evaluation stops at the first failed leaf and complements are only formed
/// once both diagonal units are certified. In [`CheckMode::FullTree`] every
/// node is evaluated; a complement whose required inverse does not exist is
/// recorded as a `Singular` node.
pub fn check_pd<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>, mode: CheckMode) -> Result<SignCertificate<T>> {
    b.check_self_adjoint(tol)?;
    let b = b.resymmetrized();
    let root = match mode {
        CheckMode::FullTree => visit_full(&b, &SchurChain::empty(), tol),
        CheckMode::EarlyExit => {
            let mut stopped = false;
            visit_early(&b, &SchurChain::empty(), tol, &mut stopped)
        }
    };
    Ok(SignCertificate::from_root(root))
}

/// Materialized children of a node, with singular units reported instead of built.
enum Child<T> {
    Matrix(SchurChain, BlockMatrix<T>),
    Singular(SchurChain, usize, usize, String),
}

fn complement_child<T: Scalar>(
    b: &BlockMatrix<T>,
    chain: &SchurChain,
    step: SchurStep,
    tol: &Tolerances<T>,
) -> Child<T> {
    let p = b.partition_first().expect("order checked by caller");
    let next = chain.then(step);
    // Δ²₁ lives on side 2 and inverts B¹¹; Δ¹₂ lives on side 1 and inverts B²².
    let (side, other, unit_name) = if step == SchurStep::D21 {
        (2, 1, "B¹¹")
    } else {
        (1, 2, "B²²")
    };
    let result = invert(&p.unit(other, other), tol).and_then(|inv| {
        complement(
            &p.unit(side, side),
            &p.unit(side, other),
            &inv,
            &p.unit(other, side),
            p.side_dims(side),
            true,
        )
    });
    match result {
        Ok(m) => Child::Matrix(next, m),
        Err(e) => {
            let dims = p.side_dims(side);
            Child::Singular(
                next,
                dims.len(),
                dims.iter().sum(),
                format!(
                    "{unit_name} of {} not invertible: {}",
                    chain.notation(),
                    e.singular_as(unit_name)
                ),
            )
        }
    }
}

fn leaf_node<T: Scalar>(b: &BlockMatrix<T>, chain: &SchurChain, tol: &Tolerances<T>) -> CertNode<T> {
    CertNode::leaf(&chain.code(), chain.notation(), b.block(0, 0), 1, tol)
}

fn internal_node<T: Scalar>(b: &BlockMatrix<T>, chain: &SchurChain, children: Vec<CertNode<T>>) -> CertNode<T> {
    let verdicts: Vec<NodeVerdict> = children.iter().map(|c| c.verdict).collect();
    CertNode {
        chain: chain.code(),
        notation: chain.notation(),
        order: b.order(),
        dim: b.total_dim(),
        lambda_min: None,
        verdict: aggregate(&verdicts),
        detail: None,
        children,
    }
}

fn visit_full<T: Scalar>(b: &BlockMatrix<T>, chain: &SchurChain, tol: &Tolerances<T>) -> CertNode<T> {
    if b.order() == 1 {
        return leaf_node(b, chain, tol);
    }
    let p = b.partition_first().expect("order ≥ 2");
    let (d11, d22) = (p.diagonal_unit(1), p.diagonal_unit(2));
    let ((n11, n22), (c21, c12)) = rayon::join(
        || {
            rayon::join(
                || visit_full(&d11, &chain.then(SchurStep::D11), tol),
                || visit_full(&d22, &chain.then(SchurStep::D22), tol),
            )
        },
        || {
            rayon::join(
                || visit_child_full(complement_child(b, chain, SchurStep::D21, tol), tol),
                || visit_child_full(complement_child(b, chain, SchurStep::D12, tol), tol),
            )
        },
    );
    internal_node(b, chain, vec![n11, n22, c21, c12])
}

fn visit_child_full<T: Scalar>(child: Child<T>, tol: &Tolerances<T>) -> CertNode<T> {
    match child {
        Child::Matrix(chain, m) => visit_full(&m, &chain, tol),
        Child::Singular(chain, order, dim, detail) => {
            CertNode::singular(&chain.code(), chain.notation(), order, dim, detail)
        }
    }
}

fn visit_early<T: Scalar>(
    b: &BlockMatrix<T>,
    chain: &SchurChain,
    tol: &Tolerances<T>,
    stopped: &mut bool,
) -> CertNode<T> {
    if b.order() == 1 {
        let node = leaf_node(b, chain, tol);
        if node.verdict == NodeVerdict::Fail {
            *stopped = true;
        }
        return node;
    }
    let p = b.partition_first().expect("order ≥ 2");
    let mut children = Vec::with_capacity(4);
    for (step, unit) in [
        (SchurStep::D11, p.diagonal_unit(1)),
        (SchurStep::D22, p.diagonal_unit(2)),
    ] {
        children.push(visit_early(&unit, &chain.then(step), tol, stopped));
        if *stopped {
            return internal_node(b, chain, children);
        }
    }
    // Complements are formed only once both diagonal units are certified.
    if children.iter().any(|c| c.verdict != NodeVerdict::Pass) {
        return internal_node(b, chain, children);
    }
    for step in [SchurStep::D21, SchurStep::D12] {
        let node = match complement_child(b, chain, step, tol) {
            Child::Matrix(next, m) => visit_early(&m, &next, tol, stopped),
            Child::Singular(next, order, dim, detail) => {
                *stopped = true;
                CertNode::singular(&next.code(), next.notation(), order, dim, detail)
            }
        };
        children.push(node);
        if *stopped {
            break;
        }
    }
    internal_node(b, chain, children)
}

/// `m = ⌈log₂ n⌉`: the length of the longest chain for `n` blocks.
pub fn recursion_depth(n: usize) -> u32 {
    assert!(n >= 1, "recursion depth is defined for n ≥ 1");
    usize::BITS - (n - 1).leading_zeros()
}

/// Number of leaf inequalities `V_n`.
///
/// Evaluates the closed form `2ᵏ(3n − 2ᵏ⁺¹)` with `k = ⌊log₂ n⌋` and the
/// recursion `V₁ = 1, V₂ₙ = 4Vₙ, V₂ₙ₊₁ = 2(Vₙ + Vₙ₊₁)`, and checks they agree.
pub fn count_inequalities(n: usize) -> u64 {
    let closed = count_closed_form(n);
    let recursive = count_recursive(n, &mut BTreeMap::new());
    assert_eq!(closed, recursive, "closed form and recursion disagree at n = {n}");
    closed
}

pub(crate) fn count_closed_form(n: usize) -> u64 {
    assert!(n >= 1, "V_n is defined for n ≥ 1");
    let k = usize::BITS - 1 - n.leading_zeros();
    let p = 1u64 << k;
    p * (3 * n as u64 - 2 * p)
}

fn count_recursive(n: usize, memo: &mut BTreeMap<usize, u64>) -> u64 {
    if n == 1 {
        return 1;
    }
    if let Some(&v) = memo.get(&n) {
        return v;
    }
    let half = n / 2;
    let v = if n.is_multiple_of(2) {
        4 * count_recursive(half, memo)
    } else {
        2 * (count_recursive(half, memo) + count_recursive(half + 1, memo))
    };
    memo.insert(n, v);
    v
}

/// Every chain whose leaf check a full-tree certificate performs, in canonical order.
pub fn enumerate_chains(n: usize) -> Vec<SchurChain> {
    assert!(n >= 1, "chains are defined for n ≥ 1");
    let mut out = Vec::new();
    enumerate_into(n, &SchurChain::empty(), &mut out);
    out
}

fn enumerate_into(order: usize, chain: &SchurChain, out: &mut Vec<SchurChain>) {
    if order == 1 {
        out.push(chain.clone());
        return;
    }
    let first = order / 2;
    let second = order - first;
    for step in SchurStep::CANONICAL {
        let size = if step.upper == 1 { first } else { second };
        enumerate_into(size, &chain.then(step), out);
    }
}

/// `‖B²¹(B¹¹)⁻¹Δ¹₂ − Δ²₁(B²²)⁻¹B²¹‖_max` for the first-kind bisection of `B`.
pub fn remark_identity_residual<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<T> {
    let p = b.partition_first()?;
    let inv11 = invert(&p.unit(1, 1), tol).map_err(|e| e.singular_as("B¹¹"))?;
    let inv22 = invert(&p.unit(2, 2), tol).map_err(|e| e.singular_as("B²²"))?;
    let (b12, b21) = (p.unit(1, 2), p.unit(2, 1));
    let delta12 = p.unit(1, 1).subtract(&b12.multiply(&inv22)?.multiply(&b21)?)?;
    let delta21 = p.unit(2, 2).subtract(&b21.multiply(&inv11)?.multiply(&b12)?)?;
    let lhs = b21.multiply(&inv11)?.multiply(&delta12)?;
    let rhs = delta21.multiply(&inv22)?.multiply(&b21)?;
    Ok(lhs.subtract(&rhs)?.max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig_min;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn depth_examples() {
        assert_eq!(recursion_depth(1), 0);
        assert_eq!(recursion_depth(2), 1);
        assert_eq!(recursion_depth(3), 2);
        assert_eq!(recursion_depth(4), 2);
        assert_eq!(recursion_depth(5), 3);
        assert_eq!(recursion_depth(8), 3);
        assert_eq!(recursion_depth(9), 4);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_inequalities(1), 1);
        assert_eq!(count_inequalities(2), 4);
        assert_eq!(count_inequalities(3), 10);
        assert_eq!(count_inequalities(4), 16);
        assert_eq!(count_inequalities(5), 28);
        assert_eq!(count_inequalities(8), 64);
    }

    #[test]
    fn chains_small() {
        assert_eq!(enumerate_chains(1), vec![SchurChain::empty()]);
        let two: Vec<String> = enumerate_chains(2).iter().map(|c| c.code()).collect();
        assert_eq!(two, ["D11", "D22", "D21", "D12"]);
        let three: Vec<String> = enumerate_chains(3).iter().map(|c| c.code()).collect();
        assert_eq!(
            three,
            ["D11", "D11.D22", "D22.D22", "D21.D22", "D12.D22", "D11.D21", "D22.D21", "D21.D21", "D12.D21", "D12"]
        );
        for n in 1..=20 {
            let chains = enumerate_chains(n);
            assert_eq!(chains.len() as u64, count_inequalities(n));
            assert!(chains.iter().all(|c| c.len() <= recursion_depth(n) as usize));
        }
    }

    #[test]
    fn chain_code_round_trip() {
        let c = SchurChain::from_steps(vec![SchurStep::D21, SchurStep::D12]);
        assert_eq!(c.code(), "D12.D21");
        assert_eq!(c.notation(), "Δ¹₂Δ²₁(B)");
        assert_eq!(SchurChain::parse("D12.D21").unwrap(), c);
        assert!(SchurChain::parse("D13").is_err());
    }

    #[test]
    fn scalar_complement() {
        let b = BlockMatrix::from_scalar_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let d = schur_first(&b, 1, 2, &tol()).unwrap();
        assert_eq!(d.order(), 1);
        assert!((d.block(0, 0)[(0, 0)] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_coupling_leaves_unit() {
        let b = BlockMatrix::block_diagonal(vec![
            DenseMatrix::from_f64_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).unwrap(),
            DenseMatrix::from_f64_rows(&[&[5.0]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(schur_first(&b, 1, 2, &tol()).unwrap(), b.principal(0, 1));
        assert_eq!(schur_first(&b, 2, 1, &tol()).unwrap(), b.principal(1, 2));
    }

    #[test]
    fn singular_unit_named() {
        let b = BlockMatrix::from_scalar_rows(&[&[0.0, 1.0], &[1.0, 2.0]]).unwrap();
        match schur_first(&b, 2, 1, &tol()) {
            Err(Error::NumericallySingular { unit, .. }) => assert_eq!(unit, "B¹¹"),
            other => panic!("{other:?}"),
        }
        assert!(schur_first(&BlockMatrix::<f64>::identity(&[2]), 1, 1, &tol()).is_err());
        assert!(schur_first(&b, 3, 1, &tol()).is_err());
    }

    #[test]
    fn identity_certified() {
        for dims in [vec![1], vec![2, 3], vec![1, 2, 1, 3, 2]] {
            let cert = check_pd(&BlockMatrix::<f64>::identity(&dims), &tol(), CheckMode::FullTree).unwrap();
            assert_eq!(cert.verdict, PdVerdict::PositiveDefinite);
            assert_eq!(cert.leaf_count as u64, count_inequalities(dims.len()));
            assert!(cert
                .leaves()
                .iter()
                .all(|l| (l.lambda_min.unwrap() - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn diag_one_minus_one_fails_at_d22() {
        let b = BlockMatrix::from_scalar_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        for mode in [CheckMode::EarlyExit, CheckMode::FullTree] {
            let cert = check_pd(&b, &tol(), mode).unwrap();
            assert_eq!(cert.verdict, PdVerdict::NotPositiveDefinite);
            assert_eq!(cert.failure.as_deref(), Some("D22"));
        }
        let early = check_pd(&b, &tol(), CheckMode::EarlyExit).unwrap();
        assert_eq!(early.leaf_count, 2);
    }

    #[test]
    fn full_tree_records_singular_unit() {
        let b = BlockMatrix::from_scalar_rows(&[&[0.0, 1.0], &[1.0, 2.0]]).unwrap();
        let cert = check_pd(&b, &tol(), CheckMode::FullTree).unwrap();
        assert_eq!(cert.verdict, PdVerdict::NotPositiveDefinite);
        let singular: Vec<_> = cert
            .root
            .children
            .iter()
            .filter(|c| c.verdict == NodeVerdict::Singular)
            .collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0].chain, "D21");
        assert_eq!(cert.leaf_count, 3);
    }

    #[test]
    fn not_self_adjoint_rejected() {
        let b = BlockMatrix::from_scalar_rows(&[&[1.0, 0.5], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            check_pd(&b, &tol(), CheckMode::EarlyExit),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn gram_plus_identity_is_certified() {
        // A is a fixed 6x6 matrix; AᵀA + I cut into five blocks.
        let a = DenseMatrix::<f64>::from_row_major(6, 6, (0..36).map(|k| ((k * 7 % 11) as f64 - 5.0) / 3.0).collect())
            .unwrap();
        let m = a
            .transpose()
            .multiply(&a)
            .unwrap()
            .add(&DenseMatrix::identity(6))
            .unwrap();
        let b = BlockMatrix::assemble(&m, &[1, 2, 1, 1, 1]).unwrap();
        let cert = check_pd(&b, &tol(), CheckMode::FullTree).unwrap();
        assert!(cert.is_positive_definite());
        assert!(sym_eig_min(&m, &tol()).unwrap() > 0.0);
        assert_eq!(cert.leaf_count, 28);
    }

    #[test]
    fn certificate_json_has_contract_fields() {
        let b = BlockMatrix::from_scalar_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let cert = check_pd(&b, &tol(), CheckMode::FullTree).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(v["verdict"], "PositiveDefinite");
        assert_eq!(v["leaf_count"], 4);
        let first = &v["root"]["children"][0];
        for key in ["chain", "order", "lambda_min", "verdict"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["root"]["children"][3]["chain"], "D12");
    }
}
