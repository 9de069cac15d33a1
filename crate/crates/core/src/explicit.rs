//! Closed-form criteria for three blocks and the bidiagonal fast path.
//!
//! For `n = 3` the first-kind system unrolls into ten explicit inequalities
//! written with generalized complements `Δ^i_{jk} = B_ik − B_ij B_jj⁻¹ B_jk`
//! (for `i = k` this is `B_ii − B_ij B_jj⁻¹ B_ji`). Each check is tagged with
//! the first-kind chain it coincides with so the two paths can be compared
//! check by check.

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{invert, invertibility_gate, is_nn_leaf, DenseMatrix, Tolerances};
use crate::scalar::Scalar;
use crate::schur_first::{CertNode, NodeVerdict, SignCertificate};
use crate::schur_second::{GateRecord, NnCertificate, NnStage, NnVerdict};

fn sub(d: usize) -> char {
    char::from_u32(0x2080 + d as u32).unwrap_or('?')
}

fn sup(d: usize) -> char {
    match d {
        1 => '¹',
        2 => '²',
        3 => '³',
        _ => '?',
    }
}

fn require_three<T: Scalar>(b: &BlockMatrix<T>) -> Result<()> {
    if b.order() == 3 {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("expected 3 blocks, got {}", b.order())))
    }
}

fn block_name(i: usize, j: usize) -> String {
    format!("B{}{}", sub(i), sub(j))
}

/// `Δ^i_{jk} = B_ik − B_ij B_jj⁻¹ B_jk` with 1-based block indices.
///
/// Also serves as the second-order complement `Δ^{ik}_j` of the nonnegativity
/// path, which is the same expression.
pub fn gen_schur_first_3<T: Scalar>(
    b: &BlockMatrix<T>,
    i: usize,
    j: usize,
    k: usize,
    tol: &Tolerances<T>,
) -> Result<DenseMatrix<T>> {
    require_three(b)?;
    if ![i, j, k].iter().all(|x| (1..=3).contains(x)) {
        return Err(Error::InvalidArgument(format!(
            "indices ({i}, {j}, {k}) must lie in 1..=3"
        )));
    }
    let blk = |r: usize, c: usize| b.block(r - 1, c - 1);
    let inv = invert(blk(j, j), tol).map_err(|e| e.singular_as(&block_name(j, j)))?;
    blk(i, k).subtract(&blk(i, j).multiply(&inv)?.multiply(blk(j, k))?)
}

/// Blocks of the inverse of the lower `2×2` block matrix `(B_ij)_{i,j=2..3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSubBlocks<T> {
    pub b22m: DenseMatrix<T>,
    pub b23m: DenseMatrix<T>,
    pub b32m: DenseMatrix<T>,
    pub b33m: DenseMatrix<T>,
}

impl<T: Scalar> InverseSubBlocks<T> {
    pub fn assemble(&self) -> DenseMatrix<T> {
        let (d2, d3) = (self.b22m.rows(), self.b33m.rows());
        let mut m = DenseMatrix::zeros(d2 + d3, d2 + d3);
        m.set_submatrix(0, 0, &self.b22m);
        m.set_submatrix(0, d2, &self.b23m);
        m.set_submatrix(d2, 0, &self.b32m);
        m.set_submatrix(d2, d2, &self.b33m);
        m
    }
}

struct LowerPieces<T> {
    inv22: DenseMatrix<T>,
    inv33: DenseMatrix<T>,
    /// `(Δ²₃₂)⁻¹ = (B₂₂ − B₂₃B₃₃⁻¹B₃₂)⁻¹`
    inv_d232: DenseMatrix<T>,
    /// `(Δ³₂₃)⁻¹ = (B₃₃ − B₃₂B₂₂⁻¹B₂₃)⁻¹`
    inv_d323: DenseMatrix<T>,
}

fn lower_pieces<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<LowerPieces<T>> {
    require_three(b)?;
    let inv22 = invert(b.block(1, 1), tol).map_err(|e| e.singular_as("B₂₂"))?;
    let inv33 = invert(b.block(2, 2), tol).map_err(|e| e.singular_as("B₃₃"))?;
    let d232 = gen_schur_first_3(b, 2, 3, 2, tol)?;
    let d323 = gen_schur_first_3(b, 3, 2, 3, tol)?;
    Ok(LowerPieces {
        inv22,
        inv33,
        inv_d232: invert(&d232, tol).map_err(|e| e.singular_as("Δ²₃₂"))?,
        inv_d323: invert(&d323, tol).map_err(|e| e.singular_as("Δ³₂₃"))?,
    })
}

/// Inverse sub-blocks via `B₂₂⁻ = B₂₂⁻¹(I + B₂₃(Δ³₂₃)⁻¹B₃₂B₂₂⁻¹)`,
/// `B₃₃⁻ = B₃₃⁻¹(I + B₃₂(Δ²₃₂)⁻¹B₂₃B₃₃⁻¹)`, `B₂₃⁻ = −(Δ²₃₂)⁻¹B₂₃B₃₃⁻¹`,
/// `B₃₂⁻ = −(Δ³₂₃)⁻¹B₃₂B₂₂⁻¹`.
pub fn inverse_sub_blocks_3<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<InverseSubBlocks<T>> {
    let p = lower_pieces(b, tol)?;
    let (b23, b32) = (b.block(1, 2), b.block(2, 1));
    let id2 = DenseMatrix::identity(b.dims()[1]);
    let id3 = DenseMatrix::identity(b.dims()[2]);
    let b22m = p
        .inv22
        .multiply(&id2.add(&b23.multiply(&p.inv_d323)?.multiply(b32)?.multiply(&p.inv22)?)?)?;
    let b33m = p
        .inv33
        .multiply(&id3.add(&b32.multiply(&p.inv_d232)?.multiply(b23)?.multiply(&p.inv33)?)?)?;
    let b23m = p.inv_d232.multiply(b23)?.multiply(&p.inv33)?.neg();
    let b32m = p.inv_d323.multiply(b32)?.multiply(&p.inv22)?.neg();
    Ok(InverseSubBlocks { b22m, b23m, b32m, b33m })
}

/// The alternative expressions: `B₂₂⁻ = (I + B₂₂⁻¹B₂₃(Δ³₂₃)⁻¹B₃₂)B₂₂⁻¹`,
/// `B₃₃⁻ = (I + B₃₃⁻¹B₃₂(Δ²₃₂)⁻¹B₂₃)B₃₃⁻¹`, `B₂₃⁻ = −B₂₂⁻¹B₂₃(Δ³₂₃)⁻¹`,
/// `B₃₂⁻ = −B₃₃⁻¹B₃₂(Δ²₃₂)⁻¹`.
pub fn inverse_sub_blocks_3_alt<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<InverseSubBlocks<T>> {
    let p = lower_pieces(b, tol)?;
    let (b23, b32) = (b.block(1, 2), b.block(2, 1));
    let id2 = DenseMatrix::identity(b.dims()[1]);
    let id3 = DenseMatrix::identity(b.dims()[2]);
    let b22m = id2
        .add(&p.inv22.multiply(b23)?.multiply(&p.inv_d323)?.multiply(b32)?)?
        .multiply(&p.inv22)?;
    let b33m = id3
        .add(&p.inv33.multiply(b32)?.multiply(&p.inv_d232)?.multiply(b23)?)?
        .multiply(&p.inv33)?;
    let b23m = p.inv22.multiply(b23)?.multiply(&p.inv_d323)?.neg();
    let b32m = p.inv33.multiply(b32)?.multiply(&p.inv_d232)?.neg();
    Ok(InverseSubBlocks { b22m, b23m, b32m, b33m })
}

/// Evaluates one explicit check, folding singular inverses into the node.
fn explicit_check<T: Scalar>(
    chain: &str,
    notation: String,
    dim: usize,
    tol: &Tolerances<T>,
    build: impl FnOnce() -> Result<DenseMatrix<T>>,
) -> CertNode<T> {
    match build() {
        Ok(m) => CertNode::leaf(chain, notation, &m.symmetrized(), 1, tol),
        Err(e @ Error::NumericallySingular { .. }) => CertNode::singular(chain, notation, 1, dim, e.to_string()),
        Err(e) => {
            let mut node = CertNode::singular(chain, notation, 1, dim, e.to_string());
            node.verdict = NodeVerdict::Error;
            node
        }
    }
}

/// The ten explicit inequalities for three blocks.
///
/// Three diagonal blocks; `Δ²₁₂, Δ²₃₂, Δ³₁₃, Δ³₂₃`; the second-order
/// complements `Δ²³₁₂₃ = Δ²₁₂ − Δ²₁₃(Δ³₁₃)⁻¹Δ³₁₂` and
/// `Δ³²₁₃₂ = Δ³₁₃ − Δ³₁₂(Δ²₁₂)⁻¹Δ²₁₃`; and
/// `B₁₁ − Σ_{i,j∈{2,3}} B₁ᵢ Bᵢⱼ⁻ Bⱼ₁`.
pub fn check_pd_3x3<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<SignCertificate<T>> {
    require_three(b)?;
    b.check_self_adjoint(tol)?;
    let b = &b.resymmetrized();
    let d = b.dims().to_vec();
    let g = |i, j, k| gen_schur_first_3(b, i, j, k, tol);
    let delta = |i: usize, j: usize, k: usize| format!("Δ{}{}{}", sup(i), sub(j), sub(k));

    let mut checks = Vec::with_capacity(10);
    for (i, chain) in [(1, "D11"), (2, "D11.D22"), (3, "D22.D22")] {
        checks.push(explicit_check(chain, block_name(i, i), d[i - 1], tol, || {
            Ok(b.block(i - 1, i - 1).clone())
        }));
    }
    for (i, j, chain) in [
        (2, 1, "D11.D21"),
        (2, 3, "D12.D22"),
        (3, 1, "D22.D21"),
        (3, 2, "D21.D22"),
    ] {
        checks.push(explicit_check(chain, delta(i, j, i), d[i - 1], tol, || g(i, j, i)));
    }
    checks.push(explicit_check("D12.D21", "Δ²³₁₂₃".into(), d[1], tol, || {
        let inv = invert(&g(3, 1, 3)?, tol).map_err(|e| e.singular_as("Δ³₁₃"))?;
        g(2, 1, 2)?.subtract(&g(2, 1, 3)?.multiply(&inv)?.multiply(&g(3, 1, 2)?)?)
    }));
    checks.push(explicit_check("D21.D21", "Δ³²₁₃₂".into(), d[2], tol, || {
        let inv = invert(&g(2, 1, 2)?, tol).map_err(|e| e.singular_as("Δ²₁₂"))?;
        g(3, 1, 3)?.subtract(&g(3, 1, 2)?.multiply(&inv)?.multiply(&g(2, 1, 3)?)?)
    }));
    checks.push(explicit_check(
        "D12",
        "B₁₁ − ΣB₁ᵢBᵢⱼ⁻Bⱼ₁".into(),
        d[0],
        tol,
        || {
            let m = inverse_sub_blocks_3(b, tol)?;
            let (b12, b13, b21, b31) = (b.block(0, 1), b.block(0, 2), b.block(1, 0), b.block(2, 0));
            let terms = [
                (b12, &m.b22m, b21),
                (b12, &m.b23m, b31),
                (b13, &m.b32m, b21),
                (b13, &m.b33m, b31),
            ];
            let mut acc = b.block(0, 0).clone();
            for (l, mid, r) in terms {
                acc = acc.subtract(&l.multiply(mid)?.multiply(r)?)?;
            }
            Ok(acc)
        },
    ));
    Ok(SignCertificate::from_checks("", 3, b.total_dim(), checks))
}

/// Three-block nonnegativity: gates `B₁₁`, `Δ²²₁`; checks `B₁₁ ≥ 0`,
/// `Δ²²₁ ≥ 0`, `Δ³³₁ − Δ³²₁(Δ²²₁)⁻¹Δ²³₁ ≥ 0` with `Δ^{ik}_j = B_ik − B_ij B_jj⁻¹ B_jk`.
pub fn check_nn_3x3<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<NnCertificate<T>> {
    require_three(b)?;
    b.check_self_adjoint(tol)?;
    let b = &b.resymmetrized();
    let g = |i, j, k| gen_schur_first_3(b, i, j, k, tol);
    let mut stages = Vec::with_capacity(3);

    let gated = |k: usize, label: &str, m: &DenseMatrix<T>| -> Result<(NnStage<T>, bool)> {
        let gate = invertibility_gate(m, tol)?;
        let mut stage = NnStage {
            stage: k,
            label: label.into(),
            order: 3 - k,
            dim: m.rows(),
            gate: Some(GateRecord {
                passed: gate.passed,
                ratio: gate.ratio,
            }),
            lambda_min: None,
            verdict: NodeVerdict::Singular,
        };
        if gate.passed {
            let c = is_nn_leaf(m, tol)?;
            stage.lambda_min = Some(c.lambda_min);
            stage.verdict = if c.verdict {
                NodeVerdict::Pass
            } else {
                NodeVerdict::Fail
            };
        }
        Ok((stage, gate.passed))
    };

    let (s0, ok) = gated(0, "B₁₁", b.block(0, 0))?;
    stages.push(s0);
    if ok {
        let d22 = g(2, 1, 2)?.symmetrized();
        let (s1, ok) = gated(1, "Δ²²₁", &d22)?;
        stages.push(s1);
        if ok {
            let inv = invert(&d22, tol)?;
            let last = g(3, 1, 3)?
                .subtract(&g(3, 1, 2)?.multiply(&inv)?.multiply(&g(2, 1, 3)?)?)?
                .symmetrized();
            let c = is_nn_leaf(&last, tol)?;
            stages.push(NnStage {
                stage: 2,
                label: "Δ³³₁ − Δ³²₁(Δ²²₁)⁻¹Δ²³₁".into(),
                order: 1,
                dim: last.rows(),
                gate: None,
                lambda_min: Some(c.lambda_min),
                verdict: if c.verdict {
                    NodeVerdict::Pass
                } else {
                    NodeVerdict::Fail
                },
            });
        }
    }
    let failure = stages.iter().position(|s| s.verdict != NodeVerdict::Pass);
    let verdict = if stages.iter().any(|s| s.verdict == NodeVerdict::Singular) {
        NnVerdict::PreconditionFailed
    } else if failure.is_some() {
        NnVerdict::NotNonnegative
    } else {
        NnVerdict::Nonnegative
    };
    Ok(NnCertificate {
        verdict,
        stages,
        failure,
    })
}

/// True iff every block off the main and anti-diagonal is zero within `sym_tol · max(1, ‖B‖)`.
pub fn is_bidiagonal<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> bool {
    let n = b.order();
    let limit = tol.sym_tol * b.scale_floor();
    (0..n).all(|i| (0..n).all(|j| j == i || j == n - 1 - i || b.block(i, j).max_norm() <= limit))
}

/// Positive definiteness of a bidiagonal block matrix from single-block checks:
/// `B_ii ≫ 0` for every `i` and `B_ii − B_{i,n+1−i} B_{n+1−i,n+1−i}⁻¹ B_{n+1−i,i} ≫ 0`
/// for every `i` except the center of an odd order.
pub fn check_pd_bidiagonal<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<SignCertificate<T>> {
    b.check_self_adjoint(tol)?;
    if !is_bidiagonal(b, tol) {
        return Err(Error::NotBidiagonal);
    }
    let b = &b.resymmetrized();
    let n = b.order();
    let d = b.dims();
    let mut checks = Vec::with_capacity(2 * n);
    for (i, &dim) in d.iter().enumerate() {
        let (label, notation) = (format!("B{}{}", i + 1, i + 1), format!("B[{0},{0}]", i + 1));
        checks.push(explicit_check(&label, notation, dim, tol, || Ok(b.block(i, i).clone())));
    }
    for (i, &dim) in d.iter().enumerate() {
        let j = n - 1 - i;
        if i == j {
            continue;
        }
        let (a, c) = (i + 1, j + 1);
        let notation = format!("B[{a},{a}] - B[{a},{c}]·B[{c},{c}]⁻¹·B[{c},{a}]");
        checks.push(explicit_check(&format!("C{a}"), notation, dim, tol, || {
            let inv = invert(b.block(j, j), tol).map_err(|e| e.singular_as(&format!("B[{c},{c}]")))?;
            b.block(i, i)
                .subtract(&b.block(i, j).multiply(&inv)?.multiply(b.block(j, i))?)
        }));
    }
    Ok(SignCertificate::from_checks("", n, b.total_dim(), checks))
}
