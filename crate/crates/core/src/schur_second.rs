//! Second-kind Schur operators and the sequential nonnegativity criterion.
//!
//! Splitting after the first block, `Δ̃¹₁(B) = B_11` and
//! `Δ̃²₁(B) = B̃²² − B̃²¹ B_11⁻¹ B̃¹²` eliminates one block coordinate at a time.
//! Provided every corner `Δ̃¹₁(Δ̃²₁)ᵏ(B)` (k = 0..n−2) is invertible, `B ≥ 0`
//! iff all those corners and the final `(Δ̃²₁)ⁿ⁻¹(B)` are `≥ 0`. When a corner
//! is not invertible the criterion does not apply and the certificate says
//! so rather than returning a negative verdict.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{invert, invertibility_gate, is_nn_leaf, spd_sqrt_pair, Tolerances};
use crate::scalar::Scalar;
use crate::schur_first::{complement, NodeVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NnVerdict {
    Nonnegative,
    NotNonnegative,
    /// An invertibility gate failed, so the criterion is inapplicable.
    PreconditionFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateRecord<T> {
    pub passed: bool,
    /// `σ_min / σ_max` of the corner block.
    pub ratio: T,
}

/// One elimination stage: the corner check and, except for the last stage, its gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnStage<T> {
    pub stage: usize,
    pub label: String,
    /// Block order of `(Δ̃²₁)ᵏ(B)`.
    pub order: usize,
    /// Scalar dimension of the block checked at this stage.
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateRecord<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<T>,
    pub verdict: NodeVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnCertificate<T> {
    pub verdict: NnVerdict,
    pub stages: Vec<NnStage<T>>,
    /// Index of the first stage whose gate or check failed.
    pub failure: Option<usize>,
}

impl<T: Scalar> NnCertificate<T> {
    fn from_stages(stages: Vec<NnStage<T>>) -> Self {
        let failure = stages.iter().position(|s| s.verdict != NodeVerdict::Pass);
        let verdict = match failure.map(|k| stages[k].verdict) {
            None => NnVerdict::Nonnegative,
            Some(NodeVerdict::Singular) => NnVerdict::PreconditionFailed,
            Some(_) if stages.iter().any(|s| s.verdict == NodeVerdict::Singular) => NnVerdict::PreconditionFailed,
            Some(_) => NnVerdict::NotNonnegative,
        };
        Self {
            verdict,
            stages,
            failure,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.verdict == NnVerdict::Nonnegative
    }

    pub fn gate_count(&self) -> usize {
        self.stages.iter().filter(|s| s.gate.is_some()).count()
    }

    /// Stages where a nonnegativity check was actually evaluated.
    pub fn check_count(&self) -> usize {
        self.stages.iter().filter(|s| s.lambda_min.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

impl<T: Scalar> fmt::Display for NnCertificate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {:?} ({} stages)", self.verdict, self.stages.len())?;
        for s in &self.stages {
            write!(f, "  stage {} {} [order {}, dim {}]", s.stage, s.label, s.order, s.dim)?;
            if let Some(g) = &s.gate {
                write!(
                    f,
                    "  gate {} (σ ratio {:.3e})",
                    if g.passed { "ok" } else { "FAILED" },
                    g.ratio
                )?;
            }
            if let Some(l) = s.lambda_min {
                write!(f, "  λ_min = {l:.6e}")?;
            }
            writeln!(f, "  {:?}", s.verdict)?;
        }
        Ok(())
    }
}

/// Which diagonal block a two-block check eliminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    EliminateFirst,
    EliminateSecond,
}

/// `Δ̃²₁(B) = B̃²² − B̃²¹ (B_11)⁻¹ B̃¹²`, a block matrix of order `n − 1`.
pub fn schur_second<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<BlockMatrix<T>> {
    let p = b.partition_second()?;
    let inv = invert(&p.unit(1, 1), tol).map_err(|e| e.singular_as("B₁₁"))?;
    complement(
        &p.unit(2, 2),
        &p.unit(2, 1),
        &inv,
        &p.unit(1, 2),
        p.side_dims(2),
        b.is_self_adjoint(),
    )
}

fn stage_label(k: usize, last: bool) -> String {
    let power = match k {
        0 => String::new(),
        1 => "Δ̃²₁".to_string(),
        k => format!("(Δ̃²₁)^{k}"),
    };
    match (last, k) {
        (true, 0) => "B".to_string(),
        (true, _) => format!("{power}(B)"),
        (false, 0) => "Δ̃¹₁(B)".to_string(),
        (false, _) => format!("Δ̃¹₁{power}(B)"),
    }
}

/// Sequential elimination test for `B ≥ 0`.
///
/// Stage `k` (k = 0..n−2) gates the corner block of `(Δ̃²₁)ᵏ(B)` on
/// invertibility, checks it for nonnegativity, then eliminates it. The last
/// stage checks the remaining single block. Stops at the first failed gate.
pub fn check_nn<T: Scalar>(b: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<NnCertificate<T>> {
    b.check_self_adjoint(tol)?;
    let n = b.order();
    let mut current = b.resymmetrized();
    let mut stages = Vec::with_capacity(n);

    for k in 0..n {
        let last = k == n - 1;
        let corner = current.block(0, 0).clone();
        let mut stage = NnStage {
            stage: k,
            label: stage_label(k, last),
            order: current.order(),
            dim: corner.rows(),
            gate: None,
            lambda_min: None,
            verdict: NodeVerdict::Pass,
        };
        if !last {
            let g = invertibility_gate(&corner, tol)?;
            stage.gate = Some(GateRecord {
                passed: g.passed,
                ratio: g.ratio,
            });
            if !g.passed {
                stage.verdict = NodeVerdict::Singular;
                stages.push(stage);
                break;
            }
        }
        let check = is_nn_leaf(&corner, tol)?;
        stage.lambda_min = Some(check.lambda_min);
        if !check.verdict {
            stage.verdict = NodeVerdict::Fail;
        }
        stages.push(stage);
        if !last {
            current = schur_second(&current, tol)?.resymmetrized();
        }
    }
    Ok(NnCertificate::from_stages(stages))
}

/// Two-block nonnegativity test eliminating either diagonal block.
///
/// `EliminateFirst` checks `B_11 ≥ 0` and `B_22 − B_21 B_11⁻¹ B_12 ≥ 0`;
/// `EliminateSecond` checks `B_22 ≥ 0` and `B_11 − B_12 B_22⁻¹ B_21 ≥ 0`.
pub fn check_nn_2x2<T: Scalar>(
    b: &BlockMatrix<T>,
    tol: &Tolerances<T>,
    ordering: Ordering,
) -> Result<NnCertificate<T>> {
    if b.order() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2 blocks, got {}", b.order())));
    }
    match ordering {
        Ordering::EliminateFirst => check_nn(b, tol),
        Ordering::EliminateSecond => {
            let mut cert = check_nn(&b.permuted(&[1, 0])?, tol)?;
            let labels = ["B₂₂", "B₁₁ − B₁₂B₂₂⁻¹B₂₁"];
            for (s, l) in cert.stages.iter_mut().zip(labels) {
                s.label = l.to_string();
            }
            Ok(cert)
        }
    }
}

/// `|⟨Bh,h⟩ − (‖B₁₁^{1/2}h₁ + B₁₁^{−1/2}B₁₂h₂‖² + ⟨Δh₂,h₂⟩)|` with
/// `Δ = B₂₂ − B₂₁B₁₁⁻¹B₁₂`, for a two-block `B` with `B₁₁ ≫ 0`.
pub fn energy_identity_residual<T: Scalar>(b: &BlockMatrix<T>, h: &[Vec<T>], tol: &Tolerances<T>) -> Result<T> {
    if b.order() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2 blocks, got {}", b.order())));
    }
    crate::block::check_point(b.dims(), h)?;
    let b11 = b.block(0, 0);
    let (sqrt, inv_sqrt) = spd_sqrt_pair(b11, tol).map_err(|e| match e {
        Error::NotPositiveDefinite(_) => Error::NotPositiveDefinite("B₁₁".into()),
        other => other,
    })?;
    let inv = invert(b11, tol)?;
    let (b12, b21, b22) = (b.block(0, 1), b.block(1, 0), b.block(1, 1));
    let delta = b22.subtract(&b21.multiply(&inv)?.multiply(b12)?)?;

    let (h1, h2) = (&h[0], &h[1]);
    let lhs = b.quadratic_form(h)?;
    let first = sqrt.mat_vec(h1)?;
    let second = inv_sqrt.mat_vec(&b12.mat_vec(h2)?)?;
    let square: T = first.iter().zip(&second).map(|(&a, &c)| (a + c) * (a + c)).sum();
    let tail: T = delta.mat_vec(h2)?.iter().zip(h2).map(|(&a, &c)| a * c).sum();
    Ok((lhs - (square + tail)).abs())
}
