//! Seeded random instances and comparison of the criteria with an eigenvalue oracle.
//!
//! # Generator
//!
//! All randomness comes from [`Rng`], a xorshift64* generator whose state is
//! seeded through one round of splitmix64:
//!
//! ```text
//! seed:  z = seed + 0x9E3779B97F4A7C15
//!        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!        state = z ^ (z >> 31)            (replaced by 1 if zero)
//! next:  state ^= state >> 12; state ^= state << 25; state ^= state >> 27
//!        output = state * 0x2545F4914F6CDD1D
//! ```
//!
//! (all arithmetic wrapping mod 2⁶⁴). Uniform reals use the top 53 bits:
//! `u = (output >> 11) · 2⁻⁵³ ∈ [0, 1)`. Any implementation following these
//! constants and the draw order documented on each generator reproduces the
//! corpus exactly.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{sym_eig_min, DenseMatrix, Tolerances};
use crate::schur_first::{check_pd, CheckMode, PdVerdict};
use crate::schur_second::{check_nn, NnVerdict};

/// xorshift64* seeded by splitmix64; see the module docs for the constants.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Self {
            state: if z == 0 { 1 } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Integer in `1..=k` as `1 + next_u64() mod k`.
    pub fn one_to(&mut self, k: usize) -> usize {
        1 + (self.next_u64() % k as u64) as usize
    }

    pub fn vector(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.symmetric()).collect()
    }

    /// Random point with coordinate blocks of the given sizes.
    pub fn point(&mut self, dims: &[usize]) -> Vec<Vec<f64>> {
        dims.iter().map(|&d| self.vector(d)).collect()
    }

    /// Random point of Euclidean norm `radius`.
    pub fn point_on_sphere(&mut self, dims: &[usize], radius: f64) -> Vec<Vec<f64>> {
        loop {
            let p = self.point(dims);
            let norm = p.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-3 {
                return p
                    .into_iter()
                    .map(|b| b.into_iter().map(|v| v * radius / norm).collect())
                    .collect();
            }
        }
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix<f64> {
        DenseMatrix::from_row_major(rows, cols, self.vector(rows * cols)).expect("finite entries")
    }
}

/// How [`random_self_adjoint`] builds the flattened matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    /// `AᵀA + shift·I` with `A` uniform in `[-1,1)`, so `λ_min ≥ shift`.
    Gram,
    /// `Q Λ Qᵀ` with `Q` orthonormal (modified Gram-Schmidt on a uniform matrix)
    /// and `Λ = diag(shift, shift + spread·u₂, …)`, `uᵢ ∈ [0,1)`, so `λ_min = shift`.
    Conjugated { spread: f64 },
}

fn orthonormal(rng: &mut Rng, n: usize) -> DenseMatrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = rng.vector(n);
        for q in &cols {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut q = DenseMatrix::zeros(n, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            q[(r, c)] = v;
        }
    }
    q
}

/// Self-adjoint block matrix with blocks laid out per `dims`.
///
/// Draw order: `Gram` draws `A` row-major; `Conjugated` draws the candidate
/// columns of `Q`, then `u₂, …, u_N`.
pub fn random_self_adjoint(
    dims: &[usize],
    spectrum_shift: f64,
    construction: Construction,
    seed: u64,
) -> BlockMatrix<f64> {
    let mut rng = Rng::new(seed);
    let n: usize = dims.iter().sum();
    let flat = match construction {
        Construction::Gram => {
            let a = rng.matrix(n, n);
            let ata = a.transpose().multiply(&a).expect("square");
            ata.add(&DenseMatrix::identity(n).scale(spectrum_shift))
                .expect("square")
        }
        Construction::Conjugated { spread } => {
            let q = orthonormal(&mut rng, n);
            let mut spectrum = vec![spectrum_shift];
            spectrum.extend((1..n).map(|_| spectrum_shift + spread * rng.unit()));
            let qd = q.multiply(&DenseMatrix::from_diagonal(&spectrum)).expect("square");
            qd.multiply(&q.transpose()).expect("square")
        }
    };
    BlockMatrix::assemble(&flat.symmetrized(), dims).expect("dims sum to the flattened size")
}

/// Bidiagonal block matrix: only the `(i,i)` and `(i, n+1−i)` blocks are nonzero.
///
/// Each pair `{i, n+1−i}` (and the center block for odd `n`) is an independent
/// conjugated instance with shift drawn from `[-0.25, 1)` and spread 3, so
/// roughly a fifth of the pairs are indefinite.
pub fn random_bidiagonal(dims: &[usize], seed: u64) -> BlockMatrix<f64> {
    let n = dims.len();
    let mut rng = Rng::new(seed);
    let mut flat = DenseMatrix::zeros(dims.iter().sum(), dims.iter().sum());
    let offsets = crate::block::offsets(dims);
    for i in 0..n.div_ceil(2) {
        let j = n - 1 - i;
        let shift = rng.range(-0.25, 1.0);
        let sub_seed = rng.next_u64();
        let sub_dims: Vec<usize> = if i == j { vec![dims[i]] } else { vec![dims[i], dims[j]] };
        let pair = random_self_adjoint(&sub_dims, shift, Construction::Conjugated { spread: 3.0 }, sub_seed);
        let idx = if i == j { vec![i] } else { vec![i, j] };
        for (a, &bi) in idx.iter().enumerate() {
            for (c, &bj) in idx.iter().enumerate() {
                flat.set_submatrix(offsets[bi], offsets[bj], pair.block(a, c));
            }
        }
    }
    BlockMatrix::assemble(&flat, dims).expect("dims sum to the flattened size")
}

/// Instance `seed` of the standard corpus: `n ∈ 1..=n_max`, block dims in `1..=4`.
///
/// Draw order: `n`, the `n` dims, a construction selector `k ∈ 1..=4`, the
/// shift, then the sub-seed for [`random_self_adjoint`]. `k = 1` gives a Gram
/// instance with shift in `[0.05, 1)`; otherwise a conjugated instance with
/// shift in `[-1, 1)` and spread 4.
pub fn standard_instance(seed: u64, n_max: usize) -> BlockMatrix<f64> {
    let mut rng = Rng::new(seed);
    let n = rng.one_to(n_max.max(1));
    let dims: Vec<usize> = (0..n).map(|_| rng.one_to(4)).collect();
    let k = rng.one_to(4);
    let (construction, shift) = if k == 1 {
        (Construction::Gram, rng.range(0.05, 1.0))
    } else {
        (Construction::Conjugated { spread: 4.0 }, rng.range(-1.0, 1.0))
    };
    random_self_adjoint(&dims, shift, construction, rng.next_u64())
}

/// Agreement of the nonnegativity criterion with the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NnAgreement {
    Agree,
    Disagree,
    /// A gate failed, so the criterion makes no claim.
    GatesFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    /// `λ_min` of the flattened matrix.
    pub lambda_min: f64,
    /// `max(1, ‖flatten(B)‖_max)`.
    pub scale: f64,
    pub pd_verdict: PdVerdict,
    pub oracle_pd: bool,
    pub pd_agree: bool,
    pub nn_verdict: NnVerdict,
    pub oracle_nn: bool,
    pub nn_agree: NnAgreement,
    /// `λ_min` lies within `10·pd_eps·scale` (or `10·nn_tol·scale`) of zero;
    /// either answer is acceptable there.
    pub skipped: bool,
}

impl OracleComparison {
    /// No disagreement outside the tolerance boundary.
    pub fn agrees(&self) -> bool {
        self.skipped || (self.pd_agree && self.nn_agree != NnAgreement::Disagree)
    }
}

/// Runs `check_pd`, `check_nn` and the eigenvalue oracle on `b`.
///
/// The caller must supply a self-adjoint matrix; otherwise the criteria's
/// `NotSelfAdjoint` error is returned.
pub fn compare_with_oracle(b: &BlockMatrix<f64>, tol: &Tolerances<f64>) -> Result<OracleComparison> {
    let flat = b.flatten();
    let scale = flat.scale_floor();
    let lambda_min = sym_eig_min(&flat, tol)?;
    let pd = check_pd(b, tol, CheckMode::EarlyExit)?;
    let nn = check_nn(b, tol)?;
    let oracle_pd = lambda_min > 0.0;
    let oracle_nn = lambda_min >= -tol.nn_tol * scale;
    let nn_agree = match nn.verdict {
        NnVerdict::PreconditionFailed => NnAgreement::GatesFailed,
        v if (v == NnVerdict::Nonnegative) == oracle_nn => NnAgreement::Agree,
        _ => NnAgreement::Disagree,
    };
    Ok(OracleComparison {
        lambda_min,
        scale,
        pd_verdict: pd.verdict,
        oracle_pd,
        pd_agree: pd.is_positive_definite() == oracle_pd && pd.verdict != PdVerdict::Indeterminate,
        nn_verdict: nn.verdict,
        oracle_nn,
        nn_agree,
        skipped: lambda_min.abs() <= 10.0 * tol.pd_eps.max(tol.nn_tol) * scale,
    })
}

/// One line of the sweep CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub n: usize,
    pub lambda_min: f64,
    pub pd_verdict: String,
    pub oracle_verdict: String,
    /// `true`, `false`, or `skipped` for boundary instances.
    pub agree: String,
}

pub const SWEEP_HEADER: [&str; 6] = ["seed", "n", "lambda_min", "pd_verdict", "oracle_verdict", "agree"];

/// Compares every instance of the standard corpus for the given seeds.
///
/// Seeds run in parallel; the rows come back in seed order.
pub fn sweep(seeds: RangeInclusive<u64>, n_max: usize, tol: &Tolerances<f64>) -> Result<Vec<SweepRow>> {
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let b = standard_instance(seed, n_max);
            let c = compare_with_oracle(&b, tol)?;
            Ok(SweepRow {
                seed,
                n: b.order(),
                lambda_min: c.lambda_min,
                pd_verdict: format!("{:?}", c.pd_verdict),
                oracle_verdict: if c.oracle_pd {
                    "PositiveDefinite"
                } else {
                    "NotPositiveDefinite"
                }
                .into(),
                agree: if c.skipped {
                    "skipped".into()
                } else {
                    c.agrees().to_string()
                },
            })
        })
        .collect()
}

/// Writes the header and rows as CSV.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Format(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
