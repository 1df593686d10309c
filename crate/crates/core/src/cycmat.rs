//! Dense matrices over cyclotomic fields and the coefficient matrices built from
//! kernel forms.

use serde::Serialize;
use thiserror::Error;

use crate::chars::DirichletCharacter;
use crate::exact::Cyclotomic;
use crate::kernels::{self, CoeffTable, KernelError, KernelKind, KernelSpec};
use crate::qforms::cusp_dim;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycMatError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("indices must be strictly increasing: {0:?}")]
    Indices(Vec<u32>),
    #[error("characters {0} and {1} take the same value at 2")]
    SharedValueAtTwo(String, String),
    #[error("characters must be distinct: {0}")]
    DuplicateCharacter(String),
    #[error("{kind:?} needs {needed}")]
    Arity { kind: MatrixKind, needed: &'static str },
    #[error("matrix size {n} exceeds dim S_{weight} = {dim}")]
    TooLarge { n: usize, weight: u32, dim: usize },
    #[error("matrix size must be positive")]
    Empty,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Which coefficient matrix a `CycMatrix` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MatrixKind {
    M,
    N,
    P,
    Q,
    C1,
    C2,
    C3,
    C4,
}

impl MatrixKind {
    pub fn kernel_kind(self) -> KernelKind {
        match self {
            MatrixKind::M | MatrixKind::P | MatrixKind::C1 | MatrixKind::C3 => KernelKind::Product,
            _ => KernelKind::Bracket,
        }
    }

    /// True when rows run over characters with a fixed index.
    pub fn rows_over_characters(self) -> bool {
        matches!(self, MatrixKind::P | MatrixKind::Q | MatrixKind::C3 | MatrixKind::C4)
    }

    pub fn is_conjecture(self) -> bool {
        matches!(self, MatrixKind::C1 | MatrixKind::C2 | MatrixKind::C3 | MatrixKind::C4)
    }

    /// Largest index allowed in a row selection.
    pub fn max_ell(self, weight: u32) -> u32 {
        match self.kernel_kind() {
            KernelKind::Product => weight.saturating_sub(2) / 2,
            KernelKind::Bracket => weight.saturating_sub(4) / 2,
        }
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "M" => MatrixKind::M,
            "N" => MatrixKind::N,
            "P" => MatrixKind::P,
            "Q" => MatrixKind::Q,
            "C1" => MatrixKind::C1,
            "C2" => MatrixKind::C2,
            "C3" => MatrixKind::C3,
            "C4" => MatrixKind::C4,
            _ => return Err(format!("unknown matrix {s:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub kind: MatrixKind,
    pub weight: u32,
    pub modulus: u64,
    pub ells: Vec<u32>,
    pub chars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Cyclotomic>,
    provenance: Option<Provenance>,
}

impl CycMatrix {
    /// Row-major constructor; all entries are promoted to a common order.
    pub fn new(rows: usize, cols: usize, entries: Vec<Cyclotomic>) -> Result<Self, CycMatError> {
        if entries.len() != rows * cols {
            return Err(CycMatError::Shape {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        let order = entries.iter().fold(1, |acc, e| num_integer::lcm(acc, e.order()));
        let entries = entries.into_iter().map(|e| e.promote(order)).collect();
        Ok(CycMatrix {
            rows,
            cols,
            entries,
            provenance: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Cyclotomic>>) -> Result<Self, CycMatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CycMatError::Shape {
                expected: r * c,
                got: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|i| {
                if i / n == i % n {
                    Cyclotomic::one(1)
                } else {
                    Cyclotomic::zero(1)
                }
            })
            .collect();
        CycMatrix {
            rows: n,
            cols: n,
            entries,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Cyclotomic] {
        &self.entries
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn order(&self) -> u64 {
        self.entries.first().map_or(1, Cyclotomic::order)
    }

    fn to_rows(&self) -> Vec<Vec<Cyclotomic>> {
        self.entries.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det_exact(&self) -> Result<Cyclotomic, CycMatError> {
        if self.rows != self.cols {
            return Err(CycMatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let order = self.order();
        if n == 0 {
            return Ok(Cyclotomic::one(order));
        }
        let mut a = self.to_rows();
        let mut negate = false;
        let mut prev = Cyclotomic::one(order);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return Ok(Cyclotomic::zero(order)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.checked_div(&prev).expect("Bareiss pivot is nonzero");
                }
                a[i][k] = Cyclotomic::zero(order);
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -det } else { det })
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let inv = a[rank][col].inv().expect("nonzero pivot");
            for i in rank + 1..self.rows {
                if a[i][col].is_zero() {
                    continue;
                }
                let factor = &a[i][col] * &inv;
                for j in col..self.cols {
                    let t = &factor * &a[rank][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Coefficient arguments `1, 2, 4, ..., 2^(n-1)`.
fn powers_of_two(n: usize) -> Vec<usize> {
    (0..n).map(|j| 1usize << j).collect()
}

fn check_increasing(ells: &[u32]) -> Result<(), CycMatError> {
    if ells.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CycMatError::Indices(ells.to_vec()));
    }
    Ok(())
}

fn check_distinct(chars: &[DirichletCharacter]) -> Result<(), CycMatError> {
    for (i, a) in chars.iter().enumerate() {
        if chars[..i].contains(a) {
            return Err(CycMatError::DuplicateCharacter(a.to_string()));
        }
    }
    Ok(())
}

/// Row specs for a matrix: one spec per row.
fn row_specs(
    which: MatrixKind,
    weight: u32,
    chars: &[DirichletCharacter],
    ells: &[u32],
) -> Result<Vec<KernelSpec>, CycMatError> {
    let kind = which.kernel_kind();
    if which.rows_over_characters() {
        let [ell] = ells else {
            return Err(CycMatError::Arity {
                kind: which,
                needed: "exactly one index",
            });
        };
        check_distinct(chars)?;
        chars
            .iter()
            .map(|chi| Ok(KernelSpec::new(kind, weight, *ell, chi.clone())?))
            .collect()
    } else {
        let [chi] = chars else {
            return Err(CycMatError::Arity {
                kind: which,
                needed: "exactly one character",
            });
        };
        check_increasing(ells)?;
        ells.iter()
            .map(|&ell| Ok(KernelSpec::new(kind, weight, ell, chi.clone())?))
            .collect()
    }
}

fn provenance(which: MatrixKind, weight: u32, chars: &[DirichletCharacter], ells: &[u32]) -> Provenance {
    Provenance {
        kind: which,
        weight,
        modulus: chars.first().map_or(1, DirichletCharacter::modulus),
        ells: ells.to_vec(),
        chars: chars.iter().map(ToString::to_string).collect(),
    }
}

/// The asymptotic matrices `M`, `N`, `P`, `Q`: entry `(i, j)` is the normalized
/// coefficient at `2^(j-1)` of the `i`-th kernel.
pub fn build_matrix(
    which: MatrixKind,
    weight: u32,
    chars: &[DirichletCharacter],
    ells: &[u32],
) -> Result<CycMatrix, CycMatError> {
    assert!(!which.is_conjecture(), "use build_conjecture_matrix for {which:?}");
    let specs = row_specs(which, weight, chars, ells)?;
    if specs.is_empty() {
        return Err(CycMatError::Empty);
    }
    if which.rows_over_characters() {
        for (i, a) in chars.iter().enumerate() {
            for b in &chars[..i] {
                if a.evaluate(2) == b.evaluate(2) {
                    return Err(CycMatError::SharedValueAtTwo(b.to_string(), a.to_string()));
                }
            }
        }
    }
    let n = specs.len();
    let args = powers_of_two(n);
    let mut entries = Vec::with_capacity(n * n);
    for spec in &specs {
        let table = kernels::normalize(&kernels::coefficients(spec, args[n - 1]))?;
        entries.extend(args.iter().map(|&m| table.normalized_coeff(m).unwrap().clone()));
    }
    Ok(CycMatrix::new(n, n, entries)?.with_provenance(provenance(which, weight, chars, ells)))
}

/// Conjecture matrices `C1`..`C4`: entry `(i, j)` is the raw coefficient at `j`
/// of the `i`-th kernel, `1 <= j <= n`.
pub fn build_conjecture_matrix(
    which: MatrixKind,
    weight: u32,
    chars: &[DirichletCharacter],
    ells: &[u32],
    n: usize,
) -> Result<CycMatrix, CycMatError> {
    assert!(which.is_conjecture(), "use build_matrix for {which:?}");
    let dim = cusp_dim(weight);
    if n > dim {
        return Err(CycMatError::TooLarge { n, weight, dim });
    }
    if n == 0 {
        return Err(CycMatError::Empty);
    }
    let specs = row_specs(which, weight, chars, ells)?;
    if let Some(&ell) = ells.iter().find(|&&l| l > which.max_ell(weight)) {
        return Err(KernelError::Range {
            weight,
            ell,
            min: 3,
            max: which.max_ell(weight),
        }
        .into());
    }
    if specs.len() != n {
        return Err(CycMatError::Shape {
            expected: n,
            got: specs.len(),
        });
    }
    let tables: Vec<CoeffTable> = specs.iter().map(|s| kernels::coefficients(s, n)).collect();
    let refs: Vec<&CoeffTable> = tables.iter().collect();
    Ok(conjecture_matrix_from_tables(&refs, n)?.with_provenance(provenance(which, weight, chars, ells)))
}

/// Square matrix of the first `n` raw coefficients of precomputed tables.
pub fn conjecture_matrix_from_tables(tables: &[&CoeffTable], n: usize) -> Result<CycMatrix, CycMatError> {
    let entries = tables
        .iter()
        .flat_map(|t| t.values[..n].iter().cloned())
        .collect();
    CycMatrix::new(tables.len(), n, entries)
}
