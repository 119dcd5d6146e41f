//! Truncated two-mode Fock space: basis bookkeeping, sparse operators, states
//! and the generator matrices of the Schwinger realization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerances used by every residual check. A single record so the CLI can
/// override them in one place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub algebra: f64,
    pub eigen: f64,
    pub ladder: f64,
    pub state: f64,
    pub spectrum: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            algebra: 1e-12,
            eigen: 1e-9,
            ladder: 1e-10,
            state: 1e-8,
            spectrum: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockCutoff {
    pub n1_max: usize,
    pub n2_max: usize,
}

impl FockCutoff {
    pub fn new(n1_max: usize, n2_max: usize) -> Self {
        Self { n1_max, n2_max }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn dim(&self) -> usize {
        (self.n1_max + 1) * (self.n2_max + 1)
    }

    /// Row-major: index = n1·(n2_max+1) + n2.
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 <= self.n1_max && n2 <= self.n2_max);
        n1 * (self.n2_max + 1) + n2
    }

    pub fn occupation(&self, idx: usize) -> (usize, usize) {
        (idx / (self.n2_max + 1), idx % (self.n2_max + 1))
    }

    pub fn contains(&self, n1: usize, n2: usize) -> bool {
        n1 <= self.n1_max && n2 <= self.n2_max
    }

    /// Basis states with n1 ≤ n1_max−degree and n2 ≤ n2_max−degree.
    pub fn interior_mask(&self, degree: usize) -> Result<Vec<bool>> {
        if degree > self.n1_max.min(self.n2_max) {
            return Err(Error::DegreeTooLarge {
                degree,
                cutoff: *self,
            });
        }
        Ok((0..self.dim())
            .map(|i| {
                let (a, b) = self.occupation(i);
                a + degree <= self.n1_max && b + degree <= self.n2_max
            })
            .collect())
    }

    /// Basis states with n1+n2 ≤ min(n1_max, n2_max) − degree, i.e. complete
    /// total-number blocks with room for `degree` raisings.
    pub fn block_mask(&self, degree: usize) -> Result<Vec<bool>> {
        let top = self.n1_max.min(self.n2_max);
        if degree > top {
            return Err(Error::DegreeTooLarge {
                degree,
                cutoff: *self,
            });
        }
        Ok((0..self.dim())
            .map(|i| {
                let (a, b) = self.occupation(i);
                a + b + degree <= top
            })
            .collect())
    }
}

fn check_same(a: FockCutoff, b: FockCutoff) -> Result<()> {
    if a != b {
        Err(Error::CutoffMismatch(a, b))
    } else {
        Ok(())
    }
}

/// Sparse complex matrix on the truncated basis, stored row by row with
/// column-sorted entries and no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    cutoff: FockCutoff,
    rows: Vec<Vec<(usize, C64)>>,
}

impl OperatorMatrix {
    pub fn zeros(cutoff: FockCutoff) -> Self {
        Self {
            cutoff,
            rows: vec![Vec::new(); cutoff.dim()],
        }
    }

    pub fn identity(cutoff: FockCutoff) -> Self {
        Self::diagonal(cutoff, |_, _| 1.0)
    }

    /// Diagonal operator with entry f(n1, n2).
    pub fn diagonal(cutoff: FockCutoff, f: impl Fn(usize, usize) -> f64) -> Self {
        let rows = (0..cutoff.dim())
            .map(|i| {
                let (a, b) = cutoff.occupation(i);
                let v = f(a, b);
                if v != 0.0 {
                    vec![(i, C64::new(v, 0.0))]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self { cutoff, rows }
    }

    /// Duplicate coordinates are summed; exact zeros are dropped.
    pub fn from_triplets(
        cutoff: FockCutoff,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let dim = cutoff.dim();
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange { row: r, col: c, dim });
            }
            rows[r].push((c, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != ZERO);
            *row = merged;
        }
        Ok(Self { cutoff, rows })
    }

    pub fn from_dense(cutoff: FockCutoff, m: &DMatrix<C64>, drop_tol: f64) -> Self {
        assert_eq!(m.nrows(), cutoff.dim());
        let rows = (0..cutoff.dim())
            .map(|r| {
                (0..cutoff.dim())
                    .filter_map(|c| {
                        let v = m[(r, c)];
                        (v != ZERO && v.norm() > drop_tol).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Self { cutoff, rows }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.cutoff.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|k| self.rows[r][k].1)
            .unwrap_or(ZERO)
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.cutoff.dim()];
        for (r, c, v) in self.entries() {
            rows[c].push((r, v.conj()));
        }
        Self {
            cutoff: self.cutoff,
            rows,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return Self::zeros(self.cutoff);
        }
        Self {
            cutoff: self.cutoff,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(c, v)| (c, v * s)).collect())
                .collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// self + s·other
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        check_same(self.cutoff, other.cutoff)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let (c, v) = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                        i += 1;
                        a[i - 1]
                    } else if i >= a.len() || b[j].0 < a[i].0 {
                        j += 1;
                        (b[j - 1].0, s * b[j - 1].1)
                    } else {
                        i += 1;
                        j += 1;
                        (a[i - 1].0, a[i - 1].1 + s * b[j - 1].1)
                    };
                    if v != ZERO {
                        out.push((c, v));
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            cutoff: self.cutoff,
            rows,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_same(self.cutoff, other.cutoff)?;
        let n = self.cutoff.dim();
        let mut acc = vec![ZERO; n];
        let mut touched = vec![false; n];
        let mut cols: Vec<usize> = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                cols.clear();
                for &(k, a) in row {
                    for &(c, b) in &other.rows[k] {
                        if !touched[c] {
                            touched[c] = true;
                            cols.push(c);
                        }
                        acc[c] += a * b;
                    }
                }
                cols.sort_unstable();
                let out: Vec<(usize, C64)> = cols
                    .iter()
                    .filter_map(|&c| {
                        let v = acc[c];
                        acc[c] = ZERO;
                        touched[c] = false;
                        (v != ZERO).then_some((c, v))
                    })
                    .collect();
                out
            })
            .collect();
        Ok(Self {
            cutoff: self.cutoff,
            rows,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.cutoff);
        for _ in 0..k {
            out = out.matmul(self).expect("same cutoff");
        }
        out
    }

    pub fn apply(&self, v: &TwoModeState) -> Result<TwoModeState> {
        check_same(self.cutoff, v.cutoff)?;
        let amplitudes = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v.amplitudes[c]).sum())
            .collect();
        Ok(TwoModeState {
            cutoff: self.cutoff,
            amplitudes,
        })
    }

    /// P·X·P for the diagonal 0/1 projector given as a mask.
    pub fn project(&self, mask: &[bool]) -> Self {
        Self {
            cutoff: self.cutoff,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    if mask[r] {
                        row.iter().copied().filter(|&(c, _)| mask[c]).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    /// Drops entries with magnitude ≤ tol.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            cutoff: self.cutoff,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().copied().filter(|e| e.1.norm() > tol).collect())
                .collect(),
        }
    }

    /// ‖P(X − Y)P‖_F on the degree-d interior.
    pub fn interior_distance(&self, other: &Self, degree: usize) -> Result<f64> {
        let mask = self.cutoff.interior_mask(degree)?;
        self.masked_distance(other, &mask)
    }

    pub fn masked_distance(&self, other: &Self, mask: &[bool]) -> Result<f64> {
        Ok(self.sub(other)?.project(mask).frobenius_norm())
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            cutoff: [self.cutoff.n1_max, self.cutoff.n2_max],
            entries: self.entries().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        }
    }

    pub fn from_json(j: &OperatorJson) -> Result<Self> {
        let cutoff = FockCutoff::new(j.cutoff[0], j.cutoff[1]);
        Self::from_triplets(
            cutoff,
            j.entries.iter().map(|&(r, c, re, im)| (r, c, C64::new(re, im))),
        )
    }
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub residual: f64,
}

/// Every defining commutator of {h(1)⊕h(1)}⋊u(2), as ‖P([X,Y] − Z)P‖_F on the
/// degree-d interior.
pub fn algebra_relations(g: &GeneratorSet, degree: usize) -> Result<Vec<RelationCheck>> {
    let zero = OperatorMatrix::zeros(g.cutoff);
    let half = |m: &OperatorMatrix, s: f64| m.scale_re(s);
    let (a1, a2, c1, c2) = (&g.a1, &g.a2, &g.a1_dag, &g.a2_dag);
    let (n, j3, jp, jm, id) = (&g.n, &g.j3, &g.jplus, &g.jminus, &g.identity);
    let table: Vec<(&str, &OperatorMatrix, &OperatorMatrix, OperatorMatrix)> = vec![
        ("[a1,a1+]=I", a1, c1, id.clone()),
        ("[a2,a2+]=I", a2, c2, id.clone()),
        ("[a1,a2+]=0", a1, c2, zero.clone()),
        ("[a2,a1+]=0", a2, c1, zero.clone()),
        ("[a1,a2]=0", a1, a2, zero.clone()),
        ("[a1+,a2+]=0", c1, c2, zero.clone()),
        ("[a1,I]=0", a1, id, zero.clone()),
        ("[a2+,I]=0", c2, id, zero.clone()),
        ("[N,J+]=0", n, jp, zero.clone()),
        ("[N,J-]=0", n, jm, zero.clone()),
        ("[N,J3]=0", n, j3, zero.clone()),
        ("[J3,J+]=J+", j3, jp, jp.clone()),
        ("[J3,J-]=-J-", j3, jm, half(jm, -1.0)),
        ("[J+,J-]=2J3", jp, jm, half(j3, 2.0)),
        ("[N,a1]=-a1/2", n, a1, half(a1, -0.5)),
        ("[N,a2]=-a2/2", n, a2, half(a2, -0.5)),
        ("[N,a1+]=a1+/2", n, c1, half(c1, 0.5)),
        ("[N,a2+]=a2+/2", n, c2, half(c2, 0.5)),
        ("[J3,a1]=-a1/2", j3, a1, half(a1, -0.5)),
        ("[J3,a2]=a2/2", j3, a2, half(a2, 0.5)),
        ("[J3,a1+]=a1+/2", j3, c1, half(c1, 0.5)),
        ("[J3,a2+]=-a2+/2", j3, c2, half(c2, -0.5)),
        ("[J+,a1]=-a2", jp, a1, half(a2, -1.0)),
        ("[J+,a2+]=a1+", jp, c2, c1.clone()),
        ("[J-,a2]=-a1", jm, a2, half(a1, -1.0)),
        ("[J-,a1+]=a2+", jm, c1, c2.clone()),
        ("[J+,a1+]=0", jp, c1, zero.clone()),
        ("[J+,a2]=0", jp, a2, zero.clone()),
        ("[J-,a2+]=0", jm, c2, zero.clone()),
        ("[J-,a1]=0", jm, a1, zero.clone()),
        ("[J+,I]=0", jp, id, zero.clone()),
        ("[J-,I]=0", jm, id, zero.clone()),
    ];
    table
        .into_iter()
        .map(|(name, x, y, z)| {
            Ok(RelationCheck {
                relation: name.to_string(),
                residual: commutator(x, y)?.interior_distance(&z, degree)?,
            })
        })
        .collect()
}

/// Diagonal 0/1 projector onto the degree-d interior.
pub fn interior_projector(cutoff: FockCutoff, degree: usize) -> Result<OperatorMatrix> {
    let mask = cutoff.interior_mask(degree)?;
    Ok(OperatorMatrix::diagonal(cutoff, |a, b| {
        if mask[cutoff.index(a, b)] {
            1.0
        } else {
            0.0
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub cutoff: [usize; 2],
    pub entries: Vec<(usize, usize, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    cutoff: FockCutoff,
    amplitudes: Vec<C64>,
}

impl TwoModeState {
    pub fn zeros(cutoff: FockCutoff) -> Self {
        Self {
            cutoff,
            amplitudes: vec![ZERO; cutoff.dim()],
        }
    }

    pub fn basis(cutoff: FockCutoff, n1: usize, n2: usize) -> Result<Self> {
        if !cutoff.contains(n1, n2) {
            return Err(Error::CutoffOverflow(format!(
                "|{n1},{n2}> outside cutoff ({},{})",
                cutoff.n1_max, cutoff.n2_max
            )));
        }
        let mut s = Self::zeros(cutoff);
        s.amplitudes[cutoff.index(n1, n2)] = ONE;
        Ok(s)
    }

    pub fn vacuum(cutoff: FockCutoff) -> Self {
        Self::basis(cutoff, 0, 0).expect("vacuum always fits")
    }

    pub fn from_amplitudes(cutoff: FockCutoff, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != cutoff.dim() {
            return Err(Error::Domain(format!(
                "amplitude vector has length {}, expected {}",
                amplitudes.len(),
                cutoff.dim()
            )));
        }
        Ok(Self { cutoff, amplitudes })
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amp(&self, n1: usize, n2: usize) -> C64 {
        if self.cutoff.contains(n1, n2) {
            self.amplitudes[self.cutoff.index(n1, n2)]
        } else {
            ZERO
        }
    }

    pub fn set_amp(&mut self, n1: usize, n2: usize, v: C64) {
        let i = self.cutoff.index(n1, n2);
        self.amplitudes[i] = v;
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }

    /// self + s·other
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        check_same(self.cutoff, other.cutoff)?;
        Ok(Self {
            cutoff: self.cutoff,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_same(self.cutoff, other.cutoff)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Norm restricted to the degree-d interior.
    pub fn interior_norm(&self, degree: usize) -> Result<f64> {
        let mask = self.cutoff.interior_mask(degree)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Same amplitudes on a different cutoff; components that do not fit must be zero.
    pub fn recut(&self, cutoff: FockCutoff) -> Result<Self> {
        let mut out = Self::zeros(cutoff);
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let (n1, n2) = self.cutoff.occupation(i);
            if cutoff.contains(n1, n2) {
                out.set_amp(n1, n2, a);
            } else if a != ZERO {
                return Err(Error::CutoffOverflow(format!(
                    "amplitude at |{n1},{n2}> does not fit the new cutoff"
                )));
            }
        }
        Ok(out)
    }

    /// 1 − |⟨u|v⟩| for normalized inputs; zero iff equal up to a global phase.
    pub fn phase_distance(&self, other: &Self) -> Result<f64> {
        let ov = self.inner(other)?.norm() / (self.norm() * other.norm());
        Ok((1.0 - ov).abs())
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            cutoff: [self.cutoff.n1_max, self.cutoff.n2_max],
            amplitudes: self.amplitudes.iter().map(|a| (a.re, a.im)).collect(),
        }
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        Self::from_amplitudes(
            FockCutoff::new(j.cutoff[0], j.cutoff[1]),
            j.amplitudes.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
    }

    /// Rows (n1, n2, re, im, probability).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n1,n2,re,im,probability\n");
        for (i, a) in self.amplitudes.iter().enumerate() {
            let (n1, n2) = self.cutoff.occupation(i);
            out.push_str(&format!("{n1},{n2},{:e},{:e},{:e}\n", a.re, a.im, a.norm_sqr()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub cutoff: [usize; 2],
    pub amplitudes: Vec<(f64, f64)>,
}

/// Generator matrices a₁, a₂, a₁†, a₂†, I, N, J₃, J₊, J₋ at a fixed cutoff.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub cutoff: FockCutoff,
    pub a1: OperatorMatrix,
    pub a2: OperatorMatrix,
    pub a1_dag: OperatorMatrix,
    pub a2_dag: OperatorMatrix,
    pub identity: OperatorMatrix,
    pub n: OperatorMatrix,
    pub j3: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
}

fn lowering(cutoff: FockCutoff, mode: usize) -> OperatorMatrix {
    let trip = (0..cutoff.dim()).filter_map(|col| {
        let (n1, n2) = cutoff.occupation(col);
        match mode {
            1 if n1 > 0 => Some((cutoff.index(n1 - 1, n2), col, C64::new((n1 as f64).sqrt(), 0.0))),
            2 if n2 > 0 => Some((cutoff.index(n1, n2 - 1), col, C64::new((n2 as f64).sqrt(), 0.0))),
            _ => None,
        }
    });
    OperatorMatrix::from_triplets(cutoff, trip).expect("indices in range")
}

pub fn build_generators(cutoff: FockCutoff) -> GeneratorSet {
    let a1 = lowering(cutoff, 1);
    let a2 = lowering(cutoff, 2);
    let a1_dag = a1.adjoint();
    let a2_dag = a2.adjoint();
    let n1 = a1_dag.matmul(&a1).unwrap();
    let n2 = a2_dag.matmul(&a2).unwrap();
    let n = n1.add(&n2).unwrap().scale_re(0.5);
    let j3 = n1.sub(&n2).unwrap().scale_re(0.5);
    let jplus = a1_dag.matmul(&a2).unwrap();
    let jminus = a1.matmul(&a2_dag).unwrap();
    GeneratorSet {
        cutoff,
        identity: OperatorMatrix::identity(cutoff),
        a1,
        a2,
        a1_dag,
        a2_dag,
        n,
        j3,
        jplus,
        jminus,
    }
}
