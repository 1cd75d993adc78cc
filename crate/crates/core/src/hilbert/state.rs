use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::layout::SystemLayout;
use super::spectrum::{hermitian_eigenvalues, shannon_bits};
use super::C64;
use crate::config::{check_dim, TOL_ALG, TOL_NUM};
use crate::error::{layout_err, Error, Result};

/// Hermitian, positive semidefinite, unit-trace matrix over a labelled layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SystemLayout,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian and unit trace within `TOL_ALG`,
    /// smallest eigenvalue at least `-TOL_NUM`.
    pub fn new(layout: SystemLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return layout_err(format!(
                "matrix is {}x{}, layout dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let herm = (&matrix - matrix.adjoint()).camax();
        if herm > TOL_ALG {
            return Err(Error::State(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_ALG || tr.im.abs() > TOL_ALG {
            return Err(Error::State(format!("trace is {tr}, expected 1")));
        }
        let s = DensityMatrix::from_raw(layout, matrix);
        let min = s.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -TOL_NUM {
            return Err(Error::State(format!("negative eigenvalue {min:e}")));
        }
        Ok(s)
    }

    /// Trusted constructor for results of state-preserving operations; only
    /// symmetrizes away rounding noise.
    pub(crate) fn from_raw(layout: SystemLayout, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        let matrix = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix { layout, matrix }
    }

    /// Projector onto the normalized `vector`.
    pub fn pure(layout: SystemLayout, vector: &DVector<C64>) -> Result<Self> {
        if vector.len() != layout.total_dim() {
            return layout_err(format!(
                "vector has length {}, layout dimension is {}",
                vector.len(),
                layout.total_dim()
            ));
        }
        let norm = vector.norm();
        if norm == 0.0 {
            return Err(Error::State("zero vector".into()));
        }
        let v = vector / C64::new(norm, 0.0);
        Ok(DensityMatrix::from_raw(layout, &v * v.adjoint()))
    }

    /// Computational basis state; `digits` has one entry per factor.
    pub fn basis(layout: SystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.len() || digits.iter().zip(layout.dims()).any(|(&x, d)| x >= d) {
            return layout_err(format!("basis digits {digits:?} do not fit {:?}", layout.dims()));
        }
        let d = layout.total_dim();
        let mut m = DMatrix::zeros(d, d);
        let i = layout.index(digits);
        m[(i, i)] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { layout, matrix: m })
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(layout: SystemLayout, probs: &[f64]) -> Result<Self> {
        if probs.len() != layout.total_dim() {
            return layout_err("probability vector length does not match layout");
        }
        let m = DMatrix::from_diagonal(&DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        DensityMatrix::new(layout, m)
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        let m = DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        DensityMatrix { layout, matrix: m }
    }

    /// Maximally entangled state between `a` and `b`, each of dimension `dim`.
    pub fn maximally_entangled(a: &str, b: &str, dim: usize) -> Result<Self> {
        let layout = SystemLayout::new([(a, dim), (b, dim)])?;
        let mut v = DVector::zeros(dim * dim);
        for i in 0..dim {
            v[i * dim + i] = C64::new(1.0, 0.0);
        }
        DensityMatrix::pure(layout, &v)
    }

    /// Perfectly correlated uniform classical state between `a` and `b`.
    pub fn classically_correlated(a: &str, b: &str, dim: usize) -> Result<Self> {
        let layout = SystemLayout::new([(a, dim), (b, dim)])?;
        let mut probs = vec![0.0; dim * dim];
        for i in 0..dim {
            probs[i * dim + i] = 1.0 / dim as f64;
        }
        DensityMatrix::diagonal(layout, &probs)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Same matrix, new labels.
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(DensityMatrix {
            layout: self.layout.relabel(labels)?,
            matrix: self.matrix.clone(),
        })
    }

    /// Reorder the tensor factors to the given label order (all labels required).
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let pos = self.layout.positions(order)?;
        if pos.len() != self.layout.len() {
            return layout_err("permute needs every label exactly once");
        }
        let new_layout = self.layout.select(&pos);
        let d = self.dim();
        let map: Vec<usize> = (0..d)
            .map(|g| {
                let digits = self.layout.digits(g);
                let nd: Vec<usize> = pos.iter().map(|&p| digits[p]).collect();
                new_layout.index(&nd)
            })
            .collect();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                m[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(DensityMatrix {
            layout: new_layout,
            matrix: m,
        })
    }

    /// Largest-eigenvalue eigenvector and its eigenvalue.
    pub fn top_eigenvector(&self) -> (f64, DVector<C64>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let (k, &lam) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        (lam, eig.eigenvectors.column(k).into_owned())
    }
}

/// `a ⊗ b` over the concatenated layout.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let layout = a.layout.concat(&b.layout)?;
    check_dim(layout.total_dim())?;
    Ok(DensityMatrix {
        layout,
        matrix: a.matrix.kronecker(&b.matrix),
    })
}

/// Reduced state on `keep` (in layout order).
pub fn partial_trace<S: AsRef<str>>(s: &DensityMatrix, keep: &[S]) -> Result<DensityMatrix> {
    let mut keep_pos = s.layout.positions(keep)?;
    keep_pos.sort_unstable();
    if keep_pos.len() == s.layout.len() {
        return Ok(s.clone());
    }
    let trace_pos: Vec<usize> = (0..s.layout.len()).filter(|p| !keep_pos.contains(p)).collect();
    let kl = s.layout.select(&keep_pos);
    let tl = s.layout.select(&trace_pos);
    let (dk, dt) = (kl.total_dim(), tl.total_dim());
    let strides = s.layout.strides();
    let offset = |l: &SystemLayout, pos: &[usize], idx: usize| -> usize {
        l.digits(idx)
            .iter()
            .zip(pos)
            .map(|(&x, &p)| x * strides[p])
            .sum()
    };
    let k_off: Vec<usize> = (0..dk).map(|i| offset(&kl, &keep_pos, i)).collect();
    let t_off: Vec<usize> = (0..dt).map(|i| offset(&tl, &trace_pos, i)).collect();
    let mut m = DMatrix::zeros(dk, dk);
    for j in 0..dk {
        for i in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &t_off {
                acc += s.matrix[(k_off[i] + t, k_off[j] + t)];
            }
            m[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_raw(kl, m))
}

/// Von Neumann entropy in bits. Eigenvalues in `[-TOL_NUM, 0)` are clipped.
pub fn entropy(s: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&s.eigenvalues())
}

pub(crate) fn spectrum_entropy(eigs: &[f64]) -> Result<f64> {
    let mut clipped = Vec::with_capacity(eigs.len());
    for &l in eigs {
        if l < -TOL_NUM {
            return Err(Error::State(format!("negative eigenvalue {l:e}")));
        }
        clipped.push(l.clamp(0.0, 1.0));
    }
    Ok(shannon_bits(clipped))
}

/// Entropy of the marginal on `labels`.
pub fn marginal_entropy<S: AsRef<str>>(s: &DensityMatrix, labels: &[S]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    entropy(&partial_trace(s, labels)?)
}

fn disjoint_union<'a>(a: &[&'a str], b: &[&'a str]) -> Result<Vec<&'a str>> {
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        return layout_err(format!("label '{x}' appears on both sides"));
    }
    Ok(a.iter().chain(b).copied().collect())
}

/// S(A|B) = S(AB) - S(B).
pub fn conditional_entropy(s: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(a, b)?;
    Ok(marginal_entropy(s, &ab)? - marginal_entropy(s, b)?)
}

/// I(A⟩B) = -S(A|B).
pub fn coherent_information(s: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    Ok(-conditional_entropy(s, a, b)?)
}

/// I(A:B) = S(A) + S(B) - S(AB).
pub fn mutual_information(s: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(a, b)?;
    Ok(marginal_entropy(s, a)? + marginal_entropy(s, b)? - marginal_entropy(s, &ab)?)
}

/// I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC).
pub fn conditional_mutual_information(
    s: &DensityMatrix,
    a: &[&str],
    c: &[&str],
    b: &[&str],
) -> Result<f64> {
    let ab = disjoint_union(a, b)?;
    let bc = disjoint_union(b, c)?;
    let abc = disjoint_union(&ab, c)?;
    Ok(marginal_entropy(s, &ab)? + marginal_entropy(s, &bc)?
        - marginal_entropy(s, b)?
        - marginal_entropy(s, &abc)?)
}

/// ½‖s − r‖₁.
pub fn trace_distance(s: &DensityMatrix, r: &DensityMatrix) -> Result<f64> {
    if s.layout != r.layout {
        return layout_err("trace distance between states on different layouts");
    }
    let diff = &s.matrix - &r.matrix;
    let sum: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Finite list of (probability, state) pairs on one shared layout.
#[derive(Clone, Debug)]
pub struct CQEnsemble {
    items: Vec<(f64, DensityMatrix)>,
}

impl CQEnsemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = items.first() else {
            return Err(Error::Domain("empty ensemble".into()));
        };
        let layout = first.layout().clone();
        let mut total = 0.0;
        for (p, s) in &items {
            if !(*p >= 0.0) {
                return Err(Error::Domain(format!("negative probability {p}")));
            }
            if s.layout() != &layout {
                return layout_err("ensemble states must share one layout");
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL_ALG {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(CQEnsemble { items })
    }

    pub fn single(state: DensityMatrix) -> Self {
        CQEnsemble {
            items: vec![(1.0, state)],
        }
    }

    pub fn items(&self) -> &[(f64, DensityMatrix)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn layout(&self) -> &SystemLayout {
        self.items[0].1.layout()
    }

    /// The average state Σ p(u) ρ_u.
    pub fn average(&self) -> DensityMatrix {
        let mut m = DMatrix::zeros(self.layout().total_dim(), self.layout().total_dim());
        for (p, s) in &self.items {
            m += s.matrix() * C64::new(*p, 0.0);
        }
        DensityMatrix::from_raw(self.layout().clone(), m)
    }

    /// Every state reduced to `keep`.
    pub fn reduce<S: AsRef<str>>(&self, keep: &[S]) -> Result<CQEnsemble> {
        let items = self
            .items
            .iter()
            .map(|(p, s)| Ok((*p, partial_trace(s, keep)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CQEnsemble { items })
    }

    /// Dense cq state Σ p(u)|u⟩⟨u| ⊗ ρ_u with `label` as the classical register
    /// (first factor).
    pub fn to_cq_state(&self, label: &str) -> Result<DensityMatrix> {
        let k = self.items.len();
        let reg = SystemLayout::single(label, k)?;
        let layout = reg.concat(self.layout())?;
        check_dim(layout.total_dim())?;
        let d = self.layout().total_dim();
        let mut m = DMatrix::zeros(k * d, k * d);
        for (u, (p, s)) in self.items.iter().enumerate() {
            m.view_mut((u * d, u * d), (d, d))
                .copy_from(&(s.matrix() * C64::new(*p, 0.0)));
        }
        Ok(DensityMatrix::from_raw(layout, m))
    }
}

/// JSON state format: `{ "layout": [[label, dim], ...], "matrix": [[[re, im], ...], ...] }`.
#[derive(Serialize, Deserialize)]
pub(crate) struct StateJson {
    pub layout: SystemLayout,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub(crate) fn matrix_to_json(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub(crate) fn matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<C64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            layout: self.layout.clone(),
            matrix: matrix_to_json(&self.matrix),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(de)?;
        let m = matrix_from_json(&raw.matrix).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(raw.layout, m).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleItemJson {
    p: ProbJson,
    state: DensityMatrix,
}

/// A probability given either as a double or a rational string such as `"3/4"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProbJson {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    items: Vec<EnsembleItemJson>,
}

impl CQEnsemble {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: EnsembleJson = serde_json::from_str(text)?;
        let mut items = Vec::with_capacity(raw.items.len());
        for it in raw.items {
            let p = match it.p {
                ProbJson::Num(x) => x,
                ProbJson::Text(s) => crate::region::parse_rational(&s)
                    .map(|r| crate::region::rational_to_f64(&r))?,
            };
            items.push((p, it.state));
        }
        CQEnsemble::new(items)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = EnsembleJson {
            items: self
                .items
                .iter()
                .map(|(p, s)| EnsembleItemJson {
                    p: ProbJson::Num(*p),
                    state: s.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&raw)?)
    }
}
