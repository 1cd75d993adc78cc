//! Sparse vectors, sparse operators and low-rank mixtures.
//!
//! Large code simulations never form dense matrices on the channel space: a
//! state is a list of unnormalized sparse vectors `ψ_k` standing for
//! `Σ_k |ψ_k⟩⟨ψ_k|`, and operators are stored as sorted (column, row, value)
//! triplets. Spectra of such mixtures are computed per connected component of
//! the supports, via the Gram matrix when that is smaller.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::config::check_dim;
use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigenvalues, spectrum_entropy, DensityMatrix, Placement, SystemLayout, C64};

/// Amplitudes with squared modulus below this are dropped.
const PRUNE: f64 = 1e-30;

/// Sparse complex vector with sorted, distinct indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    entries: Vec<(usize, C64)>,
}

impl SparseVec {
    pub fn from_pairs(mut pairs: Vec<(usize, C64)>) -> Self {
        pairs.sort_unstable_by_key(|p| p.0);
        let mut entries: Vec<(usize, C64)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| v.norm_sqr() > PRUNE);
        SparseVec { entries }
    }

    pub fn basis(index: usize) -> Self {
        SparseVec {
            entries: vec![(index, C64::new(1.0, 0.0))],
        }
    }

    pub fn from_dense(v: &DVector<C64>) -> Self {
        SparseVec::from_pairs(v.iter().copied().enumerate().collect())
    }

    pub fn to_dense(&self, dim: usize) -> DVector<C64> {
        let mut v = DVector::zeros(dim);
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    pub fn entries(&self) -> &[(usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|&(i, v)| (i, v * c)).collect())
    }

    /// ⟨self|other⟩.
    pub fn dot(&self, other: &SparseVec) -> C64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = C64::new(0.0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i].0, other.entries[j].0);
            if a == b {
                acc += self.entries[i].1.conj() * other.entries[j].1;
                i += 1;
                j += 1;
            } else if a < b {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    /// Re-index every entry through `f` (which must be injective).
    pub fn reindexed(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|&(i, v)| (f(i), v)).collect())
    }
}

/// Sparse complex matrix stored as (column, row, value), sorted by column then row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, C64)>) -> Self {
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().map(|(r, c, v)| (c, r, v)).collect();
        t.sort_unstable_by_key(|e| (e.0, e.1));
        let mut entries: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
        for (c, r, v) in t {
            debug_assert!(r < rows && c < cols);
            match entries.last_mut() {
                Some((c0, r0, acc)) if *c0 == c && *r0 == r => *acc += v,
                _ => entries.push((c, r, v)),
            }
        }
        entries.retain(|e| e.2.norm_sqr() > PRUNE);
        SparseOp { rows, cols, entries }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut t = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                t.push((r, c, m[(r, c)]));
            }
        }
        SparseOp::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn identity(n: usize) -> Self {
        SparseOp {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(c, r, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// (column, row, value) triplets sorted by column.
    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// Entries of column `c`.
    pub fn column(&self, c: usize) -> &[(usize, usize, C64)] {
        let lo = self.entries.partition_point(|e| e.0 < c);
        let hi = self.entries.partition_point(|e| e.0 <= c);
        &self.entries[lo..hi]
    }

    pub fn columns_touched(&self) -> impl Iterator<Item = usize> + '_ {
        let mut last = None;
        self.entries.iter().filter_map(move |e| {
            if last == Some(e.0) {
                None
            } else {
                last = Some(e.0);
                Some(e.0)
            }
        })
    }

    pub fn scaled(&self, s: C64) -> SparseOp {
        SparseOp {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&(c, r, v)| (c, r, v * s)).collect(),
        }
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp::from_triplets(
            self.cols,
            self.rows,
            self.entries.iter().map(|&(c, r, v)| (c, r, v.conj())).collect(),
        )
    }

    /// `self * other`.
    pub fn matmul(&self, other: &SparseOp) -> Result<SparseOp> {
        if self.cols != other.rows {
            return Err(Error::Layout(format!(
                "operator product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut t = Vec::new();
        for &(c, k, b) in &other.entries {
            for &(_, r, a) in self.column(k) {
                t.push((r, c, a * b));
            }
        }
        Ok(SparseOp::from_triplets(self.rows, other.cols, t))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseOp) -> SparseOp {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for &(c1, r1, a) in &self.entries {
            for &(c2, r2, b) in &other.entries {
                t.push((r1 * other.rows + r2, c1 * other.cols + c2, a * b));
            }
        }
        SparseOp::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for &(i, x) in v.entries() {
            for &(_, r, a) in self.column(i) {
                out.push((r, a * x));
            }
        }
        SparseVec::from_pairs(out)
    }
}

/// Kraus operators grouped into classical outcomes ("branches").
///
/// A channel is a family with one branch. Families with many operators keep a
/// lazily built column index so that applying them to a sparse vector only
/// touches operators that can act on its support.
#[derive(Clone, Debug)]
pub struct KrausFamily {
    in_dim: usize,
    out_dim: usize,
    ops: Vec<SparseOp>,
    branch: Vec<usize>,
    n_branches: usize,
    index: OnceLock<HashMap<usize, Vec<u32>>>,
}

const INDEX_THRESHOLD: usize = 64;

impl KrausFamily {
    pub fn new(in_dim: usize, out_dim: usize, branches: Vec<Vec<SparseOp>>) -> Result<Self> {
        let n_branches = branches.len();
        let mut ops = Vec::new();
        let mut branch = Vec::new();
        for (b, list) in branches.into_iter().enumerate() {
            for op in list {
                if op.rows != out_dim || op.cols != in_dim {
                    return Err(Error::Layout(format!(
                        "Kraus operator is {}x{}, expected {out_dim}x{in_dim}",
                        op.rows, op.cols
                    )));
                }
                ops.push(op);
                branch.push(b);
            }
        }
        Ok(KrausFamily {
            in_dim,
            out_dim,
            ops,
            branch,
            n_branches,
            index: OnceLock::new(),
        })
    }

    pub fn single_branch(in_dim: usize, out_dim: usize, ops: Vec<SparseOp>) -> Result<Self> {
        KrausFamily::new(in_dim, out_dim, vec![ops])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn n_branches(&self) -> usize {
        self.n_branches
    }

    pub fn ops(&self) -> &[SparseOp] {
        &self.ops
    }

    pub fn branch_of(&self, op: usize) -> usize {
        self.branch[op]
    }

    pub fn branch_ops(&self, b: usize) -> impl Iterator<Item = &SparseOp> + '_ {
        self.ops
            .iter()
            .zip(&self.branch)
            .filter(move |(_, &bb)| bb == b)
            .map(|(op, _)| op)
    }

    /// Operators grouped per branch.
    pub fn branches(&self) -> Vec<Vec<SparseOp>> {
        let mut out = vec![Vec::new(); self.n_branches];
        for (op, &b) in self.ops.iter().zip(&self.branch) {
            out[b].push(op.clone());
        }
        out
    }

    /// Merge every branch into one (forgetting the outcome).
    pub fn merged(&self) -> KrausFamily {
        KrausFamily::single_branch(self.in_dim, self.out_dim, self.ops.clone()).expect("same shapes")
    }

    fn column_index(&self) -> &HashMap<usize, Vec<u32>> {
        self.index.get_or_init(|| {
            let mut idx: HashMap<usize, Vec<u32>> = HashMap::new();
            for (k, op) in self.ops.iter().enumerate() {
                for c in op.columns_touched() {
                    idx.entry(c).or_default().push(k as u32);
                }
            }
            idx
        })
    }

    /// Sorted ids of operators with a nonzero entry in one of `cols`.
    pub fn touching(&self, cols: impl IntoIterator<Item = usize>) -> Vec<usize> {
        if self.ops.len() <= INDEX_THRESHOLD {
            return (0..self.ops.len()).collect();
        }
        let idx = self.column_index();
        let mut out: Vec<usize> = cols
            .into_iter()
            .filter_map(|c| idx.get(&c))
            .flat_map(|v| v.iter().map(|&k| k as usize))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest entry of `Σ K†K − I` (over all branches).
    pub fn completeness_error(&self) -> f64 {
        let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
        for op in &self.ops {
            let mut by_row: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
            for &(c, r, v) in op.entries() {
                by_row.entry(r).or_default().push((c, v));
            }
            for list in by_row.values() {
                for &(c1, v1) in list {
                    for &(c2, v2) in list {
                        *acc.entry((c1, c2)).or_insert(C64::new(0.0, 0.0)) += v1.conj() * v2;
                    }
                }
            }
        }
        let mut err: f64 = 0.0;
        for (&(c1, c2), v) in &acc {
            let target = if c1 == c2 { 1.0 } else { 0.0 };
            err = err.max((v - C64::new(target, 0.0)).norm());
        }
        for c in 0..self.in_dim {
            if !acc.contains_key(&(c, c)) {
                err = err.max(1.0);
            }
        }
        err
    }

    /// Apply the family on the `targets` factors of every vector of a mixture,
    /// returning the output layout and (branch, vector) pairs with nonzero norm.
    pub fn apply_to_vectors<S: AsRef<str>>(
        &self,
        layout: &SystemLayout,
        targets: &[S],
        in_layout: &SystemLayout,
        out_layout: &SystemLayout,
        vectors: &[SparseVec],
    ) -> Result<(SystemLayout, Vec<(usize, SparseVec)>)> {
        let place = Placement::new(layout, targets, &in_layout.dims(), out_layout)?;
        let mut out = Vec::new();
        for v in vectors {
            let split: Vec<(usize, usize, C64)> = v
                .entries()
                .iter()
                .map(|&(g, x)| {
                    let (t, r) = place.split(g);
                    (t, r, x)
                })
                .collect();
            for k in self.touching(split.iter().map(|s| s.0)) {
                let op = &self.ops[k];
                let mut pairs = Vec::new();
                for &(t, r, x) in &split {
                    for &(_, o, a) in op.column(t) {
                        pairs.push((place.join(o, r), a * x));
                    }
                }
                let w = SparseVec::from_pairs(pairs);
                if !w.is_zero() {
                    out.push((self.branch[k], w));
                }
            }
        }
        Ok((place.output_layout().clone(), out))
    }
}

/// `Σ_k |ψ_k⟩⟨ψ_k|` over a layout, with sparse unnormalized `ψ_k`.
#[derive(Clone, Debug)]
pub struct Mixture {
    layout: SystemLayout,
    vectors: Vec<SparseVec>,
}

impl Mixture {
    pub fn new(layout: SystemLayout, vectors: Vec<SparseVec>) -> Self {
        let vectors = vectors.into_iter().filter(|v| !v.is_zero()).collect();
        Mixture { layout, vectors }
    }

    pub fn pure(layout: SystemLayout, v: SparseVec) -> Self {
        Mixture::new(layout, vec![v])
    }

    /// Eigen-decomposition of a dense state into a mixture (eigenvalues below
    /// `1e-15` dropped).
    pub fn from_density(s: &DensityMatrix) -> Self {
        let eig = s.matrix().clone().symmetric_eigen();
        let mut vectors = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 1e-15 {
                let col = eig.eigenvectors.column(k).into_owned() * C64::new(lam.sqrt(), 0.0);
                vectors.push(SparseVec::from_dense(&col));
            }
        }
        Mixture::new(s.layout().clone(), vectors)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<SparseVec> {
        self.vectors
    }

    pub fn trace(&self) -> f64 {
        self.vectors.iter().map(SparseVec::norm_sqr).sum()
    }

    pub fn scaled(&self, p: f64) -> Mixture {
        let s = C64::new(p.sqrt(), 0.0);
        Mixture::new(self.layout.clone(), self.vectors.iter().map(|v| v.scaled(s)).collect())
    }

    /// Sum of two mixtures on the same layout.
    pub fn extend(&mut self, other: Mixture) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::Layout("adding mixtures on different layouts".into()));
        }
        self.vectors.extend(other.vectors);
        Ok(())
    }

    /// Apply every operator of `family` on `targets` and sum all branches.
    pub fn apply<S: AsRef<str>>(
        &self,
        family: &KrausFamily,
        targets: &[S],
        in_layout: &SystemLayout,
        out_layout: &SystemLayout,
    ) -> Result<Mixture> {
        let (layout, out) = family.apply_to_vectors(&self.layout, targets, in_layout, out_layout, &self.vectors)?;
        Ok(Mixture::new(layout, out.into_iter().map(|(_, v)| v).collect()))
    }

    /// Reduced mixture on `keep` (kept factors stay in layout order).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Mixture> {
        let mut keep_pos = self.layout.positions(keep)?;
        keep_pos.sort_unstable();
        let traced: Vec<&str> = (0..self.layout.len())
            .filter(|p| !keep_pos.contains(p))
            .map(|p| self.layout.parts()[p].0.as_str())
            .collect();
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let traced_layout = self.layout.select(
            &(0..self.layout.len()).filter(|p| !keep_pos.contains(p)).collect::<Vec<_>>(),
        );
        let place = Placement::new(&self.layout, &traced, &traced_layout.dims(), &SystemLayout::empty())?;
        let mut vectors = Vec::new();
        for v in &self.vectors {
            let mut groups: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
            for &(g, x) in v.entries() {
                let (t, r) = place.split(g);
                groups.entry(t).or_default().push((r, x));
            }
            let mut keys: Vec<usize> = groups.keys().copied().collect();
            keys.sort_unstable();
            for t in keys {
                vectors.push(SparseVec::from_pairs(groups.remove(&t).unwrap()));
            }
        }
        Ok(Mixture::new(place.output_layout().clone(), vectors))
    }

    /// Eigenvalues (nonzero part of the spectrum plus possibly some zeros).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.vectors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (k, v) in self.vectors.iter().enumerate() {
            for &(i, _) in v.entries() {
                match owner.get(&i) {
                    Some(&o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, k));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                    None => {
                        owner.insert(i, k);
                    }
                }
            }
        }
        let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
        for k in 0..n {
            let r = find(&mut parent, k);
            comps.entry(r).or_default().push(k);
        }
        let mut eig = Vec::new();
        let mut roots: Vec<usize> = comps.keys().copied().collect();
        roots.sort_unstable();
        for root in roots {
            let members = &comps[&root];
            if members.len() == 1 {
                eig.push(self.vectors[members[0]].norm_sqr());
                continue;
            }
            let mut support: Vec<usize> = members
                .iter()
                .flat_map(|&k| self.vectors[k].entries().iter().map(|e| e.0))
                .collect();
            support.sort_unstable();
            support.dedup();
            let m = members.len();
            if m <= support.len() {
                check_dim(m)?;
                let g = DMatrix::from_fn(m, m, |i, j| {
                    self.vectors[members[i]].dot(&self.vectors[members[j]])
                });
                eig.extend(hermitian_eigenvalues(&g));
            } else {
                check_dim(support.len())?;
                let pos: HashMap<usize, usize> =
                    support.iter().enumerate().map(|(a, &b)| (b, a)).collect();
                let s = support.len();
                let mut rho = DMatrix::zeros(s, s);
                for &k in members {
                    let e = self.vectors[k].entries();
                    for &(i, x) in e {
                        for &(j, y) in e {
                            rho[(pos[&i], pos[&j])] += x * y.conj();
                        }
                    }
                }
                eig.extend(hermitian_eigenvalues(&rho));
            }
        }
        Ok(eig)
    }

    /// Von Neumann entropy (bits) of the mixture as given (not renormalized).
    pub fn entropy(&self) -> Result<f64> {
        spectrum_entropy(&self.spectrum()?)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let d = self.layout.total_dim();
        check_dim(d)?;
        let mut m = DMatrix::zeros(d, d);
        for v in &self.vectors {
            let e = v.entries();
            for &(i, x) in e {
                for &(j, y) in e {
                    m[(i, j)] += x * y.conj();
                }
            }
        }
        Ok(m)
    }

    /// Dense density matrix (requires unit trace).
    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.layout.clone(), self.to_dense()?)
    }

    /// Reorder factors to the given label order.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Mixture> {
        let pos = self.layout.positions(order)?;
        if pos.len() != self.layout.len() {
            return Err(Error::Layout("permute needs every label exactly once".into()));
        }
        let new_layout = self.layout.select(&pos);
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                v.reindexed(|g| {
                    let d = self.layout.digits(g);
                    new_layout.index(&pos.iter().map(|&p| d[p]).collect::<Vec<_>>())
                })
            })
            .collect();
        Ok(Mixture::new(new_layout, vectors))
    }
}
