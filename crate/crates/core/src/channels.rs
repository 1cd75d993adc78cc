//! Erasure, block erasure and degrading channels as Kraus families.
//!
//! The erasure flag `|⊥⟩` is the extra basis vector with index q of a
//! (q+1)-dimensional output factor. Inputs are labelled `A` (or `A1..An`),
//! outputs `B` (or `B1..Bn`).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::config::{check_dim, TOL_ALG};
use crate::error::{domain_err, Error, Result};
use crate::hilbert::{matrix_from_json, matrix_to_json, DensityMatrix, Placement, SystemLayout, C64};
use crate::region::{rational_to_f64, Rational};
use crate::sparse::{KrausFamily, Mixture, SparseOp, SparseVec};

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    input: SystemLayout,
    output: SystemLayout,
    family: KrausFamily,
}

impl KrausChannel {
    pub fn new(input: SystemLayout, output: SystemLayout, kraus: Vec<DMatrix<C64>>) -> Result<Self> {
        for k in &kraus {
            if k.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::State("Kraus operator has non-finite entries".into()));
            }
        }
        KrausChannel::from_sparse(input, output, kraus.iter().map(SparseOp::from_dense).collect())
    }

    /// Build from sparse operators, checking `Σ K†K = I`.
    pub fn from_sparse(input: SystemLayout, output: SystemLayout, ops: Vec<SparseOp>) -> Result<Self> {
        let family = KrausFamily::single_branch(input.total_dim(), output.total_dim(), ops)?;
        let err = family.completeness_error();
        if err > TOL_ALG {
            return Err(Error::State(format!("Kraus family is not trace preserving (error {err:e})")));
        }
        Ok(KrausChannel { input, output, family })
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        KrausChannel::from_sparse(layout.clone(), layout, vec![SparseOp::identity(d)]).expect("identity is trace preserving")
    }

    /// Completely depolarizing channel `ρ ↦ tr(ρ) I/d` on one factor.
    pub fn depolarizing(input: &str, output: &str, dim: usize) -> Result<Self> {
        let s = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let ops = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| SparseOp::from_triplets(dim, dim, vec![(i, j, s)])))
            .collect();
        KrausChannel::from_sparse(SystemLayout::single(input, dim)?, SystemLayout::single(output, dim)?, ops)
    }

    pub fn input_layout(&self) -> &SystemLayout {
        &self.input
    }

    pub fn output_layout(&self) -> &SystemLayout {
        &self.output
    }

    pub fn family(&self) -> &KrausFamily {
        &self.family
    }

    pub fn num_kraus(&self) -> usize {
        self.family.ops().len()
    }

    pub fn kraus(&self) -> Vec<DMatrix<C64>> {
        self.family.ops().iter().map(SparseOp::to_dense).collect()
    }

    pub fn with_labels<S: AsRef<str>>(&self, input: &[S], output: &[S]) -> Result<Self> {
        Ok(KrausChannel {
            input: self.input.relabel(input)?,
            output: self.output.relabel(output)?,
            family: self.family.clone(),
        })
    }

    /// `self ⊗ other` on the concatenated layouts.
    pub fn tensor(&self, other: &KrausChannel) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.num_kraus() * other.num_kraus());
        for a in self.family.ops() {
            for b in other.family.ops() {
                ops.push(a.kron(b));
            }
        }
        KrausChannel::from_sparse(self.input.concat(&other.input)?, self.output.concat(&other.output)?, ops)
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &KrausChannel) -> Result<Self> {
        if !self.output.same_shape(&after.input) {
            return Err(Error::Layout("composition needs matching output/input dimensions".into()));
        }
        let mut ops = Vec::new();
        for a in self.family.ops() {
            for b in after.family.ops() {
                let p = b.matmul(a)?;
                if p.nnz() > 0 {
                    ops.push(p);
                }
            }
        }
        KrausChannel::from_sparse(self.input.clone(), after.output.clone(), ops)
    }

    /// Convex combination `Σ p_i 𝒩_i` of channels with identical layouts.
    pub fn mixture(parts: &[(f64, &KrausChannel)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty channel mixture".into()))?.1;
        let mut ops = Vec::new();
        for &(p, ch) in parts {
            if p < 0.0 {
                return domain_err("mixture weights must be non-negative");
            }
            if ch.input != first.input || ch.output != first.output {
                return Err(Error::Layout("mixture of channels on different layouts".into()));
            }
            if p > 0.0 {
                let s = C64::new(p.sqrt(), 0.0);
                ops.extend(ch.family.ops().iter().map(|k| k.scaled(s)));
            }
        }
        KrausChannel::from_sparse(first.input.clone(), first.output.clone(), ops)
    }

    /// Apply to every vector of a sparse mixture, acting on the `on` factors.
    pub fn apply_mixture<S: AsRef<str>>(&self, m: &Mixture, on: &[S]) -> Result<Mixture> {
        m.apply(&self.family, on, &self.input, &self.output)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ChannelJson {
            input: self.input.clone(),
            output: self.output.clone(),
            kraus: self.kraus().iter().map(matrix_to_json).collect(),
        })
        .expect("channel JSON")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ChannelJson = serde_json::from_str(text)?;
        let kraus = raw.kraus.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(raw.input, raw.output, kraus)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    #[serde(rename = "in")]
    input: SystemLayout,
    #[serde(rename = "out")]
    output: SystemLayout,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Single-use q-ary erasure channel with erasure probability δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureSpec {
    pub q: usize,
    pub delta: Rational,
}

impl ErasureSpec {
    pub fn new(q: usize, delta: Rational) -> Result<Self> {
        if q < 2 {
            return domain_err(format!("alphabet size {q} must be at least 2"));
        }
        if delta.is_negative() || delta > Rational::one() {
            return domain_err(format!("erasure probability {delta} outside [0, 1]"));
        }
        Ok(ErasureSpec { q, delta })
    }
}

/// Erases exactly `w` of `n` q-ary factors, chosen uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockErasureSpec {
    pub q: usize,
    pub n: usize,
    pub w: usize,
}

impl BlockErasureSpec {
    pub fn new(q: usize, n: usize, w: usize) -> Result<Self> {
        if q < 2 || n == 0 {
            return domain_err("block erasure needs q ≥ 2 and n ≥ 1");
        }
        if w > n {
            return domain_err(format!("cannot erase {w} of {n} systems"));
        }
        Ok(BlockErasureSpec { q, n, w })
    }
}

pub fn input_layout(n: usize, q: usize) -> SystemLayout {
    SystemLayout::numbered("A", n, q)
}

pub fn output_layout(n: usize, q: usize) -> SystemLayout {
    SystemLayout::numbered("B", n, q + 1)
}

pub fn build_erasure(spec: &ErasureSpec) -> KrausChannel {
    let q = spec.q;
    let delta = rational_to_f64(&spec.delta);
    let keep = C64::new((1.0 - delta).sqrt(), 0.0);
    let lose = C64::new(delta.sqrt(), 0.0);
    let mut ops = Vec::new();
    if delta < 1.0 {
        ops.push(SparseOp::from_triplets(q + 1, q, (0..q).map(|i| (i, i, keep)).collect()));
    }
    if delta > 0.0 {
        for i in 0..q {
            ops.push(SparseOp::from_triplets(q + 1, q, vec![(q, i, lose)]));
        }
    }
    KrausChannel::from_sparse(
        SystemLayout::single("A", q).expect("label"),
        SystemLayout::single("B", q + 1).expect("label"),
        ops,
    )
    .expect("erasure channel is trace preserving")
}

/// All `k`-subsets of `items`, in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn digits_base(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
    d
}

fn index_base(d: &[usize], base: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * base + x)
}

/// Kraus operators erasing the factors in `erase` of an input whose flagged
/// factors are exactly `flags` (`source_base` = q for unflagged inputs,
/// q+1 for inputs that may already carry flags), each scaled by `scale`.
fn pattern_ops(q: usize, n: usize, flags: &[usize], erase: &[usize], source_base: usize, scale: f64) -> Vec<SparseOp> {
    let free: Vec<usize> = (0..n).filter(|j| !flags.contains(j) && !erase.contains(j)).collect();
    let in_dim = source_base.pow(n as u32);
    let out_dim = (q + 1).pow(n as u32);
    let s = C64::new(scale, 0.0);
    let mut ops = Vec::with_capacity(q.pow(erase.len() as u32));
    for assign in 0..q.pow(erase.len() as u32) {
        let a = digits_base(assign, q, erase.len());
        let mut triplets = Vec::with_capacity(q.pow(free.len() as u32));
        for rest in 0..q.pow(free.len() as u32) {
            let r = digits_base(rest, q, free.len());
            let mut x = vec![q; n];
            for (k, &j) in erase.iter().enumerate() {
                x[j] = a[k];
            }
            for (k, &j) in free.iter().enumerate() {
                x[j] = r[k];
            }
            let mut y = x.clone();
            for &j in erase {
                y[j] = q;
            }
            triplets.push((index_base(&y, q + 1), index_base(&x, source_base), s));
        }
        ops.push(SparseOp::from_triplets(out_dim, in_dim, triplets));
    }
    ops
}

/// Block erasure channel `A1..An → B1..Bn` erasing a uniform `w`-subset.
pub fn build_block_erasure(spec: &BlockErasureSpec) -> Result<KrausChannel> {
    let BlockErasureSpec { q, n, w } = *spec;
    if w > n {
        return domain_err(format!("cannot erase {w} of {n} systems"));
    }
    let scale = 1.0 / (binomial(n, w) as f64).sqrt();
    let all: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    for j in subsets(&all, w) {
        ops.extend(pattern_ops(q, n, &[], &j, q, scale));
    }
    KrausChannel::from_sparse(input_layout(n, q), output_layout(n, q), ops)
}

/// Degrading map on `B1..Bn`: reads the flag pattern and erases a uniformly
/// random set of `v − w` further factors. Inputs with a flag pattern of
/// another size erase `min(v − w, unflagged)` factors.
pub fn build_degrading(q: usize, n: usize, w: usize, v: usize) -> Result<KrausChannel> {
    if w > v || v > n {
        return domain_err(format!("degrading map needs w ≤ v ≤ n, got w={w}, v={v}, n={n}"));
    }
    let layout = output_layout(n, q);
    if v == w {
        return Ok(KrausChannel::identity(layout));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    for f_size in 0..=n {
        for flags in subsets(&all, f_size) {
            let open: Vec<usize> = (0..n).filter(|j| !flags.contains(j)).collect();
            let r = (v - w).min(open.len());
            let scale = 1.0 / (binomial(open.len(), r) as f64).sqrt();
            for k in subsets(&open, r) {
                ops.extend(pattern_ops(q, n, &flags, &k, q + 1, scale));
            }
        }
    }
    KrausChannel::from_sparse(layout.clone(), layout, ops)
}

/// `ℰ_{q,δ}^{⊗n}` labelled `A1..An → B1..Bn`.
pub fn build_iid_erasure(q: usize, delta: &Rational, n: usize) -> Result<KrausChannel> {
    let single = build_erasure(&ErasureSpec::new(q, delta.clone())?);
    let mut ch = single.with_labels(&["A1"], &["B1"])?;
    for i in 2..=n {
        ch = ch.tensor(&single.with_labels(&[format!("A{i}")], &[format!("B{i}")])?)?;
    }
    Ok(ch)
}

/// Binomial weight `C(n,v) δ^v (1−δ)^(n−v)` of the block erasure channel
/// with `v` erasures in the decomposition of `ℰ_{q,δ}^{⊗n}`.
pub fn iid_mixture_weights(n: usize, delta: &Rational, v: usize) -> Rational {
    if v > n {
        return Rational::zero();
    }
    let c = Rational::from_integer(BigInt::from(binomial(n, v)));
    let one = Rational::one();
    c * num_traits::pow(delta.clone(), v) * num_traits::pow(&one - delta, n - v)
}

/// `Σ K ρ K†` on the `on` factors of `s`.
pub fn apply<S: AsRef<str>>(ch: &KrausChannel, s: &DensityMatrix, on: &[S]) -> Result<DensityMatrix> {
    let sub = s.layout().select(&s.layout().positions(on)?);
    if !sub.same_shape(&ch.input) {
        return Err(Error::Layout(format!(
            "channel expects input dims {:?}, got {:?}",
            ch.input.dims(),
            sub.dims()
        )));
    }
    let place = Placement::new(s.layout(), on, &ch.input.dims(), &ch.output)?;
    let out_layout = place.output_layout().clone();
    let dout = out_layout.total_dim();
    check_dim(dout)?;
    let rest = place.rest_dim();
    let tdim = place.target_dim();
    let mut g_index = vec![0usize; tdim * rest];
    for t in 0..tdim {
        for r in 0..rest {
            g_index[t * rest + r] = place.join_input(t, r);
        }
    }
    let mut o_index = vec![0usize; ch.output.total_dim() * rest];
    for o in 0..ch.output.total_dim() {
        for r in 0..rest {
            o_index[o * rest + r] = place.join(o, r);
        }
    }
    let rho = s.matrix();
    let mut out = DMatrix::<C64>::zeros(dout, dout);
    for k in ch.family.ops() {
        let e = k.entries();
        for &(t1, o1, v1) in e {
            for &(t2, o2, v2) in e {
                let f = v1 * v2.conj();
                for r1 in 0..rest {
                    let gi = g_index[t1 * rest + r1];
                    let oi = o_index[o1 * rest + r1];
                    for r2 in 0..rest {
                        let x = rho[(gi, g_index[t2 * rest + r2])];
                        if x != C64::new(0.0, 0.0) {
                            out[(oi, o_index[o2 * rest + r2])] += f * x;
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_raw(out_layout, out))
}

/// Choi state as a sparse mixture on `ref:<input labels>` ⊗ output.
pub fn choi_mixture(ch: &KrausChannel) -> Mixture {
    let din = ch.input.total_dim();
    let dout = ch.output.total_dim();
    let norm = C64::new(1.0 / (din as f64).sqrt(), 0.0);
    let layout = ch.input.prefixed("ref:").concat(&ch.output).expect("distinct labels");
    let vectors = ch
        .family
        .ops()
        .iter()
        .map(|k| SparseVec::from_pairs(k.entries().iter().map(|&(c, r, v)| (c * dout + r, v * norm)).collect()))
        .collect();
    Mixture::new(layout, vectors)
}

/// `(id ⊗ 𝒩)(Φ)` with Φ maximally entangled on two copies of the input.
pub fn choi(ch: &KrausChannel) -> Result<DensityMatrix> {
    let m = choi_mixture(ch);
    Ok(DensityMatrix::from_raw(m.layout().clone(), m.to_dense()?))
}

/// Largest entrywise difference between two Choi matrices.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if !a.input.same_shape(&b.input) || !a.output.same_shape(&b.output) {
        return Err(Error::Layout("channels have different shapes".into()));
    }
    Ok((choi(a)?.matrix() - choi(b)?.matrix()).camax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{entropy, partial_trace, trace_distance};
    use crate::region::rat;

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
        (a - b).camax() < 1e-12
    }

    #[test]
    fn erasure_examples() {
        let e0 = build_erasure(&ErasureSpec::new(2, rat(0, 1)).unwrap());
        let rho = DensityMatrix::maximally_mixed(SystemLayout::single("A", 2).unwrap());
        let out = apply(&e0, &rho, &["A"]).unwrap();
        assert!((out.matrix()[(2, 2)].re).abs() < 1e-15);
        let e1 = build_erasure(&ErasureSpec::new(3, rat(1, 1)).unwrap());
        let r3 = DensityMatrix::basis(SystemLayout::single("A", 3).unwrap(), &[1]).unwrap();
        let out = apply(&e1, &r3, &["A"]).unwrap();
        assert!((out.matrix()[(3, 3)].re - 1.0).abs() < 1e-15);
        let eh = build_erasure(&ErasureSpec::new(2, rat(1, 2)).unwrap());
        let out = apply(&eh, &rho, &["A"]).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.25, 0.0),
            C64::new(0.25, 0.0),
            C64::new(0.5, 0.0),
        ]));
        assert!(close(out.matrix(), &want));
        assert_eq!(out.layout().labels(), vec!["B"]);
    }

    #[test]
    fn erasure_on_half_of_phi() {
        let phi = DensityMatrix::maximally_entangled("R", "A", 3).unwrap();
        let ch = build_erasure(&ErasureSpec::new(3, rat(1, 2)).unwrap());
        let out = apply(&ch, &phi, &["A"]).unwrap();
        assert_eq!(out.layout().labels(), vec!["R", "B"]);
        // ½ Φ (embedded) + ½ I/3 ⊗ |⊥⟩⟨⊥|
        let mut want = DMatrix::<C64>::zeros(12, 12);
        for i in 0..3 {
            for j in 0..3 {
                want[(i * 4 + i, j * 4 + j)] += C64::new(0.5 / 3.0, 0.0);
            }
            want[(i * 4 + 3, i * 4 + 3)] += C64::new(0.5 / 3.0, 0.0);
        }
        assert!(close(out.matrix(), &want));
    }

    #[test]
    fn block_erasure_examples() {
        let id = build_block_erasure(&BlockErasureSpec::new(2, 1, 0).unwrap()).unwrap();
        let rho = DensityMatrix::maximally_mixed(SystemLayout::single("A1", 2).unwrap());
        let out = apply(&id, &rho, &["A1"]).unwrap();
        assert!((out.matrix()[(2, 2)].re).abs() < 1e-15);
        let all = build_block_erasure(&BlockErasureSpec::new(2, 3, 3).unwrap()).unwrap();
        let s = DensityMatrix::maximally_mixed(input_layout(3, 2));
        let out = apply(&all, &s, &["A1", "A2", "A3"]).unwrap();
        let last = out.dim() - 1;
        assert!((out.matrix()[(last, last)].re - 1.0).abs() < 1e-14);
        assert!(BlockErasureSpec::new(2, 2, 3).is_err());
    }

    #[test]
    fn block_erasure_product_input() {
        let l = input_layout(2, 2);
        let s = DensityMatrix::basis(l, &[0, 1]).unwrap();
        let ch = build_block_erasure(&BlockErasureSpec::new(2, 2, 1).unwrap()).unwrap();
        let out = apply(&ch, &s, &["A1", "A2"]).unwrap();
        // ½ |⊥⟩⟨⊥| ⊗ |1⟩⟨1| + ½ |0⟩⟨0| ⊗ |⊥⟩⟨⊥|, basis base 3
        let mut want = DMatrix::<C64>::zeros(9, 9);
        want[(2 * 3 + 1, 2 * 3 + 1)] = C64::new(0.5, 0.0);
        want[(2, 2)] = C64::new(0.5, 0.0);
        assert!(close(out.matrix(), &want));
        assert!((out.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_marginal_trace() {
        let l = SystemLayout::new([("A1", 2), ("A2", 2), ("C", 2)]).unwrap();
        let mut v = nalgebra::DVector::<C64>::zeros(8);
        v[0] = C64::new(0.5f64.sqrt(), 0.0);
        v[7] = C64::new(0.5f64.sqrt(), 0.0);
        let ghz = DensityMatrix::pure(l, &v).unwrap();
        let ch = build_block_erasure(&BlockErasureSpec::new(2, 2, 1).unwrap()).unwrap();
        let out = apply(&ch, &ghz, &["A1", "A2"]).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_rejects_wrong_layout() {
        let ch = build_erasure(&ErasureSpec::new(3, rat(1, 2)).unwrap());
        let rho = DensityMatrix::maximally_mixed(SystemLayout::single("A", 2).unwrap());
        assert!(matches!(apply(&ch, &rho, &["A"]), Err(Error::Layout(_))));
    }

    #[test]
    fn choi_examples() {
        let id = KrausChannel::identity(SystemLayout::single("A", 2).unwrap());
        let c = choi(&id).unwrap();
        let phi = DensityMatrix::maximally_entangled("x", "y", 2).unwrap();
        assert!(close(c.matrix(), phi.matrix()));
        let dep = KrausChannel::depolarizing("A", "B", 2).unwrap();
        assert!(close(choi(&dep).unwrap().matrix(), &(DMatrix::identity(4, 4) * C64::new(0.25, 0.0))));
        let e = build_erasure(&ErasureSpec::new(2, rat(1, 2)).unwrap());
        let c = choi(&e).unwrap();
        assert!((c.trace() - 1.0).abs() < 1e-14);
        assert_eq!(c.eigenvalues().iter().filter(|&&x| x > 1e-12).count(), 3);
    }

    #[test]
    fn weights() {
        assert_eq!(iid_mixture_weights(2, &rat(1, 2), 1), rat(1, 2));
        assert_eq!(iid_mixture_weights(3, &rat(1, 4), 0), rat(27, 64));
        let total: Rational = (0..=5).map(|v| iid_mixture_weights(5, &rat(2, 7), v)).sum();
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn degrading_identity_small() {
        for (n, w, v) in [(2, 0, 1), (3, 1, 2), (2, 1, 1)] {
            let ew = build_block_erasure(&BlockErasureSpec::new(2, n, w).unwrap()).unwrap();
            let ev = build_block_erasure(&BlockErasureSpec::new(2, n, v).unwrap()).unwrap();
            let d = build_degrading(2, n, w, v).unwrap();
            assert!(choi_distance(&ew.then(&d).unwrap(), &ev).unwrap() < 1e-12);
        }
        assert!(build_degrading(2, 3, 2, 1).is_err());
    }

    #[test]
    fn sparse_and_dense_application_agree() {
        let ch = build_block_erasure(&BlockErasureSpec::new(2, 2, 1).unwrap()).unwrap();
        let l = SystemLayout::new([("R", 2), ("A1", 2), ("A2", 2)]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let s = crate::hilbert::random_mixed(&l, 2, &mut rng).unwrap();
        let dense = apply(&ch, &s, &["A1", "A2"]).unwrap();
        let sparse = ch.apply_mixture(&Mixture::from_density(&s), &["A1", "A2"]).unwrap();
        assert!(close(&sparse.to_dense().unwrap(), dense.matrix()));
        let r = partial_trace(&dense, &["R"]).unwrap();
        assert!((entropy(&r).unwrap() - entropy(&partial_trace(&s, &["R"]).unwrap()).unwrap()).abs() < 1e-10);
        assert!(trace_distance(&r, &partial_trace(&s, &["R"]).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let e = build_erasure(&ErasureSpec::new(2, rat(1, 3)).unwrap());
        let back = KrausChannel::from_json(&e.to_json().to_string()).unwrap();
        assert!(choi_distance(&e, &back).unwrap() < 1e-15);
    }
}
