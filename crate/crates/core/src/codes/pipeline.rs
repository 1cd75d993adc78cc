//! Exact simulation of the pipeline Γ → Ω → Ω̄ → Γ̄ by sparse trajectories.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use super::{labels, EACQCode};
use crate::channels::{build_block_erasure, BlockErasureSpec, KrausChannel};
use crate::config::{check_dim, TOL_ALG};
use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigenvalues, DensityMatrix, Placement, SystemLayout, C64};
use crate::sparse::{Mixture, SparseOp, SparseVec};

/// A classical–quantum state: one unnormalized mixture per value of the
/// classical registers. Classical registers are diagonal by construction.
#[derive(Clone, Debug)]
pub struct CqState {
    classical: Vec<(String, usize)>,
    layout: SystemLayout,
    blocks: BTreeMap<Vec<usize>, Vec<SparseVec>>,
}

impl CqState {
    fn new(classical: Vec<(String, usize)>, layout: SystemLayout) -> Self {
        CqState {
            classical,
            layout,
            blocks: BTreeMap::new(),
        }
    }

    fn push(&mut self, key: Vec<usize>, v: SparseVec) {
        self.blocks.entry(key).or_default().push(v);
    }

    pub fn classical(&self) -> &[(String, usize)] {
        &self.classical
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn keys(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.blocks.keys()
    }

    /// Unnormalized quantum block for one classical value (empty if absent).
    pub fn block(&self, key: &[usize]) -> Mixture {
        Mixture::new(self.layout.clone(), self.blocks.get(key).cloned().unwrap_or_default())
    }

    pub fn trace(&self) -> f64 {
        self.blocks.values().flatten().map(SparseVec::norm_sqr).sum()
    }

    /// Dense density matrix with the classical registers as leading factors.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let cdims: Vec<usize> = self.classical.iter().map(|c| c.1).collect();
        let qd = self.layout.total_dim();
        let total = cdims.iter().product::<usize>() * qd;
        check_dim(total)?;
        let mut m = DMatrix::<C64>::zeros(total, total);
        for (key, vecs) in &self.blocks {
            let offset = key.iter().zip(&cdims).fold(0, |acc, (&k, &d)| acc * d + k) * qd;
            for v in vecs {
                for &(i, a) in v.entries() {
                    for &(j, b) in v.entries() {
                        m[(offset + i, offset + j)] += a * b.conj();
                    }
                }
            }
        }
        let mut parts: Vec<(String, usize)> = self.classical.clone();
        parts.extend(self.layout.parts().iter().cloned());
        DensityMatrix::new(SystemLayout::new(parts)?, m)
    }
}

/// The four snapshots, the error and the recorded side-message statistics.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub gamma: CqState,
    pub omega: CqState,
    pub omega_bar: CqState,
    pub gamma_bar: CqState,
    pub epsilon: f64,
    /// `p_v_given_m[m][v]`.
    pub p_v_given_m: Vec<Vec<f64>>,
    /// Probability that the decoded message is wrong.
    pub message_error: f64,
}

impl PipelineResult {
    /// JSON report: error, resource accounting and (when exact) the
    /// normalized net triple.
    pub fn report(&self, code: &EACQCode, q: usize) -> Result<Value> {
        let rates = code.rates(self.epsilon)?;
        let (c, qq, e) = rates.net();
        let triple = code.normalized_triple(q).ok().map(|t| t.to_strings());
        Ok(json!({
            "code": code.name(),
            "params": code.params(),
            "epsilon": self.epsilon,
            "message_error": self.message_error,
            "rates_bits": rates,
            "net_bits": [c, qq, e],
            "units": "logq",
            "q": q,
            "triple": triple,
        }))
    }
}

/// Apply one operator through a placement.
pub(crate) fn apply_op(place: &Placement, op: &SparseOp, v: &SparseVec) -> SparseVec {
    let mut pairs = Vec::new();
    for &(g, x) in v.entries() {
        let (t, r) = place.split(g);
        for &(_, o, a) in op.column(t) {
            pairs.push((place.join(o, r), a * x));
        }
    }
    SparseVec::from_pairs(pairs)
}

/// Γ for one message: `Φ^{RX} ⊗ φ_i` on [R, X, TA, TB].
fn initial_vector(code: &EACQCode) -> (SystemLayout, SparseVec) {
    let r = code.registers();
    let layout = SystemLayout::new([
        (labels::R, r.x),
        (labels::X, r.x),
        (labels::TA, r.ta),
        (labels::TB, r.tb),
    ])
    .expect("fixed labels");
    let (_, phi) = code.phi_i().top_eigenvector();
    let t = r.ta * r.tb;
    let s = 1.0 / (r.x as f64).sqrt();
    let mut pairs = Vec::new();
    for j in 0..r.x {
        for (k, &a) in phi.iter().enumerate() {
            pairs.push(((j * r.x + j) * t + k, a * s));
        }
    }
    (layout, SparseVec::from_pairs(pairs))
}

fn relabeled_channel(code: &EACQCode, channel: &KrausChannel) -> Result<KrausChannel> {
    let r = code.registers();
    if !channel.input_layout().same_shape(&r.a) {
        return Err(Error::Layout(format!(
            "channel input dims {:?} differ from the code's A dims {:?}",
            channel.input_layout().dims(),
            r.a.dims()
        )));
    }
    if !channel.output_layout().same_shape(&r.b) {
        return Err(Error::Layout(format!(
            "channel output dims {:?} differ from the code's B dims {:?}",
            channel.output_layout().dims(),
            r.b.dims()
        )));
    }
    channel.with_labels(&r.a.labels(), &r.b.labels())
}

/// Run every message through encoder, channel and decoder.
///
/// ε = ½‖Γ̄^{MM̂RX̂T_A′T_B′} − Φ̄^{MM̂} ⊗ Φ^{RX̂} ⊗ φ_f‖₁, which splits into
/// the diagonal blocks m̂ = m (compared with Φ ⊗ φ_f / |M|) plus the trace
/// of the blocks m̂ ≠ m.
pub fn simulate(code: &EACQCode, channel: &KrausChannel) -> Result<PipelineResult> {
    let regs = code.registers();
    let ch = relabeled_channel(code, channel)?;
    let a_labels = regs.a.labels();
    let mut dec_targets: Vec<&str> = regs.b.labels();
    dec_targets.extend([labels::W, labels::TB]);

    let out_layout = SystemLayout::new([
        (labels::R, regs.x),
        (labels::X_HAT, regs.x),
        (labels::TA_OUT, regs.ta_out),
        (labels::TB_OUT, regs.tb_out),
    ])?;
    let out_dim = out_layout.total_dim();
    check_dim(out_dim)?;
    let (_, phi_f) = code.phi_f().top_eigenvector();
    let tf = regs.ta_out * regs.tb_out;
    let mut ideal = DVector::<C64>::zeros(out_dim);
    for j in 0..regs.x {
        for (k, &a) in phi_f.iter().enumerate() {
            ideal[(j * regs.x + j) * tf + k] = a / (regs.x as f64).sqrt();
        }
    }
    let ideal = &ideal * ideal.adjoint();

    let (g_layout, g_vec) = initial_vector(code);
    let inv_m = 1.0 / regs.m as f64;
    let amp = C64::new(inv_m.sqrt(), 0.0);
    let cl = |names: &[&str], sizes: &[usize]| -> Vec<(String, usize)> {
        names.iter().map(|s| s.to_string()).zip(sizes.iter().copied()).collect()
    };
    let mut gamma = CqState::new(cl(&[labels::M], &[regs.m]), g_layout.clone());
    let mut omega: Option<CqState> = None;
    let mut omega_bar: Option<CqState> = None;
    let mut gamma_bar: Option<CqState> = None;
    let mut p_v_given_m = Vec::with_capacity(regs.m);
    let mut epsilon = 0.0;
    let mut message_error = 0.0;

    for (m, enc) in code.encoders().iter().enumerate() {
        gamma.push(vec![m], g_vec.scaled(amp));
        let (l1, after_enc) = enc
            .family()
            .apply_to_vectors(&g_layout, &[labels::X, labels::TA], enc.input(), enc.output(), &[g_vec.clone()])?;
        let om = omega.get_or_insert_with(|| CqState::new(cl(&[labels::M, labels::V], &[regs.m, regs.v]), l1.clone()));
        let mut by_v: Vec<Vec<SparseVec>> = vec![Vec::new(); regs.v];
        for (v, w) in after_enc {
            om.push(vec![m, v], w.scaled(amp));
            by_v[v].push(w);
        }
        let pv: Vec<f64> = by_v.iter().map(|ws| ws.iter().map(SparseVec::norm_sqr).sum()).collect();
        let total: f64 = pv.iter().sum();
        if (total - 1.0).abs() > TOL_ALG.sqrt() {
            return Err(Error::Verification(format!("p(v|m={m}) sums to {total}")));
        }
        p_v_given_m.push(pv);

        let mut tau = DMatrix::<C64>::zeros(out_dim, out_dim);
        let mut wrong = 0.0;
        for (v, ws) in by_v.into_iter().enumerate() {
            if ws.is_empty() {
                continue;
            }
            let (l2, after_ch) =
                ch.family()
                    .apply_to_vectors(&l1, &a_labels, ch.input_layout(), ch.output_layout(), &ws)?;
            let ob = omega_bar
                .get_or_insert_with(|| CqState::new(cl(&[labels::M, labels::V], &[regs.m, regs.v]), l2.clone()));
            let ys: Vec<SparseVec> = after_ch.into_iter().map(|(_, y)| y).collect();
            for y in &ys {
                ob.push(vec![m, v], y.scaled(amp));
            }
            let dec = &code.decoders()[v];
            let (l3, after_dec) = dec.family().apply_to_vectors(&l2, &dec_targets, dec.input(), dec.output(), &ys)?;
            let gb = gamma_bar.get_or_insert_with(|| {
                CqState::new(
                    cl(&[labels::M, labels::V, labels::M_HAT], &[regs.m, regs.v, regs.m]),
                    out_layout.clone(),
                )
            });
            let order = l3.positions(&out_layout.labels())?;
            for (m_hat, z) in after_dec {
                let z = z.reindexed(|g| {
                    let d = l3.digits(g);
                    out_layout.index(&order.iter().map(|&p| d[p]).collect::<Vec<_>>())
                });
                if m_hat == m {
                    for &(i, a) in z.entries() {
                        for &(j, b) in z.entries() {
                            tau[(i, j)] += a * b.conj() * inv_m;
                        }
                    }
                } else {
                    wrong += z.norm_sqr() * inv_m;
                }
                gb.push(vec![m, v, m_hat], z.scaled(amp));
            }
        }
        let diff = tau - &ideal * C64::new(inv_m, 0.0);
        let norm1: f64 = hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum();
        epsilon += 0.5 * (norm1 + wrong);
        message_error += wrong;
    }
    let empty = |c: &[&str], s: &[usize], l: SystemLayout| CqState::new(cl(c, s), l);
    Ok(PipelineResult {
        gamma,
        omega: omega.unwrap_or_else(|| empty(&[labels::M, labels::V], &[regs.m, regs.v], SystemLayout::empty())),
        omega_bar: omega_bar
            .unwrap_or_else(|| empty(&[labels::M, labels::V], &[regs.m, regs.v], SystemLayout::empty())),
        gamma_bar: gamma_bar.unwrap_or_else(|| {
            empty(&[labels::M, labels::V, labels::M_HAT], &[regs.m, regs.v, regs.m], out_layout.clone())
        }),
        epsilon: epsilon.clamp(0.0, 1.0),
        p_v_given_m,
        message_error,
    })
}

/// The block erasure channel with `w` erasures on the code's A factors. A
/// code without channel input gets the trivial channel for `w = 0`.
pub fn block_erasure_for(code: &EACQCode, w: usize) -> Result<KrausChannel> {
    let a = code.a_layout();
    let dims = a.dims();
    let Some(&q) = dims.first() else {
        if w == 0 {
            return Ok(KrausChannel::identity(SystemLayout::empty()));
        }
        return Err(Error::Domain("code has no channel input to erase".into()));
    };
    if dims.iter().any(|&d| d != q) {
        return Err(Error::Domain(format!("channel input factors differ in size: {dims:?}")));
    }
    let ch = build_block_erasure(&BlockErasureSpec::new(q, dims.len(), w)?)?;
    relabeled_channel(code, &ch)
}

/// True iff the code has zero error (within `TOL_ALG`) under `w = d − 1`
/// erasures on its n channel uses.
pub fn verify_min_distance(code: &EACQCode, d: usize) -> Result<bool> {
    if d == 0 || d > code.a_layout().len() + 1 {
        return Err(Error::Domain(format!(
            "distance {d} outside 1..={}",
            code.a_layout().len() + 1
        )));
    }
    Ok(simulate(code, &block_erasure_for(code, d - 1)?)?.epsilon <= TOL_ALG)
}

/// The code's own encoding ensemble: u = (m, v) with probability
/// p(v|m)/|M| and the (purified) encoded state on R T_A′ A W T_B K, where K
/// purifies encoder branches with several Kraus operators. Returns the items
/// and the labels of the channel input factors.
pub fn encoding_ensemble(code: &EACQCode) -> Result<(Vec<(f64, Mixture)>, Vec<String>)> {
    let regs = code.registers();
    let (g_layout, g_vec) = initial_vector(code);
    let enc_in = regs.encoder_input();
    let enc_out = regs.encoder_output()?;
    let place = Placement::new(&g_layout, &[labels::X, labels::TA], &enc_in.dims(), &enc_out)?;
    let k_dim = code
        .encoders()
        .iter()
        .flat_map(|e| e.branches().into_iter().map(|b| b.len()))
        .max()
        .unwrap_or(1)
        .max(1);
    let base = place.output_layout().clone();
    let layout = base.concat(&SystemLayout::single("K", k_dim)?)?;
    let mut items = Vec::new();
    for enc in code.encoders() {
        for ops in enc.branches() {
            let mut pairs = Vec::new();
            let mut weight = 0.0;
            for (k, op) in ops.iter().enumerate() {
                let w = apply_op(&place, op, &g_vec);
                weight += w.norm_sqr();
                pairs.extend(w.entries().iter().map(|&(g, a)| (g * k_dim + k, a)));
            }
            if weight <= 0.0 {
                continue;
            }
            let v = SparseVec::from_pairs(pairs).scaled(C64::new(1.0 / weight.sqrt(), 0.0));
            items.push((weight / regs.m as f64, Mixture::pure(layout.clone(), v)));
        }
    }
    Ok((items, regs.a.labels().into_iter().map(String::from).collect()))
}
