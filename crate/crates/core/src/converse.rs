//! One-shot converse bounds for EACQ codes and their closed forms for the
//! erasure and block erasure channels.
//!
//! For a witness ensemble σ₀ = Σ_u p(u) |u⟩⟨u| ⊗ φ_u^{AA′} with pure φ_u and a
//! channel A′ → B, the bounds are evaluated on σ^{UAB} = (id ⊗ 𝒩)(σ₀) through
//! the classical–quantum identities
//!
//! ```text
//! I(UA:B)  = S(B) + Σ_u p(u) [S(A)_u − S(AB)_u]
//! I(A⟩BU)  = Σ_u p(u) [S(B)_u − S(AB)_u]
//! I(U:B)   = S(B) − Σ_u p(u) S(B)_u
//! ```
//!
//! so that only per-u blocks are ever diagonalized. The explicit state with a
//! genuine U register is available through [`sigma_uab`] for cross-checks.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{apply, build_block_erasure, build_erasure, BlockErasureSpec, ErasureSpec, KrausChannel};
use crate::config::{check_dim, TOL_NUM};
use crate::error::{domain_err, Error, Result};
use crate::hilbert::{
    coherent_information, marginal_entropy, mutual_information, random_pure, CQEnsemble, DensityMatrix,
    SystemLayout, C64,
};
use crate::lemmas::{lemma4_t_from_profile, profile, SubsetEntropyProfile};
use crate::region::Rational;
use crate::sparse::{Mixture, SparseVec};

/// Resource rates of a code in bits, and its error.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CodeRates {
    pub c1: f64,
    pub c2: f64,
    pub q1: f64,
    pub q2: f64,
    pub e1: f64,
    pub e2: f64,
    #[serde(default)]
    pub log_ta_prime: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl CodeRates {
    /// Net (C, Q, E) = (C₂ − C₁, Q₂ − Q₁, E₁ − E₂).
    pub fn net(&self) -> (f64, f64, f64) {
        (self.c2 - self.c1, self.q2 - self.q1, self.e1 - self.e2)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.c1, self.c2, self.q1, self.q2, self.e1, self.e2, self.log_ta_prime];
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return domain_err("rates must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return domain_err(format!("error {} outside [0, 1]", self.epsilon));
        }
        Ok(())
    }
}

/// The three information quantities of σ^{UAB}, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoQuantities {
    pub i_ua_b: f64,
    pub i_a_bu: f64,
    pub i_u_b: f64,
}

/// Right-hand sides of the three converse inequalities (bits).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConverseBounds {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub info: InfoQuantities,
}

fn eps_terms(r: &CodeRates) -> Result<(f64, f64, f64)> {
    let e = r.epsilon;
    let g = crate::hilbert::g_function(e)?;
    Ok((
        2.0 * e * (r.c2 + r.q2) + g,
        2.0 * e * (r.q2 + r.log_ta_prime) + g,
        2.0 * e * (r.c2 + r.q2 + r.log_ta_prime) + 2.0 * g,
    ))
}

pub fn bounds_from_info(info: InfoQuantities, rates: &CodeRates) -> Result<ConverseBounds> {
    rates.validate()?;
    let (e1, e2, e3) = eps_terms(rates)?;
    Ok(ConverseBounds {
        b1: info.i_ua_b + e1,
        b2: info.i_a_bu + e2,
        b3: info.i_u_b + info.i_a_bu + e3,
        info,
    })
}

/// Labels of the last `k` factors of a layout.
fn last_labels(layout: &SystemLayout, k: usize) -> Result<Vec<String>> {
    if k > layout.len() {
        return Err(Error::Layout(format!("channel acts on {k} factors, state has {}", layout.len())));
    }
    Ok(layout.labels()[layout.len() - k..].iter().map(|s| s.to_string()).collect())
}

fn bind_channel(channel: &KrausChannel, layout: &SystemLayout, on: &[&str]) -> Result<KrausChannel> {
    let sub = layout.select(&layout.positions(on)?);
    if !sub.same_shape(channel.input_layout()) {
        return Err(Error::Layout(format!(
            "channel input dims {:?} do not match factors {:?} with dims {:?}",
            channel.input_layout().dims(),
            on,
            sub.dims()
        )));
    }
    let outs = channel.output_layout().labels();
    if let Some(clash) = outs.iter().find(|o| layout.contains(o) && !on.contains(o)) {
        return Err(Error::Layout(format!("channel output label '{clash}' already used by the state")));
    }
    let outs: Vec<String> = outs.iter().map(|s| s.to_string()).collect();
    channel.with_labels(on, &outs.iter().map(String::as_str).collect::<Vec<_>>())
}

/// Enforce purity of a witness state, re-purifying states within tol_num.
pub fn purify_witness(m: &Mixture) -> Result<Mixture> {
    if m.vectors().len() <= 1 {
        return Ok(m.clone());
    }
    let spec = m.spectrum()?;
    let total: f64 = spec.iter().sum();
    let top = spec.iter().cloned().fold(0.0, f64::max);
    let deficit = 1.0 - top / total;
    if deficit > TOL_NUM {
        return Err(Error::Witness(format!("witness state is mixed (purity deficit {deficit:e})")));
    }
    if deficit > 1e-15 {
        log::warn!("re-purifying near-pure witness state (deficit {deficit:e})");
    }
    let dense = m.to_density()?;
    let (_, v) = dense.top_eigenvector();
    Ok(Mixture::pure(m.layout().clone(), SparseVec::from_dense(&v)))
}

/// The three information quantities of (id ⊗ 𝒩)(σ₀), with 𝒩 acting on `on`.
pub fn information_quantities(items: &[(f64, Mixture)], channel: &KrausChannel, on: &[&str]) -> Result<InfoQuantities> {
    let first = items.first().ok_or_else(|| Error::Domain("empty witness ensemble".into()))?;
    let layout = first.1.layout().clone();
    let ch = bind_channel(channel, &layout, on)?;
    let a_labels: Vec<String> = layout
        .labels()
        .iter()
        .filter(|l| !on.contains(l))
        .map(|s| s.to_string())
        .collect();
    let b_labels: Vec<String> = ch.output_layout().labels().iter().map(|s| s.to_string()).collect();
    let (mut avg_sa, mut avg_sab, mut avg_sb) = (0.0, 0.0, 0.0);
    let mut b_vectors: Vec<SparseVec> = Vec::new();
    let mut b_layout = None;
    for (p, phi) in items {
        if *p <= 0.0 {
            continue;
        }
        if phi.layout() != &layout {
            return Err(Error::Layout("witness states on different layouts".into()));
        }
        let phi = purify_witness(phi)?;
        let omega = ch.apply_mixture(&phi, on)?;
        let om_a = omega.partial_trace(&a_labels)?;
        let om_b = omega.partial_trace(&b_labels)?;
        avg_sa += p * om_a.entropy()?;
        avg_sab += p * omega.entropy()?;
        avg_sb += p * om_b.entropy()?;
        let s = C64::new(p.sqrt(), 0.0);
        b_vectors.extend(om_b.vectors().iter().map(|v| v.scaled(s)));
        b_layout = Some(om_b.layout().clone());
    }
    let b_layout = b_layout.ok_or_else(|| Error::Domain("witness ensemble has no positive weight".into()))?;
    let sb = Mixture::new(b_layout, b_vectors).entropy()?;
    Ok(InfoQuantities {
        i_ua_b: sb + avg_sa - avg_sab,
        i_a_bu: avg_sb - avg_sab,
        i_u_b: sb - avg_sb,
    })
}

fn mixtures(ens: &CQEnsemble) -> Vec<(f64, Mixture)> {
    ens.items().iter().map(|(p, s)| (*p, Mixture::from_density(s))).collect()
}

fn check_witness_dense(ens: &CQEnsemble) -> Result<()> {
    for (p, s) in ens.items() {
        if *p > 0.0 && 1.0 - s.purity() > 2.0 * TOL_NUM {
            return Err(Error::Witness(format!(
                "witness state is mixed (purity {})",
                s.purity()
            )));
        }
    }
    Ok(())
}

/// Converse bounds with the channel acting on the factors `on`.
pub fn thm1_bounds_on(sigma0: &CQEnsemble, channel: &KrausChannel, on: &[&str], rates: &CodeRates) -> Result<ConverseBounds> {
    check_witness_dense(sigma0)?;
    let info = information_quantities(&mixtures(sigma0), channel, on)?;
    bounds_from_info(info, rates)
}

/// Converse bounds with the channel acting on the last factors of σ₀.
pub fn thm1_bounds(sigma0: &CQEnsemble, channel: &KrausChannel, rates: &CodeRates) -> Result<ConverseBounds> {
    let on = last_labels(sigma0.layout(), channel.input_layout().len())?;
    let on: Vec<&str> = on.iter().map(String::as_str).collect();
    thm1_bounds_on(sigma0, channel, &on, rates)
}

/// Do the net rates satisfy all three bounds (within tol_num)?
pub fn check_rates(bounds: &ConverseBounds, rates: &CodeRates) -> bool {
    let (c, q, e) = rates.net();
    c + 2.0 * q <= bounds.b1 + TOL_NUM && q - e <= bounds.b2 + TOL_NUM && c + q - e <= bounds.b3 + TOL_NUM
}

/// σ^{UAB} = Σ_u p(u) |u⟩⟨u| ⊗ (id ⊗ 𝒩)(φ_u) with an explicit register `U`.
pub fn sigma_uab(sigma0: &CQEnsemble, channel: &KrausChannel, on: &[&str]) -> Result<DensityMatrix> {
    let ch = bind_channel(channel, sigma0.layout(), on)?;
    let outs: Vec<DensityMatrix> = sigma0
        .items()
        .iter()
        .map(|(_, s)| apply(&ch, s, on))
        .collect::<Result<_>>()?;
    let block = outs[0].dim();
    let k = outs.len();
    check_dim(block * k)?;
    let mut m = DMatrix::<C64>::zeros(block * k, block * k);
    for (u, ((p, _), o)) in sigma0.items().iter().zip(&outs).enumerate() {
        m.view_mut((u * block, u * block), (block, block))
            .copy_from(&(o.matrix() * C64::new(*p, 0.0)));
    }
    let layout = SystemLayout::single("U", k)?.concat(outs[0].layout())?;
    DensityMatrix::new(layout, m)
}

/// The information quantities computed directly on the explicit σ^{UAB}.
pub fn direct_quantities(sigma0: &CQEnsemble, channel: &KrausChannel, on: &[&str]) -> Result<InfoQuantities> {
    let sigma = sigma_uab(sigma0, channel, on)?;
    let b: Vec<String> = channel.output_layout().labels().iter().map(|s| s.to_string()).collect();
    let b: Vec<&str> = b.iter().map(String::as_str).collect();
    let a: Vec<&str> = sigma0.layout().labels().into_iter().filter(|l| !on.contains(l)).collect();
    let ua: Vec<&str> = std::iter::once("U").chain(a.iter().copied()).collect();
    let bu: Vec<&str> = b.iter().copied().chain(std::iter::once("U")).collect();
    Ok(InfoQuantities {
        i_ua_b: mutual_information(&sigma, &ua, &b)?,
        i_a_bu: coherent_information(&sigma, &a, &bu)?,
        i_u_b: mutual_information(&sigma, &["U"], &b)?,
    })
}

/// Single-letter erasure expressions (bits) and the parameter t = S(A′|U).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErasureExpressions {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub t: f64,
}

/// Closed forms of I(AU:B), I(A⟩BU) and I(U:B)+I(A⟩BU) for the erasure
/// channel with erasure probability δ acting on the factor `a_prime`.
pub fn erasure_single_letter(sigma0: &CQEnsemble, delta: f64, a_prime: &str) -> Result<ErasureExpressions> {
    if !(0.0..=1.0).contains(&delta) {
        return domain_err(format!("erasure probability {delta} outside [0, 1]"));
    }
    check_witness_dense(sigma0)?;
    let s_ap = marginal_entropy(&sigma0.average(), &[a_prime])?;
    let mut s_ap_u = 0.0;
    for (p, s) in sigma0.items() {
        if *p > 0.0 {
            s_ap_u += p * marginal_entropy(s, &[a_prime])?;
        }
    }
    Ok(ErasureExpressions {
        i1: (1.0 - delta) * (s_ap + s_ap_u),
        i2: (1.0 - 2.0 * delta) * s_ap_u,
        i3: (1.0 - delta) * s_ap - delta * s_ap_u,
        t: s_ap_u,
    })
}

/// The erasure channel on `a_prime` (output labelled `B`) matching
/// [`erasure_single_letter`].
pub fn erasure_witness_channel(q: usize, delta: &Rational) -> Result<KrausChannel> {
    Ok(build_erasure(&ErasureSpec::new(q, delta.clone())?))
}

/// How the parameter t was chosen for the block expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TRule {
    /// d − 1 ≤ n/2: t = s̄_{d−1}.
    SBar,
    /// d − 1 > n/2: t from (n−2d+2)t = (n−d+1)s̄_{n−d+1} − (d−1)s̄_{d−1}.
    Lemma4,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockExpressions {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub t: f64,
    pub t_rule: TRule,
    pub profile: SubsetEntropyProfile,
}

/// Block erasure expressions in terms of the subset profile over `a_prime`,
/// for minimum distance `d` (d − 1 erasures).
pub fn block_expressions(sigma0: &CQEnsemble, a_prime: &[&str], d: usize) -> Result<BlockExpressions> {
    let n = a_prime.len();
    if d == 0 || d > n + 1 {
        return domain_err(format!("d = {d} outside 1..={}", n + 1));
    }
    check_witness_dense(sigma0)?;
    check_dim(sigma0.layout().total_dim())?;
    let p = profile(sigma0, a_prime)?;
    let (k, w) = ((n + 1 - d) as f64, (d - 1) as f64);
    let shat = p.s_hat(n + 1 - d);
    let sbar_k = p.s_bar(n + 1 - d);
    let sbar_w = p.s_bar(d - 1);
    let (t, t_rule) = if 2 * (d - 1) <= n {
        (sbar_w, TRule::SBar)
    } else if d <= n {
        (lemma4_t_from_profile(&p, d)?.0, TRule::Lemma4)
    } else {
        (sbar_w, TRule::SBar)
    };
    Ok(BlockExpressions {
        i1: k * shat + n as f64 * p.s_bar(n) - w * sbar_w,
        i2: k * sbar_k - w * sbar_w,
        i3: k * shat - w * sbar_w,
        t,
        t_rule,
        profile: p,
    })
}

/// Block erasure channel on `a_prime` with outputs `B1..Bn`.
pub fn block_witness_channel(q: usize, n: usize, d: usize) -> Result<KrausChannel> {
    if d == 0 {
        return domain_err("d must be at least 1");
    }
    build_block_erasure(&BlockErasureSpec::new(q, n, d - 1)?)
}

/// Random witness: `size` Haar-random pure states on `layout` with random
/// probabilities.
pub fn random_witness<R: Rng + ?Sized>(layout: &SystemLayout, size: usize, rng: &mut R) -> Result<CQEnsemble> {
    let w: Vec<f64> = (0..size).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    CQEnsemble::new(w.iter().map(|x| (x / total, random_pure(layout, rng))).collect())
}
