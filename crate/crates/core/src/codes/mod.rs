//! EACQ codes and the exact encode–channel–decode pipeline.
//!
//! A code fixes a message set M, an optional side message V sent over a
//! noiseless classical link, a quantum input X with reference R, a noiseless
//! quantum link W, an initial shared pure state φ_i on T_A T_B and a final
//! one φ_f on T_A′ T_B′. Encoders are instruments `X T_A → T_A′ A W` indexed
//! by m with outcome v; decoders are instruments `B W T_B → X̂ T_B′` indexed
//! by v with outcome m′.

mod compose;
mod eaq;
mod pipeline;
mod protocols;
mod rs;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{check_dim, TOL_ALG};
use crate::converse::CodeRates;
use crate::error::{Error, Result};
use crate::hilbert::{entropy, partial_trace, tensor, DensityMatrix, SystemLayout, C64};
use crate::region::RateTriple;
use crate::sparse::{KrausFamily, SparseOp};

pub use eaq::{
    eaq_fixture, fixture_names, load_fixture, max_ent_eaq_small, search_eaq, CliffordCircuit, Gate, SearchOutcome,
};
pub use pipeline::{
    block_erasure_for, encoding_ensemble, simulate, verify_min_distance, CqState, PipelineResult,
};
pub use protocols::{concat, dense_code, protocol_instrument, qubit_to_ebit, teleport, Protocol};
pub use rs::{is_prime, Gf, RSCode};

/// Register labels used by every code.
pub mod labels {
    pub const R: &str = "R";
    pub const X: &str = "X";
    pub const W: &str = "W";
    pub const TA: &str = "TA";
    pub const TB: &str = "TB";
    pub const TA_OUT: &str = "TA'";
    pub const TB_OUT: &str = "TB'";
    pub const X_HAT: &str = "X^";
    pub const M: &str = "M";
    pub const V: &str = "V";
    pub const M_HAT: &str = "M^";
}

/// A quantum instrument: Kraus operators grouped by classical outcome.
#[derive(Clone, Debug)]
pub struct Instrument {
    input: SystemLayout,
    output: SystemLayout,
    family: KrausFamily,
}

impl Instrument {
    /// Checks that the whole family is trace preserving within `TOL_ALG`.
    pub fn new(input: SystemLayout, output: SystemLayout, branches: Vec<Vec<SparseOp>>) -> Result<Self> {
        let family = KrausFamily::new(input.total_dim(), output.total_dim(), branches)?;
        let err = family.completeness_error();
        if err > TOL_ALG {
            return Err(Error::Verification(format!(
                "instrument {:?} -> {:?} is not trace preserving (ΣK†K − I = {err:e})",
                input.labels(),
                output.labels()
            )));
        }
        Ok(Instrument { input, output, family })
    }

    pub fn input(&self) -> &SystemLayout {
        &self.input
    }

    pub fn output(&self) -> &SystemLayout {
        &self.output
    }

    pub fn family(&self) -> &KrausFamily {
        &self.family
    }

    pub fn n_outcomes(&self) -> usize {
        self.family.n_branches()
    }

    pub fn branches(&self) -> Vec<Vec<SparseOp>> {
        self.family.branches()
    }

    fn relayout(&self, input: SystemLayout, output: SystemLayout) -> Result<Instrument> {
        if !input.same_shape(&self.input) || !output.same_shape(&self.output) {
            return Err(Error::Layout("instrument relabel changes dimensions".into()));
        }
        Ok(Instrument {
            input,
            output,
            family: self.family.clone(),
        })
    }

    fn to_json(&self) -> Value {
        json!({
            "branches": self
                .branches()
                .iter()
                .map(|ops| ops.iter().map(op_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
    }

    fn from_json(v: &Value, input: SystemLayout, output: SystemLayout) -> Result<Instrument> {
        let branches = v["branches"]
            .as_array()
            .ok_or_else(|| Error::Parse("instrument needs a 'branches' array".into()))?
            .iter()
            .map(|b| {
                b.as_array()
                    .ok_or_else(|| Error::Parse("branch must be an array of operators".into()))?
                    .iter()
                    .map(op_from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Instrument::new(input, output, branches)
    }
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    rows: usize,
    cols: usize,
    /// (row, col, re, im)
    entries: Vec<(usize, usize, f64, f64)>,
}

fn op_to_json(op: &SparseOp) -> Value {
    serde_json::to_value(OpJson {
        rows: op.rows(),
        cols: op.cols(),
        entries: op.entries().iter().map(|&(c, r, v)| (r, c, v.re, v.im)).collect(),
    })
    .expect("plain data serializes")
}

fn op_from_json(v: &Value) -> Result<SparseOp> {
    let o: OpJson = serde_json::from_value(v.clone())?;
    if o.entries.iter().any(|e| e.0 >= o.rows || e.1 >= o.cols) {
        return Err(Error::Parse("operator entry out of range".into()));
    }
    Ok(SparseOp::from_triplets(
        o.rows,
        o.cols,
        o.entries.into_iter().map(|(r, c, re, im)| (r, c, C64::new(re, im))).collect(),
    ))
}

/// The `[[n, k : c, d ; e]]_q` tag: n channel uses, net k qudits, c cdits and
/// e ebits, minimum distance d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: i64,
    pub c: i64,
    pub d: usize,
    pub e: i64,
    pub q: usize,
}

impl std::fmt::Display for CodeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{},{}:{},{};{}]]_{}", self.n, self.k, self.c, self.d, self.e, self.q)
    }
}

/// Register sizes of a code. `a` is the channel input layout and `b` the
/// channel output layout the decoders expect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registers {
    pub m: usize,
    pub v: usize,
    pub x: usize,
    pub w: usize,
    pub ta: usize,
    pub tb: usize,
    pub ta_out: usize,
    pub tb_out: usize,
    pub a: SystemLayout,
    pub b: SystemLayout,
}

impl Registers {
    pub fn encoder_input(&self) -> SystemLayout {
        SystemLayout::new([(labels::X, self.x), (labels::TA, self.ta)]).expect("fixed labels")
    }

    pub fn encoder_output(&self) -> Result<SystemLayout> {
        let mut parts = vec![(labels::TA_OUT.to_string(), self.ta_out)];
        parts.extend(self.a.parts().iter().cloned());
        parts.push((labels::W.to_string(), self.w));
        SystemLayout::new(parts)
    }

    pub fn decoder_input(&self) -> Result<SystemLayout> {
        let mut parts: Vec<(String, usize)> = self.b.parts().to_vec();
        parts.push((labels::W.to_string(), self.w));
        parts.push((labels::TB.to_string(), self.tb));
        SystemLayout::new(parts)
    }

    pub fn decoder_output(&self) -> SystemLayout {
        SystemLayout::new([(labels::X_HAT, self.x), (labels::TB_OUT, self.tb_out)]).expect("fixed labels")
    }
}

#[derive(Clone, Debug)]
pub struct EACQCode {
    name: String,
    regs: Registers,
    phi_i: DensityMatrix,
    phi_f: DensityMatrix,
    encoders: Vec<Instrument>,
    decoders: Vec<Instrument>,
    params: Option<CodeParams>,
}

impl EACQCode {
    /// Validates shapes, outcome counts, purity of φ_i, φ_f and the register
    /// labels (the A and B layouts may not reuse fixed register names).
    pub fn new(
        name: impl Into<String>,
        regs: Registers,
        phi_i: DensityMatrix,
        phi_f: DensityMatrix,
        encoders: Vec<Instrument>,
        decoders: Vec<Instrument>,
        params: Option<CodeParams>,
    ) -> Result<Self> {
        let sizes = [regs.m, regs.v, regs.x, regs.w, regs.ta, regs.tb, regs.ta_out, regs.tb_out];
        if sizes.contains(&0) {
            return Err(Error::Layout("register dimensions must be positive".into()));
        }
        let enc_in = regs.encoder_input();
        let enc_out = regs.encoder_output()?;
        let dec_in = regs.decoder_input()?;
        let dec_out = regs.decoder_output();
        let phi_i = pure_on(&phi_i, labels::TA, regs.ta, labels::TB, regs.tb, "φ_i")?;
        let phi_f = pure_on(&phi_f, labels::TA_OUT, regs.ta_out, labels::TB_OUT, regs.tb_out, "φ_f")?;
        if encoders.len() != regs.m {
            return Err(Error::Layout(format!("{} encoders for {} messages", encoders.len(), regs.m)));
        }
        if decoders.len() != regs.v {
            return Err(Error::Layout(format!("{} decoders for {} side messages", decoders.len(), regs.v)));
        }
        let encoders = encoders
            .into_iter()
            .map(|e| {
                if e.n_outcomes() != regs.v {
                    return Err(Error::Layout(format!("encoder has {} outcomes, |V| = {}", e.n_outcomes(), regs.v)));
                }
                e.relayout(enc_in.clone(), enc_out.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let decoders = decoders
            .into_iter()
            .map(|d| {
                if d.n_outcomes() != regs.m {
                    return Err(Error::Layout(format!("decoder has {} outcomes, |M| = {}", d.n_outcomes(), regs.m)));
                }
                d.relayout(dec_in.clone(), dec_out.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EACQCode {
            name: name.into(),
            regs,
            phi_i,
            phi_f,
            encoders,
            decoders,
            params,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn registers(&self) -> &Registers {
        &self.regs
    }

    pub fn m_size(&self) -> usize {
        self.regs.m
    }

    pub fn v_size(&self) -> usize {
        self.regs.v
    }

    pub fn a_layout(&self) -> &SystemLayout {
        &self.regs.a
    }

    pub fn b_layout(&self) -> &SystemLayout {
        &self.regs.b
    }

    pub fn phi_i(&self) -> &DensityMatrix {
        &self.phi_i
    }

    pub fn phi_f(&self) -> &DensityMatrix {
        &self.phi_f
    }

    pub fn encoders(&self) -> &[Instrument] {
        &self.encoders
    }

    pub fn decoders(&self) -> &[Instrument] {
        &self.decoders
    }

    pub fn params(&self) -> Option<CodeParams> {
        self.params
    }

    /// Resource accounting in bits, with the given error.
    pub fn rates(&self, epsilon: f64) -> Result<CodeRates> {
        let r = &self.regs;
        Ok(CodeRates {
            c1: (r.v as f64).log2(),
            c2: (r.m as f64).log2(),
            q1: (r.w as f64).log2(),
            q2: (r.x as f64).log2(),
            e1: entropy(&partial_trace(&self.phi_i, &[labels::TA])?)?,
            e2: entropy(&partial_trace(&self.phi_f, &[labels::TA_OUT])?)?,
            log_ta_prime: (r.ta_out as f64).log2(),
            epsilon,
        })
    }

    /// Net (C, Q, E) in units of log q, exact. Fails unless every register
    /// dimension and every entanglement Schmidt rank is a power of q with a
    /// flat Schmidt spectrum.
    pub fn normalized_triple(&self, q: usize) -> Result<RateTriple> {
        let r = &self.regs;
        let lg = |dim: usize, what: &str| {
            exact_log(dim, q).ok_or_else(|| Error::Domain(format!("{what} = {dim} is not a power of {q}")))
        };
        let e1 = flat_schmidt_log(&self.phi_i, labels::TA, q)?;
        let e2 = flat_schmidt_log(&self.phi_f, labels::TA_OUT, q)?;
        Ok(RateTriple::from_ints(
            lg(r.m, "|M|")? - lg(r.v, "|V|")?,
            lg(r.x, "|X|")? - lg(r.w, "|W|")?,
            e1 - e2,
        ))
    }

    /// `Φ̄^{MM̂} ⊗ Φ^{RX̂} ⊗ φ_f` on factors M, M^, R, X^, TA', TB'.
    pub fn ideal_output(&self) -> Result<DensityMatrix> {
        let r = &self.regs;
        check_dim(r.m * r.m * r.x * r.x * r.ta_out * r.tb_out)?;
        let corr = DensityMatrix::classically_correlated(labels::M, labels::M_HAT, r.m)?;
        let ent = DensityMatrix::maximally_entangled(labels::R, labels::X_HAT, r.x)?;
        tensor(&tensor(&corr, &ent)?, &self.phi_f)
    }

    pub fn to_json(&self) -> Value {
        let r = &self.regs;
        json!({
            "name": self.name,
            "params": self.params,
            "registers": {
                "M": r.m, "V": r.v, "X": r.x, "W": r.w,
                "TA": r.ta, "TB": r.tb, "TA'": r.ta_out, "TB'": r.tb_out,
                "A": r.a, "B": r.b,
            },
            "phi_i": dense_to_json(self.phi_i.matrix()),
            "phi_f": dense_to_json(self.phi_f.matrix()),
            "encoders": self.encoders.iter().map(Instrument::to_json).collect::<Vec<_>>(),
            "decoders": self.decoders.iter().map(Instrument::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<EACQCode> {
        let regs_v = &v["registers"];
        let size = |k: &str| {
            regs_v[k]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("registers.{k} must be a positive integer")))
        };
        let regs = Registers {
            m: size("M")?,
            v: size("V")?,
            x: size("X")?,
            w: size("W")?,
            ta: size("TA")?,
            tb: size("TB")?,
            ta_out: size("TA'")?,
            tb_out: size("TB'")?,
            a: serde_json::from_value(regs_v["A"].clone())?,
            b: serde_json::from_value(regs_v["B"].clone())?,
        };
        let phi = |key: &str, l1: &str, d1: usize, l2: &str, d2: usize| -> Result<DensityMatrix> {
            let m = dense_from_json(&v[key])?;
            DensityMatrix::new(SystemLayout::new([(l1, d1), (l2, d2)])?, m)
        };
        let phi_i = phi("phi_i", labels::TA, regs.ta, labels::TB, regs.tb)?;
        let phi_f = phi("phi_f", labels::TA_OUT, regs.ta_out, labels::TB_OUT, regs.tb_out)?;
        let list = |key: &str| {
            v[key]
                .as_array()
                .cloned()
                .ok_or_else(|| Error::Parse(format!("'{key}' must be an array")))
        };
        let enc_in = regs.encoder_input();
        let enc_out = regs.encoder_output()?;
        let encoders = list("encoders")?
            .iter()
            .map(|e| Instrument::from_json(e, enc_in.clone(), enc_out.clone()))
            .collect::<Result<Vec<_>>>()?;
        let dec_in = regs.decoder_input()?;
        let dec_out = regs.decoder_output();
        let decoders = list("decoders")?
            .iter()
            .map(|d| Instrument::from_json(d, dec_in.clone(), dec_out.clone()))
            .collect::<Result<Vec<_>>>()?;
        let params = match &v["params"] {
            Value::Null => None,
            p => Some(serde_json::from_value(p.clone())?),
        };
        let name = v["name"].as_str().unwrap_or("unnamed").to_string();
        EACQCode::new(name, regs, phi_i, phi_f, encoders, decoders, params)
    }
}

fn dense_to_json(m: &DMatrix<C64>) -> Value {
    serde_json::to_value(crate::hilbert::matrix_to_json(m)).expect("plain data serializes")
}

fn dense_from_json(v: &Value) -> Result<DMatrix<C64>> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(v.clone())?;
    crate::hilbert::matrix_from_json(&rows)
}

/// Relabel a two-factor state and check that it is pure.
fn pure_on(s: &DensityMatrix, l1: &str, d1: usize, l2: &str, d2: usize, what: &str) -> Result<DensityMatrix> {
    if s.layout().dims() != [d1, d2] {
        return Err(Error::Layout(format!(
            "{what} has dims {:?}, expected [{d1}, {d2}]",
            s.layout().dims()
        )));
    }
    let s = s.relabel(&[l1, l2])?;
    if (s.purity() - 1.0).abs() > TOL_ALG.sqrt() {
        return Err(Error::State(format!("{what} is not pure (purity {})", s.purity())));
    }
    Ok(s)
}

/// `Some(j)` when `dim = q^j`.
fn exact_log(dim: usize, q: usize) -> Option<i64> {
    if q < 2 {
        return None;
    }
    let (mut d, mut j) = (dim, 0);
    while d > 1 {
        if d % q != 0 {
            return None;
        }
        d /= q;
        j += 1;
    }
    Some(j)
}

fn flat_schmidt_log(s: &DensityMatrix, side: &str, q: usize) -> Result<i64> {
    let eigs: Vec<f64> = partial_trace(s, &[side])?
        .eigenvalues()
        .into_iter()
        .filter(|&x| x > 1e-9)
        .collect();
    let r = eigs.len();
    if eigs.iter().any(|&x| (x - 1.0 / r as f64).abs() > 1e-9) {
        return Err(Error::Domain("shared state is not maximally entangled on its support".into()));
    }
    exact_log(r, q).ok_or_else(|| Error::Domain(format!("Schmidt rank {r} is not a power of {q}")))
}

/// Trivial one-dimensional pure state on two factors.
pub(crate) fn phi_trivial(a: &str, b: &str) -> Result<DensityMatrix> {
    DensityMatrix::basis(SystemLayout::new([(a, 1), (b, 1)])?, &[0, 0])
}

/// Classical RS code as an EACQ code with trivial quantum registers.
pub fn classical_to_eacq(code: &RSCode) -> Result<EACQCode> {
    let q = code.q() as usize;
    let n = code.n();
    let a = crate::channels::input_layout(n, q);
    let b = crate::channels::output_layout(n, q);
    let regs = Registers {
        m: code.num_messages(),
        v: 1,
        x: 1,
        w: 1,
        ta: 1,
        tb: 1,
        ta_out: 1,
        tb_out: 1,
        a: a.clone(),
        b: b.clone(),
    };
    let one = C64::new(1.0, 0.0);
    let a_dim = a.total_dim();
    let encoders = (0..regs.m)
        .map(|m| {
            let word = code.encode(&code.message_symbols(m))?;
            let idx = word.iter().fold(0usize, |acc, &s| acc * q + s as usize);
            let op = SparseOp::from_triplets(a_dim, 1, vec![(idx, 0, one)]);
            Instrument::new(regs.encoder_input(), regs.encoder_output()?, vec![vec![op]])
        })
        .collect::<Result<Vec<_>>>()?;
    // Decoder: measure every B factor; interpolate from survivors, or guess 0.
    let b_dim = b.total_dim();
    let mut branches: Vec<Vec<SparseOp>> = vec![Vec::new(); regs.m];
    for idx in 0..b_dim {
        let received: Vec<Option<u64>> = b
            .digits(idx)
            .into_iter()
            .map(|s| (s < q).then_some(s as u64))
            .collect();
        let m_hat = match code.erasure_decode(&received) {
            Ok(msg) => code.message_index(&msg),
            Err(_) => 0,
        };
        branches[m_hat].push(SparseOp::from_triplets(1, b_dim, vec![(0, idx, one)]));
    }
    let decoder = Instrument::new(regs.decoder_input()?, regs.decoder_output(), branches)?;
    let k = code.k() as i64;
    let params = CodeParams {
        n,
        k: 0,
        c: k,
        d: code.d(),
        e: 0,
        q,
    };
    EACQCode::new(
        format!("rs:{},{},{}", q, n, code.k()),
        regs,
        phi_trivial(labels::TA, labels::TB)?,
        phi_trivial(labels::TA_OUT, labels::TB_OUT)?,
        encoders,
        vec![decoder],
        Some(params),
    )
}

/// One channel use carrying a qudit unchanged: X → A1, B1 → X̂ with the
/// erasure flag mapped to |0⟩.
pub fn identity_code(q: usize) -> Result<EACQCode> {
    let a = crate::channels::input_layout(1, q);
    let b = crate::channels::output_layout(1, q);
    let regs = Registers {
        m: 1,
        v: 1,
        x: q,
        w: 1,
        ta: 1,
        tb: 1,
        ta_out: 1,
        tb_out: 1,
        a,
        b,
    };
    let one = C64::new(1.0, 0.0);
    let enc = SparseOp::identity(q);
    let mut ops = vec![SparseOp::from_triplets(q, q + 1, (0..q).map(|i| (i, i, one)).collect())];
    ops.push(SparseOp::from_triplets(q, q + 1, vec![(0, q, one)]));
    EACQCode::new(
        format!("identity:{q}"),
        regs.clone(),
        phi_trivial(labels::TA, labels::TB)?,
        phi_trivial(labels::TA_OUT, labels::TB_OUT)?,
        vec![Instrument::new(regs.encoder_input(), regs.encoder_output()?, vec![vec![enc]])?],
        vec![Instrument::new(regs.decoder_input()?, regs.decoder_output(), vec![ops])?],
        Some(CodeParams {
            n: 1,
            k: 1,
            c: 0,
            d: 1,
            e: 0,
            q,
        }),
    )
}

fn spec_numbers(kind: &str, rest: &str) -> Result<[usize; 3]> {
    let v: Vec<usize> = rest
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("{kind} needs three numbers, got {rest:?}")))?;
    v.try_into()
        .map_err(|_| Error::Parse(format!("{kind} needs three numbers, got {rest:?}")))
}

/// Build a code from a short description together with its alphabet size:
/// `rs:q,n,k`, `eaq:n,d,q`, `<protocol>:q`, a fixture name or a fixture file.
pub fn code_from_spec(spec: &str) -> Result<(EACQCode, usize)> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "rs" => {
            let [q, n, k] = spec_numbers(kind, rest)?;
            Ok((classical_to_eacq(&RSCode::new(q as u64, n, k)?)?, q))
        }
        "eaq" => {
            let [n, d, q] = spec_numbers(kind, rest)?;
            Ok((max_ent_eaq_small(n, d, q)?, q))
        }
        _ => {
            if let Ok(p) = Protocol::parse(kind) {
                let q = rest
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("{kind} needs :q, got {spec:?}")))?;
                return Ok((p.build(q)?, q));
            }
            let code = match eaq_fixture(spec) {
                Ok(text) => load_fixture(text)?,
                Err(_) if std::path::Path::new(spec).is_file() => load_fixture(&std::fs::read_to_string(spec)?)?,
                Err(_) => {
                    return Err(Error::Parse(format!(
                        "unknown code {spec:?} (rs:q,n,k, eaq:n,d,q, <protocol>:q or one of {})",
                        fixture_names().join(", ")
                    )))
                }
            };
            let q = code
                .params()
                .map(|p| p.q)
                .ok_or_else(|| Error::Domain("fixture has no parameters".into()))?;
            Ok((code, q))
        }
    }
}

#[cfg(test)]
mod tests;
