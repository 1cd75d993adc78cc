//! Teleportation, dense coding and qubit-to-ebit conversion as codes with a
//! trivial channel input, and their concatenation with a code.

use std::f64::consts::PI;

use super::compose::{compile, Step};
use super::{labels, phi_trivial, CodeParams, EACQCode, Instrument, Registers};
use crate::error::{Error, Result};
use crate::hilbert::{tensor, DensityMatrix, SystemLayout, C64};
use crate::region::RateTriple;
use crate::sparse::SparseOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Protocol {
    Teleport,
    DenseCode,
    QubitToEbit,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Teleport, Protocol::DenseCode, Protocol::QubitToEbit];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Teleport => "teleport",
            Protocol::DenseCode => "dense_code",
            Protocol::QubitToEbit => "qubit_to_ebit",
        }
    }

    pub fn parse(s: &str) -> Result<Protocol> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown protocol '{s}' (teleport, dense_code, qubit_to_ebit)")))
    }

    /// Net (C, Q, E) shift in units of log q.
    pub fn ray(self) -> RateTriple {
        match self {
            Protocol::Teleport => RateTriple::from_ints(-2, 1, 1),
            Protocol::DenseCode => RateTriple::from_ints(2, -1, 1),
            Protocol::QubitToEbit => RateTriple::from_ints(0, -1, -1),
        }
    }

    pub fn build(self, q: usize) -> Result<EACQCode> {
        match self {
            Protocol::Teleport => teleport(q),
            Protocol::DenseCode => dense_code(q),
            Protocol::QubitToEbit => qubit_to_ebit(q),
        }
    }
}

/// The protocol as a code, together with its rate shift.
pub fn protocol_instrument(kind: Protocol, q: usize) -> Result<(RateTriple, EACQCode)> {
    Ok((kind.ray(), kind.build(q)?))
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::Domain(format!("protocols need q ≥ 2, got {q}")));
    }
    Ok(())
}

/// Generalized Pauli `X^a Z^b`: |j⟩ ↦ ω^{bj} |j + a⟩.
fn pauli(q: usize, a: usize, b: usize) -> SparseOp {
    let t = (0..q)
        .map(|j| ((j + a) % q, j, C64::from_polar(1.0, 2.0 * PI * ((b * j) % q) as f64 / q as f64)))
        .collect();
    SparseOp::from_triplets(q, q, t)
}

/// Bra `⟨Φ_ab|` with `|Φ_ab⟩ = (X^a Z^b ⊗ I)|Φ⟩`, as a 1 × q² operator.
fn bell_bra(q: usize, a: usize, b: usize) -> SparseOp {
    let s = 1.0 / (q as f64).sqrt();
    let t = (0..q)
        .map(|j| {
            let phase = C64::from_polar(s, -2.0 * PI * ((b * j) % q) as f64 / q as f64);
            (0, ((j + a) % q) * q + j, phase)
        })
        .collect();
    SparseOp::from_triplets(1, q * q, t)
}

fn bare_regs() -> Registers {
    Registers {
        m: 1,
        v: 1,
        x: 1,
        w: 1,
        ta: 1,
        tb: 1,
        ta_out: 1,
        tb_out: 1,
        a: SystemLayout::empty(),
        b: SystemLayout::empty(),
    }
}

fn params(q: usize, t: (i64, i64, i64)) -> Option<CodeParams> {
    Some(CodeParams {
        n: 0,
        k: t.1,
        c: t.0,
        d: 1,
        e: t.2,
        q,
    })
}

/// Bell measurement on X T_A, two cdits sent, Pauli correction on T_B.
pub fn teleport(q: usize) -> Result<EACQCode> {
    check_q(q)?;
    let regs = Registers {
        v: q * q,
        x: q,
        ta: q,
        tb: q,
        ..bare_regs()
    };
    let bell: Vec<Vec<SparseOp>> = (0..q * q).map(|v| vec![bell_bra(q, v / q, v % q)]).collect();
    let encoder = Instrument::new(regs.encoder_input(), regs.encoder_output()?, bell)?;
    let decoders = (0..q * q)
        .map(|v| Instrument::new(regs.decoder_input()?, regs.decoder_output(), vec![vec![pauli(q, v / q, v % q)]]))
        .collect::<Result<Vec<_>>>()?;
    EACQCode::new(
        format!("teleport:{q}"),
        regs,
        DensityMatrix::maximally_entangled(labels::TA, labels::TB, q)?,
        phi_trivial(labels::TA_OUT, labels::TB_OUT)?,
        vec![encoder],
        decoders,
        params(q, (-2, 1, 1)),
    )
}

/// Pauli encoding of two cdits on T_A sent as W, Bell measurement on W T_B.
pub fn dense_code(q: usize) -> Result<EACQCode> {
    check_q(q)?;
    let regs = Registers {
        m: q * q,
        w: q,
        ta: q,
        tb: q,
        ..bare_regs()
    };
    let encoders = (0..q * q)
        .map(|m| Instrument::new(regs.encoder_input(), regs.encoder_output()?, vec![vec![pauli(q, m / q, m % q)]]))
        .collect::<Result<Vec<_>>>()?;
    let bell: Vec<Vec<SparseOp>> = (0..q * q).map(|m| vec![bell_bra(q, m / q, m % q)]).collect();
    let decoder = Instrument::new(regs.decoder_input()?, regs.decoder_output(), bell)?;
    EACQCode::new(
        format!("dense_code:{q}"),
        regs,
        DensityMatrix::maximally_entangled(labels::TA, labels::TB, q)?,
        phi_trivial(labels::TA_OUT, labels::TB_OUT)?,
        encoders,
        vec![decoder],
        params(q, (2, -1, 1)),
    )
}

/// Prepare Φ on T_A′ W and send W, which Bob keeps as T_B′.
pub fn qubit_to_ebit(q: usize) -> Result<EACQCode> {
    check_q(q)?;
    let regs = Registers {
        w: q,
        ta_out: q,
        tb_out: q,
        ..bare_regs()
    };
    let s = C64::new(1.0 / (q as f64).sqrt(), 0.0);
    let prep = SparseOp::from_triplets(q * q, 1, (0..q).map(|j| (j * q + j, 0, s)).collect());
    let encoder = Instrument::new(regs.encoder_input(), regs.encoder_output()?, vec![vec![prep]])?;
    let decoder = Instrument::new(regs.decoder_input()?, regs.decoder_output(), vec![vec![SparseOp::identity(q)]])?;
    EACQCode::new(
        format!("qubit_to_ebit:{q}"),
        regs,
        phi_trivial(labels::TA, labels::TB)?,
        DensityMatrix::maximally_entangled(labels::TA_OUT, labels::TB_OUT, q)?,
        vec![encoder],
        vec![decoder],
        params(q, (0, -1, -1)),
    )
}

/// Run `protocol` (over alphabet q) `repetitions` times alongside `code`.
///
/// Teleportation's side message is carried inside the code's message; the
/// noiseless qudit of dense coding and conversion is carried inside the
/// code's quantum input X.
pub fn concat(code: &EACQCode, protocol: Protocol, q: usize, repetitions: usize) -> Result<EACQCode> {
    let p = protocol.build(q)?;
    let mut out = code.clone();
    for _ in 0..repetitions {
        out = match protocol {
            Protocol::Teleport => route_side_message(&out, &p)?,
            Protocol::DenseCode | Protocol::QubitToEbit => route_quantum(&out, &p)?,
        };
    }
    if repetitions > 0 {
        out.name = format!("{}+{}x{}", code.name(), repetitions, protocol.name());
        out.params = code.params().map(|c| {
            let r = repetitions as i64;
            let ray = protocol.ray();
            let int = |x: &crate::region::Rational| x.to_integer().try_into().unwrap_or(0i64);
            CodeParams {
                k: c.k + r * int(&ray.q),
                c: c.c + r * int(&ray.c),
                e: c.e + r * int(&ray.e),
                ..c
            }
        });
    }
    Ok(out)
}

fn names(prefix: &str, l: &SystemLayout) -> Vec<String> {
    l.labels().iter().map(|s| format!("{prefix}{s}")).collect()
}

fn s(x: &str) -> String {
    x.to_string()
}

fn merged(a: &DensityMatrix, b: &DensityMatrix, l1: &str, l2: &str) -> Result<DensityMatrix> {
    let a = a.relabel(&["a1", "a2"])?;
    let b = b.relabel(&["b1", "b2"])?;
    let t = tensor(&a, &b)?.permute(&["a1", "b1", "a2", "b2"])?;
    let d = t.layout().dims();
    DensityMatrix::new(SystemLayout::new([(l1, d[0] * d[1]), (l2, d[2] * d[3])])?, t.matrix().clone())
}

/// Shared pieces of both routings.
struct Parts {
    phi_i: DensityMatrix,
    phi_f: DensityMatrix,
}

fn shared_states(c: &EACQCode, p: &EACQCode) -> Result<Parts> {
    Ok(Parts {
        phi_i: merged(c.phi_i(), p.phi_i(), labels::TA, labels::TB)?,
        phi_f: merged(c.phi_f(), p.phi_f(), labels::TA_OUT, labels::TB_OUT)?,
    })
}

fn layout_of(parts: &[(String, usize)]) -> Result<SystemLayout> {
    SystemLayout::new(parts.iter().cloned())
}

/// Teleportation-style routing: the protocol's side message v_p becomes part
/// of the code's message, m = m_c · |V_p| + v_p.
fn route_side_message(c: &EACQCode, p: &EACQCode) -> Result<EACQCode> {
    let (rc, rp) = (c.registers(), p.registers());
    if rc.m % rp.v != 0 || rp.m != 1 {
        return Err(Error::Composition(format!(
            "{} needs {} messages per use inside the code, which has |M| = {}",
            p.name(),
            rp.v,
            rc.m
        )));
    }
    let regs = Registers {
        m: rc.m / rp.v,
        v: rc.v,
        x: rc.x * rp.x,
        w: rc.w * rp.w,
        ta: rc.ta * rp.ta,
        tb: rc.tb * rp.tb,
        ta_out: rc.ta_out * rp.ta_out,
        tb_out: rc.tb_out * rp.tb_out,
        a: rc.a.clone(),
        b: rc.b.clone(),
    };
    let parts = shared_states(c, p)?;

    let enc_in = layout_of(&[
        (s("c.X"), rc.x),
        (s("p.X"), rp.x),
        (s("c.TA"), rc.ta),
        (s("p.TA"), rp.ta),
    ])?;
    let mut enc_out_order = vec![s("c.TA'"), s("p.TA'")];
    enc_out_order.extend(names("c.", &rc.a));
    enc_out_order.extend([s("c.W"), s("p.W")]);
    let c_enc_out = rc.encoder_output()?.prefixed("c.");
    let p_enc_out = rp.encoder_output()?.prefixed("p.");
    let mut encoders = Vec::with_capacity(regs.m);
    for mc in 0..regs.m {
        let mut branches = vec![Vec::new(); regs.v];
        for (vp, p_ops) in p.encoders()[0].branches().iter().enumerate() {
            let c_branches = c.encoders()[mc * rp.v + vp].branches();
            for kp in p_ops {
                for (vc, c_ops) in c_branches.iter().enumerate() {
                    for kc in c_ops {
                        let steps = [
                            Step {
                                op: kp,
                                targets: vec![s("p.X"), s("p.TA")],
                                op_in: vec![rp.x, rp.ta],
                                op_out: p_enc_out.clone(),
                            },
                            Step {
                                op: kc,
                                targets: vec![s("c.X"), s("c.TA")],
                                op_in: vec![rc.x, rc.ta],
                                op_out: c_enc_out.clone(),
                            },
                        ];
                        branches[vc].push(compile(&enc_in, &steps, &enc_out_order)?);
                    }
                }
            }
        }
        encoders.push(Instrument::new(regs.encoder_input(), regs.encoder_output()?, branches)?);
    }

    let mut dec_in_parts: Vec<(String, usize)> = rc.b.prefixed("c.").parts().to_vec();
    dec_in_parts.extend([
        (s("c.W"), rc.w),
        (s("p.W"), rp.w),
        (s("c.TB"), rc.tb),
        (s("p.TB"), rp.tb),
    ]);
    let dec_in = layout_of(&dec_in_parts)?;
    let dec_out_order = vec![s("c.X^"), s("p.X^"), s("c.TB'"), s("p.TB'")];
    let mut c_targets = names("c.", &rc.b);
    c_targets.extend([s("c.W"), s("c.TB")]);
    let mut c_in_dims = rc.b.dims();
    c_in_dims.extend([rc.w, rc.tb]);
    let c_dec_out = rc.decoder_output().prefixed("c.");
    let p_dec_out = rp.decoder_output().prefixed("p.");
    let mut decoders = Vec::with_capacity(regs.v);
    for dec in c.decoders() {
        let mut branches = vec![Vec::new(); regs.m];
        for (m, c_ops) in dec.branches().iter().enumerate() {
            let (mc, vp) = (m / rp.v, m % rp.v);
            for kc in c_ops {
                for p_ops in p.decoders()[vp].branches() {
                    for kp in &p_ops {
                        let steps = [
                            Step {
                                op: kc,
                                targets: c_targets.clone(),
                                op_in: c_in_dims.clone(),
                                op_out: c_dec_out.clone(),
                            },
                            Step {
                                op: kp,
                                targets: vec![s("p.W"), s("p.TB")],
                                op_in: vec![rp.w, rp.tb],
                                op_out: p_dec_out.clone(),
                            },
                        ];
                        branches[mc].push(compile(&dec_in, &steps, &dec_out_order)?);
                    }
                }
            }
        }
        decoders.push(Instrument::new(regs.decoder_input()?, regs.decoder_output(), branches)?);
    }
    EACQCode::new(c.name(), regs, parts.phi_i, parts.phi_f, encoders, decoders, c.params())
}

/// Dense-coding-style routing: the protocol's noiseless qudit W_p is sent as
/// the last factor of the code's quantum input X = X_r ⊗ W_p.
fn route_quantum(c: &EACQCode, p: &EACQCode) -> Result<EACQCode> {
    let (rc, rp) = (c.registers(), p.registers());
    if rc.x % rp.w != 0 {
        return Err(Error::Composition(format!(
            "{} sends a {}-dimensional qudit; the code's quantum input has dimension {}",
            p.name(),
            rp.w,
            rc.x
        )));
    }
    let xr = rc.x / rp.w;
    let regs = Registers {
        m: rc.m * rp.m,
        v: rc.v * rp.v,
        x: xr * rp.x,
        w: rc.w,
        ta: rc.ta * rp.ta,
        tb: rc.tb * rp.tb,
        ta_out: rc.ta_out * rp.ta_out,
        tb_out: rc.tb_out * rp.tb_out,
        a: rc.a.clone(),
        b: rc.b.clone(),
    };
    let parts = shared_states(c, p)?;

    let enc_in = layout_of(&[
        (s("c.Xr"), xr),
        (s("p.X"), rp.x),
        (s("c.TA"), rc.ta),
        (s("p.TA"), rp.ta),
    ])?;
    let mut enc_out_order = vec![s("c.TA'"), s("p.TA'")];
    enc_out_order.extend(names("c.", &rc.a));
    enc_out_order.push(s("c.W"));
    // The protocol's W output is named as the code's X slot.
    let p_enc_out = layout_of(&[(s("p.TA'"), rp.ta_out), (s("c.Xs"), rp.w)])?;
    let c_enc_out = rc.encoder_output()?.prefixed("c.");
    let mut encoders = Vec::with_capacity(regs.m);
    for m in 0..regs.m {
        let (mc, mp) = (m / rp.m, m % rp.m);
        let mut branches = vec![Vec::new(); regs.v];
        for (vp, p_ops) in p.encoders()[mp].branches().iter().enumerate() {
            for kp in p_ops {
                for (vc, c_ops) in c.encoders()[mc].branches().iter().enumerate() {
                    for kc in c_ops {
                        let steps = [
                            Step {
                                op: kp,
                                targets: vec![s("p.X"), s("p.TA")],
                                op_in: vec![rp.x, rp.ta],
                                op_out: p_enc_out.clone(),
                            },
                            Step {
                                op: kc,
                                targets: vec![s("c.Xr"), s("c.Xs"), s("c.TA")],
                                op_in: vec![xr, rp.w, rc.ta],
                                op_out: c_enc_out.clone(),
                            },
                        ];
                        branches[vc * rp.v + vp].push(compile(&enc_in, &steps, &enc_out_order)?);
                    }
                }
            }
        }
        encoders.push(Instrument::new(regs.encoder_input(), regs.encoder_output()?, branches)?);
    }

    let mut dec_in_parts: Vec<(String, usize)> = rc.b.prefixed("c.").parts().to_vec();
    dec_in_parts.extend([(s("c.W"), rc.w), (s("c.TB"), rc.tb), (s("p.TB"), rp.tb)]);
    let dec_in = layout_of(&dec_in_parts)?;
    let dec_out_order = vec![s("c.X^r"), s("p.X^"), s("c.TB'"), s("p.TB'")];
    let mut c_targets = names("c.", &rc.b);
    c_targets.extend([s("c.W"), s("c.TB")]);
    let mut c_in_dims = rc.b.dims();
    c_in_dims.extend([rc.w, rc.tb]);
    let c_dec_out = layout_of(&[(s("c.X^r"), xr), (s("p.W"), rp.w), (s("c.TB'"), rc.tb_out)])?;
    let p_dec_out = rp.decoder_output().prefixed("p.");
    let mut decoders = Vec::with_capacity(regs.v);
    for v in 0..regs.v {
        let (vc, vp) = (v / rp.v, v % rp.v);
        let mut branches = vec![Vec::new(); regs.m];
        for (mc, c_ops) in c.decoders()[vc].branches().iter().enumerate() {
            for kc in c_ops {
                for (mp, p_ops) in p.decoders()[vp].branches().iter().enumerate() {
                    for kp in p_ops {
                        let steps = [
                            Step {
                                op: kc,
                                targets: c_targets.clone(),
                                op_in: c_in_dims.clone(),
                                op_out: c_dec_out.clone(),
                            },
                            Step {
                                op: kp,
                                targets: vec![s("p.W"), s("p.TB")],
                                op_in: vec![rp.w, rp.tb],
                                op_out: p_dec_out.clone(),
                            },
                        ];
                        branches[mc * rp.m + mp].push(compile(&dec_in, &steps, &dec_out_order)?);
                    }
                }
            }
        }
        decoders.push(Instrument::new(regs.decoder_input()?, regs.decoder_output(), branches)?);
    }
    EACQCode::new(c.name(), regs, parts.phi_i, parts.phi_f, encoders, decoders, c.params())
}
