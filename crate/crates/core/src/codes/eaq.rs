//! Small maximal-entanglement EAQ codes over qubits: a seeded search over
//! random Clifford encoders, decoders built by Uhlmann's theorem, and frozen
//! fixtures of the shipped instances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{is_prime, labels, phi_trivial, simulate, block_erasure_for, CodeParams, EACQCode, Instrument, Registers};
use crate::channels::{input_layout, output_layout, subsets};
use crate::config::TOL_ALG;
use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, tensor, DensityMatrix, SystemLayout, C64};
use crate::sparse::SparseOp;

/// Largest encoder dimension q^n the search handles.
const MAX_ENCODER_DIM: usize = 1 << 10;

/// Decoupling tolerance for ρ_{R A_J} = ρ_R ⊗ ρ_{A_J}.
const DECOUPLED: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    /// Discrete Fourier transform (Hadamard for q = 2).
    F(usize),
    /// Quadratic phase |j⟩ ↦ exp(iπ(q+1)j²/q)|j⟩.
    P(usize),
    /// |a, b⟩ ↦ |a, b + a⟩ on (control, target).
    Sum(usize, usize),
}

/// Gate list on n qudits of prime dimension q; qudit 0 is the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub n: usize,
    pub q: usize,
    pub gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn random<R: Rng + ?Sized>(n: usize, q: usize, len: usize, rng: &mut R) -> CliffordCircuit {
        let gates = (0..len)
            .map(|_| match rng.random_range(0..3) {
                0 => Gate::F(rng.random_range(0..n)),
                1 => Gate::P(rng.random_range(0..n)),
                _ if n < 2 => Gate::F(0),
                _ => {
                    let c = rng.random_range(0..n);
                    let t = (c + rng.random_range(1..n)) % n;
                    Gate::Sum(c, t)
                }
            })
            .collect();
        CliffordCircuit { n, q, gates }
    }

    pub fn unitary(&self) -> DMatrix<C64> {
        let (n, q) = (self.n, self.q);
        let dims = SystemLayout::numbered("c", n, q);
        let dim = dims.total_dim();
        let mut u = DMatrix::<C64>::identity(dim, dim);
        let w = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % q) as f64 / q as f64);
        let f = 1.0 / (q as f64).sqrt();
        for g in &self.gates {
            let mut gm = DMatrix::<C64>::zeros(dim, dim);
            for x in 0..dim {
                let d = dims.digits(x);
                match *g {
                    Gate::F(k) => {
                        for y in 0..q {
                            let mut e = d.clone();
                            e[k] = y;
                            gm[(dims.index(&e), x)] = w(d[k] * y) * f;
                        }
                    }
                    Gate::P(k) => {
                        let j = d[k] as f64;
                        gm[(x, x)] = C64::from_polar(1.0, std::f64::consts::PI * (q as f64 + 1.0) * j * j / q as f64);
                    }
                    Gate::Sum(c, t) => {
                        let mut e = d.clone();
                        e[t] = (d[t] + d[c]) % q;
                        gm[(dims.index(&e), x)] = C64::new(1.0, 0.0);
                    }
                }
            }
            u = gm * u;
        }
        u
    }
}

/// Encoded state `(I_R ⊗ U ⊗ I_TB)(Φ^{RX} ⊗ Φ^{T_A T_B})` on R, A1..An, TB.
fn encoded_state(u: &DMatrix<C64>, n: usize, k: usize, q: usize) -> Result<DensityMatrix> {
    let (dx, de) = (q.pow(k as u32), q.pow((n - k) as u32));
    let dim_a = q.pow(n as u32);
    let mut psi = DVector::<C64>::zeros(dx * dim_a * de);
    let s = 1.0 / ((dx * de) as f64).sqrt();
    for r in 0..dx {
        for t in 0..de {
            let col = r * de + t;
            for a in 0..dim_a {
                psi[(r * dim_a + a) * de + t] += u[(a, col)] * s;
            }
        }
    }
    let mut parts = vec![(labels::R.to_string(), dx)];
    parts.extend(input_layout(n, q).parts().iter().cloned());
    parts.push((labels::TB.to_string(), de));
    DensityMatrix::pure(SystemLayout::new(parts)?, &psi)
}

/// True when R is decoupled from every set of `w` channel inputs.
fn decoupled(state: &DensityMatrix, n: usize, w: usize) -> Result<bool> {
    for j in subsets(&(1..=n).collect::<Vec<_>>(), w) {
        let a: Vec<String> = j.iter().map(|i| format!("A{i}")).collect();
        let mut keep = vec![labels::R.to_string()];
        keep.extend(a.iter().cloned());
        let joint = partial_trace(state, &keep)?;
        let prod = tensor(&partial_trace(state, &[labels::R])?, &partial_trace(state, &a)?)?;
        if (joint.matrix() - prod.matrix()).camax() > DECOUPLED {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hermitian square root of a positive semidefinite matrix.
fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint()
}

/// Decoder instrument: for each erasure pattern J with |J| ≤ w, Uhlmann's
/// isometry taking Bob's share of the encoded state to Φ^{RX̂} ⊗ ξ; every
/// other input is mapped to |0⟩.
fn uhlmann_decoder(state: &DensityMatrix, regs: &Registers, n: usize, q: usize, w: usize) -> Result<Instrument> {
    let (dx, de) = (regs.x, regs.tb);
    let dec_in = regs.decoder_input()?;
    let in_dim = dec_in.total_dim();
    let (_, psi) = state.top_eigenvector();
    let sl = state.layout().clone();
    let mut ops: Vec<SparseOp> = Vec::new();
    let mut covered = vec![false; in_dim];
    let one = C64::new(1.0, 0.0);
    let positions: Vec<usize> = (0..n).collect();
    for size in 0..=w {
        for jset in subsets(&positions, size) {
            let bob: Vec<usize> = positions.iter().copied().filter(|p| !jset.contains(p)).collect();
            let dj = q.pow(jset.len() as u32);
            let db = q.pow(bob.len() as u32) * de;
            // Ψ with rows (r, a_J) and columns (a_{J^c}, tb).
            let mut big = DMatrix::<C64>::zeros(dx * dj, db);
            for (g, &amp) in psi.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let d = sl.digits(g);
                let r = d[0];
                let tb = d[n + 1];
                let aj = jset.iter().fold(0, |acc, &p| acc * q + d[1 + p]);
                let ab = bob.iter().fold(0, |acc, &p| acc * q + d[1 + p]);
                big[(r * dj + aj, ab * de + tb)] += amp;
            }
            let mut rho_j = DMatrix::<C64>::zeros(dj, dj);
            let rho = &big * big.adjoint();
            for r in 0..dx {
                rho_j += rho.view((r * dj, r * dj), (dj, dj));
            }
            let sq = psd_sqrt(&rho_j);
            let chi = DMatrix::from_fn(dx * dj, dx * dj, |row, col| {
                let (r, a) = (row / dj, row % dj);
                let (x, e) = (col / dj, col % dj);
                if r == x {
                    sq[(a, e)] / (dx as f64).sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let pinv = big
                .clone()
                .pseudo_inverse(1e-10)
                .map_err(|e| Error::Verification(format!("pseudo-inverse failed: {e}")))?;
            let v = (pinv * chi).transpose();
            // Column of the decoder input for Bob's index (a_{J^c}, tb).
            let column = |idx: usize| {
                let (mut ab, tb) = (idx / de, idx % de);
                let mut digits = vec![q; n];
                for &p in bob.iter().rev() {
                    digits[p] = ab % q;
                    ab /= q;
                }
                let b = digits.iter().fold(0, |acc, &x| acc * (q + 1) + x);
                b * de + tb
            };
            for e in 0..dj {
                let mut t = Vec::new();
                for x in 0..dx {
                    for idx in 0..db {
                        let val = v[(x * dj + e, idx)];
                        if val.norm_sqr() > 1e-30 {
                            t.push((x, column(idx), val));
                        }
                    }
                }
                if !t.is_empty() {
                    ops.push(SparseOp::from_triplets(dx, in_dim, t));
                }
            }
            let proj = v.adjoint() * &v;
            let comp = DMatrix::<C64>::identity(db, db) - proj;
            let eig = comp.symmetric_eigen();
            for (i, &lam) in eig.eigenvalues.iter().enumerate() {
                if lam > 0.5 {
                    let c = eig.eigenvectors.column(i);
                    let t = (0..db)
                        .filter(|&idx| c[idx].norm_sqr() > 1e-30)
                        .map(|idx| (0, column(idx), c[idx].conj()))
                        .collect();
                    ops.push(SparseOp::from_triplets(dx, in_dim, t));
                }
            }
            for idx in 0..db {
                covered[column(idx)] = true;
            }
        }
    }
    for (idx, done) in covered.iter().enumerate() {
        if !done {
            ops.push(SparseOp::from_triplets(dx, in_dim, vec![(0, idx, one)]));
        }
    }
    Instrument::new(dec_in, regs.decoder_output(), vec![ops])
}

/// Code from an encoder unitary on k data qubits followed by n − k halves of
/// ebits, or `None` if some n − k erasures are not decoupled from R.
fn eaq_from_unitary(u: &DMatrix<C64>, n: usize, d: usize, q: usize) -> Result<Option<EACQCode>> {
    let k = n + 1 - d;
    let state = encoded_state(u, n, k, q)?;
    if !decoupled(&state, n, d - 1)? {
        return Ok(None);
    }
    let (dx, de) = (q.pow(k as u32), q.pow((d - 1) as u32));
    let regs = Registers {
        m: 1,
        v: 1,
        x: dx,
        w: 1,
        ta: de,
        tb: de,
        ta_out: 1,
        tb_out: 1,
        a: input_layout(n, q),
        b: output_layout(n, q),
    };
    let encoder = Instrument::new(regs.encoder_input(), regs.encoder_output()?, vec![vec![SparseOp::from_dense(u)]])?;
    let decoder = uhlmann_decoder(&state, &regs, n, q, d - 1)?;
    let code = EACQCode::new(
        format!("eaq:{n},{d},{q}"),
        regs,
        DensityMatrix::maximally_entangled(labels::TA, labels::TB, de)?,
        phi_trivial(labels::TA_OUT, labels::TB_OUT)?,
        vec![encoder],
        vec![decoder],
        Some(CodeParams {
            n,
            k: k as i64,
            c: 0,
            d,
            e: (d - 1) as i64,
            q,
        }),
    )?;
    Ok(Some(code))
}

/// A certified search result.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub code: EACQCode,
    pub circuit: CliffordCircuit,
    pub seed: u64,
    pub attempts: usize,
    pub epsilon: f64,
}

impl SearchOutcome {
    /// Fixture bundle: the code plus the search provenance.
    pub fn to_fixture(&self) -> Value {
        let mut v = self.code.to_json();
        v["provenance"] = json!({
            "seed": self.seed,
            "attempts": self.attempts,
            "circuit": self.circuit,
            "epsilon": self.epsilon,
        });
        v
    }
}

/// Seeded search over random Clifford encoders for a code of length n and
/// distance d over prime q, using d − 1 ebits. The first candidate whose
/// reference is decoupled from every d − 1 inputs is certified by the
/// pipeline simulator.
pub fn search_eaq(n: usize, d: usize, q: usize, seed: u64, max_attempts: usize) -> Result<SearchOutcome> {
    if !is_prime(q as u64) {
        return Err(Error::NotImplemented(format!("the encoder search covers prime q only, got {q}")));
    }
    if d < 2 || d > n || q.checked_pow(n as u32).is_none_or(|dim| dim > MAX_ENCODER_DIM) {
        return Err(Error::Domain(format!(
            "search needs 2 ≤ d ≤ n and q^n ≤ {MAX_ENCODER_DIM}, got n = {n}, d = {d}, q = {q}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let len = rng.random_range(n..=6 * n);
        let circuit = CliffordCircuit::random(n, q, len, &mut rng);
        let Some(code) = eaq_from_unitary(&circuit.unitary(), n, d, q)? else {
            continue;
        };
        let epsilon = simulate(&code, &block_erasure_for(&code, d - 1)?)?.epsilon;
        if epsilon <= TOL_ALG {
            return Ok(SearchOutcome {
                code,
                circuit,
                seed,
                attempts: attempt,
                epsilon,
            });
        }
    }
    Err(Error::Verification(format!(
        "no certified encoder for n = {n}, d = {d}, q = {q} within {max_attempts} attempts"
    )))
}

const FIXTURES: [(&str, &str); 2] = [
    ("eaq_2_2_3", include_str!("../../fixtures/eaq_2_2_3.json")),
    ("eaq_3_2_2", include_str!("../../fixtures/eaq_3_2_2.json")),
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.0).collect()
}

/// Raw JSON of a shipped fixture.
pub fn eaq_fixture(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|f| f.0 == name)
        .map(|f| f.1)
        .ok_or_else(|| Error::Parse(format!("unknown fixture '{name}' (have {:?})", fixture_names())))
}

/// Parse a fixture bundle; when it records a circuit, the encoder must equal
/// the circuit's unitary.
pub fn load_fixture(text: &str) -> Result<EACQCode> {
    let v: Value = serde_json::from_str(text)?;
    let code = EACQCode::from_json(&v)?;
    if let Some(c) = v.get("provenance").and_then(|p| p.get("circuit")) {
        let circuit: CliffordCircuit = serde_json::from_value(c.clone())?;
        let u = circuit.unitary();
        let enc = code.encoders()[0].branches()[0][0].to_dense();
        if enc.shape() != u.shape() || (enc - u).camax() > TOL_ALG {
            return Err(Error::Verification("fixture encoder does not match its circuit".into()));
        }
    }
    Ok(code)
}

/// The shipped maximal-entanglement instances: (n, d, q) = (3, 2, 2) and
/// (2, 2, 3). No qubit code with (n, d) = (2, 2) exists: R would be
/// decoupled from each of A1, A2, T_B and recoverable from any two, making
/// the 4-qubit state absolutely maximally entangled.
pub fn max_ent_eaq_small(n: usize, d: usize, q: usize) -> Result<EACQCode> {
    let name = match (n, d, q) {
        (3, 2, 2) => "eaq_3_2_2",
        (2, 2, 3) => "eaq_2_2_3",
        (2, 2, 2) => {
            return Err(Error::Domain(
                "no (2,2,2) maximal-entanglement code exists: it would be a 4-qubit absolutely \
                 maximally entangled state; use (2,2,3)"
                    .into(),
            ))
        }
        _ => {
            return Err(Error::NotImplemented(format!(
                "maximal-entanglement instance ({n},{d},{q}) is not shipped; only (3,2,2) and (2,2,3) \
                 are certified, and the general construction is left open"
            )))
        }
    };
    load_fixture(eaq_fixture(name)?)
}
