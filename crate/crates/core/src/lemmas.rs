//! Subset-average entropy profiles and randomized checks of the entropy
//! inequalities behind the converse: Fannes, Alicki–Fannes, monotonicity of
//! subset averages (plain and conditional), the bound on the auxiliary
//! parameter t for d > n/2 + 1, strong subadditivity and weak monotonicity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::subsets;
use crate::config::TOL_NUM;
use crate::error::{domain_err, Error, Result};
use crate::hilbert::{
    binary_entropy, conditional_entropy, conditional_mutual_information, entropy, g_function, marginal_entropy,
    partial_trace, random_mixed, random_pure, trace_distance, CQEnsemble, DensityMatrix, SystemLayout,
};

/// Largest n for exhaustive subset enumeration.
pub const MAX_PROFILE_N: usize = 6;

/// Averages ŝ_ℓ (entropy of the U-averaged marginal) and s̄_ℓ (U-averaged
/// entropy of the marginals) over all ℓ-subsets, per site, in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetEntropyProfile {
    pub n: usize,
    /// `s_bar[ℓ-1]` = s̄_ℓ.
    pub s_bar: Vec<f64>,
    /// `s_hat[ℓ-1]` = ŝ_ℓ.
    pub s_hat: Vec<f64>,
    pub log_q: f64,
}

impl SubsetEntropyProfile {
    pub fn s_bar(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.s_bar[l - 1]
        }
    }

    pub fn s_hat(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.s_hat[l - 1]
        }
    }

    /// Reports for 0 ≤ s̄_ℓ ≤ ŝ_ℓ ≤ log q and s̄ non-increasing.
    pub fn invariant_reports(&self) -> Vec<Report> {
        let mut out = Vec::new();
        for l in 1..=self.n {
            out.push(Report::new("s_bar >= 0", 0.0, self.s_bar(l), None));
            out.push(Report::new("s_bar <= s_hat", self.s_bar(l), self.s_hat(l), None));
            out.push(Report::new("s_hat <= log q", self.s_hat(l), self.log_q, None));
            if l > 1 {
                out.push(Report::new("s_bar monotone", self.s_bar(l), self.s_bar(l - 1), None));
            }
        }
        out
    }
}

fn check_profile_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PROFILE_N {
        return domain_err(format!("subset profiles support 1 ≤ n ≤ {MAX_PROFILE_N}, got {n}"));
    }
    Ok(())
}

/// Profile of an ensemble over the factors `sites` (all of dimension q).
pub fn profile(ens: &CQEnsemble, sites: &[&str]) -> Result<SubsetEntropyProfile> {
    let n = sites.len();
    check_profile_n(n)?;
    let layout = ens.layout();
    let q = layout
        .dim_of(sites[0])
        .ok_or_else(|| Error::Layout(format!("unknown factor '{}'", sites[0])))?;
    for s in sites {
        if layout.dim_of(s) != Some(q) {
            return Err(Error::Layout(format!("factor '{s}' missing or not of dimension {q}")));
        }
    }
    let avg = ens.average();
    let idx: Vec<usize> = (0..n).collect();
    let mut s_bar = Vec::with_capacity(n);
    let mut s_hat = Vec::with_capacity(n);
    for l in 1..=n {
        let subs = subsets(&idx, l);
        let (mut bar, mut hat) = (0.0, 0.0);
        for sub in &subs {
            let labels: Vec<&str> = sub.iter().map(|&i| sites[i]).collect();
            hat += marginal_entropy(&avg, &labels)?;
            for (p, s) in ens.items() {
                if *p > 0.0 {
                    bar += p * marginal_entropy(s, &labels)?;
                }
            }
        }
        let norm = (l * subs.len()) as f64;
        s_bar.push(bar / norm);
        s_hat.push(hat / norm);
    }
    Ok(SubsetEntropyProfile {
        n,
        s_bar,
        s_hat,
        log_q: (q as f64).log2(),
    })
}

/// One inequality `lhs ≤ rhs` evaluated on concrete states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(name: &str, lhs: f64, rhs: f64, seed: Option<u64>) -> Report {
        Report {
            name: name.to_string(),
            lhs,
            rhs,
            pass: lhs <= rhs + TOL_NUM,
            seed,
        }
    }

    /// lhs − rhs (positive means violated).
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }

    fn with_seed(mut self, seed: u64) -> Report {
        self.seed = Some(seed);
        self
    }
}

/// (1/ℓ) E_{|I|=ℓ} S(A_I | Z).
pub fn subset_average(state: &DensityMatrix, sites: &[&str], l: usize, cond: &[&str]) -> Result<f64> {
    let idx: Vec<usize> = (0..sites.len()).collect();
    let subs = subsets(&idx, l);
    let mut acc = 0.0;
    for sub in &subs {
        let labels: Vec<&str> = sub.iter().map(|&i| sites[i]).collect();
        acc += if cond.is_empty() {
            marginal_entropy(state, &labels)?
        } else {
            conditional_entropy(state, &labels, cond)?
        };
    }
    Ok(acc / (l * subs.len()) as f64)
}

/// Both monotonicity statements for subset averages: plain and conditioned
/// on `z` (if given).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub m: usize,
    pub mu: usize,
    pub plain: Report,
    pub conditional: Option<Report>,
    pub pass: bool,
}

pub fn lemma3_check(state: &DensityMatrix, sites: &[&str], z: Option<&str>, m: usize, mu: usize) -> Result<Lemma3Report> {
    let n = sites.len();
    if !(1 <= mu && mu <= m && m <= n && n <= 5) {
        return domain_err(format!("need 1 ≤ μ ≤ m ≤ n ≤ 5, got μ={mu}, m={m}, n={n}"));
    }
    let plain = Report::new(
        "subset average (plain)",
        subset_average(state, sites, m, &[])?,
        subset_average(state, sites, mu, &[])?,
        None,
    );
    let conditional = match z {
        Some(z) => Some(Report::new(
            "subset average (conditional)",
            subset_average(state, sites, m, &[z])?,
            subset_average(state, sites, mu, &[z])?,
            None,
        )),
        None => None,
    };
    let pass = plain.pass && conditional.as_ref().is_none_or(|r| r.pass);
    Ok(Lemma3Report {
        m,
        mu,
        plain,
        conditional,
        pass,
    })
}

/// The auxiliary parameter t for d > n/2 + 1 and the inequalities it obeys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma4Report {
    pub n: usize,
    pub d: usize,
    pub t: f64,
    pub checks: Vec<Report>,
    pub pass: bool,
}

fn check_lemma4_params(n: usize, d: usize) -> Result<()> {
    if 2 * d <= n + 2 || d > n {
        return domain_err(format!("need n/2 + 1 < d ≤ n, got n={n}, d={d}"));
    }
    Ok(())
}

/// t = [(n−d+1)s̄_{n−d+1} − (d−1)s̄_{d−1}] / (n−2d+2) from a profile.
pub fn lemma4_t_from_profile(p: &SubsetEntropyProfile, d: usize) -> Result<(f64, Lemma4Report)> {
    let n = p.n;
    check_lemma4_params(n, d)?;
    let (a, b, den) = ((n - d + 1) as f64, (d - 1) as f64, n as f64 - 2.0 * d as f64 + 2.0);
    let sa = p.s_bar(n - d + 1);
    let sb = p.s_bar(d - 1);
    let t = (a * sa - b * sb) / den;
    let checks = vec![
        Report::new("t >= 0", 0.0, t, None),
        Report::new("t <= s_bar(d-1)", t, sb, None),
        Report::new("s_bar(d-1) <= log q", sb, p.log_q, None),
        Report::new("n s_bar(n) <= (n-d+1) s_bar(n-d+1) + (d-1) t", n as f64 * p.s_bar(n), a * sa + b * t, None),
        Report::new("E S(A_J) <= E S(A_I), |J|=n-d+1, |I|=d-1", a * sa, b * sb, None),
    ];
    let pass = checks.iter().all(|r| r.pass);
    Ok((t, Lemma4Report { n, d, t, checks, pass }))
}

/// Lemma-4 parameter t of a state on the factors `sites`.
pub fn lemma4_t(state: &DensityMatrix, sites: &[&str], d: usize) -> Result<(f64, Lemma4Report)> {
    check_lemma4_params(sites.len(), d)?;
    let p = profile(&CQEnsemble::single(state.clone()), sites)?;
    lemma4_t_from_profile(&p, d)
}

/// Fannes and Alicki–Fannes bounds for one pair of states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub epsilon: f64,
    pub fannes: Report,
    pub alicki_fannes: Option<Report>,
    pub pass: bool,
}

/// `a` is the system whose entropy is compared; `b` (may be empty) the
/// conditioning system of the Alicki–Fannes bound.
pub fn continuity_bounds_check(rho: &DensityMatrix, sigma: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<ContinuityReport> {
    let eps = trace_distance(rho, sigma)?;
    let ra = partial_trace(rho, a)?;
    let sa = partial_trace(sigma, a)?;
    let eps_a = trace_distance(&ra, &sa)?;
    let log_a = (ra.dim() as f64).log2();
    let fannes = Report::new(
        "Fannes",
        (entropy(&ra)? - entropy(&sa)?).abs(),
        eps_a * log_a + binary_entropy(eps_a.min(1.0))?,
        None,
    );
    let alicki_fannes = if b.is_empty() {
        None
    } else {
        Some(Report::new(
            "Alicki-Fannes",
            (conditional_entropy(rho, a, b)? - conditional_entropy(sigma, a, b)?).abs(),
            2.0 * eps * log_a + g_function(eps)?,
            None,
        ))
    };
    let pass = fannes.pass && alicki_fannes.as_ref().is_none_or(|r| r.pass);
    Ok(ContinuityReport {
        epsilon: eps,
        fannes,
        alicki_fannes,
        pass,
    })
}

/// Which randomized suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fannes,
    Af,
    Avg,
    Crazy,
    Ssa,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Fannes, Suite::Af, Suite::Avg, Suite::Crazy, Suite::Ssa];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fannes => "fannes",
            Suite::Af => "af",
            Suite::Avg => "avg",
            Suite::Crazy => "crazy",
            Suite::Ssa => "ssa",
        }
    }

    pub fn parse(s: &str) -> Result<Vec<Suite>> {
        match s {
            "all" => Ok(Suite::ALL.to_vec()),
            other => Suite::ALL
                .iter()
                .find(|x| x.name() == other)
                .map(|&x| vec![x])
                .ok_or_else(|| Error::Parse(format!("unknown suite {other:?}"))),
        }
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

/// Outcome of a randomized suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub checks: usize,
    pub passed: usize,
    /// Largest lhs − rhs seen (negative when every check has slack).
    pub worst_excess: f64,
    pub worst_seed: u64,
    /// Checks that failed within the abort threshold.
    pub failures: Vec<Report>,
}

impl SuiteSummary {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-trial seed derived from the suite seed.
pub fn trial_seed(seed: u64, suite: Suite, trial: usize) -> u64 {
    let mut z = seed
        .wrapping_add(suite.salt().wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn layout_of(prefix: &str, dims: &[usize]) -> SystemLayout {
    SystemLayout::new(dims.iter().enumerate().map(|(i, &d)| (format!("{prefix}{}", i + 1), d))).expect("distinct labels")
}

fn random_state(layout: &SystemLayout, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    if rng.random_bool(0.25) {
        Ok(random_pure(layout, rng))
    } else {
        let anc = rng.random_range(1..=layout.total_dim().min(8));
        random_mixed(layout, anc, rng)
    }
}

/// σ near ρ: a random convex perturbation, sometimes a distant state.
fn perturbed(rho: &DensityMatrix, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let other = random_state(rho.layout(), rng)?;
    let lambda: f64 = if rng.random_bool(0.1) { 1.0 } else { rng.random::<f64>().powi(3) };
    let m = rho.matrix() * crate::hilbert::C64::new(1.0 - lambda, 0.0)
        + other.matrix() * crate::hilbert::C64::new(lambda, 0.0);
    DensityMatrix::new(rho.layout().clone(), m)
}

fn trial_reports(suite: Suite, dims: Option<&[usize]>, rng: &mut ChaCha8Rng, trial: usize) -> Result<Vec<Report>> {
    match suite {
        Suite::Fannes => {
            let d = dims.map(|d| d.to_vec()).unwrap_or_else(|| vec![rng.random_range(2..=4)]);
            let l = layout_of("A", &d);
            let rho = random_state(&l, rng)?;
            let sigma = perturbed(&rho, rng)?;
            let all = l.labels();
            Ok(vec![continuity_bounds_check(&rho, &sigma, &all, &[])?.fannes])
        }
        Suite::Af => {
            let d = dims.map(|d| d.to_vec()).unwrap_or_else(|| vec![rng.random_range(2..=3), rng.random_range(2..=3)]);
            if d.len() < 2 {
                return domain_err("the Alicki-Fannes suite needs at least two factor dimensions");
            }
            let l = layout_of("A", &d);
            let rho = random_state(&l, rng)?;
            let sigma = perturbed(&rho, rng)?;
            let labels = l.labels();
            let r = continuity_bounds_check(&rho, &sigma, &labels[..1], &labels[1..])?;
            Ok(r.alicki_fannes.into_iter().collect())
        }
        Suite::Avg => {
            let n = 3 + trial % 3;
            let q = dims.and_then(|d| d.first().copied()).unwrap_or(2);
            let mut parts: Vec<(String, usize)> = (1..=n).map(|i| (format!("A{i}"), q)).collect();
            parts.push(("Z".into(), 2));
            let l = SystemLayout::new(parts)?;
            let s = random_state(&l, rng)?;
            let sites: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
            let sites: Vec<&str> = sites.iter().map(String::as_str).collect();
            let mut out = Vec::new();
            let averages: Vec<(f64, f64)> = (1..=n)
                .map(|l| Ok((subset_average(&s, &sites, l, &[])?, subset_average(&s, &sites, l, &["Z"])?)))
                .collect::<Result<_>>()?;
            for m in 1..=n {
                for mu in 1..m {
                    out.push(Report::new("subset average (plain)", averages[m - 1].0, averages[mu - 1].0, None));
                    out.push(Report::new("subset average (conditional)", averages[m - 1].1, averages[mu - 1].1, None));
                }
            }
            Ok(out)
        }
        Suite::Crazy => {
            let (n, d) = if trial % 2 == 0 { (4, 4) } else { (5, 4) };
            let q = dims.and_then(|d| d.first().copied()).unwrap_or(2);
            let l = SystemLayout::numbered("A", n, q);
            let s = random_state(&l, rng)?;
            let labels = l.labels();
            Ok(lemma4_t(&s, &labels, d)?.1.checks)
        }
        Suite::Ssa => {
            let d = dims.map(|d| d.to_vec()).unwrap_or_else(|| vec![2, 2, 2]);
            if d.len() != 3 {
                return domain_err("the SSA suite needs exactly three factor dimensions");
            }
            let l = SystemLayout::new([("A", d[0]), ("B", d[1]), ("C", d[2])])?;
            let s = random_state(&l, rng)?;
            Ok(vec![
                Report::new("SSA: -I(A:C|B) <= 0", -conditional_mutual_information(&s, &["A"], &["C"], &["B"])?, 0.0, None),
                Report::new(
                    "weak monotonicity: -(S(A|B)+S(A|C)) <= 0",
                    -(conditional_entropy(&s, &["A"], &["B"])? + conditional_entropy(&s, &["A"], &["C"])?),
                    0.0,
                    None,
                ),
            ])
        }
    }
}

/// Run `trials` seeded trials of a suite. A violation beyond 10·tol_num aborts
/// with the offending seed in the error.
pub fn run_suite(suite: Suite, trials: usize, seed: u64, dims: Option<&[usize]>) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary {
        suite,
        trials,
        checks: 0,
        passed: 0,
        worst_excess: f64::NEG_INFINITY,
        worst_seed: 0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let ts = trial_seed(seed, suite, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        for r in trial_reports(suite, dims, &mut rng, trial)? {
            let r = r.with_seed(ts);
            summary.checks += 1;
            if r.excess() > summary.worst_excess {
                summary.worst_excess = r.excess();
                summary.worst_seed = ts;
            }
            if r.excess() > 10.0 * TOL_NUM {
                return Err(Error::Verification(format!(
                    "{} suite: '{}' violated ({} > {}) at trial seed {ts}",
                    suite.name(),
                    r.name,
                    r.lhs,
                    r.rhs
                )));
            }
            if r.pass {
                summary.passed += 1;
            } else {
                summary.failures.push(r);
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::tensor;

    fn qubits(n: usize) -> SystemLayout {
        SystemLayout::numbered("A", n, 2)
    }

    #[test]
    fn profile_trivial_cases() {
        let l = qubits(3);
        let prod = DensityMatrix::basis(l.clone(), &[0, 1, 0]).unwrap();
        let p = profile(&CQEnsemble::single(prod), &["A1", "A2", "A3"]).unwrap();
        assert!(p.s_bar.iter().chain(&p.s_hat).all(|x| x.abs() < 1e-12));
        let mixed = DensityMatrix::maximally_mixed(l);
        let p = profile(&CQEnsemble::single(mixed), &["A1", "A2", "A3"]).unwrap();
        assert!(p.s_bar.iter().chain(&p.s_hat).all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn profile_hat_exceeds_bar_under_mixing() {
        let l = qubits(2);
        let e = CQEnsemble::new(vec![
            (0.5, DensityMatrix::basis(l.clone(), &[0, 0]).unwrap()),
            (0.5, DensityMatrix::basis(l, &[1, 1]).unwrap()),
        ])
        .unwrap();
        let p = profile(&e, &["A1", "A2"]).unwrap();
        assert!(p.s_bar(1).abs() < 1e-12);
        assert!((p.s_hat(1) - 1.0).abs() < 1e-12);
        assert!((p.s_hat(2) - 0.5).abs() < 1e-12);
        assert!(p.invariant_reports().iter().all(|r| r.pass));
    }

    #[test]
    fn profile_rejects_large_n() {
        let l = SystemLayout::numbered("A", 7, 2);
        let s = DensityMatrix::basis(l.clone(), &[0; 7]).unwrap();
        let labels = l.labels();
        assert!(profile(&CQEnsemble::single(s), &labels).is_err());
    }

    #[test]
    fn random_profile_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_mixed(&qubits(4), 3, &mut rng).unwrap();
        let p = profile(&CQEnsemble::single(s), &["A1", "A2", "A3", "A4"]).unwrap();
        assert!(p.s_bar(4) <= p.s_bar(2) + TOL_NUM);
    }

    #[test]
    fn lemma3_trivial_cases() {
        let l = SystemLayout::new([("A1", 2), ("A2", 2), ("A3", 2), ("Z", 2)]).unwrap();
        let one = DensityMatrix::diagonal(SystemLayout::single("A1", 2).unwrap(), &[0.3, 0.7]).unwrap();
        let mut prod = one.clone();
        for lbl in ["A2", "A3"] {
            prod = tensor(&prod, &one.relabel(&[lbl]).unwrap()).unwrap();
        }
        let prod = tensor(&prod, &DensityMatrix::basis(SystemLayout::single("Z", 2).unwrap(), &[0]).unwrap()).unwrap();
        let r = lemma3_check(&prod, &["A1", "A2", "A3"], Some("Z"), 3, 1).unwrap();
        let h = binary_entropy(0.3).unwrap();
        assert!((r.plain.lhs - h).abs() < 1e-12 && (r.plain.rhs - h).abs() < 1e-12);
        assert!(r.pass);
        let mm = DensityMatrix::maximally_mixed(l);
        let r = lemma3_check(&mm, &["A1", "A2", "A3"], Some("Z"), 2, 1).unwrap();
        assert!((r.plain.lhs - 1.0).abs() < 1e-12 && r.pass);
        assert!(lemma3_check(&mm, &["A1", "A2", "A3"], None, 1, 2).is_err());
    }

    #[test]
    fn lemma4_trivial_cases() {
        let l = qubits(4);
        let labels = l.labels();
        let (t, r) = lemma4_t(&DensityMatrix::maximally_mixed(l.clone()), &labels, 4).unwrap();
        assert!((t - 1.0).abs() < 1e-12 && r.pass);
        let (t, r) = lemma4_t(&DensityMatrix::basis(l.clone(), &[0, 1, 1, 0]).unwrap(), &labels, 4).unwrap();
        assert!(t.abs() < 1e-12 && r.pass);
        let l3 = qubits(4);
        let s = DensityMatrix::maximally_mixed(l3);
        assert!(lemma4_t(&s, &labels, 3).is_err());
    }

    #[test]
    fn continuity_trivial_cases() {
        let l = SystemLayout::single("A", 2).unwrap();
        let z = DensityMatrix::basis(l.clone(), &[0]).unwrap();
        let r = continuity_bounds_check(&z, &z, &["A"], &[]).unwrap();
        assert!(r.fannes.lhs == 0.0 && r.fannes.rhs == 0.0 && r.pass);
        let o = DensityMatrix::basis(l, &[1]).unwrap();
        let r = continuity_bounds_check(&z, &o, &["A"], &[]).unwrap();
        assert!((r.epsilon - 1.0).abs() < 1e-12);
        assert!((r.fannes.rhs - 1.0).abs() < 1e-12 && r.fannes.lhs.abs() < 1e-12);
    }

    #[test]
    fn suites_are_deterministic_and_pass() {
        for s in Suite::ALL {
            let a = run_suite(s, 20, 7, None).unwrap();
            let b = run_suite(s, 20, 7, None).unwrap();
            assert_eq!(a, b);
            assert!(a.pass(), "{:?}", a.failures);
            assert!(a.checks >= 20);
        }
    }

    #[test]
    fn suite_parse() {
        assert_eq!(Suite::parse("all").unwrap().len(), 5);
        assert_eq!(Suite::parse("af").unwrap(), vec![Suite::Af]);
        assert!(Suite::parse("nope").is_err());
    }
}
