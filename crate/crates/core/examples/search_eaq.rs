//! Regenerate a maximal-entanglement EAQ fixture.
//!
//! `cargo run -p eacq-core --example search_eaq -- 3 2 2 1 fixtures/eaq_3_2_2.json`

use eacq_core::codes::search_eaq;

fn main() -> eacq_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [n, d, q, seed, out] = args.as_slice() else {
        eprintln!("usage: search_eaq N D Q SEED OUT.json");
        std::process::exit(64);
    };
    let parse = |s: &str| s.parse::<u64>().map_err(|e| eacq_core::Error::Parse(format!("{s}: {e}")));
    let found = search_eaq(parse(n)? as usize, parse(d)? as usize, parse(q)? as usize, parse(seed)?, 100_000)?;
    std::fs::write(out, serde_json::to_string(&found.to_fixture())? + "\n")?;
    println!(
        "{out}: {} gates after {} attempts, epsilon {:e}",
        found.circuit.gates.len(),
        found.attempts,
        found.epsilon
    );
    Ok(())
}
