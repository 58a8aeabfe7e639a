//! Half-APS allocation for binary XOS valuations, checked against the
//! exact AnyPrice shares.

use fairshare::rational::from_u64;
use fairshare::{exact_aps, gen_random, solve_half_aps, Family, GeneratorSpec, OracleLimits};

fn main() -> fairshare::Result<()> {
    let mut spec = GeneratorSpec::new(Family::RandomBinaryXos, 3, 8, 42);
    spec.clause_count = 5;
    let instance = gen_random(&spec)?;
    let result = solve_half_aps(&instance)?;

    println!("passes: {}, oracle calls: {}", result.passes, result.oracle_calls);
    for d in &result.decrements {
        println!("pass {}: agent {} guess {} -> {}", d.pass, d.agent, d.from, d.from - 1);
    }
    let limits = OracleLimits::default();
    for (i, bundle) in result.allocation.bundles.iter().enumerate() {
        let aps = exact_aps(&instance, i, &limits)?.value;
        let guess = result.final_guesses.0[i];
        println!(
            "agent {i}: b = {}, bundle {bundle}, value {}, guess {guess}, APS {aps}",
            instance.entitlement(i),
            result.achieved[i],
        );
        assert!(from_u64(guess) >= aps);
        assert!(from_u64(2 * result.achieved[i]) >= aps);
    }
    Ok(())
}
