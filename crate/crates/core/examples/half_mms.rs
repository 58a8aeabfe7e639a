//! Half-MMS allocation: the half-APS solver run with equal entitlements.

use fairshare::rational::from_u64;
use fairshare::{exact_mms, gen_random, solve_half_mms, Family, GeneratorSpec, OracleLimits};

fn main() -> fairshare::Result<()> {
    let instance = gen_random(&GeneratorSpec::new(Family::RandomBinaryXos, 4, 9, 7))?;
    let result = solve_half_mms(&instance)?;
    let limits = OracleLimits::default();
    for (i, bundle) in result.allocation.bundles.iter().enumerate() {
        let mms = exact_mms(&instance, i, &limits)?.value;
        println!("agent {i}: bundle {bundle}, value {}, MMS {mms}", result.achieved[i]);
        assert!(from_u64(2 * result.achieved[i]) >= mms);
    }
    Ok(())
}
