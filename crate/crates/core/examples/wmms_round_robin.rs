//! 1/n-WMMS for general XOS valuations: every agent picks from the bundle
//! its own WMMS partition intends for it.

use fairshare::rational::from_u64;
use fairshare::wmms::oracle_partitions;
use fairshare::{gen_random, wmms_round_robin, Family, GeneratorSpec, OracleLimits};

fn main() -> fairshare::Result<()> {
    let instance = gen_random(&GeneratorSpec::new(Family::RandomXos, 3, 7, 3))?;
    let partitions = oracle_partitions(&instance, &OracleLimits::default())?;
    let result = wmms_round_robin(&instance, &partitions)?;
    let n = from_u64(instance.n() as u64);

    println!("rounds: {}", result.rounds);
    for (i, target) in result.targets.iter().enumerate() {
        println!(
            "agent {i}: WMMS {}, target {} (slot {}, clause {}), received {} worth {}",
            partitions[i].value,
            target.bundle,
            target.partition_slot,
            target.clause_index,
            result.allocation.bundles[i],
            result.achieved[i],
        );
        assert!(result.received_clause_value[i].clone() * &n >= result.target_clause_value[i]);
        assert!(result.achieved[i].clone() * &n >= partitions[i].value);
    }
    Ok(())
}
