//! Exact WMMS for binary additive valuations.

use fairshare::model::Agent;
use fairshare::rational::{from_u64, ratio};
use fairshare::{wmms_allocate_binadd, wmms_partition_binadd, Instance, Valuation};

fn main() -> fairshare::Result<()> {
    let desired = |goods: &[usize]| Valuation::BinaryAdditive { desired: goods.iter().copied().collect() };
    let instance = Instance::new(
        8,
        vec![
            Agent::new(ratio(1, 6), desired(&[0, 1, 2, 3, 4, 5])),
            Agent::new(ratio(1, 3), desired(&[0, 1, 2, 3])),
            Agent::new(ratio(1, 2), desired(&[2, 3, 4, 5, 6, 7])),
        ],
    )?;
    let result = wmms_allocate_binadd(&instance)?;
    for i in 0..instance.n() {
        let share = wmms_partition_binadd(&instance, i)?;
        let wanted = instance.valuation(i).desired_set().unwrap_or_default();
        let sizes: Vec<usize> = share.partition.iter().map(|b| b.intersection(&wanted).len()).collect();
        println!(
            "agent {i}: WMMS {} (desired goods split {sizes:?}), receives {} worth {}",
            share.value, result.allocation.bundles[i], result.achieved[i],
        );
        assert!(from_u64(result.achieved[i]) >= share.value);
    }
    Ok(())
}
