//! Exact APS, MMS and WMMS values with their witnesses.

use fairshare::shares::{all_shares, blocking_witness_holds};
use fairshare::{gen_thm43, Notion, OracleLimits, Witness};

fn main() -> fairshare::Result<()> {
    let instance = gen_thm43(3)?;
    let limits = OracleLimits::default();
    for notion in [Notion::Mms, Notion::Wmms, Notion::Aps] {
        for share in all_shares(&instance, notion, &limits)? {
            print!("{} of agent {}: {}", notion.as_str(), share.agent, share.value);
            match &share.witness {
                Some(Witness::Partition(bundles)) => {
                    let text: Vec<String> = bundles.iter().map(ToString::to_string).collect();
                    println!("  partition {}", text.join(" "));
                }
                Some(Witness::Prices(prices)) => {
                    let text: Vec<String> = prices.iter().map(ToString::to_string).collect();
                    // binary valuations: the prices block the next integer value
                    let next = share.value.clone() + fairshare::rational::int(1);
                    let holds = blocking_witness_holds(&instance, share.agent, &next, prices);
                    println!("  prices [{}] block {next}: {holds}", text.join(", "));
                }
                None => println!(),
            }
        }
    }
    Ok(())
}
