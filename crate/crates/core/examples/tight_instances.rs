//! The two tight families: no allocation beats 1/n-WMMS on the first,
//! and APS can be an arbitrarily small fraction of WMMS on the second.

use fairshare::generate::epsilon_for_delta;
use fairshare::rational::ratio;
use fairshare::{best_allocation_ratio, exact_aps, exact_wmms, gen_prop41, gen_thm43, OracleLimits};

fn main() -> fairshare::Result<()> {
    let limits = OracleLimits::default();
    for n in 2..=4 {
        let instance = gen_thm43(n)?;
        let shares: Vec<String> =
            (0..n).map(|i| exact_wmms(&instance, i, &limits).map(|s| s.value.to_string())).collect::<Result<_, _>>()?;
        let best = best_allocation_ratio(&instance, &limits)?;
        println!("n = {n}: WMMS = ({}), best achievable fraction {best}", shares.join(", "));
    }
    for n in [2, 3] {
        let delta = ratio(1, 8);
        let epsilon = epsilon_for_delta(n, &delta)?;
        let instance = gen_prop41(n, &epsilon)?;
        let aps = exact_aps(&instance, n - 1, &limits)?.value;
        let wmms = exact_wmms(&instance, n - 1, &limits)?.value;
        println!("n = {n}, ε = {epsilon}: APS {aps} / WMMS {wmms} = {} < {delta}", &aps / &wmms);
    }
    Ok(())
}
