use fairshare::io::{instance_to_json, parse_instance};
use fairshare::rational::ratio;
use fairshare::{gen_prop41, gen_thm43};

#[test]
fn thm43_matches_golden_file() {
    let golden = parse_instance(include_str!("golden/thm43_n3.json")).unwrap();
    let generated = gen_thm43(3).unwrap();
    assert_eq!(generated, golden);
    assert_eq!(instance_to_json(&generated), instance_to_json(&golden));
}

#[test]
fn prop41_matches_golden_file() {
    let golden = parse_instance(include_str!("golden/prop41_n3_eps_1_5.json")).unwrap();
    assert_eq!(gen_prop41(3, &ratio(1, 5)).unwrap(), golden);
}
