//! Canonical JSON files: instances, allocations, share reports and solver
//! results.
//!
//! Rationals travel as `"p/q"` strings in lowest terms (integers as
//! `"p"`), good sets as ascending arrays and weight maps with numerically
//! ordered good-id keys. Output is pretty-printed with a trailing newline,
//! so equal values always produce equal bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Agent, Allocation, GoodSet, Instance, Notion, ShareValue, SuppliedPartition, Witness};
use crate::rational::{self, Rational};
use crate::valuation::{Clause, Valuation};

/// A rational in `"p/q"` text form; integers are also accepted on input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RationalText;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational such as \"3/4\"")
            }
            fn visit_str<E: de::Error>(self, text: &str) -> std::result::Result<RationalText, E> {
                rational::parse(text).map(RationalText).ok_or_else(|| E::custom(format!("invalid rational {text:?}")))
            }
            fn visit_i64<E: de::Error>(self, value: i64) -> std::result::Result<RationalText, E> {
                Ok(RationalText(rational::int(value)))
            }
            fn visit_u64<E: de::Error>(self, value: u64) -> std::result::Result<RationalText, E> {
                Ok(RationalText(rational::from_u64(value)))
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Good id used as an object key: written as a string, ordered numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct GoodKey(usize);

impl Serialize for GoodKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for GoodKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = GoodKey;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a good id")
            }
            fn visit_str<E: de::Error>(self, text: &str) -> std::result::Result<GoodKey, E> {
                text.parse().map(GoodKey).map_err(|_| E::custom(format!("invalid good id {text:?}")))
            }
            fn visit_u64<E: de::Error>(self, value: u64) -> std::result::Result<GoodKey, E> {
                Ok(GoodKey(value as usize))
            }
        }
        deserializer.deserialize_any(V)
    }
}

type WeightMap = BTreeMap<GoodKey, RationalText>;

fn to_weight_map(clause: &Clause) -> WeightMap {
    clause.iter().map(|(&g, w)| (GoodKey(g), RationalText(w.clone()))).collect()
}

fn from_weight_map(map: WeightMap) -> Clause {
    map.into_iter().map(|(g, w)| (g.0, w.0)).collect()
}

fn to_set(goods: Vec<usize>) -> GoodSet {
    goods.into_iter().collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ValuationFile {
    BinaryXos { clauses: Vec<Vec<usize>> },
    Xos { clauses: Vec<WeightMap> },
    Additive { weights: WeightMap },
    BinaryAdditive { desired: Vec<usize> },
}

impl From<&Valuation> for ValuationFile {
    fn from(valuation: &Valuation) -> Self {
        match valuation {
            Valuation::BinaryXos { clauses } => {
                ValuationFile::BinaryXos { clauses: clauses.iter().map(GoodSet::to_vec).collect() }
            }
            Valuation::Xos { clauses } => ValuationFile::Xos { clauses: clauses.iter().map(to_weight_map).collect() },
            Valuation::Additive { weights } => ValuationFile::Additive { weights: to_weight_map(weights) },
            Valuation::BinaryAdditive { desired } => ValuationFile::BinaryAdditive { desired: desired.to_vec() },
        }
    }
}

impl From<ValuationFile> for Valuation {
    fn from(file: ValuationFile) -> Self {
        match file {
            ValuationFile::BinaryXos { clauses } => {
                Valuation::BinaryXos { clauses: clauses.into_iter().map(to_set).collect() }
            }
            ValuationFile::Xos { clauses } => {
                Valuation::Xos { clauses: clauses.into_iter().map(from_weight_map).collect() }
            }
            ValuationFile::Additive { weights } => Valuation::Additive { weights: from_weight_map(weights) },
            ValuationFile::BinaryAdditive { desired } => Valuation::BinaryAdditive { desired: to_set(desired) },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentFile {
    entitlement: RationalText,
    valuation: ValuationFile,
}

/// A WMMS partition as stored in instance and result files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub bundles: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<RationalText>,
}

impl From<&SuppliedPartition> for PartitionFile {
    fn from(p: &SuppliedPartition) -> Self {
        PartitionFile {
            bundles: p.bundles.iter().map(GoodSet::to_vec).collect(),
            value: p.value.clone().map(RationalText),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    goods: usize,
    agents: Vec<AgentFile>,
    #[serde(rename = "wmmsPartitions", default, skip_serializing_if = "Option::is_none")]
    wmms_partitions: Option<Vec<PartitionFile>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<usize>>,
    pub complete: bool,
}

impl From<&Allocation> for AllocationFile {
    fn from(a: &Allocation) -> Self {
        AllocationFile { bundles: a.bundles.iter().map(GoodSet::to_vec).collect(), complete: a.complete }
    }
}

impl From<AllocationFile> for Allocation {
    fn from(a: AllocationFile) -> Self {
        Allocation { bundles: a.bundles.into_iter().map(to_set).collect(), complete: a.complete }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessFile {
    Partition(Vec<Vec<usize>>),
    Prices(Vec<RationalText>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareValueFile {
    pub notion: String,
    pub agent: usize,
    pub value: RationalText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
}

impl From<&ShareValue> for ShareValueFile {
    fn from(s: &ShareValue) -> Self {
        let witness = s.witness.as_ref().map(|w| match w {
            Witness::Partition(bundles) => WitnessFile::Partition(bundles.iter().map(GoodSet::to_vec).collect()),
            Witness::Prices(prices) => WitnessFile::Prices(prices.iter().cloned().map(RationalText).collect()),
        });
        ShareValueFile {
            notion: s.notion.as_str().to_string(),
            agent: s.agent,
            value: RationalText(s.value.clone()),
            witness,
        }
    }
}

impl ShareValueFile {
    pub fn into_share(self) -> Result<ShareValue> {
        let notion = match self.notion.as_str() {
            "APS" => Notion::Aps,
            "MMS" => Notion::Mms,
            "WMMS" => Notion::Wmms,
            other => return Err(Error::Schema { path: "notion".into(), message: format!("unknown notion {other:?}") }),
        };
        let witness = self.witness.map(|w| match w {
            WitnessFile::Partition(bundles) => Witness::Partition(bundles.into_iter().map(to_set).collect()),
            WitnessFile::Prices(prices) => Witness::Prices(prices.into_iter().map(|p| p.0).collect()),
        });
        Ok(ShareValue { notion, agent: self.agent, value: self.value.0, witness })
    }
}

/// Per-agent values: integers for binary valuations, rationals otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AchievedValues {
    Integers(Vec<u64>),
    Rationals(Vec<RationalText>),
}

impl AchievedValues {
    pub fn to_rationals(&self) -> Vec<Rational> {
        match self {
            AchievedValues::Integers(values) => values.iter().map(|&v| rational::from_u64(v)).collect(),
            AchievedValues::Rationals(values) => values.iter().map(|v| v.0.clone()).collect(),
        }
    }
}

/// Output of `solve`: the allocation plus instrumentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolveResultFile {
    pub allocation: AllocationFile,
    pub achieved: AchievedValues,
    pub final_guesses: Vec<u64>,
    pub passes: u64,
    pub oracle_calls: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wmms_partitions_used: Option<Vec<PartitionFile>>,
}

/// Parses JSON, reporting failures with the field path.
pub fn from_json<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        Error::Schema { path, message: err.into_inner().to_string() }
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory values always serialize");
    text.push('\n');
    text
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = from_json(text)?;
    let agents = file.agents.into_iter().map(|a| Agent::new(a.entitlement.0, a.valuation.into())).collect();
    let instance = Instance::new(file.goods, agents)?;
    match file.wmms_partitions {
        None => Ok(instance),
        Some(partitions) => instance.with_wmms_partitions(
            partitions
                .into_iter()
                .map(|p| SuppliedPartition {
                    bundles: p.bundles.into_iter().map(to_set).collect(),
                    value: p.value.map(|v| v.0),
                })
                .collect(),
        ),
    }
}

pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        goods: instance.num_goods(),
        agents: instance
            .agents()
            .iter()
            .map(|a| AgentFile { entitlement: RationalText(a.entitlement.clone()), valuation: (&a.valuation).into() })
            .collect(),
        wmms_partitions: instance.wmms_partitions().map(|ps| ps.iter().map(PartitionFile::from).collect()),
    };
    to_json(&file)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, instance_to_json(instance))?;
    Ok(())
}

pub fn allocation_to_json(allocation: &Allocation) -> String {
    to_json(&AllocationFile::from(allocation))
}

/// Reads either a bare allocation or a `solve` result and returns the
/// allocation it contains.
pub fn parse_allocation(text: &str) -> Result<Allocation> {
    let value: serde_json::Value = from_json(text)?;
    let file = if value.get("allocation").is_some() {
        from_json::<SolveResultFile>(text)?.allocation
    } else {
        from_json::<AllocationFile>(text)?
    };
    Ok(file.into())
}

pub fn shares_to_json(shares: &[ShareValue]) -> String {
    to_json(&shares.iter().map(ShareValueFile::from).collect::<Vec<_>>())
}

pub fn parse_shares(text: &str) -> Result<Vec<ShareValue>> {
    let files: Vec<ShareValueFile> = from_json(text)?;
    files.into_iter().map(ShareValueFile::into_share).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_prop41, gen_random, gen_thm43, Family, GeneratorSpec};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    const THM43: &str = r#"{
  "goods": 3,
  "agents": [
    {"entitlement": "1/3", "valuation": {"type": "binary_xos", "clauses": [[0], [1]]}},
    {"entitlement": "2/3", "valuation": {"type": "binary_xos", "clauses": [[0, 1], [2]]}}
  ]
}"#;

    #[test]
    fn loads_declared_content() {
        let inst = parse_instance(THM43).unwrap();
        assert_eq!(inst, gen_thm43(2).unwrap());
    }

    #[test]
    fn entitlement_sum_is_reported() {
        let text = THM43.replace("\"2/3\"", "\"1/2\"");
        let err = parse_instance(&text).unwrap_err();
        assert_eq!(err.to_string(), "entitlements sum 5/6 ≠ 1");
    }

    #[test]
    fn dangling_good_names_the_field() {
        let text = THM43.replace("[[0], [1]]", "[[0], [7]]");
        let err = parse_instance(&text).unwrap_err();
        assert!(matches!(err, Error::DanglingGood { good: 7, goods: 3, .. }));
        assert!(err.to_string().starts_with("agents[0].valuation.clauses[1]"), "{err}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_instance(&THM43.replace("\"1/3\"", "\"1/0\"")).unwrap_err();
        assert!(err.to_string().starts_with("agents[0].entitlement"), "{err}");
        let err = parse_instance(&THM43.replace("binary_xos\", \"clauses\": [[0, 1]", "bogus\", \"clauses\": [[0, 1]"))
            .unwrap_err();
        assert!(err.to_string().starts_with("agents[1].valuation"), "{err}");
        let err = parse_instance(&THM43.replace("\"goods\": 3", "\"goods\": -3")).unwrap_err();
        assert!(err.to_string().starts_with("goods"), "{err}");
    }

    #[test]
    fn negative_weight_is_rejected() {
        let text = r#"{"goods": 2, "agents": [{"entitlement": "1", "valuation": {"type": "additive", "weights": {"0": "1", "1": "-1/2"}}}]}"#;
        assert!(matches!(parse_instance(text), Err(Error::NegativeWeight { .. })));
    }

    #[test]
    fn canonical_form() {
        let text = r#"{"goods": 3, "agents": [
            {"entitlement": "2/6", "valuation": {"type": "xos", "clauses": [{"2": "4/2", "10": "1"}]}},
            {"entitlement": 0, "valuation": {"type": "binary_additive", "desired": [2, 0, 2]}}
        ]}"#;
        // good 10 dangles and the second entitlement is zero; fix both and check normalisation
        let text = text.replace("\"10\"", "\"1\"").replace("\"entitlement\": 0", "\"entitlement\": \"4/6\"");
        let inst = parse_instance(&text).unwrap();
        let out = instance_to_json(&inst);
        assert!(out.contains("\"1/3\""));
        assert!(out.contains("\"2/3\""));
        assert!(out.find("\"1\": \"1\"").unwrap() < out.find("\"2\": \"2\"").unwrap());
        assert!(out.ends_with("}\n"));
        assert_eq!(instance_to_json(&parse_instance(&out).unwrap()), out);
        assert_eq!(inst.valuation(1), &Valuation::BinaryAdditive { desired: [0, 2].into_iter().collect() });
    }

    #[test]
    fn weight_keys_sort_numerically() {
        let weights = (0..12).map(|g| (g, int(1))).collect();
        let inst = Instance::new(12, vec![Agent::new(int(1), Valuation::Additive { weights })]).unwrap();
        let out = instance_to_json(&inst);
        assert!(out.find("\"2\":").unwrap() < out.find("\"10\":").unwrap());
    }

    #[test]
    fn supplied_partitions_round_trip() {
        let text = THM43.trim_end().trim_end_matches('}').to_string()
            + r#", "wmmsPartitions": [{"bundles": [[0], [2, 1]]}, {"bundles": [[0], [1, 2]], "value": "2/1"}]}"#;
        let inst = parse_instance(&text).unwrap();
        let supplied = inst.wmms_partitions().unwrap();
        assert_eq!(supplied[0].bundles[1], [1, 2].into_iter().collect());
        assert_eq!(supplied[1].value, Some(int(2)));
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
        let bad = text.replace("[[0], [2, 1]]", "[[0]]");
        assert!(parse_instance(&bad).unwrap_err().to_string().starts_with("wmmsPartitions[0].bundles"));
    }

    #[test]
    fn allocation_and_result_files() {
        let allocation =
            Allocation { bundles: vec![[0].into_iter().collect(), [1, 2].into_iter().collect()], complete: true };
        let text = allocation_to_json(&allocation);
        assert_eq!(parse_allocation(&text).unwrap(), allocation);
        let result = SolveResultFile {
            allocation: (&allocation).into(),
            achieved: AchievedValues::Integers(vec![1, 2]),
            final_guesses: vec![1, 2],
            passes: 1,
            oracle_calls: 2,
            wmms_partitions_used: None,
        };
        let text = to_json(&result);
        assert!(text.contains("\"finalGuesses\""));
        assert!(!text.contains("wmmsPartitionsUsed"));
        assert_eq!(from_json::<SolveResultFile>(&text).unwrap(), result);
        assert_eq!(parse_allocation(&text).unwrap(), allocation);
        let rationals = AchievedValues::Rationals(vec![RationalText(ratio(1, 2))]);
        let back: AchievedValues = from_json(&to_json(&rationals)).unwrap();
        assert_eq!(back.to_rationals(), vec![ratio(1, 2)]);
    }

    #[test]
    fn share_values_round_trip() {
        let shares = vec![
            ShareValue {
                notion: Notion::Wmms,
                agent: 0,
                value: ratio(1, 2),
                witness: Some(Witness::Partition(vec![GoodSet::new()])),
            },
            ShareValue {
                notion: Notion::Aps,
                agent: 1,
                value: int(0),
                witness: Some(Witness::Prices(vec![ratio(1, 3)])),
            },
            ShareValue { notion: Notion::Mms, agent: 1, value: int(2), witness: None },
        ];
        let text = shares_to_json(&shares);
        assert!(text.contains("\"value\": \"1/2\""));
        assert_eq!(parse_shares(&text).unwrap(), shares);
    }

    #[test]
    fn generated_families_round_trip() {
        let mut instances = vec![gen_thm43(3).unwrap(), gen_prop41(3, &ratio(1, 5)).unwrap()];
        for family in [Family::RandomBinaryXos, Family::RandomBinaryAdditive, Family::RandomXos, Family::RandomAdditive]
        {
            instances.push(gen_random(&GeneratorSpec::new(family, 3, 6, 11)).unwrap());
        }
        for inst in instances {
            let text = instance_to_json(&inst);
            assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }

    proptest! {
        #[test]
        fn random_instances_round_trip(seed in any::<u64>(), n in 1usize..5, m in 1usize..9, family in 0usize..4) {
            let family = [Family::RandomBinaryXos, Family::RandomBinaryAdditive, Family::RandomXos, Family::RandomAdditive][family];
            let inst = gen_random(&GeneratorSpec::new(family, n, m, seed)).unwrap();
            let text = instance_to_json(&inst);
            prop_assert_eq!(&parse_instance(&text).unwrap(), &inst);
            prop_assert_eq!(instance_to_json(&parse_instance(&text).unwrap()), text);
        }
    }
}
