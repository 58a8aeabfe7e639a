//! Generate, save, reload, solve and verify through the JSON formats.

use fairshare::cli::solve_to_file;
use fairshare::io::{self, to_json};
use fairshare::verify::{render_table, verify, Guarantee};
use fairshare::{gen_random, Family, GeneratorSpec, OracleLimits};

fn main() -> fairshare::Result<()> {
    let dir = std::env::temp_dir().join(format!("fairshare-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("instance.json");

    let instance = gen_random(&GeneratorSpec::new(Family::RandomBinaryAdditive, 3, 9, 11))?;
    io::save_instance(&instance, &path)?;
    let loaded = io::load_instance(&path)?;
    assert_eq!(loaded, instance);

    let limits = OracleLimits::default();
    let result = solve_to_file(&loaded, "wmms-binadd", &limits)?;
    let result_path = dir.join("result.json");
    std::fs::write(&result_path, to_json(&result))?;

    let allocation = io::parse_allocation(&std::fs::read_to_string(&result_path)?)?;
    let report = verify(&loaded, &allocation, Guarantee::WmmsExact, &limits)?;
    print!("{}", render_table(&report));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
