//! Characterizes the bundled oscillator model under the default ordering.
//!
//! `cargo run -p starbdd --example oscillator`

use starbdd::bdd::VariableOrder;
use starbdd::geometry::DEFAULT_NEGATION_EPS;
use starbdd::report::Analysis;
use starbdd::spec::load_model;

fn main() -> starbdd::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/oscillator.json");
    let analysis = Analysis::new(load_model(path)?, DEFAULT_NEGATION_EPS)?;
    println!("unsafe steps: {:?}", analysis.indices);
    let order = VariableOrder::identity(analysis.k());
    for equivalence in [None, Some("farkas-milp")] {
        let Some((bdd, paths)) = analysis.characterize(&order, equivalence)? else {
            println!("safe");
            return Ok(());
        };
        let stats = bdd.stats();
        println!("reduced={} N={} W={}", bdd.is_reduced(), stats.nodes, stats.width);
        for c in &paths {
            println!("  {}", c.time_string());
        }
    }
    Ok(())
}
