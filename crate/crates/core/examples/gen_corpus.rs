//! Regenerates the `.aag` files under `benchmarks/`.
use boolgebra::aig::write_aiger_file;
use boolgebra::corpus::bundled;

fn main() -> boolgebra::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks");
    std::fs::create_dir_all(&dir)?;
    for (name, aig) in bundled() {
        let path = dir.join(format!("{name}.aag"));
        write_aiger_file(&aig, &path)?;
        println!("{}: {} inputs, {} outputs, {} gates", path.display(), aig.num_inputs(), aig.outputs().len(), aig.size());
    }
    Ok(())
}
