//! Reads a key=value configuration, applies an override and prints the
//! result.

use taintmine::pipeline::PipelineConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = PipelineConfig::parse("# tuned run\nc = 0.6\nlambda = 0.05\nembeddings = token-hash\n")?;
    cfg.set("alpha", "0.9")?;
    cfg.validate()?;
    print!("{}", cfg.render());
    if let Err(e) = PipelineConfig::parse("c = 1.5")?.validate() {
        println!("rejected: {e}");
    }
    Ok(())
}
