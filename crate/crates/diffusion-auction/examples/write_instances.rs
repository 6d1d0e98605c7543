//! Regenerates the instance documents shipped under `instances/`.
//!
//! Usage: `cargo run -p diffusion-auction --example write_instances [DIR]`

use diffusion_auction::format::serialize_instance;
use diffusion_auction::samples;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "instances".to_string());
    std::fs::create_dir_all(&dir)?;
    let files = [
        ("seven_buyers.toml", serialize_instance(&samples::seven_buyers(), None)),
        (
            "revenue_nonmonotone.toml",
            serialize_instance(&samples::revenue_nonmonotone(), None),
        ),
        ("hiding_tie.toml", serialize_instance(&samples::hiding_tie(), None)),
        ("hiding_strict.toml", serialize_instance(&samples::hiding_strict(), None)),
    ];
    for (name, text) in files {
        let path = std::path::Path::new(&dir).join(name);
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
