//! Writes a codebook to NPY and CSV, reads both back, and shows how
//! malformed files are reported.
//!
//!     cargo run --release --example npy_roundtrip

use codebook_prior::io::{load_codebook, save_codebook_with, Format, Precision};
use codebook_prior::npy::{self, NpyData};
use codebook_prior::{generate_synthetic, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("codebook-prior-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let codebook = generate_synthetic(&SyntheticSpec::standard(4, 3))?;

    for (name, format, precision) in [
        ("cb32.npy", Format::Npy, Precision::F32),
        ("cb64.npy", Format::Npy, Precision::F64),
        ("cb.csv", Format::Csv, Precision::F64),
    ] {
        let path = dir.join(name);
        save_codebook_with(&codebook, &path, format, precision)?;
        let back = load_codebook(&path, format)?;
        let worst = codebook
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{name:>8}: {} bytes, {}x{}, max abs error {worst:.2e}",
            std::fs::metadata(&path)?.len(),
            back.n_tokens(),
            back.dim()
        );
    }

    // a rank-1 array is not a codebook
    let flat = dir.join("flat.npy");
    npy::write_file(&flat, &[4], &NpyData::F64(vec![1.0, 2.0, 3.0, 4.0]))?;
    println!("rank 1: {}", load_codebook(&flat, Format::Npy).unwrap_err());

    // truncated payload
    let bytes = std::fs::read(dir.join("cb64.npy"))?;
    let cut = dir.join("cut.npy");
    std::fs::write(&cut, &bytes[..bytes.len() - 5])?;
    println!("truncated: {}", load_codebook(&cut, Format::Npy).unwrap_err());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
