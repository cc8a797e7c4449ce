//! `channel`: inspect one channel spec.

use std::fs;
use std::path::Path;

use chanpure::qcore::ChannelSpec;
use chanpure::tomography::{chi_from_channel, choi_from_channel, ptm_from_channel};
use serde_json::json;

use crate::artifact::{self, RunManifest};
use crate::error::CliError;
use crate::Cli;

pub fn run(cli: &Cli, spec_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(spec_path)?;
    let spec = ChannelSpec::from_json(&text)?;
    let built = spec.build::<f64>()?;
    let kraus = built.to_kraus();

    let chi = chi_from_channel(&kraus)?;
    let ptm = ptm_from_channel(&kraus)?;
    let choi = choi_from_channel(&kraus)?;
    let choi_eigenvalues = choi.entries().hermitian_eigen().eigenvalues;
    let kraus_rank = choi_eigenvalues.iter().filter(|&&e| e > cli.tol).count();
    let cptp = kraus.is_cptp(cli.tol);

    // Artifacts land before anything is printed, so an early-closed stdout
    // (e.g. piped into `head`) can't lose them.
    let record = json!({
        "spec": serde_json::to_value(&spec).expect("specs serialize"),
        "dim": kraus.dim_in(),
        "chi": artifact::chi_json(&chi),
        "ptm": artifact::ptm_json(&ptm),
        "choi_eigenvalues": choi_eigenvalues,
        "kraus_rank": kraus_rank,
        "cptp": {
            "is_cptp": cptp.is_cptp,
            "completeness_residual": cptp.residual,
        },
    });
    let path = artifact::write_json(&cli.out, "channel.json", &record)?;

    let mut manifest = RunManifest::new(
        "channel",
        json!({
            "spec": serde_json::to_value(&spec).expect("specs serialize"),
            "tol": cli.tol,
        }),
        cli.seed,
    );
    manifest.artifacts.push(path.display().to_string());
    artifact::write_manifest(&cli.out, &manifest)?;

    println!(
        "channel: dim {}, {} Kraus operators listed, Kraus rank {}",
        kraus.dim_in(),
        kraus.ops().len(),
        kraus_rank
    );
    println!(
        "cptp: {} (completeness residual {:.3e})",
        cptp.is_cptp, cptp.residual
    );
    println!("chi matrix:");
    let entries = chi.entries();
    for r in 0..entries.rows() {
        let cells: Vec<String> = (0..entries.cols())
            .map(|c| format!("{:+.6}{:+.6}i", entries[(r, c)].re, entries[(r, c)].im))
            .collect();
        println!("  {}", cells.join("  "));
    }
    println!("noiseless component chi(I,I): {:.6}", chi.identity_element());
    println!("Pauli transfer matrix:");
    for a in 0..ptm.size() {
        let cells: Vec<String> = (0..ptm.size())
            .map(|b| format!("{:+.6}", ptm.entry(a, b)))
            .collect();
        println!("  {}", cells.join("  "));
    }
    Ok(())
}
