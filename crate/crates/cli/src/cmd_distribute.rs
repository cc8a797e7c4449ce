//! `distribute`: send one half of a Bell pair through the noise, with and
//! without purification, and test the result for entanglement.
//!
//! The noise acts one-sided: the swept channel (or its purified version)
//! is applied to the first qubit while the second stays untouched. Exact
//! mode evaluates states directly; a finite shot budget runs two-qubit
//! state tomography on both states and analyzes the reconstructions.

use rand::Rng;

use chanpure::metrics::{bell_fidelity, ppt_eigenvalues, EntanglementVerdict, PptReport};
use chanpure::purify::two_channel_purified_probs_with_visibility;
use chanpure::qcore::channel::random;
use chanpure::qcore::{bell_state, DensityMatrix, KrausChannel, PauliChannel};
use chanpure::tomography::{
    mle_state, sampling::simulate_state_tomography, MleOptions, Shots,
};
use serde_json::json;

use crate::artifact::{self, fmt_f, Csv, RunManifest};
use crate::cmd_sweep::{grid, validate};
use crate::error::CliError;
use crate::reference;
use crate::{Cli, Format, SweepArgs};

pub struct Row {
    pub p: f64,
    pub f_unpurified: f64,
    pub f_purified: f64,
    pub ppt_unpurified: PptReport<f64>,
    pub ppt_purified: PptReport<f64>,
}

pub fn verdict_label(v: EntanglementVerdict) -> &'static str {
    match v {
        EntanglementVerdict::Entangled => "entangled",
        EntanglementVerdict::Separable => "separable",
        EntanglementVerdict::IndeterminateAtTolerance => "indeterminate-at-tolerance",
    }
}

fn distributed_state(pc: &PauliChannel<f64>) -> Result<DensityMatrix<f64>, CliError> {
    let bell = bell_state::<f64>().density();
    let one_sided = pc.to_kraus().tensor(&KrausChannel::identity(2));
    Ok(one_sided.apply(&bell)?)
}

fn analyze(
    p: f64,
    unpurified: &DensityMatrix<f64>,
    purified: &DensityMatrix<f64>,
) -> Result<Row, CliError> {
    Ok(Row {
        p,
        f_unpurified: bell_fidelity(unpurified)?.value,
        f_purified: bell_fidelity(purified)?.value,
        ppt_unpurified: ppt_eigenvalues(unpurified)?,
        ppt_purified: ppt_eigenvalues(purified)?,
    })
}

fn reconstruct(
    state: &DensityMatrix<f64>,
    shots: u64,
    seed: u64,
) -> Result<DensityMatrix<f64>, CliError> {
    let records = simulate_state_tomography(state, Shots::Finite(shots), seed)?;
    let fit = mle_state(&records, &MleOptions::default())?;
    if !fit.report.converged {
        return Err(CliError::Convergence(format!(
            "state reconstruction did not converge within {} iterations",
            fit.report.iterations
        )));
    }
    Ok(fit.state)
}

pub fn compute_rows(args: &SweepArgs, seed: u64) -> Result<Vec<Row>, CliError> {
    validate(args)?;
    let mut rows = Vec::with_capacity(args.steps);
    for (i, p) in grid(args).into_iter().enumerate() {
        let q = args.family.channel(p)?;
        let (plus, _minus, _p_plus) =
            two_channel_purified_probs_with_visibility(&q, &q, args.visibility)?;
        let unpurified = distributed_state(&q)?;
        let purified = distributed_state(&plus)?;
        let row = match args.shots.0 {
            Shots::Exact => analyze(p, &unpurified, &purified)?,
            Shots::Finite(n) => {
                let mut point_rng = random::rng(seed, i as u64);
                let seed_unpurified = point_rng.gen::<u64>();
                let seed_purified = point_rng.gen::<u64>();
                analyze(
                    p,
                    &reconstruct(&unpurified, n, seed_unpurified)?,
                    &reconstruct(&purified, n, seed_purified)?,
                )?
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn run(cli: &Cli, args: &SweepArgs) -> Result<(), CliError> {
    let rows = compute_rows(args, cli.seed)?;

    let path = match cli.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "p",
                "f_unpurified",
                "f_purified",
                "entangled_unpurified",
                "entangled_purified",
            ]);
            for row in &rows {
                csv.push(vec![
                    fmt_f(row.p),
                    fmt_f(row.f_unpurified),
                    fmt_f(row.f_purified),
                    verdict_label(row.ppt_unpurified.verdict).to_string(),
                    verdict_label(row.ppt_purified.verdict).to_string(),
                ]);
            }
            artifact::write_text(&cli.out, "distribute.csv", &csv.to_text())?
        }
        Format::Json => {
            let value: Vec<_> = rows
                .iter()
                .map(|row| {
                    json!({
                        "p": row.p,
                        "f_unpurified": row.f_unpurified,
                        "f_purified": row.f_purified,
                        "entangled_unpurified": verdict_label(row.ppt_unpurified.verdict),
                        "entangled_purified": verdict_label(row.ppt_purified.verdict),
                        "min_pt_eigenvalue_unpurified": row.ppt_unpurified.min_eigenvalue,
                        "min_pt_eigenvalue_purified": row.ppt_purified.min_eigenvalue,
                    })
                })
                .collect();
            artifact::write_json(&cli.out, "distribute.json", &json!(value))?
        }
    };

    let mut manifest = RunManifest::new(
        "distribute",
        crate::cmd_sweep::config_echo(args, cli),
        cli.seed,
    );
    manifest.artifacts.push(path.display().to_string());
    artifact::write_manifest(&cli.out, &manifest)?;

    for row in &rows {
        if (row.p - 0.33).abs() < 1e-9 {
            let eigs: Vec<String> = row
                .ppt_unpurified
                .eigenvalues
                .iter()
                .map(|e| format!("{:.4}", e))
                .collect();
            println!(
                "p = 0.33: purified fidelity {:.4}, unpurified PT eigenvalues ({})  [{}]",
                row.f_purified,
                eigs.join(", "),
                reference::LABEL_IDEAL
            );
            let ref_eigs: Vec<String> = reference::DISTRIBUTE_PT_EIGENVALUES
                .iter()
                .map(|e| format!("{:.2}", e))
                .collect();
            println!(
                "p = 0.33: purified fidelity {}, unpurified PT eigenvalues ({})  [{}]",
                reference::DISTRIBUTE_PURIFIED,
                ref_eigs.join(", "),
                reference::LABEL_EXPERIMENT
            );
        }
    }
    let regained = rows
        .iter()
        .filter(|r| {
            r.ppt_unpurified.verdict != EntanglementVerdict::Entangled
                && r.ppt_purified.verdict == EntanglementVerdict::Entangled
        })
        .count();
    println!(
        "{} of {} grid points: purification turns a separable distributed state entangled",
        regained,
        rows.len()
    );
    Ok(())
}
