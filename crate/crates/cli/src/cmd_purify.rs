//! `purify`: run the two-channel purification protocol on a channel pair.
//!
//! The full circuit simulation is the source of truth; when both inputs
//! are Pauli channels the closed-form distributions are computed as well
//! and the worst disagreement is reported, which doubles as a built-in
//! self-check of the oracle pair.

use std::fs;
use std::path::Path;

use chanpure::purify::{
    simulate_purification, two_channel_purified_probs_with_visibility, two_channel_virtual_probs,
    CircuitConfig, PurificationOutcome,
};
use chanpure::qcore::{BuiltChannel, ChannelSpec, DensityMatrix, PauliChannel};
use chanpure::tomography::chi_from_channel;
use serde_json::{json, Value};

use crate::artifact::{self, RunManifest};
use crate::error::CliError;
use crate::reference;
use crate::Cli;

fn load(path: &Path) -> Result<(ChannelSpec, BuiltChannel<f64>), CliError> {
    let text = fs::read_to_string(path)?;
    let spec = ChannelSpec::from_json(&text)?;
    let built = spec.build::<f64>()?;
    Ok((spec, built))
}

struct ClosedForm {
    plus: PauliChannel<f64>,
    minus: Option<PauliChannel<f64>>,
    virt: Option<PauliChannel<f64>>,
    p_plus: f64,
}

fn max_diag_diff(pc: &PauliChannel<f64>, diag: &[f64]) -> f64 {
    pc.probs()
        .iter()
        .zip(diag)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Worst deviation between the circuit outcome and the closed forms, over
/// branch probabilities, branch distributions, and chi off-diagonals.
fn agreement_residual(outcome: &PurificationOutcome<f64>, closed: &ClosedForm) -> f64 {
    let mut worst = (outcome.p_plus - closed.p_plus).abs();
    worst = worst.max(outcome.plus_chi.max_off_diagonal());
    worst = worst.max(max_diag_diff(&closed.plus, &outcome.plus_chi.diagonal()));
    if let (Some(minus), Some(chi)) = (&closed.minus, &outcome.minus_chi) {
        worst = worst.max(chi.max_off_diagonal());
        worst = worst.max(max_diag_diff(minus, &chi.diagonal()));
    }
    if let (Some(virt), Some(chi)) = (&closed.virt, &outcome.virtual_chi) {
        worst = worst.max(chi.max_off_diagonal());
        worst = worst.max(max_diag_diff(virt, &chi.diagonal()));
    }
    worst
}

fn is_reference_pair(a: &ChannelSpec, b: &ChannelSpec) -> bool {
    matches!(
        (a, b),
        (ChannelSpec::BitFlip { p0: x }, ChannelSpec::PhaseFlip { p0: y })
        | (ChannelSpec::PhaseFlip { p0: x }, ChannelSpec::BitFlip { p0: y })
        if *x == 0.5 && *y == 0.5
    )
}

pub fn run(cli: &Cli, path1: &Path, path2: &Path, visibility: f64) -> Result<(), CliError> {
    let (spec1, built1) = load(path1)?;
    let (spec2, built2) = load(path2)?;
    if built1.dim() != 2 || built2.dim() != 2 {
        return Err(CliError::Validation(format!(
            "purification needs two single-qubit channels, got dims {} and {}",
            built1.dim(),
            built2.dim()
        )));
    }

    let cfg = CircuitConfig::new(visibility)?.with_seed(cli.seed);
    let rho = DensityMatrix::maximally_mixed(2);
    let outcome = simulate_purification(&built1.to_kraus(), &built2.to_kraus(), &rho, &cfg)?;

    let closed = match (built1.as_pauli(), built2.as_pauli()) {
        (Some(q), Some(r)) => {
            let (plus, minus, p_plus) =
                two_channel_purified_probs_with_visibility(q, r, visibility)?;
            let virt = two_channel_virtual_probs(q, r).ok();
            Some(ClosedForm {
                plus,
                minus,
                virt,
                p_plus,
            })
        }
        _ => None,
    };
    let residual = closed.as_ref().map(|c| agreement_residual(&outcome, c));

    let in1 = chi_from_channel(&built1.to_kraus())?.identity_element();
    let in2 = chi_from_channel(&built2.to_kraus())?.identity_element();
    let plus_ii = outcome.plus_chi.identity_element();
    let virt_ii = outcome.virtual_chi.as_ref().map(|c| c.identity_element());

    let closed_json = closed.as_ref().map(|c| {
        json!({
            "plus_probs": c.plus.probs(),
            "minus_probs": c.minus.as_ref().map(|m| m.probs().to_vec()),
            "virtual_probs": c.virt.as_ref().map(|v| v.probs().to_vec()),
            "p_plus": c.p_plus,
        })
    });
    let record = json!({
        "config": {
            "channel1": serde_json::to_value(&spec1).expect("specs serialize"),
            "channel2": serde_json::to_value(&spec2).expect("specs serialize"),
            "visibility": visibility,
            "seed": cli.seed,
        },
        "p_plus": outcome.p_plus,
        "p_minus": outcome.p_minus,
        "plus_chi": artifact::chi_json(&outcome.plus_chi),
        "minus_chi": outcome.minus_chi.as_ref().map(artifact::chi_json),
        "virtual_chi": outcome.virtual_chi.as_ref().map(artifact::chi_json),
        "noiseless_component": {
            "input1": in1,
            "input2": in2,
            "plus": plus_ii,
            "virtual": virt_ii,
        },
        "closed_form": closed_json.unwrap_or(Value::Null),
        "agreement_residual": residual,
    });
    let path = artifact::write_json(&cli.out, "purify.json", &record)?;

    let mut manifest = RunManifest::new(
        "purify",
        json!({
            "channel1": serde_json::to_value(&spec1).expect("specs serialize"),
            "channel2": serde_json::to_value(&spec2).expect("specs serialize"),
            "visibility": visibility,
        }),
        cli.seed,
    );
    manifest.artifacts.push(path.display().to_string());
    artifact::write_manifest(&cli.out, &manifest)?;

    println!(
        "branch probabilities: p_plus = {:.6}, p_minus = {:.6}",
        outcome.p_plus, outcome.p_minus
    );
    match virt_ii {
        Some(v) => println!(
            "noiseless component chi(I,I): {:.3}/{:.3} -> {:.3} physical, {:.3} virtual  [{}]",
            in1,
            in2,
            plus_ii,
            v,
            reference::LABEL_IDEAL
        ),
        None => println!(
            "noiseless component chi(I,I): {:.3}/{:.3} -> {:.3} physical (virtual undefined)  [{}]",
            in1,
            in2,
            plus_ii,
            reference::LABEL_IDEAL
        ),
    }
    if is_reference_pair(&spec1, &spec2) && visibility == 1.0 {
        println!(
            "noiseless component chi(I,I): {:.3}/{:.3} -> {:.3} physical, {:.3} virtual  [{}]",
            reference::PURIFY_INPUTS[0],
            reference::PURIFY_INPUTS[1],
            reference::PURIFY_PHYSICAL,
            reference::PURIFY_VIRTUAL,
            reference::LABEL_EXPERIMENT
        );
    }
    if let Some(r) = residual {
        println!("closed-form agreement residual: {:.3e}", r);
    }
    Ok(())
}
