//! `appendix` subcommand.

use std::path::Path;

use anyhow::Result;
use quasidetect::appendix::{compute_report, ideal_gas_density, AppendixReport, NeutronExperimentInputs};

use crate::output::{ensure_dir, write_json};

#[derive(Debug, Clone, Default, clap::Args)]
pub struct AppendixArgs {
    /// Neutron wavelength in metres.
    #[arg(long)]
    pub wavelength: Option<f64>,
    /// Capture cross section in square metres.
    #[arg(long)]
    pub cross_section: Option<f64>,
    /// Fractional wavevector spread `delta k / k`.
    #[arg(long)]
    pub bandwidth_fraction: Option<f64>,
    /// Transverse packet width in metres.
    #[arg(long)]
    pub width: Option<f64>,
    /// Gas temperature in kelvin.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Gas pressure in pascal; sets the density through the ideal-gas law.
    #[arg(long, conflicts_with = "density")]
    pub pressure: Option<f64>,
    /// Molecular number density in m^-3.
    #[arg(long)]
    pub density: Option<f64>,
}

impl AppendixArgs {
    pub fn inputs(&self) -> NeutronExperimentInputs {
        let mut i = NeutronExperimentInputs::default();
        if let Some(v) = self.wavelength {
            i.wavelength = v;
        }
        if let Some(v) = self.cross_section {
            i.cross_section = v;
        }
        if let Some(v) = self.bandwidth_fraction {
            i.bandwidth_fraction = v;
        }
        if let Some(v) = self.width {
            i.transverse_width = v;
        }
        if let Some(v) = self.temperature {
            i.temperature = v;
        }
        if let Some(p) = self.pressure {
            i.density = ideal_gas_density(p, i.temperature);
        }
        if let Some(v) = self.density {
            i.density = v;
        }
        i
    }
}

pub fn run(args: &AppendixArgs, out: &Path) -> Result<AppendixReport> {
    let report = compute_report(&args.inputs())?;
    print_table(&report);
    ensure_dir(out)?;
    write_json(&out.join("appendix.json"), &report)?;
    Ok(report)
}

fn print_table(r: &AppendixReport) {
    println!(
        "{:<22} {:>12} {:>12} {:>9}",
        "quantity", "computed", "reference", "ratio"
    );
    for c in &r.comparisons {
        println!(
            "{:<22} {:>12.3e} {:>12.3e} {:>9.3}",
            c.quantity, c.computed, c.reference, c.ratio
        );
    }
    let [a, b, c] = r.chain.formatted_ratios();
    let mark = |ok: bool| if ok { "holds" } else { "fails" };
    println!();
    println!(
        "delta / hbar Omega      = {a}  ({})",
        mark(r.chain.spacing_much_less_than_energy_spread)
    );
    println!(
        "hbar Omega / S          = {b}  ({})",
        mark(r.chain.energy_spread_much_less_than_spread)
    );
    println!(
        "hbar eps |psi| / delta  = {c}  ({})",
        mark(r.chain.coupling_much_less_than_spacing)
    );
    println!();
    for d in &r.discrepancies {
        println!("discrepancy {}: {}", d.quantity, d.note);
    }
    for n in &r.notes {
        println!("note: {n}");
    }
}
