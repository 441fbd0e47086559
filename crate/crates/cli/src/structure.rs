use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tfp_core::structures::{
    building_sequence, c_value, chain_names, derived_families, is_balanced, parse_structure, rho_star, t_star_struct,
    tracking_time, weights, AnchoredPair, Family, StructureError, StructureWeights, TrackingTime,
};
use tfp_core::trajectory::{Params, DEFAULT_BIG_C, DEFAULT_EPS};

use crate::{read_file, to_json, write_file, CliError};

#[derive(Args, Debug)]
pub struct StructureArgs {
    /// Structure file (`-` for stdin).
    pub file: PathBuf,
    /// Vertex count used to turn ρ into times.
    #[arg(long, default_value_t = 1 << 16)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long = "big-c", default_value_t = DEFAULT_BIG_C)]
    pub big_c: f64,
    /// List a derived family: open, plus, minus or star.
    #[arg(long)]
    pub families: Option<Family>,
    /// JSON report (`-` for stdout instead of the text report).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ChainStep {
    pub vertices: Vec<String>,
    pub rho: String,
    pub t: f64,
}

#[derive(Debug, Serialize)]
pub struct FamilyEntry {
    pub case: Option<char>,
    pub marker: String,
    pub structure: String,
}

#[derive(Debug, Serialize)]
pub struct StructureReport {
    pub structure: String,
    pub v_a: usize,
    pub e: usize,
    pub o: usize,
    pub permissible: bool,
    pub rho_star: String,
    pub t_star: f64,
    pub tracking: TrackingTime,
    /// Absent when the tracking time is zero.
    pub c: Option<String>,
    pub weights: StructureWeights,
    pub building_sequence: Vec<ChainStep>,
    pub length: usize,
    pub balanced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<FamilyEntry>>,
}

pub fn report(pair: &AnchoredPair, params: &Params, family: Option<Family>) -> Result<StructureReport, StructureError> {
    let seq = building_sequence(pair)?;
    let names = chain_names(pair, &seq);
    let c = match c_value(pair) {
        Ok(c) => Some(c.to_string()),
        Err(StructureError::ZeroTrackingTime) => None,
        Err(e) => return Err(e),
    };
    let family = match family {
        Some(f) => Some(
            derived_families(pair, f)?
                .into_iter()
                .map(|m| FamilyEntry {
                    case: m.case,
                    marker: m.marker,
                    structure: m.pair.to_text(),
                })
                .collect(),
        ),
        None => None,
    };
    Ok(StructureReport {
        structure: pair.to_text(),
        v_a: pair.v_a(),
        e: pair.e(),
        o: pair.o(),
        permissible: pair.structure().is_permissible(),
        rho_star: rho_star(pair).to_string(),
        t_star: t_star_struct(pair, params.n),
        tracking: tracking_time(pair, params)?,
        c,
        weights: weights(pair, params)?,
        building_sequence: names
            .into_iter()
            .zip(&seq.rhos)
            .map(|(vertices, rho)| ChainStep {
                vertices,
                rho: rho.to_string(),
                t: rho.realize(params.n),
            })
            .collect(),
        length: seq.len(),
        balanced: is_balanced(pair)?,
        family,
    })
}

fn text(r: &StructureReport, n: usize) -> String {
    let mut s = String::new();
    s.push_str(&r.structure);
    s.push_str(&format!(
        "\nv_A = {}, e = {}, o = {}, permissible: {}\n",
        r.v_a, r.e, r.o, r.permissible
    ));
    s.push_str(&format!("rho* = {} (t* = {:.6} at n = {n})\n", r.rho_star, r.t_star));
    s.push_str(&format!(
        "tracking: rho = {}, t = {:.6}{}\n",
        r.tracking.rho,
        r.tracking.t,
        if r.tracking.capped { " (capped)" } else { "" }
    ));
    s.push_str(&format!("c = {}\n", r.c.as_deref().unwrap_or("undefined (tracking time 0)")));
    s.push_str(&format!(
        "delta = {}, ln Delta = {:.6}, gamma = {:.6e}\n",
        r.weights.small_delta, r.weights.ln_delta, r.weights.gamma
    ));
    s.push_str(&format!("building sequence (l = {}, balanced: {}):\n", r.length, r.balanced));
    for (j, step) in r.building_sequence.iter().enumerate() {
        s.push_str(&format!(
            "  H_{j} = {{{}}}  rho = {}  t = {:.6}\n",
            step.vertices.join(" "),
            step.rho,
            step.t
        ));
    }
    if let Some(f) = &r.family {
        s.push_str(&format!("family ({} members):\n", f.len()));
        for m in f {
            let case = m.case.map(|c| format!("({c}) ")).unwrap_or_default();
            s.push_str(&format!("  {case}{}\n", m.marker));
            for line in m.structure.lines() {
                s.push_str(&format!("      {line}\n"));
            }
        }
    }
    s
}

pub fn cmd(a: StructureArgs) -> Result<(), CliError> {
    let input = read_file(&a.file)?;
    let pair = parse_structure(&input).map_err(|e| CliError::usage(format!("{}: {e}", a.file.display())))?;
    let params = Params::new(a.n, a.eps, a.big_c).map_err(CliError::usage)?;
    let r = report(&pair, &params, a.families).map_err(CliError::failed)?;
    match &a.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", to_json(&r)),
        Some(p) => {
            write_file(p, to_json(&r))?;
            print!("{}", text(&r, a.n));
        }
        None => print!("{}", text(&r, a.n)),
    }
    Ok(())
}
