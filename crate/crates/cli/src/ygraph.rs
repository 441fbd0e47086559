use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tfp_core::harness::csv::format_sig9;
use tfp_core::process::{Instrumentation, ProcessState};
use tfp_core::trajectory::{Params, DEFAULT_BIG_C, DEFAULT_EPS};
use tfp_core::ygraph::{is_k_short, mixing_stats, MixingReport, WalkSpec, YGraph};

use crate::{to_json, write_file, CliError};

#[derive(Args, Debug)]
pub struct YgraphArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Freeze the process at the first m with t ≥ T (default 0.5).
    #[arg(long = "until-t", conflicts_with = "until_m")]
    pub until_t: Option<f64>,
    /// Freeze the process at this m.
    #[arg(long = "until-m")]
    pub until_m: Option<u64>,
    /// Open edge `u,v` (default: the first open pair).
    #[arg(long)]
    pub edge: Option<String>,
    /// Endpoint labelled L (default: the smaller one).
    #[arg(long)]
    pub left: Option<usize>,
    /// Walk types such as `LRL`; `-` is the empty walk. Repeatable.
    #[arg(long)]
    pub sigma: Vec<WalkSpec>,
    /// Mixing statistics for L^k (default: the k-short length 3/ε).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long = "big-c", default_value_t = DEFAULT_BIG_C)]
    pub big_c: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct WalkRow {
    pub sigma: String,
    pub k_short: bool,
    /// `None` when the count overflows 128 bits.
    pub u: Option<String>,
    pub v: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct YgraphReport {
    pub n: usize,
    pub seed: u64,
    pub m: u64,
    pub t: f64,
    pub open_edges: usize,
    pub ygraph_edges: usize,
    pub ybar: Option<f64>,
    pub edge: (usize, usize),
    pub left: usize,
    pub y_e: usize,
    pub walks: Vec<WalkRow>,
    pub mixing: Option<MixingReport>,
}

pub fn cmd(a: YgraphArgs) -> Result<(), CliError> {
    let params = Params::new(a.n, a.eps, a.big_c).map_err(CliError::usage)?;
    let mut state = ProcessState::new(a.n, a.seed, Instrumentation::Light).map_err(CliError::usage)?;
    let until_m = a.until_m;
    let until_t = a.until_t.unwrap_or(0.5);
    while !state.is_complete() {
        let done = match until_m {
            Some(m) => state.m() >= m,
            None => params.time(state.m()) >= until_t,
        };
        if done {
            break;
        }
        state.step().map_err(CliError::failed)?;
    }
    let yg = YGraph::build(&state);
    if yg.vertex_count() == 0 {
        return Err(CliError::failed("no open edges remain at this point of the process"));
    }
    let (u, v) = match &a.edge {
        Some(s) => {
            let (x, y) = s
                .split_once(',')
                .ok_or_else(|| CliError::usage("--edge expects u,v"))?;
            let parse = |t: &str| t.trim().parse::<usize>().map_err(CliError::usage);
            (parse(x)?, parse(y)?)
        }
        None => yg.pair(0),
    };
    let left = a.left.unwrap_or(u.min(v));
    let e = yg.orient(u, v, left).map_err(CliError::usage)?;
    let k = a.k.unwrap_or(params.k_short);
    let walks = a
        .sigma
        .iter()
        .map(|sigma| WalkRow {
            sigma: sigma.to_string(),
            k_short: is_k_short(sigma, params.k_short),
            u: yg.u_walks(e, sigma).map(|c| c.to_string()),
            v: yg.v_average(e, sigma).ok(),
        })
        .collect();
    let report = YgraphReport {
        n: a.n,
        seed: a.seed,
        m: state.m(),
        t: params.time(state.m()),
        open_edges: yg.vertex_count(),
        ygraph_edges: yg.edge_count(),
        ybar: yg.ybar(),
        edge: (u.min(v), u.max(v)),
        left,
        y_e: yg.y(e.id),
        walks,
        mixing: mixing_stats(&yg, &state, e, k, Some(&params)).ok(),
    };
    match &a.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", to_json(&report)),
        Some(p) => write_file(p, to_json(&report))?,
        None => {}
    }
    if a.json.as_ref().is_none_or(|p| p.as_os_str() != "-") {
        // CSV rows on stdout; the edge is written L-R.
        println!("edge,sigma,u,v");
        for w in &report.walks {
            println!(
                "{left}-{},{},{},{}",
                u + v - left,
                w.sigma,
                w.u.as_deref().unwrap_or(""),
                w.v.map(format_sig9).unwrap_or_default()
            );
        }
        eprintln!(
            "m = {} (t = {:.4}), {} open edges, {} Y-graph edges, mean Y = {:.4}, Y_e = {}",
            report.m,
            report.t,
            report.open_edges,
            report.ygraph_edges,
            report.ybar.unwrap_or(0.0),
            report.y_e
        );
        match &report.mixing {
            Some(mx) => eprintln!(
                "L^{k} from planted u = {}: V = {:.4}, V(k+1) = {:.4}, mean Y at u = {:.4}, gaps {:.4} / {:.4} / {:.4}",
                mx.planted, mx.v_lk, mx.v_lk1, mx.q_u_mean, mx.gap_next, mx.gap_q_u, mx.gap_ybar
            ),
            None => eprintln!("L^{k}: no walks of this type"),
        }
    }
    Ok(())
}
