//! Deterministic text renderers for every artifact the tool emits.
//!
//! All numeric cells go through one formatter so identical inputs yield
//! byte-identical files regardless of worker count or platform. CSV files
//! carry their provenance as `# key: value` comment lines above the
//! header row; JSON objects rely on the serializer's sorted keys.

use serde::Serialize;
use serde_json::{json, Value};

use crate::multifractal::TauCurve;
use crate::octagon::OctagonGeometry;
use crate::walk::{Histogram, LengthSpectrum};

/// Fixed 12-significant-digit scientific rendering used for every real
/// number written to CSV.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

/// Render metadata pairs as `# key: value` lines (LF endings).
pub fn metadata_header(meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (key, value) in meta {
        out.push_str("# ");
        out.push_str(key);
        out.push_str(": ");
        out.push_str(value);
        out.push('\n');
    }
    out
}

/// `index,length` rows, 1-based, in enumeration order.
pub fn spectrum_csv(spectrum: &LengthSpectrum, meta: &[(&str, String)]) -> String {
    let mut out = metadata_header(meta);
    out.push_str("index,length\n");
    for (i, l) in spectrum.lengths.iter().enumerate() {
        out.push_str(&(i + 1).to_string());
        out.push(',');
        out.push_str(&fmt_real(*l));
        out.push('\n');
    }
    out
}

/// `bin_left,bin_right,count` rows plus the Gaussian fit in the header.
pub fn histogram_csv(hist: &Histogram, meta: &[(&str, String)]) -> String {
    let mut all: Vec<(&str, String)> = meta.to_vec();
    let fit = [
        ("fit_mean", fmt_real(hist.gaussian_fit.mean)),
        ("fit_variance", fmt_real(hist.gaussian_fit.variance)),
        ("fit_amplitude", fmt_real(hist.gaussian_fit.amplitude)),
    ];
    for (k, v) in fit {
        all.push((k, v));
    }
    let mut out = metadata_header(&all);
    out.push_str("bin_left,bin_right,count\n");
    for (i, count) in hist.counts.iter().enumerate() {
        out.push_str(&fmt_real(hist.bin_edges[i]));
        out.push(',');
        out.push_str(&fmt_real(hist.bin_edges[i + 1]));
        out.push(',');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

/// `q,tau,alpha,f,d_q` rows over the whole grid.
pub fn tau_csv(curve: &TauCurve, meta: &[(&str, String)]) -> String {
    let mut out = metadata_header(meta);
    out.push_str("q,tau,alpha,f,d_q\n");
    for p in &curve.points {
        for (i, v) in [p.q, p.tau, p.alpha, p.f, p.d_q].into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_real(v));
        }
        out.push('\n');
    }
    out
}

/// One row of the exact-versus-approximation comparison table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompareRow {
    pub q: f64,
    pub tau_exact: f64,
    pub tau_chain: f64,
    pub tau_gaussian: f64,
}

/// `q,tau_exact,tau_chain,tau_gaussian` rows.
pub fn compare_csv(rows: &[CompareRow], meta: &[(&str, String)]) -> String {
    let mut out = metadata_header(meta);
    out.push_str("q,tau_exact,tau_chain,tau_gaussian\n");
    for r in rows {
        for (i, v) in [r.q, r.tau_exact, r.tau_chain, r.tau_gaussian]
            .into_iter()
            .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_real(v));
        }
        out.push('\n');
    }
    out
}

/// One radius of the potential verification table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PotentialRow {
    pub r: f64,
    pub u: f64,
    pub residual: f64,
}

/// `r,U,residual` rows.
pub fn potential_csv(rows: &[PotentialRow], meta: &[(&str, String)]) -> String {
    let mut out = metadata_header(meta);
    out.push_str("r,U,residual\n");
    for row in rows {
        for (i, v) in [row.r, row.u, row.residual].into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_real(v));
        }
        out.push('\n');
    }
    out
}

/// `s,t` rows of the Euclidean time curve.
pub fn time_curve_csv(rows: &[(f64, f64)], meta: &[(&str, String)]) -> String {
    let mut out = metadata_header(meta);
    out.push_str("s,t\n");
    for (s, t) in rows {
        out.push_str(&fmt_real(*s));
        out.push(',');
        out.push_str(&fmt_real(*t));
        out.push('\n');
    }
    out
}

fn point_pair(p: &crate::hyperbolic::DiskPoint) -> Value {
    json!([p.re(), p.im()])
}

/// Full construction record of one octagon: module, derived scalars,
/// vertices, side-pairing data, and the eight generators as (u, v) pairs.
pub fn geometry_json(geom: &OctagonGeometry) -> Value {
    let vertices: Vec<Value> = geom.vertices.iter().map(point_pair).collect();
    let omega: Vec<Value> = geom.omega.iter().map(point_pair).collect();
    let p: Vec<Value> = geom.midpoints.iter().map(point_pair).collect();
    let sides: Vec<Value> = geom
        .sides
        .iter()
        .map(|s| json!({"radius": s.radius, "angle": s.angle}))
        .collect();
    let generators: Vec<Value> = geom
        .generators
        .iter()
        .map(|g| {
            json!({
                "u": [g.u().re, g.u().im],
                "v": [g.v().re, g.v().im],
            })
        })
        .collect();
    json!({
        "a": geom.params.a,
        "alpha": geom.params.alpha,
        "t_plus": geom.t_plus,
        "t_minus": geom.t_minus,
        "r_plus": geom.r_plus,
        "r_minus": geom.r_minus,
        "phi_plus": geom.phi_plus,
        "phi_minus": geom.phi_minus,
        "b": geom.b,
        "beta": geom.beta,
        "gamma": geom.gamma_angle,
        "vertex_system_residual": geom.vertex_system_residual(),
        "group_relation_deviation": geom.group_relation_deviation(),
        "vertices": vertices,
        "omega": omega,
        "p": p,
        "sides": sides,
        "generators": generators,
    })
}

/// Per-(N, q) summary of the chain and Gaussian evaluations.
#[derive(Clone, Debug, Serialize)]
pub struct MarkovSummary {
    pub n: u32,
    pub q: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub xi_mean: f64,
    pub log_z_chain: f64,
    pub log_z_gaussian: f64,
    pub c_coeff: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub transition_probs: [[f64; 8]; 8],
}

pub fn markov_json(summary: &MarkovSummary) -> Value {
    serde_json::to_value(summary).expect("plain numeric struct always serializes")
}

/// Headline numbers for one (module, N) run: spectrum statistics plus
/// the multifractal markers.
pub fn tau_summary_json(
    spectrum: &LengthSpectrum,
    entropy: f64,
    alpha_extremes: (f64, f64),
    a: f64,
    alpha_module: f64,
) -> Value {
    json!({
        "entropy": entropy,
        "alpha_min_est": alpha_extremes.0,
        "alpha_max_est": alpha_extremes.1,
        "n": spectrum.generation,
        "count": spectrum.count,
        "mean": spectrum.mean,
        "variance": spectrum.variance,
        "min": spectrum.min_length(),
        "max": spectrum.max_length(),
        "a": a,
        "alpha_module": alpha_module,
    })
}

/// Comparison table plus per-column worst deviations from the exact
/// curve, over the whole grid and restricted to |q| <= 1.
pub fn compare_json(rows: &[CompareRow]) -> Value {
    let mut max_chain = 0.0f64;
    let mut max_gaussian = 0.0f64;
    let mut central_chain = 0.0f64;
    let mut central_gaussian = 0.0f64;
    for r in rows {
        let dc = (r.tau_chain - r.tau_exact).abs();
        let dg = (r.tau_gaussian - r.tau_exact).abs();
        max_chain = max_chain.max(dc);
        max_gaussian = max_gaussian.max(dg);
        if r.q.abs() <= 1.0 {
            central_chain = central_chain.max(dc);
            central_gaussian = central_gaussian.max(dg);
        }
    }
    json!({
        "rows": rows.iter().map(|r| serde_json::to_value(r).unwrap()).collect::<Vec<_>>(),
        "max_abs_diff": {"chain": max_chain, "gaussian": max_gaussian},
        "max_abs_diff_central": {"chain": central_chain, "gaussian": central_gaussian},
    })
}

/// Pretty-print a JSON value with a trailing newline (LF only).
pub fn to_pretty_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value always prints");
    s.push('\n');
    s
}
