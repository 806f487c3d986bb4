use serde_json::json;
use triadic_core::theory::{
    degree_marginal, degree_tail_asymptote, gaussian_joint, joint_recursion, weight_dist,
    weight_tail_asymptote, JointDistribution,
};

use crate::config::ExperimentConfig;
use crate::output::{create_dir, format_rational, format_real, header_lines, write_csv, write_json};
use crate::CliError;

pub const WEIGHT_CSV: &str = "weight.csv";
pub const JOINT_CSV: &str = "joint.csv";
pub const GAUSSIAN_CSV: &str = "gaussian.csv";
pub const MARGINAL_CSV: &str = "degree_marginal.csv";
pub const THEORY_JSON: &str = "theory.json";

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, format_real)
}

/// Writes the weight, joint, Gaussian and degree-marginal tables under
/// `<out>/theory`.
pub fn cmd_theory(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let dir = cfg.out.join("theory");
    create_dir(&dir)?;
    let c = cfg.params.derive();
    let header = header_lines(cfg, "theory");
    let asymptotic = c.alpha > 0.0;

    let xw = weight_dist(&c, cfg.w_max)?;
    let tail_asym = |w: u32| asymptotic.then(|| weight_tail_asymptote(&c, w as f64).ok()).flatten();
    let joint: JointDistribution<f64>;
    if cfg.exact {
        let e = cfg.params.derive_exact();
        let xe = weight_dist(&e, cfg.w_max)?;
        let rows = (1..=cfg.w_max).map(|w| {
            format!(
                "{w},{},{},{}",
                format_rational(&xe.get(w)),
                format_rational(&xe.tail_mass(w)),
                fmt_opt(tail_asym(w))
            )
        });
        write_csv(&dir.join(WEIGHT_CSV), &header, &["w", "x_w", "tail", "asymptote"], rows)?;
        let je = joint_recursion(&e, cfg.w_max)?;
        let rows = je.iter().map(|(w, d, v)| format!("{w},{d},{}", format_rational(v)));
        write_csv(&dir.join(JOINT_CSV), &header, &["w", "d", "value"], rows)?;
        joint = joint_recursion(&c, cfg.w_max)?;
    } else {
        let rows = (1..=cfg.w_max)
            .map(|w| {
                format!(
                    "{w},{},{},{}",
                    format_real(xw.get(w)),
                    format_real(xw.tail_mass(w)),
                    fmt_opt(tail_asym(w))
                )
            });
        write_csv(&dir.join(WEIGHT_CSV), &header, &["w", "x_w", "tail", "asymptote"], rows)?;
        joint = joint_recursion(&c, cfg.w_max)?;
        let rows = joint.iter().map(|(w, d, v)| format!("{w},{d},{}", format_real(*v)));
        write_csv(&dir.join(JOINT_CSV), &header, &["w", "d", "value"], rows)?;
    }

    let gaussian = c.alpha1 > 0.0 && c.alpha2 > 0.0;
    if gaussian {
        let mut rows = Vec::new();
        for (w, d, v) in joint.iter() {
            let g = gaussian_joint(&c, &xw, d, w)?;
            rows.push(format!("{w},{d},{},{}", format_real(g), format_real(*v)));
        }
        write_csv(&dir.join(GAUSSIAN_CSV), &header, &["w", "d", "gaussian", "x_dw"], rows)?;
    }

    let marginal = if c.alpha > 0.0 || c.beta > 0.0 {
        let u = degree_marginal(&c, cfg.d_max, cfg.marginal_tol)?;
        let rows = (2..=cfg.d_max).map(|d| {
            let a = (c.alpha > 0.0 && c.alpha2 > 0.0)
                .then(|| degree_tail_asymptote(&c, d as f64).ok())
                .flatten();
            format!("{d},{},{}", format_real(u.get(d)), fmt_opt(a))
        });
        write_csv(&dir.join(MARGINAL_CSV), &header, &["d", "u_d", "asymptote"], rows)?;
        Some(json!({ "w_cutoff": u.w_cutoff, "truncation_bound": u.truncation_bound }))
    } else {
        None
    };

    let mut files = vec![WEIGHT_CSV, JOINT_CSV];
    if gaussian {
        files.push(GAUSSIAN_CSV);
    }
    if marginal.is_some() {
        files.push(MARGINAL_CSV);
    }
    let meta = json!({
        "schema": "triadic-theory/1",
        "config": cfg.to_json(),
        "config_sha256": cfg.hash(),
        "constants": {
            "alpha1": c.alpha1, "alpha2": c.alpha2, "alpha": c.alpha, "beta": c.beta,
            "degenerate": c.is_degenerate(),
        },
        "exact_constants": if cfg.exact {
            let e = cfg.params.derive_exact();
            json!({
                "alpha1": format_rational(&e.alpha1), "alpha2": format_rational(&e.alpha2),
                "alpha": format_rational(&e.alpha), "beta": format_rational(&e.beta),
            })
        } else {
            serde_json::Value::Null
        },
        "weight_tail_beyond_w_max": xw.tail_mass(cfg.w_max),
        "degree_marginal": marginal,
        "gaussian": gaussian,
        "files": files,
    });
    write_json(&dir.join(THEORY_JSON), &meta)
}
