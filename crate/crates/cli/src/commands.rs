//! `oracle` and `bounds` subcommands. Both print JSON on stdout.

use clap::Subcommand;
use iab::bounds::*;
use iab::linalg::to_rows;
use iab::oracle::{analytic_truth, is_homogeneous};
use iab::PopulationSpec;
use serde_json::{json, Value};

use crate::CliError;

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

/// Ground truth with 1-based arm and treatment labels.
pub fn oracle_json(pop: &PopulationSpec) -> Result<Value, CliError> {
    let t = analytic_truth(pop).map_err(|e| CliError::Runtime(e.to_string()))?;
    let by_type: Vec<Value> = t
        .x_star_by_type
        .iter()
        .map(|(chi, xs)| json!({ "type": one_based(chi.as_slice()), "x_star": one_based(xs) }))
        .collect();
    Ok(json!({
        "arms": t.arms,
        "psi": pop.psi,
        "mu": t.mu,
        "mu_tilde": t.mu_tilde,
        "transition": to_rows(&t.transition),
        "sigma_min": t.sigma_min,
        "z_star": one_based(&t.z_star_set),
        "x_star": one_based(&t.x_star_set),
        "x_star_by_type": by_type,
        "x_star_complier": t.x_star_complier().map(one_based),
        "p_complier": t.p_complier,
        "mu_star": t.mu_star,
        "mu_tilde_star": t.mu_tilde_star,
        "homogeneous": is_homogeneous(pop),
        "transition_residual": t.transition_residual(),
    }))
}

/// Bound evaluators. Lists are comma-separated; `m` is the length of `--n` or `--mu`.
#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    /// P(‖P̂ − P‖∞ > ε)
    Lemma1 {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long)]
        eps: f64,
    },
    /// P(‖P̂⁻¹‖∞ > √m / (σ(1 − ξ)))
    Lemma2 {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        xi: f64,
    },
    /// P(|μ̂̃_z − P̂_z μ| > ε) for one arm
    Lemma3 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        psi: f64,
    },
    /// P(‖μ̂ − μ‖∞ > ε)
    Lemma4 {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        psi: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Largest α allowed for the ε-decay policy
    Thm7 {
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        mu: Vec<f64>,
        #[arg(long)]
        psi: f64,
    },
    /// Supremum of α for the fixed-schedule policy
    Thm8 {
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        mu: Vec<f64>,
        #[arg(long)]
        psi: f64,
    },
    /// Coefficient of ln T in the compliers' regret bound
    LogCoefficient {
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        mu: Vec<f64>,
        #[arg(long)]
        alpha: f64,
    },
}

pub fn bounds_json(cmd: &BoundCmd) -> Result<Value, CliError> {
    let usage = |e: BoundsError| CliError::Usage(e.to_string());
    let (name, value, inputs) = match cmd {
        BoundCmd::Lemma1 { n, eps } => {
            ("lemma1", lemma1_bound(n.len(), n, *eps).map_err(usage)?, json!({ "m": n.len(), "n": n, "eps": eps }))
        }
        BoundCmd::Lemma2 { n, sigma, xi } => (
            "lemma2",
            lemma2_bound(n.len(), n, *sigma, *xi).map_err(usage)?,
            json!({ "m": n.len(), "n": n, "sigma": sigma, "xi": xi }),
        ),
        BoundCmd::Lemma3 { n, eps, psi } => {
            ("lemma3", lemma3_bound(*n, *eps, *psi).map_err(usage)?, json!({ "n": n, "eps": eps, "psi": psi }))
        }
        BoundCmd::Lemma4 { n, sigma, psi, eps } => (
            "lemma4",
            lemma4_bound(n.len(), n, *sigma, *psi, *eps).map_err(usage)?,
            json!({ "m": n.len(), "n": n, "sigma": sigma, "psi": psi, "eps": eps }),
        ),
        BoundCmd::Thm7 { sigma, mu, psi } => (
            "thm7",
            thm7_alpha_threshold(*sigma, mu.len(), mu, *psi).map_err(usage)?,
            json!({ "m": mu.len(), "sigma": sigma, "mu": mu, "psi": psi }),
        ),
        BoundCmd::Thm8 { sigma, mu, psi } => (
            "thm8",
            thm8_alpha_threshold(*sigma, mu.len(), mu, *psi).map_err(usage)?,
            json!({ "m": mu.len(), "sigma": sigma, "mu": mu, "psi": psi }),
        ),
        BoundCmd::LogCoefficient { p, mu, alpha } => (
            "log-coefficient",
            regret_bound_log_coefficient(*p, mu, *alpha).map_err(usage)?,
            json!({ "p": p, "mu": mu, "alpha": alpha }),
        ),
    };
    Ok(json!({ "bound": name, "value": value, "inputs": inputs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use iab::builtin_example1;

    #[test]
    fn oracle_labels_are_one_based() {
        let v = oracle_json(&builtin_example1()).unwrap();
        assert_eq!(v["z_star"], json!([3]));
        assert_eq!(v["x_star"], json!([2]));
        assert_eq!(v["x_star_complier"], json!([1]));
        assert_eq!(v["homogeneous"], json!(false));
    }

    #[test]
    fn bounds_report_value_and_inputs() {
        let v = bounds_json(&BoundCmd::Lemma3 { n: 400, eps: 0.1, psi: 0.5 }).unwrap();
        assert_eq!(v["bound"], "lemma3");
        assert!((v["value"].as_f64().unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-14);
        assert!(matches!(
            bounds_json(&BoundCmd::Lemma2 { n: vec![1], sigma: 1.0, xi: 2.0 }),
            Err(CliError::Usage(_))
        ));
    }
}
