//! Results table in the usual ERGM layout: coefficient (SE)
//! with significance stars, odds ratios, AIC and BIC.

use std::fmt::Write;

use super::{FitResult, LikelihoodBasis};
use crate::scalar::Scalar;

/// Stars for a p-value: `***` < 0.001, `**` < 0.01, `*` < 0.05, `†` < 0.10.
pub fn significance_stars(p: f64) -> &'static str {
    if !p.is_finite() {
        ""
    } else if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.10 {
        "†"
    } else {
        ""
    }
}

/// Odds ratio to four significant digits (`15.21`, `3.861`, `1.000`, `0.2488`).
pub fn format_odds_ratio(or: f64) -> String {
    if !or.is_finite() {
        return "NA".into();
    }
    if or == 0.0 {
        return "0.000".into();
    }
    let digits = or.abs().log10().floor() as i32 + 1;
    let decimals = (4 - digits).max(0) as usize;
    let s = format!("{or:.decimals$}");
    // rounding can add a digit (9.9996 -> 10.000); redo with one fewer decimal
    let int_len = s.trim_start_matches('-').split('.').next().map_or(0, str::len) as i32;
    if int_len > digits.max(1) && decimals > 0 {
        let d = decimals - 1;
        return format!("{or:.d$}");
    }
    s
}

fn format_number(x: f64, decimals: usize) -> String {
    if x.is_finite() {
        format!("{x:.decimals$}")
    } else {
        "NA".into()
    }
}

/// Integer with thousands separators, as in `-91,157`.
fn format_grouped(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    let r = x.round() as i64;
    let digits = r.unsigned_abs().to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    if r < 0 {
        format!("-{out}")
    } else {
        out
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Group {
    Signatures,
    Activity,
    Popularity,
    Controls,
}

fn group_of(term: &str) -> Group {
    let head = term.split('.').next().unwrap_or("");
    match head {
        "edges" | "gwesp" | "gwnsp" => Group::Signatures,
        "nodeofactor" => Group::Activity,
        "nodeifactor" => Group::Popularity,
        _ => Group::Controls,
    }
}

fn row_label(label: &str) -> &str {
    label
        .strip_prefix("Activity: ")
        .or_else(|| label.strip_prefix("Popularity: "))
        .unwrap_or(label)
}

/// Human-readable results table.
pub fn render_table<T: Scalar>(fit: &FitResult<T>) -> String {
    let fit = fit.to_f64();
    let rows: Vec<(String, String, String)> = (0..fit.len())
        .map(|k| {
            let coef = format!(
                "{} ({}){}",
                format_number(fit.theta[k], 3),
                format_number(fit.std_errors[k], 3),
                significance_stars(fit.p_values[k])
            );
            (
                row_label(&fit.labels[k]).to_string(),
                coef,
                format_odds_ratio(fit.odds_ratios[k]),
            )
        })
        .collect();
    let label_w = rows
        .iter()
        .map(|r| r.0.chars().count() + 2)
        .chain(["Receiver's followers".len() + 2, "Estimates".len()])
        .max()
        .unwrap_or(0);
    let coef_w = rows
        .iter()
        .map(|r| r.1.chars().count())
        .chain(["Coefficient (SE)".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "ERGM results ({})", fit.method);
    let _ = writeln!(out, "{:<label_w$}  {:<coef_w$}  {:>8}", "Estimates", "Coefficient (SE)", "OR");
    let rule = "-".repeat(label_w + coef_w + 12);
    let _ = writeln!(out, "{rule}");
    let groups = [
        (Group::Signatures, "Network signatures"),
        (Group::Activity, "Activity (out-links)"),
        (Group::Popularity, "Popularity (in-links)"),
        (Group::Controls, "Control variables"),
    ];
    for (group, title) in groups {
        let members: Vec<usize> = (0..fit.len()).filter(|&k| group_of(&fit.terms[k]) == group).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{title}");
        for k in members {
            let (label, coef, or) = &rows[k];
            // pad by characters; the dagger is multi-byte
            let pad = coef_w.saturating_sub(coef.chars().count());
            let _ = writeln!(
                out,
                "  {:<w$}  {}{}  {:>8}",
                label,
                coef,
                " ".repeat(pad),
                or,
                w = label_w - 2
            );
        }
    }
    let _ = writeln!(out, "{rule}");
    let basis = match fit.log_lik_basis {
        LikelihoodBasis::Exact => "exact likelihood",
        LikelihoodBasis::Pseudo => "pseudo-likelihood",
        LikelihoodBasis::MonteCarlo => "Monte-Carlo likelihood",
        LikelihoodBasis::None => "not computed",
    };
    let _ = writeln!(out, "{:<label_w$}  {}", "Log-likelihood", format_number(fit.log_lik, 3));
    let _ = writeln!(out, "{:<label_w$}  {}", "AIC", format_grouped(fit.aic));
    let _ = writeln!(out, "{:<label_w$}  {}", "BIC", format_grouped(fit.bic));
    let _ = writeln!(out, "Likelihood basis: {basis}; dyads: {}", fit.n_obs);
    let _ = writeln!(
        out,
        "Converged: {}; iterations: {}{}",
        if fit.converged { "yes" } else { "no" },
        fit.iterations,
        if fit.degeneracy_flag { "; DEGENERATE" } else { "" }
    );
    let _ = writeln!(
        out,
        "Significance codes: *** p < 0.001, ** p < 0.01, * p < 0.05, † p < 0.10 (Wald)."
    );
    if fit.se_approximate {
        let _ = writeln!(out, "Standard errors are approximate (pseudo-likelihood).");
    }
    for note in fit.notes.iter().filter(|n| !n.contains("approximate")) {
        let _ = writeln!(out, "Note: {note}");
    }
    out
}

/// Pretty-printed JSON of the fit. Non-finite values become `null`.
pub fn to_json<T: Scalar>(fit: &FitResult<T>) -> String {
    serde_json::to_string_pretty(&fit.to_f64()).expect("fit serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::Method;

    #[test]
    fn odds_ratio_format() {
        assert_eq!(format_odds_ratio(2.722_f64.exp()), "15.21");
        assert_eq!(format_odds_ratio(1.351_f64.exp()), "3.861");
        assert_eq!(format_odds_ratio(0.0_f64.exp()), "1.000");
        assert_eq!(format_odds_ratio((-1.391_f64).exp()), "0.2488");
        assert_eq!(format_odds_ratio(9.99996), "10.00");
        assert_eq!(format_odds_ratio(f64::INFINITY), "NA");
    }

    #[test]
    fn stars() {
        assert_eq!(significance_stars(0.0005), "***");
        assert_eq!(significance_stars(0.001), "**");
        assert_eq!(significance_stars(0.02), "*");
        assert_eq!(significance_stars(0.07), "†");
        assert_eq!(significance_stars(0.10), "");
        assert_eq!(significance_stars(f64::NAN), "");
    }

    #[test]
    fn grouped_numbers() {
        assert_eq!(format_grouped(-91157.2), "-91,157");
        assert_eq!(format_grouped(133061.0), "133,061");
        assert_eq!(format_grouped(12.0), "12");
    }

    fn sample_fit() -> FitResult<f64> {
        FitResult {
            method: Method::Mple,
            terms: vec!["edges".into(), "gwesp.OTP.fixed.0.5".into(), "nodeofactor.role.organization".into()],
            labels: vec!["Density".into(), "Triadic closure".into(), "Activity: Organizations".into()],
            theta: vec![-7.834, 2.722, 1.351],
            std_errors: vec![0.21, 0.213, 0.33],
            odds_ratios: vec![(-7.834_f64).exp(), 2.722_f64.exp(), 1.351_f64.exp()],
            p_values: vec![1e-9, 1e-9, 0.04],
            log_lik: -120.5,
            log_lik_basis: LikelihoodBasis::Pseudo,
            aic: 247.0,
            bic: 260.0,
            n_obs: 90,
            iterations: 7,
            converged: true,
            degeneracy_flag: false,
            se_approximate: true,
            notes: vec![],
        }
    }

    #[test]
    fn table_layout() {
        let table = render_table(&sample_fit());
        assert!(table.contains("Network signatures"));
        assert!(table.contains("Activity (out-links)"));
        assert!(!table.contains("Popularity (in-links)"));
        assert!(table.contains("2.722 (0.213)***"));
        assert!(table.contains("1.351 (0.330)*"));
        assert!(table.contains("15.21"));
        assert!(table.contains("3.861"));
        assert!(table.contains("pseudo-likelihood"));
        assert!(table.contains("approximate"));
    }

    #[test]
    fn json_roundtrip() {
        let fit = sample_fit();
        let back: FitResult<f64> = serde_json::from_str(&to_json(&fit)).unwrap();
        assert_eq!(back, fit);
    }
}
