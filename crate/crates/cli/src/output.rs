//! Deterministic serialization helpers.
//!
//! CSV numbers go through the same shortest-round-trip formatter as the JSON
//! payload, so the two files carry byte-identical digit strings.

use sphereprod::verify::IdentityResidual;

/// Shortest decimal representation that parses back to the same f64.
pub fn format_f64(value: f64) -> String {
    serde_json::to_string(&value).expect("finite f64 serializes")
}

/// Project identity rows to CSV, one row per identity.
pub fn identities_to_csv(rows: &[IdentityResidual]) -> String {
    let mut out = String::from("identity,max_abs_err,mean_abs_err,samples,tol,pass\n");
    for row in rows {
        let tol = row.tol.map(format_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.name,
            format_f64(row.max_abs_err),
            format_f64(row.mean_abs_err),
            row.samples,
            tol,
            row.pass
        ));
    }
    out
}

/// Fixed-width human-readable rendering of the identity rows.
pub fn identities_to_table(rows: &[IdentityResidual]) -> String {
    let mut out = format!(
        "{:<28} {:>13} {:>13} {:>8} {:>10} {:>6}\n",
        "identity", "max_abs_err", "mean_abs_err", "samples", "tol", "pass"
    );
    for row in rows {
        let tol = row
            .tol
            .map(|t| format!("{t:.1e}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{:<28} {:>13.4e} {:>13.4e} {:>8} {:>10} {:>6}\n",
            row.name,
            row.max_abs_err,
            row.mean_abs_err,
            row.samples,
            tol,
            if row.pass { "pass" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trips() {
        for v in [0.1, 1e-10, 123456.789, 5e-324, 1.0 / 3.0] {
            let s = format_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = vec![IdentityResidual {
            name: "p_squared_oracle".to_string(),
            max_abs_err: 1e-15,
            mean_abs_err: 1e-16,
            samples: 10,
            tol: Some(1e-10),
            pass: true,
        }];
        let csv = identities_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "identity,max_abs_err,mean_abs_err,samples,tol,pass"
        );
        assert_eq!(lines.next().unwrap(), "p_squared_oracle,1e-15,1e-16,10,1e-10,true");
    }
}
