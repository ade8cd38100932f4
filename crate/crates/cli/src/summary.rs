use std::path::Path;

use crate::output::CheckRecord;
use crate::CliError;

/// Checks written by the subcommands, in report order.
pub const KNOWN_CHECKS: [(&str, &str); 9] = [
    ("spectral_key", "key bound for nonpositive coefficients"),
    ("riesz_positivity", "Riesz product coefficients"),
    ("bernoulli_over", "over-recurrent Bernoulli set"),
    ("bernoulli_under", "under-recurrent Bernoulli set"),
    ("rademacher_pair", "sign-controlled pair correlations"),
    ("rademacher_multi", "multiple correlations"),
    ("skew_realize", "skew-product realization"),
    ("corr_build", "symbolic correspondence"),
    ("density", "density estimates"),
];

/// Prints one line per known check; `Ok(false)` if any present check failed.
pub fn report(dir: &Path) -> Result<bool, CliError> {
    let mut found = 0;
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, title) in KNOWN_CHECKS {
        let path = CheckRecord::path(dir, name);
        if !path.exists() {
            lines.push(format!("{name:<18} skipped  {title}"));
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let rec: CheckRecord =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        found += 1;
        ok &= rec.ok;
        lines.push(format!(
            "{name:<18} {:<8} {}/{}  {}",
            if rec.ok { "pass" } else { "FAIL" },
            rec.passed,
            rec.total,
            rec.detail
        ));
    }
    if found == 0 {
        return Err(CliError::Config(format!("no check files in {}", dir.display())));
    }
    for l in lines {
        println!("{l}");
    }
    println!("{found} of {} checks present, {}", KNOWN_CHECKS.len(), if ok { "all passed" } else { "some failed" });
    Ok(ok)
}
