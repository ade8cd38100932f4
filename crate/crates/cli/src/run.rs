use std::cmp::Ordering;
use std::path::Path;

use recurlab::bernoulli::{
    event_probability_oracle, family_params, over_correlation, under_correlation, under_predicted_sign,
    BernoulliParams, BernoulliSet,
};
use recurlab::combinatorics::{sign_pattern_batch, Verdict};
use recurlab::correspondence::{consistency_check, markov_sample, recurrence_transfer_check, SourceSpec};
use recurlab::numeric::{parse_rational, sign_of};
use recurlab::rademacher::{
    affine_moment, certified_pair_sign, multiple_f_correlation, pair_correlation, pair_correlation_truncated,
    Partition, SeriesKind, SignedSeries, PAIR_CUTOFF,
};
use recurlab::skew::{realize_target_with_horizon, TargetMode};
use recurlab::spectral::{
    key_bound_check, realize_summable, riesz_coefficient, under_recurrent_suite, FourierMeasure, RieszSpec, SeqRule,
};
use recurlab::{Enclosure, Q};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::output::{decimal, enclosure, float, rational, write_atomic, write_json, CheckRecord, Table};
use crate::summary::report;
use crate::CliError;

/// Largest `n` for which Riesz coefficients are tabulated.
pub const RIESZ_MAX_N: u64 = 3_486_784_401; // 3^20
pub const SPECTRAL_MAX_N: u64 = 100_000;
pub const BERNOULLI_MAX_N: u64 = 10_000;
pub const ORACLE_MAX_N: u64 = 512;
pub const PAIR_MAX_N: u64 = 10_000;
pub const SKEW_MAX_N: u64 = 100_000;
pub const SAMPLE_MAX_LEN: usize = 1 << 30;

/// Settings shared by every subcommand.
pub struct Context<'a> {
    pub out_dir: &'a Path,
    pub seed: u64,
    pub precision: u32,
    pub tolerance: f64,
}

fn cap(name: &str, value: u64, max: u64) -> Result<(), CliError> {
    if value > max {
        return Err(CliError::Core(recurlab::Error::Capacity(format!("{name} = {value} exceeds {max}"))));
    }
    Ok(())
}

fn rat(s: &str) -> Result<Q, CliError> {
    Ok(parse_rational(s)?)
}

/// Runs one command; `Ok(false)` means a certificate failed.
pub fn run(cmd: &Command, ctx: &Context<'_>) -> Result<bool, CliError> {
    match cmd {
        Command::Riesz(a) => riesz(a, ctx),
        Command::Spectral(a) => spectral(a, ctx),
        Command::Bernoulli(a) => bernoulli(a, ctx),
        Command::Rademacher(RademacherCmd::Pair(a)) => pair(a, ctx),
        Command::Rademacher(RademacherCmd::Multi(a)) => multi(a, ctx),
        Command::Skew(SkewCmd::Realize(a)) => skew(a, ctx),
        Command::Corr(CorrCmd::Build(a)) => corr_build(a, ctx),
        Command::Corr(CorrCmd::Sample(a)) => corr_sample(a, ctx),
        Command::Density(DensityCmd::Run(a)) => density(a, ctx),
        Command::Suite(SuiteCmd::Run(a)) => suite(a, ctx),
        Command::Suite(SuiteCmd::Report) => report(ctx.out_dir),
    }
}

fn riesz(a: &RieszArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    cap("n_max", a.n_max, RIESZ_MAX_N)?;
    let spec = RieszSpec::parse(&a.amplitudes)?.with_precision(ctx.precision);
    let mut table = Table::new(&["n", "value", "decimal", "width"]);
    let mut positive = 0;
    for n in 0..=a.n_max {
        let c = riesz_coefficient(&spec, n as i64);
        positive += usize::from(c.lo() > &Q::default());
        table.row([n.to_string(), enclosure(&c), float(c.mid_f64()), float(c.width_f64())]);
    }
    table.write(&ctx.out_dir.join("riesz.csv"))?;
    let digits = (a.n_max.max(1) as f64).log(3.0).ceil() as usize + 1;
    let nonnegative_amplitudes = (0..digits).all(|j| spec.amplitude(j).lo() > &Q::default());
    if !nonnegative_amplitudes {
        return Ok(true);
    }
    let total = a.n_max as usize + 1;
    let rec = CheckRecord::new(
        "riesz_positivity",
        positive,
        total,
        format!("coefficients certified positive for n <= {}", a.n_max),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

#[derive(Serialize)]
struct MeasureSummary<'a> {
    measure: &'a str,
    summary: recurlab::spectral::KeyBoundSummary,
}

fn spectral(a: &SpectralArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    cap("n_max", a.n_max, SPECTRAL_MAX_N)?;
    let measures: Vec<(String, FourierMeasure)> = if a.rule == "suite" {
        under_recurrent_suite()
            .into_iter()
            .map(|(n, m)| (n.to_string(), m))
            .collect()
    } else {
        let rule = SeqRule::parse(&a.rule)?;
        vec![(a.rule.clone(), realize_summable(&rule, &Q::from_integer(1.into()), a.n_max)?)]
    };
    let mut table = Table::new(&["measure", "n", "c_n", "decimal", "width"]);
    let mut summaries = Vec::new();
    let mut passed = 0;
    for (name, m) in &measures {
        for n in 1..=a.n_max {
            let c = m.coefficient(n as i64);
            table.row([name.clone(), n.to_string(), enclosure(&c), float(c.mid_f64()), float(c.width_f64())]);
        }
        let r = key_bound_check(m, a.n_max);
        passed += usize::from(r.fejer_holds && r.abs_sum_within_half != Some(false));
        summaries.push(MeasureSummary {
            measure: name,
            summary: r.summary(),
        });
    }
    table.write(&ctx.out_dir.join("spectral.csv"))?;
    write_json(&ctx.out_dir.join("key_bound.json"), &summaries)?;
    let rec = CheckRecord::new(
        "spectral_key",
        passed,
        measures.len(),
        format!("Fejer means nonnegative and |c| sums within 1/2 up to N = {}", a.n_max),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

fn bernoulli_params(a: &BernoulliArgs) -> Result<BernoulliParams, CliError> {
    if let Some(s) = &a.family {
        return Ok(family_params(&rat(s)?)?);
    }
    match (&a.p0, &a.p1, &a.p2) {
        (Some(p0), Some(p1), Some(p2)) => Ok(BernoulliParams::new(rat(p0)?, rat(p1)?, rat(p2)?)?),
        _ => Err(CliError::Config("give --family or all of --p0, --p1, --p2".into())),
    }
}

fn bernoulli(a: &BernoulliArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    cap("n_max", a.n_max, BERNOULLI_MAX_N)?;
    if a.oracle {
        cap("n_max with --oracle", a.n_max, ORACLE_MAX_N)?;
    }
    let p = bernoulli_params(a)?;
    let set = match a.set {
        SetArg::Over => BernoulliSet::Over,
        SetArg::Under => BernoulliSet::Under,
    };
    let name = match a.set {
        SetArg::Over => "over",
        SetArg::Under => "under",
    };
    let mean = set.mean(&p);
    let spec = set.automaton();
    let mut table = Table::new(&[
        "n",
        "value",
        "value_decimal",
        "defect",
        "defect_decimal",
        "oracle_value",
        "oracle_equal",
    ]);
    let mut passed = 0;
    for n in 1..=a.n_max {
        let value = match set {
            BernoulliSet::Over => over_correlation(&p, n),
            BernoulliSet::Under => under_correlation(&p, n),
        };
        let defect = &value - &mean * &mean;
        let sign_ok = match set {
            BernoulliSet::Over => sign_of(&defect) == Ordering::Greater,
            BernoulliSet::Under => sign_of(&defect) == under_predicted_sign(&p, n),
        };
        let (oracle_value, equal) = if a.oracle {
            let o = event_probability_oracle(&spec, &spec, &p, n as u32)?;
            let eq = o == value;
            (rational(&o), Some(eq))
        } else {
            (String::new(), None)
        };
        passed += usize::from(sign_ok && equal != Some(false));
        table.row([
            n.to_string(),
            rational(&value),
            decimal(&value),
            rational(&defect),
            decimal(&defect),
            oracle_value,
            equal.map_or(String::new(), |e| e.to_string()),
        ]);
    }
    table.write(&ctx.out_dir.join(format!("bernoulli_{name}.csv")))?;
    let rec = CheckRecord::new(
        &format!("bernoulli_{name}"),
        passed,
        a.n_max as usize,
        format!(
            "p = ({p}), defect signs as predicted{}",
            if a.oracle { ", oracle equal" } else { "" }
        ),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

fn sign_char(o: Ordering) -> &'static str {
    match o {
        Ordering::Greater => "+",
        Ordering::Less => "-",
        Ordering::Equal => "0",
    }
}

fn pair(a: &PairArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    cap("n_max", a.n_max, PAIR_MAX_N)?;
    let partition: Partition = a.partition.parse()?;
    let series = SignedSeries::geometric(SeriesKind::OneSided, rat(&a.c)?, rat(&a.r)?, partition.clone())?;
    let valid = series.validate_sign_control();
    let mut table = Table::new(&["n", "value", "decimal", "closed_form", "expected_sign", "certified_sign"]);
    let mut passed = 0;
    for n in 1..=a.n_max {
        let e = pair_correlation_truncated(&series, n, PAIR_CUTOFF)?;
        let closed = pair_correlation(&series, n).ok();
        let expected = if partition.is_positive(n) { Ordering::Greater } else { Ordering::Less };
        let certified = certified_pair_sign(&series, n, PAIR_CUTOFF).ok();
        passed += usize::from(certified == Some(expected));
        table.row([
            n.to_string(),
            enclosure(&e),
            float(e.mid_f64()),
            closed.as_ref().map_or(String::new(), rational),
            sign_char(expected).to_string(),
            certified.map_or("?", sign_char).to_string(),
        ]);
    }
    table.write(&ctx.out_dir.join("pair.csv"))?;
    let detail = match &valid {
        Ok(()) => format!("partition {partition}, c = {}, r = {}: signs certified", a.c, a.r),
        Err(e) => format!("series fails the sign-control hypothesis: {e}"),
    };
    let rec = CheckRecord::new("rademacher_pair", passed, a.n_max as usize, detail);
    rec.save(ctx.out_dir)?;
    Ok(rec.ok && valid.is_ok())
}

fn subsets(items: &[i64], size: usize) -> Vec<Vec<i64>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out: Vec<Vec<i64>> = subsets(&items[1..], size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], size));
    out
}

fn multi(a: &MultiArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    let kind = match a.variant {
        VariantArg::Under => SeriesKind::Antisymmetric,
        VariantArg::Over => SeriesKind::Symmetric,
    };
    let sets = match &a.shifts {
        Some(s) => {
            if s.len() != a.d {
                return Err(CliError::Config(format!("--shifts has {} entries but --d is {}", s.len(), a.d)));
            }
            vec![s.clone()]
        }
        None => {
            if a.span < 1 || a.span > 32 {
                return Err(CliError::Config("--span must be in 1..=32".into()));
            }
            subsets(&(1..=a.span).collect::<Vec<_>>(), a.d)
        }
    };
    let series = SignedSeries::canonical_multiple(a.d.max(2), kind)?;
    let mut table = Table::new(&[
        "shifts",
        "value",
        "value_decimal",
        "product_of_means",
        "closed_form",
        "margin",
        "certificate",
    ]);
    let mut passed = 0;
    for s in &sets {
        let r = multiple_f_correlation(&series, s)?;
        let closed = affine_moment(&series, s)?;
        let ok = r.certificate && r.holds() && closed == r.value;
        passed += usize::from(ok);
        let shifts: Vec<String> = s.iter().map(i64::to_string).collect();
        table.row([
            shifts.join(" "),
            rational(&r.value),
            decimal(&r.value),
            rational(&r.product_of_means),
            rational(&closed),
            decimal(&r.margin),
            r.certificate.to_string(),
        ]);
    }
    table.write(&ctx.out_dir.join("multi.csv"))?;
    let rec = CheckRecord::new(
        "rademacher_multi",
        passed,
        sets.len(),
        format!(
            "d = {}, {} variant: certified strictly {} 2^-d",
            a.d,
            if kind == SeriesKind::Antisymmetric { "under" } else { "over" },
            if kind == SeriesKind::Antisymmetric { "below" } else { "above" }
        ),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

fn skew(a: &SkewArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    cap("n_max", a.n_max, SKEW_MAX_N)?;
    let rule = SeqRule::parse(&a.target)?;
    let mode = match a.mode {
        ModeArg::Summable => TargetMode::Summable,
        ModeArg::Convex => TargetMode::Convex,
    };
    let sys = realize_target_with_horizon(&rule, mode, a.n_max.max(1))?;
    let mut table = Table::new(&["n", "target", "realized", "realized_decimal", "abs_diff"]);
    let mut passed = 0;
    for n in 1..=a.n_max {
        let target = rule.value(n);
        let d = sys.defect(n as i64);
        let diff = (&d - &Enclosure::exact(target.clone())).mag();
        let ok = d.contains(&target) && d.width_f64() <= ctx.tolerance;
        passed += usize::from(ok);
        table.row([n.to_string(), rational(&target), enclosure(&d), float(d.mid_f64()), decimal(&diff)]);
    }
    table.write(&ctx.out_dir.join("skew.csv"))?;
    let rec = CheckRecord::new(
        "skew_realize",
        passed,
        a.n_max as usize,
        format!("defects reproduce {} within width {}", a.target, ctx.tolerance),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

fn corr_build(a: &CorrBuildArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    let spec: SourceSpec = a.source.parse()?;
    let source = spec.build()?;
    let consistency = consistency_check(source.as_ref(), a.check_depth)?;
    let transfer = recurrence_transfer_check(source.as_ref(), a.pair_max, a.triple_max)?;
    let report = json!({
        "source": spec,
        "provenance": source.provenance(),
        "consistency": consistency,
        "consistency_holds": consistency.holds(),
        "transfer": transfer,
    });
    write_json(&ctx.out_dir.join("corr_build.json"), &report)?;
    let passed = usize::from(consistency.holds()) + usize::from(transfer.holds);
    let rec = CheckRecord::new(
        "corr_build",
        passed,
        2,
        format!(
            "{}: additivity, stationarity, nonnegativity over {} words; transfer identity up to n = {}",
            spec, consistency.words_checked, a.pair_max
        ),
    );
    rec.save(ctx.out_dir)?;
    Ok(rec.ok)
}

fn corr_sample(a: &CorrSampleArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    if a.n > SAMPLE_MAX_LEN {
        return Err(CliError::Core(recurlab::Error::Capacity(format!("--n exceeds {SAMPLE_MAX_LEN}"))));
    }
    let spec: SourceSpec = a.source.parse()?;
    let source = spec.build()?;
    let (bits, bias) = match a.markov_order {
        None => (source.sample(a.n, ctx.seed)?, None),
        Some(m) => {
            let (b, bias) = markov_sample(source.as_ref(), m, a.n, ctx.seed)?;
            (b, Some(bias))
        }
    };
    write_atomic(&ctx.out_dir.join(&a.out), &bits)?;
    let ones = bits.iter().filter(|&&b| b == 1).count();
    let summary = json!({
        "source": spec,
        "len": a.n,
        "seed": ctx.seed,
        "method": if a.markov_order.is_some() { "markov" } else { "exact" },
        "ones": ones,
        "frequency": if a.n == 0 { 0.0 } else { ones as f64 / a.n as f64 },
        "target_frequency": source.mean()?.mid_f64(),
        "markov_bias": bias,
    });
    write_json(&ctx.out_dir.join("corr_sample.json"), &summary)?;
    Ok(true)
}

#[derive(Serialize)]
struct DensityRow {
    seed: u64,
    n: u64,
    estimate: f64,
    radius: f64,
    exact: f64,
    sign_resolved: bool,
    estimated_defect: f64,
    defect_radius: f64,
    exact_defect: f64,
    verdict: Verdict,
}

fn density(a: &DensityArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    if a.len > SAMPLE_MAX_LEN {
        return Err(CliError::Core(recurlab::Error::Capacity(format!("--N exceeds {SAMPLE_MAX_LEN}"))));
    }
    if a.seeds == 0 {
        return Err(CliError::Config("--seeds must be positive".into()));
    }
    let spec: SourceSpec = a.source.parse()?;
    let source = spec.build()?;
    let partition = match &spec {
        SourceSpec::Series { partition, .. } => Some(partition.clone()),
        _ => None,
    };
    let seeds: Vec<u64> = (0..a.seeds).map(|i| ctx.seed.wrapping_add(i)).collect();
    let (reports, summary) = sign_pattern_batch(source.as_ref(), partition.as_ref(), a.n_max, a.len, &seeds)?;
    let rows: Vec<DensityRow> = reports
        .iter()
        .flat_map(|r| {
            r.rows.iter().map(move |row| DensityRow {
                seed: r.seed,
                n: row.shifts[0],
                estimate: row.estimate,
                radius: row.radius,
                exact: row.exact,
                sign_resolved: row.sign_resolved,
                estimated_defect: row.estimated_defect,
                defect_radius: row.defect_radius,
                exact_defect: row.exact_defect,
                verdict: row.verdict,
            })
        })
        .collect();
    let out = json!({
        "source": spec,
        "N": a.len,
        "seeds": seeds,
        "summary": summary,
        "rows": rows,
    });
    write_json(&ctx.out_dir.join(&a.out), &out)?;
    let ok = summary.within_fraction >= 0.99 && summary.failures == 0 && summary.resolved_of_resolvable == summary.resolvable;
    let mut rec = CheckRecord::new(
        "density",
        summary.within_radius,
        summary.cases,
        format!(
            "{spec}: estimates within 4 sigma, {}/{} resolvable defects resolved",
            summary.resolved_of_resolvable, summary.resolvable
        ),
    );
    rec.ok = ok;
    rec.save(ctx.out_dir)?;
    Ok(ok)
}

/// Commands run by `suite run`, in order.
pub fn suite_commands(len: usize) -> Vec<Command> {
    vec![
        Command::Spectral(SpectralArgs {
            rule: "suite".into(),
            n_max: 256,
        }),
        Command::Riesz(RieszArgs {
            amplitudes: "inv_sqrt".into(),
            n_max: 1000,
        }),
        Command::Bernoulli(BernoulliArgs {
            set: SetArg::Over,
            p0: Some("1/3".into()),
            p1: Some("1/3".into()),
            p2: Some("1/3".into()),
            family: None,
            n_max: 12,
            oracle: true,
        }),
        Command::Bernoulli(BernoulliArgs {
            set: SetArg::Under,
            p0: None,
            p1: None,
            p2: None,
            family: Some("1/4".into()),
            n_max: 12,
            oracle: true,
        }),
        Command::Rademacher(RademacherCmd::Pair(PairArgs {
            partition: "+-".into(),
            c: "1/2".into(),
            r: "1/2".into(),
            n_max: 40,
        })),
        Command::Rademacher(RademacherCmd::Multi(MultiArgs {
            d: 3,
            shifts: None,
            span: 6,
            variant: VariantArg::Under,
        })),
        Command::Skew(SkewCmd::Realize(SkewArgs {
            target: "geometric:1/16:1/3".into(),
            mode: ModeArg::Summable,
            n_max: 64,
        })),
        Command::Corr(CorrCmd::Build(CorrBuildArgs {
            source: "series:-".into(),
            check_depth: 8,
            pair_max: 10,
            triple_max: 5,
        })),
        Command::Density(DensityCmd::Run(DensityArgs {
            source: "bernoulli:over:1/3,1/3,1/3".into(),
            n_max: 5,
            len,
            seeds: 1,
            out: "density.json".into(),
        })),
    ]
}

fn suite(a: &SuiteArgs, ctx: &Context<'_>) -> Result<bool, CliError> {
    let mut ok = true;
    for cmd in suite_commands(a.len) {
        ok &= run(&cmd, ctx)?;
    }
    Ok(report(ctx.out_dir)? && ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_sorted_and_complete() {
        let s = subsets(&[1, 2, 3, 4, 5], 3);
        assert_eq!(s.len(), 10);
        assert!(s.iter().all(|v| v.windows(2).all(|w| w[0] < w[1])));
        assert_eq!(s[0], vec![1, 2, 3]);
        assert!(subsets(&[1, 2], 3).is_empty());
    }

    #[test]
    fn caps_raise_capacity() {
        assert!(matches!(
            cap("n_max", 11, 10),
            Err(CliError::Core(recurlab::Error::Capacity(_)))
        ));
        assert!(cap("n_max", 10, 10).is_ok());
    }
}
