//! Command-line front end.
//!
//! Exit codes: 0 for a definitive verdict (or a finished command), 1 for
//! usage errors, 2 for invalid input, 3 for an inconclusive verdict under
//! `--strict` or an exhausted resource limit.

pub mod json;
pub mod sweep;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::error::{invalid, usage, Error, Result};
use crate::families::{family_build, family_ci, Family, FamilyParams};
use crate::oracle::{oracle_ci, projective_oracle_ci};
use crate::reduction::{affine_ci, projective_ci, ReductionStep};
use crate::semigroup::{frobenius, CurveSpec};
use crate::verdict::{Decision, Verdict};
use json::VerdictDoc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "toric-ci", version, about = "Complete-intersection decisions for monomial curves")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Output {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit a JSON document.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit a header and one CSV row.
    #[arg(long)]
    pub csv: bool,
}

impl OutputArgs {
    pub fn mode(&self) -> Output {
        match (self.json, self.csv) {
            (true, _) => Output::Json,
            (_, true) => Output::Csv,
            _ => Output::Text,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the ideal of the affine curve is a complete intersection.
    Affine {
        /// Comma-separated positive integers.
        #[arg(long)]
        gens: String,
        /// Degree bound handed to the oracle when the reduction is not decisive.
        #[arg(long)]
        bound: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
        /// Exit with status 3 on an inconclusive verdict.
        #[arg(long)]
        strict: bool,
    },
    /// Decide the same question for the projective closure.
    Projective {
        #[arg(long)]
        gens: String,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        strict: bool,
    },
    /// Apply the closed-form characterization of a family.
    Family {
        /// One of gen-arith, almost, fib, lucas.
        name: String,
        /// Parameters as name=value pairs, comma- or space-separated.
        #[arg(required = true)]
        params: Vec<String>,
        #[arg(long)]
        projective: bool,
        /// Run the general algorithm when the family hypotheses fail.
        #[arg(long)]
        fallback: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        strict: bool,
    },
    /// Frobenius number of the semigroup generated by the values.
    Frobenius {
        #[arg(long)]
        gens: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count minimal generators by fiber enumeration.
    Oracle {
        #[arg(long)]
        gens: String,
        /// Degree bound (total degree for --projective).
        #[arg(long)]
        bound: Option<String>,
        #[arg(long)]
        projective: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        strict: bool,
    },
    /// Compare a family characterization with the general algorithms over a grid.
    Sweep {
        #[arg(long)]
        family: String,
        /// Inclusive ranges, e.g. d1=2..20,h=1..3,step=1..8,n=3..6
        #[arg(long)]
        ranges: String,
        /// CSV destination.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        projective: bool,
        /// Largest term for which the oracle is also run.
        #[arg(long, default_value_t = 200)]
        oracle_max: u64,
    },
}

fn parse_positive(token: &str) -> Result<BigUint> {
    let t = token.trim();
    if let Some(rest) = t.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid(format!("{t} is not positive")));
        }
    }
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(usage(format!("'{t}' is not a nonnegative integer")));
    }
    Ok(t.parse().expect("digits parse"))
}

/// Parses a comma-separated list of generators.
pub fn parse_gens(list: &str) -> Result<CurveSpec> {
    let values = list.split(',').map(parse_positive).collect::<Result<Vec<_>>>()?;
    CurveSpec::new(values)
}

/// Parses `name=value` pairs into a family.
pub fn parse_family(name: &str, params: &[String]) -> Result<Family> {
    let names = Family::field_names(name).ok_or_else(|| usage(format!("unknown family '{name}'")))?;
    let mut values = BTreeMap::new();
    for pair in params.iter().flat_map(|p| p.split(',')).map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| usage(format!("'{pair}' is not name=value")))?;
        if !names.contains(&k) {
            return Err(usage(format!("'{k}' is not a parameter of {name}")));
        }
        let v = parse_positive(v)?.try_into().map_err(|_| invalid(format!("{k} does not fit in 64 bits")))?;
        values.insert(k.to_string(), v);
    }
    Family::from_fields(name, |k| values.get(k).copied())
}

fn step_line(step: &ReductionStep) -> String {
    match step {
        ReductionStep::Scale { slot, factor } => format!("scale {} by {factor}", json::var(*slot)),
        ReductionStep::Remove { slot, certificate } => {
            let terms: Vec<String> = certificate
                .coeffs()
                .iter()
                .map(|(&j, c)| if c == &BigUint::from(1u32) { json::var(j) } else { format!("{c}*{}", json::var(j)) })
                .collect();
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            format!("remove {} ({} = {rhs})", json::var(*slot), certificate.target())
        }
        ReductionStep::DropIsolated { slot } => format!("drop {}", json::var(*slot)),
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = String::new();
    let head = match v.decision {
        Decision::Ci => "CI",
        Decision::NotCi => "not CI",
        Decision::Inconclusive => "inconclusive",
    };
    s += &format!("{head}\nmethod: {}\n", v.method.tag());
    if let Some(gens) = &v.generators {
        s += "generators:\n";
        for g in gens {
            s += &format!("  {g}    degree {}\n", g.degree());
        }
    }
    if let Some(g) = &v.frobenius {
        s += &format!("frobenius: {g}\n");
    }
    if let Some(t) = v.trace.as_ref().filter(|t| !t.steps.is_empty()) {
        s += "reduction:\n";
        for step in &t.steps {
            s += &format!("  {}\n", step_line(step));
        }
        if !t.is_empty_residual() {
            let rest: Vec<String> = t.residual_values.iter().map(|v| v.to_string()).collect();
            s += &format!("residual: {{{}}}\n", rest.join(","));
        }
    }
    if let Some(r) = &v.oracle {
        s += &format!(
            "oracle: {} generators up to degree {} ({})\n",
            r.mu_within_bound,
            r.bound,
            if r.certified { "complete" } else { "partial" }
        );
    }
    s
}

fn csv_text(doc: &VerdictDoc) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Resource(e.to_string());
    w.write_record(["input", "variant", "verdict", "method", "frobenius"]).map_err(io)?;
    w.write_record([
        doc.input.join(" "),
        doc.variant.clone(),
        doc.verdict.clone(),
        doc.method.clone(),
        doc.frobenius.clone().unwrap_or_default(),
    ])
    .map_err(io)?;
    let bytes = w.into_inner().map_err(|e| Error::Resource(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

struct Report {
    text: String,
    decision: Option<Decision>,
}

fn render(doc: &VerdictDoc, text: String, mode: Output) -> Result<String> {
    Ok(match mode {
        Output::Text => text,
        Output::Json => doc.to_json() + "\n",
        Output::Csv => csv_text(doc)?,
    })
}

fn verdict_report(a: &CurveSpec, projective: bool, v: &Verdict, mode: Output) -> Result<Report> {
    let doc = VerdictDoc::new(a, projective, v);
    Ok(Report { text: render(&doc, verdict_text(v), mode)?, decision: Some(v.decision) })
}

fn bound_arg(bound: &Option<String>) -> Result<Option<BigUint>> {
    bound.as_deref().map(parse_positive).transpose()
}

fn execute(command: &Command) -> Result<(Report, bool)> {
    match command {
        Command::Affine { gens, bound, output, strict } => {
            let a = parse_gens(gens)?;
            let v = affine_ci(&a, bound_arg(bound)?.as_ref());
            Ok((verdict_report(&a, false, &v, output.mode())?, *strict))
        }
        Command::Projective { gens, output, strict } => {
            let a = parse_gens(gens)?;
            Ok((verdict_report(&a, true, &projective_ci(&a), output.mode())?, *strict))
        }
        Command::Oracle { gens, bound, projective, output, strict } => {
            let a = parse_gens(gens)?;
            let bound = bound_arg(bound)?;
            let v =
                if *projective { projective_oracle_ci(&a, bound.as_ref())? } else { oracle_ci(&a, bound.as_ref())? };
            Ok((verdict_report(&a, *projective, &v, output.mode())?, *strict))
        }
        Command::Frobenius { gens, output } => {
            let a = parse_gens(gens)?;
            let g = frobenius(&a)?;
            let text = match output.mode() {
                Output::Text => format!("{g}\n"),
                Output::Json => {
                    let doc = serde_json::json!({
                        "input": a.gens().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "frobenius": g.to_string(),
                    });
                    serde_json::to_string_pretty(&doc).expect("json") + "\n"
                }
                Output::Csv => {
                    format!("input,frobenius\n{},{g}\n", a.to_string().trim_matches(['{', '}']).replace(',', " "))
                }
            };
            Ok((Report { text, decision: None }, false))
        }
        Command::Family { name, params, projective, fallback, output, strict } => {
            let family = parse_family(name, params)?;
            let fp = FamilyParams { family, projective: *projective };
            let a = family_build(&fp)?;
            let fv = family_ci(&fp)?;
            let mut doc = VerdictDoc::from_family(&a, *projective, &fv);
            let mut text = verdict_text(&fv.verdict);
            if let Some(m) = &fv.matched_condition {
                text += &format!("matched condition: {m}\n");
            }
            for h in fv.hypothesis_report.iter().filter(|h| !h.satisfied) {
                text += &format!("hypothesis {h}\n");
            }
            let mut decision = fv.verdict.decision;
            if *fallback && decision == Decision::Inconclusive {
                let b = a.dedup();
                let general = if *projective { projective_ci(&b) } else { affine_ci(&b, None) };
                text += &format!("general algorithm on {b}:\n{}", verdict_text(&general));
                doc.fallback = Some(Box::new(VerdictDoc::new(&b, *projective, &general)));
                decision = general.decision;
            }
            Ok((Report { text: render(&doc, text, output.mode())?, decision: Some(decision) }, *strict))
        }
        Command::Sweep { family, ranges, out, projective, oracle_max } => {
            let ranges = sweep::parse_ranges(ranges)?;
            let outcome = sweep::run_sweep(family, &ranges, *projective, &BigUint::from(*oracle_max))?;
            let file = std::fs::File::create(out)
                .map_err(|e| Error::Resource(format!("cannot create {}: {e}", out.display())))?;
            sweep::write_csv(file, &outcome.rows).map_err(|e| Error::Resource(e.to_string()))?;
            let text = format!(
                "points: {}, outside hypotheses: {}, invalid: {}, disagreements: {}\n",
                outcome.rows.len(),
                outcome.skipped,
                outcome.rejected,
                outcome.disagreements()
            );
            Ok((Report { text, decision: None }, false))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::InvalidInput(_) => EXIT_INVALID,
        Error::Resource(_) => EXIT_INCONCLUSIVE,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(&config.command) {
        Ok((report, strict)) => {
            let _ = out.write_all(report.text.as_bytes());
            if strict && report.decision == Some(Decision::Inconclusive) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::Usage(_)) {
                let _ = writeln!(err, "run with --help for usage");
            }
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("toric-ci").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gens_parsing() {
        assert_eq!(parse_gens("4, 5,6").unwrap().to_u64().unwrap(), vec![4, 5, 6]);
        assert!(matches!(parse_gens("0,3"), Err(Error::InvalidInput(_))));
        assert!(matches!(parse_gens("-2,3"), Err(Error::InvalidInput(_))));
        assert!(matches!(parse_gens("a,3"), Err(Error::Usage(_))));
        assert!(matches!(parse_gens("3,,4"), Err(Error::Usage(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["affine", "--gens", "11,18,29"]).0, 0);
        assert_eq!(call(&["affine", "--gens", "0,3"]).0, 2);
        assert_eq!(call(&["affine", "--gens", "x"]).0, 1);
        assert_eq!(call(&["affine", "--nope"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["family", "fib", "p=2,q=4,h=1,a=2,d=1,n=3"]).0, 2);
        assert_eq!(call(&["family", "gen-arith", "d1=2,h=1,step=1,n=4", "--strict"]).0, 3);
        assert_eq!(call(&["family", "gen-arith", "d1=2,h=1,step=1,n=4", "--strict", "--fallback"]).0, 0);
    }

    #[test]
    fn text_output_lists_generators() {
        let (code, out, _) = call(&["affine", "--gens", "11,18,29"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("CI\n"));
        assert!(out.contains("generators:"));
        let (_, out, _) = call(&["family", "fib", "p=1", "q=1", "h=1", "a=8", "d=2", "n=3"]);
        assert!(out.contains("x1^48 - x3^7"));
    }
}
