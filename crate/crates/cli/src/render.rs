//! Output rendering.  The LaTeX format is a thin view over the same data as
//! the JSON format; no information is format-specific.

use clap::ValueEnum;
use serde_json::json;

use bpfgl::ideals::RealisabilityReport;
use bpfgl::report::CheckResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub struct Row {
    pub label: String,
    pub value: String,
    pub note: Option<String>,
}

pub fn print_rows(format: Format, command: &str, rows: &[Row]) {
    match format {
        Format::Text => {
            for r in rows {
                match &r.note {
                    Some(note) => println!("{} = {}    [{note}]", r.label, r.value),
                    None => println!("{} = {}", r.label, r.value),
                }
            }
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    let mut obj = json!({ "label": r.label, "value": r.value });
                    if let Some(note) = &r.note {
                        obj["note"] = json!(note);
                    }
                    obj
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "command": command, "rows": rows }))
                    .expect("serializing rows")
            );
        }
        Format::Latex => {
            println!("\\begin{{align*}}");
            for r in rows {
                let note = r
                    .note
                    .as_ref()
                    .map(|n| format!(" && \\text{{{n}}}"))
                    .unwrap_or_default();
                println!(
                    "  {} &= {}{note} \\\\",
                    latex_math(&r.label),
                    latex_math(&r.value)
                );
            }
            println!("\\end{{align*}}");
        }
    }
}

pub fn print_results(format: Format, results: &[CheckResult], seed: Option<u64>) {
    match format {
        Format::Text => {
            for r in results {
                let mut line = format!(
                    "{:<6} {:<22} [{}]  ({} ms)",
                    r.status, r.check_id, r.truncation, r.wall_ms
                );
                if let Some(w) = &r.residual {
                    line.push_str(&format!("\n       residual: {w}"));
                }
                println!("{line}");
            }
            let passed = results.iter().filter(|r| r.status == "pass").count();
            println!("{passed}/{} checks passed", results.len());
        }
        Format::Json => {
            let mut doc = json!({ "results": results });
            if let Some(seed) = seed {
                doc["seed"] = json!(seed);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializing results")
            );
        }
        Format::Latex => {
            println!("\\begin{{tabular}}{{llll}}");
            println!("check & parameters & status & time (ms) \\\\ \\hline");
            for r in results {
                println!(
                    "\\texttt{{{}}} & ${}$ & {} & {} \\\\",
                    r.check_id,
                    latex_math(&r.truncation),
                    r.status,
                    r.wall_ms
                );
            }
            println!("\\end{{tabular}}");
        }
    }
}

pub fn print_realisability(format: Format, report: &RealisabilityReport) {
    match format {
        Format::Text => {
            println!(
                "{}: {}",
                report.name,
                if report.pass { "PASS" } else { "FAIL" }
            );
            for c in &report.checks {
                match &c.witness {
                    Some(w) => println!("  {:<6} {}    witness: {w}", c.status, c.hypothesis),
                    None => println!("  {:<6} {}", c.status, c.hypothesis),
                }
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("serializing report")
            );
        }
        Format::Latex => {
            println!("\\paragraph{{{}}} {}.", report.name, if report.pass { "PASS" } else { "FAIL" });
            println!("\\begin{{itemize}}");
            for c in &report.checks {
                let witness = c
                    .witness
                    .as_ref()
                    .map(|w| format!(" (witness ${}$)", latex_math(w)))
                    .unwrap_or_default();
                println!("  \\item [{}] ${}${witness}", c.status, latex_math(&c.hypothesis));
            }
            println!("\\end{{itemize}}");
        }
    }
}

/// Convert the canonical polynomial text (`v1^12*v2 + v4`) into LaTeX math
/// (`v_{1}^{12} v_{2} + v_{4}`).  Purely lexical; subscripts follow variable
/// letters, exponents follow `^`.
pub fn latex_math(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '*' => out.push(' '),
            'v' | 'm' | 'u' | 'w' | 'p' | 'q' | 'x' if chars.peek().is_some_and(|d| d.is_ascii_digit()) => {
                out.push(c);
                out.push_str("_{");
                while let Some(d) = chars.peek().copied() {
                    if d.is_ascii_digit() {
                        out.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push('}');
            }
            '^' => {
                out.push_str("^{");
                while let Some(d) = chars.peek().copied() {
                    if d.is_ascii_digit() {
                        out.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push('}');
            }
            '_' => {
                // Already-subscripted labels like `p_0` pass through with braces.
                out.push_str("_{");
                while let Some(d) = chars.peek().copied() {
                    if d.is_ascii_digit() {
                        out.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push('}');
            }
            _ => out.push(c),
        }
    }
    out
}
