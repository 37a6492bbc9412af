//! Golden-file maintenance.  Each golden-backed check id has a registered
//! producer that recomputes the canonical text through an independent oracle
//! path; regeneration is refused if the oracle disagrees with the closed
//! forms, and `--verify` byte-compares instead of rewriting.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};

use bpfgl::{fgl, ideals, powerop};

use crate::Cli;

const GOLDEN_IDS: [&str; 4] = ["pn", "un", "ideal-j-n2", "wseries"];

pub fn cmd_golden(
    _cli: &Cli,
    dir: &Path,
    checks: &[String],
    verify: bool,
) -> Result<ExitCode> {
    let ids: Vec<&str> = if checks.is_empty() {
        GOLDEN_IDS.to_vec()
    } else {
        let mut ids = Vec::new();
        for c in checks {
            if !GOLDEN_IDS.contains(&c.as_str()) {
                bail!(
                    "no golden registered for `{c}` (available: {})",
                    GOLDEN_IDS.join(", ")
                );
            }
            ids.push(c.as_str());
        }
        ids
    };
    let mut mismatches = Vec::new();
    for id in ids {
        let path: PathBuf = dir.join(format!("{id}.txt"));
        let content = produce(id, dir)?;
        if verify {
            let existing = std::fs::read_to_string(&path)
                .with_context(|| format!("reading golden {}", path.display()))?;
            if existing == content {
                println!("ok       {id}");
            } else {
                println!("MISMATCH {id} ({})", path.display());
                mismatches.push(id);
            }
        } else {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            std::fs::write(&path, &content)
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote    {}", path.display());
        }
    }
    Ok(if mismatches.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn produce(id: &str, dir: &Path) -> Result<String> {
    let mut out = format!(
        "# regen: bpfgl golden --check {id} --dir {}\n",
        dir.display()
    );
    match id {
        "pn" => {
            // Oracle gate: refuse to write closed forms the coefficient
            // extraction does not reproduce.
            let nmax = 3;
            let extracted = powerop::p_list_extracted(nmax)?;
            for n in 0..=nmax {
                let p = powerop::p_n_closed(n)?;
                if extracted[n as usize] != p {
                    bail!("oracle disagreement at p_{n}; refusing to regenerate");
                }
                out.push_str(&format!("p_{n} = {p}\n"));
            }
        }
        "un" => {
            for n in 1..=4u32 {
                // u_n already cross-checks its two constructions.
                out.push_str(&format!("u_{n} = {}\n", powerop::u_n(n)?));
            }
        }
        "ideal-j-n2" => {
            // Oracle gate for x_4: substitute v3 -> 0 in p_3.
            let j = ideals::construct_j(2, 6)?;
            let gens = j.generators();
            let p3 = powerop::p_n_closed(3)?;
            // p_3 already carries the v4 term, so the substitution alone
            // yields the expected x_4.
            let kill_v3 = ideals::TriangularIdeal::vanishing_vars([3]);
            let oracle_x4 = kill_v3.nf(&p3)?;
            if gens.get(1) != Some(&oracle_x4) {
                bail!("oracle disagreement at x_4; refusing to regenerate");
            }
            for (i, g) in gens.iter().enumerate() {
                out.push_str(&format!("x_{} = {g}\n", 3 + i));
            }
        }
        "wseries" => {
            let kmax = 4u32;
            let count = 1u32 << kmax;
            let fgl = fgl::build_bp_fgl_cached(count + 2)?;
            let ws = fgl::w_series(&fgl, count)?;
            for k in 0..=kmax {
                out.push_str(&format!("q(w_{k}) = {}\n", ws[(1usize << k) - 1]));
            }
        }
        other => bail!("no golden producer for `{other}`"),
    }
    Ok(out)
}
