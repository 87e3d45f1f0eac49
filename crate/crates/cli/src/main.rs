use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use w535::cgroup::MarkedGroup;
use w535::coset::enumerate;
use w535::model::shared;
use w535::presentation::{bundled, parse_word_list, Presentation};
use w535::semisparse::ELEMENT_CAP;
use w535::StabilizerChain;
use w535_cli::compare::{compare, CensusRecord};
use w535_cli::config::{parse_size, Check, RunConfig, BUDGET_ENV, EXTENDED_BUDGET, WORKERS_ENV};
use w535_cli::expected::{parse_expected, ExpectedTables};
use w535_cli::pipeline::{run_pipeline, verdict_json, Context};
use w535_cli::render::{render_diff, render_report, to_json};
use w535_cli::resolve::{census_row, resolve};

#[derive(Parser)]
#[command(name = "w535", version, about = "Group engine for the locally projective polytope of type {5,3,5}")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Coset limit for enumerations.
    #[arg(long, global = true)]
    max_cosets: Option<usize>,
    /// Memory budget for normalizer orbits, e.g. 512M or 8G.
    #[arg(long, global = true, env = BUDGET_ENV)]
    memory_budget: Option<String>,
    /// Worker threads.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Coset enumeration strategy: hlt or felsch.
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// Output format: json, csv or text.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Build W as J1 x L2(19) and report its order.
    Build,
    /// Enumerate cosets of a subgroup in a bundled or given presentation.
    Enumerate {
        /// `w`, `w-prime`, `w-double-prime`, `l` or a presentation file.
        #[arg(long)]
        presentation: String,
        /// Subgroup generators, separated by `;`.
        #[arg(long, default_value = "")]
        subgroup: String,
    },
    /// Check the string C-group property of W or one of its quotients.
    VerifyCgroup {
        /// `w`, `w-prime` or `w-double-prime`.
        #[arg(long, default_value = "w")]
        group: String,
    },
    /// Semisparse verdict and witness for a subgroup.
    CheckSemisparse {
        /// `table1:<row>`, `builtin:<name>` or a file of generator words.
        #[arg(long)]
        subgroup: String,
    },
    /// Facet census and normalizer quotient of subgroups.
    Census {
        #[arg(long, required = true)]
        subgroup: Vec<String>,
        /// Also count vertices, edges and 2-faces.
        #[arg(long)]
        all_ranks: bool,
        /// Skip the normalizer quotient.
        #[arg(long)]
        no_aut: bool,
    },
    /// The maximal semisparse subgroups with orders and verdicts.
    Catalog {
        #[arg(long)]
        table1: bool,
    },
    /// Diff census records against the expected tables.
    Compare {
        /// JSON report from `census` or `run-all`.
        #[arg(long)]
        report: PathBuf,
        /// Expected-values CSV; the bundled tables by default.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    RunAll {
        /// Run the long optional checks with a larger memory budget.
        #[arg(long)]
        extended: bool,
        /// Checks to run, by name or number; all by default.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
    },
}

fn config(common: &Common) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    if let Some(n) = common.max_cosets {
        c.max_cosets = n;
    }
    if let Some(b) = &common.memory_budget {
        c.budget_bytes = parse_size(b)?;
    }
    if let Some(w) = common.workers {
        if w == 0 {
            bail!("--workers must be positive");
        }
        c.workers = w;
    }
    if let Some(s) = &common.strategy {
        c.strategy = s.parse().map_err(anyhow::Error::msg)?;
    }
    c.format = common.format.parse()?;
    Ok(c)
}

fn load_presentation(name: &str) -> Result<Presentation> {
    Ok(match name {
        "w" => bundled::w(),
        "w-prime" => bundled::w_prime(),
        "w-double-prime" => bundled::w_double_prime(),
        "l" => bundled::l(),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            Presentation::parse(path, &text)?
        }
    })
}

/// Result of a verb: text to print and an exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = config(&cli.common)?;
    let model = || shared();
    match cli.command {
        Command::Build => {
            let m = model();
            Ok(Outcome::ok(to_json(&json!({
                "degree": m.degree(),
                "j1_degree": m.j1().degree(),
                "l2_degree": m.l2().degree(),
                "j1_order": m.j1().order(),
                "l2_order": m.l2().order(),
                "order": m.order(),
                "chain_order": m.chain().order() as u64,
            }))))
        }
        Command::Enumerate { presentation, subgroup } => {
            let pres = load_presentation(&presentation)?;
            let words = parse_word_list(pres.alphabet(), &subgroup.replace(';', "\n"))?;
            let table = enumerate(&pres, &words, &cfg.limits())?;
            let index = table.index();
            let action_order = match table.coset_action() {
                Ok(a) => Some(StabilizerChain::build(a.degree(), a.perms()).order() as u64),
                Err(_) => None,
            };
            let s = table.stats();
            Ok(Outcome::ok(to_json(&json!({
                "presentation": pres.name(),
                "subgroup_generators": words.len(),
                "index": index,
                "action_order": action_order,
                "total_defined": s.total_defined,
                "max_live": s.max_live,
                "coincidences": s.coincidences,
            }))))
        }
        Command::VerifyCgroup { group } => {
            let m = model();
            let g = match group.as_str() {
                "w" => MarkedGroup::w(m),
                "w-prime" => MarkedGroup::w_prime(m),
                "w-double-prime" => MarkedGroup::w_double_prime(m),
                other => bail!("unknown group {other:?} (expected w, w-prime or w-double-prime)"),
            };
            let string = g.check_string().is_ok();
            let verdict = g.intersection_property(ELEMENT_CAP)?;
            let parabolics: Vec<_> = (0..g.rank())
                .map(|i| json!({"omit": i, "order": g.maximal_parabolic(i).order() as u64}))
                .collect();
            let pass = string && verdict.passed();
            Ok(Outcome {
                text: to_json(&json!({
                    "group": g.name(),
                    "order": g.order() as u64,
                    "schlafli": g.schlafli(),
                    "string": string,
                    "intersection_property": verdict.passed(),
                    "maximal_parabolics": parabolics,
                })),
                code: if pass { 0 } else { 1 },
            })
        }
        Command::CheckSemisparse { subgroup } => {
            let spec = resolve(&subgroup)?;
            let ctx = Context::new(cfg, ExpectedTables::default());
            let v = ctx.checker().check(&spec, ELEMENT_CAP)?;
            Ok(Outcome::ok(to_json(&verdict_json(ctx.model(), &spec, &v))))
        }
        Command::Census {
            subgroup,
            all_ranks,
            no_aut,
        } => {
            let specs = subgroup.iter().map(|s| resolve(s)).collect::<Result<Vec<_>, _>>()?;
            let ctx = Context::new(cfg, ExpectedTables::bundled());
            let reports = w535_cli::pipeline::census_records(&ctx, &specs, all_ranks, !no_aut)?;
            let mut records = Vec::new();
            let mut rows = Vec::new();
            for (spec, q) in &reports {
                rows.push(json!({
                    "subgroup": spec.id,
                    "row": census_row(spec),
                    "order": q.order,
                    "d": q.d,
                    "h": q.h,
                    "vertices": q.vertices,
                    "edges": q.edges,
                    "faces2": q.faces2,
                    "aut_order": q.aut_order(),
                    "aut_skipped": match &q.aut {
                        Some(w535::census::AutResult::Skipped(msg)) => Some(msg.clone()),
                        _ => None,
                    },
                }));
                if let Some(row) = census_row(spec) {
                    records.push(CensusRecord::from_report(row, q));
                }
            }
            Ok(Outcome::ok(to_json(&json!({ "census": rows, "records": records }))))
        }
        Command::Catalog { table1 } => {
            if !table1 {
                bail!("only --table1 is available");
            }
            let ctx = Context::new(cfg, ExpectedTables::default());
            let verdicts = ctx.table1_verdicts().map_err(anyhow::Error::msg)?;
            let rows: Vec<_> = verdicts.iter().map(|(s, v)| verdict_json(ctx.model(), s, v)).collect();
            let failing = verdicts.iter().filter(|(_, v)| !v.semisparse).count();
            Ok(Outcome {
                text: to_json(&json!({ "rows": rows, "count": rows.len(), "not_semisparse": failing })),
                code: if failing == 0 { 0 } else { 1 },
            })
        }
        Command::Compare { report, expected } => {
            let exp = match expected {
                Some(p) => parse_expected(&std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => ExpectedTables::bundled(),
            };
            let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let records: Vec<CensusRecord> = match value.get("records") {
                Some(r) => serde_json::from_value(r.clone())?,
                None => {
                    // A run-all report keeps its records per check.
                    let checks = value.get("checks").context("report has neither records nor checks")?;
                    let mut out: Vec<CensusRecord> = Vec::new();
                    for c in checks.as_array().context("checks is not an array")? {
                        if let Some(r) = c.get("records") {
                            for rec in serde_json::from_value::<Vec<CensusRecord>>(r.clone())? {
                                match out.iter_mut().find(|e| e.row == rec.row) {
                                    Some(e) => e.merge(&rec),
                                    None => out.push(rec),
                                }
                            }
                        }
                    }
                    out
                }
            };
            let diff = compare(&records, &exp);
            Ok(Outcome {
                text: render_diff(&diff, cfg.format),
                code: if diff.all_match() { 0 } else { 1 },
            })
        }
        Command::RunAll { extended, checks } => {
            cfg.extended = extended;
            if extended && cli.common.memory_budget.is_none() {
                cfg.budget_bytes = EXTENDED_BUDGET;
            }
            if let Some(list) = checks {
                cfg.checks = list
                    .iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<Check>())
                    .collect::<Result<_, _>>()?;
            }
            let format = cfg.format;
            let ctx = Context::new(cfg, ExpectedTables::bundled());
            let report = run_pipeline(&ctx);
            Ok(Outcome {
                text: render_report(&report, format),
                code: report.exit_code() as u8,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
