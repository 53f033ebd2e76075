mod args;
mod commands;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches};

use args::{Cli, Command, Format};
use commands::{Factor, InputError, Outcome};
use report::{render_text, Report, SCHEMA};

/// Hypergraph-product factors in command-line order.
fn hgp_factors(m: &ArgMatches) -> Vec<Factor> {
    let mut out: Vec<(usize, Factor)> = Vec::new();
    let mut take = |id: &str, make: &dyn Fn(&ArgMatches, usize) -> Factor| {
        if let Some(idx) = m.indices_of(id) {
            for (i, at) in idx.enumerate() {
                out.push((at, make(m, i)));
            }
        }
    };
    take("rep", &|m, i| Factor::Rep(*m.get_many::<usize>("rep").unwrap().nth(i).unwrap()));
    take("cyclic", &|m, i| Factor::Cyclic(*m.get_many::<usize>("cyclic").unwrap().nth(i).unwrap()));
    take("checks", &|m, i| {
        Factor::Checks(m.get_many::<std::path::PathBuf>("checks").unwrap().nth(i).unwrap().clone())
    });
    take("alist", &|m, i| {
        Factor::Alist(m.get_many::<std::path::PathBuf>("alist").unwrap().nth(i).unwrap().clone())
    });
    out.sort_by_key(|(at, _)| *at);
    out.into_iter().map(|(_, f)| f).collect()
}

fn run(cli: &Cli, matches: &ArgMatches) -> Result<Outcome, InputError> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Simulate(_)) {
        return Err(InputError("csv output is only available for simulate".into()));
    }
    match &cli.command {
        Command::Code(a) => commands::cmd_code(a),
        Command::Bbs(a) => commands::cmd_bbs(a, cli.seed),
        Command::Hgp(a) => {
            let sub = matches.subcommand_matches("hgp").expect("hgp matches");
            commands::cmd_hgp(a, &hgp_factors(sub))
        }
        Command::Gaugefix(a) => commands::cmd_gaugefix(a),
        Command::Expander(a) => commands::cmd_expander(a, cli.seed),
        Command::Simulate(a) => commands::cmd_simulate(a, cli.seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let outcome = match run(&cli, &matches) {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let config = serde_json::to_value(&cli).expect("config serializes");
    let command = matches.subcommand_name().unwrap_or_default().to_string();
    let report = Report {
        schema: SCHEMA.into(),
        command,
        seed: cli.seed,
        config,
        ok: outcome.ok,
        result: outcome.result,
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => render_text(&report),
        Format::Csv => {
            let header = format!(
                "# schema={SCHEMA} seed={} config={}\n",
                report.seed,
                serde_json::to_string(&report.config).expect("config serializes")
            );
            header + outcome.csv.as_deref().unwrap_or_default()
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
