use std::fs;
use std::path::{Path, PathBuf};

use bbs_codes::bbs::{abbs_from_matrix, bbs_from_codes, bbs_from_matrix, minimize_weight_q, BbsCode, QSearch};
use bbs_codes::classical::{
    cyclic_repetition_checks, hamming_code, read_alist, repetition_checks, repetition_code, Distance, LinearCode,
};
use bbs_codes::expander::{expansion_profile, random_bipartite, tanner_code, BipartiteGraph};
use bbs_codes::flip::FlipGuarantee;
use bbs_codes::gaugefix::{
    bbs_fixing_of_abbs, dressed_subset_check, gauge_switching_check, hgp_fixings_of_abbs, is_gauge_fixing,
    kernel_checks, Verdict,
};
use bbs_codes::hgp::hgp_code;
use bbs_codes::pauli::{CssGroup, QubitLayout, SubsystemCode, MAX_BRUTEFORCE_QUBITS};
use bbs_codes::sim::{induced_bound_check, Decoder, NoiseModel, Simulator};
use bbs_codes::{BitMatrix, Error};
use serde_json::{json, Value};

use crate::args::*;

/// Bad input: exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

pub type CmdResult = Result<Outcome, InputError>;

pub struct Outcome {
    pub ok: bool,
    pub result: Value,
    /// Pre-rendered CSV for commands that support it.
    pub csv: Option<String>,
}

impl Outcome {
    fn new(ok: bool, result: Value) -> Self {
        Self { ok, result, csv: None }
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn dense(path: &Path) -> Result<BitMatrix, InputError> {
    BitMatrix::from_dense_text(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn alist(path: &Path) -> Result<BitMatrix, InputError> {
    read_alist(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn dist(d: Distance) -> Value {
    match d {
        Distance::Finite(d) => json!(d),
        Distance::Infinite => json!("inf"),
    }
}

fn classical(src: &ClassicalSource) -> Result<LinearCode, InputError> {
    Ok(if let Some(p) = &src.checks {
        LinearCode::from_checks(dense(p)?)
    } else if let Some(p) = &src.alist {
        LinearCode::from_checks(alist(p)?)
    } else if let Some(p) = &src.generator {
        LinearCode::from_span(&dense(p)?)
    } else if src.hamming {
        hamming_code()
    } else if let Some(n) = src.rep {
        repetition_code(n)?
    } else {
        return Err(InputError("no code given: use --checks, --alist, --generator, --hamming or --rep".into()));
    })
}

pub fn cmd_code(args: &CodeArgs) -> CmdResult {
    let code = classical(&args.source)?;
    let t = code.transpose_code();
    let ldpc = code.ldpc_profile();
    Ok(Outcome::new(
        true,
        json!({
            "n": code.n(),
            "k": code.k(),
            "d": dist(code.distance()?),
            "checks": code.checks().rows(),
            "ldpc": { "b": ldpc.b, "c": ldpc.c },
            "transpose": { "n": t.n(), "k": t.k(), "d": dist(t.distance()?) },
        }),
    ))
}

fn bbs_summary(code: &BbsCode) -> Result<Value, InputError> {
    let st = code.code().stabilizer();
    Ok(json!({
        "n": code.n(),
        "k": code.k(),
        "d": dist(code.distance()?),
        "d_x": dist(code.distance_x()?),
        "d_z": dist(code.distance_z()?),
        "params": code.params()?.to_string(),
        "a": code.a().to_dense_text(),
        "removed_rows": code.removed_rows(),
        "removed_cols": code.removed_cols(),
        "stabilizer_ranks": [st.gx.rank(), st.gz.rank()],
        "weight_bounds": code.weight_bounds()?,
    }))
}

pub fn cmd_bbs(args: &BbsArgs, seed: u64) -> CmdResult {
    let mut search = Value::Null;
    let mut q_used = None;
    let code = if let Some(p) = &args.matrix {
        if args.q_search != QSearchMode::None || args.q_matrix.is_some() {
            return Err(InputError("--q and --q-search need codes, not --matrix".into()));
        }
        bbs_from_matrix(&dense(p)?)?
    } else {
        let (c1, c2) = if args.hamming {
            (hamming_code(), hamming_code())
        } else if let Some(n) = args.rep {
            (repetition_code(n)?, repetition_code(n)?)
        } else if let (Some(a), Some(b)) = (&args.code1, &args.code2) {
            (LinearCode::from_checks(dense(a)?), LinearCode::from_checks(dense(b)?))
        } else {
            return Err(InputError("no input: use --matrix, --hamming, --rep or --code1/--code2".into()));
        };
        let mode = match args.q_search {
            QSearchMode::None => None,
            QSearchMode::Exhaustive => Some(QSearch::Exhaustive),
            QSearchMode::Heuristic => Some(QSearch::Heuristic {
                restarts: args.restarts,
                budget: args.budget,
                seed,
            }),
            QSearchMode::Auto => Some(QSearch::auto(c1.k(), args.restarts, args.budget, seed)),
        };
        match mode {
            None => {
                let q = match &args.q_matrix {
                    Some(p) => dense(p)?,
                    None => BitMatrix::identity(c1.k()),
                };
                let code = bbs_from_codes(&c1, &c2, &q)?;
                q_used = Some(q);
                code
            }
            Some(m) => {
                if args.q_matrix.is_some() {
                    return Err(InputError("--q conflicts with a Q search".into()));
                }
                let r = minimize_weight_q(&c1, &c2, m)?;
                search = json!({ "weight": r.weight, "evaluations": r.evaluations, "certified": r.certified });
                q_used = Some(r.q);
                r.code
            }
        }
    };

    let mut result = bbs_summary(&code)?;
    let mut ok = code.weight_bounds()?.holds();
    result["q"] = q_used.map_or(Value::Null, |q| json!(q.to_dense_text()));
    result["q_search"] = search;
    if args.abbs {
        let ab = abbs_from_matrix(code.a())?;
        result["abbs"] = json!({
            "n": ab.n(),
            "k": ab.k(),
            "d": dist(ab.distance()?),
            "generators": ab.generator_count(),
        });
    }
    if args.bruteforce {
        let d = bruteforce(code.code())?;
        ok &= d == code.distance()?;
        result["d_bruteforce"] = dist(d);
    }
    Ok(Outcome::new(ok, result))
}

fn bruteforce(code: &SubsystemCode) -> Result<Distance, InputError> {
    if code.n() > MAX_BRUTEFORCE_QUBITS {
        return Err(InputError(format!(
            "--bruteforce needs N <= {MAX_BRUTEFORCE_QUBITS}, got {}",
            code.n()
        )));
    }
    Ok(code.dressed_distance_bruteforce()?)
}

/// A factor of the hypergraph product, tagged with its command-line index.
pub enum Factor {
    Rep(usize),
    Cyclic(usize),
    Checks(PathBuf),
    Alist(PathBuf),
}

impl Factor {
    fn matrix(&self) -> Result<BitMatrix, InputError> {
        match self {
            Factor::Rep(n) => Ok(repetition_checks(*n)),
            Factor::Cyclic(n) => Ok(cyclic_repetition_checks(*n)),
            Factor::Checks(p) => dense(p),
            Factor::Alist(p) => alist(p),
        }
    }
}

pub fn cmd_hgp(args: &HgpArgs, factors: &[Factor]) -> CmdResult {
    let (h1, h2) = match factors {
        [f] => (f.matrix()?, f.matrix()?),
        [f, g] => (f.matrix()?, g.matrix()?),
        _ => {
            return Err(InputError(format!(
                "hgp takes one or two factors, got {}",
                factors.len()
            )))
        }
    };
    let code = hgp_code(&h1, &h2)?;
    let ldpc = code.ldpc();
    let ks: Vec<usize> = code.classical().iter().map(|c| c.k()).collect();
    let mut result = json!({
        "n": code.n(),
        "k": code.k(),
        "k_formula": code.k_formula(),
        "d": dist(code.distance()?),
        "params": code.params()?.to_string(),
        "stabilizer_ranks": [code.sx().rank(), code.sz().rank()],
        "ldpc": { "beta": ldpc.beta, "gamma": ldpc.gamma },
        "classical_k": ks,
    });
    let mut ok = code.k() == code.k_formula();
    if args.bruteforce {
        let d = bruteforce(code.code())?;
        ok &= d == code.distance()?;
        result["d_bruteforce"] = dist(d);
    }
    Ok(Outcome::new(ok, result))
}

fn verdict(v: &Verdict) -> Value {
    json!({ "holds": v.holds, "witness": v.witness.as_ref().map(|w| w.to_string()) })
}

fn dressed_subset(fixed: &SubsystemCode, original: &SubsystemCode) -> Result<Value, InputError> {
    if fixed.n() > MAX_BRUTEFORCE_QUBITS {
        return Ok(Value::Null);
    }
    let c = dressed_subset_check(fixed, original)?;
    Ok(json!({
        "holds": c.holds,
        "checked": c.checked,
        "counterexamples": c.counterexamples,
        "d_fixed": dist(c.fixed_distance),
        "d_original": dist(c.original_distance),
    }))
}

fn load_group(path: &Path) -> Result<SubsystemCode, InputError> {
    let (_, g) = CssGroup::from_dense_text(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut layout = QubitLayout::new();
    layout.add_free_qubits("q", g.n())?;
    Ok(SubsystemCode::new(layout, g)?)
}

fn emit(dir: &Path, codes: &[(&str, &SubsystemCode)]) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    for (name, code) in codes {
        let path = dir.join(format!("{name}.txt"));
        fs::write(&path, code.gauge().to_dense_text(code.layout()))
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_gaugefix(args: &GaugefixArgs) -> CmdResult {
    if let (Some(f), Some(o)) = (&args.fixed, &args.original) {
        let (fixed, original) = (load_group(f)?, load_group(o)?);
        let v = is_gauge_fixing(&fixed, &original)?;
        let l = if v.holds { dressed_subset(&fixed, &original)? } else { Value::Null };
        let ok = v.holds && (l.is_null() || l["holds"] == json!(true));
        return Ok(Outcome::new(
            ok,
            json!({
                "n": fixed.n(),
                "k": [fixed.k(), original.k()],
                "verdict": verdict(&v),
                "dressed_subset": l,
            }),
        ));
    }
    let a = dense(args.matrix.as_ref().expect("clap requires --matrix"))?;
    let bbs_fix = bbs_fixing_of_abbs(&a)?;
    let v_bbs = is_gauge_fixing(&bbs_fix.fixed, &bbs_fix.original)?;
    let ds_bbs = dressed_subset(&bbs_fix.fixed, &bbs_fix.original)?;

    let (h1, h2) = match (&args.h1, &args.h2) {
        (Some(p1), Some(p2)) => (dense(p1)?, dense(p2)?),
        _ => kernel_checks(&a),
    };
    let hgp_fix = hgp_fixings_of_abbs(&a, &h1, &h2)?;
    let v_prime = is_gauge_fixing(&hgp_fix.q_prime, &hgp_fix.q)?;
    let v_double = is_gauge_fixing(&hgp_fix.q_double_prime, &hgp_fix.q)?;
    let (_, switching) = gauge_switching_check(&hgp_fix.q_prime, &hgp_fix.q_double_prime, &hgp_fix.q)?;
    let ds_prime = dressed_subset(&hgp_fix.q_prime, &hgp_fix.q)?;
    let ds_double = dressed_subset(&hgp_fix.q_double_prime, &hgp_fix.q)?;

    if let Some(dir) = &args.emit {
        emit(
            dir,
            &[
                ("abbs", &bbs_fix.original),
                ("bbs_fixed", &bbs_fix.fixed),
                ("q", &hgp_fix.q),
                ("q_prime", &hgp_fix.q_prime),
                ("q_double_prime", &hgp_fix.q_double_prime),
            ],
        )?;
    }

    let subset_ok = [&ds_bbs, &ds_prime, &ds_double].iter().all(|l| l.is_null() || l["holds"] == json!(true));
    let ok = v_bbs.holds && v_prime.holds && v_double.holds && switching && subset_ok;
    Ok(Outcome::new(
        ok,
        json!({
            "k": bbs_fix.original.k(),
            "bbs_fixing": {
                "n": bbs_fix.fixed.n(),
                "ancillas": { "plus": bbs_fix.ancillas.plus.len(), "zero": bbs_fix.ancillas.zero.len() },
                "verdict": verdict(&v_bbs),
                "dressed_subset": ds_bbs,
            },
            "hgp_fixings": {
                "n": hgp_fix.q.n(),
                "k": [hgp_fix.q.k(), hgp_fix.q_prime.k(), hgp_fix.q_double_prime.k()],
                "q_prime": { "verdict": verdict(&v_prime), "dressed_subset": ds_prime },
                "q_double_prime": { "verdict": verdict(&v_double), "dressed_subset": ds_double },
                "switching": switching,
            },
        }),
    ))
}

pub fn cmd_expander(args: &ExpanderArgs, seed: u64) -> CmdResult {
    let g = if let Some(p) = &args.checks {
        BipartiteGraph::from_checks(&dense(p)?)
    } else if let Some(p) = &args.alist {
        BipartiteGraph::from_checks(&alist(p)?)
    } else if let Some(k) = args.complete {
        BipartiteGraph::complete_graph_incidence(k)
    } else if let (Some(l), Some(r), Some(b)) = (args.left, args.right, args.degree) {
        random_bipartite(l, r, b, seed)?
    } else {
        return Err(InputError("no graph: use --checks, --alist, --complete or --left/--right/--degree".into()));
    };
    let cert = expansion_profile(&g, args.max_subset)?;
    let guarantee = FlipGuarantee::from_certificate(&cert, args.r);
    let code = tanner_code(&g);
    Ok(Outcome::new(
        true,
        json!({
            "graph": {
                "n_left": g.n_left(),
                "n_right": g.n_right(),
                "left_degree": g.left_degree(),
                "left_regular": g.is_left_regular(),
            },
            "certificate": cert,
            "guarantee": guarantee,
            "tanner_code": { "n": code.n(), "k": code.k() },
        }),
    ))
}

pub fn cmd_simulate(args: &SimulateArgs, seed: u64) -> CmdResult {
    let a = if let Some(p) = &args.code_file {
        dense(p)?
    } else if args.hamming {
        let ham = hamming_code();
        ham.generator().transpose().mul(ham.generator())?
    } else if let Some(n) = args.rep {
        BitMatrix::ones(n, n)
    } else {
        return Err(InputError("no code: use --code-file, --hamming or --rep".into()));
    };
    let sim = match args.construction {
        ConstructionArg::Bbs => Simulator::bbs(&bbs_from_matrix(&a)?)?,
        ConstructionArg::Abbs => Simulator::abbs(&abbs_from_matrix(&a)?)?,
    }
    .with_decoder(match args.decoder {
        DecoderArg::Flip => Decoder::Flip,
    });

    let mut ok = true;
    let mut points = Vec::new();
    let mut csv = String::from("q,qprime,rounds,trials,failures,rate,ci_low,ci_high,pbar_x,pbar_z\n");
    for &q in &args.q {
        for &qp in &args.qprime {
            let noise = match args.noise {
                NoiseArg::Independent => NoiseModel::new(q, qp)?,
                NoiseArg::Depolarizing => NoiseModel::depolarizing(q, qp)?,
            };
            let report = sim.run_trials(&noise, args.rounds, args.trials, seed)?;
            let bound = if args.classical {
                let b = induced_bound_check(&sim, &noise, args.rounds, args.trials, seed, 3.0)?;
                ok &= b.holds;
                Some(b)
            } else {
                None
            };
            let f = &report.failure;
            let (px, pz) = bound
                .as_ref()
                .map_or((String::new(), String::new()), |b| {
                    (b.classical_x.rate.to_string(), b.classical_z.rate.to_string())
                });
            csv.push_str(&format!(
                "{q},{qp},{},{},{},{},{},{},{px},{pz}\n",
                args.rounds, f.trials, f.failures, f.rate, f.ci_low, f.ci_high
            ));
            points.push(json!({
                "q": q,
                "qprime": qp,
                "report": report,
                "effective_noise": sim.effective_probs(&noise),
                "classical_bound": bound,
            }));
        }
    }
    let code = sim.code();
    Ok(Outcome {
        ok,
        result: json!({
            "n": code.n(),
            "k": code.k(),
            "construction": args.construction,
            "points": points,
        }),
        csv: Some(csv),
    })
}
