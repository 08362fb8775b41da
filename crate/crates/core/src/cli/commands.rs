use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{ChannelArgs, Cli, CliError, Command, Report, EXIT_MISMATCH, EXIT_OK};
use crate::bell::{diff_tables, perfect_corrections, published_table_1, BellKind, CorrectionTable};
use crate::channel::{
    build_channel_state, check_condition, control_report, enumerate_invalid, enumerate_valid,
    named_state, table_2_rows, verify_published_states, ChannelSpec, CharlieBasis, ControlReport,
    NamedState, QubitLayout, Sign,
};
use crate::keyswap::{
    classify_key_security, derive_swap_table, diff_swap_tables, exact_agreement_rate,
    key_security_split, published_table_4, run_key_rounds, SwapTable,
};
use crate::probabilistic::{
    derive_prob_correction_table, parse_params, published_table_3, run_pbcst, success_probability,
    ProbChannelSpec,
};
use crate::protocol::{
    disclosure_witness, enumerate_branches, exact_infidelity_without_disclosure, run_bcst,
    ExhaustiveSummary, UnknownQubit,
};
use crate::qcore::real;

type CmdResult = Result<Report, CliError>;

pub(super) fn dispatch(cli: &Cli) -> CmdResult {
    let seed = cli.seed;
    match &cli.command {
        Command::Enumerate {
            basis,
            sign,
            verify_table2,
            invert,
        } => enumerate(basis, sign, *verify_table2, *invert),
        Command::Validate { name, channel } => validate(name.as_deref(), channel),
        Command::Simulate {
            channel,
            disclose,
            trials,
            input_a,
            input_b,
            transcript,
        } => simulate(
            channel,
            *disclose,
            *trials as usize,
            input_a.as_deref(),
            input_b.as_deref(),
            *transcript,
            seed,
        ),
        Command::SimulateProb {
            channel,
            params,
            trials,
            transcript,
        } => simulate_prob(channel, params, *trials as usize, *transcript, seed),
        Command::Keygen {
            channel,
            disclose,
            trials,
            split,
        } => {
            if *split {
                keygen_split()
            } else {
                keygen(channel, *disclose, *trials as usize, seed)
            }
        }
        Command::Tables { which } => match which.as_str() {
            "1" => correction_tables("1", perfect_corrections()?.clone(), published_table_1()),
            "3" => correction_tables("3", derive_prob_correction_table()?, published_table_3()),
            _ => swap_tables(derive_swap_table()?, published_table_4()),
        },
    }
}

fn report(command: &'static str, inputs: Value, results: Value, text: String) -> Report {
    Report {
        command,
        inputs,
        results,
        diagnostics: Vec::new(),
        text,
        exit_code: EXIT_OK,
    }
}

fn quad(spec: &ChannelSpec) -> String {
    spec.psi.map(|k| k.symbol()).join(",")
}

fn enumerate(basis: &str, sign: &str, verify: bool, invert: bool) -> CmdResult {
    let basis: CharlieBasis = basis.parse()?;
    let sign: Sign = sign.parse()?;
    let list = if invert {
        enumerate_invalid(basis, sign)
    } else {
        enumerate_valid(basis, sign)
    };
    let channels: Vec<String> = list.iter().map(quad).collect();
    let label = if invert { "violating" } else { "valid" };
    let mut text = format!(
        "{} {label} quadruples (basis {basis}, sign {sign})\n",
        list.len()
    );
    for c in &channels {
        writeln!(text, "  {c}").unwrap();
    }
    let mut results = json!({ "count": list.len(), "channels": channels });
    let mut exit_code = EXIT_OK;
    if verify {
        let valid = enumerate_valid(basis, sign);
        let missing: Vec<String> = table_2_rows()
            .iter()
            .filter(|row| !valid.iter().any(|s| &s.psi == *row))
            .map(|row| row.map(|k| k.symbol()).join(","))
            .collect();
        let total = table_2_rows().len();
        writeln!(text, "table 2: {}/{total} present", total - missing.len()).unwrap();
        results["table2"] = json!({
            "present": total - missing.len(),
            "total": total,
            "missing": missing,
        });
        if !missing.is_empty() {
            exit_code = EXIT_MISMATCH;
        }
    }
    let mut r = report(
        "enumerate",
        json!({ "basis": basis, "sign": sign, "invert": invert, "verify_table2": verify }),
        results,
        text,
    );
    r.exit_code = exit_code;
    Ok(r)
}

fn lookup_state(name: &str) -> Result<NamedState, CliError> {
    named_state(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown state `{name}` (expected zha, zha-prime or li)"
        ))
    })
}

/// The spec selected by `--spec` / `--state` (Zha's channel if neither).
fn resolve_spec(args: &ChannelArgs) -> Result<ChannelSpec, CliError> {
    match (&args.spec, &args.state) {
        (Some(s), _) => Ok(s.parse()?),
        (None, Some(name)) => Ok(lookup_state(name)?.spec),
        (None, None) => Ok(lookup_state("zha")?.spec),
    }
}

fn verdict(controlled: bool) -> &'static str {
    if controlled {
        "controlled"
    } else {
        "uncontrolled"
    }
}

fn control_json(r: &ControlReport) -> Value {
    json!({
        "dir_ab": verdict(r.dir_ab_controlled),
        "dir_ba": verdict(r.dir_ba_controlled),
        "purity_ab": r.purity_ab,
        "purity_ba": r.purity_ba,
    })
}

fn validate(name: Option<&str>, args: &ChannelArgs) -> CmdResult {
    let named = match (name, args.state.as_deref(), &args.spec) {
        (Some(n), None, None) | (None, Some(n), None) => Some(lookup_state(n)?),
        (None, None, Some(_)) => None,
        (None, None, None) => {
            return Err(CliError::Usage(
                "validate needs a state name or --spec".into(),
            ))
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of a state name, --state or --spec".into(),
            ))
        }
    };
    let (label, state, layout, spec) = match &named {
        Some(n) => (n.name.to_string(), n.state.clone(), n.layout, n.spec),
        None => {
            let spec: ChannelSpec = args.spec.as_deref().unwrap_or_default().parse()?;
            (
                spec.to_string(),
                build_channel_state(&spec),
                QubitLayout::CANONICAL,
                spec,
            )
        }
    };
    let control = control_report(&state, &layout)?;
    let mut results = control_json(&control);
    results["satisfies_condition"] = json!(check_condition(&spec));
    results["layout"] = json!({
        "A1": layout.a1(), "B1": layout.b1(), "A2": layout.a2(), "B2": layout.b2(), "C1": layout.c1(),
    });
    results["channel"] = json!(spec);
    if let Some(n) = &named {
        let check = verify_published_states()?
            .into_iter()
            .find(|c| c.name == n.name)
            .expect("every named state is checked");
        results["construction_residual"] = json!(check.residual);
        results["matches_construction"] = json!(check.matches_construction);
    }
    let text = format!(
        "{label}: A->B {} (purity {:.12}), B->A {} (purity {:.12}); condition {}\n",
        verdict(control.dir_ab_controlled),
        control.purity_ab,
        verdict(control.dir_ba_controlled),
        control.purity_ba,
        if check_condition(&spec) {
            "satisfied"
        } else {
            "violated"
        },
    );
    Ok(report(
        "validate",
        json!({ "target": label }),
        results,
        text,
    ))
}

fn parse_input(text: &str) -> Result<UnknownQubit, CliError> {
    let bad = || CliError::Usage(format!("input must be `alpha,beta`, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok(UnknownQubit::new(real(a), real(b))?)
}

fn summary_json(s: &ExhaustiveSummary) -> Value {
    json!({
        "branch_count": s.branches.len(),
        "total_probability": s.total_probability,
        "min_fidelity": s.min_fidelity,
        "max_fidelity": s.max_fidelity,
        "mean_infidelity": s.mean_infidelity(),
    })
}

fn simulate(
    args: &ChannelArgs,
    disclose: bool,
    trials: usize,
    input_a: Option<&str>,
    input_b: Option<&str>,
    with_transcript: bool,
    seed: u64,
) -> CmdResult {
    let spec = resolve_spec(args)?;
    let fixed_a = input_a.map(parse_input).transpose()?;
    let fixed_b = input_b.map(parse_input).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = [0.0f64; 2];
    let mut min = [f64::INFINITY; 2];
    let mut perfect = [0usize; 2];
    let mut transcripts = Vec::new();
    for _ in 0..trials {
        let a = fixed_a.unwrap_or_else(|| UnknownQubit::haar(&mut rng));
        let b = fixed_b.unwrap_or_else(|| UnknownQubit::haar(&mut rng));
        let r = run_bcst(&spec, &a, &b, disclose, &mut rng)?;
        for (i, f) in [r.fidelity_a_to_b, r.fidelity_b_to_a]
            .into_iter()
            .enumerate()
        {
            sum[i] += f;
            min[i] = min[i].min(f);
            if f >= 1.0 - crate::qcore::TOL {
                perfect[i] += 1;
            }
        }
        if with_transcript {
            transcripts.push(json!({
                "input_a": a,
                "input_b": b,
                "charlie_outcome": r.charlie_outcome,
                "smo_a": r.smo_a,
                "smo_b": r.smo_b,
                "fidelity_a_to_b": r.fidelity_a_to_b,
                "fidelity_b_to_a": r.fidelity_b_to_a,
                "events": r.transcript.events,
            }));
        }
    }
    let n = trials as f64;
    let probe_a = fixed_a.unwrap_or(UnknownQubit::real(0.6, 0.8));
    let probe_b = fixed_b.unwrap_or(UnknownQubit::real(0.6, 0.8));
    let exhaustive =
        ExhaustiveSummary::from_branches(enumerate_branches(&spec, &probe_a, &probe_b, disclose)?);
    let mut results = json!({
        "sampled": {
            "trials": trials,
            "mean_fidelity": { "a_to_b": sum[0] / n, "b_to_a": sum[1] / n },
            "min_fidelity": { "a_to_b": min[0], "b_to_a": min[1] },
            "perfect_runs": { "a_to_b": perfect[0], "b_to_a": perfect[1] },
        },
        "exhaustive": {
            "input_a": probe_a,
            "input_b": probe_b,
            "summary": summary_json(&exhaustive),
        },
    });
    let mut text = format!(
        "{spec} disclose={disclose}\n  sampled {trials} runs: mean fidelity A->B {:.12}, B->A {:.12}\n  exhaustive {} branches: min fidelity A->B {:.12}, B->A {:.12}\n",
        sum[0] / n,
        sum[1] / n,
        exhaustive.branches.len(),
        exhaustive.min_fidelity.a_to_b,
        exhaustive.min_fidelity.b_to_a,
    );
    if !disclose {
        let exact = exact_infidelity_without_disclosure(&spec)?;
        results["haar_infidelity"] = json!(exact);
        results["witness"] = json!(disclosure_witness(&spec)?);
        writeln!(
            text,
            "  Haar-average infidelity A->B {:.12}, B->A {:.12}",
            exact.a_to_b, exact.b_to_a
        )
        .unwrap();
    }
    if with_transcript {
        results["transcripts"] = Value::Array(transcripts);
    }
    Ok(report(
        "simulate",
        json!({
            "channel": spec,
            "disclose": disclose,
            "trials": trials,
            "input_a": fixed_a,
            "input_b": fixed_b,
        }),
        results,
        text,
    ))
}

fn simulate_prob(
    args: &ChannelArgs,
    params: &str,
    trials: usize,
    with_transcript: bool,
    seed: u64,
) -> CmdResult {
    let channel = resolve_spec(args)?;
    let (p1, p2) = parse_params(params)?;
    let spec = ProbChannelSpec::from_channel(&channel, p1, p2);
    if !spec.satisfies_condition() {
        return Err(crate::Error::ConditionViolated.into());
    }
    let probability = success_probability(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = [0usize; 2];
    let mut min_success_fidelity = [1.0f64; 2];
    let mut transcripts = Vec::new();
    for _ in 0..trials {
        let a = UnknownQubit::haar(&mut rng);
        let b = UnknownQubit::haar(&mut rng);
        let r = run_pbcst(&spec, &a, &b, &mut rng)?;
        for (i, d) in [r.directions.a_to_b, r.directions.b_to_a]
            .into_iter()
            .enumerate()
        {
            if d.success {
                successes[i] += 1;
                min_success_fidelity[i] = min_success_fidelity[i].min(d.fidelity);
            }
        }
        if with_transcript {
            transcripts.push(json!({
                "input_a": a,
                "input_b": b,
                "charlie_outcome": r.charlie_outcome,
                "directions": r.directions,
                "events": r.transcript.events,
            }));
        }
    }
    let n = trials as f64;
    let rate = [successes[0] as f64 / n, successes[1] as f64 / n];
    let expected = [probability.numeric.a_to_b, probability.numeric.b_to_a];
    let sigma = expected.map(|p| (p * (1.0 - p) / n).sqrt());
    let within = [0, 1].map(|i| (rate[i] - expected[i]).abs() <= 3.0 * sigma[i]);
    let mut r = report(
        "simulate-prob",
        json!({ "channel": spec, "trials": trials }),
        json!({
            "success_probability": probability,
            "monte_carlo": {
                "trials": trials,
                "successes": { "a_to_b": successes[0], "b_to_a": successes[1] },
                "success_rate": { "a_to_b": rate[0], "b_to_a": rate[1] },
                "sigma": { "a_to_b": sigma[0], "b_to_a": sigma[1] },
                "within_3_sigma": { "a_to_b": within[0], "b_to_a": within[1] },
                "min_success_fidelity": { "a_to_b": min_success_fidelity[0], "b_to_a": min_success_fidelity[1] },
            },
        }),
        format!(
            "{spec}\n  success probability A->B {:.12} (analytic {:.12}), B->A {:.12} (analytic {:.12})\n  sampled {trials} runs: rate A->B {:.6}, B->A {:.6}\n",
            probability.numeric.a_to_b,
            probability.analytic.a_to_b,
            probability.numeric.b_to_a,
            probability.analytic.b_to_a,
            rate[0],
            rate[1],
        ),
    );
    if with_transcript {
        r.results["transcripts"] = Value::Array(transcripts);
    }
    for (i, dir) in ["a_to_b", "b_to_a"].iter().enumerate() {
        if !within[i] {
            r.diagnostics.push(format!(
                "{dir}: sampled success rate {} is more than 3 sigma from {}",
                rate[i], expected[i]
            ));
        }
    }
    Ok(r)
}

fn keygen(args: &ChannelArgs, disclose: bool, trials: usize, seed: u64) -> CmdResult {
    let spec = resolve_spec(args)?;
    let security = classify_key_security(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stats = run_key_rounds(&spec, disclose, trials, &mut rng)?;
    let exact = exact_agreement_rate(&spec, disclose)?;
    let text = format!(
        "{spec} disclose={disclose}\n  {} of {} rounds agree (exact rate {:.12})\n  key-secure: {}\n",
        stats.agreements, stats.rounds, exact, security.secure
    );
    Ok(report(
        "keygen",
        json!({ "channel": spec, "disclose": disclose, "trials": trials }),
        json!({
            "sampled": stats,
            "exact_agreement_rate": exact,
            "security": security,
        }),
        text,
    ))
}

fn keygen_split() -> CmdResult {
    let split = key_security_split(CharlieBasis::PlusMinus, Sign::Plus)?;
    let secure: Vec<&_> = split.iter().filter(|s| s.secure).collect();
    let insecure: Vec<String> = split
        .iter()
        .filter(|s| !s.secure)
        .map(|s| quad(&s.spec))
        .collect();
    let mut text = format!(
        "{} key-secure, {} key-insecure of {} valid channels\n",
        secure.len(),
        insecure.len(),
        split.len()
    );
    for c in &insecure {
        writeln!(text, "  insecure {c}").unwrap();
    }
    Ok(report(
        "keygen",
        json!({ "split": true, "basis": CharlieBasis::PlusMinus, "sign": Sign::Plus }),
        json!({
            "secure": secure.len(),
            "insecure": insecure.len(),
            "insecure_channels": insecure,
            "channels": split.iter().map(|s| json!({
                "channel": quad(&s.spec),
                "secure": s.secure,
                "withheld_agreement": s.withheld_agreement,
            })).collect::<Vec<_>>(),
        }),
        text,
    ))
}

fn table_entries(t: &CorrectionTable) -> Value {
    t.entries()
        .map(|(k, m, p)| json!({ "shared": k, "smo": m, "pauli": p }))
        .collect()
}

fn grid(t: &CorrectionTable) -> String {
    let mut s = String::from("  SMO ");
    for k in BellKind::ALL {
        write!(s, "{:>6}", k.symbol()).unwrap();
    }
    s.push('\n');
    for m in crate::bell::Smo::ALL {
        write!(s, "  {m}  ").unwrap();
        for k in BellKind::ALL {
            write!(s, "{:>6}", t.get(k, m).symbol()).unwrap();
        }
        s.push('\n');
    }
    s
}

fn correction_tables(
    which: &str,
    derived: CorrectionTable,
    published: CorrectionTable,
) -> CmdResult {
    let diff = diff_tables(&derived, &published);
    let mut text = format!(
        "derived table {which}\n{}published table {which}\n{}",
        grid(&derived),
        grid(&published)
    );
    if diff.is_empty() {
        text.push_str("no differences\n");
    }
    for d in &diff {
        writeln!(
            text,
            "MISMATCH shared={} smo={} derived={} published={}",
            d.shared, d.smo, d.left, d.right
        )
        .unwrap();
    }
    let mut r = report(
        "tables",
        json!({ "which": which }),
        json!({
            "derived": table_entries(&derived),
            "published": table_entries(&published),
            "column_bijective": derived.is_column_bijective(),
            "diff": diff.iter().map(|d| json!({
                "shared": d.shared, "smo": d.smo, "derived": d.left, "published": d.right,
            })).collect::<Vec<_>>(),
            "mismatches": diff.len(),
        }),
        text,
    );
    if !diff.is_empty() {
        r.exit_code = EXIT_MISMATCH;
    }
    Ok(r)
}

fn swap_rows_json(t: &SwapTable) -> Value {
    t.rows()
        .iter()
        .map(|row| json!({ "init": row.init, "terms": row.terms, "bijection": row.is_bijection() }))
        .collect()
}

fn swap_tables(derived: SwapTable, published: SwapTable) -> CmdResult {
    let diff = diff_swap_tables(&derived, &published);
    let term = |t: &crate::keyswap::SwapEntry| format!("{}{}{}", t.sign, t.alice, t.bob);
    let mut text = String::new();
    for row in derived.rows() {
        let terms: Vec<String> = row.terms.iter().map(term).collect();
        writeln!(text, "{},{} = {}", row.init.0, row.init.1, terms.join(" ")).unwrap();
    }
    if diff.is_empty() {
        text.push_str("no differences\n");
    }
    for d in &diff {
        let l: Vec<String> = d.left.iter().map(term).collect();
        let r: Vec<String> = d.right.iter().map(term).collect();
        writeln!(
            text,
            "MISMATCH init={},{} ({}) derived: {} published: {}",
            d.init.0,
            d.init.1,
            if d.outcomes_match {
                "signs"
            } else {
                "outcomes"
            },
            l.join(" "),
            r.join(" ")
        )
        .unwrap();
    }
    let mut r = report(
        "tables",
        json!({ "which": "4" }),
        json!({
            "derived": swap_rows_json(&derived),
            "published": swap_rows_json(&published),
            "diff": diff.iter().map(|d| json!({
                "init": d.init,
                "outcomes_match": d.outcomes_match,
                "derived": d.left,
                "published": d.right,
            })).collect::<Vec<_>>(),
            "mismatches": diff.len(),
        }),
        text,
    );
    if !diff.is_empty() {
        r.exit_code = EXIT_MISMATCH;
    }
    Ok(r)
}
