use std::path::PathBuf;

use cayley_core::eigen::DENSE_CAP;
use cayley_core::groups::FiniteGroup;
use cayley_core::machines::{cayley_machine, reset_inverse_machine, MealyMachine};
use cayley_core::measures::{average_fixed_fraction, kns_measure, level_moments};
use cayley_core::spectra::{adjacency_matrix, closed_form_spectrum, compare_spectra, numeric_spectrum, AtomLabel};
use cayley_core::tree::{freeness_report, AutomatonGroup, Depth, FixedSetKind, DEFAULT_LEVEL_CAP};
use cayley_core::walks::{kesten_moments, monte_carlo_return};
use cayley_core::words::{gamma_depth_witness, Theorem, WitnessOutcome};
use cayley_core::zeta::{
    convention_note, finite_zeta_log, limit_zeta_log, normalized, path_count_oracle, select_convention,
    ExponentConvention, RegularMultigraph,
};
use cayley_core::Error;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::format::{big_count, float, rational_json, rational_string, Document, Format, Table};
use crate::input::{load_group, parse_word};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "cayley", version, about = "Cayley machine groups: spectra, measures, zeta series, walks")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest number of vertices on a tree level.
    #[arg(long, global = true, env = "CAYLEY_LEVEL_CAP", default_value_t = DEFAULT_LEVEL_CAP)]
    pub level_cap: u64,
    /// Largest matrix handed to the dense eigensolver.
    #[arg(long, global = true, env = "CAYLEY_DENSE_CAP", default_value_t = DENSE_CAP)]
    pub dense_cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The Cayley machine of a group, or its reset inverse.
    #[command(allow_negative_numbers = true)]
    Machine {
        #[arg(long)]
        group: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Eigenvalues of the level-k Schreier graph.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: usize,
        /// Also diagonalize the adjacency matrix and match it to the closed form.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// The limiting eigenvalue measure truncated at denominator qmax.
    #[command(allow_negative_numbers = true)]
    Kns {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        qmax: usize,
        /// Moments 0..=M.
        #[arg(long)]
        moments: Option<u32>,
        /// Distribution function at these eigenvalue positions in [-1, 1].
        #[arg(long, num_args = 1..)]
        cdf: Vec<f64>,
    },
    /// Level moments against walk return probabilities.
    #[command(allow_negative_numbers = true)]
    Moments {
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: usize,
        #[arg(long = "max-m", short = 'm')]
        m_max: usize,
        /// Recount each moment as an average of fixed-point fractions.
        #[arg(long)]
        fixed_points: bool,
    },
    /// Fixed points of one element on each level.
    #[command(allow_negative_numbers = true)]
    Fix {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Depth of an element.
    #[command(allow_negative_numbers = true)]
    Depth {
        #[arg(long)]
        group: String,
        #[arg(long, conflicts_with_all = ["power", "elem"])]
        word: Option<String>,
        /// Depth of x^power g x^-power.
        #[arg(long, requires = "elem")]
        power: Option<usize>,
        #[arg(long, requires = "power")]
        elem: Option<String>,
        #[arg(long, default_value_t = 32)]
        kmax: usize,
    },
    /// Fixed-set classification of every element in a ball.
    #[command(allow_negative_numbers = true)]
    Free {
        #[arg(long)]
        group: String,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Log Ihara zeta series of a Schreier graph or of the limit.
    #[command(allow_negative_numbers = true)]
    Zeta {
        #[arg(long, required_unless_present = "limit")]
        group: Option<String>,
        #[arg(long, required_unless_present = "limit")]
        level: Option<usize>,
        #[arg(long, requires_all = ["n", "qmax"])]
        limit: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        qmax: Option<usize>,
        #[arg(short = 'R', long = "order")]
        order: usize,
        #[arg(long, value_enum, default_value = "auto")]
        convention: ConventionArg,
    },
    /// Return probabilities of the lamplighter walk.
    #[command(allow_negative_numbers = true)]
    Walk {
        #[arg(long)]
        group: String,
        #[arg(long)]
        steps: usize,
        /// Monte Carlo samples for the last step count.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Depth witnesses from the word combinatorics.
    #[command(allow_negative_numbers = true)]
    Structure {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        n: usize,
    },
    /// Run the acceptance criteria.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Criterion numbers; all when empty.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// Whichever convention matches the path-count oracle on levels 1 and 2.
    Auto,
    Vertex,
    Edge,
}

/// Success flag plus document; `false` maps to exit code 1.
pub struct Emitted {
    pub ok: bool,
    pub doc: Document,
}

fn done(doc: Document) -> CliResult<Emitted> {
    Ok(Emitted { ok: true, doc })
}

pub fn execute(cli: &Cli) -> CliResult<Emitted> {
    let cap = cli.level_cap;
    match &cli.command {
        Command::Machine { group, inverse } => {
            let g = load_group(group)?;
            let m = if *inverse { reset_inverse_machine(&g) } else { cayley_machine(&g) };
            done(machine_doc(group, &g, &m, *inverse))
        }
        Command::Spectrum { group, level, numeric, tol } => {
            spectrum(group, *level, *numeric, *tol, cap, cli.dense_cap).map(|d| Emitted { ok: d.1, doc: d.0 })
        }
        Command::Kns { n, qmax, moments, cdf } => done(kns(*n, *qmax, *moments, cdf)?),
        Command::Moments { group, level, m_max, fixed_points } => {
            done(moments(group, *level, *m_max, *fixed_points, cap)?)
        }
        Command::Fix { group, word, kmax } => done(fix(group, word, *kmax)?),
        Command::Depth { group, word, power, elem, kmax } => {
            done(depth(group, word.as_deref(), *power, elem.as_deref(), *kmax)?)
        }
        Command::Free { group, len, kmax } => done(free(group, *len, *kmax)?),
        Command::Zeta { group, level, limit, n, qmax, order, convention } => {
            if *limit {
                done(zeta_limit(n.expect("required"), qmax.expect("required"), *order)?)
            } else {
                let (g, k) = (group.as_deref().expect("required"), level.expect("required"));
                done(zeta_finite(g, k, *order, *convention, cap)?)
            }
        }
        Command::Walk { group, steps, mc, seed } => done(walk(group, *steps, *mc, *seed)?),
        Command::Structure { group, theorem, n } => done(structure(group, *theorem, *n)?),
        Command::Verify { only } => {
            for c in only {
                if !(1..=verify::CRITERIA as u8).contains(c) {
                    return Err(CliError::Usage(format!("--only: no criterion {c}")));
                }
            }
            let results = verify::run_selected(only);
            let ok = results.iter().all(|r| r.passed);
            Ok(Emitted { ok, doc: verify::document(&results) })
        }
    }
}

fn machine_doc(source: &str, g: &FiniteGroup, m: &MealyMachine, inverse: bool) -> Document {
    let mut table = Table::new(&["state", "input", "next", "output"]);
    for q in 0..m.state_count() {
        for a in 0..m.alphabet() {
            table.push(vec![
                g.label(q).to_string(),
                g.label(a).to_string(),
                g.label(m.next(q, a)).to_string(),
                g.label(m.output(q, a)).to_string(),
            ]);
        }
    }
    let json = json!({
        "group": source,
        "machine": if inverse { "reset-inverse" } else { "cayley" },
        "alphabet": m.alphabet(),
        "labels": g.labels(),
        "transition": m.transition_rows(),
        "output": m.output_rows(),
    });
    Document { json, table }
}

fn atom_pq(label: AtomLabel) -> (u64, u64) {
    label.z_fraction()
}

fn spectrum(source: &str, level: usize, numeric: bool, tol: f64, cap: u64, dense_cap: usize) -> CliResult<(Document, bool)> {
    let g = load_group(source)?;
    let exact = closed_form_spectrum(g.order(), level)?;
    let mut table = Table::new(&["p", "q", "value", "multiplicity"]);
    let atoms: Vec<Value> = exact
        .atoms
        .iter()
        .map(|a| {
            let (p, q) = atom_pq(a.label);
            table.push(vec![p.to_string(), q.to_string(), float(a.label.value()), a.multiplicity.to_string()]);
            json!({ "p": p, "q": q, "value": a.label.value(), "multiplicity": big_count(a.multiplicity) })
        })
        .collect();
    let mut json = json!({
        "group": source,
        "n": g.order(),
        "level": level,
        "total_multiplicity": big_count(exact.total_multiplicity()),
        "atoms": atoms,
    });
    let mut ok = true;
    if numeric {
        let a = adjacency_matrix(&g, level, cap)?;
        if a.dim() > dense_cap {
            return Err(Error::DimensionTooLarge { dim: a.dim(), cap: dense_cap }.into());
        }
        let clusters = numeric_spectrum(&a, tol)?;
        let cmp = compare_spectra(&clusters, &exact, tol);
        ok = cmp.matched;
        json["numeric"] = json!({
            "clusters": clusters.iter().map(|&(v, m)| json!({ "value": v, "multiplicity": m })).collect::<Vec<_>>(),
            "matched": cmp.matched,
            "max_deviation": cmp.max_deviation,
            "mismatch": cmp.mismatch,
        });
    }
    Ok((Document { json, table }, ok))
}

fn kns(n: usize, q_max: usize, moments: Option<u32>, cdf: &[f64]) -> CliResult<Document> {
    let m = kns_measure(n, q_max)?;
    let mut table = Table::new(&["p", "q", "value", "weight", "weight_value"]);
    let atoms: Vec<Value> = m
        .atoms()
        .iter()
        .map(|a| {
            let (p, q) = atom_pq(a.label);
            let w = rational_string(&a.weight);
            let wv = a.weight.to_f64().unwrap_or(f64::NAN);
            table.push(vec![p.to_string(), q.to_string(), float(a.position), w.clone(), float(wv)]);
            json!({ "p": p, "q": q, "value": a.position, "weight": w, "weight_value": wv })
        })
        .collect();
    let mut json = json!({
        "n": n,
        "q_max": q_max,
        "stored_mass": rational_json(&m.stored_mass()),
        "tail_bound": rational_json(m.tail()),
        "atoms": atoms,
    });
    if let Some(top) = moments {
        json["moments"] = (0..=top)
            .map(|j| {
                let e = m.moment(j);
                json!({ "m": j, "value": e.value, "error": e.error })
            })
            .collect();
    }
    if !cdf.is_empty() {
        json["cdf"] = cdf
            .iter()
            .map(|&x| {
                let e = m.cdf_lambda(x);
                json!({ "x": x, "lower": rational_json(&e.lower), "upper": rational_json(&e.upper) })
            })
            .collect();
    }
    Ok(Document { json, table })
}

fn moments(source: &str, level: usize, m_max: usize, fixed_points: bool, cap: u64) -> CliResult<Document> {
    let g = load_group(source)?;
    let level_m = level_moments(&g, level, m_max, cap)?;
    let walk = kesten_moments(&g, m_max)?;
    let limit = if g.order() >= 2 { Some(kns_measure(g.order(), 40)?) } else { None };
    let mut table = Table::new(&["m", "level_moment", "walk_return", "kns_moment", "fixed_point_average"]);
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let fixed = if fixed_points { Some(average_fixed_fraction(&g, level, m)?) } else { None };
        let k = limit.as_ref().map(|mu| mu.moment(m as u32));
        table.push(vec![
            m.to_string(),
            rational_string(&level_m[m]),
            rational_string(&walk[m]),
            k.map_or(String::new(), |e| float(e.value)),
            fixed.as_ref().map_or(String::new(), rational_string),
        ]);
        rows.push(json!({
            "m": m,
            "level_moment": rational_json(&level_m[m]),
            "walk_return": rational_json(&walk[m]),
            "kns_moment": k.map(|e| json!({ "value": e.value, "error": e.error })),
            "fixed_point_average": fixed.as_ref().map(rational_json),
            "identity_holds": fixed.as_ref().map(|f| *f == level_m[m]),
        }));
    }
    let json = json!({ "group": source, "level": level, "abelian": g.is_abelian(), "moments": rows });
    Ok(Document { json, table })
}

fn element_of(source: &str, word: &str) -> CliResult<(FiniteGroup, AutomatonGroup, cayley_core::tree::TreeElement)> {
    let g = load_group(source)?;
    let group = AutomatonGroup::cayley(&g);
    let letters = parse_word(&group, &g, word)?;
    let e = group.element(letters)?;
    Ok((g, group, e))
}

fn fix(source: &str, word: &str, k_max: usize) -> CliResult<Document> {
    let (_, _, e) = element_of(source, word)?;
    let mut table = Table::new(&["level", "fixed", "fraction"]);
    let mut levels = Vec::new();
    for k in 0..=k_max {
        let count = e.fix_count(k);
        let frac = e.fixed_point_character(k);
        table.push(vec![k.to_string(), count.to_string(), rational_string(&frac)]);
        levels.push(json!({ "level": k, "fixed": count.to_string(), "fraction": rational_json(&frac) }));
    }
    let json = json!({
        "group": source,
        "word": e.word_string(),
        "is_identity": e.is_identity(),
        "interior_witness": e.interior_witness(),
        "decay_period": e.decay_period(),
        "levels": levels,
    });
    Ok(Document { json, table })
}

fn depth(source: &str, word: Option<&str>, power: Option<usize>, elem: Option<&str>, k_max: usize) -> CliResult<Document> {
    let text = match (word, power, elem) {
        (Some(w), _, _) => w.to_string(),
        (None, Some(p), Some(g)) => format!("{} [{g}] {}", "x ".repeat(p), "x^-1 ".repeat(p)),
        _ => return Err(CliError::Usage("depth needs --word or --power with --elem".into())),
    };
    let (_, _, e) = element_of(source, &text)?;
    let (value, exceeds) = match e.depth(k_max) {
        Depth::Exactly(d) => (Some(d), false),
        Depth::Exceeds(_) => (None, true),
    };
    let mut table = Table::new(&["word", "depth"]);
    table.push(vec![e.word_string(), value.map_or(format!(">{k_max}"), |d| d.to_string())]);
    let json = json!({
        "group": source,
        "word": e.word_string(),
        "depth": value,
        "exceeds_bound": exceeds,
        "bound": k_max,
    });
    Ok(Document { json, table })
}

fn free(source: &str, len: usize, k_max: usize) -> CliResult<Document> {
    let g = load_group(source)?;
    let group = AutomatonGroup::cayley(&g);
    let report = freeness_report(&group, &group.symmetric_generators(), len, k_max)?;
    let mut table = Table::new(&["word", "kind", "period", "bound_holds", "witness"]);
    let elements: Vec<Value> = report
        .elements
        .iter()
        .map(|v| {
            let profile: Vec<String> = v.profile.iter().map(rational_string).collect();
            match &v.kind {
                FixedSetKind::MeasureZero { period, checked_levels, bound_holds } => {
                    table.push(vec![v.word_string.clone(), "measure-zero".into(), period.to_string(), bound_holds.to_string(), String::new()]);
                    json!({
                        "word": v.word_string, "kind": "measure-zero", "period": period,
                        "checked_levels": checked_levels, "bound_holds": bound_holds, "profile": profile,
                    })
                }
                FixedSetKind::Interior { witness } => {
                    let w: Vec<&str> = witness.iter().map(|&a| g.label(a)).collect();
                    table.push(vec![v.word_string.clone(), "interior".into(), String::new(), String::new(), w.join(" ")]);
                    json!({ "word": v.word_string, "kind": "interior", "witness": w, "profile": profile })
                }
            }
        })
        .collect();
    let json = json!({
        "group": source,
        "word_len_max": report.word_len_max,
        "k_max": report.k_max,
        "words_tested": report.words_tested,
        "identity_words": report.identity_words,
        "free_on_ball": report.free_on_ball(),
        "elements": elements,
    });
    Ok(Document { json, table })
}

fn zeta_finite(source: &str, level: usize, order: usize, convention: ConventionArg, cap: u64) -> CliResult<Document> {
    let g = load_group(source)?;
    let x = RegularMultigraph::schreier(&g, level, cap)?;
    let probes: Vec<RegularMultigraph> =
        (1..=2).map(|k| RegularMultigraph::schreier(&g, k, cap)).collect::<Result<_, _>>()?;
    let verdict = select_convention(&probes, order.max(1));
    let chosen = match convention {
        ConventionArg::Auto => verdict.unwrap_or(ExponentConvention::VertexBased),
        ConventionArg::Vertex => ExponentConvention::VertexBased,
        ConventionArg::Edge => ExponentConvention::EdgeBased,
    };
    let series = finite_zeta_log(&x, order, chosen);
    let by_edges = normalized(&series, x.edge_count());
    let by_vertices = normalized(&series, x.vertex_count());
    let counts = series.path_counts();
    let mut table = Table::new(&["r", "coefficient", "path_count", "oracle", "per_edge", "per_vertex"]);
    let mut rows = Vec::new();
    for r in 1..=order {
        let i = r - 1;
        let oracle = path_count_oracle(&x, r);
        let matches = counts[i] == BigRational::from_integer(oracle.clone());
        table.push(vec![
            r.to_string(),
            rational_string(&series.coefficients[i]),
            rational_string(&counts[i]),
            oracle.to_string(),
            rational_string(&by_edges[i]),
            rational_string(&by_vertices[i]),
        ]);
        rows.push(json!({
            "r": r,
            "coefficient": rational_json(&series.coefficients[i]),
            "path_count": rational_string(&counts[i]),
            "oracle_path_count": oracle.to_string(),
            "oracle_agrees": matches,
            "per_edge": rational_json(&by_edges[i]),
            "per_vertex": rational_json(&by_vertices[i]),
        }));
    }
    let json = json!({
        "group": source,
        "level": level,
        "vertices": x.vertex_count(),
        "edges": x.edge_count(),
        "degree": x.degree(),
        "exponent_convention": chosen.name(),
        "exponent": chosen.exponent(&x).to_string(),
        "convention_verdict": convention_note(verdict),
        "coefficients": rows,
    });
    Ok(Document { json, table })
}

fn zeta_limit(n: usize, q_max: usize, order: usize) -> CliResult<Document> {
    let m = kns_measure(n, q_max)?;
    let coeffs = limit_zeta_log(&m, n, order);
    let mut table = Table::new(&["r", "value", "error"]);
    let rows: Vec<Value> = coeffs
        .iter()
        .enumerate()
        .map(|(i, e)| {
            table.push(vec![(i + 1).to_string(), float(e.value), float(e.error)]);
            json!({ "r": i + 1, "value": e.value, "error": e.error })
        })
        .collect();
    let json = json!({ "n": n, "q_max": q_max, "degree": 2 * n, "coefficients": rows });
    Ok(Document { json, table })
}

fn walk(source: &str, steps: usize, mc: Option<usize>, seed: u64) -> CliResult<Document> {
    let g = load_group(source)?;
    let exact = match kesten_moments(&g, steps) {
        Ok(v) => Some(v),
        Err(Error::BudgetExceeded(_)) if mc.is_some() => None,
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(&["m", "p_m", "value"]);
    let mut rows = Vec::new();
    for (m, p) in exact.iter().flatten().enumerate() {
        table.push(vec![m.to_string(), rational_string(p), float(p.to_f64().unwrap_or(f64::NAN))]);
        rows.push(json!({ "m": m, "p_m": rational_json(p) }));
    }
    let mut json = json!({ "group": source, "steps": steps, "exact": exact.is_some(), "table": rows });
    if let Some(samples) = mc {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = 2 * g.order();
        let est = monte_carlo_return(&g, steps, samples, || rng.gen_range(0..gens));
        json["monte_carlo"] = json!({
            "approximate": true, "m": steps, "samples": samples, "seed": seed, "p_m": est,
        });
        if exact.is_none() {
            table.push(vec![steps.to_string(), String::new(), float(est)]);
        }
    }
    Ok(Document { json, table })
}

fn structure(source: &str, theorem: u8, n: usize) -> CliResult<Document> {
    let g = load_group(source)?;
    let which = match theorem {
        1 => Theorem::OddOrder { n: u32::try_from(n).map_err(|_| CliError::Usage("--n: too large".into()))? },
        _ => Theorem::TwoGroup { n },
    };
    let r = gamma_depth_witness(&g, which)?;
    let outcome = match r.outcome {
        WitnessOutcome::Differs => "differs",
        WitnessOutcome::NoDifferenceAtThisN => "no-difference-at-this-n",
        WitnessOutcome::ClassTwoOpenCase => "class-two-open-case",
    };
    let label_word = |w: &Vec<usize>| w.iter().map(|&a| g.label(a).to_string()).collect::<Vec<_>>();
    let mut table = Table::new(&["theorem", "n", "outcome", "depth", "gamma_length"]);
    table.push(vec![
        theorem.to_string(),
        n.to_string(),
        outcome.to_string(),
        r.depth.map_or(String::new(), |d| d.to_string()),
        r.gamma_length.to_string(),
    ]);
    let json = json!({
        "group": source,
        "theorem": theorem,
        "n": n,
        "elements": r.elements.iter().map(|(role, l)| json!({ "role": role, "label": l })).collect::<Vec<_>>(),
        "witness_words": r.witness_words.iter().map(label_word).collect::<Vec<_>>(),
        "last_letters": r.last_letters.iter().map(|&a| g.label(a)).collect::<Vec<_>>(),
        "outcome": outcome,
        "depth": r.depth,
        "gamma_length": r.gamma_length,
    });
    Ok(Document { json, table })
}
