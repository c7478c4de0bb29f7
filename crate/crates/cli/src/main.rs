//! `circnet`: generate, validate and analyse nets over cylinder and circle
//! interval posets.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! malformed input.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use circnet_core::algebra::{invariant_state, FinDimAlgebra, InvariantOptions, State};
use circnet_core::cylinder::circle::{interval_length, parse_arc, parse_turn, pn_label};
use circnet_core::cylinder::{
    build_cylinder_rep, cylinder_label, cylinder_poset, cylinder_size, iso_pn_cn, GridPoset,
    IntervalPoset, MarkedCircle,
};
use circnet_core::gen::{
    planted_cylinder_bundle, random_cylinder_net, random_cylinder_system, random_grid_net,
    GenOptions,
};
use circnet_core::homotopy::{is_pathwise_connected, GroupPresentation, TietzeBudget};
use circnet_core::io::{
    net_from_doc, net_to_doc, poset_from_doc, poset_to_doc, state_to_doc, system_from_doc,
    system_to_doc, NetDoc, PosetDoc, SystemDoc,
};
use circnet_core::limits::{
    injectivity_transfer_check, limit_net, limit_norm_profile, limit_poset,
};
use circnet_core::net::{
    bundle_holonomy, check_causality_with, state_from_holonomy, Net, CAUSALITY_TOL, HOM_TOL,
    STATE_TOL,
};
use circnet_core::poset::{Disjointness, Poset};
use circnet_core::{Check, Exec, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "circnet", version, about = "Nets of C*-algebras over cylinder and circle posets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    out: Option<Out>,
    /// Shorthand for `--out dot`.
    #[arg(long, global = true)]
    dot: bool,
    /// Tolerance override for the numeric checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Symbolic probe depth for representation checks.
    #[arg(long, global = true, default_value_t = 8)]
    probe_depth: u64,
    /// Run every loop sequentially.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// The cylinder poset C_N, or a random net or system over it.
    GenCylinder {
        n: usize,
        /// Emit a random net instead of the poset.
        #[arg(long)]
        net: bool,
        /// Emit a constant M_d bundle with a random twist on one column.
        #[arg(long, value_name = "COLUMN")]
        planted: Option<usize>,
        /// Fibre size for `--planted`.
        #[arg(long, default_value_t = 2)]
        fibre: usize,
        /// Emit a monomorphic system with this many stages.
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_block: usize,
    },
    /// The interval poset P_N of a marked circle, or its grid poset.
    GenPn {
        #[arg(long, value_delimiter = ',', required = true)]
        markers: Vec<String>,
        /// Emit the grid poset on M uniform points instead.
        #[arg(long, value_name = "M")]
        grid: Option<usize>,
        /// With `--grid`, emit a random net on the grid poset.
        #[arg(long)]
        net: bool,
    },
    /// Verify P_N ≅ C_N for a marked circle.
    IsoCheck {
        #[arg(long, value_delimiter = ',', required = true)]
        markers: Vec<String>,
    },
    /// Edge-path presentation of the fundamental group and H₁.
    Pi1 {
        poset: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
    /// The marker interval assigned to an arc.
    Quotient {
        #[arg(long, value_delimiter = ',', required = true)]
        markers: Vec<String>,
        /// Arc endpoints `s,e`.
        #[arg(long, required = true)]
        arc: String,
    },
    ValidateNet {
        net: PathBuf,
    },
    CheckCausality {
        net: PathBuf,
    },
    /// Faithful representation of a net over C_N, checked on probes.
    BuildRep {
        net: PathBuf,
    },
    /// Holonomy of a net bundle around each generator loop.
    Holonomy {
        net: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
    /// A net state of a bundle from a holonomy-invariant base state.
    InvariantState {
        net: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
    /// Limit poset and limit net of an inductive system.
    Limit {
        system: PathBuf,
    },
    /// Stage norms of random elements pushed towards the limit.
    NormProfile {
        system: PathBuf,
        #[arg(long)]
        stage: String,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Isometry of the stage maps into the limit, given faithful witnesses.
    TransferCheck {
        system: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Malformed input; exit status 2.
#[derive(Debug)]
struct Malformed(String);

fn bad<E: Display>(e: E) -> Malformed {
    Malformed(e.to_string())
}

#[derive(Debug, Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    checks: Vec<Check>,
    violations: Vec<String>,
    details: Value,
    passed: bool,
}

impl RunReport {
    fn new(command: &str, inputs: &[u8]) -> Self {
        RunReport {
            command: command.into(),
            inputs_digest: Sha256::digest(inputs).iter().map(|b| format!("{b:02x}")).collect(),
            checks: Vec::new(),
            violations: Vec::new(),
            details: Value::Null,
            passed: true,
        }
    }

    fn absorb<E: Display>(&mut self, r: Report<E>) {
        self.checks.extend(r.checks);
        self.violations.extend(r.violations.iter().map(ToString::to_string));
    }

    fn fail<E: Display>(&mut self, name: &str, e: E) {
        self.checks.push(Check::exact(name, false));
        self.violations.push(e.to_string());
    }

    fn finish(mut self) -> Self {
        self.passed = self.violations.is_empty() && self.checks.iter().all(|c| c.passed);
        self
    }

    fn render_text(&self) -> String {
        let mut s = format!("command: {}\ninputs: {}\n", self.command, self.inputs_digest);
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            match (c.residual, c.tolerance) {
                (Some(r), Some(t)) => {
                    s += &format!("{mark}  {}  residual={r:.3e} tol={t:.0e}\n", c.name)
                }
                _ => s += &format!("{mark}  {}\n", c.name),
            }
        }
        for v in &self.violations {
            s += &format!("violation: {v}\n");
        }
        if !self.details.is_null() {
            s += &serde_json::to_string_pretty(&self.details).expect("serializable");
            s.push('\n');
        }
        s += if self.passed { "status: pass\n" } else { "status: fail\n" };
        s
    }
}

enum Output {
    Report(RunReport),
    Document { json: Value, dot: Option<String> },
}

fn read(path: &Path) -> Result<Vec<u8>, Malformed> {
    std::fs::read(path).map_err(|e| Malformed(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, Malformed> {
    serde_json::from_slice(bytes).map_err(bad)
}

fn load_net(bytes: &[u8]) -> Result<(Arc<Net>, Option<Disjointness>), Malformed> {
    net_from_doc(&parse::<NetDoc>(bytes)?).map_err(bad)
}

fn circle(markers: &[String]) -> Result<MarkedCircle, Malformed> {
    let turns = markers
        .iter()
        .map(|m| parse_turn(m.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    let c = MarkedCircle::new(turns).map_err(bad)?;
    if !c.was_sorted() {
        eprintln!("warning: markers were not in increasing order; they have been sorted");
    }
    Ok(c)
}

fn base_index(p: &Poset, base: &Option<String>) -> Result<usize, Malformed> {
    match base {
        Some(l) => p.index_of(l).map_err(bad),
        None => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = if cli.dot { Out::Dot } else { cli.out.unwrap_or(Out::Text) };
    match run(&cli) {
        Ok(Output::Document { json, dot }) => {
            match (out, dot) {
                (Out::Dot, Some(d)) => print!("{d}"),
                _ => println!("{}", serde_json::to_string_pretty(&json).expect("serializable")),
            }
            ExitCode::SUCCESS
        }
        Ok(Output::Report(r)) => {
            match out {
                Out::Json => println!("{}", serde_json::to_string_pretty(&r).expect("serializable")),
                _ => print!("{}", r.render_text()),
            }
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Malformed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Malformed> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let tol = |default: f64| cli.tol.unwrap_or(default);
    let doc = |v: Value, dot: Option<String>| Ok(Output::Document { json: v, dot });
    match &cli.cmd {
        Cmd::GenCylinder {
            n,
            net,
            planted,
            fibre,
            stages,
            max_block,
        } => {
            let p = cylinder_poset(*n).map_err(bad)?;
            let dot = Some(p.to_dot());
            let opts = GenOptions {
                max_block: *max_block,
                ..GenOptions::default()
            };
            if let Some(k) = stages {
                let sys = random_cylinder_system(*n, *k, &opts, &mut rng).map_err(bad)?;
                return doc(serde_json::to_value(system_to_doc(&sys)).map_err(bad)?, dot);
            }
            if let Some(col) = planted {
                if !(1..=*n).contains(col) {
                    return Err(Malformed(format!("column {col} is not in 1..={n}")));
                }
                let a = FinDimAlgebra::new(vec![*fibre]).map_err(bad)?;
                let u = a.random_unitary(&mut rng);
                let net = planted_cylinder_bundle(*n, &a, *col, &u).map_err(bad)?;
                return doc(serde_json::to_value(net_to_doc(&net, None)).map_err(bad)?, dot);
            }
            if *net {
                let net = random_cylinder_net(*n, &opts, &mut rng).map_err(bad)?;
                return doc(serde_json::to_value(net_to_doc(&net, None)).map_err(bad)?, dot);
            }
            doc(serde_json::to_value(poset_to_doc(&p, None)).map_err(bad)?, dot)
        }
        Cmd::GenPn { markers, grid, net } => {
            let c = circle(markers)?;
            match grid {
                None => {
                    let pn = IntervalPoset::new(c).map_err(bad)?;
                    let dot = Some(pn.poset.to_dot());
                    doc(serde_json::to_value(poset_to_doc(&pn.poset, None)).map_err(bad)?, dot)
                }
                Some(m) => {
                    let g = GridPoset::new(c.with_uniform_grid(*m).map_err(bad)?, true)
                        .map_err(bad)?;
                    let dot = Some(g.poset.to_dot());
                    let v = if *net {
                        let n = random_grid_net(&g, &GenOptions::default(), &mut rng)
                            .map_err(bad)?;
                        serde_json::to_value(net_to_doc(&n, None))
                    } else {
                        serde_json::to_value(poset_to_doc(&g.poset, None))
                    };
                    doc(v.map_err(bad)?, dot)
                }
            }
        }
        Cmd::IsoCheck { markers } => {
            let mut rep = RunReport::new("iso-check", markers.join(",").as_bytes());
            let c = circle(markers)?;
            let pn = IntervalPoset::new(c).map_err(bad)?;
            let n = pn.n();
            let cn = Arc::new(cylinder_poset(n).map_err(bad)?);
            match iso_pn_cn(&pn, &cn) {
                Ok((fwd, inv)) => {
                    rep.absorb(fwd.validate());
                    rep.absorb(inv.validate());
                    let round = (0..pn.poset.len()).all(|x| inv.apply(fwd.apply(x)) == x)
                        && (0..cn.len()).all(|y| fwd.apply(inv.apply(y)) == y);
                    rep.checks.push(Check::exact("maps are mutually inverse", round));
                    let lengths = (1..=n).all(|i| {
                        (1..=n).all(|k| pn.length(i, k) == pn.length_by_count(i, k))
                    });
                    rep.checks.push(Check::exact("length formula matches marker count", lengths));
                    let table: serde_json::Map<String, Value> = (0..pn.poset.len())
                        .map(|x| {
                            (pn.poset.label(x).to_string(), json!(cn.label(fwd.apply(x))))
                        })
                        .collect();
                    rep.details = json!({ "n": n, "map": table });
                }
                Err(e) => rep.fail("isomorphism constructed", e),
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::Pi1 { poset, base } => {
            let bytes = read(poset)?;
            let (p, _) = poset_from_doc(&parse::<PosetDoc>(&bytes)?).map_err(bad)?;
            let mut rep = RunReport::new("pi1", &bytes);
            let b = base_index(&p, base)?;
            let connected = is_pathwise_connected(&p);
            rep.checks.push(Check::exact("pathwise connected", connected));
            if connected {
                match GroupPresentation::new(p.clone(), b) {
                    Ok(pres) => {
                        let h1 = pres.h1_invariants();
                        let simp = pres.simplify(TietzeBudget::default());
                        rep.details = json!({
                            "base": p.label(b),
                            "generators": pres.generator_labels(),
                            "relators": pres.relator_strings(),
                            "h1": h1,
                            "surviving_generators": simp.surviving().len(),
                            "remaining_relators": simp.relators.len(),
                        });
                    }
                    Err(e) => rep.fail("presentation", e),
                }
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::Quotient { markers, arc } => {
            let mut rep = RunReport::new("quotient", format!("{};{arc}", markers.join(",")).as_bytes());
            let c = circle(markers)?;
            let a = parse_arc(&format!("({arc})")).map_err(bad)?;
            let inside = c.in_in(&a);
            rep.checks.push(Check::exact("arc in I_N", inside));
            if inside {
                match c.quotient_rf(&a) {
                    Ok((i, k)) => {
                        rep.details = json!({
                            "arc": a.to_string(),
                            "interval": pn_label(i, k),
                            "cylinder": cylinder_label(i, interval_length(c.n(), i, k)),
                        })
                    }
                    Err(e) => rep.fail("admissible marker interval", e),
                }
            } else {
                rep.violations.push(format!("arc {a} is not in I_N"));
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::ValidateNet { net } => {
            let bytes = read(net)?;
            let (net, _) = load_net(&bytes)?;
            let mut rep = RunReport::new("validate-net", &bytes);
            rep.absorb(net.validate_with(tol(HOM_TOL), exec));
            Ok(Output::Report(rep.finish()))
        }
        Cmd::CheckCausality { net } => {
            let bytes = read(net)?;
            let (net, d) = load_net(&bytes)?;
            let d = d.ok_or_else(|| Malformed("the net document has no \"disjoint\" relation".into()))?;
            let mut rep = RunReport::new("check-causality", &bytes);
            rep.absorb(check_causality_with(&net, &d, tol(CAUSALITY_TOL), exec));
            Ok(Output::Report(rep.finish()))
        }
        Cmd::BuildRep { net } => {
            let bytes = read(net)?;
            let (net, _) = load_net(&bytes)?;
            let mut rep = RunReport::new("build-rep", &bytes);
            match build_cylinder_rep(net) {
                Ok(r) => {
                    rep.absorb(r.validate_with(cli.probe_depth, tol(HOM_TOL), exec));
                    rep.checks.push(Check::exact("faithful", r.is_faithful()));
                    let n = cylinder_size(r.net().poset()).expect("cylinder");
                    let carriers: Vec<Value> = (1..=n)
                        .map(|i| json!(r.pi((i - 1) * n + n - 1).carrier().blocks()))
                        .collect();
                    rep.details = json!({ "probe_depth": cli.probe_depth, "column_carriers": carriers });
                }
                Err(e) => rep.fail("representation built", e),
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::Holonomy { net, base } => {
            let bytes = read(net)?;
            let (net, _) = load_net(&bytes)?;
            let mut rep = RunReport::new("holonomy", &bytes);
            let b = base_index(net.poset(), base)?;
            let pres = GroupPresentation::new(net.poset().clone(), b).map_err(bad)?;
            match bundle_holonomy(&net, &pres) {
                Ok(h) => {
                    rep.checks.push(Check::numeric("relators trivial", h.relator_residual, HOM_TOL));
                    let gens: Vec<Value> = h
                        .generators
                        .iter()
                        .zip(pres.generator_labels())
                        .map(|(g, label)| {
                            let perm = g.automorphism_blocks().unwrap_or_default();
                            let id = circnet_core::algebra::StarHom::identity(g.source());
                            json!({
                                "generator": label,
                                "block_permutation": perm,
                                "distance_from_identity": g.distance(&id),
                            })
                        })
                        .collect();
                    rep.details = json!({ "base": net.label(b), "generators": gens });
                }
                Err(e) => rep.fail("holonomy computed", e),
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::InvariantState { net, base } => {
            let bytes = read(net)?;
            let (net, _) = load_net(&bytes)?;
            let mut rep = RunReport::new("invariant-state", &bytes);
            let b = base_index(net.poset(), base)?;
            let pres = GroupPresentation::new(net.poset().clone(), b).map_err(bad)?;
            let t = tol(STATE_TOL);
            let result = bundle_holonomy(&net, &pres).map_err(|e| e.to_string()).and_then(|h| {
                let mut omega = State::random(net.fibre(b), &mut rng);
                let opts = InvariantOptions {
                    tol: t / 10.0,
                    ..InvariantOptions::default()
                };
                for _ in 0..64 {
                    let worst = h
                        .generators
                        .iter()
                        .map(|g| omega.pullback(g).map(|s| s.distance(&omega)).unwrap_or(f64::NAN))
                        .fold(0.0, f64::max);
                    if worst <= t {
                        break;
                    }
                    for g in &h.generators {
                        omega = invariant_state(g, &omega, opts).map_err(|e| e.to_string())?;
                    }
                }
                state_from_holonomy(net.clone(), &pres, &omega).map_err(|e| e.to_string())
            });
            match result {
                Ok(ns) => {
                    rep.absorb(ns.validate_with(t));
                    let states: serde_json::Map<String, Value> = (0..net.poset().len())
                        .map(|x| {
                            (net.label(x).to_string(), serde_json::to_value(state_to_doc(&ns.states[x])).expect("serializable"))
                        })
                        .collect();
                    rep.details = json!({ "base": net.label(b), "states": states });
                }
                Err(e) => rep.fail("invariant state", e),
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::Limit { system } => {
            let bytes = read(system)?;
            let sys = system_from_doc(&parse::<SystemDoc>(&bytes)?).map_err(bad)?;
            let mut rep = RunReport::new("limit", &bytes);
            let t = tol(HOM_TOL);
            let v = sys.validate_with(t);
            let ok = v.passed();
            rep.absorb(v);
            if ok {
                match limit_poset(&sys.posets) {
                    Ok(lp) => {
                        let index = &sys.posets.index;
                        let sets: serde_json::Map<String, Value> = (0..lp.poset.len())
                            .map(|o| {
                                let s: Vec<&str> = lp.index_sets[o].iter().map(|&a| index.label(a)).collect();
                                (lp.poset.label(o).to_string(), json!(s))
                            })
                            .collect();
                        let mut details = json!({ "limit_elements": lp.poset.len(), "index_sets": sets });
                        match limit_net(&sys) {
                            Ok(ln) => {
                                rep.absorb(ln.check(&sys, t));
                                details["top_stage"] = json!(index.label(ln.top));
                                details["limit_net"] =
                                    serde_json::to_value(net_to_doc(&ln.net, None)).map_err(bad)?;
                            }
                            Err(e) => rep.fail("limit net", e),
                        }
                        rep.details = details;
                    }
                    Err(e) => rep.fail("limit poset", e),
                }
            }
            Ok(Output::Report(rep.finish()))
        }
        Cmd::NormProfile {
            system,
            stage,
            element,
            samples,
        } => {
            let bytes = read(system)?;
            let sys = system_from_doc(&parse::<SystemDoc>(&bytes)?).map_err(bad)?;
            let mut rep = RunReport::new("norm-profile", &bytes);
            let index = &sys.posets.index;
            let a = index.index_of(stage).map_err(bad)?;
            let o = sys.nets[a].poset().index_of(element).map_err(bad)?;
            let mut profiles = Vec::new();
            let mut monotone = true;
            for _ in 0..*samples {
                let x = sys.nets[a].fibre(o).random_element(&mut rng);
                match limit_norm_profile(&sys, a, o, &x) {
                    Ok(p) => {
                        monotone &= p.nonincreasing;
                        let norms: Vec<Value> = p
                            .stages
                            .iter()
                            .map(|&(s, v)| json!({ "stage": index.label(s), "norm": v }))
                            .collect();
                        profiles.push(json!({
                            "norms": norms,
                            "limit_norm": p.limit_norm,
                            "stabilized": p.stabilized,
                        }));
                    }
                    Err(e) => {
                        rep.fail("profile computed", e);
                        break;
                    }
                }
            }
            rep.checks.push(Check::exact("profiles nonincreasing", monotone));
            rep.details = json!({ "stage": stage, "element": element, "profiles": profiles });
            Ok(Output::Report(rep.finish()))
        }
        Cmd::TransferCheck { system, samples } => {
            let bytes = read(system)?;
            let sys = system_from_doc(&parse::<SystemDoc>(&bytes)?).map_err(bad)?;
            let mut rep = RunReport::new("transfer-check", &bytes);
            let mut witnesses = Vec::new();
            for (a, net) in sys.nets.iter().enumerate() {
                if cylinder_size(net.poset()).is_err() {
                    break;
                }
                match build_cylinder_rep(net.clone()) {
                    Ok(w) => witnesses.push(w),
                    Err(e) => {
                        eprintln!("stage {}: {e}", sys.posets.index.label(a));
                        break;
                    }
                }
            }
            rep.absorb(injectivity_transfer_check(
                &sys,
                &witnesses,
                *samples,
                tol(HOM_TOL),
                &mut rng,
                exec,
            ));
            rep.details = json!({ "samples": samples, "witnesses": witnesses.len() });
            Ok(Output::Report(rep.finish()))
        }
    }
}
