//! Command-line interface: argument definitions and dispatch.
//!
//! [`run`] returns the text for stdout together with an exit status so the
//! commands can be exercised without spawning a process.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphflow_core::fat::{build_mapping_cylinder, is_chord_diagram, surface_invariants, CycleMark};
use graphflow_core::graph::{compute_automorphisms, glue, validate_morphism, LeafKind, OrientedGraph};
use graphflow_core::metric::{simplex_metric, SimplexPoint};
use graphflow_core::morse::{
    homology_ranks, integrate_trajectory, morse_boundary, BackendConfig, Direction, Manifold, Point,
};
use graphflow_core::ops::{
    build_operation_table, check_gluing, check_homotopy_invariance, expected_dimension_finite,
    expected_dimension_loopspace, ComparisonReport, DimensionQuery, OperationTable, TABLE_COLUMNS,
};
use graphflow_core::solver::{check_aut_action, solve_graph_flows, FlowProblem, SolveOutcome, SolverConfig};

use crate::format::{self, GraphDocument};
use crate::output::{self, num};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "graphflow", version, about = "Graph flows, fat graphs and Morse theory on surfaces")]
pub struct Cli {
    /// Write the primary output to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format for commands that offer more than one.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Tolerance override applied to the backend configuration (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// More log output on stderr (repeat for more).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oriented graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Fat graphs: boundary cycles, surface invariants, chord diagrams.
    #[command(subcommand)]
    Fat(FatCmd),
    /// Glue outgoing leaves of one graph to incoming leaves of another.
    Glue(GlueArgs),
    /// Morse complexes of a backend configuration.
    #[command(subcommand)]
    Morse(MorseCmd),
    /// Graph flows on a labeled metric graph.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Operation tables, expected dimensions and property checks.
    #[command(subcommand)]
    Op(OpCmd),
    /// Mapping cylinders of chord diagrams.
    #[command(subcommand)]
    Cylinder(CylinderCmd),
    /// Trajectory export.
    #[command(subcommand)]
    Plot(PlotCmd),
    /// Metrics from simplex coordinates.
    #[command(subcommand)]
    Metric(MetricCmd),
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    /// Print vertex and edge counts, b1, chi and the order of Aut.
    Info {
        /// Graph document.
        file: PathBuf,
    },
    /// Validate a morphism document; exits 1 when a clause fails.
    Morphism {
        /// Morphism document.
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum FatCmd {
    /// Print the canonical boundary cycles, one per line.
    Cycles {
        /// Graph document with `cyclic` lines.
        file: PathBuf,
    },
    /// Print genus, boundary count and chi.
    Genus {
        /// Graph document with `cyclic` lines.
        file: PathBuf,
    },
    /// Check the chord-diagram condition for the document's `mark` lines.
    Chord {
        /// Graph document with `cyclic` and `mark` lines.
        file: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GlueArgs {
    /// Graph providing the outgoing leaves.
    pub first: PathBuf,
    /// Graph providing the incoming leaves.
    pub second: PathBuf,
    /// Leaf pair `OUT=IN` (repeatable, at least one).
    #[arg(long = "match", value_name = "OUT=IN", required = true)]
    pub matching: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Backend configuration (`key=value` lines).
    #[arg(long, short, value_name = "PATH")]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Solver configuration (`key=value` lines).
    #[arg(long, value_name = "PATH")]
    pub solver: Option<PathBuf>,
    /// Seed grid override (seeds per side).
    #[arg(long, value_name = "N")]
    pub seed_grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum MorseCmd {
    /// Critical points, trajectory counts and F2 boundary matrices.
    Complex(ConfigArg),
    /// F2 homology ranks per degree.
    Homology(ConfigArg),
}

#[derive(Debug, Subcommand)]
pub enum FlowCmd {
    /// Solve for graph flows with leaf constraints.
    Solve {
        /// Structure document (graph plus `length`/`label` lines).
        structure: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Leaf constraint `LEAF=CRITICAL-POINT` (repeatable).
        #[arg(long = "constraint", value_name = "LEAF=CRIT")]
        constraints: Vec<String>,
        /// Also check the action of Aut on the solutions.
        #[arg(long)]
        aut: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum OpCmd {
    /// Operation table over all leaf tuples of expected dimension zero (CSV).
    Table {
        /// Structure document.
        structure: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Expected dimension; the loop-space formula unless `--p` is given.
    #[command(allow_negative_numbers = true)]
    Dim {
        /// Indices at the incoming leaves.
        #[arg(long = "in", value_delimiter = ',', num_args = 0..)]
        ins: Vec<i64>,
        /// Indices at the outgoing leaves.
        #[arg(long = "out", value_delimiter = ',', num_args = 0..)]
        outs: Vec<i64>,
        /// Euler characteristic of the graph.
        #[arg(long)]
        chi: i64,
        /// Dimension of the manifold.
        #[arg(long)]
        d: i64,
        /// Number of incoming leaves; selects the finite-dimensional formula.
        #[arg(long)]
        p: Option<i64>,
    },
    /// Compare the tables of the source and target of a morphism; exits 1 on mismatch.
    CheckInvariance {
        /// Morphism document whose source and target are structure documents.
        morphism: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare the composite of two tables with the glued graph's table; exits 1 on mismatch.
    CheckGluing {
        /// Structure providing the outgoing leaves.
        first: PathBuf,
        /// Structure providing the incoming leaves.
        second: PathBuf,
        /// Leaf pair `OUT=IN` (repeatable, at least one).
        #[arg(long = "match", value_name = "OUT=IN", required = true)]
        matching: Vec<String>,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum CylinderCmd {
    /// Cylinders of a marked chord diagram with edge lengths.
    Build {
        /// Graph document with `cyclic`, `mark` and `length` lines.
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PlotCmd {
    /// Integrate one trajectory and export it as CSV or SVG.
    Trajectory {
        #[command(flatten)]
        config: ConfigArg,
        /// Start point, comma separated (2 coordinates on the torus, 3 otherwise).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x0: Vec<f64>,
        /// Duration.
        #[arg(long)]
        time: f64,
        /// Flow direction.
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
        /// Label function to flow instead of the main function.
        #[arg(long)]
        label: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Subcommand)]
pub enum MetricCmd {
    /// Edge lengths at a simplex point: `t=<t0,..,tk> chain=<morphism,...>`.
    Simplex {
        /// `t=...` and `chain=...` (chain omitted for k = 0 with `graph=<path>`).
        #[arg(required = true)]
        items: Vec<String>,
    },
}

/// Text for stdout and the exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn backend_config(&self, path: &Path) -> Result<BackendConfig, Error> {
        let mut cfg = format::load_backend_config(path)?;
        for (k, v) in format::parse_pairs(self.cli.tol.iter().map(String::as_str))? {
            let value: f64 = v
                .parse()
                .map_err(|_| Error::Usage(format!("invalid value for --tol {k}: `{v}`")))?;
            cfg.tol.set(&k, value)?;
        }
        Ok(cfg)
    }

    fn solver_config(&self, args: &SolverArgs) -> Result<SolverConfig, Error> {
        let mut cfg = match &args.solver {
            Some(p) => format::load_solver_config(p)?,
            None => SolverConfig::default(),
        };
        if let Some(n) = args.seed_grid {
            cfg.seed_grid = n;
        }
        Ok(cfg)
    }

    fn problem(&self, doc: &GraphDocument, cfg: &BackendConfig) -> Result<FlowProblem, Error> {
        let g = Arc::new(doc.graph()?);
        let ms = doc.structure(g, Some(cfg))?;
        Ok(FlowProblem::new(ms, cfg)?)
    }

    /// Writes `text` to `--output` when given (returning an empty stdout), else
    /// returns it for stdout.
    fn emit(&self, text: String) -> Result<String, Error> {
        match &self.cli.output {
            Some(p) => {
                std::fs::write(p, text).map_err(|source| Error::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                Ok(String::new())
            }
            None => Ok(text),
        }
    }
}

fn fat_of(doc: &GraphDocument) -> Result<graphflow_core::fat::FatGraph, Error> {
    doc.fat_graph(Arc::new(doc.graph()?))
}

fn matching(items: &[String]) -> Result<Vec<(String, String)>, Error> {
    format::parse_pairs(items.iter().map(String::as_str))
}

fn point_text(m: Manifold, p: Point) -> String {
    output::coords(m, p).into_iter().map(num).collect::<Vec<_>>().join(",")
}

fn comparison_text(r: &ComparisonReport) -> Outcome {
    let mut s = format!(
        "compared={} skipped={} mismatches={}\n",
        r.compared,
        r.skipped,
        r.mismatches.len()
    );
    for m in &r.mismatches {
        s.push_str(&format!("mismatch {m}\n"));
    }
    Outcome {
        stdout: s,
        code: if r.agrees() { 0 } else { 1 },
    }
}

/// CSV rendering of an operation table.
pub fn table_csv(t: &OperationTable) -> Result<String, Error> {
    let rows: Vec<Vec<String>> = t.rows().into_iter().map(|r| r.to_vec()).collect();
    output::csv_table(&TABLE_COLUMNS, &rows)
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Graph(GraphCmd::Info { file }) => {
            let g = Arc::new(format::load_document(file)?.graph()?);
            let (b1, chi) = g.betti_and_euler();
            let aut = compute_automorphisms(&g);
            Ok(Outcome::ok(ctx.emit(format!(
                "vertices={} edges={} in={} out={} b1={b1} chi={chi} aut={}\n",
                g.vertex_count(),
                g.edge_count(),
                g.leaves(LeafKind::Incoming).len(),
                g.leaves(LeafKind::Outgoing).len(),
                aut.order()
            ))?))
        }
        Command::Graph(GraphCmd::Morphism { file }) => {
            let m = format::load_morphism(file)?;
            match validate_morphism(&m.morphism) {
                Ok(()) => Ok(Outcome::ok(ctx.emit("ok\n".into())?)),
                Err(v) => {
                    let text: String = v.iter().map(|v| format!("violation {:?}: {v}\n", v.clause)).collect();
                    Ok(Outcome {
                        stdout: ctx.emit(text)?,
                        code: 1,
                    })
                }
            }
        }
        Command::Fat(cmd) => {
            let file = match cmd {
                FatCmd::Cycles { file } | FatCmd::Genus { file } | FatCmd::Chord { file } => file,
            };
            let doc = format::load_document(file)?;
            let fg = fat_of(&doc)?;
            let g = fg.graph().clone();
            let text = match cmd {
                FatCmd::Cycles { .. } => {
                    let p = doc.marked_cycles(&fg)?;
                    (0..p.len())
                        .map(|i| {
                            let mark = p.marks[i].map_or_else(|| "-".to_string(), |m| m.to_string());
                            format!("{i} {} {mark}\n", p.render_cycle(&g, i))
                        })
                        .collect()
                }
                FatCmd::Genus { .. } => format!("{}\n", surface_invariants(&fg)?),
                FatCmd::Chord { .. } => {
                    let p = doc.marked_cycles(&fg)?;
                    let c = is_chord_diagram(&fg, &p)?;
                    if c.is_chord_diagram {
                        "chord=true\n".into()
                    } else {
                        let w: Vec<String> = c.witnesses.iter().map(|e| e.label(&g)).collect();
                        format!("chord=false witnesses={}\n", w.join(","))
                    }
                }
            };
            Ok(Outcome::ok(ctx.emit(text)?))
        }
        Command::Glue(args) => {
            let g1 = format::load_document(&args.first)?.graph()?;
            let g2 = format::load_document(&args.second)?.graph()?;
            let gl = glue(&g1, &g2, &matching(&args.matching)?)?;
            let (b1, chi) = gl.graph.betti_and_euler();
            let text = format!("# b1={b1} chi={chi}\n{}", format::write_graph(&gl.graph));
            Ok(Outcome::ok(ctx.emit(text)?))
        }
        Command::Morse(cmd) => {
            let (MorseCmd::Complex(c) | MorseCmd::Homology(c)) = cmd;
            let cfg = ctx.backend_config(&c.config)?;
            let b = cfg.backend()?;
            let complex = morse_boundary(&b)?;
            let text = match cmd {
                MorseCmd::Homology(_) => {
                    let r: Vec<String> = homology_ranks(&complex).iter().map(ToString::to_string).collect();
                    format!("ranks: {}\n", r.join(" "))
                }
                MorseCmd::Complex(_) => {
                    let m = complex.manifold;
                    let mut s = String::new();
                    for c in &complex.critical {
                        s.push_str(&format!(
                            "critical {} index={} value={} at={}\n",
                            c.id,
                            c.index,
                            num(c.value),
                            point_text(m, c.location)
                        ));
                    }
                    for k in 1..complex.generators.len() {
                        for (i, &hi) in complex.generators[k].iter().enumerate() {
                            for (j, &lo) in complex.generators[k - 1].iter().enumerate() {
                                s.push_str(&format!(
                                    "count {} {} {}\n",
                                    complex.critical[hi].id,
                                    complex.critical[lo].id,
                                    complex.counts[k][i][j]
                                ));
                            }
                        }
                        let mtx = &complex.boundary[k];
                        let rows: Vec<String> = (0..mtx.rows())
                            .map(|r| (0..mtx.cols()).map(|c| if mtx.get(r, c) { '1' } else { '0' }).collect())
                            .collect();
                        s.push_str(&format!("boundary {k} [{}]\n", rows.join(" ")));
                    }
                    s.push_str(&format!(
                        "euler={} dd=0:{}\n",
                        complex.euler_characteristic(),
                        complex.boundary_squares_to_zero()
                    ));
                    s
                }
            };
            Ok(Outcome::ok(ctx.emit(text)?))
        }
        Command::Flow(FlowCmd::Solve {
            structure,
            config,
            solver,
            constraints,
            aut,
        }) => {
            let cfg = ctx.backend_config(&config.config)?;
            let problem = ctx.problem(&format::load_document(structure)?, &cfg)?;
            let sc = format::with_constraints(ctx.solver_config(solver)?, &matching(constraints)?);
            let cons = sc.resolve(&problem)?;
            let rep = solve_graph_flows(&problem, &cons, &sc)?;
            let m = problem.manifold();
            let mut summary = format!(
                "expected_dimension={} seeds={} converged={}",
                rep.expected_dimension, rep.seeds, rep.converged
            );
            let csv = match &rep.outcome {
                SolveOutcome::Isolated(sols) => {
                    summary = format!("count={} {summary} status=isolated", sols.len());
                    let mut header = output::coord_header(m);
                    header.extend(["residual".into(), "rank".into(), "limits".into()]);
                    let rows: Vec<Vec<String>> = sols
                        .iter()
                        .map(|s| {
                            let mut r: Vec<String> = output::coords(m, s.flow.x).into_iter().map(num).collect();
                            r.push(num(s.residual_norm));
                            r.push(s.rank.to_string());
                            r.push(s.limits.iter().map(|(l, c)| format!("{l}={c}")).collect::<Vec<_>>().join(" "));
                            r
                        })
                        .collect();
                    let table = output::csv_table(&header, &rows)?;
                    if *aut {
                        let group = compute_automorphisms(problem.structure().graph());
                        let a = check_aut_action(&problem, &cons, sols, &group)?;
                        summary.push_str(&format!(
                            " aut_order={} aut_checked={} aut_failures={} orbits={}",
                            a.group_order,
                            a.checked,
                            a.failures.len(),
                            a.orbits
                        ));
                    }
                    table
                }
                SolveOutcome::PositiveDimensional { dimension, samples } => {
                    summary = format!("count=- {summary} status=positive-dimensional dimension={dimension}");
                    let rows: Vec<Vec<String>> = samples
                        .iter()
                        .map(|p| output::coords(m, *p).into_iter().map(num).collect())
                        .collect();
                    output::csv_table(&output::coord_header(m), &rows)?
                }
            };
            summary.push('\n');
            if cli.output.is_some() {
                ctx.emit(csv)?;
                Ok(Outcome::ok(summary))
            } else if cli.format == Some(OutputFormat::Csv) {
                eprint!("{summary}");
                Ok(Outcome::ok(csv))
            } else {
                Ok(Outcome::ok(summary))
            }
        }
        Command::Op(OpCmd::Table {
            structure,
            config,
            solver,
        }) => {
            let cfg = ctx.backend_config(&config.config)?;
            let problem = ctx.problem(&format::load_document(structure)?, &cfg)?;
            let t = build_operation_table(&problem, &ctx.solver_config(solver)?);
            if t.is_partial() {
                log::warn!("partial table: some tuples failed or were positive-dimensional");
            }
            Ok(Outcome::ok(ctx.emit(table_csv(&t)?)?))
        }
        Command::Op(OpCmd::Dim { ins, outs, chi, d, p }) => {
            let q = DimensionQuery {
                in_indices: ins.clone(),
                out_indices: outs.clone(),
                chi: *chi,
                d: *d,
            };
            q.validate()?;
            let v = match p {
                Some(p) => expected_dimension_finite(&q, *p),
                None => expected_dimension_loopspace(&q),
            };
            Ok(Outcome::ok(ctx.emit(format!("{v}\n"))?))
        }
        Command::Op(OpCmd::CheckInvariance {
            morphism,
            config,
            solver,
        }) => {
            let cfg = ctx.backend_config(&config.config)?;
            let m = format::load_morphism(morphism)?;
            let src = Arc::new(m.source.graph()?);
            let dst = Arc::new(m.target.graph()?);
            let p1 = FlowProblem::new(m.source.structure(src, Some(&cfg))?, &cfg)?;
            let p2 = FlowProblem::new(m.target.structure(dst, Some(&cfg))?, &cfg)?;
            let r = check_homotopy_invariance(&m.morphism, &p1, &p2, &ctx.solver_config(solver)?)?;
            let o = comparison_text(&r);
            Ok(Outcome {
                stdout: ctx.emit(o.stdout)?,
                code: o.code,
            })
        }
        Command::Op(OpCmd::CheckGluing {
            first,
            second,
            matching: pairs,
            config,
            solver,
        }) => {
            let cfg = ctx.backend_config(&config.config)?;
            let p1 = ctx.problem(&format::load_document(first)?, &cfg)?;
            let p2 = ctx.problem(&format::load_document(second)?, &cfg)?;
            let r = check_gluing(&p1, &p2, &matching(pairs)?, &ctx.solver_config(solver)?)?;
            let o = comparison_text(&r.comparison);
            Ok(Outcome {
                stdout: ctx.emit(o.stdout)?,
                code: o.code,
            })
        }
        Command::Cylinder(CylinderCmd::Build { file }) => {
            let doc = format::load_document(file)?;
            let fg = fat_of(&doc)?;
            let g = fg.graph().clone();
            let p = doc.marked_cycles(&fg)?;
            let by_id: BTreeMap<&str, f64> = doc.lengths.iter().map(|(e, l)| (e.as_str(), *l)).collect();
            let lengths: Vec<f64> = g
                .edges()
                .iter()
                .map(|e| {
                    by_id
                        .get(e.id.as_str())
                        .copied()
                        .ok_or_else(|| Error::Usage(format!("no length for edge `{}`", e.id)))
                })
                .collect::<Result<_, _>>()?;
            let cx = build_mapping_cylinder(&fg, &p, &lengths)?;
            let mut s = String::new();
            for c in &cx.cylinders {
                let axial = match c.side {
                    CycleMark::Incoming => "(-inf,0]",
                    CycleMark::Outgoing => "[0,inf)",
                };
                let word: Vec<String> = c
                    .attaching
                    .iter()
                    .map(|a| format!("{}[{},{}]", a.edge.label(&g), num(a.start), num(a.end)))
                    .collect();
                s.push_str(&format!(
                    "cylinder {} {} circumference={} axial={axial} word={}\n",
                    c.cycle,
                    c.side,
                    num(c.circumference),
                    word.join(" ")
                ));
            }
            Ok(Outcome::ok(ctx.emit(s)?))
        }
        Command::Plot(PlotCmd::Trajectory {
            config,
            x0,
            time,
            direction,
            label,
        }) => {
            let cfg = ctx.backend_config(&config.config)?;
            let b = match label {
                Some(l) => cfg.label_backend(l)?,
                None => cfg.backend()?,
            };
            let m = b.manifold();
            if x0.len() != m.ambient_dim() {
                return Err(Error::Usage(format!(
                    "--x0 needs {} coordinates on {m}",
                    m.ambient_dim()
                )));
            }
            let mut p = [0.0; 3];
            p[..x0.len()].copy_from_slice(x0);
            let p = m.canonical(p);
            let dir = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Backward => Direction::Backward,
            };
            let t = integrate_trajectory(&b, p, *time, dir)?;
            let text = match cli.format {
                Some(OutputFormat::Svg) => {
                    let crit = graphflow_core::morse::find_critical_points(&b)?;
                    let marks: Vec<(Point, String)> = crit.iter().map(|c| (c.location, c.id.clone())).collect();
                    output::svg_plot(m, &[&t], &marks)
                }
                _ => output::trajectory_csv(m, &t)?,
            };
            Ok(Outcome::ok(ctx.emit(text)?))
        }
        Command::Metric(MetricCmd::Simplex { items }) => {
            let kv = matching(items)?;
            let mut t = None;
            let mut chain = Vec::new();
            let mut graph: Option<OrientedGraph> = None;
            for (k, v) in &kv {
                match k.as_str() {
                    "t" => {
                        t = Some(
                            v.split(',')
                                .map(|x| x.trim().parse::<f64>())
                                .collect::<Result<Vec<_>, _>>()
                                .map_err(|_| Error::Usage(format!("invalid t=`{v}`")))?,
                        )
                    }
                    "chain" => {
                        for f in v.split(',').filter(|f| !f.is_empty()) {
                            chain.push(format::load_morphism(Path::new(f))?.morphism);
                        }
                    }
                    "graph" => graph = Some(format::load_document(Path::new(v))?.graph()?),
                    other => return Err(Error::Usage(format!("unknown simplex item `{other}`"))),
                }
            }
            let t = t.ok_or_else(|| Error::Usage("missing t=".into()))?;
            let point = if chain.is_empty() {
                let g = graph.ok_or_else(|| Error::Usage("k = 0 needs graph=<path>".into()))?;
                SimplexPoint::new(t, Arc::new(g), Vec::new())?
            } else {
                SimplexPoint::from_chain(t, chain)?
            };
            let sm = simplex_metric(&point);
            let mut s = String::new();
            for (e, l) in sm.lengths.iter().enumerate() {
                s.push_str(&format!("length {} {}\n", sm.graph.edge(e).id, num(*l)));
            }
            if !sm.zero_length.is_empty() {
                let z: Vec<&str> = sm.zero_length.iter().map(|&e| sm.graph.edge(e).id.as_str()).collect();
                s.push_str(&format!("# zero-length (collapsed at this point): {}\n", z.join(" ")));
            }
            Ok(Outcome::ok(ctx.emit(s)?))
        }
    }
}

/// Caps the global thread pool at `GRAPHFLOW_THREADS` when set.
pub fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("GRAPHFLOW_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Usage(format!("GRAPHFLOW_THREADS must be a positive integer, found `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(e.to_string()))?;
    }
    Ok(())
}
