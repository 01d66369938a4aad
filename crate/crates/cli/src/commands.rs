//! One function per subcommand, each producing a [`Report`].

use qsymx::braiding::{self, CoboundaryPath};
use qsymx::cactus::{self, CactusAction, Parity};
use qsymx::cartan::{CartanType, RootSystem, Weight};
use qsymx::error::Error;
use qsymx::groth::{self, GrothElement};
use qsymx::linalg::{self, Matrix};
use qsymx::symext::{self, Kind};
use qsymx::uqg::{self, ModuleRep};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::report::{Check, Report, Table};
use crate::{Command, Options};

/// Residual bound for operator identities.
const IDENTITY_TOL: f64 = 1e-8;
/// Residual bound for unitarity and path agreement.
const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedType(_)
            | Error::RankMismatch { .. }
            | Error::NotDominant(_)
            | Error::InvalidQ(_)
            | Error::CactusIndex { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// The module selected by `--type`, `--hw`/`--summands` and `--q`.
#[derive(Clone, Debug)]
pub struct ModuleSpec {
    pub cartan_type: CartanType,
    pub highest: Vec<Weight>,
    pub q: f64,
}

impl ModuleSpec {
    pub fn from_options(opts: &Options) -> Result<Self> {
        let rank = RootSystem::new(opts.cartan_type).rank();
        let highest = match (&opts.hw, &opts.summands) {
            (_, Some(s)) => s
                .split(';')
                .map(|w| parse_weight(w, rank))
                .collect::<Result<Vec<_>>>()?,
            (Some(h), None) => vec![parse_weight(h, rank)?],
            (None, None) => vec![Weight::fundamental(rank, 0)],
        };
        if highest.is_empty() {
            return Err(CliError::Usage("empty summand list".into()));
        }
        Ok(Self {
            cartan_type: opts.cartan_type,
            highest,
            q: opts.q,
        })
    }

    pub fn build(&self) -> Result<ModuleRep> {
        let rs = RootSystem::new(self.cartan_type);
        for w in &self.highest {
            rs.weyl_dim(w)?;
        }
        Ok(uqg::build_sum(&rs, &self.highest, self.q)?)
    }

    fn label(&self) -> String {
        self.highest
            .iter()
            .map(|w| format!("V{w}"))
            .collect::<Vec<_>>()
            .join("+")
    }

    fn meta(&self, opts: &Options, degree: Option<usize>) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("type".into(), json!(self.cartan_type.to_string()));
        m.insert("module".into(), json!(self.label()));
        m.insert(
            "summands".into(),
            json!(self
                .highest
                .iter()
                .map(|w| w.coords().to_vec())
                .collect::<Vec<_>>()),
        );
        m.insert("q".into(), json!(self.q));
        m.insert("n".into(), json!(degree));
        m.insert("tol".into(), json!(opts.tol));
        m.insert("timestamp".into(), timestamp());
        m
    }
}

fn parse_weight(s: &str, rank: usize) -> Result<Weight> {
    let coords = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i32>()
                .map_err(|_| CliError::Usage(format!("invalid weight `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != rank {
        return Err(CliError::Usage(format!(
            "weight `{s}` needs {rank} coordinate(s)"
        )));
    }
    let w = Weight::new(coords);
    if !w.is_dominant() {
        return Err(CliError::Usage(format!("weight {w} is not dominant")));
    }
    Ok(w)
}

/// Reports carry a timestamp only when one is supplied, so that repeated runs
/// are byte-identical by default.
fn timestamp() -> Value {
    std::env::var("QSYMX_TIMESTAMP")
        .or_else(|_| std::env::var("SOURCE_DATE_EPOCH"))
        .map_or(Value::Null, Value::String)
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

pub fn dispatch(cmd: Command, opts: &Options) -> Result<Report> {
    if cmd == Command::Suite {
        return suite(opts);
    }
    let spec = ModuleSpec::from_options(opts)?;
    run_job(cmd, &spec, opts.n, opts.tol, opts)
}

fn run_job(cmd: Command, spec: &ModuleSpec, n: usize, tol: f64, opts: &Options) -> Result<Report> {
    let degree = match cmd {
        Command::Module | Command::Braiding | Command::Cube | Command::Koszul => None,
        _ => Some(n),
    };
    let needs_degree = |min: usize| {
        if n < min {
            Err(CliError::Usage(format!("--n must be at least {min}")))
        } else {
            Ok(())
        }
    };
    let v = spec.build()?;
    let mut r = Report::new(&command_name(cmd), spec.meta(opts, degree));
    match cmd {
        Command::Module => module(&mut r, &v),
        Command::Decompose => {
            needs_degree(1)?;
            decompose(&mut r, &v, n, tol)?
        }
        Command::Braiding => braiding_checks(&mut r, &v)?,
        Command::Cactus => {
            needs_degree(2)?;
            cactus_checks(&mut r, &v, n, tol)?
        }
        Command::Sympow => {
            needs_degree(2)?;
            sympow(&mut r, &v, n, tol)?
        }
        Command::Flatness => flatness(&mut r, &v, n, tol)?,
        Command::Commutativity => {
            needs_degree(2)?;
            commutativity(&mut r, &v, n, tol)?
        }
        Command::Cube => cube(&mut r, &v, tol)?,
        Command::Koszul => koszul(&mut r, &v, tol)?,
        Command::Suite => unreachable!("handled by dispatch"),
    }
    Ok(r)
}

fn command_name(cmd: Command) -> String {
    format!("{cmd:?}").to_lowercase()
}

fn module(r: &mut Report, v: &ModuleRep) {
    let res = v.relation_residuals();
    r.check(Check::below("cartan relations", res.cartan, IDENTITY_TOL));
    r.check(Check::below(
        "commutator relations",
        res.commutator,
        IDENTITY_TOL,
    ));
    r.check(Check::below("serre relations", res.serre, IDENTITY_TOL));
    r.check(Check::below(
        "form invariance",
        v.form_invariance_residual(),
        IDENTITY_TOL,
    ));
    r.result("dim", json!(v.dim()));
    let weights: Vec<Value> = v
        .weight_multiset()
        .iter()
        .rev()
        .map(|(w, m)| json!({"weight": w, "multiplicity": m}))
        .collect();
    r.result("weights", Value::Array(weights));
}

fn decompose(r: &mut Report, v: &ModuleRep, n: usize, tol: f64) -> Result<()> {
    let m = uqg::tensor_power(v, n);
    let quantum = groth::decompose(&m, tol)?;
    let classical = groth::peel(m.root_system(), &m.weight_multiset())?;
    r.check(Check::exact(
        "highest weight count = character peeling",
        quantum == classical,
        format!("{quantum}"),
    ));
    r.result("dim", json!(m.dim()));
    r.result("decomposition", value(&quantum));
    r.result("peeled", value(&classical));
    Ok(())
}

fn braiding_checks(r: &mut Report, v: &ModuleRep) -> Result<()> {
    let rm = braiding::r_matrix(v, v)?;
    r.check(Check::below("R intertwiner", rm.residual, IDENTITY_TOL));
    let rs = v.root_system();
    let mut top = 0.0_f64;
    for a in v.summands().unwrap_or_default() {
        for b in v.summands().unwrap_or_default() {
            let ip = rs.weight_inner(&a.highest, &b.highest)?;
            let exponent = *ip.numer() as f64 / *ip.denom() as f64;
            let (i, j) = (a.offset, b.offset);
            let idx = i * v.dim() + j;
            let mut e = Matrix::zeros(v.dim() * v.dim(), 1);
            e[(idx, 0)] = 1.0;
            let expected = v.q().powf(exponent);
            top = top.max((rm.op.matrix() * &e - &e * expected).amax());
        }
    }
    r.check(Check::below("R on highest weight vectors", top, 1e-10));
    let scalar = braiding::coboundary(v, v, CoboundaryPath::Scalar)?;
    let spectral = braiding::coboundary(v, v, CoboundaryPath::Spectral)?;
    let s = scalar.matrix();
    r.check(Check::below(
        "scalar vs spectral coboundary",
        linalg::max_diff(s, spectral.matrix()),
        UNITARY_TOL,
    ));
    r.check(Check::below(
        "sigma unitarity",
        braiding::unitarity_residual(v, v, s),
        UNITARY_TOL,
    ));
    r.check(Check::below(
        "sigma adjoint pairing",
        braiding::adjoint_pair_residual(v, v, s, s),
        UNITARY_TOL,
    ));
    let n = s.nrows();
    r.check(Check::below(
        "sigma involution",
        linalg::max_diff(&(s * s), &Matrix::identity(n, n)),
        IDENTITY_TOL,
    ));
    r.check(Check::below(
        "sigma module map",
        braiding::module_map_residual(v, v, s),
        IDENTITY_TOL,
    ));
    r.result("r_order", json!(format!("{:?}", rm.order).to_lowercase()));
    Ok(())
}

fn cactus_checks(r: &mut Report, v: &ModuleRep, n: usize, tol: f64) -> Result<()> {
    for parity in [Parity::Even, Parity::Odd] {
        let action = CactusAction::with_options(v, n, parity, CoboundaryPath::Scalar, tol)?;
        let rel = cactus::relation_residuals(&action)?;
        let tag = format!("{parity:?}").to_lowercase();
        r.check(Check::below(
            format!("{tag} involution"),
            rel.involution,
            IDENTITY_TOL,
        ));
        r.check(Check::below(
            format!("{tag} disjoint commute"),
            rel.disjoint,
            IDENTITY_TOL,
        ));
        r.check(Check::below(
            format!("{tag} nesting"),
            rel.nesting,
            IDENTITY_TOL,
        ));
        r.check(Check::below(
            format!("{tag} module map"),
            cactus::module_map_residual(&action)?,
            IDENTITY_TOL,
        ));
    }
    r.result("generators", json!(cactus::generators(n).len()));
    r.result("space_dim", json!(v.dim().pow(n as u32)));
    Ok(())
}

fn sympow(r: &mut Report, v: &ModuleRep, n: usize, tol: f64) -> Result<()> {
    let action = CactusAction::new(v, n)?;
    let d = v.dim();
    let mut rows = Vec::new();
    for kind in [Kind::Sym, Kind::Ext] {
        let c = symext::quotient_component_for(&action, kind, tol)?;
        let classical = match kind {
            Kind::Sym => symext::classical_sym_dim(d, n),
            Kind::Ext => symext::classical_ext_dim(d, n),
        };
        r.check(Check::exact(
            format!("{kind} embedding"),
            c.embedding_holds,
            format!(
                "ideal {} + subspace {} of {}, intersection {}",
                c.dim_ideal,
                c.dim_subspace,
                d.pow(n as u32),
                c.dim_intersection
            ),
        ));
        rows.push(vec![
            kind.to_string(),
            n.to_string(),
            c.dim_subspace.to_string(),
            classical.to_string(),
            c.dim_ideal.to_string(),
            c.dim_intersection.to_string(),
        ]);
        r.result(&kind.to_string(), value(&c));
    }
    r.table = Some(Table {
        header: [
            "kind",
            "n",
            "dim_q",
            "classical",
            "dim_ideal",
            "dim_intersection",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    });
    Ok(())
}

fn flatness(r: &mut Report, v: &ModuleRep, n: usize, tol: f64) -> Result<()> {
    let verdicts = symext::flatness(v, n, tol)?;
    let mut rows = Vec::new();
    for d in &verdicts {
        r.check(Check::exact(
            format!("degree {} flat", d.n),
            d.sym_flat && d.ext_flat,
            format!(
                "S {}/{}, Λ {}/{}",
                d.sym, d.classical_sym, d.ext, d.classical_ext
            ),
        ));
        rows.push(vec![
            d.n.to_string(),
            d.sym.to_string(),
            d.classical_sym.to_string(),
            d.ext.to_string(),
            d.classical_ext.to_string(),
            (d.sym_flat && d.ext_flat).to_string(),
        ]);
    }
    r.result("degrees", value(&verdicts));
    r.table = Some(Table {
        header: ["n", "sym_q", "sym", "ext_q", "ext", "flat"]
            .map(String::from)
            .to_vec(),
        rows,
    });
    Ok(())
}

fn commutativity(r: &mut Report, v: &ModuleRep, n: usize, tol: f64) -> Result<()> {
    for sup in [false, true] {
        let rep = symext::commutativity_check(v, n, sup, tol)?;
        let name = if sup {
            "super variant on Λ^n_q"
        } else {
            "S^n_q"
        };
        let mut c = Check::below(name, rep.residual, IDENTITY_TOL);
        c.detail = rep.worst_generator.map(|g| format!("worst generator {g}"));
        r.check(c);
        r.result(if sup { "super" } else { "even" }, value(&rep));
    }
    Ok(())
}

fn cube(r: &mut Report, v: &ModuleRep, tol: f64) -> Result<()> {
    let rep = groth::verify_cube_identity_for(v, tol)?;
    r.check(Check::exact(
        "cube identity",
        rep.identity_holds,
        format!("{}", rep.lhs),
    ));
    r.check(Check::exact("lifted form", rep.lifted_holds, ""));
    r.check(Check::exact(
        "fixed-space description",
        rep.fixed_space_check_holds,
        "",
    ));
    r.check(Check::exact(
        "common-part comparison",
        rep.common_part.holds,
        format!("{}", rep.common_part.common),
    ));
    let psi = groth::psi_spectrum_check(v, tol)?;
    match psi.psi_cube_residual {
        Some(res) => r.check(Check::below("psi cubed = id", res, f64::MIN_POSITIVE)),
        None => {
            r.check(Check::above(
                "psi + id invertible",
                psi.min_singular,
                groth::PSI_MARGIN,
            ));
            r.check(Check::below(
                "psi eigenspace pairing",
                psi.pairing_residual,
                1e-6,
            ));
        }
    }
    r.result("identity_holds", json!(rep.identity_holds));
    r.result("lifted_holds", json!(rep.lifted_holds));
    r.result("dim", json!(rep.dim));
    r.result("sym_q", value(&rep.sym_q));
    r.result("ext_q", value(&rep.ext_q));
    r.result("sym", value(&rep.sym));
    r.result("ext", value(&rep.ext));
    r.result("lhs", value(&rep.lhs));
    r.result("rhs", value(&rep.rhs));
    r.result("differing", value(&rep.differing));
    r.result("common_part", value(&rep.common_part));
    r.result("psi", value(&psi));
    let dims = |g: &GrothElement| g.total_dim(v.root_system());
    r.result("dim_sym_q", json!(dims(&rep.sym_q)?));
    r.result("dim_ext_q", json!(dims(&rep.ext_q)?));
    Ok(())
}

fn koszul(r: &mut Report, v: &ModuleRep, tol: f64) -> Result<()> {
    let rep = symext::hilbert_and_koszul(v, tol)?;
    r.check(Check::exact(
        "dim S³_q − dim Λ³_q = (dim V)²",
        rep.holds,
        format!("{} vs {}", rep.difference, rep.expected),
    ));
    r.table = Some(Table {
        header: ["n", "sym_q", "ext_q"].map(String::from).to_vec(),
        rows: (0..rep.sym.dims.len())
            .map(|k| {
                vec![
                    k.to_string(),
                    rep.sym.dims[k].to_string(),
                    rep.ext.dims[k].to_string(),
                ]
            })
            .collect(),
    });
    r.result("koszul", value(&rep));
    Ok(())
}

struct Job {
    name: String,
    cmd: Command,
    spec: ModuleSpec,
    n: usize,
}

fn suite_jobs() -> Vec<Job> {
    let spec = |ct, hw: &[&[i32]], q| ModuleSpec {
        cartan_type: ct,
        highest: hw.iter().map(|h| Weight::new(h.to_vec())).collect(),
        q,
    };
    let modules: Vec<(CartanType, Vec<&[i32]>)> = vec![
        (CartanType::A1, vec![&[1]]),
        (CartanType::A1, vec![&[2]]),
        (CartanType::A1, vec![&[3]]),
        (CartanType::A1, vec![&[1], &[2]]),
        (CartanType::A2, vec![&[1, 0]]),
        (CartanType::A2, vec![&[0, 1]]),
        (CartanType::A2, vec![&[1, 0], &[0, 1]]),
    ];
    let fundamentals: Vec<(CartanType, &[i32])> = vec![
        (CartanType::A1, &[1]),
        (CartanType::A2, &[1, 0]),
        (CartanType::A2, &[0, 1]),
        (CartanType::B2, &[1, 0]),
        (CartanType::B2, &[0, 1]),
    ];
    let mut jobs = Vec::new();
    let mut push = |cmd: Command, s: ModuleSpec, n: usize| {
        let mut name = format!("{} {} {}", command_name(cmd), s.cartan_type, s.label());
        if matches!(
            cmd,
            Command::Cube | Command::Koszul | Command::Braiding | Command::Module
        ) {
            name.push_str(&format!(" q={}", s.q));
        } else {
            name.push_str(&format!(" n={n} q={}", s.q));
        }
        jobs.push(Job {
            name,
            cmd,
            spec: s,
            n,
        });
    };
    for (ct, hw) in &modules {
        for q in [1.0, 1.2, 1.3] {
            push(Command::Cube, spec(*ct, hw, q), 3);
        }
        push(Command::Koszul, spec(*ct, hw, 1.2), 3);
        push(Command::Sympow, spec(*ct, hw, 1.2), 2);
        push(Command::Sympow, spec(*ct, hw, 1.2), 3);
    }
    for (ct, hw) in &fundamentals {
        push(Command::Module, spec(*ct, &[hw], 1.2), 1);
        push(Command::Braiding, spec(*ct, &[hw], 1.2), 2);
        push(Command::Cactus, spec(*ct, &[hw], 1.2), 3);
        if *ct != CartanType::B2 {
            push(Command::Commutativity, spec(*ct, &[hw], 1.2), 3);
            push(Command::Commutativity, spec(*ct, &[hw], 1.2), 4);
        }
    }
    push(Command::Flatness, spec(CartanType::A1, &[&[1]], 1.2), 4);
    push(Command::Decompose, spec(CartanType::A2, &[&[1, 0]], 1.2), 3);
    jobs
}

fn suite(opts: &Options) -> Result<Report> {
    let mut jobs = suite_jobs();
    jobs.sort_by(|a, b| a.name.cmp(&b.name));
    let outcomes: Vec<(String, Result<Report>)> = jobs
        .par_iter()
        .map(|j| (j.name.clone(), run_job(j.cmd, &j.spec, j.n, opts.tol, opts)))
        .collect();
    let mut meta = Map::new();
    meta.insert("jobs".into(), json!(jobs.len()));
    meta.insert("tol".into(), json!(opts.tol));
    meta.insert("timestamp".into(), timestamp());
    let mut r = Report::new("suite", meta);
    r.terse = true;
    let mut rows = Vec::new();
    for (name, outcome) in outcomes {
        match outcome {
            Ok(job) => {
                let pass = job.passed();
                let failing: Vec<String> = job
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.clone())
                    .collect();
                r.check(Check::exact(name.clone(), pass, failing.join("; ")));
                rows.push(job.to_json());
            }
            Err(CliError::Usage(e)) => return Err(CliError::Usage(format!("{name}: {e}"))),
            Err(CliError::Compute(e)) => {
                r.check(Check::exact(name.clone(), false, e.to_string()));
                rows.push(json!({"command": name, "error": e.to_string()}));
            }
        }
    }
    r.result("jobs", Value::Array(rows));
    Ok(r)
}
