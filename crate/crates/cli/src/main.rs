mod args;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use quadalg::adjoint::{adjoint_extended_with, kernel_from};
use quadalg::crt::{adjoint_via_crt_with, CrtConfig};
use quadalg::domain::{Float64Field, IntegerRing, PolyRing, RationalField, Ring};
use quadalg::engine::bench::{scaling_series, to_csv, SeriesConfig, SeriesLabel};
use quadalg::factorize::{cholesky, invert_strassen, invert_triangular};
use quadalg::generate::{generate_matrix, RandomSpec};
use quadalg::io::{self, MarketDomain};
use quadalg::multiply::multiply_accumulate;
use quadalg::{AdjointResult, Engine, EngineConfig, Error, QuadMatrix, Result, TaskContext};

use args::{BenchOp, Cli, Command, CrtMode, DomainArg, Settings};

/// How a domain's matrices and scalars are read and written.
trait CliDomain: Ring + Copy {
    fn load(self, path: &Path, leaf: usize) -> Result<QuadMatrix<Self>>;
    fn render(m: &QuadMatrix<Self>) -> String;
    fn show(&self, v: &Self::Elem) -> String;
}

macro_rules! market_domain {
    ($($t:ty),*) => {$(
        impl CliDomain for $t {
            fn load(self, path: &Path, leaf: usize) -> Result<QuadMatrix<Self>> {
                io::read_matrix_market(self, path, leaf)
            }
            fn render(m: &QuadMatrix<Self>) -> String {
                io::format_matrix_market(m)
            }
            fn show(&self, v: &Self::Elem) -> String {
                self.format_value(v)
            }
        }
    )*};
}

market_domain!(IntegerRing, RationalField, Float64Field);

impl CliDomain for PolyRing {
    fn load(self, path: &Path, leaf: usize) -> Result<QuadMatrix<Self>> {
        io::read_poly_matrix(path, leaf)
    }
    fn render(m: &QuadMatrix<Self>) -> String {
        io::format_poly_matrix(m)
    }
    fn show(&self, v: &Self::Elem) -> String {
        v.to_string()
    }
}

struct Ctx<'a> {
    s: &'a Settings,
    output: Option<&'a Path>,
}

impl Ctx<'_> {
    fn emit(&self, text: &str) -> Result<()> {
        match self.output {
            Some(path) => Ok(std::fs::write(path, text)?),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn engine(&self) -> Engine {
        let workers = *self.s.workers.iter().max().expect("nonempty");
        Engine::new(EngineConfig::new(workers, self.s.mode).with_inline_below(self.s.inline_below))
    }

    fn use_crt<D: Ring>(&self, m: &QuadMatrix<D>) -> bool {
        match self.s.crt {
            CrtMode::On => true,
            CrtMode::Off => false,
            CrtMode::Auto => m.density() >= self.s.multiply.density_boundary,
        }
    }
}

/// `A_ext(m, 1)` over a generic domain.
fn extended<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>, s: &Settings) -> Result<AdjointResult<D>> {
    adjoint_extended_with(ctx, m, &m.domain().one(), &s.multiply)
}

/// `A_ext(m, 1)` over the integers, directly or through residues.
fn extended_int(ctx: &TaskContext, m: &QuadMatrix<IntegerRing>, s: &Settings, crt: bool) -> Result<AdjointResult<IntegerRing>> {
    if crt {
        let cfg = CrtConfig { multiply: s.multiply, ..Default::default() };
        Ok(adjoint_via_crt_with(ctx, m, &cfg)?.0)
    } else {
        extended(ctx, m, s)
    }
}

fn adjoint_output<D: CliDomain>(c: &Ctx, cmd: &Command, m: &QuadMatrix<D>, r: AdjointResult<D>) -> Result<()> {
    let n = m.rows();
    let dom = *m.domain();
    match cmd {
        Command::Adjoint { .. } => c.emit(&D::render(&r.a.top_left(n, n))),
        Command::Echelon { pivots, .. } => {
            if let Some(path) = pivots {
                let e = r.e.to_matrix(IntegerRing, m.leaf_order()).top_left(n, n);
                io::write_matrix_market(&e, path)?;
            }
            c.emit(&D::render(&r.s.top_left(n, n)))
        }
        Command::Kernel { .. } => {
            let k = kernel_from(&r);
            c.emit(&D::render(&io::vectors_to_matrix(dom, n, &k, m.leaf_order())))
        }
        Command::Det { .. } => {
            println!("{}", dom.show(&r.determinant()));
            Ok(())
        }
        Command::Rank { .. } => {
            println!("{}", r.rank());
            Ok(())
        }
        _ => unreachable!("not an adjoint command"),
    }
}

fn input_of(cmd: &Command) -> &Path {
    match cmd {
        Command::Inverse { input }
        | Command::TriInverse { input, .. }
        | Command::Cholesky { input, .. }
        | Command::Adjoint { input }
        | Command::Kernel { input }
        | Command::Det { input }
        | Command::Rank { input }
        | Command::Echelon { input, .. } => input,
        Command::Multiply { a, .. } => a,
        Command::Gen { .. } | Command::Bench { .. } => unreachable!("no input file"),
    }
}

/// Commands that only need ring arithmetic.
fn ring_command<D: CliDomain>(c: &Ctx, cmd: &Command, dom: D) -> Result<()> {
    let leaf = c.s.leaf;
    let engine = c.engine();
    if let Command::Multiply { a, b } = cmd {
        let (a, b) = (dom.load(a, leaf)?, dom.load(b, leaf)?);
        let p = engine.run(|ctx| multiply_accumulate(ctx, &a, &b, None, &c.s.multiply))?;
        return c.emit(&D::render(&p));
    }
    let m = dom.load(input_of(cmd), leaf)?;
    let r = engine.run(|ctx| extended(ctx, &m, c.s))?;
    adjoint_output(c, cmd, &m, r)
}

fn int_adjoint_command(c: &Ctx, cmd: &Command) -> Result<()> {
    let m = IntegerRing.load(input_of(cmd), c.s.leaf)?;
    let crt = c.use_crt(&m);
    let r = c.engine().run(|ctx| extended_int(ctx, &m, c.s, crt))?;
    adjoint_output(c, cmd, &m, r)
}

/// Inversion and Cholesky over a field.
fn field_command<F>(c: &Ctx, cmd: &Command, dom: F) -> Result<()>
where
    F: CliDomain + quadalg::domain::OrderedField,
{
    let m = dom.load(input_of(cmd), c.s.leaf)?;
    let engine = c.engine();
    match cmd {
        Command::Inverse { .. } => {
            let inv = engine.run(|ctx| invert_strassen(ctx, &m, &c.s.multiply))?;
            c.emit(&F::render(&inv))
        }
        Command::TriInverse { side, .. } => {
            let inv = engine.run(|ctx| invert_triangular(ctx, &m, (*side).into(), &c.s.multiply))?;
            c.emit(&F::render(&inv))
        }
        Command::Cholesky { inverse_output, .. } => {
            let r = engine.run(|ctx| cholesky(ctx, &m, &c.s.multiply))?;
            if let Some(path) = inverse_output {
                std::fs::write(path, F::render(&r.h_inv))?;
            }
            c.emit(&F::render(&r.h))
        }
        _ => unreachable!("not a field command"),
    }
}

fn random_spec(order: usize, density: f64, bits: u32) -> RandomSpec {
    RandomSpec { bit_width: bits, ..RandomSpec::new(order, density) }
}

fn to_rational(m: &QuadMatrix<IntegerRing>) -> QuadMatrix<RationalField> {
    m.map_domain(RationalField, |v| quadalg::domain::BigRational::from_integer(v.clone()))
}

fn to_float(m: &QuadMatrix<IntegerRing>) -> QuadMatrix<Float64Field> {
    m.map_domain(Float64Field, |v| Float64Field.from_bigint(v))
}

fn bench(c: &Ctx, op: BenchOp, order: usize, density: f64, bits: u32) -> Result<()> {
    let s = c.s;
    let spec = random_spec(order, density, bits);
    let m = generate_matrix(&spec, s.seed)?.with_leaf_order(s.leaf);
    let cfg = SeriesConfig {
        worker_counts: s.workers.clone(),
        repetitions: s.repetitions,
        mode: s.mode,
        inline_below: s.inline_below,
    };
    let label = |domain: &str| SeriesLabel { op: op.name().into(), order, density, domain: domain.into() };
    let mcfg = s.multiply;
    let rows = match (op, s.domain) {
        (BenchOp::Adjoint | BenchOp::Det, DomainArg::Int) => {
            let crt = c.use_crt(&m);
            let domain = if crt { "int-crt" } else { "int-standard" };
            if op == BenchOp::Adjoint {
                scaling_series(&label(domain), &cfg, |ctx| extended_int(ctx, &m, s, crt))?
            } else {
                scaling_series(&label(domain), &cfg, |ctx| Ok(extended_int(ctx, &m, s, crt)?.determinant()))?
            }
        }
        (BenchOp::Adjoint | BenchOp::Det, DomainArg::Rational) => {
            let q = to_rational(&m);
            scaling_series(&label("rational"), &cfg, |ctx| Ok(extended(ctx, &q, s)?.determinant()))?
        }
        (BenchOp::Multiply, DomainArg::Int) => {
            let b = generate_matrix(&spec, s.seed.wrapping_add(1))?.with_leaf_order(s.leaf);
            scaling_series(&label("int"), &cfg, |ctx| multiply_accumulate(ctx, &m, &b, None, &mcfg))?
        }
        (BenchOp::Multiply, DomainArg::Float64) => {
            let b = to_float(&generate_matrix(&spec, s.seed.wrapping_add(1))?.with_leaf_order(s.leaf));
            let a = to_float(&m);
            scaling_series(&label("float64"), &cfg, |ctx| multiply_accumulate(ctx, &a, &b, None, &mcfg))?
        }
        (BenchOp::Inverse, DomainArg::Int | DomainArg::Rational) => {
            let q = to_rational(&m);
            scaling_series(&label("rational"), &cfg, |ctx| invert_strassen(ctx, &q, &mcfg))?
        }
        (BenchOp::Inverse, DomainArg::Float64) => {
            let f = to_float(&m);
            scaling_series(&label("float64"), &cfg, |ctx| invert_strassen(ctx, &f, &mcfg))?
        }
        (op, domain) => {
            return Err(Error::InvalidConfig(format!("bench {} is not available for domain {domain:?}", op.name())));
        }
    };
    c.emit(&to_csv(&rows))
}

fn run(cli: &Cli) -> Result<()> {
    let s = cli.run.resolve(&cli.command)?;
    let c = Ctx { s: &s, output: cli.run.output.as_deref() };
    let cmd = &cli.command;
    match cmd {
        Command::Gen { order, density, bits, symmetric, spd } => {
            let spec = RandomSpec { symmetric: *symmetric, spd: *spd, ..random_spec(*order, *density, *bits) };
            let m = generate_matrix(&spec, s.seed)?;
            match s.domain {
                DomainArg::Int => c.emit(&io::format_matrix_market(&m)),
                _ => Err(Error::InvalidConfig("gen writes integer matrices; use --domain int".into())),
            }
        }
        Command::Bench { op, order, density, bits } => bench(&c, *op, *order, *density, *bits),
        Command::Inverse { .. } | Command::TriInverse { .. } | Command::Cholesky { .. } => match s.domain {
            DomainArg::Int | DomainArg::Rational => field_command(&c, cmd, RationalField),
            DomainArg::Float64 => field_command(&c, cmd, Float64Field),
            DomainArg::Poly => Err(Error::InvalidConfig("polynomials do not form a field; use int or rational".into())),
        },
        Command::Multiply { .. } => match s.domain {
            DomainArg::Int => ring_command(&c, cmd, IntegerRing),
            DomainArg::Poly => ring_command(&c, cmd, PolyRing),
            DomainArg::Rational => ring_command(&c, cmd, RationalField),
            DomainArg::Float64 => ring_command(&c, cmd, Float64Field),
        },
        _ => match s.domain {
            DomainArg::Int => int_adjoint_command(&c, cmd),
            DomainArg::Poly => ring_command(&c, cmd, PolyRing),
            DomainArg::Rational => ring_command(&c, cmd, RationalField),
            DomainArg::Float64 => ring_command(&c, cmd, Float64Field),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(if e.is_domain_error() { 1 } else { 2 })
        }
    }
}
