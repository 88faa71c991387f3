use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringpir::analysis::{pir_rate, work_factor};
use ringpir::attack::{distinguishing_advantage, row_deletion_scan, InstanceKind};
use ringpir::fixtures;
use ringpir::linalg::Matrix;
use ringpir::pir::{gen_query, recover, server_respond, setup_random, Database, RngRandomness, Shape};
use ringpir::pir_io::{server, MatrixFile, MessageType, ParamsFile, PublicParams, SecretsFile, WireFrame, SEED_ENV};
use ringpir::zmod::Modulus;

#[derive(Parser)]
#[command(name = "pir", version, about = "Single-server PIR over Z_m[x]/<x^n - 1>")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for compliant parameters; writes the secret params file and `<params>.public`.
    Setup {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "m-factors", visible_alias = "m")]
        m_factors: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        t: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Accept the first instance drawn even if it violates the technical conditions.
        #[arg(long)]
        allow_noncompliant: bool,
        #[arg(long, default_value_t = ringpir::pir::DEFAULT_SETUP_ATTEMPTS)]
        attempts: usize,
    },
    /// Write a random database matching a public descriptor.
    GenDb {
        #[arg(long)]
        public: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build a query for file `d`; writes the query matrix and the client secrets.
    Query {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        secrets: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Answer a query offline.
    Respond {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of files; defaults to one file per database column.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Answer framed queries over TCP. Reads only the database.
    Serve {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Send a query to a server and store the response.
    Send {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[arg(long, required_unless_present = "info")]
        query: Option<PathBuf>,
        #[arg(long, required_unless_present = "info")]
        out: Option<PathBuf>,
        /// Ask for the database shape instead.
        #[arg(long)]
        info: bool,
    },
    /// Decode a response into the requested file.
    Recover {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        secrets: PathBuf,
        #[arg(long)]
        response: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Row-deletion rank-profile scan of a query matrix.
    Attack {
        #[arg(long)]
        query: PathBuf,
        #[arg(long = "m-factors", visible_alias = "m")]
        m_factors: String,
        #[arg(long)]
        rows_per_file: usize,
        /// Estimate the distinguishing advantage over this many fresh queries (needs `--params`).
        #[arg(long, requires = "params")]
        trials: Option<usize>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rate and work-factor figures for a parameter set.
    Rate {
        #[arg(long = "m", visible_alias = "m-factors")]
        m: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
    },
    /// Write the worked toy example (m = 15, n = 13) as files.
    ExportToy {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn rng(seed: Option<u64>) -> Result<ChaCha20Rng> {
    let seed = match seed {
        Some(s) => Some(s),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => Some(v.trim().parse().with_context(|| format!("{SEED_ENV}={v} is not a u64"))?),
            Err(_) => None,
        },
    };
    Ok(seed.map_or_else(ChaCha20Rng::from_entropy, ChaCha20Rng::seed_from_u64))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<MatrixFile> {
    MatrixFile::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write_matrix(path: &Path, file: &MatrixFile) -> Result<()> {
    file.write(path).with_context(|| format!("writing {}", path.display()))
}

fn public_path(params: &Path) -> PathBuf {
    let mut s = params.as_os_str().to_owned();
    s.push(".public");
    PathBuf::from(s)
}

fn load_db(path: &Path, t: Option<usize>) -> Result<Database> {
    let file = read_matrix(path)?;
    let cols = file.matrix.cols();
    let t = t.unwrap_or(cols);
    if t == 0 || cols % t != 0 {
        bail!("database has {cols} columns, not a multiple of t = {t}");
    }
    Ok(Database::new(file.matrix, t, cols / t, file.modulus)?)
}

fn load_params(path: &Path) -> Result<ringpir::pir::PirParams> {
    let file = ParamsFile::parse(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_params()?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Setup { params, m_factors, n, s, r, t, l, seed, allow_noncompliant, attempts } => {
            let modulus = Modulus::parse_factors(&m_factors)?;
            let shape = Shape { t, l, r };
            let mut rng = rng(seed)?;
            let found = setup_random(&modulus, n, s, shape, attempts, &mut rng);
            let built = match found {
                Ok(p) => p,
                Err(ringpir::PirError::NoCompliantInstance(_)) if allow_noncompliant => {
                    noncompliant_instance(&modulus, n, s, shape, &mut rng)?
                }
                Err(e) => return Err(e.into()),
            };
            let file = ParamsFile::from_params(&built);
            write_text(&params, &file.serialize())?;
            write_text(&public_path(&params), &file.public().serialize())?;
            println!(
                "wrote {} and {} (m = {}, m' = {}, n = {n}, s = {s}, compliant = {})",
                params.display(),
                public_path(&params).display(),
                modulus.m(),
                modulus.m_prime(),
                built.report().overall
            );
        }
        Command::GenDb { public, out, seed } => {
            let public = PublicParams::parse(&read_text(&public)?)?;
            let m_prime = public.modulus()?.m_prime();
            let db = Database::random(public.shape, m_prime, &mut rng(seed)?);
            write_matrix(&out, &MatrixFile::new(db.entries().clone(), m_prime)?)?;
            let Shape { t, l, r } = public.shape;
            println!("wrote {}: {l} x {} over Z_{m_prime} ({t} files of {l} x {r})", out.display(), t * r);
        }
        Command::Query { params, d, out, secrets, seed } => {
            let params = load_params(&params)?;
            let (q, sec) = gen_query(&params, d, &mut RngRandomness(&mut rng(seed)?))?;
            let m = params.modulus().m();
            write_matrix(&out, &MatrixFile::new(q, m)?)?;
            SecretsFile::new(params.n(), m, sec).write(&secrets)?;
            println!("wrote {} and {}", out.display(), secrets.display());
        }
        Command::Respond { db, query, out, t } => {
            let db = load_db(&db, t)?;
            let q = read_matrix(&query)?;
            if q.modulus % db.m_prime() != 0 {
                bail!("query modulus {} is not a multiple of m' = {}", q.modulus, db.m_prime());
            }
            let r = server_respond(&db, &q.matrix, q.modulus)?;
            write_matrix(&out, &MatrixFile::new(r, q.modulus)?)?;
            println!("wrote {}", out.display());
        }
        Command::Serve { db, bind, t } => {
            let db = load_db(&db, t)?;
            let listener = std::net::TcpListener::bind(&bind).with_context(|| format!("binding {bind}"))?;
            println!("serving on {}", listener.local_addr()?);
            server::serve_listener(std::sync::Arc::new(db), listener, None)?;
        }
        Command::Send { addr, query, out, info } => {
            if info {
                let reply = server::send(&addr, &WireFrame::new(MessageType::DbInfoReq, vec![]))?;
                if reply.message_type() != Some(MessageType::DbInfo) || reply.payload.len() != 32 {
                    bail!("unexpected reply: {}", String::from_utf8_lossy(&reply.payload));
                }
                let w: Vec<u64> =
                    reply.payload.chunks(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
                println!("t = {}, L = {}, r = {}, m' = {}", w[0], w[1], w[2], w[3]);
                return Ok(());
            }
            let (query, out) = (query.expect("required by clap"), out.expect("required by clap"));
            let response = server::send_query(&addr, &read_matrix(&query)?)?;
            write_matrix(&out, &response)?;
            println!("wrote {}", out.display());
        }
        Command::Recover { params, secrets, response, out } => {
            let params = load_params(&params)?;
            let secrets = SecretsFile::read(&secrets).with_context(|| format!("reading {}", secrets.display()))?;
            if secrets.n != params.n() || secrets.m != params.modulus().m() {
                bail!("secrets were made for n = {}, m = {}", secrets.n, secrets.m);
            }
            let r = read_matrix(&response)?;
            if r.modulus != params.modulus().m() {
                bail!("response modulus {} does not match m = {}", r.modulus, params.modulus().m());
            }
            let file = recover(&params, &secrets.secrets, &r.matrix)?;
            write_matrix(&out, &MatrixFile::new(file.clone(), params.modulus().m_prime())?)?;
            println!("recovered file {} ({} x {}) into {}", secrets.secrets.d, file.rows(), file.cols(), out.display());
            print_matrix(&file);
        }
        Command::Attack { query, m_factors, rows_per_file, trials, params, seed } => {
            let modulus = Modulus::parse_factors(&m_factors)?;
            let q = read_matrix(&query)?;
            if q.modulus % modulus.m() != 0 && modulus.m() % q.modulus != 0 {
                bail!("query modulus {} and m = {} are unrelated", q.modulus, modulus.m());
            }
            let report = row_deletion_scan(&q.matrix, &modulus, rows_per_file)?;
            println!("full span: {:.3} bits, {}", report.full.bits(), describe(&report.full));
            for (i, (drop, after)) in report.drops.iter().zip(&report.after_deletion).enumerate() {
                println!("file {}: drop {drop:.3} bits, {}", i + 1, describe(after));
            }
            match report.distinguished() {
                Some(d) => println!("distinguished file: {d}"),
                None => println!("no distinguished file"),
            }
            if let (Some(trials), Some(path)) = (trials, params) {
                let params = load_params(&path)?;
                let adv = distinguishing_advantage(&InstanceKind::Ring(&params), trials, &mut rng(seed)?)?;
                println!("advantage over {trials} fresh queries: {adv:.4}");
            }
        }
        Command::Rate { m, n, s, r, t, l } => {
            let modulus = Modulus::parse_factors(&m)?;
            let limit = pir_rate(&modulus, n, s, r, t.unwrap_or(1), None)?;
            println!("m = {}, m' = {}, n = {n}, s = {s}, r = {r}", modulus.m(), modulus.m_prime());
            match limit.approx_rate_exact {
                Some(f) => println!("rate: {f} ({:.6})", limit.approx_rate),
                None => println!("rate: {:.6}", limit.approx_rate),
            }
            if let Some(l) = l {
                let t = t.ok_or_else(|| anyhow!("--L needs --t"))?;
                let fin = pir_rate(&modulus, n, s, r, t, Some(l))?;
                let exact = fin.exact_rate.map(|f| format!("{f} ")).unwrap_or_default();
                println!("rate with t = {t}, L = {l}: {exact}({:.6})", fin.exact_rate_f64);
                println!(
                    "upload {:.0} bits, download {:.0} bits, file {:.0} bits",
                    fin.upload_bits, fin.download_bits, fin.file_bits
                );
            }
            let w = work_factor(&modulus, n, s)?;
            let cosets: Vec<String> = w.cosets.iter().map(|(p, t)| format!("T({n}, {p}) = {t}")).collect();
            println!("cyclotomic classes: {}", cosets.join(", "));
            println!(
                "work factor: 2^{} per code, (2^{})^{} = 2^{} for all {} codes",
                w.log2_per_code(),
                w.log2_per_code(),
                s + 1,
                w.log2_total(),
                s + 1
            );
        }
        Command::ExportToy { dir } => {
            std::fs::create_dir_all(&dir)?;
            let params = fixtures::params()?;
            let file = ParamsFile::from_params(&params);
            write_text(&dir.join("toy.params"), &file.serialize())?;
            write_text(&dir.join("toy.params.public"), &file.public().serialize())?;
            let db = fixtures::database()?;
            write_matrix(&dir.join("toy_db.mat"), &MatrixFile::new(db.entries().clone(), db.m_prime())?)?;
            let (q, secrets) = gen_query(&params, fixtures::DESIRED, &mut fixtures::stream())?;
            write_matrix(&dir.join("toy_query.mat"), &MatrixFile::new(q, fixtures::M)?)?;
            SecretsFile::new(fixtures::N, fixtures::M, secrets).write(&dir.join("toy.secrets"))?;
            println!("wrote toy.params, toy.params.public, toy_db.mat, toy_query.mat, toy.secrets to {}", dir.display());
        }
    }
    Ok(())
}

/// One draw of the search, built without the compliance check.
fn noncompliant_instance(
    modulus: &Modulus,
    n: usize,
    s: usize,
    shape: Shape,
    rng: &mut ChaCha20Rng,
) -> Result<ringpir::pir::PirParams> {
    use rand::Rng;
    use ringpir::chaincode::factor_xn_minus_1;
    use ringpir::crtcode::CrtCyclicCode;
    use ringpir::outercode::{random_unit_upper, OuterCode};

    let mut inner = Vec::new();
    let mut outer = vec![Vec::new(); s];
    for f in modulus.factors() {
        let k = factor_xn_minus_1(n, f.p, f.e)?.len();
        inner.push((0..k).map(|_| rng.gen_range(0..=f.e)).collect::<Vec<u32>>());
        let mut per = vec![vec![0; k]; s];
        for j in 0..k {
            let mut draws: Vec<u32> = (0..s).map(|_| rng.gen_range(0..=f.e)).collect();
            draws.sort_unstable();
            for (i, a) in draws.into_iter().enumerate() {
                per[i][j] = a;
            }
        }
        for (i, e) in per.into_iter().enumerate() {
            outer[i].push(e);
        }
    }
    let inner = CrtCyclicCode::from_exponents(modulus, n, &inner)?;
    let constituents =
        outer.iter().map(|e| CrtCyclicCode::from_exponents(modulus, n, e)).collect::<ringpir::Result<Vec<_>>>()?;
    let outer = OuterCode::build(constituents, random_unit_upper(s, modulus.m(), rng))?;
    Ok(ringpir::pir::PirParams::new(inner, outer, shape, true)?)
}

fn describe(profile: &ringpir::attack::RankProfile) -> String {
    profile
        .per_prime
        .iter()
        .map(|(f, ks)| format!("{f}: {ks:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_matrix(m: &Matrix) {
    for row in m.iter_rows() {
        println!("{}", row.iter().map(u64::to_string).collect::<Vec<_>>().join(" "));
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(ToString::to_string).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}
