//! Command implementations behind the `fgred` binary. Each returns the
//! artifact and a textual report; nothing here reads the clock or the
//! environment, so equal inputs give byte-identical outputs.

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BinaryVector, BitVector};
use crate::error::{Error, Result};
use crate::gadget::{build_gadget, verify_gadget_exhaustive};
use crate::instance::{Body, InstanceFile, Kind, Wrap};
use crate::params::{plan_protocol, plan_reduction};
use crate::protocol::{adversarial_merlin_samples, MerlinMessage, Protocol, Strategy, Verdict};
use crate::reduce::{
    cp_hamming_to_edit, cp_hamming_to_lp, ip_to_apx_maxip, maxip_minip_flip, maxip_to_cp_hamming,
    BlockVector, CpInstance, FlipImage, HammingImage, IpInstance, Materialize, MaxIpInstance, Metric,
    MinIpInstance, Role,
};
use crate::solvers::{
    edit_distance, lp_distance, solve_cp, solve_cp_binary, solve_ip, solve_maxip, solve_minip, CpValue,
    SolveResult,
};

/// Retry cap for rejection-sampling instances without a `σ` pair.
pub const GEN_RETRY_CAP: u32 = 10_000;

/// Report text plus whether every checked invariant held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

/// Mixes a base seed with indices into an independent stream seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut x = seed;
    for &p in parts {
        x = x.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^= x >> 31;
    }
    x
}

fn random_bits(d: usize, rng: &mut ChaCha8Rng) -> BitVector {
    BitVector::from_bools(&(0..d).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub kind: Kind,
    pub n: usize,
    pub d: usize,
    pub sigma: Option<u64>,
    pub planted: bool,
    pub metric: Option<Metric>,
    pub seed: u64,
}

pub fn gen(opts: &GenOptions) -> Result<InstanceFile> {
    if opts.n == 0 || opts.d == 0 {
        return Err(Error::InvalidParameter("N and d must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let side = |rng: &mut ChaCha8Rng| (0..opts.n).map(|_| random_bits(opts.d, rng)).collect::<Vec<_>>();
    match opts.kind {
        Kind::Ip => {
            let sigma = opts
                .sigma
                .ok_or_else(|| Error::InvalidParameter("ip instances need --sigma".into()))?;
            if sigma > opts.d as u64 {
                return Err(Error::OutOfRange(format!("sigma {sigma} exceeds d = {}", opts.d)));
            }
            let (a, b, prov) = if opts.planted {
                let (mut a, mut b) = (side(&mut rng), side(&mut rng));
                let (i, j) = (rng.gen_range(0..opts.n), rng.gen_range(0..opts.n));
                plant_pair(&mut a[i], &mut b[j], sigma, &mut rng);
                (a, b, format!("gen:ip:planted:seed={}:pair={i},{j}", opts.seed))
            } else {
                let mut found = None;
                for _ in 0..GEN_RETRY_CAP {
                    let (a, b) = (side(&mut rng), side(&mut rng));
                    let inst = IpInstance::new(a, b, sigma)?;
                    if !solve_ip(&inst).found() {
                        found = Some((inst.a, inst.b));
                        break;
                    }
                }
                let (a, b) = found.ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "no instance without a sigma={sigma} pair after {GEN_RETRY_CAP} tries"
                    ))
                })?;
                (a, b, format!("gen:ip:free:seed={}", opts.seed))
            };
            let mut file = InstanceFile::dense(Kind::Ip, a, b)?;
            file.sigma = Some(sigma);
            file.provenance = Some(prov);
            Ok(file)
        }
        kind => {
            let (a, b) = (side(&mut rng), side(&mut rng));
            let mut file = InstanceFile::dense(kind, a, b)?;
            if kind == Kind::Cp {
                file.metric = Some(opts.metric.unwrap_or(Metric::Hamming));
            }
            file.provenance = Some(format!("gen:{}:seed={}", kind.name(), opts.seed));
            Ok(file)
        }
    }
}

/// Makes `⟨a, b⟩ = σ`: `a` gets at least `σ` ones, `b` exactly `σ` ones
/// on the support of `a` and random bits elsewhere.
fn plant_pair(a: &mut BitVector, b: &mut BitVector, sigma: u64, rng: &mut ChaCha8Rng) {
    while a.count_ones() < sigma {
        let k = rng.gen_range(0..a.len());
        a.set(k, true);
    }
    let support: Vec<usize> = a.ones_positions().collect();
    for &k in &support {
        b.set(k, false);
    }
    for idx in sample(rng, support.len(), sigma as usize) {
        b.set(support[idx], true);
    }
}

fn ip_instance(file: &InstanceFile) -> Result<IpInstance> {
    if file.kind != Kind::Ip {
        return Err(Error::InvalidParameter(format!("expected an ip instance, got {}", file.kind.name())));
    }
    let (a, b) = file.dense_vectors()?;
    IpInstance::new(a.to_vec(), b.to_vec(), file.sigma.unwrap_or(0))
}

fn ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn protocol_run(
    file: &InstanceFile,
    block_width: usize,
    strategy: Option<Strategy>,
    count: usize,
    seed: u64,
    transcript: bool,
) -> Result<Outcome> {
    let inst = ip_instance(file)?;
    let protocol = Protocol::new(plan_protocol(inst.dim(), block_width)?)?;
    let params = protocol.params();
    let sigma = inst.sigma;
    let bound = Ratio::new(49u64, 50);
    let strategies: Vec<Strategy> = strategy.map_or(Strategy::ALL.to_vec(), |s| vec![s]);
    let mut out = String::new();
    let mut ok = true;
    writeln!(
        out,
        "protocol d={} T={} t={} primes={} q={} R={} L={} sigma={sigma}",
        params.dim,
        params.block_width,
        params.t,
        params.num_primes(),
        params.q,
        params.randomness_space_size,
        params.merlin_bits
    )
    .expect("string write");
    let mut adversarial = String::new();
    for (i, a) in inst.a.iter().enumerate() {
        let ea = protocol.encode_input(a)?;
        for (j, b) in inst.b.iter().enumerate() {
            let eb = protocol.encode_input(b)?;
            let ip = a.dot(b);
            let honest = protocol.honest_message(&ea, &eb);
            let p = protocol.acceptance_probability_encoded(&ea, &eb, sigma, &honest);
            let verdict = match protocol.alice_check(&honest, sigma) {
                Verdict::Accept => String::from("accepted"),
                Verdict::Reject(reason) => format!("rejected: {reason}"),
            };
            writeln!(out, "pair {i} {j} ip={ip} honest={} ({verdict})", ratio(p)).expect("string write");
            if ip == sigma {
                if p != Ratio::from_integer(1) {
                    ok = false;
                    writeln!(out, "VIOLATION completeness on pair {i} {j}").expect("string write");
                }
                if transcript {
                    out.push_str(&protocol.transcript(&ea, &eb, &honest));
                }
                continue;
            }
            for (s_idx, &st) in strategies.iter().enumerate() {
                let msgs = adversarial_merlin_samples(
                    &protocol,
                    a,
                    b,
                    sigma,
                    st,
                    count,
                    derive_seed(seed, &[i as u64, j as u64, s_idx as u64]),
                )?;
                for (m_idx, m) in msgs.iter().enumerate() {
                    let p = protocol.acceptance_probability_encoded(&ea, &eb, sigma, m);
                    let flag = if p <= bound { "" } else { " VIOLATION" };
                    if p > bound {
                        ok = false;
                    }
                    writeln!(adversarial, "adv {i} {j} {st} {m_idx} {}{flag}", ratio(p)).expect("string write");
                }
            }
        }
    }
    if adversarial.is_empty() {
        out.push_str("adversarial: none\n");
    } else {
        out.push_str("adversarial:\n");
        out.push_str(&adversarial);
    }
    writeln!(out, "status {}", if ok { "ok" } else { "VIOLATION" }).expect("string write");
    Ok(Outcome { report: out, ok })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    MaxIp,
    CpHamming,
    CpLp,
    CpEdit,
    MinIp,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "maxip" => Target::MaxIp,
            "cp-hamming" => Target::CpHamming,
            "cp-lp" => Target::CpLp,
            "cp-edit" => Target::CpEdit,
            "minip" => Target::MinIp,
            _ => return Err(Error::InvalidParameter(format!("unknown reduction target {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub block_width: usize,
    pub p: f64,
    /// `None` selects the honest message of the witnessing pair.
    pub strategy: Option<Strategy>,
    pub seed: u64,
    pub verify: bool,
}

/// Chooses the Merlin message for IP → Max-IP and describes the choice.
fn choose_message(
    inst: &IpInstance,
    protocol: &Protocol,
    opts: &ReduceOptions,
) -> Result<(MerlinMessage, String, bool)> {
    let witness = solve_ip(inst).witness;
    let (i, j) = witness.unwrap_or((0, 0));
    match (opts.strategy, witness) {
        (None, Some(_)) => Ok((
            protocol.honest_merlin(&inst.a[i], &inst.b[j])?,
            format!("honest message of witness pair {i} {j}"),
            true,
        )),
        (st, _) => {
            let st = st.unwrap_or(Strategy::ShiftedHonest);
            let msg = adversarial_merlin_samples(protocol, &inst.a[i], &inst.b[j], inst.sigma, st, 1, opts.seed)?
                .pop()
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("strategy {st} produced no check-passing message"))
                })?;
            Ok((msg, format!("{st} message for pair {i} {j}"), false))
        }
    }
}

fn check_pairs<V: BinaryVector>(
    out: &mut String,
    a: &[V],
    b: &[V],
    what: &str,
    check: impl Fn(usize, usize, &V, &V) -> bool,
) -> bool {
    let mut bad = 0;
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !check(i, j, x, y) {
                bad += 1;
                if bad <= 5 {
                    writeln!(out, "VIOLATION {what} on pair {i} {j}").expect("string write");
                }
            }
        }
    }
    writeln!(out, "verify {what}: {} pairs, {bad} violations", a.len() * b.len()).expect("string write");
    bad == 0
}

fn dense_of<V: Materialize>(vs: &[V]) -> Result<Vec<BitVector>> {
    vs.iter().map(Materialize::to_bits).collect()
}

fn inherit(file: &InstanceFile, kind: Kind, step: &str) -> impl FnOnce(InstanceFile) -> InstanceFile {
    let prov = format!("{}>{step}", file.provenance.clone().unwrap_or_else(|| "file".into()));
    move |mut out| {
        out.kind = kind;
        out.provenance = Some(prov);
        out
    }
}

pub fn reduce(file: &InstanceFile, target: Target, opts: &ReduceOptions) -> Result<(InstanceFile, Outcome)> {
    let mut report = String::new();
    let mut ok = true;
    let out = match target {
        Target::MaxIp => {
            let inst = ip_instance(file)?;
            let protocol = Protocol::new(plan_protocol(inst.dim(), opts.block_width)?)?;
            let spec = Arc::new(build_gadget(opts.block_width as u64, protocol.params().q)?);
            let (msg, what, honest) = choose_message(&inst, &protocol, opts)?;
            let red = ip_to_apx_maxip(&inst, &protocol, &msg, spec)?;
            writeln!(
                report,
                "reduce ip -> maxip using {what}: W={} Gamma={} d'={} target W*Gamma={}",
                red.block_count,
                red.gamma(),
                red.d_prime(),
                red.target()
            )
            .expect("string write");
            if opts.verify {
                let best = solve_maxip(&red.instance)?;
                let has_witness = solve_ip(&inst).found();
                write!(report, "verify maxip: max={} witness={},{}", best.optimum, best.witness.0, best.witness.1)
                    .expect("string write");
                if has_witness && honest {
                    let pass = best.optimum == red.target();
                    ok &= pass;
                    writeln!(report, " expected W*Gamma: {}", if pass { "pass" } else { "VIOLATION" })
                } else if !has_witness {
                    let pass = red.is_far(best.optimum);
                    ok &= pass;
                    writeln!(report, " expected <= W*(Gamma-0.02): {}", if pass { "pass" } else { "VIOLATION" })
                } else {
                    writeln!(report, " (non-honest message on a planted instance, no claim)")
                }
                .expect("string write");
            }
            let mut file_out = InstanceFile::gadget(Kind::MaxIp, &red.instance.a, &red.instance.b)?;
            file_out.provenance = red.instance.provenance.as_ref().map(|p| p.id.clone());
            file_out
        }
        Target::CpHamming => {
            if file.kind != Kind::MaxIp {
                return Err(Error::InvalidParameter("cp-hamming expects a maxip instance".into()));
            }
            let finish = inherit(file, Kind::Cp, "cp-hamming");
            let mut out = match &file.body {
                Body::Dense { a, b } => {
                    let cp = maxip_to_cp_hamming(&MaxIpInstance::new(a.clone(), b.clone())?);
                    if opts.verify {
                        let d = file.dim;
                        ok &= check_pairs(&mut report, &cp.a, &cp.b, "hamming=2d-2ip", |i, j, x, y| {
                            x.to_bits().map(|xb| xb.hamming(&y.to_bits().expect("small")))
                                .is_ok_and(|h| h == 2 * d - 2 * a[i].dot(&b[j]))
                                && x.hamming(y) == 2 * d - 2 * a[i].dot(&b[j])
                        });
                    }
                    InstanceFile::dense(Kind::Cp, dense_of(&cp.a)?, dense_of(&cp.b)?)?
                }
                Body::Gadget { .. } => {
                    let (a, b) = file.gadget_vectors()?;
                    if opts.verify {
                        let cp = maxip_to_cp_hamming(&MaxIpInstance::new(a.clone(), b.clone())?);
                        let d = file.dim;
                        ok &= check_pairs(&mut report, &cp.a, &cp.b, "hamming=2d-2ip", |i, j, x, y| {
                            x.hamming(y) == 2 * d - 2 * a[i].dot(&b[j])
                        });
                    }
                    let mut f = file.clone();
                    f.wrap = Some(Wrap::Hamming);
                    f.dim = 3 * file.dim;
                    f
                }
            };
            out.metric = Some(Metric::Hamming);
            writeln!(report, "reduce maxip -> cp-hamming: d={} -> {}", file.dim, out.dim).expect("string write");
            finish(out)
        }
        Target::CpLp => {
            if file.kind != Kind::Cp || file.metric != Some(Metric::Hamming) {
                return Err(Error::InvalidParameter("cp-lp expects a Hamming cp instance".into()));
            }
            let finish = inherit(file, Kind::Cp, &format!("cp-lp:{}", opts.p));
            let mut out = file.clone();
            // validates the exponent
            cp_hamming_to_lp(&CpInstance::<BitVector>::new(vec![], vec![], Metric::Edit)?.with_metric(Metric::Hamming), opts.p)?;
            out.metric = Some(Metric::Lp(opts.p));
            if opts.verify {
                let p = opts.p;
                let close = |h: u64, lp: f64| (lp.powf(p) - h as f64).abs() <= 1e-9 * (h as f64).max(1.0);
                ok &= match file.wrap {
                    None => {
                        let (a, b) = file.dense_vectors()?;
                        check_pairs(&mut report, a, b, "lp^p=hamming", |_, _, x, y| close(x.hamming(y), lp_distance(x, y, p)))
                    }
                    Some(Wrap::Hamming) => {
                        let (a, b) = hamming_images(file)?;
                        check_pairs(&mut report, &a, &b, "lp^p=hamming", |_, _, x, y| close(x.hamming(y), lp_distance(x, y, p)))
                    }
                    Some(Wrap::Flip) => return Err(Error::InvalidParameter("flip-wrapped file is not a cp instance".into())),
                };
            }
            writeln!(report, "reduce cp-hamming -> cp-lp p={}", opts.p).expect("string write");
            finish(out)
        }
        Target::CpEdit => {
            if file.kind != Kind::Cp || file.metric != Some(Metric::Hamming) {
                return Err(Error::InvalidParameter("cp-edit expects a Hamming cp instance".into()));
            }
            let (a, b) = file.dense_vectors()?;
            let finish = inherit(file, Kind::Cp, "cp-edit");
            let edit = cp_hamming_to_edit(&CpInstance::new(a.to_vec(), b.to_vec(), Metric::Hamming)?)?;
            let validated = edit.provenance.as_ref().and_then(|p| p.get("validated")) == Some("true");
            writeln!(
                report,
                "reduce cp-hamming -> cp-edit: c_ed={} inline DP validation {}",
                crate::reduce::EDIT_CONSTANT,
                if validated { "passed" } else { "skipped (d above cap)" }
            )
            .expect("string write");
            if opts.verify {
                ok &= check_pairs(&mut report, &edit.a, &edit.b, "ed=c_ed*hamming", |i, j, x, y| {
                    edit_distance(x, y) == crate::reduce::EDIT_CONSTANT * a[i].hamming(&b[j])
                });
            }
            let mut out = InstanceFile::dense(Kind::Cp, edit.a, edit.b)?;
            out.metric = Some(Metric::Edit);
            finish(out)
        }
        Target::MinIp => {
            if file.kind != Kind::MaxIp {
                return Err(Error::InvalidParameter("minip expects a maxip instance".into()));
            }
            let finish = inherit(file, Kind::MinIp, "minip");
            let out = match &file.body {
                Body::Dense { a, b } => {
                    let src = MaxIpInstance::new(a.clone(), b.clone())?;
                    let flipped = maxip_minip_flip(&src);
                    if opts.verify {
                        ok &= verify_flip(&mut report, &src, &flipped)?;
                    }
                    InstanceFile::dense(Kind::MinIp, dense_of(&flipped.a)?, dense_of(&flipped.b)?)?
                }
                Body::Gadget { .. } => {
                    let (a, b) = file.gadget_vectors()?;
                    if opts.verify {
                        let src = MaxIpInstance::new(a, b)?;
                        ok &= verify_flip(&mut report, &src, &maxip_minip_flip(&src))?;
                    }
                    let mut f = file.clone();
                    f.wrap = Some(Wrap::Flip);
                    f.dim = 2 * file.dim;
                    f
                }
            };
            writeln!(report, "reduce maxip -> minip: d={} -> {}", file.dim, out.dim).expect("string write");
            finish(out)
        }
    };
    writeln!(report, "status {}", if ok { "ok" } else { "VIOLATION" }).expect("string write");
    Ok((out, Outcome { report, ok }))
}

fn verify_flip<V: BinaryVector + Sync + Clone>(
    report: &mut String,
    src: &MaxIpInstance<V>,
    flipped: &MinIpInstance<FlipImage<V>>,
) -> Result<bool> {
    let d = src.dim();
    let mut ok = check_pairs(report, &flipped.a, &flipped.b, "flip=d-ip", |i, j, x, y| {
        x.dot(y) == d - src.a[i].dot(&src.b[j])
    });
    let max = solve_maxip(src)?;
    let min = solve_minip(flipped)?;
    let agree = min.witness == max.witness && min.optimum == d - max.optimum;
    ok &= agree;
    writeln!(report, "verify argmin=argmax: {}", if agree { "pass" } else { "VIOLATION" }).expect("string write");
    Ok(ok)
}

impl<V> CpInstance<V> {
    fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }
}

type Sides<V> = (Vec<V>, Vec<V>);

fn hamming_images(file: &InstanceFile) -> Result<Sides<HammingImage<BlockVector>>> {
    let (a, b) = file.gadget_vectors()?;
    Ok((
        a.into_iter().map(|v| HammingImage::new(v, Role::A)).collect(),
        b.into_iter().map(|v| HammingImage::new(v, Role::B)).collect(),
    ))
}

fn flip_images(file: &InstanceFile) -> Result<Sides<FlipImage<BlockVector>>> {
    let (a, b) = file.gadget_vectors()?;
    Ok((
        a.into_iter().map(|v| FlipImage::new(v, Role::A)).collect(),
        b.into_iter().map(|v| FlipImage::new(v, Role::B)).collect(),
    ))
}

fn format_int(kind: &str, r: &SolveResult<u64>) -> String {
    format!(
        "{kind} optimum={} witness={},{} comparisons={}\n",
        r.optimum, r.witness.0, r.witness.1, r.comparisons
    )
}

fn format_cp(metric: Metric, r: &SolveResult<CpValue>) -> String {
    format!(
        "cp metric={metric} exact={} distance={} witness={},{} comparisons={}\n",
        r.optimum.exact, r.optimum.distance, r.witness.0, r.witness.1, r.comparisons
    )
}

pub fn solve(file: &InstanceFile) -> Result<String> {
    match (file.kind, file.wrap) {
        (Kind::Ip, _) => {
            let inst = ip_instance(file)?;
            let ans = solve_ip(&inst);
            Ok(match ans.witness {
                Some((i, j)) => format!(
                    "ip sigma={} found=true witness={i},{j} comparisons={}\n",
                    inst.sigma, ans.comparisons
                ),
                None => format!("ip sigma={} found=false comparisons={}\n", inst.sigma, ans.comparisons),
            })
        }
        (Kind::MaxIp, None) => match &file.body {
            Body::Dense { a, b } => Ok(format_int("maxip", &solve_maxip(&MaxIpInstance::new(a.clone(), b.clone())?)?)),
            Body::Gadget { .. } => {
                let (a, b) = file.gadget_vectors()?;
                Ok(format_int("maxip", &solve_maxip(&MaxIpInstance::new(a, b)?)?))
            }
        },
        (Kind::MinIp, None) => {
            let (a, b) = file.dense_vectors()?;
            Ok(format_int("minip", &solve_minip(&MinIpInstance::new(a.to_vec(), b.to_vec())?)?))
        }
        (Kind::MinIp, Some(Wrap::Flip)) => {
            let (a, b) = flip_images(file)?;
            Ok(format_int("minip", &solve_minip(&MinIpInstance::new(a, b)?)?))
        }
        (Kind::Cp, None) => {
            let (a, b) = file.dense_vectors()?;
            let metric = file.metric.unwrap_or(Metric::Hamming);
            Ok(format_cp(metric, &solve_cp(&CpInstance::new(a.to_vec(), b.to_vec(), metric)?)?))
        }
        (Kind::Cp, Some(Wrap::Hamming)) => {
            let (a, b) = hamming_images(file)?;
            let metric = file.metric.unwrap_or(Metric::Hamming);
            Ok(format_cp(metric, &solve_cp_binary(&CpInstance::new(a, b, metric)?)?))
        }
        (kind, Some(w)) => Err(Error::InvalidParameter(format!(
            "a {} instance cannot carry wrap={w:?}",
            kind.name()
        ))),
    }
}

pub fn verify_gadget(t_max: u64, q_max: u64) -> Result<Outcome> {
    let reports = verify_gadget_exhaustive(t_max, q_max)?;
    let mut out = String::new();
    let mut ok = true;
    for r in &reports {
        write!(out, "T={} q={} Gamma={} dim={} checked={} ", r.block_width, r.q, r.gamma, r.dim, r.checked)
            .expect("string write");
        match &r.counterexample {
            None => out.push_str("pass\n"),
            Some(c) => {
                ok = false;
                writeln!(
                    out,
                    "FAIL a={:?} b={:?} sigma={} got={} expected={}",
                    c.a, c.b, c.sigma, c.got, c.expected
                )
                .expect("string write");
            }
        }
    }
    writeln!(out, "status {}", if ok { "ok" } else { "VIOLATION" }).expect("string write");
    Ok(Outcome { report: out, ok })
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "epsilon", "c", "T", "t", "q", "R_space_size", "L_bits", "d_prime", "delta", "status",
];

/// One CSV row per `(ε, c)`; planner failures become rows with an error status.
pub fn sweep(epsilons: &[f64], cs: &[f64], set_size: u64) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for &eps in epsilons {
        for &c in cs {
            let row = match plan_reduction(eps, c, set_size) {
                Ok(plan) => vec![
                    eps.to_string(),
                    c.to_string(),
                    plan.block_width.to_string(),
                    plan.protocol.t.to_string(),
                    plan.protocol.q.to_string(),
                    plan.protocol.randomness_space_size.to_string(),
                    plan.protocol.merlin_bits.to_string(),
                    plan.d_prime.to_string(),
                    format!("{:e}", plan.delta),
                    if plan.budget_met { "ok" } else { "ok-padded-budget" }.to_string(),
                ],
                Err(e) => {
                    let mut row = vec![eps.to_string(), c.to_string()];
                    row.extend(std::iter::repeat_n(String::new(), 7));
                    row.push(format!("error: {e}"));
                    row
                }
            };
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip_opts(planted: bool, seed: u64) -> GenOptions {
        GenOptions {
            kind: Kind::Ip,
            n: 4,
            d: 8,
            sigma: Some(3),
            planted,
            metric: None,
            seed,
        }
    }

    #[test]
    fn planted_and_free_generation() {
        for seed in 0..20 {
            let planted = gen(&ip_opts(true, seed)).unwrap();
            assert!(solve_ip(&ip_instance(&planted).unwrap()).found());
            let free = gen(&ip_opts(false, seed)).unwrap();
            assert!(!solve_ip(&ip_instance(&free).unwrap()).found());
        }
        assert_eq!(gen(&ip_opts(true, 9)).unwrap().to_string(), gen(&ip_opts(true, 9)).unwrap().to_string());
    }

    #[test]
    fn impossible_free_generation_reports() {
        let opts = GenOptions {
            sigma: Some(0),
            d: 1,
            n: 3,
            ..ip_opts(false, 0)
        };
        // with d = 1 and N = 3 some pair almost surely has inner product 0
        assert!(gen(&opts).is_err() || !solve_ip(&ip_instance(&gen(&opts).unwrap()).unwrap()).found());
    }

    #[test]
    fn protocol_run_reports() {
        let file = gen(&GenOptions { n: 2, d: 6, ..ip_opts(true, 1) }).unwrap();
        let out = protocol_run(&file, 2, None, 2, 5, false).unwrap();
        assert!(out.ok, "{}", out.report);
        assert!(out.report.contains("honest=1/1"));
        let none = protocol_run(&file, 2, Some(Strategy::EntryCorruption), 0, 5, false).unwrap();
        assert!(none.report.contains("adversarial: none"));
    }

    #[test]
    fn seed_derivation_separates_streams() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }

    #[test]
    fn sweep_header_and_rows() {
        let csv = sweep(&[1.0], &[1.0, 2.0], 1 << 16).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
        assert_eq!(lines.count(), 2);
    }
}
