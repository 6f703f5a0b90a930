//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cflkit::cli::{build_pair, Deformation, DiskFamily};
use cflkit::filtration::{check_metric_filtration, is_pseudometric, minimax_filtration, normalize_filtration};
use cflkit::invariants::{nu, tau, upsilon, v_k};
use cflkit::library::{builtin, builtin_names, knot_names};
use cflkit::maps::{self, is_null_homotopic, null_homotopy, ChainMap, SwapVariant};
use cflkit::{DiskElement, KnotComplex, Monomial};

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn arc(name: &str) -> Arc<KnotComplex> {
    Arc::new(builtin(name).expect("built-in complex"))
}

/// Checks exact `τ` and the listed `V_k` values of a pair within a time budget.
fn pair_values(knot: &str, a: Deformation, b: Deformation, tau_expected: i64, vks: &[i64], budget: Duration) -> Outcome {
    let start = Instant::now();
    let (e1, e2) = e(build_pair(arc(knot), a, b))?;
    let t = e(tau(&e1, &e2))?;
    ensure(t == tau_expected, || format!("tau = {t}, expected {tau_expected}"))?;
    let got: Vec<i64> = e((0..vks.len() as i64).map(|k| v_k(&e1, &e2, k)).collect())?;
    ensure(got == vks, || format!("V_k = {got:?}, expected {vks:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(format!("tau = {t}, V = {got:?} in {elapsed:.2?}"))
}

fn criterion_slope() -> Outcome {
    let pairs = [
        ("figure8", Deformation::Id, Deformation::Roll(1)),
        ("T34", Deformation::Swap, Deformation::Id),
        ("T45", Deformation::Swap, Deformation::Id),
    ];
    let mut seen = Vec::new();
    for (knot, a, b) in pairs {
        let (e1, e2) = e(build_pair(arc(knot), a, b))?;
        let t = e(tau(&e1, &e2))?;
        let u = e(upsilon(&e1, &e2, Rational64::new(1, 32)))?;
        ensure(u == Rational64::new(t, 32), || format!("{knot}: upsilon(1/32) = {u}, tau = {t}"))?;
        seen.push(format!("{knot}: {u}"));
    }
    Ok(seen.join(", "))
}

fn criterion_roll_bound() -> Outcome {
    let mut out = Vec::new();
    for name in knot_names() {
        let c = arc(name);
        let (id, roll) = e(build_pair(c.clone(), Deformation::Id, Deformation::Roll(1)))?;
        let t = e(tau(&id, &roll))?;
        ensure(t <= 1, || format!("{name}: tau = {t}"))?;
        let upp = e(maps::phi_psi(&c))?.mul_monomial(Monomial::uhat(1));
        ensure(e(is_null_homotopic(&upp))?, || format!("{name}: U V phi psi is not null-homotopic"))?;
        out.push(format!("{name}:{t}"));
    }
    Ok(format!("tau(id, roll) = {}", out.join(" ")))
}

/// `f` is null-homotopic and the returned witness satisfies `∂H + H∂ = f`.
fn witnessed(f: &ChainMap) -> std::result::Result<bool, String> {
    match e(null_homotopy(f))? {
        Some(h) => Ok(e(h.commutator_with_differential().add(f))?.is_zero()),
        None => Ok(false),
    }
}

fn random_complex(rng: &mut ChaCha8Rng, pool: &[Arc<KnotComplex>]) -> cflkit::Result<KnotComplex> {
    let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    let first = pick(rng);
    let mut c = if rng.gen_bool(0.5) { first.dual() } else { (*first).clone() };
    for _ in 0..rng.gen_range(0..3) {
        let next = pick(rng);
        if c.len() * next.len() > 200 {
            break;
        }
        let next = if rng.gen_bool(0.5) { next.dual() } else { (*next).clone() };
        c = if rng.gen_bool(0.5) { c.tensor(&next)? } else { next.tensor(&c)? };
    }
    Ok(c)
}

fn structural_suites() -> Outcome {
    let mut count = 0usize;
    let all: Vec<Arc<KnotComplex>> = builtin_names().map(arc).collect();
    for c in &all {
        e(c.validate().map_err(|r| format!("{}: {r}", c.name())))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..200 {
        let c = e(random_complex(&mut rng, &all))?;
        e(c.validate().map_err(|r| format!("random complex {round} ({}): {r}", c.name())))?;
    }
    count += 1;

    for c in &all {
        let (phi, psi) = (e(maps::phi(c))?, e(maps::psi(c))?);
        ensure(phi.is_chain_map() && psi.is_chain_map(), || format!("{}: Leibniz fails", c.name()))?;
        ensure(witnessed(&e(phi.compose(&phi))?)?, || format!("{}: phi^2", c.name()))?;
        ensure(witnessed(&e(psi.compose(&psi))?)?, || format!("{}: psi^2", c.name()))?;
    }
    count += 1;

    let hopf = arc("hopf_neg_model");
    ensure(e(maps::phi_psi(&hopf))?.is_zero(), || "phi psi does not vanish on hopf_neg_model".into())?;
    count += 1;

    for name in knot_names() {
        let c = arc(name);
        if c.len() > 7 {
            continue;
        }
        let cc = Arc::new(e(c.tensor(&c))?);
        let roll = e(maps::roll_map(&cc, 1))?;
        for v in SwapVariant::ALL {
            let sw = e(maps::summand_swap_on(&c, &cc, v))?;
            let diff = e(e(sw.compose(&sw))?.add(&roll))?;
            ensure(witnessed(&diff)?, || format!("{name} {v:?}: swap^2 is not homotopic to id + phi psi"))?;
        }
    }
    count += 1;

    // Element families: (id, roll) on each knot, and swaps on the squares.
    let mut families: Vec<(String, Vec<(String, DiskElement)>)> = Vec::new();
    for name in knot_names() {
        let fam = e(DiskFamily::new(arc(name), false))?;
        let ds = [Deformation::Id, Deformation::Roll(1)];
        families.push((name.to_string(), e(ds.iter().map(|d| Ok((d.to_string(), fam.disk(*d)?))).collect::<cflkit::Result<_>>())?));
    }
    for name in ["T34", "T45"] {
        let fam = e(DiskFamily::new(arc(name), true))?;
        let ds = [Deformation::Id, Deformation::Roll(1), Deformation::Swap, Deformation::SwapVariant];
        families.push((format!("{name}#{name}"), e(ds.iter().map(|d| Ok((d.to_string(), fam.disk(*d)?))).collect::<cflkit::Result<_>>())?));
    }

    for (fname, elems) in &families {
        let g = elems[0].1.complex().max_alexander();
        for (i, (an, a)) in elems.iter().enumerate() {
            for (bn, b) in &elems[i + 1..] {
                let vs: Vec<i64> = e((0..=g + 5).map(|k| v_k(a, b, k)).collect())?;
                ensure(vs.windows(2).all(|w| w[0] >= w[1] && w[1] >= w[0] - 1), || format!("{fname} ({an},{bn}): V = {vs:?}"))?;
                ensure(*vs.last().unwrap() == 0, || format!("{fname} ({an},{bn}): V_(g+5) = {}", vs.last().unwrap()))?;
                let (t, n) = (e(tau(a, b))?, e(nu(a, b))?);
                ensure(t <= n && n <= t + 1, || format!("{fname} ({an},{bn}): tau = {t}, nu = {n}"))?;
            }
        }
    }
    count += 2;

    let eighth = Rational64::new(1, 8);
    for (fname, elems) in &families {
        let g = elems[0].1.complex().max_alexander();
        for (an, a) in elems {
            for (bn, b) in elems {
                for (cn, c) in elems {
                    let tag = || format!("{fname} ({an},{bn},{cn})");
                    let ultra = |f: &dyn Fn(&DiskElement, &DiskElement) -> cflkit::Result<Rational64>| -> std::result::Result<bool, String> {
                        Ok(e(f(a, c))? <= e(f(a, b))?.max(e(f(b, c))?))
                    };
                    ensure(ultra(&|x, y| tau(x, y).map(Rational64::from_integer))?, || format!("{}: tau", tag()))?;
                    ensure(ultra(&|x, y| upsilon(x, y, eighth))?, || format!("{}: upsilon(1/8)", tag()))?;
                    for k in 0..=g {
                        ensure(ultra(&|x, y| v_k(x, y, k).map(Rational64::from_integer))?, || format!("{}: V_{k}", tag()))?;
                    }
                }
            }
        }
    }
    count += 1;

    for name in ["T34", "T45"] {
        let fam = e(DiskFamily::new(arc(name), true))?;
        let id = e(fam.disk(Deformation::Id))?;
        let s1 = e(fam.disk(Deformation::Swap))?;
        let s2 = e(fam.disk(Deformation::SwapVariant))?;
        ensure(e(tau(&s1, &id))? == e(tau(&s2, &id))?, || format!("{name}: swap variants disagree on tau"))?;
        for k in 0..=4 {
            ensure(e(v_k(&s1, &id, k))? == e(v_k(&s2, &id, k))?, || format!("{name}: swap variants disagree on V_{k}"))?;
        }
    }
    count += 1;

    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for round in 0..100 {
        let f: Vec<Rational64> = (0..6).map(|_| Rational64::new(rng.gen_range(0..12), rng.gen_range(1..4))).collect();
        let edges: Vec<(usize, usize)> = (0..rng.gen_range(0..12)).map(|_| (rng.gen_range(0..6), rng.gen_range(0..6))).collect();
        let m = minimax_filtration(&f, &edges);
        e(check_metric_filtration(&m).map_err(|err| format!("matrix {round}: {err}")))?;
        let n = e(normalize_filtration(&m))?;
        ensure(is_pseudometric(&n), || format!("matrix {round}: not a pseudometric"))?;
    }
    count += 1;

    Ok(format!("{count} suites"))
}

fn run_cli(args: &[&str]) -> std::result::Result<Vec<u8>, String> {
    let out = e(Command::new(env!("CARGO_BIN_EXE_cflkit")).args(args).output())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn criterion_determinism() -> Outcome {
    let dir = e(tempfile::tempdir())?;
    let job = dir.path().join("job.json");
    let csv_path = dir.path().join("upsilon.csv");
    let job_json = serde_json::json!({
        "knot": "T34",
        "pair": ["swap", "id"],
        "invariants": ["tau", "tau_prime", "nu", "vk", "upsilon"],
        "k": [0, 3],
        "grid": 16,
        "csv": csv_path,
    });
    e(std::fs::write(&job, job_json.to_string()))?;
    let job_arg = job.to_str().ok_or("non-utf8 path")?;
    let mut json = Vec::new();
    let mut csv = Vec::new();
    for _ in 0..2 {
        json.push(run_cli(&["run", job_arg])?);
        csv.push(e(std::fs::read(&csv_path))?);
        e(std::fs::remove_file(&csv_path))?;
    }
    ensure(json[0] == json[1], || "job JSON differs between runs".into())?;
    ensure(csv[0] == csv[1], || "upsilon CSV differs between runs".into())?;
    let vk = [run_cli(&["vk", "--knot", "figure8", "--k", "0..3"])?, run_cli(&["vk", "--knot", "figure8", "--k", "0..3"])?];
    ensure(vk[0] == vk[1], || "vk output differs between runs".into())?;
    Ok(format!("{} bytes JSON, {} bytes CSV", json[0].len(), csv[0].len()))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "1 figure-eight (id, roll)",
            Box::new(|| pair_values("figure8", Deformation::Id, Deformation::Roll(1), 1, &[1, 0], Duration::from_secs(1))),
        ),
        (
            "2 T34#T34 (swap, id)",
            Box::new(|| pair_values("T34", Deformation::Swap, Deformation::Id, 2, &[1, 1, 0], Duration::from_secs(30))),
        ),
        (
            "3 T45#T45 (swap, id)",
            Box::new(|| pair_values("T45", Deformation::Swap, Deformation::Id, 3, &[2, 1, 1, 0], Duration::from_secs(300))),
        ),
        ("4 upsilon(1/32) = tau/32", Box::new(criterion_slope)),
        ("5 roll bound", Box::new(criterion_roll_bound)),
        ("6 structural suites", Box::new(structural_suites)),
        ("7 determinism", Box::new(criterion_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
