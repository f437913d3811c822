//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::Instant;

use open_tr::algebra::{LaurentDifferential, Rational};
use open_tr::key::{CorrelatorKey, GenusIndex};
use open_tr::numbers::{extract_number, to_kp, IntersectionIndex};
use open_tr::oracle::{
    apply_lhat, apply_mhat, master_equation_residual, residual_report, solve_f, TMonomial, TPoly,
    TruncatedFreeEnergy,
};
use open_tr::q_refinement::{compute_q_correlator, structure_report, symmetry_report, SymmetryStatus};
use open_tr::recursion::{Correlator, CorrelatorStore, Flavor};
use open_tr::specialization::{principal_specialize, quantum_curve_report, QValue, UnstableDecomposition};

const BUDGET: u32 = 8;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Context) -> Outcome);

struct Context {
    store: CorrelatorStore,
    ws: Vec<std::sync::Arc<Correlator>>,
    f_oracle: TruncatedFreeEnergy,
    f_recursion: TruncatedFreeEnergy,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// `w(z_{p(1)}, .., z_{p(n)})` back in variables `z1..zn`.
fn permuted(w: &LaurentDifferential, perm: &[usize]) -> LaurentDifferential {
    let n = perm.len();
    let from: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    let tmp: Vec<String> = perm.iter().map(|p| format!("p{}", p + 1)).collect();
    let pairs: Vec<(&str, &str)> = from.iter().zip(&tmp).map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let renamed = w.rename(&pairs).unwrap();
    let back: Vec<(String, String)> = (1..=n).map(|i| (format!("p{i}"), format!("z{i}"))).collect();
    let pairs: Vec<(&str, &str)> = back.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let names: Vec<&str> = from.iter().map(String::as_str).collect();
    renamed.rename(&pairs).unwrap().reorder(&names).unwrap()
}

fn transpositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            out.push(p);
        }
    }
    out
}

fn dual_pipeline(cx: &Context) -> Outcome {
    for w in &cx.ws {
        let expect = cx.f_oracle.correlator_differential(w.key());
        ensure(&expect == w.value(), || format!("W{} differs from the constraint solution", w.key()))?;
    }
    Ok(format!("{} stable keys equal", cx.ws.len()))
}

fn symmetry(cx: &Context) -> Outcome {
    let mut checked = 0;
    for w in &cx.ws {
        let n = w.key().n as usize;
        let perms = if n <= 4 { permutations(n) } else { transpositions(n) };
        for p in perms {
            ensure(&permuted(w.value(), &p) == w.value(), || format!("W{} changes under {p:?}", w.key()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} permutations"))
}

fn constraints(cx: &Context) -> Outcome {
    for r in residual_report(&cx.f_recursion, 0..=4).map_err(|e| e.to_string())? {
        ensure(r.vanishes(), || format!("{}_{} leaves {} terms", r.operator, r.k, r.terms))?;
    }
    let empty = TruncatedFreeEnergy::empty(BUDGET);
    let l0 = apply_lhat(0, &empty).map_err(|e| e.to_string())?;
    let m0 = apply_mhat(0, &empty).map_err(|e| e.to_string())?;
    ensure(l0 == TPoly::constant(Rational::new(13, 8)), || format!("L^_0 on 0 is {l0}"))?;
    ensure(m0 == TPoly::constant(Rational::new(3, 4)), || format!("M^_0 on 0 is {m0}"))?;
    Ok("L^_k, M^_k for k = 0..4 vanish; sentinels 13/8 and 3/4".into())
}

fn master(cx: &Context) -> Outcome {
    for which in [2u8, 3] {
        let r = master_equation_residual(which, &cx.f_recursion).map_err(|e| e.to_string())?;
        ensure(r.is_zero(), || format!("residual {which} has {} terms", r.len()))?;
    }
    Ok("both residuals vanish".into())
}

fn homogeneity(cx: &Context) -> Outcome {
    for w in &cx.ws {
        let key = w.key();
        let n = key.n as usize;
        let twice = key.twice_genus() as i64;
        let poles = 3 * twice - 6 + 4 * n as i64;
        for (e, _) in w.value().terms() {
            let sum: i64 = e[..n].iter().map(|&x| x as i64).sum();
            ensure(sum == -poles, || format!("W{key} term {e:?}"))?;
        }
        let weight = 3 * twice - 6 + 3 * n as i64;
        for (m, _) in cx.f_recursion.component(key).terms() {
            ensure(m.weight() == weight && m.degree() == n, || format!("F{key} monomial {m}"))?;
        }
    }
    Ok("every W and F term has the expected degree".into())
}

fn anchors(cx: &Context) -> Outcome {
    let tau0 = extract_number(&cx.store, BUDGET, &IntersectionIndex::new(GenusIndex::from_twice(0), vec![0; 3], vec![]))
        .map_err(|e| e.to_string())?;
    ensure(tau0.value == Rational::one(), || format!("<tau0^3>_0 = {}", tau0.value))?;

    let graded = CorrelatorStore::new(Flavor::QGraded);
    let q11 = compute_q_correlator(&graded, CorrelatorKey::new(2, 1)).map_err(|e| e.to_string())?;
    let closed = q11.q_polynomial(&[-4]).coefficient(0) / Rational::from(3);
    ensure(closed == Rational::new(1, 24), || format!("closed <tau1>_1 = {closed}"))?;

    let kp = to_kp(cx.f_recursion.poly());
    let t0 = kp.coefficient(&[1, 1, 1]) * Rational::from(6);
    let s0 = kp.coefficient(&[2, 2, 2]) * Rational::from(6);
    ensure(t0 == Rational::one(), || format!("<tau0^3>_0 from (T, S) = {t0}"))?;
    ensure(s0 == Rational::one(), || format!("<sigma0^3>_1/2 = {s0}"))?;
    Ok("<tau0^3>_0 = 1, closed <tau1>_1 = 1/24, <sigma0^3>_1/2 = 1".into())
}

fn quantum_curve(cx: &Context) -> Outcome {
    let order = 2;
    let psi = principal_specialize(&cx.f_oracle, order, UnstableDecomposition::ScaledCubic).map_err(|e| e.to_string())?;
    let at_one = quantum_curve_report(&psi, &QValue::Value(Rational::one())).map_err(|e| e.to_string())?;
    ensure(at_one.all_vanish() && at_one.strata.len() == 4, || format!("Q = 1: {at_one:?}"))?;
    let symbolic = quantum_curve_report(&psi, &QValue::Symbolic).map_err(|e| e.to_string())?;
    ensure(symbolic.strata[0].vanishes, || format!("semiclassical stratum: {:?}", symbolic.strata[0]))?;

    let mut mutated = cx.f_oracle.clone();
    let m = TMonomial::from_indices(&[1, 2]);
    let c = mutated.coefficient(&m) + Rational::one();
    mutated.insert(m, c).map_err(|e| e.to_string())?;
    let psi = principal_specialize(&mutated, order, UnstableDecomposition::ScaledCubic).map_err(|e| e.to_string())?;
    let r = quantum_curve_report(&psi, &QValue::Value(Rational::one())).map_err(|e| e.to_string())?;
    ensure(!r.all_vanish(), || "mutated F still solves the curve".into())?;
    Ok("Q = 1 strata through hbar order 2 vanish; symbolic y^3 - 2xy = 0; mutation detected".into())
}

fn q_structure(cx: &Context) -> Outcome {
    let graded = CorrelatorStore::new(Flavor::QGraded);
    let mut witness = None;
    for base in &cx.ws {
        let key = base.key();
        let q = compute_q_correlator(&graded, key).map_err(|e| e.to_string())?;
        ensure(q.at(&Rational::one()) == *base.value(), || format!("Q{key} at Q = 1 differs"))?;
        let deg = q.q_degree().unwrap_or(0);
        ensure(deg >= 0 && deg as u32 <= key.twice_genus(), || format!("Q{key} has Q-degree {deg}"))?;
        ensure(structure_report(&q, base).holds(), || format!("Q{key} structure"))?;
        let s = symmetry_report(&q);
        if witness.is_none() && key.complexity() >= 3 && s.status == SymmetryStatus::Asymmetric {
            witness = Some(key);
        }
    }
    let key = witness.ok_or("no asymmetric key with 2g - 2 + n >= 3")?;
    Ok(format!("Q = 1 reduction and degree bound hold; asymmetric at {key}"))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["open-tr"];
    full.extend_from_slice(args);
    match open_tr::cli::run(full, &mut out, &mut err) {
        0 => Ok(out),
        code => Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err))),
    }
}

fn determinism(_cx: &Context) -> Outcome {
    let dir = std::env::temp_dir().join(format!("open-tr-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let cache = dir.to_str().unwrap().to_string();
    for what in ["correlators", "numbers", "q-correlators"] {
        let base = ["--budget", "7", "export", "--what", what, "--format", "json"];
        let with_cache = |threads: Option<&str>| {
            let mut a: Vec<&str> = base.to_vec();
            a.extend(["--cache-dir", cache.as_str()]);
            if let Some(t) = threads {
                a.extend(["--threads", t]);
            }
            cli(&a)
        };
        let cold = with_cache(Some("1"))?;
        let warm = with_cache(None)?;
        ensure(cold == warm, || format!("{what}: cold and warm exports differ"))?;
        let mut seq = base.to_vec();
        seq.extend(["--threads", "1"]);
        ensure(cli(&seq)? == cli(&base)?, || format!("{what}: sequential and parallel exports differ"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("exports identical across cache state and thread count".into())
}

fn main() {
    let start = Instant::now();
    let store = CorrelatorStore::new(Flavor::Baseline);
    let ws = store.ensure_budget(BUDGET).expect("recursion");
    let f_oracle = solve_f(BUDGET).expect("constraint solver");
    let f_recursion =
        TruncatedFreeEnergy::from_correlators(BUDGET, ws.iter().map(|w| (w.key(), w.value()))).expect("F from W");
    let cx = Context {
        store,
        ws,
        f_oracle,
        f_recursion,
    };
    println!("setup at budget {BUDGET}: {:.1}s", start.elapsed().as_secs_f64());

    let criteria: [Criterion; 9] = [
        ("dual-pipeline equivalence", dual_pipeline),
        ("permutation symmetry", symmetry),
        ("constraint annihilation", constraints),
        ("master equations", master),
        ("homogeneity", homogeneity),
        ("anchored values", anchors),
        ("quantum curve", quantum_curve),
        ("Q-refinement structure", q_structure),
        ("determinism and caching", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = check(&cx);
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS {} {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
