//! Acceptance suite: one PASS/FAIL line per criterion, with timing.
//!
//! Runs as a plain binary (`harness = false`) so the report is always shown.

use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strip3d::aptas::{
    enumerate_patterns, mnfdh_pack, sandwich, solve_restricted, PatternLimits, Region,
    RestrictedInstance,
};
use strip3d::binpack::{aptas_bp, exact_bp, solve_fbp, SizeProfile};
use strip3d::generate::{generate, guillotine_rectangles, Generator};
use strip3d::harmonic::{f_k, make_g, t_k, DualFeasibleFn};
use strip3d::oracle::{exact_strip_opt, SearchBudget};
use strip3d::rational::{int, rat, to_f64};
use strip3d::ssp::{run_3ssp, Backend, SspConfig};
use strip3d::{validate_packing, Instance, Packing, Rational};

static VALIDATED: AtomicUsize = AtomicUsize::new(0);
static INVALID: AtomicUsize = AtomicUsize::new(0);

fn valid(instance: &Instance, packing: &Packing) -> bool {
    let ok = validate_packing(instance, packing).map(|r| r.is_ok()).unwrap_or(false);
    VALIDATED.fetch_add(1, Ordering::Relaxed);
    if !ok {
        INVALID.fetch_add(1, Ordering::Relaxed);
    }
    ok
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- 1

/// `T_k` as the supremum of `sum f_k` over item multisets of total size at
/// most 1: items of type `t < k` just above `1/(t+1)`, the rest filled with
/// type-`k` items at slope `k/(k-1)`. Branch and bound over the counts.
fn t_k_oracle(k: u64) -> Rational {
    let slope = rat(k as i64, k as i64 - 1);
    fn rec(
        t: u64,
        k: u64,
        used: &Rational,
        value: &Rational,
        slope: &Rational,
        best: &mut Rational,
    ) {
        let total = value + slope * (Rational::one() - used);
        if total > *best {
            *best = total.clone();
        }
        if t >= k {
            return;
        }
        // Density per unit size of type t over the slope, nonincreasing in t.
        let gain = rat(1, t as i64) - slope * rat(1, t as i64 + 1);
        if gain <= Rational::zero() {
            return;
        }
        let density = &gain * Rational::from_integer((t + 1).into());
        if &total + &density * (Rational::one() - used) <= *best {
            return;
        }
        let size = rat(1, t as i64 + 1);
        let room = Rational::one() - used;
        // Largest n with n * size < room.
        let mut n = (&room / &size).ceil().to_integer();
        n -= 1;
        let mut n: i64 = n.try_into().unwrap();
        while n >= 0 {
            let nn = Rational::from_integer(n.into());
            rec(
                t + 1,
                k,
                &(used + &size * &nn),
                &(value + rat(1, t as i64) * &nn),
                slope,
                best,
            );
            n -= 1;
        }
    }
    let mut best = Rational::zero();
    rec(1, k, &Rational::zero(), &Rational::zero(), &slope, &mut best);
    best
}

fn c1_constants() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, want) in [(2, rat(2, 1)), (3, rat(7, 4)), (7, rat(61, 36))] {
        let got = t_k(k).unwrap();
        ok &= got == want;
        notes.push(format!("T_{k}={got}"));
    }
    for k in [2, 3, 7, 42, 43] {
        let got = t_k(k).unwrap();
        let oracle = t_k_oracle(k);
        if got != oracle {
            ok = false;
            notes.push(format!("T_{k}: {got} != oracle {oracle}"));
        }
    }
    for k in [1806, 1807, 1900] {
        let v = to_f64(&t_k(k).unwrap());
        ok &= (v - 1.69103).abs() < 1e-4;
        notes.push(format!("T_{k}~{v:.6}"));
    }
    verdict(ok, notes.join(" "))
}

// ---------------------------------------------------------------- 2

/// Units per stick: divisible by every integer up to 16.
const STICK: i64 = 720_720_000;

fn stick(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut out = Vec::new();
    if rng.gen_bool(0.5) {
        // Pieces just above 1/(t+1), then the remainder.
        let mut rest = Rational::one();
        for _ in 0..40 {
            let t: i64 = rng.gen_range(1..=60);
            let x = rat(1, t + 1) + rat(1, 100_000);
            if x <= rest {
                rest -= &x;
                out.push(x);
            }
        }
        if rest > Rational::zero() {
            out.push(rest);
        }
    } else {
        let mut rest = STICK;
        while rest > 0 && out.len() < 40 {
            let x = rng.gen_range(1..=rest);
            rest -= x;
            out.push(rat(x, STICK));
        }
    }
    out
}

fn c2_stick_breaking() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for k in [3u64, 10, 50] {
        let tk = t_k(k).unwrap();
        for _ in 0..10_000 {
            let xs = stick(&mut rng);
            let s: Rational = xs.iter().map(|x| f_k(x, k).unwrap()).sum();
            if s > tk {
                return verdict(false, format!("k={k}: sum {s} > T_k {tk} for {xs:?}"));
            }
            worst = worst.max(to_f64(&(&s / &tk)));
        }
    }
    verdict(true, format!("30000 sequences, max sum/T_k = {worst:.6}"))
}

// ---------------------------------------------------------------- 3

fn c3_two_dim() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut fns: Vec<DualFeasibleFn> = vec![DualFeasibleFn::Identity];
    for k in [2, 3, 7, 12] {
        fns.push(DualFeasibleFn::harmonic_scaled(k).unwrap());
    }
    for _ in 0..3 {
        let sizes: Vec<Rational> = (0..15).map(|_| rat(rng.gen_range(5..=70), 100)).collect();
        let sol = solve_fbp(&SizeProfile::from_sizes(&sizes).unwrap()).unwrap();
        fns.push(make_g(&sol.dual).unwrap());
    }
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let cuts = rng.gen_range(0..30);
        let mut rects = guillotine_rectangles(&mut rng, cuts);
        // A random subset is still packable.
        rects.retain(|_| rng.gen_bool(0.85));
        for f1 in &fns {
            for f2 in &fns {
                let s: Rational = rects.iter().map(|((l, w), _)| f1.eval(l) * f2.eval(w)).sum();
                if s > Rational::one() {
                    return verdict(false, format!("{} x {}: sum {s} > 1", f1.name(), f2.name()));
                }
                worst = worst.max(to_f64(&s));
            }
        }
    }
    verdict(true, format!("1000 sets x {} pairs, max sum = {worst:.6}", fns.len() * fns.len()))
}

// ---------------------------------------------------------------- 4

fn mixed_instance(rng: &mut ChaCha8Rng, seed: u64) -> Instance {
    let n = if rng.gen_bool(0.2) { 2000 } else { rng.gen_range(1..=800) };
    let g = match rng.gen_range(0..4) {
        0 => Generator::Uniform { n, lo: 0.01, hi: 1.0 },
        1 => Generator::HarmonicAdversarial {
            n,
            max_type: rng.gen_range(1..=20),
            eta: rat(1, 1000),
        },
        2 => Generator::SquareBase { n, lo: 0.01, hi: 0.9 },
        _ => Generator::GuillotineCut {
            height: rng.gen_range(1..=20),
            cuts: n,
        },
    };
    generate(&g, seed).unwrap().instance
}

fn c4_certificate() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let configs = [
        (int(16), 12, Backend::Ffd),
        (int(4), 5, Backend::Ffd),
        (int(2), 3, Backend::Ffd),
        (rat(5, 2), 20, Backend::Ffd),
        (int(8), 8, Backend::Aptas),
    ];
    let mut min_slack: Option<Rational> = None;
    let mut min_seg: Option<Rational> = None;
    for run in 0..500u64 {
        let inst = mixed_instance(&mut rng, run);
        let (c, k, backend) = configs[run as usize % configs.len()].clone();
        let config = SspConfig {
            c,
            k,
            backend,
            epsilon: rat(1, 4),
        };
        let r = run_3ssp(&inst, &config).unwrap();
        let cert = &r.certificate;
        if !valid(&inst, &r.packing) {
            return verdict(false, format!("run {run}: invalid packing"));
        }
        if !cert.holds() {
            return verdict(
                false,
                format!("run {run}: slack {} min segment slack {}", cert.aggregate_slack, cert.min_segment_slack),
            );
        }
        let s = cert.aggregate_slack.clone();
        min_slack = Some(min_slack.map_or(s.clone(), |m| m.min(s)));
        let m = cert.min_segment_slack.clone();
        min_seg = Some(min_seg.map_or(m.clone(), |x| x.min(m)));
    }
    verdict(
        true,
        format!(
            "500 runs, min aggregate slack {:.4}, min segment slack {:.4}",
            to_f64(&min_slack.unwrap()),
            to_f64(&min_seg.unwrap())
        ),
    )
}

// ---------------------------------------------------------------- 5

fn c5_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let configs = [(int(16), 12u64), (int(2), 3), (int(3), 5), (rat(3, 2), 2)];
    let budget = SearchBudget::strip();
    let mut worst = 0.0f64;
    for run in 0..200usize {
        let n = rng.gen_range(1..=4);
        let denom = [4i64, 5, 10, 20][run % 4];
        let inst = Instance::from_dims((0..n).map(|_| {
            (
                rat(rng.gen_range(1..=denom), denom),
                rat(rng.gen_range(1..=denom), denom),
                rat(rng.gen_range(1..=denom), denom),
            )
        }))
        .unwrap();
        let (opt, witness) = exact_strip_opt(&inst, &budget).unwrap();
        if !valid(&inst, &witness) {
            return verdict(false, format!("run {run}: invalid oracle witness"));
        }
        let (c, k) = configs[run % configs.len()].clone();
        let r = run_3ssp(&inst, &SspConfig { c, k, ..SspConfig::default() }).unwrap();
        if !valid(&inst, &r.packing) {
            return verdict(false, format!("run {run}: invalid packing"));
        }
        let cert = &r.certificate;
        let tk = t_k(k).unwrap();
        if cert.modified_volume > &tk * &opt {
            return verdict(false, format!("run {run}: W {} > T_k OPT {}", cert.modified_volume, &tk * &opt));
        }
        if cert.packed_height < opt || cert.height < opt {
            return verdict(false, format!("run {run}: A {} < OPT {opt}", cert.packed_height));
        }
        worst = worst.max(to_f64(&(&cert.modified_volume / (&tk * &opt))));
    }
    verdict(true, format!("200 instances, max W/(T_k OPT) = {worst:.4}"))
}

// ---------------------------------------------------------------- 6

fn c6_bin_packing() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let eps = rat(3, 10);
    let mut c_exact = f64::NEG_INFINITY;
    let mut c_aptas = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let sizes: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=100), 100)).collect();
        let profile = SizeProfile::from_sizes(&sizes).unwrap();
        let fbp = solve_fbp(&profile).unwrap().objective;
        let opt = exact_bp(&profile).unwrap() as f64;
        let a = aptas_bp(&sizes, &eps).unwrap().bins.len() as f64;
        if opt + 1e-9 < fbp {
            return verdict(false, format!("exact {opt} below fractional {fbp}"));
        }
        c_exact = c_exact.max(opt - 1.3 * fbp);
        c_aptas = c_aptas.max(a - 1.3 * fbp);
    }
    verdict(
        c_exact <= 3.0,
        format!("measured C = {c_exact:.4} (exact), {c_aptas:.4} (approximation scheme output)"),
    )
}

// ---------------------------------------------------------------- 7

fn c7_layers() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_margin = f64::INFINITY;
    let mut with_leftovers = 0;
    for run in 0..100 {
        let a = rat(rng.gen_range(30..=100), 100);
        let b = rat(rng.gen_range(30..=100), 100);
        let c = rat(rng.gen_range(100..=300), 100);
        let delta = rat(rng.gen_range(3..=20), 100).min(a.clone().min(b.clone()));
        let dmax: i64 = (&delta * int(100)).to_integer().try_into().unwrap();
        let region = Region {
            origin: [int(0), int(0), int(0)],
            length: a.clone(),
            width: b.clone(),
            height: Some(c.clone()),
        };
        let cap = &a * &b * &c;
        let mut dims = Vec::new();
        let mut vol = Rational::zero();
        let square = run % 2 == 0;
        while vol < &cap * rat(3, 2) {
            let l = rat(rng.gen_range(1..=dmax), 100);
            let w = if square { l.clone() } else { rat(rng.gen_range(1..=dmax), 100) };
            let h = rat(rng.gen_range(1..=100), 100);
            vol += &l * &w * &h;
            dims.push((l, w, h));
        }
        let inst = Instance::from_dims(dims).unwrap();
        let r = mnfdh_pack(inst.boxes(), &region, &delta).unwrap();
        if r.leftovers.is_empty() {
            return verdict(false, format!("run {run}: no leftovers"));
        }
        with_leftovers += 1;
        let ids: Vec<usize> = r.placements.iter().map(|p| p.box_id).collect();
        let sub = inst.subset(&ids).unwrap();
        let packed = Packing::from_placements(&sub, r.placements).unwrap();
        if !valid(&sub, &packed) {
            return verdict(false, format!("run {run}: invalid packing"));
        }
        let bound = (&a - &delta) * (&b - &delta) * (&c - int(1));
        if r.packed_volume < bound {
            return verdict(
                false,
                format!("run {run}: packed {} < bound {} (a={a}, b={b}, c={c}, delta={delta})", r.packed_volume, bound),
            );
        }
        min_margin = min_margin.min(to_f64(&(&r.packed_volume - &bound)));
    }
    verdict(true, format!("{with_leftovers} runs with leftovers, min margin {min_margin:.4}"))
}

// ---------------------------------------------------------------- 8

fn c8_restricted() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let limits = PatternLimits::default();
    let budget = SearchBudget::strip();
    let mut compared = 0;
    let mut worst_add = f64::NEG_INFINITY;
    for run in 0..50 {
        let k = rng.gen_range(1..=4usize);
        let mut sides: Vec<Rational> = Vec::new();
        while sides.len() < k {
            let s = rat(rng.gen_range(25..=80), 100);
            if !sides.contains(&s) {
                sides.push(s);
            }
        }
        let n = if run % 2 == 0 { rng.gen_range(k..=4.max(k)) } else { rng.gen_range(10..=40) };
        let inst = Instance::from_dims((0..n).map(|j| {
            let s = if j < k { sides[j].clone() } else { sides[rng.gen_range(0..k)].clone() };
            (s.clone(), s, rat(rng.gen_range(5..=100), 100))
        }))
        .unwrap();
        let ri = RestrictedInstance::from_boxes(inst.boxes()).unwrap();
        let kk = ri.sizes.len() as f64;
        let pats = enumerate_patterns(&ri.sizes, &limits).unwrap();
        let rp = solve_restricted(&ri, &pats).unwrap();
        let packing = Packing::from_placements(&inst, rp.placements.clone()).unwrap();
        if !valid(&inst, &packing) {
            return verdict(false, format!("run {run}: invalid packing"));
        }
        let h = to_f64(&rp.height);
        if h > rp.lin + 2.0 * kk + 1e-9 {
            return verdict(false, format!("run {run}: height {h} > lin {} + 2K", rp.lin));
        }
        if rp.support > ri.sizes.len() {
            return verdict(false, format!("run {run}: support {} > K", rp.support));
        }
        worst_add = worst_add.max(h - rp.lin);
        if inst.len() <= 4 {
            let (opt, _) = exact_strip_opt(&inst, &budget).unwrap();
            if rp.lin > to_f64(&opt) + 1e-7 {
                return verdict(false, format!("run {run}: lin {} > OPT {opt}", rp.lin));
            }
            compared += 1;
        }
    }
    verdict(
        true,
        format!("50 instances, {compared} oracle comparisons, max height - lin = {worst_add:.4}"),
    )
}

// ---------------------------------------------------------------- 9

fn c9_sandwich() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let limits = PatternLimits::default();
    let tol = 1e-7;
    let mut chained = 0;
    for run in 0..30 {
        let n = rng.gen_range(4..=14);
        let inst = Instance::from_dims((0..n).map(|_| {
            let s = rat(rng.gen_range(25..=90), 100);
            (s.clone(), s, rat(rng.gen_range(5..=100), 100))
        }))
        .unwrap();
        let k = rng.gen_range(2..=5);
        let s = sandwich(inst.boxes(), k, &limits).unwrap();
        if s.inf_prime > s.sup_prime + tol || s.sup_prime > s.inf_prime + s.slice_height + tol {
            return verdict(false, format!("run {run}: {s:?}"));
        }
        if let Some(lin) = s.original {
            if s.inf_prime > lin + tol || lin > s.sup_prime + tol {
                return verdict(false, format!("run {run}: lin(I) out of order: {s:?}"));
            }
            chained += 1;
        }
    }
    verdict(true, format!("30 instances, {chained} with lin(I) in between"))
}

// ---------------------------------------------------------------- 10

fn c10_end_to_end() -> Verdict {
    let config = SspConfig::default();
    let ck = to_f64(&config.c) * config.k as f64;
    let factor = to_f64(&(&config.c / (&config.c - int(1)))) * to_f64(&t_k(config.k).unwrap());
    let mut notes = Vec::new();
    let mut ok = true;
    for h in [10u32, 50] {
        for seed in 0..3 {
            let g = generate(&Generator::GuillotineCut { height: h, cuts: 60 * h as usize }, seed).unwrap();
            let r = run_3ssp(&g.instance, &config).unwrap();
            ok &= valid(&g.instance, &r.packing);
            ok &= valid(&g.instance, g.witness.as_ref().unwrap());
            let ratio = to_f64(&r.certificate.height) / h as f64;
            let packed = to_f64(&r.certificate.packed_height) / h as f64;
            let bound = factor + 10.0 * ck / h as f64;
            ok &= ratio <= bound;
            notes.push(format!("H={h}/s{seed}: A/H={ratio:.3} (top {packed:.3}) <= {bound:.1}"));
        }
    }
    verdict(ok, notes.join("; "))
}

// ---------------------------------------------------------------- 11

fn c11_validity() -> Verdict {
    // Square pipeline packings, on top of the ones validated above.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..10 {
        let g = generate(&Generator::SquareBase { n: rng.gen_range(1..=80), lo: 0.01, hi: 0.9 }, seed).unwrap();
        let run = strip3d::aptas::run_square_aptas(&g.instance, &strip3d::aptas::AptasConfig::default()).unwrap();
        valid(&g.instance, &run.packing);
    }
    let n = VALIDATED.load(Ordering::Relaxed);
    let bad = INVALID.load(Ordering::Relaxed);
    verdict(bad == 0 && n > 0, format!("{n} packings validated, {bad} invalid"))
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, u64, fn() -> Verdict);
    let criteria: [Criterion; 11] = [
        (1, "harmonic constants", 1, c1_constants),
        (2, "one-dimensional harmonic weights", 5, c2_stick_breaking),
        (3, "two-dimensional weight products", 10, c3_two_dim),
        (4, "modified-volume certificate", 120, c4_certificate),
        (5, "oracle comparison", 300, c5_oracle),
        (6, "bin packing additive constant", 120, c6_bin_packing),
        (7, "layer packing volume guarantee", 30, c7_layers),
        (8, "restricted instance realization", 120, c8_restricted),
        (9, "rounding sandwich", 60, c9_sandwich),
        (10, "end-to-end guillotine ratio", 60, c10_end_to_end),
        (11, "universal validity", 60, c11_validity),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let v = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {id:>2} {name} ({:.2}s / {limit}s{}): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if in_time { "" } else { ", over time" },
            v.detail
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
