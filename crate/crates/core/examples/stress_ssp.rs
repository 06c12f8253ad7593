use std::time::Instant;
use strip3d::generate::{generate, Generator};
use strip3d::ssp::{run_3ssp, SspConfig};
use strip3d::rational::{int, rat, to_f64};
use strip3d::validate_packing;

fn main() {
    let t = Instant::now();
    let gens = [
        Generator::Uniform { n: 2000, lo: 0.01, hi: 0.08 },
        Generator::Uniform { n: 500, lo: 0.01, hi: 0.2 },
        Generator::HarmonicAdversarial { n: 1500, max_type: 14, eta: rat(1, 1000) },
        Generator::SquareBase { n: 1000, lo: 0.01, hi: 0.5 },
        Generator::GuillotineCut { height: 20, cuts: 600 },
    ];
    let configs = [(12u64, int(16)), (4, int(3)), (20, rat(3, 2)), (2, int(8))];
    let mut fails = 0;
    for seed in 0..10u64 {
        for g in &gens {
            for (k, c) in &configs {
                let inst = generate(g, seed).unwrap().instance;
                let config = SspConfig { k: *k, c: c.clone(), ..SspConfig::default() };
                let run = run_3ssp(&inst, &config).unwrap();
                let ok = validate_packing(&inst, &run.packing).unwrap().is_ok();
                let cert = &run.certificate;
                if !cert.holds() || !ok {
                    fails += 1;
                    println!("FAIL {} seed {seed} k {k} c {c}: slack {} minseg {} chain {}", g.name(),
                        to_f64(&cert.aggregate_slack), to_f64(&cert.min_segment_slack), cert.fbp_chain);
                }
            }
        }
    }
    println!("fails {fails} total {:?}", t.elapsed());
}
