use std::time::Instant;

use trapset_core::bounds::range_lookup;
use trapset_core::codes::{random_regular, tanner_155};
use trapset_core::nets::{search_nets, NetsOptions};
use trapset_core::oracle::{compare_with_ledger, OracleCensus};
use trapset_core::search::{search_etsl, search_lets, LevelAction, SearchOptions};
use trapset_core::stopping::{search_stopping_sets, SsOptions};
use trapset_core::{Family, Girth, SubgraphProfile};

fn census_budget(n: usize, a_max: u32) -> u64 {
    let mut c: u128 = 1;
    for k in 1..=a_max as u128 {
        c = c * (n as u128 + 1 - k) / k;
    }
    (n as u128 * c).min(u64::MAX as u128) as u64
}

fn main() {
    let t_all = Instant::now();
    let mut audited = 0u64;
    let mut violations = 0u64;
    let mut total_mismatch = 0usize;
    for seed in 0..20u64 {
        let n = 24 + (seed as usize * 16) / 19;
        let m = (3 * n).div_ceil(4);
        let t0 = Instant::now();
        let graph = random_regular(n, m, 3, seed).unwrap();
        let g = match graph.girth() {
            Girth::Finite(g) => g,
            Girth::Unbounded => panic!("acyclic"),
        };
        let range = range_lookup(3, g).unwrap();
        let mut opts = SearchOptions::new(8, 9);
        opts.audit_stride = 1;
        let (lets, s1) = search_lets(&graph, &opts, |_, _| LevelAction::Continue).unwrap();
        let (etsl, s2) = search_etsl(&graph, &lets, &opts).unwrap();
        let mut seeds = lets.clone();
        seeds.merge(&etsl);
        let nets_cap = range.nets_a_max.min(8);
        for a in nets_cap + 1..=8 {
            seeds.drop_level(a);
        }
        let mut nopts = NetsOptions::new(nets_cap, 4, 9);
        nopts.audit_stride = 1;
        let nets = search_nets(&graph, &seeds, &nopts).unwrap();
        let ss_cap = range.ness_a_max.min(8);
        let sopts = SsOptions {
            a_max: ss_cap,
            bprime_max: 9,
            ness_b_max: 9,
            audit_stride: 1,
            deadline: None,
            symmetry: None,
        };
        let ss = search_stopping_sets(&graph, &sopts).unwrap();
        audited += s1.audited + s2.audited + nets.stats.audited + ss.stats.audited;
        violations +=
            s1.audit_violations + s2.audit_violations + nets.stats.audit_violations + ss.stats.audit_violations;
        let t_engine = t0.elapsed();

        let t1 = Instant::now();
        let census = OracleCensus::build(&graph, 8, census_budget(n, 8)).unwrap();
        let t_census = t1.elapsed();

        let mm_lets = compare_with_ledger(
            &census,
            &lets,
            2..=8,
            |e| e.is_lets() && e.b <= 9,
            |_, b| b <= 9,
            5,
        );
        let mm_etsl = compare_with_ledger(
            &census,
            &etsl,
            2..=8,
            |e| e.is_etsl() && e.b <= 9,
            |_, b| b <= 9,
            5,
        );
        let named = |f: Family| Family::NAMED.contains(&f);
        let mm_nets = compare_with_ledger(
            &census,
            &nets.reported,
            2..=nets_cap,
            |e| e.is_nets() && e.b <= 4 && named(e.family()),
            |row, b| {
                if b > 4 {
                    return false;
                }
                let vars: Vec<u32> = row.iter().map(|&v| v as u32).collect();
                named(SubgraphProfile::of(&graph, &vars).family())
            },
            5,
        );
        let mm_ss = compare_with_ledger(
            &census,
            &ss.sets,
            2..=ss_cap,
            |e| e.is_stopping(),
            |_, _| true,
            5,
        );
        let mm = mm_lets.len() + mm_etsl.len() + mm_nets.len() + mm_ss.len();
        total_mismatch += mm;
        println!(
            "seed {seed:2} n {n:2} m {m:2} g {g} visited {:9} engine {:6.2}s census {:6.2}s mm {mm} (l{} e{} n{} s{})",
            census.visited,
            t_engine.as_secs_f64(),
            t_census.as_secs_f64(),
            mm_lets.len(),
            mm_etsl.len(),
            mm_nets.len(),
            mm_ss.len()
        );
        if mm > 0 {
            for x in mm_lets.iter().chain(&mm_etsl).chain(&mm_nets).chain(&mm_ss).take(3) {
                println!("  ({},{}) engine_has={} vars={:?}", x.a, x.b, x.engine_has, x.vars);
            }
        }
    }
    println!(
        "sweep total {:.1}s mismatches {total_mismatch} audited {audited} violations {violations}",
        t_all.elapsed().as_secs_f64()
    );

    let t2 = Instant::now();
    let tanner = tanner_155();
    let mut topts = SearchOptions::new(8, 9);
    topts.audit_stride = 1;
    let (tl, ts1) = search_lets(&tanner, &topts, |_, _| LevelAction::Continue).unwrap();
    let (_te, ts2) = search_etsl(&tanner, &tl, &topts).unwrap();
    println!(
        "tanner a<=8 audit: lets audited {} viol {} | etsl audited {} viol {} | {:.1}s",
        ts1.audited,
        ts1.audit_violations,
        ts2.audited,
        ts2.audit_violations,
        t2.elapsed().as_secs_f64()
    );
}
