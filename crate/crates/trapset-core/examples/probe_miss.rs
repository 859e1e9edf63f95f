use trapset_core::codes::random_regular;
use trapset_core::SubgraphProfile;

fn main() {
    let graph = random_regular(31, 24, 3, 9).unwrap();
    let miss: Vec<Vec<u32>> = vec![
        vec![2, 6, 10, 13, 19, 26],
        vec![4, 6, 13, 19, 24, 26],
        vec![5, 6, 13, 19, 26, 29],
    ];
    for s in &miss {
        let p = SubgraphProfile::of(&graph, s);
        println!("set {s:?} class ({}, {}) family {} elementary {}", p.a, p.b, p.family(), p.elementary());
        for &v in s {
            print!("  var {v}: checks {:?}\n", graph.var_checks(v));
        }
        // Reachability over subsets: bit i represents s[i].
        let k = s.len();
        let full = (1u32 << k) - 1;
        let mut reach = vec![false; 1 << k];
        let mut elem = vec![false; 1 << k];
        let mut bval = vec![u32::MAX; 1 << k];
        for mask in 1u32..=full {
            let vars: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            let p = SubgraphProfile::of(&graph, &vars);
            bval[mask as usize] = p.b;
            // Connectivity check through the profile if exposed; recompute by
            // union over shared checks.
            let mut comp = vec![0usize; vars.len()];
            for (i, c) in comp.iter_mut().enumerate() {
                *c = i;
            }
            fn find(comp: &mut Vec<usize>, i: usize) -> usize {
                let mut r = i;
                while comp[r] != r {
                    r = comp[r];
                }
                let mut i = i;
                while comp[i] != r {
                    let nxt = comp[i];
                    comp[i] = r;
                    i = nxt;
                }
                r
            }
            for i in 0..vars.len() {
                for j in i + 1..vars.len() {
                    let shares = graph
                        .var_checks(vars[i])
                        .iter()
                        .any(|c| graph.var_checks(vars[j]).contains(c));
                    if shares {
                        let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                        comp[a] = b;
                    }
                }
            }
            let connected = (0..vars.len()).all(|i| find(&mut comp, i) == find(&mut comp, 0));
            elem[mask as usize] = p.elementary() && connected && p.b <= 9;
        }
        // Seeds: elementary connected subsets. Grow by popcount order.
        let mut order: Vec<u32> = (1..=full).collect();
        order.sort_by_key(|m| m.count_ones());
        for &mask in &order {
            if elem[mask as usize] {
                reach[mask as usize] = true;
                continue;
            }
            if bval[mask as usize] > 9 {
                continue;
            }
            for i in 0..k {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let sub = mask & !(1 << i);
                if sub == 0 || !reach[sub as usize] {
                    continue;
                }
                // v must put >= 2 edges into checks adjacent to sub.
                let nb: Vec<u32> = (0..k)
                    .filter(|&j| sub >> j & 1 == 1)
                    .flat_map(|j| graph.var_checks(s[j]).to_vec())
                    .collect();
                let hits = graph
                    .var_checks(s[i])
                    .iter()
                    .filter(|c| nb.contains(c))
                    .count();
                if hits >= 2 {
                    reach[mask as usize] = true;
                    break;
                }
            }
        }
        println!("  reachable: {}", reach[full as usize]);
        // Which one-var-removed subsets are reachable, and the hit counts.
        for i in 0..k {
            let sub = full & !(1 << i);
            let vars: Vec<u32> = (0..k).filter(|&j| sub >> j & 1 == 1).map(|j| s[j]).collect();
            let p = SubgraphProfile::of(&graph, &vars);
            let nb: Vec<u32> = vars.iter().flat_map(|&v| graph.var_checks(v).to_vec()).collect();
            let hits = graph
                .var_checks(s[i])
                .iter()
                .filter(|c| nb.contains(c))
                .count();
            println!(
                "  minus {}: class ({},{}) elem {} reach {} | adjoin-back hits {}",
                s[i], p.a, p.b, p.elementary(), reach[sub as usize], hits
            );
        }
    }
}
