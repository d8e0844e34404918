use ordtile::barriers::{divisibility_barrier, local_barrier, space_barrier, space_barrier_mirrored};
use ordtile::embed::{perfect_tiling_with, TilingOptions, TilingOutcome};
use ordtile::{catalog, compute_profile};

fn host_orders(h: usize) -> Vec<usize> {
    match h {
        2 | 3 => (1..).map(|m| m * h).take_while(|&n| n <= 18).collect(),
        4 => vec![8, 12, 16],
        6 => vec![12],
        _ => (2..).map(|m| m * h).take_while(|&n| n <= 18).collect(),
    }
}

#[test]
fn every_catalog_barrier_has_no_perfect_tiling() {
    let opts = TilingOptions::default();
    let mut checked = 0;
    for (name, pattern) in catalog::default_catalog() {
        let profile = compute_profile(&pattern);
        for n in host_orders(pattern.n()) {
            let mut certs = Vec::new();
            for ell in 1..profile.chi_lt {
                certs.push(space_barrier(&pattern, ell, n).unwrap());
                certs.push(space_barrier_mirrored(&pattern, ell, n).unwrap());
            }
            if profile.prop_b && n >= 2 * pattern.n() {
                certs.push(divisibility_barrier(&pattern, n).unwrap());
            }
            if (profile.prop_c_first || profile.prop_c_last) && n >= 2 * pattern.n() {
                certs.push(local_barrier(&pattern, n).unwrap());
            }
            for cert in certs {
                let outcome = perfect_tiling_with(&cert.graph, &pattern, &opts).outcome;
                assert_eq!(outcome, TilingOutcome::NoTiling, "{name} n={n} {}", cert.kind);
                assert!(
                    cert.graph.min_degree() as i64 >= cert.formula_value,
                    "{name} n={n} {}",
                    cert.kind
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 30, "{checked}");
}

#[test]
fn space_barrier_degree_is_pinned_to_formula() {
    // For h | n the layout gives exactly the stated bound, or one more when
    // ceil(alpha n / (ell h)) overshoots the part sizes.
    for (name, pattern) in catalog::default_catalog() {
        let chi = compute_profile(&pattern).chi_lt;
        for n in host_orders(pattern.n()) {
            for ell in 1..chi {
                let cert = space_barrier(&pattern, ell, n).unwrap();
                let delta = cert.graph.min_degree() as i64 - cert.formula_value;
                assert!((0..=1).contains(&delta), "{name} ell={ell} n={n}: delta {delta}");
            }
        }
    }
}
