//! The invariant battery behind `verify-suite`: runs every cross-check the
//! library supports against a catalog of patterns and collects the outcomes.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::barriers::{self, BarrierCertificate};
use crate::bottle::{bottlegraph, constructive_blowup_tiling, interval_labelings};
use crate::crop::{crop, satisfies_block_order, satisfies_size_bound};
use crate::embed::{perfect_tiling_with, reference, verify_tiling, TilingOptions, TilingOutcome};
use crate::graph::OrderedGraph;
use crate::probe::random_ordered_graph;
use crate::profile::{alpha_minus_seq, alpha_plus_seq, compute_profile, interval_chromatic_number_exhaustive, Case};
use crate::Rational;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("nothing to verify: the catalog is empty")]
    EmptyCatalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteLimits {
    /// Largest host on which the tiling oracle is run for confirmation.
    pub oracle_max_n: usize,
    /// Largest host for barrier constructions.
    pub barrier_max_n: usize,
    /// Largest host for the oracle-vs-naive comparison.
    pub naive_max_n: usize,
    /// Largest pattern order for the exhaustive chi_< check.
    pub exhaustive_chi_max_h: usize,
    pub random_hosts: usize,
    pub crop_trials: usize,
    pub budget: u64,
    pub jobs: usize,
    pub seed: u64,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        Self {
            oracle_max_n: 18,
            barrier_max_n: 12,
            naive_max_n: 10,
            exhaustive_chi_max_h: 16,
            random_hosts: 50,
            crop_trials: 200,
            budget: crate::embed::DEFAULT_BUDGET,
            jobs: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum CheckOutcome {
    Pass,
    Fail(String),
    Skipped(String),
}

impl CheckOutcome {
    fn from_bool(ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail(why())
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, CheckOutcome::Fail(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub pattern: String,
    pub parameters: String,
    pub outcome: CheckOutcome,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.outcome.is_fail())
    }

    pub fn notices(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks
            .iter()
            .filter(|c| matches!(c.outcome, CheckOutcome::Skipped(_)))
    }
}

struct Recorder {
    checks: Vec<CheckRecord>,
}

impl Recorder {
    fn run(&mut self, check: &str, pattern: &str, parameters: String, f: impl FnOnce() -> CheckOutcome) {
        let start = Instant::now();
        let outcome = f();
        self.checks.push(CheckRecord {
            check: check.to_string(),
            pattern: pattern.to_string(),
            parameters,
            outcome,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
}

pub fn verify_suite(catalog: &[(String, OrderedGraph)], limits: &SuiteLimits) -> Result<SuiteReport, SuiteError> {
    if catalog.is_empty() {
        return Err(SuiteError::EmptyCatalog);
    }
    let mut rec = Recorder { checks: Vec::new() };
    let opts = TilingOptions {
        budget: limits.budget,
        jobs: limits.jobs,
    };
    for (index, (name, pattern)) in catalog.iter().enumerate() {
        profile_checks(&mut rec, name, pattern, limits);
        barrier_checks(&mut rec, name, pattern, limits, &opts);
        bottle_checks(&mut rec, name, pattern, limits, &opts);
        oracle_checks(
            &mut rec,
            name,
            pattern,
            limits,
            &opts,
            limits.seed.wrapping_add(index as u64),
        );
    }
    crop_checks(&mut rec, limits);
    let passed = !rec.checks.iter().any(|c| c.outcome.is_fail());
    Ok(SuiteReport {
        checks: rec.checks,
        passed,
    })
}

fn profile_checks(rec: &mut Recorder, name: &str, pattern: &OrderedGraph, limits: &SuiteLimits) {
    let h = pattern.n();
    let profile = compute_profile(pattern);

    rec.run("profile.mirror_duality", name, String::new(), || {
        let mirror = pattern.mirror();
        let plus_m = alpha_plus_seq(&mirror);
        let minus = alpha_minus_seq(pattern);
        let pointwise = plus_m.len() == minus.len() && plus_m.iter().zip(&minus).all(|(a, b)| *a == h + 1 - *b);
        let other = compute_profile(&mirror);
        CheckOutcome::from_bool(
            pointwise && other.alpha_star().ok() == profile.alpha_star().ok() && other.case == profile.case,
            || format!("alpha+ of mirror {plus_m:?} vs alpha- {minus:?}"),
        )
    });

    rec.run("profile.chi_exhaustive", name, format!("h={h}"), || {
        if h > limits.exhaustive_chi_max_h {
            return CheckOutcome::Skipped(format!("h = {h} above limit"));
        }
        let exhaustive = interval_chromatic_number_exhaustive(pattern);
        CheckOutcome::from_bool(exhaustive == profile.chi_lt, || {
            format!("greedy {} vs exhaustive {exhaustive}", profile.chi_lt)
        })
    });

    rec.run("profile.property_a", name, String::new(), || {
        match profile.alpha_star() {
            Ok(a) => CheckOutcome::from_bool(profile.prop_a == (a > Rational::new(1, 2)), || {
                format!("Property A = {} but alpha* = {a}", profile.prop_a)
            }),
            Err(_) => CheckOutcome::Skipped("alpha* undefined for an edgeless pattern".into()),
        }
    });

    rec.run("profile.endpoint_edge", name, String::new(), || {
        if h < 2 || !(pattern.has_edge(1, 2) || pattern.has_edge(h - 1, h)) {
            return CheckOutcome::Skipped("no edge 12 or (h-1)h".into());
        }
        let expected = Rational::new(1, h as i64);
        CheckOutcome::from_bool(profile.alpha_star().ok() == Some(expected), || {
            format!("alpha* = {:?}, expected {expected}", profile.alpha_star().ok())
        })
    });

    rec.run("profile.classification", name, String::new(), || {
        if profile.chi_lt != 2 {
            return CheckOutcome::Skipped(format!("chi_< = {}: unclassified", profile.chi_lt));
        }
        let (Some(case), Some(coeff), Ok(a)) = (profile.case, profile.threshold_coeff, profile.alpha_star()) else {
            return CheckOutcome::Fail("chi_< = 2 but no classification".into());
        };
        let expected = match case {
            Case::I | Case::IV => Rational::from_integer(1) - a,
            Case::II | Case::III => Rational::new(1, 2),
        };
        let case_ok = match case {
            Case::I => !profile.prop_a,
            Case::II => profile.prop_a && profile.prop_b,
            Case::III => profile.prop_a && !profile.prop_b && (profile.prop_c_first || profile.prop_c_last),
            Case::IV => profile.prop_a && !profile.prop_b && !profile.prop_c_first && !profile.prop_c_last,
        };
        CheckOutcome::from_bool(case_ok && coeff == expected, || {
            format!("case {case} with coefficient {coeff}")
        })
    });
}

fn check_barrier(
    cert: &BarrierCertificate,
    pattern: &OrderedGraph,
    limits: &SuiteLimits,
    opts: &TilingOptions,
) -> CheckOutcome {
    let degree = cert.graph.min_degree();
    if degree != cert.claimed_min_degree || (degree as i64) < cert.formula_value {
        return CheckOutcome::Fail(format!(
            "min degree {degree}, claimed {}, bound {}",
            cert.claimed_min_degree, cert.formula_value
        ));
    }
    if cert.graph.n() > limits.oracle_max_n {
        return CheckOutcome::Skipped(format!("n = {} above oracle limit", cert.graph.n()));
    }
    match perfect_tiling_with(&cert.graph, pattern, opts).outcome {
        TilingOutcome::NoTiling => CheckOutcome::Pass,
        TilingOutcome::Timeout => CheckOutcome::Fail("oracle timed out".into()),
        other => CheckOutcome::Fail(format!("oracle returned {}", other.label())),
    }
}

fn barrier_checks(rec: &mut Recorder, name: &str, pattern: &OrderedGraph, limits: &SuiteLimits, opts: &TilingOptions) {
    let h = pattern.n();
    let profile = compute_profile(pattern);
    let hosts: Vec<usize> = (2..)
        .map(|m| m * h)
        .take_while(|&n| n <= limits.barrier_max_n)
        .collect();
    if hosts.is_empty() {
        rec.run("barrier", name, String::new(), || {
            CheckOutcome::Skipped(format!("2h = {} above barrier limit", 2 * h))
        });
        return;
    }
    for &n in &hosts {
        for ell in 1..profile.chi_lt {
            for (label, built) in [
                ("barrier.space", barriers::space_barrier(pattern, ell, n)),
                (
                    "barrier.space_mirrored",
                    barriers::space_barrier_mirrored(pattern, ell, n),
                ),
            ] {
                rec.run(label, name, format!("ell={ell} n={n}"), || match built {
                    Ok(cert) => check_barrier(&cert, pattern, limits, opts),
                    Err(e) => CheckOutcome::Fail(e.to_string()),
                });
            }
        }
        rec.run("barrier.divisibility", name, format!("n={n}"), || {
            if !profile.prop_b || h < 2 {
                return CheckOutcome::Skipped("needs Property B".into());
            }
            match barriers::divisibility_barrier(pattern, n) {
                Ok(cert) => check_barrier(&cert, pattern, limits, opts),
                Err(e) => CheckOutcome::Fail(e.to_string()),
            }
        });
        rec.run("barrier.local", name, format!("n={n}"), || {
            if !profile.prop_c_first && !profile.prop_c_last {
                return CheckOutcome::Skipped("no endpoint has Property C".into());
            }
            match barriers::local_barrier(pattern, n) {
                Ok(cert) => check_barrier(&cert, pattern, limits, opts),
                Err(e) => CheckOutcome::Fail(e.to_string()),
            }
        });
    }
}

fn bottle_checks(rec: &mut Recorder, name: &str, pattern: &OrderedGraph, limits: &SuiteLimits, opts: &TilingOptions) {
    let profile = compute_profile(pattern);
    if profile.chi_lt != 2 {
        rec.run("bottle", name, String::new(), || {
            CheckOutcome::Skipped(format!("chi_< = {}: no bottlegraph", profile.chi_lt))
        });
        return;
    }
    let b = match bottlegraph(pattern) {
        Ok(b) => b,
        Err(e) => {
            rec.run("bottle", name, String::new(), || CheckOutcome::Fail(e.to_string()));
            return;
        }
    };
    rec.run("bottle.chi_cr", name, format!("parts={:?}", b.part_sizes), || {
        let a = profile.alpha_star().expect("chi_< = 2");
        CheckOutcome::from_bool(b.chi_cr() == a.recip(), || {
            format!("chi_cr = {} vs 1/alpha* = {}", b.chi_cr(), a.recip())
        })
    });
    for labeling in interval_labelings(&b, false) {
        rec.run("bottle.labeling", name, format!("order={:?}", labeling.order), || {
            let out = match constructive_blowup_tiling(pattern, &b, &labeling) {
                Ok(out) => out,
                Err(e) => return CheckOutcome::Fail(e.to_string()),
            };
            if !verify_tiling(&out.host, pattern, &out.tiling) {
                return CheckOutcome::Fail(format!("constructed tiling (t = {}) does not verify", out.t));
            }
            if out.host.n() <= limits.oracle_max_n {
                let outcome = perfect_tiling_with(&out.host, pattern, opts).outcome;
                if !outcome.is_tiling() {
                    return CheckOutcome::Fail(format!("oracle returned {}", outcome.label()));
                }
            }
            CheckOutcome::Pass
        });
    }
}

fn oracle_checks(
    rec: &mut Recorder,
    name: &str,
    pattern: &OrderedGraph,
    limits: &SuiteLimits,
    opts: &TilingOptions,
    seed: u64,
) {
    let h = pattern.n();
    let hosts: Vec<usize> = (1..).map(|m| m * h).take_while(|&n| n <= limits.naive_max_n).collect();
    rec.run(
        "embed.oracle_vs_naive",
        name,
        format!("hosts={} n={hosts:?} seed={seed}", limits.random_hosts),
        || {
            if hosts.is_empty() {
                return CheckOutcome::Skipped(format!("h = {h} above naive limit"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for trial in 0..limits.random_hosts {
                let n = *hosts.choose(&mut rng).expect("non-empty");
                let p: f64 = rng.gen_range(0.3..1.0);
                let host = random_ordered_graph(n, p, rng.gen());
                let fast = perfect_tiling_with(&host, pattern, opts).outcome;
                let naive = reference::naive_perfect_tiling(&host, pattern);
                let agree = match (&fast, &naive) {
                    (TilingOutcome::Tiling(t), Some(_)) => verify_tiling(&host, pattern, t),
                    (TilingOutcome::NoTiling, None) => true,
                    _ => false,
                };
                if !agree {
                    return CheckOutcome::Fail(format!(
                        "trial {trial}: oracle {} vs naive {}",
                        fast.label(),
                        if naive.is_some() { "tiling" } else { "none" }
                    ));
                }
            }
            CheckOutcome::Pass
        },
    );
}

fn crop_checks(rec: &mut Recorder, limits: &SuiteLimits) {
    rec.run(
        "crop.bounds",
        "-",
        format!("trials={} seed={}", limits.crop_trials, limits.seed),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
            for trial in 0..limits.crop_trials {
                let k = rng.gen_range(2..=4);
                let n = rng.gen_range(k..=200);
                let sets = random_crop_instance(&mut rng, k, n);
                let ok = match crop(&sets) {
                    Ok(out) => satisfies_block_order(&sets, &out) && satisfies_size_bound(&sets, &out),
                    Err(_) => false,
                };
                if !ok {
                    return CheckOutcome::Fail(format!("trial {trial}: {sets:?}"));
                }
            }
            CheckOutcome::Pass
        },
    );
}

/// `k` disjoint non-empty subsets of `[n]`, each label kept with probability 0.7.
pub fn random_crop_instance(rng: &mut impl Rng, k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut sets: Vec<Vec<usize>> = labels[..k].iter().map(|&v| vec![v]).collect();
    for &v in &labels[k..] {
        if rng.gen_bool(0.7) {
            let i = rng.gen_range(0..k);
            sets[i].push(v);
        }
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn quick() -> SuiteLimits {
        SuiteLimits {
            random_hosts: 10,
            crop_trials: 50,
            ..SuiteLimits::default()
        }
    }

    #[test]
    fn default_catalog_passes() {
        let report = verify_suite(&catalog::default_catalog(), &quick()).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(report.passed, "{failures:#?}");
        assert!(report.checks.iter().any(|c| c.check == "bottle.labeling"));
        assert!(report
            .checks
            .iter()
            .any(|c| c.check == "barrier.local" && c.outcome == CheckOutcome::Pass));
        assert!(report
            .checks
            .iter()
            .any(|c| c.check == "barrier.divisibility" && c.outcome == CheckOutcome::Pass));
    }

    #[test]
    fn chi_three_pattern_is_skipped_not_failed() {
        let path = OrderedGraph::from_edges(3, [(1, 2), (2, 3)]).unwrap();
        let report = verify_suite(&[("P3".into(), path)], &quick()).unwrap();
        assert!(report.passed);
        let class = report
            .checks
            .iter()
            .find(|c| c.check == "profile.classification")
            .unwrap();
        assert!(matches!(&class.outcome, CheckOutcome::Skipped(s) if s.contains("unclassified")));
        assert!(report
            .checks
            .iter()
            .any(|c| c.check == "barrier.space" && c.outcome == CheckOutcome::Pass));
    }

    #[test]
    fn empty_catalog_is_an_error() {
        assert!(matches!(verify_suite(&[], &quick()), Err(SuiteError::EmptyCatalog)));
    }

    #[test]
    fn report_serializes() {
        let report = verify_suite(&[("K2".into(), catalog::k2())], &quick()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["passed"], true);
        assert_eq!(json["checks"][0]["outcome"]["status"], "pass");
    }
}
