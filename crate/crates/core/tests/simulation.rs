use cogrelay::error::QueueId;
use cogrelay::optimizer::{optimize, OptimizeOptions};
use cogrelay::rates::full_report;
use cogrelay::scenario;
use cogrelay::simulator::{run, stability_probe, ProbeOptions, SimConfig, SimStatus, Simulator, System, Verdict};
use cogrelay::{Policy, SystemConfig};
use proptest::prelude::*;

const P1: usize = 0;
const P2: usize = 1;
const SR1: usize = 3;
const SR2: usize = 4;

fn fig3(lambda_s: f64) -> SystemConfig {
    let mut cfg = scenario::bundled("fig3").unwrap().config;
    cfg.arrivals.lambda_s = Some(lambda_s);
    cfg
}

fn mixed_policy() -> Policy {
    Policy::new([0.7, 0.5], [0.4, 0.6], [0.4, 0.2, 0.3, 0.1]).unwrap()
}

fn system_strategy() -> impl Strategy<Value = System> {
    prop_oneof![Just(System::S), Just(System::S1), Just(System::S2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_queue_conserves_packets(system in system_strategy(), seed in any::<u64>(), ls in 0.0f64..1.0, slots in 0u64..20_000) {
        let out = run(&SimConfig::new(system, fig3(ls), mixed_policy(), slots, seed)).unwrap();
        for q in out.queues {
            prop_assert_eq!(q.arrivals + q.initial_len, q.departures + q.final_len);
            prop_assert!(q.departures <= q.arrivals + q.initial_len);
        }
    }

    #[test]
    fn slot_decisions_follow_the_system_rules(system in system_strategy(), seed in any::<u64>(), ls in 0.0f64..1.0) {
        let sim = SimConfig::new(system, fig3(ls), mixed_policy(), 0, seed);
        let mut s = Simulator::new(&sim).unwrap();
        for _ in 0..5_000 {
            let len = s.state.len;
            let rec = s.step();
            let a = rec.assignment;
            let idle = [len[P1] == 0, len[P2] == 0];
            let secondary_served = [a.band1, a.band2, a.merged].iter().filter(|x| **x == Some(QueueId::S)).count();
            prop_assert!(secondary_served <= 1);
            prop_assert!(a.merged.is_none() || (a.band1.is_none() && a.band2.is_none()));
            for i in 0..5 {
                prop_assert!(!(rec.departed[i] && rec.empty[i]));
            }
            if !idle[0] {
                prop_assert!(a.band1.is_none() && a.merged.is_none());
            }
            if !idle[1] {
                prop_assert!(a.band2.is_none() && a.merged.is_none());
            }
            prop_assert!(a.band1.is_none_or(|q| q == QueueId::S || q == QueueId::Sr1));
            prop_assert!(a.band2.is_none_or(|q| q == QueueId::S || q == QueueId::Sr2));
            let relays_empty = [len[SR1] == 0, len[SR2] == 0];
            match system {
                System::S => {
                    prop_assert_eq!(a.eta_event.is_some(), idle[0] && idle[1]);
                    if idle[0] != idle[1] {
                        let served = if idle[0] { a.band1 } else { a.band2 };
                        prop_assert!(served.is_some());
                    }
                }
                System::S1 => {
                    if idle[0] && idle[1] && relays_empty[0] && relays_empty[1] {
                        prop_assert_eq!(a.merged, Some(QueueId::S));
                    }
                    if idle[0] {
                        prop_assert_eq!(a.band1 == Some(QueueId::Sr1), !relays_empty[0]);
                    }
                    if idle[1] {
                        prop_assert_eq!(a.band2 == Some(QueueId::Sr2), !relays_empty[1]);
                    }
                }
                System::S2 => {
                    let own = secondary_served == 1;
                    prop_assert_eq!(own, idle[0] && idle[1] && relays_empty[0] && relays_empty[1]);
                    if own {
                        prop_assert_eq!(a.merged, Some(QueueId::S));
                    }
                }
            }
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let sim = SimConfig::new(System::S, fig3(0.3), mixed_policy(), 100_000, 17);
    assert_eq!(run(&sim).unwrap(), run(&sim).unwrap());
    let other = SimConfig { seed: 18, ..sim };
    assert_ne!(run(&sim).unwrap().queues, run(&other).unwrap().queues);
}

#[test]
fn no_slots_means_no_data() {
    let out = run(&SimConfig::new(System::S1, fig3(0.1), mixed_policy(), 0, 1).with_warmup(100)).unwrap();
    assert_eq!(out.status, SimStatus::NoData);
    assert!(out.queues.iter().all(|q| q.opportunity_rate.mean.is_nan()));
}

/// Service opportunities of every queue against the analytic rates, on one
/// parameter set with direct probabilities and one with faded links.
#[test]
fn service_rates_match_analytic_within_three_standard_errors() {
    for name in ["fig3", "table1"] {
        let mut cfg = scenario::bundled(name).unwrap().config;
        cfg.arrivals.lambda_s = Some(0.2);
        let policy = mixed_policy();
        let r = full_report(&cfg, &policy).unwrap();
        let out = run(&SimConfig::new(System::S, cfg, policy, 1_000_000, 3)).unwrap();
        let checks = [
            (QueueId::P1, r.mu_p1),
            (QueueId::P2, r.mu_p2),
            (QueueId::S, r.mu_s),
            (QueueId::Sr1, r.mu_sr1),
            (QueueId::Sr2, r.mu_sr2),
        ];
        for (q, want) in checks {
            let est = out.queue(q).opportunity_rate;
            assert!(est.covers(want, 3.0), "{name} {q}: {} +- {} vs {want}", est.mean, est.std_err);
        }
        for (q, pi) in [(QueueId::P1, r.pi_p1), (QueueId::P2, r.pi_p2)] {
            let est = out.queue(q).empty_frac;
            assert!(est.covers(pi, 3.0), "{name} {q} empty: {} +- {} vs {pi}", est.mean, est.std_err);
        }
    }
}

#[test]
fn probe_separates_light_and_heavy_secondary_load() {
    let cfg = fig3(0.0);
    let opts = OptimizeOptions { relay_backoff: cogrelay::simulator::RELAY_BACKOFF, ..OptimizeOptions::default() };
    let sol = optimize(&cfg, &opts).unwrap();
    let policy = sol.policy.unwrap();
    let probe = ProbeOptions { slots: 300_000, seed: 5, ..ProbeOptions::default() };
    let light = stability_probe(&cfg, System::S, &policy, 0.5 * sol.mu_s_max, &probe).unwrap();
    assert_eq!(light.queue(QueueId::S).verdict, Verdict::Stable);
    assert_ne!(light.queue(QueueId::Sr1).verdict, Verdict::Unstable);
    let heavy = stability_probe(&cfg, System::S, &policy, (sol.mu_s_max + 0.05).min(1.0), &probe).unwrap();
    assert_eq!(heavy.queue(QueueId::S).verdict, Verdict::Unstable);
}

#[test]
fn relay_priority_systems_force_full_admittance() {
    let sim = SimConfig::new(System::S2, fig3(0.1), mixed_policy(), 10, 1);
    let p = sim.effective_policy();
    assert_eq!((p.alpha_sr1, p.alpha_sr2), (1.0, 1.0));
}
