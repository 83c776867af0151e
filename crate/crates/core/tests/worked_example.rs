mod support;

use apo_core::apo::{evolve_individual, reproduction_update, sort_by_fitness, Operation};
use apo_core::rng::{Stream, COORDINATOR};
use apo_core::{step, EngineMode};
use support::worked_example::*;

#[test]
fn initial_fitness_matches() {
    let pop = initial_population();
    for (ind, expected) in pop.individuals.iter().zip(INITIAL_FITNESS) {
        assert!((ind.fitness - expected).abs() < 1e-9);
    }
}

#[test]
fn sort_order_matches() {
    let mut pop = initial_population();
    pop.sort_by_fitness();
    for (rank, ind) in pop.individuals.iter().enumerate() {
        assert!((ind.fitness - SORTED_FITNESS[rank]).abs() < 1e-9);
        assert_eq!(ind.position, SORTED_START[rank].to_vec());
    }
}

#[test]
fn per_rank_operations_candidates_and_selection() {
    let cfg = config();
    let src = scripted_source();
    let mut snapshot = initial_population().individuals;
    sort_by_fitness(&mut snapshot);

    let coordinator = Stream::new(&src, cfg.seed, ITER as u64, COORDINATOR);
    let pf = apo_core::apo::proportion_fraction(&coordinator, cfg.pf_max);
    assert_eq!(
        apo_core::apo::select_dr_indices(4, pf, &coordinator),
        vec![DR_RANK]
    );

    let expected_ops = [
        Operation::Autotroph,
        Operation::Reproduction,
        Operation::Heterotroph,
        Operation::Autotroph,
    ];
    for rank in 1..=4 {
        let stream = Stream::new(&src, cfg.seed, ITER as u64, rank as u64);
        let evolved = evolve_individual(
            rank,
            &snapshot,
            rank == DR_RANK,
            &cfg,
            ITER,
            &objective(),
            &stream,
        )
        .unwrap();
        assert_eq!(
            evolved.decision.operation,
            expected_ops[rank - 1],
            "rank {rank}"
        );
        assert_eq!(
            evolved.selection.accepted,
            ACCEPTED[rank - 1],
            "rank {rank}"
        );
        if rank == DR_RANK {
            assert_eq!(evolved.candidate, CLAMPED_RANK2.to_vec());
            let raw = reproduction_update(&snapshot[1].position, &cfg.bounds, &stream);
            assert!(agrees_to_2dp(&raw, &CANDIDATES[1]), "{raw:?}");
        } else {
            assert!(
                agrees_to_2dp(&evolved.candidate, &CANDIDATES[rank - 1]),
                "rank {rank}: {:?}",
                evolved.candidate
            );
        }
    }
}

#[test]
fn full_step_reproduces_next_population() {
    let cfg = config();
    let src = scripted_source();
    for mode in [EngineMode::Sequential, EngineMode::parallel(4)] {
        let next = step(initial_population(), &cfg, &objective(), ITER, mode, &src).unwrap();
        assert_eq!(next.fe_count, 8);
        for (rank, ind) in next.individuals.iter().enumerate() {
            assert!(
                agrees_to_2dp(&ind.position, &FINAL[rank]),
                "rank {}: {:?}",
                rank + 1,
                ind.position
            );
        }
    }
}
