use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::*;

fn engines() -> Vec<Engine> {
    let mut out = Vec::new();
    for workers in [1, 2, 8] {
        for mode in [SchedulerMode::SharedQueue, SchedulerMode::Multidispatch] {
            out.push(Engine::new(EngineConfig::new(workers, mode).with_inline_below(1).instrumented()));
        }
    }
    out
}

#[test]
fn single_node() {
    for e in engines() {
        let out = e.run(|ctx| {
            let mut g = TaskGraph::new();
            g.add_task("answer", &[], |_, _| 6 * 7);
            ctx.execute(g).unwrap()
        });
        assert_eq!(out, vec![42]);
    }
}

#[test]
fn diamond_runs_sink_once_after_both_branches() {
    for e in engines() {
        let hits = Arc::new(AtomicUsize::new(0));
        let h = Arc::clone(&hits);
        let out = e.run(move |ctx| {
            let mut g: TaskGraph<Vec<&'static str>> = TaskGraph::new();
            let a = g.add_task("a", &[], |_, _| vec!["a"]);
            let b = g.add_task("b", &[a], |_, mut i| {
                i[0].push("b");
                i.remove(0)
            });
            let c = g.add_task("c", &[a], |_, mut i| {
                i[0].push("c");
                i.remove(0)
            });
            g.add_task("d", &[b, c], move |_, i| {
                h.fetch_add(1, Ordering::SeqCst);
                let mut v = i.concat();
                v.push("d");
                v
            });
            ctx.execute(g).unwrap()
        });
        assert_eq!(hits.load(Ordering::SeqCst), 1);
        assert_eq!(out[3], vec!["a", "b", "a", "c", "d"]);
    }
}

#[test]
fn cycle_is_reported() {
    let mut g: TaskGraph<u32> = TaskGraph::new();
    let a = g.add_task("a", &[], |_, _| 1);
    let b = g.add_task("b", &[a], |_, i| i[0] + 1);
    g.add_edge(b, a);
    let err = TaskContext::serial().execute(g).unwrap_err();
    assert!(matches!(err, TaskError::CycleDetected { .. }));
}

#[test]
fn panics_become_worker_panic() {
    for e in engines() {
        let err = e.run(|ctx| {
            let mut g: TaskGraph<u32> = TaskGraph::new();
            g.add_task("fine", &[], |_, _| 1);
            g.add_task("boom", &[], |_, _| panic!("injected"));
            g.add_task("fine2", &[], |_, _| 3);
            ctx.execute(g).unwrap_err()
        });
        match err {
            TaskError::WorkerPanic { node, label, message } => {
                assert_eq!(node, 1);
                assert_eq!(label, "boom");
                assert!(message.contains("injected"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

/// Recursive sum over a range, spawning nested graphs at every level.
fn tree_sum(ctx: &TaskContext, lo: u64, hi: u64) -> u64 {
    if hi - lo <= 4 {
        return (lo..hi).map(|x| x * x).sum();
    }
    let mid = (lo + hi) / 2;
    let parts = ctx
        .join_all(
            "half",
            vec![
                Box::new(move |c: &TaskContext| tree_sum(c, lo, mid)),
                Box::new(move |c: &TaskContext| tree_sum(c, mid, hi)),
            ],
        )
        .unwrap();
    parts[0] + parts[1]
}

#[test]
fn nested_graphs_match_serial() {
    let expected: u64 = (0..1000u64).map(|x| x * x).sum();
    for e in engines() {
        assert_eq!(e.run(|ctx| tree_sum(ctx, 0, 1000)), expected);
        if let Some(rep) = e.monitor_report() {
            assert!(rep.checks > 0);
            assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        }
    }
}

#[test]
fn multidispatch_bookkeeping_is_a_partition() {
    let e = Engine::new(EngineConfig::new(8, SchedulerMode::Multidispatch).with_inline_below(1).instrumented());
    for _ in 0..5 {
        e.run(|ctx| tree_sum(ctx, 0, 4096));
        let rep = e.monitor_report().unwrap();
        assert!(rep.checks > 10);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        assert!(rep.peak_busy >= 2);
    }
}

#[test]
fn multidispatch_hands_out_slaves() {
    let e = Engine::new(EngineConfig::new(4, SchedulerMode::Multidispatch).with_inline_below(1));
    let seen = e.run(|ctx| {
        assert_eq!(ctx.slaves(), vec![1, 2, 3]);
        let mut g: TaskGraph<usize> = TaskGraph::new();
        for k in 0..4 {
            g.add_task(format!("w{k}"), &[], |c, _| {
                std::thread::sleep(std::time::Duration::from_millis(20));
                c.worker_id()
            });
        }
        let out = ctx.execute(g).unwrap();
        assert_eq!(ctx.slaves().len(), 3, "all slaves come back");
        out
    });
    assert_eq!(seen[0], 0, "lowest id runs on the dispatching worker");
    let mut workers = seen.clone();
    workers.sort();
    workers.dedup();
    assert!(workers.len() > 1);
}
