//! Dependency-graph execution over a pool of in-process workers.
//!
//! Algorithms build a [`TaskGraph`] for one level of their recursion and hand
//! it to the [`TaskContext`] they were called with. Node bodies receive the
//! context of the worker that runs them, so nested recursion levels submit
//! nested graphs to the same pool.
//!
//! Two scheduler modes are provided:
//!
//! * `SharedQueue`: one global ready queue; idle workers and workers waiting
//!   on their own graph pull from it.
//! * `Multidispatch`: every worker owns a list of slave workers. A worker
//!   that runs a graph hands ready nodes to its own slaves, each together
//!   with a share of the remaining slaves, and gets them back when the node
//!   completes. The root worker starts out owning every other worker.
//!
//! Workers exchange only owned values (node inputs and outputs) through
//! channels. Results never depend on the schedule.

pub mod bench;
mod monitor;

use std::any::Any;
use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::cell::RefCell;
use std::sync::{Arc, Condvar, Mutex};

use crossbeam_channel::{unbounded, Receiver, Sender};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use monitor::MonitorReport;
use monitor::Monitor;

/// Default order below which recursions run inline instead of spawning.
pub const DEFAULT_INLINE_BELOW: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("task graph has a cycle through node {node}")]
    CycleDetected { node: usize },
    #[error("task {node} ({label}) panicked: {message}")]
    WorkerPanic { node: usize, label: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerMode {
    SharedQueue,
    Multidispatch,
}

impl std::str::FromStr for SchedulerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "shared" | "shared-queue" => Ok(SchedulerMode::SharedQueue),
            "multidispatch" => Ok(SchedulerMode::Multidispatch),
            _ => Err(format!("unknown scheduler mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerTopology {
    pub workers: usize,
    pub mode: SchedulerMode,
}

impl WorkerTopology {
    pub fn new(workers: usize, mode: SchedulerMode) -> Self {
        assert!(workers >= 1, "at least one worker is required");
        WorkerTopology { workers, mode }
    }
}

pub type NodeId = usize;

type NodeFn<T> = Box<dyn FnOnce(&TaskContext, Vec<T>) -> T + Send>;

struct TaskNode<T> {
    label: String,
    deps: Vec<NodeId>,
    run: NodeFn<T>,
}

/// A DAG of tasks producing values of type `T`.
///
/// A node receives the outputs of its dependencies in the order the edges
/// were added.
pub struct TaskGraph<T> {
    nodes: Vec<TaskNode<T>>,
}

impl<T> Default for TaskGraph<T> {
    fn default() -> Self {
        TaskGraph { nodes: Vec::new() }
    }
}

impl<T> TaskGraph<T> {
    /// Consumers of each node.
    fn consumers(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            for &d in &n.deps {
                out[d].push(id);
            }
        }
        out
    }
}

impl<T: Clone + Send + 'static> TaskGraph<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_task(
        &mut self,
        label: impl Into<String>,
        deps: &[NodeId],
        run: impl FnOnce(&TaskContext, Vec<T>) -> T + Send + 'static,
    ) -> NodeId {
        let id = self.nodes.len();
        for &d in deps {
            assert!(d < id, "dependency {d} of node {id} does not exist yet");
        }
        self.nodes.push(TaskNode { label: label.into(), deps: deps.to_vec(), run: Box::new(run) });
        id
    }

    /// Adds an edge `producer -> consumer` between existing nodes. Edges added
    /// this way may close a cycle, which execution reports.
    pub fn add_edge(&mut self, producer: NodeId, consumer: NodeId) {
        assert!(producer < self.nodes.len() && consumer < self.nodes.len());
        self.nodes[consumer].deps.push(producer);
    }

    /// Kahn's algorithm; returns the first node left on a cycle.
    fn check_acyclic(&self) -> Result<(), TaskError> {
        let consumers = self.consumers();
        let mut indeg: Vec<usize> = self.nodes.iter().map(|n| n.deps.len()).collect();
        let mut ready: Vec<NodeId> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut done = 0;
        while let Some(n) = ready.pop() {
            done += 1;
            for &c in &consumers[n] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if done == self.nodes.len() {
            Ok(())
        } else {
            let node = (0..self.nodes.len()).find(|&i| indeg[i] > 0).unwrap();
            Err(TaskError::CycleDetected { node })
        }
    }
}

/// Bookkeeping for one graph execution: readiness and collected outputs.
struct Run<T> {
    pending: Vec<Option<TaskNode<T>>>,
    consumers: Vec<Vec<NodeId>>,
    missing: Vec<usize>,
    outputs: Vec<Option<T>>,
    ready: BTreeSet<NodeId>,
    finished: usize,
}

impl<T: Clone> Run<T> {
    fn new(g: TaskGraph<T>) -> Self {
        let consumers = g.consumers();
        let missing: Vec<usize> = g.nodes.iter().map(|n| n.deps.len()).collect();
        let ready = (0..g.nodes.len()).filter(|&i| missing[i] == 0).collect();
        let n = g.nodes.len();
        Run {
            pending: g.nodes.into_iter().map(Some).collect(),
            consumers,
            missing,
            outputs: (0..n).map(|_| None).collect(),
            ready,
            finished: 0,
        }
    }

    fn is_done(&self) -> bool {
        self.finished == self.pending.len()
    }

    /// Takes the lowest-id ready node with its inputs.
    fn pop_ready(&mut self) -> Option<(NodeId, TaskNode<T>, Vec<T>)> {
        let id = self.ready.pop_first()?;
        let node = self.pending[id].take().expect("ready node is pending");
        let inputs = node
            .deps
            .iter()
            .map(|&d| self.outputs[d].clone().expect("dependency finished"))
            .collect();
        Some((id, node, inputs))
    }

    fn complete(&mut self, id: NodeId, value: T) {
        self.outputs[id] = Some(value);
        self.finished += 1;
        for &c in &self.consumers[id] {
            self.missing[c] -= 1;
            if self.missing[c] == 0 {
                self.ready.insert(c);
            }
        }
    }

    fn into_outputs(self) -> Vec<T> {
        self.outputs.into_iter().map(|o| o.expect("all nodes finished")).collect()
    }
}

fn panic_message(p: Box<dyn Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".into()
    }
}

fn run_node<T>(ctx: &TaskContext, id: NodeId, node: TaskNode<T>, inputs: Vec<T>) -> Result<T, TaskError> {
    let TaskNode { label, run, .. } = node;
    catch_unwind(AssertUnwindSafe(|| run(ctx, inputs))).map_err(|p| TaskError::WorkerPanic {
        node: id,
        label,
        message: panic_message(p),
    })
}

type Job = Box<dyn FnOnce(&TaskContext) + Send>;

struct Assignment {
    job: Job,
    slaves: Vec<usize>,
}

enum Message {
    Run(Assignment),
    Stop,
}

struct QueueState {
    jobs: VecDeque<Job>,
    shutdown: bool,
}

struct Pool {
    topology: WorkerTopology,
    inline_below: usize,
    inboxes: Vec<Sender<Message>>,
    queue: Mutex<QueueState>,
    wake: Condvar,
    monitor: Option<Monitor>,
}

impl Pool {
    fn notify(&self) {
        let _guard = self.queue.lock().unwrap();
        self.wake.notify_all();
    }
}

/// The per-worker handle algorithms receive.
pub struct TaskContext {
    pool: Option<Arc<Pool>>,
    worker: usize,
    slaves: RefCell<Vec<usize>>,
    inline_below: usize,
}

struct Completion<T> {
    id: NodeId,
    result: Result<T, TaskError>,
    returned: Vec<usize>,
}

impl TaskContext {
    /// A context that runs every graph inline on the calling thread.
    pub fn serial() -> Self {
        TaskContext { pool: None, worker: 0, slaves: RefCell::new(Vec::new()), inline_below: usize::MAX }
    }

    pub fn worker_id(&self) -> usize {
        self.worker
    }

    pub fn worker_count(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.topology.workers)
    }

    pub fn is_parallel(&self) -> bool {
        self.worker_count() > 1
    }

    /// Whether a recursion at this order should build a task graph rather
    /// than recurse inline.
    pub fn should_spawn(&self, order: usize) -> bool {
        self.is_parallel() && order >= self.inline_below
    }

    /// Slaves currently owned by this worker (multidispatch mode).
    pub fn slaves(&self) -> Vec<usize> {
        self.slaves.borrow().clone()
    }

    /// Runs a graph to completion and returns every node's output, indexed by
    /// node id.
    pub fn execute<T: Clone + Send + 'static>(&self, g: TaskGraph<T>) -> Result<Vec<T>, TaskError> {
        g.check_acyclic()?;
        match &self.pool {
            Some(pool) if pool.topology.workers > 1 => match pool.topology.mode {
                SchedulerMode::Multidispatch => self.execute_multidispatch(pool, g),
                SchedulerMode::SharedQueue => self.execute_shared(pool, g),
            },
            _ => self.execute_serial(g),
        }
    }

    fn execute_serial<T: Clone + Send + 'static>(&self, g: TaskGraph<T>) -> Result<Vec<T>, TaskError> {
        let mut run = Run::new(g);
        while let Some((id, node, inputs)) = run.pop_ready() {
            let out = run_node(self, id, node, inputs)?;
            run.complete(id, out);
        }
        Ok(run.into_outputs())
    }

    fn execute_multidispatch<T: Clone + Send + 'static>(
        &self,
        pool: &Arc<Pool>,
        g: TaskGraph<T>,
    ) -> Result<Vec<T>, TaskError> {
        let mut run = Run::new(g);
        let (tx, rx) = unbounded::<Completion<T>>();
        let mut outstanding = 0usize;
        let mut failure: Option<TaskError> = None;

        while !run.is_done() {
            if failure.is_none() {
                // hand ready nodes to free slaves, keeping the lowest id for ourselves
                loop {
                    let free = self.slaves.borrow().len();
                    if free == 0 || run.ready.len() < 2 {
                        break;
                    }
                    let (id, node, inputs) = run.pop_last_ready();
                    let (slave, share) = {
                        let mut mine = self.slaves.borrow_mut();
                        let slave = mine.remove(0);
                        let waiting = run.ready.len().max(1);
                        let share_len = mine.len() / (waiting + 1);
                        let share: Vec<usize> = mine.drain(..share_len).collect();
                        (slave, share)
                    };
                    if let Some(m) = &pool.monitor {
                        m.assign(self.worker, slave, &share);
                    }
                    let tx = tx.clone();
                    let pool2 = Arc::clone(pool);
                    let job: Job = Box::new(move |ctx: &TaskContext| {
                        let result = run_node(ctx, id, node, inputs);
                        let mut returned = vec![ctx.worker];
                        returned.extend(ctx.slaves.borrow_mut().drain(..));
                        let _ = tx.send(Completion { id, result, returned });
                        pool2.notify();
                    });
                    pool.inboxes[slave]
                        .send(Message::Run(Assignment { job, slaves: share }))
                        .expect("worker inbox open");
                    outstanding += 1;
                }
                if let Some((id, node, inputs)) = run.pop_ready() {
                    match run_node(self, id, node, inputs) {
                        Ok(v) => run.complete(id, v),
                        Err(e) => failure = Some(e),
                    }
                    self.drain_completions(pool, &rx, &mut run, &mut outstanding, &mut failure, false);
                    continue;
                }
            }
            if outstanding == 0 {
                break;
            }
            self.drain_completions(pool, &rx, &mut run, &mut outstanding, &mut failure, true);
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(run.into_outputs()),
        }
    }

    fn drain_completions<T: Clone>(
        &self,
        pool: &Arc<Pool>,
        rx: &Receiver<Completion<T>>,
        run: &mut Run<T>,
        outstanding: &mut usize,
        failure: &mut Option<TaskError>,
        block: bool,
    ) {
        let mut first = block;
        loop {
            let msg = if first {
                first = false;
                match rx.recv() {
                    Ok(m) => m,
                    Err(_) => return,
                }
            } else {
                match rx.try_recv() {
                    Ok(m) => m,
                    Err(_) => return,
                }
            };
            *outstanding -= 1;
            if let Some(m) = &pool.monitor {
                m.release(self.worker, &msg.returned);
            }
            self.slaves.borrow_mut().extend(msg.returned);
            match msg.result {
                Ok(v) => run.complete(msg.id, v),
                Err(e) => {
                    if failure.is_none() {
                        *failure = Some(e);
                    }
                }
            }
        }
    }

    fn execute_shared<T: Clone + Send + 'static>(
        &self,
        pool: &Arc<Pool>,
        g: TaskGraph<T>,
    ) -> Result<Vec<T>, TaskError> {
        let mut run = Run::new(g);
        let (tx, rx) = unbounded::<Completion<T>>();
        let mut outstanding = 0usize;
        let mut failure: Option<TaskError> = None;

        loop {
            if failure.is_none() {
                // publish all but the lowest ready node, which runs here
                while run.ready.len() > 1 {
                    let (id, node, inputs) = run.pop_last_ready();
                    let tx = tx.clone();
                    let pool2 = Arc::clone(pool);
                    let job: Job = Box::new(move |ctx: &TaskContext| {
                        let result = run_node(ctx, id, node, inputs);
                        let _ = tx.send(Completion { id, result, returned: Vec::new() });
                        pool2.notify();
                    });
                    let mut q = pool.queue.lock().unwrap();
                    q.jobs.push_back(job);
                    pool.wake.notify_all();
                    drop(q);
                    outstanding += 1;
                }
                if let Some((id, node, inputs)) = run.pop_ready() {
                    match run_node(self, id, node, inputs) {
                        Ok(v) => run.complete(id, v),
                        Err(e) => failure = Some(e),
                    }
                }
            }
            while let Ok(msg) = rx.try_recv() {
                outstanding -= 1;
                match msg.result {
                    Ok(v) => run.complete(msg.id, v),
                    Err(e) => failure = failure.or(Some(e)),
                }
            }
            if run.is_done() || outstanding == 0 && (failure.is_some() || run.ready.is_empty()) {
                break;
            }
            if failure.is_none() && !run.ready.is_empty() {
                continue;
            }
            // help with queued work until one of our nodes completes
            let job = {
                let mut q = pool.queue.lock().unwrap();
                loop {
                    if !rx.is_empty() {
                        break None;
                    }
                    if let Some(j) = q.jobs.pop_front() {
                        break Some(j);
                    }
                    q = pool.wake.wait(q).unwrap();
                }
            };
            if let Some(job) = job {
                job(self);
            }
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(run.into_outputs()),
        }
    }

    /// Runs independent closures as a graph without edges and returns their
    /// results in order.
    pub fn join_all<T: Clone + Send + 'static>(
        &self,
        label: &str,
        tasks: Vec<Box<dyn FnOnce(&TaskContext) -> T + Send>>,
    ) -> Result<Vec<T>, TaskError> {
        let mut g = TaskGraph::new();
        for (k, t) in tasks.into_iter().enumerate() {
            g.add_task(format!("{label}[{k}]"), &[], move |ctx, _| t(ctx));
        }
        self.execute(g)
    }
}

impl<T: Clone> Run<T> {
    /// Highest-id ready node; handed out first so the lowest stays local.
    fn pop_last_ready(&mut self) -> (NodeId, TaskNode<T>, Vec<T>) {
        let id = self.ready.pop_last().expect("ready set nonempty");
        let node = self.pending[id].take().expect("ready node is pending");
        let inputs = node
            .deps
            .iter()
            .map(|&d| self.outputs[d].clone().expect("dependency finished"))
            .collect();
        (id, node, inputs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub topology: WorkerTopology,
    /// Recursions below this order run inline.
    pub inline_below: usize,
    /// Check the slave-list partition at every multidispatch transition.
    pub instrument: bool,
}

impl EngineConfig {
    pub fn new(workers: usize, mode: SchedulerMode) -> Self {
        EngineConfig {
            topology: WorkerTopology::new(workers, mode),
            inline_below: DEFAULT_INLINE_BELOW,
            instrument: false,
        }
    }

    pub fn with_inline_below(mut self, order: usize) -> Self {
        self.inline_below = order;
        self
    }

    pub fn instrumented(mut self) -> Self {
        self.instrument = true;
        self
    }
}

/// A worker pool that lives for the duration of [`Engine::run`].
#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    last_report: Arc<Mutex<Option<MonitorReport>>>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine { config, last_report: Arc::new(Mutex::new(None)) }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Bookkeeping report of the most recent instrumented run.
    pub fn monitor_report(&self) -> Option<MonitorReport> {
        self.last_report.lock().unwrap().clone()
    }

    /// Starts the workers, runs `f` on the calling thread as worker 0, then
    /// shuts the workers down.
    pub fn run<R>(&self, f: impl FnOnce(&TaskContext) -> R) -> R {
        let workers = self.config.topology.workers;
        if workers <= 1 {
            let ctx = TaskContext {
                pool: None,
                worker: 0,
                slaves: RefCell::new(Vec::new()),
                inline_below: self.config.inline_below,
            };
            return f(&ctx);
        }
        let mut senders = Vec::with_capacity(workers);
        let mut receivers = Vec::with_capacity(workers);
        for _ in 0..workers {
            let (tx, rx) = unbounded::<Message>();
            senders.push(tx);
            receivers.push(rx);
        }
        let monitor = (self.config.instrument && self.config.topology.mode == SchedulerMode::Multidispatch)
            .then(|| Monitor::new(workers));
        let pool = Arc::new(Pool {
            topology: self.config.topology,
            inline_below: self.config.inline_below,
            inboxes: senders,
            queue: Mutex::new(QueueState { jobs: VecDeque::new(), shutdown: false }),
            wake: Condvar::new(),
            monitor,
        });
        let result = std::thread::scope(|scope| {
            for (w, rx) in receivers.into_iter().enumerate().skip(1) {
                let pool = Arc::clone(&pool);
                scope.spawn(move || worker_loop(pool, w, rx));
            }
            let root = TaskContext {
                pool: Some(Arc::clone(&pool)),
                worker: 0,
                slaves: RefCell::new(match self.config.topology.mode {
                    SchedulerMode::Multidispatch => (1..workers).collect(),
                    SchedulerMode::SharedQueue => Vec::new(),
                }),
                inline_below: pool.inline_below,
            };
            let out = f(&root);
            {
                let mut q = pool.queue.lock().unwrap();
                q.shutdown = true;
                pool.wake.notify_all();
            }
            for tx in &pool.inboxes {
                let _ = tx.send(Message::Stop);
            }
            out
        });
        if let Some(m) = &pool.monitor {
            *self.last_report.lock().unwrap() = Some(m.report());
        }
        result
    }
}

fn worker_loop(pool: Arc<Pool>, worker: usize, inbox: Receiver<Message>) {
    let ctx = TaskContext {
        pool: Some(Arc::clone(&pool)),
        worker,
        slaves: RefCell::new(Vec::new()),
        inline_below: pool.inline_below,
    };
    match pool.topology.mode {
        SchedulerMode::Multidispatch => {
            while let Ok(Message::Run(Assignment { job, slaves })) = inbox.recv() {
                *ctx.slaves.borrow_mut() = slaves;
                job(&ctx);
            }
        }
        SchedulerMode::SharedQueue => loop {
            let job = {
                let mut q = pool.queue.lock().unwrap();
                loop {
                    if let Some(j) = q.jobs.pop_front() {
                        break Some(j);
                    }
                    if q.shutdown {
                        break None;
                    }
                    q = pool.wake.wait(q).unwrap();
                }
            };
            match job {
                Some(j) => j(&ctx),
                None => break,
            }
        },
    }
}

#[cfg(test)]
mod tests;
