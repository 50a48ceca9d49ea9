use std::collections::BTreeSet;
use std::sync::Mutex;

/// Outcome of the slave-list partition checks of one instrumented run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonitorReport {
    pub checks: usize,
    pub violations: Vec<String>,
    /// Largest number of simultaneously busy workers seen.
    pub peak_busy: usize,
}

struct State {
    /// `owner[w]` is the worker whose slave list holds `w`; `None` while busy.
    owner: Vec<Option<usize>>,
    /// Slave lists as the masters see them.
    lists: Vec<BTreeSet<usize>>,
    busy: BTreeSet<usize>,
    report: MonitorReport,
}

/// Shadow copy of the multidispatch ownership relation, re-validated after
/// every transition.
pub(crate) struct Monitor {
    state: Mutex<State>,
}

impl Monitor {
    pub fn new(workers: usize) -> Self {
        let mut owner = vec![Some(0); workers];
        owner[0] = None;
        let mut lists = vec![BTreeSet::new(); workers];
        lists[0] = (1..workers).collect();
        Monitor {
            state: Mutex::new(State {
                owner,
                lists,
                busy: [0].into_iter().collect(),
                report: MonitorReport::default(),
            }),
        }
    }

    /// `master` hands a node to `slave` along with `share` of its list.
    pub fn assign(&self, master: usize, slave: usize, share: &[usize]) {
        let mut st = self.state.lock().unwrap();
        let mut problems = Vec::new();
        if !st.lists[master].remove(&slave) {
            problems.push(format!("worker {master} assigned {slave}, which it does not own"));
        }
        st.owner[slave] = None;
        st.busy.insert(slave);
        for &s in share {
            if !st.lists[master].remove(&s) {
                problems.push(format!("worker {master} shared {s}, which it does not own"));
            }
            st.lists[slave].insert(s);
            st.owner[s] = Some(slave);
        }
        st.report.peak_busy = st.report.peak_busy.max(st.busy.len());
        st.report.violations.extend(problems);
        check(&mut st);
    }

    /// `returned` (the finished slave followed by its list) goes back to `master`.
    pub fn release(&self, master: usize, returned: &[usize]) {
        let mut st = self.state.lock().unwrap();
        let slave = returned[0];
        if !st.busy.remove(&slave) {
            st.report.violations.push(format!("worker {slave} returned while not busy"));
        }
        for &w in &returned[1..] {
            let prev = st.owner[w];
            if prev != Some(slave) {
                st.report.violations.push(format!("worker {w} returned by {slave} but owned by {prev:?}"));
            }
            st.lists[slave].remove(&w);
        }
        for &w in returned {
            st.lists[master].insert(w);
            st.owner[w] = Some(master);
        }
        check(&mut st);
    }

    pub fn report(&self) -> MonitorReport {
        self.state.lock().unwrap().report.clone()
    }
}

/// Busy workers plus all slave lists must partition the worker set.
fn check(st: &mut State) {
    st.report.checks += 1;
    let n = st.owner.len();
    let mut seen = vec![0usize; n];
    for &b in &st.busy {
        seen[b] += 1;
    }
    for (m, list) in st.lists.iter().enumerate() {
        for &w in list {
            seen[w] += 1;
            if st.owner[w] != Some(m) {
                st.report.violations.push(format!("worker {w} listed by {m} but owned by {:?}", st.owner[w]));
            }
        }
    }
    for (w, &c) in seen.iter().enumerate() {
        if c != 1 {
            st.report.violations.push(format!("worker {w} appears {c} times"));
        }
    }
}
