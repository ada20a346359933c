use std::sync::Mutex;

use super::EvalError;

/// A fixed set of `p` worker threads with static job assignment: worker `w`
/// runs jobs `w, w + p, w + 2p, ...`.
///
/// With one thread everything runs on the caller's thread.
pub struct WorkCrew {
    threads: usize,
    pool: Option<rayon::ThreadPool>,
}

impl WorkCrew {
    pub fn new(threads: usize) -> Result<Self, EvalError> {
        if threads == 0 {
            return Err(EvalError::Crew("a work crew needs at least one thread".into()));
        }
        let pool = if threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .thread_name(|i| format!("crew-{i}"))
                .build()
                .map_err(|e| EvalError::Crew(e.to_string()))?;
            Some(pool)
        } else {
            None
        };
        Ok(WorkCrew { threads, pool })
    }

    pub fn sequential() -> Self {
        WorkCrew { threads: 1, pool: None }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Jobs handled by `worker` out of `jobs`.
    pub fn assignment(&self, worker: usize, jobs: usize) -> impl Iterator<Item = usize> {
        (worker..jobs).step_by(self.threads)
    }

    /// Runs `f` on every job index and returns the results in job order.
    ///
    /// Each worker creates one scratch value with `scratch` and reuses it
    /// for all its jobs; the scratch values are returned in worker order.
    pub fn map_with<S, T, M, F>(&self, jobs: usize, scratch: M, f: F) -> (Vec<T>, Vec<S>)
    where
        S: Send,
        T: Send,
        M: Fn() -> S + Sync,
        F: Fn(&mut S, usize) -> T + Sync,
    {
        let pool = match &self.pool {
            Some(pool) if jobs > 1 => pool,
            _ => {
                let mut s = scratch();
                let out = (0..jobs).map(|j| f(&mut s, j)).collect();
                return (out, vec![s]);
            }
        };
        let parts: Vec<(Vec<(usize, T)>, S)> = pool.broadcast(|ctx| {
            let mut s = scratch();
            let out = self.assignment(ctx.index(), jobs).map(|j| (j, f(&mut s, j))).collect();
            (out, s)
        });
        let mut slots: Vec<Option<T>> = (0..jobs).map(|_| None).collect();
        let mut scratches = Vec::with_capacity(parts.len());
        for (out, s) in parts {
            for (j, t) in out {
                slots[j] = Some(t);
            }
            scratches.push(s);
        }
        (slots.into_iter().map(|t| t.expect("every job is assigned")).collect(), scratches)
    }

    pub fn map<T, F>(&self, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        self.map_with(jobs, || (), |_, j| f(j)).0
    }

    /// Runs `f` on every job, for side effects through interior mutability.
    pub fn for_each<F>(&self, jobs: usize, f: F)
    where
        F: Fn(usize) + Sync,
    {
        self.map(jobs, f);
    }
}

impl std::fmt::Debug for WorkCrew {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkCrew").field("threads", &self.threads).finish()
    }
}

/// Collects which worker thread ran each job; used by the tests to check the
/// stride assignment.
#[doc(hidden)]
pub fn job_owners(crew: &WorkCrew, jobs: usize) -> Vec<usize> {
    let owners = Mutex::new(vec![usize::MAX; jobs]);
    crew.for_each(jobs, |j| {
        let w = rayon::current_thread_index().unwrap_or(0);
        owners.lock().unwrap()[j] = w;
    });
    owners.into_inner().unwrap()
}
