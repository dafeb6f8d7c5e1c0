use rayon::prelude::*;

/// Outcome of one objective call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Eval {
    /// Outside the feasible set; costs no energy evaluation.
    Rejected,
    Value(f64),
}

impl Eval {
    fn value(self) -> f64 {
        match self {
            Eval::Rejected => f64::INFINITY,
            Eval::Value(v) => v,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_evals: usize,
    pub step: Vec<f64>,
    pub x_tol: f64,
    pub f_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRun {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evals: usize,
    /// Best value after each counted evaluation.
    pub history: Vec<f64>,
}

struct State<'a, F> {
    f: &'a F,
    evals: usize,
    calls: usize,
    max_evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
    history: Vec<f64>,
}

impl<F: Fn(&[f64]) -> Eval + Sync> State<'_, F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals || self.calls >= 20 * self.max_evals.max(1)
    }

    fn record(&mut self, x: &[f64], e: Eval) -> f64 {
        self.calls += 1;
        if let Eval::Value(v) = e {
            self.evals += 1;
            if v < self.best_f {
                self.best_f = v;
                self.best_x = x.to_vec();
            }
            self.history.push(self.best_f);
        }
        e.value()
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        if self.exhausted() {
            return f64::INFINITY;
        }
        let e = (self.f)(x);
        self.record(x, e)
    }

    /// Evaluates independent points concurrently, recording in input order.
    fn eval_batch(&mut self, xs: &[Vec<f64>]) -> Vec<f64> {
        let room = self.max_evals.saturating_sub(self.evals).min(xs.len());
        let f = self.f;
        let results: Vec<Eval> = xs[..room].par_iter().map(|x| f(x)).collect();
        let mut out: Vec<f64> = xs[..room]
            .iter()
            .zip(results)
            .map(|(x, e)| self.record(x, e))
            .collect();
        out.resize(xs.len(), f64::INFINITY);
        out
    }
}

fn axpy(a: &[f64], s: f64, b: &[f64], c: &[f64]) -> Vec<f64> {
    // a + s (b - c)
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| a + s * (b - c))
        .collect()
}

/// Nelder-Mead with the standard coefficients. Rejected points act as `+inf`.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &SimplexOptions) -> SimplexRun
where
    F: Fn(&[f64]) -> Eval + Sync,
{
    let n = x0.len();
    let mut st = State {
        f,
        evals: 0,
        calls: 0,
        max_evals: opts.max_evals,
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
        history: Vec::new(),
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step[i];
        pts.push(p);
    }
    let mut vals = st.eval_batch(&pts);
    while !st.exhausted() {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = vals[n] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if vals[n].is_finite() && spread <= opts.f_tol && size <= opts.x_tol {
            break;
        }
        let mut c = vec![0.0; n];
        for p in &pts[..n] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / n as f64;
            }
        }
        let xr = axpy(&c, 1.0, &c, &pts[n]);
        let fr = st.eval(&xr);
        if fr < vals[0] {
            let xe = axpy(&c, 2.0, &c, &pts[n]);
            let fe = st.eval(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[n] {
            let xc = axpy(&c, 0.5, &xr, &c);
            let fc = st.eval(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = axpy(&c, 0.5, &pts[n], &c);
            let fc = st.eval(&xc);
            (xc, fc, fc < vals[n])
        };
        if accept {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let shrunk: Vec<Vec<f64>> = pts[1..]
            .iter()
            .map(|p| axpy(&pts[0], 0.5, p, &pts[0]))
            .collect();
        let sv = st.eval_batch(&shrunk);
        for (i, (p, v)) in shrunk.into_iter().zip(sv).enumerate() {
            pts[i + 1] = p;
            vals[i + 1] = v;
        }
    }
    SimplexRun {
        best_x: st.best_x,
        best_f: st.best_f,
        evals: st.evals,
        history: st.history,
    }
}
