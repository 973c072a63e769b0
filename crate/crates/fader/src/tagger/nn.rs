//! Minimal dense building blocks for the tagger: parameter tensors, a
//! linear layer, and a gated recurrent (GRU) cell with hand-derived
//! backward passes. Everything is f64 and strictly sequential, so gradients
//! can be validated against central finite differences and training is
//! bit-reproducible.

use crate::rng::Rng;

/// A parameter matrix (or vector when `cols == 1`) with its gradient
/// accumulator.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub grad: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            grad: vec![0.0; rows * cols],
        }
    }

    /// Xavier-uniform initialization.
    pub fn glorot(rows: usize, cols: usize, rng: &mut Rng) -> Self {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let mut t = Tensor::zeros(rows, cols);
        for x in &mut t.data {
            *x = rng.uniform(-bound, bound);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn grad_row_add(&mut self, r: usize, d: &[f64]) {
        let base = r * self.cols;
        for (i, &g) in d.iter().enumerate() {
            self.grad[base + i] += g;
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
    }

    /// SGD step on averaged gradients: `data -= lr * grad / scale`.
    pub fn sgd_step(&mut self, lr: f64, scale: f64) {
        let k = lr / scale;
        for (d, g) in self.data.iter_mut().zip(&self.grad) {
            *d -= k * *g;
        }
    }
}

/// y = W x (rows of W are output features).
pub fn matvec(w: &Tensor, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(w.cols, x.len());
    let mut y = vec![0.0; w.rows];
    for r in 0..w.rows {
        let row = w.row(r);
        let mut acc = 0.0;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        y[r] = acc;
    }
    y
}

/// dx += W^T dy.
pub fn matvec_t_add(w: &Tensor, dy: &[f64], dx: &mut [f64]) {
    debug_assert_eq!(w.rows, dy.len());
    debug_assert_eq!(w.cols, dx.len());
    for r in 0..w.rows {
        let g = dy[r];
        if g == 0.0 {
            continue;
        }
        let row = w.row(r);
        for (d, &a) in dx.iter_mut().zip(row) {
            *d += g * a;
        }
    }
}

/// grad(W) += dy (outer) x.
pub fn outer_add(w: &mut Tensor, dy: &[f64], x: &[f64]) {
    debug_assert_eq!(w.rows, dy.len());
    debug_assert_eq!(w.cols, x.len());
    for r in 0..w.rows {
        let g = dy[r];
        if g == 0.0 {
            continue;
        }
        let base = r * w.cols;
        for (i, &xi) in x.iter().enumerate() {
            w.grad[base + i] += g * xi;
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Affine map y = W x + b.
#[derive(Debug, Clone)]
pub struct Linear {
    pub w: Tensor,
    pub b: Tensor,
}

impl Linear {
    pub fn new(input: usize, output: usize, rng: &mut Rng) -> Self {
        Linear {
            w: Tensor::glorot(output, input, rng),
            b: Tensor::zeros(output, 1),
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = matvec(&self.w, x);
        for (yi, &bi) in y.iter_mut().zip(&self.b.data) {
            *yi += bi;
        }
        y
    }

    /// Accumulates parameter grads and returns dx.
    pub fn backward(&mut self, x: &[f64], dy: &[f64]) -> Vec<f64> {
        outer_add(&mut self.w, dy, x);
        self.b.grad_row_add(0, dy);
        let mut dx = vec![0.0; self.w.cols];
        matvec_t_add(&self.w, dy, &mut dx);
        dx
    }
}

/// GRU cell:
///
/// ```text
/// z = s(Wz x + Uz h + bz)         r = s(Wr x + Ur h + br)
/// n = tanh(Wn x + bn + r * (Un h + bnh))
/// h' = (1 - z) * n + z * h
/// ```
#[derive(Debug, Clone)]
pub struct GruCell {
    pub input: usize,
    pub hidden: usize,
    pub w_z: Tensor,
    pub u_z: Tensor,
    pub b_z: Tensor,
    pub w_r: Tensor,
    pub u_r: Tensor,
    pub b_r: Tensor,
    pub w_n: Tensor,
    pub u_n: Tensor,
    pub b_n: Tensor,
    pub b_nh: Tensor,
}

/// Per-step activations needed by the backward pass.
#[derive(Debug, Clone)]
pub struct GruStepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    n: Vec<f64>,
    m: Vec<f64>,
}

impl GruCell {
    pub fn new(input: usize, hidden: usize, rng: &mut Rng) -> Self {
        GruCell {
            input,
            hidden,
            w_z: Tensor::glorot(hidden, input, rng),
            u_z: Tensor::glorot(hidden, hidden, rng),
            b_z: Tensor::zeros(hidden, 1),
            w_r: Tensor::glorot(hidden, input, rng),
            u_r: Tensor::glorot(hidden, hidden, rng),
            b_r: Tensor::zeros(hidden, 1),
            w_n: Tensor::glorot(hidden, input, rng),
            u_n: Tensor::glorot(hidden, hidden, rng),
            b_n: Tensor::zeros(hidden, 1),
            b_nh: Tensor::zeros(hidden, 1),
        }
    }

    pub fn step(&self, x: &[f64], h_prev: &[f64]) -> (Vec<f64>, GruStepCache) {
        let h = self.hidden;
        let mut z = matvec(&self.w_z, x);
        let uzh = matvec(&self.u_z, h_prev);
        let mut r = matvec(&self.w_r, x);
        let urh = matvec(&self.u_r, h_prev);
        let mut m = matvec(&self.u_n, h_prev);
        let wnx = matvec(&self.w_n, x);
        let mut n = vec![0.0; h];
        let mut out = vec![0.0; h];
        for i in 0..h {
            z[i] = sigmoid(z[i] + uzh[i] + self.b_z.data[i]);
            r[i] = sigmoid(r[i] + urh[i] + self.b_r.data[i]);
            m[i] += self.b_nh.data[i];
            n[i] = (wnx[i] + self.b_n.data[i] + r[i] * m[i]).tanh();
            out[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
        }
        let cache = GruStepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            z: z.clone(),
            r: r.clone(),
            n: n.clone(),
            m: m.clone(),
        };
        (out, cache)
    }

    /// Backward through one step. `dh` is the gradient wrt this step's
    /// output; returns (dx, dh_prev) and accumulates parameter grads.
    pub fn step_backward(&mut self, dh: &[f64], cache: &GruStepCache) -> (Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        let mut dx = vec![0.0; self.input];
        let mut dh_prev = vec![0.0; h];
        let mut da_n = vec![0.0; h];
        let mut dm = vec![0.0; h];
        let mut da_r = vec![0.0; h];
        let mut da_z = vec![0.0; h];
        for i in 0..h {
            let dn = dh[i] * (1.0 - cache.z[i]);
            let dz = dh[i] * (cache.h_prev[i] - cache.n[i]);
            dh_prev[i] += dh[i] * cache.z[i];
            da_n[i] = dn * (1.0 - cache.n[i] * cache.n[i]);
            dm[i] = da_n[i] * cache.r[i];
            let dr = da_n[i] * cache.m[i];
            da_r[i] = dr * cache.r[i] * (1.0 - cache.r[i]);
            da_z[i] = dz * cache.z[i] * (1.0 - cache.z[i]);
        }
        // candidate gate
        outer_add(&mut self.w_n, &da_n, &cache.x);
        self.b_n.grad_row_add(0, &da_n);
        matvec_t_add(&self.w_n, &da_n, &mut dx);
        outer_add(&mut self.u_n, &dm, &cache.h_prev);
        self.b_nh.grad_row_add(0, &dm);
        matvec_t_add(&self.u_n, &dm, &mut dh_prev);
        // reset gate
        outer_add(&mut self.w_r, &da_r, &cache.x);
        outer_add(&mut self.u_r, &da_r, &cache.h_prev);
        self.b_r.grad_row_add(0, &da_r);
        matvec_t_add(&self.w_r, &da_r, &mut dx);
        matvec_t_add(&self.u_r, &da_r, &mut dh_prev);
        // update gate
        outer_add(&mut self.w_z, &da_z, &cache.x);
        outer_add(&mut self.u_z, &da_z, &cache.h_prev);
        self.b_z.grad_row_add(0, &da_z);
        matvec_t_add(&self.w_z, &da_z, &mut dx);
        matvec_t_add(&self.u_z, &da_z, &mut dh_prev);
        (dx, dh_prev)
    }

    pub fn visit<'a>(&'a self, name: &str, f: &mut dyn FnMut(String, &'a Tensor)) {
        for (suffix, t) in self.named() {
            f(format!("{name}.{suffix}"), t);
        }
    }

    fn named(&self) -> [(&'static str, &Tensor); 10] {
        [
            ("w_z", &self.w_z),
            ("u_z", &self.u_z),
            ("b_z", &self.b_z),
            ("w_r", &self.w_r),
            ("u_r", &self.u_r),
            ("b_r", &self.b_r),
            ("w_n", &self.w_n),
            ("u_n", &self.u_n),
            ("b_n", &self.b_n),
            ("b_nh", &self.b_nh),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor; 10] {
        [
            &mut self.w_z,
            &mut self.u_z,
            &mut self.b_z,
            &mut self.w_r,
            &mut self.u_r,
            &mut self.b_r,
            &mut self.w_n,
            &mut self.u_n,
            &mut self.b_n,
            &mut self.b_nh,
        ]
    }
}

/// Bidirectional GRU over a token sequence; outputs concatenate the forward
/// and backward hidden states at each position.
#[derive(Debug, Clone)]
pub struct BiGru {
    pub fwd: GruCell,
    pub bwd: GruCell,
}

pub struct BiGruCache {
    fwd_steps: Vec<GruStepCache>,
    bwd_steps: Vec<GruStepCache>,
}

impl BiGru {
    pub fn new(input: usize, hidden: usize, rng: &mut Rng) -> Self {
        BiGru {
            fwd: GruCell::new(input, hidden, rng),
            bwd: GruCell::new(input, hidden, rng),
        }
    }

    pub fn hidden(&self) -> usize {
        self.fwd.hidden
    }

    pub fn run(&self, xs: &[Vec<f64>]) -> (Vec<Vec<f64>>, BiGruCache) {
        let n = xs.len();
        let h = self.fwd.hidden;
        let mut outputs = vec![vec![0.0; 2 * h]; n];
        let mut fwd_steps = Vec::with_capacity(n);
        let mut state = vec![0.0; h];
        for (t, x) in xs.iter().enumerate() {
            let (next, cache) = self.fwd.step(x, &state);
            outputs[t][..h].copy_from_slice(&next);
            fwd_steps.push(cache);
            state = next;
        }
        let mut bwd_steps = Vec::with_capacity(n);
        let mut state = vec![0.0; h];
        for (t, x) in xs.iter().enumerate().rev() {
            let (next, cache) = self.bwd.step(x, &state);
            outputs[t][h..].copy_from_slice(&next);
            bwd_steps.push(cache); // stored in reverse time order
            state = next;
        }
        (outputs, BiGruCache {
            fwd_steps,
            bwd_steps,
        })
    }

    /// Backward through the whole sequence; returns input gradients.
    pub fn backward(&mut self, d_outputs: &[Vec<f64>], cache: &BiGruCache) -> Vec<Vec<f64>> {
        let n = d_outputs.len();
        let h = self.fwd.hidden;
        let mut d_xs = vec![vec![0.0; self.fwd.input]; n];
        // forward direction: walk time backwards
        let mut chain = vec![0.0; h];
        for t in (0..n).rev() {
            let mut dh = chain.clone();
            for i in 0..h {
                dh[i] += d_outputs[t][i];
            }
            let (dx, dh_prev) = self.fwd.step_backward(&dh, &cache.fwd_steps[t]);
            for (a, b) in d_xs[t].iter_mut().zip(&dx) {
                *a += b;
            }
            chain = dh_prev;
        }
        // backward direction: step s processed position n-1-s, so its chain
        // unrolls from s = n-1 (position 0) down to s = 0
        let mut chain = vec![0.0; h];
        for s in (0..n).rev() {
            let t = n - 1 - s;
            let mut dh = chain.clone();
            for i in 0..h {
                dh[i] += d_outputs[t][h + i];
            }
            let (dx, dh_prev) = self.bwd.step_backward(&dh, &cache.bwd_steps[s]);
            for (a, b) in d_xs[t].iter_mut().zip(&dx) {
                *a += b;
            }
            chain = dh_prev;
        }
        d_xs
    }
}

/// Inverted dropout mask: each slot is 0 with probability `p`, else
/// `1/(1-p)`.
pub fn dropout_mask(len: usize, p: f64, rng: &mut Rng) -> Vec<f64> {
    if p <= 0.0 {
        return vec![1.0; len];
    }
    let keep = 1.0 / (1.0 - p);
    (0..len)
        .map(|_| if rng.next_f64() < p { 0.0 } else { keep })
        .collect()
}
