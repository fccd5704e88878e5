use crate::embedstore::ProjectionWeights;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Adam over both projection matrices.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    step: i32,
    m: ProjectionWeights<T>,
    v: ProjectionWeights<T>,
}

fn zeros_like<T: Scalar>(w: &ProjectionWeights<T>) -> ProjectionWeights<T> {
    ProjectionWeights::new(
        Matrix::zeros(w.d_out(), w.d_vision_in()),
        Matrix::zeros(w.d_out(), w.d_text_in()),
    )
    .expect("same shape as a valid checkpoint")
}

fn update<T: Scalar>(w: &mut Matrix<T>, g: &Matrix<T>, m: &mut Matrix<T>, v: &mut Matrix<T>, c: (T, T, T, T, T, T)) {
    let (lr, b1, b2, eps, bc1, bc2) = c;
    for (((wi, &gi), mi), vi) in w.data_mut().iter_mut().zip(g.data()).zip(m.data_mut()).zip(v.data_mut()) {
        *mi = b1 * *mi + (T::one() - b1) * gi;
        *vi = b2 * *vi + (T::one() - b2) * gi * gi;
        let mhat = *mi / bc1;
        let vhat = *vi / bc2;
        *wi = *wi - lr * mhat / (vhat.sqrt() + eps);
    }
}

impl<T: Scalar> Adam<T> {
    pub fn new(learning_rate: T, like: &ProjectionWeights<T>) -> Self {
        Self {
            learning_rate,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            step: 0,
            m: zeros_like(like),
            v: zeros_like(like),
        }
    }

    pub fn steps(&self) -> i32 {
        self.step
    }

    pub fn step(&mut self, weights: &mut ProjectionWeights<T>, grads: &ProjectionWeights<T>) {
        if self.learning_rate == T::zero() {
            self.step += 1;
            return;
        }
        self.step += 1;
        let bc1 = T::one() - self.beta1.powi(self.step);
        let bc2 = T::one() - self.beta2.powi(self.step);
        let c = (self.learning_rate, self.beta1, self.beta2, self.eps, bc1, bc2);
        update(weights.vision_mut(), grads.vision(), self.m.vision_mut(), self.v.vision_mut(), c);
        update(weights.text_mut(), grads.text(), self.m.text_mut(), self.v.text_mut(), c);
    }
}
