//! Classical fixed-step RK4 over a state vector, allocation-free per step.

use crate::scalar::{cast, RamanScalar};

pub(crate) struct Rk4Workspace<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    stage: Vec<T>,
}

impl<T: RamanScalar> Rk4Workspace<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![T::zero(); dim],
            k2: vec![T::zero(); dim],
            k3: vec![T::zero(); dim],
            k4: vec![T::zero(); dim],
            stage: vec![T::zero(); dim],
        }
    }

    /// Advance `y` in place by one step of size `h` for the autonomous
    /// system `dy = f(y)`; `f(y, dy)` writes the derivative into `dy`.
    pub fn step<F>(&mut self, y: &mut [T], h: T, f: &F)
    where
        F: Fn(&[T], &mut [T]),
    {
        let half = cast::<T>(0.5);
        let sixth = T::one() / cast::<T>(6.0);
        let two = cast::<T>(2.0);

        f(y, &mut self.k1);
        for i in 0..y.len() {
            self.stage[i] = y[i] + half * h * self.k1[i];
        }
        f(&self.stage, &mut self.k2);
        for i in 0..y.len() {
            self.stage[i] = y[i] + half * h * self.k2[i];
        }
        f(&self.stage, &mut self.k3);
        for i in 0..y.len() {
            self.stage[i] = y[i] + h * self.k3[i];
        }
        f(&self.stage, &mut self.k4);
        for i in 0..y.len() {
            y[i] = y[i]
                + h * sixth * (self.k1[i] + two * self.k2[i] + two * self.k3[i] + self.k4[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential_decay() {
        // dy = -y, y(0) = 1 -> y(1) = 1/e
        let mut ws = Rk4Workspace::new(1);
        let mut y = vec![1.0_f64];
        let h = 0.05;
        for _ in 0..20 {
            ws.step(&mut y, h, &|y, dy| dy[0] = -y[0]);
        }
        assert!((y[0] - (-1.0_f64).exp()).abs() < 1e-7);
    }
}
