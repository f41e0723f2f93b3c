use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::{from_usize, Real};

pub(crate) fn forward<T: Real>(buf: &mut [Complex<T>]) {
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Unnormalized inverse followed by division by the length.
pub(crate) fn inverse<T: Real>(buf: &mut [Complex<T>]) {
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
    let inv = T::one() / from_usize::<T>(buf.len());
    for c in buf.iter_mut() {
        *c = *c * inv;
    }
}

/// Linear convolution `c[k] = sum_i a[i] b[k-i]`, zero padded to `len`.
pub(crate) fn linear_convolution<T: Real>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    debug_assert!(len >= a.len() + b.len() - 1);
    let pad = |v: &[T]| {
        let mut out = vec![Complex::new(T::zero(), T::zero()); len];
        for (o, x) in out.iter_mut().zip(v) {
            o.re = *x;
        }
        out
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * *y;
    }
    inverse(&mut fa);
    fa.into_iter().map(|c| c.re).collect()
}
