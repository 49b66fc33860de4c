//! Cubic 3D complex FFTs built from rustfft line transforms, plus packing of
//! real fields in pairs (`a + i b`) so two real transforms cost one complex one.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Plans for an `m × m × m` transform; layout index `i + m (j + m l)`.
pub struct Fft3 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft3 {
    /// Shared plan for size `m`.
    pub fn get(m: usize) -> Arc<Fft3> {
        let mut map = cache().lock().expect("fft plan cache poisoned");
        map.entry(m)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    m,
                    forward: planner.plan_fft_forward(m),
                    inverse: planner.plan_fft_inverse(m),
                })
            })
            .clone()
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Unnormalized `Σ_x f(x) e^{-ik·x}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalized `Σ_k f(k) e^{ik·x}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        let plane = m * m;
        assert_eq!(data.len(), plane * m, "buffer does not match transform size");

        // x: rows are contiguous
        data.par_chunks_mut(plane).for_each(|p| plan.process(p));

        // y: transpose each plane, transform rows, transpose back
        data.par_chunks_mut(plane).for_each(|p| {
            let mut t = vec![Complex64::default(); plane];
            for j in 0..m {
                for i in 0..m {
                    t[i * m + j] = p[i + m * j];
                }
            }
            plan.process(&mut t);
            for j in 0..m {
                for i in 0..m {
                    p[i + m * j] = t[i * m + j];
                }
            }
        });

        // z: gather lines of stride m², transform, scatter
        let mut t = vec![Complex64::default(); plane * m];
        {
            let src = &*data;
            t.par_chunks_mut(m).enumerate().for_each(|(p, line)| {
                for (l, v) in line.iter_mut().enumerate() {
                    *v = src[p + plane * l];
                }
            });
        }
        t.par_chunks_mut(plane).for_each(|c| plan.process(c));
        data.par_chunks_mut(plane).enumerate().for_each(|(l, out)| {
            for (p, v) in out.iter_mut().enumerate() {
                *v = t[p * m + l];
            }
        });
    }

    /// Inverse transforms of conjugate-symmetric spectra into real fields.
    /// Spectra are consumed two at a time through one complex transform.
    pub fn inverse_real(&self, spectra: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let len = self.m * self.m * self.m;
        let mut out = Vec::with_capacity(spectra.len());
        for pair in spectra.chunks(2) {
            let mut buf: Vec<Complex64> = match pair {
                [a, b] => a
                    .par_iter()
                    .zip(b.par_iter())
                    .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
                    .collect(),
                [a] => a.to_vec(),
                _ => unreachable!(),
            };
            debug_assert_eq!(buf.len(), len);
            self.inverse(&mut buf);
            out.push(buf.iter().map(|z| z.re).collect());
            if pair.len() == 2 {
                out.push(buf.iter().map(|z| z.im).collect());
            }
        }
        out
    }

    /// Forward transforms of real fields, normalized by `1/m³` so that
    /// `f(x) = Σ_k ĉ(k) e^{ik·x}`. Output spectra are exactly conjugate-symmetric.
    pub fn forward_real(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let m = self.m;
        let len = m * m * m;
        let scale = 1.0 / len as f64;
        let conj_idx = |idx: usize| {
            let neg = |c: usize| (m - c) % m;
            neg(idx % m) + m * (neg((idx / m) % m) + m * neg(idx / (m * m)))
        };
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            match pair {
                [a, b] => {
                    let mut z: Vec<Complex64> =
                        a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect();
                    self.forward(&mut z);
                    let (fa, fb): (Vec<Complex64>, Vec<Complex64>) = (0..len)
                        .into_par_iter()
                        .map(|idx| {
                            let zk = z[idx];
                            let zc = z[conj_idx(idx)].conj();
                            let sa = (zk + zc) * (0.5 * scale);
                            let d = (zk - zc) * (0.5 * scale);
                            // (zk - zc) / (2i)
                            (sa, Complex64::new(d.im, -d.re))
                        })
                        .unzip();
                    out.push(fa);
                    out.push(fb);
                }
                [a] => {
                    let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                    self.forward(&mut z);
                    let fa: Vec<Complex64> = (0..len)
                        .into_par_iter()
                        .map(|idx| (z[idx] + z[conj_idx(idx)].conj()) * (0.5 * scale))
                        .collect();
                    out.push(fa);
                }
                _ => unreachable!(),
            }
        }
        debug_assert!(out.iter().all(|v| v.len() == len));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(m⁶) DFT, used as an independent oracle.
    fn naive_dft(data: &[Complex64], m: usize, sign: f64) -> Vec<Complex64> {
        let tau = 2.0 * std::f64::consts::PI / m as f64;
        let mut out = vec![Complex64::default(); data.len()];
        for (kidx, o) in out.iter_mut().enumerate() {
            let k = [kidx % m, (kidx / m) % m, kidx / (m * m)];
            for (xidx, v) in data.iter().enumerate() {
                let x = [xidx % m, (xidx / m) % m, xidx / (m * m)];
                let phase = sign * tau * ((k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) % m) as f64;
                *o += v * Complex64::from_polar(1.0, phase);
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let m = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<Complex64> =
            (0..m * m * m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut fast = data.clone();
        Fft3::get(m).forward(&mut fast);
        let slow = naive_dft(&data, m, -1.0);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut back = data.clone();
        Fft3::get(m).inverse(&mut back);
        let slow = naive_dft(&data, m, 1.0);
        for (a, b) in back.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn real_round_trip() {
        let m = 12;
        let len = m * m * m;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fields: Vec<Vec<f64>> = (0..3).map(|_| (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let fft = Fft3::get(m);
        let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
        let spectra = fft.forward_real(&refs);
        let srefs: Vec<&[Complex64]> = spectra.iter().map(|s| s.as_slice()).collect();
        let back = fft.inverse_real(&srefs);
        for (f, b) in fields.iter().zip(&back) {
            let num: f64 = f.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            let den: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(num / den < 1e-12, "round trip error {}", num / den);
        }
    }
}
