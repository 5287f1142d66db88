//! Seeded random generators for property and acceptance suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::matrix::Matrix;
use crate::poly::MultiPoly;
use crate::ratfunc::{DiffContext, RatFunc};
use crate::scalar::{rat, QuadScalar};
use crate::system::LinSystem;
use crate::tower::{StepKind, Tower};

pub struct Gen {
    rng: StdRng,
}

/// Context `t1..tm`.
pub fn t_context(m: usize) -> DiffContext {
    DiffContext::new((1..=m).map(|k| format!("t{k}")), None).expect("distinct names")
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: StdRng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn nonzero(&mut self, bound: i64) -> i64 {
        loop {
            let v = self.int(-bound, bound);
            if v != 0 {
                return v;
            }
        }
    }

    pub fn rational(&mut self) -> QuadScalar {
        let p = self.int(-6, 6);
        let q = self.int(1, 4);
        QuadScalar::from_rat(rat(p, q))
    }

    /// Up to `terms` terms of degree at most `deg` in each variable.
    pub fn poly(&mut self, nvars: usize, terms: usize, deg: u32) -> MultiPoly {
        let k = self.rng.gen_range(0..=terms);
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let e: Vec<u32> = (0..nvars).map(|_| self.rng.gen_range(0..=deg)).collect();
            out.push((e, self.rational()));
        }
        MultiPoly::from_terms(nvars, out)
    }

    pub fn nonzero_poly(&mut self, nvars: usize, terms: usize, deg: u32) -> MultiPoly {
        loop {
            let p = self.poly(nvars, terms.max(1), deg);
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn ratfunc(&mut self, nvars: usize) -> RatFunc {
        let num = self.poly(nvars, 3, 2);
        let den = self.nonzero_poly(nvars, 2, 2);
        RatFunc::new(num, den)
    }

    pub fn nonzero_ratfunc(&mut self, nvars: usize) -> RatFunc {
        loop {
            let f = self.ratfunc(nvars);
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// Gradient of `P + sum n_k log t_k` with `P` polynomial and integer
    /// `n_k`; `logs` switches the logarithmic part on.
    pub fn gradient(&mut self, m: usize, logs: bool) -> Vec<RatFunc> {
        let p = RatFunc::from_poly(self.poly(m, 2, 2));
        (0..m)
            .map(|j| {
                let mut g = p.partial(j);
                if logs {
                    let n = self.int(-2, 2);
                    if n != 0 {
                        g = &g + &RatFunc::var(m, j).inv().scale(&QuadScalar::from_int(n));
                    }
                }
                g
            })
            .collect()
    }

    /// Gradient of `log q` for a random linear `q` with positive constant.
    fn log_gradient(&mut self, m: usize) -> Vec<RatFunc> {
        let mut terms = vec![(vec![0; m], QuadScalar::from_int(self.int(1, 3)))];
        for k in 0..m {
            let mut e = vec![0; m];
            e[k] = 1;
            terms.push((e, QuadScalar::from_int(self.int(0, 2))));
        }
        let q = RatFunc::from_poly(MultiPoly::from_terms(m, terms));
        (0..m).map(|j| &q.partial(j) / &q).collect()
    }

    /// An integrable upper-triangular system of rank `r <= 2` over
    /// `t1..tm`. Rank two systems come from the fundamental matrix
    /// `[[e^P, e^S G + e^P F], [0, e^S]]`, with `F` present only when the
    /// diagonal exponents agree.
    pub fn triangular_system(&mut self, m: usize, r: usize) -> LinSystem {
        assert!((1..=2).contains(&r), "rank 1 or 2");
        let ctx = t_context(m);
        let a = self.gradient(m, true);
        if r == 1 {
            let ms = a.into_iter().map(|x| Matrix::from_rows(vec![vec![x]]).expect("1x1")).collect();
            return LinSystem::new(ctx, ms).expect("shapes");
        }
        let same = self.rng.gen_bool(0.4);
        let s = if same { a.clone() } else { self.gradient(m, true) };
        let g = RatFunc::from_poly(self.poly(m, 2, 2));
        let f: Vec<RatFunc> = if same {
            let p = RatFunc::from_poly(self.poly(m, 2, 2));
            let logs = if self.rng.gen_bool(0.5) { self.log_gradient(m) } else { vec![RatFunc::zero(m); m] };
            (0..m).map(|j| &p.partial(j) + &logs[j]).collect()
        } else {
            vec![RatFunc::zero(m); m]
        };
        let ms = (0..m)
            .map(|j| {
                let b = &(&g.partial(j) + &(&g * &(&s[j] - &a[j]))) + &f[j];
                Matrix::from_rows(vec![vec![a[j].clone(), b], vec![RatFunc::zero(m), s[j].clone()]]).expect("2x2")
            })
            .collect();
        LinSystem::new(ctx, ms).expect("shapes")
    }

    /// `A_j = f_j I + g_j C` with gradients `f`, `g` (monomial logarithms
    /// only) and an integer constant `2 x 2` matrix `C`.
    pub fn scalar_plus_constant(&mut self, m: usize) -> LinSystem {
        let ctx = t_context(m);
        let f = self.gradient(m, true);
        let g = loop {
            let logs = self.rng.gen_bool(0.3);
            let g = self.gradient(m, logs);
            if g.iter().any(|x| !x.is_zero()) {
                break g;
            }
        };
        let c: Vec<i64> = loop {
            let c: Vec<i64> = (0..4).map(|_| self.int(-3, 3)).collect();
            if c[1] != 0 || c[2] != 0 {
                break c;
            }
        };
        let ms = (0..m)
            .map(|j| {
                let e = |k: usize| g[j].scale(&QuadScalar::from_int(c[k]));
                Matrix::from_rows(vec![vec![&f[j] + &e(0), e(1)], vec![e(2), &f[j] + &e(3)]]).expect("2x2")
            })
            .collect();
        LinSystem::new(ctx, ms).expect("shapes")
    }

    /// Any system of the given rank (not necessarily integrable).
    pub fn system(&mut self, m: usize, r: usize) -> LinSystem {
        let ctx = t_context(m);
        let ms = (0..m)
            .map(|_| Matrix::from_rows((0..r).map(|_| (0..r).map(|_| self.ratfunc(m)).collect()).collect()).expect("square"))
            .collect();
        LinSystem::new(ctx, ms).expect("shapes")
    }

    /// A tower over `t1..tm` with up to `steps` random steps of every kind.
    pub fn tower(&mut self, m: usize, steps: usize) -> Tower {
        let mut t = Tower::new(t_context(m));
        for k in 0..steps {
            let n = t.nvars();
            let kind = match self.rng.gen_range(0..4) {
                0 => StepKind::Integral(self.gradient(m, true).iter().map(|x| x.pad_vars(n)).collect()),
                1 => StepKind::ExpIntegral(self.gradient(m, false).iter().map(|x| x.pad_vars(n)).collect()),
                2 => StepKind::RotationPair(self.gradient(m, false).iter().map(|x| x.pad_vars(n)).collect()),
                _ => {
                    let p = RatFunc::from_poly(&MultiPoly::var(m, k % m) * &self.nonzero_poly(m, 2, 1));
                    StepKind::Algebraic(vec![-p.pad_vars(n), RatFunc::zero(n)])
                }
            };
            let names: Vec<String> = match kind {
                StepKind::RotationPair(_) => vec![format!("s{k}"), format!("c{k}")],
                _ => vec![format!("g{k}")],
            };
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            if let Ok(next) = t.extend(&refs, kind) {
                t = next;
            }
        }
        t
    }

    /// Random characters drawn from the expression alphabet.
    pub fn token_soup(&mut self, len: usize) -> String {
        const PIECES: &[&str] = &[
            "t1", "t2", "x", "sqrt", "(", ")", "+", "-", "*", "/", "^", "0", "1", "7", "12", " ", ",", "[", "]", ":", "\n",
            "#", "vars", "rank", "matrix", "step", "base", "é", "99999999999999999999", "^-", ".",
        ];
        (0..len).map(|_| PIECES[self.rng.gen_range(0..PIECES.len())]).collect()
    }
}
