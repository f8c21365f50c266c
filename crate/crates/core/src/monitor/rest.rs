//! Block-level rest terms of the transport and drift operators, with the two
//! telescoping identities they satisfy evaluated on the grid.
//!
//! All products are taken pointwise on the collocation grid without
//! truncation, so both identities hold up to rounding for any input.

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::error::Result;
use crate::fluid::VelocityField;
use crate::kinetic::{PhaseField, Smoluchowski};
use crate::lp::blocks::{paraproduct_phys, remainder_phys, BlockStack};
use crate::lp::bony::stack2d;
use crate::lp::s_q;
use crate::scalar::{det_sum, Scalar};

/// The six rest terms at one block together with both sides of each identity.
#[derive(Clone, Debug)]
pub struct RestDecomposition<T: Scalar> {
    pub q: i32,
    /// `R_q^1 .. R_q^6` as angle-major collocation values.
    pub terms: [Vec<T>; 6],
    /// `Delta_q(v . grad f)`
    pub transport_lhs: Vec<T>,
    /// `S_{q-1} v . grad f_q`
    pub transport_main: Vec<T>,
    /// `Delta_q div_g(G(v, f) f)`
    pub drift_lhs: Vec<T>,
    /// `div_g(G(S_{q-1} v, S_{q-1} f) f_q)`
    pub drift_main: Vec<T>,
    pub term_norms: [T; 6],
    pub transport_residual: T,
    pub drift_residual: T,
    /// Residual over the larger of the summed norms of every piece and the
    /// norm of the undecomposed operator (which keeps blocks where the
    /// operator vanishes identically from dividing rounding by rounding).
    pub transport_relative: T,
    pub drift_relative: T,
}

/// Block stacks of one `(v, f)` pair, shared across all `q`.
pub struct RestDecomposer<'a, T: Scalar> {
    model: &'a Smoluchowski<T>,
    v: &'a VelocityField<T>,
    f: &'a PhaseField<T>,
    v_stacks: [BlockStack<T>; 2],
    a_stacks: Vec<BlockStack<T>>,
    f_stack: BlockStack<T>,
    df_stacks: [BlockStack<T>; 2],
    u_stack: BlockStack<T>,
    v_phys: [Vec<T>; 2],
    a_phys: Vec<Vec<T>>,
    f_phys: Vec<T>,
    df_phys: [Vec<T>; 2],
    u_phys: Vec<T>,
}

fn add_into<T: Scalar>(acc: &mut [T], x: &[T], s: T) {
    let n = x.len();
    acc.par_iter_mut().enumerate().for_each(|(i, a)| *a = *a + x[i % n] * s);
}

fn norm<T: Scalar>(x: &[T], vol: T) -> T {
    (det_sum(x.len(), |i| x[i] * x[i]) * vol).sqrt()
}

impl<'a, T: Scalar> RestDecomposer<'a, T> {
    pub fn new(model: &'a Smoluchowski<T>, v: &'a VelocityField<T>, f: &'a PhaseField<T>) -> Result<Self> {
        v.u[0].check_same_grid(&v.u[1])?;
        let pg = f.phase_grid();
        if pg.grid().spec() != v.grid().spec() {
            return Err(crate::Error::GridMismatch);
        }
        let ladder = pg.grid().ladder();
        let inv = |c: Vec<Complex<T>>| pg.to_values(&c);
        let phase_stack = |c: &[Complex<T>]| BlockStack::build(c, ladder, &inv);
        let grad = v.gradient();
        let a: Vec<_> = (0..4).map(|k| grad[k / 2][k % 2].clone()).collect();
        let df = [f.derivative_x(0), f.derivative_x(1)];
        let u = model.potential_gradient(f);
        Ok(Self {
            model,
            v,
            f,
            v_stacks: [stack2d(&v.u[0]), stack2d(&v.u[1])],
            a_stacks: a.iter().map(stack2d).collect(),
            f_stack: phase_stack(f.coeffs()),
            df_stacks: [phase_stack(df[0].coeffs()), phase_stack(df[1].coeffs())],
            u_stack: phase_stack(u.coeffs()),
            v_phys: v.physical(),
            a_phys: a.iter().map(|x| x.to_physical()).collect(),
            f_phys: f.values(),
            df_phys: [df[0].values(), df[1].values()],
            u_phys: u.values(),
        })
    }

    fn n(&self) -> usize {
        self.f_phys.len()
    }

    fn nxy(&self) -> usize {
        self.f.phase_grid().sites()
    }

    /// `Delta_q` in x of angle-major values.
    fn block_x(&self, vals: &[T], q: i32) -> Vec<T> {
        let pg = self.f.phase_grid();
        let Some(w) = pg.grid().ladder().block_weights(q) else {
            return vec![T::zero(); vals.len()];
        };
        let nxy = self.nxy();
        let c: Vec<Complex<T>> = pg.to_coeffs(vals).into_par_iter().enumerate().map(|(i, z)| z * w[i % nxy]).collect();
        pg.to_values(&c)
    }

    fn div_g(&self, vals: &[T]) -> Vec<T> {
        let pg = self.f.phase_grid();
        let d = pg.fiber().derivative_weights();
        let nxy = self.nxy();
        let c: Vec<Complex<T>> = pg.to_coeffs(vals).into_par_iter().enumerate().map(|(i, z)| z * d[i / nxy]).collect();
        pg.to_values(&c)
    }

    /// `c^{ij}(theta) * x` accumulated into `acc`.
    fn add_with_c(&self, acc: &mut [T], x: &[T], k: usize) {
        let c = &self.model.drift.table[k / 2][k % 2];
        let (nxy, nx) = (self.nxy(), x.len());
        acc.par_iter_mut().enumerate().for_each(|(i, a)| *a = *a + c[i / nxy] * x[i % nx]);
    }

    /// `Delta_{q-1} a * Delta_{q+1} b - Delta_{q-2} a * Delta_{q-1} b`
    fn shift_terms(&self, a: &BlockStack<T>, b: &BlockStack<T>, q: i32) -> Vec<T> {
        let mut out = vec![T::zero(); self.n()];
        for (qa, qb, s) in [(q - 1, q + 1, T::one()), (q - 2, q - 1, -T::one())] {
            if let (Some(x), Some(y)) = (a.block(qa), b.block(qb)) {
                let (nx, ny) = (x.len(), y.len());
                out.par_iter_mut().enumerate().for_each(|(i, o)| *o = *o + x[i % nx] * y[i % ny] * s);
            }
        }
        out
    }

    pub fn at(&self, q: i32) -> RestDecomposition<T> {
        let pg = self.f.phase_grid();
        let ladder = pg.grid().ladder();
        let n = self.n();
        let inv = |c: Vec<Complex<T>>| pg.to_values(&c);
        let xw = |q: i32| ladder.block_weights(q).map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); self.nxy()]);
        let fq = self.f.apply_x(&xw(q));
        let fq_stack = BlockStack::build(fq.coeffs(), ladder, &inv);
        let dfq = [fq.derivative_x(0), fq.derivative_x(1)];
        let dfq_stacks = [BlockStack::build(dfq[0].coeffs(), ladder, &inv), BlockStack::build(dfq[1].coeffs(), ladder, &inv)];
        let fq_phys = fq.values();
        let one = T::one();

        // transport: Delta_q(v.grad f) = R1 + R2 + R3 + S_{q-1}v.grad f_q
        let mut lhs_in = vec![T::zero(); n];
        let mut r1_in = vec![T::zero(); n];
        let mut r2_in = vec![T::zero(); n];
        let mut r2_out = vec![T::zero(); n];
        let mut r3_in = vec![T::zero(); n];
        let mut r3_out = vec![T::zero(); n];
        let mut main_t = vec![T::zero(); n];
        for j in 0..2 {
            let nxy = self.nxy();
            let (vj, dfj) = (&self.v_phys[j], &self.df_phys[j]);
            lhs_in.par_iter_mut().enumerate().for_each(|(i, o)| *o = *o + vj[i % nxy] * dfj[i]);
            add_into(&mut r1_in, &paraproduct_phys(&self.df_stacks[j], &self.v_stacks[j]), one);
            add_into(&mut r2_in, &paraproduct_phys(&self.v_stacks[j], &self.df_stacks[j]), one);
            add_into(&mut r2_out, &paraproduct_phys(&self.v_stacks[j], &dfq_stacks[j]), one);
            add_into(&mut r3_in, &remainder_phys(&self.v_stacks[j], &self.df_stacks[j]), one);
            add_into(&mut r3_out, &self.shift_terms(&self.v_stacks[j], &dfq_stacks[j], q), one);
            let low = s_q(&self.v.u[j], q - 1).to_physical();
            let d = dfq[j].values();
            main_t.par_iter_mut().enumerate().for_each(|(i, o)| *o = *o + low[i % nxy] * d[i]);
        }
        let transport_lhs = self.block_x(&lhs_in, q);
        let r1 = self.block_x(&r1_in, q);
        let mut r2 = self.block_x(&r2_in, q);
        add_into(&mut r2, &r2_out, -one);
        let mut r3 = self.block_x(&r3_in, q);
        add_into(&mut r3, &r3_out, one);

        // drift: Delta_q div_g(G f) = R4 + R5 + R6 + div_g(G(S_{q-1}v, S_{q-1}f) f_q)
        let mut g_in = vec![T::zero(); n];
        let mut r4_in = vec![T::zero(); n];
        let mut r5_in = vec![T::zero(); n];
        let mut r5_out = vec![T::zero(); n];
        let mut r6_in = vec![T::zero(); n];
        let mut r6_out = vec![T::zero(); n];
        let mut g_low = vec![T::zero(); n];
        let nxy = self.nxy();
        let grad = self.v.gradient();
        for k in 0..4 {
            let a = &self.a_phys[k];
            let af: Vec<T> = self.f_phys.par_iter().enumerate().map(|(i, &x)| x * a[i % nxy]).collect();
            self.add_with_c(&mut g_in, &af, k);
            let ak = &self.a_stacks[k];
            self.add_with_c(&mut r4_in, &paraproduct_phys(&self.f_stack, ak), k);
            self.add_with_c(&mut r5_in, &paraproduct_phys(ak, &self.f_stack), k);
            self.add_with_c(&mut r5_out, &paraproduct_phys(ak, &fq_stack), k);
            self.add_with_c(&mut r6_in, &remainder_phys(ak, &self.f_stack), k);
            self.add_with_c(&mut r6_out, &self.shift_terms(ak, &fq_stack, q), k);
            let low = s_q(&grad[k / 2][k % 2], q - 1).to_physical();
            self.add_with_c(&mut g_low, &low, k);
        }
        let uf: Vec<T> = self.u_phys.par_iter().zip(self.f_phys.par_iter()).map(|(&a, &b)| a * b).collect();
        add_into(&mut g_in, &uf, one);
        add_into(&mut r4_in, &paraproduct_phys(&self.f_stack, &self.u_stack), one);
        add_into(&mut r5_in, &paraproduct_phys(&self.u_stack, &self.f_stack), one);
        add_into(&mut r5_out, &paraproduct_phys(&self.u_stack, &fq_stack), one);
        add_into(&mut r6_in, &remainder_phys(&self.u_stack, &self.f_stack), one);
        add_into(&mut r6_out, &self.shift_terms(&self.u_stack, &fq_stack, q), one);
        let low_u = pg.to_values(self.model.potential_gradient(&self.f.apply_x(&low_pass(ladder.low_pass_weights(q - 1), nxy))).coeffs());
        add_into(&mut g_low, &low_u, one);
        let main_in: Vec<T> = g_low.par_iter().zip(fq_phys.par_iter()).map(|(&g, &x)| g * x).collect();

        let drift_lhs = self.div_g(&self.block_x(&g_in, q));
        let r4 = self.div_g(&self.block_x(&r4_in, q));
        let mut r5_pre = self.block_x(&r5_in, q);
        add_into(&mut r5_pre, &r5_out, -one);
        let r5 = self.div_g(&r5_pre);
        let mut r6_pre = self.block_x(&r6_in, q);
        add_into(&mut r6_pre, &r6_out, one);
        let r6 = self.div_g(&r6_pre);
        let drift_main = self.div_g(&main_in);

        let vol = pg.cell_volume();
        let terms = [r1, r2, r3, r4, r5, r6];
        let term_norms = [0, 1, 2, 3, 4, 5].map(|l| norm(&terms[l], vol));
        let full_t = norm(&lhs_in, vol);
        let full_d = norm(&self.div_g(&g_in), vol);
        let residual = |lhs: &[T], main: &[T], ls: std::ops::Range<usize>, full: T| {
            let r: Vec<T> = (0..n).into_par_iter().map(|i| ls.clone().fold(lhs[i] - main[i], |acc, l| acc - terms[l][i])).collect();
            let scale = ls.clone().fold(norm(lhs, vol) + norm(main, vol), |acc, l| acc + term_norms[l]).max(full);
            let abs = norm(&r, vol);
            (abs, if scale > T::zero() { abs / scale } else { T::zero() })
        };
        let (transport_residual, transport_relative) = residual(&transport_lhs, &main_t, 0..3, full_t);
        let (drift_residual, drift_relative) = residual(&drift_lhs, &drift_main, 3..6, full_d);
        RestDecomposition {
            q,
            terms,
            transport_lhs,
            transport_main: main_t,
            drift_lhs,
            drift_main,
            term_norms,
            transport_residual,
            drift_residual,
            transport_relative,
            drift_relative,
        }
    }
}

fn low_pass<T: Scalar>(w: Option<&[T]>, n: usize) -> Vec<T> {
    w.map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); n])
}

/// Rest terms of `(v, f)` at block `q`.
pub fn rest_decomposition<T: Scalar>(model: &Smoluchowski<T>, v: &VelocityField<T>, f: &PhaseField<T>, q: i32) -> Result<RestDecomposition<T>> {
    Ok(RestDecomposer::new(model, v, f)?.at(q))
}
