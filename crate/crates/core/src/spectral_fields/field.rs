use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use super::spectral;
use crate::error::{contract, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Co,
    Contra,
}

pub const SCALAR: &[Slot] = &[];
pub const VECTOR: &[Slot] = &[Slot::Contra];
pub const COVECTOR: &[Slot] = &[Slot::Co];
pub const BILINEAR: &[Slot] = &[Slot::Co, Slot::Co];
pub const ENDO: &[Slot] = &[Slot::Co, Slot::Contra];
pub const BIVECTOR: &[Slot] = &[Slot::Contra, Slot::Contra];

/// Real tensor field sampled on a torus grid.
///
/// Component `c` is stored contiguously over the grid at `data[c * npts..]`;
/// `c` enumerates slot indices row-major with the first slot outermost. An
/// endomorphism A has slots (Co, Contra) and component (a, b) = A^b_a, so
/// (A xi)^b = sum_a xi^a A(a, b).
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: TorusGrid,
    slots: Vec<Slot>,
    data: Vec<f64>,
}

fn digits(mut c: usize, d: usize, rank: usize, out: &mut [usize]) {
    for k in (0..rank).rev() {
        out[k] = c % d;
        c /= d;
    }
}

fn flat(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

fn acc_prod(out: &mut [f64], a: &[f64], b: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o += x * y;
    }
}

fn acc_scaled(out: &mut [f64], s: f64, a: &[f64]) {
    for (o, x) in out.iter_mut().zip(a) {
        *o += s * x;
    }
}

impl TensorField {
    pub fn zeros(grid: TorusGrid, slots: &[Slot]) -> Self {
        let ncomp = grid.dim().pow(slots.len() as u32);
        Self { grid, slots: slots.to_vec(), data: vec![0.0; ncomp * grid.npts()] }
    }

    pub fn from_data(grid: TorusGrid, slots: &[Slot], data: Vec<f64>) -> Result<Self> {
        let want = grid.dim().pow(slots.len() as u32) * grid.npts();
        if data.len() != want {
            return contract(format!("component array has {} entries, expected {want}", data.len()));
        }
        Ok(Self { grid, slots: slots.to_vec(), data })
    }

    pub fn scalar(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_data(grid, SCALAR, values)
    }

    pub fn constant_scalar(grid: TorusGrid, c: f64) -> Self {
        Self { grid, slots: vec![], data: vec![c; grid.npts()] }
    }

    /// Field with spatially constant components given in component order.
    pub fn constant(grid: TorusGrid, slots: &[Slot], comps: &[f64]) -> Result<Self> {
        let mut f = Self::zeros(grid, slots);
        if comps.len() != f.ncomp() {
            return contract(format!("{} constant components for {} slots", comps.len(), slots.len()));
        }
        for (c, &v) in comps.iter().enumerate() {
            f.comp_mut(c).fill(v);
        }
        Ok(f)
    }

    /// Build from a closure of (component multi-index, point coordinates).
    pub fn from_fn(grid: TorusGrid, slots: &[Slot], f: impl Fn(&[usize], &[f64]) -> f64) -> Self {
        let mut out = Self::zeros(grid, slots);
        let d = grid.dim();
        let rank = slots.len();
        let npts = grid.npts();
        let mut idx = vec![0; rank];
        let mut x = vec![0.0; d];
        for c in 0..out.ncomp() {
            digits(c, d, rank, &mut idx);
            let comp = &mut out.data[c * npts..(c + 1) * npts];
            for (p, v) in comp.iter_mut().enumerate() {
                grid.coords(p, &mut x);
                *v = f(&idx, &x);
            }
        }
        out
    }

    pub fn identity(grid: TorusGrid) -> Self {
        let d = grid.dim();
        let comps: Vec<f64> = (0..d * d).map(|c| if c / d == c % d { 1.0 } else { 0.0 }).collect();
        Self::constant(grid, ENDO, &comps).expect("identity shape")
    }

    /// Flat Euclidean metric delta_ab.
    pub fn flat_metric(grid: TorusGrid) -> Self {
        let mut g = Self::identity(grid);
        g.slots = BILINEAR.to_vec();
        g
    }

    /// Standard complex structure: J d/dx_k = d/dy_k, J d/dy_k = -d/dx_k.
    pub fn standard_j(grid: TorusGrid) -> Self {
        let n = grid.n();
        let d = grid.dim();
        let mut comps = vec![0.0; d * d];
        for k in 0..n {
            comps[k * d + (n + k)] = 1.0;
            comps[(n + k) * d + k] = -1.0;
        }
        Self::constant(grid, ENDO, &comps).expect("J shape")
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn ncomp(&self) -> usize {
        self.dim().pow(self.rank() as u32)
    }

    pub fn npts(&self) -> usize {
        self.grid.npts()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.npts();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.npts();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn comp_at(&self, idx: &[usize]) -> &[f64] {
        self.comp(flat(idx, self.dim()))
    }

    pub fn value(&self, idx: &[usize], p: usize) -> f64 {
        self.comp_at(idx)[p]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn relabel(mut self, slots: &[Slot]) -> Result<Self> {
        if slots.len() != self.rank() {
            return contract("relabel must keep the rank");
        }
        self.slots = slots.to_vec();
        Ok(self)
    }

    pub(crate) fn check_same(&self, o: &Self) -> Result<()> {
        if self.grid != o.grid {
            return contract("fields live on different grids");
        }
        if self.slots != o.slots {
            return contract(format!("valence mismatch {:?} vs {:?}", self.slots, o.slots));
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, o: &Self) -> Result<()> {
        if self.grid != o.grid {
            return contract("fields live on different grids");
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// self += s * o
    pub fn axpy(&mut self, s: f64, o: &Self) -> Result<()> {
        self.check_same(o)?;
        acc_scaled(&mut self.data, s, &o.data);
        Ok(())
    }

    /// Linear combination sum_i c_i T_i of equally shaped fields.
    pub fn combine(terms: &[(f64, &Self)]) -> Result<Self> {
        let Some((c0, t0)) = terms.first() else {
            return contract("empty combination");
        };
        let mut out = t0.scale(*c0);
        for (c, t) in &terms[1..] {
            out.axpy(*c, t)?;
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Pointwise product with a scalar field.
    pub fn mul_scalar(&self, s: &Self) -> Result<Self> {
        self.check_grid(s)?;
        if s.rank() != 0 {
            return contract("mul_scalar expects a scalar field");
        }
        let mut out = self.clone();
        let n = self.npts();
        for c in 0..self.ncomp() {
            for (v, w) in out.data[c * n..(c + 1) * n].iter_mut().zip(&s.data) {
                *v *= w;
            }
        }
        Ok(out)
    }

    pub fn outer(&self, o: &Self) -> Result<Self> {
        self.check_grid(o)?;
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&o.slots);
        let mut out = Self::zeros(self.grid, &slots);
        let nb = o.ncomp();
        for ca in 0..self.ncomp() {
            for cb in 0..nb {
                let dst = out.comp_mut(ca * nb + cb);
                for ((v, x), y) in dst.iter_mut().zip(self.comp(ca)).zip(o.comp(cb)) {
                    *v = x * y;
                }
            }
        }
        Ok(out)
    }

    /// Contract slot `sa` of self against slot `sb` of `o` (one covariant, one
    /// contravariant). Result slots: self without `sa`, then `o` without `sb`.
    pub fn contract(&self, sa: usize, o: &Self, sb: usize) -> Result<Self> {
        self.check_grid(o)?;
        if sa >= self.rank() || sb >= o.rank() {
            return contract("contraction slot out of range");
        }
        if self.slots[sa] == o.slots[sb] {
            return contract(format!("cannot contract two {:?} slots without a metric", self.slots[sa]));
        }
        Ok(self.contract_raw(sa, o, sb))
    }

    /// Index contraction without the slot-kind check; used by metric raising
    /// and lowering.
    pub(crate) fn contract_raw(&self, sa: usize, o: &Self, sb: usize) -> Self {
        let d = self.dim();
        let (ra, rb) = (self.rank(), o.rank());
        let mut slots: Vec<Slot> = self.slots.clone();
        slots.remove(sa);
        let mut sl_b = o.slots.clone();
        sl_b.remove(sb);
        slots.extend(sl_b);
        let mut out = Self::zeros(self.grid, &slots);
        let rout = ra + rb - 2;
        let mut idx = vec![0; rout];
        let mut ia = vec![0; ra];
        let mut ib = vec![0; rb];
        for oc in 0..out.ncomp() {
            digits(oc, d, rout, &mut idx);
            let mut k = 0;
            for (s, v) in ia.iter_mut().enumerate() {
                if s != sa {
                    *v = idx[k];
                    k += 1;
                }
            }
            for (s, v) in ib.iter_mut().enumerate() {
                if s != sb {
                    *v = idx[k];
                    k += 1;
                }
            }
            let n = self.npts();
            let dst = &mut out.data[oc * n..(oc + 1) * n];
            for e in 0..d {
                ia[sa] = e;
                ib[sb] = e;
                acc_prod(dst, self.comp(flat(&ia, d)), o.comp(flat(&ib, d)));
            }
        }
        out
    }

    /// Lower slot `s` with g, keeping its position.
    pub fn lower(&self, s: usize, g: &Self) -> Result<Self> {
        self.check_grid(g)?;
        if s >= self.rank() || self.slots[s] != Slot::Contra || g.slots != BILINEAR {
            return contract("lower needs a contravariant slot and a (Co, Co) metric");
        }
        self.contract_raw(s, g, 0).move_last_to(s)
    }

    /// Raise slot `s` with g^{-1}, keeping its position.
    pub fn raise(&self, s: usize, ginv: &Self) -> Result<Self> {
        self.check_grid(ginv)?;
        if s >= self.rank() || self.slots[s] != Slot::Co || ginv.slots != BIVECTOR {
            return contract("raise needs a covariant slot and a (Contra, Contra) inverse metric");
        }
        self.contract_raw(s, ginv, 0).move_last_to(s)
    }

    /// Move the last slot to position `s`.
    pub fn move_last_to(&self, s: usize) -> Result<Self> {
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r - 1).collect();
        perm.insert(s, r - 1);
        self.permute(&perm)
    }

    /// Move slot `s` to the end.
    pub fn move_to_last(&self, s: usize) -> Result<Self> {
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r).filter(|&i| i != s).collect();
        perm.push(s);
        self.permute(&perm)
    }

    /// Trace over a covariant/contravariant slot pair.
    pub fn trace(&self, s1: usize, s2: usize) -> Result<Self> {
        if s1 == s2 || s1 >= self.rank() || s2 >= self.rank() {
            return contract("trace slots must be distinct and in range");
        }
        if self.slots[s1] == self.slots[s2] {
            return contract("plain trace needs one covariant and one contravariant slot");
        }
        self.pair_reduce(s1, s2, None)
    }

    /// Trace of two covariant slots with an inverse metric (Contra, Contra).
    pub fn metric_trace(&self, s1: usize, s2: usize, ginv: &Self) -> Result<Self> {
        if s1 == s2 || s1 >= self.rank() || s2 >= self.rank() {
            return contract("trace slots must be distinct and in range");
        }
        if self.slots[s1] != Slot::Co || self.slots[s2] != Slot::Co {
            return contract("metric trace needs two covariant slots");
        }
        if ginv.slots != BIVECTOR {
            return contract("metric trace needs an inverse metric with two contravariant slots");
        }
        self.check_grid(ginv)?;
        self.pair_reduce(s1, s2, Some(ginv))
    }

    fn pair_reduce(&self, s1: usize, s2: usize, ginv: Option<&Self>) -> Result<Self> {
        let d = self.dim();
        let r = self.rank();
        let slots: Vec<Slot> =
            self.slots.iter().enumerate().filter(|(i, _)| *i != s1 && *i != s2).map(|(_, s)| *s).collect();
        let mut out = Self::zeros(self.grid, &slots);
        let mut idx = vec![0; r - 2];
        let mut full = vec![0; r];
        let n = self.npts();
        for oc in 0..out.ncomp() {
            digits(oc, d, r - 2, &mut idx);
            let mut k = 0;
            for (s, v) in full.iter_mut().enumerate() {
                if s != s1 && s != s2 {
                    *v = idx[k];
                    k += 1;
                }
            }
            let dst = &mut out.data[oc * n..(oc + 1) * n];
            match ginv {
                None => {
                    for e in 0..d {
                        full[s1] = e;
                        full[s2] = e;
                        acc_scaled(dst, 1.0, self.comp(flat(&full, d)));
                    }
                }
                Some(gi) => {
                    for a in 0..d {
                        for b in 0..d {
                            full[s1] = a;
                            full[s2] = b;
                            acc_prod(dst, gi.comp(a * d + b), self.comp(flat(&full, d)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reorder slots: new slot i is old slot `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return contract(format!("{perm:?} is not a permutation of {r} slots"));
        }
        let d = self.dim();
        let slots: Vec<Slot> = perm.iter().map(|&p| self.slots[p]).collect();
        let mut out = Self::zeros(self.grid, &slots);
        let mut idx = vec![0; r];
        let mut old = vec![0; r];
        let n = self.npts();
        for c in 0..out.ncomp() {
            digits(c, d, r, &mut idx);
            for (i, &p) in perm.iter().enumerate() {
                old[p] = idx[i];
            }
            out.data[c * n..(c + 1) * n].copy_from_slice(self.comp(flat(&old, d)));
        }
        Ok(out)
    }

    pub fn transpose_slots(&self, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        if a >= perm.len() || b >= perm.len() {
            return contract("transpose slot out of range");
        }
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Endomorphism composition self o b, i.e. (self o b) xi = self(b xi).
    pub fn compose(&self, b: &Self) -> Result<Self> {
        if self.slots != ENDO || b.slots != ENDO {
            return contract("compose expects two endomorphism fields");
        }
        b.contract(1, self, 0)
    }

    /// Commutator [self, b] of endomorphisms.
    pub fn commutator(&self, b: &Self) -> Result<Self> {
        self.compose(b)?.sub(&b.compose(self)?)
    }

    /// Endomorphism applied to a vector field.
    pub fn apply(&self, xi: &Self) -> Result<Self> {
        if self.slots != ENDO || xi.slots != VECTOR {
            return contract("apply expects an endomorphism and a vector field");
        }
        xi.contract(0, self, 0)
    }

    /// Feed `A xi` instead of `xi` into covariant slot `s`.
    pub fn precompose_slot(&self, s: usize, a: &Self) -> Result<Self> {
        if a.slots != ENDO || s >= self.rank() || self.slots[s] != Slot::Co {
            return contract("precompose_slot needs a covariant slot and an endomorphism");
        }
        a.contract(1, self, s)?.move_first_to(s)
    }

    /// Apply endomorphism `a` to the value held in contravariant slot `s`.
    pub fn postcompose_slot(&self, s: usize, a: &Self) -> Result<Self> {
        if a.slots != ENDO || s >= self.rank() || self.slots[s] != Slot::Contra {
            return contract("postcompose_slot needs a contravariant slot and an endomorphism");
        }
        self.contract(s, a, 0)?.move_last_to(s)
    }

    /// Apply `a` to the value in the last slot.
    pub fn postcompose(&self, a: &Self) -> Result<Self> {
        self.postcompose_slot(self.rank().saturating_sub(1), a)
    }

    /// Insert a vector into covariant slot `s`.
    pub fn insert(&self, s: usize, xi: &Self) -> Result<Self> {
        if xi.slots != VECTOR {
            return contract("insert expects a vector field");
        }
        self.contract(s, xi, 0)
    }

    pub fn move_first_to(&self, s: usize) -> Result<Self> {
        let r = self.rank();
        let mut perm: Vec<usize> = (1..r).collect();
        perm.insert(s, 0);
        self.permute(&perm)
    }

    /// Spectral partials as a new covariant slot in front: (dT)(a; ...) = d_a T(...).
    pub fn partials(&self) -> Self {
        let d = self.dim();
        let nc = self.ncomp();
        let n = self.npts();
        let mut slots = vec![Slot::Co];
        slots.extend_from_slice(&self.slots);
        let mut out = Self::zeros(self.grid, &slots);
        for c in 0..nc {
            let grads = spectral::gradient(&self.grid, self.comp(c));
            for (a, g) in grads.into_iter().enumerate() {
                let oc = a * nc + c;
                out.data[oc * n..(oc + 1) * n].copy_from_slice(&g);
            }
        }
        let _ = d;
        out
    }

    /// Componentwise spectral derivative along one real axis; valence unchanged.
    pub fn partial_derivative(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        let mut out = self.clone();
        for c in 0..self.ncomp() {
            let dv = spectral::partial(&self.grid, self.comp(c), axis);
            out.comp_mut(c).copy_from_slice(&dv);
        }
        Ok(out)
    }

    /// Remove modes above `limit` in every component.
    pub fn truncated(&self, limit: i64) -> Self {
        let mut out = self.clone();
        for c in 0..self.ncomp() {
            let v = spectral::truncate(&self.grid, self.comp(c), limit);
            out.comp_mut(c).copy_from_slice(&v);
        }
        out
    }

    /// Two-thirds rule dealiasing.
    pub fn dealiased(&self) -> Self {
        self.truncated(self.grid.band_limit())
    }

    /// Largest tail-energy fraction over components.
    pub fn spectral_tail(&self) -> f64 {
        (0..self.ncomp())
            .map(|c| spectral::tail_fraction(&self.grid, self.comp(c), self.grid.band_limit()))
            .fold(0.0, f64::max)
    }

    /// Apply a pointwise map to rank-2 component matrices (row = first slot).
    pub fn map_matrices(&self, slots: &[Slot], f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        if self.rank() != 2 || slots.len() != 2 {
            return contract("map_matrices expects rank-2 fields");
        }
        let d = self.dim();
        let n = self.npts();
        let mut out = Self::zeros(self.grid, slots);
        let mut m = vec![0.0; d * d];
        let mut r = vec![0.0; d * d];
        for p in 0..n {
            for c in 0..d * d {
                m[c] = self.data[c * n + p];
            }
            f(&m, &mut r);
            for c in 0..d * d {
                out.data[c * n + p] = r[c];
            }
        }
        Ok(out)
    }

    /// Pointwise scalar built from rank-2 component matrices.
    pub fn matrix_scalar(&self, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if self.rank() != 2 {
            return contract("matrix_scalar expects a rank-2 field");
        }
        let d = self.dim();
        let n = self.npts();
        let mut m = vec![0.0; d * d];
        let mut out = vec![0.0; n];
        for (p, o) in out.iter_mut().enumerate() {
            for c in 0..d * d {
                m[c] = self.data[c * n + p];
            }
            *o = f(&m);
        }
        Self::scalar(self.grid, out)
    }

    /// Pointwise inverse of the component matrix. Inverts a metric (Co,Co) into
    /// (Contra,Contra) and an endomorphism into its inverse endomorphism.
    pub fn inverse_matrix(&self) -> Result<Self> {
        let slots: Vec<Slot> = match self.slots.as_slice() {
            [Slot::Co, Slot::Co] => BIVECTOR.to_vec(),
            [Slot::Contra, Slot::Contra] => BILINEAR.to_vec(),
            [Slot::Co, Slot::Contra] => ENDO.to_vec(),
            _ => return contract("inverse_matrix expects a rank-2 field"),
        };
        let d = self.dim();
        let mut singular = false;
        let out = self.map_matrices(&slots, |m, r| {
            if !invert(m, d, r) {
                r.fill(f64::NAN);
            }
        })?;
        if !out.is_finite() {
            singular = true;
        }
        if singular {
            return Err(crate::Error::Numerical("singular matrix field".into()));
        }
        Ok(out)
    }

    pub fn determinant(&self) -> Result<Self> {
        let d = self.dim();
        self.matrix_scalar(|m| determinant(m, d))
    }
}

/// Gauss-Jordan inverse of a row-major d x d matrix; false if singular.
pub fn invert(m: &[f64], d: usize, out: &mut [f64]) -> bool {
    let mut a = [0.0f64; 64];
    let w = 2 * d;
    for i in 0..d {
        for j in 0..d {
            a[i * w + j] = m[i * d + j];
            a[i * w + d + j] = if i == j { 1.0 } else { 0.0 };
        }
    }
    for col in 0..d {
        let mut piv = col;
        for r in col + 1..d {
            if a[r * w + col].abs() > a[piv * w + col].abs() {
                piv = r;
            }
        }
        if a[piv * w + col].abs() < 1e-300 {
            return false;
        }
        if piv != col {
            for j in 0..w {
                a.swap(piv * w + j, col * w + j);
            }
        }
        let inv = 1.0 / a[col * w + col];
        for j in 0..w {
            a[col * w + j] *= inv;
        }
        for r in 0..d {
            if r != col {
                let f = a[r * w + col];
                if f != 0.0 {
                    for j in 0..w {
                        a[r * w + j] -= f * a[col * w + j];
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = a[i * w + d + j];
        }
    }
    true
}

pub fn determinant(m: &[f64], d: usize) -> f64 {
    let mut a = [0.0f64; 16];
    a[..d * d].copy_from_slice(&m[..d * d]);
    let mut det = 1.0;
    for col in 0..d {
        let mut piv = col;
        for r in col + 1..d {
            if a[r * d + col].abs() > a[piv * d + col].abs() {
                piv = r;
            }
        }
        if a[piv * d + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..d {
                a.swap(piv * d + j, col * d + j);
            }
            det = -det;
        }
        let p = a[col * d + col];
        det *= p;
        for r in col + 1..d {
            let f = a[r * d + col] / p;
            for j in col..d {
                a[r * d + j] -= f * a[col * d + j];
            }
        }
    }
    det
}
