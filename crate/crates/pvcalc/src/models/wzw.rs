use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::diffpoly::{Element, Signature};
use crate::geometry::{canonical_table, h_twist, Coords, TargetForm};
use crate::pva::{LambdaPolynomial, Pva};
use crate::rational::{q, to_short, Q};
use crate::{Error, Result};

/// WZW model on GL(n), n ∈ {1, 2}, at level `k`.
#[derive(Clone, Debug)]
pub struct WzwModel {
    pub n: usize,
    pub k: Q,
    pub pva: Pva,
    /// `x^{ij}` and their inverse-matrix entries `x_{ij}`.
    upper: Vec<Vec<Element>>,
    lower: Vec<Vec<Element>>,
    momenta: Vec<Vec<Element>>,
}

fn coordinate_name(n: usize, i: usize, j: usize, prefix: &str) -> String {
    if n == 1 {
        prefix.to_string()
    } else {
        format!("{prefix}{}{}", i + 1, j + 1)
    }
}

impl WzwModel {
    pub fn new(n: usize, k: Q) -> Result<WzwModel> {
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidArgument(format!("WZW presets exist for n = 1, 2 (got {n})")));
        }
        let sig = WzwModel::signature_for(n)?;
        let coords = Coords::detect(&sig)?;
        let base = Pva::new(canonical_table(&sig, &coords))?;
        let gen = |i: usize, j: usize, prefix: &str| Element::gen(&sig, &coordinate_name(n, i, j, prefix));
        let mut upper = vec![vec![Element::zero(&sig); n]; n];
        let mut momenta = upper.clone();
        for i in 0..n {
            for j in 0..n {
                upper[i][j] = gen(i, j, "x")?;
                momenta[i][j] = gen(i, j, "p")?;
            }
        }
        let lower = if n == 1 {
            vec![vec![Element::inverse_of(&sig, "x")?]]
        } else {
            let inv = Element::inverse_of(&sig, "det")?;
            vec![
                vec![&upper[1][1] * &inv, -&(&upper[0][1] * &inv)],
                vec![-&(&upper[1][0] * &inv), &upper[0][0] * &inv],
            ]
        };
        let mut m = WzwModel { n, k, pva: base, upper, lower, momenta };
        if n == 2 {
            let h = m.cartan_form()?.scale(&(-m.k.clone() / q(2)));
            m.pva = h_twist(&m.pva, &h)?;
        }
        Ok(m)
    }

    fn signature_for(n: usize) -> Result<Arc<Signature>> {
        let mut b = Signature::builder();
        if n == 1 {
            return b.invertible("x").even("p", 1).build();
        }
        for i in 0..n {
            for j in 0..n {
                b = b.even(&coordinate_name(n, i, j, "x"), 0);
            }
        }
        for i in 0..n {
            for j in 0..n {
                b = b.even(&coordinate_name(n, i, j, "p"), 1);
            }
        }
        b.unit("det", vec![(vec![("x11", 1), ("x22", 1)], q(1)), (vec![("x12", 1), ("x21", 1)], q(-1))])
            .build()
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.pva.signature()
    }

    /// `x_{ij}`: entries of the inverse matrix.
    pub fn inverse_entry(&self, i: usize, j: usize) -> &Element {
        &self.lower[i][j]
    }

    pub fn coordinate(&self, i: usize, j: usize) -> &Element {
        &self.upper[i][j]
    }

    /// `H(E_a, E_b, E_c) = tr([x⁻¹E_a, x⁻¹E_b] x⁻¹E_c)` on the coordinates
    /// `x^{ij}` in row-major order.
    pub fn cartan_form(&self) -> Result<TargetForm> {
        let n = self.n;
        let sig = self.signature().clone();
        let coords = Coords::detect(&sig)?;
        let mut h = TargetForm::zero(&sig, &coords.x, 3);
        let dim = n * n;
        // x⁻¹E_{ij} has entries (x⁻¹)_{r i} δ_{c j}
        let mat = |a: usize| -> Vec<Vec<Element>> {
            let (i, j) = (a / n, a % n);
            (0..n)
                .map(|r| (0..n).map(|c| if c == j { self.lower[r][i].clone() } else { Element::zero(&sig) }).collect())
                .collect()
        };
        let mul = |a: &Vec<Vec<Element>>, b: &Vec<Vec<Element>>| -> Vec<Vec<Element>> {
            (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| (0..n).fold(Element::zero(&sig), |acc, t| &acc + &(&a[r][t] * &b[t][c])))
                        .collect()
                })
                .collect()
        };
        let tr = |a: &Vec<Vec<Element>>| (0..n).fold(Element::zero(&sig), |acc, i| &acc + &a[i][i]);
        for a in 0..dim {
            for b in a + 1..dim {
                for c in b + 1..dim {
                    let (ma, mb, mc) = (mat(a), mat(b), mat(c));
                    let v = &tr(&mul(&mul(&ma, &mb), &mc)) - &tr(&mul(&mul(&mb, &ma), &mc));
                    h.add_term(&[a, b, c], &v)?;
                }
            }
        }
        Ok(h)
    }

    /// `j_l(E_ij) = Σ_α x^{αi} p_{αj} + (k/2) Σ_γ x_{jγ} T x^{γi}`.
    pub fn left_current(&self, i: usize, j: usize) -> Element {
        let half_k = &self.k / q(2);
        let mut e = Element::zero(self.signature());
        for a in 0..self.n {
            e = &e + &(&self.upper[a][i] * &self.momenta[a][j]);
            e = &e + &(&self.lower[j][a] * &self.upper[a][i].t()).scale(&half_k);
        }
        e
    }

    /// `j_r(E_ij) = −Σ_α x^{jα} p_{iα} + (k/2) Σ_γ x_{γi} T x^{jγ}`.
    pub fn right_current(&self, i: usize, j: usize) -> Element {
        let half_k = &self.k / q(2);
        let mut e = Element::zero(self.signature());
        for a in 0..self.n {
            e = &e - &(&self.upper[j][a] * &self.momenta[i][a]);
            e = &e + &(&self.lower[a][i] * &self.upper[j][a].t()).scale(&half_k);
        }
        e
    }

    fn basis(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).collect()
    }

    /// `j([E_ij, E_kl]) = δ_jk j(E_il) − δ_li j(E_kj)`.
    fn of_commutator(&self, a: (usize, usize), b: (usize, usize), j: &dyn Fn(usize, usize) -> Element) -> Element {
        let mut e = Element::zero(self.signature());
        if a.1 == b.0 {
            e = &e + &j(a.0, b.1);
        }
        if b.1 == a.0 {
            e = &e - &j(b.0, a.1);
        }
        e
    }

    /// Trace form `g(E_ij, E_kl) = δ_jk δ_il`.
    fn trace_form(a: (usize, usize), b: (usize, usize)) -> Q {
        if a.1 == b.0 && a.0 == b.1 {
            q(1)
        } else {
            Q::zero()
        }
    }

    pub fn verify_affine(&self) -> Result<AffineReport> {
        let sig = self.signature().clone();
        let mut failures = Vec::new();
        let jl = |i, j| self.left_current(i, j);
        let jr = |i, j| self.right_current(i, j);
        let name = |a: (usize, usize)| format!("E{}{}", a.0 + 1, a.1 + 1);
        for a in self.basis() {
            for b in self.basis() {
                let g = WzwModel::trace_form(a, b);
                let level = |s: &Q| Element::constant(&sig, s * &g * &self.k);
                let want_l = LambdaPolynomial::constant(self.of_commutator(a, b, &jl))
                    .add(&LambdaPolynomial::monomial(level(&q(1)), 1));
                let want_r = LambdaPolynomial::constant(self.of_commutator(a, b, &jr))
                    .add(&LambdaPolynomial::monomial(level(&q(-1)), 1));
                if self.pva.lambda_bracket(&jl(a.0, a.1), &jl(b.0, b.1))? != want_l {
                    failures.push(format!("left ({}, {})", name(a), name(b)));
                }
                if self.pva.lambda_bracket(&jr(a.0, a.1), &jr(b.0, b.1))? != want_r {
                    failures.push(format!("right ({}, {})", name(a), name(b)));
                }
                if !self.pva.lambda_bracket(&jl(a.0, a.1), &jr(b.0, b.1))?.is_zero() {
                    failures.push(format!("cross ({}, {})", name(a), name(b)));
                }
            }
        }
        Ok(AffineReport { k: self.k.clone(), pairs: self.basis().len().pow(2), failures })
    }

    /// `L = (1/k) Σ_ij j_l(E_ij) j_l(E_ji)`.
    pub fn sugawara(&self) -> Result<Element> {
        if self.k.is_zero() {
            return Err(Error::InvalidArgument("the Sugawara element needs k ≠ 0".into()));
        }
        let mut l = Element::zero(self.signature());
        for (i, j) in self.basis() {
            l = &l + &(&self.left_current(i, j) * &self.left_current(j, i));
        }
        Ok(l.scale(&(q(1) / &self.k)))
    }

    /// Computes the Sugawara relations and their constants.
    pub fn sugawara_report(&self) -> Result<SugawaraReport> {
        let l = self.sugawara()?;
        let p = &self.pva;
        let mut problems = Vec::new();
        // normalization ν from {L_λ j} = ν(T+λ) j + ...
        let (i0, j0) = (0, 0);
        let j00 = self.left_current(i0, j0);
        let b = p.lambda_bracket(&l, &j00)?;
        let nu = ratio(&b.coeff(1), &j00).ok_or_else(|| Error::InvalidArgument("no Virasoro normalization".into()))?;
        let lv = l.scale(&(q(1) / &nu));
        let mut central = Vec::new();
        for (i, j) in self.basis() {
            let cur = self.left_current(i, j);
            let b = p.lambda_bracket(&lv, &cur)?;
            let rest = b.sub(&LambdaPolynomial::constant(cur.t()).add(&LambdaPolynomial::monomial(cur.clone(), 1)));
            let c2 = rest.coeff(2);
            if !rest.sub(&LambdaPolynomial::monomial(c2.clone(), 2)).is_zero() || c2.as_constant().is_none() {
                problems.push(format!("{{L_λ j_l(E{}{})}} is not primary", i + 1, j + 1));
            }
            central.push(c2.as_constant().unwrap_or_else(Q::zero));
            let r = p.lambda_bracket(&l, &self.right_current(i, j))?;
            if !r.is_zero() {
                problems.push(format!("{{L_λ j_r(E{}{})}} ≠ 0", i + 1, j + 1));
            }
        }
        let ll = p.lambda_bracket(&lv, &lv)?;
        let rest = ll.sub(&LambdaPolynomial::constant(lv.t()).add(&LambdaPolynomial::monomial(lv.scale(&q(2)), 1)));
        let c3 = rest.coeff(3);
        let virasoro_central = c3.as_constant();
        if virasoro_central.is_none() || !rest.sub(&LambdaPolynomial::monomial(c3, 3)).is_zero() {
            problems.push("{L_λ L} − (T+2λ)L is not a multiple of λ³".into());
        }
        Ok(SugawaraReport {
            normalization: nu,
            current_central: central,
            virasoro_central: virasoro_central.unwrap_or_else(Q::zero),
            problems,
        })
    }
}

/// `a / b` when `a` is a rational multiple of the nonzero `b`.
pub fn ratio(a: &Element, b: &Element) -> Option<Q> {
    let (m, c) = b.terms().next()?;
    let r = a.coefficient(m) / c;
    if *a == b.scale(&r) {
        Some(r)
    } else {
        None
    }
}

#[derive(Clone, Debug)]
pub struct AffineReport {
    pub k: Q,
    pub pairs: usize,
    pub failures: Vec<String>,
}

impl AffineReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for AffineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS levels ({},{})", to_short(&self.k), to_short(&-self.k.clone()))
        } else {
            write!(f, "FAIL {}", self.failures.join("; "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct SugawaraReport {
    /// `ν` with `{L_λ j_l} = ν(T+λ)j_l + …`; all other constants refer to `L/ν`.
    pub normalization: Q,
    /// λ² coefficients of `{(L/ν)_λ j_l(E_ij)}` in row-major basis order.
    pub current_central: Vec<Q>,
    /// λ³ coefficient of `{(L/ν)_λ (L/ν)}`.
    pub virasoro_central: Q,
    pub problems: Vec<String>,
}

impl SugawaraReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// The gl(1) Legendre identification: with `p = κ x⁻² ∂_τx`, κ = k/2,
/// `j_l` becomes `k ∂₊x · x⁻¹`, `∂₊ = ½(∂_τ + ∂_σ)`. Returns both sides over
/// a signature with τ-jets.
pub fn gl1_legendre_identification(k: &Q) -> Result<(Element, Element)> {
    let sig = Signature::builder().invertible("x").build()?;
    let x = Element::jet2(&sig, 0, 0, 0);
    let xi = Element::inverse_of(&sig, "x")?;
    let xs = Element::jet2(&sig, 0, 0, 1);
    let xt = Element::jet2(&sig, 0, 1, 0);
    let kappa = k / q(2);
    let p = (&(&xi * &xi) * &xt).scale(&kappa);
    let jl = &(&x * &p) + &(&xi * &xs).scale(&kappa);
    let plus = (&xt + &xs).scale(&(q(1) / q(2)));
    let want = (&plus * &xi).scale(k);
    Ok((jl, want))
}
