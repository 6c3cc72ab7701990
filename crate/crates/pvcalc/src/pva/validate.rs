use std::fmt;

use super::{LambdaPolynomial, Pva};
use crate::diffpoly::{koszul, Element, Parity};
use crate::rational::binomial;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// One of `skew`, `jacobi`, `grading`, `parity`, `missing`.
    pub kind: String,
    pub detail: String,
}

/// Outcome of [`Pva::validate`]: the first counterexample of each kind.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn record(&mut self, kind: &str, detail: String) {
        if !self.has(kind) {
            self.violations.push(Violation { kind: kind.into(), detail });
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "PASS ({} checks)", self.checks);
        }
        write!(f, "FAIL")?;
        for v in &self.violations {
            write!(f, "\n  {}: {}", v.kind, v.detail)?;
        }
        Ok(())
    }
}

fn homogeneous_parts(e: &Element) -> Vec<(Element, Parity)> {
    let (ev, od) = e.parity_parts();
    let mut out = Vec::new();
    if !ev.is_zero() {
        out.push((ev, Parity::Even));
    }
    if !od.is_zero() {
        out.push((od, Parity::Odd));
    }
    out
}

fn skew_image(p: &Pva, ba: &LambdaPolynomial, pa: Parity, pb: Parity) -> LambdaPolynomial {
    let r = ba.reflect(&|e| p.derivation(e));
    if koszul(pa, pb) {
        r
    } else {
        r.neg()
    }
}

/// `{a_λ b} = −(−1)^{|a||b|}{b_{−λ−D} a}` with `D` the algebra derivation.
pub fn check_skew(p: &Pva, a: &Element, b: &Element) -> Result<bool> {
    for (ap, pa) in homogeneous_parts(a) {
        for (bp, pb) in homogeneous_parts(b) {
            let ab = p.lambda_bracket(&ap, &bp)?;
            let ba = p.lambda_bracket(&bp, &ap)?;
            if ab != skew_image(p, &ba, pa, pb) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `{a_λ bc} = {a_λ b}c + (−1)^{|a||b|} b{a_λ c}`.
pub fn check_leibniz(p: &Pva, a: &Element, b: &Element, c: &Element) -> Result<bool> {
    for (ap, pa) in homogeneous_parts(a) {
        for (bp, pb) in homogeneous_parts(b) {
            let lhs = p.lambda_bracket(&ap, &(&bp * c))?;
            let first = p.lambda_bracket(&ap, &bp)?.mul_right(c);
            let second = p.lambda_bracket(&ap, c)?.mul_left(&bp);
            let rhs = first.add(&if koszul(pa, pb) { second.neg() } else { second });
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn nth(v: &[Element], n: usize, zero: &Element) -> Element {
    v.get(n).cloned().unwrap_or_else(|| zero.clone())
}

/// Jacobi identity in (m,n) form for `0 ≤ m,n ≤ nmax`:
/// `a_(m)(b_(n)c) − (−1)^{|a||b|} b_(n)(a_(m)c) = Σⱼ C(m,j)(a_(j)b)_(m+n−j)c`.
/// Returns the first failing `(m, n)`.
pub fn check_jacobi(p: &Pva, a: &Element, b: &Element, c: &Element, nmax: u32) -> Result<Option<(u32, u32)>> {
    for (ap, pa) in homogeneous_parts(a) {
        for (bp, pb) in homogeneous_parts(b) {
            if let Some(f) = jacobi_homogeneous(p, &ap, pa, &bp, pb, c, nmax)? {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

fn jacobi_homogeneous(
    p: &Pva,
    a: &Element,
    pa: Parity,
    b: &Element,
    pb: Parity,
    c: &Element,
    nmax: u32,
) -> Result<Option<(u32, u32)>> {
    let zero = Element::zero(p.signature());
    let n = nmax as usize;
    let bc = p.products(b, c)?;
    let ac = p.products(a, c)?;
    let ab = p.products(a, b)?;
    let mut a_bc = Vec::new();
    let mut b_ac = Vec::new();
    let mut ab_c = Vec::new();
    for i in 0..=n {
        a_bc.push(p.products(a, &nth(&bc, i, &zero))?);
        b_ac.push(p.products(b, &nth(&ac, i, &zero))?);
        ab_c.push(p.products(&nth(&ab, i, &zero), c)?);
    }
    let sign = koszul(pa, pb);
    for m in 0..=n {
        for k in 0..=n {
            let first = nth(&a_bc[k], m, &zero);
            let second = nth(&b_ac[m], k, &zero);
            let lhs = if sign { &first + &second } else { &first - &second };
            let mut rhs = zero.clone();
            for j in 0..=m {
                rhs.add_assign_scaled(&nth(&ab_c[j], m + k - j, &zero), &binomial(m as u32, j as u32));
            }
            if lhs != rhs {
                return Ok(Some((m as u32, k as u32)));
            }
        }
    }
    Ok(None)
}

impl Pva {
    /// Checks skew-symmetry on all generator pairs, Jacobi on all generator
    /// triples up to `nmax`, and grading and parity of every table entry.
    pub fn validate(&self, nmax: u32) -> ValidationReport {
        let sig = self.signature().clone();
        let n = sig.num_generators();
        let gens: Vec<Element> = (0..n).map(|i| Element::jet(&sig, i, 0)).collect();
        let mut rep = ValidationReport::default();
        let name = |i: usize| sig.generators[i].name.clone();
        for a in 0..n {
            for b in 0..n {
                rep.checks += 1;
                let (ab, ba) = match (self.generator_bracket(a, b), self.generator_bracket(b, a)) {
                    (Ok(x), Ok(y)) => (x, y),
                    _ => {
                        rep.record("missing", format!("no bracket for ({}, {})", name(a), name(b)));
                        continue;
                    }
                };
                let pa = sig.generators[a].parity;
                let pb = sig.generators[b].parity;
                if *ab != skew_image(self, ba, pa, pb) {
                    rep.record("skew", format!("{{{}_lam {}}} = {}", name(a), name(b), ab));
                }
                let target = pa.plus(pb);
                for ((deg, _), coeff) in ab.terms() {
                    let want = sig.generators[a].weight as i64 + sig.generators[b].weight as i64 - *deg as i64 - 1;
                    let parts = coeff.weight_parts();
                    if parts.keys().any(|w| *w != want) {
                        rep.record(
                            "grading",
                            format!("lam^{deg} coefficient of {{{}_lam {}}} is {coeff}, expected weight {want}", name(a), name(b)),
                        );
                    }
                    if coeff.parity() != Some(target) {
                        rep.record("parity", format!("{{{}_lam {}}} has parity mismatch", name(a), name(b)));
                    }
                }
            }
        }
        if rep.has("missing") {
            return rep;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    rep.checks += 1;
                    match check_jacobi(self, &gens[a], &gens[b], &gens[c], nmax) {
                        Ok(None) => {}
                        Ok(Some((m, k))) => rep.record(
                            "jacobi",
                            format!("({}, {}, {}) at m={m}, n={k}", name(a), name(b), name(c)),
                        ),
                        Err(e) => rep.record("jacobi", format!("({}, {}, {}): {e}", name(a), name(b), name(c))),
                    }
                }
            }
        }
        rep
    }
}
