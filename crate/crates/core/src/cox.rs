//! Homogenization of polynomials in Cox coordinates of a toric compactification.
//!
//! A lattice point `b` of a class polytope becomes the monomial
//! `∏ z_j^{⟨b,ρ_j⟩ + b_j}` where the `b_j` are the divisor coefficients.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::lattice;
use crate::poly::{Exponent, SparsePoly};
use crate::polytope::LatticePolytope;
use crate::toric::{Fan, TDivisor, ToricError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxError {
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("the fan does not contain the first orthant as a cone")]
    NoFirstOrthant,
    #[error("monomial with exponent {0:?} lies outside the class polytope")]
    OutsideClass(Vec<i64>),
    #[error("max cone index {0} out of range")]
    BadCone(usize),
    #[error("ray index {0} out of range")]
    BadRay(usize),
    #[error("the zero section has no vanishing order")]
    ZeroSection,
    #[error("variable count {found} does not match the fan dimension {expected}")]
    NvarsMismatch { expected: usize, found: usize },
}

/// A section of `O(D)` written in ray-indexed Cox variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
    class: TDivisor,
}

/// Homogenizes `f` as a section of the class of `p`.
pub fn homogenize(f: &SparsePoly, p: &LatticePolytope, fan: &Fan) -> Result<CoxPoly, CoxError> {
    let class = fan.divisor_of(p)?;
    homogenize_in_class(f, &class, fan)
}

/// Homogenizes `f` in an explicit divisor class.
pub fn homogenize_in_class(f: &SparsePoly, class: &TDivisor, fan: &Fan) -> Result<CoxPoly, CoxError> {
    if !fan.contains_first_orthant() {
        return Err(CoxError::NoFirstOrthant);
    }
    if f.nvars() != fan.nvars() {
        return Err(CoxError::NvarsMismatch {
            expected: fan.nvars(),
            found: f.nvars(),
        });
    }
    let mut terms = BTreeMap::new();
    for (e, c) in f.terms() {
        let b = e.to_ivec();
        let exps: Option<Vec<u32>> = fan
            .rays()
            .iter()
            .zip(&class.coeffs)
            .map(|(r, a)| u32::try_from(lattice::dot(&b, r) + a).ok())
            .collect();
        let exps = exps.ok_or_else(|| CoxError::OutsideClass(b.clone()))?;
        terms.insert(exps, c.clone());
    }
    Ok(CoxPoly {
        nvars: fan.nvars(),
        terms,
        class: class.clone(),
    })
}

impl CoxPoly {
    pub fn class(&self) -> &TDivisor {
        &self.class
    }

    pub fn nrays(&self) -> usize {
        self.class.coeffs.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The same section as a polynomial in all Cox variables.
    pub fn as_poly(&self) -> SparsePoly {
        SparsePoly::from_terms(
            self.nrays(),
            self.terms
                .iter()
                .map(|(e, c)| (Exponent(e.clone()), c.clone())),
        )
        .expect("exponent lengths match")
    }

    /// Sets the variables of the rays outside the first orthant to 1.
    pub fn dehomogenize(&self) -> SparsePoly {
        SparsePoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(e, c)| (Exponent(e[..self.nvars].to_vec()), c.clone())),
        )
        .expect("exponent lengths match")
    }

    /// Restricts to the chart of a max cone; the chart variables follow the cone's ray order.
    pub fn localize(&self, fan: &Fan, cone: usize) -> Result<SparsePoly, CoxError> {
        let rays = fan.max_cones().get(cone).ok_or(CoxError::BadCone(cone))?;
        if !fan.is_regular() {
            return Err(ToricError::NotRegular.into());
        }
        Ok(SparsePoly::from_terms(
            rays.len(),
            self.terms
                .iter()
                .map(|(e, c)| (Exponent(rays.iter().map(|&j| e[j]).collect()), c.clone())),
        )
        .expect("exponent lengths match"))
    }

    pub fn order_along_ray(&self, j: usize) -> Result<u32, CoxError> {
        if j >= self.nrays() {
            return Err(CoxError::BadRay(j));
        }
        self.terms
            .keys()
            .map(|e| e[j])
            .min()
            .ok_or(CoxError::ZeroSection)
    }

    /// Minimum order along the rays outside the first orthant.
    pub fn order_at_infinity(&self) -> Result<u32, CoxError> {
        if self.is_zero() {
            return Err(CoxError::ZeroSection);
        }
        (self.nvars..self.nrays())
            .map(|j| self.order_along_ray(j))
            .try_fold(u32::MAX, |m, o| o.map(|o| m.min(o)))
    }

    /// Product of sections; the classes add.
    pub fn mul(&self, other: &CoxPoly) -> CoxPoly {
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        CoxPoly {
            nvars: self.nvars,
            terms,
            class: self.class.add(&other.class),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn vars() -> Vec<String> {
        vec!["z".into(), "w".into()]
    }

    fn setup() -> (LatticePolytope, Fan) {
        let p = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let f = Fan::normal(&p).unwrap();
        (p, f)
    }

    fn cox_vars() -> Vec<String> {
        vec!["z".into(), "w".into(), "x1".into(), "x2".into()]
    }

    #[test]
    fn example_homogenizations() {
        let (p, fan) = setup();
        let f1 = homogenize(&parse("z + z*w + w^2", &vars()).unwrap(), &p, &fan).unwrap();
        assert_eq!(f1.as_poly(), parse("z*x2 + z*w + w^2*x1", &cox_vars()).unwrap());
        let f2 = homogenize(&parse("z + 2*z*w + 3*w^2", &vars()).unwrap(), &p, &fan).unwrap();
        assert_eq!(f2.as_poly(), parse("z*x2 + 2*z*w + 3*w^2*x1", &cox_vars()).unwrap());
        let one = homogenize(&SparsePoly::one(2), &p, &fan).unwrap();
        assert_eq!(one.as_poly(), parse("x1*x2^2", &cox_vars()).unwrap());
        assert_eq!(one.order_along_ray(2).unwrap(), 1);
        assert_eq!(one.order_along_ray(3).unwrap(), 2);
        assert_eq!(one.order_at_infinity().unwrap(), 1);
        assert_eq!(f1.order_at_infinity().unwrap(), 0);
        assert_eq!(one.dehomogenize(), SparsePoly::one(2));
        assert_eq!(f1.dehomogenize(), parse("z + z*w + w^2", &vars()).unwrap());
    }

    #[test]
    fn chart_at_vertex() {
        let (p, fan) = setup();
        // the cone of vertex (0,2) has rays e₁ and (−1,−1): coordinates z, x₂
        let cone = fan.max_cones().iter().position(|c| *c == vec![0, 3]).unwrap();
        let f1 = homogenize(&parse("z + z*w + w^2", &vars()).unwrap(), &p, &fan).unwrap();
        let f2 = homogenize(&parse("z + 2*z*w + 3*w^2", &vars()).unwrap(), &p, &fan).unwrap();
        let cv = vec!["z".to_string(), "x2".to_string()];
        assert_eq!(f1.localize(&fan, cone).unwrap(), parse("z*x2 + z + 1", &cv).unwrap());
        assert_eq!(f2.localize(&fan, cone).unwrap(), parse("z*x2 + 2*z + 3", &cv).unwrap());
        let s0 = fan.first_orthant_cone().unwrap();
        assert_eq!(f1.localize(&fan, s0).unwrap(), f1.dehomogenize());
    }

    #[test]
    fn errors() {
        let (p, fan) = setup();
        let out = parse("z^2", &vars()).unwrap();
        assert!(matches!(homogenize(&out, &p, &fan), Err(CoxError::OutsideClass(_))));
        let zero = homogenize(&SparsePoly::zero(2), &p, &fan).unwrap();
        assert_eq!(zero.order_at_infinity(), Err(CoxError::ZeroSection));
    }

    #[test]
    fn classes_multiply() {
        let (p, fan) = setup();
        let a = parse("z + w", &vars()).unwrap();
        let b = parse("1 + z*w", &vars()).unwrap();
        let ha = homogenize(&a, &p, &fan).unwrap();
        let hb = homogenize(&b, &p, &fan).unwrap();
        let p2 = p.scale_int(2);
        let hab = homogenize(&(&a * &b), &p2, &fan).unwrap();
        assert_eq!(ha.mul(&hb), hab);
    }
}
