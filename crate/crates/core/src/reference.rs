//! Reference tables for the exceptional super-Grassmannians: the published
//! closed-form bases that golden tests compare the engine against.

use crate::atlas::Chart;
use crate::fields::SuperDerivation;
use crate::superpoly::{RationalSuperFunction, SuperPolynomial, VarId};
use crate::{Error, Result};

fn pol(p: SuperPolynomial) -> RationalSuperFunction {
    RationalSuperFunction::from_poly(p)
}

/// The sixteen fundamental fields on the Gr(2|2; 1|1) standard chart
/// (coordinates x, ξ, η, y), keyed by the 1-based elementary-matrix index.
pub fn gr2211_mu_table(chart: &Chart) -> Result<Vec<((usize, usize), SuperDerivation)>> {
    let flag = chart.flag();
    if (flag.m(), flag.n(), flag.k(1), flag.l(1), flag.length()) != (2, 2, 1, 1, 1) {
        return Err(Error::Other(format!("reference table is for Gr(2|2; 1|1), not {flag}")));
    }
    let t = chart.table();
    let x = chart.var_at(1, 0, 0).ok_or(Error::IndexOutOfRange)?;
    let xi = chart.var_at(1, 0, 1).ok_or(Error::IndexOutOfRange)?;
    let eta = chart.var_at(1, 2, 0).ok_or(Error::IndexOutOfRange)?;
    let y = chart.var_at(1, 2, 1).ok_or(Error::IndexOutOfRange)?;
    let xp = SuperPolynomial::var(t, x);
    let xip = SuperPolynomial::var(t, xi);
    let etap = SuperPolynomial::var(t, eta);
    let yp = SuperPolynomial::var(t, y);
    let one = SuperPolynomial::one(t);
    let field = |coeffs: Vec<(VarId, SuperPolynomial)>| {
        SuperDerivation::from_coeffs(t, coeffs.into_iter().map(|(v, p)| (v, pol(p))))
    };
    let xieta = &xip * &etap;
    Ok(vec![
        // even part
        ((1, 1), field(vec![(x, xp.clone()), (xi, xip.clone())])),
        ((1, 2), field(vec![(x, one.clone())])),
        ((2, 2), field(vec![(x, -&xp), (eta, -&etap)])),
        (
            (2, 1),
            field(vec![
                (x, -&xp.pow(2)),
                (eta, -&(&xp * &etap)),
                (xi, -&(&xp * &xip)),
                (y, xieta.clone()),
            ]),
        ),
        ((3, 4), field(vec![(y, one.clone())])),
        (
            (4, 3),
            field(vec![
                (y, -&yp.pow(2)),
                (xi, -&(&yp * &xip)),
                (eta, -&(&yp * &etap)),
                (x, -&xieta),
            ]),
        ),
        ((3, 3), field(vec![(y, yp.clone()), (eta, etap.clone())])),
        ((4, 4), field(vec![(y, -&yp), (xi, -&xip)])),
        // odd part
        ((1, 4), field(vec![(xi, one.clone())])),
        ((3, 2), field(vec![(eta, one.clone())])),
        ((1, 3), field(vec![(x, etap.clone()), (xi, yp.clone())])),
        ((3, 1), field(vec![(y, xip.clone()), (eta, xp.clone())])),
        (
            (2, 3),
            field(vec![(x, -&(&xp * &etap)), (xi, -&(&xp * &yp)), (y, &yp * &etap)]),
        ),
        (
            (4, 1),
            field(vec![(y, -&(&yp * &xip)), (eta, -&(&xp * &yp)), (x, &xp * &xip)]),
        ),
        ((2, 4), field(vec![(xi, -&xp), (y, etap.clone())])),
        ((4, 2), field(vec![(eta, -&yp), (x, xip.clone())])),
    ])
}

/// The two extra global fields η∂/∂ξ and ξ∂/∂η on Gr(2|2; 1|1) beyond the
/// fundamental image.
pub fn gr2211_extra_fields(chart: &Chart) -> Result<Vec<SuperDerivation>> {
    let t = chart.table();
    let xi = chart.var_at(1, 0, 1).ok_or(Error::IndexOutOfRange)?;
    let eta = chart.var_at(1, 2, 0).ok_or(Error::IndexOutOfRange)?;
    let xip = SuperPolynomial::var(t, xi);
    let etap = SuperPolynomial::var(t, eta);
    Ok(vec![
        SuperDerivation::from_coeffs(t, [(xi, pol(etap.clone()))]),
        SuperDerivation::from_coeffs(t, [(eta, pol(xip.clone()))]),
    ])
}
