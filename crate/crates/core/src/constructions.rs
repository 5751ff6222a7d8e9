//! Deterministic builders for the explicit families used throughout the
//! toolkit. Every builder returns sets in canonical group order.

use serde::Serialize;

use crate::diffcore::SetFamily;
use crate::error::{Error, Result};
use crate::families::{verify_edf, FamilyParameters};
use crate::group::{Element, FiniteAbelianGroup, FiniteField};

/// Output of the cyclotomic coset construction together with the
/// verifier's view of it.
#[derive(Clone, Debug, Serialize)]
pub struct CosetEdf {
    pub family: SetFamily,
    /// Primitive element used to index the cosets.
    pub alpha: Element,
    pub witnessed: Option<FamilyParameters>,
    /// λ from the closed form `(q - 2ℓ - 1) / 4`.
    pub stated_lambda: u64,
    /// λ forced by counting: `u²ℓ(ℓ - 1) / (q - 1)`.
    pub counted_lambda: u64,
    /// Largest external count actually observed.
    pub max_external_count: u64,
    pub findings: Vec<String>,
}

/// The `ℓ` cosets `α^{2i}·C`, `0 <= i < ℓ`, of the order-`u` subgroup `C`
/// of the multiplicative group of `field`, where `q = 2uℓ + 1`.
pub fn tonchev_edf(q: u64, u: u64, l: u64, field: &FiniteField) -> Result<CosetEdf> {
    if u.is_multiple_of(2) || l.is_multiple_of(2) {
        return Err(Error::Parity(format!("u = {u} and ℓ = {l} must both be odd")));
    }
    if q != 2 * u * l + 1 {
        return Err(Error::Parameter(format!("q = {q} but 2uℓ + 1 = {}", 2 * u * l + 1)));
    }
    if field.order() as u64 != q {
        return Err(Error::Parameter(format!("field has order {}, expected {q}", field.order())));
    }
    if l < 2 {
        return Err(Error::Parameter("ℓ = 1 gives a single coset, not a family".into()));
    }
    let alpha = field.find_primitive_element();
    let group = field.additive_group();
    let a = group.index_of(&alpha)?;
    let generator = field.pow_index(a, 2 * l);
    let subgroup: Vec<usize> = (0..u).map(|j| field.pow_index(generator, j)).collect();
    let sets: Vec<Vec<usize>> = (0..l)
        .map(|i| {
            let shift = field.pow_index(a, 2 * i);
            subgroup.iter().map(|&c| field.mul_index(shift, c)).collect()
        })
        .collect();
    let family = SetFamily::from_indices(group.clone(), &sets)?;

    let stated_lambda = (q - 2 * l - 1) / 4;
    let counted_lambda = u * u * l * (l - 1) / (q - 1);
    let max_external_count = crate::diffcore::external_difference_multiset(&family)?.max();
    let report = verify_edf(&family)?;
    let mut findings = Vec::new();
    if u != l {
        findings.push(format!("{l} sets of size {u}: the roles of u and ℓ in (q,u,ℓ,λ) are not interchangeable here"));
    }
    if stated_lambda != counted_lambda {
        findings.push(format!(
            "closed-form λ = {stated_lambda} differs from the counted λ = {counted_lambda}"
        ));
    }
    match &report.witnessed {
        Some(p) if p.single_lambda() != Some(stated_lambda) => findings.push(format!(
            "verifier witnesses {p}, closed-form λ is {stated_lambda}"
        )),
        None => findings.push(format!("not an EDF; largest external count is {max_external_count}")),
        _ => {}
    }
    Ok(CosetEdf {
        family,
        alpha,
        witnessed: report.witnessed,
        stated_lambda,
        counted_lambda,
        max_external_count,
        findings,
    })
}

fn cyclic_family(n: u64, sets: Vec<Vec<u32>>) -> Result<SetFamily> {
    let group = FiniteAbelianGroup::cyclic(n)?;
    SetFamily::new(group, sets.into_iter().map(|s| s.into_iter().map(Element::from).collect()).collect())
}

/// `{0, …, k-1}` and `{k, 2k, …, k²}` in `Z_{k²+1}`.
pub fn two_set_sedf(k: u32) -> Result<SetFamily> {
    if k < 1 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let n = k as u64 * k as u64 + 1;
    if n > crate::group::MAX_ORDER as u64 {
        return Err(Error::Parameter(format!("k = {k} gives a group that is too large")));
    }
    cyclic_family(n, vec![(0..k).collect(), (1..=k).map(|i| i * k).collect()])
}

/// All singletons of `Z_n`.
pub fn singleton_sedf(n: u64) -> Result<SetFamily> {
    if n < 2 {
        return Err(Error::Parameter("n must be at least 2".into()));
    }
    cyclic_family(n, (0..n as u32).map(|x| vec![x]).collect())
}

/// `{0}` and its complement in `Z_n`.
pub fn complement_gsedf(n: u64) -> Result<SetFamily> {
    if n < 2 {
        return Err(Error::Parameter("n must be at least 2".into()));
    }
    cyclic_family(n, vec![vec![0], (1..n as u32).collect()])
}

/// Quadratic residues of `Z_7` as singletons plus the remaining elements.
pub fn qr_gsedf() -> SetFamily {
    cyclic_family(7, vec![vec![1], vec![2], vec![4], vec![0, 3, 5, 6]]).expect("fixed family is valid")
}

/// Six-set partition of `Z_13` with size classes 2×3, 1×4 and 3×1.
pub fn pedf_example_z13() -> SetFamily {
    cyclic_family(13, vec![vec![0, 1, 4], vec![3, 5, 10], vec![2, 6, 7, 9], vec![8], vec![11], vec![12]])
        .expect("fixed family is valid")
}

/// Recipe names accepted on the command line.
pub const RECIPES: [&str; 6] = ["tonchev", "two-set-sedf", "singleton-sedf", "complement-gsedf", "qr-gsedf", "pedf-z13"];
