//! Finite abelian groups as explicit direct products of cyclic groups, and
//! finite fields viewed through their additive group.
//!
//! Elements are residue tuples. The canonical element order is lexicographic
//! on the coordinate tuple, which coincides with the mixed-radix index
//! returned by [`FiniteAbelianGroup::index_of`] (first coordinate most
//! significant). Every "first" or "smallest" choice in the crate uses it.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on supported group orders.
pub const MAX_ORDER: usize = 1 << 20;

/// A group element as a tuple of residues.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<u32>);

impl Element {
    pub fn new(coords: Vec<u32>) -> Self {
        Element(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl From<u32> for Element {
    fn from(x: u32) -> Self {
        Element(vec![x])
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (i, c) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        // A bare integer is shorthand for an element of a cyclic group.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Scalar(u32),
            Tuple(Vec<u32>),
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Scalar(x) => Element(vec![x]),
            Repr::Tuple(v) => Element(v),
        })
    }
}

/// Direct product Z_{n_1} x ... x Z_{n_r}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    orders: Vec<u32>,
    n: usize,
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry("cyclic", &self.orders)?;
        map.end()
    }
}

impl FiniteAbelianGroup {
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::product(&[n])
    }

    pub fn product(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidOrder(1));
        }
        let mut n: usize = 1;
        let mut out = Vec::with_capacity(orders.len());
        for &o in orders {
            if o < 2 {
                return Err(Error::InvalidOrder(o));
            }
            n = n
                .checked_mul(o as usize)
                .filter(|&n| n <= MAX_ORDER)
                .ok_or_else(|| Error::Input(format!("group order exceeds {MAX_ORDER}")))?;
            out.push(o as u32);
        }
        Ok(FiniteAbelianGroup { orders: out, n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_cyclic_factor_form(&self) -> bool {
        self.orders.len() == 1
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1u64, |acc, &o| acc.lcm(&(o as u64)))
    }

    pub fn identity(&self) -> Element {
        Element(vec![0; self.orders.len()])
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.0.len() == self.orders.len() && e.0.iter().zip(&self.orders).all(|(x, n)| x < n)
    }

    pub fn check(&self, e: &Element) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::ElementDomain(format!("{e} is not an element of {self}")))
        }
    }

    /// Build an element from coordinates, validating them.
    pub fn element(&self, coords: &[u32]) -> Result<Element> {
        let e = Element(coords.to_vec());
        self.check(&e)?;
        Ok(e)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.orders)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(Element(a.0.iter().zip(&self.orders).map(|(x, n)| (n - x) % n).collect()))
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        self.add(a, &self.neg(b)?)
    }

    pub fn index_of(&self, e: &Element) -> Result<usize> {
        self.check(e)?;
        Ok(self.index_unchecked(e.coords()))
    }

    fn index_unchecked(&self, coords: &[u32]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn element_at(&self, mut index: usize) -> Element {
        assert!(index < self.n, "index {index} out of range for group of order {}", self.n);
        let mut coords = vec![0u32; self.orders.len()];
        for (c, &n) in coords.iter_mut().zip(&self.orders).rev() {
            *c = (index % n as usize) as u32;
            index /= n as usize;
        }
        Element(coords)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.n).map(|i| self.element_at(i))
    }

    /// Nonzero elements in canonical order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Element> + '_ {
        (1..self.n).map(|i| self.element_at(i))
    }

    pub fn add_index(&self, a: usize, b: usize) -> usize {
        self.combine_index(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.combine_index(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg_index(&self, a: usize) -> usize {
        self.sub_index(0, a)
    }

    /// `u * a` computed coordinatewise.
    pub fn scale_index(&self, a: usize, u: u64) -> usize {
        self.combine_index(a, 0, |x, _, n| ((x as u64 * u) % n as u64) as u32)
    }

    fn combine_index(&self, mut a: usize, mut b: usize, f: impl Fn(u32, u32, u32) -> u32) -> usize {
        if self.orders.len() == 1 {
            return f(a as u32, b as u32, self.orders[0]) as usize;
        }
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in self.orders.iter().rev() {
            let n_us = n as usize;
            let x = (a % n_us) as u32;
            let y = (b % n_us) as u32;
            a /= n_us;
            b /= n_us;
            out += f(x, y, n) as usize * place;
            place *= n_us;
        }
        out
    }

    /// JSON-style descriptor text, e.g. `Z_3 x Z_3`.
    pub fn name(&self) -> String {
        self.orders
            .iter()
            .map(|n| format!("Z_{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// All abelian groups of order `n` up to isomorphism, each as a product of
/// cyclic groups of prime-power order (elementary divisor form). A group
/// that is cyclic is returned as the single factor `Z_n`.
pub fn abelian_groups_of_order(n: u64) -> Result<Vec<FiniteAbelianGroup>> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let factors = factorize(n);
    // For each prime, every partition of its exponent.
    let mut choices: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for part in partitions(e) {
            for prefix in &choices {
                let mut c = prefix.clone();
                c.extend(part.iter().map(|&k| p.pow(k)));
                next.push(c);
            }
        }
        choices = next;
    }
    let mut groups = Vec::new();
    for orders in choices {
        // Collapse to a single cyclic factor when all prime powers are for
        // distinct primes.
        let mut primes: Vec<u64> = orders.iter().map(|&q| smallest_prime_factor(q)).collect();
        primes.sort_unstable();
        let cyclic = primes.windows(2).all(|w| w[0] != w[1]);
        let g = if cyclic {
            FiniteAbelianGroup::cyclic(n)?
        } else {
            FiniteAbelianGroup::product(&orders)?
        };
        groups.push(g);
    }
    groups.sort_by_key(|g| g.rank());
    Ok(groups)
}

fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            go(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(e, e, &mut Vec::new(), &mut out);
    out
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// Irreducible moduli shipped for small prime powers, as
/// `(p, coefficients c_0..c_d)`.
const BUILTIN_MODULI: &[(u64, u32, &[u32])] = &[
    (4, 2, &[1, 1, 1]),
    (8, 2, &[1, 1, 0, 1]),
    (9, 3, &[1, 0, 1]),
    (16, 2, &[1, 1, 0, 0, 1]),
    (25, 5, &[2, 1, 1]),
    (27, 3, &[1, 2, 0, 1]),
    (32, 2, &[1, 0, 1, 0, 0, 1]),
    (49, 7, &[1, 0, 1]),
    (64, 2, &[1, 1, 0, 0, 0, 0, 1]),
];

/// The finite field F_q with q = p^d, realised as Z_p[x]/(f).
///
/// Elements are coordinate tuples `[c_{d-1}, ..., c_1, c_0]` of the residue
/// polynomial, most significant coefficient first, so the canonical index of
/// an element is `sum c_i p^i`. For a prime field the element `[x]` is the
/// integer `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    degree: usize,
    modulus: Vec<u32>,
    group: FiniteAbelianGroup,
}

impl FiniteField {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Self::extension(p, &[0, 1])
    }

    /// Field from a monic modulus given as coefficients `c_0, ..., c_d`.
    pub fn extension(p: u64, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p32 = p as u32;
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p32) {
            return Err(Error::InvalidModulus(format!("coefficients must be reduced mod {p}")));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        let degree = modulus.len() - 1;
        if !is_irreducible(modulus, p32) {
            return Err(Error::ReduciblePolynomial(modulus.to_vec(), p32));
        }
        let group = FiniteAbelianGroup::product(&vec![p; degree])?;
        Ok(FiniteField { p: p32, degree, modulus: modulus.to_vec(), group })
    }

    /// Field of order `q` using the built-in modulus table for proper prime
    /// powers, or `Z_q` when `q` is prime.
    pub fn of_order(q: u64) -> Result<Self> {
        if is_prime(q) {
            return Self::prime(q);
        }
        match BUILTIN_MODULI.iter().find(|(order, _, _)| *order == q) {
            Some(&(_, p, m)) => Self::extension(p as u64, m),
            None => Err(Error::InvalidModulus(format!(
                "no built-in modulus for q = {q}; supply one explicitly"
            ))),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn additive_group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn one(&self) -> Element {
        self.group.element_at(1)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.group.add(a, b)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        let i = self.group.index_of(a)?;
        let j = self.group.index_of(b)?;
        Ok(self.group.element_at(self.mul_index(i, j)))
    }

    /// Multiplication on canonical indices.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        if self.degree == 1 {
            return (a as u64 * b as u64 % self.p as u64) as usize;
        }
        let x = self.poly_of(a);
        let y = self.poly_of(b);
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.degree - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        let mut prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        poly_rem_in_place(&mut prod, &self.modulus, self.p);
        self.index_of_poly(&prod)
    }

    pub fn pow_index(&self, base: usize, mut e: u64) -> usize {
        let mut result = 1usize;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_index(result, b);
            }
            b = self.mul_index(b, b);
            e >>= 1;
        }
        result
    }

    /// Multiplicative order of a nonzero element, by repeated multiplication.
    pub fn multiplicative_order(&self, a: &Element) -> Result<u64> {
        let i = self.group.index_of(a)?;
        if i == 0 {
            return Err(Error::ElementDomain("zero has no multiplicative order".into()));
        }
        Ok(self.order_of_index(i))
    }

    fn order_of_index(&self, i: usize) -> u64 {
        let mut k = 1u64;
        let mut x = i;
        while x != 1 {
            x = self.mul_index(x, i);
            k += 1;
        }
        k
    }

    /// The first element in canonical order whose multiplicative order is q-1.
    pub fn find_primitive_element(&self) -> Element {
        let target = self.order() as u64 - 1;
        let idx = (1..self.order())
            .find(|&i| self.order_of_index(i) == target)
            .expect("the multiplicative group of a finite field is cyclic");
        self.group.element_at(idx)
    }

    fn poly_of(&self, index: usize) -> Vec<u32> {
        // Coefficients low to high.
        let mut out = Vec::with_capacity(self.degree);
        let mut i = index;
        for _ in 0..self.degree {
            out.push((i % self.p as usize) as u32);
            i /= self.p as usize;
        }
        out
    }

    fn index_of_poly(&self, poly: &[u32]) -> usize {
        poly.iter()
            .take(self.degree)
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }
}

/// Reduce `a` modulo the monic polynomial `m` over Z_p; coefficients low to high.
fn poly_rem_in_place(a: &mut Vec<u32>, m: &[u32], p: u32) {
    let d = m.len() - 1;
    let p64 = p as u64;
    while a.len() > d {
        let lead = *a.last().unwrap() as u64;
        let shift = a.len() - 1 - d;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                let sub = lead * mk as u64 % p64;
                a[idx] = ((a[idx] as u64 + p64 - sub) % p64) as u32;
            }
        }
        a.pop();
    }
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let d = modulus.len() - 1;
    for deg in 1..=d / 2 {
        let count = (p as usize).pow(deg as u32);
        for lower in 0..count {
            let mut divisor = Vec::with_capacity(deg + 1);
            let mut x = lower;
            for _ in 0..deg {
                divisor.push((x % p as usize) as u32);
                x /= p as usize;
            }
            divisor.push(1);
            let mut rem = modulus.to_vec();
            poly_rem_in_place(&mut rem, &divisor, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn cyclic_construction() {
        assert_eq!(z(21).order(), 21);
        let g = z(2);
        let elems: Vec<Element> = g.elements().collect();
        assert_eq!(elems, vec![Element::from(0), Element::from(1)]);
        assert_eq!(FiniteAbelianGroup::cyclic(1), Err(Error::InvalidOrder(1)));
        assert_eq!(FiniteAbelianGroup::cyclic(0), Err(Error::InvalidOrder(0)));
    }

    #[test]
    fn addition_and_negation() {
        let g21 = z(21);
        assert_eq!(g21.add(&3.into(), &18.into()).unwrap(), Element::from(0));
        assert_eq!(z(13).add(&8.into(), &11.into()).unwrap(), Element::from(6));
        let g33 = FiniteAbelianGroup::product(&[3, 3]).unwrap();
        let a = g33.element(&[1, 2]).unwrap();
        let b = g33.element(&[2, 2]).unwrap();
        assert_eq!(g33.add(&a, &b).unwrap(), Element::new(vec![0, 1]));
        assert_eq!(g21.neg(&3.into()).unwrap(), Element::from(18));
        assert_eq!(g21.neg(&0.into()).unwrap(), Element::from(0));
        assert_eq!(g33.neg(&a).unwrap(), Element::new(vec![2, 1]));
    }

    #[test]
    fn arity_mismatch_is_domain_error() {
        let g33 = FiniteAbelianGroup::product(&[3, 3]).unwrap();
        assert!(matches!(g33.add(&Element::from(1), &Element::new(vec![1, 1])), Err(Error::ElementDomain(_))));
        assert!(matches!(z(5).neg(&Element::from(5)), Err(Error::ElementDomain(_))));
    }

    #[test]
    fn group_axioms_exhaustive() {
        for g in [z(12), FiniteAbelianGroup::product(&[2, 4]).unwrap(), FiniteAbelianGroup::product(&[3, 3]).unwrap()] {
            let n = g.order();
            for a in 0..n {
                assert_eq!(g.add_index(a, 0), a);
                assert_eq!(g.add_index(a, g.neg_index(a)), 0);
                for b in 0..n {
                    assert_eq!(g.add_index(a, b), g.add_index(b, a));
                    let ea = g.element_at(a);
                    let eb = g.element_at(b);
                    assert_eq!(g.index_of(&g.add(&ea, &eb).unwrap()).unwrap(), g.add_index(a, b));
                    assert_eq!(g.sub_index(a, b), g.add_index(a, g.neg_index(b)));
                    for c in 0..n {
                        assert_eq!(g.add_index(g.add_index(a, b), c), g.add_index(a, g.add_index(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_a_bijection() {
        let g = FiniteAbelianGroup::product(&[2, 3, 4]).unwrap();
        let elems: Vec<Element> = g.elements().collect();
        assert_eq!(elems.len(), 24);
        let mut sorted = elems.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, elems, "canonical order is lexicographic and repetition-free");
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.index_of(e).unwrap(), i);
        }
    }

    #[test]
    fn prime_fields() {
        let f19 = FiniteField::prime(19).unwrap();
        assert_eq!(f19.order(), 19);
        assert_eq!(f19.find_primitive_element(), Element::from(2));
        assert_eq!(FiniteField::prime(2).unwrap().order(), 2);
        assert_eq!(FiniteField::prime(15), Err(Error::NotPrime(15)));
        assert_eq!(FiniteField::prime(3).unwrap().find_primitive_element(), Element::from(2));
        assert_eq!(FiniteField::prime(7).unwrap().find_primitive_element(), Element::from(3));
    }

    #[test]
    fn primitive_orders_by_brute_force() {
        // Oracle: repeated multiplication mod p.
        let order_mod = |a: u64, p: u64| {
            let mut x = a % p;
            let mut k = 1;
            while x != 1 {
                x = x * a % p;
                k += 1;
            }
            k
        };
        assert_eq!(order_mod(2, 19), 18);
        assert_eq!(order_mod(2, 7), 3);
        assert_eq!(order_mod(3, 7), 6);
    }

    #[test]
    fn extension_fields() {
        let f9 = FiniteField::extension(3, &[1, 0, 1]).unwrap();
        assert_eq!(f9.order(), 9);
        assert_eq!(f9.additive_group().orders(), &[3, 3]);
        let f4 = FiniteField::extension(2, &[1, 1, 1]).unwrap();
        assert_eq!(f4.order(), 4);
        assert!(matches!(FiniteField::extension(3, &[2, 0, 1]), Err(Error::ReduciblePolynomial(..))));
        assert!(matches!(FiniteField::extension(3, &[1, 0, 2]), Err(Error::InvalidModulus(_))));
    }

    #[test]
    fn builtin_moduli_are_fields() {
        for q in [4u64, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = FiniteField::of_order(q).unwrap();
            assert_eq!(f.order() as u64, q);
            field_axioms_and_cyclicity(&f);
        }
        assert!(FiniteField::of_order(81).is_err());
    }

    fn field_axioms_and_cyclicity(f: &FiniteField) {
        let q = f.order();
        let g = f.additive_group();
        if q <= 27 {
            for a in 0..q {
                assert_eq!(f.mul_index(a, 1), a);
                for b in 0..q {
                    assert_eq!(f.mul_index(a, b), f.mul_index(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul_index(f.mul_index(a, b), c), f.mul_index(a, f.mul_index(b, c)));
                        assert_eq!(
                            f.mul_index(a, g.add_index(b, c)),
                            g.add_index(f.mul_index(a, b), f.mul_index(a, c))
                        );
                    }
                }
            }
        }
        let alpha = g.index_of(&f.find_primitive_element()).unwrap();
        let mut seen = vec![false; q];
        let mut x = 1usize;
        for _ in 0..q - 1 {
            assert!(!seen[x], "powers of a primitive element repeat early");
            seen[x] = true;
            x = f.mul_index(x, alpha);
        }
        assert_eq!(x, 1);
        assert!(!seen[0]);
        assert_eq!(seen.iter().filter(|&&s| s).count(), q - 1);
    }

    #[test]
    fn prime_field_cyclicity() {
        for p in [2u64, 3, 5, 7, 11, 13, 19, 31, 43] {
            field_axioms_and_cyclicity(&FiniteField::prime(p).unwrap());
        }
    }

    #[test]
    fn groups_of_order() {
        let names = |n| {
            abelian_groups_of_order(n)
                .unwrap()
                .iter()
                .map(|g| g.name())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(9), vec!["Z_9", "Z_3 x Z_3"]);
        assert_eq!(names(10), vec!["Z_10"]);
        assert_eq!(names(12).len(), 2);
        assert_eq!(names(16).len(), 5);
        assert_eq!(names(19), vec!["Z_19"]);
    }
}
