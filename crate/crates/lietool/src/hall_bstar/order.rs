//! The total order on G and the Hall membership test.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use super::HallError;
use crate::algebra_core::BracketTree;

/// Pairs whose total length is below this are compared directly.
const MEMO_MIN_LEN: u32 = 12;
const MEMO_MAX_ENTRIES: usize = 1 << 20;

static MEMO: LazyLock<RwLock<HashMap<(BracketTree, BracketTree), Ordering>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Order on G; both arguments must lie in G.
pub(crate) fn cmp_g(a: &BracketTree, b: &BracketTree) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    if a.is_x0() {
        return Ordering::Greater;
    }
    if b.is_x0() {
        return Ordering::Less;
    }
    let memo = a.len() + b.len() >= MEMO_MIN_LEN;
    if memo {
        if let Some(o) = MEMO.read().expect("memo lock").get(&(a.clone(), b.clone())) {
            return *o;
        }
    }
    let (ga, na) = a.germ();
    let (gb, nb) = b.germ();
    let o = if ga == gb { na.cmp(&nb) } else { cmp_germs(&ga, &gb) };
    if memo {
        let mut m = MEMO.write().expect("memo lock");
        if m.len() >= MEMO_MAX_ENTRIES {
            m.clear();
        }
        m.insert((a.clone(), b.clone()), o);
    }
    o
}

fn cmp_germs(a: &BracketTree, b: &BracketTree) -> Ordering {
    a.n1().cmp(&b.n1()).then_with(|| match (a.children(), b.children()) {
        (Some((la, ma)), Some((lb, mb))) => cmp_g(la, lb).then_with(|| cmp_g(ma, mb)),
        // Only X1 is a leaf germ, and distinct germs with n1 = 1 do not exist.
        _ => Ordering::Equal,
    })
}

/// Compares two elements of G under the B* order.
pub fn compare(a: &BracketTree, b: &BracketTree) -> Result<Ordering, HallError> {
    for t in [a, b] {
        if !t.in_g() {
            return Err(HallError::NotInG(t.canonical()));
        }
    }
    Ok(cmp_g(a, b))
}

/// Whether `b` belongs to B*.
pub fn is_hall(b: &BracketTree) -> bool {
    if !b.in_g() {
        return false;
    }
    match b.children() {
        None => true,
        Some((b1, b2)) => {
            is_hall(b1)
                && is_hall(b2)
                && cmp_g(b1, b2) == Ordering::Less
                && match b2.left() {
                    None => true,
                    Some(l) => cmp_g(l, b1) != Ordering::Greater,
                }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::named::{m, p, w};
    use crate::algebra_core::parse_tree;

    #[test]
    fn documented_comparisons() {
        assert_eq!(compare(&BracketTree::x1(), &m(1)).unwrap(), Ordering::Less);
        assert_eq!(compare(&m(5), &w(1, 0).unwrap()).unwrap(), Ordering::Less);
        assert_eq!(compare(&w(1, 3).unwrap(), &w(2, 0).unwrap()).unwrap(), Ordering::Less);
        assert_eq!(compare(&BracketTree::x0(), &m(9)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn comparing_outside_g_is_an_error() {
        let bad = parse_tree("(X0,X1)").unwrap();
        assert!(matches!(compare(&bad, &BracketTree::x1()), Err(HallError::NotInG(_))));
    }

    #[test]
    fn membership_examples() {
        for nu in 0..4 {
            assert!(is_hall(&m(nu)));
        }
        assert!(!is_hall(&parse_tree("(X0,X1)").unwrap()));
        assert!(!is_hall(&parse_tree("(X1,X1)").unwrap()));
        let pp = BracketTree::pair(&p(1, 1, 0).unwrap(), &p(1, 2, 0).unwrap());
        assert!(is_hall(&pp));
        assert!(!is_hall(&BracketTree::pair(&m(1), &m(0))));
    }
}
