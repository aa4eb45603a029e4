use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ingest::{ConstituencyTree, TreeNode};

pub const DEFAULT_LAMBDA: f64 = 0.4;

/// Interns production strings so trees prepared against the same table can be compared by id.
#[derive(Debug, Default, Clone)]
pub struct ProductionTable {
    ids: HashMap<String, u32>,
}

impl ProductionTable {
    fn intern(&mut self, p: String) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(p).or_insert(next)
    }
}

#[derive(Debug, Clone)]
struct Node {
    production: Option<u32>,
    children: Vec<usize>,
}

/// A tree flattened to preorder with interned productions and its self-kernel cached.
#[derive(Debug, Clone)]
pub struct PreparedTree {
    nodes: Vec<Node>,
    by_production: Vec<(u32, usize)>,
    self_kernel: f64,
    lambda: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("tree kernel lambda must be in (0, 1], got {lambda}")))
    }
}

impl PreparedTree {
    pub fn new(tree: &ConstituencyTree, lambda: f64, table: &mut ProductionTable) -> Result<Self> {
        check_lambda(lambda)?;
        let mut nodes = Vec::new();
        flatten(&tree.root, table, &mut nodes);
        let mut by_production: Vec<(u32, usize)> = nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.production.map(|p| (p, i)))
            .collect();
        if by_production.is_empty() {
            return Err(Error::invalid("tree has no production"));
        }
        by_production.sort_unstable();
        let mut t = PreparedTree {
            nodes,
            by_production,
            self_kernel: 0.0,
            lambda,
        };
        t.self_kernel = raw(&t, &t);
        Ok(t)
    }

    pub fn self_kernel(&self) -> f64 {
        self.self_kernel
    }
}

fn flatten(node: &TreeNode, table: &mut ProductionTable, out: &mut Vec<Node>) -> usize {
    let id = out.len();
    out.push(Node {
        production: node.production().map(|p| table.intern(p)),
        children: Vec::new(),
    });
    let children: Vec<usize> = node.children.iter().map(|c| flatten(c, table, out)).collect();
    out[id].children = children;
    id
}

/// Sum of the fragment-matching recursion over node pairs with equal productions.
fn raw(a: &PreparedTree, b: &PreparedTree) -> f64 {
    let lambda = a.lambda;
    let nb = b.nodes.len();
    let mut delta = vec![0.0f64; a.nodes.len() * nb];
    // matching pairs, children before parents (reverse preorder on the `a` side)
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.by_production.len() && j < b.by_production.len() {
        let (pa, pb) = (a.by_production[i].0, b.by_production[j].0);
        if pa < pb {
            i += 1;
        } else if pa > pb {
            j += 1;
        } else {
            let j_end = j + b.by_production[j..].iter().take_while(|x| x.0 == pa).count();
            while i < a.by_production.len() && a.by_production[i].0 == pa {
                for &(_, nj) in &b.by_production[j..j_end] {
                    pairs.push((a.by_production[i].1, nj));
                }
                i += 1;
            }
            j = j_end;
        }
    }
    pairs.sort_unstable_by(|x, y| y.cmp(x));
    let mut total = 0.0;
    for &(n1, n2) in &pairs {
        let mut d = lambda;
        for (&c1, &c2) in a.nodes[n1].children.iter().zip(&b.nodes[n2].children) {
            if a.nodes[c1].production.is_some() {
                d *= 1.0 + delta[c1 * nb + c2];
            }
        }
        delta[n1 * nb + n2] = d;
        total += d;
    }
    total
}

/// Unnormalized subset-tree kernel.
pub fn tree_kernel_raw(t1: &ConstituencyTree, t2: &ConstituencyTree, lambda: f64) -> Result<f64> {
    let mut table = ProductionTable::default();
    let a = PreparedTree::new(t1, lambda, &mut table)?;
    let b = PreparedTree::new(t2, lambda, &mut table)?;
    Ok(raw(&a, &b))
}

/// Kernel between two trees prepared against the same table, normalized to [0, 1].
pub fn prepared_kernel(a: &PreparedTree, b: &PreparedTree) -> f64 {
    let k = raw(a, b) / (a.self_kernel * b.self_kernel).sqrt();
    k.min(1.0)
}

/// Normalized subset-tree kernel K(a,b) / sqrt(K(a,a) K(b,b)).
pub fn tree_kernel(t1: &ConstituencyTree, t2: &ConstituencyTree, lambda: f64) -> Result<f64> {
    let mut table = ProductionTable::default();
    let a = PreparedTree::new(t1, lambda, &mut table)?;
    let b = PreparedTree::new(t2, lambda, &mut table)?;
    Ok(prepared_kernel(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_ptb;

    fn t(s: &str) -> ConstituencyTree {
        parse_ptb(s).unwrap()
    }

    #[test]
    fn self_similarity_is_one() {
        let a = t("(S (VP (VERB pick) (NP (DET the) (NOUN apple))))");
        for lambda in [0.1, 0.4, 1.0] {
            assert!((tree_kernel(&a, &a, lambda).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_productions() {
        let a = t("(S (VERB go))");
        let b = t("(X (NOUN cat))");
        assert_eq!(tree_kernel(&a, &b, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn hand_counted_raw_value() {
        // shared: VP -> VERB NP, NP -> DET NOUN, DET -> 'the', NOUN -> 'apple'
        // delta(DET)=l, delta(NOUN)=l, delta(NP)=l(1+l)^2, delta(VP)=l(1+0)(1+delta(NP))
        let a = t("(VP (VERB pick) (NP (DET the) (NOUN apple)))");
        let b = t("(VP (VERB move) (NP (DET the) (NOUN apple)))");
        let l: f64 = 0.5;
        let np = l * (1.0 + l) * (1.0 + l);
        let expect = 2.0 * l + np + l * (1.0 + np);
        assert!((tree_kernel_raw(&a, &b, l).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn symmetric() {
        let a = t("(S (NP (NOUN robot)) (VP (VERB move) (ADV left)))");
        let b = t("(S (NP (NOUN robot)) (VP (VERB move)))");
        let ab = tree_kernel(&a, &b, 0.4).unwrap();
        let ba = tree_kernel(&b, &a, 0.4).unwrap();
        assert!((ab - ba).abs() < 1e-15);
        assert!(ab > 0.0 && ab < 1.0);
    }

    #[test]
    fn raw_kernel_grows_with_lambda() {
        let a = t("(S (NP (NOUN robot)) (VP (VERB move) (ADV left)))");
        let b = t("(S (NP (NOUN robot)) (VP (VERB move) (ADV right)))");
        let mut prev = 0.0;
        for lambda in [0.1, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let k = tree_kernel_raw(&a, &b, lambda).unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        let a = t("(S (VERB go))");
        assert!(tree_kernel(&a, &a, 0.0).is_err());
        assert!(tree_kernel(&a, &a, 1.5).is_err());
    }
}
