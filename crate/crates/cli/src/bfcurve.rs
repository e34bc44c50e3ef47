//! Bayes-factor curves over a grid of imaginary sample sizes for two
//! structures differing in a single family: the sparse/uniform score ratio
//! of that family, and the Bayes factor of the denser structure under each
//! score.

use anyhow::{bail, Result};
use bnsl::{count_family, local_bdeu, local_bds, Dag, Dataset, FamilyCounts};

#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub alpha: f64,
    /// log BDs(family under g_plus) - log BDeu(family under g_plus)
    pub log_bds_over_bdeu: f64,
    /// log Bayes factor of g_plus vs g_minus under BDeu
    pub log_bf_bdeu: f64,
    /// log Bayes factor of g_plus vs g_minus under BDs
    pub log_bf_bds: f64,
}

pub struct FamilyPair {
    pub node: usize,
    plus: FamilyCounts,
    minus: FamilyCounts,
}

/// Locates the single node whose parent set differs between the structures
/// and counts its family under both.
pub fn differing_family(data: &Dataset, g_plus: &Dag, g_minus: &Dag) -> Result<FamilyPair> {
    if g_plus.node_count() != g_minus.node_count()
        || g_plus.node_count() != data.variable_count()
    {
        bail!("structures and data must share one variable set");
    }
    let differing: Vec<usize> = (0..g_plus.node_count())
        .filter(|&i| g_plus.parents(i) != g_minus.parents(i))
        .collect();
    let [node] = differing.as_slice() else {
        bail!(
            "structures must differ in exactly one family, found {} differing",
            differing.len()
        );
    };
    Ok(FamilyPair {
        node: *node,
        plus: count_family(data, *node, g_plus.parents(*node))?,
        minus: count_family(data, *node, g_minus.parents(*node))?,
    })
}

pub fn curve(pair: &FamilyPair, alphas: &[f64]) -> Result<Vec<CurvePoint>> {
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let bdeu_plus = local_bdeu(&pair.plus, alpha)?;
        let bds_plus = local_bds(&pair.plus, alpha)?;
        let bdeu_minus = local_bdeu(&pair.minus, alpha)?;
        let bds_minus = local_bds(&pair.minus, alpha)?;
        points.push(CurvePoint {
            alpha,
            log_bds_over_bdeu: bds_plus - bdeu_plus,
            log_bf_bdeu: bdeu_plus - bdeu_minus,
            log_bf_bds: bds_plus - bds_minus,
        });
    }
    Ok(points)
}

pub fn write_curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("# bnsl-bfcurve v1\n");
    out.push_str(
        "alpha,log_bds_over_bdeu,bds_over_bdeu,log_bf_bdeu,bf_bdeu,log_bf_bds,bf_bds\n",
    );
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.alpha,
            p.log_bds_over_bdeu,
            p.log_bds_over_bdeu.exp(),
            p.log_bf_bdeu,
            p.log_bf_bdeu.exp(),
            p.log_bf_bds,
            p.log_bf_bds.exp(),
        ));
    }
    out
}
