/// Continuous-knapsack relaxation: `offset` plus the best fractional fill of
/// items worth `f_j * tbar_j` and costing `g_j` into `residual` budget.
///
/// Items are taken in descending value-per-cost order; the first one that
/// does not fit is taken fractionally.
pub fn lp_upper_bound(offset: f64, tbar: &[f64], f: &[f64], g: &[f64], residual: f64) -> f64 {
    debug_assert!(tbar.len() == f.len() && f.len() == g.len());
    let mut items: Vec<(f64, f64)> = tbar
        .iter()
        .zip(f)
        .zip(g)
        .map(|((&t, &f), &g)| (f * t, g))
        .collect();
    items.sort_by(|a, b| (b.0 / b.1).total_cmp(&(a.0 / a.1)));

    let mut bound = offset;
    let mut room = residual.max(0.0);
    for (value, cost) in items {
        if room <= 0.0 {
            break;
        }
        if cost <= room {
            bound += value;
            room -= cost;
        } else {
            bound += value * (room / cost);
            break;
        }
    }
    bound
}
