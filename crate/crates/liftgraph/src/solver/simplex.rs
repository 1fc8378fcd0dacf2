/// Euclidean projection onto the unit simplex
/// `{c : c_k ≥ 0, Σ_k c_k = 1}` by the sorting method: with the entries
/// sorted descending, the largest prefix whose shifted values stay
/// positive determines the threshold `θ`, and the projection is
/// `max(v_k − θ, 0)`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    let mut scratch = v.to_vec();
    project_simplex_in_place(&mut out, &mut scratch);
    out
}

/// In-place variant for hot loops; `scratch` must have `v`'s length.
pub(crate) fn project_simplex_in_place(v: &mut [f64], scratch: &mut [f64]) {
    debug_assert_eq!(v.len(), scratch.len());
    scratch.copy_from_slice(v);
    scratch.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite values"));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (k, &u) in scratch.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}
