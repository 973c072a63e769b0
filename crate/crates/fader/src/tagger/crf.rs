//! Linear-chain CRF over BILOU tags with a hard transition mask.
//!
//! Path score = start score + per-token emissions + transitions + end score.
//! Illegal BILOU transitions contribute `MASK` instead of a learned weight,
//! so decoded output is always a valid tag sequence and masked parameters
//! never receive gradient.

use crate::error::{Error, Result};
use crate::kb::CoarseType;
use crate::supervision::{BilouPrefix, Tag};

use super::nn::Tensor;

/// Effective score of a masked transition. Large enough to exclude a path
/// from both max and log-sum-exp, small enough to avoid NaN arithmetic.
pub const MASK: f64 = -1e30;

/// The tag inventory `{O} ∪ {B,I,L,U} × types` with its BILOU legality
/// masks.
#[derive(Debug, Clone, PartialEq)]
pub struct TagSet {
    types: Vec<CoarseType>,
    tags: Vec<Tag>,
    allowed: Vec<Vec<bool>>,
    allowed_start: Vec<bool>,
    allowed_end: Vec<bool>,
}

impl TagSet {
    pub fn new(types: &[CoarseType]) -> Self {
        let mut tags = vec![Tag::Outside];
        for &ty in types {
            for prefix in [
                BilouPrefix::Begin,
                BilouPrefix::Inside,
                BilouPrefix::Last,
                BilouPrefix::Unit,
            ] {
                tags.push(Tag::Entity(prefix, ty));
            }
        }
        let n = tags.len();
        let mut allowed = vec![vec![false; n]; n];
        for (a, &from) in tags.iter().enumerate() {
            for (b, &to) in tags.iter().enumerate() {
                allowed[a][b] = legal_transition(from, to);
            }
        }
        let allowed_start = tags.iter().map(|&t| legal_start(t)).collect();
        let allowed_end = tags.iter().map(|&t| legal_end(t)).collect();
        TagSet {
            types: types.to_vec(),
            tags,
            allowed,
            allowed_start,
            allowed_end,
        }
    }

    /// All seven coarse types.
    pub fn full() -> Self {
        TagSet::new(&CoarseType::ALL)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn types(&self) -> &[CoarseType] {
        &self.types
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag(&self, idx: usize) -> Tag {
        self.tags[idx]
    }

    pub fn index_of(&self, tag: Tag) -> Option<usize> {
        self.tags.iter().position(|&t| t == tag)
    }

    pub fn allowed(&self, from: usize, to: usize) -> bool {
        self.allowed[from][to]
    }

    pub fn allowed_start(&self, tag: usize) -> bool {
        self.allowed_start[tag]
    }

    pub fn allowed_end(&self, tag: usize) -> bool {
        self.allowed_end[tag]
    }

    /// Whether a whole indexed path is legal, including start and end.
    pub fn path_legal(&self, path: &[usize]) -> bool {
        if path.is_empty() {
            return false;
        }
        if !self.allowed_start[path[0]] || !self.allowed_end[*path.last().unwrap()] {
            return false;
        }
        path.windows(2).all(|w| self.allowed[w[0]][w[1]])
    }
}

fn legal_start(to: Tag) -> bool {
    !matches!(
        to,
        Tag::Entity(BilouPrefix::Inside, _) | Tag::Entity(BilouPrefix::Last, _)
    )
}

fn legal_end(from: Tag) -> bool {
    !matches!(
        from,
        Tag::Entity(BilouPrefix::Begin, _) | Tag::Entity(BilouPrefix::Inside, _)
    )
}

fn legal_transition(from: Tag, to: Tag) -> bool {
    match from {
        // open span: must continue with I/L of the same type
        Tag::Entity(BilouPrefix::Begin, t) | Tag::Entity(BilouPrefix::Inside, t) => matches!(
            to,
            Tag::Entity(BilouPrefix::Inside, u) | Tag::Entity(BilouPrefix::Last, u) if u == t
        ),
        // closed position: anything that does not continue a span
        Tag::Outside | Tag::Entity(BilouPrefix::Last, _) | Tag::Entity(BilouPrefix::Unit, _) => {
            legal_start(to)
        }
    }
}

/// CRF parameters: learned transition table plus start/end scores.
#[derive(Debug, Clone)]
pub struct Crf {
    pub transitions: Tensor,
    pub start: Tensor,
    pub end: Tensor,
}

impl Crf {
    pub fn new(n_tags: usize, rng: &mut crate::rng::Rng) -> Self {
        Crf {
            transitions: Tensor::glorot(n_tags, n_tags, rng),
            start: Tensor::zeros(n_tags, 1),
            end: Tensor::zeros(n_tags, 1),
        }
    }

    pub fn trans_eff(&self, tagset: &TagSet, a: usize, b: usize) -> f64 {
        if tagset.allowed(a, b) {
            self.transitions.data[a * tagset.len() + b]
        } else {
            MASK
        }
    }

    pub fn start_eff(&self, tagset: &TagSet, t: usize) -> f64 {
        if tagset.allowed_start(t) {
            self.start.data[t]
        } else {
            MASK
        }
    }

    pub fn end_eff(&self, tagset: &TagSet, t: usize) -> f64 {
        if tagset.allowed_end(t) {
            self.end.data[t]
        } else {
            MASK
        }
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max <= MASK {
        return MASK;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Log-partition over all mask-legal paths.
pub fn forward(crf: &Crf, tagset: &TagSet, emissions: &[Vec<f64>]) -> f64 {
    let n_tags = tagset.len();
    assert!(!emissions.is_empty(), "sentence must have length >= 1");
    let mut alpha: Vec<f64> = (0..n_tags)
        .map(|t| crf.start_eff(tagset, t) + emissions[0][t])
        .collect();
    let mut scratch = vec![0.0; n_tags];
    for emit in emissions.iter().skip(1) {
        let mut next = vec![0.0; n_tags];
        for (b, next_b) in next.iter_mut().enumerate() {
            for a in 0..n_tags {
                scratch[a] = alpha[a] + crf.trans_eff(tagset, a, b);
            }
            *next_b = log_sum_exp(&scratch) + emit[b];
        }
        alpha = next;
    }
    for (t, a) in alpha.iter_mut().enumerate() {
        *a += crf.end_eff(tagset, t);
    }
    log_sum_exp(&alpha)
}

/// Score of one specific path, accumulated in sequence order (start, first
/// emission, then transition + emission pairs, then end).
pub fn path_score(crf: &Crf, tagset: &TagSet, emissions: &[Vec<f64>], path: &[usize]) -> f64 {
    debug_assert_eq!(emissions.len(), path.len());
    let mut score = crf.start_eff(tagset, path[0]) + emissions[0][path[0]];
    for i in 1..path.len() {
        score += crf.trans_eff(tagset, path[i - 1], path[i]) + emissions[i][path[i]];
    }
    score + crf.end_eff(tagset, *path.last().unwrap())
}

/// Negative log-likelihood of the gold path, with gradients.
///
/// Returns `(loss, d_emissions)` and accumulates gradients into the CRF
/// tensors via forward-backward marginals. The gold path must be mask-legal.
pub fn loss_and_grad(
    crf: &mut Crf,
    tagset: &TagSet,
    emissions: &[Vec<f64>],
    gold: &[usize],
) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = emissions.len();
    let n_tags = tagset.len();
    if n == 0 || gold.len() != n {
        return Err(Error::InvalidArgument(
            "emissions and gold tags must align and be non-empty".into(),
        ));
    }
    if !tagset.path_legal(gold) {
        return Err(Error::CorruptData(
            "gold tag sequence violates the BILOU transition mask".into(),
        ));
    }

    // alpha[i][t]: log mass of prefixes ending in t at i (emissions included)
    let mut alpha = vec![vec![0.0; n_tags]; n];
    for t in 0..n_tags {
        alpha[0][t] = crf.start_eff(tagset, t) + emissions[0][t];
    }
    let mut scratch = vec![0.0; n_tags];
    for i in 1..n {
        for b in 0..n_tags {
            for a in 0..n_tags {
                scratch[a] = alpha[i - 1][a] + crf.trans_eff(tagset, a, b);
            }
            alpha[i][b] = log_sum_exp(&scratch) + emissions[i][b];
        }
    }
    // beta[i][t]: log mass of suffixes starting after i given tag t at i
    // (emission at i excluded, end score included)
    let mut beta = vec![vec![0.0; n_tags]; n];
    for t in 0..n_tags {
        beta[n - 1][t] = crf.end_eff(tagset, t);
    }
    for i in (0..n - 1).rev() {
        for a in 0..n_tags {
            for b in 0..n_tags {
                scratch[b] = crf.trans_eff(tagset, a, b) + emissions[i + 1][b] + beta[i + 1][b];
            }
            beta[i][a] = log_sum_exp(&scratch);
        }
    }
    let log_z = {
        let terms: Vec<f64> = (0..n_tags).map(|t| alpha[n - 1][t] + beta[n - 1][t]).collect();
        log_sum_exp(&terms)
    };
    let gold_score = path_score(crf, tagset, emissions, gold);
    let loss = log_z - gold_score;

    // unary marginals -> emission/start/end gradients
    let mut d_emissions = vec![vec![0.0; n_tags]; n];
    for i in 0..n {
        for t in 0..n_tags {
            let lp = alpha[i][t] + beta[i][t] - log_z;
            let p = if lp <= MASK / 2.0 { 0.0 } else { lp.exp() };
            d_emissions[i][t] = p;
        }
        d_emissions[i][gold[i]] -= 1.0;
    }
    // start/end gradients equal the boundary unary marginals minus gold
    // indicators, which is exactly d_emissions at those positions
    for t in 0..n_tags {
        if tagset.allowed_start(t) {
            crf.start.grad[t] += d_emissions[0][t];
        }
        if tagset.allowed_end(t) {
            crf.end.grad[t] += d_emissions[n - 1][t];
        }
    }
    // pairwise marginals -> transition gradients
    for i in 0..n - 1 {
        for a in 0..n_tags {
            for b in 0..n_tags {
                if !tagset.allowed(a, b) {
                    continue;
                }
                let lp = alpha[i][a]
                    + crf.trans_eff(tagset, a, b)
                    + emissions[i + 1][b]
                    + beta[i + 1][b]
                    - log_z;
                let mut g = if lp <= MASK / 2.0 { 0.0 } else { lp.exp() };
                if gold[i] == a && gold[i + 1] == b {
                    g -= 1.0;
                }
                crf.transitions.grad[a * n_tags + b] += g;
            }
        }
    }
    Ok((loss, d_emissions))
}

/// Maximum-scoring mask-legal path; ties break toward the lexicographically
/// smallest tag-index sequence. Returns (path, score).
pub fn viterbi(crf: &Crf, tagset: &TagSet, emissions: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = emissions.len();
    let n_tags = tagset.len();
    assert!(n >= 1, "sentence must have length >= 1");
    // per state: best score and the lexicographically smallest best prefix
    let mut score: Vec<f64> = (0..n_tags)
        .map(|t| crf.start_eff(tagset, t) + emissions[0][t])
        .collect();
    let mut paths: Vec<Vec<usize>> = (0..n_tags).map(|t| vec![t]).collect();
    for emit in emissions.iter().skip(1) {
        let mut new_score = vec![MASK; n_tags];
        let mut new_paths: Vec<Vec<usize>> = vec![Vec::new(); n_tags];
        for b in 0..n_tags {
            let mut best: Option<(f64, usize)> = None;
            for a in 0..n_tags {
                let cand = score[a] + crf.trans_eff(tagset, a, b) + emit[b];
                match best {
                    None => best = Some((cand, a)),
                    Some((bs, ba)) => {
                        if cand > bs || (cand == bs && paths[a] < paths[ba]) {
                            best = Some((cand, a));
                        }
                    }
                }
            }
            let (s, a) = best.unwrap();
            new_score[b] = s;
            let mut p = paths[a].clone();
            p.push(b);
            new_paths[b] = p;
        }
        score = new_score;
        paths = new_paths;
    }
    let mut best: Option<(f64, usize)> = None;
    for t in 0..n_tags {
        let cand = score[t] + crf.end_eff(tagset, t);
        match best {
            None => best = Some((cand, t)),
            Some((bs, bt)) => {
                if cand > bs || (cand == bs && paths[t] < paths[bt]) {
                    best = Some((cand, t));
                }
            }
        }
    }
    let (s, t) = best.unwrap();
    (paths[t].clone(), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn two_type_tagset() -> TagSet {
        TagSet::new(&[CoarseType::Person, CoarseType::Group])
    }

    /// All legal paths of the given length, by brute-force enumeration.
    pub fn enumerate_legal_paths(tagset: &TagSet, len: usize) -> Vec<Vec<usize>> {
        let mut paths: Vec<Vec<usize>> = (0..tagset.len())
            .filter(|&t| tagset.allowed_start(t))
            .map(|t| vec![t])
            .collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for p in &paths {
                let last = *p.last().unwrap();
                for t in 0..tagset.len() {
                    if tagset.allowed(last, t) {
                        let mut q = p.clone();
                        q.push(t);
                        next.push(q);
                    }
                }
            }
            paths = next;
        }
        paths
            .into_iter()
            .filter(|p| tagset.allowed_end(*p.last().unwrap()))
            .collect()
    }

    fn random_instance(rng: &mut Rng, tagset: &TagSet, len: usize) -> (Crf, Vec<Vec<f64>>) {
        let mut crf = Crf::new(tagset.len(), rng);
        for x in &mut crf.start.data {
            *x = rng.uniform(-1.0, 1.0);
        }
        for x in &mut crf.end.data {
            *x = rng.uniform(-1.0, 1.0);
        }
        let emissions = (0..len)
            .map(|_| (0..tagset.len()).map(|_| rng.uniform(-2.0, 2.0)).collect())
            .collect();
        (crf, emissions)
    }

    #[test]
    fn mask_structure() {
        let ts = two_type_tagset();
        let o = ts.index_of(Tag::Outside).unwrap();
        let b_p = ts
            .index_of(Tag::Entity(BilouPrefix::Begin, CoarseType::Person))
            .unwrap();
        let i_p = ts
            .index_of(Tag::Entity(BilouPrefix::Inside, CoarseType::Person))
            .unwrap();
        let l_p = ts
            .index_of(Tag::Entity(BilouPrefix::Last, CoarseType::Person))
            .unwrap();
        let u_p = ts
            .index_of(Tag::Entity(BilouPrefix::Unit, CoarseType::Person))
            .unwrap();
        let i_g = ts
            .index_of(Tag::Entity(BilouPrefix::Inside, CoarseType::Group))
            .unwrap();
        assert!(!ts.allowed(o, i_p));
        assert!(!ts.allowed(o, l_p));
        assert!(!ts.allowed(u_p, i_p));
        assert!(!ts.allowed(l_p, i_p));
        assert!(!ts.allowed(b_p, b_p));
        assert!(!ts.allowed(b_p, u_p));
        assert!(!ts.allowed(b_p, o));
        assert!(!ts.allowed(b_p, i_g));
        assert!(ts.allowed(b_p, i_p));
        assert!(ts.allowed(b_p, l_p));
        assert!(ts.allowed(i_p, l_p));
        assert!(ts.allowed(o, b_p));
        assert!(ts.allowed(o, u_p));
        assert!(!ts.allowed_start(i_p));
        assert!(!ts.allowed_start(l_p));
        assert!(ts.allowed_start(b_p));
        assert!(!ts.allowed_end(b_p));
        assert!(!ts.allowed_end(i_p));
        assert!(ts.allowed_end(l_p));
        assert!(ts.allowed_end(u_p));
        assert!(ts.allowed_end(o));
    }

    #[test]
    fn uniform_two_path_partition() {
        // 1 token, all start-legal tags except O and U-PERSON pushed to MASK
        // via emissions: log-partition must be log 2
        let ts = two_type_tagset();
        let mut rng = Rng::new(1);
        let mut crf = Crf::new(ts.len(), &mut rng);
        crf.start.data.iter_mut().for_each(|x| *x = 0.0);
        crf.end.data.iter_mut().for_each(|x| *x = 0.0);
        let o = ts.index_of(Tag::Outside).unwrap();
        let u_p = ts
            .index_of(Tag::Entity(BilouPrefix::Unit, CoarseType::Person))
            .unwrap();
        let mut emit = vec![MASK; ts.len()];
        emit[o] = 0.0;
        emit[u_p] = 0.0;
        let log_z = forward(&crf, &ts, &[emit]);
        assert!((log_z - 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn forward_matches_bruteforce() {
        let ts = two_type_tagset();
        let mut rng = Rng::new(7);
        for _ in 0..50 {
            let len = 1 + rng.gen_range(5);
            let (crf, emissions) = random_instance(&mut rng, &ts, len);
            let log_z = forward(&crf, &ts, &emissions);
            let paths = enumerate_legal_paths(&ts, len);
            let scores: Vec<f64> = paths
                .iter()
                .map(|p| path_score(&crf, &ts, &emissions, p))
                .collect();
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let brute = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
            assert!((log_z - brute).abs() < 1e-8, "{log_z} vs {brute}");
            assert!(log_z >= max - 1e-12, "partition below max path");
        }
    }

    #[test]
    fn viterbi_matches_bruteforce() {
        let ts = two_type_tagset();
        let mut rng = Rng::new(8);
        for _ in 0..100 {
            let len = 1 + rng.gen_range(5);
            let (crf, emissions) = random_instance(&mut rng, &ts, len);
            let (path, score) = viterbi(&crf, &ts, &emissions);
            let paths = enumerate_legal_paths(&ts, len);
            let mut best: Option<(f64, &Vec<usize>)> = None;
            for p in &paths {
                let s = path_score(&crf, &ts, &emissions, p);
                match best {
                    None => best = Some((s, p)),
                    Some((bs, bp)) => {
                        if s > bs || (s == bs && p < bp) {
                            best = Some((s, p));
                        }
                    }
                }
            }
            let (bs, bp) = best.unwrap();
            assert!((score - bs).abs() < 1e-8);
            assert_eq!(&path, bp);
        }
    }

    #[test]
    fn viterbi_ties_break_lexicographically() {
        // all-zero weights: every legal path scores 0; expect the smallest
        let ts = two_type_tagset();
        let crf = Crf {
            transitions: Tensor::zeros(ts.len(), ts.len()),
            start: Tensor::zeros(ts.len(), 1),
            end: Tensor::zeros(ts.len(), 1),
        };
        let emissions = vec![vec![0.0; ts.len()]; 3];
        let (path, _) = viterbi(&crf, &ts, &emissions);
        // lexicographically smallest legal 3-path starts with O (index 0)
        assert_eq!(path, vec![0, 0, 0]);
    }

    #[test]
    fn decoder_avoids_masked_transitions() {
        // emissions strongly favour [B-PERSON, O], but B->O is illegal
        let ts = two_type_tagset();
        let mut rng = Rng::new(9);
        let crf = Crf::new(ts.len(), &mut rng);
        let b_p = ts
            .index_of(Tag::Entity(BilouPrefix::Begin, CoarseType::Person))
            .unwrap();
        let o = ts.index_of(Tag::Outside).unwrap();
        let mut e0 = vec![-5.0; ts.len()];
        e0[b_p] = 10.0;
        let mut e1 = vec![-5.0; ts.len()];
        e1[o] = 10.0;
        let emissions = vec![e0, e1];
        let (path, score) = viterbi(&crf, &ts, &emissions);
        assert!(ts.path_legal(&path));
        // exhaustive check over legal 2-token paths
        let paths = enumerate_legal_paths(&ts, 2);
        let best = paths
            .iter()
            .map(|p| path_score(&crf, &ts, &emissions, p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((score - best).abs() < 1e-9);
    }

    #[test]
    fn loss_is_ln2_for_two_equal_paths() {
        let ts = two_type_tagset();
        let mut crf = Crf {
            transitions: Tensor::zeros(ts.len(), ts.len()),
            start: Tensor::zeros(ts.len(), 1),
            end: Tensor::zeros(ts.len(), 1),
        };
        let o = ts.index_of(Tag::Outside).unwrap();
        let u_p = ts
            .index_of(Tag::Entity(BilouPrefix::Unit, CoarseType::Person))
            .unwrap();
        let mut emit = vec![MASK; ts.len()];
        emit[o] = 0.0;
        emit[u_p] = 0.0;
        let (loss, _) = loss_and_grad(&mut crf, &ts, &[emit.clone()], &[o]).unwrap();
        assert!((loss - 2.0_f64.ln()).abs() < 1e-9);
        let (loss, _) = loss_and_grad(&mut crf, &ts, &[emit], &[u_p]).unwrap();
        assert!((loss - 2.0_f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn loss_approaches_zero_when_gold_dominates() {
        let ts = two_type_tagset();
        let mut crf = Crf {
            transitions: Tensor::zeros(ts.len(), ts.len()),
            start: Tensor::zeros(ts.len(), 1),
            end: Tensor::zeros(ts.len(), 1),
        };
        let o = ts.index_of(Tag::Outside).unwrap();
        let mut emit = vec![-40.0; ts.len()];
        emit[o] = 40.0;
        let (loss, _) = loss_and_grad(&mut crf, &ts, &[emit], &[o]).unwrap();
        assert!(loss >= 0.0);
        assert!(loss < 1e-12);
    }

    #[test]
    fn illegal_gold_is_an_error() {
        let ts = two_type_tagset();
        let mut rng = Rng::new(10);
        let mut crf = Crf::new(ts.len(), &mut rng);
        let i_p = ts
            .index_of(Tag::Entity(BilouPrefix::Inside, CoarseType::Person))
            .unwrap();
        let emissions = vec![vec![0.0; ts.len()]; 1];
        assert!(loss_and_grad(&mut crf, &ts, &emissions, &[i_p]).is_err());
    }

    #[test]
    fn crf_gradients_match_fd() {
        let ts = two_type_tagset();
        let mut rng = Rng::new(11);
        for _ in 0..10 {
            let len = 1 + rng.gen_range(4);
            let (crf_ro, emissions) = random_instance(&mut rng, &ts, len);
            let legal = enumerate_legal_paths(&ts, len);
            let gold = legal[rng.gen_range(legal.len())].clone();

            let mut crf = crf_ro.clone();
            let (_, d_emissions) =
                loss_and_grad(&mut crf, &ts, &emissions, &gold).unwrap();

            let h = 1e-6;
            // emission grads
            for i in 0..len {
                for t in 0..ts.len() {
                    let mut plus = emissions.clone();
                    plus[i][t] += h;
                    let mut minus = emissions.clone();
                    minus[i][t] -= h;
                    let lp = forward(&crf_ro, &ts, &plus)
                        - path_score(&crf_ro, &ts, &plus, &gold);
                    let lm = forward(&crf_ro, &ts, &minus)
                        - path_score(&crf_ro, &ts, &minus, &gold);
                    let fd = (lp - lm) / (2.0 * h);
                    assert!(
                        (d_emissions[i][t] - fd).abs() < 1e-5,
                        "emission [{i}][{t}]: {} vs {fd}",
                        d_emissions[i][t]
                    );
                }
            }
            // transition grads
            for a in 0..ts.len() {
                for b in 0..ts.len() {
                    let mut plus = crf_ro.clone();
                    plus.transitions.data[a * ts.len() + b] += h;
                    let mut minus = crf_ro.clone();
                    minus.transitions.data[a * ts.len() + b] -= h;
                    let lp = forward(&plus, &ts, &emissions)
                        - path_score(&plus, &ts, &emissions, &gold);
                    let lm = forward(&minus, &ts, &emissions)
                        - path_score(&minus, &ts, &emissions, &gold);
                    let fd = (lp - lm) / (2.0 * h);
                    let g = crf.transitions.grad[a * ts.len() + b];
                    assert!((g - fd).abs() < 1e-5, "trans [{a}][{b}]: {g} vs {fd}");
                }
            }
        }
    }
}
