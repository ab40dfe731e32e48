use super::dict::TermId;

/// An encoded quad in `[s, p, o, g]` order.
pub type EncodedQuad = [TermId; 4];

/// A quad pattern in `[s, p, o, g]` order; `None` is a wildcard.
pub type IdPattern = [Option<TermId>; 4];

const S: usize = 0;
const P: usize = 1;
const O: usize = 2;
const G: usize = 3;

/// Key layouts of the four permutations, as positions into `[s, p, o, g]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Gspo,
    Gpos,
    Gosp,
    Spog,
}

impl Ordering {
    pub const ALL: [Ordering; 4] = [Ordering::Gspo, Ordering::Gpos, Ordering::Gosp, Ordering::Spog];

    pub fn layout(self) -> [usize; 4] {
        match self {
            Ordering::Gspo => [G, S, P, O],
            Ordering::Gpos => [G, P, O, S],
            Ordering::Gosp => [G, O, S, P],
            Ordering::Spog => [S, P, O, G],
        }
    }

    fn key(self, q: &EncodedQuad) -> EncodedQuad {
        let l = self.layout();
        [q[l[0]], q[l[1]], q[l[2]], q[l[3]]]
    }

    fn unkey(self, k: &EncodedQuad) -> EncodedQuad {
        let l = self.layout();
        let mut q = [0; 4];
        for (i, &pos) in l.iter().enumerate() {
            q[pos] = k[i];
        }
        q
    }

    /// Number of leading key positions bound in `pat`.
    fn prefix_len(self, pat: &IdPattern) -> usize {
        self.layout().iter().take_while(|&&pos| pat[pos].is_some()).count()
    }
}

/// Sorted, deduplicated quads under all four orderings.
#[derive(Debug, Clone, Default)]
pub struct QuadIndex {
    gspo: Vec<EncodedQuad>,
    gpos: Vec<EncodedQuad>,
    gosp: Vec<EncodedQuad>,
    spog: Vec<EncodedQuad>,
    graphs: Vec<TermId>,
}

impl QuadIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gspo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gspo.is_empty()
    }

    fn keys(&self, ord: Ordering) -> &[EncodedQuad] {
        match ord {
            Ordering::Gspo => &self.gspo,
            Ordering::Gpos => &self.gpos,
            Ordering::Gosp => &self.gosp,
            Ordering::Spog => &self.spog,
        }
    }

    fn keys_mut(&mut self, ord: Ordering) -> &mut Vec<EncodedQuad> {
        match ord {
            Ordering::Gspo => &mut self.gspo,
            Ordering::Gpos => &mut self.gpos,
            Ordering::Gosp => &mut self.gosp,
            Ordering::Spog => &mut self.spog,
        }
    }

    /// Merges `quads` into every ordering. Returns how many were new.
    pub fn insert_batch(&mut self, quads: &[EncodedQuad]) -> usize {
        let before = self.len();
        for ord in Ordering::ALL {
            let keys = self.keys_mut(ord);
            keys.extend(quads.iter().map(|q| ord.key(q)));
            keys.sort_unstable();
            keys.dedup();
        }
        self.graphs = self.gspo.iter().map(|k| k[0]).collect();
        self.graphs.dedup();
        self.len() - before
    }

    /// Distinct graph ids in ascending order, the default graph last.
    pub fn graph_ids(&self) -> &[TermId] {
        &self.graphs
    }

    /// Every quad, in GSPO order.
    pub fn iter(&self) -> impl Iterator<Item = EncodedQuad> + '_ {
        self.gspo.iter().map(|k| Ordering::Gspo.unkey(k))
    }

    pub fn ordering_len(&self, ord: Ordering) -> usize {
        self.keys(ord).len()
    }

    /// The ordering whose key prefix covers the most bound positions.
    pub fn choose(pat: &IdPattern) -> (Ordering, usize) {
        let candidates: &[Ordering] =
            if pat[G].is_some() { &[Ordering::Gspo, Ordering::Gpos, Ordering::Gosp] } else { &[Ordering::Spog] };
        candidates.iter().map(|&o| (o, o.prefix_len(pat))).max_by_key(|&(_, n)| n).unwrap()
    }

    fn scan_range(&self, ord: Ordering, pat: &IdPattern, f: &mut impl FnMut(EncodedQuad)) {
        let layout = ord.layout();
        let n = ord.prefix_len(pat);
        let prefix: Vec<TermId> = layout[..n].iter().map(|&pos| pat[pos].unwrap()).collect();
        let keys = self.keys(ord);
        let lo = keys.partition_point(|k| k[..n] < prefix[..]);
        let hi = lo + keys[lo..].partition_point(|k| k[..n] <= prefix[..]);
        for k in &keys[lo..hi] {
            let q = ord.unkey(k);
            if pat.iter().zip(&q).all(|(p, v)| p.is_none_or(|p| p == *v)) {
                f(q);
            }
        }
    }

    /// Calls `f` for every quad matching `pat`.
    ///
    /// With the graph and subject both unbound the lookup runs once per graph
    /// on the graph-prefixed orderings so predicate/object bindings still
    /// narrow the range.
    pub fn for_each_match(&self, pat: &IdPattern, mut f: impl FnMut(EncodedQuad)) {
        if pat[G].is_none() && pat[S].is_none() && (pat[P].is_some() || pat[O].is_some()) {
            for &g in &self.graphs {
                let mut scoped = *pat;
                scoped[G] = Some(g);
                let (ord, _) = Self::choose(&scoped);
                self.scan_range(ord, &scoped, &mut f);
            }
            return;
        }
        let (ord, _) = Self::choose(pat);
        self.scan_range(ord, pat, &mut f);
    }

    pub fn matches(&self, pat: &IdPattern) -> Vec<EncodedQuad> {
        let mut out = Vec::new();
        self.for_each_match(pat, |q| out.push(q));
        out
    }

    pub fn contains(&self, q: &EncodedQuad) -> bool {
        self.gspo.binary_search(&Ordering::Gspo.key(q)).is_ok()
    }
}
