//! Bitset domain store. One flat word vector holds every variable's
//! membership bits; the per-variable bounds and sizes are cached so the
//! abstract evaluator can read intervals in O(1).

#[derive(Debug)]
pub(crate) struct Layout {
    base: Vec<i64>,
    word_off: Vec<usize>,
    width: Vec<u64>,
    total_words: usize,
}

pub(crate) const MAX_DOMAIN: u64 = 1 << 22;

impl Layout {
    /// `bounds` must be non-empty inclusive ranges no wider than
    /// [`MAX_DOMAIN`].
    pub fn new(bounds: &[(i64, i64)]) -> Self {
        let mut base = Vec::with_capacity(bounds.len());
        let mut word_off = Vec::with_capacity(bounds.len());
        let mut width = Vec::with_capacity(bounds.len());
        let mut total = 0usize;
        for &(lo, hi) in bounds {
            let w = (hi - lo) as u64 + 1;
            base.push(lo);
            word_off.push(total);
            width.push(w);
            total += w.div_ceil(64) as usize;
        }
        Layout {
            base,
            word_off,
            width,
            total_words: total,
        }
    }

    pub fn initial(&self) -> Domains {
        let mut words = vec![0u64; self.total_words];
        let n = self.base.len();
        let mut min = Vec::with_capacity(n);
        let mut max = Vec::with_capacity(n);
        let mut size = Vec::with_capacity(n);
        for v in 0..n {
            let w = self.width[v];
            let off = self.word_off[v];
            let full = (w / 64) as usize;
            for word in &mut words[off..off + full] {
                *word = u64::MAX;
            }
            if w % 64 != 0 {
                words[off + full] = (1u64 << (w % 64)) - 1;
            }
            min.push(self.base[v]);
            max.push(self.base[v] + w as i64 - 1);
            size.push(w);
        }
        Domains {
            words,
            min,
            max,
            size,
        }
    }

    fn slot(&self, var: usize, value: i64) -> Option<(usize, u64)> {
        let rel = value.checked_sub(self.base[var])?;
        if rel < 0 || rel as u64 >= self.width[var] {
            return None;
        }
        let rel = rel as u64;
        Some((self.word_off[var] + (rel / 64) as usize, 1u64 << (rel % 64)))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Domains {
    words: Vec<u64>,
    min: Vec<i64>,
    max: Vec<i64>,
    size: Vec<u64>,
}

impl Domains {
    pub fn min(&self, var: usize) -> i64 {
        self.min[var]
    }

    pub fn max(&self, var: usize) -> i64 {
        self.max[var]
    }

    pub fn size(&self, var: usize) -> u64 {
        self.size[var]
    }

    pub fn is_fixed(&self, var: usize) -> bool {
        self.size[var] == 1
    }

    pub fn contains(&self, layout: &Layout, var: usize, value: i64) -> bool {
        match layout.slot(var, value) {
            Some((w, bit)) => self.words[w] & bit != 0,
            None => false,
        }
    }

    /// Removes `value`; returns whether the domain changed.
    pub fn remove(&mut self, layout: &Layout, var: usize, value: i64) -> bool {
        let Some((w, bit)) = layout.slot(var, value) else {
            return false;
        };
        if self.words[w] & bit == 0 {
            return false;
        }
        self.words[w] &= !bit;
        self.size[var] -= 1;
        if self.size[var] == 0 {
            return true;
        }
        if value == self.min[var] {
            self.min[var] = self.next_from(layout, var, value + 1);
        }
        if value == self.max[var] {
            self.max[var] = self.prev_from(layout, var, value - 1);
        }
        true
    }

    /// Restricts the domain to `{value}`.
    pub fn assign(&mut self, layout: &Layout, var: usize, value: i64) {
        let off = layout.word_off[var];
        let words = layout.width[var].div_ceil(64) as usize;
        for word in &mut self.words[off..off + words] {
            *word = 0;
        }
        if let Some((w, bit)) = layout.slot(var, value) {
            self.words[w] = bit;
            self.min[var] = value;
            self.max[var] = value;
            self.size[var] = 1;
        } else {
            self.size[var] = 0;
        }
    }

    fn next_from(&self, layout: &Layout, var: usize, mut value: i64) -> i64 {
        while value <= self.max[var] {
            if self.contains(layout, var, value) {
                return value;
            }
            value += 1;
        }
        value
    }

    fn prev_from(&self, layout: &Layout, var: usize, mut value: i64) -> i64 {
        while value >= self.min[var] {
            if self.contains(layout, var, value) {
                return value;
            }
            value -= 1;
        }
        value
    }

    /// Current values of `var` in ascending order.
    pub fn values(&self, layout: &Layout, var: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.size[var] as usize);
        if self.size[var] == 0 {
            return out;
        }
        let mut v = self.min[var];
        while v <= self.max[var] {
            if self.contains(layout, var, v) {
                out.push(v);
            }
            v += 1;
        }
        out
    }
}
