//! Discontinuous spans, precedence arrays, and precedence array vectors.
//!
//! A [`DSpan`] is an ordered list of non-overlapping boundary intervals in one
//! dimension. Boundaries are 0-based: position 0 sits to the left of the
//! first word. A [`PrecedenceArray`] describes the contiguity and relative
//! order of the parts of a production's right-hand-side links in one
//! dimension; a [`Pav`] holds one array per dimension.
//!
//! Text forms: d-span `(1,3;7,9)`, precedence array `[1;2,1]`, PAV
//! `[1,2|2,1]` (no inner brackets, `|` between dimensions, empty entry for
//! an inactive dimension).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Word-boundary index.
pub type Pos = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DSpanError {
    #[error("d-spans {0} and {1} overlap")]
    Overlap(DSpan, DSpan),
    #[error("d-span {tau} is not covered by {nu}")]
    NotCovered { nu: DSpan, tau: DSpan },
    #[error("malformed d-span: {0}")]
    Malformed(String),
    #[error("malformed precedence array: {0}")]
    MalformedArray(String),
    #[error("precedence array index {index} refers to a link that is inactive in dimension {dim}")]
    InactiveLink { dim: usize, index: usize },
    #[error("precedence array index {index} is out of range for {links} links")]
    IndexOutOfRange { index: usize, links: usize },
}

/// A discontinuous span: `(b1,e1; ...; bm,em)` with `b_i <= e_i <= b_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DSpan(Vec<(Pos, Pos)>);

impl DSpan {
    pub fn empty() -> Self {
        DSpan(Vec::new())
    }

    /// The single-word span `(i-1, i)` for 1-based word position `i`.
    pub fn word(i: Pos) -> Self {
        debug_assert!(i >= 1);
        DSpan(vec![(i - 1, i)])
    }

    pub fn interval(begin: Pos, end: Pos) -> Self {
        assert!(begin <= end, "interval ({begin},{end}) is reversed");
        DSpan(vec![(begin, end)])
    }

    pub fn new(intervals: Vec<(Pos, Pos)>) -> Result<Self, DSpanError> {
        let span = DSpan(intervals);
        if span.is_well_formed() {
            Ok(span)
        } else {
            Err(DSpanError::Malformed(span.to_string()))
        }
    }

    fn is_well_formed(&self) -> bool {
        self.0.iter().all(|&(b, e)| b <= e) && self.0.windows(2).all(|w| w[0].1 <= w[1].0)
    }

    pub fn intervals(&self) -> &[(Pos, Pos)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of covered word positions.
    pub fn width(&self) -> Pos {
        self.0.iter().map(|&(b, e)| e - b).sum()
    }

    /// Number of contiguous elements.
    pub fn fan_out(&self) -> usize {
        self.0.len()
    }

    /// All inequalities strict: no zero-width intervals, a gap between
    /// consecutive intervals.
    pub fn is_proper(&self) -> bool {
        self.0.iter().all(|&(b, e)| b < e) && self.0.windows(2).all(|w| w[0].1 < w[1].0)
    }

    pub fn first(&self) -> Option<Pos> {
        self.0.first().map(|&(b, _)| b)
    }

    pub fn last(&self) -> Option<Pos> {
        self.0.last().map(|&(_, e)| e)
    }

    /// Whether any interval of `self` shares interior with one of `other`.
    pub fn overlaps(&self, other: &DSpan) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (b1, e1) = self.0[i];
            let (b2, e2) = other.0[j];
            if b1.max(b2) < e1.min(e2) {
                return true;
            }
            // zero-width intervals never overlap anything
            if e1 <= e2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    /// Ordered concatenation (`+`). Touching intervals are merged.
    pub fn concat(&self, other: &DSpan) -> Result<DSpan, DSpanError> {
        if self.overlaps(other) {
            return Err(DSpanError::Overlap(self.clone(), other.clone()));
        }
        let mut all: Vec<(Pos, Pos)> = self.0.iter().chain(other.0.iter()).copied().collect();
        all.sort_unstable();
        let mut out: Vec<(Pos, Pos)> = Vec::with_capacity(all.len());
        for (b, e) in all {
            match out.last_mut() {
                Some(last) if last.1 == b => last.1 = e,
                _ => out.push((b, e)),
            }
        }
        Ok(DSpan(out))
    }

    /// Relativization (`≀`): the precedence array of `self` (index 1) and
    /// `other` (index 2) in their merged order.
    pub fn relativize(&self, other: &DSpan) -> Result<PrecedenceArray, DSpanError> {
        if self.overlaps(other) {
            return Err(DSpanError::Overlap(self.clone(), other.clone()));
        }
        let mut tagged: Vec<(Pos, Pos, u8)> = self
            .0
            .iter()
            .map(|&(b, e)| (b, e, 1))
            .chain(other.0.iter().map(|&(b, e)| (b, e, 2)))
            .collect();
        tagged.sort_unstable();
        let mut segments: Vec<Vec<u8>> = Vec::new();
        let mut prev_end: Option<Pos> = None;
        for (b, e, tag) in tagged {
            match prev_end {
                Some(pe) if pe == b => {
                    let seg = segments.last_mut().expect("segment open");
                    if *seg.last().expect("non-empty segment") != tag {
                        seg.push(tag);
                    }
                }
                _ => segments.push(vec![tag]),
            }
            prev_end = Some(e);
        }
        Ok(PrecedenceArray { segments })
    }

    /// Subtraction (`-`): the d-span `sigma` with `sigma + tau = self`.
    pub fn subtract(&self, tau: &DSpan) -> Result<DSpan, DSpanError> {
        let not_covered = || DSpanError::NotCovered {
            nu: self.clone(),
            tau: tau.clone(),
        };
        let mut out = Vec::new();
        let mut cuts = tau.0.iter().filter(|&&(b, e)| b < e).peekable();
        for &(b, e) in &self.0 {
            let mut cursor = b;
            while let Some(&&(tb, te)) = cuts.peek() {
                if tb >= e {
                    break;
                }
                if tb < cursor || te > e {
                    return Err(not_covered());
                }
                if tb > cursor {
                    out.push((cursor, tb));
                }
                cursor = te;
                cuts.next();
            }
            if cursor < e {
                out.push((cursor, e));
            }
        }
        if cuts.next().is_some() {
            return Err(not_covered());
        }
        Ok(DSpan(out))
    }

    /// Reverse relativization (`⊘`): `(self - tau) ≀ tau`.
    pub fn rev_relativize(&self, tau: &DSpan) -> Result<PrecedenceArray, DSpanError> {
        self.subtract(tau)?.relativize(tau)
    }
}

impl fmt::Display for DSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, (b, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "{b},{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for DSpan {
    type Err = DSpanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DSpanError::Malformed(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Ok(DSpan::empty());
        }
        let mut intervals = Vec::new();
        for part in inner.split(';') {
            let (b, e) = part.split_once(',').ok_or_else(bad)?;
            let b = b.trim().parse().map_err(|_| bad())?;
            let e = e.trim().parse().map_err(|_| bad())?;
            intervals.push((b, e));
        }
        DSpan::new(intervals)
    }
}

/// Componentwise `+` over d-span vectors.
pub fn concat_all(a: &[DSpan], b: &[DSpan]) -> Result<Vec<DSpan>, DSpanError> {
    a.iter().zip(b).map(|(x, y)| x.concat(y)).collect()
}

/// Componentwise `≀` over d-span vectors.
pub fn relativize_all(a: &[DSpan], b: &[DSpan]) -> Result<Vec<PrecedenceArray>, DSpanError> {
    a.iter().zip(b).map(|(x, y)| x.relativize(y)).collect()
}

/// Componentwise `-` over d-span vectors.
pub fn subtract_all(nu: &[DSpan], tau: &[DSpan]) -> Result<Vec<DSpan>, DSpanError> {
    nu.iter().zip(tau).map(|(x, y)| x.subtract(y)).collect()
}

/// A precedence array: runs of link indexes (1-based) separated by gaps.
/// Empty exactly when the dimension is inactive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PrecedenceArray {
    segments: Vec<Vec<u8>>,
}

impl PrecedenceArray {
    pub fn inactive() -> Self {
        PrecedenceArray::default()
    }

    pub fn from_segments(segments: Vec<Vec<u8>>) -> Result<Self, DSpanError> {
        let array = PrecedenceArray { segments };
        if array
            .segments
            .iter()
            .any(|s| s.is_empty() || s.contains(&0))
        {
            return Err(DSpanError::MalformedArray(array.to_string()));
        }
        Ok(array)
    }

    /// A contiguous array with no gaps.
    pub fn contiguous(indexes: Vec<u8>) -> Self {
        if indexes.is_empty() {
            return Self::inactive();
        }
        PrecedenceArray {
            segments: vec![indexes],
        }
    }

    pub fn segments(&self) -> &[Vec<u8>] {
        &self.segments
    }

    pub fn is_inactive(&self) -> bool {
        self.segments.is_empty()
    }

    /// Number of contiguous elements.
    pub fn fan_out(&self) -> usize {
        self.segments.len()
    }

    /// Indexes in order, gaps dropped.
    pub fn indexes(&self) -> impl Iterator<Item = u8> + '_ {
        self.segments.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// How many separate parts of link `index` this array references.
    pub fn count_of(&self, index: u8) -> usize {
        self.indexes().filter(|&i| i == index).count()
    }

    pub fn max_index(&self) -> u8 {
        self.indexes().max().unwrap_or(0)
    }

    /// Same array with every index remapped.
    pub fn remap(&self, map: impl Fn(u8) -> u8) -> Self {
        PrecedenceArray {
            segments: self
                .segments
                .iter()
                .map(|s| s.iter().map(|&i| map(i)).collect())
                .collect(),
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, seg) in self.segments.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            for (m, i) in seg.iter().enumerate() {
                if m > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{i}")?;
            }
        }
        Ok(())
    }

    fn parse_bare(s: &str) -> Result<Self, DSpanError> {
        let bad = || DSpanError::MalformedArray(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::inactive());
        }
        let segments = s
            .split(';')
            .map(|seg| {
                seg.split(',')
                    .map(|i| i.trim().parse::<u8>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_segments(segments)
    }
}

impl fmt::Display for PrecedenceArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        self.write_bare(f)?;
        f.write_str("]")
    }
}

impl FromStr for PrecedenceArray {
    type Err = DSpanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| DSpanError::MalformedArray(s.to_string()))?;
        Self::parse_bare(inner)
    }
}

/// Precedence array vector: one array per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pav(pub Vec<PrecedenceArray>);

impl Pav {
    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn arrays(&self) -> &[PrecedenceArray] {
        &self.0
    }

    /// Sum of the fan-outs of the component arrays.
    pub fn fan_out(&self) -> usize {
        self.0.iter().map(PrecedenceArray::fan_out).sum()
    }

    pub fn max_index(&self) -> u8 {
        self.0
            .iter()
            .map(PrecedenceArray::max_index)
            .max()
            .unwrap_or(0)
    }

    /// Whether the first appearances of the indexes, over the concatenated
    /// arrays, are in increasing order.
    pub fn is_normal(&self) -> bool {
        let mut next = 1u8;
        for i in self.0.iter().flat_map(|a| a.indexes()) {
            if i == next {
                next += 1;
            } else if i > next {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Pav {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (d, a) in self.0.iter().enumerate() {
            if d > 0 {
                f.write_str("|")?;
            }
            a.write_bare(f)?;
        }
        f.write_str("]")
    }
}

impl FromStr for Pav {
    type Err = DSpanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| DSpanError::MalformedArray(s.to_string()))?;
        inner
            .split('|')
            .map(PrecedenceArray::parse_bare)
            .collect::<Result<Vec<_>, _>>()
            .map(Pav)
    }
}

/// One element of a joined component: a symbol tagged with its link index,
/// or a gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Joined<T> {
    Symbol(T, usize),
    Gap,
}

/// The join operator: rearranges the symbols of each component of the link
/// vector according to that component's precedence array.
///
/// `links[k][d]` is the symbol of link `k + 1` in dimension `d`, `None` for
/// an inactive component.
pub fn join<T: Clone>(
    pav: &Pav,
    links: &[Vec<Option<T>>],
) -> Result<Vec<Vec<Joined<T>>>, DSpanError> {
    let mut out = Vec::with_capacity(pav.dims());
    for (dim, array) in pav.arrays().iter().enumerate() {
        let mut row = Vec::new();
        for (k, seg) in array.segments().iter().enumerate() {
            if k > 0 {
                row.push(Joined::Gap);
            }
            for &index in seg {
                let index = index as usize;
                let link = links.get(index - 1).ok_or(DSpanError::IndexOutOfRange {
                    index,
                    links: links.len(),
                })?;
                let sym = link
                    .get(dim)
                    .cloned()
                    .flatten()
                    .ok_or(DSpanError::InactiveLink { dim, index })?;
                row.push(Joined::Symbol(sym, index));
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Puts a PAV and its link vector into normal form: link indexes are
/// renumbered in order of first appearance across the concatenated arrays,
/// and the link vector is permuted to match. Links that never appear keep
/// their relative order after the ones that do.
pub fn normalize_pav<T: Clone>(pav: &Pav, links: &[Vec<Option<T>>]) -> (Pav, Vec<Vec<Option<T>>>) {
    let mut order: Vec<usize> = Vec::with_capacity(links.len());
    for i in pav.arrays().iter().flat_map(|a| a.indexes()) {
        let i = i as usize;
        if !order.contains(&i) {
            order.push(i);
        }
    }
    for i in 1..=links.len() {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    // new index of old index i
    let mut renumber = vec![0u8; order.len().max(links.len()) + 1];
    for (new, &old) in order.iter().enumerate() {
        if old < renumber.len() {
            renumber[old] = (new + 1) as u8;
        }
    }
    let pav = Pav(pav
        .arrays()
        .iter()
        .map(|a| a.remap(|i| renumber[i as usize]))
        .collect());
    let links = order
        .iter()
        .filter_map(|&old| links.get(old - 1).cloned())
        .collect();
    (pav, links)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(s: &str) -> DSpan {
        s.parse().unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(
            ds("(1,3;8,9)").concat(&ds("(7,8)")).unwrap(),
            ds("(1,3;7,9)")
        );
        assert_eq!(ds("()").concat(&ds("(2,4)")).unwrap(), ds("(2,4)"));
        assert_eq!(ds("(0,1)").concat(&ds("(1,2)")).unwrap(), ds("(0,2)"));
        assert!(matches!(
            ds("(0,2)").concat(&ds("(1,3)")),
            Err(DSpanError::Overlap(..))
        ));
    }

    #[test]
    fn relativize_examples() {
        assert_eq!(
            ds("(1,3;8,9)")
                .relativize(&ds("(7,8)"))
                .unwrap()
                .to_string(),
            "[1;2,1]"
        );
        assert_eq!(
            ds("(0,1)").relativize(&ds("(1,2)")).unwrap().to_string(),
            "[1,2]"
        );
        assert_eq!(
            ds("(1,2;3,4)")
                .relativize(&ds("(2,3)"))
                .unwrap()
                .to_string(),
            "[1,2,1]"
        );
        assert_eq!(
            ds("()").relativize(&ds("()")).unwrap(),
            PrecedenceArray::inactive()
        );
        assert_eq!(
            ds("(0,1;2,3)").relativize(&ds("()")).unwrap().to_string(),
            "[1;1]"
        );
        assert!(ds("(0,2)").relativize(&ds("(1,3)")).is_err());
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(
            ds("(1,3;7,9)").subtract(&ds("(7,8)")).unwrap(),
            ds("(1,3;8,9)")
        );
        assert_eq!(ds("(2,4)").subtract(&ds("(2,4)")).unwrap(), ds("()"));
        assert_eq!(ds("(0,5)").subtract(&ds("(1,2)")).unwrap(), ds("(0,1;2,5)"));
        assert!(matches!(
            ds("(0,2)").subtract(&ds("(1,3)")),
            Err(DSpanError::NotCovered { .. })
        ));
        assert!(ds("(0,2)").subtract(&ds("(4,5)")).is_err());
    }

    #[test]
    fn rev_relativize_examples() {
        assert_eq!(
            ds("(1,3;7,9)")
                .rev_relativize(&ds("(7,8)"))
                .unwrap()
                .to_string(),
            "[1;2,1]"
        );
        assert_eq!(
            ds("(0,2)")
                .rev_relativize(&ds("(1,2)"))
                .unwrap()
                .to_string(),
            "[1,2]"
        );
        assert_eq!(
            ds("(0,5)")
                .rev_relativize(&ds("(1,2)"))
                .unwrap()
                .to_string(),
            "[1,2,1]"
        );
    }

    #[test]
    fn span_properties() {
        let s = ds("(1,3;5,5)");
        assert!(!s.is_proper());
        assert_eq!(s.width(), 2);
        assert!(ds("(1,3;4,5)").is_proper());
        assert!(!ds("(1,3;3,5)").is_proper());
        assert!("(3,1)".parse::<DSpan>().is_err());
        assert!("(1,3;2,5)".parse::<DSpan>().is_err());
    }

    #[test]
    fn pav_text_round_trip() {
        let p: Pav = "[1,2;3|1,4,1||2]".parse().unwrap();
        assert_eq!(p.dims(), 4);
        assert!(p.arrays()[2].is_inactive());
        assert_eq!(p.to_string(), "[1,2;3|1,4,1||2]");
        assert_eq!(p.fan_out(), 2 + 1 + 0 + 1);
    }

    fn col(syms: &[&str]) -> Vec<Option<&'static str>> {
        syms.iter()
            .map(|s| {
                if *s == "_" {
                    None
                } else {
                    Some(Box::leak(s.to_string().into_boxed_str()) as &str)
                }
            })
            .collect()
    }

    fn render(rows: &[Vec<Joined<&str>>]) -> Vec<String> {
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|j| match j {
                        Joined::Symbol(s, i) => format!("{s}{i}"),
                        Joined::Gap => ";".to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn join_three_dimensions() {
        let pav: Pav = "[1,2,3|4,2,1,5|3,2,4]".parse().unwrap();
        let links = vec![
            col(&["A", "Y", "_"]),
            col(&["B", "X", "U"]),
            col(&["C", "_", "V"]),
            col(&["_", "W", "T"]),
            col(&["_", "Z", "_"]),
        ];
        let joined = join(&pav, &links).unwrap();
        assert_eq!(render(&joined), vec!["A1 B2 C3", "W4 X2 Y1 Z5", "V3 U2 T4"]);
    }

    #[test]
    fn join_wrap_with_gap() {
        let pav: Pav = "[1,2;3|1,4,1]".parse().unwrap();
        let links = vec![
            col(&["A", "D"]),
            col(&["e", "_"]),
            col(&["C", "_"]),
            col(&["_", "A"]),
        ];
        let joined = join(&pav, &links).unwrap();
        assert_eq!(render(&joined), vec!["A1 e2 ; C3", "D1 A4 D1"]);
    }

    #[test]
    fn join_rejects_inactive_reference() {
        let pav: Pav = "[1,2|1,2]".parse().unwrap();
        let links = vec![col(&["A", "B"]), col(&["C", "_"])];
        assert_eq!(
            join(&pav, &links),
            Err(DSpanError::InactiveLink { dim: 1, index: 2 })
        );
        let single: Pav = "[1]".parse().unwrap();
        assert_eq!(render(&join(&single, &[col(&["A"])]).unwrap()), vec!["A1"]);
    }

    #[test]
    fn normalize_alternative_ordering() {
        // Z-link listed before the W/T link
        let pav: Pav = "[1,2,3|5,2,1,4|3,2,5]".parse().unwrap();
        let links = vec![
            col(&["A", "Y", "_"]),
            col(&["B", "X", "U"]),
            col(&["C", "_", "V"]),
            col(&["_", "Z", "_"]),
            col(&["_", "W", "T"]),
        ];
        assert!(!pav.is_normal());
        let (norm, permuted) = normalize_pav(&pav, &links);
        assert_eq!(norm.arrays()[1].to_string(), "[4,2,1,5]");
        assert!(norm.is_normal());
        assert_eq!(
            render(&join(&norm, &permuted).unwrap()),
            vec!["A1 B2 C3", "W4 X2 Y1 Z5", "V3 U2 T4"]
        );
        let symbols = |rows: Vec<String>| -> Vec<String> {
            rows.iter()
                .map(|r| r.replace(|c: char| c.is_ascii_digit(), ""))
                .collect()
        };
        assert_eq!(
            symbols(render(&join(&norm, &permuted).unwrap())),
            symbols(render(&join(&pav, &links).unwrap()))
        );
        let (again, _) = normalize_pav(&norm, &permuted);
        assert_eq!(again, norm);
    }
}
