//! Test-bed code families, check-matrix file I/O and check colorings.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::{self, BitRow, EchelonBasis};
use crate::sparse::{CheckMatrix, DecodingProblem, IndexSet, WeightVector};

/// A CSS code in the decoding convention where `hx` detects X errors and
/// `ax` gives the logical action of X errors (so `hz * ax^T = 0`).
#[derive(Clone, Debug)]
pub struct CssCode {
    pub hx: CheckMatrix,
    pub hz: CheckMatrix,
    pub ax: CheckMatrix,
    pub az: CheckMatrix,
    pub n: usize,
    pub k: usize,
    /// Known or claimed distance, if any.
    pub d: Option<usize>,
}

impl CssCode {
    /// Assembles a CSS code, computing logical action matrices and `k`.
    pub fn from_checks(hx: CheckMatrix, hz: CheckMatrix, d: Option<usize>) -> Result<Self> {
        if hx.num_cols() != hz.num_cols() {
            return Err(Error::DimensionMismatch { expected: hx.num_cols(), found: hz.num_cols() });
        }
        let n = hx.num_cols();
        let ax = logical_basis(&hz, &hx);
        let az = logical_basis(&hx, &hz);
        let k = n - gf2::rank(&hx) - gf2::rank(&hz);
        debug_assert_eq!(ax.num_rows(), k);
        debug_assert_eq!(az.num_rows(), k);
        Ok(CssCode { hx, hz, ax, az, n, k, d })
    }

    /// The X-noise decoding problem `(H_X, A_X)` with unit weights.
    pub fn x_problem(&self) -> DecodingProblem {
        DecodingProblem::uniform(self.hx.clone(), Some(self.ax.clone()))
    }

    /// The Z-noise decoding problem `(H_Z, A_Z)` with unit weights.
    pub fn z_problem(&self) -> DecodingProblem {
        DecodingProblem::uniform(self.hz.clone(), Some(self.az.clone()))
    }

    /// `H_X H_Z^T = 0 (mod 2)`.
    pub fn commutes(&self) -> bool {
        let hz_rows = gf2::to_bit_rows(&self.hz);
        gf2::to_bit_rows(&self.hx)
            .iter()
            .all(|x| hz_rows.iter().all(|z| !x.dot(z)))
    }
}

/// Rows of `ker(annihilator)` that are independent modulo `rowspace(stabilizers)`.
fn logical_basis(annihilator: &CheckMatrix, stabilizers: &CheckMatrix) -> CheckMatrix {
    let n = annihilator.num_cols();
    let mut span = EchelonBasis::new(n);
    for row in gf2::to_bit_rows(stabilizers) {
        span.insert(&row);
    }
    let mut kernel = gf2::kernel_basis(annihilator);
    // Prefer light representatives.
    kernel.sort_by_key(BitRow::count_ones);
    let rows: Vec<Vec<usize>> = kernel
        .into_iter()
        .filter(|v| span.insert(v))
        .map(|v| v.ones().collect())
        .collect();
    CheckMatrix::from_rows(n, rows).expect("kernel vectors are in range")
}

/// Triangular 6.6.6 color code of odd distance `d >= 3`.
///
/// Built on the triangular lattice `{(r, c) : 0 <= c <= r <= R}` with
/// `R = 3(d-1)/2`. Sites with `(r + c) mod 3 == 1` are faces, all other
/// sites are qubits, and a face acts on its (up to six) lattice neighbours.
/// Both check matrices are the face-qubit incidence.
pub fn color_code(d: usize) -> Result<CssCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("color code distance must be odd and >= 3, got {d}")));
    }
    let size = 3 * (d - 1) / 2;
    let mut qubit_index = std::collections::HashMap::new();
    let mut faces = Vec::new();
    for r in 0..=size as i64 {
        for c in 0..=r {
            if (r + c) % 3 == 1 {
                faces.push((r, c));
            } else {
                let next = qubit_index.len();
                qubit_index.insert((r, c), next);
            }
        }
    }
    const NEIGHBOURS: [(i64, i64); 6] = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, -1)];
    let rows: Vec<Vec<usize>> = faces
        .iter()
        .map(|&(r, c)| {
            NEIGHBOURS
                .iter()
                .filter_map(|(dr, dc)| qubit_index.get(&(r + dr, c + dc)).copied())
                .collect()
        })
        .collect();
    let n = qubit_index.len();
    let h = CheckMatrix::from_rows(n, rows)?;
    CssCode::from_checks(h.clone(), h, Some(d))
}

/// A monomial `x^i y^j` of the bivariate group algebra over `Z_l x Z_m`.
pub type Monomial = (usize, usize);

/// Bivariate bicycle code with `H_X = [A | B]`, `H_Z = [B^T | A^T]`.
pub fn bivariate_bicycle(l: usize, m: usize, a: &[Monomial], b: &[Monomial]) -> Result<CssCode> {
    if l == 0 || m == 0 {
        return Err(Error::InvalidParameter("bivariate bicycle dimensions must be positive".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("monomial lists must be non-empty".into()));
    }
    let lm = l * m;
    // Row (p, q) of x^i y^j has its one in column (p + i, q + j).
    let poly = |terms: &[Monomial]| -> Vec<Vec<usize>> {
        (0..lm)
            .map(|row| {
                let (p, q) = (row / m, row % m);
                terms
                    .iter()
                    .map(|&(i, j)| ((p + i) % l) * m + (q + j) % m)
                    .collect()
            })
            .collect()
    };
    let pa = poly(a);
    let pb = poly(b);
    let transpose = |rows: &[Vec<usize>]| -> Vec<Vec<usize>> {
        let mut t = vec![Vec::new(); lm];
        for (i, r) in rows.iter().enumerate() {
            for &j in r {
                t[j].push(i);
            }
        }
        t
    };
    let (pat, pbt) = (transpose(&pa), transpose(&pb));
    let hx_rows = (0..lm)
        .map(|i| pa[i].iter().copied().chain(pb[i].iter().map(|&j| j + lm)).collect())
        .collect();
    let hz_rows = (0..lm)
        .map(|i| pbt[i].iter().copied().chain(pat[i].iter().map(|&j| j + lm)).collect())
        .collect();
    let hx = CheckMatrix::from_rows_mod2(2 * lm, hx_rows)?;
    let hz = CheckMatrix::from_rows_mod2(2 * lm, hz_rows)?;
    CssCode::from_checks(hx, hz, None)
}

/// The `[[144, 12, 12]]` gross code: `l = 12, m = 6, A = x^3 + y + y^2, B = y^3 + x + x^2`.
pub fn gross_code() -> CssCode {
    let mut code = bivariate_bicycle(12, 6, &[(3, 0), (0, 1), (0, 2)], &[(0, 3), (1, 0), (2, 0)])
        .expect("valid parameters");
    code.d = Some(12);
    code
}

/// The `[[72, 12, 6]]` bivariate bicycle code (`l = m = 6`, same polynomials).
pub fn bb72_code() -> CssCode {
    let mut code = bivariate_bicycle(6, 6, &[(3, 0), (0, 1), (0, 2)], &[(0, 3), (1, 0), (2, 0)])
        .expect("valid parameters");
    code.d = Some(6);
    code
}

/// Parses a polynomial such as `x3+y+y2` or `1+x` into monomials.
pub fn parse_polynomial(s: &str) -> Result<Vec<Monomial>> {
    let bad = || Error::InvalidParameter(format!("cannot parse polynomial term in '{s}'"));
    let mut out = Vec::new();
    for term in s.split('+').map(str::trim) {
        if term.is_empty() {
            return Err(bad());
        }
        if term == "1" {
            out.push((0, 0));
            continue;
        }
        let (mut i, mut j) = (0usize, 0usize);
        let mut chars = term.chars().peekable();
        while let Some(var) = chars.next() {
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let exp = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| bad())? };
            match var {
                'x' => i += exp,
                'y' => j += exp,
                _ => return Err(bad()),
            }
        }
        out.push((i, j));
    }
    Ok(out)
}

/// Proper coloring of the check-conflict graph (checks sharing a fault are adjacent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckColoring {
    pub color: Vec<usize>,
    pub num_colors: usize,
}

impl CheckColoring {
    /// Verifies that no fault touches two checks of the same color.
    pub fn is_valid_for(&self, h: &CheckMatrix) -> bool {
        self.color.len() == h.num_rows()
            && self.color.iter().all(|&c| c < self.num_colors)
            && h.cols().iter().all(|col| {
                let mut seen = vec![false; self.num_colors];
                col.iter().all(|&i| !std::mem::replace(&mut seen[self.color[i as usize]], true))
            })
    }

    /// The coloring of `h` with one extra row carrying a fresh color.
    pub fn extended(&self) -> CheckColoring {
        let mut color = self.color.clone();
        color.push(self.num_colors);
        CheckColoring { color, num_colors: self.num_colors + 1 }
    }
}

const MAX_COLORING_CHECKS: usize = 10_000;
const MAX_COLORING_STEPS: usize = 5_000_000;

/// Backtracking DSATUR search for a `num_colors`-coloring of the check-conflict graph.
///
/// Returns `None` if no coloring exists, if the graph has more than 10^4
/// checks, or if the search budget is exhausted.
pub fn check_coloring(h: &CheckMatrix, num_colors: usize) -> Option<CheckColoring> {
    let m = h.num_rows();
    if m > MAX_COLORING_CHECKS || (num_colors == 0 && m > 0) {
        return None;
    }
    let adjacency: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            let mut nb: Vec<usize> = h
                .row(i)
                .iter()
                .flat_map(|&j| h.col(j as usize).iter().map(|&k| k as usize))
                .filter(|&k| k != i)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();

    let mut color: Vec<Option<usize>> = vec![None; m];
    // forbidden[v][c] = number of colored neighbours of v with color c.
    let mut forbidden = vec![vec![0u32; num_colors]; m];
    let mut stack: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut steps = 0;

    let saturation = |f: &[u32]| f.iter().filter(|&&x| x > 0).count();

    let pick = |color: &[Option<usize>], forbidden: &[Vec<u32>]| -> Option<usize> {
        (0..m)
            .filter(|&v| color[v].is_none())
            .max_by_key(|&v| (saturation(&forbidden[v]), adjacency[v].len(), std::cmp::Reverse(v)))
    };

    let mut next_vertex = pick(&color, &forbidden);
    let mut start_color = 0;
    loop {
        let Some(v) = next_vertex else {
            return Some(CheckColoring {
                color: color.into_iter().map(Option::unwrap).collect(),
                num_colors,
            });
        };
        steps += 1;
        if steps > MAX_COLORING_STEPS {
            return None;
        }
        let choice = (start_color..num_colors).find(|&c| forbidden[v][c] == 0);
        match choice {
            Some(c) => {
                color[v] = Some(c);
                for &u in &adjacency[v] {
                    forbidden[u][c] += 1;
                }
                stack.push((v, c));
                next_vertex = pick(&color, &forbidden);
                start_color = 0;
            }
            None => {
                let (u, c) = stack.pop()?;
                color[u] = None;
                for &w in &adjacency[u] {
                    forbidden[w][c] -= 1;
                }
                next_vertex = Some(u);
                start_color = c + 1;
            }
        }
    }
}

/// Writes the check-matrix text format.
pub fn write_check_matrix(h: &CheckMatrix) -> String {
    let mut s = format!("{} {}\n", h.num_rows(), h.num_cols());
    for row in h.rows() {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn save_check_matrix(h: &CheckMatrix, path: &Path) -> Result<()> {
    fs::write(path, write_check_matrix(h)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Parses the check-matrix text format: a header line `M N`, then one line of
/// ascending column indices per row. Lines starting with `#` are comments.
pub fn parse_check_matrix(text: &str, path: &Path) -> Result<CheckMatrix> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));

    let (header_line, header) = loop {
        match lines.next() {
            Some((_, "")) => continue,
            Some(h) => break h,
            None => return Err(err(1, "missing header".into())),
        }
    };
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(header_line, format!("malformed header: {e}")))?;
    let [m, n] = dims[..] else {
        return Err(err(header_line, format!("header must be 'M N', got '{header}'")));
    };

    let mut rows = Vec::with_capacity(m);
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if rows.len() == m {
            if line.is_empty() {
                continue;
            }
            return Err(err(line_no, format!("more than {m} rows")));
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let j: usize = tok.parse().map_err(|_| err(line_no, format!("bad index '{tok}'")))?;
            if j >= n {
                return Err(err(line_no, format!("index {j} out of range for {n} columns")));
            }
            if let Some(&prev) = row.last() {
                if j == prev {
                    return Err(err(line_no, format!("duplicate index {j}")));
                }
                if j < prev {
                    return Err(err(line_no, format!("indices not ascending at {j}")));
                }
            }
            row.push(j);
        }
        rows.push(row);
    }
    if rows.len() != m {
        return Err(err(last_line, format!("expected {m} rows, found {}", rows.len())));
    }
    CheckMatrix::from_rows(n, rows)
}

pub fn load_check_matrix(path: &Path) -> Result<CheckMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_check_matrix(&text, path)
}

/// One decimal probability per line.
pub fn load_priors(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| {
            l.trim().parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("bad probability: {e}"),
            })
        })
        .collect()
}

/// Default prior when a problem directory has no `priors.txt`.
pub const DEFAULT_PRIOR: f64 = 0.01;

/// Loads `hx.chk` plus optional `ax.chk` and `priors.txt` from `dir`.
///
/// Without priors, weights are uniform (unit) and BP sees `p = 0.01`.
pub fn load_problem(dir: &Path) -> Result<DecodingProblem> {
    let h = load_check_matrix(&dir.join("hx.chk"))?;
    let ax_path = dir.join("ax.chk");
    let a = if ax_path.exists() { Some(load_check_matrix(&ax_path)?) } else { None };
    let priors_path = dir.join("priors.txt");
    let weights = if priors_path.exists() {
        let priors = load_priors(&priors_path)?;
        if priors.len() != h.num_cols() {
            return Err(Error::DimensionMismatch { expected: h.num_cols(), found: priors.len() });
        }
        WeightVector::from_priors(priors)?
    } else {
        WeightVector::uniform(h.num_cols(), DEFAULT_PRIOR)?
    };
    DecodingProblem::new(h, a, weights)
}

/// Parses a syndrome file: whitespace-separated check indices, `#` comments.
pub fn parse_syndrome(text: &str, num_checks: usize, path: &Path) -> Result<IndexSet> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let i: usize = tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("bad check index '{tok}'"),
            })?;
            if i >= num_checks {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: k + 1,
                    message: format!("check index {i} out of range for {num_checks} checks"),
                });
            }
            out.push(i);
        }
    }
    Ok(IndexSet::from_unsorted(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonal(a: &CheckMatrix, b: &CheckMatrix) -> bool {
        let br = gf2::to_bit_rows(b);
        gf2::to_bit_rows(a).iter().all(|x| br.iter().all(|y| !x.dot(y)))
    }

    #[test]
    fn steane_from_color_code_3() {
        let code = color_code(3).unwrap();
        assert_eq!(code.n, 7);
        assert_eq!(code.k, 1);
        assert_eq!(code.hx.num_rows(), 3);
        assert!(code.hx.rows().iter().all(|r| r.len() == 4));
        assert!(code.commutes());
    }

    #[test]
    fn color_code_parameters() {
        for d in [3, 5, 7, 9] {
            let code = color_code(d).unwrap();
            assert_eq!(code.n, (3 * d * d + 1) / 4, "d = {d}");
            assert_eq!(code.k, 1);
            assert!(code.hx.max_row_weight() <= 6);
            assert!(code.hx.max_col_weight() <= 3);
            assert!(code.commutes());
            assert!(orthogonal(&code.ax, &code.hz));
        }
    }

    #[test]
    fn color_code_rejects_bad_distance() {
        assert!(color_code(4).is_err());
        assert!(color_code(1).is_err());
    }

    #[test]
    fn bb_codes() {
        let gross = gross_code();
        assert_eq!((gross.n, gross.k), (144, 12));
        assert!(gross.commutes());
        assert!(gross.hx.rows().iter().all(|r| r.len() == 6));
        assert!(orthogonal(&gross.ax, &gross.hz));
        assert!(orthogonal(&gross.az, &gross.hx));

        let small = bb72_code();
        assert_eq!((small.n, small.k), (72, 12));
        assert!(small.commutes());

        let trivial = bivariate_bicycle(1, 1, &[(0, 0)], &[(0, 0)]).unwrap();
        assert_eq!(trivial.n, 2);
        assert_eq!(trivial.k, 0);
        assert!(bivariate_bicycle(2, 2, &[], &[(0, 0)]).is_err());
    }

    #[test]
    fn logical_rows_independent_of_stabilizers() {
        for code in [color_code(5).unwrap(), bb72_code()] {
            let mut span = EchelonBasis::new(code.n);
            for r in gf2::to_bit_rows(&code.hz) {
                span.insert(&r);
            }
            let before = span.rank();
            for r in gf2::to_bit_rows(&code.az) {
                assert!(span.insert(&r));
            }
            assert_eq!(span.rank(), before + code.k);
        }
    }

    #[test]
    fn polynomial_parsing() {
        assert_eq!(parse_polynomial("x3+y+y2").unwrap(), vec![(3, 0), (0, 1), (0, 2)]);
        assert_eq!(parse_polynomial("1 + xy2").unwrap(), vec![(0, 0), (1, 2)]);
        assert!(parse_polynomial("x+z").is_err());
        assert!(parse_polynomial("x++y").is_err());
    }

    #[test]
    fn colorings() {
        let cc5 = color_code(5).unwrap();
        let col = check_coloring(&cc5.hx, 3).expect("color codes are 3-colorable");
        assert!(col.is_valid_for(&cc5.hx));

        let gross = gross_code();
        let col = check_coloring(&gross.hx, 3).expect("gross code is 3-colorable");
        assert!(col.is_valid_for(&gross.hx));

        let triangle = CheckMatrix::from_dense(&[vec![1], vec![1], vec![1]]);
        assert!(check_coloring(&triangle, 2).is_none());
        assert!(check_coloring(&triangle, 3).is_some());
    }

    #[test]
    fn extended_coloring_stays_valid() {
        let cc3 = color_code(3).unwrap();
        let col = check_coloring(&cc3.hx, 3).unwrap();
        let ext = cc3.hx.with_row(cc3.ax.row(0));
        assert!(col.extended().is_valid_for(&ext));
    }

    #[test]
    fn parse_example_file() {
        let p = Path::new("x.chk");
        let h = parse_check_matrix("2 3\n0 1\n1 2\n", p).unwrap();
        assert_eq!(h.to_dense(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
        let h = parse_check_matrix("# comment\n2 3\n0 1\n# mid\n1 2\n\n", p).unwrap();
        assert_eq!(h.num_rows(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let p = Path::new("x.chk");
        match parse_check_matrix("2 3\n0 1\n1 3\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_check_matrix("2 3\n0 0\n1 2\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_check_matrix("2\n0\n1\n", p), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_check_matrix("2 3\n0 1\n", p), Err(Error::Parse { .. })));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let code = color_code(5).unwrap();
        let path = dir.path().join("hx.chk");
        save_check_matrix(&code.hx, &path).unwrap();
        assert_eq!(load_check_matrix(&path).unwrap(), code.hx);

        save_check_matrix(&code.ax, &dir.path().join("ax.chk")).unwrap();
        let problem = load_problem(dir.path()).unwrap();
        assert_eq!(problem.check, code.hx);
        assert!(problem.weights.is_uniform());
        assert_eq!(problem.weights.prior(0), DEFAULT_PRIOR);

        fs::write(dir.path().join("priors.txt"), "0.1\n".repeat(code.n)).unwrap();
        let problem = load_problem(dir.path()).unwrap();
        assert!((problem.weights.weight(3) - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn syndrome_file() {
        let p = Path::new("s.txt");
        assert_eq!(parse_syndrome("3 1\n# x\n7", 8, p).unwrap(), IndexSet::from_unsorted([1, 3, 7]));
        assert!(parse_syndrome("8", 8, p).is_err());
    }
}
