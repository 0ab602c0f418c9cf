//! Lie algebras with complex structure and the bicomplex of invariant forms.
//!
//! Two ways in: real structure constants plus an almost-complex structure
//! `J` (from which a `(1,0)`-coframe is derived or checked), or the complex
//! structure equations `d phi^a` directly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exterior::{self, basis, bidegrees_of_degree, dim_bidegree, ExteriorError, Form, MultiIndex, RealForm, RealIndex};
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::scalar::{GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("real dimension must be even and positive, got {0}")]
    OddDimension(usize),
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("J does not square to -1 (entry ({row},{col}) of J^2 + 1 is {value})")]
    NotComplexStructure { row: usize, col: usize, value: String },
    #[error("+i eigenspace of J* has dimension {got}, expected {expected}")]
    EigenspaceDimension { got: usize, expected: usize },
    #[error("phi{0} is not of type (1,0) for J")]
    CoframeNotHolomorphic(usize),
    #[error("coframe together with its conjugate is not a basis")]
    SingularCoframe,
    #[error("structure is not integrable: {0}")]
    NotIntegrable(String),
    #[error("d phi{index} is not a 2-form")]
    NotTwoForm { index: usize },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Structure constants `[e_i, e_j] = sum_k c^k_{ij} e_k` (stored 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealLieAlgebra {
    dim: usize,
    c: Vec<Vec<Vec<Rational>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiFailure {
    /// 1-based `i < j < k`.
    pub triple: (usize, usize, usize),
    /// Coefficients of the Jacobiator on `e_1..e_m`.
    pub jacobiator: Vec<Rational>,
}

fn real_vector_text(v: &[Rational]) -> String {
    let mut f = RealForm::zero(v.len());
    for (k, c) in v.iter().enumerate() {
        f = f.add(&RealForm::e(v.len(), k + 1).scale(&GaussianRational::real(c.clone()))).expect("same dimension");
    }
    f.to_string().replace('e', "e_")
}

impl fmt::Display for JacobiFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        write!(f, "Jacobi identity fails on (e{i}, e{j}, e{k}): jacobiator = {}", real_vector_text(&self.jacobiator))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RealValidation {
    /// 1-based `(i, j)` with `[e_i,e_j] != -[e_j,e_i]`.
    pub antisymmetry: Vec<(usize, usize)>,
    pub jacobi: Vec<JacobiFailure>,
}

impl RealValidation {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.antisymmetry.iter().map(|(i, j)| format!("bracket [e{i},e{j}] is not antisymmetric")).collect();
        out.extend(self.jacobi.iter().map(|f| f.to_string()));
        out
    }
}

impl RealLieAlgebra {
    /// The abelian algebra of dimension `dim`.
    pub fn abelian(dim: usize) -> Self {
        Self { dim, c: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `[e_i, e_j] = sum_k v[k] e_k` and `[e_j, e_i] = -[e_i, e_j]` (1-based).
    pub fn set_bracket(&mut self, i: usize, j: usize, v: &[Rational]) {
        self.set_raw(i, j, v);
        let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
        self.set_raw(j, i, &neg);
    }

    /// Sets only `[e_i, e_j]`, leaving `[e_j, e_i]` untouched.
    pub fn set_raw(&mut self, i: usize, j: usize, v: &[Rational]) {
        self.c[i - 1][j - 1] = v.to_vec();
    }

    /// Builds from `([e_i,e_j] = v)` lines, each applied antisymmetrically.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<Rational>)]) -> Self {
        let mut alg = Self::abelian(dim);
        for (i, j, v) in brackets {
            alg.set_bracket(*i, *j, v);
        }
        alg
    }

    /// `[e_i, e_j]` as a coefficient vector (1-based indices).
    pub fn bracket(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i - 1][j - 1]
    }

    /// Bracket of two vectors given in the frame.
    fn bracket_vec(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                for (o, ck) in out.iter_mut().zip(&self.c[i][j]) {
                    *o += &s * ck;
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i - 1] = Rational::one();
        v
    }

    /// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vec<Rational> {
        let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
        let a = self.bracket_vec(&self.bracket_vec(&ei, &ej), &ek);
        let b = self.bracket_vec(&self.bracket_vec(&ej, &ek), &ei);
        let c = self.bracket_vec(&self.bracket_vec(&ek, &ei), &ej);
        a.iter().zip(&b).zip(&c).map(|((x, y), z)| x + y + z).collect()
    }

    pub fn validate(&self) -> RealValidation {
        let mut report = RealValidation::default();
        for i in 1..=self.dim {
            for j in i..=self.dim {
                let sum_zero = self.bracket(i, j).iter().zip(self.bracket(j, i)).all(|(a, b)| (a + b).is_zero());
                if !sum_zero {
                    report.antisymmetry.push((i, j));
                }
            }
        }
        for i in 1..=self.dim {
            for j in i + 1..=self.dim {
                for k in j + 1..=self.dim {
                    let jac = self.jacobiator(i, j, k);
                    if jac.iter().any(|x| !x.is_zero()) {
                        report.jacobi.push(JacobiFailure { triple: (i, j, k), jacobiator: jac });
                    }
                }
            }
        }
        report
    }

    /// `d e^k = -sum_{i<j} c^k_{ij} e^i ^ e^j`, from `d alpha(x,y) = -alpha([x,y])`.
    pub fn chevalley_d(&self) -> Vec<RealForm> {
        (0..self.dim)
            .map(|k| {
                let mut f = RealForm::zero(self.dim);
                for i in 0..self.dim {
                    for j in i + 1..self.dim {
                        let c = &self.c[i][j][k];
                        if !c.is_zero() {
                            let idx = RealIndex::new(self.dim, &[i + 1, j + 1]).expect("increasing");
                            f.add_term(idx, &GaussianRational::real(-c));
                        }
                    }
                }
                f
            })
            .collect()
    }

    /// Extension of the Chevalley differential to any real form by the Leibniz rule.
    pub fn d(&self, form: &RealForm) -> RealForm {
        let de = self.chevalley_d();
        let mut out = RealForm::zero(self.dim);
        for (idx, c) in form.terms() {
            let gens = idx.indices();
            for (pos, &g) in gens.iter().enumerate() {
                let mut term = RealForm::monomial(RealIndex::new(self.dim, &[]).expect("empty"), self.dim, c.clone());
                for (other_pos, &h) in gens.iter().enumerate() {
                    let factor = if other_pos == pos { de[g - 1].clone() } else { RealForm::e(self.dim, h) };
                    term = term.wedge(&factor).expect("same dimension");
                }
                if pos % 2 == 1 {
                    term = term.scale(&-GaussianRational::one());
                }
                out = out.add(&term).expect("same dimension");
            }
        }
        out
    }
}

/// `J` on the frame: entry `(i, j)` is the coefficient of `e_i` in `J e_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostComplexStructure {
    matrix: Matrix,
}

impl AlmostComplexStructure {
    /// From frame lines `J e_j = sum_i v[i] e_i` (1-based `j`); unlisted columns stay zero.
    pub fn from_frame(dim: usize, lines: &[(usize, Vec<Rational>)]) -> Result<Self, ModelError> {
        let mut matrix = Matrix::zeros(dim, dim);
        for (j, v) in lines {
            if v.len() != dim || *j == 0 || *j > dim {
                return Err(ModelError::Shape(format!("J line for e{j} does not fit dimension {dim}")));
            }
            for (i, c) in v.iter().enumerate() {
                matrix.set(i, j - 1, GaussianRational::real(c.clone()));
            }
        }
        Self::checked(matrix)
    }

    /// From coframe lines `J* e^k = sum_j v[j] e^j`. Since `(J* e^k)(e_j) = e^k(J e_j)`
    /// these are the rows of the frame matrix.
    pub fn from_coframe(dim: usize, lines: &[(usize, Vec<Rational>)]) -> Result<Self, ModelError> {
        let mut matrix = Matrix::zeros(dim, dim);
        for (k, v) in lines {
            if v.len() != dim || *k == 0 || *k > dim {
                return Err(ModelError::Shape(format!("J* line for e{k} does not fit dimension {dim}")));
            }
            for (j, c) in v.iter().enumerate() {
                matrix.set(k - 1, j, GaussianRational::real(c.clone()));
            }
        }
        Self::checked(matrix)
    }

    fn checked(matrix: Matrix) -> Result<Self, ModelError> {
        let dim = matrix.rows();
        if dim == 0 || dim % 2 == 1 {
            return Err(ModelError::OddDimension(dim));
        }
        let sq = matrix.mul(&matrix)?.add(&Matrix::identity(dim))?;
        if let Some((row, col)) = sq.first_nonzero() {
            return Err(ModelError::NotComplexStructure { row: row + 1, col: col + 1, value: sq.get(row, col).to_string() });
        }
        Ok(Self { matrix })
    }

    /// The structure whose `(1,0)`-forms are spanned by `coframe`: `J = M^{-1} D M`
    /// with `D = diag(i, .., i, -i, .., -i)`.
    pub fn from_coframe10(coframe: &Coframe10) -> Result<Self, ModelError> {
        let n = coframe.n();
        let m = coframe.change_of_basis()?;
        let minv = m.inverse().map_err(|_| ModelError::SingularCoframe)?;
        let mut d = Matrix::zeros(2 * n, 2 * n);
        for k in 0..2 * n {
            d.set(k, k, if k < n { GaussianRational::i() } else { -GaussianRational::i() });
        }
        let j = minv.mul(&d)?.mul(&m)?;
        if (0..2 * n).any(|r| (0..2 * n).any(|c| !j.get(r, c).is_real())) {
            return Err(ModelError::Shape("coframe does not define a real J".into()));
        }
        Self::checked(j)
    }

    /// The standard structure `J e_{2k-1} = e_{2k}`.
    pub fn standard(dim: usize) -> Result<Self, ModelError> {
        let lines: Vec<(usize, Vec<Rational>)> = (1..=dim)
            .map(|j| {
                let mut v = vec![Rational::zero(); dim];
                if j % 2 == 1 {
                    v[j] = Rational::one();
                } else {
                    v[j - 2] = -Rational::one();
                }
                (j, v)
            })
            .collect();
        Self::from_frame(dim, &lines)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `J* alpha` on coefficient vectors over `e^1..e^m`: `(J* alpha)_m = sum_i alpha_i J_{im}`.
    pub fn pullback(&self, alpha: &[GaussianRational]) -> Result<Vec<GaussianRational>, ModelError> {
        Ok(self.matrix.transpose().mul_vec(alpha)?)
    }

    /// The `+i` eigenspace of `J*` on complex covectors.
    pub fn holomorphic_covectors(&self) -> Subspace {
        let m = self.dim();
        let shifted = self.matrix.transpose().add(&Matrix::identity(m).scale(&-GaussianRational::i())).expect("square");
        shifted.kernel_basis()
    }
}

/// Rows `phi^a = sum_j z[a][j] e^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coframe10 {
    rows: Vec<Vec<GaussianRational>>,
}

impl Coframe10 {
    pub fn new(rows: Vec<Vec<GaussianRational>>) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != 2 * n) {
            return Err(ModelError::Shape(format!("a (1,0)-coframe needs n rows of length 2n, got {n} rows")));
        }
        let c = Self { rows };
        c.change_of_basis()?.inverse().map_err(|_| ModelError::SingularCoframe)?;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<GaussianRational>] {
        &self.rows
    }

    pub fn span(&self) -> Subspace {
        Subspace::span(2 * self.n(), &self.rows).expect("rows have length 2n")
    }

    /// `M = [z; conj z]`, expressing `(phi, cphi)` in terms of `e`.
    pub fn change_of_basis(&self) -> Result<Matrix, ModelError> {
        let n = self.n();
        let mut rows = self.rows.clone();
        rows.extend(self.rows.iter().map(|r| r.iter().map(|x| x.conj()).collect()));
        Ok(Matrix::from_rows(2 * n, &rows)?)
    }

    /// `phi^a` as a real form.
    pub fn row_form(&self, a: usize) -> RealForm {
        let m = 2 * self.n();
        let mut f = RealForm::zero(m);
        for (j, z) in self.rows[a - 1].iter().enumerate() {
            f = f.add(&RealForm::e(m, j + 1).scale(z)).expect("same dimension");
        }
        f
    }

    /// Checks every `phi^a` is a `+i` eigenvector of `J*`.
    pub fn check_against(&self, j: &AlmostComplexStructure) -> Result<(), ModelError> {
        if j.dim() != 2 * self.n() {
            return Err(ModelError::Shape(format!("coframe for n = {} against J of size {}", self.n(), j.dim())));
        }
        let eigen = j.holomorphic_covectors();
        for (a, row) in self.rows.iter().enumerate() {
            if !eigen.contains(row) {
                return Err(ModelError::CoframeNotHolomorphic(a + 1));
            }
        }
        Ok(())
    }
}

/// Rewrites real forms in the complex coframe, `e^j = sum_b (M^{-1})_{jb} g_b`
/// where `g = (phi^1..phi^n, cphi^1..cphi^n)`.
#[derive(Debug, Clone)]
pub struct Substitution {
    n: usize,
    e_forms: Vec<Form>,
}

impl Coframe10 {
    pub fn substitution(&self) -> Result<Substitution, ModelError> {
        let n = self.n();
        let minv = self.change_of_basis()?.inverse().map_err(|_| ModelError::SingularCoframe)?;
        let generator = |b: usize| if b < n { Form::phi(n, b + 1) } else { Form::phibar(n, b - n + 1) };
        let e_forms = (0..2 * n)
            .map(|j| (0..2 * n).fold(Form::zero(n), |acc, b| acc.add(&generator(b).scale(minv.get(j, b))).expect("same n")))
            .collect();
        Ok(Substitution { n, e_forms })
    }
}

impl Substitution {
    pub fn apply(&self, rf: &RealForm) -> Form {
        let mut out = Form::zero(self.n);
        for (idx, c) in rf.terms() {
            let mut term = Form::constant(self.n, c.clone());
            for k in idx.indices() {
                term = term.wedge(&self.e_forms[k - 1]).expect("same n");
            }
            out = out.add(&term).expect("same n");
        }
        out
    }
}

/// Basis of the `+i` eigenspace of `J*`, rows in reduced echelon form.
pub fn derive_coframe(j: &AlmostComplexStructure) -> Result<Coframe10, ModelError> {
    let eigen = j.holomorphic_covectors();
    let n = j.dim() / 2;
    if eigen.dim() != n {
        return Err(ModelError::EigenspaceDimension { got: eigen.dim(), expected: n });
    }
    Coframe10::new(eigen.basis())
}

/// Complex structure equations `d phi^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexStructureEquations {
    n: usize,
    d_phi: Vec<Form>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrabilityFailure {
    /// 1-based generator index.
    pub index: usize,
    /// The offending `(0,2)` component of `d phi^index`.
    pub component: Form,
}

impl fmt::Display for IntegrabilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d phi{} has (0,2)-component {}", self.index, self.component)
    }
}

impl ComplexStructureEquations {
    pub fn new(n: usize, d_phi: Vec<Form>) -> Result<Self, ModelError> {
        if n == 0 || n > exterior::MAX_DIM / 2 || d_phi.len() != n {
            return Err(ModelError::Shape(format!("expected {n} differentials, got {}", d_phi.len())));
        }
        for (a, f) in d_phi.iter().enumerate() {
            if f.n() != n {
                return Err(ExteriorError::DimensionMismatch(f.n(), n).into());
            }
            if !f.is_homogeneous_of_degree(2) {
                return Err(ModelError::NotTwoForm { index: a + 1 });
            }
        }
        Ok(Self { n, d_phi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_phi(&self) -> &[Form] {
        &self.d_phi
    }

    pub fn check_integrability(&self) -> Vec<IntegrabilityFailure> {
        self.d_phi
            .iter()
            .enumerate()
            .filter_map(|(a, f)| {
                let c = f.component(0, 2);
                (!c.is_zero()).then_some(IntegrabilityFailure { index: a + 1, component: c })
            })
            .collect()
    }

    /// `d` of a single generator.
    fn d_generator(&self, conj: bool, index: usize) -> Form {
        let f = &self.d_phi[index - 1];
        if conj {
            f.conjugate()
        } else {
            f.clone()
        }
    }

    /// `d` of any form by the graded Leibniz rule.
    pub fn d(&self, form: &Form) -> Form {
        let n = self.n;
        let mut out = Form::zero(n);
        for (idx, c) in form.terms() {
            let gens = idx.generators();
            for pos in 0..gens.len() {
                let mut term = Form::constant(n, c.clone());
                for (other, &(conj, k)) in gens.iter().enumerate() {
                    let factor = if other == pos {
                        self.d_generator(conj, k)
                    } else if conj {
                        Form::phibar(n, k)
                    } else {
                        Form::phi(n, k)
                    };
                    term = term.wedge(&factor).expect("same dimension");
                }
                if pos % 2 == 1 {
                    term = term.scale(&-GaussianRational::one());
                }
                out = out.add(&term).expect("same dimension");
            }
        }
        out
    }
}

/// `d phi^a = sum_j z_aj d e^j`, rewritten in `(phi, cphi)` through `e = M^{-1} (phi, cphi)`.
pub fn complexify(alg: &RealLieAlgebra, coframe: &Coframe10) -> Result<ComplexStructureEquations, ModelError> {
    let n = coframe.n();
    if alg.dim() != 2 * n {
        return Err(ModelError::Shape(format!("algebra of dimension {} with a coframe for n = {n}", alg.dim())));
    }
    let validation = alg.validate();
    if !validation.is_valid() {
        return Err(ModelError::InvalidAlgebra(validation.messages().join("; ")));
    }
    let to_complex = coframe.substitution()?;
    let de = alg.chevalley_d();
    let d_phi = coframe
        .rows()
        .iter()
        .map(|row| {
            let mut rf = RealForm::zero(2 * n);
            for (j, z) in row.iter().enumerate() {
                rf = rf.add(&de[j].scale(z)).expect("same dimension");
            }
            to_complex.apply(&rf)
        })
        .collect();
    ComplexStructureEquations::new(n, d_phi)
}

/// Real data: an algebra, `J`, and optionally an explicit coframe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealData {
    pub algebra: RealLieAlgebra,
    pub structure: AlmostComplexStructure,
    pub coframe: Option<Coframe10>,
}

impl RealData {
    /// The coframe in use: the supplied one after checking it against `J`,
    /// otherwise the derived one.
    pub fn coframe(&self) -> Result<Coframe10, ModelError> {
        if self.algebra.dim() != self.structure.dim() {
            return Err(ModelError::Shape(format!(
                "algebra of dimension {} with J of size {}",
                self.algebra.dim(),
                self.structure.dim()
            )));
        }
        match &self.coframe {
            Some(c) => {
                c.check_against(&self.structure)?;
                Ok(c.clone())
            }
            None => derive_coframe(&self.structure),
        }
    }

    pub fn equations(&self) -> Result<ComplexStructureEquations, ModelError> {
        complexify(&self.algebra, &self.coframe()?)
    }
}

/// A concrete model: complex structure equations, optionally with the real
/// data they came from, and the parameter values used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub params: BTreeMap<String, Rational>,
    pub real: Option<RealData>,
    pub equations: ComplexStructureEquations,
}

impl Model {
    pub fn from_equations(name: &str, params: BTreeMap<String, Rational>, equations: ComplexStructureEquations) -> Self {
        Self { name: name.to_string(), params, real: None, equations }
    }

    pub fn from_real(name: &str, params: BTreeMap<String, Rational>, real: RealData) -> Result<Self, ModelError> {
        let equations = real.equations()?;
        Ok(Self { name: name.to_string(), params, real: Some(real), equations })
    }

    pub fn bicomplex(&self) -> Result<Bicomplex, ModelError> {
        build_bicomplex(&self.equations)
    }

    /// The coframe relating `e^j` to `phi^a`, when real data is present.
    pub fn coframe(&self) -> Option<Result<Coframe10, ModelError>> {
        self.real.as_ref().map(RealData::coframe)
    }
}

/// Matrices of `del` and `delbar` on every `Lambda^{p,q}` in canonical bases.
/// Columns index the source basis, rows the target basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicomplex {
    n: usize,
    del: BTreeMap<(usize, usize), Matrix>,
    delbar: BTreeMap<(usize, usize), Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    DelSquared,
    DelbarSquared,
    Anticommutator,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::DelSquared => "del^2 = 0",
            Identity::DelbarSquared => "delbar^2 = 0",
            Identity::Anticommutator => "del delbar + delbar del = 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BicomplexFailure {
    pub identity: Identity,
    /// Source bidegree.
    pub bidegree: (usize, usize),
    /// Target and source basis elements of the first nonzero entry.
    pub target: MultiIndex,
    pub source: MultiIndex,
    pub value: GaussianRational,
}

impl fmt::Display for BicomplexFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at ({},{}): coefficient of {} in the image of {} is {}",
            self.identity,
            self.bidegree.0,
            self.bidegree.1,
            self.target.to_source(),
            self.source.to_source(),
            self.value
        )
    }
}

fn dim_or_zero(n: usize, p: usize, q: usize) -> usize {
    if p > n || q > n {
        0
    } else {
        dim_bidegree(n, p, q)
    }
}

pub fn build_bicomplex(eqs: &ComplexStructureEquations) -> Result<Bicomplex, ModelError> {
    let failures = eqs.check_integrability();
    if !failures.is_empty() {
        let text: Vec<String> = failures.iter().map(|f| f.to_string()).collect();
        return Err(ModelError::NotIntegrable(text.join("; ")));
    }
    let n = eqs.n();
    let mut del = BTreeMap::new();
    let mut delbar = BTreeMap::new();
    for (p, q) in exterior::all_bidegrees(n) {
        let src = basis(n, p, q)?;
        let mut dm = Matrix::zeros(dim_or_zero(n, p + 1, q), src.len());
        let mut dbm = Matrix::zeros(dim_or_zero(n, p, q + 1), src.len());
        for (col, m) in src.iter().enumerate() {
            let image = eqs.d(&Form::monomial(n, *m, GaussianRational::one()));
            if p < n {
                for (row, c) in image.component(p + 1, q).coordinates(p + 1, q)?.into_iter().enumerate() {
                    dm.set(row, col, c);
                }
            }
            if q < n {
                for (row, c) in image.component(p, q + 1).coordinates(p, q + 1)?.into_iter().enumerate() {
                    dbm.set(row, col, c);
                }
            }
        }
        del.insert((p, q), dm);
        delbar.insert((p, q), dbm);
    }
    Ok(Bicomplex { n, del, delbar })
}

impl Bicomplex {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of `Lambda^{p,q}`, zero outside the range.
    pub fn space_dim(&self, p: usize, q: usize) -> usize {
        dim_or_zero(self.n, p, q)
    }

    /// `del: Lambda^{p,q} -> Lambda^{p+1,q}`. Out of range bidegrees give empty matrices.
    pub fn del(&self, p: usize, q: usize) -> Matrix {
        self.del.get(&(p, q)).cloned().unwrap_or_else(|| Matrix::zeros(self.space_dim(p + 1, q), self.space_dim(p, q)))
    }

    pub fn delbar(&self, p: usize, q: usize) -> Matrix {
        self.delbar
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.space_dim(p, q + 1), self.space_dim(p, q)))
    }

    /// Mutable access, for building corrupted fixtures.
    pub fn del_mut(&mut self, p: usize, q: usize) -> Option<&mut Matrix> {
        self.del.get_mut(&(p, q))
    }

    pub fn delbar_mut(&mut self, p: usize, q: usize) -> Option<&mut Matrix> {
        self.delbar.get_mut(&(p, q))
    }

    /// `del delbar: Lambda^{p,q} -> Lambda^{p+1,q+1}`.
    pub fn del_delbar(&self, p: usize, q: usize) -> Matrix {
        self.del(p, q + 1).mul(&self.delbar(p, q)).expect("compatible shapes")
    }

    /// Total differential `d: Lambda^k -> Lambda^{k+1}`, blocks ordered by `p` descending.
    pub fn total_d(&self, k: usize) -> Matrix {
        let n = self.n;
        let src = bidegrees_of_degree(n, k);
        let dst = bidegrees_of_degree(n, k + 1);
        let offsets = |blocks: &[(usize, usize)]| -> Vec<usize> {
            let mut acc = 0;
            blocks
                .iter()
                .map(|&(p, q)| {
                    let o = acc;
                    acc += self.space_dim(p, q);
                    o
                })
                .collect()
        };
        let rows: usize = dst.iter().map(|&(p, q)| self.space_dim(p, q)).sum();
        let cols: usize = src.iter().map(|&(p, q)| self.space_dim(p, q)).sum();
        let (so, dso) = (offsets(&src), offsets(&dst));
        let mut out = Matrix::zeros(rows, cols);
        for (si, &(p, q)) in src.iter().enumerate() {
            for (di, &(tp, tq)) in dst.iter().enumerate() {
                let block = if (tp, tq) == (p + 1, q) {
                    self.del(p, q)
                } else if (tp, tq) == (p, q + 1) {
                    self.delbar(p, q)
                } else {
                    continue;
                };
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        out.set(dso[di] + r, so[si] + c, block.get(r, c).clone());
                    }
                }
            }
        }
        out
    }

    /// Form with the given coordinates in `Lambda^k`, blocks ordered by `p` descending.
    pub fn total_form(&self, coords: &[GaussianRational], k: usize) -> Result<Form, ExteriorError> {
        let mut out = Form::zero(self.n);
        let mut offset = 0;
        for (p, q) in bidegrees_of_degree(self.n, k) {
            let d = self.space_dim(p, q);
            if offset + d > coords.len() {
                return Err(ExteriorError::CoordinateLength { got: coords.len(), expected: offset + d });
            }
            out = out.add(&Form::from_coordinates(self.n, p, q, &coords[offset..offset + d])?)?;
            offset += d;
        }
        if offset != coords.len() {
            return Err(ExteriorError::CoordinateLength { got: coords.len(), expected: offset });
        }
        Ok(out)
    }

    /// Checks `del^2 = 0`, `delbar^2 = 0` and `del delbar + delbar del = 0` everywhere.
    pub fn verify(&self) -> Vec<BicomplexFailure> {
        let n = self.n;
        let mut failures = Vec::new();
        for (p, q) in exterior::all_bidegrees(n) {
            let mul = |a: Matrix, b: Matrix| a.mul(&b).expect("compatible shapes");
            let anti = mul(self.del(p, q + 1), self.delbar(p, q))
                .add(&mul(self.delbar(p + 1, q), self.del(p, q)))
                .expect("same shape");
            let checks = [
                (Identity::DelSquared, (p + 2, q), mul(self.del(p + 1, q), self.del(p, q))),
                (Identity::DelbarSquared, (p, q + 2), mul(self.delbar(p, q + 1), self.delbar(p, q))),
                (Identity::Anticommutator, (p + 1, q + 1), anti),
            ];
            for (identity, (tp, tq), product) in checks {
                if let Some((r, c)) = product.first_nonzero() {
                    failures.push(BicomplexFailure {
                        identity,
                        bidegree: (p, q),
                        target: basis(n, tp, tq).expect("nonempty target")[r],
                        source: basis(n, p, q).expect("in range")[c],
                        value: product.get(r, c).clone(),
                    });
                }
            }
        }
        failures
    }
}

/// Matrix `C` with `conj(sum v_m m) = sum (C conj(v))`, mapping `Lambda^{p,q}` to `Lambda^{q,p}`.
pub fn conjugation_matrix(n: usize, p: usize, q: usize) -> Result<Matrix, ExteriorError> {
    let src = basis(n, p, q)?;
    let mut m = Matrix::zeros(src.len(), src.len());
    for (col, idx) in src.iter().enumerate() {
        let image = Form::monomial(n, *idx, GaussianRational::one()).conjugate();
        for (row, c) in image.coordinates(q, p)?.into_iter().enumerate() {
            m.set(row, col, c);
        }
    }
    Ok(m)
}
