//! Embedding of a ℚ-defined orthogonal affine group into the orthogonal group
//! of the Lorentzian model form `B = B_K ⊕ diag(1, −1)`, as the stabilizer of
//! the null vector `v∞ = e_{n+1} + e_{n+2}`.
//!
//! Translations go to the unipotent group `N` through
//! `v ↦ exp(ṽ v∞* − v∞ ṽ*)`, where `xy*` is the outer pairing `z ↦ B(z, y)·x`
//! and `ṽ` is the lift of `v` into `V∞ = span(e₁, …, e_n)`. Linear parts act
//! on `V∞` and trivially on the hyperbolic plane `span(e_{n+1}, e_{n+2})`.

use num::{BigInt, BigUint, Integer, One, Zero};
use serde::Serialize;

use crate::bieberbach::{AffineMap, BieberbachGroup};
use crate::error::{Error, Result};
use crate::exactlin::{
    char_poly, ldl_signature, nilpotent_exp, rat, IntPolynomial, Rational, RationalMatrix, Signature, SymmetricForm,
};
use crate::shapes::ShapeDescriptor;

/// Model form, the null pair `v∞`, `v₀`, and the isometry `ψ` of the group's
/// base form onto `V∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LorentzModel {
    n: usize,
    /// Form preserved by the linear parts of the group (`B_K`).
    source_form: SymmetricForm,
    /// Restriction of the model form to `V∞`.
    base_form: SymmetricForm,
    /// Columns are `ψ(e_i)` in `V∞` coordinates; `ψᵀ·base·ψ = source`.
    frame: RationalMatrix,
    frame_inv: RationalMatrix,
    model_form: SymmetricForm,
    v_inf: Vec<Rational>,
    v_0: Vec<Rational>,
}

fn hyperbolic_plane() -> SymmetricForm {
    SymmetricForm::diagonal(&[rat(1), rat(-1)])
}

/// The standard model: `B = base ⊕ diag(1, −1)` with `ψ` the identity.
pub fn model_form(base: &SymmetricForm) -> Result<LorentzModel> {
    LorentzModel::with_isometry(base, base, RationalMatrix::identity(base.dim()))
}

impl LorentzModel {
    /// Model on `target ⊕ diag(1, −1)` with an explicit isometric isomorphism
    /// `ψ: (ℚⁿ, source) → (V∞, target)`.
    pub fn with_isometry(source: &SymmetricForm, target: &SymmetricForm, psi: RationalMatrix) -> Result<Self> {
        let n = source.dim();
        if target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: target.dim(),
            });
        }
        if !crate::exactlin::is_positive_definite(source) {
            return Err(Error::NotPositiveDefinite);
        }
        if psi.rows() != n || psi.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.rows(),
            });
        }
        if target.congruent(&psi)? != *source {
            return Err(Error::NotFormIsometry { generator: 0 });
        }
        let frame_inv = psi.inverse()?;
        let model = target.direct_sum(&hyperbolic_plane());
        let mut v_inf = vec![Rational::zero(); n + 2];
        v_inf[n] = rat(1);
        v_inf[n + 1] = rat(1);
        let mut v_0 = v_inf.clone();
        v_0[n + 1] = rat(-1);
        let out = Self {
            n,
            source_form: source.clone(),
            base_form: target.clone(),
            frame: psi,
            frame_inv,
            model_form: model,
            v_inf,
            v_0,
        };
        debug_assert_eq!(ldl_signature(&out.model_form), Signature::new(n + 1, 1, 0));
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source_form(&self) -> &SymmetricForm {
        &self.source_form
    }

    pub fn base_form(&self) -> &SymmetricForm {
        &self.base_form
    }

    pub fn model_form(&self) -> &SymmetricForm {
        &self.model_form
    }

    pub fn v_inf(&self) -> &[Rational] {
        &self.v_inf
    }

    pub fn v_0(&self) -> &[Rational] {
        &self.v_0
    }

    pub fn frame(&self) -> &RationalMatrix {
        &self.frame
    }

    /// Basis `e₁, …, e_n` of `V∞`, the B-orthogonal complement of `v₀`, `v∞`.
    pub fn vinf_basis(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n + 2).map(|j| rat((i == j) as i64)).collect())
            .collect()
    }

    /// `ψ(v)` as a vector of length `n + 2`.
    pub fn lift(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        let mut out = self.frame.mul_vec(v)?;
        out.extend([Rational::zero(), Rational::zero()]);
        Ok(out)
    }

    /// `ψ A ψ⁻¹ ⊕ I₂`.
    pub fn rotation(&self, a: &RationalMatrix) -> Result<RationalMatrix> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.rows(),
            });
        }
        let inner = &(&self.frame * a) * &self.frame_inv;
        Ok(inner.direct_sum(&RationalMatrix::identity(2)))
    }

    /// Log of the translation image: `ṽ v∞* − v∞ ṽ*`.
    pub fn translation_log(&self, v: &[Rational]) -> Result<RationalMatrix> {
        let lifted = self.lift(v)?;
        let a = outer_pairing(&lifted, &self.v_inf, &self.model_form)?;
        let b = outer_pairing(&self.v_inf, &lifted, &self.model_form)?;
        Ok(&a - &b)
    }
}

/// The rank-≤1 operator `z ↦ B(z, y)·x`, i.e. the matrix `x·(B·y)ᵀ`.
pub fn outer_pairing(x: &[Rational], y: &[Rational], form: &SymmetricForm) -> Result<RationalMatrix> {
    if x.len() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            found: x.len(),
        });
    }
    let by = form.matrix().mul_vec(y)?;
    let mut m = RationalMatrix::zeros(x.len(), x.len());
    for (i, xi) in x.iter().enumerate() {
        for (j, bj) in by.iter().enumerate() {
            m[(i, j)] = xi * bj;
        }
    }
    Ok(m)
}

/// `exp(ṽ v∞* − v∞ ṽ*)`, the image of the translation `v` in `N`.
pub fn embed_translation(v: &[Rational], model: &LorentzModel) -> Result<RationalMatrix> {
    nilpotent_exp(&model.translation_log(v)?)
}

fn embed_affine_indexed(g: &AffineMap, model: &LorentzModel, index: usize) -> Result<RationalMatrix> {
    if g.dim() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            found: g.dim(),
        });
    }
    if !model.source_form.is_preserved_by(g.linear()) {
        return Err(Error::NotFormIsometry { generator: index });
    }
    Ok(&embed_translation(g.translation(), model)? * &model.rotation(g.linear())?)
}

/// `T(t)·(A ⊕ I₂)` for `g = (A | t)`; `A` must preserve the base form.
pub fn embed_affine(g: &AffineMap, model: &LorentzModel) -> Result<RationalMatrix> {
    embed_affine_indexed(g, model, 0)
}

/// Generator images of a group in `O(B; ℚ) ∩ Stab(v∞)`.
///
/// `scale` is the parameter `c` of the hyperbolic conjugation applied by
/// [`integralize`] (one before integralization); conjugation by `a_c` sends
/// `T(v)` to `T(c·v)` and fixes the rotation parts. `preserved_form` is the
/// model form, rescaled to an integral multiple after integralization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LorentzEmbedding {
    pub model: LorentzModel,
    pub group: BieberbachGroup,
    pub images: Vec<RationalMatrix>,
    pub scale: BigInt,
    pub preserved_form: SymmetricForm,
}

impl LorentzEmbedding {
    /// Image of the translation `w` in the current (possibly conjugated)
    /// coordinates.
    pub fn translation_image(&self, w: &[Rational]) -> Result<RationalMatrix> {
        let c = Rational::from_integer(self.scale.clone());
        let scaled: Vec<Rational> = w.iter().map(|x| x * &c).collect();
        embed_translation(&scaled, &self.model)
    }

    pub fn is_integral(&self) -> bool {
        self.images.iter().all(RationalMatrix::is_integral) && self.preserved_form.matrix().is_integral()
    }
}

/// Embeds every generator of the shape's group using the shape's form as
/// `B_K`.
pub fn embed_group(group: &BieberbachGroup, shape: &ShapeDescriptor) -> Result<LorentzEmbedding> {
    if shape.group().group != *group {
        return Err(Error::InvalidConfig("shape belongs to a different group".into()));
    }
    embed_with_form(group, shape.form())
}

/// [`embed_group`] without the shape wrapper; each generator's linear part
/// must preserve `form`.
pub fn embed_with_form(group: &BieberbachGroup, form: &SymmetricForm) -> Result<LorentzEmbedding> {
    embed_with_model(group, model_form(form)?)
}

/// Embeds with an explicit model (e.g. a non-standard isometry `ψ`).
pub fn embed_with_model(group: &BieberbachGroup, model: LorentzModel) -> Result<LorentzEmbedding> {
    let images = group
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| embed_affine_indexed(g, &model, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(LorentzEmbedding {
        preserved_form: model.model_form.clone(),
        model,
        group: group.clone(),
        images,
        scale: BigInt::one(),
    })
}

/// The hyperbolic element fixing `V∞` and acting on `span(e_{n+1}, e_{n+2})`
/// by `[[(c+1/c)/2, (c−1/c)/2], [(c−1/c)/2, (c+1/c)/2]]`; it scales `v∞` by `c`.
pub fn hyperbolic_element(n: usize, c: &Rational) -> RationalMatrix {
    let half = Rational::new(1.into(), 2.into());
    let inv = c.recip();
    let ch = (c + &inv) * &half;
    let sh = (c - &inv) * &half;
    let mut m = RationalMatrix::identity(n + 2);
    m[(n, n)] = ch.clone();
    m[(n, n + 1)] = sh.clone();
    m[(n + 1, n)] = sh;
    m[(n + 1, n + 1)] = ch;
    m
}

/// Smallest `k ≥ 1` with `g | k²`.
fn square_root_cover(g: &BigInt) -> BigInt {
    let g = g.to_biguint().expect("positive");
    num_prime::nt_funcs::factorize(g)
        .into_iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e.div_ceil(2) as u32))
        .into()
}

/// Conjugates the embedding by the hyperbolic element `a_c` with the
/// smallest positive integer `c` that makes every image integral, and
/// rescales the preserved form to its smallest positive integral multiple.
///
/// After conjugation an image is `(I + c·M + c²·M²/2)·R` with `M` the
/// translation log and `R = A ⊕ I₂`. `M·R` lives in the off-diagonal blocks
/// and `M²·R` in the hyperbolic-plane block while `R` is block diagonal, so
/// each entry needs exactly one of `c·b ∈ ℤ` or `c²·d ∈ ℤ`, and the minimal `c`
/// is computed prime by prime. The result is re-checked exactly.
pub fn integralize(e: &LorentzEmbedding) -> Result<(LorentzEmbedding, BigInt)> {
    let model = &e.model;
    let n = model.n;
    let half = Rational::new(1.into(), 2.into());
    let mut linear_dens = BigInt::one();
    let mut quadratic_dens = Vec::new();
    for (i, g) in e.group.generators().iter().enumerate() {
        let r = model.rotation(g.linear())?;
        if !r.is_integral() {
            return Err(Error::NotIntegralizable { generator: i });
        }
        let m = model.translation_log(g.translation())?;
        let lin = &m * &r;
        let quad = (&(&m * &m) * &r).scale(&half);
        for (b, d) in lin.entries().iter().zip(quad.entries()) {
            debug_assert!(b.is_zero() || d.is_zero());
            linear_dens = linear_dens.lcm(b.denom());
            if !d.is_zero() {
                quadratic_dens.push(d.denom().clone());
            }
        }
    }
    // existing scale composes multiplicatively: conjugating by a_c then a_c' is a_{cc'}
    let mut c = linear_dens;
    for delta in quadratic_dens {
        let g = &delta / delta.gcd(&(&c * &c));
        if !g.is_one() {
            c *= square_root_cover(&g);
        }
    }
    let c_rat = Rational::from_integer(c.clone());
    let a = hyperbolic_element(n, &c_rat);
    let a_inv = hyperbolic_element(n, &c_rat.recip());
    let images: Vec<RationalMatrix> = e.images.iter().map(|img| &(&a * img) * &a_inv).collect();
    if let Some(i) = images.iter().position(|m| !m.is_integral()) {
        return Err(Error::NotIntegralizable { generator: i });
    }
    let form_scale = Rational::from_integer(e.preserved_form.matrix().denominator_lcm());
    let out = LorentzEmbedding {
        model: e.model.clone(),
        group: e.group.clone(),
        images,
        scale: &e.scale * &c,
        preserved_form: e.preserved_form.scale(&form_scale),
    };
    Ok((out, c))
}

/// Exact checks on one generator image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorChecks {
    /// `EᵀBE = B`.
    pub form_preserved: bool,
    /// `E·v∞ = v∞`.
    pub fixes_vinf: bool,
    /// For pure translations, `char_poly(E) = (t−1)^{n+2}`; `None` otherwise.
    pub unipotent_translation: Option<bool>,
    /// `R(A)·T(w)·R(A)⁻¹ = T(A·w)` for every basis vector `w`.
    pub equivariance: bool,
    /// `E = T(c·t)·R(A)`.
    pub factorization: bool,
    /// Smallest `k` with `Mᵏ = 0` for the log `M` of the unipotent part.
    pub nilpotency_degree: Option<usize>,
    /// `B(E·v₀, E·v₀) = 0`.
    pub null_cone_preserved: bool,
}

impl GeneratorChecks {
    pub fn passed(&self) -> bool {
        self.form_preserved
            && self.fixes_vinf
            && self.unipotent_translation != Some(false)
            && self.equivariance
            && self.factorization
            && self.nilpotency_degree.is_some_and(|k| k <= 3)
            && self.null_cone_preserved
    }
}

/// Outcome of [`verify_embedding`]; `overall` is the conjunction of every
/// check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub signature: (usize, usize, usize),
    pub signature_ok: bool,
    pub generators: Vec<GeneratorChecks>,
    pub integral: bool,
    pub overall: bool,
}

/// Exact logarithm of a unipotent matrix; `None` if `u − I` is not nilpotent.
fn unipotent_log(u: &RationalMatrix) -> Option<RationalMatrix> {
    let dim = u.rows();
    let x = u - &RationalMatrix::identity(dim);
    let mut log = RationalMatrix::zeros(dim, dim);
    let mut power = RationalMatrix::identity(dim);
    for k in 1..=dim {
        power = &power * &x;
        if power.is_zero() {
            return Some(log);
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        log = &log + &power.scale(&Rational::new(sign.into(), (k as i64).into()));
    }
    None
}

fn nilpotency_degree(m: &RationalMatrix) -> Option<usize> {
    let dim = m.rows();
    let mut power = RationalMatrix::identity(dim);
    for k in 1..=dim {
        power = &power * m;
        if power.is_zero() {
            return Some(k);
        }
    }
    None
}

fn check_generator(e: &LorentzEmbedding, g: &AffineMap, image: &RationalMatrix) -> Result<GeneratorChecks> {
    let model = &e.model;
    let b = &model.model_form;
    let n = model.n;
    let form_preserved = image.rows() == n + 2 && image.cols() == n + 2 && b.is_preserved_by(image);
    if image.rows() != n + 2 || image.cols() != n + 2 {
        return Ok(GeneratorChecks {
            form_preserved: false,
            fixes_vinf: false,
            unipotent_translation: Some(false),
            equivariance: false,
            factorization: false,
            nilpotency_degree: None,
            null_cone_preserved: false,
        });
    }
    let fixes_vinf = image.mul_vec(&model.v_inf)? == model.v_inf;
    let unipotent_translation = if g.is_pure_translation() {
        Some(char_poly(image)? == IntPolynomial::unipotent(n + 2))
    } else {
        None
    };
    let rot = model.rotation(g.linear())?;
    let rot_inv = rot.inverse()?;
    let mut equivariance = true;
    for j in 0..n {
        let w: Vec<Rational> = (0..n).map(|i| rat((i == j) as i64)).collect();
        let aw = g.linear().mul_vec(&w)?;
        let lhs = &(&rot * &e.translation_image(&w)?) * &rot_inv;
        if lhs != e.translation_image(&aw)? {
            equivariance = false;
            break;
        }
    }
    let unipotent = image * &rot_inv;
    let factorization = unipotent == e.translation_image(g.translation())?;
    let nilpotency_degree = unipotent_log(&unipotent).and_then(|log| nilpotency_degree(&log));
    let ev0 = image.mul_vec(&model.v_0)?;
    let null_cone_preserved = b.eval(&ev0, &ev0)?.is_zero();
    Ok(GeneratorChecks {
        form_preserved,
        fixes_vinf,
        unipotent_translation,
        equivariance,
        factorization,
        nilpotency_degree,
        null_cone_preserved,
    })
}

/// Re-checks an embedding from scratch. Failures are report entries, never
/// errors.
pub fn verify_embedding(e: &LorentzEmbedding) -> VerificationReport {
    let n = e.model.n;
    let sig = ldl_signature(&e.model.model_form);
    let signature_ok = sig == Signature::new(n + 1, 1, 0);
    let generators: Vec<GeneratorChecks> = if e.images.len() == e.group.generators().len() {
        e.group
            .generators()
            .iter()
            .zip(&e.images)
            .map(|(g, img)| {
                check_generator(e, g, img).unwrap_or(GeneratorChecks {
                    form_preserved: false,
                    fixes_vinf: false,
                    unipotent_translation: Some(false),
                    equivariance: false,
                    factorization: false,
                    nilpotency_degree: None,
                    null_cone_preserved: false,
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    let preserved_ok = e.images.iter().all(|img| e.preserved_form.is_preserved_by(img));
    let overall = signature_ok
        && preserved_ok
        && generators.len() == e.group.generators().len()
        && generators.iter().all(GeneratorChecks::passed);
    VerificationReport {
        signature: (sig.positives, sig.negatives, sig.zeros),
        signature_ok,
        generators,
        integral: e.is_integral(),
        overall,
    }
}
