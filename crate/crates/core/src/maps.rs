//! Maps between Grassmann spaces: standard maps `P -> U P U*` for linear
//! and conjugate-linear isometries, their composition with orthogonal
//! complementation, lookup tables, and a rank-raising block map that
//! preserves the minimal angle without being standard.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{principal_angles_general, Subspace};
use crate::numerics::{CMatrix, Tolerance, C64};

/// `x -> M x` (linear) or `x -> M conj(x)` (conjugate-linear), where `M`
/// has orthonormal columns. Conjugation is taken in the standard basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryMap {
    matrix: CMatrix,
    conjugate: bool,
}

impl IsometryMap {
    pub fn new(matrix: CMatrix, conjugate: bool, tol: &Tolerance) -> Result<Self> {
        if matrix.cols() == 0 || matrix.cols() > matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot be an isometry",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let r = matrix.orthonormality_residual();
        if r > tol.eps_entry {
            return Err(Error::InvalidMatrix(format!(
                "columns are not orthonormal (residual {r:e})"
            )));
        }
        Ok(IsometryMap { matrix, conjugate })
    }

    pub fn identity(d: usize) -> Self {
        IsometryMap {
            matrix: CMatrix::identity(d),
            conjugate: false,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_conjugate(&self) -> bool {
        self.conjugate
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply_vector(&self, x: &[C64]) -> Result<Vec<C64>> {
        if self.conjugate {
            let cx: Vec<C64> = x.iter().map(|z| z.conj()).collect();
            self.matrix.mul_vec(&cx)
        } else {
            self.matrix.mul_vec(x)
        }
    }

    /// Image of a projection matrix: `U P U*`.
    pub fn conjugate_projection(&self, p: &CMatrix) -> Result<CMatrix> {
        let p = if self.conjugate { p.conj() } else { p.clone() };
        Ok(&self.matrix.matmul(&p)? * &self.matrix.adjoint())
    }
}

/// Image of a subspace under an isometry.
pub fn apply_isometry(u: &IsometryMap, s: &Subspace) -> Result<Subspace> {
    if s.ambient_dim() != u.domain_dim() {
        return Err(Error::DimensionMismatch(format!(
            "isometry acts on C^{}, subspace lives in C^{}",
            u.domain_dim(),
            s.ambient_dim()
        )));
    }
    let b = if u.conjugate {
        s.basis().conj()
    } else {
        s.basis().clone()
    };
    s_from(&u.matrix * &b)
}

fn s_from(basis: CMatrix) -> Result<Subspace> {
    Ok(Subspace::new(basis, &Tolerance::default())?)
}

/// Orthogonal complement in the ambient space.
pub fn complement(s: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    s.orthogonal_complement(tol)?.ok_or_else(|| {
        Error::Domain(format!(
            "complement of the whole of C^{} is zero",
            s.ambient_dim()
        ))
    })
}

/// Anything that maps n-dimensional subspaces of C^d to subspaces.
pub trait SubspaceMap {
    /// `(d, n)`: ambient dimension and subspace dimension of the domain.
    fn domain(&self) -> (usize, usize);

    fn apply(&self, s: &Subspace, tol: &Tolerance) -> Result<Subspace>;

    /// Finite domains (lookup tables) return their points so checks can sample from them.
    fn finite_domain(&self) -> Option<Vec<Subspace>> {
        None
    }

    fn describe(&self) -> String;
}

pub type SelectorFn = dyn Fn(&Subspace) -> Result<Subspace> + Send + Sync;

/// Rule picking a nonzero subspace of each input, i.e. `0 != rho(P) <= P`.
#[derive(Clone)]
pub enum Selector {
    /// First `rank` columns of the pivoted Cholesky factor of the projection
    /// matrix: repeatedly take the column of the residual projection with
    /// the largest diagonal entry. Depends only on the subspace, not on the
    /// basis, and is not monotone under inclusion.
    Pivoted { rank: usize },
    /// `rho(P) = P`.
    Identity,
    Custom { rank: usize, f: Arc<SelectorFn> },
}

impl std::fmt::Debug for Selector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Selector::Pivoted { rank } => write!(f, "Pivoted {{ rank: {rank} }}"),
            Selector::Identity => write!(f, "Identity"),
            Selector::Custom { rank, .. } => write!(f, "Custom {{ rank: {rank} }}"),
        }
    }
}

impl Selector {
    /// Rank of the selected subspace for an input of dimension `n`.
    pub fn rank(&self, n: usize) -> usize {
        match self {
            Selector::Pivoted { rank } | Selector::Custom { rank, .. } => *rank,
            Selector::Identity => n,
        }
    }

    /// Applies the rule and checks `0 != rho(s) <= s` with the declared rank.
    pub fn select(&self, s: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        let chosen = match self {
            Selector::Pivoted { rank } => pivoted_columns(s, *rank)?,
            Selector::Identity => s.clone(),
            Selector::Custom { f, .. } => f(s)?,
        };
        let want = self.rank(s.dim());
        if chosen.dim() != want || chosen.ambient_dim() != s.ambient_dim() {
            return Err(Error::SelectorContract(format!(
                "selected a {}-dimensional subspace of C^{}, expected dimension {want} in C^{}",
                chosen.dim(),
                chosen.ambient_dim(),
                s.ambient_dim()
            )));
        }
        for j in 0..chosen.dim() {
            if !s.contains(&chosen.basis().col(j), tol) {
                return Err(Error::SelectorContract(format!(
                    "selected vector {j} is not contained in the input subspace"
                )));
            }
        }
        Ok(chosen)
    }
}

fn pivoted_columns(s: &Subspace, rank: usize) -> Result<Subspace> {
    if rank == 0 || rank > s.dim() {
        return Err(Error::SelectorContract(format!(
            "cannot select rank {rank} from a {}-dimensional subspace",
            s.dim()
        )));
    }
    let d = s.ambient_dim();
    let mut residual = s.projection_matrix();
    let mut cols = Vec::with_capacity(rank);
    for _ in 0..rank {
        let pivot = (0..d)
            .max_by(|&i, &j| residual[(i, i)].re.total_cmp(&residual[(j, j)].re))
            .expect("d >= 1");
        let pivot_val = residual[(pivot, pivot)].re;
        if pivot_val <= 1e-12 {
            return Err(Error::SelectorContract("residual projection vanished".into()));
        }
        let scale = 1.0 / pivot_val.sqrt();
        let c: Vec<C64> = residual.col(pivot).iter().map(|z| z * scale).collect();
        for i in 0..d {
            for j in 0..d {
                residual[(i, j)] -= c[i] * c[j].conj();
            }
        }
        cols.push(c);
    }
    Subspace::span_of(&cols, &Tolerance::default())
}

/// `S -> S ⊕ rho(S)` from `C^d` into `C^d ⊕ C^d`, raising the rank from
/// n to n + r. Since `rho(S) <= S`, the minimal angle is preserved.
#[derive(Debug, Clone)]
pub struct BlockSelectorMap {
    pub selector: Selector,
    pub n: usize,
    pub d: usize,
}

impl BlockSelectorMap {
    pub fn selected_rank(&self) -> usize {
        self.selector.rank(self.n)
    }

    /// `r = n`: the map is a plain block embedding and demonstrates nothing.
    pub fn is_degenerate(&self) -> bool {
        self.selected_rank() >= self.n
    }
}

#[derive(Debug, Clone)]
pub enum MapKind {
    Standard(IsometryMap),
    /// `S -> U(S^⊥)`; only for `d = 2n`.
    ComplementStandard(IsometryMap),
    /// Explicit input/output pairs, matched within `eps_angle`.
    Table(Vec<(Subspace, Subspace)>),
    NonstandardDemo(BlockSelectorMap),
}

#[derive(Debug, Clone)]
pub struct GrassmannMap {
    pub kind: MapKind,
    pub n: usize,
    pub d: usize,
}

impl GrassmannMap {
    pub fn standard(u: IsometryMap, n: usize) -> Result<Self> {
        let d = u.domain_dim();
        check_rank(d, n)?;
        Ok(GrassmannMap {
            kind: MapKind::Standard(u),
            n,
            d,
        })
    }

    pub fn complement_standard(u: IsometryMap, n: usize) -> Result<Self> {
        let d = u.domain_dim();
        if d != 2 * n {
            return Err(Error::Regime(format!(
                "complement maps need d = 2n, got d = {d}, n = {n}"
            )));
        }
        Ok(GrassmannMap {
            kind: MapKind::ComplementStandard(u),
            n,
            d,
        })
    }

    pub fn table(pairs: Vec<(Subspace, Subspace)>) -> Result<Self> {
        let (d, n) = pairs
            .first()
            .map(|(s, _)| (s.ambient_dim(), s.dim()))
            .ok_or_else(|| Error::Domain("empty table".into()))?;
        if pairs.iter().any(|(s, _)| s.ambient_dim() != d || s.dim() != n) {
            return Err(Error::DimensionMismatch(
                "table inputs must share ambient dimension and rank".into(),
            ));
        }
        Ok(GrassmannMap {
            kind: MapKind::Table(pairs),
            n,
            d,
        })
    }

    pub fn isometry(&self) -> Option<&IsometryMap> {
        match &self.kind {
            MapKind::Standard(u) | MapKind::ComplementStandard(u) => Some(u),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MapKind::Standard(_) => "standard",
            MapKind::ComplementStandard(_) => "complement_standard",
            MapKind::Table(_) => "table",
            MapKind::NonstandardDemo(_) => "nonstandard_demo",
        }
    }
}

fn check_rank(d: usize, n: usize) -> Result<()> {
    if n == 0 || n > d {
        return Err(Error::DimensionMismatch(format!(
            "rank {n} outside 1..={d}"
        )));
    }
    Ok(())
}

/// Builds the block map `S -> S ⊕ rho(S)` on n-dimensional subspaces of C^d.
pub fn construct_nonstandard_demo(selector: Selector, n: usize, d: usize) -> Result<GrassmannMap> {
    check_rank(d, n)?;
    let r = selector.rank(n);
    if r == 0 || r > n {
        return Err(Error::SelectorContract(format!(
            "selected rank {r} must lie in 1..={n}"
        )));
    }
    Ok(GrassmannMap {
        kind: MapKind::NonstandardDemo(BlockSelectorMap { selector, n, d }),
        n,
        d,
    })
}

/// Table entries match when the summed squared sines of the principal angles
/// are below `eps_angle^2`, computed cheaply as `n - tr(PQ)`.
pub(crate) fn same_subspace(a: &Subspace, b: &Subspace, tol: &Tolerance) -> bool {
    if a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim() {
        return false;
    }
    let cross = &a.basis().adjoint() * b.basis();
    let sin2 = a.dim() as f64 - cross.frobenius_norm().powi(2);
    sin2 <= tol.eps_angle * tol.eps_angle
}

/// Applies a map to one subspace of its domain.
pub fn apply_map(phi: &GrassmannMap, s: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    if s.ambient_dim() != phi.d || s.dim() != phi.n {
        return Err(Error::Domain(format!(
            "map acts on {}-dimensional subspaces of C^{}, got dimension {} in C^{}",
            phi.n,
            phi.d,
            s.dim(),
            s.ambient_dim()
        )));
    }
    match &phi.kind {
        MapKind::Standard(u) => apply_isometry(u, s),
        MapKind::ComplementStandard(u) => apply_isometry(u, &complement(s, tol)?),
        MapKind::Table(pairs) => pairs
            .iter()
            .find(|(from, _)| same_subspace(from, s, tol))
            .map(|(_, to)| to.clone())
            .ok_or_else(|| Error::Domain("subspace not found in table".into())),
        MapKind::NonstandardDemo(block) => {
            let chosen = block.selector.select(s, tol)?;
            Ok(Subspace::from_orthonormal(
                s.basis().block_diag(chosen.basis()),
            ))
        }
    }
}

impl SubspaceMap for GrassmannMap {
    fn domain(&self) -> (usize, usize) {
        (self.d, self.n)
    }

    fn apply(&self, s: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        apply_map(self, s, tol)
    }

    fn finite_domain(&self) -> Option<Vec<Subspace>> {
        match &self.kind {
            MapKind::Table(pairs) => Some(pairs.iter().map(|(s, _)| s.clone()).collect()),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        let extra = match &self.kind {
            MapKind::Standard(u) | MapKind::ComplementStandard(u) => format!(
                ", isometry C^{} -> C^{}{}",
                u.domain_dim(),
                u.codomain_dim(),
                if u.is_conjugate() { " (conjugate-linear)" } else { "" }
            ),
            MapKind::Table(p) => format!(", {} entries", p.len()),
            MapKind::NonstandardDemo(b) => format!(", selector {:?}", b.selector),
        };
        format!("{} map on P_{}(C^{}){}", self.kind_name(), self.n, self.d, extra)
    }
}

/// `S -> phi(S^⊥)`; turns a complement-type map into a standard-type one.
pub struct PrecomposeComplement<'a> {
    pub inner: &'a dyn SubspaceMap,
}

impl SubspaceMap for PrecomposeComplement<'_> {
    fn domain(&self) -> (usize, usize) {
        let (d, n) = self.inner.domain();
        (d, d - n)
    }

    fn apply(&self, s: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.inner.apply(&complement(s, tol)?, tol)
    }

    fn describe(&self) -> String {
        format!("({}) after complementation", self.inner.describe())
    }
}

/// Smallest angle by which two subspaces fail to coincide: the largest
/// principal angle (pi/2 if dimensions differ).
pub fn subspace_distance_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.dim() != b.dim() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    Ok(principal_angles_general(a, b)?.max())
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    from: Subspace,
    to: Subspace,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    isometry: Option<IsometryMap>,
    n: usize,
    d: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pairs: Vec<PairJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    selector_rank: Option<usize>,
}

impl GrassmannMap {
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut j = MapJson {
            kind: self.kind_name().to_string(),
            isometry: self.isometry().cloned(),
            n: self.n,
            d: self.d,
            pairs: Vec::new(),
            selector_rank: None,
        };
        match &self.kind {
            MapKind::Table(p) => {
                j.pairs = p
                    .iter()
                    .map(|(a, b)| PairJson {
                        from: a.clone(),
                        to: b.clone(),
                    })
                    .collect();
            }
            MapKind::NonstandardDemo(b) => match b.selector {
                Selector::Pivoted { rank } => j.selector_rank = Some(rank),
                Selector::Identity => j.selector_rank = Some(self.n),
                Selector::Custom { .. } => {
                    return Err(Error::Serialization(
                        "custom selectors cannot be serialized".into(),
                    ))
                }
            },
            _ => {}
        }
        Ok(serde_json::to_value(j)?)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: MapJson = serde_json::from_value(v.clone())?;
        let need_iso = || {
            j.isometry
                .clone()
                .ok_or_else(|| Error::Serialization(format!("{} map needs an isometry", j.kind)))
        };
        let map = match j.kind.as_str() {
            "standard" => GrassmannMap::standard(need_iso()?, j.n)?,
            "complement_standard" => GrassmannMap::complement_standard(need_iso()?, j.n)?,
            "table" => GrassmannMap::table(j.pairs.into_iter().map(|p| (p.from, p.to)).collect())?,
            "nonstandard_demo" => {
                let rank = j.selector_rank.unwrap_or(1);
                let sel = if rank == j.n {
                    Selector::Identity
                } else {
                    Selector::Pivoted { rank }
                };
                construct_nonstandard_demo(sel, j.n, j.d)?
            }
            other => return Err(Error::Serialization(format!("unknown map kind {other:?}"))),
        };
        if map.d != j.d || map.n != j.n {
            return Err(Error::Serialization(format!(
                "declared (d, n) = ({}, {}) but the map acts on ({}, {})",
                j.d, j.n, map.d, map.n
            )));
        }
        Ok(map)
    }
}
