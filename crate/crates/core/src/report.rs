//! Verdict documents.
//!
//! Each residual is stored next to the tolerance it was judged against, and
//! the recorded verdict is always `residual <= tolerance`, so a reader can
//! re-derive every verdict from the numbers alone
//! ([`AnalysisDocument::verdicts_consistent`]). Non-finite residuals are
//! written as the strings `"inf"`, `"-inf"`, `"nan"`, since JSON has no
//! literal for them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{BlockDecomposition, Factorization, ParityClass, StructureLemmaReport, TripletAnalysis, YParity};
use crate::quantum_info::{SsaEntropies, SsaReport, StateDensity};
use crate::statefile::RegionLists;
use crate::{Real, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

mod float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float '{other}'"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Check {
    #[serde(with = "float")]
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

// NaN residuals compare by bits so documents stay comparable after parsing
impl PartialEq for Check {
    fn eq(&self, o: &Self) -> bool {
        self.residual.to_bits() == o.residual.to_bits() && self.tolerance == o.tolerance && self.verdict == o.verdict
    }
}

impl Check {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        let verdict = if residual <= tolerance { Verdict::Pass } else { Verdict::Fail };
        Self { residual, tolerance, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn consistent(&self) -> bool {
        *self == Check::new(self.residual, self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsaSection {
    pub entropies: SsaEntropies,
    /// The gap itself is the residual; it passes when at most `tol.equality`.
    pub saturation: Check,
    pub cross_check: Check,
}

impl SsaSection {
    pub fn new(r: &SsaReport, tol: &Tolerances) -> Self {
        Self {
            entropies: r.entropies.clone(),
            saturation: Check::new(r.gap, r.tol_equality),
            cross_check: Check::new(r.cross_check_residual, tol.equality),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletSection {
    pub dim_c: usize,
    pub dim_b: usize,
    pub a_in_c: Check,
    /// `saturation` and `a_in_c` both pass.
    pub markov: bool,
    pub even: Check,
    pub e_bc: Check,
}

impl TripletSection {
    pub fn new<T: Real>(state: &StateDensity<T>, a: &TripletAnalysis<T>, tol: &Tolerances) -> Self {
        Self {
            dim_c: a.c_basis.len(),
            dim_b: a.b_basis.len(),
            a_in_c: Check::new(a.a_in_c_residual.as_f64(), tol.member),
            markov: a.markov,
            even: Check::new(state.even_residual().as_f64(), tol.herm),
            e_bc: Check::new(a.e_bc_residual.as_f64(), tol.member),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSection {
    pub product: Check,
    pub commute: Check,
    pub x_region: Check,
    pub y_region: Check,
    pub x_min_eig: f64,
    pub y_min_eig: f64,
    pub y_parity: YParity,
    pub y_odd_fraction: f64,
    pub even_chosen: bool,
}

impl FactorizationSection {
    pub fn new<T: Real>(f: &Factorization<T>, tol: &Tolerances) -> Self {
        Self {
            product: Check::new(f.product_residual.as_f64(), tol.equality),
            commute: Check::new(f.commute_residual.as_f64(), tol.equality),
            x_region: Check::new(f.x_region_residual.as_f64(), tol.member),
            y_region: Check::new(f.y_region_residual.as_f64(), tol.member),
            x_min_eig: f.x_min_eig.as_f64(),
            y_min_eig: f.y_min_eig.as_f64(),
            y_parity: f.y_parity,
            y_odd_fraction: f.y_odd_fraction.as_f64(),
            even_chosen: f.even_chosen,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub class: ParityClass,
    /// `Tr` of the block's contribution to `rho`.
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<Check>,
    pub x_member: Check,
    pub y_member: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSection {
    pub k_fixed: usize,
    pub n_pairs: usize,
    pub projections: Check,
    pub parity_action: Check,
    pub reassembly: Check,
    pub lemma_c: Check,
    pub y_tilde: Check,
    pub blocks: Vec<BlockSummary>,
}

impl BlockSection {
    pub fn new<T: Real>(dec: &BlockDecomposition<T>, tol: &Tolerances) -> Self {
        let blocks = dec
            .blocks
            .iter()
            .map(|b| BlockSummary {
                class: b.class,
                weight: b.contribution().trace().re.as_f64(),
                partner: (b.class == ParityClass::ThetaPair).then(|| Check::new(b.partner_residual.as_f64(), tol.equality)),
                x_member: Check::new(b.x_member_residual.as_f64(), tol.member),
                y_member: Check::new(b.y_member_residual.as_f64(), tol.member),
            })
            .collect();
        Self {
            k_fixed: dec.k_fixed(),
            n_pairs: dec.n_pairs(),
            projections: Check::new(dec.structure.q_residual.as_f64(), tol.member),
            parity_action: Check::new(dec.structure.theta_residual.as_f64(), tol.equality),
            reassembly: Check::new(dec.reassembly_residual.as_f64(), tol.equality),
            lemma_c: Check::new(dec.lemma_c_residual.as_f64(), tol.equality),
            y_tilde: Check::new(dec.y_tilde_residual.as_f64(), tol.member),
            blocks,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSection {
    pub c_span: Check,
    pub c_prime_span: Check,
    pub relative_commutant_span: Check,
    pub dim_c: usize,
    pub dim_b: usize,
    pub dim_c_prime: usize,
    pub dim_rel_even: usize,
    pub dim_rel_odd: usize,
}

impl LemmaSection {
    pub fn new(r: &StructureLemmaReport, tol: &Tolerances) -> Self {
        Self {
            c_span: Check::new(r.c_residual, tol.equality),
            c_prime_span: Check::new(r.c_prime_residual, tol.equality),
            relative_commutant_span: Check::new(r.b_residual, tol.equality),
            dim_c: r.dim_c,
            dim_b: r.dim_b,
            dim_c_prime: r.dim_c_prime,
            dim_rel_even: r.dim_rel_even,
            dim_rel_odd: r.dim_rel_odd,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub schema_version: u32,
    pub tool_version: String,
    /// SHA-256 of the input file, hex.
    pub input_digest: String,
    pub n_sites: usize,
    pub regions: RegionLists,
    pub tolerances: Tolerances,
    pub ssa: SsaSection,
    pub triplet: TripletSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<FactorizationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_lemmas: Option<LemmaSection>,
    /// Wall-clock milliseconds per stage.
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnalysisDocument {
    pub fn new<T: Real>(
        input_digest: String,
        state: &StateDensity<T>,
        regions: &crate::car::RegionPartition,
        analysis: &TripletAnalysis<T>,
        tol: &Tolerances,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest,
            n_sites: state.n_sites(),
            regions: regions.into(),
            tolerances: *tol,
            ssa: SsaSection::new(&analysis.ssa, tol),
            triplet: TripletSection::new(state, analysis, tol),
            factorization: None,
            blocks: None,
            structure_lemmas: None,
            timings_ms: BTreeMap::new(),
        }
    }

    /// All checks in document order, named by their JSON path.
    pub fn checks(&self) -> Vec<(String, Check)> {
        let mut out = vec![
            ("ssa.saturation".to_string(), self.ssa.saturation),
            ("ssa.cross_check".into(), self.ssa.cross_check),
            ("triplet.a_in_c".into(), self.triplet.a_in_c),
            ("triplet.even".into(), self.triplet.even),
            ("triplet.e_bc".into(), self.triplet.e_bc),
        ];
        if let Some(f) = &self.factorization {
            out.extend([
                ("factorization.product".to_string(), f.product),
                ("factorization.commute".into(), f.commute),
                ("factorization.x_region".into(), f.x_region),
                ("factorization.y_region".into(), f.y_region),
            ]);
        }
        if let Some(b) = &self.blocks {
            out.extend([
                ("blocks.projections".to_string(), b.projections),
                ("blocks.parity_action".into(), b.parity_action),
                ("blocks.reassembly".into(), b.reassembly),
                ("blocks.lemma_c".into(), b.lemma_c),
                ("blocks.y_tilde".into(), b.y_tilde),
            ]);
            for (j, blk) in b.blocks.iter().enumerate() {
                if let Some(p) = blk.partner {
                    out.push((format!("blocks.blocks[{j}].partner"), p));
                }
                out.push((format!("blocks.blocks[{j}].x_member"), blk.x_member));
                out.push((format!("blocks.blocks[{j}].y_member"), blk.y_member));
            }
        }
        if let Some(l) = &self.structure_lemmas {
            out.extend([
                ("structure_lemmas.c_span".to_string(), l.c_span),
                ("structure_lemmas.c_prime_span".into(), l.c_prime_span),
                ("structure_lemmas.relative_commutant_span".into(), l.relative_commutant_span),
            ]);
        }
        out
    }

    /// Re-derives every verdict from the recorded numbers.
    pub fn verdicts_consistent(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.consistent())
            && self.triplet.markov == (self.ssa.saturation.passed() && self.triplet.a_in_c.passed())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

pub fn emit(doc: &AnalysisDocument, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => emit_text(doc).into_bytes(),
    }
}

fn emit_text(doc: &AnalysisDocument) -> String {
    let mut s = String::new();
    let verdict = |p: bool| if p { "pass" } else { "fail" };
    for (name, c) in doc.checks() {
        let _ = writeln!(s, "{name}: {} residual={:e} tolerance={:e}", verdict(c.passed()), c.residual, c.tolerance);
    }
    let _ = writeln!(s, "markov: {}", doc.triplet.markov);
    if let Some(b) = &doc.blocks {
        let _ = writeln!(s, "blocks: k_fixed={} n_pairs={}", b.k_fixed, b.n_pairs);
    }
    s
}

pub fn parse(bytes: &[u8]) -> Result<AnalysisDocument> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}
