//! Seeded synthetic patient cohort: annotated VCFs, CADD tables and a
//! run-table metadata CSV, plus the ground truth they were written from.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INFO_HEADER: &str = "##fileformat=VCFv4.2\n\
##INFO=<ID=AC,Number=A,Type=Integer,Description=\"Allele count in genotypes\">\n\
##INFO=<ID=AF,Number=A,Type=Float,Description=\"Allele Frequency\">\n\
##INFO=<ID=AN,Number=1,Type=Integer,Description=\"Total number of alleles\">\n\
##INFO=<ID=BaseQRankSum,Number=1,Type=Float,Description=\"Base quality rank sum\">\n\
##INFO=<ID=DP,Number=1,Type=Integer,Description=\"Approximate read depth\">\n\
##INFO=<ID=ExcessHet,Number=1,Type=Float,Description=\"Excess heterozygosity\">\n\
##INFO=<ID=FS,Number=1,Type=Float,Description=\"Fisher strand bias\">\n\
##INFO=<ID=MLEAC,Number=A,Type=Integer,Description=\"MLE allele count\">\n\
##INFO=<ID=MLEAF,Number=A,Type=Float,Description=\"MLE allele frequency\">\n\
##INFO=<ID=MQ,Number=1,Type=Float,Description=\"RMS mapping quality\">\n\
##INFO=<ID=QD,Number=1,Type=Float,Description=\"Quality by depth\">\n\
##INFO=<ID=ReadPosRankSum,Number=1,Type=Float,Description=\"Read position rank sum\">\n\
##INFO=<ID=SOR,Number=1,Type=Float,Description=\"Strand odds ratio\">\n\
##INFO=<ID=DB,Number=0,Type=Flag,Description=\"dbSNP membership\">\n\
##INFO=<ID=ANN,Number=.,Type=String,Description=\"Functional annotations\">\n";

const BASES: [&str; 4] = ["A", "C", "G", "T"];
const GENES: usize = 8;

#[derive(Debug, Clone)]
pub struct SynthVariant {
    pub chrom: String,
    pub pos: u64,
    pub id: Option<String>,
    pub reference: String,
    pub alt: String,
    pub qual: String,
    pub filter: Option<String>,
    /// INFO entries in file order; `None` marks a flag.
    pub info: Vec<(String, Option<String>)>,
    pub ann: String,
    pub gene: String,
    pub cadd: Option<(String, String)>,
}

impl SynthVariant {
    pub fn info_value(&self, key: &str) -> Option<&str> {
        self.info.iter().find(|(k, _)| k == key).and_then(|(_, v)| v.as_deref())
    }

    pub fn first_annotation(&self) -> &str {
        self.ann.split(',').next().unwrap()
    }

    fn line(&self) -> String {
        let info: Vec<String> = self
            .info
            .iter()
            .map(|(k, v)| match v {
                Some(v) => format!("{k}={v}"),
                None => k.clone(),
            })
            .collect();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.chrom,
            self.pos,
            self.id.as_deref().unwrap_or("."),
            self.reference,
            self.alt,
            self.qual,
            self.filter.as_deref().unwrap_or("."),
            info.join(";")
        )
    }
}

#[derive(Debug, Clone)]
pub struct SynthAccession {
    pub accession: String,
    pub age: Option<f64>,
    pub sex: String,
    pub variants: Vec<SynthVariant>,
}

impl SynthAccession {
    pub fn vcf_filename(&self) -> String {
        format!("{}.vcf", self.accession)
    }

    pub fn cadd_filename(&self) -> String {
        format!("{}_cadd.tsv", self.accession)
    }

    pub fn vcf_text(&self) -> String {
        let mut out = String::from(INFO_HEADER);
        out.push_str("#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\n");
        for v in &self.variants {
            out.push_str(&v.line());
            out.push('\n');
        }
        out
    }

    pub fn cadd_text(&self) -> String {
        let mut out = String::from("## CADD GRCh38-v1.6 (c) University of Washington and Berlin Institute of Health\n");
        out.push_str("#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n");
        for v in &self.variants {
            if let Some((raw, phred)) = &v.cadd {
                out.push_str(&format!("{}\t{}\t{}\t{}\t{raw}\t{phred}\n", v.chrom, v.pos, v.reference, v.alt));
            }
        }
        out
    }

    pub fn cadd_rows(&self) -> usize {
        self.variants.iter().filter(|v| v.cadd.is_some()).count()
    }
}

#[derive(Debug, Clone)]
pub struct Cohort {
    pub accessions: Vec<SynthAccession>,
}

pub struct CohortSpec {
    pub accessions: usize,
    pub variants_per_accession: usize,
    /// Share of variants without a CADD row.
    pub missing_cadd: f64,
    /// Odd-numbered accessions carry rsIDs; even ones use `.`.
    pub ids_on_odd: bool,
    pub seed: u64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec { accessions: 5, variants_per_accession: 40, missing_cadd: 0.0, ids_on_odd: true, seed: 7 }
    }
}

const AGES: [f64; 8] = [61.0, 65.0, 45.0, 30.0, 72.0, 68.0, 55.0, 80.0];

fn ann_segment(rng: &mut ChaCha8Rng, alt: &str, gene: usize) -> String {
    let (effect, impact) = match gene % 4 {
        0 => ("synonymous_variant", "LOW"),
        1 => ("missense_variant", "MODERATE"),
        2 => ("splice_region_variant", "MODERATE"),
        _ => ("stop_gained", "HIGH"),
    };
    format!(
        "{alt}|{effect}|{impact}|GENE{gene}|ENSG{gene:08}|transcript|ENST{:08}|protein_coding|{}/9|c.{}A>G|||||",
        rng.random_range(0..100_000),
        rng.random_range(1..10),
        rng.random_range(1..3000)
    )
}

impl Cohort {
    pub fn generate(spec: &CohortSpec) -> Cohort {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let accessions = (0..spec.accessions)
            .map(|a| {
                let accession = format!("SRR{}", 13_112_995 + a as u64 * 11);
                let with_ids = spec.ids_on_odd && a % 2 == 1;
                let variants = (0..spec.variants_per_accession)
                    .map(|i| {
                        let chrom = format!("{}", 1 + (i % 3));
                        let pos = 10_000 + (a * spec.variants_per_accession + i) as u64 * 37;
                        let r = rng.random_range(0..4);
                        let reference = BASES[r].to_string();
                        let alt = BASES[(r + rng.random_range(1..4)) % 4].to_string();
                        let gene = rng.random_range(0..GENES);
                        let class = gene % 4;
                        let qual = format!("{:.2}", 20.0 + 30.0 * class as f64 + rng.random_range(0.0..10.0));
                        let mut info = vec![
                            ("AC".to_string(), Some(format!("{}", 1 + (class % 2)))),
                            ("AF".into(), Some(if class % 2 == 0 { "0.500".into() } else { "1.00".into() })),
                            ("AN".into(), Some("2".into())),
                        ];
                        if rng.random_bool(0.6) {
                            info.push(("BaseQRankSum".into(), Some(format!("{:.3}", rng.random_range(-3.0..3.0)))));
                        }
                        info.push(("DP".into(), Some(format!("{}", 10 + class * 15 + rng.random_range(0..5)))));
                        if rng.random_bool(0.2) {
                            info.push(("DB".into(), None));
                        }
                        info.push(("ExcessHet".into(), Some("3.0103".into())));
                        info.push(("FS".into(), Some(format!("{:.3}", rng.random_range(0.0..5.0)))));
                        info.push(("MLEAC".into(), Some(format!("{}", 1 + (class % 2)))));
                        info.push(("MLEAF".into(), Some(if class % 2 == 0 { "0.500".into() } else { "1.00".into() })));
                        info.push(("MQ".into(), Some(format!("{:.2}", 55.0 + rng.random_range(0.0..5.0)))));
                        info.push((
                            "QD".into(),
                            Some(format!("{:.2}", 2.0 + 8.0 * class as f64 + rng.random_range(0.0..2.0))),
                        ));
                        if rng.random_bool(0.6) {
                            info.push(("ReadPosRankSum".into(), Some(format!("{:.3}", rng.random_range(-2.0..2.0)))));
                        }
                        info.push(("SOR".into(), Some(format!("{:.3}", rng.random_range(0.5..2.0)))));
                        let mut ann = ann_segment(&mut rng, &alt, gene);
                        if rng.random_bool(0.5) {
                            ann.push(',');
                            ann.push_str(&ann_segment(&mut rng, &alt, (gene + 1) % GENES));
                        }
                        info.push(("ANN".into(), Some(ann.clone())));
                        let cadd = (!rng.random_bool(spec.missing_cadd)).then(|| {
                            let phred = 10.0 * class as f64 + rng.random_range(1.0..9.0);
                            (format!("{:.6}", phred / 10.0 - 1.5), format!("{phred:.2}"))
                        });
                        SynthVariant {
                            chrom,
                            pos,
                            id: with_ids.then(|| format!("rs{}", 1_000_000 + pos)),
                            reference,
                            alt,
                            qual,
                            filter: Some(if rng.random_bool(0.8) { "PASS".into() } else { "SnpCluster".into() }),
                            info,
                            ann,
                            gene: format!("GENE{gene}"),
                            cadd,
                        }
                    })
                    .collect();
                SynthAccession {
                    accession,
                    age: Some(AGES[a % AGES.len()]),
                    sex: if a % 2 == 0 { "male".into() } else { "female".into() },
                    variants,
                }
            })
            .collect();
        Cohort { accessions }
    }

    /// Headerless run table with accession, age, disease, outcome and sex at
    /// columns 0, 1, 11, 12 and 31.
    pub fn metadata_csv(&self) -> String {
        let mut out = String::new();
        for a in &self.accessions {
            let mut cols = vec![String::new(); 32];
            cols[0] = a.accession.clone();
            cols[1] = a.age.map(|x| format!("{x}")).unwrap_or_default();
            cols[11] = "COVID-19".into();
            cols[12] = "Recovered".into();
            cols[31] = a.sex.clone();
            for (i, c) in cols.iter_mut().enumerate() {
                if c.is_empty() && ![1].contains(&i) {
                    *c = format!("field{i}");
                }
            }
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }

    pub fn accession_ids(&self) -> Vec<String> {
        self.accessions.iter().map(|a| a.accession.clone()).collect()
    }
}

/// Quads one VCF record converts to, counted from the record's columns.
pub fn expected_vcf_quads(v: &SynthVariant) -> usize {
    4 + 1 + usize::from(v.id.is_some()) + usize::from(v.filter.is_some()) + v.info.len()
}

pub const CADD_TRIPLES_PER_ROW: usize = 7;

/// Quads one metadata row converts to with the default predicates.
pub fn expected_metadata_quads(a: &SynthAccession) -> usize {
    usize::from(a.age.is_some()) + 3
}

/// Every quad the cohort converts to: VCF, CADD and metadata.
pub fn cohort_quads(cohort: &Cohort) -> Vec<variantkg_core::rdf::Quad> {
    use variantkg_core::pipeline::{convert_cadd, convert_metadata, convert_vcf};
    let mut out = Vec::new();
    for a in &cohort.accessions {
        out.extend(convert_vcf(a.vcf_text().as_bytes(), &a.vcf_filename(), &a.accession, &Default::default()).unwrap());
        out.extend(convert_cadd(a.cadd_text().as_bytes(), &a.cadd_filename(), &a.accession).unwrap());
    }
    let (meta, _) =
        convert_metadata(cohort.metadata_csv().as_bytes(), "runs.csv", &Default::default(), &Default::default())
            .unwrap();
    out.extend(meta);
    out
}

/// Store size after loading the whole cohort into an empty store.
pub fn expected_total_quads(cohort: &Cohort) -> usize {
    cohort
        .accessions
        .iter()
        .map(|a| {
            a.variants.iter().map(expected_vcf_quads).sum::<usize>()
                + CADD_TRIPLES_PER_ROW * a.cadd_rows()
                + expected_metadata_quads(a)
        })
        .sum()
}

/// Accessions whose age lies in `[lo, hi]`, sorted.
pub fn accessions_in_age_range(cohort: &Cohort, lo: f64, hi: f64) -> Vec<String> {
    let mut out: Vec<String> = cohort
        .accessions
        .iter()
        .filter(|a| a.age.is_some_and(|x| x >= lo && x <= hi))
        .map(|a| a.accession.clone())
        .collect();
    out.sort();
    out
}
