//! A reference VCF record and CADD row for SRR13112995, plus three example
//! patient ages.

pub const SAMPLE_VCF: &str = "##fileformat=VCFv4.2\n\
##INFO=<ID=AC,Number=A,Type=Integer,Description=\"Allele count in genotypes\">\n\
##INFO=<ID=AF,Number=A,Type=Float,Description=\"Allele Frequency\">\n\
##INFO=<ID=AN,Number=1,Type=Integer,Description=\"Total number of alleles\">\n\
##INFO=<ID=BaseQRankSum,Number=1,Type=Float,Description=\"Z-score\">\n\
##INFO=<ID=DP,Number=1,Type=Integer,Description=\"Approximate read depth\">\n\
##INFO=<ID=ExcessHet,Number=1,Type=Float,Description=\"Phred-scaled p-value\">\n\
##INFO=<ID=FS,Number=1,Type=Float,Description=\"Fisher strand\">\n\
##INFO=<ID=MLEAC,Number=A,Type=Integer,Description=\"MLE AC\">\n\
##INFO=<ID=MLEAF,Number=A,Type=Float,Description=\"MLE AF\">\n\
##INFO=<ID=MQ,Number=1,Type=Float,Description=\"RMS mapping quality\">\n\
##INFO=<ID=MQRankSum,Number=1,Type=Float,Description=\"Z-score\">\n\
##INFO=<ID=QD,Number=1,Type=Float,Description=\"Quality by depth\">\n\
##INFO=<ID=ReadPosRankSum,Number=1,Type=Float,Description=\"Z-score\">\n\
##INFO=<ID=SOR,Number=1,Type=Float,Description=\"Strand odds ratio\">\n\
##FORMAT=<ID=GT,Number=1,Type=String,Description=\"Genotype\">\n\
##FORMAT=<ID=AD,Number=R,Type=Integer,Description=\"Allelic depths\">\n\
##FORMAT=<ID=DP,Number=1,Type=Integer,Description=\"Depth\">\n\
##FORMAT=<ID=GQ,Number=1,Type=Integer,Description=\"Genotype quality\">\n\
##FORMAT=<ID=PL,Number=G,Type=Integer,Description=\"Likelihoods\">\n\
#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\tFORMAT\tsample\n\
1\t16963\t.\tG\tA\t45.64\tSnpCluster\tAC=1;AF=0.500;AN=2;BaseQRankSum=1.465;DP=8;ExcessHet=3.0103;FS=0.000;MLEAC=1;MLEAF=0.500;MQ=60.00;MQRankSum=0.000;QD=5.70;ReadPosRankSum=-0.366;SOR=0.169\tGT:AD:DP:GQ:PL\t0/1:6,2:8:53:53,0,228\n";

pub const SAMPLE_CADD: &str =
    "## CADD GRCh38-v1.6\n#Chrom\tPos\tRef\tAlt\tRawScore\tPHRED\n1\t16963\tG\tA\t0.900784\t12.72\n";

/// Headerless run-table rows: accession in column 0, age in column 1.
pub fn sample_metadata_csv() -> String {
    let mut out = String::new();
    for (acc, age) in [("SRR13112995", 61), ("SRR13112996", 65), ("SRR13112997", 45)] {
        let mut cols = vec![String::new(); 32];
        cols[0] = acc.to_string();
        cols[1] = age.to_string();
        cols[11] = "COVID-19".into();
        cols[12] = "alive".into();
        cols[31] = "male".into();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// The sample record plus one SnpEff annotation; the feature query needs ANN.
pub fn sample_vcf_with_ann() -> String {
    SAMPLE_VCF.replace(
        "SOR=0.169\t",
        "SOR=0.169;ANN=A|upstream_gene_variant|MODIFIER|WASH7P|ENSG00000227232|transcript|ENST00000488147|unprocessed_pseudogene||n.-1A>G|||||\t",
    )
}
