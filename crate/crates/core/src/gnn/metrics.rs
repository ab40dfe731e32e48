use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Unweighted mean over classes that occur in the truth or the predictions.
    pub macro_avg: AverageMetrics,
    pub weighted_avg: AverageMetrics,
    /// `confusion[true][pred]`.
    pub confusion: Vec<Vec<u64>>,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Classification report over `num_classes` classes. `names` may be shorter
/// than the class count; missing names fall back to the class index.
pub fn compute_metrics(truth: &[usize], pred: &[usize], num_classes: usize, names: &[String]) -> Metrics {
    assert_eq!(truth.len(), pred.len(), "truth and predictions differ in length");
    let mut confusion = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        confusion[t][p] += 1;
    }
    let total = truth.len() as u64;
    let correct: u64 = (0..num_classes).map(|c| confusion[c][c]).sum();
    let per_class: Vec<ClassMetrics> = (0..num_classes)
        .map(|c| {
            let tp = confusion[c][c];
            let support: u64 = confusion[c].iter().sum();
            let predicted: u64 = confusion.iter().map(|r| r[c]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
            ClassMetrics {
                class: c,
                name: names.get(c).cloned().unwrap_or_else(|| c.to_string()),
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();
    let present: Vec<&ClassMetrics> =
        per_class.iter().filter(|m| m.support > 0 || confusion.iter().any(|r| r[m.class] > 0)).collect();
    let k = present.len().max(1) as f64;
    let macro_avg = AverageMetrics {
        precision: present.iter().map(|m| m.precision).sum::<f64>() / k,
        recall: present.iter().map(|m| m.recall).sum::<f64>() / k,
        f1: present.iter().map(|m| m.f1).sum::<f64>() / k,
        support: total,
    };
    let w = |f: fn(&ClassMetrics) -> f64| {
        if total == 0 {
            0.0
        } else {
            per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
        }
    };
    let weighted_avg =
        AverageMetrics { precision: w(|m| m.precision), recall: w(|m| m.recall), f1: w(|m| m.f1), support: total };
    Metrics { accuracy: ratio(correct, total), per_class, macro_avg, weighted_avg, confusion }
}

impl Metrics {
    /// Plain-text report with one row per class plus the averages.
    pub fn to_table(&self) -> String {
        let width = self.per_class.iter().map(|m| m.name.len()).max().unwrap_or(0).max(12);
        let mut out = format!("{:>width$} {:>9} {:>9} {:>9} {:>9}\n", "", "precision", "recall", "f1-score", "support");
        for m in &self.per_class {
            out +=
                &format!("{:>width$} {:>9.4} {:>9.4} {:>9.4} {:>9}\n", m.name, m.precision, m.recall, m.f1, m.support);
        }
        out += &format!(
            "\n{:>width$} {:>9} {:>9} {:>9.4} {:>9}\n",
            "accuracy", "", "", self.accuracy, self.macro_avg.support
        );
        for (label, a) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            out +=
                &format!("{:>width$} {:>9.4} {:>9.4} {:>9.4} {:>9}\n", label, a.precision, a.recall, a.f1, a.support);
        }
        out += "\nconfusion matrix (rows = true class)\n";
        for row in &self.confusion {
            out += &row.iter().map(|c| format!("{c:>6}")).collect::<String>();
            out.push('\n');
        }
        out
    }
}
