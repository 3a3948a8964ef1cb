#pragma once

#include <string>
#include <utility>
#include <vector>

#include "notecoder/eval.hpp"
#include "notecoder/experiment.hpp"

namespace notecoder {

/// Shortest text that parses back to the same double; "inf"/"-inf"/"nan" otherwise.
std::string format_double(double v);

/// split,n,tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate
/// `degenerate` lists the undefined ratios, separated by ';'.
std::string metrics_csv(const std::vector<std::pair<std::string, Evaluation>>& rows);

/// One row per fold.
std::string cv_csv(const CvReport& report);
std::string cv_summary_json(const CvReport& report, const ModelConfig& model);

std::string holdout_summary_json(const Evaluation& train, const Evaluation& test, const ModelConfig& model,
                                 double test_auc);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// One row per grid point; `best` marks the selected one.
std::string grid_csv(const GridResult& result);
std::string grid_summary_json(const GridResult& result);

std::string predictions_csv(const PredictionSet& predictions);
std::string features_csv(const std::vector<std::pair<std::string, double>>& ranked);

/// fpr,tpr,threshold per point; `model` column first when several curves are written.
std::string roc_csv(const std::vector<std::pair<std::string, RocCurve>>& curves);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Standalone SVG line chart with axes, ticks and a legend.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series, std::pair<double, double> x_range,
                           std::pair<double, double> y_range, bool diagonal = false);

std::string roc_svg(const std::vector<std::pair<std::string, RocCurve>>& curves);
std::string sweep_svg(const std::vector<SweepRow>& rows);

}  // namespace notecoder
