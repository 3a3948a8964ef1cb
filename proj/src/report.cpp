#include "notecoder/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace notecoder {

namespace {

using Json = nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string degenerate(const Metrics& m) {
  std::string out;
  auto add = [&](bool defined, const char* name) {
    if (defined) return;
    if (!out.empty()) out += ';';
    out += name;
  };
  add(m.precision_defined, "precision");
  add(m.recall_defined, "recall");
  add(m.f1_defined, "f1");
  return out;
}

std::string metric_cells(const Metrics& m) {
  return format_double(m.accuracy) + "," + format_double(m.precision) + "," + format_double(m.recall) + "," +
         format_double(m.f1);
}

std::string confusion_cells(const ConfusionMatrix& c) {
  return std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fn);
}

Json metrics_json(const Metrics& m) {
  Json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  Json d = Json::array();
  if (!m.precision_defined) d.push_back("precision");
  if (!m.recall_defined) d.push_back("recall");
  if (!m.f1_defined) d.push_back("f1");
  j["undefined"] = std::move(d);
  return j;
}

Json evaluation_json(const Evaluation& e) {
  Json j;
  j["n"] = e.confusion.total();
  j["tp"] = e.confusion.tp;
  j["fp"] = e.confusion.fp;
  j["tn"] = e.confusion.tn;
  j["fn"] = e.confusion.fn;
  j["metrics"] = metrics_json(e.metrics);
  return j;
}

Json model_json(const ModelConfig& m) {
  Json j;
  j["kind"] = std::string(model_kind_name(m.kind));
  j["n_estimators"] = m.n_estimators;
  j["max_depth"] = m.max_depth ? Json(*m.max_depth) : Json(nullptr);
  j["bootstrap"] = m.bootstrap;
  j["C"] = m.c;
  j["epochs"] = m.epochs;
  return j;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string metrics_csv(const std::vector<std::pair<std::string, Evaluation>>& rows) {
  std::string out = "split,n,tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate\n";
  for (const auto& [name, e] : rows) {
    out += csv_field(name) + "," + std::to_string(e.confusion.total()) + "," + confusion_cells(e.confusion) + "," +
           metric_cells(e.metrics) + "," + degenerate(e.metrics) + "\n";
  }
  return out;
}

std::string cv_csv(const CvReport& report) {
  std::string out = "fold,n_train,n_test,vocabulary,tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate\n";
  for (const auto& f : report.folds) {
    out += std::to_string(f.fold) + "," + std::to_string(f.n_train) + "," + std::to_string(f.n_test) + "," +
           std::to_string(f.vocabulary_size) + "," + confusion_cells(f.evaluation.confusion) + "," +
           metric_cells(f.evaluation.metrics) + "," + degenerate(f.evaluation.metrics) + "\n";
  }
  return out;
}

std::string cv_summary_json(const CvReport& report, const ModelConfig& model) {
  Json j;
  j["protocol"] = "cross-validation";
  j["k"] = report.k;
  j["seed"] = report.seed;
  j["model"] = model_json(model);
  j["mean"] = metrics_json(report.mean);
  j["std"] = metrics_json(report.stddev);
  Json folds = Json::array();
  for (const auto& f : report.folds) folds.push_back(evaluation_json(f.evaluation));
  j["folds"] = std::move(folds);
  return j.dump(2) + "\n";
}

std::string holdout_summary_json(const Evaluation& train, const Evaluation& test, const ModelConfig& model,
                                 double test_auc) {
  Json j;
  j["protocol"] = "holdout";
  j["model"] = model_json(model);
  j["train"] = evaluation_json(train);
  j["test"] = evaluation_json(test);
  j["test_auc"] = std::isfinite(test_auc) ? Json(test_auc) : Json(nullptr);
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "count,train_accuracy,test_accuracy\n";
  for (const auto& r : rows) {
    out += std::to_string(r.count) + "," + format_double(r.train_accuracy) + "," + format_double(r.test_accuracy) + "\n";
  }
  return out;
}

std::string grid_csv(const GridResult& result) {
  std::string out =
      "index,kind,n_estimators,max_depth,bootstrap,C,epochs,mean_accuracy,mean_precision,mean_recall,mean_f1,"
      "std_f1,best\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& m = result.rows[i].model;
    const auto& cv = result.rows[i].cv;
    out += std::to_string(i) + "," + std::string(model_kind_name(m.kind)) + "," + std::to_string(m.n_estimators) + "," +
           (m.max_depth ? std::to_string(*m.max_depth) : std::string("none")) + "," + (m.bootstrap ? "1" : "0") + "," +
           format_double(m.c) + "," + std::to_string(m.epochs) + "," + metric_cells(cv.mean) + "," +
           format_double(cv.stddev.f1) + "," + (i == result.best ? "1" : "0") + "\n";
  }
  return out;
}

std::string grid_summary_json(const GridResult& result) {
  Json j;
  j["selection"] = "highest mean f1, first grid point on ties";
  j["best_index"] = result.best;
  Json rows = Json::array();
  for (const auto& r : result.rows) {
    Json row;
    row["model"] = model_json(r.model);
    row["k"] = r.cv.k;
    row["mean"] = metrics_json(r.cv.mean);
    row["std"] = metrics_json(r.cv.stddev);
    rows.push_back(std::move(row));
  }
  j["grid"] = std::move(rows);
  if (!result.rows.empty()) j["best_model"] = model_json(result.rows[result.best].model);
  return j.dump(2) + "\n";
}

std::string predictions_csv(const PredictionSet& p) {
  std::string out = "admission_id,label,predicted,score\n";
  for (std::size_t i = 0; i < p.predictions.size(); ++i) {
    out += csv_field(p.admission_ids[i]) + "," + (p.labels[i] ? "1" : "0") + "," + (p.predictions[i].label ? "1" : "0") +
           "," + format_double(p.predictions[i].score) + "\n";
  }
  return out;
}

std::string features_csv(const std::vector<std::pair<std::string, double>>& ranked) {
  std::string out = "rank,token,coefficient\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out += std::to_string(i + 1) + "," + csv_field(ranked[i].first) + "," + format_double(ranked[i].second) + "\n";
  }
  return out;
}

std::string roc_csv(const std::vector<std::pair<std::string, RocCurve>>& curves) {
  const bool named = curves.size() > 1;
  std::string out = named ? "model,fpr,tpr,threshold\n" : "fpr,tpr,threshold\n";
  for (const auto& [name, curve] : curves) {
    for (const auto& p : curve.points) {
      if (named) out += csv_field(name) + ",";
      out += format_double(p.fpr) + "," + format_double(p.tpr) + "," + format_double(p.threshold) + "\n";
    }
  }
  return out;
}

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series, std::pair<double, double> x_range,
                           std::pair<double, double> y_range, bool diagonal) {
  constexpr double W = 560, H = 440, L = 70, R = 20, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  const double x_span = x_range.second > x_range.first ? x_range.second - x_range.first : 1.0;
  const double y_span = y_range.second > y_range.first ? y_range.second - y_range.first : 1.0;
  auto sx = [&](double x) { return L + (x - x_range.first) / x_span * pw; };
  auto sy = [&](double y) { return T + ph - (y - y_range.first) / y_span * ph; };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
    << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_range.first + x_span * i / 5.0;
    const double fy = y_range.first + y_span * i / 5.0;
    const int digits = x_span >= 10 ? 0 : 2;
    s << "<line x1=\"" << sx(fx) << "\" y1=\"" << T + ph << "\" x2=\"" << sx(fx) << "\" y2=\"" << T + ph + 5
      << "\" stroke=\"black\"/>";
    s << "<text x=\"" << sx(fx) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">" << fixed(fx, digits)
      << "</text>\n";
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << L << "\" y2=\"" << sy(fy)
      << "\" stroke=\"black\"/>";
    s << "<text x=\"" << L - 8 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << fixed(fy, 2) << "</text>\n";
  }
  s << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
    << "</text>\n";
  s << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << T + ph / 2
    << ")\">" << xml_escape(y_label) << "</text>\n";
  if (diagonal) {
    s << "<line x1=\"" << sx(x_range.first) << "\" y1=\"" << sy(y_range.first) << "\" x2=\"" << sx(x_range.second)
      << "\" y2=\"" << sy(y_range.second) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % std::size(palette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[k].points) s << fixed(sx(x), 2) << ',' << fixed(sy(y), 2) << ' ';
    s << "\"/>\n";
    const double ly = T + 16 + 16.0 * static_cast<double>(k);
    s << "<line x1=\"" << L + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << L + pw - 130 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    s << "<text x=\"" << L + pw - 125 << "\" y=\"" << ly + 4 << "\">" << xml_escape(series[k].name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string roc_svg(const std::vector<std::pair<std::string, RocCurve>>& curves) {
  std::vector<Series> series;
  for (const auto& [name, curve] : curves) {
    Series s{name + " (AUC " + fixed(curve.auc, 3) + ")", {}};
    for (const auto& p : curve.points) s.points.emplace_back(p.fpr, p.tpr);
    series.push_back(std::move(s));
  }
  return line_chart_svg("ROC", "false positive rate", "true positive rate", series, {0.0, 1.0}, {0.0, 1.0}, true);
}

std::string sweep_svg(const std::vector<SweepRow>& rows) {
  Series train{"train", {}}, test{"test", {}};
  double lo = 1.0;
  for (const auto& r : rows) {
    train.points.emplace_back(static_cast<double>(r.count), r.train_accuracy);
    test.points.emplace_back(static_cast<double>(r.count), r.test_accuracy);
    lo = std::min({lo, r.train_accuracy, r.test_accuracy});
  }
  const double x_max = rows.empty() ? 1.0 : static_cast<double>(rows.back().count);
  const double y_min = std::max(0.0, std::floor(lo * 20.0) / 20.0 - 0.05);
  return line_chart_svg("Accuracy by ensemble size", "estimators", "accuracy", {train, test}, {0.0, x_max},
                        {y_min, 1.0});
}

}  // namespace notecoder
