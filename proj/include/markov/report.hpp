#pragma once

// Serializable analysis report (float values) and its JSON / CSV / text
// encodings. State numbers in reports are 1-based.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "markov/analysis.hpp"

namespace markov {

inline constexpr int kReportFormatVersion = 1;

struct ReportMatrix {
  std::vector<std::size_t> rows;  // state numbers (or class numbers)
  std::vector<std::size_t> cols;
  std::vector<std::vector<double>> values;
  friend bool operator==(const ReportMatrix&, const ReportMatrix&) = default;
};

struct ReportClass {
  std::vector<std::size_t> states;
  std::size_t period = 1;
  bool absorbing = false;
  friend bool operator==(const ReportClass&, const ReportClass&) = default;
};

struct ReportStationary {
  std::size_t recurrent_class = 0;  // 1-based index into recurrent_classes
  std::size_t period = 1;
  /// Long-run landing frequencies only exist for aperiodic classes.
  bool periodic = false;
  std::vector<double> pi;  // one entry per state
  friend bool operator==(const ReportStationary&, const ReportStationary&) = default;
};

struct AnalysisReport {
  int format_version = kReportFormatVersion;
  std::string board;
  std::map<std::string, std::string> metadata;
  std::string backend;
  std::size_t states = 0;
  std::vector<std::string> labels;
  std::vector<std::size_t> transient_states;
  std::vector<ReportClass> recurrent_classes;
  bool doubly_stochastic = false;
  std::optional<ReportMatrix> fundamental;
  std::optional<ReportMatrix> absorption;
  std::optional<ReportMatrix> absorption_by_class;
  std::vector<double> absorption_times;  // aligned with fundamental->rows
  std::vector<ReportStationary> stationary;
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

template <class T>
AnalysisReport make_report(const ChainAnalysis<T>& analysis, const std::string& board,
                           std::map<std::string, std::string> metadata = {});

extern template AnalysisReport make_report(const ChainAnalysis<double>&, const std::string&,
                                           std::map<std::string, std::string>);
extern template AnalysisReport make_report(const ChainAnalysis<Rational>&, const std::string&,
                                           std::map<std::string, std::string>);

std::string report_to_json(const AnalysisReport& report);
/// Throws markov::Error(InvalidArgument) on malformed or foreign JSON.
AnalysisReport report_from_json(std::string_view json);

/// Long format: section,row,column,value with a header row. Values use
/// 17 significant digits so they round-trip exactly.
std::string report_to_csv(const AnalysisReport& report);

/// Human-readable report; matrices print at 6 significant digits.
std::string report_to_text(const AnalysisReport& report);

/// Rounds half away from zero to `digits` significant digits and prints the
/// shortest form, with a trailing '.' for whole numbers ("1.", "0.5",
/// "0.664063").
std::string format_significant(double value, int digits = 6);

}  // namespace markov
