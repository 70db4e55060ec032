#include "markov/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace markov {
namespace {

using nlohmann::json;

template <class T>
ReportMatrix to_report_matrix(const Matrix<T>& m, std::vector<std::size_t> rows,
                              std::vector<std::size_t> cols) {
  ReportMatrix out{std::move(rows), std::move(cols), {}};
  out.values.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<double> row;
    row.reserve(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_double(m(i, j)));
    out.values.push_back(std::move(row));
  }
  return out;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& states) {
  std::vector<std::size_t> out;
  out.reserve(states.size());
  for (std::size_t s : states) out.push_back(s + 1);
  return out;
}

json matrix_json(const ReportMatrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"values", m.values}};
}

ReportMatrix matrix_from(const json& j) {
  ReportMatrix m;
  j.at("rows").get_to(m.rows);
  j.at("cols").get_to(m.cols);
  j.at("values").get_to(m.values);
  if (m.values.size() != m.rows.size()) {
    throw Error(ErrorCode::InvalidArgument, "report matrix has inconsistent row count");
  }
  for (const auto& row : m.values) {
    if (row.size() != m.cols.size()) {
      throw Error(ErrorCode::InvalidArgument, "report matrix has inconsistent column count");
    }
  }
  return m;
}

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_states(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

void print_matrix(std::ostringstream& os, const std::vector<std::vector<double>>& values) {
  std::vector<std::vector<std::string>> cells;
  std::size_t width = 0;
  for (const auto& row : values) {
    std::vector<std::string> r;
    for (double v : row) {
      r.push_back(format_significant(v));
      width = std::max(width, r.back().size());
    }
    cells.push_back(std::move(r));
  }
  for (const auto& r : cells) {
    std::string line;
    for (std::size_t j = 0; j < r.size(); ++j) {
      line += r[j];
      if (j + 1 < r.size()) line += std::string(width - r[j].size() + 2, ' ');
    }
    os << line << '\n';
  }
}

}  // namespace

std::string format_significant(double value, int digits) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == 0.0) return "0.";
  digits = std::clamp(digits, 1, 15);
  // 15 significant digits first, so values one ulp below a printed tie
  // (e.g. 0.66406249999999994) still round the way the exact value would.
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.14e", std::fabs(value));
  std::string mantissa;
  const char* p = buf;
  for (; *p && *p != 'e'; ++p)
    if (*p != '.') mantissa += *p;
  int exponent = std::atoi(p + 1);

  std::string kept = mantissa.substr(0, static_cast<std::size_t>(digits));
  if (mantissa[static_cast<std::size_t>(digits)] >= '5') {
    int k = digits - 1;
    while (k >= 0 && kept[static_cast<std::size_t>(k)] == '9') kept[static_cast<std::size_t>(k--)] = '0';
    if (k < 0) {
      kept.insert(kept.begin(), '1');
      kept.pop_back();
      ++exponent;
    } else {
      ++kept[static_cast<std::size_t>(k)];
    }
  }
  while (kept.size() > 1 && kept.back() == '0') kept.pop_back();

  std::string out = value < 0 ? "-" : "";
  if (exponent < -5 || exponent >= digits) {
    out += kept.substr(0, 1) + "." + kept.substr(1) + "e" + std::to_string(exponent);
    return out;
  }
  if (exponent >= 0) {
    const auto int_len = static_cast<std::size_t>(exponent) + 1;
    if (kept.size() <= int_len) {
      out += kept + std::string(int_len - kept.size(), '0') + ".";
    } else {
      out += kept.substr(0, int_len) + "." + kept.substr(int_len);
    }
  } else {
    out += "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + kept;
  }
  return out;
}

template <class T>
AnalysisReport make_report(const ChainAnalysis<T>& a, const std::string& board,
                           std::map<std::string, std::string> metadata) {
  AnalysisReport r;
  r.board = board;
  r.metadata = std::move(metadata);
  r.backend = ScalarTraits<T>::name;
  r.states = a.p.size();
  r.labels.reserve(a.p.size());
  for (std::size_t i = 0; i < a.p.size(); ++i) r.labels.push_back(a.p.label(i));
  r.transient_states = one_based(a.classification.transient_states());
  for (const RecurrentClass& rc : a.classification.recurrent_classes)
    r.recurrent_classes.push_back({one_based(rc.states), rc.period, rc.absorbing});
  r.doubly_stochastic = a.doubly_stochastic;

  if (a.fundamental) {
    const auto transient = one_based(a.fundamental->states);
    r.fundamental = to_report_matrix(a.fundamental->e, transient, transient);
    r.absorption = to_report_matrix(a.absorption->f, transient, one_based(a.absorption->recurrent_states));
    std::vector<std::size_t> classes(a.classification.recurrent_classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) classes[k] = k + 1;
    r.absorption_by_class = to_report_matrix(a.absorption->by_class, transient, classes);
    for (const T& v : a.absorption_times) r.absorption_times.push_back(to_double(v));
  }
  for (const StationaryVector<T>& sv : a.stationary) {
    ReportStationary rs;
    rs.recurrent_class = *a.classification.find_recurrent_class(sv.restricted_to) + 1;
    rs.period = sv.period;
    rs.periodic = sv.period > 1;
    for (const T& v : sv.pi) rs.pi.push_back(to_double(v));
    r.stationary.push_back(std::move(rs));
  }
  return r;
}

template AnalysisReport make_report(const ChainAnalysis<double>&, const std::string&,
                                    std::map<std::string, std::string>);
template AnalysisReport make_report(const ChainAnalysis<Rational>&, const std::string&,
                                    std::map<std::string, std::string>);

std::string report_to_json(const AnalysisReport& r) {
  json classes = json::array();
  for (const ReportClass& c : r.recurrent_classes) {
    classes.push_back({{"states", c.states}, {"period", c.period}, {"absorbing", c.absorbing}});
  }
  json j{
      {"format_version", r.format_version},
      {"board", r.board},
      {"metadata", r.metadata},
      {"backend", r.backend},
      {"states", r.states},
      {"labels", r.labels},
      {"classification",
       {{"transient", r.transient_states},
        {"recurrent_classes", classes},
        {"doubly_stochastic", r.doubly_stochastic}}},
  };
  if (r.fundamental) j["fundamental_matrix"] = matrix_json(*r.fundamental);
  if (r.absorption) j["absorption_probabilities"] = matrix_json(*r.absorption);
  if (r.absorption_by_class) j["absorption_by_class"] = matrix_json(*r.absorption_by_class);
  if (r.fundamental) j["expected_absorption_times"] = r.absorption_times;
  if (!r.stationary.empty()) {
    json st = json::array();
    for (const ReportStationary& s : r.stationary) {
      st.push_back({{"recurrent_class", s.recurrent_class},
                    {"period", s.period},
                    {"periodic", s.periodic},
                    {"pi", s.pi}});
    }
    j["stationary"] = std::move(st);
  }
  return j.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    AnalysisReport r;
    j.at("format_version").get_to(r.format_version);
    if (r.format_version != kReportFormatVersion) {
      throw Error(ErrorCode::InvalidArgument,
                  "unsupported report format_version " + std::to_string(r.format_version));
    }
    j.at("board").get_to(r.board);
    j.at("metadata").get_to(r.metadata);
    j.at("backend").get_to(r.backend);
    j.at("states").get_to(r.states);
    j.at("labels").get_to(r.labels);
    const json& c = j.at("classification");
    c.at("transient").get_to(r.transient_states);
    c.at("doubly_stochastic").get_to(r.doubly_stochastic);
    for (const json& rc : c.at("recurrent_classes")) {
      ReportClass k;
      rc.at("states").get_to(k.states);
      rc.at("period").get_to(k.period);
      rc.at("absorbing").get_to(k.absorbing);
      r.recurrent_classes.push_back(std::move(k));
    }
    if (j.contains("fundamental_matrix")) r.fundamental = matrix_from(j["fundamental_matrix"]);
    if (j.contains("absorption_probabilities")) r.absorption = matrix_from(j["absorption_probabilities"]);
    if (j.contains("absorption_by_class")) r.absorption_by_class = matrix_from(j["absorption_by_class"]);
    if (j.contains("expected_absorption_times")) j["expected_absorption_times"].get_to(r.absorption_times);
    if (j.contains("stationary")) {
      for (const json& s : j["stationary"]) {
        ReportStationary rs;
        s.at("recurrent_class").get_to(rs.recurrent_class);
        s.at("period").get_to(rs.period);
        s.at("periodic").get_to(rs.periodic);
        s.at("pi").get_to(rs.pi);
        r.stationary.push_back(std::move(rs));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed report JSON: ") + e.what());
  }
}

std::string report_to_csv(const AnalysisReport& r) {
  std::ostringstream os;
  os << "section,row,column,value\r\n";
  auto emit_matrix = [&](const char* section, const std::optional<ReportMatrix>& m) {
    if (!m) return;
    for (std::size_t i = 0; i < m->rows.size(); ++i)
      for (std::size_t j = 0; j < m->cols.size(); ++j)
        os << section << ',' << m->rows[i] << ',' << m->cols[j] << ','
           << full_precision(m->values[i][j]) << "\r\n";
  };
  emit_matrix("fundamental", r.fundamental);
  emit_matrix("absorption", r.absorption);
  emit_matrix("absorption_by_class", r.absorption_by_class);
  if (r.fundamental) {
    for (std::size_t i = 0; i < r.absorption_times.size(); ++i)
      os << "absorption_time," << r.fundamental->rows[i] << ",," << full_precision(r.absorption_times[i])
         << "\r\n";
  }
  for (const ReportStationary& s : r.stationary)
    for (std::size_t j = 0; j < s.pi.size(); ++j)
      os << "stationary," << s.recurrent_class << ',' << j + 1 << ',' << full_precision(s.pi[j])
         << "\r\n";
  return os.str();
}

std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "board: " << r.board << '\n';
  os << "states: " << r.states << "  backend: " << r.backend << "  format: " << r.format_version
     << '\n';
  os << "transient states: " << (r.transient_states.empty() ? "none" : join_states(r.transient_states))
     << '\n';
  for (std::size_t k = 0; k < r.recurrent_classes.size(); ++k) {
    const ReportClass& c = r.recurrent_classes[k];
    os << "recurrent class " << k + 1 << ": {" << join_states(c.states) << "} period " << c.period
       << (c.absorbing ? " absorbing" : "") << '\n';
  }
  os << "doubly stochastic: " << (r.doubly_stochastic ? "yes" : "no") << '\n';

  if (r.fundamental) {
    os << "\nE: expected visits (rows: start state, columns: state; states "
       << join_states(r.fundamental->rows) << ")\n";
    print_matrix(os, r.fundamental->values);
    os << "\nF: absorption probabilities (columns: states " << join_states(r.absorption->cols)
       << ")\n";
    print_matrix(os, r.absorption->values);
    os << "\nexpected moves before absorption:\n";
    for (std::size_t i = 0; i < r.absorption_times.size(); ++i)
      os << r.fundamental->rows[i] << "  " << format_significant(r.absorption_times[i]) << '\n';
  }
  for (const ReportStationary& s : r.stationary) {
    os << "\nstationary probabilities, recurrent class " << s.recurrent_class << " (period "
       << s.period << ")\n";
    if (s.periodic) {
      os << "warning: class is periodic; these are time-averaged occupancies, not limiting "
            "landing probabilities\n";
    }
    for (std::size_t j = 0; j < s.pi.size(); ++j) {
      os << j + 1;
      if (j < r.labels.size() && r.labels[j] != std::to_string(j + 1)) os << " (" << r.labels[j] << ")";
      os << "  " << format_significant(s.pi[j]) << '\n';
    }
  }
  return os.str();
}

}  // namespace markov
