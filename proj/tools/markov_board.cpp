// markov-board: analyze, simulate and plot board descriptions.
//
// Exit codes: 0 success, 1 diagnostics (bad spec, bad flags, analysis
// errors), 2 I/O failure. Output files are written only on success.

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "markov/analysis.hpp"
#include "markov/boardspec.hpp"
#include "markov/render.hpp"
#include "markov/report.hpp"
#include "markov/simulate.hpp"

namespace {

using namespace markov;
using nlohmann::json;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Diagnostics were already printed; just exit 1.
struct Reported {};

struct Board {
  std::string path;
  BoardSpec spec;
  TransitionMatrix<Rational> p;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path + ": " + std::strerror(errno));
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoFailure("cannot read " + path);
  return os.str();
}

void write_output(const std::string& content, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot write " + out + ": " + std::strerror(errno));
  f << content;
  f.close();
  if (!f) {
    std::error_code ec;
    std::filesystem::remove(out, ec);
    throw IoFailure("cannot write " + out);
  }
}

Board load_board(const std::string& path) {
  Board b{path, {}, validate_stochastic(Matrix<Rational>::identity(1))};
  const ParseResult parsed = parse_board(read_file(path));
  for (const ParseDiagnostic& d : parsed.diagnostics) std::cerr << path << ':' << d.to_string() << '\n';
  if (!parsed.ok()) throw Reported{};
  b.spec = *parsed.spec;
  try {
    b.p = compile_board(b.spec);
  } catch (const CompileError& e) {
    std::cerr << path << ": error: " << e.what() << '\n';
    throw Reported{};
  }
  return b;
}

enum class Backend { Exact, Float };

Backend pick_backend(bool exact, bool flt) {
  if (exact) return Backend::Exact;
  if (flt) return Backend::Float;
  const char* env = std::getenv("MARKOV_BOARD_BACKEND");
  if (env == nullptr || *env == '\0') return Backend::Exact;
  const std::string v = env;
  if (v == "exact") return Backend::Exact;
  if (v == "float") return Backend::Float;
  throw Error(ErrorCode::InvalidArgument,
              "MARKOV_BOARD_BACKEND must be 'exact' or 'float', got '" + v + "'");
}

std::string infer_format(const std::string& format, const std::string& out) {
  if (!format.empty()) return format;
  const auto ext = std::filesystem::path(out).extension().string();
  if (ext == ".json") return "json";
  if (ext == ".csv") return "csv";
  return "text";
}

std::size_t state_index(int square, const Board& b, const char* what) {
  if (square < 1 || static_cast<std::size_t>(square) > b.p.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " " + std::to_string(square) +
                                                " outside 1.." + std::to_string(b.p.size()));
  }
  return static_cast<std::size_t>(square - 1);
}

std::map<std::string, std::string> metadata(const Board& b) {
  return {{"source", b.path},
          {"topology", b.spec.topology == Topology::Linear ? "linear" : "loop"},
          {"squares", std::to_string(b.spec.squares)}};
}

template <class T>
TransitionMatrix<T> in_backend(const TransitionMatrix<Rational>& p) {
  if constexpr (std::is_same_v<T, Rational>) {
    return p;
  } else {
    return to_double(p);
  }
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string board;
  bool exact = false;
  bool flt = false;
  std::string format;
  std::string out;
};

void cmd_analyze(const AnalyzeOptions& o) {
  const Board b = load_board(o.board);
  const AnalysisReport r = pick_backend(o.exact, o.flt) == Backend::Exact
                               ? make_report(analyze(b.p), b.spec.name, metadata(b))
                               : make_report(analyze(to_double(b.p)), b.spec.name, metadata(b));
  const std::string format = infer_format(o.format, o.out);
  write_output(format == "json"  ? report_to_json(r)
               : format == "csv" ? report_to_csv(r)
                                 : report_to_text(r),
               o.out);
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string board;
  bool exact = false;
  bool flt = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> steps;
  int start = 1;
  std::string format;
  std::string out;
};

template <class T>
json simulate_with(const Board& b, const SimulateOptions& o) {
  const ChainAnalysis<T> a = analyze(in_backend<T>(b.p));
  const std::size_t start = state_index(o.start, b, "start square");
  const TransitionMatrix<double> pd = to_double(b.p);
  json j{{"board", b.spec.name}, {"seed", *o.seed}, {"start", o.start},
         {"backend", ScalarTraits<T>::name}};
  json rows = json::array();

  if (a.classification.kind[start] == StateKind::Transient) {
    if (o.steps) std::cerr << "warning: --steps is ignored when the start square is transient\n";
    const std::uint64_t trials = o.trials.value_or(100000);
    const SimulationResult s = simulate_absorbing(pd, start, trials, *o.seed);
    const auto visits = a.expected_visits_from(start);
    const auto ts = a.canonical.transient_states();
    const std::size_t row = static_cast<std::size_t>(
        std::find(ts.begin(), ts.end(), start) - ts.begin());
    j["mode"] = "absorbing";
    j["trials"] = trials;
    for (std::size_t k : ts) {
      rows.push_back({{"state", k + 1},
                      {"label", b.p.label(k)},
                      {"empirical", trials ? double(s.visit_counts[k]) / double(trials) : 0.0},
                      {"analytic", ScalarTraits<T>::to_double(visits[k])}});
    }
    json absorption = json::array();
    const auto rs = a.canonical.recurrent_states();
    for (std::size_t c = 0; c < rs.size(); ++c) {
      absorption.push_back({{"state", rs[c] + 1},
                            {"label", b.p.label(rs[c])},
                            {"empirical", trials ? s.absorption_rate(rs[c]) : 0.0},
                            {"analytic", ScalarTraits<T>::to_double(a.absorption->f(row, c))}});
    }
    j["absorption"] = std::move(absorption);
    j["mean_absorption_time"] = {
        {"empirical", s.mean_absorption_time()},
        {"standard_error", trials > 1 ? s.stddev_absorption_time() / std::sqrt(double(trials)) : 0.0},
        {"analytic", ScalarTraits<T>::to_double(a.absorption_times[row])}};
  } else {
    const std::uint64_t steps = o.steps.value_or(1000000);
    const std::uint64_t trials = o.trials.value_or(1);
    const SimulationResult s = simulate_ergodic(pd, start, steps, trials, *o.seed);
    const std::size_t c = *a.classification.recurrent_class_of(start);
    const auto& members = a.classification.recurrent_classes[c].states;
    std::vector<double> pi(b.p.size(), 0.0);
    for (const auto& sv : a.stationary)
      if (sv.restricted_to == members)
        for (std::size_t k = 0; k < pi.size(); ++k) pi[k] = ScalarTraits<T>::to_double(sv.pi[k]);
    if (members.size() == 1) pi[members[0]] = 1.0;
    j["mode"] = "ergodic";
    j["trials"] = trials;
    j["steps"] = steps;
    for (std::size_t k = 0; k < pi.size(); ++k) {
      rows.push_back({{"state", k + 1},
                      {"label", b.p.label(k)},
                      {"empirical", s.frequencies[k]},
                      {"analytic", pi[k]}});
    }
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string simulation_csv(const json& j) {
  std::ostringstream os;
  os << "section,state,empirical,analytic\r\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const std::string section = j["mode"] == "absorbing" ? "visits" : "frequency";
  for (const json& r : j["rows"])
    os << section << ',' << r["state"].get<std::size_t>() << ',' << num(r["empirical"]) << ','
       << num(r["analytic"]) << "\r\n";
  if (j.contains("absorption")) {
    for (const json& r : j["absorption"])
      os << "absorption," << r["state"].get<std::size_t>() << ',' << num(r["empirical"]) << ','
         << num(r["analytic"]) << "\r\n";
    const json& t = j["mean_absorption_time"];
    os << "absorption_time,," << num(t["empirical"]) << ',' << num(t["analytic"]) << "\r\n";
  }
  return os.str();
}

std::string simulation_text(const json& j) {
  std::ostringstream os;
  const bool absorbing = j["mode"] == "absorbing";
  os << "board: " << j["board"].get<std::string>() << "  seed: " << j["seed"].get<std::uint64_t>()
     << "  start: " << j["start"].get<int>() << "  trials: " << j["trials"].get<std::uint64_t>();
  if (!absorbing) os << "  steps: " << j["steps"].get<std::uint64_t>();
  os << "\n\n";
  auto table = [&](const json& rows, const char* heading) {
    std::size_t width = 5;
    for (const json& r : rows) width = std::max(width, r["label"].get<std::string>().size());
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-*s  %-12s %-12s\n", "state", static_cast<int>(width),
                  "label", "empirical", heading);
    os << line;
    for (const json& r : rows) {
      std::snprintf(line, sizeof line, "%-6zu %-*s  %-12s %-12s\n", r["state"].get<std::size_t>(),
                    static_cast<int>(width), r["label"].get<std::string>().c_str(),
                    format_significant(r["empirical"]).c_str(),
                    format_significant(r["analytic"]).c_str());
      os << line;
    }
  };
  if (absorbing) {
    os << "expected visits\n";
    table(j["rows"], "analytic E");
    os << "\nabsorption probabilities\n";
    table(j["absorption"], "analytic F");
    const json& t = j["mean_absorption_time"];
    os << "\nmean moves before absorption: " << format_significant(t["empirical"]) << " +/- "
       << format_significant(t["standard_error"]) << "  (analytic "
       << format_significant(t["analytic"]) << ")\n";
  } else {
    os << "landing frequencies\n";
    table(j["rows"], "analytic pi");
  }
  return os.str();
}

void cmd_simulate(const SimulateOptions& o) {
  if (!o.seed) throw Error(ErrorCode::InvalidArgument, "seed required for reproducibility");
  const Board b = load_board(o.board);
  const json j = pick_backend(o.exact, o.flt) == Backend::Exact ? simulate_with<Rational>(b, o)
                                                                : simulate_with<double>(b, o);
  const std::string format = infer_format(o.format, o.out);
  write_output(format == "json"  ? j.dump(2) + "\n"
               : format == "csv" ? simulation_csv(j)
                                 : simulation_text(j),
               o.out);
}

// ---------------------------------------------------------------- plot

struct PlotOptions {
  std::string board;
  bool exact = false;
  bool flt = false;
  std::string out;
  std::string layout;
  std::optional<int> klass;
  std::optional<int> start;
  int cell = 0;
};

template <class T>
std::pair<std::vector<double>, std::string> plot_values(const Board& b, const PlotOptions& o) {
  const ChainAnalysis<T> a = analyze(in_backend<T>(b.p));
  const auto& cls = a.classification;
  const std::size_t n = b.p.size();
  auto stationary_of = [&](std::size_t c) {
    std::vector<double> v(n, 0.0);
    const auto& members = cls.recurrent_classes[c].states;
    if (members.size() == 1) v[members[0]] = 1.0;
    for (const auto& sv : a.stationary)
      if (sv.restricted_to == members)
        for (std::size_t k = 0; k < n; ++k) v[k] = ScalarTraits<T>::to_double(sv.pi[k]);
    return v;
  };

  if (o.klass) {
    const std::size_t s = state_index(*o.klass, b, "class square");
    const auto c = cls.recurrent_class_of(s);
    if (!c) {
      throw Error(ErrorCode::NotARecurrentClass,
                  "square " + std::to_string(*o.klass) + " is transient; --class needs a recurrent square");
    }
    return {stationary_of(*c), "stationary probabilities"};
  }
  std::vector<std::size_t> open;
  for (std::size_t c = 0; c < cls.recurrent_classes.size(); ++c)
    if (!cls.recurrent_classes[c].absorbing) open.push_back(c);
  if (open.size() == 1) return {stationary_of(open[0]), "stationary probabilities"};
  if (open.empty() && a.fundamental) {
    const int start = o.start.value_or(static_cast<int>(cls.transient_states().front()) + 1);
    const std::size_t s = state_index(start, b, "start square");
    if (cls.kind[s] != StateKind::Transient) {
      throw Error(ErrorCode::StartNotTransient,
                  "start square " + std::to_string(start) + " is not transient");
    }
    const auto visits = a.expected_visits_from(s);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = ScalarTraits<T>::to_double(visits[k]);
    return {v, "expected visits from square " + std::to_string(start)};
  }
  throw Error(ErrorCode::MultipleRecurrentClasses,
              "board has " + std::to_string(cls.recurrent_classes.size()) +
                  " recurrent classes; pick one with --class SQUARE");
}

void cmd_plot(const PlotOptions& o) {
  const auto ext = std::filesystem::path(o.out).extension().string();
  if (ext != ".svg" && ext != ".ppm") {
    throw Error(ErrorCode::InvalidArgument, "--out must end in .svg or .ppm, got '" + o.out + "'");
  }
  const Board b = load_board(o.board);
  auto [values, what] = pick_backend(o.exact, o.flt) == Backend::Exact
                            ? plot_values<Rational>(b, o)
                            : plot_values<double>(b, o);
  PlotLayout layout;
  if (o.layout == "strip") {
    layout = PlotLayout::Strip;
  } else if (o.layout == "ring") {
    layout = PlotLayout::Ring;
  } else if (o.layout == "monopoly") {
    layout = PlotLayout::Monopoly;
  } else {
    layout = b.spec.topology == Topology::Linear ? PlotLayout::Strip
             : b.p.size() == 40                  ? PlotLayout::Monopoly
                                                 : PlotLayout::Ring;
  }
  const Heatmap map = make_heatmap(values, b.spec.label_vector(), layout, b.spec.name + ": " + what);
  if (ext == ".svg") {
    write_output(render_svg(map, o.cell > 0 ? o.cell : 64), o.out);
  } else {
    write_output(render_ppm(map, o.cell > 0 ? o.cell : 32), o.out);
  }
}

void add_backend_flags(CLI::App* cmd, bool& exact, bool& flt) {
  auto* e = cmd->add_flag("--exact", exact, "Exact rational arithmetic (default)");
  auto* f = cmd->add_flag("--float", flt, "Double-precision arithmetic");
  e->excludes(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-chain analysis of board games"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "markov-board 0.1.0");

  AnalyzeOptions ao;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fundamental matrix, absorption and stationary probabilities");
  analyze_cmd->add_option("board", ao.board, "Board description file")->required();
  add_backend_flags(analyze_cmd, ao.exact, ao.flt);
  analyze_cmd->add_option("--format", ao.format, "json, csv or text (default: from --out, else text)")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  analyze_cmd->add_option("--out", ao.out, "Output file (default: standard output)");

  SimulateOptions so;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run compared with the analytic values");
  simulate_cmd->add_option("board", so.board, "Board description file")->required();
  add_backend_flags(simulate_cmd, so.exact, so.flt);
  simulate_cmd->add_option("--seed", so.seed, "64-bit seed (required)");
  simulate_cmd->add_option("--trials", so.trials, "Independent runs (default 100000 absorbing, 1 ergodic)");
  simulate_cmd->add_option("--steps", so.steps, "Moves per run for ergodic boards (default 1000000)");
  simulate_cmd->add_option("--start", so.start, "Starting square (default 1)");
  simulate_cmd->add_option("--format", so.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  simulate_cmd->add_option("--out", so.out, "Output file (default: standard output)");

  PlotOptions po;
  auto* plot_cmd = app.add_subcommand("plot", "Grayscale heatmap of the board");
  plot_cmd->add_option("board", po.board, "Board description file")->required();
  add_backend_flags(plot_cmd, po.exact, po.flt);
  plot_cmd->add_option("--out", po.out, "Image file ending in .svg or .ppm")->required();
  plot_cmd->add_option("--layout", po.layout, "strip, ring or monopoly")
      ->check(CLI::IsMember({"strip", "ring", "monopoly"}));
  plot_cmd->add_option("--class", po.klass, "Plot the recurrent class containing this square");
  plot_cmd->add_option("--start", po.start, "Start square for expected-visit plots (default: first transient square)");
  plot_cmd->add_option("--cell", po.cell, "Cell size in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze_cmd) cmd_analyze(ao);
    if (*simulate_cmd) cmd_simulate(so);
    if (*plot_cmd) cmd_plot(po);
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Reported&) {
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
