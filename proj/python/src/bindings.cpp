// pybind11 glue. Exact values cross the boundary as "a/b" strings; the
// Python package turns them into fractions.Fraction. Squares are 1-based.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "markov/analysis.hpp"
#include "markov/board.hpp"
#include "markov/boardspec.hpp"
#include "markov/render.hpp"
#include "markov/report.hpp"
#include "markov/simulate.hpp"

namespace py = pybind11;
using namespace markov;

namespace {

struct Board {
  std::string name;
  std::map<std::string, std::string> metadata;
  TransitionMatrix<Rational> p;

  std::size_t size() const { return p.size(); }
};

// Raised from the translator below with the diagnostics attached.
struct ParseFailure {
  std::vector<ParseDiagnostic> diagnostics;
};

Rational rational(const std::string& s) {
  try {
    Rational q(s);
    if (q.get_den() == 0) throw std::invalid_argument(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidArgument, "not a rational number: '" + s + "'");
  }
}

MoveDistribution moves_from(const std::map<int, std::string>& moves) {
  std::map<int, Rational> m;
  for (const auto& [d, p] : moves) m[d] = rational(p);
  return MoveDistribution(std::move(m));
}

std::map<int, std::string> moves_to(const MoveDistribution& m) {
  std::map<int, std::string> out;
  for (const auto& [d, p] : m.entries()) out[d] = p.get_str();
  return out;
}

OvershootPolicy overshoot_from(const std::string& s) {
  if (s == "collapse") return OvershootPolicy::CollapseToEnd;
  if (s == "stay") return OvershootPolicy::StayInPlace;
  throw Error(ErrorCode::InvalidArgument, "overshoot must be 'collapse' or 'stay', got '" + s + "'");
}

PlotLayout layout_from(const std::string& s) {
  if (s == "strip") return PlotLayout::Strip;
  if (s == "ring") return PlotLayout::Ring;
  if (s == "monopoly") return PlotLayout::Monopoly;
  throw Error(ErrorCode::InvalidArgument, "layout must be strip, ring or monopoly, got '" + s + "'");
}

std::size_t state_of(const Board& b, int square) {
  if (square < 1 || static_cast<std::size_t>(square) > b.size())
    throw Error(ErrorCode::InvalidArgument,
                "square " + std::to_string(square) + " outside 1.." + std::to_string(b.size()));
  return static_cast<std::size_t>(square - 1);
}

Board parse(const std::string& text, const std::string& source) {
  auto r = parse_board(text);
  if (!r.ok()) throw ParseFailure{std::move(r.diagnostics)};
  const BoardSpec& spec = *r.spec;
  return {spec.name,
          {{"source", source},
           {"topology", spec.topology == Topology::Linear ? "linear" : "loop"},
           {"squares", std::to_string(spec.squares)}},
          compile_board(spec)};
}

AnalysisReport report(const Board& b, bool exact) {
  return exact ? make_report(analyze(b.p), b.name, b.metadata)
               : make_report(analyze(to_double(b.p)), b.name, b.metadata);
}

py::dict simulation_dict(const SimulationResult& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["trials"] = r.trials;
  d["steps"] = r.steps;
  d["visit_counts"] = r.visit_counts;
  d["frequencies"] = r.frequencies;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov-chain analysis of board games (compiled core)";

  // Leaked on purpose: the translator may run until interpreter shutdown.
  static const py::handle markov_error =
      py::exception<Error>(m, "MarkovError", PyExc_ValueError).release();
  static const py::handle parse_error =
      py::exception<ParseFailure>(m, "ParseError", markov_error.ptr()).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseFailure& f) {
      py::list diags;
      std::string text;
      for (const auto& d : f.diagnostics) {
        diags.append(py::make_tuple(d.line, d.column,
                                    d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning",
                                    d.message));
        if (!text.empty()) text += "\n";
        text += d.to_string();
      }
      py::object e = parse_error(text);
      e.attr("code") = "ParseError";
      e.attr("diagnostics") = diags;
      PyErr_SetObject(parse_error.ptr(), e.ptr());
    } catch (const CompileError& err) {
      py::object e = markov_error(err.what());
      e.attr("code") = std::string(to_string(err.code()));
      e.attr("line") = err.line();
      PyErr_SetObject(markov_error.ptr(), e.ptr());
    } catch (const Error& err) {
      py::object e = markov_error(err.what());
      e.attr("code") = std::string(to_string(err.code()));
      PyErr_SetObject(markov_error.ptr(), e.ptr());
    }
  });

  py::class_<Board>(m, "Board")
      .def_readonly("name", &Board::name)
      .def_readonly("metadata", &Board::metadata)
      .def_property_readonly("size", &Board::size)
      .def_property_readonly("labels", [](const Board& b) { return b.p.labels(); })
      .def("matrix", [](const Board& b) { return to_double(b.p).matrix().to_rows(); })
      .def("matrix_exact",
           [](const Board& b) {
             std::vector<std::vector<std::string>> rows(b.size(), std::vector<std::string>(b.size()));
             for (std::size_t i = 0; i < b.size(); ++i)
               for (std::size_t j = 0; j < b.size(); ++j) rows[i][j] = b.p.matrix()(i, j).get_str();
             return rows;
           })
      .def("is_doubly_stochastic", [](const Board& b) { return is_doubly_stochastic(b.p); })
      .def("__eq__", [](const Board& a, const Board& b) { return a.p == b.p; })
      .def("__len__", &Board::size)
      .def("__repr__", [](const Board& b) {
        return "<Board " + b.name + " with " + std::to_string(b.size()) + " squares>";
      });

  m.def("parse_board", &parse, py::arg("text"), py::arg("source") = "<string>");
  m.def("format_board", [](const std::string& text) {
    auto r = parse_board(text);
    if (!r.ok()) throw ParseFailure{std::move(r.diagnostics)};
    return render_board(*r.spec);
  });

  m.def("dice", [](int count, int sides) { return moves_to(MoveDistribution::dice(count, sides)); },
        py::arg("count") = 2, py::arg("sides") = 6);
  m.def(
      "linear_board",
      [](int squares, const std::map<int, std::string>& moves, const std::string& overshoot) {
        return Board{"linear", {}, linear_board(squares, moves_from(moves), overshoot_from(overshoot))};
      },
      py::arg("squares"), py::arg("moves"), py::arg("overshoot") = "collapse");
  m.def(
      "gamblers_ruin_board",
      [](int squares, const std::string& p_win) {
        return Board{"ruin", {}, gamblers_ruin_board(squares, rational(p_win))};
      },
      py::arg("squares"), py::arg("p_win"));
  m.def(
      "loop_board",
      [](int squares, const std::map<int, std::string>& moves) {
        return Board{"loop", {}, loop_board(squares, moves_from(moves))};
      },
      py::arg("squares"), py::arg("moves"));
  m.def(
      "monopoly_board",
      [](bool go_to_jail, bool chance, bool community_chest, bool single_railroad) {
        MonopolyConfig cfg;
        cfg.go_to_jail_enabled = go_to_jail;
        cfg.chance_enabled = chance;
        cfg.community_chest_enabled = community_chest;
        if (single_railroad) cfg.chance = single_railroad_chance_deck();
        return Board{"monopoly", {}, monopoly_board(cfg)};
      },
      py::arg("go_to_jail") = true, py::arg("chance") = true, py::arg("community_chest") = true,
      py::arg("single_railroad") = false);

  m.def("analyze_json", [](const Board& b, bool exact) { return report_to_json(report(b, exact)); },
        py::arg("board"), py::arg("exact") = true);
  m.def("analyze_csv", [](const Board& b, bool exact) { return report_to_csv(report(b, exact)); },
        py::arg("board"), py::arg("exact") = true);
  m.def("analyze_text", [](const Board& b, bool exact) { return report_to_text(report(b, exact)); },
        py::arg("board"), py::arg("exact") = true);

  m.def(
      "simulate_absorbing",
      [](const Board& b, int start, std::uint64_t trials, std::uint64_t seed) {
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate_absorbing(b.p, state_of(b, start), trials, seed);
        }
        py::dict d = simulation_dict(r);
        d["mean_absorption_time"] = r.mean_absorption_time();
        d["stddev_absorption_time"] = r.stddev_absorption_time();
        std::map<int, double> rates;
        for (std::uint32_t s : r.absorption_state) rates[static_cast<int>(s) + 1] = 0.0;
        for (auto& [square, rate] : rates) rate = r.absorption_rate(static_cast<std::size_t>(square - 1));
        d["absorption_rates"] = rates;
        return d;
      },
      py::arg("board"), py::arg("start"), py::arg("trials"), py::arg("seed"));
  m.def(
      "simulate_ergodic",
      [](const Board& b, int start, std::uint64_t steps, std::uint64_t trials, std::uint64_t seed) {
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate_ergodic(b.p, state_of(b, start), steps, trials, seed);
        }
        return simulation_dict(r);
      },
      py::arg("board"), py::arg("start"), py::arg("steps"), py::arg("trials"), py::arg("seed"));

  m.def(
      "heatmap_svg",
      [](const std::vector<double>& values, const std::vector<std::string>& labels,
         const std::string& layout, const std::string& title, int cell) {
        return render_svg(make_heatmap(values, labels, layout_from(layout), title), cell);
      },
      py::arg("values"), py::arg("labels"), py::arg("layout"), py::arg("title") = "",
      py::arg("cell") = 64);
  m.def(
      "heatmap_ppm",
      [](const std::vector<double>& values, const std::string& layout, int cell) {
        return py::bytes(render_ppm(make_heatmap(values, {}, layout_from(layout)), cell));
      },
      py::arg("values"), py::arg("layout"), py::arg("cell") = 32);
}
