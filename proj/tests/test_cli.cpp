#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "markov/report.hpp"
#include "test_support.hpp"

using namespace markov;
using namespace markov::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI through the shell; stderr is folded into `out`.
Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" MARKOV_CLI_PATH "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string board(const char* name) { return "\"" + board_path(name) + "\""; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("markov_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_SUITE("cli analyze") {
  TEST_CASE("text output prints the reference E row") {
    const auto r = cli("analyze " + board("linear10.board") + " --format text");
    CHECK(r.code == 0);
    CHECK(r.out.find("1.        0.5       0.75      0.625     0.6875    0.65625   0.671875  "
                     "0.664063  0.667969\n") != std::string::npos);
  }

  TEST_CASE("ruin F block at printed precision") {
    const auto r = cli("analyze " + board("ruin11.board"));
    CHECK(r.code == 0);
    CHECK(r.out.find("0.940518   0.0594822") != std::string::npos);
  }

  TEST_CASE("missing file exits 2 naming the path") {
    const auto r = cli("analyze missing.board");
    CHECK(r.code == 2);
    CHECK(r.out.find("missing.board") != std::string::npos);
  }

  TEST_CASE("diagnostics exit 1 and write no output file") {
    TempDir dir;
    const std::string spec = dir.file("bad.board");
    {
      std::ofstream f(spec);
      f << "board bad\ntopology loop\nsquares 4\nmove 1:1/2 2:1/3\n";
    }
    const std::string out = dir.file("report.json");
    const auto r = cli("analyze \"" + spec + "\" --out \"" + out + "\"");
    CHECK(r.code == 1);
    CHECK(r.out.find(":4:") != std::string::npos);
    CHECK(r.out.find("move probabilities sum to 5/6, expected 1") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
  }

  TEST_CASE("unwritable output exits 2") {
    CHECK(cli("analyze " + board("loop12.board") + " --out /nonexistent/dir/x.json").code == 2);
  }

  TEST_CASE("json and csv files agree with the library report") {
    TempDir dir;
    const std::string json_path = dir.file("r.json");
    const std::string csv_path = dir.file("r.csv");
    REQUIRE(cli("analyze " + board("ruin11.board") + " --float --out \"" + json_path + "\"").code == 0);
    REQUIRE(cli("analyze " + board("ruin11.board") + " --float --out \"" + csv_path + "\"").code == 0);
    const auto report = report_from_json(read_file(json_path));
    CHECK(report.backend == "float");
    CHECK(report.metadata.at("topology") == "linear");
    CHECK(read_file(csv_path) == report_to_csv(report));
  }

  TEST_CASE("backend selection from the environment") {
    const auto r = cli("analyze " + board("loop12.board") + " --format json",
                       "MARKOV_BOARD_BACKEND=float");
    CHECK(nlohmann::json::parse(r.out)["backend"] == "float");
    const auto flag = cli("analyze " + board("loop12.board") + " --format json --exact",
                          "MARKOV_BOARD_BACKEND=float");
    CHECK(nlohmann::json::parse(flag.out)["backend"] == "exact");
    CHECK(cli("analyze " + board("loop12.board"), "MARKOV_BOARD_BACKEND=fast").code == 1);
    CHECK(cli("analyze " + board("loop12.board") + " --exact --float").code == 1);
  }

  TEST_CASE("usage errors exit 1") {
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("analyze " + board("loop12.board") + " --format xml").code == 1);
    CHECK(cli("--help").code == 0);
  }
}

TEST_SUITE("cli simulate") {
  TEST_CASE("seed is required") {
    const auto r = cli("simulate " + board("linear10.board"));
    CHECK(r.code == 1);
    CHECK(r.out.find("seed required for reproducibility") != std::string::npos);
  }

  TEST_CASE("absorbing board reports mean absorption time") {
    const auto r = cli("simulate " + board("linear10.board") + " --trials 100000 --seed 7 --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["mode"] == "absorbing");
    const auto& t = j["mean_absorption_time"];
    CHECK(t["analytic"].get<double>() == doctest::Approx(6.22265625));
    CHECK(std::fabs(t["empirical"].get<double>() - 6.222656) <=
          3 * t["standard_error"].get<double>());
    CHECK(cli("simulate " + board("linear10.board") + " --trials 1000 --seed 7").out.find(
              "mean moves before absorption") != std::string::npos);
  }

  TEST_CASE("ergodic output is bit-identical across runs") {
    TempDir dir;
    const std::string a = dir.file("a.csv"), b = dir.file("b.csv");
    const std::string args = "simulate " + board("monopoly.board") + " --steps 200000 --seed 42 --out ";
    REQUIRE(cli(args + "\"" + a + "\"").code == 0);
    REQUIRE(cli(args + "\"" + b + "\"").code == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a).rfind("section,state,empirical,analytic\r\n", 0) == 0);
  }

  TEST_CASE("start square out of range") {
    CHECK(cli("simulate " + board("loop12.board") + " --seed 1 --start 13").code == 1);
  }
}

TEST_SUITE("cli plot") {
  TEST_CASE("monopoly layout: Jail darkest, Go To Jail white") {
    TempDir dir;
    const std::string out = dir.file("m.svg");
    REQUIRE(cli("plot " + board("monopoly.board") + " --layout monopoly --out \"" + out + "\"").code == 0);
    const std::string svg = read_file(out);
    const auto jail = svg.find("data-square=\"11\"");
    const auto gtj = svg.find("data-square=\"31\"");
    REQUIRE(jail != std::string::npos);
    REQUIRE(gtj != std::string::npos);
    CHECK(svg.find("fill=\"rgb(0,0,0)\"", jail) < svg.find("</g>", jail));
    CHECK(svg.find("fill=\"rgb(255,255,255)\"", gtj) < svg.find("</g>", gtj));
  }

  TEST_CASE("uniform loop renders mid-gray") {
    TempDir dir;
    const std::string out = dir.file("l.svg");
    REQUIRE(cli("plot " + board("loop12.board") + " --float --out \"" + out + "\"").code == 0);
    const std::string svg = read_file(out);
    std::size_t grays = 0;
    for (auto p = svg.find("rgb(128,128,128)"); p != std::string::npos; p = svg.find("rgb(128,128,128)", p + 1))
      ++grays;
    CHECK(grays == 12);
  }

  TEST_CASE("strip layout of linear10 starts with the Start label") {
    TempDir dir;
    const std::string out = dir.file("s.svg");
    REQUIRE(cli("plot " + board("linear10.board") + " --layout strip --out \"" + out + "\"").code == 0);
    const std::string svg = read_file(out);
    const auto first = svg.find("data-square=\"1\"");
    REQUIRE(first != std::string::npos);
    CHECK(svg.find(">Start</text>", first) < svg.find("</g>", first));
    CHECK(svg.find("data-square=\"11\"") == std::string::npos);
  }

  TEST_CASE("ppm output") {
    TempDir dir;
    const std::string out = dir.file("m.ppm");
    REQUIRE(cli("plot " + board("monopoly.board") + " --out \"" + out + "\" --cell 8").code == 0);
    CHECK(read_file(out).rfind("P6\n88 88\n255\n", 0) == 0);
  }

  TEST_CASE("several recurrent classes need --class") {
    TempDir dir;
    const std::string spec = dir.file("two.board");
    {
      std::ofstream f(spec);
      f << "board two\ntopology linear\nsquares 4\nmove 1:1\novershoot stay\nredirect 2 -> 1\n";
    }
    // {1} and {4} are both absorbing, so the plot falls back to expected visits.
    const std::string out = dir.file("two.svg");
    const auto r = cli("plot \"" + spec + "\" --out \"" + out + "\"");
    CHECK(r.code == 0);
    const std::string loop_spec = dir.file("loops.board");
    {
      std::ofstream f(loop_spec);
      f << "board loops\ntopology loop\nsquares 4\nmove 2:1\n";
    }
    const auto multi = cli("plot \"" + loop_spec + "\" --out \"" + out + "\"");
    CHECK(multi.code == 1);
    CHECK(multi.out.find("--class") != std::string::npos);
    CHECK(cli("plot \"" + loop_spec + "\" --class 2 --out \"" + out + "\"").code == 0);
    CHECK(cli("plot " + board("loop12.board") + " --out \"" + dir.file("x.png") + "\"").code == 1);
  }
}
