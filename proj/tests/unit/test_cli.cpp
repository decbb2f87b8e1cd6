#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "residua/towerfile.hpp"

using namespace residua;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(RESIDUA_SOURCE_DIR) + "/data/" + name; }

std::filesystem::path scratch() {
  auto p = std::filesystem::temp_directory_path() / "residua_cli_test";
  std::filesystem::create_directories(p);
  return p;
}

std::string write(const char* name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("help output matches the golden files") {
  for (const char* sub : {"", "norm", "tower", "discriminate", "baumslag", "permrep", "torus", "certify"}) {
    std::vector<std::string> args;
    if (*sub) args.push_back(sub);
    args.push_back("--help");
    const Run r = run(args);
    CHECK(r.code == 0);
    const std::string golden =
        std::string(RESIDUA_SOURCE_DIR) + "/tests/golden/help_" + (*sub ? sub : "main") + ".txt";
    CAPTURE(golden);
    CHECK(r.out == read_text_file(golden));
  }
}

TEST_CASE("norm") {
  const Run r = run({"norm", "--basis", "a,b", "--element", data("kesten.txt"), "--doublings", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# residua-csv v1\nj,m,l2,radius,lower,upper\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 8);
  CHECK(r.err.find("radial") != std::string::npos);
}

TEST_CASE("tower") {
  CHECK(run({"tower", "--preset", "genus2", "--word", "t^3 a b a^-1 b^-1"}).out == "Axial(3, 1)\n");
  CHECK(run({"tower", "--tower", data("genus2.tw"), "--word", "t a b a^-1 b^-1 t^-1", "--equal",
             "a b a^-1 b^-1"})
            .out == "true\n");
  CHECK(run({"tower", "--preset", "genus2", "--word", "t a", "--pi", "1"}).out == "a\n");
  CHECK(run({"tower", "--preset", "genus2", "--word", "t", "--tau", "1", "--m", "2"}).out ==
        "t a b a^-1 b^-1 a b a^-1 b^-1\n");
  const Run d = run({"tower", "--preset", "genus2", "--radius", "3"});
  CHECK(d.out.find("# distortion_bound(3): 16464") != std::string::npos);
}

TEST_CASE("torus") {
  const Run r = run({"torus", "--klein", "--grid", "128", "--element", data("klein.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("2.5\n# residua-csv v1\nq,norm,change\n128,2.5,0\n256,2.5,0\n", 0) == 0);
}

TEST_CASE("certify writes both files") {
  const auto prefix = (scratch() / "cert").string();
  const Run r = run({"certify", "--tower", data("genus2.tw"), "--radius", "1", "--epsilon", "0.5", "--elements",
                     data("genus2_avg.txt"), "--out", prefix});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(prefix + ".cert"));
  CHECK(read_text_file(prefix + ".csv").rfind("# residua-csv v1\n", 0) == 0);
  const auto doc = parse_document(read_text_file(prefix + ".cert"));
  CHECK(doc.root().find("all_slack_nonnegative") != nullptr);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"norm", "--basis", "a,b"}).code == 1);
  CHECK(run({"norm", "--basis", "a,b", "--element", "/nonexistent/file"}).code == 1);
  CHECK(run({"baumslag", "--trials", "5"}).code == 1);
  CHECK(run({"tower", "--preset", "genus2", "--tower", data("genus2.tw")}).code == 1);
  CHECK(run({"tower", "--preset", "genus3"}).code == 1);
  const auto bad = write("bad.txt", "1 0 q\n");
  CHECK(run({"norm", "--basis", "a,b", "--element", bad}).code == 1);
  // Size limits are runtime failures.
  CHECK(run({"discriminate", "--preset", "genus2", "--radius", "9", "--ball-cap", "1000"}).code == 2);
  // Unconverged power iteration.
  const Run slow = run({"permrep", "--preset", "genus2", "--element", data("genus2_sum.txt"), "--sizes", "50",
                        "--seeds", "1", "--radius", "2", "--max-iters", "2"});
  CHECK(slow.code == 2);
  CHECK(slow.out.find(",0,") != std::string::npos);
  // Negative slack.
  CHECK(run({"certify", "--preset", "genus2", "--radius", "1", "--epsilon", "0.1", "--elements",
             data("genus2_avg.txt"), "--out", "-"})
            .code == 3);
}

TEST_CASE("outputs are deterministic and independent of the thread count") {
  const std::vector<std::vector<std::string>> commands = {
      {"norm", "--basis", "a,b", "--element", data("kesten.txt")},
      {"baumslag", "--seed", "5", "--trials", "3000"},
      {"baumslag", "--exhaustive", "--u-len", "2", "--b-len", "3", "--k-max", "20"},
      {"permrep", "--preset", "genus2", "--element", data("genus2_sum.txt"), "--sizes", "30,60", "--seeds", "1,2",
       "--radius", "2"},
      {"discriminate", "--preset", "genus2", "--radius", "2"},
      {"torus", "--grid", "16", "--element", data("z2.txt"), "--refine", "2"},
      {"certify", "--preset", "genus2", "--radius", "1", "--epsilon", "0.5", "--elements", data("genus2_avg.txt"),
       "--out", "-"},
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd[0]);
    std::vector<std::string> one{"--threads", "1"};
    one.insert(one.end(), cmd.begin(), cmd.end());
    std::vector<std::string> four{"--threads", "4"};
    four.insert(four.end(), cmd.begin(), cmd.end());
    const Run a = run(one);
    const Run b = run(one);
    const Run c = run(four);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
  }
}
