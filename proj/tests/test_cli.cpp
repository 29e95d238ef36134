#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "acecost/cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using acecost::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory removed at scope exit.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("acecost_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kTrivial = R"({"ir_version": 1, "name": "trivial", "input": {"n": 1, "h": 2, "w": 2, "c": 1},
  "nodes": [{"id": "in", "kind": "input", "inputs": []},
            {"id": "out", "kind": "output", "inputs": ["in"]}]})";

// Valid structure, but the residual operands disagree in shape.
const char* kBadShapes = R"({"ir_version": 1, "name": "bad_shapes", "input": {"n": 1, "h": 4, "w": 4, "c": 2},
  "nodes": [{"id": "in", "kind": "input", "inputs": []},
            {"id": "pw", "kind": "pointwise_conv2d", "inputs": ["in"],
             "params": {"in_channels": 2, "out_channels": 3}},
            {"id": "sum", "kind": "add", "inputs": ["in", "pw"]},
            {"id": "out", "kind": "output", "inputs": ["sum"]}]})";

const char* kInvalid = R"({"ir_version": 1, "name": "invalid", "input": {"n": 1, "h": 4, "w": 4, "c": 2},
  "nodes": [{"id": "in", "kind": "input", "inputs": []},
            {"id": "pw", "kind": "pointwise_conv2d", "inputs": ["in"],
             "params": {"kernel_h": 3, "in_channels": 2, "out_channels": 3}},
            {"id": "out", "kind": "output", "inputs": ["pw"]}]})";

}  // namespace

TEST_CASE("usage errors exit 64") {
  CHECK(invoke({}).code == 64);
  CHECK(invoke({"frobnicate"}).code == 64);
  CHECK(invoke({"oracle", "--max-bits", "65"}).code == 64);
  CHECK(invoke({"oracle"}).code == 64);
  CHECK(invoke({"analyze", "x.json", "--format", "yaml"}).code == 64);
  CHECK(invoke({"analyze", "x.json", "--bogus"}).code == 64);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("oracle subcommand") {
  auto r = invoke({"oracle", "--max-bits", "16"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("0 mismatches / 256 pairs\n", 0) == 0);

  r = invoke({"oracle", "--fp-adder", "8", "23"});
  CHECK(r.code == 0);
  CHECK(r.out.find("<= 192\n") != std::string::npos);

  r = invoke({"oracle", "--shifter", "16", "16"});
  CHECK(r.code == 0);
  CHECK(r.out.find("12.8 bit-adders") != std::string::npos);
  CHECK(r.out.find("(match)") != std::string::npos);
}

TEST_CASE("input errors exit 1, analysis errors exit 2") {
  Scratch s;
  auto r = invoke({"analyze", (s.dir / "missing.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("cannot open") != std::string::npos);

  r = invoke({"analyze", s.write("garbage.json", "{ nope")});
  CHECK(r.code == 1);

  r = invoke({"analyze", s.write("invalid.json", kInvalid)});
  CHECK(r.code == 1);
  CHECK(r.err.find("[pw-kernel-1x1] pw") != std::string::npos);

  r = invoke({"census", s.write("bad_shapes.json", kBadShapes)});
  CHECK(r.code == 2);
  CHECK(r.err.find("'sum'") != std::string::npos);
}

TEST_CASE("census of a trivial graph is header only") {
  Scratch s;
  const auto r = invoke({"census", s.write("trivial.json", kTrivial)});
  CHECK(r.code == 0);
  CHECK(r.out == "layer_id,category,op_class,count,bits_a,bits_b\n");
  CHECK(r.err.empty());
}

TEST_CASE("census rows add up to the batch-norm totals") {
  const auto r = invoke({"census", testing::fixture_path("mobilenet_v2_4bit.json")});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() > 1);
  std::int64_t mults = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k][1] == "BatchNorm" && rows[k][2] == "Multiply") mults += std::stoll(rows[k][3]);
  CHECK(testing::within_rel(mults / 1e6, 6.67, 0.05));
}

TEST_CASE("analyze renders every format, deterministically") {
  const auto path = testing::fixture_path("pikelpn_1x.json");
  for (const char* fmt : {"json", "csv", "table", "markdown"}) {
    CAPTURE(fmt);
    const auto a = invoke({"analyze", path, "--format", fmt});
    const auto b = invoke({"analyze", path, "--format", fmt});
    CHECK(a.code == 0);
    CHECK_FALSE(a.out.empty());
    CHECK(a.out == b.out);
  }
  const auto json = invoke({"analyze", testing::fixture_path("mobilenet_v2_4bit.json"), "--format", "json"});
  const auto at = json.out.find("\"total_ace\": ");
  REQUIRE(at != std::string::npos);
  const double total = std::stod(json.out.substr(at + 13));
  CHECK(testing::within_rel(total / 1e9, 20.44, 0.10));

  const auto stamped = invoke({"analyze", path, "--format", "csv", "--stamp"});
  CHECK(stamped.out == invoke({"analyze", path, "--format", "csv"}).out);
  CHECK(stamped.err.rfind("# acecost analyze", 0) == 0);
}

TEST_CASE("golden reports") {
  const auto csv = invoke({"analyze", testing::fixture_path("pikelpn_1x.json"), "--format", "csv"});
  CHECK(csv.out == testing::slurp(testing::fixture_path("golden/pikelpn_1x.report.csv")));
  const auto census = invoke({"census", testing::fixture_path("mobilenet_v1_8w4a.json")});
  CHECK(census.out == testing::slurp(testing::fixture_path("golden/mobilenet_v1_8w4a.census.csv")));
}

TEST_CASE("output file option") {
  Scratch s;
  const auto target = (s.dir / "report.csv").string();
  const auto r = invoke({"analyze", testing::fixture_path("pikelpn_1x.json"), "--format", "csv", "-o", target});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(testing::slurp(target) == invoke({"analyze", testing::fixture_path("pikelpn_1x.json"), "--format", "csv"}).out);
}

TEST_CASE("compare orders by cost and tolerates broken files") {
  std::vector<std::string> args{"compare"};
  for (const char* m : {"pikelpn_6x", "pikelpn_1x", "pikelpn_3x", "pikelpn_2x"})
    args.push_back(testing::fixture_path(std::string(m) + ".json"));
  args.push_back("--csv");
  auto r = invoke(args);
  REQUIRE(r.code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][0] == "pikelpn_1x");
  CHECK(rows[2][0] == "pikelpn_2x");
  CHECK(rows[3][0] == "pikelpn_3x");
  CHECK(rows[4][0] == "pikelpn_6x");

  Scratch s;
  r = invoke({"compare", testing::fixture_path("pikelpn_1x.json"), s.write("broken.json", "[]"), "--csv"});
  CHECK(r.code == 1);
  rows = parse_csv(r.out);
  CHECK(rows.size() == 2);
  CHECK(r.err.find("broken.json") != std::string::npos);

  r = invoke({"compare", testing::fixture_path("pikelpn_1x.json"), "--accuracy", "oops"});
  CHECK(r.code == 64);
}

TEST_CASE("zoo emit matches fixtures") {
  auto r = invoke({"zoo", "list"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pikelpn_1x\n") != std::string::npos);

  r = invoke({"zoo", "emit", "resnet50_b3"});
  CHECK(r.code == 0);
  CHECK(r.out == testing::slurp(testing::fixture_path("resnet50_b3.json")));

  // Parametric form of a named model.
  r = invoke({"zoo", "emit", "pikelpn", "--scale", "2x"});
  CHECK(r.code == 0);
  CHECK(r.out == testing::slurp(testing::fixture_path("pikelpn_2x.json")));

  CHECK(invoke({"zoo", "emit", "vgg16"}).code == 64);
}

TEST_CASE("quantsim writes one row per trial") {
  const auto r = invoke({"quantsim", "--trials", "5", "--channels", "8", "--seed", "1"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"trial", "vanilla_mse", "quantnorm_mse", "quantnorm_better"});
  CHECK(r.err.find("trials") != std::string::npos);
  CHECK(invoke({"quantsim", "--trials", "5", "--channels", "8", "--seed", "1"}).out == r.out);
}
