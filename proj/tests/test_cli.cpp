#include "../tools/cli.hpp"

#include "tsadforge/csv.hpp"
#include "tsadforge/pipeline.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace tsadforge;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tsadforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path root = fs::temp_directory_path() / "tsadforge_cli_test";
  Workspace() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string path(const std::string& name) const { return (root / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_file(path(name), text);
    return path(name);
  }
};

const char* kConfig = R"({
  "schema_version": "1",
  "num_samples": 4,
  "length_range": [300, 400],
  "anomalous_ratio": 1.0,
  "multivariate": true,
  "channel_range": [2, 3],
  "master_seed": 5
})";

}  // namespace

TEST_CASE("help on every subcommand lists its flags") {
  const Result top = run({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"gen", "detect", "eval", "inspect"}) CHECK_THAT(top.out, ContainsSubstring(sub));

  const std::vector<std::pair<std::string, std::vector<std::string>>> flags{
      {"gen", {"--config", "--out", "--seed", "--samples", "--workers", "--emit-clean"}},
      {"detect", {"--input", "--method", "--window", "--out"}},
      {"eval", {"--scores", "--pred", "--labels", "--metrics", "--buffer", "--grid"}},
      {"inspect", {"--sample", "--plot-data"}}};
  for (const auto& [sub, names] : flags) {
    const Result r = run({sub, "--help"});
    INFO(sub);
    CHECK(r.code == 0);
    for (const auto& f : names) CHECK_THAT(r.out, ContainsSubstring(f));
  }
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  const Result missing = run({"gen", "--out", "x"});
  CHECK(missing.code == 1);
  CHECK_THAT(missing.err, ContainsSubstring("config"));
  CHECK(run({"gen", "--config", "c.json", "--out", "x", "--bogus"}).code == 1);
  CHECK(run({"detect", "--input", "v.csv", "--out", "s.csv", "--method", "unknown"}).code == 1);
  CHECK(run({"detect", "--input", "v.csv", "--out", "s.csv", "--window", "1"}).code == 1);
}

TEST_CASE("gen reports config problems by key") {
  Workspace ws;
  const Result absent = run({"gen", "--config", ws.path("nope.json"), "--out", ws.path("ds")});
  CHECK(absent.code == 1);
  CHECK_THAT(absent.err, ContainsSubstring("config"));
  const auto bad = ws.write("bad.json", R"({"schema_version": "1", "num_sampels": 3})");
  const Result unknown = run({"gen", "--config", bad, "--out", ws.path("ds")});
  CHECK(unknown.code == 1);
  CHECK_THAT(unknown.err, ContainsSubstring("num_sampels"));
  const auto invalid = ws.write("invalid.json", R"({"schema_version": "1", "length_range": [10, 5]})");
  const Result inv = run({"gen", "--config", invalid, "--out", ws.path("ds")});
  CHECK(inv.code == 1);
  CHECK_THAT(inv.err, ContainsSubstring("length_range"));
}

TEST_CASE("gen, detect, eval and inspect end to end") {
  Workspace ws;
  const auto cfg = ws.write("config.json", kConfig);
  const Result g = run({"gen", "--config", cfg, "--out", ws.path("ds"), "--workers", "2"});
  REQUIRE(g.code == 0);
  CHECK_THAT(g.out, ContainsSubstring("manifest.json"));
  const Json manifest = Json::parse(read_file(ws.path("ds/manifest.json")));
  REQUIRE(manifest.at("samples").size() == 4);

  const Result again = run({"gen", "--config", cfg, "--out", ws.path("ds2")});
  REQUIRE(again.code == 0);
  CHECK(read_file(ws.path("ds/manifest.json")) == read_file(ws.path("ds2/manifest.json")));

  const std::string sample = ws.path("ds/samples/sample_000000");
  const CsvTable values = parse_csv(read_file(sample + "/values.csv"));

  for (const char* method : {"zscore", "rcd"}) {
    const Result d = run({"detect", "--input", sample + "/values.csv", "--method", method, "--window", "50", "--out",
                          ws.path("scores.csv")});
    REQUIRE(d.code == 0);
    const CsvTable scores = parse_csv(read_file(ws.path("scores.csv")));
    CHECK(scores.header == std::vector<std::string>{"score"});
    CHECK(scores.values.rows() == values.values.rows());
  }

  const Result e = run({"eval", "--scores", ws.path("scores.csv"), "--labels", sample + "/labels.csv"});
  REQUIRE(e.code == 0);
  const Json report = Json::parse(e.out);
  for (const char* m : {"standard_f1", "f1_t", "affiliation_f", "vus_pr"}) CHECK(report.contains(m));
  CHECK(report.at("threshold").is_number());

  const Result self = run({"eval", "--pred", sample + "/labels.csv", "--labels", sample + "/labels.csv", "--metrics",
                           "standard_f1,f1_t,affiliation_f", "--out", ws.path("metrics.json")});
  REQUIRE(self.code == 0);
  const Json perfect = Json::parse(read_file(ws.path("metrics.json")));
  CHECK(perfect.at("standard_f1") == 1.0);
  CHECK(perfect.at("f1_t") == 1.0);
  CHECK(perfect.at("affiliation_f") == 1.0);

  const Result vus = run({"eval", "--pred", sample + "/labels.csv", "--labels", sample + "/labels.csv", "--metrics", "vuspr"});
  CHECK(vus.code == 1);
  CHECK_THAT(vus.err, ContainsSubstring("scores"));
  CHECK(run({"eval", "--labels", sample + "/labels.csv"}).code == 1);
  CHECK(run({"eval", "--pred", sample + "/labels.csv", "--scores", ws.path("scores.csv"), "--labels",
             sample + "/labels.csv"})
            .code == 1);

  const Result ins = run({"inspect", "--sample", sample, "--plot-data", ws.path("plot.csv")});
  REQUIRE(ins.code == 0);
  CHECK_THAT(ins.out, ContainsSubstring("(ok)"));
  CHECK_THAT(ins.out, ContainsSubstring("n: " + std::to_string(values.values.rows())));
  const std::string plot = read_file(ws.path("plot.csv"));
  CHECK(std::count(plot.begin(), plot.end(), '\n') == 1 + values.values.rows() * values.values.cols());
  CHECK(plot.rfind("t,channel,value,label\n", 0) == 0);
}

TEST_CASE("runtime errors exit 2") {
  Workspace ws;
  const auto ragged = ws.write("ragged.csv", "t,ch_0,ch_1\n0,1,2\n1,3\n");
  const Result d = run({"detect", "--input", ragged, "--out", ws.path("s.csv")});
  CHECK(d.code == 2);
  CHECK_THAT(d.err, ContainsSubstring("line 3"));

  const auto labels = ws.write("labels.csv", "t,ch_0\n0,0\n1,1\n2,0\n");
  const auto scores = ws.write("scores.csv", "t,score\n0,0.1\n1,0.9\n");
  CHECK(run({"eval", "--scores", scores, "--labels", labels}).code == 2);

  const auto cfg = ws.write("config.json", kConfig);
  REQUIRE(run({"gen", "--config", cfg, "--out", ws.path("ds")}).code == 0);
  const std::string values = ws.path("ds/samples/sample_000001/values.csv");
  std::string bytes = read_file(values);
  bytes[bytes.size() - 3] = bytes[bytes.size() - 3] == '1' ? '2' : '1';
  write_file(values, bytes);
  const Result ins = run({"inspect", "--sample", ws.path("ds/samples/sample_000001")});
  CHECK(ins.code == 2);
  CHECK_THAT(ins.err, ContainsSubstring("digest"));

  std::ofstream(ws.path("precious.txt")) << "x";
  fs::create_directories(ws.path("occupied"));
  std::ofstream(ws.path("occupied/keep.txt")) << "x";
  CHECK(run({"gen", "--config", cfg, "--out", ws.path("occupied")}).code == 2);
}

TEST_CASE("clean samples report zero anomalies") {
  Workspace ws;
  const auto cfg = ws.write("config.json", R"({"schema_version": "1", "num_samples": 2, "length_range": [200, 200],
                                               "anomalous_ratio": 0.0})");
  REQUIRE(run({"gen", "--config", cfg, "--out", ws.path("ds")}).code == 0);
  const Result ins = run({"inspect", "--sample", ws.path("ds/samples/sample_000000/")});
  REQUIRE(ins.code == 0);
  CHECK_THAT(ins.out, ContainsSubstring("anomalies: 0\n"));
  const Result e = run({"eval", "--pred", ws.path("ds/samples/sample_000000/labels.csv"), "--labels",
                        ws.path("ds/samples/sample_000000/labels.csv")});
  REQUIRE(e.code == 0);
  CHECK(Json::parse(e.out).at("affiliation_f").is_null());
}

TEST_CASE("seed precedence") {
  Workspace ws;
  const auto cfg = ws.write("config.json", kConfig);
  auto seed_of = [&](const std::string& dir) {
    return Json::parse(read_file(ws.path(dir + "/manifest.json"))).at("master_seed").get<std::uint64_t>();
  };
  ::setenv("TSADFORGE_SEED", "77", 1);
  REQUIRE(run({"gen", "--config", cfg, "--out", ws.path("env"), "--samples", "1"}).code == 0);
  REQUIRE(run({"gen", "--config", cfg, "--out", ws.path("flag"), "--samples", "1", "--seed", "9"}).code == 0);
  ::setenv("TSADFORGE_SEED", "not-a-number", 1);
  CHECK(run({"gen", "--config", cfg, "--out", ws.path("bad"), "--samples", "1"}).code == 1);
  ::unsetenv("TSADFORGE_SEED");
  REQUIRE(run({"gen", "--config", cfg, "--out", ws.path("cfg"), "--samples", "1", "--emit-clean"}).code == 0);
  CHECK(seed_of("env") == 77);
  CHECK(seed_of("flag") == 9);
  CHECK(seed_of("cfg") == 5);
  CHECK(fs::exists(ws.path("cfg/samples/sample_000000/clean.csv")));
  CHECK(Json::parse(read_file(ws.path("cfg/manifest.json"))).at("samples").size() == 1);
}
