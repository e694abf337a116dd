#include "cli.hpp"

#include "tsadforge/csv.hpp"
#include "tsadforge/detect.hpp"
#include "tsadforge/metrics.hpp"
#include "tsadforge/pipeline.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace tsadforge {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  int workers = 1;
  bool emit_clean = false;
};

int run_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  GeneratorConfig config;
  try {
    config = load_config(a.config);
  } catch (const Error& e) {
    err << "error: config: " << e.what() << "\n";
    return kUsage;
  }
  std::uint64_t seed = config.master_seed;
  if (a.seed) {
    seed = *a.seed;
  } else if (const char* env = std::getenv("TSADFORGE_SEED"); env && *env) {
    auto parsed = parse_u64(env);
    if (!parsed) {
      err << "error: TSADFORGE_SEED is not an unsigned 64-bit integer: " << env << "\n";
      return kUsage;
    }
    seed = *parsed;
  }
  if (a.samples) config.num_samples = *a.samples;
  if (a.emit_clean) config.output.emit_clean = true;
  config.master_seed = seed;
  if (const auto problems = validate_config(config); !problems.empty()) {
    for (const auto& p : problems) err << "error: config: " << p << "\n";
    return kUsage;
  }
  try {
    generate_dataset(config, seed, a.out, a.workers);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  out << (fs::path(a.out) / "manifest.json").string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- detect

struct DetectArgs {
  std::string input;
  std::string method = "zscore";
  Index window = kDefaultDetectorWindow;
  std::string out;
};

int run_detect(const DetectArgs& a, std::ostream&, std::ostream& err) {
  try {
    const CsvTable table = parse_csv(read_file(a.input));
    const DetectorKind kind = a.method == "zscore" ? DetectorKind::ZScore : DetectorKind::ContextDiscrepancy;
    const Series scores = detect(table.values, kind, a.window);
    write_file(a.out, scores_to_csv(scores));
  } catch (const Error& e) {
    err << "error: " << a.input << ": " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string scores;
  std::string pred;
  std::string labels;
  std::optional<std::string> metrics;
  std::optional<Index> buffer;
  int grid = 100;
  std::string out;
};

std::string canonical_metric(std::string name) {
  for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (name == "standard_f1" || name == "f1" || name == "standard") return "standard_f1";
  if (name == "f1_t" || name == "f1t") return "f1_t";
  if (name == "affiliation_f" || name == "affiliation" || name == "aff_f") return "affiliation_f";
  if (name == "vus_pr" || name == "vuspr" || name == "vus") return "vus_pr";
  throw UsageError("unknown metric '" + name + "' (known: standard_f1, f1_t, affiliation_f, vus_pr)");
}

Json prf_json(const BinaryScore& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

Series reduce_columns(const Panel& p) {
  if (p.cols() == 0) throw Error(ErrorCode::ParseError, "csv has no value columns");
  return p.rowwise().maxCoeff();
}

int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const bool have_scores = !a.scores.empty();
  const bool have_pred = !a.pred.empty();
  std::vector<std::string> metrics;
  try {
    if (have_scores == have_pred) throw UsageError("give exactly one of --scores or --pred");
    std::stringstream list(a.metrics.value_or(have_scores ? "standard_f1,f1_t,affiliation_f,vus_pr"
                                                          : "standard_f1,f1_t,affiliation_f"));
    for (std::string item; std::getline(list, item, ',');)
      if (!item.empty()) metrics.push_back(canonical_metric(item));
    if (metrics.empty()) throw UsageError("--metrics is empty");
    if (have_pred && std::find(metrics.begin(), metrics.end(), "vus_pr") != metrics.end())
      throw UsageError("vus_pr requires --scores; a binary prediction has no threshold sweep");
    if (a.grid < 2) throw UsageError("--grid must be at least 2");
    if (a.buffer && *a.buffer < 0) throw UsageError("--buffer must be nonnegative");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const MaskSeries labels = flatten_any(parse_mask_csv(read_file(a.labels)));
    Json report = Json::object();
    Json details = Json::object();
    MaskSeries pred;
    Series scores;
    if (have_scores) {
      scores = reduce_columns(parse_csv(read_file(a.scores)).values);
      if (scores.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, "scores have " + std::to_string(scores.size()) + " rows, labels " +
                                                   std::to_string(labels.size()));
      const ThresholdResult best = best_f1_over_thresholds(scores, labels, a.grid);
      report["threshold"] = best.threshold;
      pred = threshold_scores(scores, best.threshold);
    } else {
      const Mask raw = parse_mask_csv(read_file(a.pred));
      pred = flatten_any(raw);
      report["threshold"] = nullptr;
    }
    if (pred.size() != labels.size())
      throw Error(ErrorCode::LengthMismatch, "prediction has " + std::to_string(pred.size()) + " rows, labels " +
                                                 std::to_string(labels.size()));

    const BinaryScore standard = standard_f1(pred, labels);
    report["counts"] = {{"tp", standard.tp}, {"fp", standard.fp}, {"fn", standard.fn}};
    for (const auto& m : metrics) {
      if (m == "standard_f1") {
        report[m] = standard.f1;
        details[m] = prf_json(standard);
      } else if (m == "f1_t") {
        const BinaryScore s = f1_t(pred, labels);
        report[m] = s.f1;
        details[m] = prf_json(s);
        details[m]["variant"] = "point precision, event recall";
      } else if (m == "affiliation_f") {
        if (extract_events(labels).empty()) {
          report[m] = nullptr;
          details[m] = {{"note", "no ground-truth segments"}};
        } else {
          const BinaryScore s = affiliation_f(pred, labels);
          report[m] = s.f1;
          details[m] = prf_json(s);
        }
      } else if (m == "vus_pr") {
        const Index buffer = a.buffer ? *a.buffer : default_vus_buffer(labels.size());
        report[m] = vus_pr(scores, labels, buffer);
        details[m] = {{"buffer", buffer}};
      }
    }
    report["details"] = details;
    const std::string text = report.dump(2) + "\n";
    if (a.out.empty())
      out << text;
    else
      write_file(a.out, text);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string sample;
  std::string plot_data;
};

int run_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const fs::path dir = fs::path(a.sample).lexically_normal();
    const fs::path sample_dir = dir.has_filename() ? dir : dir.parent_path();
    const fs::path root = sample_dir.parent_path().parent_path();
    const fs::path manifest_path = root / "manifest.json";
    if (!fs::exists(manifest_path))
      throw Error(ErrorCode::SchemaError, "no manifest.json two levels above '" + sample_dir.string() + "'");
    Json manifest;
    try {
      manifest = Json::parse(read_file(manifest_path.string()));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, "manifest: " + std::string(e.what()));
    }
    const std::string rel = (sample_dir.parent_path().filename() / sample_dir.filename()).generic_string();
    const Json* entry = nullptr;
    for (const auto& s : manifest.at("samples"))
      if (s.at("path").get<std::string>() == rel) entry = &s;
    if (!entry) throw Error(ErrorCode::SchemaError, "sample '" + rel + "' is not listed in the manifest");

    const std::string expected = entry->at("digest").get<std::string>();
    const std::string actual = digest_sample_dir(sample_dir.string());
    if (actual != expected)
      throw Error(ErrorCode::DigestMismatch, "digest mismatch for " + rel + ": manifest " + expected + ", files " + actual);

    const CsvTable values = parse_csv(read_file((sample_dir / "values.csv").string()));
    const Mask labels = parse_mask_csv(read_file((sample_dir / "labels.csv").string()));
    const Mask root_mask = parse_mask_csv(read_file((sample_dir / "rootcause.csv").string()));
    const Mask prop_mask = parse_mask_csv(read_file((sample_dir / "propagated.csv").string()));
    const Json meta = Json::parse(read_file((sample_dir / "meta.json").string()));
    const Index n = values.values.rows();
    const Index d = values.values.cols();
    for (const Mask* m : {&labels, &root_mask, &prop_mask})
      if (m->rows() != n || m->cols() != d) throw Error(ErrorCode::ShapeMismatch, "mask shape differs from values");

    const Json& plan = meta.at("blueprint").at("anomaly_plan");
    out << "sample: " << rel << "\n";
    out << "n: " << n << "\n";
    out << "d: " << d << "\n";
    out << "digest: " << actual << " (ok)\n";
    out << "anomalies: " << plan.size() << "\n";
    for (const auto& s : plan)
      out << "  " << s.at("kind").get<std::string>() << " " << s.at("mode").get<std::string>() << " ch_"
          << s.at("channel").get<int>() << " [" << s.at("t_start").get<std::int64_t>() << ", "
          << s.at("t_end").get<std::int64_t>() << ")\n";
    out << "labels: " << labels.cast<std::int64_t>().sum() << "\n";
    out << "rootcause: " << root_mask.cast<std::int64_t>().sum() << "\n";
    out << "propagated: " << prop_mask.cast<std::int64_t>().sum() << "\n";
    for (Index c = 0; c < d; ++c) {
      const auto col = values.values.col(c);
      const double mean = n ? col.mean() : 0.0;
      const double sd = n ? std::sqrt((col.array() - mean).square().mean()) : 0.0;
      out << values.header[static_cast<std::size_t>(c)] << ": mean " << format_double(mean) << " std "
          << format_double(sd) << "\n";
    }

    if (!a.plot_data.empty()) {
      std::string csv = "t,channel,value,label\n";
      for (Index t = 0; t < n; ++t)
        for (Index c = 0; c < d; ++c)
          csv += std::to_string(t) + "," + values.header[static_cast<std::size_t>(c)] + "," +
                 format_double(values.values(t, c)) + "," + (labels(t, c) ? "1" : "0") + "\n";
      write_file(a.plot_data, csv);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  } catch (const Json::exception& e) {
    err << "error: malformed sample metadata: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic multivariate anomaly benchmark generator and evaluator", "tsadforge"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a dataset");
  gen_cmd->add_option("--config", gen.config, "Generator config (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Master seed (falls back to TSADFORGE_SEED, then the config)");
  gen_cmd->add_option("--samples", gen.samples, "Override num_samples")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--workers", gen.workers, "Worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--emit-clean", gen.emit_clean, "Also write clean.csv");

  DetectArgs det;
  auto* det_cmd = app.add_subcommand("detect", "Score a values.csv");
  det_cmd->add_option("--input", det.input, "values.csv")->required();
  det_cmd->add_option("--method", det.method, "zscore or rcd")->check(CLI::IsMember({"zscore", "rcd"}));
  det_cmd->add_option("--window", det.window, "Window length W")->check(CLI::Range(Index{2}, Index{1} << 40));
  det_cmd->add_option("--out", det.out, "scores.csv")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against labels");
  eval_cmd->add_option("--scores", ev.scores, "scores.csv (threshold sweep)");
  eval_cmd->add_option("--pred", ev.pred, "binary pred.csv");
  eval_cmd->add_option("--labels", ev.labels, "labels.csv")->required();
  eval_cmd->add_option("--metrics", ev.metrics, "Comma-separated metric list (default: all that apply)");
  eval_cmd->add_option("--buffer", ev.buffer, "VUS-PR maximum buffer (default min(100, n/10))");
  eval_cmd->add_option("--grid", ev.grid, "Threshold grid size");
  eval_cmd->add_option("--out", ev.out, "Write metrics.json here instead of stdout");

  InspectArgs ins;
  auto* ins_cmd = app.add_subcommand("inspect", "Summarize and verify one sample directory");
  ins_cmd->add_option("--sample", ins.sample, "samples/sample_NNNNNN directory")->required();
  ins_cmd->add_option("--plot-data", ins.plot_data, "Write tidy t,channel,value,label CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (*gen_cmd) return run_gen(gen, out, err);
  if (*det_cmd) return run_detect(det, out, err);
  if (*eval_cmd) return run_eval(ev, out, err);
  if (*ins_cmd) return run_inspect(ins, out, err);
  return kUsage;
}

}  // namespace tsadforge
