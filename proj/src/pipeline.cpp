#include "tsadforge/pipeline.hpp"

#include "tsadforge/csv.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace tsadforge {

namespace {

Sample realize(const SampleBlueprint& bp, const LabelPolicy& policy, const OutputOptions& output) {
  const Index n = bp.n;
  const int d = bp.d;
  if (static_cast<int>(bp.channels.size()) != d) throw Error(ErrorCode::ShapeMismatch, "blueprint channel count");

  Sample s;
  s.blueprint = bp;
  const RngStream trend_root = derive_stream(bp.sub_seed, Stage::Trend);
  const RngStream noise_root = derive_stream(bp.sub_seed, Stage::Noise);
  for (int ch = 0; ch < d; ++ch) {
    const auto c = static_cast<std::uint64_t>(ch);
    const ChannelSpec& cs = bp.channels[static_cast<std::size_t>(ch)];
    RngStream innovations = trend_root.fork(2 * c + 1);
    RngStream draws = noise_root.fork(2 * c + 1);
    Series trend = eval_trend(cs.trend, n, innovations);
    Series season = eval_season(cs.season, n);
    Series noise = eval_noise(cs.noise, n, draws);
    s.baselines.push_back(compose_baseline(std::move(trend), std::move(season), std::move(noise)));
  }

  const CausalSystem system = simulate_system(stack_composites(s.baselines), bp.dag, bp.arx, bp.alphas);
  s.clean = system.x;

  std::vector<double> scales(bp.anomaly_plan.size(), 0.0);
  std::vector<BaselineSeries> edited = s.baselines;
  bool endogenous = false;
  for (std::size_t i = 0; i < bp.anomaly_plan.size(); ++i) {
    const AnomalySpec& spec = bp.anomaly_plan[i];
    if (spec.mode != InjectionMode::Endogenous) continue;
    check_window(spec, n, d);
    scales[i] = local_context(edited[static_cast<std::size_t>(spec.channel)].composite, spec).scale;
    apply_endogenous_edit(edited, spec, bp.channels[static_cast<std::size_t>(spec.channel)].season);
    endogenous = true;
  }
  Panel x = endogenous ? simulate_system(stack_composites(edited), bp.dag, bp.arx, bp.alphas).x : s.clean;

  std::vector<ChannelComponents> components;
  for (int ch = 0; ch < d; ++ch)
    components.push_back({&s.baselines[static_cast<std::size_t>(ch)], &bp.channels[static_cast<std::size_t>(ch)].season});
  for (std::size_t i = 0; i < bp.anomaly_plan.size(); ++i) {
    const AnomalySpec& spec = bp.anomaly_plan[i];
    if (spec.mode != InjectionMode::Exogenous) continue;
    check_window(spec, n, d);
    scales[i] = local_context(x.col(spec.channel), spec).scale;
    x = inject_exogenous(x, spec, components);
  }

  s.masks = empty_masks(n, d);
  for (const AnomalySpec& spec : bp.anomaly_plan) {
    if (spec.mode == InjectionMode::Exogenous)
      merge_masks(s.masks, label_exogenous(spec, n, d));
    else
      merge_masks(s.masks, label_endogenous(spec, bp.dag, bp.arx, bp.alphas, n, d, policy));
  }

  Json normalization = nullptr;
  if (output.z_normalize && n > 0) {
    Json mean = Json::array(), stddev = Json::array();
    for (int ch = 0; ch < d; ++ch) {
      const double mu = s.clean.col(ch).mean();
      double sd = std::sqrt((s.clean.col(ch).array() - mu).square().mean());
      if (!(sd > 0.0)) sd = 1.0;
      x.col(ch) = ((x.col(ch).array() - mu) / sd).matrix();
      s.clean.col(ch) = ((s.clean.col(ch).array() - mu) / sd).matrix();
      mean.push_back(mu);
      stddev.push_back(sd);
    }
    normalization = {{"mean", mean}, {"std", stddev}};
  }
  s.values = std::move(x);

  s.meta = {{"schema_version", std::string(kSchemaVersion)},
            {"index", bp.index},
            {"master_seed", bp.master_seed},
            {"sub_seed", bp.sub_seed},
            {"blueprint", to_json(bp)},
            {"label_policy", to_json(policy)},
            {"output", {{"z_normalize", output.z_normalize}, {"emit_clean", output.emit_clean}}},
            {"context_scales", scales},
            {"normalization", normalization},
            {"warm_up", "zero initial state, no burn-in"}};
  return s;
}

}  // namespace

Sample realize_blueprint(const SampleBlueprint& bp, const LabelPolicy& policy, const OutputOptions& output) {
  try {
    return realize(bp, policy, output);
  } catch (const Error& e) {
    throw Error(e.code(), "sample " + std::to_string(bp.index) + ": " + e.detail());
  }
}

Sample generate_sample(const GeneratorConfig& config, std::uint64_t master_seed, std::uint64_t index) {
  GeneratorConfig c = config;
  c.master_seed = master_seed;
  return realize_blueprint(sample_blueprint(c, index), c.label_policy, c.output);
}

Sample regenerate_from_meta(const Json& meta) {
  try {
    const SampleBlueprint bp = blueprint_from_json(meta.at("blueprint"));
    const LabelPolicy policy = label_policy_from_json(meta.at("label_policy"));
    OutputOptions output;
    output.z_normalize = meta.at("output").at("z_normalize").get<bool>();
    output.emit_clean = meta.at("output").at("emit_clean").get<bool>();
    return realize_blueprint(bp, policy, output);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed meta: ") + e.what());
  }
}

// ---------------------------------------------------------------- files

SampleFiles render_sample_files(const Sample& sample, const OutputOptions& output) {
  SampleFiles f;
  f.files.emplace_back("values.csv", panel_to_csv(sample.values));
  f.files.emplace_back("labels.csv", mask_to_csv(sample.masks.any));
  f.files.emplace_back("rootcause.csv", mask_to_csv(sample.masks.rootcause));
  f.files.emplace_back("propagated.csv", mask_to_csv(sample.masks.propagated));
  f.files.emplace_back("meta.json", sample.meta.dump(2) + "\n");
  if (output.emit_clean) f.files.emplace_back("clean.csv", panel_to_csv(sample.clean));
  return f;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string sample_digest(const SampleFiles& files) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, bytes] : files.files) h = fnv1a64(bytes, h);
  return hex_digest(h);
}

std::string sample_dir_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06llu", static_cast<unsigned long long>(index));
  return buf;
}

std::string digest_sample_dir(const std::string& dir) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* name : {"values.csv", "labels.csv", "rootcause.csv", "propagated.csv", "meta.json"})
    h = fnv1a64(read_file((fs::path(dir) / name).string()), h);
  const fs::path clean = fs::path(dir) / "clean.csv";
  if (fs::exists(clean)) h = fnv1a64(read_file(clean.string()), h);
  return hex_digest(h);
}

// ---------------------------------------------------------------- dataset

namespace {

bool replaceable(const fs::path& out) {
  std::error_code ec;
  if (!fs::exists(out, ec)) return true;
  if (!fs::is_directory(out, ec)) return false;
  return fs::is_empty(out, ec) || fs::exists(out / "manifest.json", ec);
}

}  // namespace

Json generate_dataset(const GeneratorConfig& config_in, std::uint64_t master_seed, const std::string& out_dir,
                      int workers) {
  if (workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be at least 1");
  GeneratorConfig config = config_in;
  config.master_seed = master_seed;
  require_valid(config);

  fs::path out = fs::path(out_dir).lexically_normal();
  if (out.has_filename() == false) out = out.parent_path();
  if (!replaceable(out))
    throw Error(ErrorCode::IoError, "output '" + out.string() + "' exists and is not a dataset directory");

  const fs::path tmp = out.string() + ".partial-" + std::to_string(::getpid());
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp / "samples", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + tmp.string() + "': " + ec.message());

  const auto count = static_cast<std::uint64_t>(config.num_samples);
  std::vector<Json> entries(count);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    while (!failed.load()) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        const Sample sample = realize_blueprint(sample_blueprint(config, i), config.label_policy, config.output);
        const SampleFiles files = render_sample_files(sample, config.output);
        const std::string rel = "samples/" + sample_dir_name(i);
        const fs::path dir = tmp / rel;
        fs::create_directories(dir);
        Json per_file = Json::object();
        for (const auto& [name, bytes] : files.files) {
          write_file((dir / name).string(), bytes);
          per_file[name] = hex_digest(fnv1a64(bytes));
        }
        entries[i] = {{"index", i},
                      {"path", rel},
                      {"digest", sample_digest(files)},
                      {"files", per_file},
                      {"n", sample.blueprint.n},
                      {"d", sample.blueprint.d},
                      {"anomalies", sample.blueprint.anomaly_plan.size()},
                      {"anomalous", sample.masks.any.cast<int>().sum() > 0}};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), std::max<std::uint64_t>(1, count)));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (error) {
    fs::remove_all(tmp, ec);
    try {
      std::rethrow_exception(error);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IoError, e.what());
    }
  }

  Json manifest = {{"schema_version", std::string(kSchemaVersion)},
                   {"master_seed", master_seed},
                   {"num_samples", count},
                   {"config", config_to_json(config)},
                   {"samples", Json(entries.empty() ? Json::array() : Json(entries))}};
  try {
    write_file((tmp / "manifest.json").string(), manifest.dump(2) + "\n");
    if (fs::exists(out)) fs::remove_all(out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    fs::rename(tmp, out);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw Error(ErrorCode::IoError, e.what());
  } catch (const Error&) {
    fs::remove_all(tmp, ec);
    throw;
  }
  return manifest;
}

}  // namespace tsadforge
