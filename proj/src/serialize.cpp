#include "tsadforge/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tsadforge {

namespace {

// Reads fields of one JSON object, remembering which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorCode::InvalidConfig, where() + "expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, "bad value for key '" + path_ + key + "': " + e.what());
    }
  }

  const Json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child_path(const std::string& key) const { return path_ + key + "."; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw Error(ErrorCode::InvalidConfig, "unknown key '" + path_ + item.key() + "'");
  }

 private:
  std::string where() const { return path_.empty() ? std::string() : "'" + path_.substr(0, path_.size() - 1) + "': "; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum, std::size_t N>
Json weights_to_json(const std::array<double, N>& w) {
  Json out = Json::object();
  for (std::size_t i = 0; i < N; ++i) out[std::string(to_string(static_cast<Enum>(i)))] = w[i];
  return out;
}

template <typename Enum, std::size_t N>
void weights_from_json(const Json& j, const std::string& path, std::array<double, N>& w) {
  ObjectReader r(j, path);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) r.get(std::string(to_string(static_cast<Enum>(i))), out[i]);
  r.finish();
  w = out;
}

template <typename Enum, std::size_t N>
Enum enum_from_json(const Json& j, const char* what) {
  const auto name = j.get<std::string>();
  for (std::size_t i = 0; i < N; ++i)
    if (to_string(static_cast<Enum>(i)) == name) return static_cast<Enum>(i);
  throw Error(ErrorCode::ParseError, std::string("unknown ") + what + " '" + name + "'");
}

AnomalyKind kind_from_name(const std::string& name, ErrorCode code) {
  auto kind = parse_anomaly_kind(name);
  if (!kind) throw Error(code, "unknown anomaly kind '" + name + "'");
  return *kind;
}

}  // namespace

// ---------------------------------------------------------------- config

GeneratorConfig config_from_json(const Json& j) {
  ObjectReader r(j, "");
  std::string version;
  if (!j.is_object() || !j.contains("schema_version"))
    throw Error(ErrorCode::InvalidConfig, "missing required key 'schema_version'");
  r.get("schema_version", version);
  if (version != kSchemaVersion)
    throw Error(ErrorCode::InvalidConfig, "unsupported schema_version '" + version + "' (supported: " +
                                              std::string(kSchemaVersion) + ")");

  GeneratorConfig c;
  r.get("num_samples", c.num_samples);
  r.get("length_range", c.length_range);
  r.get("anomalous_ratio", c.anomalous_ratio);
  r.get("multivariate", c.multivariate);
  r.get("channel_range", c.channel_range);
  r.get("master_seed", c.master_seed);

  if (const Json* a = r.child("attribute_priors")) {
    const auto base = r.child_path("attribute_priors");
    ObjectReader ar(*a, base);
    if (const Json* w = ar.child("season_weights"))
      weights_from_json<SeasonCategory>(*w, ar.child_path("season_weights"), c.attribute_priors.season_weights);
    if (const Json* w = ar.child("trend_weights"))
      weights_from_json<TrendCategory>(*w, ar.child_path("trend_weights"), c.attribute_priors.trend_weights);
    if (const Json* w = ar.child("freq_weights"))
      weights_from_json<FreqRegime>(*w, ar.child_path("freq_weights"), c.attribute_priors.freq_weights);
    if (const Json* w = ar.child("noise_weights"))
      weights_from_json<NoiseLevel>(*w, ar.child_path("noise_weights"), c.attribute_priors.noise_weights);
    ar.finish();
  }

  if (const Json* cj = r.child("causal_priors")) {
    ObjectReader cr(*cj, r.child_path("causal_priors"));
    auto& cp = c.causal_priors;
    std::array<double, 2> a{cp.a_min, cp.a_max}, bias{cp.bias_min, cp.bias_max}, alpha{cp.alpha_min, cp.alpha_max};
    cr.get("edge_density_target", cp.edge_density_target);
    cr.get("lag_max_cap", cp.lag_max_cap);
    cr.get("lag_max_divisor", cp.lag_max_divisor);
    cr.get("arx_a_range", a);
    cr.get("arx_gain_scale", cp.gain_scale);
    cr.get("bias_range", bias);
    cr.get("mix_alpha_range", alpha);
    cr.finish();
    cp.a_min = a[0], cp.a_max = a[1];
    cp.bias_min = bias[0], cp.bias_max = bias[1];
    cp.alpha_min = alpha[0], cp.alpha_max = alpha[1];
  }

  if (const Json* aj = r.child("anomaly_priors")) {
    ObjectReader ar(*aj, r.child_path("anomaly_priors"));
    auto& ap = c.anomaly_priors;
    std::vector<std::string> kinds;
    std::array<std::int64_t, 2> count{ap.count_min, ap.count_max};
    std::array<double, 2> amp{ap.amplitude_min, ap.amplitude_max};
    ar.get("kinds", kinds);
    ar.get("count_range", count);
    ar.get("amplitude_range", amp);
    ar.get("endogenous_prob", ap.endogenous_prob);
    if (const Json* w = ar.child("window")) {
      ObjectReader wr(*w, ar.child_path("window"));
      wr.get("min_abs", ap.window.min_abs);
      wr.get("min_frac", ap.window.min_frac);
      wr.get("max_abs", ap.window.max_abs);
      wr.get("max_frac", ap.window.max_frac);
      wr.finish();
    }
    ar.finish();
    if (aj->contains("kinds")) {
      ap.kinds.clear();
      for (const auto& k : kinds) ap.kinds.push_back(kind_from_name(k, ErrorCode::InvalidConfig));
    }
    ap.count_min = count[0], ap.count_max = count[1];
    ap.amplitude_min = amp[0], ap.amplitude_max = amp[1];
  }

  if (const Json* lj = r.child("label_policy")) {
    ObjectReader lr(*lj, r.child_path("label_policy"));
    lr.get("alpha_min", c.label_policy.alpha_min);
    lr.get("epsilon", c.label_policy.epsilon);
    lr.get("horizon_cap_frac", c.label_policy.horizon_cap_frac);
    lr.finish();
  }

  if (const Json* oj = r.child("output")) {
    ObjectReader orr(*oj, r.child_path("output"));
    orr.get("z_normalize", c.output.z_normalize);
    orr.get("emit_clean", c.output.emit_clean);
    orr.finish();
  }
  r.finish();
  return c;
}

Json to_json(const LabelPolicy& p) {
  return {{"alpha_min", p.alpha_min}, {"epsilon", p.epsilon}, {"horizon_cap_frac", p.horizon_cap_frac}};
}

LabelPolicy label_policy_from_json(const Json& j) {
  LabelPolicy p;
  p.alpha_min = j.at("alpha_min").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  p.horizon_cap_frac = j.at("horizon_cap_frac").get<double>();
  return p;
}

Json config_to_json(const GeneratorConfig& c) {
  Json kinds = Json::array();
  for (AnomalyKind k : c.anomaly_priors.kinds) kinds.push_back(std::string(to_string(k)));
  const auto& cp = c.causal_priors;
  const auto& ap = c.anomaly_priors;
  Json j = {
      {"schema_version", std::string(kSchemaVersion)},
      {"num_samples", c.num_samples},
      {"length_range", c.length_range},
      {"anomalous_ratio", c.anomalous_ratio},
      {"multivariate", c.multivariate},
      {"channel_range", c.channel_range},
      {"master_seed", c.master_seed},
      {"attribute_priors",
       {{"season_weights", weights_to_json<SeasonCategory>(c.attribute_priors.season_weights)},
        {"trend_weights", weights_to_json<TrendCategory>(c.attribute_priors.trend_weights)},
        {"freq_weights", weights_to_json<FreqRegime>(c.attribute_priors.freq_weights)},
        {"noise_weights", weights_to_json<NoiseLevel>(c.attribute_priors.noise_weights)}}},
      {"causal_priors",
       {{"edge_density_target", cp.edge_density_target},
        {"lag_max_cap", cp.lag_max_cap},
        {"lag_max_divisor", cp.lag_max_divisor},
        {"arx_a_range", {cp.a_min, cp.a_max}},
        {"arx_gain_scale", cp.gain_scale},
        {"bias_range", {cp.bias_min, cp.bias_max}},
        {"mix_alpha_range", {cp.alpha_min, cp.alpha_max}}}},
      {"anomaly_priors",
       {{"kinds", kinds},
        {"count_range", {ap.count_min, ap.count_max}},
        {"amplitude_range", {ap.amplitude_min, ap.amplitude_max}},
        {"endogenous_prob", ap.endogenous_prob},
        {"window",
         {{"min_abs", ap.window.min_abs},
          {"min_frac", ap.window.min_frac},
          {"max_abs", ap.window.max_abs},
          {"max_frac", ap.window.max_frac}}}}},
      {"label_policy", to_json(c.label_policy)},
      {"output", {{"z_normalize", c.output.z_normalize}, {"emit_clean", c.output.emit_clean}}},
  };
  return j;
}

GeneratorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------- components

Json to_json(const TrendSpec& t) {
  Json j = {{"k0", t.k0}, {"k1", t.k1}, {"knots", t.knots}, {"slope_deltas", t.slope_deltas}, {"rho", t.rho}};
  if (t.arima) {
    j["arima"] = {{"differencing", t.arima->differencing},
                  {"ar", t.arima->ar},
                  {"ma", t.arima->ma},
                  {"innovation_std", t.arima->innovation_std}};
  } else {
    j["arima"] = nullptr;
  }
  return j;
}

TrendSpec trend_from_json(const Json& j) {
  TrendSpec t;
  t.k0 = j.at("k0").get<double>();
  t.k1 = j.at("k1").get<double>();
  t.knots = j.at("knots").get<std::vector<std::int64_t>>();
  t.slope_deltas = j.at("slope_deltas").get<std::vector<double>>();
  t.rho = j.at("rho").get<double>();
  const Json& a = j.at("arima");
  if (!a.is_null()) {
    ArimaSpec s;
    s.differencing = a.at("differencing").get<int>();
    s.ar = a.at("ar").get<std::vector<double>>();
    s.ma = a.at("ma").get<std::vector<double>>();
    s.innovation_std = a.at("innovation_std").get<double>();
    t.arima = s;
  }
  return t;
}

namespace {

Json wavelet_atom_json(const WaveletAtom& a) {
  return {{"amplitude", a.amplitude}, {"family", std::string(to_string(a.family))}, {"scale", a.scale}, {"shift", a.shift}};
}

WaveletAtom wavelet_atom_from(const Json& j) {
  WaveletAtom a;
  a.amplitude = j.at("amplitude").get<double>();
  const auto family = j.at("family").get<std::string>();
  auto f = parse_wavelet_family(family);
  if (!f) throw Error(ErrorCode::ParseError, "unknown wavelet family '" + family + "'");
  a.family = *f;
  a.scale = j.at("scale").get<double>();
  a.shift = j.at("shift").get<double>();
  return a;
}

struct SeasonToJson {
  Json operator()(const NoSeason&) const { return {{"type", "none"}}; }
  Json operator()(const SineSeason& s) const {
    Json atoms = Json::array();
    for (const auto& a : s.atoms)
      atoms.push_back({{"amplitude", a.amplitude},
                       {"frequency", a.frequency},
                       {"phase", a.phase},
                       {"order", a.order},
                       {"mod_depth", a.mod_depth},
                       {"mod_phase", a.mod_phase}});
    return {{"type", "sine"}, {"atoms", atoms}, {"modulated", s.modulated}, {"mod_frequency", s.mod_frequency}};
  }
  Json operator()(const SquareSeason& s) const {
    return {{"type", "square"}, {"amplitude", s.amplitude}, {"period", s.period}, {"duty", s.duty}, {"cycle_start", s.cycle_start}};
  }
  Json operator()(const TriangleSeason& s) const {
    return {{"type", "triangle"}, {"amplitude", s.amplitude}, {"period", s.period}, {"duty", s.duty}, {"cycle_start", s.cycle_start}};
  }
  Json operator()(const WaveletSeason& s) const {
    Json atoms = Json::array();
    for (const auto& a : s.atoms) atoms.push_back(wavelet_atom_json(a));
    return {{"type", "wavelet"}, {"period", s.period}, {"atoms", atoms}};
  }
};

template <typename Pulse>
Pulse pulse_from(const Json& j) {
  Pulse p;
  p.amplitude = j.at("amplitude").get<double>();
  p.period = j.at("period").get<double>();
  p.duty = j.at("duty").get<double>();
  p.cycle_start = j.at("cycle_start").get<double>();
  return p;
}

}  // namespace

Json to_json(const SeasonSpec& spec) { return std::visit(SeasonToJson{}, spec); }

SeasonSpec season_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "none") return NoSeason{};
  if (type == "sine") {
    SineSeason s;
    for (const auto& a : j.at("atoms")) {
      SineAtom atom;
      atom.amplitude = a.at("amplitude").get<double>();
      atom.frequency = a.at("frequency").get<double>();
      atom.phase = a.at("phase").get<double>();
      atom.order = a.at("order").get<int>();
      atom.mod_depth = a.at("mod_depth").get<double>();
      atom.mod_phase = a.at("mod_phase").get<double>();
      s.atoms.push_back(atom);
    }
    s.modulated = j.at("modulated").get<bool>();
    s.mod_frequency = j.at("mod_frequency").get<double>();
    return s;
  }
  if (type == "square") return pulse_from<SquareSeason>(j);
  if (type == "triangle") return pulse_from<TriangleSeason>(j);
  if (type == "wavelet") {
    WaveletSeason s;
    s.period = j.at("period").get<double>();
    for (const auto& a : j.at("atoms")) s.atoms.push_back(wavelet_atom_from(a));
    return s;
  }
  throw Error(ErrorCode::ParseError, "unknown season type '" + type + "'");
}

Json to_json(const NoiseSpec& spec) {
  Json bursts = Json::array();
  for (const auto& b : spec.bursts) bursts.push_back({{"begin", b.begin}, {"end", b.end}, {"multiplier", b.multiplier}});
  return {{"sigma0", spec.sigma0}, {"bursts", bursts}};
}

NoiseSpec noise_from_json(const Json& j) {
  NoiseSpec s;
  s.sigma0 = j.at("sigma0").get<double>();
  for (const auto& b : j.at("bursts"))
    s.bursts.push_back({b.at("begin").get<std::int64_t>(), b.at("end").get<std::int64_t>(), b.at("multiplier").get<double>()});
  return s;
}

// ---------------------------------------------------------------- anomaly

Json to_json(const AnomalySpec& spec) {
  const auto& p = spec.params;
  Json params = {
      {"amplitude", p.amplitude},
      {"level_shift", p.level_shift},
      {"center", p.center},
      {"half_width", p.half_width},
      {"stride", p.stride},
      {"spike_amplitudes", p.spike_amplitudes},
      {"spike_widths", p.spike_widths},
      {"rise", p.rise},
      {"fall", p.fall},
      {"peak", p.peak},
      {"shift_start", p.shift_start},
      {"kappa", p.kappa},
      {"frequency", p.frequency},
      {"phase", p.phase},
      {"ratio", p.ratio},
      {"period_multiplier", p.period_multiplier},
      {"noise_std", p.noise_std},
      {"noise_seed", p.noise_seed},
      {"phase_shift", p.phase_shift},
      {"harmonic_index", p.harmonic_index},
      {"harmonic_order", p.harmonic_order},
      {"harmonic_amplitude", p.harmonic_amplitude},
      {"harmonic_phase", p.harmonic_phase},
      {"new_value", p.new_value},
      {"cycle_shift", p.cycle_shift},
      {"duty_scale", p.duty_scale},
      {"target_waveform", std::string(to_string(p.target_waveform))},
      {"new_family", std::string(to_string(p.new_family))},
      {"atom_index", p.atom_index},
      {"scale_factor", p.scale_factor},
      {"shift_delta", p.shift_delta},
      {"new_atom", wavelet_atom_json(p.new_atom)},
  };
  return {{"kind", std::string(to_string(spec.kind))},
          {"mode", std::string(to_string(spec.mode))},
          {"channel", spec.channel},
          {"t_start", spec.t_start},
          {"t_end", spec.t_end},
          {"params", params}};
}

AnomalySpec anomaly_from_json(const Json& j) {
  AnomalySpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>(), ErrorCode::ParseError);
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "exogenous" && mode != "endogenous") throw Error(ErrorCode::ParseError, "unknown mode '" + mode + "'");
  s.mode = mode == "exogenous" ? InjectionMode::Exogenous : InjectionMode::Endogenous;
  s.channel = j.at("channel").get<int>();
  s.t_start = j.at("t_start").get<std::int64_t>();
  s.t_end = j.at("t_end").get<std::int64_t>();
  const Json& q = j.at("params");
  auto& p = s.params;
  p.amplitude = q.at("amplitude").get<double>();
  p.level_shift = q.at("level_shift").get<double>();
  p.center = q.at("center").get<std::int64_t>();
  p.half_width = q.at("half_width").get<std::int64_t>();
  p.stride = q.at("stride").get<std::int64_t>();
  p.spike_amplitudes = q.at("spike_amplitudes").get<std::vector<double>>();
  p.spike_widths = q.at("spike_widths").get<std::vector<std::int64_t>>();
  p.rise = q.at("rise").get<std::int64_t>();
  p.fall = q.at("fall").get<std::int64_t>();
  p.peak = q.at("peak").get<std::int64_t>();
  p.shift_start = q.at("shift_start").get<std::int64_t>();
  p.kappa = q.at("kappa").get<double>();
  p.frequency = q.at("frequency").get<double>();
  p.phase = q.at("phase").get<double>();
  p.ratio = q.at("ratio").get<double>();
  p.period_multiplier = q.at("period_multiplier").get<double>();
  p.noise_std = q.at("noise_std").get<double>();
  p.noise_seed = q.at("noise_seed").get<std::uint64_t>();
  p.phase_shift = q.at("phase_shift").get<double>();
  p.harmonic_index = q.at("harmonic_index").get<int>();
  p.harmonic_order = q.at("harmonic_order").get<int>();
  p.harmonic_amplitude = q.at("harmonic_amplitude").get<double>();
  p.harmonic_phase = q.at("harmonic_phase").get<double>();
  p.new_value = q.at("new_value").get<double>();
  p.cycle_shift = q.at("cycle_shift").get<double>();
  p.duty_scale = q.at("duty_scale").get<double>();
  p.target_waveform = enum_from_json<SeasonCategory, 5>(q.at("target_waveform"), "waveform");
  p.new_family = enum_from_json<WaveletFamily, 3>(q.at("new_family"), "wavelet family");
  p.atom_index = q.at("atom_index").get<int>();
  p.scale_factor = q.at("scale_factor").get<double>();
  p.shift_delta = q.at("shift_delta").get<double>();
  p.new_atom = wavelet_atom_from(q.at("new_atom"));
  return s;
}

// ---------------------------------------------------------------- blueprint

Json to_json(const SampleBlueprint& bp) {
  Json channels = Json::array();
  for (const auto& c : bp.channels) {
    channels.push_back({{"trend_category", std::string(to_string(c.trend_category))},
                        {"season_category", std::string(to_string(c.season_category))},
                        {"freq_regime", std::string(to_string(c.freq_regime))},
                        {"noise_level", std::string(to_string(c.noise_level))},
                        {"trend", to_json(c.trend)},
                        {"season", to_json(c.season)},
                        {"noise", to_json(c.noise)}});
  }
  Json edges = Json::array();
  for (std::size_t e = 0; e < bp.dag.edges.size(); ++e)
    edges.push_back(Json::array({bp.dag.edges[e].parent, bp.dag.edges[e].child, bp.arx.gain[e], bp.arx.lag[e]}));
  Json nodes = Json::array();
  for (int i = 0; i < bp.d; ++i) nodes.push_back({{"a", bp.arx.a[i]}, {"c", bp.arx.c[i]}, {"alpha", bp.alphas[i]}});
  Json plan = Json::array();
  for (const auto& s : bp.anomaly_plan) plan.push_back(to_json(s));
  return {{"index", bp.index},
          {"master_seed", bp.master_seed},
          {"sub_seed", bp.sub_seed},
          {"n", bp.n},
          {"d", bp.d},
          {"channels", channels},
          {"dag", {{"n_nodes", bp.dag.n_nodes}, {"topo_order", bp.dag.topo_order}, {"edges", edges}}},
          {"nodes", nodes},
          {"anomaly_plan", plan}};
}

SampleBlueprint blueprint_from_json(const Json& j) {
  try {
    SampleBlueprint bp;
    bp.index = j.at("index").get<std::uint64_t>();
    bp.master_seed = j.at("master_seed").get<std::uint64_t>();
    bp.sub_seed = j.at("sub_seed").get<std::uint64_t>();
    bp.n = j.at("n").get<std::int64_t>();
    bp.d = j.at("d").get<int>();
    for (const auto& c : j.at("channels")) {
      ChannelSpec cs;
      cs.trend_category = enum_from_json<TrendCategory, 5>(c.at("trend_category"), "trend category");
      cs.season_category = enum_from_json<SeasonCategory, 5>(c.at("season_category"), "season category");
      cs.freq_regime = enum_from_json<FreqRegime, 2>(c.at("freq_regime"), "frequency regime");
      cs.noise_level = enum_from_json<NoiseLevel, 4>(c.at("noise_level"), "noise level");
      cs.trend = trend_from_json(c.at("trend"));
      cs.season = season_from_json(c.at("season"));
      cs.noise = noise_from_json(c.at("noise"));
      bp.channels.push_back(std::move(cs));
    }
    const Json& dag = j.at("dag");
    bp.dag.n_nodes = dag.at("n_nodes").get<int>();
    bp.dag.topo_order = dag.at("topo_order").get<std::vector<int>>();
    for (const auto& e : dag.at("edges")) {
      bp.dag.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      bp.arx.gain.push_back(e.at(2).get<double>());
      bp.arx.lag.push_back(e.at(3).get<std::int64_t>());
    }
    const Json& nodes = j.at("nodes");
    bp.arx.a.resize(static_cast<Index>(nodes.size()));
    bp.arx.c.resize(static_cast<Index>(nodes.size()));
    bp.alphas.resize(static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      bp.arx.a[static_cast<Index>(i)] = nodes[i].at("a").get<double>();
      bp.arx.c[static_cast<Index>(i)] = nodes[i].at("c").get<double>();
      bp.alphas[static_cast<Index>(i)] = nodes[i].at("alpha").get<double>();
    }
    for (const auto& s : j.at("anomaly_plan")) bp.anomaly_plan.push_back(anomaly_from_json(s));
    if (static_cast<int>(bp.channels.size()) != bp.d || bp.dag.n_nodes != bp.d || bp.alphas.size() != bp.d)
      throw Error(ErrorCode::SchemaError, "blueprint channel counts disagree");
    return bp;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed blueprint: ") + e.what());
  }
}

}  // namespace tsadforge
