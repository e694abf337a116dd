#pragma once

// Blueprint -> baselines -> causal system -> injections -> labels, and the
// on-disk dataset layout:
//   out_dir/manifest.json
//   out_dir/samples/sample_NNNNNN/{values,labels,rootcause,propagated}.csv, meta.json[, clean.csv]

#include "tsadforge/labels.hpp"
#include "tsadforge/priors.hpp"
#include "tsadforge/serialize.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tsadforge {

struct Sample {
  SampleBlueprint blueprint;
  std::vector<BaselineSeries> baselines;  // clean, per channel
  Panel values;                           // post-injection
  Panel clean;                            // pre-injection
  LabelMasks masks;
  Json meta;
};

/// Realizes a blueprint. Errors carry the sample index.
Sample realize_blueprint(const SampleBlueprint& bp, const LabelPolicy& policy = {}, const OutputOptions& output = {});

/// sample_blueprint followed by realize_blueprint, with config.master_seed
/// replaced by `master_seed`.
Sample generate_sample(const GeneratorConfig& config, std::uint64_t master_seed, std::uint64_t index);

/// Re-runs generation from a meta.json document.
Sample regenerate_from_meta(const Json& meta);

/// Serialized files of one sample, in digest order.
struct SampleFiles {
  std::vector<std::pair<std::string, std::string>> files;  // (name, bytes)
};

SampleFiles render_sample_files(const Sample& sample, const OutputOptions& output);

/// 64-bit FNV-1a over the concatenation of the files in digest order,
/// rendered as 16 lowercase hex digits.
std::string sample_digest(const SampleFiles& files);
std::string hex_digest(std::uint64_t h);

std::string sample_dir_name(std::uint64_t index);

/// Writes the dataset through a temporary sibling directory and renames it
/// into place once the manifest is written. An existing out_dir is replaced
/// only when it is empty or holds a previous manifest. Throws IoError.
Json generate_dataset(const GeneratorConfig& config, std::uint64_t master_seed, const std::string& out_dir,
                      int workers);

/// Recomputes the digest of a sample directory written by generate_dataset.
/// `clean` is included when clean.csv exists.
std::string digest_sample_dir(const std::string& dir);

}  // namespace tsadforge
