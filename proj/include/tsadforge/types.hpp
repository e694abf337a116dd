#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tsadforge {

template <typename Scalar>
using SeriesT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using PanelT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One channel over time.
using Series = SeriesT<double>;
/// n x d, one column per channel (column-major keeps channels contiguous).
using Panel = PanelT<double>;
/// n x d binary labels stored as 0/1 bytes.
using Mask = PanelT<std::uint8_t>;
using MaskSeries = SeriesT<std::uint8_t>;

using Index = Eigen::Index;

enum class ErrorCode {
  InvalidConfig,
  InvalidSpec,
  NonStationaryAR,
  LengthMismatch,
  ShapeMismatch,
  KindMismatch,
  WindowOutOfRange,
  NoGroundTruth,
  InputTooShort,
  EmptyInput,
  IoError,
  ParseError,
  SchemaError,
  DigestMismatch,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace tsadforge
