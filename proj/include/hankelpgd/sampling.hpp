#ifndef HANKELPGD_SAMPLING_HPP
#define HANKELPGD_SAMPLING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hankelpgd/types.hpp"

namespace hankelpgd {

enum class SampleMode { with_replacement, without_replacement };

std::string to_string(SampleMode mode);
SampleMode sample_mode_from_string(const std::string& s);

/// Multiset of observed flat indices. Multi-dimensional signals use row-major
/// flat indices (last axis fastest). Immutable after construction.
class SampleSet {
 public:
  SampleSet(Index ambient, SampleMode mode, std::vector<Index> indices);

  /// Uniform draw, deterministic given the seed. Without replacement the
  /// result is a uniformly random m-subset in draw order; with replacement
  /// duplicates are kept in draw order.
  static SampleSet draw(Index ambient, Index count, SampleMode mode,
                        std::uint64_t seed);

  Index ambient_size() const { return ambient_; }
  Index count() const { return static_cast<Index>(indices_.size()); }
  double ratio() const {
    return static_cast<double>(count()) / static_cast<double>(ambient_);
  }
  SampleMode mode() const { return mode_; }
  const std::vector<Index>& indices() const { return indices_; }

  /// Entry multiplicities as a length-n vector (zero off the support).
  const RealVector& multiplicities() const { return multiplicities_; }

  /// Distinct observed indices in increasing order.
  const std::vector<Index>& support() const { return support_; }

  /// The sampling projection: entry a of the output is
  /// multiplicity(a) * z[a], so duplicate draws accumulate.
  CxVector project(const CxVector& z) const;

  /// `index[,index...]`
  std::string to_csv_line() const;
  static SampleSet from_csv_line(Index ambient, SampleMode mode,
                                 const std::string& line);

  nlohmann::json to_json() const;
  static SampleSet from_json(const nlohmann::json& j);

 private:
  Index ambient_ = 0;
  SampleMode mode_ = SampleMode::with_replacement;
  std::vector<Index> indices_;
  std::vector<Index> support_;
  RealVector multiplicities_;
};

}  // namespace hankelpgd

#endif  // HANKELPGD_SAMPLING_HPP
