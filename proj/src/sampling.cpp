#include "hankelpgd/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/rng.hpp"

namespace hankelpgd {

std::string to_string(SampleMode mode) {
  return mode == SampleMode::with_replacement ? "with_replacement"
                                              : "without_replacement";
}

SampleMode sample_mode_from_string(const std::string& s) {
  if (s == "with_replacement" || s == "with") {
    return SampleMode::with_replacement;
  }
  if (s == "without_replacement" || s == "without") {
    return SampleMode::without_replacement;
  }
  throw ValidationError("unknown sampling mode: " + s);
}

SampleSet::SampleSet(Index ambient, SampleMode mode,
                     std::vector<Index> indices)
    : ambient_(ambient), mode_(mode), indices_(std::move(indices)) {
  if (ambient_ < 1) throw ValidationError("SampleSet: ambient size must be >= 1");
  if (indices_.empty()) throw ValidationError("SampleSet: no indices");
  multiplicities_ = RealVector::Zero(ambient_);
  for (Index a : indices_) {
    if (a < 0 || a >= ambient_) {
      throw ValidationError("SampleSet: index out of range");
    }
    multiplicities_[a] += 1.0;
  }
  for (Index a = 0; a < ambient_; ++a) {
    if (multiplicities_[a] > 0.0) {
      support_.push_back(a);
      if (mode_ == SampleMode::without_replacement &&
          multiplicities_[a] > 1.0) {
        throw ValidationError(
            "SampleSet: duplicate index in without-replacement mode");
      }
    }
  }
}

SampleSet SampleSet::draw(Index ambient, Index count, SampleMode mode,
                          std::uint64_t seed) {
  if (count < 1) throw ValidationError("SampleSet::draw: count must be >= 1");
  Rng rng(seed);
  std::vector<Index> indices;
  indices.reserve(count);
  if (mode == SampleMode::with_replacement) {
    for (Index k = 0; k < count; ++k) {
      indices.push_back(static_cast<Index>(rng.uniform_index(ambient)));
    }
  } else {
    if (count > ambient) {
      throw ValidationError(
          "SampleSet::draw: count exceeds ambient size without replacement");
    }
    std::vector<Index> pool(ambient);
    std::iota(pool.begin(), pool.end(), Index(0));
    for (Index k = 0; k < count; ++k) {
      const Index j = k + static_cast<Index>(rng.uniform_index(ambient - k));
      std::swap(pool[k], pool[j]);
      indices.push_back(pool[k]);
    }
  }
  return SampleSet(ambient, mode, std::move(indices));
}

CxVector SampleSet::project(const CxVector& z) const {
  if (z.size() != ambient_) {
    throw DimensionError("SampleSet::project: length mismatch");
  }
  CxVector out = CxVector::Zero(ambient_);
  for (Index a : support_) out[a] = multiplicities_[a] * z[a];
  return out;
}

std::string SampleSet::to_csv_line() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) os << ',';
    os << indices_[k];
  }
  return os.str();
}

SampleSet SampleSet::from_csv_line(Index ambient, SampleMode mode,
                                   const std::string& line) {
  std::vector<Index> indices;
  std::istringstream is(line);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    indices.push_back(static_cast<Index>(std::stoll(tok)));
  }
  return SampleSet(ambient, mode, std::move(indices));
}

nlohmann::json SampleSet::to_json() const {
  return nlohmann::json{
      {"n", ambient_}, {"mode", to_string(mode_)}, {"indices", indices_}};
}

SampleSet SampleSet::from_json(const nlohmann::json& j) {
  return SampleSet(j.at("n").get<Index>(),
                   sample_mode_from_string(j.at("mode").get<std::string>()),
                   j.at("indices").get<std::vector<Index>>());
}

}  // namespace hankelpgd
