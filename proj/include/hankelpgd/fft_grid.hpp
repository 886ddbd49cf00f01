#ifndef HANKELPGD_FFT_GRID_HPP
#define HANKELPGD_FFT_GRID_HPP

#include <span>
#include <vector>

#include "hankelpgd/types.hpp"

namespace hankelpgd {

namespace detail {

/// Row-major flattening: last axis varies fastest.
inline Index flatten(std::span<const Index> idx, std::span<const Index> dims) {
  Index flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    flat = flat * dims[k] + idx[k];
  }
  return flat;
}

inline void unflatten(Index flat, std::span<const Index> dims,
                      std::span<Index> idx) {
  for (std::size_t k = dims.size(); k-- > 0;) {
    idx[k] = flat % dims[k];
    flat /= dims[k];
  }
}

inline Index next_pow2(Index x) {
  Index p = 1;
  while (p < x) p <<= 1;
  return p;
}

}  // namespace detail

/// Zero-padded power-of-two grid shared by the FFT-based Hankel products.
/// Each axis is padded to the next power of two at least as long as the
/// requested axis, which is enough for the cyclic convolution reads used by
/// the lifting operators. All methods are pure; a grid can be shared across
/// threads.
class FftGrid {
 public:
  explicit FftGrid(std::span<const Index> target_dims);

  Index total_size() const { return total_; }
  const std::vector<Index>& padded_dims() const { return dims_; }

  /// Copies `src` (row-major over `src_dims`) into a zeroed padded buffer.
  /// With `reversed`, the source is index-reversed along every axis first.
  CxVector embed(const CxVector& src, std::span<const Index> src_dims,
                 bool reversed = false) const;

  /// Reads the window of extent `out_dims` at per-axis `offsets`.
  CxVector extract(const CxVector& buf, std::span<const Index> offsets,
                   std::span<const Index> out_dims) const;

  /// In-place multi-dimensional transform (separable 1-D passes per axis).
  /// The inverse applies the usual 1/L scaling.
  void transform(CxVector& buf, bool inverse) const;

 private:
  std::vector<Index> dims_;
  Index total_ = 1;
};

}  // namespace hankelpgd

#endif  // HANKELPGD_FFT_GRID_HPP
