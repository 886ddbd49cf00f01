#include "hankelpgd/fft_grid.hpp"

#include <unsupported/Eigen/FFT>

#include "hankelpgd/errors.hpp"

namespace hankelpgd {

namespace {

// One transform object per thread; it caches twiddle tables per length.
Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

FftGrid::FftGrid(std::span<const Index> target_dims) {
  if (target_dims.empty()) {
    throw ValidationError("FftGrid: empty dimension list");
  }
  dims_.reserve(target_dims.size());
  for (Index d : target_dims) {
    if (d < 1) throw ValidationError("FftGrid: axis length must be positive");
    dims_.push_back(detail::next_pow2(d));
    total_ *= dims_.back();
  }
}

CxVector FftGrid::embed(const CxVector& src, std::span<const Index> src_dims,
                        bool reversed) const {
  CxVector dst = CxVector::Zero(total_);
  const std::size_t nd = dims_.size();
  if (src_dims.size() != nd) {
    throw DimensionError("FftGrid::embed: rank mismatch");
  }
  Index count = 1;
  for (std::size_t k = 0; k < nd; ++k) {
    if (src_dims[k] > dims_[k]) {
      throw DimensionError("FftGrid::embed: source exceeds padded grid");
    }
    count *= src_dims[k];
  }
  if (src.size() != count) {
    throw DimensionError("FftGrid::embed: source size mismatch");
  }
  if (nd == 1) {
    if (!reversed) {
      dst.head(count) = src;
    } else {
      dst.head(count) = src.reverse();
    }
    return dst;
  }
  std::vector<Index> idx(nd);
  for (Index flat = 0; flat < count; ++flat) {
    detail::unflatten(flat, src_dims, idx);
    if (reversed) {
      for (std::size_t k = 0; k < nd; ++k) idx[k] = src_dims[k] - 1 - idx[k];
    }
    dst[detail::flatten(idx, dims_)] = src[flat];
  }
  return dst;
}

CxVector FftGrid::extract(const CxVector& buf, std::span<const Index> offsets,
                          std::span<const Index> out_dims) const {
  const std::size_t nd = dims_.size();
  if (offsets.size() != nd || out_dims.size() != nd) {
    throw DimensionError("FftGrid::extract: rank mismatch");
  }
  Index count = 1;
  for (std::size_t k = 0; k < nd; ++k) count *= out_dims[k];
  CxVector out(count);
  if (nd == 1) {
    out = buf.segment(offsets[0], count);
    return out;
  }
  std::vector<Index> idx(nd);
  for (Index flat = 0; flat < count; ++flat) {
    detail::unflatten(flat, out_dims, idx);
    for (std::size_t k = 0; k < nd; ++k) idx[k] += offsets[k];
    out[flat] = buf[detail::flatten(idx, dims_)];
  }
  return out;
}

void FftGrid::transform(CxVector& buf, bool inverse) const {
  if (buf.size() != total_) {
    throw DimensionError("FftGrid::transform: buffer size mismatch");
  }
  auto& fft = thread_fft();
  const std::size_t nd = dims_.size();
  if (nd == 1) {
    CxVector tmp(total_);
    if (inverse) {
      fft.inv(tmp.data(), buf.data(), total_);
    } else {
      fft.fwd(tmp.data(), buf.data(), total_);
    }
    buf.swap(tmp);
    return;
  }
  // Separable passes: axis k has stride prod(dims after k).
  std::vector<Complex> line;
  for (std::size_t k = 0; k < nd; ++k) {
    const Index len = dims_[k];
    Index stride = 1;
    for (std::size_t j = k + 1; j < nd; ++j) stride *= dims_[j];
    const Index outer = total_ / (len * stride);
    line.resize(len);
    std::vector<Complex> transformed(len);
    for (Index o = 0; o < outer; ++o) {
      for (Index s = 0; s < stride; ++s) {
        const Index base = o * len * stride + s;
        for (Index t = 0; t < len; ++t) line[t] = buf[base + t * stride];
        if (inverse) {
          fft.inv(transformed.data(), line.data(), len);
        } else {
          fft.fwd(transformed.data(), line.data(), len);
        }
        for (Index t = 0; t < len; ++t) {
          buf[base + t * stride] = transformed[t];
        }
      }
    }
  }
}

}  // namespace hankelpgd
