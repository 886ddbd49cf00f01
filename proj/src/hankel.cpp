#include "hankelpgd/hankel.hpp"

#include <algorithm>
#include <cmath>

#include "hankelpgd/errors.hpp"

namespace hankelpgd {

HankelShape::HankelShape(std::vector<Index> dims,
                         std::optional<std::vector<Index>> pencil)
    : dims_(std::move(dims)) {
  const std::size_t nd = dims_.size();
  if (nd < 1 || nd > 3) {
    throw ValidationError("HankelShape: dimension must be 1, 2 or 3");
  }
  for (Index d : dims_) {
    if (d < 1) throw ValidationError("HankelShape: axis length must be >= 1");
  }
  if (pencil) {
    if (pencil->size() != nd) {
      throw ValidationError("HankelShape: pencil rank mismatch");
    }
    pencil_ = std::move(*pencil);
    for (std::size_t k = 0; k < nd; ++k) {
      if (pencil_[k] < 1 || pencil_[k] > dims_[k]) {
        throw ValidationError("HankelShape: pencil out of range");
      }
    }
  } else {
    pencil_.resize(nd);
    for (std::size_t k = 0; k < nd; ++k) pencil_[k] = (dims_[k] + 2) / 2;
  }

  copencil_.resize(nd);
  axis_weights_.resize(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    copencil_[k] = dims_[k] - pencil_[k] + 1;
    ambient_ *= dims_[k];
    rows_ *= pencil_[k];
    cols_ *= copencil_[k];
    RealVector w(dims_[k]);
    for (Index a = 0; a < dims_[k]; ++a) {
      w[a] = static_cast<double>(std::min(
          {a + 1, pencil_[k], copencil_[k], dims_[k] - a}));
    }
    axis_weights_[k] = std::move(w);
  }
  aspect_ = std::max(static_cast<double>(ambient_) / rows_,
                     static_cast<double>(ambient_) / cols_);

  sqrt_weights_.resize(ambient_);
  std::vector<Index> idx(nd);
  for (Index flat = 0; flat < ambient_; ++flat) {
    detail::unflatten(flat, dims_, idx);
    double w = 1.0;
    for (std::size_t k = 0; k < nd; ++k) w *= axis_weights_[k][idx[k]];
    sqrt_weights_[flat] = std::sqrt(w);
  }
}

CxVector d_scale(const HankelShape& shape, const CxVector& z, ScaleDir dir) {
  if (z.size() != shape.ambient_size()) {
    throw DimensionError("d_scale: signal length mismatch");
  }
  CxVector out(z.size());
  const RealVector& sw = shape.sqrt_weights();
  if (dir == ScaleDir::forward) {
    for (Index a = 0; a < z.size(); ++a) out[a] = z[a] * sw[a];
  } else {
    for (Index a = 0; a < z.size(); ++a) out[a] = z[a] / sw[a];
  }
  return out;
}

CxVector gstar_factored(const HankelShape& shape, const CxMatrix& row_factor,
                        const CxMatrix& col_factor) {
  if (row_factor.rows() != shape.lifted_rows() ||
      col_factor.rows() != shape.lifted_cols() ||
      row_factor.cols() != col_factor.cols()) {
    throw DimensionError("gstar_factored: factor dimensions do not conform");
  }
  const FftGrid grid(shape.dims());
  CxVector acc = CxVector::Zero(grid.total_size());
  for (Index l = 0; l < row_factor.cols(); ++l) {
    CxVector a = grid.embed(row_factor.col(l), shape.pencil());
    grid.transform(a, false);
    CxVector b = grid.embed(col_factor.col(l).conjugate(), shape.copencil());
    grid.transform(b, false);
    acc.array() += a.array() * b.array();
  }
  grid.transform(acc, true);
  const std::vector<Index> zeros(shape.dims().size(), 0);
  CxVector out = grid.extract(acc, zeros, shape.dims());
  const RealVector& sw = shape.sqrt_weights();
  for (Index i = 0; i < out.size(); ++i) out[i] /= sw[i];
  return out;
}

LiftedOperator::LiftedOperator(const HankelShape& shape, const CxVector& z)
    : shape_(&shape), grid_(shape.dims()) {
  if (z.size() != shape.ambient_size()) {
    throw DimensionError("LiftedOperator: signal length mismatch");
  }
  weighted_.resize(z.size());
  const RealVector& sw = shape.sqrt_weights();
  for (Index a = 0; a < z.size(); ++a) weighted_[a] = z[a] / sw[a];
  spectrum_ = grid_.embed(weighted_, shape.dims());
  grid_.transform(spectrum_, false);
}

CxMatrix LiftedOperator::multiply(const CxMatrix& factor) const {
  if (factor.rows() != cols()) {
    throw DimensionError("LiftedOperator::multiply: factor height mismatch");
  }
  const auto& sh = *shape_;
  const std::size_t nd = sh.dims().size();
  std::vector<Index> offs(nd);
  for (std::size_t k = 0; k < nd; ++k) offs[k] = sh.copencil()[k] - 1;
  CxMatrix out(rows(), factor.cols());
  for (Index l = 0; l < factor.cols(); ++l) {
    CxVector buf = grid_.embed(factor.col(l), sh.copencil(), /*reversed=*/true);
    grid_.transform(buf, false);
    buf.array() *= spectrum_.array();
    grid_.transform(buf, true);
    out.col(l) = grid_.extract(buf, offs, sh.pencil());
  }
  return out;
}

CxMatrix LiftedOperator::multiply_adjoint(const CxMatrix& factor) const {
  if (factor.rows() != rows()) {
    throw DimensionError(
        "LiftedOperator::multiply_adjoint: factor height mismatch");
  }
  const auto& sh = *shape_;
  const std::size_t nd = sh.dims().size();
  std::vector<Index> offs(nd);
  for (std::size_t k = 0; k < nd; ++k) offs[k] = sh.pencil()[k] - 1;
  CxMatrix out(cols(), factor.cols());
  for (Index l = 0; l < factor.cols(); ++l) {
    CxVector buf =
        grid_.embed(factor.col(l).conjugate(), sh.pencil(), /*reversed=*/true);
    grid_.transform(buf, false);
    buf.array() *= spectrum_.array();
    grid_.transform(buf, true);
    out.col(l) = grid_.extract(buf, offs, sh.copencil()).conjugate();
  }
  return out;
}

CxMatrix LiftedOperator::dense(Index max_elements) const {
  const auto& sh = *shape_;
  if (rows() * cols() > max_elements) {
    throw ValidationError("LiftedOperator::dense: lifting too large");
  }
  const std::size_t nd = sh.dims().size();
  CxMatrix out(rows(), cols());
  std::vector<Index> ri(nd), ci(nd), ai(nd);
  for (Index i = 0; i < rows(); ++i) {
    detail::unflatten(i, sh.pencil(), ri);
    for (Index j = 0; j < cols(); ++j) {
      detail::unflatten(j, sh.copencil(), ci);
      for (std::size_t k = 0; k < nd; ++k) ai[k] = ri[k] + ci[k];
      out(i, j) = weighted_[detail::flatten(ai, sh.dims())];
    }
  }
  return out;
}

CxMatrix g_vector_times_factor(const HankelShape& shape, const CxVector& w,
                               const CxMatrix& factor, LiftSide side) {
  const LiftedOperator lift(shape, w);
  return side == LiftSide::left ? lift.multiply(factor)
                                : lift.multiply_adjoint(factor);
}

}  // namespace hankelpgd
