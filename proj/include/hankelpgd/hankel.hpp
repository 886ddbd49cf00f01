#ifndef HANKELPGD_HANKEL_HPP
#define HANKELPGD_HANKEL_HPP

#include <optional>
#include <span>
#include <vector>

#include "hankelpgd/fft_grid.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

/// Geometry of a (multi-fold) Hankel lifting.
///
/// A signal on a d-dimensional grid of extents N_1 x ... x N_d (d in {1,2,3})
/// lifts to a matrix with prod(n_i) rows and prod(N_i - n_i + 1) columns,
/// where the pencil split n_i is a free parameter of the lifting. The a-th
/// skew-diagonal of the axis-i block structure has
///
///   w_a = min(a + 1, n_i, N_i - n_i + 1, N_i - a)
///
/// entries; the joint weight of a multi-index is the product over axes. The
/// scaling operator that multiplies entry a by sqrt(w_a) turns the plain
/// lifting into an isometry from signals to lifted matrices.
///
/// Entries of d-dimensional signals are stored flat in row-major order
/// (last axis fastest); the same convention is used for lifted row/column
/// multi-indices. Values are immutable after construction and safe to share
/// across threads.
class HankelShape {
 public:
  /// Builds the lifting geometry. The default pencil is the squarest split
  /// n_i = ceil((N_i + 1) / 2), which minimizes the aspect constant.
  explicit HankelShape(std::vector<Index> dims,
                       std::optional<std::vector<Index>> pencil = std::nullopt);

  Index ndim() const { return static_cast<Index>(dims_.size()); }
  const std::vector<Index>& dims() const { return dims_; }

  /// Per-axis row counts n_i of the lifted matrix.
  const std::vector<Index>& pencil() const { return pencil_; }

  /// Per-axis column counts N_i - n_i + 1 of the lifted matrix.
  const std::vector<Index>& copencil() const { return copencil_; }

  /// Total signal length n = prod(N_i).
  Index ambient_size() const { return ambient_; }

  Index lifted_rows() const { return rows_; }
  Index lifted_cols() const { return cols_; }

  /// Aspect constant max(n / rows, n / cols).
  double aspect_const() const { return aspect_; }

  /// Skew-diagonal entry counts along one axis (length N_i, palindromic).
  const RealVector& axis_weights(Index axis) const {
    return axis_weights_[static_cast<std::size_t>(axis)];
  }

  /// Joint sqrt-weights, flattened row-major over the ambient grid.
  const RealVector& sqrt_weights() const { return sqrt_weights_; }

 private:
  std::vector<Index> dims_;
  std::vector<Index> pencil_;
  std::vector<Index> copencil_;
  std::vector<RealVector> axis_weights_;
  RealVector sqrt_weights_;
  Index ambient_ = 1;
  Index rows_ = 1;
  Index cols_ = 1;
  double aspect_ = 1.0;
};

/// Convenience factory matching the shape's constructor.
inline HankelShape make_shape(std::vector<Index> dims,
                              std::optional<std::vector<Index>> pencil =
                                  std::nullopt) {
  return HankelShape(std::move(dims), std::move(pencil));
}

enum class ScaleDir { forward, inverse };

/// Multiplies (forward) or divides (inverse) every entry by its joint
/// sqrt-weight. The two directions are exact inverses of each other.
CxVector d_scale(const HankelShape& shape, const CxVector& z, ScaleDir dir);

/// Skew-diagonal sums of the factored lifted matrix, rescaled by the inverse
/// sqrt-weights: the adjoint of the weighted lifting applied to
/// `row_factor * col_factor^*`. Runs r d-dimensional FFT convolutions and
/// never materializes the lifted product.
CxVector gstar_factored(const HankelShape& shape, const CxMatrix& row_factor,
                        const CxMatrix& col_factor);

/// Implicit handle to the weighted Hankel lifting of a signal: the matrix
/// whose (i, j) entry is z[i + j] / sqrt(w[i + j]) (multi-index addition).
/// Products with vectors and skinny factors run one FFT per column against a
/// spectrum cached at construction. The referenced shape must outlive the
/// operator.
class LiftedOperator {
 public:
  LiftedOperator(const HankelShape& shape, const CxVector& z);

  Index rows() const { return shape_->lifted_rows(); }
  Index cols() const { return shape_->lifted_cols(); }
  const HankelShape& shape() const { return *shape_; }

  /// `lift * factor` for a cols x r factor; one FFT round trip per column.
  CxMatrix multiply(const CxMatrix& factor) const;

  /// `lift^* * factor` for a rows x r factor.
  CxMatrix multiply_adjoint(const CxMatrix& factor) const;

  CxVector apply(const CxVector& x) const { return multiply(x); }
  CxVector apply_adjoint(const CxVector& x) const {
    return multiply_adjoint(x);
  }

  /// Dense materialization, guarded to small sizes; the solver never needs it.
  CxMatrix dense(Index max_elements = kDenseLimit) const;

  static constexpr Index kDenseLimit = Index(1) << 22;

 private:
  const HankelShape* shape_;
  FftGrid grid_;
  CxVector weighted_;  // z / sqrt(w), ambient layout
  CxVector spectrum_;  // FFT of weighted_, padded
};

/// The lifting handle for a signal (implicit by default).
inline LiftedOperator g_apply(const HankelShape& shape, const CxVector& z) {
  return LiftedOperator(shape, z);
}

enum class LiftSide { left, right };

/// side = left:  (lift of w) * factor          (factor is cols x r)
/// side = right: (lift of w)^* * factor        (factor is rows x r)
CxMatrix g_vector_times_factor(const HankelShape& shape, const CxVector& w,
                               const CxMatrix& factor, LiftSide side);

}  // namespace hankelpgd

#endif  // HANKELPGD_HANKEL_HPP
