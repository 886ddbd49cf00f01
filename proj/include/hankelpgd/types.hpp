#ifndef HANKELPGD_TYPES_HPP
#define HANKELPGD_TYPES_HPP

#include <Eigen/Core>
#include <complex>

namespace hankelpgd {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CxVector = Eigen::VectorXcd;
using CxMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

}  // namespace hankelpgd

#endif  // HANKELPGD_TYPES_HPP
