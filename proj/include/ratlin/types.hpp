#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace ratlin {

using cplx = std::complex<double>;

// Dense storage is Eigen's default column-major layout throughout.
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

using ScalarFunction = std::function<cplx(cplx)>;

}  // namespace ratlin
