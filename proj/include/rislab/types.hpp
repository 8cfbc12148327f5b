#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rislab {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// maps any angle into [-pi, pi)
double wrap_phase(double theta);

}  // namespace rislab
