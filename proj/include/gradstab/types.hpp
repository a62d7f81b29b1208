#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace gradstab {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NonMemberError : public Error {
 public:
  using Error::Error;
};
class NumericFailureError : public Error {
 public:
  using Error::Error;
};
class NotInParabolicError : public Error {
 public:
  using Error::Error;
};
class InvalidPointError : public Error {
 public:
  using Error::Error;
};
class NotTangentError : public Error {
 public:
  using Error::Error;
};
class NotFixedError : public Error {
 public:
  using Error::Error;
};
class FlowOverflowError : public Error {
 public:
  using Error::Error;
};
class ZeroDirectionError : public Error {
 public:
  using Error::Error;
};
class NotCommutingError : public Error {
 public:
  using Error::Error;
};
class NotSemistableError : public Error {
 public:
  using Error::Error;
};
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};
class UndecidedError : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gradstab
