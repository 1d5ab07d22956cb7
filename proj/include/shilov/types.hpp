#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shilov {

using Index = Eigen::Index;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;
using VectorXc = ComplexVector<double>;
using MatrixXc = ComplexMatrix<double>;

// Error hierarchy. Analysis findings are reported as data (ValidationReport);
// these are reserved for malformed input and failed preconditions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct NotInvertible : Error {
  using Error::Error;
};
struct GenericityFailure : Error {
  using Error::Error;
};
struct EmptySample : Error {
  using Error::Error;
};

struct Check {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::string subject;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  void add(std::string name, bool ok, double residual = 0.0, std::string detail = {}) {
    checks.push_back({std::move(name), ok, residual, std::move(detail)});
  }
};

}  // namespace shilov
