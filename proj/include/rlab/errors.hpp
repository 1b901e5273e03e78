#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rlab {

/// Argument outside the mathematical domain of an operation (e.g. beta > 1).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure finished but missed its accuracy contract.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Eigen-solver failed to converge; carries the last residual.
class spectral_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
  double residual() const noexcept { return achieved(); }
};

/// Linear solve with (I - R(s)) was too ill-conditioned.
class resolvent_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
  double condition() const noexcept { return achieved(); }
};

/// Tail or asymptotic fit could not be performed on the data.
class fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Excursion exceeded the iteration budget.  Holds the partial state so the
/// caller can decide whether to discard the sample.
struct PartialExcursion {
  double y = 0.0;           // start point in Y
  double x = 0.0;           // last point reached
  std::uint64_t steps = 0;  // iterations performed (or skipped by a jump)
  double tau = 0.0;         // roof accumulated so far
};

class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, PartialExcursion partial)
      : std::runtime_error(what), partial_(partial) {}
  const PartialExcursion& partial() const noexcept { return partial_; }

 private:
  PartialExcursion partial_;
};

/// Bad experiment configuration; names the offending key.
class config_error : public std::runtime_error {
 public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace rlab
