#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fnls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RegimeError : public Error {
 public:
  using Error::Error;
};

// J_eps and gamma are undefined at eps = i/n.
class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ExactnessError : public Error {
 public:
  using Error::Error;
};

class InconclusiveError : public Error {
 public:
  InconclusiveError(const std::string& what, std::int64_t required_bound)
      : Error(what), required_bound_(required_bound) {}
  std::int64_t required_bound() const { return required_bound_; }

 private:
  std::int64_t required_bound_;
};

class NonContractiveError : public Error {
 public:
  NonContractiveError(const std::string& what, double ratio, int iterations)
      : Error(what), ratio_(ratio), iterations_(iterations) {}
  double ratio() const { return ratio_; }
  int iterations() const { return iterations_; }

 private:
  double ratio_;
  int iterations_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time, double sup_modulus)
      : Error(what), time_(time), sup_modulus_(sup_modulus) {}
  double time() const { return time_; }
  double sup_modulus() const { return sup_modulus_; }

 private:
  double time_;
  double sup_modulus_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

}  // namespace fnls
