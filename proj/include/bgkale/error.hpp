#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bgkale {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition on an argument violated (bad grid size, non-positive length, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A macroscopic state handed in by the caller is not physical (rho <= 0 or T <= 0).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A state recovered by quadrature is not physical; signals vacuum or blow-up.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DeficientStencil : public Error {
 public:
  DeficientStencil(std::size_t particle, const std::string& what)
      : Error("deficient stencil at particle " + std::to_string(particle) + ": " + what),
        particle_(particle) {}
  std::size_t particle() const noexcept { return particle_; }

 private:
  std::size_t particle_;
};

class OutOfDomain : public Error {
 public:
  explicit OutOfDomain(std::size_t particle)
      : Error("particle " + std::to_string(particle) + " lies outside the domain"),
        particle_(particle) {}
  std::size_t particle() const noexcept { return particle_; }

 private:
  std::size_t particle_;
};

/// Outgoing-flux normalisation of a diffuse wall vanished.
class DegenerateWall : public Error {
 public:
  using Error::Error;
};

/// A run was stopped for numerical reasons (stable time step exceeded, degenerate state).
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace bgkale
