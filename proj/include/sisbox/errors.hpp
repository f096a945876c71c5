#pragma once

#include <stdexcept>
#include <string>

namespace sisbox {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectrum reaches outside [-K, K).
class BandwidthOverflow : public Error {
 public:
  BandwidthOverflow(int required_k, int actual_k)
      : Error("spectrum exceeds grid bandwidth K=" + std::to_string(actual_k) +
              "; required K=" + std::to_string(required_k)),
        required_k_(required_k) {}
  int required_k() const { return required_k_; }

 private:
  int required_k_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class NotAGrammian : public Error {
 public:
  using Error::Error;
};

class DegenerateSpace : public Error {
 public:
  using Error::Error;
};

class NotASamplingSpace : public Error {
 public:
  NotASamplingSpace(const std::string& what, double omega) : Error(what), omega_(omega) {}
  double omega() const { return omega_; }

 private:
  double omega_;
};

class NotInSpace : public Error {
 public:
  NotInSpace(const std::string& name, double residual)
      : Error("function '" + name + "' is not a member of the space (relative residual " +
              std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  PartitionError(const std::string& what, double measure) : Error(what), measure_(measure) {}
  double measure() const { return measure_; }

 private:
  double measure_;
};

class CatalogError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace sisbox
