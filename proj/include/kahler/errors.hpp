#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kahler {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range dimension, grid size, index or malformed argument.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The form omega + i ddbar(phi) fails to be positive at some node.
class NotKahlerError : public Error {
 public:
  NotKahlerError(std::size_t node, double x, double value)
      : Error("potential is not Kahler: positivity fails at node " + std::to_string(node) +
              " (x = " + std::to_string(x) + ", value = " + std::to_string(value) + ")"),
        node_(node), x_(x), value_(value)
  {}
  std::size_t node() const { return node_; }
  double x() const { return x_; }
  double value() const { return value_; }

 private:
  std::size_t node_;
  double x_;
  double value_;
};

class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// An intermediate point of a synthetic path left the space of Kahler potentials.
class PathBrokenError : public Error {
 public:
  PathBrokenError(double s, const std::string& why)
      : Error("path broken at s = " + std::to_string(s) + ": " + why), s_(s)
  {}
  double s() const { return s_; }

 private:
  double s_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// The Ricci-positive perturbation did not produce a Ricci-positive metric.
class GeneratorError : public Error {
 public:
  GeneratorError(double achieved_min)
      : Error("perturbed metric not Ricci-positive, min eigenvalue " + std::to_string(achieved_min)),
        achieved_min_(achieved_min)
  {}
  double achieved_min() const { return achieved_min_; }

 private:
  double achieved_min_;
};

}  // namespace kahler
