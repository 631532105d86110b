/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every vortex_atlas module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vortex_atlas {

enum class ErrorKind {
  Shape,
  DivisionNearZero,
  NonFinite,
  Syntax,
  Eval,
  UnknownField,
  NearSingularMatrix,
  SingularJacobian,
  NoConvergence,
  InsufficientOrder,
  NotOnDislocation,
  AllOrdersVanish,
  NotCritical,
  OnDislocation,
  NotTimeDependent,
  BadParameter,
  DimMismatch,
  NotHelmholtzJet,
  IO,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define VORTEX_ATLAS_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {} \
  };

VORTEX_ATLAS_DEFINE_ERROR(DivisionNearZero)
VORTEX_ATLAS_DEFINE_ERROR(NonFinite)
VORTEX_ATLAS_DEFINE_ERROR(Eval)
VORTEX_ATLAS_DEFINE_ERROR(UnknownField)
VORTEX_ATLAS_DEFINE_ERROR(NearSingularMatrix)
VORTEX_ATLAS_DEFINE_ERROR(NoConvergence)
VORTEX_ATLAS_DEFINE_ERROR(InsufficientOrder)
VORTEX_ATLAS_DEFINE_ERROR(NotOnDislocation)
VORTEX_ATLAS_DEFINE_ERROR(AllOrdersVanish)
VORTEX_ATLAS_DEFINE_ERROR(NotCritical)
VORTEX_ATLAS_DEFINE_ERROR(OnDislocation)
VORTEX_ATLAS_DEFINE_ERROR(NotTimeDependent)
VORTEX_ATLAS_DEFINE_ERROR(BadParameter)
VORTEX_ATLAS_DEFINE_ERROR(DimMismatch)
VORTEX_ATLAS_DEFINE_ERROR(IO)

#undef VORTEX_ATLAS_DEFINE_ERROR

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Shape, what) {}
};

using EvalError = Eval;
using IOError = IO;

/// Parse failure with the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& what)
      : Error(ErrorKind::Syntax, what + " at offset " + std::to_string(offset)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Newton hit a rank-deficient Jacobian. The iterate is kept so callers can
/// classify the (possibly degenerate) zero from its jet.
class SingularJacobian : public Error {
 public:
  SingularJacobian(std::vector<double> point, double residual,
                   const std::string& what)
      : Error(ErrorKind::SingularJacobian, what),
        point_(std::move(point)),
        residual_(residual) {}

  const std::vector<double>& point() const noexcept { return point_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> point_;
  double residual_;
};

class NotHelmholtzJet : public Error {
 public:
  NotHelmholtzJet(std::string relation, double violation)
      : Error(ErrorKind::NotHelmholtzJet,
              "jet violates Helmholtz relation " + relation + " by " +
                  std::to_string(violation)),
        relation_(std::move(relation)),
        violation_(violation) {}

  const std::string& relation() const noexcept { return relation_; }
  double violation() const noexcept { return violation_; }

 private:
  std::string relation_;
  double violation_;
};

}  // namespace vortex_atlas
