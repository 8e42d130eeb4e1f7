#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abreu {

enum class ErrorKind {
  // polytope
  UnboundedPolytope,
  EmptyInterior,
  NonDelzantVertex,
  RedundantFacet,
  InvalidPolytope,
  // quadrature
  InvalidLevel,
  NonFiniteIntegrand,
  // potentials
  BoundaryEvaluation,
  NonInteriorPoint,
  MollifierTooWide,
  NonConvexInput,
  // functional
  SingularMomentSystem,
  NonConvexAtNode,
  NonpositiveLinearPart,
  // abreu
  DegenerateHessian,
  TooCloseToBoundary,
  // optimizer
  StartInadmissible,
  StalledLineSearch,
  // stability
  ClipFailure,
  OriginNotInterior,
  // io
  ParseError,
  OutOfGradientRange,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnboundedPolytope: return "UnboundedPolytope";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::NonDelzantVertex: return "NonDelzantVertex";
    case ErrorKind::RedundantFacet: return "RedundantFacet";
    case ErrorKind::InvalidPolytope: return "InvalidPolytope";
    case ErrorKind::InvalidLevel: return "InvalidLevel";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::BoundaryEvaluation: return "BoundaryEvaluation";
    case ErrorKind::NonInteriorPoint: return "NonInteriorPoint";
    case ErrorKind::MollifierTooWide: return "MollifierTooWide";
    case ErrorKind::NonConvexInput: return "NonConvexInput";
    case ErrorKind::SingularMomentSystem: return "SingularMomentSystem";
    case ErrorKind::NonConvexAtNode: return "NonConvexAtNode";
    case ErrorKind::NonpositiveLinearPart: return "NonpositiveLinearPart";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorKind::StartInadmissible: return "StartInadmissible";
    case ErrorKind::StalledLineSearch: return "StalledLineSearch";
    case ErrorKind::ClipFailure: return "ClipFailure";
    case ErrorKind::OriginNotInterior: return "OriginNotInterior";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OutOfGradientRange: return "OutOfGradientRange";
  }
  return "Unknown";
}

/// Domain error raised by every module. what() is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace abreu
