#pragma once

#include <stdexcept>
#include <string>

namespace hhp {

enum class ErrorKind {
  TowerMismatch,
  DivisionByZero,
  TowerDepth,
  Domain,
  Window,
  Pole,
  DegenerateModel,
  NotApplicable,
  Obstruction,
  MissingEnergy,
  DegenerateParameter,
  DegenerateQuartic,
  NotAFunction,
  NoRealMotion,
  Singularity,
  StepUnderflow,
  Radius,
  Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Singular-but-incompatible resonance in the Laurent recursion.
class ObstructionError : public Error {
 public:
  ObstructionError(int order, std::string constraint)
      : Error(ErrorKind::Obstruction,
              "resonance at power " + std::to_string(order) + " is incompatible, constraint value " +
                  constraint),
        order_(order),
        constraint_(std::move(constraint)) {}
  int order() const noexcept { return order_; }
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  int order_;
  std::string constraint_;
};

// Raised when the integrator leaves the region where the flow is defined.
class SingularityError : public Error {
 public:
  SingularityError(double t, const std::string& what)
      : Error(ErrorKind::Singularity, what + " at t=" + std::to_string(t)), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace hhp
