#pragma once

#include <stdexcept>
#include <string>

namespace convexa {

// Base class for all library failures. Every throw carries the condition name
// in the message so callers that only log `what()` still see the class.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CONVEXA_ERROR(Name)                              \
  struct Name final : Error {                            \
    explicit Name(const std::string& detail)             \
        : Error(std::string(#Name) + ": " + detail) {}   \
  }

CONVEXA_ERROR(NotARotation);
CONVEXA_ERROR(ProjectionMismatch);
CONVEXA_ERROR(BranchAmbiguous);
CONVEXA_ERROR(NearBoundary);
CONVEXA_ERROR(Degenerate);
CONVEXA_ERROR(NotMonotone);
CONVEXA_ERROR(NotBased);
CONVEXA_ERROR(NotLocallyConvex);
CONVEXA_ERROR(NotStablyConvex);
CONVEXA_ERROR(PointOutsideRegion);
CONVEXA_ERROR(NoConvergence);
CONVEXA_ERROR(WrongCell);
CONVEXA_ERROR(NotGraftable);
CONVEXA_ERROR(WindowOverflow);
CONVEXA_ERROR(WindowTooSmall);
CONVEXA_ERROR(ConvexityWindowNotFound);
CONVEXA_ERROR(WrongEndpoint);
CONVEXA_ERROR(NonTransversal);
CONVEXA_ERROR(TooCoarse);
CONVEXA_ERROR(FormatError);

#undef CONVEXA_ERROR

// Carries which loop bridge could not be fitted; callers retry with larger n.
struct BridgeFailed final : Error {
  int bridge_index;
  BridgeFailed(int j, const std::string& detail)
      : Error("BridgeFailed: bridge " + std::to_string(j) + ": " + detail),
        bridge_index(j) {}
};

// Raised when a curve fails the U_k normal-position requirements; `reason`
// distinguishes wrong crossing count, tangency, repeated points, etc.
struct NotInUk final : Error {
  std::string reason;
  NotInUk(const std::string& r, const std::string& detail)
      : Error("NotInUk(" + r + "): " + detail), reason(r) {}
};

}  // namespace convexa
