#pragma once

// Construction paths for values whose invariants hold by construction.
// Skips the tolerance checks the public constructors perform.

#include "qfb/qstate.hpp"

namespace qfb::detail {

struct TrustedFactory {
  static HermitianObservable hermitian(ComplexMatrix m) {
    return HermitianObservable(std::move(m), HermitianObservable::Trusted{});
  }
  static UnitaryOperator unitary(ComplexMatrix m) {
    return UnitaryOperator(std::move(m), UnitaryOperator::Trusted{});
  }
  static PureState pure(ComplexVector v) {
    return PureState(std::move(v), PureState::Trusted{});
  }
  static DensityMatrix state(ComplexMatrix m) {
    return DensityMatrix(std::move(m), DensityMatrix::Trusted{});
  }
};

}  // namespace qfb::detail
