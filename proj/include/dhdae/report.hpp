#ifndef DHDAE_REPORT_HPP
#define DHDAE_REPORT_HPP

#include "dhdae/matrix_core.hpp"

#include <string>

namespace dhdae {

enum class BoundKind { Exact, Lower, Upper };
enum class Scope { Full, JR };

std::string to_string(BoundKind k);
std::string to_string(Scope s);

/// Raised when a distance is requested for a system that does not satisfy
/// the theorem preconditions (typically robust asymptotic stability).
class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace dhdae

#endif
