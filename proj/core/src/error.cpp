#include "nnlci/error.hpp"

#include <exception>

namespace nnlci {

namespace {

template <class E>
bool try_rethrow(const Error& e, const std::string& msg) {
  if (dynamic_cast<const E*>(&e) != nullptr) throw E(msg);
  return false;
}

}  // namespace

void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const Error& e) {
    const std::string msg = context + ": " + e.what();
    // Most derived types first; every concrete class derives from Error only.
    try_rethrow<NonPhysicalState>(e, msg);
    try_rethrow<DegenerateField>(e, msg);
    try_rethrow<OutOfRange>(e, msg);
    try_rethrow<VacuumFormation>(e, msg);
    try_rethrow<LengthMismatch>(e, msg);
    try_rethrow<GridMismatch>(e, msg);
    try_rethrow<VariantMismatch>(e, msg);
    try_rethrow<DivergedLoss>(e, msg);
    try_rethrow<CorruptModelFile>(e, msg);
    try_rethrow<CorruptDatasetFile>(e, msg);
    try_rethrow<ConfigError>(e, msg);
    throw Error(msg);
  }
}

}  // namespace nnlci
