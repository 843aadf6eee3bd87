#ifndef ACTREC_MODEL_IO_HPP
#define ACTREC_MODEL_IO_HPP

#include <string>

#include "actrec/fusion.hpp"

namespace actrec {

inline constexpr int kBankFormatVersion = 1;

// Versioned JSON document with every parameter array at full double
// precision; save -> load -> save is byte identical.
void save_bank(const ModelBank& bank, const std::string& path);
std::string bank_to_json(const ModelBank& bank);

// Validates the version and every model invariant on load.
ModelBank load_bank(const std::string& path);
ModelBank bank_from_json(const std::string& text);

}  // namespace actrec

#endif
