// Forces every public header through the compiler as one translation unit.
#include "coggen/coggen.hpp"

namespace {
// Reference something from each layer so the object file is not empty.
[[maybe_unused]] const char* touch() { return coggen::to_string(coggen::mask_pattern::vd2d); }
}  // namespace
