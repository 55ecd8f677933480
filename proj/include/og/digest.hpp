#pragma once

#include <string>
#include <string_view>

namespace og {

/// Hex of the first 128 bits of SHA-256(bytes).
std::string digest_hex(std::string_view bytes);

}  // namespace og
