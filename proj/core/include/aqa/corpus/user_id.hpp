#pragma once

#include <string>
#include <string_view>

namespace aqa::corpus {

inline constexpr std::string_view kDefaultUserIdKey = "aqa-user-id-v1";

/// Readable pseudonymous username (adjective + noun + number, e.g.
/// "lostclasp37") from a keyed hash of the client IP and request headers.
/// Total and deterministic; empty inputs are fine.
std::string derive_user_id(std::string_view ip, std::string_view headers,
                           std::string_view key = kDefaultUserIdKey);

}  // namespace aqa::corpus
