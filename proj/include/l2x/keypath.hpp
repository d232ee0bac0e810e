#ifndef L2X_KEYPATH_HPP
#define L2X_KEYPATH_HPP

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace l2x::keypath {

using Json = nlohmann::json;

// Dotted key-paths over JSON documents. Inside arrays a segment is either a
// decimal index or, for arrays of objects carrying an "id", the element id.
// The segment "+" addresses a new element appended to an array.

std::vector<std::string> split(std::string_view path);
std::string join(const std::vector<std::string>& segments);

/// Segment-wise prefix test; a path is a prefix of itself.
bool is_prefix(std::string_view prefix, std::string_view path);

/// Returns nullptr when any segment fails to resolve.
const Json* find(const Json& doc, std::string_view path);
bool resolves(const Json& doc, std::string_view path);

/// Assigns in place; throws UnknownPath when the path does not resolve.
/// A null value on an array element removes it.
void assign(Json& doc, std::string_view path, const Json& value);

}  // namespace l2x::keypath

#endif  // L2X_KEYPATH_HPP
