#include "l2x/keypath.hpp"

#include "l2x/errors.hpp"

#include <charconv>

namespace l2x::keypath {

namespace {

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Index of the array element addressed by `segment`, or npos.
std::size_t element_index(const Json& array, std::string_view segment) {
  for (std::size_t i = 0; i < array.size(); ++i) {
    const Json& e = array[i];
    if (e.is_object()) {
      auto it = e.find("id");
      if (it != e.end() && it->is_string() && it->get_ref<const std::string&>() == segment)
        return i;
    }
  }
  std::size_t index = 0;
  if (parse_index(segment, index) && index < array.size()) return index;
  return std::string::npos;
}

}  // namespace

std::vector<std::string> split(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t dot = path.find('.', start);
    if (dot == std::string_view::npos) dot = path.size();
    out.emplace_back(path.substr(start, dot - start));
    start = dot + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out += '.';
    out += segments[i];
  }
  return out;
}

bool is_prefix(std::string_view prefix, std::string_view path) {
  if (prefix.size() > path.size()) return false;
  if (path.substr(0, prefix.size()) != prefix) return false;
  return prefix.size() == path.size() || path[prefix.size()] == '.';
}

const Json* find(const Json& doc, std::string_view path) {
  const Json* node = &doc;
  for (const std::string& seg : split(path)) {
    if (node->is_object()) {
      auto it = node->find(seg);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      std::size_t i = element_index(*node, seg);
      if (i == std::string::npos) return nullptr;
      node = &(*node)[i];
    } else {
      return nullptr;
    }
  }
  return node;
}

bool resolves(const Json& doc, std::string_view path) { return find(doc, path) != nullptr; }

void assign(Json& doc, std::string_view path, const Json& value) {
  const std::vector<std::string> segs = split(path);
  Json* node = &doc;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string& seg = segs[k];
    const bool last = k + 1 == segs.size();
    if (node->is_object()) {
      auto it = node->find(seg);
      if (it == node->end()) throw UnknownPath("key-path '" + std::string(path) + "' does not resolve");
      if (last) {
        *it = value;
        return;
      }
      node = &*it;
    } else if (node->is_array()) {
      if (seg == "+") {
        if (!last) throw UnknownPath("'+' must end key-path '" + std::string(path) + "'");
        node->push_back(value);
        return;
      }
      std::size_t i = element_index(*node, seg);
      if (i == std::string::npos) throw UnknownPath("key-path '" + std::string(path) + "' does not resolve");
      if (last) {
        if (value.is_null())
          node->erase(node->begin() + static_cast<std::ptrdiff_t>(i));
        else
          (*node)[i] = value;
        return;
      }
      node = &(*node)[i];
    } else {
      throw UnknownPath("key-path '" + std::string(path) + "' does not resolve");
    }
  }
  // empty path replaces the whole document
  doc = value;
}

}  // namespace l2x::keypath
