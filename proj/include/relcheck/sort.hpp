#pragma once

#include <optional>
#include <string_view>

namespace relcheck {

enum class Sort { Ob, Si };

inline const char* to_string(Sort s) { return s == Sort::Ob ? "Ob" : "Si"; }

inline std::optional<Sort> parse_sort(std::string_view s) {
  if (s == "Ob") return Sort::Ob;
  if (s == "Si") return Sort::Si;
  return std::nullopt;
}

}  // namespace relcheck
