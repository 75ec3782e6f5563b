#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpnkit/value.hpp"

namespace cpn {

enum class ColorKind { Int, Real, String, Enumerated, Product };

struct ColorSet {
  std::string name;
  ColorKind kind = ColorKind::Int;
  std::vector<std::string> literals;  // Enumerated only, declaration order
  std::string left;                   // Product only
  std::string right;                  // Product only
  bool timed = false;

  friend bool operator==(const ColorSet&, const ColorSet&) = default;
};

/// Declaration-ordered collection of color sets. Immutable once handed to a net.
class ColorSetRegistry {
 public:
  /// Appends a declaration. Throws DuplicateColorSet, UnknownColorSet (product
  /// components must already exist) or DuplicateLiteral.
  void add(ColorSet cs);

  const ColorSet* find(std::string_view name) const;
  const ColorSet& at(std::string_view name) const;  // throws UnknownColorSet
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const std::vector<ColorSet>& sets() const noexcept { return sets_; }
  std::size_t size() const noexcept { return sets_.size(); }
  bool empty() const noexcept { return sets_.empty(); }

  /// True iff `value` inhabits the named set. The timed flag is irrelevant.
  /// Throws UnknownColorSet when the set is absent; never throws otherwise.
  bool is_member(std::string_view set_name, const Value& value) const;

  friend bool operator==(const ColorSetRegistry& a, const ColorSetRegistry& b) { return a.sets_ == b.sets_; }

 private:
  std::vector<ColorSet> sets_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses `colset NAME = ... [timed];` declarations into `into`, in order.
/// Non-fatal remarks (e.g. a timed product component) are appended to `warnings`.
void parse_colorset_definitions(std::string_view text, ColorSetRegistry& into,
                                std::vector<std::string>* warnings = nullptr);

ColorSetRegistry parse_colorset_definitions(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Canonical declaration text, e.g. "colset INT = int timed;".
std::string format_colorset(const ColorSet& cs);

/// A deterministic member of the set (0, 0.0, "", first literal, or a pair of those).
Value default_member(const ColorSetRegistry& registry, std::string_view set_name);

}  // namespace cpn
