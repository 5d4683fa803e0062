#pragma once
// Field catalog with value extractors. Private to the query engine.

#include "mz/mql/analyzer.hpp"
#include "mz/store.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mz::mql::detail {

using Value = std::variant<std::string, double, bool>;

// nullopt marks a value that is missing from the metadata.
using Values = std::vector<std::optional<Value>>;

using Extractor = std::function<void(const Record&, const StoreView&, Values&)>;

struct CatalogField {
    FieldInfo info;
    Extractor extract;
};

const std::vector<CatalogField>& catalog();

// Index into catalog() for (scope, dotted path), if any.
std::optional<std::size_t> find_field(Scope scope, std::string_view path);

}  // namespace mz::mql::detail
