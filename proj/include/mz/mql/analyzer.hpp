#pragma once

#include "mz/mql/ast.hpp"
#include "mz/mql/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mz::mql {

// Record scope a path is resolved against.
enum class Scope { Model, Dataset, Instance };

struct FieldInfo {
    std::string path;
    Scope scope = Scope::Model;
    ValueKind type = ValueKind::String;
    // Multi-valued fields compare existentially.
    bool multi = false;
};

// Every queryable path, per scope. MODELS additionally sees every DATASETS
// field under the "trained_on." prefix (multi-valued).
const std::vector<FieldInfo>& field_catalog();

class AnalysisError : public QueryError {
public:
    AnalysisError(const std::string& what, SourcePos pos, std::string field_path)
        : QueryError(what, pos), field_path_(std::move(field_path)) {}
    [[nodiscard]] const std::string& field_path() const { return field_path_; }

private:
    std::string field_path_;
};

// A query whose paths are bound and whose expressions type-check.
struct TypedQuery {
    Query query;
};

// Binds paths, type-checks comparisons, and checks metric() arguments
// (dataset and name required; hardware and slice optional; all strings) and
// quantifier placement (no nesting; metric() not allowed inside).
TypedQuery analyze(Query q);
TypedQuery analyze(std::string_view text);

}  // namespace mz::mql
