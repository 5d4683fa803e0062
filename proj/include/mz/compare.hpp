#pragma once
// Side-by-side metric matrix for a set of models.

#include "mz/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mz {

struct ComparisonRow {
    std::string metric;
    std::string dataset;
    std::string dataset_version;
    std::string hardware;
    std::optional<std::string> slice;
    bool higher_is_better = true;
    // Parallel to the compared models; the most recent run's value.
    std::vector<std::optional<double>> values;
};

struct Comparison {
    std::vector<ModelRecord> models;
    // Sorted by (metric, dataset, dataset_version, hardware, slice).
    std::vector<ComparisonRow> rows;
};

// Throws NotFoundError for an unknown model id.
Comparison compare_models(const StoreView& store, const std::vector<std::string>& model_ids);
Json to_json(const Comparison& c);

}  // namespace mz
