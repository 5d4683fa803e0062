#include "mz/compare.hpp"

#include <map>
#include <tuple>

namespace mz {

namespace {

using RowKey = std::tuple<std::string, std::string, std::string, std::string, std::optional<std::string>>;

struct Cell {
    double value;
    Timestamp executed_at;
};

}  // namespace

Comparison compare_models(const StoreView& store, const std::vector<std::string>& model_ids) {
    Comparison c;
    for (const auto& id : model_ids) {
        const Record* r = store.find(Kind::Model, id);
        if (!r) throw NotFoundError("unknown model '" + id + "'");
        c.models.push_back(std::get<ModelRecord>(*r));
    }

    // Per row, per model column: the most recent value. Scan order is insertion
    // order, so >= lets the later insert win a timestamp tie.
    std::map<RowKey, std::pair<bool, std::vector<std::optional<Cell>>>> rows;
    for (std::size_t col = 0; col < c.models.size(); ++col) {
        for (const Record* r : store.scan(Kind::Evaluation, ScanFilter{IndexedField::ModelId, c.models[col].id})) {
            const auto& run = std::get<EvaluationRun>(*r);
            for (const auto& m : run.metrics) {
                RowKey key{m.name, run.dataset_id.id, run.dataset_id.version, run.hardware_id, m.slice};
                auto& row = rows[key];
                if (row.second.empty()) row.second.resize(c.models.size());
                row.first = m.higher_is_better;
                auto& cell = row.second[col];
                if (!cell || run.executed_at >= cell->executed_at) cell = Cell{m.value, run.executed_at};
            }
        }
    }
    for (auto& [key, row] : rows) {
        ComparisonRow out;
        std::tie(out.metric, out.dataset, out.dataset_version, out.hardware, out.slice) = key;
        out.higher_is_better = row.first;
        for (const auto& cell : row.second) {
            out.values.push_back(cell ? std::optional<double>(cell->value) : std::nullopt);
        }
        c.rows.push_back(std::move(out));
    }
    return c;
}

Json to_json(const Comparison& c) {
    Json models = Json::array();
    for (const auto& m : c.models) models.push_back({{"id", m.id}, {"name", m.name}, {"version", m.version}});
    Json rows = Json::array();
    for (const auto& r : c.rows) {
        Json values = Json::array();
        for (const auto& v : r.values) values.push_back(v ? Json(*v) : Json(nullptr));
        rows.push_back({{"metric", r.metric},
                        {"dataset", r.dataset},
                        {"dataset_version", r.dataset_version},
                        {"hardware", r.hardware},
                        {"slice", r.slice ? Json(*r.slice) : Json(nullptr)},
                        {"higher_is_better", r.higher_is_better},
                        {"values", std::move(values)}});
    }
    return Json{{"models", std::move(models)}, {"rows", std::move(rows)}};
}

}  // namespace mz
